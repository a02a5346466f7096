//! Premaniplexes: small colored multigraphs with darts and semi-edges.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::colorset::ColorSet;
use crate::error::{ForgeError, Result};
use crate::flagcore::Maniplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dart {
    pub id: usize,
    pub color: usize,
    pub from: usize,
    pub to: usize,
    pub inv: usize,
}

impl Dart {
    pub fn is_semi_edge(&self) -> bool {
        self.inv == self.id
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PremaniplexRepr", into = "PremaniplexRepr")]
pub struct Premaniplex {
    rank: usize,
    num_vertices: usize,
    darts: Vec<Dart>,
    at: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PremaniplexRepr {
    vertices: usize,
    darts: Vec<Dart>,
}

impl TryFrom<PremaniplexRepr> for Premaniplex {
    type Error = ForgeError;
    fn try_from(r: PremaniplexRepr) -> Result<Self> {
        Premaniplex::new(r.vertices, r.darts)
    }
}

impl From<Premaniplex> for PremaniplexRepr {
    fn from(p: Premaniplex) -> Self {
        PremaniplexRepr { vertices: p.num_vertices, darts: p.darts }
    }
}

/// Vertex labels of a two-vertex premaniplex.
pub const WHITE: usize = 0;
pub const BLACK: usize = 1;

impl Premaniplex {
    /// Validates dart structure and the premaniplex axioms. The rank is the
    /// number of colors in use, which must be `0..n`.
    pub fn new(num_vertices: usize, mut darts: Vec<Dart>) -> Result<Self> {
        let bad = |m: String| Err(ForgeError::Structural(m));
        if num_vertices == 0 {
            return bad("no vertices".into());
        }
        darts.sort_by_key(|d| d.id);
        for (k, d) in darts.iter().enumerate() {
            if d.id != k {
                return bad(format!("dart ids must be 0..{}", darts.len()));
            }
            if d.from >= num_vertices || d.to >= num_vertices || d.inv >= darts.len() {
                return bad(format!("dart {k} refers to a missing vertex or dart"));
            }
        }
        for d in &darts {
            let e = &darts[d.inv];
            if e.inv != d.id || e.color != d.color || e.from != d.to || e.to != d.from {
                return bad(format!("dart {} and its inverse {} do not match", d.id, d.inv));
            }
        }
        let rank = darts.iter().map(|d| d.color + 1).max().unwrap_or(0);
        let mut at = vec![usize::MAX; num_vertices * rank];
        for d in &darts {
            let slot = &mut at[d.from * rank + d.color];
            if *slot != usize::MAX {
                return bad(format!("vertex {} has two darts of color {}", d.from, d.color));
            }
            *slot = d.id;
        }
        if at.contains(&usize::MAX) {
            return bad("every vertex needs exactly one dart of each color".into());
        }
        let p = Premaniplex { rank, num_vertices, darts, at };
        for v in 0..num_vertices {
            for i in 0..rank {
                for j in i + 2..rank {
                    if p.follow(v, &[i, j, i, j]) != v {
                        return bad(format!("alternating ({i},{j}) path from vertex {v} is not closed"));
                    }
                }
            }
        }
        if p.component_of(0, ColorSet::full(rank)).iter().filter(|&&b| b).count() != num_vertices {
            return bad("premaniplex is not connected".into());
        }
        Ok(p)
    }

    /// `2^n_I`: two vertices, semi-edges of the colors in I at both, links of
    /// the other colors. Dart ids follow color order (white dart first).
    #[allow(non_snake_case)]
    pub fn build_2nI(n: usize, semi: ColorSet) -> Result<Self> {
        if n == 0 || !semi.is_subset_of(ColorSet::full(n)) {
            return Err(ForgeError::InvalidArgument(format!("I = {semi} is not a subset of [0,{}]", n.saturating_sub(1))));
        }
        if semi == ColorSet::full(n) {
            return Err(ForgeError::InvalidArgument("I must be a proper subset; the full set is the one-vertex type".into()));
        }
        let mut darts = Vec::new();
        for c in 0..n {
            let id = darts.len();
            if semi.contains(c) {
                darts.push(Dart { id, color: c, from: WHITE, to: WHITE, inv: id });
                darts.push(Dart { id: id + 1, color: c, from: BLACK, to: BLACK, inv: id + 1 });
            } else {
                darts.push(Dart { id, color: c, from: WHITE, to: BLACK, inv: id + 1 });
                darts.push(Dart { id: id + 1, color: c, from: BLACK, to: WHITE, inv: id });
            }
        }
        Premaniplex::new(2, darts)
    }

    /// One vertex with a semi-edge of every color.
    pub fn one_vertex(n: usize) -> Self {
        let darts = (0..n).map(|c| Dart { id: c, color: c, from: 0, to: 0, inv: c }).collect();
        Premaniplex::new(1, darts).expect("one-vertex premaniplex")
    }

    /// A maniplex seen as a premaniplex: one vertex per flag, dart id
    /// `flag * rank + color`.
    pub fn from_maniplex(m: &Maniplex) -> Result<Self> {
        let n = m.rank();
        let mut darts = Vec::with_capacity(m.num_flags() * n);
        for f in 0..m.num_flags() {
            for c in 0..n {
                let g = m.neighbor(f, c);
                darts.push(Dart { id: f * n + c, color: c, from: f, to: g, inv: g * n + c });
            }
        }
        Premaniplex::new(m.num_flags(), darts)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_darts(&self) -> usize {
        self.darts.len()
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn dart(&self, id: usize) -> &Dart {
        &self.darts[id]
    }

    pub fn dart_at(&self, v: usize, color: usize) -> usize {
        self.at[v * self.rank + color]
    }

    /// Vertex reached by following colors from `v`.
    pub fn follow(&self, v: usize, colors: &[usize]) -> usize {
        colors.iter().fold(v, |x, &c| self.darts[self.dart_at(x, c)].to)
    }

    pub fn component_of(&self, v: usize, colors: ColorSet) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices];
        seen[v] = true;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for c in colors.iter().filter(|&c| c < self.rank) {
                let y = self.darts[self.dart_at(x, c)].to;
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Colors of semi-edges at a vertex.
    pub fn semi_edge_colors(&self, v: usize) -> ColorSet {
        (0..self.rank).filter(|&c| self.darts[self.dart_at(v, c)].is_semi_edge()).collect()
    }

    /// Renames vertex v to `perm[v]`; dart ids are kept.
    pub fn relabel_vertices(&self, perm: &[usize]) -> Result<Self> {
        let darts = self
            .darts
            .iter()
            .map(|d| Dart { from: perm[d.from], to: perm[d.to], ..*d })
            .collect();
        Premaniplex::new(self.num_vertices, darts)
    }

    /// Color-preserving vertex bijection `self → other` if one exists.
    pub fn is_isomorphic(&self, other: &Premaniplex) -> Option<Vec<usize>> {
        if self.rank != other.rank || self.num_vertices != other.num_vertices {
            return None;
        }
        'anchor: for t in 0..other.num_vertices {
            let mut map = vec![usize::MAX; self.num_vertices];
            map[0] = t;
            let mut stack = vec![0];
            while let Some(x) = stack.pop() {
                for c in 0..self.rank {
                    let d = self.dart(self.dart_at(x, c));
                    let e = other.dart(other.dart_at(map[x], c));
                    if d.is_semi_edge() != e.is_semi_edge() {
                        continue 'anchor;
                    }
                    if map[d.to] == usize::MAX {
                        map[d.to] = e.to;
                        stack.push(d.to);
                    } else if map[d.to] != e.to {
                        continue 'anchor;
                    }
                }
            }
            let mut used = vec![false; other.num_vertices];
            for &m in &map {
                if used[m] {
                    continue 'anchor;
                }
                used[m] = true;
            }
            return Some(map);
        }
        None
    }

    /// Quotient by a vertex partition compatible with every color.
    pub fn quotient(&self, class_of: &[usize]) -> Result<Premaniplex> {
        let k = class_of.iter().max().map_or(0, |m| m + 1);
        let mut rep = vec![usize::MAX; k];
        for (v, &c) in class_of.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = v;
            }
        }
        let mut darts = Vec::new();
        let mut id_of = vec![usize::MAX; k * self.rank];
        for c in 0..k {
            for col in 0..self.rank {
                id_of[c * self.rank + col] = c * self.rank + col;
            }
        }
        for c in 0..k {
            for col in 0..self.rank {
                let v = rep[c];
                let target = class_of[self.darts[self.dart_at(v, col)].to];
                for w in (0..self.num_vertices).filter(|&w| class_of[w] == c) {
                    if class_of[self.darts[self.dart_at(w, col)].to] != target {
                        return Err(ForgeError::InvalidArgument("partition is not compatible with the colors".into()));
                    }
                }
                darts.push(Dart { id: id_of[c * self.rank + col], color: col, from: c, to: target, inv: id_of[target * self.rank + col] });
            }
        }
        Premaniplex::new(k, darts)
    }

    /// DOT rendering: semi-edges as self-loops labelled "semi", links once.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {name} {{");
        for v in 0..self.num_vertices {
            let _ = writeln!(s, "  v{v};");
        }
        for d in &self.darts {
            if d.is_semi_edge() {
                let _ = writeln!(s, "  v{} -- v{} [label=\"{} semi\", color={}];", d.from, d.from, d.color, dot_color(d.color));
            } else if d.id < d.inv {
                let _ = writeln!(s, "  v{} -- v{} [label=\"{}\", color={}];", d.from, d.to, d.color, dot_color(d.color));
            }
        }
        s.push_str("}\n");
        s
    }
}

fn dot_color(c: usize) -> &'static str {
    const PALETTE: [&str; 8] = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "gray"];
    PALETTE[c % PALETTE.len()]
}

/// Path as a reduced dart sequence: an adjacent `d d⁻¹` never appears.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub start: usize,
    pub darts: Vec<usize>,
}

impl Path {
    pub fn empty(start: usize) -> Self {
        Path { start, darts: Vec::new() }
    }

    pub fn end(&self, x: &Premaniplex) -> usize {
        self.darts.last().map_or(self.start, |&d| x.dart(d).to)
    }

    pub fn is_closed(&self, x: &Premaniplex) -> bool {
        self.end(x) == self.start
    }

    /// Appends a dart, cancelling it against its inverse.
    pub fn push(&mut self, x: &Premaniplex, d: usize) -> Result<()> {
        if x.dart(d).from != self.end(x) {
            return Err(ForgeError::InvalidArgument(format!("dart {d} does not start at vertex {}", self.end(x))));
        }
        if self.darts.last() == Some(&x.dart(d).inv) {
            self.darts.pop();
        } else {
            self.darts.push(d);
        }
        Ok(())
    }

    /// Path from raw darts, checking composability and reducing.
    pub fn from_darts(x: &Premaniplex, start: usize, darts: &[usize]) -> Result<Self> {
        let mut p = Path::empty(start);
        for &d in darts {
            if d >= x.num_darts() {
                return Err(ForgeError::InvalidArgument(format!("no dart {d}")));
            }
            p.push(x, d)?;
        }
        Ok(p)
    }

    /// The path following a color sequence.
    pub fn from_colors(x: &Premaniplex, start: usize, colors: &[usize]) -> Result<Self> {
        let mut p = Path::empty(start);
        for &c in colors {
            if c >= x.rank() {
                return Err(ForgeError::InvalidArgument(format!("color {c} out of range")));
            }
            let d = x.dart_at(p.end(x), c);
            p.push(x, d)?;
        }
        Ok(p)
    }

    pub fn inverse(&self, x: &Premaniplex) -> Path {
        Path { start: self.end(x), darts: self.darts.iter().rev().map(|&d| x.dart(d).inv).collect() }
    }

    pub fn concat(&self, x: &Premaniplex, other: &Path) -> Result<Path> {
        let mut p = self.clone();
        for &d in &other.darts {
            p.push(x, d)?;
        }
        Ok(p)
    }

    pub fn colors(&self, x: &Premaniplex) -> Vec<usize> {
        self.darts.iter().map(|&d| x.dart(d).color).collect()
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertex_types() {
        let x = Premaniplex::build_2nI(4, ColorSet::from_slice(&[1, 2])).unwrap();
        assert_eq!(x.num_vertices(), 2);
        assert_eq!(x.semi_edge_colors(WHITE), ColorSet::from_slice(&[1, 2]));
        assert!(!x.dart(x.dart_at(WHITE, 0)).is_semi_edge());
        assert!(!x.dart(x.dart_at(WHITE, 3)).is_semi_edge());
        let chiral = Premaniplex::build_2nI(3, ColorSet::EMPTY).unwrap();
        assert_eq!(chiral.darts().iter().filter(|d| d.is_semi_edge()).count(), 0);
        assert!(Premaniplex::build_2nI(3, ColorSet::full(3)).is_err());
    }

    #[test]
    fn reduced_paths() {
        let x = Premaniplex::build_2nI(3, ColorSet::single(1)).unwrap();
        let p = Path::from_colors(&x, WHITE, &[0, 0]).unwrap();
        assert!(p.is_empty());
        let q = Path::from_colors(&x, WHITE, &[1, 1, 2]).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.end(&x), BLACK);
    }

    #[test]
    fn json_shape() {
        let x = Premaniplex::build_2nI(3, ColorSet::single(1)).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.starts_with(r#"{"vertices":2,"darts":[{"id":0,"color":0,"from":0,"to":1,"inv":1}"#));
        let back: Premaniplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn rejects_open_alternating_path() {
        // colors 0 and 2 alternate around a hexagon
        let mut darts = Vec::new();
        let mut add = |c, a, b| {
            let id = darts.len();
            darts.push(Dart { id, color: c, from: a, to: b, inv: id + 1 });
            darts.push(Dart { id: id + 1, color: c, from: b, to: a, inv: id });
        };
        for k in 0..3 {
            add(0, 2 * k, 2 * k + 1);
            add(1, 2 * k, 2 * k + 1);
            add(2, 2 * k + 1, (2 * k + 2) % 6);
        }
        assert!(Premaniplex::new(6, darts).is_err());
    }

    #[test]
    fn swap_isomorphism() {
        let x = Premaniplex::build_2nI(4, ColorSet::from_slice(&[1, 2])).unwrap();
        let y = x.relabel_vertices(&[1, 0]).unwrap();
        assert_eq!(x.is_isomorphic(&y), Some(vec![0, 1]));
    }
}
