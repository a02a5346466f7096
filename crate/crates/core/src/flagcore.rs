//! Maniplexes as edge-colored flag graphs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::colorset::ColorSet;
use crate::error::{ForgeError, Result};
use crate::perm::Perm;

/// Rank-n flag graph: `adj[i][Φ] = Φ^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ManiplexRepr", into = "ManiplexRepr")]
pub struct Maniplex {
    rank: usize,
    adj: Vec<Vec<u32>>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ManiplexRepr {
    rank: usize,
    num_flags: usize,
    adj: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<ManiplexRepr> for Maniplex {
    type Error = ForgeError;
    fn try_from(r: ManiplexRepr) -> Result<Self> {
        if r.adj.iter().any(|a| a.len() != r.num_flags) {
            return Err(ForgeError::Structural("adjacency length differs from num_flags".into()));
        }
        let mut m = Maniplex::new(r.rank, r.adj)?;
        if let Some(l) = r.labels {
            m = m.with_labels(l)?;
        }
        Ok(m)
    }
}

impl From<Maniplex> for ManiplexRepr {
    fn from(m: Maniplex) -> Self {
        ManiplexRepr { rank: m.rank, num_flags: m.num_flags(), adj: m.adj, labels: m.labels }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    FixedPoint { color: usize, flag: usize },
    NotInvolution { color: usize, flag: usize },
    MultiEdge { colors: (usize, usize), flag: usize },
    NonCommuting { colors: (usize, usize), flag: usize },
    Disconnected { components: usize },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Flags grouped into faces of one rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacePartition {
    pub rank: usize,
    pub face_of: Vec<u32>,
    pub faces: Vec<Vec<u32>>,
}

impl FacePartition {
    pub fn count(&self) -> usize {
        self.faces.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlagColor {
    White,
    Black,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagColoring {
    pub color: Vec<FlagColor>,
}

impl FlagColoring {
    pub fn is_white(&self, flag: usize) -> bool {
        self.color[flag] == FlagColor::White
    }

    pub fn white_flags(&self) -> Vec<usize> {
        (0..self.color.len()).filter(|&f| self.is_white(f)).collect()
    }
}

impl Maniplex {
    /// Checks only that every color is a permutation of a common flag set.
    pub fn new(rank: usize, adj: Vec<Vec<u32>>) -> Result<Self> {
        if rank == 0 || adj.len() != rank {
            return Err(ForgeError::Structural(format!(
                "rank {rank} with {} adjacency arrays",
                adj.len()
            )));
        }
        let n = adj[0].len();
        if n == 0 {
            return Err(ForgeError::Structural("no flags".into()));
        }
        for (i, a) in adj.iter().enumerate() {
            if a.len() != n {
                return Err(ForgeError::Structural(format!("color {i} has {} entries, expected {n}", a.len())));
            }
            Perm::from_images(a.clone())
                .map_err(|_| ForgeError::Structural(format!("color {i} is not a permutation")))?;
        }
        Ok(Maniplex { rank, adj, labels: None })
    }

    pub fn from_perms(perms: &[Perm]) -> Result<Self> {
        Maniplex::new(perms.len(), perms.iter().map(|p| p.images().to_vec()).collect())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_flags() {
            return Err(ForgeError::Structural("label count differs from flag count".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_flags(&self) -> usize {
        self.adj[0].len()
    }

    pub fn adj(&self, color: usize) -> &[u32] {
        &self.adj[color]
    }

    #[inline]
    pub fn neighbor(&self, flag: usize, color: usize) -> usize {
        self.adj[color][flag] as usize
    }

    /// `r_i` as a permutation of flags.
    pub fn r(&self, color: usize) -> Perm {
        Perm::from_images_unchecked(self.adj[color].clone())
    }

    pub fn generators(&self) -> Vec<Perm> {
        (0..self.rank).map(|i| self.r(i)).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.num_flags();
        let mut v = Vec::new();
        for i in 0..self.rank {
            for f in 0..n {
                let g = self.neighbor(f, i);
                if g == f {
                    v.push(Violation::FixedPoint { color: i, flag: f });
                } else if self.neighbor(g, i) != f {
                    v.push(Violation::NotInvolution { color: i, flag: f });
                }
            }
        }
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                for f in 0..n {
                    let a = self.neighbor(f, i);
                    if a == self.neighbor(f, j) && a != f {
                        v.push(Violation::MultiEdge { colors: (i, j), flag: f });
                    }
                    if j > i + 1 && self.neighbor(a, j) != self.neighbor(self.neighbor(f, j), i) {
                        v.push(Violation::NonCommuting { colors: (i, j), flag: f });
                    }
                }
            }
        }
        let (_, count) = self.components(ColorSet::full(self.rank));
        if count != 1 {
            v.push(Violation::Disconnected { components: count });
        }
        ValidationReport { violations: v }
    }

    pub fn dual(&self) -> Maniplex {
        let adj = (0..self.rank).map(|i| self.adj[self.rank - 1 - i].clone()).collect();
        Maniplex { rank: self.rank, adj, labels: self.labels.clone() }
    }

    /// Components of the subgraph using only `colors`, numbered in order of
    /// their smallest flag.
    pub fn components(&self, colors: ColorSet) -> (Vec<u32>, usize) {
        let n = self.num_flags();
        let mut label = vec![u32::MAX; n];
        let cols: Vec<usize> = colors.iter().filter(|&c| c < self.rank).collect();
        let mut count = 0u32;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &c in &cols {
                    let y = self.neighbor(x, c);
                    if label[y] == u32::MAX {
                        label[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    pub fn partition(&self, colors: ColorSet, rank: usize) -> FacePartition {
        let (face_of, count) = self.components(colors);
        let mut faces = vec![Vec::new(); count];
        for (f, &c) in face_of.iter().enumerate() {
            faces[c as usize].push(f as u32);
        }
        FacePartition { rank, face_of, faces }
    }

    /// The i-faces: components avoiding color i.
    pub fn i_faces(&self, i: usize) -> Result<FacePartition> {
        if i >= self.rank {
            return Err(ForgeError::InvalidArgument(format!("face rank {i} out of range for rank {}", self.rank)));
        }
        Ok(self.partition(ColorSet::full(self.rank).without(i), i))
    }

    pub fn facets(&self) -> FacePartition {
        self.i_faces(self.rank - 1).expect("rank ≥ 1")
    }

    /// Coloring where color i flips iff `i ∈ flip`, with flag 0 white.
    pub fn two_coloring(&self, flip: ColorSet) -> Option<FlagColoring> {
        let n = self.num_flags();
        let mut col: Vec<Option<bool>> = vec![None; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if col[s].is_some() {
                continue;
            }
            col[s] = Some(false);
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                let cx = col[x].unwrap();
                for i in 0..self.rank {
                    let y = self.neighbor(x, i);
                    let want = cx ^ flip.contains(i);
                    match col[y] {
                        None => {
                            col[y] = Some(want);
                            queue.push_back(y);
                        }
                        Some(c) if c != want => return None,
                        _ => {}
                    }
                }
            }
        }
        let color = col
            .into_iter()
            .map(|c| if c.unwrap() { FlagColor::Black } else { FlagColor::White })
            .collect();
        Some(FlagColoring { color })
    }

    pub fn apply_word(&self, word: &[usize], flag: usize) -> Result<usize> {
        if flag >= self.num_flags() {
            return Err(ForgeError::InvalidArgument(format!("flag {flag} out of range")));
        }
        let mut f = flag;
        for &c in word {
            if c >= self.rank {
                return Err(ForgeError::InvalidArgument(format!("color {c} out of range")));
            }
            f = self.neighbor(f, c);
        }
        Ok(f)
    }

    /// The monodromy `r_{w1} r_{w2} ⋯` (w1 acts first).
    pub fn monodromy(&self, word: &[usize]) -> Result<Perm> {
        let images = (0..self.num_flags())
            .map(|f| self.apply_word(word, f).map(|x| x as u32))
            .collect::<Result<Vec<_>>>()?;
        Ok(Perm::from_images_unchecked(images))
    }

    /// Per-flag local invariant used to prune isomorphism anchors: the
    /// length of the `r_i r_j` cycle through the flag for each pair i<j.
    pub(crate) fn local_signature(&self) -> Vec<Vec<u32>> {
        let n = self.num_flags();
        let mut sig = vec![Vec::new(); n];
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                let mut len = vec![0u32; n];
                for s in 0..n {
                    if len[s] != 0 {
                        continue;
                    }
                    let mut cyc = vec![s];
                    let mut x = self.neighbor(self.neighbor(s, i), j);
                    while x != s {
                        cyc.push(x);
                        x = self.neighbor(self.neighbor(x, i), j);
                    }
                    for &c in &cyc {
                        len[c] = cyc.len() as u32;
                    }
                }
                for f in 0..n {
                    sig[f].push(len[f]);
                }
            }
        }
        sig
    }

    /// Color-preserving bijection `self → other` sending flag 0 to `anchor`,
    /// if one exists.
    pub fn anchored_map(&self, other: &Maniplex, anchor: usize) -> Option<Vec<u32>> {
        let n = self.num_flags();
        if other.rank != self.rank || other.num_flags() != n {
            return None;
        }
        let mut map = vec![u32::MAX; n];
        let mut used = vec![false; n];
        map[0] = anchor as u32;
        used[anchor] = true;
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            let fx = map[x] as usize;
            for i in 0..self.rank {
                let y = self.neighbor(x, i);
                let fy = other.neighbor(fx, i);
                if map[y] == u32::MAX {
                    if used[fy] {
                        return None;
                    }
                    map[y] = fy as u32;
                    used[fy] = true;
                    stack.push(y);
                } else if map[y] as usize != fy {
                    return None;
                }
            }
        }
        if map.contains(&u32::MAX) {
            return None;
        }
        Some(map)
    }

    /// Candidate images of flag 0 in `other` compatible with local invariants.
    pub(crate) fn anchor_candidates(&self, other: &Maniplex) -> Vec<usize> {
        let s1 = self.local_signature();
        let s2 = if std::ptr::eq(self, other) { s1.clone() } else { other.local_signature() };
        (0..other.num_flags()).filter(|&t| s2[t] == s1[0]).collect()
    }

    pub fn is_isomorphic(&self, other: &Maniplex) -> Option<Vec<u32>> {
        if self.rank != other.rank || self.num_flags() != other.num_flags() {
            return None;
        }
        let cands = self.anchor_candidates(other);
        cands.par_iter().find_map_first(|&t| self.anchored_map(other, t))
    }

    /// Relabels flags: new id of flag f is `perm[f]`.
    pub fn relabel(&self, perm: &Perm) -> Result<Maniplex> {
        if perm.degree() != self.num_flags() {
            return Err(ForgeError::InvalidArgument("relabeling of wrong size".into()));
        }
        let inv = perm.inverse();
        let adj = (0..self.rank)
            .map(|i| {
                (0..self.num_flags())
                    .map(|nf| perm.image(self.neighbor(inv.image(nf), i)) as u32)
                    .collect()
            })
            .collect();
        Ok(Maniplex { rank: self.rank, adj, labels: None })
    }

    /// Restriction to a union of components of `colors`, relabeled densely
    /// in increasing flag order. Used for facets and other sections.
    pub fn sub_maniplex(&self, flags: &[u32], colors: &[usize]) -> Result<Maniplex> {
        let mut index = vec![u32::MAX; self.num_flags()];
        for (k, &f) in flags.iter().enumerate() {
            index[f as usize] = k as u32;
        }
        let mut adj = Vec::new();
        for &c in colors {
            let mut a = Vec::with_capacity(flags.len());
            for &f in flags {
                let g = index[self.neighbor(f as usize, c)];
                if g == u32::MAX {
                    return Err(ForgeError::InvalidArgument("flag set not closed under colors".into()));
                }
                a.push(g);
            }
            adj.push(a);
        }
        Maniplex::new(colors.len(), adj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octagon() -> Maniplex {
        // flags 0..8 around the square, r0 pairs (0,1),(2,3)..., r1 pairs (1,2),...,(7,0)
        let r0 = (0..8u32).map(|f| f ^ 1).collect();
        let r1 = (0..8u32).map(|f| if f % 2 == 1 { (f + 1) % 8 } else { (f + 7) % 8 }).collect();
        Maniplex::new(2, vec![r0, r1]).unwrap()
    }

    #[test]
    fn octagon_is_valid() {
        assert!(octagon().validate().is_valid());
    }

    #[test]
    fn structural_error_is_distinct() {
        assert!(matches!(Maniplex::new(1, vec![vec![0, 0]]), Err(ForgeError::Structural(_))));
    }

    #[test]
    fn multi_edge_reported() {
        let r = vec![1, 0, 3, 2];
        let m = Maniplex::new(2, vec![r.clone(), r]).unwrap();
        let rep = m.validate();
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::MultiEdge { .. })));
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::Disconnected { components: 2 })));
    }

    #[test]
    fn faces_of_square() {
        let m = octagon();
        assert_eq!(m.i_faces(0).unwrap().count(), 4);
        assert_eq!(m.i_faces(1).unwrap().count(), 4);
        assert!(m.i_faces(2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = octagon();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with(r#"{"rank":2,"num_flags":8,"adj":"#));
        let back: Maniplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Maniplex>(r#"{"rank":1,"num_flags":2,"adj":[[0,0]]}"#).is_err());
    }

    #[test]
    fn coloring() {
        let m = octagon();
        let c = m.two_coloring(ColorSet::single(0)).unwrap();
        assert!(c.is_white(0) && !c.is_white(1) && !c.is_white(2));
        let all_white = m.two_coloring(ColorSet::EMPTY).unwrap();
        assert_eq!(all_white.white_flags().len(), 8);
    }

    #[test]
    fn words() {
        let m = octagon();
        assert_eq!(m.apply_word(&[], 3).unwrap(), 3);
        assert_eq!(m.apply_word(&[1, 1], 3).unwrap(), 3);
        assert!(m.apply_word(&[2], 0).is_err());
    }
}
