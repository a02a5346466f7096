//! Voltage assignments on premaniplexes and the groups and cosets they induce.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use crate::colorset::ColorSet;
use crate::error::{ForgeError, Result};
use crate::flagcore::Maniplex;
use crate::perm::{Coset, CosetSide, GroupElement, PermGroup, VoltageSet};
use crate::premaniplex::{Path, Premaniplex};

/// One group element per dart, with `ξ(d⁻¹) = ξ(d)⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoltageAssignment {
    degree: usize,
    voltages: Vec<GroupElement>,
}

impl Serialize for VoltageAssignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.voltages.len()))?;
        for (d, g) in self.voltages.iter().enumerate() {
            m.serialize_entry(&d.to_string(), g)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for VoltageAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw: BTreeMap<String, GroupElement> = BTreeMap::deserialize(d)?;
        let mut keyed = BTreeMap::new();
        for (k, v) in raw {
            let id: usize = k.parse().map_err(|_| D::Error::custom(format!("dart key {k:?} is not a number")))?;
            keyed.insert(id, v);
        }
        if keyed.keys().enumerate().any(|(i, &k)| i != k) {
            return Err(D::Error::custom("voltage keys must be the dart ids 0..k"));
        }
        let voltages: Vec<GroupElement> = keyed.into_values().collect();
        let degree = voltages.first().map_or(0, GroupElement::degree);
        if voltages.iter().any(|g| g.degree() != degree) {
            return Err(D::Error::custom("voltages of different degrees"));
        }
        Ok(VoltageAssignment { degree, voltages })
    }
}

impl VoltageAssignment {
    pub fn new(x: &Premaniplex, voltages: Vec<GroupElement>) -> Result<Self> {
        let degree = voltages.first().map_or(0, GroupElement::degree);
        let va = VoltageAssignment { degree, voltages };
        va.check_against(x)?;
        Ok(va)
    }

    /// Compatibility with a premaniplex: one voltage per dart, inverse darts
    /// carry inverse voltages.
    pub fn check_against(&self, x: &Premaniplex) -> Result<()> {
        if self.voltages.len() != x.num_darts() {
            return Err(ForgeError::Structural(format!(
                "{} voltages for {} darts",
                self.voltages.len(),
                x.num_darts()
            )));
        }
        if self.voltages.iter().any(|g| g.degree() != self.degree) {
            return Err(ForgeError::Structural("voltages of different degrees".into()));
        }
        for d in x.darts() {
            if self.voltages[d.inv] != self.voltages[d.id].inverse() {
                return Err(ForgeError::Structural(format!("voltage of dart {} is not inverse to that of {}", d.inv, d.id)));
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, dart: usize) -> &GroupElement {
        &self.voltages[dart]
    }

    pub fn voltages(&self) -> &[GroupElement] {
        &self.voltages
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.degree)
    }

    /// `ξ(d_1…d_k) = ξ(d_k)⋯ξ(d_1)`.
    pub fn path_voltage(&self, w: &Path) -> GroupElement {
        w.darts.iter().fold(self.identity(), |acc, &d| self.voltages[d].mul(&acc))
    }

    pub fn color_path_voltage(&self, x: &Premaniplex, start: usize, colors: &[usize]) -> Result<GroupElement> {
        Ok(self.path_voltage(&Path::from_colors(x, start, colors)?))
    }

    /// `Γ = ⟨ξ(D)⟩`.
    pub fn voltage_group(&self) -> PermGroup {
        PermGroup::from_elements(self.degree, self.voltages.iter())
    }

    pub fn with_voltages(&self, voltages: Vec<GroupElement>) -> Self {
        VoltageAssignment { degree: self.degree, voltages }
    }
}

/// BFS spanning tree of the subgraph spanned by some colors, from a root.
/// Darts are scanned by ascending color at each vertex.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub root: usize,
    pub colors: ColorSet,
    /// Dart used to reach each vertex, `None` for the root and unreached vertices.
    pub parent: Vec<Option<usize>>,
    pub reached: Vec<bool>,
}

impl SpanningTree {
    pub fn new(x: &Premaniplex, root: usize, colors: ColorSet) -> Self {
        let n = x.num_vertices();
        let mut parent = vec![None; n];
        let mut reached = vec![false; n];
        reached[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for c in colors.iter().filter(|&c| c < x.rank()) {
                let d = x.dart(x.dart_at(v, c));
                if !reached[d.to] {
                    reached[d.to] = true;
                    parent[d.to] = Some(d.id);
                    queue.push_back(d.to);
                }
            }
        }
        SpanningTree { root, colors, parent, reached }
    }

    pub fn is_tree_dart(&self, x: &Premaniplex, d: usize) -> bool {
        let dd = x.dart(d);
        self.parent[dd.to] == Some(d) || self.parent[dd.from] == Some(dd.inv)
    }

    /// Tree path from the root to `v`.
    pub fn path_to(&self, x: &Premaniplex, v: usize) -> Option<Path> {
        if !self.reached[v] {
            return None;
        }
        let mut rev = Vec::new();
        let mut cur = v;
        while let Some(d) = self.parent[cur] {
            rev.push(d);
            cur = x.dart(d).from;
        }
        rev.reverse();
        Some(Path { start: self.root, darts: rev })
    }

    /// Voltages `τ(v)` of the tree paths, in BFS order.
    pub fn tree_voltages(&self, x: &Premaniplex, xi: &VoltageAssignment) -> Vec<Option<GroupElement>> {
        let mut tau: Vec<Option<GroupElement>> = vec![None; x.num_vertices()];
        tau[self.root] = Some(xi.identity());
        let mut order: Vec<usize> = (0..x.num_vertices()).filter(|&v| self.reached[v]).collect();
        order.sort_by_key(|&v| self.depth(x, v));
        for v in order {
            if let Some(d) = self.parent[v] {
                let u = x.dart(d).from;
                let t = xi.get(d).mul(tau[u].as_ref().expect("parent first"));
                tau[v] = Some(t);
            }
        }
        tau
    }

    fn depth(&self, x: &Premaniplex, mut v: usize) -> usize {
        let mut k = 0;
        while let Some(d) = self.parent[v] {
            v = x.dart(d).from;
            k += 1;
        }
        k
    }

    /// Fundamental closed paths at the root: `T_u d T_w⁻¹` for each non-tree
    /// dart `d: u → w` in the colored subgraph. Each edge contributes once
    /// (the lower dart id), semi-edges always.
    pub fn fundamental_cycles(&self, x: &Premaniplex) -> Vec<Path> {
        let mut out = Vec::new();
        for d in x.darts() {
            if !self.colors.contains(d.color) || !self.reached[d.from] || self.is_tree_dart(x, d.id) {
                continue;
            }
            if !d.is_semi_edge() && d.inv < d.id {
                continue;
            }
            let tu = self.path_to(x, d.from).expect("reached");
            let tw = self.path_to(x, d.to).expect("reached");
            let mut p = tu;
            p.push(x, d.id).expect("composable");
            let p = p.concat(x, &tw.inverse(x)).expect("composable");
            out.push(p);
        }
        out
    }
}

/// Voltages of the fundamental cycles at the root of a tree.
pub fn fundamental_generators(x: &Premaniplex, xi: &VoltageAssignment, root: usize, colors: ColorSet) -> Vec<GroupElement> {
    let t = SpanningTree::new(x, root, colors);
    let tau = t.tree_voltages(x, xi);
    let mut out = Vec::new();
    for d in x.darts() {
        if !colors.contains(d.color) || !t.reached[d.from] || t.is_tree_dart(x, d.id) {
            continue;
        }
        if !d.is_semi_edge() && d.inv < d.id {
            continue;
        }
        let tu = tau[d.from].as_ref().expect("reached");
        let tw = tau[d.to].as_ref().expect("reached");
        out.push(tw.inverse().mul(xi.get(d.id)).mul(tu));
    }
    out
}

/// Voltages of closed paths at `a` using only `colors`.
pub fn restricted_voltage_group(x: &Premaniplex, xi: &VoltageAssignment, a: usize, colors: ColorSet) -> PermGroup {
    let gens = fundamental_generators(x, xi, a, colors);
    PermGroup::from_elements(xi.degree(), gens.iter())
}

/// Voltages of paths `a → b` using only `colors`: `τ(b)·H_a`, or empty.
pub fn restricted_voltage_coset(x: &Premaniplex, xi: &VoltageAssignment, a: usize, b: usize, colors: ColorSet) -> VoltageSet {
    let t = SpanningTree::new(x, a, colors);
    if !t.reached[b] {
        return VoltageSet::Empty;
    }
    let tau = t.tree_voltages(x, xi);
    let h = restricted_voltage_group(x, xi, a, colors);
    let rep = tau[b].clone().expect("reached");
    VoltageSet::Coset(Coset::new(rep, Arc::new(h), CosetSide::RepFirst))
}

/// Gauge change making every dart of the full-color BFS tree from vertex 0
/// carry the identity. Returns the new assignment and whether it changed.
pub fn gauge_normalize(x: &Premaniplex, xi: &VoltageAssignment) -> (VoltageAssignment, bool) {
    let t = SpanningTree::new(x, 0, ColorSet::full(x.rank()));
    let tau = t.tree_voltages(x, xi);
    let mut volts = Vec::with_capacity(x.num_darts());
    for d in x.darts() {
        let tu = tau[d.from].as_ref().expect("connected");
        let tw = tau[d.to].as_ref().expect("connected");
        volts.push(tw.inverse().mul(xi.get(d.id)).mul(tu));
    }
    let changed = volts.as_slice() != xi.voltages();
    (xi.with_voltages(volts), changed)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Bullet {
    pub ok: bool,
    pub detail: Vec<String>,
}

impl Bullet {
    fn from(detail: Vec<String>) -> Self {
        Bullet { ok: detail.is_empty(), detail }
    }
}

/// Conditions under which the derived graph of `(X, ξ)` is a maniplex.
#[derive(Clone, Debug, Serialize)]
pub struct ManiplexCheck {
    pub gauge_applied: bool,
    pub generation: Bullet,
    pub semi_edges_order_two: Bullet,
    pub parallel_darts_distinct: Bullet,
    pub alternating_paths_trivial: Bullet,
}

impl ManiplexCheck {
    pub fn holds(&self) -> bool {
        self.generation.ok && self.semi_edges_order_two.ok && self.parallel_darts_distinct.ok && self.alternating_paths_trivial.ok
    }
}

pub fn check_derived_is_maniplex(x: &Premaniplex, xi: &VoltageAssignment) -> Result<ManiplexCheck> {
    xi.check_against(x)?;
    let (norm, gauge_applied) = gauge_normalize(x, xi);

    let gamma = xi.voltage_group();
    let loops = restricted_voltage_group(x, &norm, 0, ColorSet::full(x.rank()));
    let mut gen = Vec::new();
    if !loops.same_group(&gamma) {
        gen.push(format!("closed-path voltages have order {} but the voltages generate {}", loops.order(), gamma.order()));
    }

    let mut semi = Vec::new();
    for d in x.darts().iter().filter(|d| d.is_semi_edge()) {
        if !norm.get(d.id).has_order_two() {
            semi.push(format!("semi-edge dart {} (color {}) has a voltage of order other than two", d.id, d.color));
        }
    }

    let mut par = Vec::new();
    for d in x.darts() {
        for e in x.darts().iter().filter(|e| e.id > d.id && e.from == d.from && e.to == d.to) {
            if norm.get(d.id) == norm.get(e.id) {
                par.push(format!("parallel darts {} and {} carry the same voltage", d.id, e.id));
            }
        }
    }

    let mut alt = Vec::new();
    for v in 0..x.num_vertices() {
        for i in 0..x.rank() {
            for j in i + 2..x.rank() {
                let g = norm.color_path_voltage(x, v, &[i, j, i, j])?;
                if !g.is_identity() {
                    alt.push(format!("alternating ({i},{j}) path at vertex {v} has non-trivial voltage"));
                }
            }
        }
    }

    Ok(ManiplexCheck {
        gauge_applied,
        generation: Bullet::from(gen),
        semi_edges_order_two: Bullet::from(semi),
        parallel_darts_distinct: Bullet::from(par),
        alternating_paths_trivial: Bullet::from(alt),
    })
}

/// Materialized derived graph. Flag `v·|Γ| + k` is `(v, elements[k])`.
#[derive(Clone, Debug)]
pub struct DerivedGraph {
    pub maniplex: Maniplex,
    pub elements: Vec<GroupElement>,
    pub num_vertices: usize,
}

impl DerivedGraph {
    pub fn flag(&self, v: usize, k: usize) -> usize {
        v * self.elements.len() + k
    }

    pub fn fiber_of(&self, flag: usize) -> usize {
        flag / self.elements.len()
    }
}

pub fn derived_graph(x: &Premaniplex, xi: &VoltageAssignment, cap: u64) -> Result<DerivedGraph> {
    xi.check_against(x)?;
    let n = x.num_vertices() as u64;
    let elements = xi.voltage_group().elements(cap / n.max(1))?;
    let index: HashMap<&GroupElement, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let m = elements.len();
    let mut adj = vec![vec![0u32; x.num_vertices() * m]; x.rank()];
    for v in 0..x.num_vertices() {
        for c in 0..x.rank() {
            let d = x.dart(x.dart_at(v, c));
            let volt = xi.get(d.id);
            for (k, g) in elements.iter().enumerate() {
                let h = volt.mul(g);
                adj[c][v * m + k] = (d.to * m + index[&h]) as u32;
            }
        }
    }
    let maniplex = Maniplex::new(x.rank(), adj)?;
    Ok(DerivedGraph { maniplex, elements, num_vertices: x.num_vertices() })
}

/// Uniform-length random path from `start` over the given colors.
pub fn random_path<R: Rng + ?Sized>(x: &Premaniplex, start: usize, colors: ColorSet, len: usize, rng: &mut R) -> Path {
    let cs: Vec<usize> = colors.iter().filter(|&c| c < x.rank()).collect();
    let mut p = Path::empty(start);
    if cs.is_empty() {
        return p;
    }
    for _ in 0..len {
        let c = cs[rng.gen_range(0..cs.len())];
        let d = x.dart_at(p.end(x), c);
        p.push(x, d).expect("composable");
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn p(v: &[u32]) -> GroupElement {
        GroupElement::from_perm(Perm::from_images(v.to_vec()).unwrap())
    }

    /// Square {4} as one vertex with rotation-free voltages r0, r1 on 8 flags.
    fn square_one_vertex() -> (Premaniplex, VoltageAssignment) {
        let x = Premaniplex::one_vertex(2);
        // dihedral group of order 8 acting on itself: flags 0..7 around the square
        let r0 = p(&[1, 0, 3, 2, 5, 4, 7, 6]);
        let r1 = p(&[7, 2, 1, 4, 3, 6, 5, 0]);
        let xi = VoltageAssignment::new(&x, vec![r0, r1]).unwrap();
        (x, xi)
    }

    #[test]
    fn derived_square() {
        let (x, xi) = square_one_vertex();
        let chk = check_derived_is_maniplex(&x, &xi).unwrap();
        assert!(chk.holds(), "{chk:?}");
        let d = derived_graph(&x, &xi, 1000).unwrap();
        assert_eq!(d.maniplex.num_flags(), 8);
        assert!(d.maniplex.validate().is_valid());
    }

    #[test]
    fn inverse_darts_checked() {
        let x = Premaniplex::build_2nI(2, ColorSet::single(1)).unwrap();
        let a = p(&[1, 0, 2]);
        let b = p(&[1, 2, 0]);
        let bad = vec![a.clone(), a.clone(), b.clone(), b.clone()];
        assert!(VoltageAssignment::new(&x, bad).is_err());
    }

    #[test]
    fn json_keys_in_numeric_order() {
        let x = Premaniplex::one_vertex(12);
        let g = p(&[1, 0]);
        let xi = VoltageAssignment::new(&x, vec![g; 12]).unwrap();
        let s = serde_json::to_string(&xi).unwrap();
        let i2 = s.find("\"2\"").unwrap();
        let i10 = s.find("\"10\"").unwrap();
        assert!(i2 < i10);
        let back: VoltageAssignment = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xi);
    }

    #[test]
    fn gauge_keeps_closed_voltages() {
        let x = Premaniplex::build_2nI(3, ColorSet::single(1)).unwrap();
        let g = p(&[1, 2, 0, 3]);
        let h = p(&[0, 1, 3, 2]);
        let i = p(&[1, 0, 2, 3]);
        let vs = vec![g.clone(), g.inverse(), h.clone(), i.clone(), i.clone(), i.inverse()];
        let xi = VoltageAssignment::new(&x, vs).unwrap();
        let (norm, changed) = gauge_normalize(&x, &xi);
        assert!(changed);
        let t = SpanningTree::new(&x, 0, ColorSet::full(3));
        for d in x.darts() {
            if t.is_tree_dart(&x, d.id) {
                assert!(norm.get(d.id).is_identity());
            }
        }
        let a = restricted_voltage_group(&x, &xi, 0, ColorSet::full(3));
        let b = restricted_voltage_group(&x, &norm, 0, ColorSet::full(3));
        assert!(a.same_group(&b));
    }

    #[test]
    fn coset_members_are_path_voltages() {
        let x = Premaniplex::build_2nI(3, ColorSet::single(1)).unwrap();
        let g = p(&[1, 2, 0, 3]);
        let h = p(&[0, 1, 3, 2]);
        let i = p(&[1, 0, 2, 3]);
        let vs = vec![g.clone(), g.inverse(), h.clone(), i.clone(), i.clone(), i.inverse()];
        let xi = VoltageAssignment::new(&x, vs).unwrap();
        let set = restricted_voltage_coset(&x, &xi, 0, 1, ColorSet::from_slice(&[0, 1]));
        let w = Path::from_colors(&x, 0, &[1, 0, 1, 0, 1, 0]).unwrap();
        assert_eq!(w.end(&x), 1);
        assert!(set.contains(&xi.path_voltage(&w)));
        let none = restricted_voltage_coset(&x, &xi, 0, 1, ColorSet::single(1));
        assert!(none.is_empty());
    }
}
