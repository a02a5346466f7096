//! Face posets, the direct polytopality oracle, closures and lattice checks.

use bitvec::prelude::*;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

use crate::colorset::ColorSet;
use crate::error::{ForgeError, Result};
use crate::flagcore::Maniplex;

type Bits = BitVec<u64, Lsb0>;

/// Ranked poset with least face (id 0) and greatest face (last id), stored
/// as covering lists between consecutive ranks.
#[derive(Clone, Debug)]
pub struct FacePoset {
    rank: usize,
    face_rank: Vec<i32>,
    by_rank: Vec<Vec<usize>>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    up_sets: Vec<Bits>,
    down_sets: Vec<Bits>,
    flag_of_face: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PosetDump {
    pub rank: usize,
    pub faces: Vec<Vec<usize>>,
    pub covers: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiamondViolation {
    pub lower: usize,
    pub upper: usize,
    pub between: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiamondReport {
    pub violations: Vec<DiamondViolation>,
}

impl DiamondReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StrongConnectivityReport {
    pub flags: usize,
    pub failing_pairs: usize,
    /// Up to 16 failing pairs (flag indices of the poset flag graph).
    pub examples: Vec<(usize, usize)>,
}

impl StrongConnectivityReport {
    pub fn holds(&self) -> bool {
        self.failing_pairs == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Closure {
    pub facets: Vec<usize>,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    Join,
    Meet,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LatticeReport {
    pub pairs_checked: usize,
    pub failures: usize,
    /// Up to 16 pairs without a unique bound, with the bound that failed.
    pub examples: Vec<(usize, usize, BoundKind)>,
}

impl LatticeReport {
    pub fn is_lattice(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OracleVerdict {
    Polytope,
    NotPolytope { reasons: Vec<String> },
    Infeasible { flags: usize, cap: u64 },
}

impl OracleVerdict {
    pub fn is_polytope(&self) -> bool {
        matches!(self, OracleVerdict::Polytope)
    }
}

impl FacePoset {
    /// Builds from ranks and upward covers. Face 0 must be the unique face of
    /// rank −1 and the last face the unique face of rank `rank`.
    pub fn from_covers(rank: usize, face_rank: Vec<i32>, up: Vec<Vec<usize>>) -> Result<Self> {
        let nf = face_rank.len();
        if nf < 2 || up.len() != nf {
            return Err(ForgeError::Structural("poset needs a least and a greatest face".into()));
        }
        if face_rank[0] != -1 || face_rank[nf - 1] != rank as i32 {
            return Err(ForgeError::Structural("face 0 must have rank -1 and the last face rank n".into()));
        }
        if face_rank.iter().filter(|&&r| r == -1).count() != 1 || face_rank.iter().filter(|&&r| r == rank as i32).count() != 1 {
            return Err(ForgeError::Structural("least and greatest faces must be unique".into()));
        }
        let mut by_rank = vec![Vec::new(); rank + 2];
        for (f, &r) in face_rank.iter().enumerate() {
            if r < -1 || r > rank as i32 {
                return Err(ForgeError::Structural(format!("face {f} has rank {r}")));
            }
            by_rank[(r + 1) as usize].push(f);
        }
        let mut down = vec![Vec::new(); nf];
        for (f, ups) in up.iter().enumerate() {
            for &g in ups {
                if g >= nf || face_rank[g] != face_rank[f] + 1 {
                    return Err(ForgeError::Structural(format!("cover {f} -> {g} does not raise rank by one")));
                }
                down[g].push(f);
            }
        }
        let mut up = up;
        for v in up.iter_mut().chain(down.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        let mut up_sets: Vec<Bits> = vec![bitvec![u64, Lsb0; 0; nf]; nf];
        for r in (0..rank + 2).rev() {
            for &f in &by_rank[r] {
                let mut s = bitvec![u64, Lsb0; 0; nf];
                s.set(f, true);
                for &g in &up[f] {
                    s |= &up_sets[g];
                }
                up_sets[f] = s;
            }
        }
        let mut down_sets: Vec<Bits> = vec![bitvec![u64, Lsb0; 0; nf]; nf];
        for r in 0..rank + 2 {
            for &f in &by_rank[r] {
                let mut s = bitvec![u64, Lsb0; 0; nf];
                s.set(f, true);
                for &g in &down[f] {
                    s |= &down_sets[g];
                }
                down_sets[f] = s;
            }
        }
        Ok(FacePoset { rank, face_rank, by_rank, up, down, up_sets, down_sets, flag_of_face: None })
    }

    /// Builds from proper faces: `counts[r]` faces of rank r for r in
    /// `0..rank`, and covers `(lower, upper)` given as `(rank, index)` pairs.
    /// The least and greatest faces are added.
    pub fn from_proper_faces(rank: usize, counts: &[usize], covers: &[((usize, usize), (usize, usize))]) -> Result<Self> {
        if counts.len() != rank {
            return Err(ForgeError::Structural("one face count per proper rank".into()));
        }
        let mut offset = vec![1usize];
        for &c in counts {
            offset.push(offset.last().unwrap() + c);
        }
        let top = *offset.last().unwrap();
        let mut face_rank = vec![-1];
        for (r, &c) in counts.iter().enumerate() {
            face_rank.extend(std::iter::repeat(r as i32).take(c));
        }
        face_rank.push(rank as i32);
        let mut up = vec![Vec::new(); top + 1];
        if rank == 0 {
            up[0].push(top);
        }
        for i in 0..counts.first().copied().unwrap_or(0) {
            up[0].push(offset[0] + i);
        }
        if rank > 0 {
            for i in 0..counts[rank - 1] {
                up[offset[rank - 1] + i].push(top);
            }
        }
        for &((r1, i1), (r2, i2)) in covers {
            if r1 + 1 != r2 || r2 >= rank || i1 >= counts[r1] || i2 >= counts[r2] {
                return Err(ForgeError::Structural(format!("bad cover ({r1},{i1}) -> ({r2},{i2})")));
            }
            up[offset[r1] + i1].push(offset[r2] + i2);
        }
        FacePoset::from_covers(rank, face_rank, up)
    }

    /// Face poset of a maniplex: i-faces are components avoiding color i,
    /// incident when they share a flag.
    pub fn from_maniplex(m: &Maniplex) -> Self {
        let n = m.rank();
        let parts: Vec<_> = (0..n).map(|i| m.i_faces(i).expect("in range")).collect();
        let mut offset = vec![1usize];
        for p in &parts {
            offset.push(offset.last().unwrap() + p.count());
        }
        let top = *offset.last().unwrap();
        let mut face_rank = vec![-1];
        for (i, p) in parts.iter().enumerate() {
            face_rank.extend(std::iter::repeat(i as i32).take(p.count()));
        }
        face_rank.push(n as i32);
        let mut up = vec![Vec::new(); top + 1];
        up[0] = (offset[0]..offset[1]).collect();
        for f in offset[n - 1]..offset[n] {
            up[f].push(top);
        }
        let mut flag_of_face = vec![vec![0u32; n]; m.num_flags()];
        for flag in 0..m.num_flags() {
            for i in 0..n {
                flag_of_face[flag][i] = (offset[i] + parts[i].face_of[flag] as usize) as u32;
            }
            for i in 0..n.saturating_sub(1) {
                let a = flag_of_face[flag][i] as usize;
                let b = flag_of_face[flag][i + 1] as usize;
                up[a].push(b);
            }
        }
        let mut p = FacePoset::from_covers(n, face_rank, up).expect("maniplex poset is well formed");
        p.flag_of_face = Some(flag_of_face);
        p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_faces(&self) -> usize {
        self.face_rank.len()
    }

    pub fn least(&self) -> usize {
        0
    }

    pub fn greatest(&self) -> usize {
        self.face_rank.len() - 1
    }

    pub fn face_rank(&self, f: usize) -> i32 {
        self.face_rank[f]
    }

    /// Faces of rank r, for r in −1..=n.
    pub fn faces_of_rank(&self, r: i32) -> &[usize] {
        &self.by_rank[(r + 1) as usize]
    }

    /// Face counts for ranks −1..=n.
    pub fn face_counts(&self) -> Vec<usize> {
        self.by_rank.iter().map(Vec::len).collect()
    }

    pub fn facets(&self) -> &[usize] {
        self.faces_of_rank(self.rank as i32 - 1)
    }

    pub fn up_covers(&self, f: usize) -> &[usize] {
        &self.up[f]
    }

    pub fn down_covers(&self, f: usize) -> &[usize] {
        &self.down[f]
    }

    /// Face of rank i on a maniplex flag (posets built from maniplexes only).
    pub fn flag_face(&self, flag: usize, i: usize) -> Option<usize> {
        self.flag_of_face.as_ref().map(|t| t[flag][i] as usize)
    }

    pub fn leq(&self, f: usize, g: usize) -> bool {
        self.up_sets[f][g]
    }

    pub fn lt(&self, f: usize, g: usize) -> bool {
        f != g && self.leq(f, g)
    }

    pub fn dump(&self) -> PosetDump {
        PosetDump { rank: self.rank, faces: self.by_rank.clone(), covers: self.up.clone() }
    }

    /// Every maximal chain has n+2 faces: no proper face is maximal or minimal.
    pub fn is_flagged(&self) -> bool {
        let top = self.greatest();
        (0..self.num_faces()).all(|f| (f == top || !self.up[f].is_empty()) && (f == 0 || !self.down[f].is_empty()))
    }

    pub fn check_diamond(&self) -> DiamondReport {
        let mut violations = Vec::new();
        for f in 0..self.num_faces() {
            let mut count: HashMap<usize, usize> = HashMap::new();
            for &h in &self.up[f] {
                for &g in &self.up[h] {
                    *count.entry(g).or_default() += 1;
                }
            }
            let mut v: Vec<_> = count.into_iter().filter(|&(_, c)| c != 2).collect();
            v.sort_unstable();
            violations.extend(v.into_iter().map(|(g, c)| DiamondViolation { lower: f, upper: g, between: c }));
        }
        DiamondReport { violations }
    }

    /// Maximal chains as face lists indexed by rank+1, in lexicographic order.
    pub fn chains(&self, cap: u64) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut chain = vec![0usize];
        self.extend_chains(&mut chain, &mut out, cap)?;
        Ok(out)
    }

    fn extend_chains(&self, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: u64) -> Result<()> {
        let last = *chain.last().unwrap();
        if self.up[last].is_empty() {
            if out.len() as u64 >= cap {
                return Err(ForgeError::infeasible("poset flag enumeration", format!("> {cap} flags"), cap));
            }
            out.push(chain.clone());
            return Ok(());
        }
        for &g in &self.up[last] {
            chain.push(g);
            self.extend_chains(chain, out, cap)?;
            chain.pop();
        }
        Ok(())
    }

    /// Flag graph of a flagged diamond poset; color i swaps the rank-i face.
    pub fn flag_graph(&self, cap: u64) -> Result<(Maniplex, Vec<Vec<usize>>)> {
        if !self.is_flagged() {
            return Err(ForgeError::InvalidArgument("poset is not flagged".into()));
        }
        if !self.check_diamond().holds() {
            return Err(ForgeError::InvalidArgument("diamond condition fails; adjacent flags are not unique".into()));
        }
        let chains = self.chains(cap)?;
        let index: HashMap<&[usize], u32> = chains.iter().enumerate().map(|(k, c)| (c.as_slice(), k as u32)).collect();
        let n = self.rank;
        let mut adj = vec![vec![0u32; chains.len()]; n];
        for (k, c) in chains.iter().enumerate() {
            for i in 0..n {
                let (lo, hi, cur) = (c[i], c[i + 2], c[i + 1]);
                let other = self.up[lo]
                    .iter()
                    .copied()
                    .find(|&h| h != cur && self.up[h].contains(&hi))
                    .expect("diamond");
                let mut d = c.clone();
                d[i + 1] = other;
                adj[i][k] = index[d.as_slice()];
            }
        }
        Ok((Maniplex::new(n, adj)?, chains))
    }

    /// For every flag pair, a path changing only the ranks where they differ.
    pub fn check_strong_flag_connected(&self, cap: u64) -> Result<StrongConnectivityReport> {
        let (g, chains) = self.flag_graph(cap)?;
        let nflags = chains.len();
        if nflags as u64 > cap {
            return Err(ForgeError::infeasible("strong flag-connectivity", nflags, cap));
        }
        let n = self.rank;
        let labels: Vec<Vec<u32>> = (0..1u64 << n).map(|d| g.components(ColorSet(d)).0).collect();
        let fails: Vec<(usize, usize)> = (0..nflags)
            .into_par_iter()
            .flat_map_iter(|a| {
                let chains = &chains;
                let labels = &labels;
                (a + 1..nflags).filter_map(move |b| {
                    let mut d = 0u64;
                    for i in 0..n {
                        if chains[a][i + 1] != chains[b][i + 1] {
                            d |= 1 << i;
                        }
                    }
                    (labels[d as usize][a] != labels[d as usize][b]).then_some((a, b))
                })
            })
            .collect();
        Ok(StrongConnectivityReport {
            flags: nflags,
            failing_pairs: fails.len(),
            examples: fails.into_iter().take(16).collect(),
        })
    }

    pub fn closure(&self, f: usize) -> Closure {
        let facets = self.facets().iter().copied().filter(|&g| self.leq(f, g)).collect();
        Closure { facets, degenerate: f == self.least() || f == self.greatest() }
    }

    /// Least upper bound, if unique.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let common = self.up_sets[a].clone() & &self.up_sets[b];
        common.iter_ones().find(|&x| {
            let mut c = common.clone();
            c &= !self.up_sets[x].clone();
            c.not_any()
        })
    }

    /// Greatest lower bound, if unique.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let common = self.down_sets[a].clone() & &self.down_sets[b];
        common.iter_ones().find(|&x| {
            let mut c = common.clone();
            c &= !self.down_sets[x].clone();
            c.not_any()
        })
    }

    /// Meet of a non-empty set of faces.
    pub fn meet_all(&self, faces: &[usize]) -> Option<usize> {
        let mut it = faces.iter().copied();
        let first = it.next()?;
        it.try_fold(first, |acc, f| self.meet(acc, f))
    }

    pub fn lattice_check(&self) -> LatticeReport {
        let nf = self.num_faces();
        let mut rep = LatticeReport::default();
        for a in 0..nf {
            for b in a + 1..nf {
                rep.pairs_checked += 1;
                for (kind, ok) in [(BoundKind::Join, self.join(a, b).is_some()), (BoundKind::Meet, self.meet(a, b).is_some())] {
                    if !ok {
                        rep.failures += 1;
                        if rep.examples.len() < 16 {
                            rep.examples.push((a, b, kind));
                        }
                    }
                }
            }
        }
        rep
    }
}

/// The direct oracle: flagged, diamond, strongly flag-connected, and the
/// flag graph of the face poset is the maniplex itself.
pub fn is_polytope(m: &Maniplex, cap: u64) -> OracleVerdict {
    if m.num_flags() as u64 > cap {
        return OracleVerdict::Infeasible { flags: m.num_flags(), cap };
    }
    let p = FacePoset::from_maniplex(m);
    let mut reasons = Vec::new();
    if !p.is_flagged() {
        reasons.push("face poset is not flagged".to_string());
    }
    let d = p.check_diamond();
    if !d.holds() {
        reasons.push(format!("diamond condition fails on {} pairs", d.violations.len()));
        return OracleVerdict::NotPolytope { reasons };
    }
    match p.flag_graph(cap) {
        Ok((g, _)) => {
            if g.num_flags() != m.num_flags() || g.is_isomorphic(m).is_none() {
                reasons.push(format!(
                    "flag graph of the face poset ({} flags) is not isomorphic to the maniplex ({} flags)",
                    g.num_flags(),
                    m.num_flags()
                ));
            }
        }
        Err(e) => reasons.push(e.to_string()),
    }
    match p.check_strong_flag_connected(cap) {
        Ok(s) if !s.holds() => reasons.push(format!("{} flag pairs are not strongly connected", s.failing_pairs)),
        Ok(_) => {}
        Err(e) if e.is_infeasible() => return OracleVerdict::Infeasible { flags: m.num_flags(), cap },
        Err(e) => reasons.push(e.to_string()),
    }
    if reasons.is_empty() {
        OracleVerdict::Polytope
    } else {
        OracleVerdict::NotPolytope { reasons }
    }
}

/// The poset 2̂^P: faces (A,x) up to x ~ x' iff supp(x+x') ⊆ closure(A),
/// ordered by A < B and (A,x) ~ (A,y), plus a new greatest face.
#[derive(Clone, Debug)]
pub struct Hat2Poset {
    pub poset: FacePoset,
    /// For each face other than the new top: (face of P, canonical key).
    pub label: Vec<(usize, u64)>,
    index: HashMap<(usize, u64), usize>,
    facet_bit: HashMap<usize, u32>,
    closure_mask: Vec<u64>,
}

impl Hat2Poset {
    pub fn build(p: &FacePoset) -> Result<Self> {
        let facets = p.facets().to_vec();
        if facets.len() > 24 {
            return Err(ForgeError::infeasible("2̂^P poset", format!("2^{} facets", facets.len()), "2^24"));
        }
        let facet_bit: HashMap<usize, u32> = facets.iter().enumerate().map(|(k, &f)| (f, k as u32)).collect();
        let all = (1u64 << facets.len()) - 1;
        let closure_mask: Vec<u64> = (0..p.num_faces())
            .map(|f| p.closure(f).facets.iter().fold(0, |acc, g| acc | 1 << facet_bit[g]))
            .collect();
        let mut label = Vec::new();
        let mut face_rank = Vec::new();
        for r in -1..=p.rank() as i32 {
            for &a in p.faces_of_rank(r) {
                let free = all & !closure_mask[a];
                for key in submasks(free) {
                    label.push((a, key));
                    face_rank.push(r);
                }
            }
        }
        let top = label.len();
        face_rank.push(p.rank() as i32 + 1);
        let index: HashMap<(usize, u64), usize> = label.iter().enumerate().map(|(k, &l)| (l, k)).collect();
        let mut up = vec![Vec::new(); top + 1];
        for (id, &(a, key)) in label.iter().enumerate() {
            if p.face_rank(a) == p.rank() as i32 {
                up[id].push(top);
                continue;
            }
            for &b in p.up_covers(a) {
                let extra = closure_mask[a] & !closure_mask[b];
                for z in submasks(extra) {
                    up[id].push(index[&(b, key | z)]);
                }
            }
        }
        let poset = FacePoset::from_covers(p.rank() + 1, face_rank, up)?;
        Ok(Hat2Poset { poset, label, index, facet_bit, closure_mask })
    }

    /// Face id of the class of (a, x) where x is a facet bitmask of P.
    pub fn face(&self, a: usize, x: u64) -> usize {
        self.index[&(a, x & !self.closure_mask[a])]
    }

    fn facet_mask(&self, x: u64) -> Vec<usize> {
        self.facet_bit.iter().filter(|(_, &b)| x >> b & 1 == 1).map(|(&f, _)| f).collect()
    }

    /// True if some facet of 2̂^P lies above both faces.
    pub fn share_facet(&self, u: usize, v: usize) -> bool {
        let p = &self.poset;
        p.facets().iter().any(|&f| p.leq(u, f) && p.leq(v, f))
    }

    /// Vector of some facet of 2̂^P above both faces.
    fn common_facet_key(&self, u: usize, v: usize) -> Option<u64> {
        let p = &self.poset;
        let f = *p.facets().iter().find(|&&f| p.leq(u, f) && p.leq(v, f))?;
        Some(self.label[f].1)
    }

    /// `(A,x) ∨ (B,y) = (A∨B, x)`, for faces sharing a facet. The
    /// representatives are taken from a common facet (F,z), so that x = y = z;
    /// with arbitrary representatives the right side is not well defined
    /// (for A the least face, every x names the same face).
    pub fn formula_join(&self, base: &FacePoset, u: usize, v: usize) -> Option<usize> {
        let (&(a, _), &(b, _)) = (self.label.get(u)?, self.label.get(v)?);
        let z = self.common_facet_key(u, v)?;
        Some(self.face(base.join(a, b)?, z))
    }

    /// `(A,x) ∧ (B,y) = (C,x)` with C the meet of supp(x+y) ∪ {A,B}.
    pub fn formula_meet(&self, base: &FacePoset, u: usize, v: usize) -> Option<usize> {
        let (&(a, x), &(b, y)) = (self.label.get(u)?, self.label.get(v)?);
        let mut set = self.facet_mask(x ^ y);
        set.push(a);
        set.push(b);
        Some(self.face(base.meet_all(&set)?, x))
    }
}

fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask { None } else { Some(((cur | !mask).wrapping_add(1)) & mask) };
        Some(cur)
    })
}
