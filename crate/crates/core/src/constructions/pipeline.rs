use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::colorset::ColorSet;
use crate::error::{ForgeError, Result};
use crate::flagcore::{FlagColoring, Maniplex};
use crate::perm::{GroupElement, Perm};
use crate::premaniplex::{Premaniplex, BLACK, WHITE};
use crate::symmetry::AutGroup;
use crate::voltage::VoltageAssignment;

use super::eta::facet_separation;
use super::facet_sets::FacetContext;
use super::hat2::{Hat2Flag, Hat2Maniplex, Z2Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Xi,
    XiPrime,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "xi" => Ok(Variant::Xi),
            "xiprime" | "xi'" => Ok(Variant::XiPrime),
            _ => Err(format!("unknown variant {s:?}, expected xi or xiprime")),
        }
    }
}

/// Checks recorded while building an instance.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineChecks {
    pub eta_involutory: bool,
    pub eta_separates_facets: bool,
    /// Facets whose base edge comes from η rather than the frame rule.
    pub forced_facets: usize,
    /// Forced facets where the frame rule would have picked another edge.
    pub forced_overrides: usize,
    pub rho0_involutory: bool,
    pub rho0_choice_independent: bool,
    pub rho0_commutes_with_r0: bool,
    pub voltages_preserve_coloring: bool,
}

/// ξ or ξ′ on `2^{n+1}_I` over an explicit regular base of rank n with an
/// involutory facet-separating monodromy η.
#[derive(Clone, Debug)]
pub struct TwoOrbitInstance {
    pub base: Maniplex,
    pub semi: ColorSet,
    pub variant: Variant,
    pub coloring: FlagColoring,
    pub white: Vec<u32>,
    white_index: Vec<u32>,
    pub eta: Perm,
    pub facet_of: Vec<u32>,
    pub edge_of: Vec<u32>,
    /// Edge id chosen as base edge, per facet.
    pub base_edge: Vec<u32>,
    /// Smallest flag of each facet on its base edge.
    pub base_flag: Vec<u32>,
    pub rho0_hat: Perm,
    pub y_n: Perm,
    pub premaniplex: Premaniplex,
    /// Voltages on the white flags (the voltage group's point set).
    pub xi: VoltageAssignment,
    /// The same voltages as permutations of all flags.
    pub full: VoltageAssignment,
    pub checks: PipelineChecks,
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] as usize != r {
            r = self.0[r] as usize;
        }
        let mut c = x;
        while self.0[c] as usize != r {
            let nx = self.0[c] as usize;
            self.0[c] = r as u32;
            c = nx;
        }
        r
    }
}

/// Congruence generated by Φ ≡ Φr_{n−1} and closed under the r_i with
/// i < n−1. Its class of a flag picks one flag in each facet ("the same
/// position" in every facet). Returns a class id per flag.
pub fn facet_frame(m: &Maniplex) -> Vec<u32> {
    let n = m.rank();
    let mut uf = UnionFind::new(m.num_flags());
    let mut stack: Vec<(usize, usize)> = (0..m.num_flags()).map(|f| (f, m.neighbor(f, n - 1))).collect();
    while let Some((p, q)) = stack.pop() {
        let (a, b) = (uf.find(p), uf.find(q));
        if a == b {
            continue;
        }
        uf.0[a.max(b)] = a.min(b) as u32;
        for i in 0..n - 1 {
            stack.push((m.neighbor(p, i), m.neighbor(q, i)));
        }
    }
    (0..m.num_flags()).map(|f| uf.find(f) as u32).collect()
}

/// Facet automorphism sending `anchor` to `anchor r0`, propagated along the
/// colours inside the facet. Writes into `out`; errors when the facet is
/// not regular enough for the propagation to close up.
fn facet_reflection(m: &Maniplex, anchor: usize, out: &mut [u32]) -> Result<()> {
    let n = m.rank();
    out[anchor] = m.neighbor(anchor, 0) as u32;
    let mut stack = vec![anchor];
    while let Some(x) = stack.pop() {
        for c in 0..n - 1 {
            let y = m.neighbor(x, c);
            let img = m.neighbor(out[x] as usize, c) as u32;
            if out[y] == u32::MAX {
                out[y] = img;
                stack.push(y);
            } else if out[y] != img {
                return Err(ForgeError::Construction(format!("facet reflection inconsistent at flag {y}")));
            }
        }
    }
    Ok(())
}

fn reflections(m: &Maniplex, anchors: &[usize]) -> Result<Perm> {
    let mut out = vec![u32::MAX; m.num_flags()];
    for &a in anchors {
        facet_reflection(m, a, &mut out)?;
    }
    Perm::from_images(out).map_err(|_| ForgeError::Construction("facet reflections do not form a permutation".into()))
}

impl TwoOrbitInstance {
    pub fn build(base: &Maniplex, eta: &Perm, semi: ColorSet, variant: Variant) -> Result<Self> {
        Self::build_with_edges(base, eta, semi, variant, None)
    }

    /// As [`build`](Self::build), but with the base edge of each facet
    /// given explicitly (edge ids of the 1-face partition). Facets forced
    /// by η must agree with it.
    pub fn build_with_edges(base: &Maniplex, eta: &Perm, semi: ColorSet, variant: Variant, edges: Option<&[u32]>) -> Result<Self> {
        let n = base.rank();
        if n < 2 {
            return Err(ForgeError::InvalidArgument("base rank must be at least 2".into()));
        }
        if semi.contains(0) || semi.contains(n) || !semi.is_subset_of(ColorSet::full(n + 1)) {
            return Err(ForgeError::InvalidArgument(format!("I = {semi} must avoid colors 0 and {n}")));
        }
        if eta.degree() != base.num_flags() {
            return Err(ForgeError::InvalidArgument("η has the wrong degree".into()));
        }
        let flip = semi.complement(n);
        let coloring = base.two_coloring(flip).ok_or_else(|| {
            ForgeError::Construction(format!("base does not cover X without color {n}: no coloring flipping exactly {flip}"))
        })?;
        let white: Vec<u32> = (0..base.num_flags()).filter(|&f| coloring.is_white(f)).map(|f| f as u32).collect();
        let mut white_index = vec![u32::MAX; base.num_flags()];
        for (k, &f) in white.iter().enumerate() {
            white_index[f as usize] = k as u32;
        }

        let sep = facet_separation(base, eta);
        let eta_involutory = eta.is_involution();
        if !eta_involutory || !sep.holds() {
            return Err(ForgeError::Construction("η must be involutory and send the flags of each facet to distinct facets".into()));
        }

        let fac = base.facets();
        let facet_of = fac.face_of.clone();
        let edge_of = base.i_faces(1)?.face_of;
        let frame = facet_frame(base);
        let f0 = facet_of[0] as usize;
        let mut base_edge = vec![u32::MAX; fac.count()];
        for f in 0..base.num_flags() {
            if frame[f] == frame[0] {
                let slot = &mut base_edge[facet_of[f] as usize];
                if *slot != u32::MAX && *slot != edge_of[f] {
                    return Err(ForgeError::Construction("facet frame meets a facet twice".into()));
                }
                *slot = edge_of[f];
            }
        }
        if base_edge.contains(&u32::MAX) {
            return Err(ForgeError::Construction("facet frame misses a facet".into()));
        }
        let (mut forced, mut overrides) = (0, 0);
        for &psi in &fac.faces[f0] {
            let img = eta.image(psi as usize);
            let g = facet_of[img] as usize;
            if g == f0 && edge_of[img] != base_edge[f0] {
                return Err(ForgeError::Construction("η forces a second base edge on the base facet".into()));
            }
            forced += 1;
            if base_edge[g] != edge_of[img] {
                overrides += 1;
                base_edge[g] = edge_of[img];
            }
        }

        if let Some(given) = edges {
            if given.len() != fac.count() {
                return Err(ForgeError::InvalidArgument("one base edge per facet expected".into()));
            }
            for &psi in &fac.faces[f0] {
                let img = eta.image(psi as usize);
                if given[facet_of[img] as usize] != edge_of[img] {
                    return Err(ForgeError::InvalidArgument(format!("facet {} is forced by η to another base edge", facet_of[img])));
                }
            }
            for (k, face) in fac.faces.iter().enumerate() {
                if !face.iter().any(|&f| edge_of[f as usize] == given[k]) {
                    return Err(ForgeError::InvalidArgument(format!("edge {} does not lie in facet {k}", given[k])));
                }
            }
            base_edge = given.to_vec();
        }
        let mut first = vec![u32::MAX; fac.count()];
        let mut last = vec![u32::MAX; fac.count()];
        for f in 0..base.num_flags() {
            let k = facet_of[f] as usize;
            if edge_of[f] == base_edge[k] {
                if first[k] == u32::MAX {
                    first[k] = f as u32;
                }
                last[k] = f as u32;
            }
        }
        let anchors: Vec<usize> = first.iter().map(|&f| f as usize).collect();
        let rho0_hat = reflections(base, &anchors)?;
        let other: Vec<usize> = last.iter().map(|&f| f as usize).collect();
        let rho0_alt = reflections(base, &other)?;
        let r0 = base.r(0);
        let y_n = rho0_hat.then(&r0);

        let premaniplex = Premaniplex::build_2nI(n + 1, semi)?;
        let mut full = Vec::new();
        let mut restricted = Vec::new();
        let mut preserve = true;
        let id = Perm::identity(base.num_flags());
        for d in premaniplex.darts() {
            let c = d.color;
            let p = if c == 0 {
                id.clone()
            } else if c == n {
                y_n.clone()
            } else if d.is_semi_edge() {
                if d.from == WHITE {
                    base.r(c)
                } else {
                    r0.then(&base.r(c)).then(&r0)
                }
            } else if d.from == WHITE {
                r0.then(&base.r(c))
            } else {
                debug_assert_eq!(d.from, BLACK);
                base.r(c).then(&r0)
            };
            let s = c == n && variant == Variant::XiPrime;
            preserve &= (0..base.num_flags()).all(|f| coloring.color[f] == coloring.color[p.image(f)]);
            let imgs: Vec<u32> = white.iter().map(|&f| white_index[p.image(f as usize)]).collect();
            if imgs.contains(&u32::MAX) {
                return Err(ForgeError::Construction(format!("voltage of dart {} moves a white flag to a black one", d.id)));
            }
            restricted.push(GroupElement::new(Perm::from_images(imgs)?, s));
            full.push(GroupElement::new(p, s));
        }
        let xi = VoltageAssignment::new(&premaniplex, restricted)?;
        let full = VoltageAssignment::new(&premaniplex, full)?;

        let checks = PipelineChecks {
            eta_involutory,
            eta_separates_facets: sep.holds(),
            forced_facets: forced,
            forced_overrides: overrides,
            rho0_involutory: rho0_hat.is_involution(),
            rho0_choice_independent: rho0_alt == rho0_hat,
            rho0_commutes_with_r0: rho0_hat.then(&r0) == r0.then(&rho0_hat),
            voltages_preserve_coloring: preserve,
        };
        Ok(TwoOrbitInstance {
            base: base.clone(),
            semi,
            variant,
            coloring,
            white,
            white_index,
            eta: eta.clone(),
            facet_of,
            edge_of,
            base_edge,
            base_flag: first,
            rho0_hat,
            y_n,
            premaniplex,
            xi,
            full,
            checks,
        })
    }

    pub fn rank(&self) -> usize {
        self.base.rank() + 1
    }

    /// Restriction of a colour-preserving flag permutation to the white flags.
    pub fn restrict(&self, p: &Perm) -> Option<Perm> {
        let imgs: Vec<u32> = self.white.iter().map(|&f| self.white_index[p.image(f as usize)]).collect();
        if imgs.contains(&u32::MAX) {
            return None;
        }
        Perm::from_images(imgs).ok()
    }

    pub fn white_index(&self, flag: usize) -> Option<usize> {
        let k = self.white_index[flag];
        (k != u32::MAX).then_some(k as usize)
    }
}

/// `ξ` or `ξ′` for `2^{n+1}_I` over a base with η.
pub fn xi_assignment(base: &Maniplex, eta: &Perm, semi: ColorSet, variant: Variant) -> Result<(Premaniplex, VoltageAssignment)> {
    let inst = TwoOrbitInstance::build(base, eta, semi, variant)?;
    Ok((inst.premaniplex, inst.xi))
}

/// Base edges of 2̂^M over a regular M with a rigid facet set S: facet
/// (f, x) gets (eγ, x) when supp(x) = Sγ and (e, x) otherwise, e the edge
/// of flag 0 of M.
#[derive(Clone, Debug)]
pub struct BaseEdgeTable {
    copies: HashMap<u64, usize>,
    pub base_edge: u32,
    edge_of: Vec<u32>,
}

impl BaseEdgeTable {
    pub fn new(m: &Maniplex, ctx: &FacetContext, s: &[usize]) -> Result<Self> {
        let smask = s.iter().fold(0u64, |a, &f| a | 1 << f);
        let mut copies = HashMap::new();
        for k in 0..ctx.aut.order() {
            if copies.insert(ctx.image(k, smask), k).is_some() {
                return Err(ForgeError::Construction("two automorphisms give the same copy of S".into()));
            }
        }
        let edge_of = m.i_faces(1)?.face_of;
        Ok(BaseEdgeTable { copies, base_edge: edge_of[0], edge_of })
    }

    /// Index (into the automorphism list) of γ with supp(x) = Sγ.
    pub fn copy_of(&self, x: &Z2Vector) -> Option<usize> {
        self.copies.get(&x.to_mask()?).copied()
    }

    /// Edge of M that is the first coordinate of the base edge of facet x,
    /// and the flag of M on it used as base flag.
    pub fn edge(&self, aut: &AutGroup, x: &Z2Vector) -> (u32, usize) {
        match self.copy_of(x) {
            Some(k) => {
                let f = aut.elements()[k].image(0);
                (self.edge_of[f], f)
            }
            None => (self.base_edge, 0),
        }
    }
}

/// The pipeline on M_n = 2̂^{M_{n−1}} with flags kept implicit: ρ̂₀, y_n and
/// the voltages of `2^{n+1}_I` as maps on `(ψ, x)` flags.
#[derive(Clone, Debug)]
pub struct Hat2Pipeline {
    pub hat: Hat2Maniplex,
    pub ctx: FacetContext,
    pub s: Vec<usize>,
    pub table: BaseEdgeTable,
}

impl Hat2Pipeline {
    pub fn new(prev: &Maniplex, s: &[usize]) -> Result<Self> {
        let ctx = FacetContext::new(prev)?;
        if ctx.aut.order() != prev.num_flags() {
            return Err(ForgeError::InvalidArgument("the base of 2̂^M must be regular".into()));
        }
        let table = BaseEdgeTable::new(prev, &ctx, s)?;
        Ok(Hat2Pipeline { hat: Hat2Maniplex::new(prev.clone()), ctx, s: s.to_vec(), table })
    }

    pub fn rank(&self) -> usize {
        self.hat.rank()
    }

    /// ρ̂₀ on facet x: the automorphism of M_{n−1} sending the base flag β
    /// of the facet to β r₀, acting on the first coordinate.
    pub fn rho0_hat(&self, f: &Hat2Flag) -> Hat2Flag {
        let m = self.hat.base();
        let (_, beta) = self.table.edge(&self.ctx.aut, &f.x);
        let alpha = self.ctx.aut.mapping(beta, m.neighbor(beta, 0)).expect("regular");
        Hat2Flag { flag: alpha.image(f.flag), x: f.x.clone() }
    }

    pub fn r(&self, i: usize, f: &Hat2Flag) -> Hat2Flag {
        self.hat.neighbor(f, i)
    }

    pub fn y_n(&self, f: &Hat2Flag) -> Hat2Flag {
        self.r(0, &self.rho0_hat(f))
    }

    /// `ρ̂₀ r_{n−1} ρ̂₀` (left to right).
    pub fn conjugated_top(&self, f: &Hat2Flag) -> Hat2Flag {
        let n1 = self.rank() - 1;
        self.rho0_hat(&self.r(n1, &self.rho0_hat(f)))
    }

    /// Voltage of a dart of `2^{n+1}_I` (rank of M_n plus one), applied to a flag.
    pub fn apply_dart_voltage(&self, x: &Premaniplex, dart: usize, f: &Hat2Flag) -> Hat2Flag {
        let d = x.dart(dart);
        let n = self.rank();
        let c = d.color;
        if c == 0 {
            f.clone()
        } else if c == n {
            self.y_n(f)
        } else if d.is_semi_edge() {
            if d.from == WHITE {
                self.r(c, f)
            } else {
                self.r(0, &self.r(c, &self.r(0, f)))
            }
        } else if d.from == WHITE {
            self.r(c, &self.r(0, f))
        } else {
            self.r(0, &self.r(c, f))
        }
    }

    /// Flag image under the voltage of a path: `ξ(d_k)` acts first.
    pub fn apply_path_voltage(&self, x: &Premaniplex, darts: &[usize], f: &Hat2Flag) -> Hat2Flag {
        darts.iter().rev().fold(f.clone(), |g, &d| self.apply_dart_voltage(x, d, &g))
    }
}
