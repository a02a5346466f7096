use serde::Serialize;
use std::collections::HashSet;

use crate::error::{ForgeError, Result};
use crate::flagcore::Maniplex;
use crate::poset::FacePoset;
use crate::symmetry::{automorphisms, AutGroup};

use super::hat2::Hat2Maniplex;

/// A maniplex together with the tables facet-set questions need: its
/// automorphisms as facet permutations and the facet masks of the
/// closures of its proper faces.
#[derive(Clone, Debug)]
pub struct FacetContext {
    pub aut: AutGroup,
    pub facet_of: Vec<u32>,
    pub num_facets: usize,
    /// Facet permutation of each automorphism, in `aut` order.
    pub facet_perms: Vec<Vec<u32>>,
    /// `(rank, closure mask)` of every proper face.
    pub closures: Vec<(usize, u64)>,
}

impl FacetContext {
    pub fn new(m: &Maniplex) -> Result<Self> {
        let fac = m.facets();
        if fac.count() > 64 {
            return Err(ForgeError::infeasible("facet-set search", fac.count(), 64));
        }
        let aut = automorphisms(m);
        let facet_perms = aut
            .elements()
            .iter()
            .map(|g| {
                let mut p = vec![0u32; fac.count()];
                for (k, face) in fac.faces.iter().enumerate() {
                    p[k] = fac.face_of[g.image(face[0] as usize)];
                }
                p
            })
            .collect();
        let poset = FacePoset::from_maniplex(m);
        let first_facet = poset.facets()[0];
        let mut closures = Vec::new();
        for r in 0..m.rank() as i32 {
            for &f in poset.faces_of_rank(r) {
                let mask = poset.closure(f).facets.iter().fold(0u64, |acc, &g| acc | 1 << (g - first_facet));
                closures.push((r as usize, mask));
            }
        }
        let num_facets = fac.count();
        Ok(FacetContext { aut, facet_of: fac.face_of, num_facets, facet_perms, closures })
    }

    pub fn image(&self, k: usize, s: u64) -> u64 {
        let p = &self.facet_perms[k];
        (0..self.num_facets).filter(|&f| s >> f & 1 == 1).fold(0, |acc, f| acc | 1 << p[f])
    }

    /// Non-identity automorphisms fixing S setwise.
    pub fn stabilizers(&self, s: u64) -> Vec<usize> {
        (0..self.aut.order())
            .filter(|&k| !self.aut.elements()[k].is_identity() && self.image(k, s) == s)
            .collect()
    }

    pub fn is_non_invariant(&self, s: u64) -> bool {
        self.stabilizers(s).is_empty()
    }

    /// Maximal unions `ū ∪ v̄` over all pairs of proper faces.
    pub fn two_face_unions(&self) -> Vec<u64> {
        let masks: Vec<u64> = self.closures.iter().map(|c| c.1).collect::<HashSet<_>>().into_iter().collect();
        let mut unions: HashSet<u64> = HashSet::new();
        for (i, &a) in masks.iter().enumerate() {
            for &b in &masks[i..] {
                unions.insert(a | b);
            }
        }
        let all: Vec<u64> = unions.into_iter().collect();
        let mut maximal: Vec<u64> = all.iter().copied().filter(|&u| !all.iter().any(|&w| w != u && u & w == u)).collect();
        maximal.sort_unstable();
        maximal
    }

    /// A pair of proper faces whose closures cover S, if any.
    pub fn covering_pair(&self, s: u64) -> Option<(usize, usize)> {
        for (i, a) in self.closures.iter().enumerate() {
            for (j, b) in self.closures.iter().enumerate().skip(i) {
                if s & !(a.1 | b.1) == 0 {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Automorphism index mapping S to T, if T is a copy of S.
    pub fn copy_witness(&self, s: u64, t: u64) -> Option<usize> {
        (0..self.aut.order()).find(|&k| self.image(k, s) == t)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FacetSetReport {
    pub facets: Vec<usize>,
    pub automorphisms_checked: usize,
    pub face_pairs_checked: usize,
    pub non_invariant: bool,
    pub not_in_two_closures: bool,
}

/// Smallest facet set (by size, then lexicographically by sorted ids)
/// not fixed by any non-trivial automorphism, and, when asked, not
/// covered by the closures of two proper faces.
pub fn find_facet_set(ctx: &FacetContext, require_two_closures: bool) -> Option<Vec<usize>> {
    let unions = if require_two_closures { ctx.two_face_unions() } else { Vec::new() };
    let nf = ctx.num_facets;
    for k in 1..=nf {
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            let s = comb.iter().fold(0u64, |acc, &f| acc | 1 << f);
            if unions.iter().all(|&u| s & !u != 0) && ctx.is_non_invariant(s) {
                return Some(comb);
            }
            // next combination in lexicographic order
            let mut i = k;
            while i > 0 && comb[i - 1] == nf - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    None
}

/// Exhaustive check of both defining properties of a facet set.
pub fn check_facet_set(ctx: &FacetContext, facets: &[usize]) -> FacetSetReport {
    let s = facets.iter().fold(0u64, |acc, &f| acc | 1 << f);
    let nc = ctx.closures.len();
    FacetSetReport {
        facets: facets.to_vec(),
        automorphisms_checked: ctx.aut.order(),
        face_pairs_checked: nc * (nc + 1) / 2,
        non_invariant: ctx.is_non_invariant(s),
        not_in_two_closures: ctx.covering_pair(s).is_none(),
    }
}

/// The set S₃ for a maniplex isomorphic to {4,4}_(4,0).
pub fn find_s3(m3: &Maniplex) -> Result<(Vec<usize>, FacetSetReport)> {
    if m3.rank() != 3 || m3.num_flags() != 128 {
        return Err(ForgeError::InvalidArgument("find_s3 expects the 128-flag map {4,4}_(4,0)".into()));
    }
    let ctx = FacetContext::new(m3)?;
    if ctx.aut.order() != 128 {
        return Err(ForgeError::InvalidArgument("input is not regular, so it is not {4,4}_(4,0)".into()));
    }
    let s = find_facet_set(&ctx, true).ok_or_else(|| ForgeError::Construction("no qualifying facet set".into()))?;
    let rep = check_facet_set(&ctx, &s);
    Ok((s, rep))
}

/// One step of the inductive argument that Ŝ avoids `ū ∪ v̄`: for vertices
/// u = (u', χ_G), v = (v', χ_F) of 2̂^M (after the reduction in the
/// argument), a facet D ∈ S outside `ū' ∪ v̄'` gives the facet (F_n, χ_D)
/// of Ŝ outside `ū ∪ v̄`. Returns D.
pub fn hat_s_witness(s: &[usize], u_closure: u64, v_closure: u64) -> Option<usize> {
    s.iter().copied().find(|&d| (u_closure | v_closure) >> d & 1 == 0)
}

/// Whether facet `(F_n, z)` of 2̂^M contains the vertex `(u', x)`:
/// `supp(z + x) ⊆ ū'`.
pub fn hat_vertex_in_facet(u_closure: u64, x: u64, z: u64) -> bool {
    (x ^ z) & !u_closure == 0
}

/// Hat-level non-invariance of Ŝ against every lifted automorphism of the
/// base composed with a translation. Returns the number of candidates
/// tried.
pub fn check_hat_s_non_invariant(h: &Hat2Maniplex, ctx: &FacetContext, s: &[usize]) -> Result<(bool, usize)> {
    let nf = h.base_facets();
    if nf > 64 {
        return Err(ForgeError::infeasible("hat-level invariance check", nf, 64));
    }
    let hat: HashSet<u64> = h.hat_s(s).iter().map(|x| x.to_mask().expect("small")).collect();
    let mut tried = 0;
    for (k, g) in ctx.aut.elements().iter().enumerate() {
        let fm = &ctx.facet_perms[k];
        // the image of (F_n, 0) is (F_n, y), so only y ∈ Ŝ can stabilize Ŝ
        for &y in &hat {
            tried += 1;
            if g.is_identity() && y == 0 {
                continue;
            }
            let moved: HashSet<u64> = hat
                .iter()
                .map(|&z| (0..nf).filter(|&f| z >> f & 1 == 1).fold(0u64, |a, f| a | 1 << fm[f]) ^ y)
                .collect();
            if moved == hat {
                return Ok((false, tried));
            }
        }
    }
    Ok((true, tried))
}

#[cfg(test)]
mod tests {
    use super::super::maps::square_flag_graph;
    use super::*;

    #[test]
    fn square_has_no_rigid_edge_set() {
        let ctx = FacetContext::new(&square_flag_graph()).unwrap();
        assert_eq!(ctx.aut.order(), 8);
        assert!(find_facet_set(&ctx, false).is_none());
    }
}
