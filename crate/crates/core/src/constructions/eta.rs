use serde::Serialize;
use std::collections::{HashSet, VecDeque};

use crate::colorset::ColorSet;
use crate::error::{ForgeError, Result};
use crate::flagcore::Maniplex;
use crate::perm::Perm;
use crate::symmetry::AutGroup;

use super::hat2::{Hat2Flag, Hat2Maniplex, Z2Vector};
use super::maps::torus_map_44;

/// The knight-move word, first letter acting first.
pub const KNIGHT_WORD: [usize; 8] = [2, 1, 0, 1, 2, 1, 2, 1];

/// `η = r₂r₁r₀r₁r₂r₁r₂r₁` on {4,4}_(8,0).
pub fn eta_knight(m: &Maniplex) -> Result<Perm> {
    if m.rank() != 3 || m.num_flags() != 512 || m.is_isomorphic(&torus_map_44(8)?).is_none() {
        return Err(ForgeError::InvalidArgument("eta_knight needs the map {4,4}_(8,0)".into()));
    }
    m.monodromy(&KNIGHT_WORD)
}

#[derive(Clone, Debug, Serialize)]
pub struct FacetSeparation {
    pub facets_checked: usize,
    /// Facets whose flags are sent to fewer than |facet| distinct facets.
    pub failures: Vec<usize>,
}

impl FacetSeparation {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Whether `eta` sends the flags of each facet to pairwise distinct facets.
pub fn facet_separation(m: &Maniplex, eta: &Perm) -> FacetSeparation {
    let fac = m.facets();
    let mut failures = Vec::new();
    for (k, face) in fac.faces.iter().enumerate() {
        let imgs: HashSet<u32> = face.iter().map(|&f| fac.face_of[eta.image(f as usize)]).collect();
        if imgs.len() != face.len() {
            failures.push(k);
        }
    }
    FacetSeparation { facets_checked: fac.count(), failures }
}

/// η on 2̂^M built from a facet set S of a regular M:
/// `(Ψ,x)η = (Ψ, x + χ_{Sγ_Ψ})`, γ_Ψ the automorphism taking flag 0 to Ψ.
#[derive(Clone, Debug)]
pub struct Hat2Eta {
    /// `χ_{Sγ_Ψ}` per base flag Ψ.
    pub shift: Vec<Z2Vector>,
}

impl Hat2Eta {
    pub fn apply(&self, f: &Hat2Flag) -> Hat2Flag {
        Hat2Flag { flag: f.flag, x: f.x.add(&self.shift[f.flag]) }
    }

    /// Flags of a facet go to distinct facets iff the shifts are distinct;
    /// the same holds for every facet since η does not move the base flag
    /// coordinate.
    pub fn separates_facets(&self) -> bool {
        self.shift.iter().collect::<HashSet<_>>().len() == self.shift.len()
    }

    pub fn to_perm(&self, h: &Hat2Maniplex) -> Result<Perm> {
        let n = h.base().num_flags() << h.base_facets();
        Perm::from_fn(n, |id| h.encode(&self.apply(&h.decode(id))))
    }
}

fn facet_image(h: &Hat2Maniplex, aut_elem: &Perm, facet_rep: &[usize], f: usize) -> usize {
    h.base_facet_of(aut_elem.image(facet_rep[f]))
}

fn facet_reps(h: &Hat2Maniplex) -> Vec<usize> {
    let mut rep = vec![usize::MAX; h.base_facets()];
    for f in (0..h.base().num_flags()).rev() {
        rep[h.base_facet_of(f)] = f;
    }
    rep
}

pub fn eta_from_s(h: &Hat2Maniplex, aut: &AutGroup, s: &[usize]) -> Result<Hat2Eta> {
    let base = h.base();
    if aut.order() != base.num_flags() {
        return Err(ForgeError::InvalidArgument("η from a facet set needs a regular base".into()));
    }
    let reps = facet_reps(h);
    let nf = h.base_facets();
    let s_vec = Z2Vector::from_support(nf, s);
    let mut shift = Vec::with_capacity(base.num_flags());
    for psi in 0..base.num_flags() {
        let g = aut.by_image_of_base(psi).expect("regular");
        let img: Vec<usize> = s.iter().map(|&f| facet_image(h, g, &reps, f)).collect();
        let v = Z2Vector::from_support(nf, &img);
        if !g.is_identity() && v == s_vec {
            return Err(ForgeError::InvalidArgument(format!("facet set is invariant under a non-trivial automorphism (image of flag 0 is {psi})")));
        }
        shift.push(v);
    }
    Ok(Hat2Eta { shift })
}

/// η from its definition: ω_F is the monodromy taking flag 0 to the
/// smallest flag of F, and `(Ψ,x)η = (Ψ, x + Σ_{F∈S} χ_{Fac(Ψω_F)})`.
/// Uses only colour walks, no automorphisms.
pub fn eta_definitional(h: &Hat2Maniplex, s: &[usize]) -> Vec<Z2Vector> {
    let base = h.base();
    let reps = facet_reps(h);
    let words: Vec<Vec<usize>> = s.iter().map(|&f| word_between(base, 0, reps[f])).collect();
    (0..base.num_flags())
        .map(|psi| {
            let mut v = Z2Vector::zero(h.base_facets());
            for w in &words {
                v.flip(h.base_facet_of(base.apply_word(w, psi).expect("valid word")));
            }
            v
        })
        .collect()
}

/// A colour word taking flag `from` to flag `to` (BFS, ascending colours).
pub fn word_between(m: &Maniplex, from: usize, to: usize) -> Vec<usize> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; m.num_flags()];
    let mut seen = vec![false; m.num_flags()];
    seen[from] = true;
    let mut q = VecDeque::from([from]);
    while let Some(x) = q.pop_front() {
        if x == to {
            break;
        }
        for c in ColorSet::full(m.rank()).iter() {
            let y = m.neighbor(x, c);
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, c));
                q.push_back(y);
            }
        }
    }
    let mut w = Vec::new();
    let mut cur = to;
    while let Some((p, c)) = prev[cur] {
        w.push(c);
        cur = p;
    }
    w.reverse();
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knight_move_on_board() {
        let m = torus_map_44(8).unwrap();
        let eta = eta_knight(&m).unwrap();
        assert!(eta.is_involution());
        assert!(facet_separation(&m, &eta).holds());
    }

    #[test]
    fn wrong_board_rejected() {
        assert!(eta_knight(&torus_map_44(4).unwrap()).is_err());
    }

    #[test]
    fn words_reach_target() {
        let m = torus_map_44(4).unwrap();
        for t in [0, 5, 77, 127] {
            let w = word_between(&m, 3, t);
            assert_eq!(m.apply_word(&w, 3).unwrap(), t);
        }
    }
}
