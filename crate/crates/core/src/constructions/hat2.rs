use bitvec::prelude::*;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{ForgeError, Result};
use crate::flagcore::Maniplex;
use crate::perm::Perm;

/// Element of ℤ₂^Fac(M), one bit per facet.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z2Vector(BitVec<u64, Lsb0>);

impl Z2Vector {
    pub fn zero(len: usize) -> Self {
        Z2Vector(bitvec![u64, Lsb0; 0; len])
    }

    /// χ_F.
    pub fn unit(len: usize, facet: usize) -> Self {
        let mut v = Z2Vector::zero(len);
        v.0.set(facet, true);
        v
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Z2Vector::zero(len);
        for &f in support {
            let b = v.0[f];
            v.0.set(f, !b);
        }
        v
    }

    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut v = Z2Vector::zero(len);
        for f in 0..len {
            v.0.set(f, mask >> f & 1 == 1);
        }
        v
    }

    pub fn to_mask(&self) -> Option<u64> {
        (self.len() <= 64).then(|| self.0.iter_ones().fold(0u64, |m, f| m | 1 << f))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, facet: usize) -> bool {
        self.0[facet]
    }

    pub fn is_zero(&self) -> bool {
        self.0.not_any()
    }

    pub fn add(&self, other: &Z2Vector) -> Z2Vector {
        let mut v = self.0.clone();
        v ^= &other.0;
        Z2Vector(v)
    }

    pub fn flip(&mut self, facet: usize) {
        let b = self.0[facet];
        self.0.set(facet, !b);
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.iter_ones().collect()
    }

    /// Vector whose support is `supp(self)` pushed through a facet map.
    pub fn permuted(&self, facet_map: &[u32]) -> Z2Vector {
        let mut v = Z2Vector::zero(self.len());
        for f in self.0.iter_ones() {
            v.0.set(facet_map[f] as usize, true);
        }
        v
    }
}

impl fmt::Debug for Z2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "supp{:?}", self.support())
    }
}

impl Serialize for Z2Vector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.len(), self.support()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Z2Vector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (len, supp): (usize, Vec<usize>) = Deserialize::deserialize(d)?;
        if supp.iter().any(|&f| f >= len) {
            return Err(serde::de::Error::custom("support index out of range"));
        }
        Ok(Z2Vector::from_support(len, &supp))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hat2Flag {
    pub flag: usize,
    pub x: Z2Vector,
}

/// 2̂^M with flags `(Φ, x)` kept implicit.
#[derive(Clone, Debug)]
pub struct Hat2Maniplex {
    base: Maniplex,
    facet_of: Vec<u32>,
    num_facets: usize,
}

impl Hat2Maniplex {
    pub fn new(base: Maniplex) -> Self {
        let f = base.facets();
        Hat2Maniplex { num_facets: f.count(), facet_of: f.face_of, base }
    }

    pub fn base(&self) -> &Maniplex {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.base.rank() + 1
    }

    pub fn base_facets(&self) -> usize {
        self.num_facets
    }

    pub fn base_facet_of(&self, flag: usize) -> usize {
        self.facet_of[flag] as usize
    }

    pub fn flag_count(&self) -> BigUint {
        BigUint::from(self.base.num_flags()) << self.num_facets
    }

    pub fn facet_count(&self) -> BigUint {
        BigUint::from(1u32) << self.num_facets
    }

    pub fn flag(&self, flag: usize, x: Z2Vector) -> Hat2Flag {
        Hat2Flag { flag, x }
    }

    pub fn base_flag(&self) -> Hat2Flag {
        Hat2Flag { flag: 0, x: Z2Vector::zero(self.num_facets) }
    }

    /// `(Φ,x)^i = (Φ^i,x)` for i < n and `(Φ,x)^n = (Φ, x + χ_Fac(Φ))`.
    pub fn neighbor(&self, f: &Hat2Flag, i: usize) -> Hat2Flag {
        let n = self.base.rank();
        if i < n {
            Hat2Flag { flag: self.base.neighbor(f.flag, i), x: f.x.clone() }
        } else {
            let mut x = f.x.clone();
            x.flip(self.base_facet_of(f.flag));
            Hat2Flag { flag: f.flag, x }
        }
    }

    pub fn apply_word(&self, word: &[usize], f: &Hat2Flag) -> Hat2Flag {
        word.iter().fold(f.clone(), |g, &c| self.neighbor(&g, c))
    }

    /// Flag id in the materialized graph: `code(x)·N + Φ`; the facet of
    /// 2̂^M containing it is `code(x)`.
    pub fn encode(&self, f: &Hat2Flag) -> usize {
        let code = f.x.to_mask().expect("materializable") as usize;
        code * self.base.num_flags() + f.flag
    }

    pub fn decode(&self, id: usize) -> Hat2Flag {
        let n = self.base.num_flags();
        Hat2Flag { flag: id % n, x: Z2Vector::from_mask(self.num_facets, (id / n) as u64) }
    }

    pub fn materialize(&self, cap: u64) -> Result<Maniplex> {
        let count = self.flag_count();
        if self.num_facets >= 40 || count > BigUint::from(cap) {
            return Err(ForgeError::infeasible("materializing 2̂^M", count, cap));
        }
        let nb = self.base.num_flags();
        let total = nb << self.num_facets;
        let n = self.base.rank();
        let mut adj = vec![vec![0u32; total]; n + 1];
        for (i, a) in adj.iter_mut().enumerate().take(n) {
            let r = self.base.adj(i);
            for (id, slot) in a.iter_mut().enumerate() {
                *slot = ((id / nb) * nb + r[id % nb] as usize) as u32;
            }
        }
        for (id, slot) in adj[n].iter_mut().enumerate() {
            let (code, flag) = (id / nb, id % nb);
            *slot = (((code ^ (1 << self.facet_of[flag])) * nb) + flag) as u32;
        }
        Maniplex::new(n + 1, adj)
    }

    /// Facet permutation induced by an automorphism of the base.
    pub fn facet_map(&self, sigma: &Perm) -> Result<Vec<u32>> {
        check_automorphism(&self.base, sigma)?;
        let mut map = vec![u32::MAX; self.num_facets];
        for f in 0..self.base.num_flags() {
            map[self.facet_of[f] as usize] = self.facet_of[sigma.image(f)];
        }
        Ok(map)
    }

    /// `(Φ,x)σ = (Φσ, σ⁻¹x)`, where `supp(σ⁻¹x) = supp(x)σ`.
    pub fn lift_automorphism(&self, sigma: &Perm) -> Result<Hat2Automorphism> {
        Ok(Hat2Automorphism { base: sigma.clone(), facet_map: self.facet_map(sigma)?, shift: Z2Vector::zero(self.num_facets) })
    }

    /// `T_y: (Φ,x) ↦ (Φ, x+y)`.
    pub fn lift_translation(&self, y: Z2Vector) -> Hat2Automorphism {
        Hat2Automorphism {
            base: Perm::identity(self.base.num_flags()),
            facet_map: (0..self.num_facets as u32).collect(),
            shift: y,
        }
    }

    /// `Ŝ = {(F_n, χ_F) : F ∈ S} ∪ {(F_n, 0)}`, as vectors naming facets.
    pub fn hat_s(&self, s: &[usize]) -> Vec<Z2Vector> {
        let mut out = vec![Z2Vector::zero(self.num_facets)];
        out.extend(s.iter().map(|&f| Z2Vector::unit(self.num_facets, f)));
        out
    }

    /// Ŝ as facet ids of the materialized graph.
    pub fn hat_s_ids(&self, s: &[usize]) -> Vec<usize> {
        let mut ids: Vec<usize> = self.hat_s(s).iter().map(|x| x.to_mask().expect("small") as usize).collect();
        ids.sort_unstable();
        ids
    }
}

/// `(Φ,x) ↦ (Φσ, σ⁻¹x + y)`.
#[derive(Clone, Debug)]
pub struct Hat2Automorphism {
    pub base: Perm,
    pub facet_map: Vec<u32>,
    pub shift: Z2Vector,
}

impl Hat2Automorphism {
    pub fn apply(&self, f: &Hat2Flag) -> Hat2Flag {
        Hat2Flag { flag: self.base.image(f.flag), x: f.x.permuted(&self.facet_map).add(&self.shift) }
    }

    pub fn to_perm(&self, h: &Hat2Maniplex) -> Result<Perm> {
        let total = h.flag_count();
        if h.base_facets() >= 40 || total > BigUint::from(1u64 << 32) {
            return Err(ForgeError::infeasible("flag permutation of 2̂^M", total, 1u64 << 32));
        }
        let n = h.base.num_flags() << h.base_facets();
        Perm::from_fn(n, |id| h.encode(&self.apply(&h.decode(id))))
    }
}

pub(crate) fn check_automorphism(m: &Maniplex, sigma: &Perm) -> Result<()> {
    if sigma.degree() != m.num_flags() {
        return Err(ForgeError::InvalidArgument("automorphism of the wrong degree".into()));
    }
    for i in 0..m.rank() {
        for f in 0..m.num_flags() {
            if sigma.image(m.neighbor(f, i)) != m.neighbor(sigma.image(f), i) {
                return Err(ForgeError::InvalidArgument(format!("not an automorphism: fails at flag {f}, color {i}")));
            }
        }
    }
    Ok(())
}
