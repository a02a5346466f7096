use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{ForgeError, Result};

/// Permutation stored as its image array. Acts on the right: `x^(pq) = (x^p)^q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(ForgeError::Structural(format!(
                    "image array of length {n} is not a permutation"
                )));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Caller guarantees `images` is a permutation.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm(images)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Perm::from_images((0..n).map(|x| f(x) as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub(crate) fn then_into(&self, other: &Perm, out: &mut Vec<u32>) {
        out.clear();
        out.extend(self.0.iter().map(|&x| other.0[x as usize]));
    }

    /// `g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    pub fn is_involution(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| self.0[x as usize] == i as u32)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &x)| *i as u32 == x).count()
    }

    pub fn order(&self) -> num_bigint::BigUint {
        let mut seen = vec![false; self.0.len()];
        let mut acc = num_bigint::BigUint::from(1u32);
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            acc = acc.lcm(&num_bigint::BigUint::from(len));
        }
        acc
    }

    /// Extends to `n` points, fixing the new ones.
    pub fn extend(&self, n: usize) -> Perm {
        let mut v = self.0.clone();
        v.extend(self.0.len() as u32..n as u32);
        Perm(v)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        Perm::from_images(v).map_err(serde::de::Error::custom)
    }
}

/// Voltage group element: a permutation of the base flags together with the
/// exponent of a central involution s that acts on a separate coordinate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupElement {
    pub perm: Perm,
    pub s: bool,
}

impl GroupElement {
    pub fn new(perm: Perm, s: bool) -> Self {
        GroupElement { perm, s }
    }

    pub fn from_perm(perm: Perm) -> Self {
        GroupElement { perm, s: false }
    }

    pub fn identity(n: usize) -> Self {
        GroupElement::from_perm(Perm::identity(n))
    }

    pub fn degree(&self) -> usize {
        self.perm.degree()
    }

    pub fn is_identity(&self) -> bool {
        !self.s && self.perm.is_identity()
    }

    pub fn inverse(&self) -> Self {
        GroupElement { perm: self.perm.inverse(), s: self.s }
    }

    pub fn then(&self, other: &GroupElement) -> Self {
        GroupElement { perm: self.perm.then(&other.perm), s: self.s ^ other.s }
    }

    /// Product in the written order: `self · other`, i.e. `self` acts first.
    pub fn mul(&self, other: &GroupElement) -> Self {
        self.then(other)
    }

    pub fn conjugate_by(&self, g: &GroupElement) -> Self {
        g.inverse().then(self).then(g)
    }

    pub fn is_involution(&self) -> bool {
        self.perm.is_involution()
    }

    /// Order-two test: involution and not the identity.
    pub fn has_order_two(&self) -> bool {
        self.is_involution() && !self.is_identity()
    }

    /// Faithful permutation on `degree + 2` points; the last two are swapped iff s = 1.
    pub fn to_extended(&self) -> Perm {
        let n = self.perm.degree();
        let mut v = self.perm.0.clone();
        if self.s {
            v.push(n as u32 + 1);
            v.push(n as u32);
        } else {
            v.push(n as u32);
            v.push(n as u32 + 1);
        }
        Perm(v)
    }

    pub fn from_extended(p: &Perm) -> Self {
        let n = p.degree() - 2;
        let s = p.0[n] as usize != n;
        GroupElement { perm: Perm(p.0[..n].to_vec()), s }
    }
}

#[derive(Serialize, Deserialize)]
struct GroupElementRepr {
    perm: Perm,
    s: u8,
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupElementRepr { perm: self.perm.clone(), s: self.s as u8 }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GroupElementRepr::deserialize(d)?;
        if r.s > 1 {
            return Err(serde::de::Error::custom("s must be 0 or 1"));
        }
        Ok(GroupElement { perm: r.perm, s: r.s == 1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_action_composition() {
        let p = Perm::from_images(vec![1, 2, 0]).unwrap();
        let q = Perm::from_images(vec![0, 2, 1]).unwrap();
        let pq = p.then(&q);
        for x in 0..3 {
            assert_eq!(pq.image(x), q.image(p.image(x)));
        }
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_images(vec![0, 2]).is_err());
    }

    #[test]
    fn extended_embedding_is_faithful() {
        let g = GroupElement::new(Perm::from_images(vec![1, 0, 2]).unwrap(), true);
        let h = GroupElement::new(Perm::from_images(vec![2, 1, 0]).unwrap(), true);
        let prod = g.then(&h);
        assert_eq!(GroupElement::from_extended(&g.to_extended().then(&h.to_extended())), prod);
        assert!(!prod.s);
    }

    #[test]
    fn json_shape() {
        let g = GroupElement::new(Perm::identity(2), true);
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"perm":[0,1],"s":1}"#);
        let back: GroupElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<GroupElement>(r#"{"perm":[0,0],"s":0}"#).is_err());
    }

    #[test]
    fn order_of_cycles() {
        let p = Perm::from_images(vec![1, 0, 3, 4, 2]).unwrap();
        assert_eq!(p.order(), num_bigint::BigUint::from(6u32));
    }
}
