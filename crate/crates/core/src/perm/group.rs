use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use std::sync::{Arc, OnceLock};

use super::chain::StabChain;
use super::element::{GroupElement, Perm};
use crate::error::{ForgeError, Result};

/// Finitely generated group of `GroupElement`s on a fixed point set.
///
/// The stabilizer chain is built on first use; after that the group is
/// read-only and can be queried from many threads.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<GroupElement>,
    chain: OnceLock<StabChain>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        PermGroup { degree: self.degree, generators: self.generators.clone(), chain }
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<GroupElement>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(ForgeError::Structural(format!(
                "generator of degree {} in a group of degree {degree}",
                g.degree()
            )));
        }
        Ok(PermGroup { degree, generators, chain: OnceLock::new() })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, generators: Vec::new(), chain: OnceLock::new() }
    }

    /// Group generated by `elements`, keeping only those that enlarge it.
    pub fn from_elements<'a>(degree: usize, elements: impl IntoIterator<Item = &'a GroupElement>) -> Self {
        let mut chain = StabChain::new(degree + 2);
        let mut generators = Vec::new();
        for e in elements {
            if chain.insert(&e.to_extended()) {
                generators.push(e.clone());
            }
        }
        let lock = OnceLock::new();
        let _ = lock.set(chain);
        PermGroup { degree, generators, chain: lock }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.degree)
    }

    pub(crate) fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| {
            let ext: Vec<Perm> = self.generators.iter().map(|g| g.to_extended()).collect();
            StabChain::from_generators(self.degree + 2, ext.iter())
        })
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.degree() == self.degree && self.chain().contains(&g.to_extended())
    }

    /// `self ⊆ other`, by generator membership.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    pub fn has_s_elements(&self) -> bool {
        self.generators.iter().any(|g| g.s)
    }

    pub fn elements(&self, cap: u64) -> Result<Vec<GroupElement>> {
        let order = self.order();
        if order > BigUint::from(cap) {
            return Err(ForgeError::infeasible("group enumeration", order, cap));
        }
        Ok(self.chain().elements().iter().map(GroupElement::from_extended).collect())
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        GroupElement::from_extended(&self.chain().random_element(rng))
    }

    /// Orbit of a point under the permutation part.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        let mut out = vec![point];
        seen[point] = true;
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for g in &self.generators {
                let y = g.perm.image(x);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// `g⁻¹ H g`.
    pub fn conjugate(&self, g: &GroupElement) -> PermGroup {
        PermGroup {
            degree: self.degree,
            generators: self.generators.iter().map(|h| h.conjugate_by(g)).collect(),
            chain: OnceLock::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CosetSide {
    /// `rep · H`
    RepFirst,
    /// `H · rep`
    SubgroupFirst,
}

/// A coset of a permutation group, with the side recorded explicitly.
#[derive(Clone, Debug)]
pub struct Coset {
    pub rep: GroupElement,
    pub group: Arc<PermGroup>,
    pub side: CosetSide,
}

impl Coset {
    pub fn new(rep: GroupElement, group: Arc<PermGroup>, side: CosetSide) -> Self {
        Coset { rep, group, side }
    }

    pub fn subgroup(group: Arc<PermGroup>) -> Self {
        let rep = group.identity();
        Coset { rep, group, side: CosetSide::RepFirst }
    }

    pub fn size(&self) -> BigUint {
        self.group.order()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        let h = match self.side {
            CosetSide::RepFirst => self.rep.inverse().then(g),
            CosetSide::SubgroupFirst => g.then(&self.rep.inverse()),
        };
        self.group.contains(&h)
    }

    /// Same element set written as `rep · K`.
    pub fn to_rep_first(&self) -> Coset {
        match self.side {
            CosetSide::RepFirst => self.clone(),
            CosetSide::SubgroupFirst => Coset {
                rep: self.rep.clone(),
                group: Arc::new(self.group.conjugate(&self.rep)),
                side: CosetSide::RepFirst,
            },
        }
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Coset) -> bool {
        let a = self.to_rep_first();
        let b = other.to_rep_first();
        b.contains(&a.rep) && a.group.is_subgroup_of(&b.group)
    }

    pub fn same_set(&self, other: &Coset) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    pub fn elements(&self, cap: u64) -> Result<Vec<GroupElement>> {
        let elems = self.group.elements(cap)?;
        Ok(match self.side {
            CosetSide::RepFirst => elems.iter().map(|h| self.rep.then(h)).collect(),
            CosetSide::SubgroupFirst => elems.iter().map(|h| h.then(&self.rep)).collect(),
        })
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let h = self.group.random_element(rng);
        match self.side {
            CosetSide::RepFirst => self.rep.then(&h),
            CosetSide::SubgroupFirst => h.then(&self.rep),
        }
    }
}

/// Voltage set of a family of paths: empty, or a coset of a group.
#[derive(Clone, Debug)]
pub enum VoltageSet {
    Empty,
    Coset(Coset),
}

impl VoltageSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, VoltageSet::Empty)
    }

    pub fn size(&self) -> BigUint {
        match self {
            VoltageSet::Empty => BigUint::from(0u32),
            VoltageSet::Coset(c) => c.size(),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match self {
            VoltageSet::Empty => false,
            VoltageSet::Coset(c) => c.contains(g),
        }
    }

    pub fn is_subset_of(&self, other: &VoltageSet) -> bool {
        match (self, other) {
            (VoltageSet::Empty, _) => true,
            (VoltageSet::Coset(_), VoltageSet::Empty) => false,
            (VoltageSet::Coset(a), VoltageSet::Coset(b)) => a.is_subset_of(b),
        }
    }

    pub fn same_set(&self, other: &VoltageSet) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    pub fn as_coset(&self) -> Option<&Coset> {
        match self {
            VoltageSet::Empty => None,
            VoltageSet::Coset(c) => Some(c),
        }
    }
}

/// How an intersection was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum IntersectionMethod {
    Containment,
    Enumeration,
    EmptyInput,
}

/// Intersection of two voltage sets.
///
/// Tries containment first, then enumerates the smaller side and filters by
/// membership in the other. Refuses when both sides exceed `cap`.
pub fn coset_intersection(a: &VoltageSet, b: &VoltageSet, cap: u64) -> Result<(VoltageSet, IntersectionMethod)> {
    let (ca, cb) = match (a, b) {
        (VoltageSet::Coset(x), VoltageSet::Coset(y)) => (x, y),
        _ => return Ok((VoltageSet::Empty, IntersectionMethod::EmptyInput)),
    };
    if ca.group.degree() != cb.group.degree() {
        return Err(ForgeError::InvalidArgument("cosets over different point sets".into()));
    }
    if ca.is_subset_of(cb) {
        return Ok((a.clone(), IntersectionMethod::Containment));
    }
    if cb.is_subset_of(ca) {
        return Ok((b.clone(), IntersectionMethod::Containment));
    }
    let (small, large) = if ca.size() <= cb.size() { (ca, cb) } else { (cb, ca) };
    let size = small.size();
    if size > BigUint::from(cap) {
        return Err(ForgeError::infeasible("coset intersection", size, cap));
    }
    debug_assert!(size.to_u64().is_some());
    let hits: Vec<GroupElement> = small.elements(cap)?.into_iter().filter(|g| large.contains(g)).collect();
    let Some(rep) = hits.first().cloned() else {
        return Ok((VoltageSet::Empty, IntersectionMethod::Enumeration));
    };
    let rep_inv = rep.inverse();
    let shifted: Vec<GroupElement> = hits.iter().map(|g| rep_inv.then(g)).collect();
    let group = PermGroup::from_elements(small.group.degree(), shifted.iter());
    let result = Coset::new(rep, Arc::new(group), CosetSide::RepFirst);
    debug_assert_eq!(result.size(), BigUint::from(hits.len()));
    Ok((VoltageSet::Coset(result), IntersectionMethod::Enumeration))
}
