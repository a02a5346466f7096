//! Voltage-group elements and permutation-group computations.

mod chain;
mod element;
mod group;

pub use chain::StabChain;
pub use element::{GroupElement, Perm};
pub use group::{coset_intersection, Coset, CosetSide, IntersectionMethod, PermGroup, VoltageSet};
