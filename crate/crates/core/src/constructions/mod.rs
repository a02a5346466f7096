//! The concrete objects: the square, torus maps, 2̂^M, rigid facet sets,
//! the monodromy η and the voltage assignments ξ and ξ′.

mod classes;
mod eta;
mod facet_sets;
mod hat2;
mod maps;
mod pipeline;

pub use classes::{covered_class_count, enumerate_covered_classes};
pub use eta::{eta_definitional, eta_from_s, eta_knight, facet_separation, word_between, FacetSeparation, Hat2Eta, KNIGHT_WORD};
pub use facet_sets::{
    check_facet_set, check_hat_s_non_invariant, find_facet_set, find_s3, hat_s_witness, hat_vertex_in_facet, FacetContext,
    FacetSetReport,
};
pub use hat2::{Hat2Automorphism, Hat2Flag, Hat2Maniplex, Z2Vector};
pub use maps::{square_flag_graph, torus_map_44, torus_map_44_skew, TorusFlag};
pub use pipeline::{facet_frame, xi_assignment, BaseEdgeTable, Hat2Pipeline, PipelineChecks, TwoOrbitInstance, Variant};

use crate::error::Result;
use crate::flagcore::Maniplex;

/// M₃ = 2̂^{square}, materialized (128 flags).
pub fn m3() -> Result<Maniplex> {
    Hat2Maniplex::new(square_flag_graph()).materialize(1 << 20)
}
