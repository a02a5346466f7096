//! The intersection-property test for derived maniplexes, the verdict that
//! combines it with the maniplex conditions, and the oracle harness.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Arc;

mod lemmas;

pub use lemmas::{
    check_claim, check_edge_swap, check_face_fixing, check_generators, check_not_monodromy, check_open_emptiness, check_vertex_fixing,
    verify_k1_support_lemmas, LemmaCheck, SupportLemmaOptions, SupportLemmaReport,
};

use crate::colorset::ColorSet;
use crate::error::Result;
use crate::perm::{coset_intersection, Coset, CosetSide, GroupElement, IntersectionMethod, PermGroup, VoltageSet};
use crate::poset::{is_polytope, OracleVerdict};
use crate::premaniplex::Premaniplex;
use crate::voltage::{check_derived_is_maniplex, derived_graph, fundamental_generators, ManiplexCheck, SpanningTree, VoltageAssignment};

/// Voltage sets `ξ(Π^{a,b}_K)` for one assignment, sharing the closed-path
/// group per `(a, K)`.
pub struct PathSets<'a> {
    x: &'a Premaniplex,
    xi: &'a VoltageAssignment,
    cache: HashMap<(usize, ColorSet), (Arc<PermGroup>, Vec<Option<GroupElement>>)>,
}

impl<'a> PathSets<'a> {
    pub fn new(x: &'a Premaniplex, xi: &'a VoltageAssignment) -> Self {
        PathSets { x, xi, cache: HashMap::new() }
    }

    /// Computes the groups for all listed `(a, K)` in parallel.
    pub fn prefetch(&mut self, keys: &[(usize, ColorSet)]) {
        let todo: Vec<(usize, ColorSet)> = keys.iter().copied().filter(|k| !self.cache.contains_key(k)).collect();
        let (x, xi) = (self.x, self.xi);
        let built: Vec<_> = todo.par_iter().map(|&(a, k)| ((a, k), Self::build(x, xi, a, k))).collect();
        self.cache.extend(built);
    }

    fn build(x: &Premaniplex, xi: &VoltageAssignment, a: usize, k: ColorSet) -> (Arc<PermGroup>, Vec<Option<GroupElement>>) {
        let t = SpanningTree::new(x, a, k);
        let tau = t.tree_voltages(x, xi);
        let gens = fundamental_generators(x, xi, a, k);
        (Arc::new(PermGroup::from_elements(xi.degree(), gens.iter())), tau)
    }

    /// `ξ(Π^{a,b}_K)`: `τ(b)·H` or empty when b is out of reach.
    pub fn get(&mut self, a: usize, b: usize, k: ColorSet) -> VoltageSet {
        let (x, xi) = (self.x, self.xi);
        let (h, tau) = self.cache.entry((a, k)).or_insert_with(|| Self::build(x, xi, a, k));
        match &tau[b] {
            None => VoltageSet::Empty,
            Some(rep) => VoltageSet::Coset(Coset::new(rep.clone(), h.clone(), CosetSide::RepFirst)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TupleStatus {
    Pass,
    /// Some voltage lies in both sides but not in `ξ(Π^{a,b}_{[k,m]})`.
    Fail { witness: String },
    /// `ξ(Π^{a,b}_{[k,m]})` is not contained in one of the sides, which the
    /// definitions rule out; reported rather than assumed.
    InclusionBroken { side: String },
    Infeasible { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct TupleResult {
    pub k: usize,
    pub m: usize,
    pub a: usize,
    pub b: usize,
    pub low_size: String,
    pub high_size: String,
    pub middle_size: String,
    pub method: Option<IntersectionMethod>,
    #[serde(flatten)]
    pub status: TupleStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionReport {
    /// Rank of the derived maniplex.
    pub rank: usize,
    pub tuples: Vec<TupleResult>,
}

impl IntersectionReport {
    pub fn holds(&self) -> bool {
        self.tuples.iter().all(|t| t.status == TupleStatus::Pass)
    }

    pub fn holds_where(&self, pred: impl Fn(&TupleResult) -> bool) -> bool {
        self.tuples.iter().filter(|t| pred(t)).all(|t| t.status == TupleStatus::Pass)
    }

    pub fn failures(&self) -> Vec<&TupleResult> {
        self.tuples.iter().filter(|t| matches!(t.status, TupleStatus::Fail { .. } | TupleStatus::InclusionBroken { .. })).collect()
    }

    pub fn infeasible(&self) -> Vec<&TupleResult> {
        self.tuples.iter().filter(|t| matches!(t.status, TupleStatus::Infeasible { .. })).collect()
    }
}

fn describe(g: &GroupElement) -> String {
    let moved = g.perm.degree() - g.perm.fixed_points();
    format!("voltage moving {moved} points (s={}), images {:?}", g.s as u8, g.perm.images())
}

fn check_tuple(sets: &[VoltageSet; 3], cap: u64) -> (Option<IntersectionMethod>, TupleStatus) {
    let [low, high, mid] = sets;
    if !mid.is_subset_of(low) {
        return (None, TupleStatus::InclusionBroken { side: "[0,m]".into() });
    }
    if !mid.is_subset_of(high) {
        return (None, TupleStatus::InclusionBroken { side: "[k,n-1]".into() });
    }
    match coset_intersection(low, high, cap) {
        Err(e) => (None, TupleStatus::Infeasible { reason: e.to_string() }),
        Ok((cap_set, method)) => {
            if cap_set.same_set(mid) {
                return (Some(method), TupleStatus::Pass);
            }
            let c = cap_set.as_coset().expect("strictly larger than the middle set");
            let witness = std::iter::once(c.rep.clone())
                .chain(c.group.generators().iter().map(|h| c.rep.then(h)))
                .find(|g| !mid.contains(g))
                .map(|g| describe(&g))
                .unwrap_or_else(|| "intersection strictly larger than the middle set".into());
            (Some(method), TupleStatus::Fail { witness })
        }
    }
}

/// Interval `[k,m]`, empty when `k > m`.
fn interval(k: usize, m: usize) -> ColorSet {
    if k > m {
        ColorSet::default()
    } else {
        ColorSet::interval(k, m)
    }
}

/// Tests `ξ(Π^{a,b}_{[0,m]}) ∩ ξ(Π^{a,b}_{[k,n−1]}) = ξ(Π^{a,b}_{[k,m]})`
/// for the `(k, m)` accepted by `filter` and every ordered vertex pair.
pub fn check_intersection_tuples(
    x: &Premaniplex,
    xi: &VoltageAssignment,
    cap: u64,
    filter: impl Fn(usize, usize) -> bool,
) -> Result<IntersectionReport> {
    xi.check_against(x)?;
    let r = x.rank();
    let nv = x.num_vertices();
    let mut keys = Vec::new();
    let mut tuples = Vec::new();
    for k in 0..r {
        for m in 0..r {
            if !filter(k, m) {
                continue;
            }
            for a in 0..nv {
                for b in 0..nv {
                    tuples.push((k, m, a, b));
                }
                keys.extend([(a, interval(0, m)), (a, interval(k, r - 1)), (a, interval(k, m))]);
            }
        }
    }
    let mut ps = PathSets::new(x, xi);
    ps.prefetch(&keys);
    let work: Vec<_> = tuples
        .iter()
        .map(|&(k, m, a, b)| (k, m, a, b, [ps.get(a, b, interval(0, m)), ps.get(a, b, interval(k, r - 1)), ps.get(a, b, interval(k, m))]))
        .collect();
    let tuples = work
        .into_par_iter()
        .map(|(k, m, a, b, sets)| {
            let (method, status) = check_tuple(&sets, cap);
            TupleResult {
                k,
                m,
                a,
                b,
                low_size: sets[0].size().to_string(),
                high_size: sets[1].size().to_string(),
                middle_size: sets[2].size().to_string(),
                method,
                status,
            }
        })
        .collect();
    Ok(IntersectionReport { rank: r, tuples })
}

/// All `k, m ∈ [0, n−1]`.
pub fn check_intersection_properties(x: &Premaniplex, xi: &VoltageAssignment, cap: u64) -> Result<IntersectionReport> {
    check_intersection_tuples(x, xi, cap, |_, _| true)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Polytopal,
    NotManiplex { witness: Vec<String> },
    NotPolytopal { witness: Box<TupleResult> },
    Infeasible { tuples: Vec<(usize, usize, usize, usize)> },
}

impl Verdict {
    pub fn is_polytopal(&self) -> bool {
        matches!(self, Verdict::Polytopal)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Polytopal => "polytopal",
            Verdict::NotManiplex { .. } => "not-maniplex",
            Verdict::NotPolytopal { .. } => "not-polytopal",
            Verdict::Infeasible { .. } => "infeasible",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolytopalityReport {
    pub maniplex: ManiplexCheck,
    pub intersections: Option<IntersectionReport>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// Maniplex conditions, then the intersection property.
pub fn verify_polytopal(x: &Premaniplex, xi: &VoltageAssignment, cap: u64) -> Result<PolytopalityReport> {
    let maniplex = check_derived_is_maniplex(x, xi)?;
    if !maniplex.holds() {
        let witness = [&maniplex.generation, &maniplex.semi_edges_order_two, &maniplex.parallel_darts_distinct, &maniplex.alternating_paths_trivial]
            .iter()
            .flat_map(|b| b.detail.iter().cloned())
            .collect();
        return Ok(PolytopalityReport { maniplex, intersections: None, verdict: Verdict::NotManiplex { witness } });
    }
    let rep = check_intersection_properties(x, xi, cap)?;
    let verdict = if let Some(f) = rep.failures().first() {
        Verdict::NotPolytopal { witness: Box::new((*f).clone()) }
    } else if !rep.infeasible().is_empty() {
        Verdict::Infeasible { tuples: rep.infeasible().iter().map(|t| (t.k, t.m, t.a, t.b)).collect() }
    } else {
        Verdict::Polytopal
    };
    Ok(PolytopalityReport { maniplex, intersections: Some(rep), verdict })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossValidation {
    pub checker: String,
    pub oracle: Option<OracleVerdict>,
    pub derived_flags: Option<String>,
    /// `None` when the oracle was skipped.
    pub agree: Option<bool>,
    pub notice: Option<String>,
}

/// Runs the checker and, when `|V|·|Γ|` is within `oracle_cap`, the face
/// poset oracle on the materialized derived graph.
pub fn cross_validate(x: &Premaniplex, xi: &VoltageAssignment, enum_cap: u64, oracle_cap: u64) -> Result<CrossValidation> {
    let report = verify_polytopal(x, xi, enum_cap)?;
    let checker = report.verdict.label().to_string();
    let flags = xi.voltage_group().order() * BigUint::from(x.num_vertices());
    if flags > BigUint::from(oracle_cap) {
        return Ok(CrossValidation {
            checker,
            oracle: None,
            derived_flags: Some(flags.to_string()),
            agree: None,
            notice: Some(format!("derived graph has {flags} flags, oracle cap is {oracle_cap}; oracle skipped")),
        });
    }
    let d = derived_graph(x, xi, oracle_cap)?;
    let oracle = is_polytope(&d.maniplex, oracle_cap);
    let agree = match (&report.verdict, &oracle) {
        (_, OracleVerdict::Infeasible { .. }) | (Verdict::Infeasible { .. }, _) => None,
        (v, o) => Some(v.is_polytopal() == matches!(o, OracleVerdict::Polytope)),
    };
    Ok(CrossValidation { checker, oracle: Some(oracle), derived_flags: Some(flags.to_string()), agree, notice: None })
}
