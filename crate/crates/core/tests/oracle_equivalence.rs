mod common;

use forge_core::constructions::{torus_map_44, torus_map_44_skew};
use forge_core::poset::OracleVerdict;
use forge_core::polytopality::{cross_validate, verify_polytopal, Verdict};
use forge_core::symmetry::{certify_derived_orbits, stg_voltages};
use forge_core::voltage::{check_derived_is_maniplex, derived_graph};

const CAP: u64 = 1 << 20;

fn agree(label: &str, x: &forge_core::premaniplex::Premaniplex, xi: &forge_core::voltage::VoltageAssignment) -> (String, OracleVerdict) {
    let cv = cross_validate(x, xi, CAP, CAP).unwrap();
    assert_eq!(cv.agree, Some(true), "{label}: checker {} oracle {:?}", cv.checker, cv.oracle);
    (cv.checker, cv.oracle.unwrap())
}

#[test]
fn regular_tori_from_their_symmetry_type_graph() {
    for s in 2..=4 {
        let m = torus_map_44(s).unwrap();
        let (x, xi, _) = stg_voltages(&m).unwrap();
        assert_eq!(x.num_vertices(), 1);
        assert!(derived_graph(&x, &xi, CAP).unwrap().maniplex.is_isomorphic(&m).is_some());
        let (label, oracle) = agree(&format!("torus {s}"), &x, &xi);
        assert_eq!(label, "polytopal");
        assert!(oracle.is_polytope());
    }
}

#[test]
fn rotation_quotients_are_two_vertex_instances() {
    for s in [3, 4] {
        let m = torus_map_44(s).unwrap();
        let (x, xi) = common::rotation_quotient(&m);
        assert_eq!(x.num_vertices(), 2);
        assert!(check_derived_is_maniplex(&x, &xi).unwrap().holds());
        assert_eq!(agree(&format!("rot {s}"), &x, &xi).0, "polytopal");
        assert_eq!(certify_derived_orbits(&x, &xi).unwrap().orbit_count, 1);
    }
}

#[test]
fn chiral_tori_are_two_orbit_polytopes() {
    for (b, c) in [(1, 2), (2, 1), (1, 3)] {
        let m = torus_map_44_skew(b, c).unwrap();
        let (x, xi, _) = stg_voltages(&m).unwrap();
        assert_eq!(x.num_vertices(), 2);
        assert!(x.semi_edge_colors(0).is_empty());
        assert_eq!(agree(&format!("({b},{c})"), &x, &xi).0, "polytopal");
        assert_eq!(certify_derived_orbits(&x, &xi).unwrap().orbit_count, 2);
    }
}

#[test]
fn degenerate_tori_are_rejected_by_both() {
    for (b, c) in [(1, 0), (1, 1)] {
        let m = torus_map_44_skew(b, c).unwrap();
        assert!(m.validate().is_valid());
        let (x, xi, _) = stg_voltages(&m).unwrap();
        let (label, oracle) = agree(&format!("({b},{c})"), &x, &xi);
        assert_eq!(label, "not-polytopal");
        assert!(!oracle.is_polytope());
    }
}

#[test]
fn fault_injected_voltage_is_caught() {
    let (x, xi) = common::fault_injected();
    assert!(check_derived_is_maniplex(&x, &xi).unwrap().holds());
    let v = verify_polytopal(&x, &xi, CAP).unwrap().verdict;
    assert!(matches!(v, Verdict::NotPolytopal { .. }), "{v:?}");
    assert!(!agree("fault", &x, &xi).1.is_polytope());
}

#[test]
fn polygons_with_reflection_eta_fail_both_ways() {
    use forge_core::colorset::ColorSet;
    use forge_core::constructions::{TwoOrbitInstance, Variant};
    for p in [4, 6] {
        let m = common::polygon(p);
        for v in [Variant::Xi, Variant::XiPrime] {
            let inst = TwoOrbitInstance::build(&m, &m.r(1), ColorSet::from_slice(&[1]), v).unwrap();
            let (label, oracle) = agree(&format!("p{p} {v:?}"), &inst.premaniplex, &inst.xi);
            assert_ne!(label, "polytopal");
            assert!(!oracle.is_polytope());
        }
    }
}
