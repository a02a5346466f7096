mod common;

use forge_core::colorset::ColorSet;
use forge_core::constructions::{square_flag_graph, torus_map_44, torus_map_44_skew, Hat2Maniplex, Z2Vector};
use forge_core::perm::GroupElement;
use forge_core::polytopality::{verify_polytopal, PathSets};
use forge_core::premaniplex::Premaniplex;
use forge_core::symmetry::{automorphisms, stg_voltages};
use forge_core::voltage::{gauge_normalize, random_path, restricted_voltage_group, VoltageAssignment};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instances() -> Vec<(&'static str, Premaniplex, VoltageAssignment)> {
    let rot3 = common::rotation_quotient(&torus_map_44(3).unwrap());
    let (c12, xi12, _) = stg_voltages(&torus_map_44_skew(1, 2).unwrap()).unwrap();
    let fault = common::fault_injected();
    vec![("rot3", rot3.0, rot3.1), ("chiral", c12, xi12), ("fault", fault.0, fault.1)]
}

/// `ξ'(d) = τ(to)·ξ(d)·τ(from)⁻¹` for random τ in Γ.
fn regauge(x: &Premaniplex, xi: &VoltageAssignment, seed: u64) -> VoltageAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = xi.voltage_group();
    let tau: Vec<GroupElement> = (0..x.num_vertices()).map(|_| g.random_element(&mut rng)).collect();
    let v = x.darts().iter().map(|d| tau[d.to].mul(xi.get(d.id)).mul(&tau[d.from].inverse())).collect();
    xi.with_voltages(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdict_survives_relabel_and_gauge(which in 0usize..3, seed in any::<u64>(), swap in any::<bool>()) {
        let (name, x, xi) = instances().swap_remove(which);
        let before = verify_polytopal(&x, &xi, 1 << 20).unwrap().verdict.label();
        let perm: Vec<usize> = if swap { (0..x.num_vertices()).rev().collect() } else { (0..x.num_vertices()).collect() };
        let y = x.relabel_vertices(&perm).unwrap();
        let eta = VoltageAssignment::new(&y, regauge(&x, &xi, seed).voltages().to_vec()).unwrap();
        prop_assert_eq!(verify_polytopal(&y, &eta, 1 << 20).unwrap().verdict.label(), before, "{}", name);
        let (norm, _) = gauge_normalize(&y, &eta);
        prop_assert_eq!(verify_polytopal(&y, &norm, 1 << 20).unwrap().verdict.label(), before, "{}", name);
    }

    #[test]
    fn gauge_keeps_voltage_group_order(which in 0usize..3, seed in any::<u64>()) {
        let (_, x, xi) = instances().swap_remove(which);
        let eta = regauge(&x, &xi, seed);
        let full = ColorSet::full(x.rank());
        prop_assert_eq!(restricted_voltage_group(&x, &xi, 0, full).order(), restricted_voltage_group(&x, &eta, 0, full).order());
    }

    #[test]
    fn middle_paths_lie_in_both_sides(which in 0usize..3, k in 0usize..3, m in 0usize..3, len in 0usize..30, seed in any::<u64>()) {
        prop_assume!(k <= m);
        let (_, x, xi) = instances().swap_remove(which);
        let n = x.rank();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sets = PathSets::new(&x, &xi);
        for a in 0..x.num_vertices() {
            let p = random_path(&x, a, ColorSet::interval(k, m), len, &mut rng);
            let b = p.end(&x);
            let g = xi.path_voltage(&p);
            prop_assert!(sets.get(a, b, ColorSet::interval(k, m)).contains(&g));
            prop_assert!(sets.get(a, b, ColorSet::interval(0, m)).contains(&g));
            prop_assert!(sets.get(a, b, ColorSet::interval(k, n - 1)).contains(&g));
        }
    }

    #[test]
    fn z2_vector_group_laws(a in prop::collection::vec(any::<bool>(), 70), b in prop::collection::vec(any::<bool>(), 70)) {
        let to = |v: &[bool]| Z2Vector::from_support(v.len(), &(0..v.len()).filter(|&i| v[i]).collect::<Vec<_>>());
        let (x, y) = (to(&a), to(&b));
        prop_assert!(x.add(&x).is_zero());
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert_eq!(x.add(&y).support().len(), (0..70).filter(|&i| a[i] != b[i]).count());
        let mut z = x.clone();
        z.flip(69);
        prop_assert_eq!(z.get(69), !x.get(69));
    }

    #[test]
    fn hat2_neighbors_are_involutions(flag in 0usize..128, mask in any::<u64>(), i in 0usize..4) {
        let h = Hat2Maniplex::new(torus_map_44(4).unwrap());
        let f = h.flag(flag, Z2Vector::from_mask(16, mask & 0xffff));
        prop_assert_eq!(h.neighbor(&h.neighbor(&f, i), i), f.clone());
        for j in i + 2..4 {
            prop_assert_eq!(h.apply_word(&[i, j, i, j], &f), f.clone());
        }
    }

    #[test]
    fn hat2_lifts_commute_with_neighbors(k in 0usize..128, flag in 0usize..128, mask in any::<u64>(), y in any::<u64>(), i in 0usize..4) {
        let base = torus_map_44(4).unwrap();
        let aut = automorphisms(&base);
        let h = Hat2Maniplex::new(base);
        let f = h.flag(flag, Z2Vector::from_mask(16, mask & 0xffff));
        let lift = h.lift_automorphism(&aut.elements()[k]).unwrap();
        let tr = h.lift_translation(Z2Vector::from_mask(16, y & 0xffff));
        for g in [&lift, &tr] {
            prop_assert_eq!(g.apply(&h.neighbor(&f, i)), h.neighbor(&g.apply(&f), i));
        }
    }
}

#[test]
fn hat2_square_materializes_as_the_four_torus() {
    let h = Hat2Maniplex::new(square_flag_graph());
    let m = h.materialize(1 << 20).unwrap();
    assert_eq!(m.num_flags(), 128);
    assert!(m.is_isomorphic(&torus_map_44(4).unwrap()).is_some());
}
