use forge_core::colorset::ColorSet;
use forge_core::constructions::*;
use forge_core::perm::{GroupElement, Perm};
use forge_core::symmetry::automorphisms;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn knight_instance(semi: &[usize], v: Variant) -> TwoOrbitInstance {
    let m = torus_map_44(8).unwrap();
    let eta = eta_knight(&m).unwrap();
    TwoOrbitInstance::build(&m, &eta, ColorSet::from_slice(semi), v).unwrap()
}

#[test]
fn knight_pipeline_checks() {
    let inst = knight_instance(&[1, 2], Variant::Xi);
    let c = &inst.checks;
    assert!(c.eta_involutory && c.eta_separates_facets);
    assert!(c.rho0_involutory && c.rho0_choice_independent && c.rho0_commutes_with_r0);
    assert!(c.voltages_preserve_coloring);
    assert_eq!(c.forced_facets, 8);
    assert_eq!(c.forced_overrides, 6);
    assert_eq!(inst.white.len(), 256);
    assert_eq!(inst.rank(), 4);
}

#[test]
fn xi_prime_does_not_contain_s_alone() {
    // order computed independently with sympy on the same generators
    let expected: BigUint = "193865196655121704943616".parse().unwrap();
    let xi = knight_instance(&[1, 2], Variant::Xi).xi.voltage_group();
    let xp = knight_instance(&[1, 2], Variant::XiPrime).xi.voltage_group();
    assert_eq!(xi.order(), expected);
    assert_eq!(xp.order(), expected);
    assert!(xp.has_s_elements());
    assert!(!xp.contains(&GroupElement::new(Perm::identity(256), true)));
}

#[test]
fn base_edges_lie_in_their_facets() {
    let inst = knight_instance(&[1, 2], Variant::Xi);
    for (k, &e) in inst.base_edge.iter().enumerate() {
        let f = inst.base_flag[k] as usize;
        assert_eq!(inst.facet_of[f] as usize, k);
        assert_eq!(inst.edge_of[f], e);
    }
}

#[test]
fn explicit_edges_are_validated() {
    let m = torus_map_44(8).unwrap();
    let eta = eta_knight(&m).unwrap();
    let semi = ColorSet::from_slice(&[1, 2]);
    let inst = TwoOrbitInstance::build(&m, &eta, semi, Variant::Xi).unwrap();
    let same = TwoOrbitInstance::build_with_edges(&m, &eta, semi, Variant::Xi, Some(&inst.base_edge)).unwrap();
    assert_eq!(same.xi.voltages(), inst.xi.voltages());

    let forced = inst.facet_of[eta.image(0)] as usize;
    let mut bad = inst.base_edge.clone();
    let other = (0..m.num_flags()).find(|&f| inst.facet_of[f] as usize == forced && inst.edge_of[f] != bad[forced]).unwrap();
    bad[forced] = inst.edge_of[other];
    assert!(TwoOrbitInstance::build_with_edges(&m, &eta, semi, Variant::Xi, Some(&bad)).is_err());

    let mut outside = inst.base_edge.clone();
    let k = (0..outside.len()).find(|&k| k != forced && k != inst.facet_of[0] as usize).unwrap();
    let foreign = (0..m.num_flags()).find(|&f| !(0..m.num_flags()).any(|g| inst.facet_of[g] as usize == k && inst.edge_of[g] == inst.edge_of[f])).unwrap();
    outside[k] = inst.edge_of[foreign];
    assert!(TwoOrbitInstance::build_with_edges(&m, &eta, semi, Variant::Xi, Some(&outside)).is_err());
}

#[test]
fn bad_inputs_are_rejected() {
    let m = torus_map_44(8).unwrap();
    let eta = eta_knight(&m).unwrap();
    assert!(TwoOrbitInstance::build(&m, &eta, ColorSet::from_slice(&[0]), Variant::Xi).is_err());
    assert!(TwoOrbitInstance::build(&m, &eta, ColorSet::from_slice(&[3]), Variant::Xi).is_err());
    assert!(TwoOrbitInstance::build(&m, &m.r(0), ColorSet::from_slice(&[1]), Variant::Xi).is_err());
    assert!(TwoOrbitInstance::build(&m, &Perm::identity(8), ColorSet::from_slice(&[1]), Variant::Xi).is_err());
}

#[test]
fn variant_names() {
    assert_eq!("xi".parse::<Variant>().unwrap(), Variant::Xi);
    assert_eq!("xi'".parse::<Variant>().unwrap(), Variant::XiPrime);
    assert_eq!("xiprime".parse::<Variant>().unwrap(), Variant::XiPrime);
    assert!("zeta".parse::<Variant>().is_err());
    assert_eq!(serde_json::to_string(&Variant::XiPrime).unwrap(), "\"xiprime\"");
}

#[test]
fn eta_from_s3_separates_and_matches_definition() {
    let m3 = m3().unwrap();
    let (s3, _) = find_s3(&m3).unwrap();
    let h = Hat2Maniplex::new(m3.clone());
    let eta = eta_from_s(&h, &automorphisms(&m3), &s3).unwrap();
    assert!(eta.separates_facets());
    assert_eq!(eta.shift, eta_definitional(&h, &s3));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let f = h.flag(rng.gen_range(0..128), Z2Vector::from_mask(16, rng.gen::<u64>() & 0xffff));
        assert_eq!(eta.apply(&eta.apply(&f)), f);
    }
}

#[test]
fn invariant_facet_sets_are_refused() {
    let m3 = m3().unwrap();
    let h = Hat2Maniplex::new(m3.clone());
    let all: Vec<usize> = (0..16).collect();
    assert!(eta_from_s(&h, &automorphisms(&m3), &all).is_err());
}

#[test]
fn hat2_pipeline_reflections() {
    let m3 = m3().unwrap();
    let (s3, _) = find_s3(&m3).unwrap();
    let p = Hat2Pipeline::new(&m3, &s3).unwrap();
    assert_eq!(p.rank(), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let f = Hat2Flag { flag: rng.gen_range(0..128), x: Z2Vector::from_mask(16, rng.gen::<u64>() & 0xffff) };
        let g = p.rho0_hat(&f);
        assert_eq!(p.rho0_hat(&g), f);
        assert_eq!(g.x, f.x);
        assert_eq!(p.y_n(&p.y_n(&f)), f);
    }
}

#[test]
fn facet_frame_on_the_square_grid() {
    let m = torus_map_44(4).unwrap();
    let frame = facet_frame(&m);
    let classes: std::collections::HashSet<u32> = frame.iter().copied().collect();
    // eight flags per square, one of each class in every square
    assert_eq!(classes.len(), 8);
    let fac = m.facets();
    for face in &fac.faces {
        let seen: std::collections::HashSet<u32> = face.iter().map(|&f| frame[f as usize]).collect();
        assert_eq!(seen.len(), 8);
    }
}

#[test]
fn skew_tori() {
    for (b, c, flags) in [(1, 2, 40), (2, 1, 40), (1, 3, 80), (2, 3, 104)] {
        let m = torus_map_44_skew(b, c).unwrap();
        assert_eq!(m.num_flags(), flags);
        assert!(m.validate().is_valid());
        assert_eq!(automorphisms(&m).order(), flags / 2, "({b},{c}) is chiral");
    }
}

#[test]
fn covered_classes_small_cases() {
    let three = enumerate_covered_classes(3).unwrap();
    assert_eq!(three.len(), 7);
    for n in 3..=10 {
        assert_eq!(enumerate_covered_classes(n).unwrap().len(), covered_class_count(n));
    }
}
