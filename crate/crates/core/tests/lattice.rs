mod common;

use forge_core::constructions::{square_flag_graph, torus_map_44};
use forge_core::poset::{FacePoset, Hat2Poset};

fn check_formulas(base: &FacePoset) -> usize {
    let h = Hat2Poset::build(base).unwrap();
    let p = &h.poset;
    assert!(p.lattice_check().is_lattice());
    let mut checked = 0;
    for u in 0..p.num_faces() {
        for v in 0..p.num_faces() {
            if u == p.greatest() || v == p.greatest() || !h.share_facet(u, v) {
                continue;
            }
            checked += 1;
            assert_eq!(h.formula_join(base, u, v), p.join(u, v), "join {:?} {:?}", h.label[u], h.label[v]);
            assert_eq!(h.formula_meet(base, u, v), p.meet(u, v), "meet {:?} {:?}", h.label[u], h.label[v]);
        }
    }
    checked
}

#[test]
fn hat2_of_polygons_follows_the_formulas() {
    for p in 3..=6 {
        let base = FacePoset::from_maniplex(&common::polygon(p));
        assert!(base.lattice_check().is_lattice());
        assert!(check_formulas(&base) > 0);
    }
}

#[test]
fn hat2_poset_matches_the_materialized_maniplex() {
    let base = FacePoset::from_maniplex(&square_flag_graph());
    let h = Hat2Poset::build(&base).unwrap();
    let direct = FacePoset::from_maniplex(&torus_map_44(4).unwrap());
    assert_eq!(h.poset.face_counts(), direct.face_counts());
    let (flags, _) = h.poset.flag_graph(1 << 16).unwrap();
    assert!(flags.is_isomorphic(&torus_map_44(4).unwrap()).is_some());
}

#[test]
fn small_torus_is_a_polytope_but_not_a_lattice() {
    let m = torus_map_44(2).unwrap();
    let p = FacePoset::from_maniplex(&m);
    assert!(!p.lattice_check().is_lattice());
    assert!(forge_core::poset::is_polytope(&m, 1 << 16).is_polytope());
}
