#![allow(dead_code)]

use forge_core::colorset::ColorSet;
use forge_core::constructions::torus_map_44;
use forge_core::flagcore::Maniplex;
use forge_core::perm::Perm;
use forge_core::premaniplex::Premaniplex;
use forge_core::symmetry::{automorphisms, quotient_voltages};
use forge_core::voltage::VoltageAssignment;

pub fn polygon(p: usize) -> Maniplex {
    let n = 2 * p;
    let r0 = (0..n).map(|i| (i ^ 1) as u32).collect();
    let r1 = (0..n).map(|i| if i % 2 == 1 { (i + 1) % n } else { (i + n - 1) % n } as u32).collect();
    Maniplex::new(2, vec![r0, r1]).unwrap()
}

/// Automorphisms preserving the bipartition of the flag graph.
pub fn even_automorphisms(m: &Maniplex) -> Vec<Perm> {
    let col = m.two_coloring(ColorSet::full(m.rank())).unwrap().color;
    let aut = automorphisms(m);
    aut.elements().iter().filter(|g| col[g.image(0)] == col[0]).cloned().collect()
}

/// Two-vertex voltage presentation of a regular map modulo its rotations.
pub fn rotation_quotient(m: &Maniplex) -> (Premaniplex, VoltageAssignment) {
    let (x, xi, _) = quotient_voltages(m, &even_automorphisms(m)).unwrap();
    (x, xi)
}

/// The rotation quotient of {4,4}_(4,0) with the color-0 dart voltage
/// overwritten by the color-2 return voltage. The derived graph is still a
/// maniplex but not polytopal.
pub fn fault_injected() -> (Premaniplex, VoltageAssignment) {
    let (x, xi) = rotation_quotient(&torus_map_44(4).unwrap());
    let d = x.dart_at(0, 0);
    let e = x.dart_at(1, 2);
    let mut v = xi.voltages().to_vec();
    v[d] = xi.get(e).clone();
    v[x.dart(d).inv] = xi.get(e).inverse();
    (x, xi.with_voltages(v))
}

