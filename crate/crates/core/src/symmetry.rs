//! Automorphism groups, flag orbits and symmetry type graphs, plus orbit
//! certification for derived graphs that are too large to materialize.

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Arc;

use crate::colorset::ColorSet;
use crate::error::{ForgeError, Result};
use crate::flagcore::Maniplex;
use crate::perm::{GroupElement, Perm, PermGroup};
use crate::premaniplex::{Dart, Premaniplex};
use crate::voltage::{restricted_voltage_coset, restricted_voltage_group, VoltageAssignment};

/// All automorphisms of a maniplex, indexed by the image of flag 0.
#[derive(Clone, Debug)]
pub struct AutGroup {
    elements: Vec<Perm>,
    by_image: Vec<Option<usize>>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    /// The automorphism sending flag 0 to `flag`.
    pub fn by_image_of_base(&self, flag: usize) -> Option<&Perm> {
        self.by_image[flag].map(|k| &self.elements[k])
    }

    /// The automorphism sending `from` to `to`.
    pub fn mapping(&self, from: usize, to: usize) -> Option<Perm> {
        let a = self.by_image_of_base(from)?;
        let b = self.by_image_of_base(to)?;
        Some(a.inverse().then(b))
    }

    pub fn to_perm_group(&self) -> PermGroup {
        let n = self.by_image.len();
        let es: Vec<GroupElement> = self.elements.iter().cloned().map(GroupElement::from_perm).collect();
        PermGroup::from_elements(n, es.iter())
    }

    /// No non-identity element fixes a flag.
    pub fn acts_freely(&self) -> bool {
        self.elements.iter().all(|g| g.is_identity() || g.fixed_points() == 0)
    }
}

/// Anchored propagation from every candidate image of flag 0.
pub fn automorphisms(m: &Maniplex) -> AutGroup {
    let cands = m.anchor_candidates(m);
    let found: Vec<Perm> = cands
        .par_iter()
        .filter_map(|&t| m.anchored_map(m, t))
        .map(Perm::from_images_unchecked)
        .collect();
    let mut by_image = vec![None; m.num_flags()];
    for (k, g) in found.iter().enumerate() {
        by_image[g.image(0)] = Some(k);
    }
    AutGroup { elements: found, by_image }
}

/// Orbit label per flag (orbits numbered by smallest flag) and orbit count.
pub fn flag_orbits(m: &Maniplex, aut: &AutGroup) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; m.num_flags()];
    let mut count = 0;
    for f in 0..m.num_flags() {
        if label[f] != usize::MAX {
            continue;
        }
        for g in aut.elements() {
            label[g.image(f)] = count;
        }
        count += 1;
    }
    (label, count)
}

pub fn is_regular(m: &Maniplex) -> bool {
    automorphisms(m).order() == m.num_flags()
}

/// Quotient of the flag graph by the automorphism group.
pub fn symmetry_type_graph(m: &Maniplex) -> Result<Premaniplex> {
    let aut = automorphisms(m);
    let (label, _) = flag_orbits(m, &aut);
    Premaniplex::from_maniplex(m)?.quotient(&label)
}

/// `m` modulo a group `h` of its automorphisms (given by all its
/// elements), with voltages in `h` whose derived graph is `m` again. The
/// dart of color c from orbit u to orbit w carries the α ∈ h with
/// `f_u^c = f_w α`, where `f_v` is the smallest flag of orbit v, so flag
/// `(v, γ)` of the derived graph is `f_v γ`. Also returns the `f_v`.
pub fn quotient_voltages(m: &Maniplex, h: &[Perm]) -> Result<(Premaniplex, VoltageAssignment, Vec<usize>)> {
    let mut label = vec![usize::MAX; m.num_flags()];
    let mut rep = Vec::new();
    for f in 0..m.num_flags() {
        if label[f] == usize::MAX {
            for g in h {
                label[g.image(f)] = rep.len();
            }
            rep.push(f);
        }
    }
    let x = Premaniplex::from_maniplex(m)?.quotient(&label)?;
    let volts = x
        .darts()
        .iter()
        .map(|d| {
            let img = m.neighbor(rep[d.from], d.color);
            let alpha = h
                .iter()
                .find(|g| g.image(rep[d.to]) == img)
                .ok_or_else(|| ForgeError::InvalidArgument("elements do not form a group of automorphisms".into()))?;
            Ok(GroupElement::from_perm(alpha.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let xi = VoltageAssignment::new(&x, volts)?;
    Ok((x, xi, rep))
}

/// [`quotient_voltages`] by the full automorphism group: the symmetry type
/// graph with voltages reproducing `m`.
pub fn stg_voltages(m: &Maniplex) -> Result<(Premaniplex, VoltageAssignment, Vec<usize>)> {
    quotient_voltages(m, automorphisms(m).elements())
}

/// Cycle length of a flag of the derived graph over vertex `x` under the
/// monodromy word `w`; the same for all flags of the fiber.
pub fn fiber_word_period(x: &Premaniplex, xi: &VoltageAssignment, v: usize, word: &[usize]) -> Result<BigUint> {
    let mut cur = v;
    let mut volt = xi.identity();
    let mut t = 0u64;
    loop {
        for &c in word {
            if c >= x.rank() {
                return Err(ForgeError::InvalidArgument(format!("color {c} out of range")));
            }
            let d = x.dart_at(cur, c);
            volt = xi.get(d).mul(&volt);
            cur = x.dart(d).to;
        }
        t += 1;
        if cur == v {
            break;
        }
    }
    Ok(BigUint::from(t) * element_order(&volt))
}

fn element_order(g: &GroupElement) -> BigUint {
    let p = g.perm.order();
    if g.s {
        p.lcm(&BigUint::from(2u32))
    } else {
        p
    }
}

/// Distinguishing words: every `r_i r_j` and the Coxeter word `r_0 ⋯ r_{n−1}`.
pub fn distinguishing_words(rank: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            out.push(vec![i, j]);
        }
    }
    out.push((0..rank).collect());
    out.push((0..rank).rev().chain(1..rank).collect());
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberInvariants {
    pub vertex: usize,
    pub periods: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCertificate {
    pub a: usize,
    pub b: usize,
    pub closed_group_order: String,
    pub first_projection_order: String,
    pub second_projection_order: String,
    /// A word fixing one fiber's base flag while moving the other exists.
    pub open_separator: bool,
    pub same_orbit: bool,
}

/// Flag-orbit analysis of a derived graph without materializing it.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitCertificate {
    /// Fibers are unions of orbits' pieces: the Γ action gives at most |V| orbits.
    pub orbit_bound: usize,
    pub invariants: Vec<FiberInvariants>,
    /// Some pair of fibers is told apart by a word period.
    pub distinguished_pairs: Vec<(usize, usize)>,
    pub pairs: Vec<PairCertificate>,
    /// Exact orbit count from the pair certificates.
    pub orbit_count: usize,
    /// Orbit label of each fiber.
    pub orbit_of_vertex: Vec<usize>,
}

/// Decides which fibers of `X^ξ` lie in one automorphism orbit.
///
/// Flags `(a,1)` and `(b,1)` are in one orbit iff they have the same
/// monodromy stabilizer. Words are walked on `X × X` with voltages in
/// `Γ × Γ`, so the test reduces to orders and memberships there.
pub fn certify_derived_orbits(x: &Premaniplex, xi: &VoltageAssignment) -> Result<OrbitCertificate> {
    xi.check_against(x)?;
    let nv = x.num_vertices();
    let words = distinguishing_words(x.rank());
    let mut invariants = Vec::new();
    for v in 0..nv {
        let periods = words
            .iter()
            .map(|w| fiber_word_period(x, xi, v, w).map(|p| p.to_string()))
            .collect::<Result<Vec<_>>>()?;
        invariants.push(FiberInvariants { vertex: v, periods });
    }
    let mut distinguished = Vec::new();
    for a in 0..nv {
        for b in a + 1..nv {
            if invariants[a].periods != invariants[b].periods {
                distinguished.push((a, b));
            }
        }
    }
    let mut orbit = (0..nv).collect::<Vec<_>>();
    let mut pairs = Vec::new();
    for a in 0..nv {
        for b in a + 1..nv {
            let cert = pair_certificate(x, xi, a, b)?;
            if cert.same_orbit {
                let (oa, ob) = (orbit[a], orbit[b]);
                for o in orbit.iter_mut() {
                    if *o == ob {
                        *o = oa;
                    }
                }
            }
            pairs.push(cert);
        }
    }
    let mut renum = HashMap::new();
    let orbit_of_vertex: Vec<usize> = orbit
        .iter()
        .map(|o| {
            let k = renum.len();
            *renum.entry(*o).or_insert(k)
        })
        .collect();
    Ok(OrbitCertificate {
        orbit_bound: nv,
        invariants,
        distinguished_pairs: distinguished,
        pairs,
        orbit_count: renum.len(),
        orbit_of_vertex,
    })
}

fn pair_element(g: &GroupElement, h: &GroupElement) -> GroupElement {
    let a = g.to_extended();
    let b = h.to_extended();
    let k = a.degree();
    let imgs = a.images().iter().copied().chain(b.images().iter().map(|&y| y + k as u32)).collect();
    GroupElement::from_perm(Perm::from_images_unchecked(imgs))
}

fn project(g: &GroupElement, half: usize, second: bool) -> GroupElement {
    let imgs: Vec<u32> = if second {
        g.perm.images()[half..].iter().map(|&y| y - half as u32).collect()
    } else {
        g.perm.images()[..half].to_vec()
    };
    GroupElement::from_extended(&Perm::from_images_unchecked(imgs))
}

fn pair_certificate(x: &Premaniplex, xi: &VoltageAssignment, a: usize, b: usize) -> Result<PairCertificate> {
    let n = x.rank();
    // product component of (a,b)
    let mut id = HashMap::new();
    let mut verts = vec![(a, b)];
    id.insert((a, b), 0usize);
    let mut i = 0;
    while i < verts.len() {
        let (p, q) = verts[i];
        for c in 0..n {
            let t = (x.dart(x.dart_at(p, c)).to, x.dart(x.dart_at(q, c)).to);
            if !id.contains_key(&t) {
                id.insert(t, verts.len());
                verts.push(t);
            }
        }
        i += 1;
    }
    let dart_id = |v: usize, c: usize| v * n + c;
    let mut darts = Vec::new();
    let mut volts = Vec::new();
    for (v, &(p, q)) in verts.iter().enumerate() {
        for c in 0..n {
            let dp = x.dart(x.dart_at(p, c));
            let dq = x.dart(x.dart_at(q, c));
            let w = id[&(dp.to, dq.to)];
            darts.push(Dart { id: dart_id(v, c), color: c, from: v, to: w, inv: dart_id(w, c) });
            volts.push(pair_element(xi.get(dp.id), xi.get(dq.id)));
        }
    }
    let prod = Premaniplex::new(verts.len(), darts)?;
    let pxi = VoltageAssignment::new(&prod, volts)?;
    let all = ColorSet::full(n);
    let g = restricted_voltage_group(&prod, &pxi, 0, all);
    let half = xi.degree() + 2;
    let g1 = PermGroup::from_elements(xi.degree(), g.generators().iter().map(|e| project(e, half, false)).collect::<Vec<_>>().iter());
    let g2 = PermGroup::from_elements(xi.degree(), g.generators().iter().map(|e| project(e, half, true)).collect::<Vec<_>>().iter());
    let (o, o1, o2) = (g.order(), g1.order(), g2.order());
    let g1 = Arc::new(g1);
    let g2 = Arc::new(g2);
    let mut open_separator = false;
    for (v, &(p, q)) in verts.iter().enumerate() {
        if (p == a) == (q == b) {
            continue;
        }
        let set = restricted_voltage_coset(&prod, &pxi, 0, v, all);
        let rep = &set.as_coset().expect("reachable").rep;
        let hit = if p == a { g1.contains(&project(rep, half, false)) } else { g2.contains(&project(rep, half, true)) };
        if hit {
            open_separator = true;
            break;
        }
    }
    let same = o == o1 && o == o2 && !open_separator;
    Ok(PairCertificate {
        a,
        b,
        closed_group_order: o.to_string(),
        first_projection_order: o1.to_string(),
        second_projection_order: o2.to_string(),
        open_separator,
        same_orbit: same,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octagon() -> Maniplex {
        let r0: Vec<u32> = (0..8).map(|i| i ^ 1).collect();
        let r1: Vec<u32> = (0..8).map(|i| if i % 2 == 1 { (i + 1) % 8 } else { (i + 7) % 8 }).collect();
        Maniplex::new(2, vec![r0, r1]).unwrap()
    }

    #[test]
    fn square_is_regular() {
        let m = octagon();
        let aut = automorphisms(&m);
        assert_eq!(aut.order(), 8);
        assert!(aut.acts_freely());
        let stg = symmetry_type_graph(&m).unwrap();
        assert_eq!(stg.num_vertices(), 1);
        assert_eq!(stg.semi_edge_colors(0), ColorSet::full(2));
    }

    #[test]
    fn mapping_composes() {
        let m = octagon();
        let aut = automorphisms(&m);
        let g = aut.mapping(3, 6).unwrap();
        assert_eq!(g.image(3), 6);
    }
}
