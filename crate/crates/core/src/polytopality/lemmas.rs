use rand::Rng;
use serde::Serialize;

use crate::colorset::ColorSet;
use crate::constructions::{Hat2Flag, Hat2Pipeline, TwoOrbitInstance, Z2Vector};
use crate::error::{ForgeError, Result};
use crate::perm::{coset_intersection, GroupElement, Perm, PermGroup};
use crate::premaniplex::{Premaniplex, BLACK, WHITE};
use crate::voltage::{random_path, restricted_voltage_coset, restricted_voltage_group};

use super::PathSets;

/// One checked statement with its counterexamples (capped).
#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub ok: bool,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl LemmaCheck {
    fn new(name: &str) -> Self {
        LemmaCheck { name: name.to_string(), ok: true, cases: 0, failures: Vec::new() }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.ok = false;
            if self.failures.len() < 8 {
                self.failures.push(what());
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportLemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl SupportLemmaReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn get(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn require_two_links(inst: &TwoOrbitInstance) -> Result<()> {
    let n = inst.base.rank();
    if inst.semi != ColorSet::interval(1, n - 1) {
        return Err(ForgeError::InvalidArgument(format!("needs I = [1,{}], got {}", n - 1, inst.semi)));
    }
    Ok(())
}

fn mon(inst: &TwoOrbitInstance) -> PermGroup {
    let gens: Vec<GroupElement> = inst.base.generators().into_iter().map(GroupElement::from_perm).collect();
    PermGroup::from_elements(inst.base.num_flags(), gens.iter())
}

/// Closed paths at the white vertex over `[1,n]` have voltages generated by
/// the `r_i` and `ρ̂₀ r_{n−1} ρ̂₀`; and `ρ̂₀ r_i ρ̂₀ = r_i` below `n−1`.
pub fn check_generators(inst: &TwoOrbitInstance) -> Result<Vec<LemmaCheck>> {
    require_two_links(inst)?;
    let n = inst.base.rank();
    let rho = &inst.rho0_hat;
    let h = restricted_voltage_group(&inst.premaniplex, &inst.xi, WHITE, ColorSet::interval(1, n));
    let mut gens = Vec::new();
    for i in 1..n {
        gens.push(inst.base.r(i));
    }
    gens.push(rho.then(&inst.base.r(n - 1)).then(rho));
    let gens = gens
        .iter()
        .map(|p| inst.restrict(p).map(GroupElement::from_perm).ok_or_else(|| ForgeError::Construction("generator mixes flag colors".into())))
        .collect::<Result<Vec<_>>>()?;
    let target = PermGroup::from_elements(inst.white.len(), gens.iter());
    let mut eq = LemmaCheck::new("generators of closed [1,n] voltages");
    // under ξ′ the s-bits of y_n cancel on closed paths at the white vertex
    eq.case(h.same_group(&target), || format!("orders {} and {}", h.order(), target.order()));
    let mut conj = LemmaCheck::new("rho0 conjugation fixes r_i below n-1");
    for i in 0..n - 1 {
        let ri = inst.base.r(i);
        conj.case(rho.then(&ri).then(rho) == ri, || format!("fails for i = {i}"));
    }
    Ok(vec![eq, conj])
}

/// For every `m < n`: no voltage of an open path over `[0,m]` is the
/// voltage of an open path over `[1,n]`.
pub fn check_open_emptiness(inst: &TwoOrbitInstance, cap: u64) -> Result<LemmaCheck> {
    require_two_links(inst)?;
    let n = inst.base.rank();
    let mut ps = PathSets::new(&inst.premaniplex, &inst.xi);
    let high = ps.get(WHITE, BLACK, ColorSet::interval(1, n));
    let mut c = LemmaCheck::new("open [0,m] and [1,n] voltages are disjoint");
    for m in 0..n {
        let low = ps.get(WHITE, BLACK, ColorSet::interval(0, m));
        let (cap_set, _) = coset_intersection(&low, &high, cap)?;
        c.case(cap_set.is_empty(), || format!("m = {m}: {} common voltages", cap_set.size()));
    }
    Ok(c)
}

/// `y_n ω` is not a monodromy for sampled `ω` in the closed `[1,n]` group.
pub fn check_not_monodromy<R: Rng + ?Sized>(inst: &TwoOrbitInstance, samples: usize, rng: &mut R) -> Result<LemmaCheck> {
    require_two_links(inst)?;
    let n = inst.base.rank();
    let mon = mon(inst);
    let h = restricted_voltage_group(&inst.premaniplex, &inst.full, WHITE, ColorSet::interval(1, n));
    let y = GroupElement::from_perm(inst.y_n.clone());
    let mut c = LemmaCheck::new("y_n times a closed [1,n] voltage is not a monodromy");
    for _ in 0..samples {
        let w = h.random_element(rng);
        let g = y.mul(&GroupElement::from_perm(w.perm.clone()));
        c.case(!mon.contains(&g), || "sampled product lies in Mon".into());
    }
    Ok(c)
}

/// For paths avoiding colors 1 and n: `ξ(W) = r₀^ε r_{c_m} ⋯ r_{c_1}`, ε = 1
/// exactly when W is open.
pub fn check_claim<R: Rng + ?Sized>(inst: &TwoOrbitInstance, samples: usize, max_len: usize, rng: &mut R) -> LemmaCheck {
    let n = inst.base.rank();
    let x = &inst.premaniplex;
    let colors = ColorSet::full(n + 1).without(1).without(n);
    let r: Vec<Perm> = (0..n).map(|i| inst.base.r(i)).collect();
    let mut c = LemmaCheck::new("voltage of paths avoiding 1 and n");
    for _ in 0..samples {
        let start = rng.gen_range(0..2);
        let len = rng.gen_range(1..=max_len);
        let w = random_path(x, start, colors, len, rng);
        let got = inst.full.path_voltage(&w);
        let cols = w.colors(x);
        let mut want = if w.is_closed(x) { Perm::identity(inst.base.num_flags()) } else { r[0].clone() };
        for &col in cols.iter().rev() {
            want = want.then(&r[col]);
        }
        c.case(got.perm == want && !got.s, || format!("colors {cols:?} from vertex {start}"));
    }
    c
}

fn face_partitions(inst: &TwoOrbitInstance) -> Result<Vec<Vec<u32>>> {
    (0..inst.base.rank()).map(|i| inst.base.i_faces(i).map(|p| p.face_of)).collect()
}

/// Closed paths at the white vertex avoiding `K ∪ {n}` (1 ∈ K) have exactly
/// the voltages fixing the K-faces of white flags; open ones exactly those
/// with `(Φ⁰ω)_K = (Φ)_K`.
pub fn check_face_fixing(inst: &TwoOrbitInstance) -> Result<Vec<LemmaCheck>> {
    let n = inst.base.rank();
    let faces = face_partitions(inst)?;
    let x = &inst.premaniplex;
    let mut closed = LemmaCheck::new("closed voltages fix K-faces");
    let mut open = LemmaCheck::new("open voltages fix K-faces of the 0-neighbor");
    for bits in 0u64..(1 << n) {
        let k: ColorSet = (0..n).filter(|&c| bits >> c & 1 == 1).collect();
        if !k.contains(1) {
            continue;
        }
        let allowed = ColorSet::full(n + 1).minus(k).without(n);
        let same_faces = |f: usize, g: usize| k.iter().all(|c| faces[c][f] == faces[c][g]);
        let (comp, count) = inst.base.components(ColorSet::full(n).minus(k));
        let mut white_in = vec![0u64; count];
        let mut black_in = vec![0u64; count];
        for f in 0..inst.base.num_flags() {
            if inst.coloring.is_white(f) {
                white_in[comp[f] as usize] += 1;
            } else {
                black_in[comp[f] as usize] += 1;
            }
        }

        let h = restricted_voltage_group(x, &inst.full, WHITE, allowed);
        let gens_fix = h.generators().iter().all(|g| inst.white.iter().all(|&f| same_faces(f as usize, g.perm.image(f as usize))));
        closed.case(gens_fix, || format!("K = {k}: a generator moves a K-face"));
        let order = h.order();
        closed.case(white_in.iter().all(|&w| w == 0 || order == w.into()), || format!("K = {k}: |H| = {order}, white counts {white_in:?}"));

        let set = restricted_voltage_coset(x, &inst.full, WHITE, BLACK, allowed);
        match set.as_coset() {
            None => open.case(black_in.iter().zip(&white_in).all(|(&b, &w)| w == 0 || b == 0), || format!("K = {k}: no open path but black flags share K-faces")),
            Some(cs) => {
                let rep = &cs.rep.perm;
                let ok = inst.white.iter().all(|&f| same_faces(f as usize, rep.image(inst.base.neighbor(f as usize, 0))));
                open.case(ok, || format!("K = {k}: coset representative moves K-faces"));
                let sz = cs.size();
                open.case(black_in.iter().zip(&white_in).all(|(&b, &w)| w == 0 || sz == b.into()), || {
                    format!("K = {k}: coset size {sz}, black counts {black_in:?}")
                });
            }
        }
    }
    Ok(vec![closed, open])
}

/// On every facet, `y_n` fixes the flags on the base edge and swaps the
/// edges `e₀ = (Φ_F r₁)₁` and `e₁ = (Φ_F r₀r₁r₀)₁`.
pub fn check_edge_swap(inst: &TwoOrbitInstance) -> LemmaCheck {
    let m = &inst.base;
    let mut c = LemmaCheck::new("y_n fixes the base edge and swaps e0, e1");
    for (k, &phi) in inst.base_flag.iter().enumerate() {
        let phi = phi as usize;
        let e = inst.edge_of[phi];
        let e0 = inst.edge_of[m.neighbor(phi, 1)];
        let e1 = inst.edge_of[m.apply_word(&[0, 1, 0], phi).expect("in range")];
        for f in 0..m.num_flags() {
            if inst.facet_of[f] as usize != k {
                continue;
            }
            let g = inst.y_n.image(f);
            let ef = inst.edge_of[f];
            if ef == e {
                c.case(g == f, || format!("facet {k}: flag {f} on the base edge moves"));
            } else if ef == e0 {
                c.case(inst.edge_of[g] == e1, || format!("facet {k}: flag {f} on e0 not sent to e1"));
            } else if ef == e1 {
                c.case(inst.edge_of[g] == e0, || format!("facet {k}: flag {f} on e1 not sent to e0"));
            }
        }
    }
    c
}

/// Vertex-fixing on `M_n = 2̂^{M_{n−1}}`: with `u, v` the ends of the base
/// edge and `supp(x) ⊆ ū ∪ v̄`, `ρ̂₀ r_{n−1} ρ̂₀` keeps ψ and the support
/// bound for flags `(ψ, x)` at u, and so does every closed `[1,n]` voltage.
pub fn check_vertex_fixing<R: Rng + ?Sized>(p: &Hat2Pipeline, samples: usize, max_len: usize, rng: &mut R) -> Result<Vec<LemmaCheck>> {
    let m = p.hat.base();
    let n = p.rank();
    let nf = p.hat.base_facets();
    let vertex = m.i_faces(0)?.face_of;
    let u = vertex[0];
    let v = vertex[m.neighbor(0, 0)];
    let closure = |w: u32| (0..m.num_flags()).filter(|&f| vertex[f] == w).fold(0u64, |a, f| a | 1 << p.hat.base_facet_of(f));
    let uv = closure(u) | closure(v);
    let subsets: Vec<u64> = {
        let mut out = vec![0u64];
        let mut s = uv;
        while s != 0 {
            out.push(s);
            s = (s - 1) & uv;
        }
        out
    };
    let at_u: Vec<usize> = (0..m.num_flags()).filter(|&f| vertex[f] == u).collect();
    let inside = |y: &Z2Vector| y.to_mask().is_some_and(|mask| mask & !uv == 0);

    let mut near = LemmaCheck::new("facets near the base edge keep it");
    for &s in &subsets {
        let x = Z2Vector::from_mask(nf, s);
        near.case(p.table.copy_of(&x).is_none(), || format!("support {:?} is a copy of S", x.support()));
    }

    let mut one = LemmaCheck::new("conjugated r_{n-1} keeps the vertex");
    let mut starts = Vec::new();
    for &psi in &at_u {
        for &s in &subsets {
            let f = Hat2Flag { flag: psi, x: Z2Vector::from_mask(nf, s) };
            let g = p.conjugated_top(&f);
            one.case(g.flag == psi && inside(&g.x), || format!("flag {psi}, support {:?} -> {:?}", f.x.support(), g));
            starts.push(f);
        }
    }

    let x = Premaniplex::build_2nI(n + 1, ColorSet::interval(1, n - 1))?;
    let colors = ColorSet::interval(1, n);
    let mut more = LemmaCheck::new("closed [1,n] voltages keep the vertex");
    for _ in 0..samples {
        let len = rng.gen_range(1..=max_len);
        let mut w = random_path(&x, WHITE, colors, len, rng);
        if !w.is_closed(&x) {
            let end = w.end(&x);
            w.push(&x, x.dart_at(end, n))?;
        }
        let f = &starts[rng.gen_range(0..starts.len())];
        let g = p.apply_path_voltage(&x, &w.darts, f);
        more.case(vertex[g.flag] == u && inside(&g.x), || format!("colors {:?}", w.colors(&x)));
    }
    Ok(vec![near, one, more])
}

#[derive(Clone, Copy, Debug)]
pub struct SupportLemmaOptions {
    pub claim_samples: usize,
    pub monodromy_samples: usize,
    pub vertex_samples: usize,
    pub max_path_len: usize,
    pub enum_cap: u64,
}

impl Default for SupportLemmaOptions {
    fn default() -> Self {
        SupportLemmaOptions { claim_samples: 10_000, monodromy_samples: 2_000, vertex_samples: 2_000, max_path_len: 40, enum_cap: 10_000_000 }
    }
}

/// The statements the k = 1 case rests on. The group-level checks run on
/// the explicit instance; the vertex-fixing lemma needs `(ψ, x)`
/// coordinates and runs on `m_n` when given.
pub fn verify_k1_support_lemmas<R: Rng + ?Sized>(
    inst: &TwoOrbitInstance,
    m_n: Option<&Hat2Pipeline>,
    opts: SupportLemmaOptions,
    rng: &mut R,
) -> Result<SupportLemmaReport> {
    let mut checks = check_generators(inst)?;
    checks.push(check_open_emptiness(inst, opts.enum_cap)?);
    checks.push(check_not_monodromy(inst, opts.monodromy_samples, rng)?);
    checks.push(check_claim(inst, opts.claim_samples, opts.max_path_len, rng));
    checks.extend(check_face_fixing(inst)?);
    checks.push(check_edge_swap(inst));
    if let Some(p) = m_n {
        checks.extend(check_vertex_fixing(p, opts.vertex_samples, opts.max_path_len, rng)?);
    }
    Ok(SupportLemmaReport { checks })
}
