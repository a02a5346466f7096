//! Stabilizer chain built by incremental Schreier-Sims.
//!
//! Base points are chosen on demand as the first point moved by a residue,
//! so the chain is deterministic for a fixed generator order.

use num_bigint::BigUint;
use rand::Rng;

use super::element::Perm;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    gens: Vec<Perm>,
    rep_of: Vec<u32>,
    reps: Vec<Perm>,
    inv_reps: Vec<Perm>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut rep_of = vec![NONE; degree];
        rep_of[point] = 0;
        Level {
            point,
            gens: Vec::new(),
            rep_of,
            reps: vec![Perm::identity(degree)],
            inv_reps: vec![Perm::identity(degree)],
        }
    }
}

#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize) -> Self {
        StabChain { degree, levels: Vec::new() }
    }

    pub fn from_generators<'a>(degree: usize, gens: impl IntoIterator<Item = &'a Perm>) -> Self {
        let mut c = StabChain::new(degree);
        for g in gens {
            c.insert(g);
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.reps.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.reps.len()))
    }

    /// Orbit of the first base point (empty group: just `[0]`).
    pub fn base_orbit(&self) -> Vec<usize> {
        match self.levels.first() {
            None => vec![0],
            Some(l) => l.reps.iter().map(|r| r.image(l.point)).collect(),
        }
    }

    /// Sifts `g` from level `from`. Returns the residue and the index of the
    /// level where it dropped out (`levels.len()` if it passed every level).
    fn sift(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.images().to_vec();
        let mut buf = Vec::with_capacity(self.degree);
        for k in from..self.levels.len() {
            let lvl = &self.levels[k];
            let j = h[lvl.point] as usize;
            let r = lvl.rep_of[j];
            if r == NONE {
                return (Perm::from_images_unchecked(h), k);
            }
            if r != 0 {
                let inv = &lvl.inv_reps[r as usize];
                buf.clear();
                buf.extend(h.iter().map(|&x| inv.images()[x as usize]));
                std::mem::swap(&mut h, &mut buf);
            }
        }
        (Perm::from_images_unchecked(h), self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (res, lvl) = self.sift(g, 0);
        lvl == self.levels.len() && res.is_identity()
    }

    /// Adds `g` to the group. Returns false if it was already a member.
    pub fn insert(&mut self, g: &Perm) -> bool {
        assert_eq!(g.degree(), self.degree, "degree mismatch");
        let (res, lvl) = self.sift(g, 0);
        if lvl == self.levels.len() && res.is_identity() {
            return false;
        }
        self.add_generator(res, lvl);
        true
    }

    fn add_generator(&mut self, g: Perm, k: usize) {
        if k == self.levels.len() {
            let point = (0..self.degree)
                .find(|&x| g.image(x) != x)
                .expect("residue is not the identity");
            self.levels.push(Level::new(point, self.degree));
        }
        self.levels[k].gens.push(g.clone());
        // g lies in every stabilizer above level k, so each of those orbits
        // and Schreier generator sets must see it
        for j in (0..=k).rev() {
            let count = self.levels[j].reps.len();
            for idx in 0..count {
                let t = self.levels[j].reps[idx].then(&g);
                self.lift(t, j);
            }
        }
    }

    fn lift(&mut self, t: Perm, k: usize) {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            let point = self.levels[k].point;
            let j = t.image(point);
            let r = self.levels[k].rep_of[j];
            if r != NONE {
                let h = t.then(&self.levels[k].inv_reps[r as usize]);
                let (res, lvl) = self.sift(&h, k + 1);
                if !(lvl == self.levels.len() && res.is_identity()) {
                    self.add_generator(res, lvl);
                }
            } else {
                let lvl = &mut self.levels[k];
                lvl.rep_of[j] = lvl.reps.len() as u32;
                lvl.inv_reps.push(t.inverse());
                lvl.reps.push(t.clone());
                for l in &self.levels[k..] {
                    for s in &l.gens {
                        stack.push(t.then(s));
                    }
                }
            }
        }
    }

    /// All elements, deepest level acting first. Caller checks the size.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for lvl in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * lvl.reps.len());
            let mut buf = Vec::new();
            for g in &out {
                for u in &lvl.reps {
                    g.then_into(u, &mut buf);
                    next.push(Perm::from_images_unchecked(buf.clone()));
                }
            }
            out = next;
        }
        out
    }

    /// Uniformly random element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.degree);
        for lvl in self.levels.iter().rev() {
            let u = &lvl.reps[rng.gen_range(0..lvl.reps.len())];
            g = g.then(u);
        }
        g
    }

    /// Strong generators in level order.
    pub fn strong_generators(&self) -> Vec<Perm> {
        self.levels.iter().flat_map(|l| l.gens.iter().cloned()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn cyc(n: usize) -> Perm {
        Perm::from_fn(n, |x| (x + 1) % n).unwrap()
    }

    fn swap01(n: usize) -> Perm {
        Perm::from_fn(n, |x| match x {
            0 => 1,
            1 => 0,
            y => y,
        })
        .unwrap()
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..=7usize {
            let c = StabChain::from_generators(n, [&cyc(n), &swap01(n)]);
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(c.order(), BigUint::from(fact));
        }
    }

    #[test]
    fn alternating_group_membership() {
        let n = 6;
        let three = Perm::from_images(vec![1, 2, 0, 3, 4, 5]).unwrap();
        let shift = Perm::from_images(vec![0, 2, 3, 4, 5, 1]).unwrap();
        let c = StabChain::from_generators(n, [&three, &shift]);
        assert_eq!(c.order(), BigUint::from(360u32));
        assert!(!c.contains(&swap01(n)));
        assert!(c.contains(&three.then(&shift)));
    }

    #[test]
    fn enumeration_matches_order() {
        let n = 5;
        let a = Perm::from_images(vec![1, 0, 2, 3, 4]).unwrap();
        let b = Perm::from_images(vec![0, 1, 3, 4, 2]).unwrap();
        let c = StabChain::from_generators(n, [&a, &b]);
        let elems: HashSet<Perm> = c.elements().into_iter().collect();
        assert_eq!(BigUint::from(elems.len()), c.order());
        assert_eq!(elems.len(), 6);
        for e in &elems {
            assert!(c.contains(e));
        }
    }

    #[test]
    fn insert_reports_redundancy() {
        let mut c = StabChain::new(4);
        assert!(c.insert(&cyc(4)));
        assert!(!c.insert(&cyc(4).then(&cyc(4))));
        assert!(!c.insert(&Perm::identity(4)));
    }
}
