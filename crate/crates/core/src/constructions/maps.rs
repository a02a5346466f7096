use crate::error::{ForgeError, Result};
use crate::flagcore::Maniplex;

/// Flag graph of the square: an octagon alternating colors 0 and 1.
/// Flag 2k and 2k+1 share vertex k (color 1 is the vertex-fixing swap
/// inside a corner, color 0 walks along an edge).
pub fn square_flag_graph() -> Maniplex {
    let r0: Vec<u32> = (0..8).map(|i| i ^ 1).collect();
    let r1: Vec<u32> = (0..8).map(|i| if i % 2 == 1 { (i + 1) % 8 } else { (i + 7) % 8 }).collect();
    Maniplex::new(2, vec![r0, r1]).expect("octagon")
}

/// Coordinates of a flag of the torus map: square (fx, fy), corner
/// (cx, cy) and which of the two corner flags (t).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusFlag {
    pub fx: usize,
    pub fy: usize,
    pub cx: usize,
    pub cy: usize,
    pub t: usize,
}

impl TorusFlag {
    pub fn id(&self, s: usize) -> usize {
        ((((self.fy % s) * s + self.fx % s) * 4 + self.cy * 2 + self.cx) * 2) + self.t
    }

    pub fn decode(id: usize, s: usize) -> Self {
        let t = id % 2;
        let c = (id / 2) % 4;
        let sq = id / 8;
        TorusFlag { fx: sq % s, fy: (sq / s) % s, cx: c % 2, cy: c / 2, t }
    }
}

/// The map {4,4}_(s,0): an s×s board of squares with opposite sides
/// identified. A flag is a square, a corner of it, and one of the two
/// sides at that corner (t = 0 horizontal, t = 1 vertical).
pub fn torus_map_44(s: usize) -> Result<Maniplex> {
    if s < 2 {
        return Err(ForgeError::InvalidArgument(format!("torus size {s} must be at least 2")));
    }
    let n = 8 * s * s;
    let mut adj = vec![vec![0u32; n]; 3];
    let id = |fx: usize, fy: usize, cx: usize, cy: usize, t: usize| TorusFlag { fx, fy, cx, cy, t }.id(s) as u32;
    for i in 0..n {
        let TorusFlag { fx, fy, cx, cy, t } = TorusFlag::decode(i, s);
        let (l, d) = ((fx + s - 1) % s, (fy + s - 1) % s);
        adj[0][i] = if t == 0 { id(fx, fy, 1 - cx, cy, t) } else { id(fx, fy, cx, 1 - cy, t) };
        adj[1][i] = id(fx, fy, cx, cy, 1 - t);
        adj[2][i] = match (t, cx, cy) {
            (0, _, 0) => id(fx, d, cx, 1, 0),
            (0, _, _) => id(fx, fy + 1, cx, 0, 0),
            (_, 0, _) => id(l, fy, 1, cy, 1),
            _ => id(fx + 1, fy, 0, cy, 1),
        };
    }
    Maniplex::new(3, adj)
}

/// The map {4,4}_(b,c): the square grid modulo the lattice spanned by
/// (b,c) and (−c,b). Chiral when b, c are nonzero and distinct. Flags
/// are numbered square by square in the order squares are first reached.
pub fn torus_map_44_skew(b: i64, c: i64) -> Result<Maniplex> {
    let d = b * b + c * c;
    if d == 0 {
        return Err(ForgeError::InvalidArgument("lattice vector must be nonzero".into()));
    }
    let same = |p: (i64, i64), q: (i64, i64)| {
        let (dx, dy) = (p.0 - q.0, p.1 - q.1);
        (b * dx + c * dy) % d == 0 && (b * dy - c * dx) % d == 0
    };
    let mut reps: Vec<(i64, i64)> = vec![(0, 0)];
    let mut nbr: Vec<[usize; 4]> = Vec::new();
    let mut i = 0;
    while i < reps.len() {
        let (x, y) = reps[i];
        let mut out = [0; 4];
        for (k, p) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)].into_iter().enumerate() {
            out[k] = match reps.iter().position(|&q| same(p, q)) {
                Some(j) => j,
                None => {
                    reps.push(p);
                    reps.len() - 1
                }
            };
        }
        nbr.push(out);
        i += 1;
    }
    let n = 8 * reps.len();
    let id = |sq: usize, cx: usize, cy: usize, t: usize| ((sq * 4 + cy * 2 + cx) * 2 + t) as u32;
    let mut adj = vec![vec![0u32; n]; 3];
    for f in 0..n {
        let (t, cx, cy, sq) = (f % 2, (f / 2) % 2, (f / 4) % 2, f / 8);
        adj[0][f] = if t == 0 { id(sq, 1 - cx, cy, t) } else { id(sq, cx, 1 - cy, t) };
        adj[1][f] = id(sq, cx, cy, 1 - t);
        adj[2][f] = match (t, cx, cy) {
            (0, _, 0) => id(nbr[sq][2], cx, 1, 0),
            (0, _, _) => id(nbr[sq][3], cx, 0, 0),
            (_, 0, _) => id(nbr[sq][0], 1, cy, 1),
            _ => id(nbr[sq][1], 0, cy, 1),
        };
    }
    Maniplex::new(3, adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_counts() {
        for s in 2..=5 {
            let m = torus_map_44(s).unwrap();
            assert_eq!(m.num_flags(), 8 * s * s);
            assert_eq!(m.facets().count(), s * s);
        }
        assert!(torus_map_44(1).is_err());
    }

    #[test]
    fn skew_sizes() {
        assert_eq!(torus_map_44_skew(1, 2).unwrap().num_flags(), 40);
        assert!(torus_map_44_skew(3, 0).unwrap().is_isomorphic(&torus_map_44(3).unwrap()).is_some());
    }

    #[test]
    fn coordinates_round_trip() {
        for i in 0..8 * 36 {
            assert_eq!(TorusFlag::decode(i, 6).id(6), i);
        }
    }
}
