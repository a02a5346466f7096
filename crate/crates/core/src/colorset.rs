use serde::{Deserialize, Serialize};
use std::fmt;

/// Set of colors, at most 64 of them.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorSet(pub u64);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ColorSet(u64::MAX)
        } else {
            ColorSet((1u64 << n) - 1)
        }
    }

    /// `[k,m]`; empty when `k > m`.
    pub fn interval(k: usize, m: usize) -> Self {
        if k > m {
            return ColorSet::EMPTY;
        }
        ColorSet(ColorSet::full(m + 1).0 & !ColorSet::full(k).0)
    }

    pub fn single(c: usize) -> Self {
        ColorSet(1 << c)
    }

    pub fn from_slice(colors: &[usize]) -> Self {
        ColorSet(colors.iter().fold(0, |acc, &c| acc | (1 << c)))
    }

    pub fn contains(self, c: usize) -> bool {
        c < 64 && self.0 >> c & 1 == 1
    }

    pub fn insert(&mut self, c: usize) {
        self.0 |= 1 << c;
    }

    pub fn with(self, c: usize) -> Self {
        ColorSet(self.0 | 1 << c)
    }

    pub fn without(self, c: usize) -> Self {
        ColorSet(self.0 & !(1 << c))
    }

    pub fn union(self, o: ColorSet) -> Self {
        ColorSet(self.0 | o.0)
    }

    pub fn intersection(self, o: ColorSet) -> Self {
        ColorSet(self.0 & o.0)
    }

    pub fn minus(self, o: ColorSet) -> Self {
        ColorSet(self.0 & !o.0)
    }

    pub fn complement(self, n: usize) -> Self {
        ColorSet(!self.0 & ColorSet::full(n).0)
    }

    pub fn is_subset_of(self, o: ColorSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&c| self.contains(c))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// True if the set is `[min,max]` with no gaps (the empty set is not).
    pub fn is_interval(self) -> bool {
        match (self.min(), self.max()) {
            (Some(a), Some(b)) => self == ColorSet::interval(a, b),
            _ => false,
        }
    }

    /// Parses "1,2,3"; the empty string is the empty set.
    pub fn parse_csv(s: &str) -> Result<Self, String> {
        let mut out = ColorSet::EMPTY;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let c: usize = part.parse().map_err(|_| format!("bad color {part:?}"))?;
            if c >= 64 {
                return Err(format!("color {c} out of range"));
            }
            out.insert(c);
        }
        Ok(out)
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

impl FromIterator<usize> for ColorSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = ColorSet::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals() {
        assert_eq!(ColorSet::interval(1, 2).to_vec(), vec![1, 2]);
        assert!(ColorSet::interval(3, 2).is_empty());
        assert!(ColorSet::from_slice(&[0, 1, 2]).is_interval());
        assert!(!ColorSet::from_slice(&[0, 2]).is_interval());
    }

    #[test]
    fn csv() {
        assert_eq!(ColorSet::parse_csv("1,2").unwrap(), ColorSet::from_slice(&[1, 2]));
        assert_eq!(ColorSet::parse_csv("").unwrap(), ColorSet::EMPTY);
        assert!(ColorSet::parse_csv("x").is_err());
    }
}
