use crate::colorset::ColorSet;
use crate::error::{ForgeError, Result};

/// Semi-edge sets I ⊂ [0,n−1] whose complement has one or two colors or is
/// an interval. These are the two-vertex types of rank n shown to be
/// symmetry types of polytopes.
pub fn enumerate_covered_classes(n: usize) -> Result<Vec<ColorSet>> {
    if n < 3 {
        return Err(ForgeError::InvalidArgument(format!("rank {n} must be at least 3")));
    }
    if n > 63 {
        return Err(ForgeError::InvalidArgument(format!("rank {n} is too large")));
    }
    let full = ColorSet::full(n);
    let mut out = Vec::new();
    for bits in 0..(1u64 << n) - 1 {
        let i = ColorSet::from_slice(&(0..n).filter(|&c| bits >> c & 1 == 1).collect::<Vec<_>>());
        let comp = i.complement(n);
        if comp.len() <= 2 || comp.is_interval() {
            out.push(i);
        }
        debug_assert!(i != full);
    }
    Ok(out)
}

/// `n² − n + 1`.
pub fn covered_class_count(n: usize) -> usize {
    n * n - n + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(enumerate_covered_classes(3).unwrap().len(), 7);
        assert_eq!(enumerate_covered_classes(4).unwrap().len(), 13);
        assert!(enumerate_covered_classes(2).is_err());
    }
}
