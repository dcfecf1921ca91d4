//! Canonical indexing of unordered node pairs (graph edges).
//!
//! Edges are enumerated row-major over the strict upper triangle:
//! (0,1), (0,2), ..., (0,p-1), (1,2), ... — a bijection between pairs
//! `i < j` and flat indices in `[0, p(p-1)/2)`.

use crate::error::{Error, Result};

/// Number of candidate edges for `p` nodes: p choose 2.
pub fn edge_count(p: usize) -> usize {
    p * (p - 1) / 2
}

/// An unordered node pair `i < j` with its canonical flat index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIndex {
    i: usize,
    j: usize,
    flat: usize,
}

impl EdgeIndex {
    /// Canonical index of the pair `(i, j)`, `i < j < p` (0-based nodes).
    pub fn new(i: usize, j: usize, p: usize) -> Result<Self> {
        if p < 2 || j >= p || i >= j {
            return Err(Error::InvalidArgument(format!(
                "edge ({i},{j}) out of range for p={p}; need i < j < p"
            )));
        }
        let flat = i * (2 * p - i - 1) / 2 + (j - i - 1);
        Ok(EdgeIndex { i, j, flat })
    }

    /// Recover the pair from a flat index.
    pub fn from_flat(flat: usize, p: usize) -> Result<Self> {
        if p < 2 || flat >= edge_count(p) {
            return Err(Error::InvalidArgument(format!(
                "flat edge index {flat} out of range for p={p}"
            )));
        }
        // Closed-form row, then a guard against float rounding.
        let fp = flat as f64;
        let pf = p as f64;
        let mut i = ((2.0 * pf - 1.0 - ((2.0 * pf - 1.0).powi(2) - 8.0 * fp).sqrt()) / 2.0)
            .floor() as usize;
        loop {
            let start = i * (2 * p - i - 1) / 2;
            let next = (i + 1) * (2 * p - i - 2) / 2;
            if flat < start {
                i -= 1;
            } else if flat >= next {
                i += 1;
            } else {
                let j = flat - start + i + 1;
                return EdgeIndex::new(i, j, p);
            }
        }
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn flat(&self) -> usize {
        self.flat
    }
}

/// All edges of a `p`-node graph in canonical order.
pub fn edges(p: usize) -> impl Iterator<Item = EdgeIndex> {
    (0..p).flat_map(move |i| {
        ((i + 1)..p).map(move |j| EdgeIndex::new(i, j, p).expect("in range by construction"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_for_three_nodes() {
        assert_eq!(EdgeIndex::new(0, 1, 3).unwrap().flat(), 0);
        assert_eq!(EdgeIndex::new(0, 2, 3).unwrap().flat(), 1);
        assert_eq!(EdgeIndex::new(1, 2, 3).unwrap().flat(), 2);
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(EdgeIndex::new(1, 1, 3).is_err());
        assert!(EdgeIndex::new(2, 1, 3).is_err());
        assert!(EdgeIndex::new(0, 3, 3).is_err());
        assert!(EdgeIndex::new(0, 1, 1).is_err());
    }

    #[test]
    fn round_trip_exhaustive_up_to_p50() {
        for p in 2..=50 {
            let mut seen = vec![false; edge_count(p)];
            for e in edges(p) {
                let back = EdgeIndex::from_flat(e.flat(), p).unwrap();
                assert_eq!(back, e);
                assert!(!seen[e.flat()], "duplicate flat index");
                seen[e.flat()] = true;
            }
            assert!(seen.iter().all(|&s| s), "missing flat index for p={p}");
        }
    }

    #[test]
    fn edge_iteration_matches_count() {
        assert_eq!(edges(5).count(), edge_count(5));
        assert_eq!(edge_count(2), 1);
    }
}
