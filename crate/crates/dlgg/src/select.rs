//! Graph selection from posterior draws.
//!
//! The shrinkage prior never produces exact zeros, so the estimated graph is
//! the thresholded support: edges with |omega_ij| > delta. Selection operates
//! on per-draw supports summarized as inclusion frequencies, with a cutoff
//! (default 0.5) on the frequency.

use std::collections::BTreeSet;

use crate::edge::{edge_count, edges, EdgeIndex};
use crate::error::{Error, Result};
use crate::gibbs::PosteriorSamples;
use crate::mat::PrecisionMatrix;
use crate::scalar::{c, Scalar};

/// A set of edges over `p` nodes, stored by canonical flat index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    p: usize,
    flats: BTreeSet<usize>,
}

impl EdgeSet {
    pub fn empty(p: usize) -> Self {
        EdgeSet {
            p,
            flats: BTreeSet::new(),
        }
    }

    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = EdgeIndex>) -> Result<Self> {
        let mut set = EdgeSet::empty(p);
        for e in edges {
            set.insert(e)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, e: EdgeIndex) -> Result<()> {
        if e.flat() >= edge_count(self.p) {
            return Err(Error::InvalidArgument(format!(
                "edge ({}, {}) out of range for p = {}",
                e.i(),
                e.j(),
                self.p
            )));
        }
        self.flats.insert(e.flat());
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn contains(&self, e: EdgeIndex) -> bool {
        self.flats.contains(&e.flat())
    }

    pub fn contains_flat(&self, flat: usize) -> bool {
        self.flats.contains(&flat)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeIndex> + '_ {
        self.flats
            .iter()
            .map(move |&f| EdgeIndex::from_flat(f, self.p).expect("validated on insert"))
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.flats.is_subset(&other.flats)
    }
}

/// Edges with |omega_ij| > delta.
pub fn support_threshold<T: Scalar>(omega: &PrecisionMatrix<T>, delta: T) -> Result<EdgeSet> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument("delta must be > 0".into()));
    }
    let p = omega.dim();
    let mut set = EdgeSet::empty(p);
    for e in edges(p) {
        if omega.get(e.i(), e.j()).abs() > delta {
            set.insert(e)?;
        }
    }
    Ok(set)
}

/// The threshold delta_p = s_guess / p^2 for an assumed sparsity level.
pub fn default_delta<T: Scalar>(p: usize, s_guess: usize) -> Result<T> {
    if s_guess == 0 {
        return Err(Error::InvalidArgument("sparsity guess must be >= 1".into()));
    }
    Ok(c::<T>(s_guess as f64) / c::<T>((p * p) as f64))
}

/// Per-edge fraction of posterior draws with |omega_e| > delta.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionMatrix<T> {
    p: usize,
    freq: Vec<T>,
}

impl<T: Scalar> InclusionMatrix<T> {
    pub fn from_frequencies(p: usize, freq: Vec<T>) -> Result<Self> {
        if freq.len() != edge_count(p) {
            return Err(Error::InvalidArgument("frequency length mismatch".into()));
        }
        if freq.iter().any(|f| *f < T::zero() || *f > T::one()) {
            return Err(Error::InvalidArgument(
                "inclusion frequencies must lie in [0,1]".into(),
            ));
        }
        Ok(InclusionMatrix { p, freq })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn freq(&self, e: EdgeIndex) -> T {
        self.freq[e.flat()]
    }

    pub fn frequencies(&self) -> &[T] {
        &self.freq
    }

    /// Draw-count weighted average of two chains' inclusion matrices.
    pub fn weighted_merge(a: &Self, na: usize, b: &Self, nb: usize) -> Result<Self> {
        if a.p != b.p {
            return Err(Error::InvalidArgument("dimension mismatch".into()));
        }
        let wa = c::<T>(na as f64);
        let wb = c::<T>(nb as f64);
        let tot = wa + wb;
        let freq = a
            .freq
            .iter()
            .zip(&b.freq)
            .map(|(&x, &y)| (wa * x + wb * y) / tot)
            .collect();
        InclusionMatrix::from_frequencies(a.p, freq)
    }
}

/// Inclusion frequencies of the thresholded support across draws.
pub fn inclusion<T: Scalar>(
    samples: &PosteriorSamples<T>,
    delta: T,
) -> Result<InclusionMatrix<T>> {
    if samples.n_draws() == 0 {
        return Err(Error::InvalidArgument(
            "inclusion needs at least one stored draw".into(),
        ));
    }
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument("delta must be > 0".into()));
    }
    let p = samples.p;
    let mut counts = vec![0usize; edge_count(p)];
    for d in &samples.draws {
        for e in edges(p) {
            if d.get(e.i(), e.j()).abs() > delta {
                counts[e.flat()] += 1;
            }
        }
    }
    let n = c::<T>(samples.n_draws() as f64);
    InclusionMatrix::from_frequencies(p, counts.iter().map(|&k| c::<T>(k as f64) / n).collect())
}

/// Edges whose inclusion frequency exceeds the cutoff.
pub fn select_graph<T: Scalar>(incl: &InclusionMatrix<T>, cutoff: T) -> Result<EdgeSet> {
    if !(cutoff > T::zero()) || !(cutoff < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "cutoff must be in (0,1), got {cutoff}"
        )));
    }
    let mut set = EdgeSet::empty(incl.p());
    for e in edges(incl.p()) {
        if incl.freq(e) > cutoff {
            set.insert(e)?;
        }
    }
    Ok(set)
}

/// Confusion-matrix rates over the nu candidate edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryMetrics<T> {
    pub tpr: T,
    pub fpr: T,
    pub mcc: T,
}

/// True/false positive rates and Matthews correlation of an estimated edge
/// set against the truth. Conventions: tpr = 1 when the truth is empty
/// (vacuous), fpr = 0 when there are no true negatives, mcc = 0 whenever a
/// denominator factor vanishes.
pub fn recovery_metrics<T: Scalar>(est: &EdgeSet, truth: &EdgeSet) -> Result<RecoveryMetrics<T>> {
    if est.p() != truth.p() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: est p={}, truth p={}",
            est.p(),
            truth.p()
        )));
    }
    let p = est.p();
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for f in 0..edge_count(p) {
        match (est.contains_flat(f), truth.contains_flat(f)) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let tf = |x: u64| c::<T>(x as f64);
    let tpr = if tp + fn_ == 0 {
        T::one()
    } else {
        tf(tp) / tf(tp + fn_)
    };
    let fpr = if fp + tn == 0 {
        T::zero()
    } else {
        tf(fp) / tf(fp + tn)
    };
    let denom_factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    let mcc = if denom_factors.iter().any(|&d| d == 0) {
        T::zero()
    } else {
        let num = tf(tp) * tf(tn) - tf(fp) * tf(fn_);
        let den = denom_factors.iter().map(|&d| tf(d)).fold(T::one(), |a, b| a * b);
        num / den.sqrt()
    };
    Ok(RecoveryMetrics { tpr, fpr, mcc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::SymMatrix;

    fn tridiagonal(p: usize, off: f64) -> PrecisionMatrix<f64> {
        let m = SymMatrix::from_fn(p, |i, j| {
            if i == j {
                1.0
            } else if j == i + 1 {
                off
            } else {
                0.0
            }
        })
        .unwrap();
        PrecisionMatrix::new(m).unwrap()
    }

    #[test]
    fn identity_has_empty_support() {
        let omega = PrecisionMatrix::new(SymMatrix::<f64>::identity(4).unwrap()).unwrap();
        assert!(support_threshold(&omega, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn tridiagonal_support_is_the_band() {
        let omega = tridiagonal(5, 0.4);
        let set = support_threshold(&omega, 0.1).unwrap();
        assert_eq!(set.len(), 4);
        for i in 0..4 {
            assert!(set.contains(EdgeIndex::new(i, i + 1, 5).unwrap()));
        }
        // threshold above the largest off-diagonal empties the set
        assert!(support_threshold(&omega, 0.5).unwrap().is_empty());
    }

    #[test]
    fn support_is_monotone_in_delta() {
        let omega = tridiagonal(6, 0.45);
        let s1 = support_threshold(&omega, 0.1).unwrap();
        let s2 = support_threshold(&omega, 0.2).unwrap();
        assert!(s2.is_subset(&s1));
    }

    #[test]
    fn default_delta_formula() {
        assert_eq!(default_delta::<f64>(10, 5).unwrap(), 0.05);
        assert_eq!(default_delta::<f64>(100, 100).unwrap(), 0.01);
        assert!(default_delta::<f64>(20, 5).unwrap() < default_delta::<f64>(10, 5).unwrap());
        assert!(default_delta::<f64>(10, 0).is_err());
    }

    #[test]
    fn metrics_perfect_and_degenerate() {
        let p = 5;
        let truth = EdgeSet::from_edges(
            p,
            [EdgeIndex::new(0, 1, p).unwrap(), EdgeIndex::new(2, 3, p).unwrap()],
        )
        .unwrap();
        let m = recovery_metrics::<f64>(&truth, &truth).unwrap();
        assert_eq!(m.tpr, 1.0);
        assert_eq!(m.fpr, 0.0);
        assert!((m.mcc - 1.0).abs() < 1e-12);

        // complement misses everything
        let mut comp = EdgeSet::empty(p);
        for e in edges(p) {
            if !truth.contains(e) {
                comp.insert(e).unwrap();
            }
        }
        let m2 = recovery_metrics::<f64>(&comp, &truth).unwrap();
        assert_eq!(m2.tpr, 0.0);

        // both empty: vacuous tpr = 1, mcc = 0 by convention
        let empty = EdgeSet::empty(p);
        let m3 = recovery_metrics::<f64>(&empty, &empty).unwrap();
        assert_eq!(m3.tpr, 1.0);
        assert_eq!(m3.mcc, 0.0);

        let other = EdgeSet::empty(4);
        assert!(recovery_metrics::<f64>(&empty, &other).is_err());
    }

    #[test]
    fn metrics_are_permutation_equivariant() {
        let p = 6;
        let perm = [3usize, 0, 5, 1, 4, 2];
        let relabel = |set: &EdgeSet| {
            EdgeSet::from_edges(
                p,
                set.iter().map(|e| {
                    let (a, b) = (perm[e.i()], perm[e.j()]);
                    EdgeIndex::new(a.min(b), a.max(b), p).unwrap()
                }),
            )
            .unwrap()
        };
        let truth = EdgeSet::from_edges(
            p,
            [
                EdgeIndex::new(0, 1, p).unwrap(),
                EdgeIndex::new(1, 4, p).unwrap(),
                EdgeIndex::new(2, 5, p).unwrap(),
            ],
        )
        .unwrap();
        let est = EdgeSet::from_edges(
            p,
            [EdgeIndex::new(0, 1, p).unwrap(), EdgeIndex::new(3, 4, p).unwrap()],
        )
        .unwrap();
        let m1 = recovery_metrics::<f64>(&est, &truth).unwrap();
        let m2 = recovery_metrics::<f64>(&relabel(&est), &relabel(&truth)).unwrap();
        assert!((m1.tpr - m2.tpr).abs() < 1e-15);
        assert!((m1.fpr - m2.fpr).abs() < 1e-15);
        assert!((m1.mcc - m2.mcc).abs() < 1e-15);
    }

    #[test]
    fn select_graph_cutoff_edges() {
        let incl = InclusionMatrix::from_frequencies(3, vec![0.9, 0.5, 0.1]).unwrap();
        let set = select_graph(&incl, 0.5).unwrap();
        assert_eq!(set.len(), 1); // only the 0.9 edge is strictly above 0.5
        assert!(select_graph(&incl, 0.0).is_err());
        assert!(select_graph(&incl, 1.0).is_err());
        // idempotence of the set operation
        let again = select_graph(&incl, 0.5).unwrap();
        assert_eq!(set, again);
    }
}
