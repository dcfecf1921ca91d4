//! Chain diagnostics: effective sample size, the two-chain potential scale
//! reduction factor, and a per-run diagnostics report.

use crate::edge::{edge_count, EdgeIndex};
use crate::error::{Error, Result};
use crate::gibbs::PosteriorSamples;
use crate::rng::RngStream;
use crate::scalar::{c, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssEstimate<T> {
    pub ess: T,
    /// Set when the trace was (numerically) constant; the estimate is then
    /// reported as the trace length.
    pub constant_trace: bool,
}

/// Effective sample size by Geyer's initial monotone sequence estimator.
///
/// Autocovariances are summed in adjacent pairs while the pair sums stay
/// positive, with the running minimum enforcing monotonicity. The estimate
/// is clamped to (0, n].
pub fn effective_sample_size<T: Scalar>(trace: &[T]) -> Result<EssEstimate<T>> {
    let n = trace.len();
    if n < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 trace points, got {n}"
        )));
    }
    let nf = c::<T>(n as f64);
    let mean = trace.iter().cloned().sum::<T>() / nf;
    let autocov = |lag: usize| -> T {
        let mut acc = T::zero();
        for t in 0..(n - lag) {
            acc = acc + (trace[t] - mean) * (trace[t + lag] - mean);
        }
        acc / nf
    };
    let c0 = autocov(0);
    let scale = trace.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    if c0 <= scale * scale * c::<T>(1e-28) + c::<T>(1e-300) {
        return Ok(EssEstimate {
            ess: nf,
            constant_trace: true,
        });
    }
    // paired sums Gamma_m = c_{2m} + c_{2m+1}
    let mut sum_gamma = T::zero();
    let mut prev = T::infinity();
    let mut m = 0usize;
    while 2 * m + 1 < n {
        let g = autocov(2 * m) + autocov(2 * m + 1);
        if g <= T::zero() {
            break;
        }
        let g = g.min(prev);
        sum_gamma = sum_gamma + g;
        prev = g;
        m += 1;
    }
    let tau = -T::one() + c::<T>(2.0) * sum_gamma / c0;
    let ess = if tau < T::one() { nf } else { (nf / tau).min(nf) };
    Ok(EssEstimate {
        ess,
        constant_trace: false,
    })
}

/// Two-chain potential scale reduction factor (Gelman-Rubin).
///
/// Chains are trimmed to the shorter length; returns
/// sqrt(((n-1)/n W + B/n) / W).
pub fn psrf<T: Scalar>(chain_a: &[T], chain_b: &[T]) -> Result<T> {
    let n = chain_a.len().min(chain_b.len());
    if n < 10 {
        return Err(Error::InvalidArgument(
            "psrf needs at least 10 points per chain".into(),
        ));
    }
    let nf = c::<T>(n as f64);
    let stats = |xs: &[T]| -> (T, T) {
        let m = xs[..n].iter().cloned().sum::<T>() / nf;
        let v = xs[..n]
            .iter()
            .map(|&x| (x - m) * (x - m))
            .sum::<T>()
            / (nf - T::one());
        (m, v)
    };
    let (ma, va) = stats(chain_a);
    let (mb, vb) = stats(chain_b);
    let w = (va + vb) / c::<T>(2.0);
    let grand = (ma + mb) / c::<T>(2.0);
    // B/n over m=2 chains: sum of squared mean deviations / (m - 1)
    let b_over_n = (ma - grand) * (ma - grand) + (mb - grand) * (mb - grand);
    if w <= T::zero() {
        return Ok(T::one());
    }
    Ok((((nf - T::one()) / nf * w + b_over_n) / w).sqrt())
}

#[derive(Debug, Clone)]
pub struct TraceSummary<T> {
    pub mean: T,
    pub sd: T,
    /// 5%, 25%, 50%, 75%, 95% empirical quantiles.
    pub quantiles: [T; 5],
}

pub fn trace_summary<T: Scalar>(trace: &[T]) -> Result<TraceSummary<T>> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("empty trace".into()));
    }
    let nf = c::<T>(trace.len() as f64);
    let mean = trace.iter().cloned().sum::<T>() / nf;
    let var = trace.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / nf;
    let mut sorted = trace.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in trace"));
    let q = |f: f64| -> T {
        let idx = ((sorted.len() - 1) as f64 * f).round() as usize;
        sorted[idx]
    };
    Ok(TraceSummary {
        mean,
        sd: var.sqrt(),
        quantiles: [q(0.05), q(0.25), q(0.5), q(0.75), q(0.95)],
    })
}

/// Diagnostics over one (or two) chains' stored samples.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport<T> {
    pub ess_log_posterior: EssEstimate<T>,
    pub ess_tau: EssEstimate<T>,
    /// ESS of three seeded randomly chosen off-diagonal entries.
    pub ess_edges: Vec<(EdgeIndex, EssEstimate<T>)>,
    pub trace_summary: TraceSummary<T>,
    /// Present when a second chain's log-posterior trace was supplied.
    pub psrf: Option<T>,
    pub max_abs_offdiag: T,
}

/// Build the report from stored samples. `post_burn_log` is the post-burn-in
/// log-posterior trace of this chain; `other_chain_log` enables the PSRF.
pub fn diagnostics_report<T: Scalar>(
    samples: &PosteriorSamples<T>,
    post_burn_log: &[T],
    other_chain_log: Option<&[T]>,
    scalar_seed: u64,
) -> Result<DiagnosticsReport<T>> {
    if samples.n_draws() == 0 {
        return Err(Error::InvalidArgument("no stored draws".into()));
    }
    let p = samples.p;
    let tau_trace: Vec<T> = samples.latent_traces.iter().map(|t| t.tau).collect();
    let mut rng = RngStream::new(scalar_seed);
    let nu = edge_count(p);
    let mut ess_edges = Vec::with_capacity(3);
    for _ in 0..3.min(nu) {
        let f = (rng.next_u64() % nu as u64) as usize;
        let e = EdgeIndex::from_flat(f, p)?;
        let trace: Vec<T> = samples.draws.iter().map(|d| d.get(e.i(), e.j())).collect();
        ess_edges.push((e, effective_sample_size(&trace)?));
    }
    let max_abs_offdiag = samples
        .draws
        .iter()
        .map(|d| d.as_sym().max_abs_offdiag())
        .fold(T::zero(), T::max);
    Ok(DiagnosticsReport {
        ess_log_posterior: effective_sample_size(post_burn_log)?,
        ess_tau: effective_sample_size(&tau_trace)?,
        ess_edges,
        trace_summary: trace_summary(post_burn_log)?,
        psrf: match other_chain_log {
            Some(other) => Some(psrf(post_burn_log, other)?),
            None => None,
        },
        max_abs_offdiag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_trace_flagged_with_full_length() {
        let trace = vec![3.25f64; 50];
        let est = effective_sample_size(&trace).unwrap();
        assert!(est.constant_trace);
        assert_eq!(est.ess, 50.0);
    }

    #[test]
    fn alternating_trace_clamps_to_length() {
        let trace: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let est = effective_sample_size(&trace).unwrap();
        assert!(!est.constant_trace);
        assert_eq!(est.ess, 100.0);
    }

    #[test]
    fn short_trace_rejected() {
        assert!(effective_sample_size(&[1.0f64; 5]).is_err());
    }

    #[test]
    fn psrf_close_to_one_for_identical_distributions() {
        let mut rng = RngStream::new(8);
        let a: Vec<f64> = (0..2000).map(|_| rng.standard_normal()).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.standard_normal()).collect();
        let r = psrf(&a, &b).unwrap();
        assert!(r < 1.05, "psrf {r}");
        // grossly shifted chains blow the ratio up
        let shifted: Vec<f64> = a.iter().map(|x| x + 50.0).collect();
        assert!(psrf(&a, &shifted).unwrap() > 5.0);
    }

    #[test]
    fn summary_quantiles_are_ordered() {
        let mut rng = RngStream::new(9);
        let xs: Vec<f64> = (0..1000).map(|_| rng.standard_normal()).collect();
        let s = trace_summary(&xs).unwrap();
        for w in s.quantiles.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(s.mean.abs() < 0.2);
        assert!((s.sd - 1.0).abs() < 0.2);
    }
}
