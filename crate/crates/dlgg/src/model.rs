//! Model state: the precision matrix, its shrinkage latents, and the
//! unnormalized log posterior.
//!
//! The hierarchy places independent N(0, psi_e phi_e^2 tau^2) kernels on the
//! off-diagonal entries, Exp(1/2) on each psi_e, Dir(a, ..., a) on the
//! simplex vector phi, and Gamma(nu a, 1/2) on tau. Diagonal entries carry an
//! improper flat prior on (0, inf) and are never penalized: they enter the
//! posterior only through the likelihood.

use crate::dist::{Dirichlet, Exponential, Gamma};
use crate::edge::{edge_count, edges, EdgeIndex};
use crate::error::{Error, Result};
use crate::mat::{PrecisionMatrix, ScatterMatrix, SymMatrix};
use crate::rng::RngStream;
use crate::scalar::{c, Scalar};
use crate::special::ln_gamma;

/// Prior hyperparameters.
///
/// `a` is the Dirichlet concentration (default 1/p^2, with 1/nu exposed as a
/// named preset); `omega_floor` bounds |omega_e| away from zero inside the
/// latent updates only, never in the stored state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams<T> {
    p: usize,
    a: T,
    omega_floor: T,
}

pub const DEFAULT_OMEGA_FLOOR: f64 = 1e-10;

impl<T: Scalar> HyperParams<T> {
    pub fn new(p: usize, a: T) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidArgument("p must be >= 2".into()));
        }
        if !(a > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "dirichlet concentration must be > 0, got {a}"
            )));
        }
        Ok(HyperParams {
            p,
            a,
            omega_floor: c(DEFAULT_OMEGA_FLOOR),
        })
    }

    /// Default concentration a = 1/p^2.
    pub fn default_for(p: usize) -> Result<Self> {
        let a = T::one() / c::<T>((p * p) as f64);
        Self::new(p, a)
    }

    /// Alternative preset a = 1/nu with nu = p choose 2.
    pub fn inv_nu(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidArgument("p must be >= 2".into()));
        }
        let a = T::one() / c::<T>(edge_count(p) as f64);
        Self::new(p, a)
    }

    pub fn with_omega_floor(mut self, floor: T) -> Result<Self> {
        if !(floor > T::zero()) {
            return Err(Error::InvalidArgument("omega floor must be > 0".into()));
        }
        self.omega_floor = floor;
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// nu = p choose 2, the number of candidate edges.
    pub fn nu(&self) -> usize {
        edge_count(self.p)
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn omega_floor(&self) -> T {
        self.omega_floor
    }
}

/// Shrinkage latents: one psi per edge, the simplex vector phi, the global
/// scale tau.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentState<T> {
    psi: Vec<T>,
    phi: Vec<T>,
    tau: T,
}

impl<T: Scalar> LatentState<T> {
    pub fn new(psi: Vec<T>, phi: Vec<T>, tau: T) -> Result<Self> {
        if psi.len() != phi.len() {
            return Err(Error::InvalidArgument(
                "psi and phi must have equal length".into(),
            ));
        }
        if psi.iter().any(|v| !(*v > T::zero())) {
            return Err(Error::InvalidArgument("all psi must be > 0".into()));
        }
        if phi.iter().any(|v| !(*v > T::zero())) {
            return Err(Error::InvalidArgument(
                "phi must lie on the open simplex".into(),
            ));
        }
        let s: T = phi.iter().cloned().sum();
        if (s - T::one()).abs() > c::<T>(1e-12) {
            return Err(Error::InvalidArgument(format!(
                "phi must sum to 1, got {s}"
            )));
        }
        if !(tau > T::zero()) {
            return Err(Error::InvalidArgument("tau must be > 0".into()));
        }
        Ok(LatentState { psi, phi, tau })
    }

    /// Neutral initialization: psi = 1, phi uniform, tau = 1.
    pub fn neutral(nu: usize) -> Self {
        LatentState {
            psi: vec![T::one(); nu],
            phi: vec![T::one() / c::<T>(nu as f64); nu],
            tau: T::one(),
        }
    }

    pub fn nu(&self) -> usize {
        self.psi.len()
    }

    pub fn psi(&self) -> &[T] {
        &self.psi
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn tau(&self) -> T {
        self.tau
    }
}

/// Full parameter state: the precision matrix plus its latents.
#[derive(Debug, Clone)]
pub struct ModelState<T> {
    pub omega: PrecisionMatrix<T>,
    pub latent: LatentState<T>,
}

impl<T: Scalar> ModelState<T> {
    pub fn new(omega: PrecisionMatrix<T>, latent: LatentState<T>) -> Result<Self> {
        if latent.nu() != edge_count(omega.dim()) {
            return Err(Error::InvalidArgument(format!(
                "latent length {} does not match edge count {}",
                latent.nu(),
                edge_count(omega.dim())
            )));
        }
        Ok(ModelState { omega, latent })
    }

    /// Identity precision with neutral latents.
    pub fn initial(p: usize) -> Result<Self> {
        let omega = PrecisionMatrix::new(SymMatrix::identity(p)?)?;
        Ok(ModelState {
            omega,
            latent: LatentState::neutral(edge_count(p)),
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// Full prior variance of omega_e: psi_e phi_e^2 tau^2.
    pub fn edge_scale(&self, e: EdgeIndex) -> T {
        let f = e.flat();
        let phi = self.latent.phi[f];
        let tau = self.latent.tau;
        self.latent.psi[f] * phi * phi * tau * tau
    }

    /// Unnormalized log posterior of (omega | data, latents):
    /// (n/2) log det omega - tr(S omega)/2 - sum_e omega_e^2 / (2 scale_e).
    pub fn log_unnorm_posterior(&self, s: &ScatterMatrix<T>) -> Result<T> {
        if s.dim() != self.dim() {
            return Err(Error::InvalidArgument(
                "scatter dimension does not match state".into(),
            ));
        }
        let half = c::<T>(0.5);
        let n = c::<T>(s.n() as f64);
        let log_det = self.omega.log_det()?;
        let trace = s.as_sym().trace_product(self.omega.as_sym());
        let mut penalty = T::zero();
        for e in edges(self.dim()) {
            let w = self.omega.get(e.i(), e.j());
            penalty = penalty + w * w / (c::<T>(2.0) * self.edge_scale(e));
        }
        Ok(half * n * log_det - half * trace - penalty)
    }
}

/// A draw from the prior: off-diagonal values (by canonical edge order) and
/// the latents that generated them. Diagonals carry the improper flat prior
/// and are not drawn.
pub fn sample_prior<T: Scalar>(
    rng: &mut RngStream,
    p: usize,
    hp: &HyperParams<T>,
) -> Result<(Vec<T>, LatentState<T>)> {
    if p != hp.p() {
        return Err(Error::InvalidArgument("p mismatch with hyperparameters".into()));
    }
    let nu = hp.nu();
    let half = c::<T>(0.5);
    let tau = Gamma::new(c::<T>(nu as f64) * hp.a(), half)?.sample(rng);
    let tau = tau.max(T::min_positive_value());
    let phi = if nu == 1 {
        vec![T::one()]
    } else {
        Dirichlet::new(vec![hp.a(); nu])?.sample(rng)
    };
    let exp_half = Exponential::new(half)?;
    let mut psi = Vec::with_capacity(nu);
    let mut omega = Vec::with_capacity(nu);
    for f in 0..nu {
        let psi_f = exp_half.sample(rng);
        let z: T = rng.standard_normal();
        omega.push(phi[f] * tau * psi_f.sqrt() * z);
        psi.push(psi_f);
    }
    Ok((omega, LatentState::new(psi, phi, tau)?))
}

/// One row of the prior-concentration table.
#[derive(Debug, Clone, Copy)]
pub struct ConcentrationRow<T> {
    pub delta: T,
    /// Monte Carlo estimate of P(|omega_e| < delta).
    pub prob_below: T,
    /// 1 - P(|omega_e| < delta).
    pub residual: T,
    /// Smallest constant with residual <= C log(1/delta) / Gamma(a);
    /// `None` when delta > 0.9 (the bound degenerates as delta -> 1).
    pub fitted_c: Option<T>,
}

#[derive(Debug, Clone)]
pub struct ConcentrationTable<T> {
    pub a: T,
    pub rows: Vec<ConcentrationRow<T>>,
    pub samples: usize,
}

impl<T: Scalar> ConcentrationTable<T> {
    /// The fitted constant: max over the delta grid.
    pub fn fitted_c(&self) -> Option<T> {
        self.rows
            .iter()
            .filter_map(|r| r.fitted_c)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: T| a.max(v))))
    }

    /// max/min ratio of the per-delta constants; the bound's functional form
    /// holds when this stays small (within a factor of 2).
    pub fn stability_ratio(&self) -> Option<T> {
        let cs: Vec<T> = self
            .rows
            .iter()
            .filter_map(|r| r.fitted_c)
            .filter(|v| *v > T::zero())
            .collect();
        if cs.len() < 2 {
            return None;
        }
        let mx = cs.iter().cloned().fold(T::neg_infinity(), T::max);
        let mn = cs.iter().cloned().fold(T::infinity(), T::min);
        Some(mx / mn)
    }
}

/// Monte Carlo check of the prior concentration bound
/// P(|omega_e| < delta) >= 1 - C log(1/delta) / Gamma(a).
pub fn prior_concentration_check<T: Scalar>(
    rng: &mut RngStream,
    p: usize,
    hp: &HyperParams<T>,
    deltas: &[T],
    samples: usize,
) -> Result<ConcentrationTable<T>> {
    if deltas.is_empty() || samples == 0 {
        return Err(Error::InvalidArgument(
            "need a nonempty delta grid and samples > 0".into(),
        ));
    }
    if deltas.iter().any(|d| !(*d > T::zero()) || !(*d < T::one())) {
        return Err(Error::InvalidArgument("all deltas must be in (0,1)".into()));
    }
    let nu = hp.nu();
    let mut counts = vec![0u64; deltas.len()];
    for _ in 0..samples {
        let (omega, _) = sample_prior(rng, p, hp)?;
        for w in &omega {
            let aw = w.abs();
            for (k, d) in deltas.iter().enumerate() {
                if aw < *d {
                    counts[k] += 1;
                }
            }
        }
    }
    let total = c::<T>((samples * nu) as f64);
    let gamma_a = c::<T>(ln_gamma(hp.a().to_f64().unwrap()).exp());
    let rows = deltas
        .iter()
        .zip(&counts)
        .map(|(&delta, &cnt)| {
            let prob_below = c::<T>(cnt as f64) / total;
            let residual = T::one() - prob_below;
            let fitted_c = if delta > c::<T>(0.9) {
                None
            } else {
                Some(residual * gamma_a / (T::one() / delta).ln())
            };
            ConcentrationRow {
                delta,
                prob_below,
                residual,
                fitted_c,
            }
        })
        .collect();
    Ok(ConcentrationTable {
        a: hp.a(),
        rows,
        samples,
    })
}
