//! Block Gibbs sampler for the precision matrix.
//!
//! One sweep updates each column of omega in turn through the exact
//! conditional Gamma(n/2 + 1, s_jj/2) x N(-A s_col, A) with
//! A = (s_jj Omega_rest^{-1} + (Lambda* tau^2)^{-1})^{-1}, then refreshes the
//! shrinkage latents psi (inverse-Gaussian reciprocals), phi (normalized giG
//! draws), and tau (giG). Positive definiteness is preserved exactly: each
//! column update replaces the Schur complement eta by a positive Gamma draw.

use crate::dist::{Gamma, Gig, InverseGaussian};
use crate::edge::{edge_count, EdgeIndex};
use crate::error::{Error, Result};
use crate::mat::{CholeskyFactor, PrecisionMatrix, ScatterMatrix, SymMatrix};
use crate::model::{HyperParams, LatentState, ModelState};
use crate::rng::RngStream;
use crate::scalar::{c, Scalar};

/// Blocks of omega and S for the column-j update, with j moved last.
/// Remaining row indices keep their ascending order.
#[derive(Debug, Clone)]
pub struct ColumnPartition<T> {
    j: usize,
    omega_rest: SymMatrix<T>,
    rest_chol: CholeskyFactor<T>,
    s_col: Vec<T>,
    s_jj: T,
    /// psi_e phi_e^2 for the pairs (i, j); the tau^2 factor is applied by
    /// [`column_conditional`], matching Lambda* tau^2 in the conditional.
    lambda_col: Vec<T>,
}

impl<T: Scalar> ColumnPartition<T> {
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn omega_rest(&self) -> &SymMatrix<T> {
        &self.omega_rest
    }

    pub fn s_col(&self) -> &[T] {
        &self.s_col
    }

    pub fn s_jj(&self) -> T {
        self.s_jj
    }

    pub fn lambda_col(&self) -> &[T] {
        &self.lambda_col
    }
}

pub fn make_partition<T: Scalar>(
    state: &ModelState<T>,
    s: &ScatterMatrix<T>,
    j: usize,
) -> Result<ColumnPartition<T>> {
    let p = state.dim();
    if j >= p || s.dim() != p {
        return Err(Error::InvalidArgument(format!(
            "column {j} out of range for p={p}"
        )));
    }
    let omega_rest = state.omega.as_sym().delete_row_col(j)?;
    let rest_chol = omega_rest.cholesky()?;
    let keep: Vec<usize> = (0..p).filter(|&k| k != j).collect();
    let s_col: Vec<T> = keep.iter().map(|&i| s.get(i, j)).collect();
    let lambda_col: Vec<T> = keep
        .iter()
        .map(|&i| {
            let e = EdgeIndex::new(i.min(j), i.max(j), p).expect("valid pair");
            let phi = state.latent.phi()[e.flat()];
            state.latent.psi()[e.flat()] * phi * phi
        })
        .collect();
    Ok(ColumnPartition {
        j,
        omega_rest,
        rest_chol,
        s_col,
        s_jj: s.get(j, j),
        lambda_col,
    })
}

/// The exact conditional for (theta, eta) given the rest.
#[derive(Debug, Clone)]
pub struct ColumnConditional<T> {
    /// A = (s_jj Omega_rest^{-1} + diag(1/(lambda tau^2)))^{-1}, explicit.
    pub a: SymMatrix<T>,
    /// Cholesky factor of A^{-1}, used to draw N(mean, A).
    chol_m: CholeskyFactor<T>,
    pub mean: Vec<T>,
    pub eta_shape: T,
    pub eta_rate: T,
}

pub fn column_conditional<T: Scalar>(
    part: &ColumnPartition<T>,
    tau: T,
    n: usize,
) -> Result<ColumnConditional<T>> {
    if !(part.s_jj > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "degenerate scatter: s_jj = {} for column {} (constant data column?)",
            part.s_jj, part.j
        )));
    }
    if !(tau > T::zero()) {
        return Err(Error::InvalidArgument("tau must be > 0".into()));
    }
    let inv_rest = part.rest_chol.inverse();
    let tau2 = tau * tau;
    let q = part.omega_rest.dim();
    let m = SymMatrix::from_fn(q, |i, k| {
        let base = part.s_jj * inv_rest.get(i, k);
        if i == k {
            base + T::one() / (part.lambda_col[i] * tau2)
        } else {
            base
        }
    })?;
    let chol_m = m.cholesky()?;
    let a = chol_m.inverse();
    let mean: Vec<T> = chol_m.solve(&part.s_col).into_iter().map(|v| -v).collect();
    Ok(ColumnConditional {
        a,
        chol_m,
        mean,
        eta_shape: c::<T>(n as f64 / 2.0) + T::one(),
        eta_rate: part.s_jj / c::<T>(2.0),
    })
}

/// Draw (theta, eta) from a precomputed conditional.
pub fn sample_column_from<T: Scalar>(
    rng: &mut RngStream,
    cond: &ColumnConditional<T>,
) -> (Vec<T>, T) {
    let q = cond.mean.len();
    let mut z: Vec<T> = (0..q).map(|_| rng.standard_normal()).collect();
    // L^{-T} z has covariance (L L^T)^{-1} = A
    cond.chol_m.solve_lower_transpose(&mut z);
    let theta: Vec<T> = cond.mean.iter().zip(&z).map(|(&m, &w)| m + w).collect();
    let eta = Gamma::new(cond.eta_shape, cond.eta_rate)
        .expect("positive by construction")
        .sample(rng);
    (theta, eta)
}

/// Draw (theta, eta) for column j of the current state.
pub fn sample_column<T: Scalar>(
    rng: &mut RngStream,
    part: &ColumnPartition<T>,
    tau: T,
    n: usize,
) -> Result<(Vec<T>, T)> {
    let cond = column_conditional(part, tau, n)?;
    Ok(sample_column_from(rng, &cond))
}

/// Rebuild omega with column/row j replaced by theta and
/// omega_jj = eta + theta^T Omega_rest^{-1} theta. The result is positive
/// definite whenever eta > 0 and the rest block is.
pub fn apply_column<T: Scalar>(
    omega: &PrecisionMatrix<T>,
    j: usize,
    theta: &[T],
    eta: T,
) -> Result<PrecisionMatrix<T>> {
    let rest = omega.as_sym().delete_row_col(j)?;
    let chol = rest.cholesky()?;
    apply_column_with(omega, j, theta, eta, &chol)
}

fn apply_column_with<T: Scalar>(
    omega: &PrecisionMatrix<T>,
    j: usize,
    theta: &[T],
    eta: T,
    rest_chol: &CholeskyFactor<T>,
) -> Result<PrecisionMatrix<T>> {
    let p = omega.dim();
    if j >= p || theta.len() != p - 1 {
        return Err(Error::InvalidArgument(format!(
            "column update shape mismatch: j={j}, theta length {}",
            theta.len()
        )));
    }
    if !(eta > T::zero()) {
        return Err(Error::InvalidArgument(format!("eta must be > 0, got {eta}")));
    }
    let quad = rest_chol.inv_quad_form(theta);
    let mut m = omega.as_sym().clone();
    let keep: Vec<usize> = (0..p).filter(|&k| k != j).collect();
    for (idx, &i) in keep.iter().enumerate() {
        m.set(i, j, theta[idx]);
    }
    m.set(j, j, eta + quad);
    Ok(PrecisionMatrix::from_sym_unchecked(m))
}

/// |omega_e| floored away from zero for the latent updates only.
#[inline]
fn floored_abs_edge<T: Scalar>(state: &ModelState<T>, e: EdgeIndex, floor: T) -> T {
    state.omega.get(e.i(), e.j()).abs().max(floor)
}

/// psi update: psi_e = 1 / psi~_e with psi~_e ~ iG(phi_e tau / |omega_e|, 1).
pub fn update_psi<T: Scalar>(
    rng: &mut RngStream,
    state: &ModelState<T>,
    hp: &HyperParams<T>,
) -> Result<LatentState<T>> {
    let p = state.dim();
    let tau = state.latent.tau();
    let mut psi = Vec::with_capacity(edge_count(p));
    for e in crate::edge::edges(p) {
        let w = floored_abs_edge(state, e, hp.omega_floor());
        let mu = state.latent.phi()[e.flat()] * tau / w;
        let mu = mu.max(T::min_positive_value());
        let draw = InverseGaussian::new(mu, T::one())?.sample(rng);
        psi.push(T::one() / draw);
    }
    LatentState::new(psi, state.latent.phi().to_vec(), tau)
}

/// phi update: T_e ~ giG(a - 1, 1, 2 |omega_e|), phi = T / sum(T).
pub fn update_phi<T: Scalar>(
    rng: &mut RngStream,
    state: &ModelState<T>,
    hp: &HyperParams<T>,
) -> Result<LatentState<T>> {
    let p = state.dim();
    let nu = edge_count(p);
    let order = hp.a() - T::one();
    let mut t = Vec::with_capacity(nu);
    for e in crate::edge::edges(p) {
        let w = floored_abs_edge(state, e, hp.omega_floor());
        let g = Gig::new(order, T::one(), c::<T>(2.0) * w)?;
        t.push(g.sample(rng));
    }
    let sum: T = t.iter().cloned().sum();
    let mut phi: Vec<T> = t
        .iter()
        .map(|&v| (v / sum).max(T::min_positive_value()))
        .collect();
    let s2: T = phi.iter().cloned().sum();
    for v in phi.iter_mut() {
        *v = *v / s2;
    }
    LatentState::new(state.latent.psi().to_vec(), phi, state.latent.tau())
}

/// tau update: tau ~ giG(nu a - nu, 1, 2 sum_e |omega_e| / phi_e).
pub fn update_tau<T: Scalar>(
    rng: &mut RngStream,
    state: &ModelState<T>,
    hp: &HyperParams<T>,
) -> Result<LatentState<T>> {
    let p = state.dim();
    let nu_t = c::<T>(edge_count(p) as f64);
    let order = nu_t * hp.a() - nu_t;
    let mut recip = T::zero();
    for e in crate::edge::edges(p) {
        let w = floored_abs_edge(state, e, hp.omega_floor());
        recip = recip + w / state.latent.phi()[e.flat()];
    }
    let tau = Gig::new(order, T::one(), c::<T>(2.0) * recip)?.sample(rng);
    LatentState::new(
        state.latent.psi().to_vec(),
        state.latent.phi().to_vec(),
        tau.max(T::min_positive_value()),
    )
}

/// One full sweep: every column in the given order, then psi, phi, tau.
fn sweep_columns<T: Scalar>(
    rng: &mut RngStream,
    mut state: ModelState<T>,
    s: &ScatterMatrix<T>,
    order: &[usize],
) -> Result<ModelState<T>> {
    let n = s.n();
    for &j in order {
        let part = make_partition(&state, s, j)?;
        let cond = column_conditional(&part, state.latent.tau(), n)?;
        let (theta, eta) = sample_column_from(rng, &cond);
        state.omega = apply_column_with(&state.omega, j, &theta, eta, &part.rest_chol)?;
    }
    Ok(state)
}

/// Systematic sweep: columns 0..p in order, then the latent updates.
pub fn sweep<T: Scalar>(
    rng: &mut RngStream,
    state: ModelState<T>,
    s: &ScatterMatrix<T>,
    hp: &HyperParams<T>,
) -> Result<ModelState<T>> {
    let order: Vec<usize> = (0..state.dim()).collect();
    sweep_with_order(rng, state, s, hp, &order)
}

pub fn sweep_with_order<T: Scalar>(
    rng: &mut RngStream,
    state: ModelState<T>,
    s: &ScatterMatrix<T>,
    hp: &HyperParams<T>,
    order: &[usize],
) -> Result<ModelState<T>> {
    let mut state = sweep_columns(rng, state, s, order)?;
    state.latent = update_psi(rng, &state, hp)?;
    state.latent = update_phi(rng, &state, hp)?;
    state.latent = update_tau(rng, &state, hp)?;
    Ok(state)
}

/// Column visit order within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOrder {
    /// Deterministic 0..p (the default; reproducible across runs).
    Systematic,
    /// A fresh uniformly random permutation each sweep.
    RandomScan,
}

/// Initialization rule for the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitRule {
    /// omega = identity, psi = 1, phi uniform, tau = 1.
    Identity,
}

#[derive(Debug, Clone)]
pub struct ChainConfig<T> {
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub hp: HyperParams<T>,
    pub init: InitRule,
    pub scan: ScanOrder,
}

impl<T: Scalar> ChainConfig<T> {
    pub fn new(n_iter: usize, burn_in: usize, thin: usize, seed: u64, hp: HyperParams<T>) -> Self {
        ChainConfig {
            n_iter,
            burn_in,
            thin,
            seed,
            hp,
            init: InitRule::Identity,
            scan: ScanOrder::Systematic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_iter == 0 {
            return Err(Error::InvalidConfig("n_iter must be >= 1".into()));
        }
        if self.burn_in >= self.n_iter {
            return Err(Error::InvalidConfig(format!(
                "burn_in ({}) must be < n_iter ({})",
                self.burn_in, self.n_iter
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be >= 1".into()));
        }
        if (self.n_iter - self.burn_in) / self.thin == 0 {
            return Err(Error::InvalidConfig(format!(
                "no draws would be stored: ({} - {}) / {} < 1",
                self.n_iter, self.burn_in, self.thin
            )));
        }
        Ok(())
    }
}

/// Per-stored-draw latent summaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentTrace<T> {
    pub tau: T,
    pub phi_min: T,
    pub phi_max: T,
    pub psi_min: T,
    pub psi_max: T,
}

/// Stored post-burn-in, thinned draws plus per-sweep diagnostics.
#[derive(Debug, Clone)]
pub struct PosteriorSamples<T> {
    pub p: usize,
    pub n_data: usize,
    pub draws: Vec<PrecisionMatrix<T>>,
    pub latent_traces: Vec<LatentTrace<T>>,
    /// One flag per sweep: did the post-sweep Cholesky succeed.
    pub accept_diag: Vec<bool>,
    /// Unnormalized log posterior, one entry per sweep.
    pub log_posterior: Vec<T>,
}

impl<T: Scalar> PosteriorSamples<T> {
    pub fn n_draws(&self) -> usize {
        self.draws.len()
    }

    /// Elementwise mean of the stored draws.
    pub fn posterior_mean(&self) -> Result<SymMatrix<T>> {
        if self.draws.is_empty() {
            return Err(Error::InvalidArgument("no stored draws".into()));
        }
        let p = self.p;
        let inv = T::one() / c::<T>(self.draws.len() as f64);
        SymMatrix::from_fn(p, |i, j| {
            let mut acc = T::zero();
            for d in &self.draws {
                acc = acc + d.get(i, j);
            }
            acc * inv
        })
    }

    /// Concatenate chains (same p) in the given order.
    pub fn merge(chains: Vec<PosteriorSamples<T>>) -> Result<PosteriorSamples<T>> {
        let mut it = chains.into_iter();
        let mut merged = it
            .next()
            .ok_or_else(|| Error::InvalidArgument("no chains to merge".into()))?;
        for ch in it {
            if ch.p != merged.p {
                return Err(Error::InvalidArgument("chain dimension mismatch".into()));
            }
            merged.draws.extend(ch.draws);
            merged.latent_traces.extend(ch.latent_traces);
            merged.accept_diag.extend(ch.accept_diag);
            merged.log_posterior.extend(ch.log_posterior);
        }
        Ok(merged)
    }
}

fn shuffled_order(rng: &mut RngStream, p: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p).collect();
    for i in (1..p).rev() {
        let r = ((rng.next_u64() as u128 * (i as u128 + 1)) >> 64) as usize;
        order.swap(i, r);
    }
    order
}

pub fn run_chain<T: Scalar>(
    cfg: &ChainConfig<T>,
    s: &ScatterMatrix<T>,
) -> Result<PosteriorSamples<T>> {
    cfg.validate()?;
    if s.n() < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 observations, got {}",
            s.n()
        )));
    }
    let p = s.dim();
    if cfg.hp.p() != p {
        return Err(Error::InvalidConfig(format!(
            "hyperparameters are for p={}, data has p={p}",
            cfg.hp.p()
        )));
    }
    let mut rng = RngStream::new(cfg.seed);
    let mut state = match cfg.init {
        InitRule::Identity => ModelState::initial(p)?,
    };
    let kept = (cfg.n_iter - cfg.burn_in) / cfg.thin;
    let mut samples = PosteriorSamples {
        p,
        n_data: s.n(),
        draws: Vec::with_capacity(kept),
        latent_traces: Vec::with_capacity(kept),
        accept_diag: Vec::with_capacity(cfg.n_iter),
        log_posterior: Vec::with_capacity(cfg.n_iter),
    };
    let systematic: Vec<usize> = (0..p).collect();
    for t in 1..=cfg.n_iter {
        let order = match cfg.scan {
            ScanOrder::Systematic => systematic.clone(),
            ScanOrder::RandomScan => shuffled_order(&mut rng, p),
        };
        let entering = format!(
            "entering state: tau={}, max diag={}, max |offdiag|={}",
            state.latent.tau(),
            state.omega.as_sym().max_abs_diag(),
            state.omega.as_sym().max_abs_offdiag()
        );
        state = match sweep_with_order(&mut rng, state, s, &cfg.hp, &order) {
            Ok(st) => st,
            Err(e) => {
                return Err(Error::SweepFailed {
                    sweep: t,
                    detail: format!("{e}; {entering}"),
                })
            }
        };
        samples.accept_diag.push(state.omega.cholesky().is_ok());
        let lp = state.log_unnorm_posterior(s).map_err(|e| Error::SweepFailed {
            sweep: t,
            detail: format!("log posterior evaluation failed: {e}"),
        })?;
        samples.log_posterior.push(lp);
        if t > cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0 {
            let phi = state.latent.phi();
            let psi = state.latent.psi();
            samples.latent_traces.push(LatentTrace {
                tau: state.latent.tau(),
                phi_min: phi.iter().cloned().fold(T::infinity(), T::min),
                phi_max: phi.iter().cloned().fold(T::neg_infinity(), T::max),
                psi_min: psi.iter().cloned().fold(T::infinity(), T::min),
                psi_max: psi.iter().cloned().fold(T::neg_infinity(), T::max),
            });
            samples.draws.push(state.omega.clone());
        }
    }
    Ok(samples)
}
