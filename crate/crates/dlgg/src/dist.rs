//! Random variate generators and log-density evaluators for every
//! distribution the block Gibbs sampler needs.
//!
//! All samplers are exact (rejection or transformation methods, no
//! approximate inversion) and deterministic given the [`RngStream`] state.

use crate::error::{Error, Result};
use crate::mat::{CholeskyFactor, SymMatrix};
use crate::rng::RngStream;
use crate::scalar::{c, Scalar};
use crate::special;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// N(mean, sd^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal<T> {
    pub mean: T,
    pub sd: T,
}

impl<T: Scalar> Normal<T> {
    pub fn new(mean: T, sd: T) -> Result<Self> {
        if !(sd > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "normal sd must be > 0, got {sd}"
            )));
        }
        Ok(Normal { mean, sd })
    }

    pub fn sample(&self, rng: &mut RngStream) -> T {
        self.mean + self.sd * rng.standard_normal::<T>()
    }

    pub fn logpdf(&self, x: T) -> T {
        let z = (x - self.mean) / self.sd;
        -c::<T>(0.5) * (c::<T>(LN_2PI) + z * z) - self.sd.ln()
    }
}

/// Exp(rate), density rate * exp(-rate x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential<T> {
    pub rate: T,
}

impl<T: Scalar> Exponential<T> {
    pub fn new(rate: T) -> Result<Self> {
        if !(rate > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "exponential rate must be > 0, got {rate}"
            )));
        }
        Ok(Exponential { rate })
    }

    pub fn sample(&self, rng: &mut RngStream) -> T {
        -rng.uniform::<T>().ln() / self.rate
    }

    pub fn logpdf(&self, x: T) -> T {
        if x < T::zero() {
            return T::neg_infinity();
        }
        self.rate.ln() - self.rate * x
    }
}

/// Gamma(shape, rate), density proportional to x^{shape-1} exp(-rate x).
///
/// RATE parameterization throughout: mean = shape / rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma<T> {
    pub shape: T,
    pub rate: T,
}

impl<T: Scalar> Gamma<T> {
    pub fn new(shape: T, rate: T) -> Result<Self> {
        if !(shape > T::zero()) || !(rate > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "gamma shape and rate must be > 0, got ({shape}, {rate})"
            )));
        }
        Ok(Gamma { shape, rate })
    }

    /// Marsaglia-Tsang for shape >= 1; the standard power boost for
    /// shape < 1 is applied in log space so tiny shapes do not underflow
    /// to exact zero. Draws are floored at the smallest positive normal.
    pub fn sample(&self, rng: &mut RngStream) -> T {
        if self.shape >= T::one() {
            marsaglia_tsang(rng, self.shape) / self.rate
        } else {
            let v = self.sample_log(rng).exp();
            v.max(T::min_positive_value())
        }
    }

    /// ln of a Gamma(shape, rate) draw, exact even when the draw itself is
    /// far below the floating-point range (tiny shapes).
    pub fn sample_log(&self, rng: &mut RngStream) -> T {
        if self.shape >= T::one() {
            marsaglia_tsang(rng, self.shape).ln() - self.rate.ln()
        } else {
            let g = marsaglia_tsang(rng, self.shape + T::one());
            let u: T = rng.uniform();
            g.ln() + u.ln() / self.shape - self.rate.ln()
        }
    }

    pub fn logpdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::neg_infinity();
        }
        let lgam = c::<T>(special::ln_gamma(self.shape.to_f64().unwrap()));
        self.shape * self.rate.ln() - lgam + (self.shape - T::one()) * x.ln() - self.rate * x
    }
}

/// Marsaglia & Tsang (2000) rejection sampler, shape >= 1, unit rate.
fn marsaglia_tsang<T: Scalar>(rng: &mut RngStream, shape: T) -> T {
    let third = c::<T>(1.0 / 3.0);
    let d = shape - third;
    let cc = T::one() / (c::<T>(9.0) * d).sqrt();
    loop {
        let x: T = rng.standard_normal();
        let t = T::one() + cc * x;
        if t <= T::zero() {
            continue;
        }
        let v = t * t * t;
        let u: T = rng.uniform();
        let x2 = x * x;
        if u < T::one() - c::<T>(0.0331) * x2 * x2 {
            return d * v;
        }
        if u.ln() < c::<T>(0.5) * x2 + d * (T::one() - v + v.ln()) {
            return d * v;
        }
    }
}

/// Dir(alpha_1, ..., alpha_k) on the simplex, k >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirichlet<T> {
    pub alpha: Vec<T>,
}

impl<T: Scalar> Dirichlet<T> {
    pub fn new(alpha: Vec<T>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::InvalidArgument(
                "dirichlet needs at least 2 components".into(),
            ));
        }
        if alpha.iter().any(|a| !(*a > T::zero())) {
            return Err(Error::InvalidArgument(
                "dirichlet concentrations must all be > 0".into(),
            ));
        }
        Ok(Dirichlet { alpha })
    }

    /// Gamma-normalization construction, carried out through log-gamma draws
    /// and a log-sum-exp so that very small concentrations (where the raw
    /// gamma draws underflow) still produce a valid point on the open
    /// simplex. Components are floored at the smallest positive normal and
    /// the vector renormalized.
    pub fn sample(&self, rng: &mut RngStream) -> Vec<T> {
        let lg: Vec<T> = self
            .alpha
            .iter()
            .map(|&a| Gamma::new(a, T::one()).expect("validated").sample_log(rng))
            .collect();
        let m = lg.iter().cloned().fold(T::neg_infinity(), T::max);
        let mut w: Vec<T> = lg.iter().map(|&v| (v - m).exp()).collect();
        let s: T = w.iter().cloned().sum();
        for v in w.iter_mut() {
            *v = (*v / s).max(T::min_positive_value());
        }
        let s2: T = w.iter().cloned().sum();
        for v in w.iter_mut() {
            *v = *v / s2;
        }
        w
    }

    pub fn logpdf(&self, x: &[T]) -> T {
        if x.len() != self.alpha.len() {
            return T::neg_infinity();
        }
        let sum: T = x.iter().cloned().sum();
        if x.iter().any(|&v| v <= T::zero()) || (sum - T::one()).abs() > c::<T>(1e-9) {
            return T::neg_infinity();
        }
        let a0: T = self.alpha.iter().cloned().sum();
        let mut acc = c::<T>(special::ln_gamma(a0.to_f64().unwrap()));
        for (&a, &v) in self.alpha.iter().zip(x) {
            acc = acc - c::<T>(special::ln_gamma(a.to_f64().unwrap()));
            acc = acc + (a - T::one()) * v.ln();
        }
        acc
    }
}

/// Inverse Gaussian iG(mu, lambda).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGaussian<T> {
    pub mu: T,
    pub lambda: T,
}

impl<T: Scalar> InverseGaussian<T> {
    pub fn new(mu: T, lambda: T) -> Result<Self> {
        if !(mu > T::zero()) || !(lambda > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "inverse gaussian parameters must be > 0, got ({mu}, {lambda})"
            )));
        }
        Ok(InverseGaussian { mu, lambda })
    }

    /// Michael-Schucany-Haas transformation: one normal draw, one uniform.
    /// The smaller root is computed as 2 mu / (2 + y + sqrt(y (y + 4))) with
    /// y = mu v^2 / lambda, which stays positive without cancellation even
    /// for extreme mu.
    pub fn sample(&self, rng: &mut RngStream) -> T {
        let v: T = rng.standard_normal();
        let y = self.mu * v * v / self.lambda;
        let s = (y * (y + c::<T>(4.0))).sqrt();
        let x = c::<T>(2.0) * self.mu / (c::<T>(2.0) + y + s);
        let u: T = rng.uniform();
        if u <= self.mu / (self.mu + x) {
            x
        } else {
            self.mu * self.mu / x
        }
    }

    pub fn logpdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::neg_infinity();
        }
        let half = c::<T>(0.5);
        let d = x - self.mu;
        half * (self.lambda.ln() - c::<T>(LN_2PI) - c::<T>(3.0) * x.ln())
            - self.lambda * d * d / (c::<T>(2.0) * self.mu * self.mu * x)
    }
}

/// Generalized inverse Gaussian giG(order, rate, recip_rate):
/// density proportional to x^{order-1} exp(-(rate * x + recip_rate / x) / 2).
///
/// Boundary cases: recip_rate = 0 with order > 0 is Gamma(order, rate/2);
/// rate = 0 with order < 0 is the reciprocal of Gamma(-order, recip_rate/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gig<T> {
    pub order: T,
    pub rate: T,
    pub recip_rate: T,
}

impl<T: Scalar> Gig<T> {
    pub fn new(order: T, rate: T, recip_rate: T) -> Result<Self> {
        let ok = if order > T::zero() {
            rate > T::zero() && recip_rate >= T::zero()
        } else if order < T::zero() {
            recip_rate > T::zero() && rate >= T::zero()
        } else {
            rate > T::zero() && recip_rate > T::zero()
        };
        if !ok || order.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "giG({order}, {rate}, {recip_rate}) is not integrable"
            )));
        }
        Ok(Gig {
            order,
            rate,
            recip_rate,
        })
    }

    pub fn sample(&self, rng: &mut RngStream) -> T {
        if self.recip_rate == T::zero() {
            return Gamma::new(self.order, self.rate / c::<T>(2.0))
                .expect("validated")
                .sample(rng);
        }
        if self.rate == T::zero() {
            let g = Gamma::new(-self.order, self.recip_rate / c::<T>(2.0))
                .expect("validated")
                .sample(rng);
            return T::one() / g;
        }
        // standardize: X = sqrt(chi/rho) Y with Y ~ gig(lambda, beta),
        // beta = sqrt(rho chi); negative orders via the reciprocal identity.
        let beta = self.rate.sqrt() * self.recip_rate.sqrt();
        let scale = self.recip_rate.sqrt() / self.rate.sqrt();
        let y = sample_gig_std(rng, self.order.abs(), beta);
        if self.order >= T::zero() {
            scale * y
        } else {
            scale / y
        }
    }

    /// Normalized log density; the constant is evaluated on demand (it needs
    /// a Bessel function and the sampler itself never uses it).
    pub fn logpdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::neg_infinity();
        }
        let half = c::<T>(0.5);
        (self.order - T::one()) * x.ln()
            - half * (self.rate * x + self.recip_rate / x)
            - c::<T>(self.log_norm())
    }

    /// ln of the normalizing constant: 2 K_order(sqrt(rate*recip)) *
    /// (recip/rate)^{order/2}, with the Gamma-law boundaries handled.
    fn log_norm(&self) -> f64 {
        let lam = self.order.to_f64().unwrap();
        let rho = self.rate.to_f64().unwrap();
        let chi = self.recip_rate.to_f64().unwrap();
        if chi == 0.0 {
            return special::ln_gamma(lam) - lam * (rho / 2.0).ln();
        }
        if rho == 0.0 {
            return special::ln_gamma(-lam) + lam * (chi / 2.0).ln();
        }
        let beta = rho.sqrt() * chi.sqrt();
        std::f64::consts::LN_2 + special::ln_bessel_k(lam, beta) + 0.5 * lam * (chi / rho).ln()
    }
}

/// Log of the two-parameter gig density y^{lam-1} exp(-beta (y + 1/y) / 2),
/// relative to its value at the mode, expressed in the offset d = y - m so
/// that the mode-shifted rejection stays accurate when the density is
/// extremely concentrated (huge beta).
#[inline]
fn log_gig_rel<T: Scalar>(lam: T, beta: T, m: T, d: T) -> T {
    let y = m + d;
    (lam - T::one()) * (d / m).ln_1p()
        - c::<T>(0.5) * beta * d * (T::one() - T::one() / (y * m))
}

fn sample_gig_std<T: Scalar>(rng: &mut RngStream, lam: T, beta: T) -> T {
    debug_assert!(lam >= T::zero() && beta > T::zero());
    if lam >= T::one() || beta > T::one() {
        gig_rou_shift(rng, lam, beta)
    } else if beta > c::<T>(2.0 / 3.0) * (T::one() - lam).sqrt() {
        gig_rou_noshift(rng, lam, beta)
    } else {
        gig_three_piece(rng, lam, beta)
    }
}

/// Mode of the standardized gig density, stable for small beta.
fn gig_mode<T: Scalar>(lam: T, beta: T) -> T {
    if lam >= T::one() {
        let t = lam - T::one();
        (t + (t * t + beta * beta).sqrt()) / beta
    } else {
        let t = T::one() - lam;
        beta / (t + (t * t + beta * beta).sqrt())
    }
}

/// Ratio-of-uniforms with the mode shifted to the origin (the workhorse for
/// order >= 1 or beta > 1). The u-extent endpoints are the two positive
/// roots of a cubic, found in closed form.
fn gig_rou_shift<T: Scalar>(rng: &mut RngStream, lam: T, beta: T) -> T {
    let one = T::one();
    let two = c::<T>(2.0);
    let m = gig_mode(lam, beta);

    // roots of y^3 + a y^2 + b y + m = 0 locate the extrema of
    // (y - m) sqrt(g(y))
    let a = -(two * (lam + one) / beta + m);
    let b = two * (lam - one) * m / beta - one;
    let pp = b - a * a / c::<T>(3.0);
    let qq = two * a * a * a / c::<T>(27.0) - a * b / c::<T>(3.0) + m;
    // three real roots (discriminant is negative in this parameter regime)
    let s = (-pp / c::<T>(3.0)).sqrt();
    let cos_arg = (c::<T>(3.0) * qq / (two * pp * s)).max(-one).min(one);
    let phi = cos_arg.acos();
    let third = phi / c::<T>(3.0);
    let two_pi_3 = c::<T>(2.0 * std::f64::consts::PI / 3.0);
    let shift = a / c::<T>(3.0);
    // Exactly one root is negative, one lies in (0, m), one above m. Take
    // the extreme u over each side so a root that degenerates toward zero
    // cannot be mistaken for the interior one.
    let mut u_plus = T::zero();
    let mut u_minus = T::zero();
    for k in 0..3 {
        let t = two * s * (third - two_pi_3 * c::<T>(k as f64)).cos();
        let y = t - shift;
        if y <= T::zero() {
            continue;
        }
        let d = y - m;
        let u = d * (c::<T>(0.5) * log_gig_rel(lam, beta, m, d)).exp();
        u_plus = u_plus.max(u);
        u_minus = u_minus.min(u);
    }
    debug_assert!(u_plus > T::zero() && u_minus < T::zero());
    // widen slightly: the bounds only need to contain the region
    let margin = one + c::<T>(1e-6);
    let u_plus = u_plus * margin;
    let u_minus = u_minus * margin;

    loop {
        let u = u_minus + rng.uniform::<T>() * (u_plus - u_minus);
        let v: T = rng.uniform();
        let d = u / v;
        if m + d <= T::zero() {
            continue;
        }
        if two * v.ln() <= log_gig_rel(lam, beta, m, d) {
            return m + d;
        }
    }
}

/// Plain ratio-of-uniforms, used for order < 1 with moderate beta.
fn gig_rou_noshift<T: Scalar>(rng: &mut RngStream, lam: T, beta: T) -> T {
    let one = T::one();
    let two = c::<T>(2.0);
    let m = gig_mode(lam, beta);
    let lg = |y: T| (lam - one) * y.ln() - c::<T>(0.5) * beta * (y + one / y);
    let lg_m = lg(m);
    // maximizer of y^2 g(y)
    let t = lam + one;
    let y_star = (t + (t * t + beta * beta).sqrt()) / beta;
    let u_max = y_star * (c::<T>(0.5) * (lg(y_star) - lg_m)).exp();
    loop {
        let u = rng.uniform::<T>() * u_max;
        let v: T = rng.uniform();
        let y = u / v;
        if two * v.ln() <= lg(y) - lg_m {
            return y;
        }
    }
}

/// Three-piece rejection for order < 1 with small beta: a constant cap over
/// (0, x0), the power envelope y^{order-1} over (x0, 2/beta), and an
/// exponential tail beyond. All bookkeeping in log space.
fn gig_three_piece<T: Scalar>(rng: &mut RngStream, lam: T, beta: T) -> T {
    let one = T::one();
    let two = c::<T>(2.0);
    let half_beta = c::<T>(0.5) * beta;
    let m = gig_mode(lam, beta);
    let x0 = beta / (one - lam);
    let cc = two / beta;
    debug_assert!(x0 < cc);
    let lg = |y: T| (lam - one) * y.ln() - half_beta * (y + one / y);
    let lk0 = lg(m);
    let big_l = (cc / x0).ln();

    let log_a0 = lk0 + x0.ln();
    let tiny_lam = lam < c::<T>(1e-10);
    // power-piece area: x0^lam (e^{lam L} - 1) / lam, which tends to L as
    // lam -> 0
    let log_a1 = if tiny_lam {
        big_l.ln()
    } else {
        lam * x0.ln() + (lam * big_l).exp_m1().ln() - lam.ln()
    };
    let log_a2 = lam * cc.ln() - one;

    let mx = log_a0.max(log_a1).max(log_a2);
    let w0 = (log_a0 - mx).exp();
    let w1 = (log_a1 - mx).exp();
    let w2 = (log_a2 - mx).exp();
    let total = w0 + w1 + w2;

    loop {
        let pick = rng.uniform::<T>() * total;
        let u: T = rng.uniform();
        let ln_acc: T = rng.uniform::<T>().ln();
        if pick < w0 {
            let y = x0 * u;
            if ln_acc <= lg(y) - lk0 {
                return y;
            }
        } else if pick < w0 + w1 {
            let y = if tiny_lam {
                x0 * (u * big_l).exp()
            } else {
                x0 * ((u * (lam * big_l).exp_m1()).ln_1p() / lam).exp()
            };
            if ln_acc <= -half_beta * (y + one / y) {
                return y;
            }
        } else {
            let y = cc - cc * u.ln();
            if ln_acc <= (lam - one) * (y / cc).ln() - half_beta / y {
                return y;
            }
        }
    }
}

/// Multivariate normal N(mean, cov) sampled through the Cholesky factor of
/// the covariance.
#[derive(Debug, Clone)]
pub struct MultivariateNormal<T> {
    mean: Vec<T>,
    chol: CholeskyFactor<T>,
}

impl<T: Scalar> MultivariateNormal<T> {
    pub fn new(mean: Vec<T>, cov: &SymMatrix<T>) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::InvalidArgument(format!(
                "mean length {} does not match covariance dimension {}",
                mean.len(),
                cov.dim()
            )));
        }
        let chol = cov.cholesky().map_err(|e| match e {
            Error::NotPositiveDefinite { pivot } => Error::InvalidArgument(format!(
                "covariance of dimension {} is not positive definite (pivot {pivot}): {:?}",
                cov.dim(),
                cov.packed()
            )),
            other => other,
        })?;
        Ok(MultivariateNormal { mean, chol })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<T> {
        let p = self.mean.len();
        let z: Vec<T> = (0..p).map(|_| rng.standard_normal()).collect();
        let mut out = self.mean.clone();
        for i in 0..p {
            let mut acc = T::zero();
            for k in 0..=i {
                acc = acc + self.chol.get(i, k) * z[k];
            }
            out[i] = out[i] + acc;
        }
        out
    }

    pub fn logpdf(&self, x: &[T]) -> T {
        let p = self.mean.len();
        let diff: Vec<T> = x.iter().zip(&self.mean).map(|(&a, &b)| a - b).collect();
        let q = self.chol.inv_quad_form(&diff);
        -c::<T>(0.5) * (c::<T>(p as f64) * c::<T>(LN_2PI) + self.chol.log_det() + q)
    }
}
