//! Special functions used by the prior bound and as distribution-level
//! oracles: log-gamma, the regularized lower incomplete gamma function, and
//! the modified Bessel function of the second kind with real order.

/// Lanczos approximation (g = 7, 9 terms), relative error near 1e-13.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Gamma(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        acc += coef / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
///
/// Series for x < a + 1, Lentz continued fraction otherwise.
pub fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // series: sum_{n>=0} x^n / (a (a+1) ... (a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        (log_prefix + sum.ln()).exp()
    } else {
        // continued fraction for Q(a, x), Lentz's method
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        let q = (log_prefix.exp()) * h;
        1.0 - q
    }
}

/// log of cosh(y), stable for large |y|.
fn log_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// ln K_nu(x): modified Bessel function of the second kind, real order.
///
/// Evaluated from the integral representation
/// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
/// with the integrand handled in log space, so it stays accurate for large
/// |nu| where K_nu itself overflows. K_{-nu} = K_nu.
pub fn ln_bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "ln_bessel_k requires x > 0");
    let nu = nu.abs();
    let h = |t: f64| -x * t.cosh() + log_cosh(nu * t);

    // Locate the integrand's maximum: h'(t) = -x sinh t + nu tanh(nu t).
    let mut lo = 0.0f64;
    let mut hi = if nu > 0.0 { (nu / x).asinh() + 2.0 } else { 2.0 };
    while -x * hi.sinh() + nu * (nu * hi).tanh() > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if h(m1) < h(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let h_max = h(t_star);

    // Right integration bound: walk until 60 nats below the peak.
    let mut t_hi = t_star + 1.0;
    while h(t_hi) > h_max - 60.0 {
        t_hi += 1.0;
    }

    // Simpson's rule on exp(h - h_max) over [0, t_hi].
    let n = 8192usize;
    let dt = t_hi / n as f64;
    let mut sum = (h(0.0) - h_max).exp() + (h(t_hi) - h_max).exp();
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * (h(k as f64 * dt) - h_max).exp();
    }
    h_max + (sum * dt / 3.0).ln()
}

/// log(sum(exp(xs))) without overflow.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}
