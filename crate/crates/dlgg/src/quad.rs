//! Numerical quadrature oracles.
//!
//! These integrate log-densities directly and are the independent check
//! against which the random variate generators are validated: the quadrature
//! path shares no code with the samplers.

/// log of int exp(g(u)) du over the real line, for a unimodal g.
///
/// `u0` is a starting point near the bulk of the mass. The maximum is
/// bracketed by doubling steps, refined by ternary search, and the integral
/// evaluated by Simpson's rule on exp(g - g_max) between points 60 nats
/// below the peak.
fn log_integral(g: &dyn Fn(f64) -> f64, u0: f64) -> f64 {
    // bracket a maximum around u0
    let mut step = 1.0;
    let mut lo = u0;
    let mut hi = u0;
    let mut g_lo = g(lo);
    let mut g_hi = g(hi);
    for _ in 0..200 {
        let mut moved = false;
        if g(lo - step) > g_lo {
            lo -= step;
            g_lo = g(lo);
            moved = true;
        }
        if g(hi + step) > g_hi {
            hi += step;
            g_hi = g(hi);
            moved = true;
        }
        if !moved {
            break;
        }
        step *= 2.0;
    }
    lo -= step;
    hi += step;
    for _ in 0..300 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) < g(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let u_star = 0.5 * (lo + hi);
    let g_max = g(u_star);
    assert!(g_max.is_finite(), "integrand peak not finite at u={u_star}");

    // expand to 60 nats below the peak on both sides
    let mut a = u_star - 1.0;
    let mut s = 1.0;
    while g(a) > g_max - 60.0 {
        a -= s;
        s *= 1.5;
    }
    let mut b = u_star + 1.0;
    s = 1.0;
    while g(b) > g_max - 60.0 {
        b += s;
        s *= 1.5;
    }

    let n = 16_384usize;
    let h = (b - a) / n as f64;
    let mut sum = (g(a) - g_max).exp() + (g(b) - g_max).exp();
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * (g(a + k as f64 * h) - g_max).exp();
    }
    g_max + (sum * h / 3.0).ln()
}

/// lf(e^u) with the argument guarded against under/overflow of e^u: outside
/// the representable range the integrand is treated as zero, which is valid
/// whenever the density carries negligible mass beyond ~1e-308 and ~1e308.
#[inline]
fn log_integrand_u(lf: &dyn Fn(f64) -> f64, u: f64) -> f64 {
    let x = u.exp();
    if x == 0.0 || x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    lf(x) + u
}

/// int_0^inf exp(lf(x)) dx via the substitution x = e^u.
pub fn integral_positive(lf: &dyn Fn(f64) -> f64, anchor: f64) -> f64 {
    assert!(anchor > 0.0);
    let g = |u: f64| log_integrand_u(lf, u);
    log_integral(&g, anchor.ln()).exp()
}

/// E[X^k] for the (possibly unnormalized) density exp(lf(x)) on (0, inf).
pub fn moment_positive(lf: &dyn Fn(f64) -> f64, anchor: f64, k: i32) -> f64 {
    assert!(anchor > 0.0);
    let g0 = |u: f64| log_integrand_u(lf, u);
    let gk = |u: f64| log_integrand_u(lf, u) + u * k as f64;
    (log_integral(&gk, anchor.ln()) - log_integral(&g0, anchor.ln())).exp()
}

/// int_{-inf}^{inf} exp(lf(x)) dx.
pub fn integral_real(lf: &dyn Fn(f64) -> f64, anchor: f64) -> f64 {
    log_integral(lf, anchor).exp()
}

/// int_a^b exp(lf(x)) dx by plain Simpson (finite, well-scaled integrands).
pub fn integral_finite(lf: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(b > a && n >= 2);
    let n = n + (n % 2);
    let h = (b - a) / n as f64;
    let f = |x: f64| {
        let v = lf(x);
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    };
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}
