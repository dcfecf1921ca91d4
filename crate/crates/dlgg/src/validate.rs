//! Statistical validation suite: every sampler is checked against an
//! independent oracle (analytic moments, quadrature of the log density, or
//! both), and the prior concentration bound is checked by Monte Carlo.
//!
//! All checks run on `f64` with fixed seeds and report observed vs expected
//! values; a failing check is a report entry, not a panic.

use std::fmt;

use crate::dist::{Dirichlet, Exponential, Gamma, Gig, InverseGaussian, MultivariateNormal, Normal};
use crate::mat::SymMatrix;
use crate::model::{prior_concentration_check, HyperParams};
use crate::quad::{integral_finite, integral_positive, integral_real, moment_positive};
use crate::rng::RngStream;
use crate::special::reg_lower_gamma;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: observed {:.6e}, expected {:.6e} (tol {:.2e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            self.expected,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        write!(
            f,
            "{} checks, {} failed",
            self.checks.len(),
            failed
        )
    }
}

/// |observed - expected| <= tolerance.
pub fn abs_check(name: &str, observed: f64, expected: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        observed,
        expected,
        tolerance,
        pass: (observed - expected).abs() <= tolerance && observed.is_finite(),
    }
}

/// Relative version: tolerance is `rel * |expected|`.
pub fn rel_check(name: &str, observed: f64, expected: f64, rel: f64) -> CheckResult {
    abs_check(name, observed, expected, rel * expected.abs())
}

/// Sample-mean check against an expected value; the harness used by the
/// corrupted-sampler canary test as well as the real suite.
pub fn moment_check(
    name: &str,
    expected: f64,
    tolerance: f64,
    n: usize,
    mut draw: impl FnMut() -> f64,
) -> CheckResult {
    let mean = (0..n).map(|_| draw()).sum::<f64>() / n as f64;
    abs_check(name, mean, expected, tolerance)
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v)
}

/// Approximate upper chi-square quantile (Wilson-Hilferty), q = 0.999.
fn chi2_q999(df: usize) -> f64 {
    let z = 3.090_232_306_167_813_f64;
    let d = df as f64;
    let t = 1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt();
    d * t * t * t
}

fn normal_checks(seed: u64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let mut rng = RngStream::new(seed);
    let n = 1_000_000usize;
    let std = Normal::new(0.0, 1.0).unwrap();
    let m = (0..n).map(|_| std.sample(&mut rng)).sum::<f64>() / n as f64;
    rep.push(abs_check("normal mean(0,1)", m, 0.0, 4.0 / (n as f64).sqrt()));

    let tight = Normal::new(5.0, 0.1).unwrap();
    let xs: Vec<f64> = (0..n).map(|_| tight.sample(&mut rng)).collect();
    let (_, v) = mean_var(&xs);
    rep.push(rel_check("normal var(5,0.1)", v, 0.01, 0.05));

    let mut r1 = RngStream::new(seed ^ 0xABCD);
    let mut r2 = RngStream::new(seed ^ 0xABCD);
    let same = (0..1000).all(|_| std.sample(&mut r1).to_bits() == std.sample(&mut r2).to_bits());
    rep.push(abs_check("normal seed determinism", same as u8 as f64, 1.0, 0.0));
    rep
}

fn gamma_checks(seed: u64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let mut rng = RngStream::new(seed);
    let n = 1_000_000usize;

    let g = Gamma::new(3.0, 2.0).unwrap();
    let m = (0..n).map(|_| g.sample(&mut rng)).sum::<f64>() / n as f64;
    rep.push(rel_check("gamma mean(3,2)", m, 1.5, 0.01));

    let e = Gamma::new(1.0, 1.0).unwrap();
    let mut xs: Vec<f64> = (0..n).map(|_| e.sample(&mut rng)).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rep.push(rel_check(
        "gamma(1,1) median is exponential",
        xs[n / 2],
        std::f64::consts::LN_2,
        0.02,
    ));

    // tiny shape: strict positivity and a histogram chi-square against the
    // exact cell probabilities from the incomplete gamma
    let small = Gamma::new(1e-3, 0.5).unwrap();
    let draws: Vec<f64> = (0..n).map(|_| small.sample(&mut rng)).collect();
    let bad = draws.iter().filter(|x| !(**x > 0.0) || !x.is_finite()).count();
    rep.push(abs_check("gamma(1e-3,0.5) positive finite", bad as f64, 0.0, 0.0));

    let edges = [1e-250, 1e-150, 1e-80, 1e-30, 1e-10, 1e-3, 0.05, 0.5, 3.0];
    let cdf = |x: f64| reg_lower_gamma(1e-3, 0.5 * x);
    let mut observed = vec![0u64; edges.len() + 1];
    for &x in &draws {
        let mut cell = 0usize;
        while cell < edges.len() && x >= edges[cell] {
            cell += 1;
        }
        observed[cell] += 1;
    }
    let mut chi2 = 0.0;
    let mut prev_p = 0.0;
    for cell in 0..=edges.len() {
        let p_cum = if cell == edges.len() { 1.0 } else { cdf(edges[cell]) };
        let p_cell = p_cum - prev_p;
        prev_p = p_cum;
        let expect = p_cell * n as f64;
        let diff = observed[cell] as f64 - expect;
        chi2 += diff * diff / expect;
    }
    let crit = chi2_q999(edges.len());
    rep.push(CheckResult {
        name: "gamma(1e-3,0.5) histogram chi2".into(),
        observed: chi2,
        expected: crit,
        tolerance: 0.0,
        pass: chi2 < crit,
    });
    rep
}

fn exponential_checks(seed: u64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let mut rng = RngStream::new(seed);
    let n = 1_000_000usize;
    let e = Exponential::new(0.5).unwrap();
    let xs: Vec<f64> = (0..n).map(|_| e.sample(&mut rng)).collect();
    let (m, v) = mean_var(&xs);
    rep.push(rel_check("exponential mean(rate 1/2)", m, 2.0, 0.01));
    rep.push(rel_check("exponential var(rate 1/2)", v, 4.0, 0.03));
    let mut sorted = xs;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rep.push(rel_check(
        "exponential median(rate 1/2)",
        sorted[n / 2],
        2.0 * std::f64::consts::LN_2,
        0.02,
    ));
    rep
}

fn dirichlet_checks(seed: u64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let mut rng = RngStream::new(seed);
    let n = 100_000usize;
    let d = Dirichlet::new(vec![1.0, 1.0, 1.0]).unwrap();
    let mut sums = [0.0f64; 3];
    let mut max_dev: f64 = 0.0;
    for _ in 0..n {
        let x = d.sample(&mut rng);
        for k in 0..3 {
            sums[k] += x[k];
        }
        max_dev = max_dev.max((x.iter().sum::<f64>() - 1.0).abs());
    }
    for (k, s) in sums.iter().enumerate() {
        rep.push(rel_check(
            &format!("dirichlet(1,1,1) mean[{k}]"),
            s / n as f64,
            1.0 / 3.0,
            0.02,
        ));
    }
    rep.push(abs_check("dirichlet simplex deviation", max_dev, 0.0, 1e-12));

    // sparse regime: nearly all mass on a single coordinate
    let sparse = Dirichlet::new(vec![1e-4; 10]).unwrap();
    let n2 = 10_000usize;
    let concentrated = (0..n2)
        .filter(|_| {
            let x = sparse.sample(&mut rng);
            x.iter().cloned().fold(0.0, f64::max) > 0.99
        })
        .count();
    let frac = concentrated as f64 / n2 as f64;
    rep.push(CheckResult {
        name: "dirichlet(1e-4 x10) concentrates".into(),
        observed: frac,
        expected: 0.95,
        tolerance: 0.0,
        pass: frac > 0.95,
    });
    rep
}

fn inverse_gaussian_checks(seed: u64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let mut rng = RngStream::new(seed);
    let n = 1_000_000usize;
    let ig = InverseGaussian::new(1.0, 1.0).unwrap();
    let m = (0..n).map(|_| ig.sample(&mut rng)).sum::<f64>() / n as f64;
    rep.push(rel_check("inverse gaussian mean(1,1)", m, 1.0, 0.01));

    let ig2 = InverseGaussian::new(2.0, 1.0).unwrap();
    let xs: Vec<f64> = (0..n).map(|_| ig2.sample(&mut rng)).collect();
    let (_, v) = mean_var(&xs);
    rep.push(rel_check("inverse gaussian var(2,1) = mu^3/lambda", v, 8.0, 0.05));

    let extreme = InverseGaussian::new(1e6, 1.0).unwrap();
    let bad = (0..n)
        .map(|_| extreme.sample(&mut rng))
        .filter(|x: &f64| !(*x > 0.0) || !x.is_finite())
        .count();
    rep.push(abs_check("inverse gaussian(1e6,1) positive finite", bad as f64, 0.0, 0.0));
    rep
}

fn gig_quad_mean(order: f64, rate: f64, recip: f64) -> f64 {
    let lf = move |x: f64| (order - 1.0) * x.ln() - 0.5 * (rate * x + recip / x);
    let anchor = {
        // x-space mode of the density
        let t = order - 1.0;
        ((t + (t * t + rate * recip).sqrt()) / rate).max(1e-12)
    };
    moment_positive(&lf, anchor, 1)
}

fn gig_checks(seed: u64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let mut rng = RngStream::new(seed);
    let n = 1_000_000usize;

    // Bessel-ratio anchor: K_{1/2} = K_{-1/2} makes the mean exactly 1
    let g = Gig::new(-0.5, 1.0, 1.0).unwrap();
    let m = (0..n).map(|_| g.sample(&mut rng)).sum::<f64>() / n as f64;
    rep.push(rel_check("giG(-1/2,1,1) mean (Bessel ratio)", m, 1.0, 0.01));

    // boundary chi = 0 reduces to Gamma
    let gb = Gig::new(2.0, 3.0, 0.0).unwrap();
    let mb = (0..n).map(|_| gb.sample(&mut rng)).sum::<f64>() / n as f64;
    rep.push(rel_check("giG(2,3,0) = Gamma(2,3/2) mean", mb, 4.0 / 3.0, 0.01));

    // reciprocal identity: 1/X under (0.7,2,3) matches (-0.7,3,2)
    let ga = Gig::new(0.7, 2.0, 3.0).unwrap();
    let gc = Gig::new(-0.7, 3.0, 2.0).unwrap();
    let n2 = 400_000usize;
    let xa: Vec<f64> = (0..n2).map(|_| 1.0 / ga.sample(&mut rng)).collect();
    let xc: Vec<f64> = (0..n2).map(|_| gc.sample(&mut rng)).collect();
    let (ma, va) = mean_var(&xa);
    let (mc, vc) = mean_var(&xc);
    let se_mean = (va / n2 as f64 + vc / n2 as f64).sqrt();
    rep.push(abs_check("giG reciprocal identity mean", ma, mc, 5.0 * se_mean));

    // quadrature oracles across the three sampling regimes
    for &(order, rate, recip, tag) in &[
        (-0.3, 1.0, 0.2, "rou-noshift"),
        (0.3, 1.0, 0.04, "three-piece"),
        (0.0, 1.0, 0.01, "three-piece order0"),
        (5.0, 2.0, 0.5, "rou-shift"),
        (-3.0, 0.5, 4.0, "rou-shift negative order"),
    ] {
        let gg = Gig::new(order, rate, recip).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| gg.sample(&mut rng)).collect();
        let (m, v) = mean_var(&xs);
        let expect = gig_quad_mean(order, rate, recip);
        let se = (v / n as f64).sqrt();
        rep.push(abs_check(
            &format!("giG({order},{rate},{recip}) mean vs quadrature [{tag}]"),
            m,
            expect,
            (5.0 * se).max(0.002 * expect),
        ));
    }

    // strongly negative order, the tau-update regime at p = 20, a = 1/p^2
    let nu = 190.0;
    let order = nu / 400.0 - nu;
    let gt = Gig::new(order, 1.0, 10.0).unwrap();
    let xs: Vec<f64> = (0..n).map(|_| gt.sample(&mut rng)).collect();
    let bad = xs.iter().filter(|x| !(**x > 0.0) || !x.is_finite()).count();
    rep.push(abs_check("giG strongly negative order positive finite", bad as f64, 0.0, 0.0));
    let (m, _) = mean_var(&xs);
    let expect = gig_quad_mean(order, 1.0, 10.0);
    rep.push(rel_check("giG strongly negative order mean", m, expect, 0.02));
    rep
}

fn mvn_checks(seed: u64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let mut rng = RngStream::new(seed);
    let n = 100_000usize;

    let eye = SymMatrix::<f64>::identity(3).unwrap();
    let mvn = MultivariateNormal::new(vec![0.0; 3], &eye).unwrap();
    let draws: Vec<Vec<f64>> = (0..n).map(|_| mvn.sample(&mut rng)).collect();
    let cov = |a: usize, b: usize| -> f64 {
        let ma = draws.iter().map(|x| x[a]).sum::<f64>() / n as f64;
        let mb = draws.iter().map(|x| x[b]).sum::<f64>() / n as f64;
        draws.iter().map(|x| (x[a] - ma) * (x[b] - mb)).sum::<f64>() / n as f64
    };
    for i in 0..3 {
        rep.push(rel_check(&format!("mvn identity cov[{i}{i}]"), cov(i, i), 1.0, 0.03));
    }
    rep.push(abs_check("mvn identity cov[01]", cov(0, 1), 0.0, 0.03));

    let mut c2 = SymMatrix::<f64>::identity(2).unwrap();
    c2.set(0, 0, 2.0);
    c2.set(1, 1, 2.0);
    c2.set(0, 1, 1.0);
    let mvn2 = MultivariateNormal::new(vec![1.0, 2.0], &c2).unwrap();
    let d2: Vec<Vec<f64>> = (0..n).map(|_| mvn2.sample(&mut rng)).collect();
    let m0 = d2.iter().map(|x| x[0]).sum::<f64>() / n as f64;
    let m1 = d2.iter().map(|x| x[1]).sum::<f64>() / n as f64;
    let c01 = d2.iter().map(|x| (x[0] - m0) * (x[1] - m1)).sum::<f64>() / n as f64;
    rep.push(rel_check("mvn correlated cov[01]", c01, 1.0, 0.05));
    rep.push(abs_check("mvn correlated mean[0]", m0, 1.0, 0.05));

    // scalar mvn logpdf must equal the univariate normal logpdf
    let cov1 = SymMatrix::from_packed(1, vec![4.0f64]).unwrap();
    let mvn1 = MultivariateNormal::new(vec![0.5], &cov1).unwrap();
    let norm = Normal::new(0.5, 2.0).unwrap();
    rep.push(abs_check(
        "mvn scalar logpdf matches normal",
        mvn1.logpdf(&[1.7]),
        norm.logpdf(1.7),
        1e-12,
    ));
    rep
}

fn logpdf_normalization_checks() -> ValidationReport {
    let mut rep = ValidationReport::default();
    let tol = 1e-6;

    for &(mean, sd) in &[(0.0, 1.0), (5.0, 0.1), (-2.0, 10.0)] {
        let d = Normal::new(mean, sd).unwrap();
        let z = integral_real(&|x| d.logpdf(x), mean);
        rep.push(abs_check(&format!("normal({mean},{sd}) logpdf normalizes"), z, 1.0, tol));
    }
    for &(shape, rate) in &[(2.0, 2.0), (0.5, 1.0), (5.0, 0.2)] {
        let d = Gamma::new(shape, rate).unwrap();
        let z = integral_positive(&|x| d.logpdf(x), shape / rate);
        rep.push(abs_check(&format!("gamma({shape},{rate}) logpdf normalizes"), z, 1.0, tol));
    }
    for &rate in &[0.5, 1.0, 3.0] {
        let d = Exponential::new(rate).unwrap();
        let z = integral_positive(&|x| d.logpdf(x), 1.0 / rate);
        rep.push(abs_check(&format!("exponential({rate}) logpdf normalizes"), z, 1.0, tol));
    }
    for &(mu, lam) in &[(1.0, 1.0), (2.0, 1.0), (0.5, 4.0)] {
        let d = InverseGaussian::new(mu, lam).unwrap();
        let z = integral_positive(&|x| d.logpdf(x), mu);
        rep.push(abs_check(&format!("iG({mu},{lam}) logpdf normalizes"), z, 1.0, tol));
    }
    for &(order, rate, recip) in &[(-0.3, 1.0, 0.2), (2.0, 3.0, 0.5), (-1.5, 0.8, 2.0), (2.0, 3.0, 0.0)]
    {
        let d = Gig::new(order, rate, recip).unwrap();
        let anchor = if rate > 0.0 {
            let t: f64 = order - 1.0;
            ((t + (t * t + rate * recip).sqrt()) / rate).max(0.1)
        } else {
            1.0
        };
        let z = integral_positive(&|x| d.logpdf(x), anchor);
        rep.push(abs_check(
            &format!("giG({order},{rate},{recip}) logpdf normalizes"),
            z,
            1.0,
            tol,
        ));
    }
    for &(a1, a2) in &[(2.0, 3.0), (1.5, 1.5), (4.0, 1.2)] {
        let d = Dirichlet::new(vec![a1, a2]).unwrap();
        let z = integral_finite(&|x| d.logpdf(&[x, 1.0 - x]), 1e-9, 1.0 - 1e-9, 20_000);
        rep.push(abs_check(
            &format!("dirichlet({a1},{a2}) logpdf normalizes"),
            z,
            1.0,
            1e-5,
        ));
    }
    rep
}

/// Run every distribution-level check with sub-seeds derived from `seed`.
pub fn validate_distributions(seed: u64) -> ValidationReport {
    let mut rep = ValidationReport::default();
    rep.extend(normal_checks(seed.wrapping_add(1)));
    rep.extend(gamma_checks(seed.wrapping_add(2)));
    rep.extend(exponential_checks(seed.wrapping_add(3)));
    rep.extend(dirichlet_checks(seed.wrapping_add(4)));
    rep.extend(inverse_gaussian_checks(seed.wrapping_add(5)));
    rep.extend(gig_checks(seed.wrapping_add(6)));
    rep.extend(mvn_checks(seed.wrapping_add(7)));
    rep.extend(logpdf_normalization_checks());
    rep
}

/// Monte Carlo validation of the prior concentration bound
/// P(|omega| < delta) >= 1 - C log(1/delta)/Gamma(a): the fitted constant
/// must be finite, positive, and stable within a factor of 2 across the
/// delta grid, for each p with a = 1/p^2.
pub fn validate_prior_concentration(seed: u64, p_grid: &[usize], samples: usize) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let deltas = [1e-3, 3.16e-3, 1e-2, 3.16e-2, 1e-1];
    for (k, &p) in p_grid.iter().enumerate() {
        let mut rng = RngStream::new(seed.wrapping_add(100 + k as u64));
        let hp = HyperParams::<f64>::default_for(p).unwrap();
        let table = prior_concentration_check(&mut rng, p, &hp, &deltas, samples).unwrap();
        let c = table.fitted_c().unwrap_or(f64::NAN);
        rep.push(CheckResult {
            name: format!("concentration fitted C finite (p={p})"),
            observed: c,
            expected: 0.0,
            tolerance: 0.0,
            pass: c.is_finite() && c > 0.0,
        });
        let ratio = table.stability_ratio().unwrap_or(f64::NAN);
        rep.push(CheckResult {
            name: format!("concentration C stable within 2x (p={p})"),
            observed: ratio,
            expected: 2.0,
            tolerance: 0.0,
            pass: ratio.is_finite() && ratio <= 2.0,
        });
        if p == 10 {
            let row = table
                .rows
                .iter()
                .find(|r| (r.delta - 1e-2).abs() < 1e-12)
                .expect("delta 0.01 in grid");
            rep.push(CheckResult {
                name: "concentration P(|omega|<0.01) > 0.9 (p=10)".into(),
                observed: row.prob_below,
                expected: 0.9,
                tolerance: 0.0,
                pass: row.prob_below > 0.9,
            });
        }
    }
    // smaller a (larger Gamma(a)) must shrink the residual at fixed delta
    let p = 10usize;
    let mut rng = RngStream::new(seed.wrapping_add(999));
    let hp_small = HyperParams::<f64>::default_for(p).unwrap(); // a = 1/p^2
    let hp_large = HyperParams::<f64>::inv_nu(p).unwrap(); // a = 1/nu > 1/p^2
    let t_small =
        prior_concentration_check(&mut rng, p, &hp_small, &[1e-2], samples).unwrap();
    let t_large =
        prior_concentration_check(&mut rng, p, &hp_large, &[1e-2], samples).unwrap();
    rep.push(CheckResult {
        name: "smaller a gives smaller residual at delta=0.01".into(),
        observed: t_small.rows[0].residual,
        expected: t_large.rows[0].residual,
        tolerance: 0.0,
        pass: t_small.rows[0].residual <= t_large.rows[0].residual,
    });
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_result_logic() {
        assert!(abs_check("x", 1.0, 1.0, 0.0).pass);
        assert!(!abs_check("x", 1.1, 1.0, 0.05).pass);
        assert!(rel_check("x", 1.01, 1.0, 0.02).pass);
        assert!(!abs_check("x", f64::NAN, 1.0, 10.0).pass);
    }

    #[test]
    fn moment_check_harness_detects_bias() {
        let mut rng = RngStream::new(4);
        let honest = moment_check("honest", 0.0, 0.02, 50_000, || rng.standard_normal::<f64>());
        assert!(honest.pass);
        let mut rng2 = RngStream::new(4);
        let biased = moment_check("biased", 0.0, 0.02, 50_000, || {
            rng2.standard_normal::<f64>() + 0.1
        });
        assert!(!biased.pass);
    }

    #[test]
    fn chi2_quantile_sane() {
        // chi2_{0.999} with 8 df is about 26.1
        let q = chi2_q999(8);
        assert!((q - 26.1).abs() < 1.0, "q = {q}");
    }
}
