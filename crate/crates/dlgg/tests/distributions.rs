mod support;

use dlgg::dist::Gig;
use dlgg::quad::moment_positive;
use dlgg::rng::RngStream;
use dlgg::validate::validate_distributions;
use support::mean_var;

/// The full oracle suite (analytic moments, quadrature normalization, the
/// small-shape chi-square histogram, all three giG regimes) must be green.
#[test]
fn full_distribution_suite_passes() {
    let rep = validate_distributions(424_242);
    for fail in rep.failures() {
        eprintln!("{fail}");
    }
    assert!(rep.all_pass());
}

#[test]
fn gig_second_moment_matches_quadrature_across_regimes() {
    let mut rng = RngStream::new(90_210);
    let n = 300_000usize;
    for &(order, rate, recip) in &[
        (-0.5f64, 1.0f64, 1.0f64),
        (1.5, 0.7, 0.9),
        (0.2, 1.0, 0.05),
        (-20.0, 1.0, 4.0),
    ] {
        let g = Gig::new(order, rate, recip).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| g.sample(&mut rng)).collect();
        let m2 = xs.iter().map(|&x| x * x).sum::<f64>() / n as f64;
        let lf = move |x: f64| (order - 1.0) * x.ln() - 0.5 * (rate * x + recip / x);
        let t = order - 1.0;
        let anchor = ((t + (t * t + rate * recip).sqrt()) / rate).max(1e-6);
        let expect = moment_positive(&lf, anchor, 2);
        let (_, v2) = mean_var(&xs.iter().map(|&x| x * x).collect::<Vec<_>>());
        let se = (v2 / n as f64).sqrt();
        assert!(
            (m2 - expect).abs() <= (5.0 * se).max(0.005 * expect),
            "giG({order},{rate},{recip}): m2 {m2} vs quadrature {expect}"
        );
    }
}

/// The reciprocal identity 1/X ~ giG(-order, recip, rate), checked on first
/// and second moments at several parameter points.
#[test]
fn gig_reciprocal_identity_two_moments() {
    let mut rng = RngStream::new(777_001);
    let n = 200_000usize;
    for &(order, rate, recip) in &[(0.9f64, 1.5f64, 0.6f64), (-1.3, 0.4, 2.0)] {
        let fwd = Gig::new(order, rate, recip).unwrap();
        let rec = Gig::new(-order, recip, rate).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| 1.0 / fwd.sample(&mut rng)).collect();
        let ys: Vec<f64> = (0..n).map(|_| rec.sample(&mut rng)).collect();
        let (mx, vx) = mean_var(&xs);
        let (my, vy) = mean_var(&ys);
        let se = (vx / n as f64 + vy / n as f64).sqrt();
        assert!((mx - my).abs() <= 5.0 * se, "means {mx} vs {my}");
        let x2: Vec<f64> = xs.iter().map(|&x| x * x).collect();
        let y2: Vec<f64> = ys.iter().map(|&y| y * y).collect();
        let (m2x, v2x) = mean_var(&x2);
        let (m2y, v2y) = mean_var(&y2);
        let se2 = (v2x / n as f64 + v2y / n as f64).sqrt();
        assert!((m2x - m2y).abs() <= 5.0 * se2, "second moments {m2x} vs {m2y}");
    }
}

#[test]
fn samplers_work_at_f32() {
    let mut rng = RngStream::new(5150);
    let g = Gig::<f32>::new(-0.5, 1.0, 1.0).unwrap();
    let n = 50_000;
    let mean = (0..n).map(|_| g.sample(&mut rng)).sum::<f32>() / n as f32;
    assert!((mean - 1.0).abs() < 0.05, "f32 giG mean {mean}");
    let d = dlgg::dist::Dirichlet::<f32>::new(vec![0.5, 0.5, 0.5]).unwrap();
    for _ in 0..100 {
        let x = d.sample(&mut rng);
        let s: f32 = x.iter().sum();
        assert!((s - 1.0).abs() < 1e-5);
    }
}

#[test]
fn logpdfs_are_finite_on_support_and_neg_infinite_outside() {
    let gig = Gig::<f64>::new(-0.7, 1.0, 0.3).unwrap();
    assert!(gig.logpdf(0.5).is_finite());
    assert_eq!(gig.logpdf(-1.0), f64::NEG_INFINITY);
    assert_eq!(gig.logpdf(0.0), f64::NEG_INFINITY);
    let ga = dlgg::dist::Gamma::new(2.0, 1.0).unwrap();
    assert_eq!(ga.logpdf(-0.1), f64::NEG_INFINITY);
    let ig = dlgg::dist::InverseGaussian::new(1.0, 1.0).unwrap();
    assert_eq!(ig.logpdf(0.0), f64::NEG_INFINITY);
    assert!(ig.logpdf(2.0).is_finite());
}
