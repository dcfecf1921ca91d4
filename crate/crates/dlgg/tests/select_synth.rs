mod support;

use dlgg::edge::edges;
use dlgg::gibbs::{run_chain, ChainConfig};
use dlgg::mat::{Matrix, ScatterMatrix};
use dlgg::model::HyperParams;
use dlgg::rng::RngStream;
use dlgg::select::{inclusion, select_graph, support_threshold, InclusionMatrix};
use dlgg::synthetic::{gen_data, gen_precision, TruthSpec};
use support::jacobi_eigenvalues;

fn small_run(p: usize, seed: u64) -> dlgg::PosteriorSamples64 {
    let mut rng = RngStream::new(seed);
    let rows: Vec<Vec<f64>> = (0..30)
        .map(|_| (0..p).map(|_| rng.standard_normal::<f64>()).collect())
        .collect();
    let s = ScatterMatrix::from_data(&Matrix::from_rows(rows).unwrap()).unwrap();
    let hp = HyperParams::default_for(p).unwrap();
    run_chain(&ChainConfig::new(80, 30, 1, seed, hp), &s).unwrap()
}

/// Inclusion frequencies are exactly the per-draw thresholded supports
/// averaged over draws.
#[test]
fn inclusion_equals_averaged_supports() {
    let p = 4;
    let samples = small_run(p, 33);
    let delta = 0.08;
    let incl = inclusion(&samples, delta).unwrap();
    for e in edges(p) {
        let cnt = samples
            .draws
            .iter()
            .filter(|d| support_threshold(*d, delta).unwrap().contains(e))
            .count();
        let expect = cnt as f64 / samples.n_draws() as f64;
        assert_eq!(incl.freq(e), expect);
    }
}

/// Merging two chains' inclusion matrices is the draw-count weighted
/// average, and equals the inclusion of the merged chain.
#[test]
fn merged_inclusion_is_weighted_average() {
    let p = 4;
    let a = small_run(p, 41);
    let b = small_run(p, 42);
    let delta = 0.08;
    let ia = inclusion(&a, delta).unwrap();
    let ib = inclusion(&b, delta).unwrap();
    let na = a.n_draws();
    let nb = b.n_draws();
    let avg = InclusionMatrix::weighted_merge(&ia, na, &ib, nb).unwrap();
    let merged = dlgg::gibbs::PosteriorSamples::merge(vec![a, b]).unwrap();
    let im = inclusion(&merged, delta).unwrap();
    for e in edges(p) {
        assert!((avg.freq(e) - im.freq(e)).abs() < 1e-15);
    }
}

#[test]
fn degenerate_chain_has_zero_one_frequencies() {
    let p = 3;
    let mut samples = small_run(p, 77);
    let first = samples.draws[0].clone();
    for d in samples.draws.iter_mut() {
        *d = first.clone();
    }
    let incl = inclusion(&samples, 0.05).unwrap();
    for e in edges(p) {
        let f = incl.freq(e);
        assert!(f == 0.0 || f == 1.0, "freq {f} not degenerate");
    }
    // selection on the degenerate chain is idempotent
    let s1 = select_graph(&incl, 0.5).unwrap();
    let s2 = select_graph(&incl, 0.5).unwrap();
    assert_eq!(s1, s2);
}

/// Tridiagonal Toeplitz truth: eigenvalues 1 + 2 v cos(k pi / (p+1)) are
/// known analytically; the generated matrix must match them and pass
/// Cholesky.
#[test]
fn banded_truth_has_toeplitz_spectrum() {
    let p = 6;
    let v = 0.45;
    let spec = TruthSpec::banded(p, 1, v);
    let mut rng = RngStream::new(3001);
    let (omega, _) = gen_precision(&spec, &mut rng).unwrap();
    assert!(omega.cholesky().is_ok());
    let mut expect: Vec<f64> = (1..=p)
        .map(|k| 1.0 + 2.0 * v * (k as f64 * std::f64::consts::PI / (p as f64 + 1.0)).cos())
        .collect();
    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut got = jacobi_eigenvalues(omega.as_sym());
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (g, e) in got.iter().zip(&expect) {
        assert!((g - e).abs() < 1e-10, "eigenvalue {g} vs {e}");
    }
}

/// Law of large numbers: S/n converges to the generating covariance.
#[test]
fn empirical_scatter_approaches_inverse_precision() {
    let p = 3;
    let spec = TruthSpec::banded(p, 1, 0.4);
    let mut rng = RngStream::new(3002);
    let (omega, _) = gen_precision(&spec, &mut rng).unwrap();
    let sigma = omega.inverse().unwrap();
    let n = 100_000usize;
    let data = gen_data(&omega, n, &mut rng).unwrap();
    let s = ScatterMatrix::from_data(&data).unwrap();
    for i in 0..p {
        for j in 0..p {
            let emp = s.get(i, j) / n as f64;
            let scale = (sigma.get(i, i) * sigma.get(j, j)).sqrt();
            assert!(
                (emp - sigma.get(i, j)).abs() <= 0.05 * scale,
                "({i},{j}): {emp} vs {}",
                sigma.get(i, j)
            );
        }
    }
}

/// Independent coordinates: empirical correlations near zero under omega = I.
#[test]
fn identity_precision_gives_uncorrelated_data() {
    let p = 4;
    let omega =
        dlgg::mat::PrecisionMatrix::new(dlgg::mat::SymMatrix::<f64>::identity(p).unwrap())
            .unwrap();
    let mut rng = RngStream::new(3003);
    let n = 50_000usize;
    let data = gen_data(&omega, n, &mut rng).unwrap();
    let s = ScatterMatrix::from_data(&data).unwrap();
    for e in edges(p) {
        let corr = s.get(e.i(), e.j()) / (s.get(e.i(), e.i()) * s.get(e.j(), e.j())).sqrt();
        assert!(corr.abs() < 0.02, "corr {corr}");
    }
}
