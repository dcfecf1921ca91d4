mod support;

use dlgg::edge::edge_count;
use dlgg::gibbs::{
    apply_column, column_conditional, make_partition, run_chain, sample_column,
    sample_column_from, update_psi, ChainConfig,
};
use dlgg::mat::{Matrix, PrecisionMatrix, ScatterMatrix, SymMatrix};
use dlgg::model::{sample_prior, HyperParams, LatentState, ModelState};
use dlgg::rng::RngStream;
use dlgg::synthetic::{gen_data, gen_precision, TruthSpec};
use support::{mean_var, se_of_variance};

fn scatter_from_normal(p: usize, n: usize, seed: u64) -> ScatterMatrix<f64> {
    let mut rng = RngStream::new(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.standard_normal::<f64>()).collect())
        .collect();
    ScatterMatrix::from_data(&Matrix::from_rows(rows).unwrap()).unwrap()
}

/// Frozen-latent (theta, eta) draws at p = 2 against the analytic
/// Gamma(n/2 + 1, s_22/2) x N(-A s_12, A) law, first two moments, 5 SE.
#[test]
fn conditional_law_exact_at_p2() {
    let n_data = 30usize;
    let s = scatter_from_normal(2, n_data, 1234);
    let mut m = SymMatrix::<f64>::identity(2).unwrap();
    m.set(0, 0, 2.0);
    m.set(0, 1, 0.5);
    m.set(1, 1, 1.5);
    let omega = PrecisionMatrix::new(m).unwrap();
    let latent = LatentState::new(vec![1.2], vec![1.0], 0.9).unwrap();
    let state = ModelState::new(omega, latent).unwrap();

    let part = make_partition(&state, &s, 1).unwrap();
    let tau = state.latent.tau();
    let lambda_tau2 = 1.2 * 1.0 * 1.0 * tau * tau;
    let a_expect = 1.0 / (s.get(1, 1) / 2.0 + 1.0 / lambda_tau2);
    let mean_expect = -a_expect * s.get(0, 1);
    let eta_shape = n_data as f64 / 2.0 + 1.0;
    let eta_rate = s.get(1, 1) / 2.0;

    let cond = column_conditional(&part, tau, n_data).unwrap();
    assert!((cond.a.get(0, 0) - a_expect).abs() < 1e-12 * a_expect);
    assert!((cond.mean[0] - mean_expect).abs() < 1e-12 * mean_expect.abs());
    assert_eq!(cond.eta_shape, eta_shape);
    assert_eq!(cond.eta_rate, eta_rate);

    let n = 100_000usize;
    let mut rng = RngStream::new(4321);
    let mut thetas = Vec::with_capacity(n);
    let mut etas = Vec::with_capacity(n);
    for _ in 0..n {
        let (theta, eta) = sample_column_from(&mut rng, &cond);
        thetas.push(theta[0]);
        etas.push(eta);
    }
    let (mt, vt) = mean_var(&thetas);
    let se_mt = (vt / n as f64).sqrt();
    assert!((mt - mean_expect).abs() <= 5.0 * se_mt, "theta mean {mt} vs {mean_expect}");
    let se_vt = se_of_variance(&thetas);
    assert!((vt - a_expect).abs() <= 5.0 * se_vt, "theta var {vt} vs {a_expect}");

    let (me, ve) = mean_var(&etas);
    let eta_mean = eta_shape / eta_rate;
    let eta_var = eta_shape / (eta_rate * eta_rate);
    let se_me = (ve / n as f64).sqrt();
    assert!((me - eta_mean).abs() <= 5.0 * se_me, "eta mean {me} vs {eta_mean}");
    let se_ve = se_of_variance(&etas);
    assert!((ve - eta_var).abs() <= 5.0 * se_ve, "eta var {ve} vs {eta_var}");
}

/// A (s_jj Omega_rest^{-1} + diag(1/(lambda tau^2))) = I to 1e-8.
#[test]
fn conditional_covariance_multiplies_back_to_identity() {
    let p = 4;
    let mut rng = RngStream::new(55);
    let s = scatter_from_normal(p, 25, 808);
    let omega = PrecisionMatrix::new(support::random_pd(p, &mut rng)).unwrap();
    let nu = edge_count(p);
    let psi: Vec<f64> = (0..nu).map(|_| 0.2 + rng.uniform::<f64>()).collect();
    let mut phi: Vec<f64> = (0..nu).map(|_| 0.05 + rng.uniform::<f64>()).collect();
    let t: f64 = phi.iter().sum();
    phi.iter_mut().for_each(|v| *v /= t);
    let state = ModelState::new(omega, LatentState::new(psi, phi, 0.7).unwrap()).unwrap();

    for j in 0..p {
        let part = make_partition(&state, &s, j).unwrap();
        let cond = column_conditional(&part, state.latent.tau(), s.n()).unwrap();
        let inv_rest = part.omega_rest().cholesky().unwrap().inverse();
        let tau2 = 0.7 * 0.7;
        let q = p - 1;
        for r in 0..q {
            for c in 0..q {
                let mut acc = 0.0;
                for k in 0..q {
                    let mut m_kc = part.s_jj() * inv_rest.get(k, c);
                    if k == c {
                        m_kc += 1.0 / (part.lambda_col()[k] * tau2);
                    }
                    acc += cond.a.get(r, k) * m_kc;
                }
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((acc - expect).abs() < 1e-8, "col {j}: ({r},{c}) -> {acc}");
            }
        }
    }
}

/// Empirical covariance of theta over 1e5 draws matches A elementwise (p=3).
#[test]
fn theta_covariance_matches_a() {
    let p = 3;
    let s = scatter_from_normal(p, 40, 2718);
    let state = ModelState::initial(p).unwrap();
    let part = make_partition(&state, &s, 2).unwrap();
    let cond = column_conditional(&part, 1.0, s.n()).unwrap();
    let n = 100_000usize;
    let mut rng = RngStream::new(999);
    let draws: Vec<Vec<f64>> = (0..n)
        .map(|_| sample_column_from(&mut rng, &cond).0)
        .collect();
    for r in 0..2 {
        for c in 0..2 {
            let mr = draws.iter().map(|d| d[r]).sum::<f64>() / n as f64;
            let mc = draws.iter().map(|d| d[c]).sum::<f64>() / n as f64;
            let cov = draws.iter().map(|d| (d[r] - mr) * (d[c] - mc)).sum::<f64>() / n as f64;
            let expect = cond.a.get(r, c);
            let scale = (cond.a.get(r, r) * cond.a.get(c, c)).sqrt();
            assert!(
                (cov - expect).abs() <= 0.05 * scale,
                "cov({r},{c}) = {cov} vs {expect}"
            );
        }
    }
}

/// Decreasing one lambda_e tau^2 weakly decreases the conditional variance
/// A_ee (Loewner order under a growing diagonal penalty).
#[test]
fn shrinkage_monotonicity_of_conditional_variance() {
    let p = 4;
    let s = scatter_from_normal(p, 30, 515);
    let mut rng = RngStream::new(21);
    let omega = PrecisionMatrix::new(support::random_pd(p, &mut rng)).unwrap();
    let nu = edge_count(p);
    let base_psi = vec![1.0; nu];
    let phi = vec![1.0 / nu as f64; nu];
    let j = 1usize;
    for shrink in [1.0f64, 0.3, 0.1, 0.01] {
        let mut psi = base_psi.clone();
        let mut prev: Option<Vec<f64>> = None;
        for step in 0..4 {
            // progressively shrink every edge of column j
            let factor = shrink.powi(step);
            for (f, v) in psi.iter_mut().enumerate() {
                let e = dlgg::edge::EdgeIndex::from_flat(f, p).unwrap();
                if e.i() == j || e.j() == j {
                    *v = base_psi[f] * factor;
                }
            }
            let state = ModelState::new(
                omega.clone(),
                LatentState::new(psi.clone(), phi.clone(), 1.0).unwrap(),
            )
            .unwrap();
            let part = make_partition(&state, &s, j).unwrap();
            let cond = column_conditional(&part, 1.0, s.n()).unwrap();
            let diag: Vec<f64> = (0..p - 1).map(|k| cond.a.get(k, k)).collect();
            if let Some(prev_diag) = prev {
                for (new, old) in diag.iter().zip(&prev_diag) {
                    assert!(*new <= *old * (1.0 + 1e-12), "A_ee grew: {new} > {old}");
                }
            }
            prev = Some(diag);
        }
    }
}

/// PD invariance over several hundred sweeps on a mid-size fixture (the
/// full 1e4-sweep grid runs in the acceptance suite).
#[test]
fn pd_preserved_across_sweeps() {
    let p = 10;
    let s = scatter_from_normal(p, 50, 626);
    let hp = HyperParams::<f64>::default_for(p).unwrap();
    let cfg = ChainConfig::new(300, 100, 1, 4242, hp);
    let samples = run_chain(&cfg, &s).unwrap();
    assert_eq!(samples.accept_diag.len(), 300);
    assert!(samples.accept_diag.iter().all(|&ok| ok));
    for d in &samples.draws {
        assert!(d.cholesky().is_ok());
    }
}

/// With shrinkage effectively disabled (huge prior scales pinned) and a lot
/// of data, the column updates alone must reproduce the generating matrix.
#[test]
fn consistency_smoke_frozen_latents() {
    let p = 3;
    let mut rng = RngStream::new(731);
    let spec = TruthSpec::<f64>::banded(p, 1, 0.5);
    let (truth, _) = gen_precision(&spec, &mut rng).unwrap();
    let data = gen_data(&truth, 10_000, &mut rng).unwrap();
    let s = ScatterMatrix::from_data(&data).unwrap();

    let nu = edge_count(p);
    // edge scale = psi phi^2 tau^2 ~ 1e12: effectively flat prior
    let latent = LatentState::new(vec![1e12; nu], vec![1.0 / nu as f64; nu], 1e3 * nu as f64)
        .unwrap();
    let mut state = ModelState::new(
        PrecisionMatrix::new(SymMatrix::identity(p).unwrap()).unwrap(),
        latent,
    )
    .unwrap();
    let mut chain_rng = RngStream::new(997);
    let mut acc = SymMatrix::<f64>::zeros(p).unwrap();
    let total = 2000usize;
    let burn = 500usize;
    for t in 0..total {
        for j in 0..p {
            let part = make_partition(&state, &s, j).unwrap();
            let (theta, eta) =
                sample_column(&mut chain_rng, &part, state.latent.tau(), s.n()).unwrap();
            state.omega = apply_column(&state.omega, j, &theta, eta).unwrap();
        }
        if t >= burn {
            for i in 0..p {
                for j in i..p {
                    acc.set(i, j, acc.get(i, j) + state.omega.get(i, j));
                }
            }
        }
    }
    let kept = (total - burn) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..p {
        for j in 0..p {
            let mean_ij = acc.get(i, j) / kept;
            num += (mean_ij - truth.get(i, j)).powi(2);
            den += truth.get(i, j).powi(2);
        }
    }
    let rel = (num / den).sqrt();
    assert!(rel < 0.10, "relative frobenius error {rel}");
}

/// Joint-consistency (Geweke-style): fresh prior latents plus column sweeps
/// on data resimulated from the current omega, against pure forward
/// simulation; the off-diagonal marginal moments must agree within 5 SE.
#[test]
fn geweke_style_joint_consistency() {
    let p = 3;
    let n = 20;
    let hp = HyperParams::<f64>::default_for(p).unwrap();
    let mut rng = RngStream::new(2024);
    let mut omega = PrecisionMatrix::new(SymMatrix::identity(p).unwrap()).unwrap();
    let burn = 300;
    let keep = 3000;
    let mut chain_w = Vec::with_capacity(keep);
    for t in 0..(burn + keep) {
        let (_, latents) = sample_prior(&mut rng, p, &hp).unwrap();
        let mut st = ModelState::new(omega, latents).unwrap();
        let data = gen_data(&st.omega, n, &mut rng).unwrap();
        let s = ScatterMatrix::from_data(&data).unwrap();
        for j in 0..p {
            let part = make_partition(&st, &s, j).unwrap();
            let (theta, eta) = sample_column(&mut rng, &part, st.latent.tau(), n).unwrap();
            st.omega = apply_column(&st.omega, j, &theta, eta).unwrap();
        }
        omega = st.omega;
        if t >= burn {
            chain_w.push(omega.get(0, 1));
        }
    }

    let mut fwd = Vec::with_capacity(100_000);
    let mut rng2 = RngStream::new(555);
    for _ in 0..100_000 {
        let (w, _) = sample_prior(&mut rng2, p, &hp).unwrap();
        fwd.push(w[0]);
    }

    let (mc, vc) = mean_var(&chain_w);
    let (mf, vf) = mean_var(&fwd);
    let se = (vc / chain_w.len() as f64 + vf / fwd.len() as f64).sqrt();
    assert!((mc - mf).abs() <= 5.0 * se, "means {mc} vs {mf} (se {se})");

    let abs_c: Vec<f64> = chain_w.iter().map(|x| x.abs()).collect();
    let abs_f: Vec<f64> = fwd.iter().map(|x| x.abs()).collect();
    let (mac, vac) = mean_var(&abs_c);
    let (maf, vaf) = mean_var(&abs_f);
    let se_a = (vac / abs_c.len() as f64 + vaf / abs_f.len() as f64).sqrt();
    assert!((mac - maf).abs() <= 5.0 * se_a, "abs moments {mac} vs {maf}");
}

/// The psi Gibbs draw must follow the exact full conditional
/// psi^{-1/2} exp(-w^2/(2 psi phi^2 tau^2) - psi/2): a quick
/// total-variation check (the 1e6-draw version runs in acceptance).
#[test]
fn psi_update_matches_full_conditional_density() {
    let (w, tau, phi) = (0.3f64, 0.8f64, 1.0f64);
    let mut m = SymMatrix::<f64>::identity(2).unwrap();
    m.set(0, 1, w);
    let state = ModelState::new(
        PrecisionMatrix::new(m).unwrap(),
        LatentState::new(vec![1.0], vec![phi], tau).unwrap(),
    )
    .unwrap();
    let hp = HyperParams::<f64>::default_for(2).unwrap();
    let mut rng = RngStream::new(31_415);
    let n = 200_000usize;
    let draws: Vec<f64> = (0..n)
        .map(|_| update_psi(&mut rng, &state, &hp).unwrap().psi()[0])
        .collect();
    let chi = w * w / (phi * phi * tau * tau);
    let exact = dlgg::dist::Gig::new(0.5, 1.0, chi).unwrap();
    let tv = support_tv(&draws, |x| exact.logpdf(x));
    assert!(tv < 0.05, "TV distance {tv}");
}

fn support_tv(draws: &[f64], logpdf: impl Fn(f64) -> f64) -> f64 {
    let n = draws.len();
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = sorted[(n as f64 * 1e-4) as usize];
    let hi = sorted[(n as f64 * (1.0 - 1e-4)) as usize];
    let k = 100usize;
    let edges: Vec<f64> = (0..=k)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / k as f64).exp())
        .collect();
    let mut counts = vec![0u64; k + 2];
    for &x in draws {
        let cell = edges.partition_point(|&e| x >= e);
        counts[cell] += 1;
    }
    let lf = |x: f64| logpdf(x);
    let mut tv = 0.0;
    for cell in 0..(k + 2) {
        let (a, b) = if cell == 0 {
            (1e-12, edges[0])
        } else if cell == k + 1 {
            (edges[k], sorted[n - 1] * 10.0)
        } else {
            (edges[cell - 1], edges[cell])
        };
        let pk = dlgg::quad::integral_finite(&lf, a, b, 400);
        tv += ((counts[cell] as f64 / n as f64) - pk).abs();
    }
    0.5 * tv
}

/// Two chains with different seeds agree on the log-posterior location.
#[test]
fn two_chain_psrf_below_threshold() {
    let p = 5;
    let s = scatter_from_normal(p, 60, 112);
    let hp = HyperParams::<f64>::default_for(p).unwrap();
    let a = run_chain(&ChainConfig::new(600, 200, 1, 1, hp), &s).unwrap();
    let b = run_chain(&ChainConfig::new(600, 200, 1, 2, hp), &s).unwrap();
    let r = dlgg::diagnostics::psrf(&a.log_posterior[200..], &b.log_posterior[200..]).unwrap();
    assert!(r < 1.2, "psrf {r}");
}
