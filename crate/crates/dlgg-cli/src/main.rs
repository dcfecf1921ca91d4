//! Command-line front end: generate synthetic truths, fit chains, select
//! graphs, summarize runs, and run the statistical validation suite.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dlgg::diagnostics::diagnostics_report;
use dlgg::error::Error;
use dlgg::gibbs::{run_chain, ChainConfig, PosteriorSamples, ScanOrder};
use dlgg::io::csv::{read_latents_csv, read_trace_csv, write_latents_csv};
use dlgg::io::{
    file_digest, load_csv, read_draws, read_edges_csv, write_dense_csv, write_draws,
    write_edges_csv, write_matrix_csv, write_trace_csv, Manifest,
};
use dlgg::model::HyperParams;
use dlgg::rng::RngStream;
use dlgg::select::{default_delta, inclusion, recovery_metrics, select_graph, EdgeSet};
use dlgg::synthetic::{gen_data, gen_precision, Structure, TruthSpec};
use dlgg::validate::{validate_distributions, validate_prior_concentration};
use dlgg::{PosteriorSamples64, ScatterMatrix64, SymMatrix64};

#[derive(Parser)]
#[command(
    name = "dlgg",
    version,
    about = "Sparse precision-matrix (Gaussian graphical model) estimation \
             under a Dirichlet-Laplace shrinkage prior"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a sparse PD truth matrix and Gaussian data drawn from it.
    Generate(GenerateArgs),
    /// Run the block Gibbs sampler on a CSV data set.
    Fit(FitArgs),
    /// Threshold posterior draws into an estimated edge set.
    Select(SelectArgs),
    /// Posterior mean, chain diagnostics, and recovery metrics.
    Summary(SummaryArgs),
    /// Run the sampler and prior validation suites (exit 0 iff all pass).
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureKind {
    Banded,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    /// Dimension of the precision matrix.
    #[arg(long)]
    p: usize,
    /// Number of observations.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    structure: StructureKind,
    /// Band width for the banded structure.
    #[arg(long, default_value_t = 1)]
    bandwidth: usize,
    /// Off-diagonal value for the banded structure.
    #[arg(long, default_value_t = 0.5)]
    value: f64,
    /// Number of edges for the random structure.
    #[arg(long, default_value_t = 4)]
    edges: usize,
    /// Magnitude range for random edges.
    #[arg(long, default_value_t = 0.3)]
    mag_lo: f64,
    #[arg(long, default_value_t = 0.7)]
    mag_hi: f64,
    /// Extra diagonal mass (banded default 0, random default 0.5).
    #[arg(long)]
    diag_boost: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV (optional header row; columns are mean-centered).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Dirichlet concentration: "1/p2", "1/nu", or a number.
    #[arg(long, default_value = "1/p2")]
    a: String,
    /// Number of chains (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Max chains run concurrently (0 = one thread per chain).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Visit columns in a fresh random order each sweep.
    #[arg(long, default_value_t = false)]
    random_scan: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    /// Fit output directory (reads <dir>/draws.bin).
    #[arg(long)]
    samples: PathBuf,
    /// Support threshold; alternative to --s-guess.
    #[arg(long, conflicts_with = "s_guess")]
    delta: Option<f64>,
    /// Assumed sparsity: sets delta = s_guess / p^2.
    #[arg(long)]
    s_guess: Option<usize>,
    /// Inclusion-frequency cutoff.
    #[arg(long, default_value_t = 0.5)]
    cutoff: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SummaryArgs {
    /// Fit output directory (reads draws.bin and per-chain traces).
    #[arg(long)]
    samples: PathBuf,
    /// Truth edge list CSV for recovery metrics.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, conflicts_with = "s_guess")]
    delta: Option<f64>,
    #[arg(long)]
    s_guess: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    cutoff: f64,
    /// Output directory (defaults to the samples directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Monte Carlo sample count for the prior concentration check.
    #[arg(long, default_value_t = 40_000)]
    prior_samples: usize,
    /// Also write the report as plain text and key=value files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Removes registered outputs if the command fails before disarming.
struct OutputGuard {
    paths: Vec<PathBuf>,
    armed: bool,
}

impl OutputGuard {
    fn new() -> Self {
        OutputGuard {
            paths: Vec::new(),
            armed: true,
        }
    }

    fn track(&mut self, p: impl Into<PathBuf>) -> PathBuf {
        let p = p.into();
        self.paths.push(p.clone());
        p
    }

    fn disarm(&mut self) {
        self.armed = false;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if self.armed {
            for p in &self.paths {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))
}

fn base_manifest(command: String) -> Manifest {
    let mut m = Manifest::new();
    m.set("tool", "dlgg");
    m.set("tool_version", env!("CARGO_PKG_VERSION"));
    m.set("command", command);
    m
}

fn parse_concentration(spec: &str, p: usize) -> Result<f64, Error> {
    match spec {
        "1/p2" => Ok(1.0 / (p * p) as f64),
        "1/nu" => Ok(1.0 / dlgg::edge::edge_count(p) as f64),
        other => other.parse::<f64>().map_err(|_| {
            Error::InvalidConfig(format!(
                "--a must be \"1/p2\", \"1/nu\", or a number, got '{other}'"
            ))
        }),
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Error> {
    let start = Instant::now();
    let diag_boost = args.diag_boost.unwrap_or(match args.structure {
        StructureKind::Banded => 0.0,
        StructureKind::Random => 0.5,
    });
    let (structure, structure_echo) = match args.structure {
        StructureKind::Banded => (
            Structure::Banded {
                bandwidth: args.bandwidth,
                value: args.value,
            },
            format!(
                "--structure banded --bandwidth {} --value {}",
                args.bandwidth, args.value
            ),
        ),
        StructureKind::Random => (
            Structure::Random {
                s_p: args.edges,
                mag_lo: args.mag_lo,
                mag_hi: args.mag_hi,
            },
            format!(
                "--structure random --edges {} --mag-lo {} --mag-hi {}",
                args.edges, args.mag_lo, args.mag_hi
            ),
        ),
    };
    let spec = TruthSpec {
        p: args.p,
        structure,
        diag_boost,
    };
    let mut rng = RngStream::new(args.seed);
    let (omega, support) = gen_precision(&spec, &mut rng)?;
    let data = gen_data(&omega, args.n, &mut rng)?;

    ensure_dir(&args.out_dir)?;
    let mut guard = OutputGuard::new();
    let omega_path = guard.track(args.out_dir.join("omega_true.csv"));
    let edges_path = guard.track(args.out_dir.join("edges_true.csv"));
    let data_path = guard.track(args.out_dir.join("data.csv"));
    let manifest_path = guard.track(args.out_dir.join("manifest.txt"));

    write_matrix_csv(&omega_path, omega.as_sym())?;
    write_edges_csv(&edges_path, &support)?;
    write_dense_csv(&data_path, &data, None)?;

    let command = format!(
        "generate --p {} --n {} {structure_echo} --diag-boost {diag_boost} --seed {} --out-dir {}",
        args.p,
        args.n,
        args.seed,
        args.out_dir.display()
    );
    let mut m = base_manifest(command);
    m.set("seed", args.seed);
    m.set("p", args.p);
    m.set("n", args.n);
    m.set("true_edges", support.len());
    m.set("data_digest", file_digest(&data_path)?);
    m.set("duration_ms", start.elapsed().as_millis());
    m.write(&manifest_path)?;
    guard.disarm();
    println!(
        "generated p={} n={} with {} true edges into {}",
        args.p,
        args.n,
        support.len(),
        args.out_dir.display()
    );
    Ok(())
}

/// Run chains on a bounded worker pool; results come back in chain order
/// regardless of scheduling.
fn run_chains_concurrently(
    cfgs: &[ChainConfig<f64>],
    scatter: &ScatterMatrix64,
    threads: usize,
) -> Vec<Result<PosteriorSamples64, Error>> {
    let workers = if threads == 0 {
        cfgs.len()
    } else {
        threads.min(cfgs.len())
    };
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<PosteriorSamples64, Error>>>> =
        (0..cfgs.len()).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= cfgs.len() {
                    break;
                }
                let result = run_chain(&cfgs[k], scatter);
                *slots[k].lock().expect("slot lock") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("slot lock").expect("slot filled"))
        .collect()
}

fn cmd_fit(args: &FitArgs) -> Result<(), Error> {
    let start = Instant::now();
    if args.chains == 0 {
        return Err(Error::InvalidConfig("need at least one chain".into()));
    }
    let dataset = load_csv(&args.data)?;
    let scatter = dataset.scatter()?;
    let p = dataset.p();
    let a = parse_concentration(&args.a, p)?;
    let hp = HyperParams::new(p, a)?;

    let cfgs: Vec<ChainConfig<f64>> = (0..args.chains)
        .map(|c| {
            let mut cfg = ChainConfig::new(
                args.iters,
                args.burn_in,
                args.thin,
                args.seed + c as u64,
                hp,
            );
            if args.random_scan {
                cfg.scan = ScanOrder::RandomScan;
            }
            cfg
        })
        .collect();
    cfgs[0].validate()?;

    ensure_dir(&args.out_dir)?;
    let chains: Vec<PosteriorSamples64> =
        run_chains_concurrently(&cfgs, &scatter, args.threads)
            .into_iter()
            .collect::<Result<_, _>>()?;

    let mut guard = OutputGuard::new();
    for (c, samples) in chains.iter().enumerate() {
        let dir = args.out_dir.join(format!("chain_{c:02}"));
        ensure_dir(&dir)?;
        write_draws(guard.track(dir.join("draws.bin")), &samples.draws)?;
        write_trace_csv(
            guard.track(dir.join("logpost.csv")),
            "log_posterior",
            &samples.log_posterior,
        )?;
        write_latents_csv(guard.track(dir.join("latents.csv")), &samples.latent_traces)?;
    }
    let kept_per_chain: Vec<usize> = chains.iter().map(|c| c.n_draws()).collect();
    let psrf = if chains.len() >= 2 {
        Some(dlgg::diagnostics::psrf(
            &chains[0].log_posterior[args.burn_in..],
            &chains[1].log_posterior[args.burn_in..],
        )?)
    } else {
        None
    };
    let merged = PosteriorSamples::merge(chains)?;
    write_draws(guard.track(args.out_dir.join("draws.bin")), &merged.draws)?;

    let mut summary = String::new();
    summary.push_str(&format!(
        "chains={} draws_per_chain={kept_per_chain:?} total_draws={}\n",
        args.chains,
        merged.n_draws()
    ));
    if let Some(r) = psrf {
        summary.push_str(&format!("psrf_log_posterior={r}\n"));
    }
    let sweeps_ok = merged.accept_diag.iter().filter(|&&ok| ok).count();
    summary.push_str(&format!(
        "pd_sweeps={sweeps_ok}/{}\n",
        merged.accept_diag.len()
    ));
    std::fs::write(guard.track(args.out_dir.join("fit_summary.txt")), &summary)
        .map_err(|e| Error::Io(e.to_string()))?;

    let command = format!(
        "fit --data {} --iters {} --burn-in {} --thin {} --seed {} --a {} --chains {} --threads {}{} --out-dir {}",
        args.data.display(),
        args.iters,
        args.burn_in,
        args.thin,
        args.seed,
        args.a,
        args.chains,
        args.threads,
        if args.random_scan { " --random-scan" } else { "" },
        args.out_dir.display()
    );
    let mut m = base_manifest(command);
    m.set("data", args.data.display());
    m.set("data_digest", file_digest(&args.data)?);
    m.set("centering", "column means subtracted");
    m.set("p", p);
    m.set("n", dataset.n());
    m.set("iters", args.iters);
    m.set("burn_in", args.burn_in);
    m.set("thin", args.thin);
    m.set("seed", args.seed);
    m.set("a", a);
    m.set("omega_floor", hp.omega_floor());
    m.set("chains", args.chains);
    m.set(
        "scan",
        if args.random_scan { "random" } else { "systematic" },
    );
    m.set("duration_ms", start.elapsed().as_millis());
    m.write(guard.track(args.out_dir.join("manifest.txt")))?;
    guard.disarm();
    println!(
        "fit {} chains x {} sweeps (p={p}, n={}) -> {} draws in {}",
        args.chains,
        args.iters,
        dataset.n(),
        merged.n_draws(),
        args.out_dir.display()
    );
    Ok(())
}

fn read_merged_draws(samples_dir: &Path) -> Result<(PosteriorSamples64, Manifest), Error> {
    let draws = read_draws(samples_dir.join("draws.bin"))?;
    let manifest = Manifest::read(samples_dir.join("manifest.txt"))?;
    let p = draws[0].dim();
    let n_data: usize = manifest.get("n").and_then(|v| v.parse().ok()).unwrap_or(0);
    Ok((
        PosteriorSamples {
            p,
            n_data,
            draws,
            latent_traces: Vec::new(),
            accept_diag: Vec::new(),
            log_posterior: Vec::new(),
        },
        manifest,
    ))
}

fn resolve_delta(
    delta: Option<f64>,
    s_guess: Option<usize>,
    p: usize,
    truth: Option<&EdgeSet>,
) -> Result<f64, Error> {
    if let Some(d) = delta {
        if d <= 0.0 {
            return Err(Error::InvalidConfig("--delta must be > 0".into()));
        }
        return Ok(d);
    }
    if let Some(s) = s_guess {
        return default_delta(p, s);
    }
    if let Some(t) = truth {
        if !t.is_empty() {
            return default_delta(p, t.len());
        }
    }
    Err(Error::InvalidConfig(
        "need --delta or --s-guess to threshold the support".into(),
    ))
}

fn cmd_select(args: &SelectArgs) -> Result<(), Error> {
    let start = Instant::now();
    let (samples, fit_manifest) = read_merged_draws(&args.samples)?;
    let delta = resolve_delta(args.delta, args.s_guess, samples.p, None)?;
    let incl = inclusion(&samples, delta)?;
    let est = select_graph(&incl, args.cutoff)?;

    ensure_dir(&args.out)?;
    let mut guard = OutputGuard::new();
    // inclusion frequencies as a full symmetric matrix with zero diagonal
    let p = samples.p;
    let mut freq_m = SymMatrix64::zeros(p)?;
    for e in dlgg::edge::edges(p) {
        freq_m.set(e.i(), e.j(), incl.freq(e));
    }
    write_matrix_csv(guard.track(args.out.join("inclusion.csv")), &freq_m)?;
    write_edges_csv(guard.track(args.out.join("edges_selected.csv")), &est)?;

    let command = format!(
        "select --samples {} --delta {delta} --cutoff {} --out {}",
        args.samples.display(),
        args.cutoff,
        args.out.display()
    );
    let mut m = base_manifest(command);
    m.set("samples", args.samples.display());
    m.set("delta", delta);
    m.set("cutoff", args.cutoff);
    m.set("n_draws", samples.n_draws());
    m.set("selected_edges", est.len());
    if let Some(seed) = fit_manifest.get("seed") {
        m.set("fit_seed", seed);
    }
    m.set("duration_ms", start.elapsed().as_millis());
    m.write(guard.track(args.out.join("manifest.txt")))?;
    guard.disarm();
    println!(
        "selected {} edges at delta={delta}, cutoff={} -> {}",
        est.len(),
        args.cutoff,
        args.out.display()
    );
    Ok(())
}

fn cmd_summary(args: &SummaryArgs) -> Result<(), Error> {
    let start = Instant::now();
    let (merged, fit_manifest) = read_merged_draws(&args.samples)?;
    let p = merged.p;
    let out_dir = args.out_dir.clone().unwrap_or_else(|| args.samples.clone());
    ensure_dir(&out_dir)?;

    // mixing diagnostics come from chain 0 (autocorrelation is a per-chain
    // notion); the posterior mean uses every draw
    let burn_in: usize = fit_manifest
        .get("burn_in")
        .and_then(|v| v.parse().ok())
        .unwrap_or(0);
    let chain0_dir = args.samples.join("chain_00");
    let chain0 = PosteriorSamples {
        p,
        n_data: merged.n_data,
        draws: read_draws(chain0_dir.join("draws.bin"))?,
        latent_traces: read_latents_csv(chain0_dir.join("latents.csv"))?,
        accept_diag: Vec::new(),
        log_posterior: Vec::new(),
    };
    let log0 = read_trace_csv(chain0_dir.join("logpost.csv"))?;
    let post_burn: Vec<f64> = log0[burn_in.min(log0.len())..].to_vec();
    let other_post: Option<Vec<f64>> = read_trace_csv(args.samples.join("chain_01/logpost.csv"))
        .ok()
        .map(|t| t[burn_in.min(t.len())..].to_vec());
    let report = diagnostics_report(&chain0, &post_burn, other_post.as_deref(), 1)?;
    let max_abs_offdiag = merged
        .draws
        .iter()
        .map(|d| d.as_sym().max_abs_offdiag())
        .fold(0.0f64, f64::max);

    let mean = merged.posterior_mean()?;
    let mut guard = OutputGuard::new();
    write_matrix_csv(guard.track(out_dir.join("posterior_mean.csv")), &mean)?;

    let mut kv = Manifest::new();
    kv.set("n_draws", merged.n_draws());
    kv.set("ess_log_posterior", report.ess_log_posterior.ess);
    kv.set("ess_tau", report.ess_tau.ess);
    for (e, est) in &report.ess_edges {
        kv.set(&format!("ess_omega_{}_{}", e.i() + 1, e.j() + 1), est.ess);
    }
    kv.set("log_posterior_mean", report.trace_summary.mean);
    kv.set("log_posterior_sd", report.trace_summary.sd);
    kv.set("max_abs_offdiag", max_abs_offdiag);
    if let Some(r) = report.psrf {
        kv.set("psrf_log_posterior", r);
    }

    let mut text = String::new();
    text.push_str(&format!("draws: {} (all chains)\n", merged.n_draws()));
    text.push_str(&format!(
        "log posterior (chain 0): mean {:.4}, sd {:.4}, quantiles {:?}\n",
        report.trace_summary.mean, report.trace_summary.sd, report.trace_summary.quantiles
    ));
    text.push_str(&format!(
        "ess (chain 0): log_posterior {:.1}, tau {:.1}\n",
        report.ess_log_posterior.ess, report.ess_tau.ess
    ));
    if let Some(r) = report.psrf {
        text.push_str(&format!("psrf (two chains): {r:.4}\n"));
    }
    text.push_str(&format!(
        "max |omega_ij| over draws: {max_abs_offdiag:.6} (no truncation applied)\n"
    ));

    if let Some(truth_path) = &args.truth {
        let truth = read_edges_csv(truth_path, p)?;
        let delta = resolve_delta(args.delta, args.s_guess, p, Some(&truth))?;
        let incl = inclusion(&merged, delta)?;
        let est = select_graph(&incl, args.cutoff)?;
        let metrics = recovery_metrics::<f64>(&est, &truth)?;
        kv.set("delta", delta);
        kv.set("cutoff", args.cutoff);
        kv.set("tpr", metrics.tpr);
        kv.set("fpr", metrics.fpr);
        kv.set("mcc", metrics.mcc);
        text.push_str(&format!(
            "recovery vs {} (delta={delta}, cutoff={}): tpr {:.4}, fpr {:.4}, mcc {:.4}\n",
            truth_path.display(),
            args.cutoff,
            metrics.tpr,
            metrics.fpr,
            metrics.mcc
        ));
    }

    kv.write(guard.track(out_dir.join("summary.kv")))?;
    std::fs::write(guard.track(out_dir.join("summary.txt")), &text)
        .map_err(|e| Error::Io(e.to_string()))?;

    let command = format!(
        "summary --samples {}{}{}{} --cutoff {} --out-dir {}",
        args.samples.display(),
        match &args.truth {
            Some(t) => format!(" --truth {}", t.display()),
            None => String::new(),
        },
        match args.delta {
            Some(d) => format!(" --delta {d}"),
            None => String::new(),
        },
        match args.s_guess {
            Some(s) => format!(" --s-guess {s}"),
            None => String::new(),
        },
        args.cutoff,
        out_dir.display()
    );
    let mut m = base_manifest(command);
    m.set("samples", args.samples.display());
    m.set("duration_ms", start.elapsed().as_millis());
    // named so that summarizing into the fit directory (the default) does
    // not clobber the fit's own manifest
    m.write(guard.track(out_dir.join("summary_manifest.txt")))?;
    guard.disarm();
    print!("{text}");
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<bool, Error> {
    let mut report = validate_distributions(args.seed);
    report.extend(validate_prior_concentration(
        args.seed,
        &[5, 10, 20],
        args.prior_samples,
    ));
    println!("{report}");
    if let Some(dir) = &args.out_dir {
        ensure_dir(dir)?;
        std::fs::write(dir.join("validate_report.txt"), format!("{report}\n"))
            .map_err(|e| Error::Io(e.to_string()))?;
        let mut kv = Manifest::new();
        kv.set("seed", args.seed);
        kv.set("checks", report.checks.len());
        kv.set("failed", report.failures().count());
        for c in &report.checks {
            let key = c.name.replace([' ', '='], "_");
            kv.set(&key, format!("{}|observed={}|expected={}", c.pass, c.observed, c.expected));
        }
        kv.write(dir.join("validate_report.kv"))?;
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Generate(args) => cmd_generate(args),
        Cmd::Fit(args) => cmd_fit(args),
        Cmd::Select(args) => cmd_select(args),
        Cmd::Summary(args) => cmd_summary(args),
        Cmd::Validate(args) => {
            return match cmd_validate(args) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
