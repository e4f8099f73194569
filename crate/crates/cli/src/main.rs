//! `nlft`: command-line front end for the scattering, expansion,
//! Hausdorff–Young and Gaussian-distance experiments.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlft_core::functionals::{expansion_report, ExpansionOptions};
use nlft_core::gaussians::{dist_p, DistOptions};
use nlft_core::hy::{counterexample_search, small_potential_sweep, HYOptions, SearchFamily, SearchOptions};
use nlft_core::potential::{check_hypotheses, HypothesisConfig};
use nlft_core::suite::{run_suite, SuiteConfig};
use nlft_core::{io, Exec, IntervalSet, PiecewisePotential, ScatterOptions, SpectralGrid, C64};
use serde::Serialize;

use config::{RunConfig, Table};

#[derive(Parser)]
#[command(name = "nlft", version, about = "SU(1,1) nonlinear Fourier transform experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; a `<out>.config.json` sidecar records the resolved
    /// configuration. Without it the result goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs every sweep sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Negative control: flip the sign of a boundary phase in the transform.
    #[arg(long, global = true)]
    inject_phase_bug: bool,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Scattering data (or |f̂| and ℱ⋆) on the ξ-grid, as CSV.
    Transform,
    /// The invariant suite; exit 1 if any check fails.
    Verify,
    /// Hausdorff–Young ratios of c·f over the configured amplitudes.
    Sweep,
    /// Seeded annealing search for large ‖(log|a|²)^{1/2}‖_q / ‖f̂‖_q.
    Search,
    /// Upper bound on the L^p distance from f to the Gaussians.
    Dist,
    /// Terms of the expansion of log|a|² on the ξ-grid, as CSV.
    Expansion,
    /// The three small-potential hypotheses for f and a set S.
    Hypotheses,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Search => "search",
            Command::Dist => "dist",
            Command::Expansion => "expansion",
            Command::Hypotheses => "hypotheses",
        }
    }
}

enum Failure {
    Check(String),
    Usage(String),
}

impl From<nlft_core::Error> for Failure {
    fn from(e: nlft_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    command: &'a str,
    version: &'a str,
    threads: Option<usize>,
    inject_phase_bug: bool,
    config: &'a RunConfig,
}

struct Ctx {
    cfg: RunConfig,
    command: Command,
    threads: Option<usize>,
    phase_bug: bool,
    exec: Exec,
}

impl Ctx {
    fn potential(&self) -> Result<PiecewisePotential, Failure> {
        match &self.cfg.potential {
            Some(p) => Ok(io::read_potential(p)?),
            None => Ok(PiecewisePotential::constant(0.0, 1.0, C64::new(1.0, 0.0))?),
        }
    }

    fn grid(&self) -> Result<SpectralGrid, Failure> {
        Ok(SpectralGrid::new(self.cfg.grid.xi_max, self.cfg.grid.n)?)
    }

    fn emit(&self, content: &str) -> Result<(), Failure> {
        let Some(out) = &self.cfg.out else {
            print!("{content}");
            return Ok(());
        };
        write(out, content)?;
        let prov = Provenance {
            command: self.command.name(),
            version: env!("CARGO_PKG_VERSION"),
            threads: self.threads,
            inject_phase_bug: self.phase_bug,
            config: &self.cfg,
        };
        let mut sidecar = out.as_os_str().to_owned();
        sidecar.push(".config.json");
        write(Path::new(&sidecar), &(serde_json::to_string_pretty(&prov).expect("config serializes") + "\n"))
    }
}

fn write(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn cmd_transform(ctx: &Ctx) -> Result<(), Failure> {
    let f = ctx.potential()?;
    let grid = ctx.grid()?;
    let csv = match ctx.cfg.transform.table {
        Table::Scattering => {
            let opts = ScatterOptions { exec: ctx.exec, phase_fault: ctx.phase_bug, ..Default::default() };
            io::transform_csv(&nlft_core::scattering::nlft_with(&f, &grid, &opts))
        }
        Table::Linear => io::linear_csv(&f, &grid.nodes(), ctx.cfg.transform.fstar_refine)?,
    };
    ctx.emit(&csv)
}

fn cmd_verify(ctx: &Ctx) -> Result<(), Failure> {
    let v = &ctx.cfg.verify;
    let cfg = SuiteConfig {
        seed: ctx.cfg.seed,
        potentials: v.potentials,
        xi_count: v.xi_count,
        heavy_potentials: v.heavy_potentials,
        plancherel_potentials: v.plancherel_potentials,
        phase_fault: ctx.phase_bug,
        exec: ctx.exec,
        ..Default::default()
    };
    let rep = run_suite(&cfg)?;
    ctx.emit(&rep.render())?;
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("verify failed: {}", rep.failures().join(", "))))
    }
}

fn cmd_sweep(ctx: &Ctx) -> Result<(), Failure> {
    let shape = ctx.potential()?;
    let opts = HYOptions { rtol: ctx.cfg.rtol, exec: ctx.exec, ..Default::default() };
    let rep = small_potential_sweep(&shape, ctx.cfg.p, &ctx.cfg.sweep, &opts)?;
    ctx.emit(&io::sweep_csv(&rep))?;
    eprintln!(
        "eps_hat={} (intercept={}, r2={}) eps_lower={} gap_slope={} min_altineq_slack={}",
        rep.eps_hat,
        rep.deficit_fit.intercept,
        rep.deficit_fit.r_squared,
        rep.eps_lower,
        rep.gap_slope.slope,
        rep.min_altineq_slack
    );
    if rep.all_deficits_positive {
        Ok(())
    } else {
        Err(Failure::Check("sweep: some deficit is not positive".into()))
    }
}

fn cmd_search(ctx: &Ctx) -> Result<(), Failure> {
    let s = &ctx.cfg.search;
    let family = SearchFamily { layers: s.layers, width: s.width, max_abs: s.max_abs, l1_floor: s.l1_floor };
    let mut opts =
        SearchOptions { restarts: s.restarts, temperature: s.temperature, step: s.step, ..Default::default() };
    opts.hy.rtol = s.rtol;
    let rep = counterexample_search(ctx.cfg.p, s.iterations, ctx.cfg.seed, &family, &opts, ctx.exec)?;
    eprintln!("best rho={}", rep.best_rho);
    ctx.emit(&json(&rep))
}

fn cmd_dist(ctx: &Ctx) -> Result<(), Failure> {
    let f = ctx.potential()?;
    let opts = DistOptions {
        starts: ctx.cfg.dist.starts,
        max_evals: ctx.cfg.dist.max_evals,
        seed: ctx.cfg.seed,
        exec: ctx.exec,
    };
    let r = dist_p(&f, ctx.cfg.p, &opts)?;
    ctx.emit(&(io::dist_json(&r) + "\n"))
}

fn cmd_expansion(ctx: &Ctx) -> Result<(), Failure> {
    let f = ctx.potential()?;
    let opts = ExpansionOptions {
        tol: ctx.cfg.expansion.tol,
        fstar_refine: ctx.cfg.expansion.fstar_refine,
        direct: false,
        exec: ctx.exec,
    };
    let rep = expansion_report(&f, &ctx.grid()?.nodes(), &opts)?;
    ctx.emit(&io::expansion_csv(&rep))?;
    let (mq, me) = rep.domination_margins();
    eprintln!("identity_error={} margin_q={mq} margin_e={me}", rep.max_identity_error());
    if mq >= 0.0 && me >= 0.0 {
        Ok(())
    } else {
        Err(Failure::Check("expansion: domination bound violated".into()))
    }
}

fn cmd_hypotheses(ctx: &Ctx) -> Result<(), Failure> {
    let f = ctx.potential()?;
    let h = &ctx.cfg.hypotheses;
    let set = match &h.set {
        Some(p) => io::read_intervals(p)?,
        None => match f.support() {
            Some((a, b)) => IntervalSet::new(vec![(a, b)])?,
            None => IntervalSet::empty(),
        },
    };
    let hc = HypothesisConfig { p: ctx.cfg.p, a: h.a, lambda: h.lambda, delta: h.delta };
    let rep = check_hypotheses(&f, &set, &hc)?;
    ctx.emit(&json(&rep))?;
    if rep.all() {
        Ok(())
    } else {
        Err(Failure::Check("hypotheses: not all three hold".into()))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.validate().map_err(Failure::Usage)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let exec = if cli.threads == Some(1) { Exec::Sequential } else { Exec::default() };
    let ctx = Ctx { cfg, command: cli.command, threads: cli.threads, phase_bug: cli.inject_phase_bug, exec };
    match cli.command {
        Command::Transform => cmd_transform(&ctx),
        Command::Verify => cmd_verify(&ctx),
        Command::Sweep => cmd_sweep(&ctx),
        Command::Search => cmd_search(&ctx),
        Command::Dist => cmd_dist(&ctx),
        Command::Expansion => cmd_expansion(&ctx),
        Command::Hypotheses => cmd_hypotheses(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
