//! The `fdkp` command line.
//!
//! Exit codes: 0 success, 1 failed check or other error, 2 invalid
//! configuration, 3 solver failure (the stage is named on standard error).

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fdkp::experiments::{
    dispersion_csv, export_ground_state, export_outcome, export_reduction, run_eps_sweep,
};
use fdkp::minimizer::{
    gaussian_init, minimize_ground_state, newton_polish_fdkp, random_init, DescentOptions,
    NewtonOptions,
};
use fdkp::reduction::residual_report;
use fdkp::{Error, Field};

pub use config::{CliConfig, Init, OUT_ENV};

#[derive(Parser, Debug)]
#[command(name = "fdkp", version, about = "FDKP and DS solitary-wave solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Command {
    /// Linear speed c(omega) with its minimum
    Dispersion,
    /// DS ground state
    SolveDs,
    /// FDKP solitary wave at one eps
    SolveFdkp,
    /// eps sweep against the DS reference
    Sweep,
    /// Property suite
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dispersion => "dispersion",
            Command::SolveDs => "solve-ds",
            Command::SolveFdkp => "solve-fdkp",
            Command::Sweep => "sweep",
            Command::Check => "check",
        }
    }
}

/// Overrides; every flag wins over the config file.
#[derive(Args, Debug, Default)]
pub struct Flags {
    /// Config file of `key = value` lines
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `$FDKP_OUT/<command>`)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Comma-separated, strictly decreasing
    #[arg(long, global = true)]
    pub eps: Option<String>,
    /// Envelope grid size in both directions
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub nx: Option<usize>,
    #[arg(long, global = true)]
    pub ny: Option<usize>,
    #[arg(long, global = true)]
    pub lx: Option<f64>,
    #[arg(long, global = true)]
    pub ly: Option<f64>,
    /// delta = factor * omega0
    #[arg(long, global = true)]
    pub delta_factor: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub teps_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub newton_tol: Option<f64>,
    /// shifted or literal
    #[arg(long, global = true)]
    pub picard: Option<String>,
    /// zero-mass or axis
    #[arg(long, global = true)]
    pub zero_mode: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub omega_max: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// gaussian or random (seeded)
    #[arg(long, global = true)]
    pub init: Option<String>,
    /// solve-fdkp: lift the projected DS state without minimizing
    #[arg(long, global = true)]
    pub skip_descent: bool,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut push = |k: &'static str, x: Option<String>| {
            if let Some(x) = x {
                v.push((k, x));
            }
        };
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        push("jobs", self.jobs.map(|x| x.to_string()));
        push("beta", self.beta.map(|x| format!("{x:?}")));
        push("eps", self.eps.clone());
        push("n", self.n.map(|x| x.to_string()));
        push("ds_nx", self.nx.map(|x| x.to_string()));
        push("ds_ny", self.ny.map(|x| x.to_string()));
        push("lx", self.lx.map(|x| format!("{x:?}")));
        push("ly", self.ly.map(|x| format!("{x:?}")));
        push("delta_factor", self.delta_factor.map(|x| format!("{x:?}")));
        push("ds_tol", self.tol.map(|x| format!("{x:?}")));
        push("teps_tol", self.teps_tol.map(|x| format!("{x:?}")));
        push("max_iter", self.max_iter.map(|x| x.to_string()));
        push("newton_tol", self.newton_tol.map(|x| format!("{x:?}")));
        push("picard", self.picard.clone());
        push("zero_mode", self.zero_mode.clone());
        push("seed", self.seed.map(|x| x.to_string()));
        push("omega_max", self.omega_max.map(|x| format!("{x:?}")));
        push("samples", self.samples.map(|x| x.to_string()));
        push("init", self.init.clone());
        push("skip_descent", self.skip_descent.then(|| "true".to_string()));
        v
    }
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Config(Error),
    Solver { stage: &'static str, error: Error },
    /// Some sweep rows failed; `stage` is the first failing one.
    Rows { stage: &'static str, failed: usize, total: usize },
    Checks(usize),
    Other(Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solver { .. } | Failure::Rows { .. } => 3,
            Failure::Checks(_) | Failure::Other(_) => 1,
        }
    }

    fn at(stage: &'static str) -> impl Fn(Error) -> Failure {
        move |e| {
            if e.is_solver_failure() {
                Failure::Solver { stage, error: e }
            } else {
                Failure::from(e)
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::GridMismatch(_) | Error::Support(_) => {
                Failure::Config(e)
            }
            e if e.is_solver_failure() => Failure::Solver {
                stage: "solve",
                error: e,
            },
            e => Failure::Other(e),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) | Failure::Other(e) => write!(f, "{e}"),
            Failure::Solver { stage, error } => write!(f, "stage {stage} failed: {error}"),
            Failure::Rows { stage, failed, total } => {
                write!(f, "{failed} of {total} rows failed, first at stage {stage}")
            }
            Failure::Checks(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("fdkp {}: {f}", cli.command.name());
            f.code()
        }
    }
}

pub fn resolve(cli: &Cli) -> Result<CliConfig, Failure> {
    let mut cfg = CliConfig::new(cli.command.name());
    if let Some(path) = &cli.flags.config {
        cfg.apply_file(path).map_err(|e| match e {
            Error::Io { .. } => Failure::Config(Error::InvalidConfig(e.to_string())),
            e => Failure::Config(e),
        })?;
    }
    for (k, v) in cli.flags.pairs() {
        cfg.set(k, &v).map_err(Failure::Config)?;
    }
    cfg.finish().map_err(Failure::Config)?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    let cfg = resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Failure::Config(Error::InvalidConfig(e.to_string())))?;
    pool.install(|| match cli.command {
        Command::Dispersion => dispersion(&cfg),
        Command::SolveDs => solve_ds(&cfg),
        Command::SolveFdkp => solve_fdkp(&cfg),
        Command::Sweep => sweep(&cfg),
        Command::Check => check(&cfg),
    })
}

fn prepare(cfg: &CliConfig) -> Result<PathBuf, Failure> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).map_err(|e| Failure::Other(Error::io(&dir, e)))?;
    write(&dir.join("manifest.txt"), &manifest_head(cfg))?;
    Ok(dir)
}

fn manifest_head(cfg: &CliConfig) -> String {
    format!("{}tool = fdkp {}\n", cfg.describe(), env!("CARGO_PKG_VERSION"))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Other(Error::io(path, e)))
}

fn append(path: &Path, text: &str) -> Result<(), Failure> {
    let mut f = fs::OpenOptions::new()
        .append(true)
        .open(path)
        .map_err(|e| Failure::Other(Error::io(path, e)))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Failure::Other(Error::io(path, e)))
}

fn dispersion(cfg: &CliConfig) -> Result<(), Failure> {
    let text = dispersion_csv(cfg.sweep.beta, cfg.omega_max, cfg.samples)?;
    let dir = prepare(cfg)?;
    let path = dir.join("dispersion.csv");
    write(&path, &text)?;
    let last = text.lines().last().unwrap_or_default();
    println!("minimum (omega0, c0, flag) = {last}");
    println!("wrote {}", path.display());
    Ok(())
}

fn descent(cfg: &CliConfig, tol: f64) -> DescentOptions {
    DescentOptions {
        tol,
        max_iter: cfg.sweep.max_iter,
        ..DescentOptions::default()
    }
}

fn solve_ds(cfg: &CliConfig) -> Result<(), Failure> {
    let ds = cfg.sweep.ds_problem()?;
    let dir = prepare(cfg)?;
    let init = match cfg.init {
        Init::Gaussian => gaussian_init(&ds),
        Init::Random => random_init(&ds, cfg.sweep.seed),
    };
    let gs = minimize_ground_state(&ds, &init, &descent(cfg, cfg.sweep.ds_tol))
        .map_err(Failure::at("minimize T0"))?;
    export_ground_state(&gs, &dir, "zeta0")?;
    let mut m = String::new();
    let _ = writeln!(m, "ds_lx_resolved = {:?}", ds.grid.lx);
    let _ = writeln!(m, "tau0 = {:?}", gs.report.t0);
    let _ = writeln!(m, "iterations = {}", gs.iterations);
    let _ = writeln!(m, "grad = {:e}", gs.grad_norm);
    let _ = writeln!(m, "converged = {}", gs.converged);
    append(&dir.join("manifest.txt"), &m)?;
    println!(
        "tau0 = {:.16e} after {} iterations (gradient {:.2e})",
        gs.report.t0, gs.iterations, gs.grad_norm
    );
    if !gs.converged {
        return Err(Failure::Solver {
            stage: "minimize T0",
            error: Error::MaxIterExceeded {
                stage: "minimize T0",
                iterations: gs.iterations,
            },
        });
    }
    Ok(())
}

fn solve_fdkp(cfg: &CliConfig) -> Result<(), Failure> {
    let eps = cfg.single_eps()?;
    let ds = cfg.sweep.ds_problem()?;
    let p = cfg.sweep.fdkp_problem(&ds, eps)?;
    let dir = prepare(cfg)?;
    let manifest = dir.join("manifest.txt");
    let gs0 = minimize_ground_state(&ds, &gaussian_init(&ds), &descent(cfg, cfg.sweep.ds_tol))
        .map_err(Failure::at("minimize T0"))?;
    export_ground_state(&gs0, &dir, "zeta0")?;
    let mut z = gs0.zeta.values.clone();
    p.map.project(&mut z);
    let _ = append(
        &manifest,
        &format!(
            "ds_lx_resolved = {:?}\nfdkp_grid = {}x{}\ntau0 = {:?}\n",
            ds.grid.lx,
            p.grid().nx,
            p.grid().ny,
            gs0.report.t0
        ),
    );
    if !cfg.skip_descent {
        let gs = minimize_ground_state(&p, &z, &descent(cfg, cfg.sweep.teps_tol))
            .map_err(Failure::at("minimize T_eps"))?;
        export_ground_state(&gs, &dir, "zeta_eps")?;
        append(
            &manifest,
            &format!("tau_eps = {:?}\ndescent_iterations = {}\n", gs.report.t_eps, gs.iterations),
        )?;
        if !gs.converged {
            return Err(Failure::Solver {
                stage: "minimize T_eps",
                error: Error::MaxIterExceeded {
                    stage: "minimize T_eps",
                    iterations: gs.iterations,
                },
            });
        }
        z = gs.zeta.values;
    }
    let st = p.lift(&z).map_err(Failure::at("lift"))?;
    export_reduction(&p, &st, &dir.join("lift"))?;
    let before = residual_report(&p, &st.u);
    let nopts = NewtonOptions {
        tol: cfg.sweep.newton_tol,
        ..NewtonOptions::default()
    };
    let (u, hist) = newton_polish_fdkp(&p, &st.u, &nopts).map_err(Failure::at("newton polish"))?;
    let after = residual_report(&p, &u);
    let uf = Field::spectral(p.grid(), u).tagged_real().to_physical();
    fdkp::io::write_field(&dir.join("u.fdkp1"), &uf)?;
    append(
        &manifest,
        &format!(
            "contraction = {:?}\npicard_iterations = {}\nresidual_before_polish = {:e}\n\
             newton_steps = {}\nresidual = {:e}\n",
            st.contraction_ratio,
            st.iterations,
            before.total,
            hist.len() - 1,
            after.total
        ),
    )?;
    println!(
        "eps {eps}: contraction {:.4}, residual {:.2e} -> {:.2e} in {} Newton steps",
        st.contraction_ratio,
        before.total,
        after.total,
        hist.len() - 1
    );
    Ok(())
}

fn sweep(cfg: &CliConfig) -> Result<(), Failure> {
    cfg.sweep.ds_problem()?;
    let dir = cfg.out_dir();
    let out = run_eps_sweep(&cfg.sweep).map_err(Failure::at("minimize T0"))?;
    export_outcome(&out, &dir)?;
    append(&dir.join("manifest.txt"), &cfg.describe_run())?;
    for r in &out.rows {
        println!(
            "eps {:<6} tau_eps {:.10e} ds_dist_h1 {:.3e} contraction {:.3}",
            r.eps, r.tau_eps, r.ds_dist_h1, r.contraction
        );
    }
    println!("wrote {}", dir.join("sweep.csv").display());
    if let Some(f) = out.failures.first() {
        for f in &out.failures {
            eprintln!("fdkp sweep: eps {} failed at stage {}: {}", f.eps, f.stage, f.message);
        }
        return Err(Failure::Rows {
            stage: f.stage,
            failed: out.failures.len(),
            total: cfg.sweep.eps_list.len(),
        });
    }
    Ok(())
}

fn check(cfg: &CliConfig) -> Result<(), Failure> {
    let dir = prepare(cfg)?;
    let results = fdkp::checks::run_all();
    let mut text = String::new();
    for r in &results {
        let line = format!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
        println!("{line}");
        text.push_str(&line);
        text.push('\n');
    }
    write(&dir.join("check.txt"), &text)?;
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}
