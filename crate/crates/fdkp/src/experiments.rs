//! The eps sweep: DS reference state, `T_eps` ground states, lifts, polish and export.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::functionals::DsProblem;
use crate::io::write_field;
use crate::minimizer::{
    align, gaussian_init, minimize_ground_state, newton_polish_fdkp, q_distance, DescentOptions,
    GroundStateReport, NewtonOptions,
};
use crate::reduction::{aligned_half_length, fdkp_grid, residual_report, FdkpProblem, PicardForm};
use crate::spectral::{norm, Field, Grid2D, NormKind, Rep, C};
use crate::symbols::{ModelParams, ZeroMode};

pub const SWEEP_HEADER: &str =
    "eps,tau_eps,tau0,ds_dist_h1,remainder_ratio,fdkp_residual,contraction,uc_x_norm,u_inf,u_l2";

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub beta: f64,
    pub eps_list: Vec<f64>,
    pub ds_nx: usize,
    pub ds_ny: usize,
    /// Requested DS half-lengths; `lx` is raised to the nearest commensurate value.
    pub lx: f64,
    pub ly: f64,
    /// `delta = delta_factor * omega0`.
    pub delta_factor: f64,
    pub harmonics: f64,
    pub ds_tol: f64,
    pub teps_tol: f64,
    pub max_iter: usize,
    pub newton_tol: f64,
    pub picard: PicardForm,
    pub zero_mode: ZeroMode,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            beta: 0.2,
            eps_list: vec![0.2, 0.1, 0.05],
            ds_nx: 128,
            ds_ny: 128,
            lx: 2.3,
            ly: 8.5,
            delta_factor: 0.25,
            harmonics: 2.0,
            ds_tol: 1e-8,
            teps_tol: 1e-8,
            max_iter: 3000,
            newton_tol: 1e-10,
            picard: PicardForm::Shifted,
            zero_mode: ZeroMode::ZeroMassLimit,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidConfig("eps values must be positive".into()));
        }
        if self.eps_list.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::InvalidConfig("eps list must be strictly decreasing".into()));
        }
        if !(self.lx > 0.0 && self.ly > 0.0) {
            return Err(Error::InvalidConfig("box lengths must be positive".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        let mut p = ModelParams::new(self.beta)?;
        p.zero_mode = self.zero_mode;
        let w0 = p.omega0;
        p.with_delta(self.delta_factor * w0)
    }

    /// DS problem on the commensurate box.
    pub fn ds_problem(&self) -> Result<DsProblem> {
        self.validate()?;
        let p = self.params()?;
        let lx = aligned_half_length(self.lx, p.omega0, &self.eps_list)?;
        let grid = Grid2D::new(self.ds_nx, self.ds_ny, lx, self.ly)?;
        DsProblem::new(&p, &grid)
    }

    pub fn fdkp_problem(&self, ds: &DsProblem, eps: f64) -> Result<FdkpProblem> {
        let grid = fdkp_grid(&ds.grid, &ds.params, eps, self.harmonics)?;
        let mut p = FdkpProblem::new(ds, &grid, eps)?;
        p.opts.form = self.picard;
        Ok(p)
    }

    /// Fully resolved configuration as `key = value` lines.
    pub fn describe(&self) -> String {
        let eps: Vec<String> = self.eps_list.iter().map(|e| format!("{e:?}")).collect();
        format!(
            "beta = {:?}\neps = {}\nds_nx = {}\nds_ny = {}\nlx = {:?}\nly = {:?}\ndelta_factor = {:?}\n\
             harmonics = {:?}\nds_tol = {:?}\nteps_tol = {:?}\nmax_iter = {}\nnewton_tol = {:?}\n\
             picard = {}\nzero_mode = {}\nseed = {}\n",
            self.beta,
            eps.join(","),
            self.ds_nx,
            self.ds_ny,
            self.lx,
            self.ly,
            self.delta_factor,
            self.harmonics,
            self.ds_tol,
            self.teps_tol,
            self.max_iter,
            self.newton_tol,
            match self.picard {
                PicardForm::Shifted => "shifted",
                PicardForm::Literal => "literal",
            },
            match self.zero_mode {
                ZeroMode::ZeroMassLimit => "zero-mass",
                ZeroMode::AxisLimit => "axis",
            },
            self.seed
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub tau_eps: f64,
    pub tau0: f64,
    pub ds_dist_h1: f64,
    pub remainder_ratio: f64,
    pub fdkp_residual: f64,
    pub contraction: f64,
    pub uc_x_norm: f64,
    pub u_inf: f64,
    pub u_l2: f64,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            self.eps,
            self.tau_eps,
            self.tau0,
            self.ds_dist_h1,
            self.remainder_ratio,
            self.fdkp_residual,
            self.contraction,
            self.uc_x_norm,
            self.u_inf,
            self.u_l2
        )
    }

    pub fn parse(line: &str) -> Result<Self> {
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidConfig(format!("bad sweep row {line:?}: {e}")))?;
        if v.len() != 10 {
            return Err(Error::InvalidConfig(format!(
                "sweep row has {} columns, expected 10",
                v.len()
            )));
        }
        Ok(Self {
            eps: v[0],
            tau_eps: v[1],
            tau0: v[2],
            ds_dist_h1: v[3],
            remainder_ratio: v[4],
            fdkp_residual: v[5],
            contraction: v[6],
            uc_x_norm: v[7],
            u_inf: v[8],
            u_l2: v[9],
        })
    }

    pub fn is_finite(&self) -> bool {
        [
            self.eps,
            self.tau_eps,
            self.tau0,
            self.ds_dist_h1,
            self.remainder_ratio,
            self.fdkp_residual,
            self.contraction,
            self.uc_x_norm,
            self.u_inf,
            self.u_l2,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Extra per-row telemetry that does not go into the CSV.
#[derive(Clone, Debug)]
pub struct RowDetail {
    pub eps: f64,
    pub fdkp_nx: usize,
    pub fdkp_ny: usize,
    pub descent_iterations: usize,
    pub picard_iterations: usize,
    pub residual_before_polish: f64,
    pub z2_residual_before_polish: f64,
    pub newton_steps: usize,
    pub boundary_ratio: f64,
    pub seconds: f64,
    pub zeta: Field,
    pub u: Field,
}

#[derive(Clone, Debug)]
pub struct RowFailure {
    pub eps: f64,
    pub stage: &'static str,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub config: SweepConfig,
    pub ds_lx: f64,
    pub reference: GroundStateReport,
    pub rows: Vec<SweepRow>,
    pub details: Vec<RowDetail>,
    pub failures: Vec<RowFailure>,
    pub seconds: f64,
}

/// `max |z|` on the outer 10% frame over `max |z|`.
pub fn boundary_ratio(g: &Grid2D, z: &[C]) -> f64 {
    let p = g.inverse(z);
    let (fx, fy) = ((g.nx / 10).max(1), (g.ny / 10).max(1));
    let (mut frame, mut all): (f64, f64) = (0.0, 0.0);
    for q in 0..g.ny {
        for pi in 0..g.nx {
            let v = p[g.idx(pi, q)].norm();
            all = all.max(v);
            if pi < fx || pi >= g.nx - fx || q < fy || q >= g.ny - fy {
                frame = frame.max(v);
            }
        }
    }
    if all == 0.0 {
        0.0
    } else {
        frame / all
    }
}

/// DS ground state from the default Gaussian.
pub fn ds_ground_state(ds: &DsProblem, tol: f64, max_iter: usize) -> Result<GroundStateReport> {
    let opts = DescentOptions {
        tol,
        max_iter,
        ..DescentOptions::default()
    };
    let gs = minimize_ground_state(ds, &gaussian_init(ds), &opts)?;
    if !gs.converged {
        return Err(Error::MaxIterExceeded {
            stage: "minimize T0",
            iterations: max_iter,
        });
    }
    Ok(gs)
}

/// Result of one eps stage.
struct Stage {
    row: SweepRow,
    detail: RowDetail,
}

fn run_row(
    cfg: &SweepConfig,
    ds: &DsProblem,
    zeta0: &[C],
    tau0: f64,
    warm: &[C],
    eps: f64,
) -> std::result::Result<Stage, RowFailure> {
    let t = Instant::now();
    let fail = |stage: &'static str| move |e: Error| RowFailure {
        eps,
        stage,
        message: e.to_string(),
    };
    let p = cfg.fdkp_problem(ds, eps).map_err(fail("setup"))?;
    let mut init = warm.to_vec();
    p.map.project(&mut init);
    let opts = DescentOptions {
        tol: cfg.teps_tol,
        max_iter: cfg.max_iter,
        ..DescentOptions::default()
    };
    let gs = minimize_ground_state(&p, &init, &opts).map_err(fail("minimize T_eps"))?;
    if !gs.converged {
        return Err(RowFailure {
            eps,
            stage: "minimize T_eps",
            message: format!("gradient {:e} above tolerance", gs.grad_norm),
        });
    }
    let z = &gs.zeta.values;
    let st = p.lift(z).map_err(fail("lift"))?;
    let before = residual_report(&p, &st.u);
    let nopts = NewtonOptions {
        tol: cfg.newton_tol,
        ..NewtonOptions::default()
    };
    let (u, hist) = newton_polish_fdkp(&p, &st.u, &nopts).map_err(fail("newton polish"))?;
    let after = residual_report(&p, &u);
    let h1 = norm(&Field::spectral(&ds.grid, z.clone()), NormKind::H1).map_err(fail("norms"))?;
    let u_field = Field::spectral(p.grid(), u).tagged_real();
    let row = SweepRow {
        eps,
        tau_eps: gs.report.t_eps,
        tau0,
        ds_dist_h1: q_distance(ds, zeta0, z),
        remainder_ratio: gs.report.e_eps.abs() / (eps.sqrt() * h1 * h1),
        fdkp_residual: after.total,
        contraction: st.contraction_ratio,
        uc_x_norm: p.x_norm(&st.uc),
        u_inf: norm(&u_field, NormKind::Linf).map_err(fail("norms"))?,
        u_l2: norm(&u_field, NormKind::L2).map_err(fail("norms"))?,
    };
    let detail = RowDetail {
        eps,
        fdkp_nx: p.grid().nx,
        fdkp_ny: p.grid().ny,
        descent_iterations: gs.iterations,
        picard_iterations: st.iterations,
        residual_before_polish: before.total,
        z2_residual_before_polish: before.z2,
        newton_steps: hist.len() - 1,
        boundary_ratio: boundary_ratio(&ds.grid, z),
        seconds: t.elapsed().as_secs_f64(),
        zeta: gs.zeta.clone(),
        u: u_field,
    };
    Ok(Stage { row, detail })
}

/// Runs the sweep; only a failure of the `eps = 0` reference aborts it.
pub fn run_eps_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let start = Instant::now();
    let ds = cfg.ds_problem()?;
    let reference = ds_ground_state(&ds, cfg.ds_tol, cfg.max_iter)?;
    let zeta0 = reference.zeta.values.clone();
    let tau0 = reference.report.t0;
    let mut warm = zeta0.clone();
    let mut rows = Vec::new();
    let mut details = Vec::new();
    let mut failures = Vec::new();
    for &eps in &cfg.eps_list {
        match run_row(cfg, &ds, &zeta0, tau0, &warm, eps) {
            Ok(stage) => {
                warm = align(&ds.grid, &zeta0, &stage.detail.zeta.values).0;
                rows.push(stage.row);
                details.push(stage.detail);
            }
            Err(f) => failures.push(f),
        }
    }
    Ok(SweepOutcome {
        config: cfg.clone(),
        ds_lx: ds.grid.lx,
        reference,
        rows,
        details,
        failures,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SWEEP_HEADER => {}
        other => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!("unexpected header {other:?}"),
            })
        }
    }
    lines.filter(|l| !l.is_empty()).map(SweepRow::parse).collect()
}

fn eps_tag(eps: f64) -> String {
    format!("{eps:?}").replace('.', "p")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `sweep.csv` alone.
pub fn export(rows: &[SweepRow], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("sweep.csv");
    write_text(&path, &sweep_csv(rows))?;
    Ok(path)
}

/// Writes the CSV, the per-eps fields and `manifest.txt`.
pub fn export_outcome(out: &SweepOutcome, dir: &Path) -> Result<()> {
    export(&out.rows, dir)?;
    write_field(&dir.join("zeta0.fdkp1"), &out.reference.zeta)?;
    let mut m = String::new();
    m.push_str(&out.config.describe());
    let _ = writeln!(m, "ds_lx_resolved = {:?}", out.ds_lx);
    let _ = writeln!(m, "tool = fdkp {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "tau0 = {:?}", out.reference.report.t0);
    let _ = writeln!(m, "reference_iterations = {}", out.reference.iterations);
    let _ = writeln!(m, "reference_grad = {:e}", out.reference.grad_norm);
    let ref_field = &out.reference.zeta;
    let _ = writeln!(
        m,
        "reference_boundary_ratio = {:e}",
        boundary_ratio(&ref_field.grid, &ref_field.values)
    );
    for d in &out.details {
        let tag = eps_tag(d.eps);
        write_field(&dir.join(format!("zeta_eps{tag}.fdkp1")), &d.zeta)?;
        write_field(&dir.join(format!("u_eps{tag}.fdkp1")), &d.u.to_physical())?;
        let _ = writeln!(
            m,
            "row {:?}: fdkp_grid = {}x{}, descent_iterations = {}, picard_iterations = {}, \
             residual_before_polish = {:e}, z2_residual_before_polish = {:e}, newton_steps = {}, \
             boundary_ratio = {:e}, seconds = {:.3}",
            d.eps,
            d.fdkp_nx,
            d.fdkp_ny,
            d.descent_iterations,
            d.picard_iterations,
            d.residual_before_polish,
            d.z2_residual_before_polish,
            d.newton_steps,
            d.boundary_ratio,
            d.seconds
        );
    }
    for f in &out.failures {
        let _ = writeln!(m, "failed {:?}: stage = {}, error = {}", f.eps, f.stage, f.message);
    }
    let _ = writeln!(m, "wall_seconds = {:.3}", out.seconds);
    write_text(&dir.join("manifest.txt"), &m)
}

/// Writes the components of a lift as FDKP1 files plus a JSON manifest.
pub fn export_reduction(p: &FdkpProblem, st: &crate::reduction::ReductionState, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for (name, f) in st.components() {
        let file = format!("{name}.fdkp1");
        write_field(&dir.join(&file), &f)?;
        files.push(file);
    }
    let defect = p.fixed_point_defect(st)?;
    let j = serde_json::json!({
        "eps": p.eps,
        "grid": [p.grid().nx, p.grid().ny, p.grid().lx, p.grid().ly],
        "iterations": st.iterations,
        "contraction_ratio": st.contraction_ratio,
        "residual_x": st.residual_x,
        "fixed_point_defect": defect,
        "ratios": st.ratios,
        "u1_x_norm": p.x_norm(&st.u1),
        "uq_x_norm": p.x_norm(&st.uq),
        "uc_x_norm": p.x_norm(&st.uc),
        "files": files,
    });
    let path = dir.join("reduction.json");
    let text = serde_json::to_string_pretty(&j).expect("json");
    write_text(&path, &text)
}

/// Ground-state summary row and field.
pub fn export_ground_state(gs: &GroundStateReport, dir: &Path, name: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_field(&dir.join(format!("{name}.fdkp1")), &gs.zeta)?;
    let text = format!(
        "{},lambda_star,iterations,shift_x,shift_y,phase\n{},{:?},{},{:?},{:?},{:?}\n",
        crate::functionals::FunctionalReport::CSV_HEADER,
        gs.report.csv_row(),
        gs.lambda_star,
        gs.iterations,
        gs.recenter_shift.0,
        gs.recenter_shift.1,
        gs.phase
    );
    write_text(&dir.join(format!("{name}.csv")), &text)
}

/// Envelope field on a physical grid helper used by exports.
pub fn spectral_field(g: &Arc<Grid2D>, v: Vec<C>) -> Field {
    Field {
        grid: g.clone(),
        values: v,
        rep: Rep::Spectral,
        real: false,
    }
}

pub const DISPERSION_HEADER: &str = "omega,c,is_minimum";

/// Samples of the linear speed followed by one marker row at `(omega0, c0)`.
pub fn dispersion_csv(beta: f64, omega_max: f64, samples: usize) -> Result<String> {
    let (rows, (w0, c0)) = crate::symbols::dispersion_table(beta, omega_max, samples)?;
    let mut s = String::from(DISPERSION_HEADER);
    s.push('\n');
    for (w, c) in rows {
        let _ = writeln!(s, "{w:?},{c:?},0");
    }
    let _ = writeln!(s, "{w0:?},{c0:?},1");
    Ok(s)
}

/// Parses [`dispersion_csv`] output into the samples and the marked minimum.
pub fn parse_dispersion_csv(text: &str) -> Result<(Vec<(f64, f64)>, (f64, f64))> {
    let bad = |msg: String| Error::InvalidConfig(format!("dispersion csv: {msg}"));
    let mut lines = text.lines();
    if lines.next() != Some(DISPERSION_HEADER) {
        return Err(bad("unexpected header".into()));
    }
    let mut rows = Vec::new();
    let mut marker = None;
    for line in lines.filter(|l| !l.is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(bad(format!("row {line:?}")));
        }
        let w: f64 = f[0].parse().map_err(|_| bad(format!("omega in {line:?}")))?;
        let c: f64 = f[1].parse().map_err(|_| bad(format!("c in {line:?}")))?;
        match f[2] {
            "0" => rows.push((w, c)),
            "1" if marker.is_none() => marker = Some((w, c)),
            _ => return Err(bad(format!("marker in {line:?}"))),
        }
    }
    Ok((rows, marker.ok_or_else(|| bad("no minimum row".into()))?))
}
