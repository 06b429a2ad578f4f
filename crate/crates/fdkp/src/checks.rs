//! Property suite run by `fdkp check`.
//!
//! Every check is self-contained and cheap; the suite as a whole runs in a
//! few seconds on a single core.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::experiments::{ds_ground_state, SweepConfig, SweepRow, SWEEP_HEADER};
use crate::functionals::DsProblem;
use crate::io;
use crate::minimizer::{
    gaussian_init, nehari_root, newton_polish_fdkp, random_init, NewtonOptions, Objective,
};
use crate::reduction::{residual_report, FdkpProblem};
use crate::spectral::{dft_roundtrip, norm, Field, Grid2D, NormKind, C};
use crate::symbols::{find_min_speed, wave_speed, wave_speed_slope, ModelParams};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn outcome(name: &'static str, r: Result<(bool, String)>) -> CheckResult {
    match r {
        Ok((pass, detail)) => CheckResult { name, pass, detail },
        Err(e) => CheckResult {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn small_config() -> SweepConfig {
    SweepConfig {
        ds_nx: 32,
        ds_ny: 32,
        ..SweepConfig::default()
    }
}

/// Random band-limited envelope at half its DS Nehari amplitude.
fn envelope(ds: &DsProblem, seed: u64) -> Vec<C> {
    let z = random_init(ds, seed);
    let l = 0.5 * (ds.eval_q(&z) / (2.0 * ds.eval_s(&z))).sqrt();
    z.iter().map(|v| v * l).collect()
}

fn random_physical(g: &Arc<Grid2D>, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Field::from_fn(g, |_, _| C::new(0.0, 0.0));
    for v in f.values.iter_mut() {
        *v = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    f
}

fn check_transforms() -> Result<(bool, String)> {
    let g = Grid2D::new(64, 32, 3.0, 5.0)?;
    let f = random_physical(&g, 11);
    let back = dft_roundtrip(&f)?;
    let err = f
        .values
        .iter()
        .zip(&back.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let phys: f64 = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.hx() * g.hy();
    let spec = g.l2_sq(&f.to_spectral().values);
    let parseval = rel(spec, phys);
    Ok((
        err < 1e-13 && parseval < 1e-13,
        format!("roundtrip {err:.2e}, parseval {parseval:.2e}"),
    ))
}

fn check_speed() -> Result<(bool, String)> {
    let (w0, c0) = find_min_speed(0.2)?;
    let small = (wave_speed(0.2, 1e-8)? - 1.0).abs();
    let slope = wave_speed_slope(0.2, w0).abs();
    let sides = wave_speed(0.2, w0 - 1e-2)? > c0 && wave_speed(0.2, w0 + 1e-2)? > c0;
    let p = ModelParams::new(0.2)?;
    Ok((
        small < 1e-6 && slope < 1e-10 && sides && p.a3 == p.c0 / 4.0,
        format!("|c(0)-1| {small:.1e}, |c'(w0)| {slope:.1e}, minimum {sides}"),
    ))
}

fn check_symbol_table() -> Result<(bool, String)> {
    let cfg = small_config();
    let ds = cfg.ds_problem()?;
    let p = cfg.fdkp_problem(&ds, 0.1)?;
    let sym = &p.sym;
    let g = &sym.grid;
    let n_min = sym.n.iter().cloned().fold(f64::INFINITY, f64::min);
    let carrier = sym.carrier.map(|c| sym.n[c]);
    let mirrored = (0..g.len()).all(|n| sym.chi_plus[n] == sym.chi_minus[g.mirror(n)]);
    let disjoint = (0..g.len()).all(|n| !(sym.chi_plus[n] && sym.chi_minus[n]));
    Ok((
        n_min >= 0.0 && carrier == Some(0.0) && mirrored && disjoint && sym.n_min > 0.0,
        format!(
            "min n {n_min:.2e}, n off the bi-disc >= {:.3e}, masks mirrored {mirrored}",
            sym.n_min
        ),
    ))
}

fn check_nehari_algebra() -> Result<(bool, String)> {
    let cfg = small_config();
    let ds = cfg.ds_problem()?;
    let g = &ds.grid;
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let z = envelope(&ds, seed);
        let (q, s, grad) = ds.value_grad(&z);
        let t = q - s;
        let dt = g.inner(&grad, &z);
        worst = worst
            .max(rel(dt, 2.0 * q - 4.0 * s))
            .max(rel(0.5 * q + 0.25 * dt, t))
            .max(rel(s + 0.5 * dt, t));
        let l0 = (q / (2.0 * s)).sqrt();
        let root = nehari_root(|l| ds.ray_slope(&z, l), 1.0)?;
        worst = worst.max(rel(root, l0));
        let zs: Vec<C> = z.iter().map(|v| v * l0).collect();
        worst = worst.max(rel(ds.eval_t0(&zs), q * q / (4.0 * s)));
    }
    Ok((worst < 1e-10, format!("worst relative defect {worst:.2e}")))
}

/// Central differences along a random direction against `<grad, h>`.
fn directional_defect(
    value: impl Fn(&[C]) -> Result<f64>,
    grad: &[C],
    g: &Grid2D,
    z: &[C],
    h: &[C],
) -> Result<f64> {
    let t = 1e-4;
    let shifted = |s: f64| -> Vec<C> { z.iter().zip(h).map(|(a, b)| a + s * b).collect() };
    let fd = (value(&shifted(t))? - value(&shifted(-t))?) / (2.0 * t);
    let an = g.inner(grad, h);
    Ok(rel(fd, an))
}

fn check_gradients() -> Result<(bool, String)> {
    let cfg = small_config();
    let ds = cfg.ds_problem()?;
    let p = cfg.fdkp_problem(&ds, 0.1)?;
    let g = ds.grid.clone();
    let (mut w0, mut we): (f64, f64) = (0.0, 0.0);
    for seed in 0..3 {
        let z = envelope(&ds, 100 + seed);
        let h = envelope(&ds, 200 + seed);
        let grad = ds.grad_t0(&z);
        w0 = w0.max(directional_defect(|v| Ok(ds.eval_t0(v)), &grad, &g, &z, &h)?);
        let (mut ze, mut he) = (z.clone(), h.clone());
        p.map.project(&mut ze);
        p.map.project(&mut he);
        let ge = p.grad_teps(&ze)?;
        we = we.max(directional_defect(|v| p.value(v), &ge, &g, &ze, &he)?);
    }
    Ok((
        w0 < 1e-6 && we < 1e-6,
        format!("T0 {w0:.2e}, Teps(0.1) {we:.2e}"),
    ))
}

fn check_scaling(p: &FdkpProblem, z: &[C]) -> Result<(bool, String)> {
    let tilde = p.map.scale(z)?;
    let back = p.map.unscale(&tilde)?;
    let inv = back
        .iter()
        .zip(z)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let half = rel(p.grid().l2_sq(&tilde).sqrt(), 0.5 * p.ds.grid.l2_sq(z).sqrt());
    Ok((
        inv < 1e-14 && half < 1e-12,
        format!("inverse {inv:.1e}, |u+~| = |zeta|/2 to {half:.1e}"),
    ))
}

fn check_reduction(p: &FdkpProblem, z: &[C]) -> Result<(bool, String)> {
    let st = p.lift(z)?;
    let g = p.grid();
    let defect = p.fixed_point_defect(&st)?;
    let split = rel(p.split_value(&st), p.eval_i(&st.u));
    let overlap = g.inner(&st.u1, &st.u2).abs() / (g.l2_sq(&st.u1) * g.l2_sq(&st.u2)).sqrt();
    let res = residual_report(p, &st.u);
    let scale = p.x_norm(&st.u1).max(1.0);
    let pass = defect < 1e-11 * scale && split < 1e-11 && overlap < 1e-14 && res.z2 < 1e-10;
    Ok((
        pass,
        format!(
            "ratio {:.3}, defect {defect:.1e}, split {split:.1e}, <u1,u2> {overlap:.1e}, Z2 residual {:.1e}",
            st.contraction_ratio, res.z2
        ),
    ))
}

fn check_polish(p: &FdkpProblem, z: &[C]) -> Result<(bool, String)> {
    let st = p.lift(z)?;
    let (u, hist) = newton_polish_fdkp(p, &st.u, &NewtonOptions::default())?;
    let r = residual_report(p, &u);
    Ok((
        r.total < 1e-10,
        format!(
            "residual {:.1e} -> {:.1e} in {} steps",
            hist[0],
            r.total,
            hist.len() - 1
        ),
    ))
}

fn check_ground_state(ds: &DsProblem) -> Result<(bool, String)> {
    let gs = ds_ground_state(ds, 1e-8, 3000)?;
    let a = ds.params.a1.min(ds.params.a2).min(ds.params.a3);
    let h1 = norm(&gs.zeta, NormKind::H1)?;
    let bound = gs.report.t0 >= 0.25 * a * h1 * h1;
    let nehari = gs.report.nehari_residual.abs() / gs.report.q;
    Ok((
        gs.converged && bound && nehari < 1e-10,
        format!(
            "T0 {:.12e}, gradient {:.1e}, Nehari {nehari:.1e}, {} iterations",
            gs.report.t0, gs.grad_norm, gs.iterations
        ),
    ))
}

fn check_formats() -> Result<(bool, String)> {
    let g = Grid2D::new(16, 8, 1.5, 2.5)?;
    let f = random_physical(&g, 5);
    let dir = std::env::temp_dir().join(format!("fdkp-check-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| crate::Error::io(&dir, e))?;
    let path = dir.join("f.fdkp1");
    io::write_field(&path, &f)?;
    let back = io::read_field(&path, None)?;
    let same_field = back.values == f.values && back.rep == f.rep && *back.grid == *g;
    let row = SweepRow {
        eps: 0.1,
        tau_eps: 0.0179,
        tau0: 0.0188,
        ds_dist_h1: 1.0 / 3.0,
        remainder_ratio: 2.5e-3,
        fdkp_residual: 1e-12,
        contraction: 0.25,
        uc_x_norm: 7e-3,
        u_inf: 0.05,
        u_l2: 1.25,
    };
    let csv = crate::experiments::export(&[row.clone()], &dir)?;
    let rows = crate::experiments::read_sweep_csv(&csv)?;
    let header = std::fs::read_to_string(&csv)
        .map(|t| t.lines().next() == Some(SWEEP_HEADER))
        .unwrap_or(false);
    let _ = std::fs::remove_dir_all(&dir);
    let same_row = rows.len() == 1 && rows[0] == row;
    Ok((
        same_field && same_row && header,
        format!("field {same_field}, sweep row {same_row}"),
    ))
}

/// Runs the whole suite.
pub fn run_all() -> Vec<CheckResult> {
    let mut out = vec![
        outcome("transforms", check_transforms()),
        outcome("wave speed minimum", check_speed()),
        outcome("symbol table", check_symbol_table()),
        outcome("Nehari algebra", check_nehari_algebra()),
        outcome("gradients", check_gradients()),
        outcome("file formats", check_formats()),
    ];
    let cfg = SweepConfig::default();
    let setup = cfg.ds_problem().and_then(|ds| {
        let p = cfg.fdkp_problem(&ds, 0.1)?;
        Ok((ds, p))
    });
    match setup {
        Ok((ds, p)) => {
            out.push(outcome("DS ground state", check_ground_state(&ds)));
            let mut z = match ds_ground_state(&ds, 1e-8, 3000) {
                Ok(gs) => gs.zeta.values,
                Err(_) => gaussian_init(&ds),
            };
            p.map.project(&mut z);
            out.push(outcome("DS scaling", check_scaling(&p, &z)));
            out.push(outcome("reduction at eps 0.1", check_reduction(&p, &z)));
            out.push(outcome("Newton polish at eps 0.1", check_polish(&p, &z)));
        }
        Err(e) => out.push(CheckResult {
            name: "setup",
            pass: false,
            detail: e.to_string(),
        }),
    }
    out
}
