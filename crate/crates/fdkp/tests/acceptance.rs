//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use fdkp::experiments::{export_outcome, run_eps_sweep, SweepConfig, SweepOutcome};
use fdkp::minimizer::{
    h1_distance, minimize_ground_state, nehari_root, newton_polish_fdkp, random_init,
    DescentOptions, NewtonOptions,
};
use fdkp::reduction::residual_report;
use fdkp::spectral::{norm, NormKind};
use fdkp::symbols::{wave_speed, wave_speed_slope};
use fdkp::{DsProblem, FdkpProblem, ModelParams, Objective, C};

const BETA: f64 = 0.2;
const SMALL_OMEGA_TOL: f64 = 1e-6;
const SLOPE_TOL: f64 = 1e-10;
const COEFF_TOL: f64 = 1e-6;
const GRAD_TOL: f64 = 1e-5;
const NEHARI_DT_TOL: f64 = 1e-12;
const NEHARI_ROOT_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-12;
const GS_GRAD_TOL: f64 = 1e-8;
const GS_VALUE_TOL: f64 = 1e-8;
const GS_DIST_TOL: f64 = 1e-6;
const CONTRACTION_MAX: f64 = 1.0 / 3.0;
const CERTIFICATE_TOL: f64 = 1e-12;
const POLISH_TOL: f64 = 1e-10;
const RANDOM_FIELDS: u64 = 20;

type Verdict = (bool, String);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Independent closed form of the linear speed.
fn speed_oracle(w: f64) -> f64 {
    ((1.0 + BETA * w * w) * w.tanh() / w).sqrt()
}

/// Golden-section minimum of the oracle on a bracket.
fn golden_minimum(mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if speed_oracle(c) < speed_oracle(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Five-point second difference of the oracle.
fn second_derivative_oracle(w: f64) -> f64 {
    let h = 1e-3;
    let f = speed_oracle;
    (-f(w + 2.0 * h) + 16.0 * f(w + h) - 30.0 * f(w) + 16.0 * f(w - h) - f(w - 2.0 * h))
        / (12.0 * h * h)
}

fn symbols() -> Verdict {
    let p = ModelParams::new(BETA).expect("params");
    let c_small = wave_speed(BETA, 1e-8).expect("speed");
    let slope = wave_speed_slope(BETA, p.omega0).abs();
    let sides = wave_speed(BETA, p.omega0 - 1e-2).unwrap() > p.c0
        && wave_speed(BETA, p.omega0 + 1e-2).unwrap() > p.c0;
    let w_star = golden_minimum(1.0, 3.0);
    let a2_err = (p.a2 - p.c0 / (4.0 * p.omega0 * p.omega0)).abs();
    let a1_err = (p.a1 - second_derivative_oracle(w_star) / 8.0).abs();
    let pass = (c_small - 1.0).abs() < SMALL_OMEGA_TOL
        && slope < SLOPE_TOL
        && sides
        && p.a3 == p.c0 / 4.0
        && a2_err < COEFF_TOL
        && a1_err < COEFF_TOL;
    (
        pass,
        format!(
            "|c(1e-8)-1| = {:.1e}, |c'(w0)| = {slope:.1e}, w0 = {:.12} (oracle {:.12}), \
             a3 = c0/4 {}, |a2 - c0/(4w0^2)| = {a2_err:.1e}, |a1 - c''/8| = {a1_err:.1e}",
            (c_small - 1.0).abs(),
            p.omega0,
            w_star,
            p.a3 == p.c0 / 4.0
        ),
    )
}

fn small_config() -> SweepConfig {
    SweepConfig {
        ds_nx: 32,
        ds_ny: 32,
        ..SweepConfig::default()
    }
}

/// Random envelope scaled to half of its DS Nehari amplitude.
fn random_field(ds: &DsProblem, seed: u64) -> Vec<C> {
    let z = random_init(ds, seed);
    let l = 0.5 * (ds.eval_q(&z) / (2.0 * ds.eval_s(&z))).sqrt();
    z.iter().map(|v| v * l).collect()
}

fn central_difference(f: impl Fn(&[C]) -> f64, z: &[C], h: &[C]) -> f64 {
    let t = 1e-4;
    let at = |s: f64| -> Vec<C> { z.iter().zip(h).map(|(a, b)| a + s * b).collect() };
    (f(&at(t)) - f(&at(-t))) / (2.0 * t)
}

fn gradients() -> Verdict {
    let cfg = small_config();
    let ds = cfg.ds_problem().expect("ds");
    let p = cfg.fdkp_problem(&ds, 0.1).expect("fdkp");
    let g = &ds.grid;
    let (mut worst0, mut worst_eps): (f64, f64) = (0.0, 0.0);
    for k in 0..RANDOM_FIELDS {
        let z = random_field(&ds, 1000 + k);
        let h = random_field(&ds, 2000 + k);
        let fd = central_difference(|v| ds.eval_t0(v), &z, &h);
        worst0 = worst0.max(rel(fd, g.inner(&ds.grad_t0(&z), &h)));
        let (mut ze, mut he) = (z, h);
        p.map.project(&mut ze);
        p.map.project(&mut he);
        match p.grad_teps(&ze) {
            Ok(ge) => {
                let fd = central_difference(|v| p.value(v).unwrap_or(f64::NAN), &ze, &he);
                worst_eps = worst_eps.max(rel(fd, g.inner(&ge, &he)));
            }
            Err(_) => worst_eps = f64::INFINITY,
        }
    }
    (
        worst0 < GRAD_TOL && worst_eps < GRAD_TOL,
        format!("{RANDOM_FIELDS} fields, worst relative error T0 {worst0:.1e}, Teps(0.1) {worst_eps:.1e}"),
    )
}

fn nehari_algebra() -> Verdict {
    let cfg = small_config();
    let ds = cfg.ds_problem().expect("ds");
    let g = &ds.grid;
    let (mut dt_err, mut root_err, mut value_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..RANDOM_FIELDS {
        let z = random_field(&ds, 3000 + k);
        let q = ds.eval_q(&z);
        let s = ds.eval_s(&z);
        dt_err = dt_err.max(rel(g.inner(&ds.grad_t0(&z), &z), 2.0 * q - 4.0 * s));
        let l0 = (q / (2.0 * s)).sqrt();
        let root = nehari_root(|l| ds.ray_slope(&z, l), 1.0).expect("root");
        root_err = root_err.max(rel(root, l0));
        let zl: Vec<C> = z.iter().map(|v| v * root).collect();
        value_err = value_err.max(rel(ds.eval_t0(&zl), q * q / (4.0 * s)));
    }
    (
        dt_err < NEHARI_DT_TOL && root_err < NEHARI_ROOT_TOL && value_err < NEHARI_ROOT_TOL,
        format!("dT(z)z {dt_err:.1e}, root {root_err:.1e}, T0(l* z) {value_err:.1e}"),
    )
}

fn identities() -> Verdict {
    let cfg = small_config();
    let ds = cfg.ds_problem().expect("ds");
    let g = &ds.grid;
    let (mut only_q, mut only_s): (f64, f64) = (0.0, 0.0);
    for k in 0..RANDOM_FIELDS {
        let z = random_field(&ds, 4000 + k);
        let t = ds.eval_t0(&z);
        let dt = g.inner(&ds.grad_t0(&z), &z);
        only_q = only_q.max(rel(0.5 * ds.eval_q(&z) + 0.25 * dt, t));
        only_s = only_s.max(rel(ds.eval_s(&z) + 0.5 * dt, t));
    }
    (
        only_q < IDENTITY_TOL && only_s < IDENTITY_TOL,
        format!("only Q {only_q:.1e}, only S {only_s:.1e}"),
    )
}

fn ds_ground_state() -> Verdict {
    let ds = SweepConfig::default().ds_problem().expect("ds");
    let opts = DescentOptions {
        tol: GS_GRAD_TOL,
        ..DescentOptions::default()
    };
    let run = |seed| minimize_ground_state(&ds, &random_init(&ds, seed), &opts);
    let (a, b) = match (run(1), run(2)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return (false, format!("descent failed: {e}")),
    };
    let g = &ds.grid;
    let dist = h1_distance(g, &a.zeta.values, &b.zeta.values);
    let dvalue = (a.report.t0 - b.report.t0).abs();
    let coeff = ds.params.a1.min(ds.params.a2).min(ds.params.a3);
    let bound = [&a, &b].iter().all(|gs| {
        let h1 = norm(&gs.zeta, NormKind::H1).expect("norm");
        gs.report.t0 >= 0.25 * coeff * h1 * h1
    });
    let pass = a.converged
        && b.converged
        && a.grad_norm < GS_GRAD_TOL
        && b.grad_norm < GS_GRAD_TOL
        && dvalue < GS_VALUE_TOL
        && dist < GS_DIST_TOL
        && bound;
    (
        pass,
        format!(
            "128x128, gradients {:.1e}/{:.1e}, T0 {:.12e} vs {:.12e}, aligned H1 distance {dist:.1e}, lower bound {bound}",
            a.grad_norm, b.grad_norm, a.report.t0, b.report.t0
        ),
    )
}

/// `zeta0` lifted through the reduction at each sweep eps.
struct Lifts {
    ratio_01: Option<f64>,
    certificate_01: Option<f64>,
    uc_norms: Vec<Option<f64>>,
    residuals: Vec<Option<f64>>,
    polished_01: Result<(f64, usize), String>,
    errors: Vec<String>,
}

fn lifts(cfg: &SweepConfig, zeta0: &[C]) -> Lifts {
    let ds = cfg.ds_problem().expect("ds");
    let mut out = Lifts {
        ratio_01: None,
        certificate_01: None,
        uc_norms: Vec::new(),
        residuals: Vec::new(),
        polished_01: Err("not run".into()),
        errors: Vec::new(),
    };
    for &eps in &cfg.eps_list {
        let p: FdkpProblem = cfg.fdkp_problem(&ds, eps).expect("fdkp");
        let mut z = zeta0.to_vec();
        p.map.project(&mut z);
        match p.lift(&z) {
            Ok(st) => {
                out.uc_norms.push(Some(p.x_norm(&st.uc)));
                out.residuals.push(Some(residual_report(&p, &st.u).total));
                if eps == 0.1 {
                    out.ratio_01 = Some(st.contraction_ratio);
                    let defect = p.fixed_point_defect(&st).expect("defect");
                    out.certificate_01 = Some(defect / p.x_norm(&st.u1));
                    out.polished_01 = newton_polish_fdkp(&p, &st.u, &NewtonOptions::default())
                        .map(|(u, h)| (residual_report(&p, &u).total, h.len() - 1))
                        .map_err(|e| e.to_string());
                }
            }
            Err(e) => {
                out.uc_norms.push(None);
                out.residuals.push(None);
                out.errors.push(format!("eps {eps}: {e}"));
                if eps == 0.1 {
                    out.polished_01 = Err(e.to_string());
                }
            }
        }
    }
    out
}

fn fmt_opt(v: &[Option<f64>]) -> String {
    v.iter()
        .map(|x| x.map_or("failed".to_string(), |x| format!("{x:.3e}")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn all_some(v: &[Option<f64>]) -> Option<Vec<f64>> {
    v.iter().copied().collect()
}

fn contraction(l: &Lifts) -> Verdict {
    let ratio_ok = l.ratio_01.is_some_and(|r| r < CONTRACTION_MAX);
    let cert_ok = l.certificate_01.is_some_and(|c| c < CERTIFICATE_TOL);
    let mono = all_some(&l.uc_norms).is_some_and(|v| strictly_decreasing(&v));
    (
        ratio_ok && cert_ok && mono,
        format!(
            "ratio at 0.1 = {:?} (< 1/3 required), certificate |uc - G(uc)|_X / |u1|_X = {:?}, \
             |uc|_X over eps: [{}]{}",
            l.ratio_01,
            l.certificate_01,
            fmt_opt(&l.uc_norms),
            if l.errors.is_empty() {
                String::new()
            } else {
                format!("; {}", l.errors.join("; "))
            }
        ),
    )
}

fn residual(l: &Lifts, sweep: &SweepOutcome) -> Verdict {
    let polished_ok = matches!(l.polished_01, Ok((r, _)) if r < POLISH_TOL);
    let rows: Vec<f64> = sweep.details.iter().map(|d| d.residual_before_polish).collect();
    let complete = rows.len() == sweep.config.eps_list.len();
    let mono = complete && strictly_decreasing(&rows);
    (
        polished_ok && mono,
        format!(
            "polished lift at 0.1: {:?}; unpolished sweep residuals {:?} over {} of {} rows",
            l.polished_01,
            rows,
            rows.len(),
            sweep.config.eps_list.len()
        ),
    )
}

fn sweep_summary(s: &SweepOutcome) -> String {
    let failed: Vec<String> = s
        .failures
        .iter()
        .map(|f| format!("eps {} at {}: {}", f.eps, f.stage, f.message))
        .collect();
    format!(
        "{} of {} rows completed{}",
        s.rows.len(),
        s.config.eps_list.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" ({})", failed.join("; "))
        }
    )
}

fn convergence(s: &SweepOutcome) -> Verdict {
    let complete = s.rows.len() == s.config.eps_list.len();
    let gaps: Vec<f64> = s.rows.iter().map(|r| (r.tau_eps - r.tau0).abs()).collect();
    let dists: Vec<f64> = s.rows.iter().map(|r| r.ds_dist_h1).collect();
    let ratios: Vec<f64> = s.rows.iter().map(|r| r.remainder_ratio).collect();
    let bounded = ratios.iter().all(|r| r.is_finite());
    let pass = complete && strictly_decreasing(&gaps) && strictly_decreasing(&dists) && bounded;
    (
        pass,
        format!(
            "{}; |tau_eps - tau0| {gaps:?}, distance {dists:?}, remainder ratio {ratios:?}, {:.1}s",
            sweep_summary(s),
            s.seconds
        ),
    )
}

fn amplitudes(s: &SweepOutcome) -> Verdict {
    let complete = s.rows.len() == s.config.eps_list.len();
    let inf: Vec<f64> = s.rows.iter().map(|r| r.u_inf).collect();
    // u1 = u+ + conj(u+) with |u+| = |zeta|/2, so |u|_L2 tends to |zeta0|_L2 / sqrt 2.
    let limit = norm(&s.reference.zeta, NormKind::L2).expect("norm") / 2f64.sqrt();
    let gaps: Vec<f64> = s.rows.iter().map(|r| (r.u_l2 - limit).abs()).collect();
    let pass = complete && strictly_decreasing(&inf) && strictly_decreasing(&gaps);
    (
        pass,
        format!(
            "{}; |u|_inf {inf:?}, ||u|_L2 - |zeta0|_L2/sqrt 2| {gaps:?}",
            sweep_summary(s)
        ),
    )
}

fn determinism(cfg: &SweepConfig) -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut csvs = Vec::new();
    let mut fields = Vec::new();
    for run in 0..2 {
        let out = run_eps_sweep(cfg).expect("sweep");
        let d = dir.path().join(format!("run{run}"));
        export_outcome(&out, &d).expect("export");
        csvs.push(std::fs::read(d.join("sweep.csv")).expect("read"));
        fields.push(std::fs::read(d.join("zeta0.fdkp1")).expect("read"));
    }
    let rows = String::from_utf8_lossy(&csvs[0]).lines().count() - 1;
    (
        csvs[0] == csvs[1] && fields[0] == fields[1],
        format!(
            "sweep.csv identical {} ({rows} data rows), zeta0.fdkp1 identical {}",
            csvs[0] == csvs[1],
            fields[0] == fields[1]
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut failures = 0;
    let mut report = |name: &str, (pass, detail): Verdict| {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            failures += 1;
        }
    };
    report("symbol correctness", symbols());
    report("gradient fidelity", gradients());
    report("Nehari algebra", nehari_algebra());
    report("identities (only Q)/(only S)", identities());
    report("DS ground state", ds_ground_state());

    let cfg = SweepConfig::default();
    let sweep = run_eps_sweep(&cfg).expect("the eps = 0 reference must succeed");
    let l = lifts(&cfg, &sweep.reference.zeta.values);
    report("contraction reduction", contraction(&l));
    report("full-equation residual", residual(&l, &sweep));
    report("convergence over the sweep", convergence(&sweep));
    report("amplitude and energy scalings", amplitudes(&sweep));
    report("determinism", determinism(&cfg));

    println!(
        "{failures} criteria failed, {:.1}s",
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
