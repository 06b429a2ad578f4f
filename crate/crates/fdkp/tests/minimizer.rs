use fdkp::experiments::{ds_ground_state, SweepConfig};
use fdkp::minimizer::{
    align, centroid, gaussian_init, gmres, h1_distance, minimize_ground_state, nehari_root,
    newton_polish_fdkp, q_distance, random_init, DescentOptions, NewtonOptions,
};
use fdkp::{DsProblem, Error, C};
use proptest::prelude::*;

fn problem(n: usize) -> DsProblem {
    SweepConfig {
        ds_nx: n,
        ds_ny: n,
        ..SweepConfig::default()
    }
    .ds_problem()
    .unwrap()
}

fn bits(z: &[C]) -> Vec<(u64, u64)> {
    z.iter().map(|v| (v.re.to_bits(), v.im.to_bits())).collect()
}

#[test]
fn seeded_initial_data_is_reproducible() {
    let ds = problem(32);
    assert_eq!(bits(&random_init(&ds, 11)), bits(&random_init(&ds, 11)));
    assert_ne!(bits(&random_init(&ds, 11)), bits(&random_init(&ds, 12)));
}

#[test]
fn descent_values_do_not_increase() {
    let ds = problem(32);
    let gs = minimize_ground_state(&ds, &random_init(&ds, 2), &DescentOptions::default()).unwrap();
    assert!(gs.converged);
    for w in gs.values.windows(2) {
        assert!(w[1] <= w[0] + 1e-13 * w[0].abs(), "{} -> {}", w[0], w[1]);
    }
    assert_eq!(gs.values.len(), gs.iterations + 1);
    assert!(gs.nehari_residual.abs() < 1e-10 * gs.report.q);
}

#[test]
fn ground_state_is_gauged_and_maximal_on_its_ray() {
    let ds = problem(64);
    let gs = ds_ground_state(&ds, 1e-9, 3000).unwrap();
    let z = &gs.zeta.values;
    let (cx, cy) = centroid(&ds.grid, z);
    assert!(cx.abs() < 1e-10 && cy.abs() < 1e-10);
    let origin: C = z.iter().sum();
    assert!(origin.im.abs() < 1e-12 * origin.re && origin.re > 0.0);
    let t = ds.eval_t0(z);
    for f in [0.95, 1.05] {
        let w: Vec<C> = z.iter().map(|v| v * f).collect();
        assert!(ds.eval_t0(&w) < t);
    }
}

#[test]
fn zero_start_is_refused() {
    let ds = problem(16);
    let z = vec![C::new(0.0, 0.0); ds.grid.len()];
    assert!(matches!(
        minimize_ground_state(&ds, &z, &DescentOptions::default()),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn nehari_root_fails_without_a_sign_change() {
    assert!(nehari_root(|l| Ok(1.0 + l * l), 1.0).is_err());
    let l = nehari_root(|l| Ok(3.0 * l - 0.75 * l * l * l), 1.0).unwrap();
    assert!((l - 2.0).abs() < 1e-12);
}

#[test]
fn gmres_solves_a_nonsymmetric_tridiagonal_system() {
    let n = 40;
    let op = |v: &[C]| -> Vec<C> {
        (0..n)
            .map(|i| {
                let mut s = v[i] * 4.0;
                if i > 0 {
                    s += v[i - 1] * 1.5;
                }
                if i + 1 < n {
                    s -= v[i + 1];
                }
                s
            })
            .collect()
    };
    let x0: Vec<C> = (0..n).map(|i| C::new((i as f64).sin(), 0.1 * i as f64)).collect();
    let b = op(&x0);
    let (x, rel) = gmres(op, &b, 1e-13, 20, 400);
    assert!(rel < 1e-12);
    assert!(x.iter().zip(&x0).all(|(a, b)| (a - b).norm() < 1e-11));
}

#[test]
fn distances_vanish_on_the_orbit() {
    let ds = problem(64);
    let z = gaussian_init(&ds);
    let mut w: Vec<C> = z.iter().map(|v| v * C::from_polar(1.0, 1.1)).collect();
    ds.grid.translate(&mut w, 0.3, -1.2);
    assert!(q_distance(&ds, &z, &z) < 1e-12);
    let scale = ds.eval_q(&z).sqrt();
    assert!(q_distance(&ds, &z, &w) < 1e-10 * scale);
    assert!(h1_distance(&ds.grid, &z, &w) < 1e-10 * ds.grid.l2_sq(&z).sqrt());
}

#[test]
fn newton_takes_no_step_on_a_polished_lift() {
    let cfg = SweepConfig {
        ds_nx: 64,
        ds_ny: 64,
        ..SweepConfig::default()
    };
    let ds = cfg.ds_problem().unwrap();
    let p = cfg.fdkp_problem(&ds, 0.1).unwrap();
    let mut z = ds_ground_state(&ds, 1e-8, 3000).unwrap().zeta.values;
    p.map.project(&mut z);
    let st = p.lift(&z).unwrap();
    let (u, hist) = newton_polish_fdkp(&p, &st.u, &NewtonOptions::default()).unwrap();
    assert!(hist.len() > 1 && *hist.last().unwrap() < 1e-10);
    let (again, h2) = newton_polish_fdkp(&p, &u, &NewtonOptions::default()).unwrap();
    assert_eq!(h2.len(), 1);
    assert_eq!(bits(&again), bits(&u));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn align_recovers_shift_and_phase(
        tx in -0.8f64..0.8,
        ty in -3.0f64..3.0,
        phase in -3.0f64..3.0,
        seed in 0u64..100,
    ) {
        let ds = problem(64);
        let z = random_init(&ds, seed);
        let mut w: Vec<C> = z.iter().map(|v| v * C::from_polar(1.0, phase)).collect();
        ds.grid.translate(&mut w, tx, ty);
        let (a, (sx, sy, sp)) = align(&ds.grid, &z, &w);
        prop_assert!((sx + tx).abs() < 1e-8, "tau_x {} vs {}", sx, -tx);
        prop_assert!((sy + ty).abs() < 1e-8, "tau_y {} vs {}", sy, -ty);
        let dp = (sp + phase).rem_euclid(std::f64::consts::TAU);
        prop_assert!(dp.min(std::f64::consts::TAU - dp) < 1e-8);
        let d: Vec<C> = a.iter().zip(&z).map(|(x, y)| x - y).collect();
        prop_assert!(ds.grid.l2_sq(&d).sqrt() < 1e-8 * ds.grid.l2_sq(&z).sqrt());
    }
}
