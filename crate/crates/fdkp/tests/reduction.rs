use fdkp::experiments::{ds_ground_state, SweepConfig};
use fdkp::reduction::{
    aligned_half_length, fdkp_grid, residual_report, ReductionOptions, TildeDirection,
};
use fdkp::{DsProblem, Error, FdkpProblem, PicardForm, C};

fn setup(eps: f64) -> (DsProblem, FdkpProblem) {
    let cfg = SweepConfig {
        ds_nx: 64,
        ds_ny: 64,
        ..SweepConfig::default()
    };
    let ds = cfg.ds_problem().unwrap();
    let p = cfg.fdkp_problem(&ds, eps).unwrap();
    (ds, p)
}

fn projected_ground_state(ds: &DsProblem, p: &FdkpProblem) -> Vec<C> {
    let mut z = ds_ground_state(ds, 1e-8, 3000).unwrap().zeta.values;
    p.map.project(&mut z);
    z
}

fn scaled(z: &[C], l: f64) -> Vec<C> {
    z.iter().map(|v| v * l).collect()
}

#[test]
fn commensurate_box_and_grid_sizes() {
    let p = fdkp::ModelParams::new(0.2).unwrap().with_delta(0.25 * 1.8665694277372067).unwrap();
    let lx = aligned_half_length(2.3, p.omega0, &[0.2, 0.1, 0.05]).unwrap();
    assert!((lx - 2.356317236138154).abs() < 1e-12);
    let ds = fdkp::Grid2D::new(128, 128, lx, 8.5).unwrap();
    for (eps, nx, ny) in [(0.2, 64, 64), (0.1, 128, 128), (0.05, 256, 256), (0.025, 512, 512)] {
        let g = fdkp_grid(&ds, &p, eps, 2.0).unwrap();
        assert_eq!((g.nx, g.ny), (nx, ny), "eps {eps}");
        let carrier = p.omega0 / g.dk1();
        assert!((carrier - carrier.round()).abs() < 1e-8);
    }
    assert!(fdkp_grid(&ds, &p, 0.03, 2.0).is_err());
}

#[test]
fn scaling_halves_the_norm_and_inverts() {
    let (ds, p) = setup(0.1);
    let z = projected_ground_state(&ds, &p);
    let u = p.map.scale(&z).unwrap();
    let ratio = p.grid().l2_sq(&u).sqrt() / ds.grid.l2_sq(&z).sqrt();
    assert!((ratio - 0.5).abs() < 1e-13);
    let back = p.map.unscale(&u).unwrap();
    assert!(back.iter().zip(&z).all(|(a, b)| (a - b).norm() < 1e-15));
    let t = p.tilde_map(&u, TildeDirection::Inverse).unwrap();
    let again = p.tilde_map(&t, TildeDirection::Forward).unwrap();
    assert!(again.iter().zip(&u).all(|(a, b)| (a - b).norm() < 1e-15));
}

#[test]
fn envelope_outside_the_disc_is_refused() {
    let (ds, p) = setup(0.1);
    let z = ds_ground_state(&ds, 1e-8, 3000).unwrap().zeta.values;
    assert!(matches!(p.map.scale(&z), Err(Error::Support(_))));
}

#[test]
fn quadratic_correction_of_a_single_carrier_mode() {
    let (_, p) = setup(0.1);
    let g = p.grid();
    let c = p.sym.carrier.unwrap();
    let a = 0.013;
    let mut u1 = vec![C::new(0.0, 0.0); g.len()];
    u1[c] = C::new(a, 0.0);
    u1[g.mirror(c)] = C::new(a, 0.0);
    let uq = p.compute_uq(&u1).unwrap();
    // u1 = 2a cos(w0 x): uq = -(2 a^2 / n(2 w0, 0)) cos(2 w0 x).
    let n2 = p.params.n2;
    let phys = g.inverse(&uq);
    let w0 = p.params.omega0;
    for q in (0..g.ny).step_by(7) {
        for i in (0..g.nx).step_by(5) {
            let want = -(2.0 * a * a / n2) * (2.0 * w0 * g.x(i)).cos();
            let got = phys[g.idx(i, q)];
            assert!((got.re - want).abs() < 1e-15 && got.im.abs() < 1e-15);
        }
    }
}

#[test]
fn lift_satisfies_the_split_equations() {
    let (ds, p) = setup(0.1);
    let z = projected_ground_state(&ds, &p);
    let st = p.lift(&z).unwrap();
    let g = p.grid();
    // Disjoint supports.
    for n in 0..g.len() {
        let on = p.sym.chi_bi[n];
        assert!(on || st.u1[n].norm() == 0.0);
        assert!(!on || st.u2[n].norm() == 0.0);
    }
    assert!(p.fixed_point_defect(&st).unwrap() < 1e-12 * p.x_norm(&st.u1));
    let split = p.split_value(&st);
    assert!((split - p.eval_i(&st.u)).abs() < 1e-11 * split.abs());
    let r = residual_report(&p, &st.u);
    assert!(r.z2 < 1e-12 && r.z1 > 1e-4);
    assert!(st.contraction_ratio > 0.0 && st.contraction_ratio < 1.0);
    assert_eq!(st.ratios.len() + 1, st.iterations);
}

fn literal_options() -> ReductionOptions {
    ReductionOptions {
        form: PicardForm::Literal,
        ..ReductionOptions::default()
    }
}

#[test]
fn literal_and_shifted_maps_share_the_fixed_point() {
    let (ds, p) = setup(0.05);
    let z = scaled(&projected_ground_state(&ds, &p), 0.1);
    let (_, _, u1) = p.u1_of(&z).unwrap();
    let tol = 1e-15 * p.x_norm(&p.compute_uq(&u1).unwrap());
    let opts = ReductionOptions {
        tol: Some(tol),
        ..ReductionOptions::default()
    };
    let shifted = p.solve_uc(&u1, &opts).unwrap();
    let literal = p
        .solve_uc(&u1, &ReductionOptions { form: PicardForm::Literal, ..opts })
        .unwrap();
    let d: Vec<C> = shifted.uc.iter().zip(&literal.uc).map(|(a, b)| a - b).collect();
    let (dn, un) = (p.x_norm(&d), p.x_norm(&shifted.uc));
    assert!(dn < 1e-9 * un, "difference {dn:e} of {un:e}");
}

#[test]
fn literal_map_diverges_when_the_shift_dominates_n() {
    // c0 eps^2 exceeds the smallest n off the bi-disc at eps = 0.2.
    let (ds, p) = setup(0.2);
    assert!(p.params.c0 * 0.04 > p.sym.n_min);
    let z = scaled(&projected_ground_state(&ds, &p), 0.1);
    let (_, _, u1) = p.u1_of(&z).unwrap();
    assert!(p.solve_uc(&u1, &ReductionOptions::default()).is_ok());
    assert!(matches!(
        p.solve_uc(&u1, &literal_options()),
        Err(Error::NonContraction { .. })
    ));
}

#[test]
fn remainder_beyond_the_shift_term_scales_cubically() {
    let (ds, p) = setup(0.1);
    let z = scaled(&projected_ground_state(&ds, &p), 0.2);
    let shift = p.params.c0 * 0.01;
    // uc = -(s/(n+s)) uq + O(|u1|^3).
    let cubic = |st: &fdkp::ReductionState| -> Vec<C> {
        (0..st.uc.len())
            .map(|n| {
                if p.sym.inv_x2[n] == 0.0 {
                    st.uc[n]
                } else {
                    st.uc[n] + shift / (p.sym.n[n] + shift) * st.uq[n]
                }
            })
            .collect()
    };
    let big = p.lift(&z).unwrap();
    let small = p.lift(&scaled(&z, 0.5)).unwrap();
    let r = p.x_norm(&cubic(&small)) / p.x_norm(&cubic(&big));
    assert!((r - 0.125).abs() < 0.01, "ratio {r}");
    let q = p.x_norm(&small.uq) / p.x_norm(&big.uq);
    assert!((q - 0.25).abs() < 1e-12);
}

#[test]
fn large_amplitude_is_reported_as_non_contraction() {
    let (ds, p) = setup(0.1);
    let z = scaled(&projected_ground_state(&ds, &p), 3.0);
    assert!(matches!(p.lift(&z), Err(Error::NonContraction { .. })));
}

#[test]
fn gradient_of_the_reduced_functional() {
    let (ds, p) = setup(0.1);
    let z = scaled(&projected_ground_state(&ds, &p), 0.8);
    let mut h = fdkp::minimizer::random_init(&ds, 3);
    p.map.project(&mut h);
    let grad = p.grad_teps(&z).unwrap();
    let t = 1e-4;
    let at = |s: f64| -> Vec<C> { z.iter().zip(&h).map(|(a, b)| a + s * b).collect() };
    let fd = (p.value(&at(t)).unwrap() - p.value(&at(-t)).unwrap()) / (2.0 * t);
    let an = ds.grid.inner(&grad, &h);
    assert!((fd - an).abs() < 1e-6 * an.abs(), "fd {fd} an {an}");
}
