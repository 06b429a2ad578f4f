//! Nehari projection, projected descent to ground states, and Newton polish
//! of the steady FDKP equation.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functionals::{DsProblem, FunctionalReport};
use crate::reduction::FdkpProblem;
use crate::spectral::{Field, Grid2D, NormKind, Rep, C};

const ZERO: C = C::new(0.0, 0.0);

/// A functional on envelope fields that the descent can minimise.
pub trait Objective {
    fn grid(&self) -> &Arc<Grid2D>;
    /// Symbol `q` of `Q`; the descent is preconditioned by `2q`.
    fn q_symbol(&self) -> &[f64];
    /// Projects onto the admissible spectral support.
    fn project(&self, z: &mut [C]);
    fn value(&self, z: &[C]) -> Result<f64>;
    fn value_grad(&self, z: &[C]) -> Result<(f64, Vec<C>)>;
    /// `d/dl T(l z)` at `l`, i.e. `<grad T(l z), z>`.
    fn ray_slope(&self, z: &[C], lambda: f64) -> Result<f64>;
    fn report(&self, z: &[C]) -> Result<FunctionalReport>;
    /// Applies exact symmetries to centre `z`; returns `(tau_x, tau_y, phase)`.
    fn gauge(&self, z: &mut [C]) -> (f64, f64, f64);
    /// Projection onto the Nehari set along the ray.
    fn nehari_project(&self, z: &[C]) -> Result<(f64, Vec<C>)>;
}

/// Closed-form Nehari multiplier `(Q / 2S)^(1/2)` of the DS functional.
pub fn nehari_lambda0(ds: &DsProblem, z: &[C]) -> Result<f64> {
    let q = ds.eval_q(z);
    let s = ds.eval_s(z);
    if !(s > 0.0) {
        return Err(Error::NoNehariPoint("S vanishes on the ray".into()));
    }
    Ok((q / (2.0 * s)).sqrt())
}

fn scaled(z: &[C], l: f64) -> Vec<C> {
    z.iter().map(|v| v * l).collect()
}

/// Circular centroid of `|z|^2` in physical coordinates.
pub fn centroid(g: &Grid2D, z: &[C]) -> (f64, f64) {
    let p = g.inverse(z);
    let (mut sx, mut sy) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for q in 0..g.ny {
        let ey = C::from_polar(1.0, std::f64::consts::PI * g.y(q) / g.ly);
        for pi in 0..g.nx {
            let w = p[g.idx(pi, q)].norm_sqr();
            sx += w * C::from_polar(1.0, std::f64::consts::PI * g.x(pi) / g.lx);
            sy += w * ey;
        }
    }
    (sx.arg() * g.lx / std::f64::consts::PI, sy.arg() * g.ly / std::f64::consts::PI)
}

/// Value at the origin, `sum of coefficients`.
fn origin_value(z: &[C]) -> C {
    z.iter().sum()
}

impl Objective for DsProblem {
    fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    fn q_symbol(&self) -> &[f64] {
        &self.q
    }

    fn project(&self, z: &mut [C]) {
        self.grid.project_band(z);
    }

    fn value(&self, z: &[C]) -> Result<f64> {
        Ok(self.eval_t0(z))
    }

    fn value_grad(&self, z: &[C]) -> Result<(f64, Vec<C>)> {
        let (q, s, g) = DsProblem::value_grad(self, z);
        Ok((q - s, g))
    }

    fn ray_slope(&self, z: &[C], lambda: f64) -> Result<f64> {
        let q = self.eval_q(z);
        let s = self.eval_s(z);
        Ok(2.0 * lambda * q - 4.0 * lambda.powi(3) * s)
    }

    fn report(&self, z: &[C]) -> Result<FunctionalReport> {
        Ok(DsProblem::report(self, z))
    }

    fn gauge(&self, z: &mut [C]) -> (f64, f64, f64) {
        let (cx, cy) = centroid(&self.grid, z);
        self.grid.translate(z, -cx, -cy);
        let phase = origin_value(z).arg();
        let rot = C::from_polar(1.0, -phase);
        for v in z.iter_mut() {
            *v *= rot;
        }
        (-cx, -cy, -phase)
    }

    fn nehari_project(&self, z: &[C]) -> Result<(f64, Vec<C>)> {
        let l = nehari_lambda0(self, z)?;
        Ok((l, scaled(z, l)))
    }
}

impl Objective for FdkpProblem {
    fn grid(&self) -> &Arc<Grid2D> {
        &self.ds.grid
    }

    fn q_symbol(&self) -> &[f64] {
        &self.ds.q
    }

    fn project(&self, z: &mut [C]) {
        self.map.project(z);
    }

    fn value(&self, z: &[C]) -> Result<f64> {
        FdkpProblem::value(self, z)
    }

    fn value_grad(&self, z: &[C]) -> Result<(f64, Vec<C>)> {
        let (v, g, _) = FdkpProblem::value_grad(self, z)?;
        Ok((v, g))
    }

    fn ray_slope(&self, z: &[C], lambda: f64) -> Result<f64> {
        let g = self.grad_teps(&scaled(z, lambda))?;
        Ok(self.ds.grid.inner(&g, z))
    }

    fn report(&self, z: &[C]) -> Result<FunctionalReport> {
        Ok(self.eval_teps(z)?.0)
    }

    /// Translation in y, and translation in x paired with the carrier phase
    /// `exp(-i omega0 tau / eps)`; a bare phase rotation is not a symmetry here.
    fn gauge(&self, z: &mut [C]) -> (f64, f64, f64) {
        let g = &self.ds.grid;
        let (cx, cy) = centroid(g, z);
        g.translate(z, -cx, -cy);
        let phase = self.params.omega0 * cx / self.eps;
        let rot = C::from_polar(1.0, phase);
        for v in z.iter_mut() {
            *v *= rot;
        }
        (-cx, -cy, phase)
    }

    /// Seeded at `l = 1`: trial points sit next to the manifold, and the DS
    /// closed form can land outside the range where the reduction contracts.
    fn nehari_project(&self, z: &[C]) -> Result<(f64, Vec<C>)> {
        let l = nehari_root(|l| self.ray_slope(z, l), 1.0)?;
        Ok((l, scaled(z, l)))
    }
}

/// Root of the ray slope in `[l0/4, 4 l0]`, safeguarded secant seeded at `l0`.
pub fn nehari_root(mut slope: impl FnMut(f64) -> Result<f64>, l0: f64) -> Result<f64> {
    let f0 = slope(l0)?;
    if f0 == 0.0 {
        return Ok(l0);
    }
    let (mut a, mut fa) = (l0, f0);
    let (mut b, mut fb) = (f64::NAN, f64::NAN);
    let step: f64 = if f0 > 0.0 { 1.1 } else { 1.0 / 1.1 };
    let mut l = l0;
    while !(fb * fa < 0.0) {
        l *= step;
        if l > 4.0 * l0 || l < 0.25 * l0 {
            return Err(Error::NoNehariPoint(format!(
                "no sign change of the ray slope in [{}, {}]",
                0.25 * l0,
                4.0 * l0
            )));
        }
        let fl = slope(l)?;
        if fl * fa < 0.0 {
            b = l;
            fb = fl;
        } else {
            a = l;
            fa = fl;
        }
    }
    // a, b bracket the root; Illinois-modified regula falsi with bisection guard.
    let mut side = 0;
    for _ in 0..100 {
        let mut c = b - fb * (b - a) / (fb - fa);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !(c > lo && c < hi) {
            c = 0.5 * (a + b);
        }
        let fc = slope(c)?;
        if fc == 0.0 || (hi - lo) <= 1e-14 * c {
            return Ok(c);
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            side = 0;
        } else if side == 1 {
            fa *= 0.5;
        } else {
            side = 1;
        }
        b = c;
        fb = fc;
        if (b - a).abs() <= 1e-13 * b.abs() {
            return Ok(b);
        }
    }
    Ok(b)
}

#[derive(Clone, Copy, Debug)]
pub struct DescentOptions {
    /// Tolerance on `|grad_tangent|_{L2} / |z|_{L2}`.
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
    pub max_step: f64,
    /// Print one line per iteration to standard error.
    pub trace: bool,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 3000,
            initial_step: 1.0,
            max_step: 8.0,
            trace: false,
        }
    }
}

/// Converged envelope and diagnostics.
#[derive(Clone, Debug)]
pub struct GroundStateReport {
    pub zeta: Field,
    pub lambda_star: f64,
    pub report: FunctionalReport,
    pub grad_norm: f64,
    pub grad_inf_norm: f64,
    pub nehari_residual: f64,
    pub iterations: usize,
    pub recenter_shift: (f64, f64),
    pub phase: f64,
    /// Functional values after every accepted step, starting at the first projection.
    pub values: Vec<f64>,
    pub converged: bool,
}

const SHRINK: f64 = 0.5;
const ARMIJO: f64 = 1e-4;
/// Relative size below which value differences are treated as rounding noise.
const NOISE: f64 = 1e-13;

/// Relative tangential gradient `|g - (<g,z>/|z|^2) z| / |z|`.
pub fn restricted_grad_norm(g: &Grid2D, grad: &[C], z: &[C]) -> f64 {
    let zz = g.l2_sq(z);
    if zz == 0.0 {
        return g.l2_sq(grad).sqrt();
    }
    let c = g.inner(grad, z) / zz;
    let t: Vec<C> = grad.iter().zip(z).map(|(a, b)| a - c * b).collect();
    (g.l2_sq(&t) / zz).sqrt()
}

/// Projected, preconditioned descent on the Nehari set.
pub fn minimize_ground_state<O: Objective + ?Sized>(
    obj: &O,
    init: &[C],
    opts: &DescentOptions,
) -> Result<GroundStateReport> {
    let g = obj.grid().clone();
    let mut z = init.to_vec();
    obj.project(&mut z);
    if g.l2_sq(&z) == 0.0 {
        return Err(Error::InvalidConfig("initial envelope is zero".into()));
    }
    let (mut shift_x, mut shift_y, mut phase) = obj.gauge(&mut z);
    let (mut lambda, mut zn) = obj.nehari_project(&z)?;
    z = zn;
    let (mut f, mut grad) = obj.value_grad(&z)?;
    obj.project(&mut grad);
    let mut values = vec![f];
    let q = obj.q_symbol();
    let mut alpha = opts.initial_step;
    let mut iterations = 0;
    let mut gn = restricted_grad_norm(&g, &grad, &z);
    let mut converged = gn < opts.tol;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let mut d: Vec<C> = grad
            .iter()
            .zip(q)
            .map(|(v, qq)| *v / (2.0 * qq))
            .collect();
        obj.project(&mut d);
        let zq = g.weighted_sq(q, &z);
        let dz: f64 = {
            let s: f64 = d
                .iter()
                .zip(&z)
                .zip(q)
                .map(|((a, b), w)| w * (a.re * b.re + a.im * b.im))
                .sum();
            g.area() * s
        };
        let c = dz / zq;
        for (a, b) in d.iter_mut().zip(&z) {
            *a -= c * *b;
        }
        let slope = g.inner(&grad, &d);
        if !(slope > 0.0) {
            break;
        }
        let mut shrinks = 0;
        let mut increases = 0;
        let accepted = loop {
            let trial: Vec<C> = z.iter().zip(&d).map(|(a, b)| a - alpha * b).collect();
            let outcome = obj
                .nehari_project(&trial)
                .and_then(|(l, t)| obj.value(&t).map(|v| (l, t, v)));
            match outcome {
                Ok((l, t, v)) if v.is_finite() => {
                    if v <= f - ARMIJO * alpha * slope {
                        break Some((l, t, v));
                    }
                    if (v - f).abs() <= NOISE * f.abs() {
                        // Below resolution of the value: accept when the gradient shrinks.
                        let (_, mut tg) = obj.value_grad(&t)?;
                        obj.project(&mut tg);
                        if restricted_grad_norm(&g, &tg, &t) < gn {
                            break Some((l, t, v.min(f)));
                        }
                    }
                    if v > f {
                        increases += 1;
                    }
                }
                Ok(_) => increases += 1,
                Err(e) if e.is_solver_failure() && shrinks < 30 => {}
                Err(e) => return Err(e),
            }
            shrinks += 1;
            alpha *= SHRINK;
            if increases >= 10 && shrinks >= 10 && shrinks == increases {
                return Err(Error::Divergence(iterations));
            }
            if shrinks > 40 {
                break None;
            }
        };
        let Some((l, t, v)) = accepted else {
            if gn < 100.0 * opts.tol {
                break;
            }
            return Err(Error::LineSearchStall(iterations));
        };
        lambda = l;
        zn = t;
        let (tx, ty, ph) = obj.gauge(&mut zn);
        shift_x += tx;
        shift_y += ty;
        phase += ph;
        z = zn;
        let (fv, mut gv) = obj.value_grad(&z)?;
        obj.project(&mut gv);
        let _ = v;
        f = fv;
        grad = gv;
        values.push(f);
        gn = restricted_grad_norm(&g, &grad, &z);
        converged = gn < opts.tol;
        if opts.trace {
            eprintln!("descent {iterations}: value {f:.16e} grad {gn:.3e} step {alpha:.3e} shrinks {shrinks}");
        }
        if shrinks == 0 {
            alpha = (alpha * 2.0).min(opts.max_step);
        }
    }
    let report = obj.report(&z)?;
    let grad_inf = grad.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let nehari = obj.ray_slope(&z, 1.0)?;
    Ok(GroundStateReport {
        zeta: Field {
            grid: g.clone(),
            values: z,
            rep: Rep::Spectral,
            real: false,
        },
        lambda_star: lambda,
        report,
        grad_norm: gn,
        grad_inf_norm: grad_inf,
        nehari_residual: nehari,
        iterations,
        recenter_shift: (shift_x, shift_y),
        phase,
        values,
        converged,
    })
}

/// Real Gaussian bump with widths set by the DS coefficient ratios.
pub fn gaussian_init(ds: &DsProblem) -> Vec<C> {
    let p = &ds.params;
    let wx = 2.0 * (p.a1 / p.a3).sqrt();
    let wy = 2.0 * (p.a2 / p.a3).sqrt();
    let f = Field::from_fn(&ds.grid, |x, y| {
        C::new((-(x * x) / (wx * wx) - (y * y) / (wy * wy)).exp(), 0.0)
    });
    let mut z = f.to_spectral().values;
    ds.grid.project_band(&mut z);
    z
}

/// Perturbed, shifted complex Gaussian drawn from a seeded generator.
pub fn random_init(ds: &DsProblem, seed: u64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = &ds.params;
    let wx = 2.0 * (p.a1 / p.a3).sqrt() * rng.gen_range(0.7..1.4);
    let wy = 2.0 * (p.a2 / p.a3).sqrt() * rng.gen_range(0.7..1.4);
    let x0 = rng.gen_range(-0.5..0.5) * wx;
    let y0 = rng.gen_range(-0.5..0.5) * wy;
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let modes: Vec<(f64, f64, C)> = (0..8)
        .map(|_| {
            (
                rng.gen_range(-2.0..2.0) / wx,
                rng.gen_range(-2.0..2.0) / wy,
                C::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)),
            )
        })
        .collect();
    let f = Field::from_fn(&ds.grid, |x, y| {
        let (dx, dy) = (x - x0, y - y0);
        let env = (-(dx * dx) / (wx * wx) - (dy * dy) / (wy * wy)).exp();
        let mut pert = C::new(1.0, 0.0);
        for &(a, b, c) in &modes {
            pert += c * C::from_polar(1.0, a * dx + b * dy);
        }
        env * pert * C::from_polar(1.0, phase)
    });
    let mut z = f.to_spectral().values;
    ds.grid.project_band(&mut z);
    z
}

/// Aligns `z` to `reference` by translation and phase, maximising `Re <reference, z>`.
///
/// Returns the aligned field and `(tau_x, tau_y, phase)`.
pub fn align(g: &Grid2D, reference: &[C], z: &[C]) -> (Vec<C>, (f64, f64, f64)) {
    // Coarse search: cross-correlation on the grid.
    let mut cross: Vec<C> = reference
        .iter()
        .zip(z)
        .map(|(r, v)| r.conj() * v)
        .collect();
    g.inverse_in_place(&mut cross);
    let (mut best, mut bn) = (0, -1.0);
    for (n, v) in cross.iter().enumerate() {
        if v.norm() > bn {
            bn = v.norm();
            best = n;
        }
    }
    // cross(x) = sum conj(r) z exp(i k x) = <shift_{-x} z, r>, so translate by -x.
    let mut tx = -g.x(best % g.nx);
    let mut ty = -g.y(best / g.nx);
    // Newton refinement of |C(tau)|^2 with C(tau) = sum conj(r) z exp(-i k tau).
    let k1 = g.k1();
    let k2 = g.k2();
    for _ in 0..30 {
        let (mut c, mut cx, mut cy) = (ZERO, ZERO, ZERO);
        let (mut cxx, mut cxy, mut cyy) = (ZERO, ZERO, ZERO);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let n = g.idx(i, j);
                let t = reference[n].conj() * z[n]
                    * C::from_polar(1.0, -(k1[i] * tx + k2[j] * ty));
                let (a, b) = (k1[i], k2[j]);
                c += t;
                cx += C::new(0.0, -a) * t;
                cy += C::new(0.0, -b) * t;
                cxx -= a * a * t;
                cxy -= a * b * t;
                cyy -= b * b * t;
            }
        }
        // F = |C|^2 / 2: gradient Re(conj C dC), Hessian Re(conj dC dC + conj C d2C).
        let gx = (c.conj() * cx).re;
        let gy = (c.conj() * cy).re;
        let hxx = (cx.conj() * cx + c.conj() * cxx).re;
        let hxy = (cx.conj() * cy + c.conj() * cxy).re;
        let hyy = (cy.conj() * cy + c.conj() * cyy).re;
        let det = hxx * hyy - hxy * hxy;
        if !(det > 0.0 && hxx < 0.0) {
            break;
        }
        let sx = -(hyy * gx - hxy * gy) / det;
        let sy = -(hxx * gy - hxy * gx) / det;
        tx += sx;
        ty += sy;
        if sx.abs() < 1e-15 * g.lx && sy.abs() < 1e-15 * g.ly {
            break;
        }
    }
    let mut out = z.to_vec();
    g.translate(&mut out, tx, ty);
    let c: C = reference.iter().zip(&out).map(|(r, v)| r.conj() * v).sum();
    let phase = -c.arg();
    let rot = C::from_polar(1.0, phase);
    for v in out.iter_mut() {
        *v *= rot;
    }
    (out, (tx, ty, phase))
}

/// Distance in the norm induced by `Q` after alignment.
pub fn q_distance(ds: &DsProblem, reference: &[C], z: &[C]) -> f64 {
    let (a, _) = align(&ds.grid, reference, z);
    let d: Vec<C> = a.iter().zip(reference).map(|(x, y)| x - y).collect();
    ds.eval_q(&d).sqrt()
}

/// Standard `H1` distance after alignment.
pub fn h1_distance(g: &Grid2D, reference: &[C], z: &[C]) -> f64 {
    let (a, _) = align(g, reference, z);
    let d: Vec<C> = a.iter().zip(reference).map(|(x, y)| x - y).collect();
    let w = NormKind::H1.weights(g).expect("H1 weights");
    g.weighted_sq(&w, &d).sqrt()
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    /// Relative residual target `|F(u)| / |u|`.
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
    pub max_linear: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 15,
            restart: 60,
            max_linear: 600,
        }
    }
}

/// Damped Newton on `F(u) = (n + c0 eps^2) u + P(u^2)` with a GMRES inner solve.
///
/// Returns the polished field and the relative residual after every step,
/// starting with the input's.
pub fn newton_polish_fdkp(p: &FdkpProblem, u: &[C], opts: &NewtonOptions) -> Result<(Vec<C>, Vec<f64>)> {
    let g = p.grid().clone();
    let mut u = u.to_vec();
    g.project_zero_mass(&mut u);
    g.project_band(&mut u);
    let nu = g.l2_sq(&u).sqrt();
    if nu == 0.0 {
        return Ok((u, vec![0.0]));
    }
    let shift = p.params.c0 * p.eps * p.eps;
    let precond: Vec<f64> = (0..g.len())
        .map(|n| {
            let (i, j) = (n % g.nx, n / g.nx);
            if i == g.zero_col() || !g.in_band(i, j) {
                0.0
            } else if p.sym.chi_bi[n] {
                1.0 / (p.sym.n_tilde[n] + shift)
            } else {
                1.0 / (p.sym.n[n] + shift)
            }
        })
        .collect();
    let mut f = p.grad_i(&u);
    let mut res = g.l2_sq(&f).sqrt() / g.l2_sq(&u).sqrt();
    let mut history = vec![res];
    let mut it = 0;
    while res >= opts.tol {
        if it >= opts.max_iter {
            return Err(Error::NonConvergence(res));
        }
        it += 1;
        let phys_u = g.inverse(&u);
        let jac = |v: &[C]| -> Vec<C> {
            let mut pv = g.inverse(v);
            for (a, b) in pv.iter_mut().zip(&phys_u) {
                *a *= 2.0 * b;
            }
            g.forward_in_place(&mut pv);
            g.project_band(&mut pv);
            for (n, x) in pv.iter_mut().enumerate() {
                *x += (p.sym.n[n] + shift) * v[n];
            }
            g.project_zero_mass(&mut pv);
            pv
        };
        let rhs: Vec<C> = f.iter().map(|v| -v).collect();
        let forcing = (0.1 * res).min(1e-3).max(1e-13);
        let (y, lin) = gmres(
            |v| {
                let w: Vec<C> = v.iter().zip(&precond).map(|(a, b)| a * b).collect();
                jac(&w)
            },
            &rhs,
            forcing,
            opts.restart,
            opts.max_linear,
        );
        if lin > 0.9 {
            return Err(Error::LinearSolveStagnation(lin));
        }
        let step: Vec<C> = y.iter().zip(&precond).map(|(a, b)| a * b).collect();
        let mut t = 1.0;
        let fnorm = g.l2_sq(&f).sqrt();
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<C> = u.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            let ft = p.grad_i(&trial);
            let fn_t = g.l2_sq(&ft).sqrt();
            if fn_t.is_finite() && fn_t <= (1.0 - 1e-4 * t) * fnorm {
                u = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence(res));
        }
        res = g.l2_sq(&f).sqrt() / g.l2_sq(&u).sqrt();
        history.push(res);
    }
    Ok((u, history))
}

fn dot(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Restarted GMRES over the real vector space of complex arrays.
///
/// Returns the solution and the achieved relative residual.
pub fn gmres(
    op: impl Fn(&[C]) -> Vec<C>,
    b: &[C],
    rtol: f64,
    restart: usize,
    max_iter: usize,
) -> (Vec<C>, f64) {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![ZERO; n];
    if bnorm == 0.0 {
        return (x, 0.0);
    }
    let mut total = 0;
    let mut rel = 1.0;
    while total < max_iter {
        let ax = op(&x);
        let r: Vec<C> = b.iter().zip(&ax).map(|(a, c)| a - c).collect();
        let beta = dot(&r, &r).sqrt();
        rel = beta / bnorm;
        if rel <= rtol {
            break;
        }
        let m = restart.min(max_iter - total);
        let mut v: Vec<Vec<C>> = vec![r.iter().map(|c| c / beta).collect()];
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut e = vec![0.0; m + 1];
        e[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            total += 1;
            let mut w = op(&v[k]);
            for (i, vi) in v.iter().enumerate() {
                let hik = dot(&w, vi);
                h[i][k] = hik;
                for (a, c) in w.iter_mut().zip(vi) {
                    *a -= hik * c;
                }
            }
            let hn = dot(&w, &w).sqrt();
            h[k + 1][k] = hn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if d == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            e[k + 1] = -sn[k] * e[k];
            e[k] *= cs[k];
            k_used = k + 1;
            rel = e[k + 1].abs() / bnorm;
            if rel <= rtol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|c| c / hn).collect());
        }
        let mut yk = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = e[i];
            for j in i + 1..k_used {
                s -= h[i][j] * yk[j];
            }
            yk[i] = s / h[i][i];
        }
        for (j, yj) in yk.iter().enumerate() {
            for (a, c) in x.iter_mut().zip(&v[j]) {
                *a += *yj * c;
            }
        }
        if rel <= rtol {
            let ax = op(&x);
            let r: f64 = b
                .iter()
                .zip(&ax)
                .map(|(a, c)| (a - c).norm_sqr())
                .sum::<f64>()
                .sqrt();
            rel = r / bnorm;
            if rel <= 10.0 * rtol {
                break;
            }
        }
    }
    (x, rel)
}
