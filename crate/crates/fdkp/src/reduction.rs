//! Frequency splitting, the `u_c` fixed point, the tilde change of variables,
//! the DS scaling, and the reduced functional `T_eps` with its gradient.
//!
//! The chain is `zeta -> u1+~ -> u1+ -> u1 -> (uq, uc) -> u = u1 + uq + uc`.
//! An envelope coefficient at DS mode `(j1, j2)` lands at FDKP mode
//! `(i0 + j1, j2)` with weight `eps/2`, where `k1(i0) = omega0`; the FDKP
//! box is the DS box divided by `eps`, so FDKP spacings are `eps` times the
//! DS spacings.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functionals::{cubic_integral, eval_i, grad_i, DsProblem, FunctionalReport};
use crate::spectral::{Field, Grid2D, NormKind, Rep, C};
use crate::symbols::{ModelParams, SymbolTable};

const ZERO: C = C::new(0.0, 0.0);

/// Smallest half-length `>= target` for which `omega0 * (lx / eps) / pi` is an
/// integer for every `eps` in the list.
pub fn aligned_half_length(target: f64, omega0: f64, eps_list: &[f64]) -> Result<f64> {
    if eps_list.is_empty() {
        return Ok(target);
    }
    let mut num: u64 = 0;
    let mut den: u64 = 0;
    for &e in eps_list {
        let (p, q) = rational(e).ok_or_else(|| {
            Error::InvalidConfig(format!("eps = {e} is not a short rational"))
        })?;
        if num == 0 {
            num = p;
            den = q;
        } else {
            num = lcm(num, p);
            den = gcd(den, q);
        }
    }
    let unit = std::f64::consts::PI * (num as f64 / den as f64) / omega0;
    let m = (target / unit).ceil().max(1.0);
    let lx = m * unit;
    if lx > 4.0 * target.max(unit) && m > 1.0 || !lx.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "no commensurate box near {target} for eps list {eps_list:?}"
        )));
    }
    Ok(lx)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Continued-fraction approximation with denominator below `1e6`.
fn rational(x: f64) -> Option<(u64, u64)> {
    if !(x > 0.0) {
        return None;
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a > 1e9 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64 / k1 as f64) - x).abs() <= 1e-12 * x {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 > 0 && ((h1 as f64 / k1 as f64) - x).abs() <= 1e-12 * x {
        Some((h1, k1))
    } else {
        None
    }
}

/// FDKP grid for a DS grid at a given `eps`.
///
/// The x band keeps `harmonics * (omega0 + delta)`, the y band keeps
/// `harmonics * delta`, each with a 3/2 margin so that the retained band
/// survives the 2/3 rule.
pub fn fdkp_grid(ds: &Grid2D, params: &ModelParams, eps: f64, harmonics: f64) -> Result<Arc<Grid2D>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    if !(harmonics >= 2.0) {
        return Err(Error::InvalidConfig(format!(
            "harmonics must be >= 2 to hold u1^2, got {harmonics}"
        )));
    }
    let (lx, ly) = (ds.lx / eps, ds.ly / eps);
    let i0 = params.omega0 * lx / std::f64::consts::PI;
    if (i0 - i0.round()).abs() > 1e-8 {
        return Err(Error::InvalidConfig(format!(
            "carrier omega0 is not a grid mode for eps = {eps} (index {i0})"
        )));
    }
    let dk1 = std::f64::consts::PI / lx;
    let dk2 = std::f64::consts::PI / ly;
    let need_x = 1.5 * harmonics * (params.omega0 + params.delta) / dk1;
    let need_y = 1.5 * harmonics * params.delta / dk2;
    let nx = ((2.0 * need_x).ceil() as usize).next_power_of_two().max(8);
    let ny = ((2.0 * need_y).ceil() as usize).next_power_of_two().max(8);
    Grid2D::new(nx, ny, lx, ly)
}

/// Index correspondence between the DS grid and the carrier-shifted FDKP lattice.
#[derive(Clone, Debug)]
pub struct ScalingMap {
    pub ds: Arc<Grid2D>,
    pub fdkp: Arc<Grid2D>,
    pub eps: f64,
    /// Signed FDKP x mode with `k1 = omega0`.
    pub carrier_mode: i64,
    /// `(ds index, fdkp index)` for every envelope mode inside `chi_eps`.
    /// When `delta/eps` exceeds the DS band only part of the plus disc is reached.
    pub pairs: Vec<(usize, usize)>,
    /// `chi_eps` on the DS grid (intersected with the DS band).
    pub chi_eps: Vec<bool>,
}

impl ScalingMap {
    pub fn new(sym: &SymbolTable, ds: &Arc<Grid2D>, eps: f64) -> Result<Self> {
        let f = &sym.grid;
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        if !(rel(f.lx * eps, ds.lx) && rel(f.ly * eps, ds.ly)) {
            return Err(Error::GridMismatch(format!(
                "FDKP box ({}, {}) is not the DS box ({}, {}) / eps",
                f.lx, f.ly, ds.lx, ds.ly
            )));
        }
        let carrier = sym.carrier.ok_or_else(|| {
            Error::GridMismatch("carrier omega0 is not a mode of the FDKP grid".into())
        })?;
        let carrier_mode = f.mode_x(carrier % f.nx);
        let mut pairs = Vec::new();
        let mut chi_eps = vec![false; ds.len()];
        for j in 0..ds.ny {
            for i in 0..ds.nx {
                if !ds.in_band(i, j) {
                    continue;
                }
                let (Some(fi), Some(fj)) = (
                    f.col_of_mode(carrier_mode + ds.mode_x(i)),
                    f.row_of_mode(ds.mode_y(j)),
                ) else {
                    continue;
                };
                let n = f.idx(fi, fj);
                if sym.chi_plus[n] {
                    pairs.push((ds.idx(i, j), n));
                    chi_eps[ds.idx(i, j)] = true;
                }
            }
        }
        for &(_, n) in &pairs {
            if !f.in_band(n % f.nx, n / f.nx) {
                return Err(Error::InvalidConfig(
                    "plus disc extends past the FDKP 2/3 band".into(),
                ));
            }
        }
        Ok(Self {
            ds: ds.clone(),
            fdkp: f.clone(),
            eps,
            carrier_mode,
            pairs,
            chi_eps,
        })
    }

    /// `u1+~` from `zeta`.
    pub fn scale(&self, zeta: &[C]) -> Result<Vec<C>> {
        check_support(zeta, &self.chi_eps, "zeta outside chi_eps")?;
        let w = 0.5 * self.eps;
        let mut out = vec![ZERO; self.fdkp.len()];
        for &(d, f) in &self.pairs {
            out[f] = w * zeta[d];
        }
        Ok(out)
    }

    /// Exact inverse of [`ScalingMap::scale`] on the plus disc.
    pub fn unscale(&self, u: &[C]) -> Result<Vec<C>> {
        let mut mask = vec![false; self.fdkp.len()];
        for &(_, f) in &self.pairs {
            mask[f] = true;
        }
        check_support(u, &mask, "field outside the plus disc")?;
        let w = 2.0 / self.eps;
        let mut out = vec![ZERO; self.ds.len()];
        for &(d, f) in &self.pairs {
            out[d] = w * u[f];
        }
        Ok(out)
    }

    /// Zeroes envelope modes outside `chi_eps`.
    pub fn project(&self, zeta: &mut [C]) {
        for (v, &keep) in zeta.iter_mut().zip(&self.chi_eps) {
            if !keep {
                *v = ZERO;
            }
        }
    }
}

fn check_support(a: &[C], mask: &[bool], what: &str) -> Result<()> {
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(());
    }
    let leak = a
        .iter()
        .zip(mask)
        .filter(|(_, &m)| !m)
        .map(|(v, _)| v.norm())
        .fold(0.0, f64::max);
    if leak > 1e-12 * scale {
        return Err(Error::Support(format!("{what} (relative {:e})", leak / scale)));
    }
    Ok(())
}

/// Form of the map iterated for `uc`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PicardForm {
    /// `uc = -((1-chi)/(n + c0 eps^2)) P[(2 u1 + u2) u2 + c0 eps^2 uq]`.
    Shifted,
    /// `uc = -((1-chi)/n) P[(2 u1 + u2) u2 + c0 eps^2 u2]`.
    Literal,
}

#[derive(Clone, Copy, Debug)]
pub struct ReductionOptions {
    /// Absolute X-norm tolerance; `None` means `1e-12 * max(1, |u1|_X)`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub form: PicardForm,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            tol: None,
            max_iter: 400,
            form: PicardForm::Shifted,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TildeDirection {
    /// `u~ = (n/n~)^(1/2) u`.
    Forward,
    Inverse,
}

/// Decomposition `u = u1 + uq + uc` with Picard telemetry; spectral arrays on the FDKP grid.
#[derive(Clone, Debug)]
pub struct ReductionState {
    pub grid: Arc<Grid2D>,
    pub u1tilde: Vec<C>,
    pub u1plus: Vec<C>,
    pub u1: Vec<C>,
    pub uq: Vec<C>,
    pub uc: Vec<C>,
    pub u2: Vec<C>,
    pub u: Vec<C>,
    pub iterations: usize,
    pub contraction_ratio: f64,
    pub residual_x: f64,
    pub ratios: Vec<f64>,
}

impl ReductionState {
    pub fn field(&self, values: &[C], real: bool) -> Field {
        Field {
            grid: self.grid.clone(),
            values: values.to_vec(),
            rep: Rep::Spectral,
            real,
        }
    }

    /// Named components for export.
    pub fn components(&self) -> Vec<(&'static str, Field)> {
        vec![
            ("u1tilde", self.field(&self.u1tilde, false)),
            ("u1plus", self.field(&self.u1plus, false)),
            ("u1", self.field(&self.u1, true)),
            ("uq", self.field(&self.uq, true)),
            ("uc", self.field(&self.uc, true)),
            ("u2", self.field(&self.u2, true)),
            ("u", self.field(&self.u, true)),
        ]
    }
}

/// The FDKP problem at one `eps`, tied to an envelope grid.
#[derive(Clone, Debug)]
pub struct FdkpProblem {
    pub params: ModelParams,
    pub eps: f64,
    pub ds: DsProblem,
    pub sym: SymbolTable,
    pub map: ScalingMap,
    pub opts: ReductionOptions,
    x_weights: Vec<f64>,
    /// `(n/n~)^(1/2)` on the bi-disc, 1 at the carriers.
    tilde_ratio: Vec<f64>,
    inv_shift: Vec<f64>,
}

impl FdkpProblem {
    pub fn new(ds: &DsProblem, fdkp_grid: &Arc<Grid2D>, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
        }
        let params = ds.params.clone().with_eps(eps)?;
        let sym = SymbolTable::build(&params, fdkp_grid)?;
        let map = ScalingMap::new(&sym, &ds.grid, eps)?;
        let g = fdkp_grid;
        let x_weights = NormKind::X(params.s).weights(g).expect("X weights");
        let mut tilde_ratio = vec![1.0; g.len()];
        let mut inv_shift = vec![0.0; g.len()];
        let shift = params.c0 * eps * eps;
        let carriers = sym.carrier.map(|c| (c, g.mirror(c)));
        for n in 0..g.len() {
            if sym.chi_bi[n] {
                let centre = carriers.is_some_and(|(a, b)| n == a || n == b);
                if !centre {
                    tilde_ratio[n] = (sym.n[n] / sym.n_tilde[n]).sqrt();
                }
            } else if sym.inv_x2[n] != 0.0 {
                inv_shift[n] = 1.0 / (sym.n[n] + shift);
            }
        }
        Ok(Self {
            params,
            eps,
            ds: ds.clone(),
            sym,
            map,
            opts: ReductionOptions::default(),
            x_weights,
            tilde_ratio,
            inv_shift,
        })
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.sym.grid
    }

    pub fn x_norm(&self, a: &[C]) -> f64 {
        self.grid().weighted_sq(&self.x_weights, a).sqrt()
    }

    fn shift(&self) -> f64 {
        self.params.c0 * self.eps * self.eps
    }

    /// Multiplies by `(n/n~)^(+-1/2)` on the plus disc.
    pub fn tilde_map(&self, u: &[C], dir: TildeDirection) -> Result<Vec<C>> {
        check_support(u, &self.sym.chi_plus, "tilde map input outside the plus disc")?;
        Ok(u.iter()
            .zip(&self.tilde_ratio)
            .zip(&self.sym.chi_plus)
            .map(|((v, r), &p)| {
                if !p {
                    ZERO
                } else {
                    match dir {
                        TildeDirection::Forward => *v * *r,
                        TildeDirection::Inverse => *v / *r,
                    }
                }
            })
            .collect())
    }

    /// `u1 = u1+ + conj mirror`.
    pub fn real_extension(&self, plus: &[C]) -> Vec<C> {
        let g = self.grid();
        let mut out = plus.to_vec();
        for n in 0..g.len() {
            if self.sym.chi_plus[n] {
                out[g.mirror(n)] += plus[n].conj();
            }
        }
        out
    }

    /// `uq = -((1 - chi)/n) P(u1^2)`.
    pub fn compute_uq(&self, u1: &[C]) -> Result<Vec<C>> {
        check_support(u1, &self.sym.chi_bi, "u1 outside the bi-disc")?;
        let mut sq = self.grid().product(u1, u1);
        for (v, w) in sq.iter_mut().zip(&self.sym.inv_x2) {
            *v *= -*w;
        }
        Ok(sq)
    }

    /// One application of the literal map `G(u1, uc)`.
    pub fn g_map(&self, u1: &[C], uc: &[C]) -> Result<Vec<C>> {
        let uq = self.compute_uq(u1)?;
        let u2: Vec<C> = uq.iter().zip(uc).map(|(a, b)| a + b).collect();
        Ok(self.apply_map(u1, &uq, &u2, PicardForm::Literal))
    }

    /// One application of the shifted map.
    pub fn g_map_shifted(&self, u1: &[C], uc: &[C]) -> Result<Vec<C>> {
        let uq = self.compute_uq(u1)?;
        let u2: Vec<C> = uq.iter().zip(uc).map(|(a, b)| a + b).collect();
        Ok(self.apply_map(u1, &uq, &u2, PicardForm::Shifted))
    }

    fn apply_map(&self, u1: &[C], uq: &[C], u2: &[C], form: PicardForm) -> Vec<C> {
        let g = self.grid();
        let s = self.shift();
        let a: Vec<C> = u1.iter().zip(u2).map(|(x, y)| 2.0 * x + y).collect();
        let mut out = g.product(&a, u2);
        match form {
            PicardForm::Literal => {
                for (n, v) in out.iter_mut().enumerate() {
                    *v = -self.sym.inv_x2[n] * (*v + s * u2[n]);
                }
            }
            PicardForm::Shifted => {
                for (n, v) in out.iter_mut().enumerate() {
                    *v = -self.inv_shift[n] * (*v + s * uq[n]);
                }
            }
        }
        out
    }

    /// Picard iteration for `uc` from zero.
    pub fn solve_uc(&self, u1: &[C], opts: &ReductionOptions) -> Result<ReductionState> {
        let g = self.grid();
        let uq = self.compute_uq(u1)?;
        let tol = opts
            .tol
            .unwrap_or_else(|| 1e-12 * self.x_norm(u1).max(1.0));
        let mut uc = vec![ZERO; g.len()];
        let mut u2 = uq.clone();
        let mut prev = f64::NAN;
        let mut ratios = Vec::new();
        let mut stable_ratio = f64::NAN;
        let mut bad = 0;
        for it in 1..=opts.max_iter {
            let next = self.apply_map(u1, &uq, &u2, opts.form);
            let diff: Vec<C> = next.iter().zip(&uc).map(|(a, b)| a - b).collect();
            let dx = self.x_norm(&diff);
            uc = next;
            for n in 0..g.len() {
                u2[n] = uq[n] + uc[n];
            }
            if !dx.is_finite() {
                return Err(Error::NonContraction {
                    ratio: f64::INFINITY,
                    iteration: it,
                });
            }
            if prev.is_finite() && prev > 0.0 {
                let r = dx / prev;
                ratios.push(r);
                if prev > 1e3 * tol {
                    stable_ratio = r;
                }
                if r >= 0.95 {
                    bad += 1;
                    if bad >= 3 {
                        return Err(Error::NonContraction {
                            ratio: r,
                            iteration: it,
                        });
                    }
                } else {
                    bad = 0;
                }
            }
            if dx < tol {
                let ratio = if stable_ratio.is_finite() {
                    stable_ratio
                } else {
                    ratios.last().copied().unwrap_or(0.0)
                };
                let u: Vec<C> = u1.iter().zip(&u2).map(|(a, b)| a + b).collect();
                return Ok(ReductionState {
                    grid: g.clone(),
                    u1tilde: Vec::new(),
                    u1plus: Vec::new(),
                    u1: u1.to_vec(),
                    uq,
                    uc,
                    u2,
                    u,
                    iterations: it,
                    contraction_ratio: ratio,
                    residual_x: dx,
                    ratios,
                });
            }
            prev = dx;
        }
        Err(Error::MaxIterExceeded {
            stage: "solve_uc",
            iterations: opts.max_iter,
        })
    }

    /// `u1` for an envelope.
    pub fn u1_of(&self, zeta: &[C]) -> Result<(Vec<C>, Vec<C>, Vec<C>)> {
        let tilde = self.map.scale(zeta)?;
        let plus = self.tilde_map(&tilde, TildeDirection::Inverse)?;
        let u1 = self.real_extension(&plus);
        Ok((tilde, plus, u1))
    }

    /// The full chain `zeta -> u`.
    pub fn lift(&self, zeta: &[C]) -> Result<ReductionState> {
        let (tilde, plus, u1) = self.u1_of(zeta)?;
        let mut st = self.solve_uc(&u1, &self.opts)?;
        st.u1tilde = tilde;
        st.u1plus = plus;
        Ok(st)
    }

    /// Fixed-point defect `|uc - G(u1, uc)|_X`, recomputed from scratch.
    pub fn fixed_point_defect(&self, st: &ReductionState) -> Result<f64> {
        let next = self.g_map(&st.u1, &st.uc)?;
        let d: Vec<C> = next.iter().zip(&st.uc).map(|(a, b)| a - b).collect();
        Ok(self.x_norm(&d))
    }

    pub fn eval_i(&self, u: &[C]) -> f64 {
        eval_i(&self.sym, self.params.c0, self.eps, u)
    }

    pub fn grad_i(&self, u: &[C]) -> Vec<C> {
        grad_i(&self.sym, self.params.c0, self.eps, u)
    }

    /// `I_eps` reassembled from the orthogonal splitting.
    pub fn split_value(&self, st: &ReductionState) -> f64 {
        let g = self.grid();
        let s = self.shift();
        let nq = g.weighted_sq(&self.sym.n, &st.uq);
        let nc = g.weighted_sq(&self.sym.n, &st.uc);
        let n1 = g.weighted_sq(&self.sym.n, &st.u1);
        let u2sq = g.product(&st.u2, &st.u2);
        0.5 * n1 - 0.5 * nq + 0.5 * s * g.l2_sq(&st.u1)
            + 0.5 * nc
            + g.inner(&u2sq, &st.u1)
            + g.inner(&u2sq, &st.u2) / 3.0
            + 0.5 * s * g.l2_sq(&st.u2)
    }

    /// `T_eps`, `T0` and the rest of the report, together with the lift.
    pub fn eval_teps(&self, zeta: &[C]) -> Result<(FunctionalReport, ReductionState)> {
        let st = self.lift(zeta)?;
        let i_eps = self.eval_i(&st.u);
        let t_eps = i_eps / (self.eps * self.eps);
        let (q, s, _) = self.ds.value_grad(zeta);
        let grad = self.pull_back(&self.grad_i(&st.u));
        let report = FunctionalReport {
            q,
            s,
            t0: q - s,
            e_eps: t_eps - (q - s),
            t_eps,
            i_eps,
            nehari_residual: self.ds.grid.inner(&grad, zeta),
            grad_norm: self.ds.grid.l2_sq(&grad).sqrt(),
        };
        Ok((report, st))
    }

    /// `T_eps` alone.
    pub fn value(&self, zeta: &[C]) -> Result<f64> {
        let st = self.lift(zeta)?;
        Ok(self.eval_i(&st.u) / (self.eps * self.eps))
    }

    /// `(T_eps, grad T_eps, lift)`.
    pub fn value_grad(&self, zeta: &[C]) -> Result<(f64, Vec<C>, ReductionState)> {
        let st = self.lift(zeta)?;
        let value = self.eval_i(&st.u) / (self.eps * self.eps);
        let grad = self.pull_back(&self.grad_i(&st.u));
        Ok((value, grad, st))
    }

    pub fn grad_teps(&self, zeta: &[C]) -> Result<Vec<C>> {
        Ok(self.value_grad(zeta)?.1)
    }

    /// Adjoint of `zeta -> u1` applied to an FDKP gradient.
    fn pull_back(&self, gi: &[C]) -> Vec<C> {
        let f = self.eps.powi(-3);
        let mut out = vec![ZERO; self.ds.grid.len()];
        for &(d, n) in &self.map.pairs {
            out[d] = f * gi[n] / self.tilde_ratio[n];
        }
        out
    }

    /// `int u^3`.
    pub fn cubic(&self, u: &[C]) -> f64 {
        cubic_integral(&self.sym, u)
    }
}

/// Full and band-resolved residuals of the steady equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualRecord {
    pub total: f64,
    pub z1: f64,
    pub z2: f64,
}

/// `|(n + c0 eps^2) u + P(u^2)|_{L2} / |u|_{L2}` and its parts on and off the bi-disc.
pub fn residual_report(p: &FdkpProblem, u: &[C]) -> ResidualRecord {
    let g = p.grid();
    let norm_u = g.l2_sq(u).sqrt();
    if norm_u == 0.0 {
        return ResidualRecord {
            total: 0.0,
            z1: 0.0,
            z2: 0.0,
        };
    }
    let r = p.grad_i(u);
    let (mut on, mut off) = (0.0, 0.0);
    for (v, &b) in r.iter().zip(&p.sym.chi_bi) {
        if b {
            on += v.norm_sqr();
        } else {
            off += v.norm_sqr();
        }
    }
    let a = g.area();
    ResidualRecord {
        total: (a * (on + off)).sqrt() / norm_u,
        z1: (a * on).sqrt() / norm_u,
        z2: (a * off).sqrt() / norm_u,
    }
}
