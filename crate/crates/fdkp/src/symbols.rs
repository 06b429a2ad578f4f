//! Dispersion symbols, the speed minimum, DS coefficients and frequency masks.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid2D, Rep, C};

fn tanh_ratio(w: f64) -> f64 {
    if w < 1e-4 {
        let w2 = w * w;
        1.0 - w2 / 3.0 + 2.0 * w2 * w2 / 15.0
    } else {
        w.tanh() / w
    }
}

/// Linear wave speed `c(w) = (1 + beta w^2)^(1/2) (tanh w / w)^(1/2)`.
pub fn wave_speed(beta: f64, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "wave speed needs omega >= 0, got {omega}"
        )));
    }
    Ok(speed(beta, omega))
}

#[inline]
pub(crate) fn speed(beta: f64, w: f64) -> f64 {
    ((1.0 + beta * w * w) * tanh_ratio(w)).sqrt()
}

/// Logarithmic derivative `c'(w) / c(w)`.
fn log_slope(beta: f64, w: f64) -> f64 {
    let t = 2.0 * w;
    let hyper = if t < 1e-3 {
        // 1/sinh(t) - 1/t
        -t / 6.0 + 7.0 * t * t * t / 360.0
    } else {
        1.0 / t.sinh() - 1.0 / t
    };
    beta * w / (1.0 + beta * w * w) + hyper
}

/// Derivative of the wave speed.
pub fn wave_speed_slope(beta: f64, omega: f64) -> f64 {
    speed(beta, omega) * log_slope(beta, omega)
}

/// Location and value of the positive minimum of `c`.
pub fn find_min_speed(beta: f64) -> Result<(f64, f64)> {
    check_beta(beta)?;
    let mut lo = 1e-6;
    if log_slope(beta, lo) >= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "no interior speed minimum for beta = {beta}"
        )));
    }
    let mut hi = lo;
    while log_slope(beta, hi) < 0.0 {
        lo = hi;
        hi *= 1.5;
        if hi > 1e6 {
            return Err(Error::InvalidConfig(format!(
                "speed minimum not bracketed for beta = {beta}"
            )));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if log_slope(beta, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut w = if log_slope(beta, lo).abs() < log_slope(beta, hi).abs() {
        lo
    } else {
        hi
    };
    // Newton polish with a secant slope; kept only if it improves.
    for _ in 0..3 {
        let h = 1e-6 * w;
        let d = (log_slope(beta, w + h) - log_slope(beta, w - h)) / (2.0 * h);
        let cand = w - log_slope(beta, w) / d;
        if cand.is_finite() && log_slope(beta, cand).abs() < log_slope(beta, w).abs() {
            w = cand;
        } else {
            break;
        }
    }
    Ok((w, speed(beta, w)))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0 / 3.0) {
        return Err(Error::InvalidConfig(format!(
            "beta must lie in (0, 1/3), got {beta}"
        )));
    }
    Ok(())
}

/// Full-dispersion symbol; the `k1 = 0` column is zero.
pub fn m_symbol(beta: f64, k1: f64, k2: f64) -> f64 {
    if k1 == 0.0 {
        return 0.0;
    }
    let r = (k1 * k1 + k2 * k2).sqrt();
    speed(beta, r) * (1.0 + 2.0 * k2 * k2 / (k1 * k1)).sqrt()
}

fn second_difference(f: impl Fn(f64) -> f64) -> f64 {
    let f0 = f(0.0);
    let d = |h: f64| (f(h) - 2.0 * f0 + f(-h)) / (h * h);
    let mut h = 0.1;
    let mut prev: Vec<f64> = vec![d(h)];
    let mut best = prev[0];
    for level in 1..12 {
        h *= 0.5;
        let mut row = vec![d(h)];
        let mut p4 = 1.0;
        for k in 1..=level {
            p4 *= 4.0;
            let v = (p4 * row[k - 1] - prev[k - 1]) / (p4 - 1.0);
            row.push(v);
        }
        let cand = row[level];
        if level >= 2 && (cand - best).abs() < 1e-8 * cand.abs().max(1e-3) {
            return cand;
        }
        best = cand;
        prev = row;
    }
    best
}

/// DS coefficients `(a1, a2, a3)` by Richardson-extrapolated differences.
pub fn ds_coefficients(beta: f64, omega0: f64, c0: f64) -> Result<(f64, f64, f64)> {
    let n11 = second_difference(|t| m_symbol(beta, omega0 + t, 0.0) - c0);
    let n22 = second_difference(|t| m_symbol(beta, omega0, t) - c0);
    let (a1, a2) = (n11 / 8.0, n22 / 8.0);
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(Error::Constraint(format!(
            "DS coefficients not elliptic: a1 = {a1}, a2 = {a2}"
        )));
    }
    Ok((a1, a2, c0 / 4.0))
}

/// Value given to `L(0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroMode {
    /// Same as the rest of the `k1 = 0` column, as the zero-mass reduction produces.
    ZeroMassLimit,
    /// The limit along the `k2 = 0` axis, `1/(16 n2) + 1/(8 (1 - c0))`.
    AxisLimit,
}

#[derive(Clone, Debug)]
pub struct ModelParams {
    pub beta: f64,
    pub eps: f64,
    pub delta: f64,
    pub omega0: f64,
    pub c0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// `n(2 omega0, 0)`.
    pub n2: f64,
    pub s: f64,
    pub theta: f64,
    pub lambda_cap: f64,
    pub m_cap: f64,
    pub zero_mode: ZeroMode,
}

impl ModelParams {
    pub fn new(beta: f64) -> Result<Self> {
        let (omega0, c0) = find_min_speed(beta)?;
        let (a1, a2, a3) = ds_coefficients(beta, omega0, c0)?;
        let p = Self {
            beta,
            eps: 0.0,
            delta: omega0 / 4.0,
            omega0,
            c0,
            a1,
            a2,
            a3,
            n2: m_symbol(beta, 2.0 * omega0, 0.0) - c0,
            s: 2.0,
            theta: 0.1,
            lambda_cap: 10.0,
            m_cap: 10.0,
            zero_mode: ZeroMode::ZeroMassLimit,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be >= 0, got {}", self.eps));
        }
        if !(self.delta > 0.0 && self.delta < self.omega0 / 3.0) {
            return bad(format!(
                "delta must lie in (0, omega0/3) = (0, {}), got {}",
                self.omega0 / 3.0,
                self.delta
            ));
        }
        if !(self.c0 > 0.0 && self.c0 < 1.0) {
            return bad(format!("c0 = {} outside (0, 1)", self.c0));
        }
        if !(self.a1 > 0.0 && self.a2 > 0.0 && self.a3 > 0.0) {
            return bad("DS coefficients must be positive".into());
        }
        if !(self.n2 > 0.0) {
            return bad(format!("n(2 omega0, 0) = {} is not positive", self.n2));
        }
        if !(self.s > 1.5) {
            return bad(format!("s must exceed 3/2, got {}", self.s));
        }
        if !(self.theta > 0.0 && self.theta < 1.0 / 6.0) {
            return bad(format!("theta must lie in (0, 1/6), got {}", self.theta));
        }
        Ok(())
    }

    /// Quadratic DS symbol `a1 k1^2 + a2 k2^2 + a3`.
    pub fn q_symbol(&self, k1: f64, k2: f64) -> f64 {
        self.a1 * k1 * k1 + self.a2 * k2 * k2 + self.a3
    }

    /// Nonlocal quartic symbol `L(k)`.
    pub fn l_symbol(&self, k1: f64, k2: f64) -> f64 {
        let base = 1.0 / (16.0 * self.n2);
        if k1 == 0.0 {
            if k2 == 0.0 && self.zero_mode == ZeroMode::AxisLimit {
                return base + 1.0 / (8.0 * (1.0 - self.c0));
            }
            return base;
        }
        base + 0.125 / ((1.0 + 2.0 * k2 * k2 / (k1 * k1)).sqrt() - self.c0)
    }

    /// Elliptic model `n~` of `n` near `(+-omega0, 0)`.
    pub fn n_tilde(&self, k1: f64, k2: f64) -> f64 {
        let d = k1.abs() - self.omega0;
        4.0 * self.a1 * d * d + 4.0 * self.a2 * k2 * k2
    }
}

/// Multiplier arrays and masks on an FDKP grid.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    pub grid: Arc<Grid2D>,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    pub n_tilde: Vec<f64>,
    pub l: Vec<f64>,
    /// `(1 - chi)/n` on the zero-mass band, zero elsewhere.
    pub inv_x2: Vec<f64>,
    pub chi_plus: Vec<bool>,
    pub chi_minus: Vec<bool>,
    pub chi_bi: Vec<bool>,
    /// Smallest `n` off the bi-disc.
    pub n_min: f64,
    /// Largest `|n/n~ - 1| / |k - (omega0, 0)|` on the plus disc.
    pub ratio_const: f64,
    /// Array index of the carrier `(omega0, 0)` when it is a grid mode.
    pub carrier: Option<usize>,
}

impl SymbolTable {
    pub fn build(params: &ModelParams, grid: &Arc<Grid2D>) -> Result<Self> {
        params.validate()?;
        let g = grid;
        let w0 = params.omega0;
        if w0 < 4.0 * g.dk1() {
            return Err(Error::InvalidConfig(format!(
                "grid too coarse: omega0 = {w0} spans fewer than 4 spacings {}",
                g.dk1()
            )));
        }
        let nyq = std::f64::consts::PI * (g.nx / 2) as f64 / g.lx;
        if 2.0 * w0 >= nyq {
            return Err(Error::InvalidConfig(format!(
                "2 omega0 = {} beyond the k1 Nyquist {nyq}",
                2.0 * w0
            )));
        }
        let len = g.len();
        let mut t = Self {
            grid: g.clone(),
            m: vec![0.0; len],
            n: vec![0.0; len],
            n_tilde: vec![0.0; len],
            l: vec![0.0; len],
            inv_x2: vec![0.0; len],
            chi_plus: vec![false; len],
            chi_minus: vec![false; len],
            chi_bi: vec![false; len],
            n_min: f64::INFINITY,
            ratio_const: 0.0,
            carrier: None,
        };
        let carrier_col = {
            let m = (w0 / g.dk1()).round();
            if (m * g.dk1() - w0).abs() <= 1e-9 * g.dk1() {
                g.col_of_mode(m as i64)
            } else {
                None
            }
        };
        let carrier_row = g.row_of_mode(0).unwrap();
        let r = params.delta * (1.0 + 1e-12);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let idx = g.idx(i, j);
                if g.is_nyquist(i, j) {
                    continue;
                }
                let (k1, k2) = (g.k1()[i], g.k2()[j]);
                let plus = ((k1 - w0).powi(2) + k2 * k2).sqrt() <= r;
                let minus = ((k1 + w0).powi(2) + k2 * k2).sqrt() <= r;
                t.chi_plus[idx] = plus;
                t.chi_minus[idx] = minus;
                t.chi_bi[idx] = plus || minus;
                let m = m_symbol(params.beta, k1, k2);
                t.m[idx] = m;
                t.l[idx] = params.l_symbol(k1, k2);
                if k1 == 0.0 {
                    continue;
                }
                let is_carrier = j == carrier_row
                    && carrier_col.is_some_and(|c| i == c || i == g.nx - c);
                let n = if is_carrier { 0.0 } else { m - params.c0 };
                t.n[idx] = n;
                t.n_tilde[idx] = params.n_tilde(k1, k2);
                if !(plus || minus) {
                    if !(n > 0.0) {
                        return Err(Error::Constraint(format!(
                            "n = {n} not positive off the bi-disc at ({k1}, {k2})"
                        )));
                    }
                    t.inv_x2[idx] = 1.0 / n;
                    t.n_min = t.n_min.min(n);
                } else if plus && !is_carrier {
                    let dist = ((k1 - w0).powi(2) + k2 * k2).sqrt();
                    let c = (n / t.n_tilde[idx] - 1.0).abs() / dist;
                    t.ratio_const = t.ratio_const.max(c);
                }
            }
        }
        if let Some(c) = carrier_col {
            t.carrier = Some(g.idx(c, carrier_row));
        }
        Ok(t)
    }

    /// Exports a symbol as a spectral field for inspection.
    pub fn as_field(&self, values: &[f64]) -> Field {
        Field {
            grid: self.grid.clone(),
            values: values.iter().map(|&v| C::new(v, 0.0)).collect(),
            rep: Rep::Spectral,
            real: false,
        }
    }
}

/// `(omega, c)` samples over `[0, omega_max]` plus the minimum.
pub fn dispersion_table(beta: f64, omega_max: f64, samples: usize) -> Result<(Vec<(f64, f64)>, (f64, f64))> {
    if samples < 2 || !(omega_max > 0.0) {
        return Err(Error::InvalidConfig("dispersion range".into()));
    }
    let rows = (0..samples)
        .map(|i| {
            let w = omega_max * i as f64 / (samples - 1) as f64;
            (w, speed(beta, w))
        })
        .collect();
    Ok((rows, find_min_speed(beta)?))
}
