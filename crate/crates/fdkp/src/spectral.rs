//! Periodic grids, transforms, multipliers and the weighted norms.
//!
//! Convention: the box is `[-lx, lx) x [-ly, ly)` sampled at
//! `x_p = -lx + p*hx`. Spectral coefficients are trigonometric-series
//! coefficients, `f(x) = sum c(i', j') exp(i pi (i' x / lx + j' y / ly))`, so
//! the forward transform carries the `1/(nx*ny)` factor and
//! `<f, g> = |Omega| * Re sum c_f conj(c_g)` with `|Omega| = 4 lx ly`.
//! Spectral arrays are stored centered: array index `i` holds mode
//! `i' = i - nx/2`, so index 0 is the Nyquist mode and `nx/2` is `k1 = 0`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C = Complex64;

/// Periodic rectangular grid with cached FFT plans.
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    k1: Vec<f64>,
    k2: Vec<f64>,
    sign: Vec<f64>,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("lx", &self.lx)
            .field("ly", &self.ly)
            .finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<Self>> {
        if !nx.is_power_of_two() || !ny.is_power_of_two() || nx < 4 || ny < 4 {
            return Err(Error::InvalidConfig(format!(
                "grid sizes must be powers of two >= 4, got {nx}x{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "box half-lengths must be positive, got ({lx}, {ly})"
            )));
        }
        let wavenumbers = |n: usize, l: f64| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    if i == 0 {
                        0.0
                    } else {
                        std::f64::consts::PI * (i as f64 - (n / 2) as f64) / l
                    }
                })
                .collect()
        };
        let k1 = wavenumbers(nx, lx);
        let k2 = wavenumbers(ny, ly);
        let mut sign = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                sign[j * nx + i] = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            nx,
            ny,
            lx,
            ly,
            k1,
            k2,
            sign,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
        }))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn area(&self) -> f64 {
        4.0 * self.lx * self.ly
    }

    pub fn hx(&self) -> f64 {
        2.0 * self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        2.0 * self.ly / self.ny as f64
    }

    pub fn dk1(&self) -> f64 {
        std::f64::consts::PI / self.lx
    }

    pub fn dk2(&self) -> f64 {
        std::f64::consts::PI / self.ly
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Signed mode index along x for array column `i`.
    #[inline]
    pub fn mode_x(&self, i: usize) -> i64 {
        i as i64 - (self.nx / 2) as i64
    }

    #[inline]
    pub fn mode_y(&self, j: usize) -> i64 {
        j as i64 - (self.ny / 2) as i64
    }

    /// Array column holding signed mode `m`, if representable (Nyquist excluded).
    pub fn col_of_mode(&self, m: i64) -> Option<usize> {
        let h = (self.nx / 2) as i64;
        if m > -h && m < h {
            Some((m + h) as usize)
        } else {
            None
        }
    }

    pub fn row_of_mode(&self, m: i64) -> Option<usize> {
        let h = (self.ny / 2) as i64;
        if m > -h && m < h {
            Some((m + h) as usize)
        } else {
            None
        }
    }

    /// Wavenumbers; the Nyquist entries are reported as 0 and flagged.
    pub fn k1(&self) -> &[f64] {
        &self.k1
    }

    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0
    }

    #[inline]
    pub fn zero_col(&self) -> usize {
        self.nx / 2
    }

    /// Index of the mode `-k`.
    #[inline]
    pub fn mirror(&self, n: usize) -> usize {
        let i = n % self.nx;
        let j = n / self.nx;
        self.idx((self.nx - i) % self.nx, (self.ny - j) % self.ny)
    }

    pub fn x(&self, p: usize) -> f64 {
        -self.lx + p as f64 * self.hx()
    }

    pub fn y(&self, q: usize) -> f64 {
        -self.ly + q as f64 * self.hy()
    }

    /// Membership in the 2/3-rule retained band `|i'| <= nx/3, |j'| <= ny/3`.
    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        self.mode_x(i).unsigned_abs() as usize <= self.nx / 3
            && self.mode_y(j).unsigned_abs() as usize <= self.ny / 3
    }

    /// Physical samples to spectral coefficients.
    pub fn forward_in_place(&self, data: &mut [C]) {
        assert_eq!(data.len(), self.len());
        for (v, s) in data.iter_mut().zip(&self.sign) {
            *v *= *s;
        }
        self.fft2(data, false);
        let scale = self.global_sign() / self.len() as f64;
        for (v, s) in data.iter_mut().zip(&self.sign) {
            *v *= *s * scale;
        }
    }

    /// Spectral coefficients to physical samples.
    pub fn inverse_in_place(&self, data: &mut [C]) {
        assert_eq!(data.len(), self.len());
        let g = self.global_sign();
        for (v, s) in data.iter_mut().zip(&self.sign) {
            *v *= *s * g;
        }
        self.fft2(data, true);
        for (v, s) in data.iter_mut().zip(&self.sign) {
            *v *= *s;
        }
    }

    pub fn forward(&self, phys: &[C]) -> Vec<C> {
        let mut d = phys.to_vec();
        self.forward_in_place(&mut d);
        d
    }

    pub fn inverse(&self, spec: &[C]) -> Vec<C> {
        let mut d = spec.to_vec();
        self.inverse_in_place(&mut d);
        d
    }

    fn global_sign(&self) -> f64 {
        let s = (self.nx / 2 + self.ny / 2) % 2;
        if s == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn fft2(&self, data: &mut [C], inverse: bool) {
        let (nx, ny) = (self.nx, self.ny);
        let (fx, fy) = if inverse {
            (&self.inv_x, &self.inv_y)
        } else {
            (&self.fwd_x, &self.fwd_y)
        };
        let rows_per_task = (4096 / nx).max(1);
        data.par_chunks_mut(nx * rows_per_task)
            .for_each(|chunk| fx.process(chunk));
        let mut t = vec![C::new(0.0, 0.0); nx * ny];
        transpose(data, &mut t, nx, ny);
        let cols_per_task = (4096 / ny).max(1);
        t.par_chunks_mut(ny * cols_per_task)
            .for_each(|chunk| fy.process(chunk));
        transpose(&t, data, ny, nx);
    }

    /// Dot product `|Omega| Re sum a conj(b)` over spectral arrays.
    pub fn inner(&self, a: &[C], b: &[C]) -> f64 {
        let s: f64 = a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum();
        self.area() * s
    }

    /// Weighted quadratic form `|Omega| sum w |a|^2`.
    pub fn weighted_sq(&self, w: &[f64], a: &[C]) -> f64 {
        let s: f64 = a.iter().zip(w).map(|(x, w)| w * x.norm_sqr()).sum();
        self.area() * s
    }

    pub fn l2_sq(&self, a: &[C]) -> f64 {
        self.area() * a.iter().map(|x| x.norm_sqr()).sum::<f64>()
    }

    /// Zero the `k1 = 0` column.
    pub fn project_zero_mass(&self, a: &mut [C]) {
        let c = self.zero_col();
        for j in 0..self.ny {
            a[self.idx(c, j)] = C::new(0.0, 0.0);
        }
    }

    /// Zero everything outside the 2/3-rule band (Nyquist modes included).
    pub fn project_band(&self, a: &mut [C]) {
        for j in 0..self.ny {
            for i in 0..self.nx {
                if !self.in_band(i, j) {
                    a[self.idx(i, j)] = C::new(0.0, 0.0);
                }
            }
        }
    }

    /// Product of two spectral fields, returned band-limited.
    pub fn product(&self, a: &[C], b: &[C]) -> Vec<C> {
        let pa = self.inverse(a);
        let mut pb = self.inverse(b);
        for (x, y) in pb.iter_mut().zip(&pa) {
            *x *= *y;
        }
        self.forward_in_place(&mut pb);
        self.project_band(&mut pb);
        pb
    }

    /// Continuous translation `f(x - tau)`.
    pub fn translate(&self, a: &mut [C], tau_x: f64, tau_y: f64) {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let ph = -(self.k1[i] * tau_x + self.k2[j] * tau_y);
                a[self.idx(i, j)] *= C::from_polar(1.0, ph);
            }
        }
    }
}

fn transpose(src: &[C], dst: &mut [C], w: usize, h: usize) {
    const B: usize = 32;
    for jb in (0..h).step_by(B) {
        for ib in (0..w).step_by(B) {
            for j in jb..(jb + B).min(h) {
                for i in ib..(ib + B).min(w) {
                    dst[i * h + j] = src[j * w + i];
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rep {
    Physical,
    Spectral,
}

/// Complex samples or coefficients on a grid.
#[derive(Clone, Debug)]
pub struct Field {
    pub grid: Arc<Grid2D>,
    pub values: Vec<C>,
    pub rep: Rep,
    pub real: bool,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid2D>, rep: Rep) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![C::new(0.0, 0.0); grid.len()],
            rep,
            real: false,
        }
    }

    pub fn from_fn(grid: &Arc<Grid2D>, f: impl Fn(f64, f64) -> C) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for q in 0..grid.ny {
            for p in 0..grid.nx {
                values.push(f(grid.x(p), grid.y(q)));
            }
        }
        Self {
            grid: grid.clone(),
            values,
            rep: Rep::Physical,
            real: false,
        }
    }

    pub fn spectral(grid: &Arc<Grid2D>, values: Vec<C>) -> Self {
        assert_eq!(values.len(), grid.len());
        Self {
            grid: grid.clone(),
            values,
            rep: Rep::Spectral,
            real: false,
        }
    }

    pub fn tagged_real(mut self) -> Self {
        self.real = true;
        self
    }

    pub fn to_spectral(&self) -> Field {
        match self.rep {
            Rep::Spectral => self.clone(),
            Rep::Physical => Field {
                grid: self.grid.clone(),
                values: self.grid.forward(&self.values),
                rep: Rep::Spectral,
                real: self.real,
            },
        }
    }

    pub fn to_physical(&self) -> Field {
        match self.rep {
            Rep::Physical => self.clone(),
            Rep::Spectral => Field {
                grid: self.grid.clone(),
                values: self.grid.inverse(&self.values),
                rep: Rep::Physical,
                real: self.real,
            },
        }
    }

    /// Largest relative violation of `c(-k) = conj c(k)`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let s = self.to_spectral();
        let g = &s.grid;
        let scale = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for n in 0..g.len() {
            let (i, j) = (n % g.nx, n / g.nx);
            if g.is_nyquist(i, j) {
                continue;
            }
            let d = (s.values[n] - s.values[g.mirror(n)].conj()).norm();
            worst = worst.max(d);
        }
        worst / scale
    }

    /// Checks the real tag against the data.
    pub fn validate(&self) -> Result<()> {
        if self.real && self.conjugate_symmetry_defect() > 1e-12 {
            return Err(Error::Constraint(
                "field tagged real is not conjugate symmetric".into(),
            ));
        }
        Ok(())
    }
}

/// Inverse of forward, checked against the grid.
pub fn dft_roundtrip(f: &Field) -> Result<Field> {
    if f.values.len() != f.grid.len() {
        return Err(Error::GridMismatch(format!(
            "field has {} values, grid has {}",
            f.values.len(),
            f.grid.len()
        )));
    }
    let s = f.to_spectral();
    Ok(match f.rep {
        Rep::Physical => s.to_physical(),
        Rep::Spectral => s,
    })
}

/// Coefficients at or below this size are transform roundoff.
fn roundoff_floor(a: &[C]) -> f64 {
    1e-13 * a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Multiplies spectral coefficients by `symbol`; a non-finite entry is an
/// error only where the field has content above roundoff, and is zeroed otherwise.
///
/// With `x_preserving` the `k1 = 0` column is forced to zero.
pub fn apply_multiplier(f: &Field, symbol: &[f64], x_preserving: bool) -> Result<Field> {
    let g = &f.grid;
    if symbol.len() != g.len() {
        return Err(Error::GridMismatch(format!(
            "symbol has {} entries, grid has {}",
            symbol.len(),
            g.len()
        )));
    }
    let mut s = f.to_spectral();
    let floor = roundoff_floor(&s.values);
    for (n, v) in s.values.iter_mut().enumerate() {
        let w = symbol[n];
        if !w.is_finite() {
            if v.norm() > floor {
                return Err(Error::NonFiniteSymbol {
                    i: g.mode_x(n % g.nx),
                    j: g.mode_y(n / g.nx),
                });
            }
            *v = C::new(0.0, 0.0);
            continue;
        }
        *v *= w;
    }
    if x_preserving {
        g.project_zero_mass(&mut s.values);
    }
    Ok(s)
}

/// Complex-valued multiplier variant, e.g. `i k1`.
pub fn apply_complex_multiplier(f: &Field, symbol: &[C]) -> Result<Field> {
    let g = &f.grid;
    if symbol.len() != g.len() {
        return Err(Error::GridMismatch("symbol size".into()));
    }
    let mut s = f.to_spectral();
    let floor = roundoff_floor(&s.values);
    for (n, v) in s.values.iter_mut().enumerate() {
        let w = symbol[n];
        if !(w.re.is_finite() && w.im.is_finite()) {
            if v.norm() > floor {
                return Err(Error::NonFiniteSymbol {
                    i: g.mode_x(n % g.nx),
                    j: g.mode_y(n / g.nx),
                });
            }
            *v = C::new(0.0, 0.0);
            continue;
        }
        *v *= w;
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    L2,
    H1,
    Hs(f64),
    X(f64),
    Y,
    Z(f64),
    H1dotOmega0(f64),
    Linf,
    CSup,
}

impl NormKind {
    fn needs_zero_mass(self) -> bool {
        matches!(
            self,
            NormKind::X(_) | NormKind::Y | NormKind::Z(_) | NormKind::H1dotOmega0(_)
        )
    }

    /// Spectral weight at `(k1, k2)`; `None` for the sup norms.
    pub fn weight(self, k1: f64, k2: f64) -> Option<f64> {
        let kk = k1 * k1 + k2 * k2;
        let r = kk.sqrt();
        Some(match self {
            NormKind::L2 => 1.0,
            NormKind::H1 => 1.0 + kk,
            NormKind::Hs(s) => (1.0 + kk).powf(s),
            NormKind::X(s) => {
                if k1 == 0.0 {
                    return Some(0.0);
                }
                let q = k2 * k2 / (k1 * k1);
                1.0 + q + q * k2 * k2 + kk.powf(s)
            }
            NormKind::Y => {
                if k1 == 0.0 {
                    return Some(0.0);
                }
                1.0 + k2.abs() / k1.abs() + r.powf(1.5) / k1.abs()
            }
            NormKind::Z(s) => {
                if r == 0.0 {
                    1.0
                } else {
                    1.0 + r + k1 * k1 * r.powf(2.0 * s - 3.0)
                }
            }
            NormKind::H1dotOmega0(w0) => {
                let d = k1.abs() - w0;
                d * d + k2 * k2
            }
            NormKind::Linf | NormKind::CSup => return None,
        })
    }

    pub fn weights(self, g: &Grid2D) -> Option<Vec<f64>> {
        let mut w = vec![0.0; g.len()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                if g.is_nyquist(i, j) {
                    continue;
                }
                w[g.idx(i, j)] = self.weight(g.k1()[i], g.k2()[j])?;
            }
        }
        Some(w)
    }
}

/// Norm of `f` of the given kind.
pub fn norm(f: &Field, kind: NormKind) -> Result<f64> {
    let g = &f.grid;
    match kind {
        NormKind::Linf => {
            let p = f.to_physical();
            return Ok(p.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        NormKind::CSup => return Ok(sup_refined(f)),
        _ => {}
    }
    let s = f.to_spectral();
    if kind.needs_zero_mass() {
        check_zero_mass(g, &s.values)?;
    }
    let w = kind.weights(g).expect("weighted kind");
    let mut acc = 0.0;
    for (n, v) in s.values.iter().enumerate() {
        if g.is_nyquist(n % g.nx, n / g.nx) {
            acc += v.norm_sqr();
        } else {
            acc += w[n] * v.norm_sqr();
        }
    }
    Ok((g.area() * acc).sqrt())
}

/// Weighted norm of a spectral array with precomputed weights.
pub fn weighted_norm(g: &Grid2D, w: &[f64], a: &[C]) -> f64 {
    g.weighted_sq(w, a).sqrt()
}

pub fn check_zero_mass(g: &Grid2D, a: &[C]) -> Result<()> {
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let c = g.zero_col();
    for j in 0..g.ny {
        let v = a[g.idx(c, j)].norm();
        if v > 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Constraint(format!(
                "nonzero k1 = 0 coefficient at j' = {} ({v:e})",
                g.mode_y(j)
            )));
        }
    }
    Ok(())
}

/// Sup norm on a twice finer grid obtained by spectral zero padding.
fn sup_refined(f: &Field) -> f64 {
    let g = &f.grid;
    let s = f.to_spectral();
    let fine = match Grid2D::new(2 * g.nx, 2 * g.ny, g.lx, g.ly) {
        Ok(fine) => fine,
        Err(_) => return f64::NAN,
    };
    let mut pad = vec![C::new(0.0, 0.0); fine.len()];
    for j in 1..g.ny {
        for i in 1..g.nx {
            let fi = fine.col_of_mode(g.mode_x(i)).unwrap();
            let fj = fine.row_of_mode(g.mode_y(j)).unwrap();
            pad[fine.idx(fi, fj)] = s.values[g.idx(i, j)];
        }
    }
    fine.inverse_in_place(&mut pad);
    let base = f.to_physical();
    pad.iter()
        .chain(base.values.iter())
        .map(|v| v.norm())
        .fold(0.0, f64::max)
}

/// Largest L2 norm over a tiling of the box by unit squares.
///
/// Squares are anchored at the lower-left corner of the box and snapped to
/// the grid; partial squares at the far edges are included.
pub fn local_sup_l2(f: &Field) -> f64 {
    let p = f.to_physical();
    let g = &p.grid;
    let (hx, hy) = (g.hx(), g.hy());
    let cx = (2.0 * g.lx).ceil() as usize;
    let cy = (2.0 * g.ly).ceil() as usize;
    let mut acc = vec![0.0; cx * cy];
    for q in 0..g.ny {
        let by = (((q as f64) * hy + 1e-12).floor() as usize).min(cy - 1);
        for pi in 0..g.nx {
            let bx = (((pi as f64) * hx + 1e-12).floor() as usize).min(cx - 1);
            acc[by * cx + bx] += p.values[g.idx(pi, q)].norm_sqr();
        }
    }
    acc.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt() * (hx * hy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_mode_has_unit_coefficient() {
        let g = Grid2D::new(16, 8, 3.0, 2.0).unwrap();
        let (p, q) = (3i64, -2i64);
        let f = Field::from_fn(&g, |x, y| {
            let ph = std::f64::consts::PI * (p as f64 * x / 3.0 + q as f64 * y / 2.0);
            C::from_polar(1.0, ph)
        });
        let s = f.to_spectral();
        let n = g.idx(g.col_of_mode(p).unwrap(), g.row_of_mode(q).unwrap());
        for (m, v) in s.values.iter().enumerate() {
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((v - want).norm() < 1e-13, "mode {m}: {v}");
        }
    }

    #[test]
    fn origin_sits_at_center_sample() {
        let g = Grid2D::new(8, 8, 1.0, 1.0).unwrap();
        assert_eq!(g.x(4), 0.0);
        assert_eq!(g.y(4), 0.0);
    }

    #[test]
    fn mirror_is_involution() {
        let g = Grid2D::new(8, 16, 1.0, 1.0).unwrap();
        for n in 0..g.len() {
            assert_eq!(g.mirror(g.mirror(n)), n);
        }
    }

    #[test]
    fn wavenumbers_are_antisymmetric() {
        let g = Grid2D::new(32, 16, 2.5, 1.5).unwrap();
        for i in 1..g.nx {
            assert_eq!(g.k1()[i], -g.k1()[g.nx - i]);
        }
        assert_eq!(g.k1()[0], 0.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2D::new(12, 16, 1.0, 1.0).is_err());
        assert!(Grid2D::new(16, 16, -1.0, 1.0).is_err());
    }

    #[test]
    fn translation_by_grid_step_matches_roll() {
        let g = Grid2D::new(16, 16, 2.0, 2.0).unwrap();
        let f = Field::from_fn(&g, |x, y| C::new((-(x * x + 2.0 * y * y)).exp(), 0.0));
        let mut s = f.to_spectral().values;
        g.project_band(&mut s);
        let before = g.inverse(&s);
        g.translate(&mut s, g.hx(), 0.0);
        let after = g.inverse(&s);
        for q in 0..g.ny {
            for p in 1..g.nx {
                let d = after[g.idx(p, q)] - before[g.idx(p - 1, q)];
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_has_unit_local_norm() {
        let g = Grid2D::new(16, 16, 2.0, 2.0).unwrap();
        let f = Field::from_fn(&g, |_, _| C::new(1.0, 0.0));
        assert!((local_sup_l2(&f) - 1.0).abs() < 1e-12);
    }
}
