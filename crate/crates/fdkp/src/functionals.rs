//! The DS functional `T0 = Q - S`, the FDKP functional `I_eps`, and their gradients.
//!
//! Fields are spectral arrays in the convention of [`crate::spectral`];
//! gradients are taken with respect to `Re <., .>` on that grid.

use std::sync::Arc;

use crate::error::Result;
use crate::spectral::{Grid2D, C};
use crate::symbols::{ModelParams, SymbolTable};

/// Values reported for one envelope evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FunctionalReport {
    pub q: f64,
    pub s: f64,
    pub t0: f64,
    pub e_eps: f64,
    pub t_eps: f64,
    pub i_eps: f64,
    pub nehari_residual: f64,
    pub grad_norm: f64,
}

impl FunctionalReport {
    pub const CSV_HEADER: &'static str = "Q,S,T0,Eeps,Teps,Ieps,nehari_residual,grad_norm";

    pub fn csv_row(&self) -> String {
        format!(
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            self.q,
            self.s,
            self.t0,
            self.e_eps,
            self.t_eps,
            self.i_eps,
            self.nehari_residual,
            self.grad_norm
        )
    }
}

/// The DS functional on an envelope grid.
#[derive(Clone, Debug)]
pub struct DsProblem {
    pub grid: Arc<Grid2D>,
    pub params: ModelParams,
    pub q: Vec<f64>,
    pub l: Vec<f64>,
}

impl DsProblem {
    pub fn new(params: &ModelParams, grid: &Arc<Grid2D>) -> Result<Self> {
        params.validate()?;
        let mut q = vec![0.0; grid.len()];
        let mut l = vec![0.0; grid.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (k1, k2) = (grid.k1()[i], grid.k2()[j]);
                let n = grid.idx(i, j);
                q[n] = params.q_symbol(k1, k2);
                if grid.in_band(i, j) {
                    l[n] = params.l_symbol(k1, k2);
                }
            }
        }
        Ok(Self {
            grid: grid.clone(),
            params: params.clone(),
            q,
            l,
        })
    }

    pub fn eval_q(&self, z: &[C]) -> f64 {
        self.grid.weighted_sq(&self.q, z)
    }

    /// Band-limited density `P_K |zeta|^2`.
    pub fn density(&self, z: &[C]) -> Vec<C> {
        let mut w = self.grid.inverse(z);
        for v in w.iter_mut() {
            *v = C::new(v.norm_sqr(), 0.0);
        }
        self.grid.forward_in_place(&mut w);
        self.grid.project_band(&mut w);
        w
    }

    pub fn eval_s(&self, z: &[C]) -> f64 {
        self.grid.weighted_sq(&self.l, &self.density(z))
    }

    pub fn eval_t0(&self, z: &[C]) -> f64 {
        self.eval_q(z) - self.eval_s(z)
    }

    /// Returns `(Q, S, grad T0)`.
    pub fn value_grad(&self, z: &[C]) -> (f64, f64, Vec<C>) {
        let g = &self.grid;
        let mut phys = g.inverse(z);
        let mut w: Vec<C> = phys.iter().map(|v| C::new(v.norm_sqr(), 0.0)).collect();
        g.forward_in_place(&mut w);
        g.project_band(&mut w);
        let s = g.weighted_sq(&self.l, &w);
        for (v, l) in w.iter_mut().zip(&self.l) {
            *v *= *l;
        }
        g.inverse_in_place(&mut w);
        for (p, v) in phys.iter_mut().zip(&w) {
            *p *= 4.0 * v.re;
        }
        g.forward_in_place(&mut phys);
        let mut q = 0.0;
        for (n, gv) in phys.iter_mut().enumerate() {
            q += self.q[n] * z[n].norm_sqr();
            *gv = 2.0 * self.q[n] * z[n] - *gv;
        }
        (g.area() * q, s, phys)
    }

    pub fn grad_t0(&self, z: &[C]) -> Vec<C> {
        self.value_grad(z).2
    }

    /// `dT0[z](z) = 2Q - 4S`.
    pub fn nehari_value(&self, z: &[C]) -> f64 {
        2.0 * self.eval_q(z) - 4.0 * self.eval_s(z)
    }

    pub fn report(&self, z: &[C]) -> FunctionalReport {
        let (q, s, grad) = self.value_grad(z);
        FunctionalReport {
            q,
            s,
            t0: q - s,
            e_eps: 0.0,
            t_eps: q - s,
            i_eps: f64::NAN,
            nehari_residual: 2.0 * q - 4.0 * s,
            grad_norm: {
                let mut g = grad;
                self.grid.project_band(&mut g);
                self.grid.l2_sq(&g).sqrt()
            },
        }
    }

    /// Keeps only the 2/3-rule band.
    pub fn project(&self, z: &mut [C]) {
        self.grid.project_band(z);
    }
}

/// `I_eps(u) = 1/2 <(n + c0 eps^2) u, u> + 1/3 int u^3` on a zero-mass band-limited field.
pub fn eval_i(sym: &SymbolTable, c0: f64, eps: f64, u: &[C]) -> f64 {
    let g = &sym.grid;
    let shift = c0 * eps * eps;
    let mut quad = 0.0;
    for (n, v) in u.iter().enumerate() {
        quad += (sym.n[n] + shift) * v.norm_sqr();
    }
    let sq = g.product(u, u);
    0.5 * g.area() * quad + g.inner(&sq, u) / 3.0
}

/// `(n + c0 eps^2) u + P(u^2)`, projected to the zero-mass band.
pub fn grad_i(sym: &SymbolTable, c0: f64, eps: f64, u: &[C]) -> Vec<C> {
    let g = &sym.grid;
    let shift = c0 * eps * eps;
    let mut out = g.product(u, u);
    for (n, v) in out.iter_mut().enumerate() {
        *v += (sym.n[n] + shift) * u[n];
    }
    g.project_zero_mass(&mut out);
    out
}

/// `int u^3` via the band-limited square.
pub fn cubic_integral(sym: &SymbolTable, u: &[C]) -> f64 {
    let g = &sym.grid;
    g.inner(&g.product(u, u), u)
}
