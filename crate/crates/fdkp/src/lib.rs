//! Solitary waves of the full-dispersion KP equation and their
//! Davey-Stewartson envelope limit, computed by frequency splitting,
//! a contraction-mapping reduction and Nehari-manifold minimisation.

pub mod checks;
pub mod error;
pub mod experiments;
pub mod functionals;
pub mod io;
pub mod minimizer;
pub mod reduction;
pub mod spectral;
pub mod symbols;

pub use error::{Error, Result};
pub use functionals::{DsProblem, FunctionalReport};
pub use minimizer::{minimize_ground_state, DescentOptions, GroundStateReport, Objective};
pub use reduction::{FdkpProblem, PicardForm, ReductionState};
pub use spectral::{Field, Grid2D, NormKind, Rep, C};
pub use symbols::{ModelParams, SymbolTable, ZeroMode};
