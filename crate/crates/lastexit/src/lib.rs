//! Last-exit and occupation-time functionals of spectrally negative Lévy
//! processes.
//!
//! The crate has four layers:
//!
//! * [`model`] — the parametric process families and their Laplace
//!   exponent `ψ` / inverse `Φ`;
//! * [`scale`] — the scale functions `W^{(q)}`, `Z^{(q)}`, `Z^{(q)}(·,θ)`
//!   (closed form or numerical Laplace inversion);
//! * [`transforms`] — closed-form joint transforms of last exit times,
//!   occupation times, and the position at the last exit;
//! * [`simulate`] — a direct Monte Carlo path simulator measuring the
//!   same functionals, used to validate every transform.

pub mod error;
mod invert;
pub mod model;
mod quad;
pub mod scale;
pub mod simulate;
pub mod transforms;

pub use error::{Error, Result};
pub use model::{Family, LevyModel};
pub use scale::{ScaleEvaluator, ScaleMethod};
pub use simulate::{Estimate, Horizon, McConfig, PathConfig, PathFunctionals};
pub use transforms::TransformQuery;
