//! Exact construction of multivariate orthogonal polynomials with
//! hyperoctahedral symmetry, their truncated asymptotic functions, and the
//! numerical experiments that measure how fast the two approach each other.
//!
//! Everything is computed in exact rational arithmetic. Floating point only
//! appears when reporting norms, slopes and deviations.
//!
//! Module map:
//!
//! * [`hyperoctahedral`]: signed permutations, dominant weights, dominance order.
//! * [`laurent`]: sparse Laurent polynomials, symmetrization, Weyl characters.
//! * [`cfuncs`]: reduced c-functions and their truncated Taylor series.
//! * [`innerproduct`]: truncated weight function and constant-term inner products.
//! * [`orthosys`]: Gram-Schmidt polynomials, asymptotic functions, verification.
//! * [`experiment`]: the batch runner behind the `hyperoct` binary.

pub mod cfuncs;
pub mod error;
pub mod experiment;
pub mod hyperoctahedral;
pub mod innerproduct;
pub mod laurent;
pub mod linalg;
mod modular;
pub mod orthosys;
pub mod rational;

pub use cfuncs::{CSpec, DecayBudget, TruncSeries};
pub use error::{Error, Result};
pub use hyperoctahedral::{DominantRep, Dominance, GroupElement, Weight};
pub use innerproduct::{DeltaApprox, GramMatrix};
pub use laurent::LaurentPoly;
pub use orthosys::{AsymptoticPoly, ErrorReport, MonicOrthoPoly, Ordering};
pub use rational::{RawRatio, Rational};

/// Crate version embedded in every experiment output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
