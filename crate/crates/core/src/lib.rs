//! Numerical toolkit for `q`-variation of vector-valued averages, dyadic
//! martingales, ergodic averages of Markov operators, and symmetric diffusion
//! semigroups.

pub mod diffavg;
pub mod ergodic;
pub mod error;
pub mod martingale;
pub mod normed;
pub mod semigroup;
pub mod tolerance;
pub mod variation;

pub use error::{Error, Result};
pub use normed::{NormSpec, VecB};
