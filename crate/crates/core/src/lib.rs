//! Self-consistent ultraviolet regularization for a nonrelativistic particle
//! coupled to a massless scalar field: variational ground state, the dressed
//! resolvent kernels, the emergent cutoff and the second iteration.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod error;
pub mod kernels;
pub mod model;
pub mod quad;
pub mod scaled;
pub mod second;
pub mod specfun;
pub mod zeroth;

pub use error::{Error, Result};
pub use model::ModelParams;
pub use quad::QuadConfig;
pub use scaled::Scaled;
pub use second::{ComplexEnergy, CutoffResult, IterationResult, SecondOptions};
