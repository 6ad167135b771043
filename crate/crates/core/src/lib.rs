//! Random walks on SL(2,C): symbolic dynamics, assumption checks, empirical
//! stationary measures and dimension estimators.

pub mod assumptions;
pub mod error;
pub mod experiments;
pub mod measure;
pub mod presets;
pub mod rng;
pub mod sl2;
pub mod symbolic;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::{Check, Verdict};
