//! Seeded experiments with data tables and verdicts.

mod cocycle;
mod common;
mod convergence;
mod increase;
mod linearization;
mod main_theorem;
mod projection;
mod report;
mod transfer;
mod uniform;

pub use cocycle::{concentration_score, direction_cocycle, exp_direction_cocycle, CocycleParams, CocycleTrace, CHAIN_RULE_TOL, SCORE_NET};
pub use common::AtomicTheta;
pub use projection::{exp_projection_entropy, projection_entropy_on, ProjectionParams};
pub use report::{fmt_real, ExperimentReport, Value};
pub use uniform::{exp_uniform_entropy_dim, uniform_entropy_dim_on, UniformDimParams};
pub use convergence::{exp_boundary_convergence, ConvergenceParams};
pub use increase::{exp_entropy_increase, push_theta, IncreaseParams};
pub use transfer::{action_entropy_table, action_entropy_transfer_on, exp_action_entropy_transfer, TransferParams, TransferTable};
pub use linearization::{exp_linearization_check, linearization_fixture, LinearizationParams};
pub use main_theorem::{exp_main_theorem, MainParams};
