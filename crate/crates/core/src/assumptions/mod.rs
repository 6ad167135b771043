//! Checks of the standing assumptions: irreducibility, proximality, invariant
//! circles, plus the separation probe and random-walk entropy.

mod circles;
mod diophantine;
mod entropy;
mod fixed_points;
mod groups;
mod irreducibility;
mod proximality;

pub use circles::{congruence_matrix, find_fixed_circles, CircleReport, HermitianClass};
pub use diophantine::{diophantine_probe, SeparationRow, SeparationTable};
pub use entropy::{random_walk_entropy, EntropyRow, EntropyTable};
pub use fixed_points::{eigendirections, find_common_fixed_points, EIG_TOL};
pub use groups::TAU_EQ;
pub use irreducibility::{check_strong_irreducibility, IrreducibilityResult};
pub use proximality::{check_proximality, ProximalityResult, TRACE_TOL, UNBOUNDED_LOG2};

pub(crate) use entropy::shannon_bits;

use crate::sl2::ProjPoint;
use crate::symbolic::System;
use crate::Check;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct AssumptionReport {
    /// Fail when a common fixed point exists.
    pub irreducible: Check,
    pub fixed_points: Vec<ProjPoint>,
    pub strongly_irreducible: IrreducibilityResult,
    pub proximal: ProximalityResult,
    pub circles: CircleReport,
    pub zariski_dense: bool,
}

impl AssumptionReport {
    /// All standing assumptions hold.
    pub fn all_pass(&self) -> bool {
        self.zariski_dense
    }
}

pub fn check_assumptions<R: Rng + ?Sized>(sys: &System, depth: usize, trials: usize, rng: &mut R) -> AssumptionReport {
    let fixed_points = find_common_fixed_points(sys);
    let irreducible = if fixed_points.is_empty() { Check::Pass } else { Check::Fail };
    let strongly_irreducible = check_strong_irreducibility(sys);
    let proximal = check_proximality(sys, depth, trials, rng);
    let circles = find_fixed_circles(sys);
    let zariski_dense = strongly_irreducible.verdict == Check::Pass
        && proximal.verdict == Check::Pass
        && !circles.has_circle();
    AssumptionReport { irreducible, fixed_points, strongly_irreducible, proximal, circles, zariski_dense }
}
