//! Empirical measures, dyadic partitions, entropies and estimators.

mod dyadic;
mod empirical;
mod entropy;

pub use dyadic::{cp1_chart, dyadic_cell, normalized_in_cell, DyadicCellId, CP1_MAX_LEVEL, C_INF_MAX_LEVEL, G_CHART_MAX_LEVEL, RP1_MAX_LEVEL};
pub use empirical::{EmpiricalMeasure, PointCloud, Space};
pub use entropy::{
    cell_table, component_entropies, components, entropy, entropy_of_table, level_distance, project_component, CellTable, Component, ComponentEntropy,
    EntropyReport,
};
mod boundary;
mod stats;

pub use boundary::{
    draw_boundary, lyapunov_estimate, push_cp1, sample_boundary, sample_boundary_detailed, stationary_image, BoundaryOptions,
    BoundarySample, LyapunovReport, DEFAULT_BOUNDARY_MAX_LEN, DEFAULT_TARGET_BITS,
};
pub use stats::{jackknife_stderr, mean_stderr, slope_fit, EstimateWithCI};
mod dimension;

pub use dimension::{dim_entropy_slope, dim_estimate, dim_local, DimEstimate, DimRow, DimScheme};
mod delta;
mod export;
mod probe;

pub use delta::{delta_estimate, delta_from_samples, delta_ladder, DeltaReport, DeltaRow, DELTA_GROUPS, DELTA_MIN_MEDIAN_BIN};
pub use export::{to_csv, write_csv};
pub use probe::{
    boundary_mass_probe, fibonacci_net, small_ball_probe, small_ball_radius, BoundaryMassProbe, SmallBallProbe,
};

pub(crate) use entropy::cell_groups;
