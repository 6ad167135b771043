//! SL(2,C) arithmetic, projective points and the metrics used throughout.

mod matrix;
mod metric;
mod point;
mod scalar;
mod scaled;
mod svd;

pub use matrix::{ExactSl2, Sl2, DEFAULT_EXACT_BITS_CAP, DET_TOL};
pub use metric::{
    chart_g, chart_g_inv, dist_cp1, dist_g_proxy, dist_rp1, log_norm, proj_line, psi, psi_inv,
};
pub use point::{ExtendedComplex, ProjPoint, RPoint, PHASE_TIE_TOL};
pub use scalar::{parse_rational, rational_to_f64, GaussianRational, C64};
pub use scaled::ScaledMat;
pub use svd::{boundary_direction, op_norm_general, svd2, top_left_singular, Svd, SVD_DEGENERATE_TOL};

