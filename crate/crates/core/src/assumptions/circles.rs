use crate::sl2::{Sl2, C64};
use crate::symbolic::System;
use nalgebra::{DMatrix, Matrix4};

/// Hermitian form [[h11, h12], [conj h12, h22]] up to real scale.
///
/// The locus v* H v = 0 is a generalized circle when det H < 0, a point when
/// det H = 0 and empty when det H > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianClass {
    pub h11: f64,
    pub h22: f64,
    pub h12: C64,
    pub det_sign: i8,
}

impl HermitianClass {
    /// Coordinates in the basis E11, E22, E12 + E21, i(E12 - E21).
    pub fn coords(&self) -> [f64; 4] {
        [self.h11, self.h22, self.h12.re, self.h12.im]
    }

    fn from_coords(x: [f64; 4]) -> Self {
        let (imax, _) = x
            .iter()
            .enumerate()
            .fold((0, 0.0), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        let s = x[imax];
        let y = x.map(|v| v / s);
        let det = y[0] * y[1] - (y[2] * y[2] + y[3] * y[3]);
        let det_sign = if det.abs() < 1e-9 {
            0
        } else if det < 0.0 {
            -1
        } else {
            1
        };
        HermitianClass { h11: y[0], h22: y[1], h12: C64::new(y[2], y[3]), det_sign }
    }

    pub fn matrix(&self) -> [C64; 4] {
        [C64::new(self.h11, 0.0), self.h12, self.h12.conj(), C64::new(self.h22, 0.0)]
    }

    /// Class of h^-* H h^-1, the image of the circle under h.
    pub fn transform(&self, h: &Sl2) -> HermitianClass {
        let hi = h.inverse();
        HermitianClass::from_coords(herm_to_coords(&congruence(&hi, &self.matrix())))
    }
}

/// g* H g.
fn congruence(g: &Sl2, h: &[C64; 4]) -> [C64; 4] {
    let ga = g.adjoint().entries();
    let ge = g.entries();
    let t = [
        ga[0] * h[0] + ga[1] * h[2],
        ga[0] * h[1] + ga[1] * h[3],
        ga[2] * h[0] + ga[3] * h[2],
        ga[2] * h[1] + ga[3] * h[3],
    ];
    [
        t[0] * ge[0] + t[1] * ge[2],
        t[0] * ge[1] + t[1] * ge[3],
        t[2] * ge[0] + t[3] * ge[2],
        t[2] * ge[1] + t[3] * ge[3],
    ]
}

fn herm_to_coords(h: &[C64; 4]) -> [f64; 4] {
    [h[0].re, h[3].re, h[1].re, h[1].im]
}

fn coords_to_herm(x: &[f64]) -> [C64; 4] {
    [C64::new(x[0], 0.0), C64::new(x[2], x[3]), C64::new(x[2], -x[3]), C64::new(x[1], 0.0)]
}

/// Real 4x4 matrix of H -> g* H g.
pub fn congruence_matrix(g: &Sl2) -> Matrix4<f64> {
    let mut t = Matrix4::zeros();
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        let img = herm_to_coords(&congruence(g, &coords_to_herm(&e)));
        for r in 0..4 {
            t[(r, k)] = img[r];
        }
    }
    t
}

#[derive(Clone, Debug, Default)]
pub struct CircleReport {
    /// Isolated classes H with g* H g proportional to H for all generators.
    pub classes: Vec<HermitianClass>,
    /// Bases of common eigenspaces of dimension > 1 (e.g. the identity system).
    pub degenerate: Vec<Vec<[f64; 4]>>,
}

impl CircleReport {
    pub fn circles(&self) -> impl Iterator<Item = &HermitianClass> {
        self.classes.iter().filter(|c| c.det_sign < 0)
    }

    pub fn has_circle(&self) -> bool {
        self.circles().next().is_some() || !self.degenerate.is_empty()
    }

    pub fn has_definite_form(&self) -> bool {
        self.classes.iter().any(|c| c.det_sign > 0) || !self.degenerate.is_empty()
    }
}

fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let d = a.ncols();
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut cols = Vec::new();
    for i in 0..d {
        let s = if i < svd.singular_values.len() { svd.singular_values[i] } else { 0.0 };
        if s <= tol {
            cols.push(vt.row(i).transpose());
        }
    }
    if cols.is_empty() {
        return DMatrix::zeros(d, 0);
    }
    DMatrix::from_columns(&cols)
}

/// Polished classes must solve the stacked normalized system to this accuracy.
const CLASS_RESIDUAL_TOL: f64 = 1e-11;

/// Classes closer than this (unit coordinates, up to sign) are merged.
const CLASS_MERGE_TOL: f64 = 1e-6;

/// Refines a common eigenvector against all generators at once, with the
/// scales fixed by the search branch.
///
/// Parabolic generators give unipotent congruences whose eigenvectors are
/// ill-conditioned one at a time; the stacked system has a clear gap.
fn polish(ts: &[(Matrix4<f64>, Vec<f64>)], scales: &[f64], x: [f64; 4]) -> ([f64; 4], f64) {
    let v = nalgebra::Vector4::from(x);
    let mut a = DMatrix::<f64>::zeros(4 * ts.len(), 4);
    for (k, ((t, _), &c)) in ts.iter().zip(scales).enumerate() {
        let block = (t - Matrix4::identity() * c) / t.norm().max(1.0);
        a.view_mut((4 * k, 0), (4, 4)).copy_from(&block);
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let imin = (0..svd.singular_values.len())
        .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .expect("four singular values");
    let w = vt.row(imin).transpose();
    let w = nalgebra::Vector4::new(w[0], w[1], w[2], w[3]);
    let w = if w.dot(&v) < 0.0 { -w } else { w };
    ([w[0], w[1], w[2], w[3]], svd.singular_values[imin])
}

fn orthonormalize(b: &DMatrix<f64>) -> DMatrix<f64> {
    if b.ncols() == 0 {
        return b.clone();
    }
    let svd = b.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let keep: Vec<_> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-9)
        .map(|i| u.column(i).into_owned())
        .collect();
    if keep.is_empty() {
        return DMatrix::zeros(b.nrows(), 0);
    }
    DMatrix::from_columns(&keep)
}

const PARABOLIC_SNAP: f64 = 1e-6;

/// Candidate real eigenvalues of H -> g* H g: +-1 and |mu|^2 for eigenvalues mu of g.
fn candidate_scales(g: &Sl2) -> Vec<f64> {
    let t = g.trace();
    let disc = (t * t - C64::new(4.0, 0.0)).sqrt();
    // Near-parabolic traces put |mu|^2 within sqrt(eps) of 1; snap those to 1.
    let snap = |x: f64| if (x - 1.0).abs() < PARABOLIC_SNAP { 1.0 } else { x };
    let mut c = vec![1.0, -1.0, snap(((t + disc) * 0.5).norm_sqr()), snap(((t - disc) * 0.5).norm_sqr())];
    c.sort_by(|a, b| a.partial_cmp(b).unwrap());
    c.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(1.0));
    c
}

/// Common eigen-classes of H -> g_i* H g_i across generators.
pub fn find_fixed_circles(sys: &System) -> CircleReport {
    let ts: Vec<(Matrix4<f64>, Vec<f64>)> =
        sys.generators().iter().map(|g| (congruence_matrix(g), candidate_scales(g))).collect();
    let mut leaves: Vec<(DMatrix<f64>, Vec<f64>)> = Vec::new();
    let full = DMatrix::<f64>::identity(4, 4);
    search(&ts, 0, full, &mut Vec::new(), &mut leaves);
    let mut report = CircleReport::default();
    let mut seen: Vec<(DMatrix<f64>, Vec<f64>)> = Vec::new();
    for (b, path) in leaves {
        let b = orthonormalize(&b);
        if b.ncols() == 0 {
            continue;
        }
        // Skip subspaces already contained in a recorded one.
        if seen.iter().any(|(s, _)| (s * (s.transpose() * &b) - &b).norm() < 1e-7) {
            continue;
        }
        seen.retain(|(s, _)| (&b * (b.transpose() * s) - s).norm() >= 1e-7);
        seen.push((b, path));
    }
    let mut polished: Vec<[f64; 4]> = Vec::new();
    for (b, path) in seen {
        if b.ncols() == 1 {
            let (x, residual) = polish(&ts, &path, [b[(0, 0)], b[(1, 0)], b[(2, 0)], b[(3, 0)]]);
            if residual > CLASS_RESIDUAL_TOL {
                continue;
            }
            let same = |y: &[f64; 4]| {
                let d = |s: f64| x.iter().zip(y).map(|(a, b)| (a - s * b).abs()).fold(0.0, f64::max);
                d(1.0).min(d(-1.0)) < CLASS_MERGE_TOL
            };
            if !polished.iter().any(same) {
                polished.push(x);
                report.classes.push(HermitianClass::from_coords(x));
            }
        } else {
            report.degenerate.push(
                (0..b.ncols()).map(|j| [b[(0, j)], b[(1, j)], b[(2, j)], b[(3, j)]]).collect(),
            );
        }
    }
    report
        .classes
        .sort_by(|a, b| a.coords().partial_cmp(&b.coords()).unwrap_or(std::cmp::Ordering::Equal));
    report
}

fn search(
    ts: &[(Matrix4<f64>, Vec<f64>)],
    i: usize,
    basis: DMatrix<f64>,
    path: &mut Vec<f64>,
    out: &mut Vec<(DMatrix<f64>, Vec<f64>)>,
) {
    if basis.ncols() == 0 {
        return;
    }
    if i == ts.len() {
        out.push((basis, path.clone()));
        return;
    }
    let (t, scales) = &ts[i];
    let tol = 1e-9 * t.norm().max(1.0);
    for &c in scales {
        let a = DMatrix::from_iterator(4, 4, (t - Matrix4::identity() * c).iter().copied()) * &basis;
        let n = null_space(&a, tol);
        if n.ncols() > 0 {
            path.push(c);
            search(ts, i + 1, &basis * n, path, out);
            path.pop();
        }
    }
}
