use crate::sl2::{dist_cp1, ProjPoint, Sl2, C64};
use crate::symbolic::System;

/// Tolerance for eigen-direction and invariance tests.
pub const EIG_TOL: f64 = 1e-9;

pub(crate) fn is_scalar(g: &Sl2) -> bool {
    let [a, b, c, d] = g.entries();
    let scale = g.frobenius_sqr().sqrt().max(1.0);
    b.norm() <= 1e-12 * scale && c.norm() <= 1e-12 * scale && (a - d).norm() <= 1e-12 * scale
}

/// Eigen-directions of a non-scalar element (one for parabolics, two otherwise).
pub fn eigendirections(g: &Sl2) -> Vec<ProjPoint> {
    if is_scalar(g) {
        return Vec::new();
    }
    let [a, b, c, d] = g.entries();
    let t = a + d;
    let disc = (t * t - C64::new(4.0, 0.0)).sqrt();
    let mut out: Vec<ProjPoint> = Vec::new();
    for lam in [(t + disc) * 0.5, (t - disc) * 0.5] {
        let v1 = (b, lam - a);
        let v2 = (lam - d, c);
        let n1 = v1.0.norm_sqr() + v1.1.norm_sqr();
        let n2 = v2.0.norm_sqr() + v2.1.norm_sqr();
        let v = if n1 >= n2 { v1 } else { v2 };
        if let Some(p) = ProjPoint::new(v.0, v.1) {
            if !out.iter().any(|q| dist_cp1(q, &p) < EIG_TOL) {
                out.push(p);
            }
        }
    }
    out
}

pub(crate) fn is_fixed(g: &Sl2, p: &ProjPoint) -> bool {
    dist_cp1(&g.act(p), p) < EIG_TOL * g.op_norm().powi(2).max(1.0)
}

/// Directions fixed by every generator. For a system of scalars every point is
/// fixed and e1 C is returned as a representative.
pub fn find_common_fixed_points(sys: &System) -> Vec<ProjPoint> {
    let Some(g0) = sys.generators().iter().find(|g| !is_scalar(g)) else {
        return vec![ProjPoint::e1()];
    };
    eigendirections(g0)
        .into_iter()
        .filter(|p| sys.generators().iter().all(|g| is_fixed(g, p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_triangular_fixes_e1() {
        let s = System::uniform(
            "t",
            vec![Sl2::real(1.0, 2.0, 0.0, 1.0).unwrap(), Sl2::real(2.0, 1.0, 0.0, 0.5).unwrap()],
        )
        .unwrap();
        let f = find_common_fixed_points(&s);
        assert_eq!(f.len(), 1);
        assert!(dist_cp1(&f[0], &ProjPoint::e1()) < 1e-12);
    }

    #[test]
    fn sanov_has_none() {
        let s = System::uniform(
            "s",
            vec![Sl2::real(1.0, 2.0, 0.0, 1.0).unwrap(), Sl2::real(1.0, 0.0, 2.0, 1.0).unwrap()],
        )
        .unwrap();
        assert!(find_common_fixed_points(&s).is_empty());
    }

    #[test]
    fn loxodromic_has_two_directions() {
        let g = Sl2::real(2.0, 0.0, 0.0, 0.5).unwrap();
        let e = eigendirections(&g);
        assert_eq!(e.len(), 2);
        let p = eigendirections(&Sl2::real(1.0, 1.0, 0.0, 1.0).unwrap());
        assert_eq!(p.len(), 1);
        assert!(eigendirections(&Sl2::identity()).is_empty());
    }
}
