use super::matrix::Sl2;
use super::point::{ExtendedComplex, ProjPoint, RPoint};
use super::scalar::C64;
use crate::error::{Error, Result};

/// d(P, Q) = |det(z, w)| / (|z| |w|).
pub fn dist_cp1(p: &ProjPoint, q: &ProjPoint) -> f64 {
    let (z1, z2) = p.coords();
    let (w1, w2) = q.coords();
    (z1 * w2 - z2 * w1).norm().min(1.0)
}

/// d(zR, wR) = |sin of the angle between the lines|.
pub fn dist_rp1(x: &RPoint, y: &RPoint) -> f64 {
    (x.angle() - y.angle()).sin().abs()
}

/// psi(z1, z2) = z1 / z2, with psi(e1 C) = infinity.
pub fn psi(p: &ProjPoint) -> ExtendedComplex {
    let (z1, z2) = p.coords();
    if z2 == C64::new(0.0, 0.0) {
        return ExtendedComplex::Infinity;
    }
    let z = z1 / z2;
    if z.is_finite() {
        ExtendedComplex::Finite(z)
    } else {
        ExtendedComplex::Infinity
    }
}

pub fn psi_inv(z: ExtendedComplex) -> ProjPoint {
    match z {
        ExtendedComplex::Infinity => ProjPoint::e1(),
        ExtendedComplex::Finite(z) => {
            ProjPoint::new(z, C64::new(1.0, 0.0)).unwrap_or_else(ProjPoint::e1)
        }
    }
}

/// Orthogonal projection of C onto the real line zR.
pub fn proj_line(x: &RPoint, w: C64) -> C64 {
    let u = x.unit();
    u * (w * u.conj()).re
}

/// ||log(g^-1 h)||_F with the principal logarithm.
pub fn dist_g_proxy(g: &Sl2, h: &Sl2) -> Result<f64> {
    log_norm(&g.inverse().mul(h))
}

/// Frobenius norm of the principal logarithm of an SL(2,C) element.
pub fn log_norm(m: &Sl2) -> Result<f64> {
    let [a, b, c, d] = m.entries();
    let half_tr = (a + d) * 0.5;
    let m0 = [a - half_tr, b, c, d - half_tr];
    let m0_norm = m0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // log m = (s / sinh s) m0 with cosh s = tr/2 and sinh^2 s = -det m0.
    let w2 = -(m0[0] * m0[3] - m0[1] * m0[2]);
    let w = w2.sqrt();
    let factor = if w.norm() < 1e-4 {
        if half_tr.re <= 0.0 {
            return Err(Error::LogBranch);
        }
        // asinh(w)/w as a series in w^2.
        C64::new(1.0, 0.0) - w2 / 6.0 + w2 * w2 * (3.0 / 40.0) - w2 * w2 * w2 * (5.0 / 112.0)
    } else {
        let (e_plus, e_minus) = (half_tr + w, half_tr - w);
        let (ev, sw) = if e_plus.norm() >= e_minus.norm() { (e_plus, w) } else { (e_minus, -w) };
        if ev.re <= 0.0 && ev.im.abs() <= 1e-12 * ev.norm() {
            return Err(Error::LogBranch);
        }
        ev.ln() / sw
    };
    Ok(factor.norm() * m0_norm)
}

/// Chart on a neighbourhood of the identity: (a - 1, b, c) as six reals.
pub fn chart_g(g: &Sl2) -> [f64; 6] {
    let [a, b, c, _] = g.entries();
    [a.re - 1.0, a.im, b.re, b.im, c.re, c.im]
}

/// Inverse of `chart_g`; fails where a = 0.
pub fn chart_g_inv(x: &[f64; 6]) -> Result<Sl2> {
    let a = C64::new(1.0 + x[0], x[1]);
    let b = C64::new(x[2], x[3]);
    let c = C64::new(x[4], x[5]);
    if a.norm() < 1e-12 {
        return Err(Error::ChartDomain);
    }
    let d = (C64::new(1.0, 0.0) + b * c) / a;
    Ok(Sl2::from_entries([a, b, c, d]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn log_distance_of_diagonal() {
        let h = Sl2::real(2.0, 0.0, 0.0, 0.5).unwrap();
        let d = dist_g_proxy(&Sl2::identity(), &h).unwrap();
        assert!((d - 2f64.sqrt() * LN_2).abs() < 1e-14);
        assert_eq!(dist_g_proxy(&h, &h).unwrap(), 0.0);
    }

    #[test]
    fn log_of_unipotent_is_nilpotent_part() {
        let n = Sl2::real(1.0, 1e-3, 0.0, 1.0).unwrap();
        assert!((log_norm(&n).unwrap() - 1e-3).abs() < 1e-18);
        let n = Sl2::real(1.0, 0.7, 0.0, 1.0).unwrap();
        assert!((log_norm(&n).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn log_of_rotation() {
        let t = 0.4f64;
        let r = Sl2::diag(C64::from_polar(1.0, t));
        assert!((log_norm(&r).unwrap() - t * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn negative_eigenvalues_fail() {
        let m = Sl2::real(-1.0, 0.0, 0.0, -1.0).unwrap();
        assert_eq!(log_norm(&m), Err(Error::LogBranch));
        let m = Sl2::real(-2.0, 0.0, 0.0, -0.5).unwrap();
        assert_eq!(log_norm(&m), Err(Error::LogBranch));
        let m = Sl2::real(-3.0, -2.0, 2.0, 1.0).unwrap();
        assert_eq!(log_norm(&m), Err(Error::LogBranch));
    }

    #[test]
    fn chart_round_trip() {
        let g = Sl2::real(1.1, 0.2, -0.3, (1.0 + 0.2 * -0.3) / 1.1).unwrap();
        let back = chart_g_inv(&chart_g(&g)).unwrap();
        assert!(back.max_abs_diff(&g) < 1e-15);
    }

    #[test]
    fn proj_line_example() {
        let x = RPoint::from_angle(std::f64::consts::FRAC_PI_2);
        let p = proj_line(&x, C64::new(3.0, 4.0));
        assert!((p - C64::new(0.0, 4.0)).norm() < 1e-15);
    }
}
