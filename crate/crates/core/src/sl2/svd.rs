use super::matrix::Sl2;
use super::point::ProjPoint;
use super::scalar::C64;

/// Below this value of F^2 - 2 the element is treated as unitary.
pub const SVD_DEGENERATE_TOL: f64 = 1e-12;

/// g = U diag(sigma, 1/sigma) V with U, V in SU(2).
#[derive(Clone, Copy, Debug)]
pub struct Svd {
    pub u: Sl2,
    pub sigma: f64,
    pub v: Sl2,
}

impl Svd {
    /// L(g) = U e1 C.
    pub fn l(&self) -> ProjPoint {
        let [a, _, c, _] = self.u.entries();
        ProjPoint::new(a, c).unwrap_or_else(ProjPoint::e1)
    }

    /// L(g^-1) = V^-1 e2 C.
    pub fn l_inverse(&self) -> ProjPoint {
        let [_, b, _, d] = self.v.inverse().entries();
        ProjPoint::new(b, d).unwrap_or_else(ProjPoint::e2)
    }

    pub fn reconstruct(&self) -> Sl2 {
        let s = C64::new(self.sigma, 0.0);
        let d = Sl2::from_entries([s, C64::new(0.0, 0.0), C64::new(0.0, 0.0), s.inv()]);
        self.u.mul(&d).mul(&self.v)
    }
}

/// Unit top eigenvector of M M* for an arbitrary 2x2 complex matrix,
/// i.e. the top left-singular direction.
pub fn top_left_singular(m: &[C64; 4]) -> (C64, C64) {
    let a = m[0].norm_sqr() + m[1].norm_sqr();
    let d = m[2].norm_sqr() + m[3].norm_sqr();
    let b = m[0] * m[2].conj() + m[1] * m[3].conj();
    let bn = b.norm();
    let t = 0.5 * (2.0 * bn).atan2(a - d);
    let phase = if bn > 0.0 { b.conj() / bn } else { C64::new(1.0, 0.0) };
    (C64::new(t.cos(), 0.0), phase * t.sin())
}

/// Largest singular value of an arbitrary 2x2 complex matrix.
pub fn op_norm_general(m: &[C64; 4]) -> f64 {
    let f2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let det = (m[0] * m[3] - m[1] * m[2]).norm();
    let disc = ((f2 - 2.0 * det) * (f2 + 2.0 * det)).max(0.0);
    ((f2 + disc.sqrt()) / 2.0).sqrt()
}

pub fn svd2(g: &Sl2) -> Svd {
    let f2 = g.frobenius_sqr();
    if f2 - 2.0 < SVD_DEGENERATE_TOL {
        return Svd { u: Sl2::identity(), sigma: 1.0, v: *g };
    }
    let sigma = g.op_norm();
    let m = g.entries();
    let (u0, u1) = top_left_singular(&m);
    let u = Sl2::from_entries([u0, -u1.conj(), u1, u0.conj()]);
    let mut r0 = (u0.conj() * m[0] + u1.conj() * m[2]) / sigma;
    let mut r1 = (u0.conj() * m[1] + u1.conj() * m[3]) / sigma;
    let rn = r0.norm().hypot(r1.norm());
    r0 /= rn;
    r1 /= rn;
    let v = Sl2::from_entries([r0, r1, -r1.conj(), r0.conj()]);
    Svd { u, sigma, v }
}

/// L(g): the top left-singular direction, e1 C in the degenerate branch.
pub fn boundary_direction(g: &Sl2) -> ProjPoint {
    svd2(g).l()
}
