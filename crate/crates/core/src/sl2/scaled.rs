use super::matrix::{mat_mul, Sl2};
use super::point::ProjPoint;
use super::scalar::C64;
use super::svd::{op_norm_general, top_left_singular};

/// Matrix product kept as m * 2^exp, renormalized by exact powers of two.
#[derive(Clone, Copy, Debug)]
pub struct ScaledMat {
    m: [C64; 4],
    exp: i64,
}

fn exponent_of(x: f64) -> i64 {
    ((x.to_bits() >> 52) & 0x7ff) as i64 - 1023
}

impl Default for ScaledMat {
    fn default() -> Self {
        Self::identity()
    }
}

impl ScaledMat {
    pub fn identity() -> Self {
        ScaledMat { m: Sl2::identity().entries(), exp: 0 }
    }

    pub fn from_sl2(g: &Sl2) -> Self {
        let mut s = ScaledMat { m: g.entries(), exp: 0 };
        s.renormalize();
        s
    }

    pub fn mantissa(&self) -> [C64; 4] {
        self.m
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    fn renormalize(&mut self) {
        let mx = self.m.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
        if mx == 0.0 || !mx.is_finite() {
            return;
        }
        let e = exponent_of(mx);
        if e.abs() > 32 {
            let f = f64::from_bits(((1023 - e) as u64) << 52);
            for z in self.m.iter_mut() {
                *z *= f;
            }
            self.exp += e;
        }
    }

    pub fn mul_right(&mut self, g: &Sl2) {
        self.m = mat_mul(&self.m, &g.entries());
        self.renormalize();
    }

    pub fn mul_left(&mut self, g: &Sl2) {
        self.m = mat_mul(&g.entries(), &self.m);
        self.renormalize();
    }

    pub fn log2_op_norm(&self) -> f64 {
        self.exp as f64 + op_norm_general(&self.m).log2()
    }

    /// 2 log2 ||g||.
    pub fn chi(&self) -> f64 {
        2.0 * self.log2_op_norm()
    }

    pub fn direction(&self) -> ProjPoint {
        let (u0, u1) = top_left_singular(&self.m);
        ProjPoint::new(u0, u1).unwrap_or_else(ProjPoint::e1)
    }

    /// log2 d(L(g), g x), computed in the right-singular frame so that
    /// distances far below f64 resolution stay accurate.
    pub fn log2_dist_image(&self, x: &ProjPoint) -> f64 {
        let m = self.m;
        let (p0, p1) = top_left_singular(&[m[0].conj(), m[2].conj(), m[1].conj(), m[3].conj()]);
        let (x1, x2) = x.coords();
        let a = (p0.conj() * x1 + p1.conj() * x2).norm();
        let b = (p0 * x2 - p1 * x1).norm();
        let chi = self.chi();
        b.log2() - chi - 0.5 * (a * a + b * b * (-2.0 * chi).exp2()).log2()
    }

    /// The product as an Sl2 value; only meaningful while it fits in f64.
    pub fn to_sl2(&self) -> Sl2 {
        let f = 2f64.powi(self.exp as i32);
        let m = self.m;
        Sl2::from_entries([m[0] * f, m[1] * f, m[2] * f, m[3] * f])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_diagonal_are_exact() {
        let g = Sl2::real(2.0, 0.0, 0.0, 0.5).unwrap();
        let mut p = ScaledMat::identity();
        for _ in 0..5000 {
            p.mul_right(&g);
        }
        assert_eq!(p.log2_op_norm(), 5000.0);
    }

    #[test]
    fn image_distance_matches_direct_computation() {
        let g = Sl2::from_entries([C64::new(1.0, 0.5), C64::new(2.0, 0.0), C64::new(0.3, -0.2), C64::new(0.0, 0.0)]);
        let g = Sl2::from_entries({
            let e = g.entries();
            let det = (e[0] * e[3] - e[1] * e[2]).sqrt();
            [e[0] / det, e[1] / det, e[2] / det, e[3] / det]
        });
        let mut p = ScaledMat::identity();
        for _ in 0..6 {
            p.mul_right(&g);
        }
        let x = ProjPoint::new(C64::new(0.2, 0.1), C64::new(-0.7, 0.4)).unwrap();
        let gx = p.to_sl2().act(&x);
        let direct = crate::sl2::dist_cp1(&p.direction(), &gx).log2();
        assert!((p.log2_dist_image(&x) - direct).abs() < 1e-6);
        let mut q = ScaledMat::identity();
        for _ in 0..200 {
            q.mul_right(&Sl2::real(2.0, 0.0, 0.0, 0.5).unwrap());
        }
        let x = ProjPoint::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        assert!((q.log2_dist_image(&x) + 400.0).abs() < 1e-9);
    }
}
