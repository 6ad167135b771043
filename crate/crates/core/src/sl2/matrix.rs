use super::point::{ExtendedComplex, ProjPoint};
use super::scalar::{GaussianRational, C64};
use crate::error::{Error, Result};
use num_rational::BigRational;
use std::fmt;

/// Determinant tolerance for float input.
pub const DET_TOL: f64 = 1e-8;

/// Element of SL(2,C), row-major entries a, b, c, d.
#[derive(Clone, Copy, PartialEq)]
pub struct Sl2 {
    m: [C64; 4],
}

impl fmt::Debug for Sl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m[0], self.m[1], self.m[2], self.m[3])
    }
}

impl Sl2 {
    /// Checks |det - 1| <= DET_TOL. `index` labels the error.
    pub fn new(a: C64, b: C64, c: C64, d: C64, index: usize) -> Result<Self> {
        let det = a * d - b * c;
        if !((det - C64::new(1.0, 0.0)).norm() <= DET_TOL) {
            return Err(Error::Determinant { index, re: det.re, im: det.im });
        }
        Ok(Sl2 { m: [a, b, c, d] })
    }

    /// No determinant check; the caller guarantees det = 1 up to rounding.
    pub fn from_entries(m: [C64; 4]) -> Self {
        Sl2 { m }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0), 0)
    }

    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Sl2 { m: [o, z, z, o] }
    }

    pub fn diag(lambda: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Sl2 { m: [lambda, z, z, lambda.inv()] }
    }

    pub fn entries(&self) -> [C64; 4] {
        self.m
    }

    pub fn a(&self) -> C64 {
        self.m[0]
    }
    pub fn b(&self) -> C64 {
        self.m[1]
    }
    pub fn c(&self) -> C64 {
        self.m[2]
    }
    pub fn d(&self) -> C64 {
        self.m[3]
    }

    pub fn mul(&self, o: &Sl2) -> Sl2 {
        Sl2 { m: mat_mul(&self.m, &o.m) }
    }

    pub fn inverse(&self) -> Sl2 {
        let [a, b, c, d] = self.m;
        Sl2 { m: [d, -b, -c, a] }
    }

    pub fn transpose(&self) -> Sl2 {
        let [a, b, c, d] = self.m;
        Sl2 { m: [a, c, b, d] }
    }

    pub fn adjoint(&self) -> Sl2 {
        let [a, b, c, d] = self.m;
        Sl2 { m: [a.conj(), c.conj(), b.conj(), d.conj()] }
    }

    pub fn neg(&self) -> Sl2 {
        let [a, b, c, d] = self.m;
        Sl2 { m: [-a, -b, -c, -d] }
    }

    pub fn det(&self) -> C64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn trace(&self) -> C64 {
        self.m[0] + self.m[3]
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ||g||_op = sqrt((F^2 + sqrt(F^4 - 4)) / 2).
    pub fn op_norm(&self) -> f64 {
        let f2 = self.frobenius_sqr();
        let disc = ((f2 - 2.0) * (f2 + 2.0)).max(0.0);
        ((f2 + disc.sqrt()) / 2.0).sqrt().max(1.0)
    }

    /// Largest entry difference.
    pub fn max_abs_diff(&self, o: &Sl2) -> f64 {
        self.m.iter().zip(o.m.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.is_finite())
    }

    pub fn mobius_apply(&self, z: ExtendedComplex) -> ExtendedComplex {
        let [a, b, c, d] = self.m;
        match z {
            ExtendedComplex::Infinity => {
                if c == C64::new(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::Finite(a / c)
                }
            }
            ExtendedComplex::Finite(z) => {
                let den = c * z + d;
                if den == C64::new(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    let w = (a * z + b) / den;
                    if w.is_finite() {
                        ExtendedComplex::Finite(w)
                    } else {
                        ExtendedComplex::Infinity
                    }
                }
            }
        }
    }

    /// phi_g'(z) = (cz + d)^-2.
    pub fn mobius_derivative(&self, z: C64) -> Result<C64> {
        let den = self.m[2] * z + self.m[3];
        if den == C64::new(0.0, 0.0) {
            return Err(Error::Pole);
        }
        let r = (den * den).inv();
        if !r.is_finite() {
            return Err(Error::Pole);
        }
        Ok(r)
    }

    /// Linear action on CP^1.
    pub fn act(&self, p: &ProjPoint) -> ProjPoint {
        let (z1, z2) = p.coords();
        let [a, b, c, d] = self.m;
        ProjPoint::new(a * z1 + b * z2, c * z1 + d * z2)
            .expect("an invertible matrix maps nonzero vectors to nonzero vectors")
    }
}

pub(crate) fn mat_mul(x: &[C64; 4], y: &[C64; 4]) -> [C64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// Default bit-length cap for exact arithmetic.
pub const DEFAULT_EXACT_BITS_CAP: u64 = 1 << 16;

/// Element of SL(2,Q(i)) with exact entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactSl2 {
    m: [GaussianRational; 4],
}

impl ExactSl2 {
    pub fn new(m: [GaussianRational; 4], index: usize) -> Result<Self> {
        let g = ExactSl2 { m };
        if g.det() != GaussianRational::one() {
            let d = g.det().to_c64();
            return Err(Error::Determinant { index, re: d.re, im: d.im });
        }
        Ok(g)
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(
            [
                GaussianRational::from_ints(a, 0),
                GaussianRational::from_ints(b, 0),
                GaussianRational::from_ints(c, 0),
                GaussianRational::from_ints(d, 0),
            ],
            0,
        )
    }

    pub fn identity() -> Self {
        ExactSl2 {
            m: [
                GaussianRational::one(),
                GaussianRational::zero(),
                GaussianRational::zero(),
                GaussianRational::one(),
            ],
        }
    }

    pub fn entries(&self) -> &[GaussianRational; 4] {
        &self.m
    }

    pub fn det(&self) -> GaussianRational {
        &(&self.m[0] * &self.m[3]) - &(&self.m[1] * &self.m[2])
    }

    pub fn trace(&self) -> GaussianRational {
        &self.m[0] + &self.m[3]
    }

    pub fn mul(&self, o: &ExactSl2) -> ExactSl2 {
        let (x, y) = (&self.m, &o.m);
        ExactSl2 {
            m: [
                &(&x[0] * &y[0]) + &(&x[1] * &y[2]),
                &(&x[0] * &y[1]) + &(&x[1] * &y[3]),
                &(&x[2] * &y[0]) + &(&x[3] * &y[2]),
                &(&x[2] * &y[1]) + &(&x[3] * &y[3]),
            ],
        }
    }

    /// Product with an overflow guard on the bit length of the result.
    pub fn mul_capped(&self, o: &ExactSl2, cap: u64) -> Result<ExactSl2> {
        let p = self.mul(o);
        let bits = p.bits();
        if bits > cap {
            return Err(Error::ExactOverflow { bits, cap });
        }
        Ok(p)
    }

    pub fn inverse(&self) -> ExactSl2 {
        let [a, b, c, d] = &self.m;
        ExactSl2 { m: [d.clone(), -b, -c, a.clone()] }
    }

    pub fn frobenius_sqr(&self) -> BigRational {
        self.m.iter().map(|z| z.norm_sqr()).fold(BigRational::from_integer(0.into()), |s, x| s + x)
    }

    pub fn bits(&self) -> u64 {
        self.m.iter().map(|z| z.bits()).max().unwrap_or(0)
    }

    pub fn to_float(&self) -> Sl2 {
        Sl2::from_entries([
            self.m[0].to_c64(),
            self.m[1].to_c64(),
            self.m[2].to_c64(),
            self.m[3].to_c64(),
        ])
    }
}
