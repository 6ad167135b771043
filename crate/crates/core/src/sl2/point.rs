use super::scalar::C64;
use std::f64::consts::PI;

/// Tie tolerance used when picking the coordinate that carries the phase.
pub const PHASE_TIE_TOL: f64 = 1e-14;

/// Point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedComplex {
    Finite(C64),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(re: f64, im: f64) -> Self {
        ExtendedComplex::Finite(C64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    pub fn as_finite(&self) -> Option<C64> {
        match self {
            ExtendedComplex::Finite(z) => Some(*z),
            ExtendedComplex::Infinity => None,
        }
    }
}

/// Unit vector of C^2 up to phase. The first coordinate with modulus above
/// `PHASE_TIE_TOL` is real and positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint {
    z1: C64,
    z2: C64,
}

impl ProjPoint {
    /// Normalizes an arbitrary nonzero vector. Returns `None` for the zero vector.
    pub fn new(z1: C64, z2: C64) -> Option<Self> {
        let n = z1.norm().hypot(z2.norm());
        if !(n > 0.0) || !n.is_finite() {
            return Self::new_scaled(z1, z2);
        }
        let (z1, z2) = (z1 / n, z2 / n);
        let pivot = if z1.norm() > PHASE_TIE_TOL { z1 } else { z2 };
        let phase = pivot.conj() / pivot.norm();
        Some(ProjPoint { z1: z1 * phase, z2: z2 * phase })
    }

    fn new_scaled(z1: C64, z2: C64) -> Option<Self> {
        let m = z1.re.abs().max(z1.im.abs()).max(z2.re.abs()).max(z2.im.abs());
        if !(m > 0.0) || !m.is_finite() {
            return None;
        }
        let n = (z1 / m).norm().hypot((z2 / m).norm());
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        Self::new(z1 / m, z2 / m)
    }

    pub fn e1() -> Self {
        ProjPoint { z1: C64::new(1.0, 0.0), z2: C64::new(0.0, 0.0) }
    }

    pub fn e2() -> Self {
        ProjPoint { z1: C64::new(0.0, 0.0), z2: C64::new(1.0, 0.0) }
    }

    pub fn z1(&self) -> C64 {
        self.z1
    }

    pub fn z2(&self) -> C64 {
        self.z2
    }

    pub fn coords(&self) -> (C64, C64) {
        (self.z1, self.z2)
    }
}

/// Real line through the origin in C, stored as its angle in [0, pi).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RPoint {
    theta: f64,
}

impl RPoint {
    pub fn from_angle(theta: f64) -> Self {
        let mut t = theta.rem_euclid(PI);
        if t >= PI {
            t = 0.0;
        }
        RPoint { theta: t }
    }

    /// The line zR. Returns `None` for z = 0.
    pub fn from_complex(z: C64) -> Option<Self> {
        if z.norm() == 0.0 || !z.is_finite() {
            return None;
        }
        Some(Self::from_angle(z.arg()))
    }

    pub fn real_axis() -> Self {
        RPoint { theta: 0.0 }
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    /// Unit representative e^{i theta}.
    pub fn unit(&self) -> C64 {
        C64::from_polar(1.0, self.theta)
    }

    /// Group law of C*/R*: (zR)(wR) = (zw)R.
    pub fn mul(&self, other: &RPoint) -> RPoint {
        RPoint::from_angle(self.theta + other.theta)
    }

    pub fn inv(&self) -> RPoint {
        RPoint::from_angle(-self.theta)
    }
}
