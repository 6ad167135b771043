use super::fixed_points::{eigendirections, find_common_fixed_points, is_scalar, EIG_TOL};
use crate::sl2::{dist_cp1, ProjPoint, Sl2};
use crate::symbolic::System;
use crate::Check;

#[derive(Clone, Debug)]
pub struct IrreducibilityResult {
    pub verdict: Check,
    /// Invariant set of size one or two when the check fails.
    pub invariant_set: Vec<ProjPoint>,
    /// Every generator has |trace| <= 2; the search is then flagged for review.
    pub elliptic_only: bool,
}

fn maps_pair(g: &Sl2, p: &ProjPoint, q: &ProjPoint) -> bool {
    let tol = EIG_TOL * g.op_norm().powi(2).max(1.0);
    let (gp, gq) = (g.act(p), g.act(q));
    (dist_cp1(&gp, p) < tol && dist_cp1(&gq, q) < tol) || (dist_cp1(&gp, q) < tol && dist_cp1(&gq, p) < tol)
}

/// Searches for invariant sets of size one or two.
///
/// A two-point set {P, Q} invariant under every generator is fixed pointwise by
/// some non-scalar generator or by some product g_i g_j, so eigen-direction
/// pairs of generators and of pairwise products are complete candidates.
pub fn check_strong_irreducibility(sys: &System) -> IrreducibilityResult {
    let elliptic_only = sys
        .generators()
        .iter()
        .all(|g| g.trace().norm() <= 2.0 + 1e-12);
    let fixed = find_common_fixed_points(sys);
    if let Some(p) = fixed.first() {
        return IrreducibilityResult { verdict: Check::Fail, invariant_set: vec![*p], elliptic_only };
    }
    let mut candidates: Vec<Sl2> = sys.generators().to_vec();
    for a in sys.generators() {
        for b in sys.generators() {
            candidates.push(a.mul(b));
        }
    }
    for c in candidates.iter().filter(|g| !is_scalar(g)) {
        let e = eigendirections(c);
        if e.len() == 2 && sys.generators().iter().all(|g| maps_pair(g, &e[0], &e[1])) {
            return IrreducibilityResult { verdict: Check::Fail, invariant_set: e, elliptic_only };
        }
    }
    IrreducibilityResult { verdict: Check::Pass, invariant_set: Vec::new(), elliptic_only }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::C64;

    #[test]
    fn diagonal_and_antidiagonal_swap_pair() {
        let d = Sl2::real(2.0, 0.0, 0.0, 0.5).unwrap();
        let w = Sl2::real(0.0, -1.0, 1.0, 0.0).unwrap();
        let s = System::uniform("dw", vec![d, w]).unwrap();
        let r = check_strong_irreducibility(&s);
        assert_eq!(r.verdict, Check::Fail);
        assert_eq!(r.invariant_set.len(), 2);
    }

    #[test]
    fn two_order_four_elements() {
        let w = Sl2::real(0.0, -1.0, 1.0, 0.0).unwrap();
        let v = Sl2::diag(C64::new(0.0, 1.0));
        let s = System::uniform("q8", vec![w, v]).unwrap();
        assert_eq!(check_strong_irreducibility(&s).verdict, Check::Fail);
    }

    #[test]
    fn sanov_passes() {
        let s = System::uniform(
            "s",
            vec![Sl2::real(1.0, 2.0, 0.0, 1.0).unwrap(), Sl2::real(1.0, 0.0, 2.0, 1.0).unwrap()],
        )
        .unwrap();
        let r = check_strong_irreducibility(&s);
        assert_eq!(r.verdict, Check::Pass);
        assert!(r.elliptic_only);
    }
}
