use furst_core::assumptions::{find_fixed_circles, random_walk_entropy};
use furst_core::measure::{entropy, EmpiricalMeasure, PointCloud};
use furst_core::presets::preset;
use furst_core::sl2::{dist_cp1, dist_rp1, psi, psi_inv, svd2, ExtendedComplex, ProjPoint, RPoint, Sl2, C64};
use furst_core::symbolic::{block_norm_constant, enumerate_first_passage, scaled_product, System};
use furst_core::rng::Streams;
use proptest::prelude::*;
use rand::Rng;

fn c64() -> impl Strategy<Value = C64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| C64::new(a, b))
}

/// Elements k1 diag(t, 1/t) k2 with k1, k2 generic of moderate norm and log2 t up to `max_log2`.
fn sl2(max_log2: f64) -> impl Strategy<Value = Sl2> {
    (c64(), c64(), c64(), c64(), c64(), c64(), 0.0..max_log2).prop_filter_map("small pivot", |(a, b, c, a2, b2, c2, s)| {
        if a.norm() < 0.3 || a2.norm() < 0.3 {
            return None;
        }
        let k1 = Sl2::from_entries([a, b, c, (C64::new(1.0, 0.0) + b * c) / a]);
        let k2 = Sl2::from_entries([a2, b2, c2, (C64::new(1.0, 0.0) + b2 * c2) / a2]);
        let t = 2f64.powf(s);
        Some(k1.mul(&Sl2::diag(C64::new(t, 0.0))).mul(&k2))
    })
}

/// Elements of norm at most 10; conjugating by larger h gives generator norms
/// where float congruences lose the eigenvalue gap.
fn moderate_sl2() -> impl Strategy<Value = Sl2> {
    let small = || (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b));
    (small(), small(), -1.5f64..1.5).prop_filter_map("norm above 10", |(b, c, s)| {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let h = Sl2::from_entries([one, b, zero, one])
            .mul(&Sl2::from_entries([one, zero, c, one]))
            .mul(&Sl2::diag(C64::new(2f64.powf(s), 0.0)));
        (h.op_norm() <= 10.0).then_some(h)
    })
}

fn point() -> impl Strategy<Value = ProjPoint> {
    (c64(), c64()).prop_filter_map("zero vector", |(a, b)| ProjPoint::new(a, b))
}

fn unit(p: &ProjPoint) -> (C64, C64) {
    let (a, b) = p.coords();
    let n = a.norm().hypot(b.norm());
    (a / n, b / n)
}

fn apply(g: &Sl2, z: (C64, C64)) -> (C64, C64) {
    let [a, b, c, d] = g.entries();
    (a * z.0 + b * z.1, c * z.0 + d * z.1)
}

fn sanov() -> System {
    preset("sanov").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn svd_reconstructs_and_inverse_has_equal_norm(g in sl2(20.0)) {
        let s = svd2(&g);
        let norm = g.op_norm();
        prop_assert!(s.reconstruct().max_abs_diff(&g) <= 1e-9 * norm, "{:?}", g);
        for u in [s.u, s.v] {
            prop_assert!(u.mul(&u.adjoint()).max_abs_diff(&Sl2::identity()) < 1e-9);
        }
        prop_assert!((g.inverse().op_norm() - norm).abs() <= 1e-9 * norm);
    }

    #[test]
    fn action_is_bi_lipschitz_with_constant_norm_squared(g in sl2(8.0), p in point(), q in point()) {
        let n2 = g.op_norm().powi(2);
        let d = dist_cp1(&p, &q);
        let dg = dist_cp1(&g.act(&p), &g.act(&q));
        prop_assert!(d / n2 <= dg + 1e-9, "{} {} {}", d, dg, n2);
        prop_assert!(dg <= n2 * d + 1e-9, "{} {} {}", d, dg, n2);
    }

    #[test]
    fn points_away_from_the_repeller_contract_toward_l(g in sl2(20.0), x in c64(), y in c64(), eps in 0.01f64..0.99) {
        let s = svd2(&g);
        prop_assume!(s.sigma >= 10.0);
        // Points V^-1 (a, b) with |a| = |(a, b)| dist to L(g^-1) kept above eps.
        let vi = s.v.inverse();
        let off = |w: C64| {
            let a = C64::from_polar(eps + (1.0 - eps) * (w.re + 3.0) / 6.0, w.im);
            let b = C64::from_polar((1.0 - a.norm_sqr()).max(0.0).sqrt(), 0.7 * w.im + w.re);
            let (z1, z2) = apply(&vi, (a, b));
            ProjPoint::new(z1, z2).unwrap()
        };
        let (p, q) = (off(x), off(y));
        let rep = s.l_inverse();
        prop_assume!(dist_cp1(&p, &rep) > eps && dist_cp1(&q, &rep) > eps);
        let m2 = s.sigma * s.sigma;
        let (gp, gq) = (g.act(&p), g.act(&q));
        prop_assert!(dist_cp1(&gp, &gq) <= dist_cp1(&p, &q) / (eps * eps * m2) + 1e-9);
        prop_assert!(dist_cp1(&s.l(), &gp) <= 1.0 / (eps * m2) + 1e-9);
        // ||g z|| >= eta ||g|| ||z|| off the eta-ball around L(g^-1).
        let gz = apply(&g, unit(&p));
        prop_assert!(gz.0.norm().hypot(gz.1.norm()) >= eps * s.sigma * (1.0 - 1e-9));
    }

    #[test]
    fn chart_is_bi_lipschitz_on_discs(r_big in prop::bool::ANY, a in c64(), b in c64()) {
        let r: f64 = if r_big { 10.0 } else { 1.0 };
        let (z, w) = (a * (r / 4.3), b * (r / 4.3));
        prop_assume!(z.norm() < r && w.norm() < r);
        let d = dist_cp1(&psi_inv(ExtendedComplex::Finite(z)), &psi_inv(ExtendedComplex::Finite(w)));
        let e = (z - w).norm();
        prop_assert!(e / (1.0 + r * r) <= d + 1e-12);
        prop_assert!(d <= e + 1e-12);
        let far = dist_cp1(&psi_inv(ExtendedComplex::Finite(z)), &ProjPoint::e1());
        prop_assert!(far >= (1.0 + r * r).powf(-0.5) - 1e-12);
    }

    #[test]
    fn cp1_and_rp1_distances_are_metrics(p in point(), q in point(), r in point(), a in 0.0f64..3.2, b in 0.0f64..3.2, c in 0.0f64..3.2) {
        let (dpq, dqr, dpr) = (dist_cp1(&p, &q), dist_cp1(&q, &r), dist_cp1(&p, &r));
        prop_assert!(dpr <= dpq + dqr + 1e-12);
        prop_assert!((dpq - dist_cp1(&q, &p)).abs() < 1e-15);
        prop_assert!(dist_cp1(&p, &p) < 1e-12);
        prop_assert!((0.0..=1.0).contains(&dpq));
        let (x, y, z) = (RPoint::from_angle(a), RPoint::from_angle(b), RPoint::from_angle(c));
        prop_assert!(dist_rp1(&x, &z) <= dist_rp1(&x, &y) + dist_rp1(&y, &z) + 1e-12);
        prop_assert!((dist_rp1(&x, &y) - dist_rp1(&y, &x)).abs() < 1e-15);
        prop_assert!(dist_rp1(&x, &x) < 1e-12);
    }

    #[test]
    fn chart_intertwines_linear_and_moebius_actions(g in sl2(6.0), p in point()) {
        let lhs = psi(&g.act(&p));
        let rhs = g.mobius_apply(psi(&p));
        if let (ExtendedComplex::Finite(a), ExtendedComplex::Finite(b)) = (lhs, rhs) {
            prop_assume!(a.norm() < 1e6);
            prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0), "{} {}", a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn first_passage_sets_are_probability_partitions(n in 1u32..9, l in 1usize..3, j in 0usize..2, gaussian in prop::bool::ANY) {
        // Systems with an elliptic generator never terminate; these two do.
        let sys = if gaussian { preset("discrete-gaussian").unwrap() } else { sanov() };
        let ws = enumerate_first_passage(&sys, j, l, n, 1 << 20).unwrap();
        prop_assert!((ws.total_weight() - 1.0).abs() < 1e-10);
        let c = block_norm_constant(&sys, j, l);
        for u in &ws.words {
            let norm = scaled_product(&sys, u).log2_op_norm();
            prop_assert!(norm > n as f64 / 2.0, "{:?}", u);
            prop_assert!(norm <= n as f64 / 2.0 + c.log2() + 1e-9, "{:?}", u);
        }
    }

    #[test]
    fn fixed_circles_are_conjugation_covariant(h in moderate_sl2()) {
        let base = find_fixed_circles(&sanov());
        let moved = find_fixed_circles(&sanov().conjugate(&h));
        let b: Vec<_> = base.circles().collect();
        let m: Vec<_> = moved.circles().collect();
        prop_assert_eq!(b.len(), 1);
        prop_assert_eq!(m.len(), 1);
        // H' = h^-* H h^-1, compared as unit real coordinate vectors up to sign.
        let hi = h.inverse();
        let e = hi.adjoint().mul(&Sl2::from_entries(b[0].matrix())).mul(&hi).entries();
        let unit4 = |x: [f64; 4]| {
            let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.map(|v| v / n)
        };
        let e = unit4([e[0].re, e[3].re, e[1].re, e[1].im]);
        let g = unit4(m[0].coords());
        let diff = |sign: f64| e.iter().zip(&g).map(|(x, y)| (x - sign * y).abs()).fold(0.0, f64::max);
        prop_assert!(diff(1.0).min(diff(-1.0)) < 1e-8, "{:?} {:?}", e, g);
    }
}

fn cloud(seed: u64, n: usize, centre: C64, radius: f64) -> Vec<C64> {
    let mut rng = Streams::new(seed).rng(0);
    (0..n).map(|_| centre + C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * radius).collect()
}

fn c_inf(points: &[C64]) -> EmpiricalMeasure {
    EmpiricalMeasure::uniform(PointCloud::CInf(points.iter().map(|&z| ExtendedComplex::Finite(z)).collect())).unwrap()
}

fn h(m: &EmpiricalMeasure, n: u32) -> f64 {
    entropy(m, n, None).unwrap().entropy
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_concave_and_almost_convex(seed in any::<u64>(), q in prop::array::uniform3(0.05f64..1.0), n in 0u32..10) {
        let total: f64 = q.iter().sum();
        let q = q.map(|x| x / total);
        let parts: Vec<Vec<C64>> = (0..3)
            .map(|i| cloud(seed + i, 200 + 50 * i as usize, C64::new(i as f64 * 0.3, 0.1), 0.2 + 0.3 * i as f64))
            .collect();
        let mut points = vec![];
        let mut weights = vec![];
        let mut avg = 0.0;
        for (p, &qi) in parts.iter().zip(&q) {
            avg += qi * h(&c_inf(p), n);
            points.extend_from_slice(p);
            weights.extend(std::iter::repeat_n(qi / p.len() as f64, p.len()));
        }
        let mix = EmpiricalMeasure::weighted(PointCloud::CInf(points.into_iter().map(ExtendedComplex::Finite).collect()), weights).unwrap();
        let hq: f64 = -q.iter().map(|x| x * x.log2()).sum::<f64>();
        let hm = h(&mix, n);
        prop_assert!(avg <= hm + 1e-9, "{} {}", avg, hm);
        prop_assert!(hm <= avg + hq + 1e-9, "{} {} {}", hm, avg, hq);
    }

    #[test]
    fn conditional_entropy_is_at_most_two_bits_per_level(seed in any::<u64>(), radius in 0.001f64..4.0, c in 0u32..12, k in 1u32..8) {
        let m = c_inf(&cloud(seed, 500, C64::new(0.2, -0.7), radius));
        let r = entropy(&m, c + k, Some(c)).unwrap();
        prop_assert!(r.normalized <= 2.0 + 1e-9);
        prop_assert!(r.entropy >= -1e-12);
    }

    #[test]
    fn cp1_cells_are_bounded_by_twice_four_to_the_n(seed in any::<u64>(), n in 0u32..6) {
        let pts: Vec<ProjPoint> = cloud(seed, 3000, C64::new(0.0, 0.0), 8.0)
            .into_iter()
            .zip(cloud(seed ^ 1, 3000, C64::new(0.0, 0.0), 8.0))
            .filter_map(|(a, b)| ProjPoint::new(a, b))
            .collect();
        let m = EmpiricalMeasure::uniform(PointCloud::Cp1(pts)).unwrap();
        let occupied = entropy(&m, n, None).unwrap().occupied;
        prop_assert!(occupied as u64 <= 2 * 4u64.pow(n) + 2);
    }

    #[test]
    fn entropy_is_stable_under_similarities(seed in any::<u64>(), j in -10i32..=10, t in c64(), n in 4u32..14) {
        prop_assume!(n as i32 + j >= 0);
        let base = cloud(seed, 2000, C64::new(0.0, 0.0), 1.0);
        let s = 2f64.powi(j);
        let pushed: Vec<C64> = base.iter().map(|&z| z * s + t).collect();
        let gap = h(&c_inf(&pushed), n) - h(&c_inf(&base), (n as i32 + j) as u32);
        prop_assert!(gap.abs() <= 6.0, "{}", gap);
    }

    #[test]
    fn close_maps_have_close_entropies(seed in any::<u64>(), n in 0u32..16) {
        let base = cloud(seed, 2000, C64::new(0.5, 0.5), 3.0);
        let mut jitter = cloud(seed ^ 0xABCD, 2000, C64::new(0.0, 0.0), 1.0).into_iter();
        let step = 2f64.powi(-(n as i32));
        let moved: Vec<C64> = base.iter().map(|&z| z + jitter.next().unwrap() * step).collect();
        let gap = h(&c_inf(&moved), n) - h(&c_inf(&base), n);
        prop_assert!(gap.abs() <= 6.0, "{}", gap);
    }
}

#[test]
fn random_walk_entropy_is_subadditive_and_bounded() {
    for name in ["sanov", "inverse-pair", "discrete-gaussian", "twist"] {
        let sys = preset(name).unwrap();
        let t = random_walk_entropy(&sys, 8, 1 << 20).unwrap();
        let hp = sys.entropy_bits();
        let hs: Vec<f64> = t.rows.iter().map(|r| r.h).collect();
        for (i, r) in t.rows.iter().enumerate() {
            assert!(r.h <= r.n as f64 * hp + 1e-10, "{name}");
            for j in 0..t.rows.len() {
                if i + j + 1 < hs.len() {
                    assert!(hs[i + j + 1] <= hs[i] + hs[j] + 1e-10, "{name} {i} {j}");
                }
            }
        }
        let distinct = t.rows.iter().all(|r| r.support == sys.len().pow(r.n as u32));
        let saturated = t.rows.iter().all(|r| (r.h - r.n as f64 * hp).abs() < 1e-10);
        assert_eq!(distinct, saturated, "{name}");
    }
}
