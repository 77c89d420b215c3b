use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use zcorr::correlators::*;
use zcorr::grassmann::{susy_det, Blade, GrassmannEven};
use zcorr::kernel::{build_covariance, PointConfig};
use zcorr::linalg::CMatrix;
use zcorr::montecarlo::{estimate_g, MCConfig};
use zcorr::series::kappa_series;
use zcorr::GrassmannRational;

const PAIRS: usize = 3;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Even elements on three pairs with small rational coefficients.
fn even_element() -> impl Strategy<Value = GrassmannRational> {
    let even_masks: Vec<u32> = (0..1u32 << (2 * PAIRS)).filter(|m| m.count_ones() % 2 == 0).collect();
    prop::collection::vec((prop::sample::select(even_masks), -6i64..=6, 1i64..=4), 0..8).prop_map(|terms| {
        GrassmannEven::from_terms(
            PAIRS,
            terms.into_iter().map(|(mask, n, d)| (Blade::from_mask(mask), rat(n, d))),
        )
    })
}

fn point(m: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| Complex64::new(a, b)), m)
}

fn separated(points: &[Vec<Complex64>], min: f64) -> bool {
    PointConfig::new(points.to_vec()).is_ok_and(|c| c.min_distance() >= min)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn even_elements_commute(a in even_element(), b in even_element()) {
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn product_is_associative(a in even_element(), b in even_element(), c in even_element()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn product_distributes(a in even_element(), b in even_element(), c in even_element()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn inverse_is_two_sided(a in even_element(), s in 1i64..5) {
        let x = &a + &GrassmannEven::scalar(PAIRS, rat(s, 1) - a.scalar_part());
        let inv = x.inverse().unwrap();
        prop_assert_eq!(&x * &inv, GrassmannEven::one(PAIRS));
    }

    #[test]
    fn nilpotent_part_vanishes_past_top(a in even_element()) {
        prop_assert!(a.nilpotent_part().pow(PAIRS + 1).is_zero());
    }

    #[test]
    fn berezin_gaussian_is_determinant(entries in prop::collection::vec(-5i64..=5, 9)) {
        let h: Vec<Vec<BigRational>> =
            entries.chunks(3).map(|row| row.iter().map(|&x| rat(x, 1)).collect()).collect();
        let g = |i: usize, j: usize| h[i][j].clone();
        let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
        prop_assert_eq!(susy_det(&h).unwrap(), det);
    }

    #[test]
    fn complex_gaussian_berezin_is_lu_determinant(entries in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 16)) {
        let h: Vec<Vec<Complex64>> = entries
            .chunks(4)
            .map(|row| row.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
            .collect();
        let lu = CMatrix::from_fn(4, 4, |i, j| h[i][j]).det();
        let s = susy_det(&h).unwrap();
        prop_assert!((s - lu).norm() <= 1e-10 * (1.0 + lu.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariance_is_hermitian_positive(pts in prop::collection::vec(point(2), 3), k in 1usize..=2) {
        prop_assume!(separated(&pts, 0.3));
        let bundle = build_covariance(&PointConfig::new(pts).unwrap(), k).unwrap();
        prop_assert!(bundle.lambda_inf.hermitian_defect() <= 1e-12);
        prop_assert!(bundle.lambda.cholesky().is_ok());
        prop_assert!(bundle.det_a() > 0.0);
    }

    #[test]
    fn npoint_symmetric_and_rigid(
        pts in prop::collection::vec(point(2), 3),
        shift in point(2),
        angles in (0.0f64..1.5, 0.0f64..6.2, 0.0f64..6.2),
        k in 1usize..=2,
    ) {
        prop_assume!(separated(&pts, 0.3));
        let cfg = PointConfig::new(pts).unwrap();
        let v = k_npoint_berezin(&cfg, k).unwrap();
        prop_assert!(v >= 0.0);
        let swapped = k_npoint_berezin(&cfg.reordered(&[2, 0, 1]).unwrap(), k).unwrap();
        prop_assert!(rel(swapped, v) <= 1e-12);
        let (t, p1, p2) = angles;
        let (a, b) = (Complex64::from_polar(t.cos(), p1), Complex64::from_polar(t.sin(), p2));
        let rows = [[a, -b.conj()], [b, a.conj()]];
        let u = CMatrix::from_fn(2, 2, |i, j| rows[i][j]);
        let moved = cfg.transformed(&u).unwrap().translated(&shift).unwrap();
        prop_assert!(rel(k_npoint_berezin(&moved, k).unwrap(), v) <= 1e-9);
    }

    #[test]
    fn pair_routes_agree(r in 0.2f64..3.5, m in 1usize..=4, kk in 0usize..4) {
        let k = 1 + kk % m;
        let a = kappa_pair_berezin(r, k, m).unwrap();
        let b = kappa_pair_expansion(r, k, m).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(rel(b, a) <= 1e-10);
    }

    #[test]
    fn f_m_forms_agree(m in 1usize..=8, x in 0.1f64..2.0, y in 0.1f64..2.0) {
        prop_assume!((x - y).abs() > 0.2);
        let poly = f_m_eval(m, x, y);
        let direct: f64 = (1..=m).map(|i| i as f64 * x.powi(i as i32 - 1) * y.powi((m - i) as i32)).sum();
        prop_assert!(rel(poly, direct) <= 1e-12);
    }

    #[test]
    fn series_matches_numeric_near_zero(r in 0.05f64..0.3, m in 1usize..=5, kk in 0usize..3) {
        let k = if kk == 0 { m } else { kk.min(m) };
        let s = kappa_series(k, m, 12).unwrap();
        let numeric = CorrelationQuery::pair(r, k, m).unwrap().evaluate().unwrap();
        prop_assert!(rel(s.eval_f64(r * r), numeric) <= 1e-8);
    }

    #[test]
    fn gaussian_estimate_independent_of_workers(seed in any::<u64>(), workers in 1usize..=3) {
        let lambda = CMatrix::<f64>::identity(4);
        let cfg = MCConfig::new(10_000, seed).unwrap();
        let a = estimate_g(&lambda, 1, 2, 2, &cfg).unwrap();
        let b = estimate_g(&lambda, 1, 2, 2, &cfg.with_workers(workers)).unwrap();
        prop_assert_eq!(a, b);
    }
}
