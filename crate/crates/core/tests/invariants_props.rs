use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use yamabe_core::invariants::{
    alpha_exact, lambda_lower, lambda_lower_pow, lambda_lower_quotient, model_constants,
    ModelSpace,
};

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

#[test]
fn bounds_are_symmetric_in_k() {
    for n in 6..=200i64 {
        for k in 2..=n - 4 {
            assert_eq!(
                lambda_lower_pow(n, k).unwrap(),
                lambda_lower_pow(n, n - k - 2).unwrap(),
                "(n, k) = ({n}, {k})"
            );
        }
    }
}

#[test]
fn quotient_and_product_forms_overlap() {
    for n in 6..=100i64 {
        for k in 2..=n - 4 {
            let a = lambda_lower(n, k, 128).unwrap().value;
            let b = lambda_lower_quotient(n, k, 128).unwrap();
            assert!(a.overlaps(&b), "(n, k) = ({n}, {k})");
        }
    }
}

#[test]
fn alpha_at_unit_c_is_exact_square() {
    for n in 3..=200i64 {
        for k in 0..=n - 3 {
            let want = q(n - k - 2, 2) * q(n - k - 2, 2);
            for c in [q(1, 1), q(-1, 1)] {
                let (a, b) = alpha_exact(n, k, &c).unwrap();
                assert_eq!(a, want, "(n, k) = ({n}, {k})");
                assert_eq!(b, want, "(n, k) = ({n}, {k})");
            }
        }
    }
}

proptest! {
    #[test]
    fn alpha_is_smallest_at_unit_c(n in 3i64..60, kk in 0i64..60, c in -1.0f64..=1.0) {
        let k = kk % (n - 2);
        let at = |c: f64| model_constants(&ModelSpace::new(n, k, c).unwrap()).alpha;
        let floor = ((n - k - 2) as f64 / 2.0).powi(2);
        prop_assert!(at(c) >= at(1.0) - 1e-12 * floor.max(1.0));
        prop_assert!((at(1.0) - floor).abs() <= 1e-12 * floor.max(1.0));
    }

    #[test]
    fn alpha_forms_agree(n in 3i64..60, kk in 0i64..60, p in -64i64..=64) {
        let k = kk % (n - 2);
        let (a, b) = alpha_exact(n, k, &q(p, 64)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sign_of_c_is_irrelevant(n in 3i64..60, kk in 0i64..60, c in 0.0f64..=1.0) {
        let k = kk % (n - 2);
        prop_assert_eq!(ModelSpace::new(n, k, c).unwrap(), ModelSpace::new(n, k, -c).unwrap());
    }
}

#[test]
fn assumption_range_at_unit_c() {
    for n in 3..=300i64 {
        for k in 0..=n - 3 {
            let ok = ModelSpace::new(n, k, 1.0).unwrap().assumption_ok();
            // k < n - 4 + 8/(n+2), the strict form of the hypothesis
            assert_eq!(ok, k * (n + 2) < n * (n - 2), "(n, k) = ({n}, {k})");
            if ok != (k * (n + 2) <= n * (n - 2)) {
                assert_eq!((n, k), (6, 3));
            }
        }
    }
}
