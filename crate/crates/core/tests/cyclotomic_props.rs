use std::sync::Arc;

use gl2_gauss::cyclotomic::{CycElem, Cyclo};
use proptest::prelude::*;

fn ctx_for(n: u64) -> Arc<Cyclo> {
    Cyclo::new(n)
}

fn elem(ctx: &Arc<Cyclo>, raw: &[i64]) -> CycElem {
    let wide: Vec<i128> = raw.iter().map(|&x| x as i128).collect();
    CycElem::from_coeffs(ctx, &wide)
}

fn conductors() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![4u64, 9, 12, 36, 72, 100, 108])
}

proptest! {
    #[test]
    fn ring_axioms(n in conductors(), a in prop::collection::vec(-20i64..20, 0..40),
                   b in prop::collection::vec(-20i64..20, 0..40), c in prop::collection::vec(-20i64..20, 0..40)) {
        let ctx = ctx_for(n);
        let (a, b, c) = (elem(&ctx, &a), elem(&ctx, &b), elem(&ctx, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn roots_multiply_by_adding_exponents(n in conductors(), x in -500i64..500, y in -500i64..500) {
        let ctx = ctx_for(n);
        let zx = CycElem::root_of_unity(&ctx, n, x).unwrap();
        let zy = CycElem::root_of_unity(&ctx, n, y).unwrap();
        prop_assert_eq!(&zx * &zy, CycElem::root_of_unity(&ctx, n, x + y).unwrap());
        prop_assert_eq!(zx.conj(), CycElem::root_of_unity(&ctx, n, -x).unwrap());
    }

    #[test]
    fn embedding_is_a_homomorphism(n in conductors(), a in prop::collection::vec(-9i64..9, 0..20),
                                   b in prop::collection::vec(-9i64..9, 0..20)) {
        let ctx = ctx_for(n);
        let (a, b) = (elem(&ctx, &a), elem(&ctx, &b));
        let lhs = (&a * &b).embed();
        let rhs = a.embed() * b.embed();
        prop_assert!((lhs - rhs).norm() < 1e-6 * (1.0 + rhs.norm()));
    }

    #[test]
    fn lift_preserves_values(a in prop::collection::vec(-9i64..9, 0..12)) {
        let small = ctx_for(9);
        let big = ctx_for(36);
        let x = elem(&small, &a);
        let y = x.lift(&big).unwrap();
        prop_assert!((x.embed() - y.embed()).norm() < 1e-9 * (1.0 + x.embed().norm()));
        prop_assert_eq!(y.pow(2), x.pow(2).lift(&big).unwrap());
    }

    #[test]
    fn exact_division_roundtrip(n in conductors(), a in prop::collection::vec(-50i64..50, 0..30), k in 1i128..12) {
        let ctx = ctx_for(n);
        let x = elem(&ctx, &a);
        prop_assert_eq!(x.scale(k).div_exact(k).unwrap(), x);
    }
}

#[test]
fn sum_of_primitive_roots_is_mobius() {
    for (n, mu) in [(9u64, 0i128), (12, 0), (5, -1), (15, 1), (36, 0), (7, -1)] {
        let ctx = ctx_for(n);
        let mut acc = CycElem::zero(&ctx);
        for k in (1..=n).filter(|k| num_gcd(*k, n) == 1) {
            acc = acc + CycElem::root_of_unity(&ctx, n, k as i64).unwrap();
        }
        assert_eq!(acc.as_integer(), Some(mu), "n={n}");
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}
