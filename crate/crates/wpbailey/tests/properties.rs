//! Property tests for the exact kernel: ring laws on randomized Laurent
//! polynomials, inversion, substitution and pochhammer recurrences.

use proptest::prelude::*;

use wpbailey::qseries::{poch_finite, Coefficient, Order, QMonomial, QSeries};

fn arb_coeff() -> impl Strategy<Value = Coefficient> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4)
        .prop_map(|(rn, rd, in_, id)| Coefficient::from_ratios(rn, rd, in_, id))
}

fn arb_poly() -> impl Strategy<Value = QSeries> {
    proptest::collection::vec((-5i64..=9, arb_coeff()), 0..6)
        .prop_map(|terms| QSeries::from_terms(terms, Order::Exact))
}

fn arb_nonzero_poly() -> impl Strategy<Value = QSeries> {
    ((-5i64..=9, arb_coeff()), proptest::collection::vec((-5i64..=9, arb_coeff()), 0..5)).prop_map(
        |((e, c), mut rest)| {
            let lead = if c.is_zero() { Coefficient::one() } else { c };
            rest.push((e, lead));
            let s = QSeries::from_terms(rest, Order::Exact);
            if s.is_zero_window() {
                QSeries::one()
            } else {
                s
            }
        },
    )
}

fn arb_mono() -> impl Strategy<Value = QMonomial> {
    (arb_coeff().prop_filter("nonzero", |c| !c.is_zero()), -4i64..=6)
        .prop_map(|(c, e)| QMonomial::new(c, e))
}

proptest! {
    #[test]
    fn add_commutes(x in arb_poly(), y in arb_poly()) {
        prop_assert_eq!(x.add(&y), y.add(&x));
    }

    #[test]
    fn mul_commutes(x in arb_poly(), y in arb_poly()) {
        prop_assert_eq!(x.mul(&y), y.mul(&x));
    }

    #[test]
    fn add_associates(x in arb_poly(), y in arb_poly(), z in arb_poly()) {
        prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
    }

    #[test]
    fn mul_associates(x in arb_poly(), y in arb_poly(), z in arb_poly()) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn mul_distributes(x in arb_poly(), y in arb_poly(), z in arb_poly()) {
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
    }

    #[test]
    fn subtraction_cancels(x in arb_poly()) {
        prop_assert!(x.sub(&x).is_exactly_zero());
    }

    #[test]
    fn inverse_multiplies_to_one(x in arb_nonzero_poly()) {
        let cap = 18;
        let inv = x.invert(cap).unwrap();
        let prod = x.mul(&inv);
        prop_assert!(prod.first_mismatch(&QSeries::one(), cap).is_none());
    }

    #[test]
    fn substitution_is_multiplicative(x in arb_poly(), y in arb_poly(), k in 1i64..=4) {
        prop_assert_eq!(
            x.mul(&y).substitute_power(k),
            x.substitute_power(k).mul(&y.substitute_power(k))
        );
    }

    #[test]
    fn truncated_mul_order_is_sound(x in arb_nonzero_poly(), y in arb_nonzero_poly(), n1 in 2i64..=10, n2 in 2i64..=10) {
        // Truncating the inputs must never change any coefficient the
        // product still claims to know.
        let full = x.mul(&y);
        let tx = x.truncated(Order::Finite(n1));
        let ty = y.truncated(Order::Finite(n2));
        let clipped = tx.mul(&ty);
        if let Order::Finite(m) = clipped.order() {
            prop_assert!(clipped.first_mismatch(&full, m).is_none());
        }
    }

    #[test]
    fn pochhammer_recurrence(x in arb_mono(), n in 0i64..=20) {
        // (x; q)_{n+1} = (x; q)_n (1 - x q^n)
        let cap = 64;
        let lhs = poch_finite(&x, 1, n + 1, cap);
        let step = QSeries::one().sub(&QSeries::from_monomial(&x.shifted(n)));
        let rhs = poch_finite(&x, 1, n, cap).mul(&step);
        let below = match (lhs.order(), rhs.order()) {
            (Order::Finite(a), Order::Finite(b)) => a.min(b),
            (Order::Finite(a), Order::Exact) => a,
            (Order::Exact, Order::Finite(b)) => b,
            _ => cap,
        };
        prop_assert!(lhs.first_mismatch(&rhs, below).is_none());
    }

    #[test]
    fn monomial_scaling_shifts_orders(x in arb_poly(), m in arb_mono()) {
        let scaled = x.scale_mono(&m);
        prop_assert_eq!(scaled.val(), x.val().map(|v| v + m.expo()));
        let back = scaled.scale_mono(&m.inv());
        prop_assert_eq!(back, x);
    }
}
