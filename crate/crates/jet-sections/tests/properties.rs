//! Property-based invariants for the algebra, combinatorics, and
//! chart-change layers.

use proptest::prelude::*;

use jet_sections::basis::{expand_in_basis, reconstruct};
use jet_sections::charts::{to_chart, twisted_transport, ChartMapper};
use jet_sections::combinatorics::{StaircaseTuple, WeakSeq, WeakTuple};
use jet_sections::matrix::PolyMatrix;
use jet_sections::{JetVar, Monomial, Polynomial, Scalar, VarSpace, WeightMode};

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Scalar::from_fraction(n, d))
}

fn arb_monomial(n_coords: usize, max_order: usize) -> impl Strategy<Value = Monomial> {
    prop::collection::vec((1..=n_coords, 0..=max_order, 1u32..=3), 0..4)
        .prop_map(|factors| {
            Monomial::from_factors(
                factors
                    .into_iter()
                    .map(|(c, o, e)| (JetVar::new(c, o), e)),
            )
        })
}

fn arb_poly(n_coords: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((arb_monomial(n_coords, 3), arb_scalar()), 0..5).prop_map(move |terms| {
        Polynomial::from_terms(VarSpace::affine(0, n_coords).unwrap(), terms).unwrap()
    })
}

/// Smaller polynomials for the tests that expand determinants: the
/// expansion cost grows quickly with monomial weight.
fn arb_poly_small(n_coords: usize) -> impl Strategy<Value = Polynomial> {
    let mono = prop::collection::vec((1..=n_coords, 0..=2usize, 1u32..=2), 0..3).prop_map(
        |factors| {
            Monomial::from_factors(factors.into_iter().map(|(c, o, e)| (JetVar::new(c, o), e)))
        },
    );
    prop::collection::vec((mono, arb_scalar()), 0..4).prop_map(move |terms| {
        Polynomial::from_terms(VarSpace::affine(0, n_coords).unwrap(), terms).unwrap()
    })
}

fn arb_weak_seq() -> impl Strategy<Value = WeakSeq> {
    prop::collection::vec(0usize..6, 0..5).prop_map(|mut v| {
        v.sort_unstable();
        WeakSeq::new(v).unwrap()
    })
}

fn arb_tuple(n: usize) -> impl Strategy<Value = StaircaseTuple> {
    prop::collection::vec(arb_weak_seq(), n).prop_map(|blocks| WeakTuple::new(blocks).to_staircase())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomial_order_is_total_and_antisymmetric(
        a in arb_monomial(2, 4),
        b in arb_monomial(2, 4),
    ) {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => prop_assert_eq!(&a, &b),
            Less => prop_assert_eq!(b.cmp(&a), Greater),
            Greater => prop_assert_eq!(b.cmp(&a), Less),
        }
        prop_assert!(Monomial::one() <= a);
    }

    #[test]
    fn monomial_order_transitive(
        a in arb_monomial(2, 3),
        b in arb_monomial(2, 3),
        c in arb_monomial(2, 3),
    ) {
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
    }

    #[test]
    fn weight_is_additive(a in arb_monomial(3, 4), b in arb_monomial(3, 4)) {
        let prod = a.mul(&b);
        prop_assert_eq!(prod.weight(), a.weight() + b.weight());
        prop_assert_eq!(prod.gg_weight(), a.gg_weight() + b.gg_weight());
        prop_assert_eq!(prod.try_div(&b), Some(a));
    }

    #[test]
    fn ring_axioms(p in arb_poly(2), q in arb_poly(2), r in arb_poly(2)) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn leibniz_rule(p in arb_poly(2), q in arb_poly(2)) {
        let lhs = (&p * &q).differentiate();
        let rhs = &(&p.differentiate() * &q) + &(&p * &q.differentiate());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_shifts_gg_weight(p in arb_poly(2)) {
        // d/dt raises the derivative-order weight of every term by 1.
        let d = p.differentiate();
        for (w, part) in d.weight_decompose(WeightMode::OrderOnly) {
            prop_assert!(w >= 1);
            let _ = part;
        }
        let lhs: Vec<u64> = d.weight_decompose(WeightMode::OrderOnly).into_keys().collect();
        let rhs: Vec<u64> = p
            .weight_decompose(WeightMode::OrderOnly)
            .into_iter()
            .filter(|(_, part)| !part.differentiate().is_zero())
            .map(|(w, _)| w + 1)
            .collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_bijections_round_trip(seq in arb_weak_seq(), t in arb_tuple(3)) {
        let strict = seq.to_strict();
        prop_assert_eq!(strict.to_weak(), seq);
        prop_assert_eq!(strict.weight(), strict.to_weak().weight());

        prop_assert!(t.validate().is_ok());
        prop_assert_eq!(t.to_weak().to_staircase(), t.clone());
        prop_assert_eq!(t.weight(), t.to_weak().weight());
    }

    #[test]
    fn determinant_matches_permutation_sum(
        rows in prop::collection::vec(prop::collection::vec(arb_poly(1), 3), 3)
    ) {
        let space = VarSpace::affine(0, 1).unwrap();
        let m = PolyMatrix::new(space, rows).unwrap();
        let mut oracle = Polynomial::zero(space);
        // Hard-coded signed permutation sum for 3x3.
        let perms: &[(usize, usize, usize, bool)] = &[
            (0, 1, 2, false),
            (0, 2, 1, true),
            (1, 0, 2, true),
            (1, 2, 0, false),
            (2, 0, 1, false),
            (2, 1, 0, true),
        ];
        for &(a, b, c, neg) in perms {
            let prod = &(m.entry(0, a) * m.entry(1, b)) * m.entry(2, c);
            oracle = if neg { &oracle - &prod } else { &oracle + &prod };
        }
        prop_assert_eq!(m.determinant(), oracle);
    }

    #[test]
    fn chart_round_trip_n1(p in arb_poly_small(1)) {
        let fwd = to_chart(&p, 1);
        prop_assume!(!p.is_zero());
        let fwd = fwd.unwrap();
        let mut back = ChartMapper::new(1, 0, 1).unwrap();
        let sec = back.map(fwd.numerator()).unwrap();
        let x0 = Monomial::var(JetVar::new(1, 0));
        let lhs = sec.numerator().mul_monomial(&x0.pow(fwd.pole() as u32));
        let rhs = p.mul_monomial(&x0.pow(sec.pole() as u32));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn twist_covariance_n1(p in arb_poly_small(1)) {
        prop_assume!(!p.is_zero());
        // Transport with the exact pole as twist, then back: the
        // original reappears.
        let d = to_chart(&p, 1).unwrap().pole();
        let q = twisted_transport(&p, 1, d).unwrap();
        let mut back = ChartMapper::new(1, 0, 1).unwrap();
        let sec = back.map(&q).unwrap();
        prop_assert!(sec.pole() <= d);
        let x0 = Monomial::var(JetVar::new(1, 0));
        let restored = sec
            .numerator()
            .mul_monomial(&x0.pow((d - sec.pole()) as u32));
        prop_assert_eq!(restored, p);
    }

    #[test]
    fn basis_expansion_round_trip(p in arb_poly_small(2)) {
        let coeffs = expand_in_basis(&p).unwrap();
        prop_assert_eq!(reconstruct(&coeffs, 2).unwrap(), p);
    }
}
