//! Property tests for the scalar tower, the base Lie algebra layer, and
//! the straightening engine.

use proptest::prelude::*;
use vertexforge::current::{AlgebraContext, GenMode, Sector};
use vertexforge::lie::{LieAlgebraSpec, LieElement};
use vertexforge::parse::parse_series;
use vertexforge::scalar::Scalar;
use vertexforge::series::{Cap, LaurentSeries};
use vertexforge::vacuum::{apply_mode, module_law_defect, ModuleContext, PbwMonomial, PbwVector};

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -3i64..=3).prop_map(|(num, den, im)| {
        &Scalar::from_ratio(num, den) + &(&Scalar::from_integer(im) * &Scalar::i())
    })
}

fn arb_exact_series() -> impl Strategy<Value = LaurentSeries> {
    proptest::collection::vec((-5i64..=5, arb_scalar()), 0..4)
        .prop_map(LaurentSeries::from_terms)
}

fn arb_series() -> impl Strategy<Value = LaurentSeries> {
    (arb_exact_series(), proptest::option::of(2i64..=12)).prop_map(|(s, cap)| match cap {
        None => s,
        Some(offset) => {
            let val = s.val().unwrap_or(0);
            s.truncated(val + offset)
        }
    })
}

/// Equality of all coefficients below both caps.
fn agree_on_common_window(a: &LaurentSeries, b: &LaurentSeries) -> bool {
    let window = a.cap().min_with(b.cap());
    let covered = |e: i64| window.covers(e);
    for (e, c) in a.terms() {
        if covered(e) && &b.coeff(e).unwrap() != c {
            return false;
        }
    }
    for (e, c) in b.terms() {
        if covered(e) && &a.coeff(e).unwrap() != c {
            return false;
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn mul_is_associative_on_common_window(
        a in arb_series(), b in arb_series(), c in arb_series()
    ) {
        let left = a.mul(&b).mul(&c);
        let right = a.mul(&b.mul(&c));
        prop_assert!(agree_on_common_window(&left, &right));
    }

    #[test]
    fn mul_distributes_over_add(
        a in arb_series(), b in arb_series(), c in arb_series()
    ) {
        let left = a.mul(&b.add(&c));
        let right = a.mul(&b).add(&a.mul(&c));
        prop_assert!(agree_on_common_window(&left, &right));
    }

    #[test]
    fn leibniz_rule(a in arb_series(), b in arb_series()) {
        let left = a.mul(&b).derive();
        let right = a.derive().mul(&b).add(&a.mul(&b.derive()));
        prop_assert!(agree_on_common_window(&left, &right));
    }

    #[test]
    fn residue_of_derivative_vanishes(a in arb_series()) {
        let d = a.derive();
        match d.residue() {
            Ok(r) => prop_assert!(r.is_zero()),
            // only acceptable when the -1 coefficient is genuinely hidden
            Err(_) => prop_assert!(matches!(d.cap(), Cap::Finite(c) if c <= -1)),
        }
    }

    #[test]
    fn shift_expansion_is_multiplicative(a in arb_exact_series(), b in arb_exact_series()) {
        let order = 4u32;
        let sa = a.shift(order);
        let sb = b.shift(order);
        let product_shift = a.mul(&b).shift(order);
        let termwise = sa.mul(&sb);
        for k in 0..=order {
            prop_assert_eq!(termwise.term(k), product_shift.term(k));
        }
    }

    #[test]
    fn shift_at_zero_recovers_base(a in arb_series()) {
        let sh = a.shift(3);
        prop_assert_eq!(sh.base(), &a);
    }

    #[test]
    fn display_parse_roundtrip(a in arb_exact_series()) {
        let text = a.display_with("z");
        let back = parse_series(&text).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn scalar_field_laws(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv()).is_one());
        }
    }
}

fn arb_sl2_element() -> impl Strategy<Value = LieElement> {
    proptest::collection::vec(arb_scalar(), 3).prop_map(|coeffs| LieElement { coeffs })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sl2_axioms_on_random_elements(
        a in arb_sl2_element(), b in arb_sl2_element(), c in arb_sl2_element()
    ) {
        let sl2 = LieAlgebraSpec::sl2();
        // antisymmetry
        let anti = sl2.bracket(&a, &b).unwrap().add(&sl2.bracket(&b, &a).unwrap());
        prop_assert!(anti.is_zero());
        // Jacobi
        let s1 = sl2.bracket(&a, &sl2.bracket(&b, &c).unwrap()).unwrap();
        let s2 = sl2.bracket(&b, &sl2.bracket(&c, &a).unwrap()).unwrap();
        let s3 = sl2.bracket(&c, &sl2.bracket(&a, &b).unwrap()).unwrap();
        prop_assert!(s1.add(&s2).add(&s3).is_zero());
        // invariance
        let lhs = sl2.form_eval(&sl2.bracket(&a, &b).unwrap(), &c).unwrap();
        let rhs = sl2.form_eval(&a, &sl2.bracket(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

fn arb_creation_word() -> impl Strategy<Value = Vec<GenMode>> {
    proptest::collection::vec(
        (
            prop_oneof![Just(Sector::Plain), Just(Sector::Copied)],
            0usize..3,
            -3i64..=-1,
        )
            .prop_map(|(s, b, m)| GenMode::new(s, b, m)),
        1..5,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// [u(m), v(n)] w = u(m)v(n)w - v(n)u(m)w on the check-module.
    #[test]
    fn module_law_on_vcheck(
        sx in prop_oneof![Just(Sector::Plain), Just(Sector::Copied)],
        bx in 0usize..3,
        m in -3i64..=3,
        sy in prop_oneof![Just(Sector::Plain), Just(Sector::Copied)],
        by in 0usize..3,
        n in -3i64..=3,
        word in arb_creation_word(),
    ) {
        let p = AlgebraContext::elliptic_p(&Scalar::from_integer(0));
        let ctx = ModuleContext::v_check(LieAlgebraSpec::sl2(), p, Scalar::from_integer(1)).unwrap();
        let mut w = PbwVector::one();
        for op in word.iter().rev() {
            w = apply_mode(&ctx, *op, &w).unwrap();
        }
        let defect = module_law_defect(
            &ctx,
            GenMode::new(sx, bx, m),
            GenMode::new(sy, by, n),
            &w,
        ).unwrap();
        prop_assert!(defect.is_zero_known(), "defect {}", defect);
    }

    /// Straightening a sorted creation word reproduces the monomial.
    #[test]
    fn sorted_words_are_basis_vectors(word in arb_creation_word()) {
        let p = AlgebraContext::elliptic_p(&Scalar::from_integer(0));
        let ctx = ModuleContext::v_check(LieAlgebraSpec::sl2(), p, Scalar::from_integer(1)).unwrap();
        let mut sorted = word.clone();
        sorted.sort();
        let mut v = PbwVector::one();
        for op in sorted.iter().rev() {
            v = apply_mode(&ctx, *op, &v).unwrap();
        }
        let expect = PbwVector::monomial(PbwMonomial(sorted), LaurentSeries::one());
        prop_assert_eq!(v, expect);
    }
}
