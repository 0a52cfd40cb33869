//! Randomized cross-checks of the algebraic invariants.

use proptest::prelude::*;

use gamma2_core::poly::{Coeff, Monomial, MultilinearPoly};
use gamma2_core::{
    compute_f, compute_f_sigma, numeric_oracle, trace_comb, word_to_matrix, GenWord, Generator,
    SignSequence,
};

fn arb_poly(pairs: usize) -> impl Strategy<Value = MultilinearPoly> {
    let width = 2 * pairs as u32;
    prop::collection::vec((0..1u64 << width, -100i128..100), 0..12).prop_map(move |terms| {
        MultilinearPoly::from_terms(
            pairs,
            terms.into_iter().map(|(m, c)| (Monomial::from_mask(m), c)),
        )
        .unwrap()
    })
}

fn arb_sigma(pairs: usize) -> impl Strategy<Value = SignSequence> {
    (0..1u64 << (2 * pairs as u32))
        .prop_map(move |mask| SignSequence::from_mask(pairs, mask).unwrap())
}

fn arb_point(pairs: usize) -> impl Strategy<Value = Vec<Coeff>> {
    prop::collection::vec(-3i128..=3, 2 * pairs)
}

proptest! {
    /// evaluate(p^sigma, v) = evaluate(p, w) with w_j = sigma(j) * (1 + v_j).
    #[test]
    fn substitution_evaluation_compatibility(
        p in arb_poly(3),
        sigma in arb_sigma(3),
        point in arb_point(3),
    ) {
        let substituted = p.substitute_signs(&sigma).unwrap();
        let lhs = substituted.evaluate(&point).unwrap();
        let moved: Vec<Coeff> = point
            .iter()
            .enumerate()
            .map(|(j, &v)| Coeff::from(sigma.sign(j)) * (1 + v))
            .collect();
        let rhs = p.evaluate(&moved).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// Substitution is linear: it distributes over add and scale.
    #[test]
    fn substitution_distributes(
        p in arb_poly(2),
        q in arb_poly(2),
        sigma in arb_sigma(2),
        scalar in -20i128..20,
    ) {
        let sum_then = p.add(&q).unwrap().substitute_signs(&sigma).unwrap();
        let then_sum = p
            .substitute_signs(&sigma)
            .unwrap()
            .add(&q.substitute_signs(&sigma).unwrap())
            .unwrap();
        prop_assert_eq!(sum_then, then_sum);

        let scale_then = p.scale(scalar).unwrap().substitute_signs(&sigma).unwrap();
        let then_scale = p.substitute_signs(&sigma).unwrap().scale(scalar).unwrap();
        prop_assert_eq!(scale_then, then_scale);
    }

    /// Every operation keeps exponents in {0, 1}: masks never exceed the
    /// ambient width and serialization round-trips exactly.
    #[test]
    fn json_round_trip(p in arb_poly(3)) {
        let text = serde_json::to_string(&p.to_json_value()).unwrap();
        let back = MultilinearPoly::parse_json(&text).unwrap();
        prop_assert_eq!(back, p);
    }

    /// Disjoint products commute and their support is the union.
    #[test]
    fn disjoint_product_shape(
        a in arb_poly(1),
        b_raw in arb_poly(1),
    ) {
        // shift b onto the second pair so supports are disjoint
        let b = MultilinearPoly::from_terms(
            2,
            b_raw.terms().iter().map(|&(m, c)| (Monomial::from_mask(m.mask() << 2), c)),
        )
        .unwrap();
        let a = a.lift_to(2).unwrap();
        let ab = a.mul_disjoint(&b).unwrap();
        let ba = b.mul_disjoint(&a).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert!(ab.support() & !(a.support() | b.support()) == 0);
    }

    /// Word-to-matrix is a monoid homomorphism.
    #[test]
    fn word_homomorphism(
        u in prop::collection::vec(0usize..4, 0..6),
        v in prop::collection::vec(0usize..4, 0..6),
    ) {
        let letters = |ixs: &[usize]| GenWord(ixs.iter().map(|&i| Generator::ALL[i]).collect());
        let (wu, wv) = (letters(&u), letters(&v));
        let mut joined = wu.clone();
        joined.0.extend_from_slice(wv.letters());
        let lhs = word_to_matrix(&joined).unwrap();
        let rhs = word_to_matrix(&wu).unwrap().mul(&word_to_matrix(&wv).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// det F_k = 1 at arbitrary integer points, k <= 3.
    #[test]
    fn determinant_at_points(k in 0usize..=3, point_seed in prop::collection::vec(-5i128..=5, 6)) {
        let f = compute_f(k).unwrap();
        let point = &point_seed[..2 * k];
        prop_assert_eq!(f.det_at(point).unwrap(), 1);
    }

    /// The polynomial route and the integer-matrix route agree everywhere.
    #[test]
    fn oracle_agreement(k in 1usize..=3, exps_seed in prop::collection::vec(-5i128..=5, 6)) {
        let exponents = &exps_seed[..2 * k];
        let p = compute_f(k).unwrap().trace().unwrap();
        prop_assert_eq!(numeric_oracle(k, exponents).unwrap(), p.evaluate(exponents).unwrap());
    }

    /// Building F_k^sigma from substituted powers matches substituting F_k,
    /// and the trace combination commutes with substitution.
    #[test]
    fn f_sigma_cross_check(k in 0usize..=2, mask in 0u64..16) {
        let mask = mask & ((1 << (2 * k as u32)) - 1);
        let sigma = SignSequence::from_mask(k, mask).unwrap();
        let direct = compute_f_sigma(k, &sigma).unwrap();
        let f = compute_f(k).unwrap();
        prop_assert_eq!(&direct.f, &f.f.substitute_signs(&sigma).unwrap());
        prop_assert_eq!(&direct.g, &f.g.substitute_signs(&sigma).unwrap());
        let m = gamma2_core::constants().a4;
        let comb_then = trace_comb(&f, &m).unwrap().substitute_signs(&sigma).unwrap();
        let then_comb = trace_comb(&direct, &m).unwrap();
        prop_assert_eq!(comb_then, then_comb);
    }
}
