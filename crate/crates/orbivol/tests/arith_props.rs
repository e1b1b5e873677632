use orbivol::arith::{make_field, roots_of_unity, Fq, TruncatedSeries};
use proptest::prelude::*;

fn field_params() -> impl Strategy<Value = (u64, u32)> {
    prop_oneof![Just((3, 1)), Just((5, 1)), Just((7, 1)), Just((3, 2)), Just((5, 2)), Just((2, 3)), Just((13, 1))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frobenius_has_order_s_on_a_generator((p, s) in field_params()) {
        let f = make_field(p, s).unwrap();
        let g = f.generator();
        let mut x = g;
        for k in 1..=s {
            x = f.frob(x);
            prop_assert_eq!(x == g, k == s);
        }
    }

    #[test]
    fn valuations_add(
        (p, s) in field_params(),
        va in -3i64..4, vb in -3i64..4,
        ca in prop::collection::vec(0u32..1000, 1..6),
        cb in prop::collection::vec(0u32..1000, 1..6),
    ) {
        let f = make_field(p, s).unwrap();
        let q = f.q() as u32;
        let mk = |v: i64, c: &[u32]| {
            let mut coeffs: Vec<Fq> = c.iter().map(|&x| Fq(x % q)).collect();
            if coeffs[0].0 == 0 {
                coeffs[0] = Fq(1);
            }
            TruncatedSeries::new(&f, 1, v, coeffs, Some(v + 8))
        };
        let (a, b) = (mk(va, &ca), mk(vb, &cb));
        let prod = a.mul(&b).unwrap();
        prop_assert_eq!(prod.valuation(), Some(va + vb));
    }

    #[test]
    fn roots_of_unity_form_a_cyclic_group(p in prop_oneof![Just(7u64), Just(13), Just(31)], d in 1u64..31) {
        let f = make_field(p, 1).unwrap();
        prop_assume!((p - 1) % d == 0);
        let mu = roots_of_unity(&f, d).unwrap();
        prop_assert_eq!(mu.len() as u64, d);
        for &a in &mu {
            prop_assert_eq!(f.pow(a, d), f.one());
            for &b in &mu {
                prop_assert!(mu.contains(&f.mul(a, b)));
            }
        }
        prop_assert!(mu.iter().any(|&a| f.order(a) == Some(d)));
    }

    #[test]
    fn mu_n_fixes_exactly_the_base_series(
        n in prop_oneof![Just(2u32), Just(3), Just(4), Just(6)],
        val in -2i64..3,
        coeffs in prop::collection::vec(0u32..13, 1..10),
    ) {
        let f = make_field(13, 1).unwrap();
        let zeta = orbivol::arith::primitive_root(&f, n as u64).unwrap();
        let x = TruncatedSeries::new(&f, n, val, coeffs.iter().map(|&c| Fq(c)).collect(), Some(val + 12));
        prop_assert_eq!(x.act(zeta).agrees_with(&x), x.is_in_base());
    }
}
