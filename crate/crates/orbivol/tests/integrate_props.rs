use num_rational::Ratio;
use orbivol::arith::{make_field, Fq};
use orbivol::integrate::{
    count_smooth_points, integrate_adaptive, integrate_monomial, lift_count, weil_volume, AffineSchemeDesc,
    FormIntegrand, MPoly, VolumeValue,
};
use proptest::prelude::*;

fn monomial_text(e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, k)| format!("x{}^{}", i + 1, k))
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weil_volume_times_q_d_is_the_count(p in prop_oneof![Just(3u64), Just(5), Just(7)], a in 0i64..7, b in 0i64..7) {
        let f = make_field(p, 1).unwrap();
        let eq = format!("y^2 - x^3 - {}*x - {}", a, b);
        let x = AffineSchemeDesc::parse(&f, &["x", "y"], &[eq.as_str()], 1).unwrap();
        let n = count_smooth_points(&x);
        let scaled = weil_volume(&x).mul(&VolumeValue::q_power(p, 1, Ratio::from_integer(-1)));
        prop_assert_eq!(scaled, VolumeValue::integer(p, n as i64));
        for m in 1..=3 {
            prop_assert_eq!(lift_count(&x, m, 1 << 24).unwrap(), n * p.pow(m as u32 - 1));
        }
    }

    #[test]
    fn adaptive_intervals_nest_around_monomials(
        p in prop_oneof![Just(3u64), Just(5)],
        e in prop::collection::vec(0u32..3, 1..3),
        r in 1u32..3,
    ) {
        let f = make_field(p, 1).unwrap();
        let vars: Vec<String> = (1..=e.len()).map(|i| format!("x{}", i)).collect();
        let integrand = FormIntegrand { f: MPoly::parse(&f, &vars, &monomial_text(&e)).unwrap(), r };
        let exact = integrate_monomial(&e, r, p).unwrap();
        let mut prev: Option<orbivol::integrate::IntervalVolume> = None;
        for level in 1..=3 {
            let iv = integrate_adaptive(&integrand, level, 1 << 22).unwrap();
            prop_assert!(iv.contains(&exact));
            if let Some(pr) = &prev {
                prop_assert!(pr.contains(&iv.lo) && pr.contains(&iv.hi));
            }
            prev = Some(iv);
        }
    }

    #[test]
    fn unit_multiples_integrate_alike(c in 1u32..5, d in 0u32..5, a in 0i64..5) {
        let f = make_field(5, 1).unwrap();
        let vars = vec!["x".to_string(), "y".to_string()];
        let g = MPoly::parse(&f, &vars, &format!("x^2 - {}*y*t - t", a)).unwrap();
        let unit = g.scale(&[Fq(c), Fq(d)]);
        let lhs = integrate_adaptive(&FormIntegrand { f: g, r: 1 }, 3, 1 << 22).unwrap();
        let rhs = integrate_adaptive(&FormIntegrand { f: unit, r: 1 }, 3, 1 << 22).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
