use orbivol::arith::{make_field, Fq};
use orbivol::integrate::{count_smooth_points, weil_volume, AffineSchemeDesc, VolumeValue};
use orbivol::neron::{count_points, two_isogenous, verify_volume_equality, within_hasse_bound, WeierstrassCurve};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(5u64), Just(7), Just(11), Just(13), Just(17), Just(19)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_isogenies_preserve_counts(p in prime(), e1 in 0i64..19, e2 in 0i64..19, e3 in 0i64..19, pick in 0usize..3) {
        let (r1, r2, r3) = (e1 % p as i64, e2 % p as i64, e3 % p as i64);
        prop_assume!(r1 != r2 && r2 != r3 && r1 != r3);
        let f = make_field(p, 1).unwrap();
        let e = WeierstrassCurve::short(&f, -(r1 + r2 + r3), r1 * r2 + r1 * r3 + r2 * r3, -(r1 * r2 * r3)).unwrap();
        let k = [r1, r2, r3][pick];
        let iso = two_isogenous(&e, (f.from_int(k), Fq(0))).unwrap();
        let report = verify_volume_equality(&e, &iso.target);
        prop_assert!(report.equal);
        prop_assert!(within_hasse_bound(report.count_source, p));
        prop_assert!(within_hasse_bound(report.count_target, p));
    }

    #[test]
    fn counts_are_the_affine_chart_plus_infinity(p in prime(), a in 0i64..19, b in 0i64..19) {
        let f = make_field(p, 1).unwrap();
        let Ok(e) = WeierstrassCurve::short(&f, 0, a, b) else {
            return Ok(());
        };
        let eq = format!("y^2 - x^3 - {}*x - {}", a, b);
        let chart = AffineSchemeDesc::parse(&f, &["x", "y"], &[eq.as_str()], 1).unwrap();
        let n = count_points(&e);
        prop_assert_eq!(count_smooth_points(&chart) + 1, n);
        let report = verify_volume_equality(&e, &e);
        let infinity = VolumeValue::rational(p, num_rational::BigRational::new(1.into(), (p as i64).into()));
        prop_assert_eq!(report.volume_source, weil_volume(&chart).add(&infinity));
    }
}
