use orbivol::fourier::{
    self, characters, fourier_transform, inverse_fourier, CountTable, Cyclo, FiniteAbelianGroup,
};
use orbivol::hasse::{invariant, push_along_inclusion, torsor_gerbe, BmuNGerbeClass, MuNCharacter, QmodZ};
use orbivol::integrate::Coeff;
use orbivol::torsor::{
    classify, enumerate_h1, orbit_decomposition, twist_cocycle, Cocycle, GroupWithFrobenius,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Z/a × Z/b with Frobenius (x, y) ↦ (kx, ly).
fn product_group(a: usize, b: usize, k: usize, l: usize) -> GroupWithFrobenius {
    let n = a * b;
    let split = |i: usize| (i / b, i % b);
    let join = |x: usize, y: usize| (x % a) * b + y % b;
    let mul = (0..n)
        .map(|i| (0..n).map(|j| join(split(i).0 + split(j).0, split(i).1 + split(j).1)).collect())
        .collect();
    let phi = (0..n).map(|i| join(split(i).0 * k, split(i).1 * l)).collect();
    GroupWithFrobenius::from_table(mul, phi).unwrap()
}

/// S_3 as permutations of {0,1,2}, identity first, with trivial Frobenius.
fn s3() -> GroupWithFrobenius {
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let idx = |p: [usize; 3]| perms.iter().position(|&x| x == p).unwrap();
    let mul = perms
        .iter()
        .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    GroupWithFrobenius::from_table(mul, (0..6).collect()).unwrap()
}

fn coprime_q() -> impl Strategy<Value = u64> {
    prop_oneof![Just(5u64), Just(7), Just(11), Just(13), Just(25), Just(49)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn abelian_class_count(a in 1usize..5, b in 1usize..4, q in coprime_q()) {
        let g = product_group(a, b, 1, 1);
        prop_assume!(q % 2 != 0 || g.order() % 2 != 0);
        prop_assume!((q % 3 != 0 || g.order() % 3 != 0) && (q % 5 != 0 || g.order() % 5 != 0) && (q % 7 != 0 || g.order() % 7 != 0));
        let h1 = enumerate_h1(&g, q).unwrap();
        let oracle = (0..g.order()).filter(|&x| g.pow(x, q - 1) == 0).count() * g.order();
        prop_assert_eq!(h1.len(), oracle);
    }

    #[test]
    fn tags_and_shapes_are_class_functions(q in prop_oneof![Just(5u64), Just(7), Just(11), Just(13)], which in 0usize..3) {
        let g = match which {
            0 => s3(),
            1 => product_group(2, 4, 1, 3),
            _ => product_group(3, 3, 2, 1),
        };
        prop_assume!(g.order() as u64 % q != 0);
        for a in 0..g.order() {
            for b in 0..g.order() {
                let c = Cocycle::new(a, b);
                if !g.is_cocycle(c, q) {
                    continue;
                }
                let tag = classify(&g, c);
                let shape = orbit_decomposition(&g, c);
                for o in g.orbit(c) {
                    prop_assert_eq!(classify(&g, o), tag);
                }
                let total: usize = shape.iter().map(|(f, e, m)| f * e * m).sum();
                prop_assert_eq!(total, g.order());
            }
        }
    }

    #[test]
    fn twisting_there_and_back(q in prop_oneof![Just(5u64), Just(7), Just(13)], a in 0usize..6, b in 0usize..6, p in 0usize..6) {
        let g = s3();
        let c = Cocycle::new(a, b);
        prop_assume!(g.is_cocycle(c, q));
        let inner = g.twisted_by(p);
        let there = twist_cocycle(&g, c, p);
        prop_assert!(inner.is_cocycle(there, q));
        prop_assert_eq!(twist_cocycle(&inner, there, inner.inv(p)), c);
    }

    #[test]
    fn gerbe_invariants(n in 1u64..13, k in 0u64..13, d in 1u64..5, chi1 in 0u64..13, chi2 in 0u64..13) {
        let g = BmuNGerbeClass::new(n, k % n).unwrap();
        prop_assert_eq!(invariant(&push_along_inclusion(&g, d).unwrap()), invariant(&g));
        let (a, b) = (MuNCharacter::new(n, chi1 % n).unwrap(), MuNCharacter::new(n, chi2 % n).unwrap());
        let sum = MuNCharacter::new(n, (chi1 + chi2) % n).unwrap();
        prop_assert_eq!(torsor_gerbe(&sum), torsor_gerbe(&a).add(&torsor_gerbe(&b)));
        prop_assert_eq!(invariant(&torsor_gerbe(&a)), QmodZ::new((chi1 % n) as i64, n as i64));
    }

    #[test]
    fn characters_are_orthogonal(factors in prop::collection::vec(1u64..5, 0..3)) {
        let g = FiniteAbelianGroup::new(factors).unwrap();
        let chars = characters(&g);
        for (i, x) in chars.iter().enumerate() {
            for (j, y) in chars.iter().enumerate() {
                let s = g.elements().fold(Cyclo::integer(0), |acc, t| acc.add(&x.value(&t).mul(&y.value(&t).inv().unwrap())));
                let want = if i == j { Cyclo::integer(g.order() as i64) } else { Cyclo::integer(0) };
                prop_assert_eq!(s, want);
            }
        }
    }

    #[test]
    fn fourier_inversion(factors in prop::collection::vec(1u64..5, 0..3), vals in prop::collection::vec(-9i64..10, 64)) {
        let g = FiniteAbelianGroup::new(factors).unwrap();
        let values = (0..g.order()).map(|i| Cyclo::integer(vals[i % vals.len()])).collect();
        let t = CountTable::new(g.clone(), values).unwrap();
        prop_assert_eq!(inverse_fourier(&g, &fourier_transform(&t)), t);
    }

    #[test]
    fn derivations_follow_from_the_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = fourier::random_instance(&mut rng);
        prop_assert!(fourier::verify_main_identity(&d).passes());
        let st = fourier::derive_stable_equality(&d);
        prop_assert!(st.equal && st.collapse_ok);
        for l in 0..d.a_g.order() {
            let k = fourier::derive_kappa_identity(&d, l).unwrap();
            prop_assert!(k.equal && k.collapse_ok);
        }
    }
}
