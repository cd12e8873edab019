use genvar::ccmap::GenericEngine;
use genvar::config::{Config, SeedTree};
use genvar::kronecker::{base_change, BaseChangeMatrix, BasisKind};
use genvar::linalg::rank_mod;
use genvar::mutation::{mutate, mutate_word, Seed};
use genvar::repfq::{ext_dim, hom_dim, random_integer_representation, random_unimodular, Field, Representation};
use genvar::{DimVector, LaurentPoly, Quiver};
use num_bigint::BigInt;
use proptest::prelude::*;

fn quivers() -> Vec<Quiver> {
    vec![
        Quiver::linear_a(2),
        Quiver::linear_a(3),
        Quiver::kronecker(),
        Quiver::affine_a2(),
        Quiver::new(3, vec![(0, 1), (0, 1), (0, 1), (1, 2)]).unwrap(),
    ]
}

fn vector(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = DimVector> {
    prop::collection::vec(lo..=hi, n).prop_map(DimVector::new)
}

fn rank_mod2(b: &[Vec<i64>]) -> usize {
    let n = b.len();
    let mut buf: Vec<u64> = b.iter().flatten().map(|x| x.rem_euclid(2) as u64).collect();
    rank_mod(&mut buf, n, n, 2)
}

fn entry_gcd(b: &[Vec<i64>]) -> i64 {
    b.iter().flatten().fold(0, |g, &x| num_integer::gcd(g, x))
}

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, 2), -5i64..=5), 0..6).prop_map(|terms| {
        LaurentPoly::from_terms(2, terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_form_is_bilinear(qi in 0usize..5, a in vector(3, -4, 4), b in vector(3, -4, 4), c in vector(3, -4, 4), k in -3i64..=3) {
        let q = &quivers()[qi];
        let n = q.vertex_count();
        let cut = |v: &DimVector| DimVector::new(v.as_slice()[..n].to_vec());
        let (a, b, c) = (cut(&a), cut(&b), cut(&c));
        let e = |x: &DimVector, y: &DimVector| q.euler_form(x, y).unwrap();
        prop_assert_eq!(e(&(&a + &b), &c), e(&a, &c) + e(&b, &c));
        prop_assert_eq!(e(&a, &(&b + &c)), e(&a, &b) + e(&a, &c));
        prop_assert_eq!(e(&a.scale(k), &b), k * e(&a, &b));
        prop_assert_eq!(q.tits_norm(&a).unwrap(), e(&a, &a));
    }

    #[test]
    fn laurent_ring_axioms(x in laurent(), y in laurent(), w in laurent()) {
        let add = |a: &LaurentPoly, b: &LaurentPoly| a.try_add(b).unwrap();
        let mul = |a: &LaurentPoly, b: &LaurentPoly| a.try_mul(b).unwrap();
        prop_assert_eq!(add(&x, &y), add(&y, &x));
        prop_assert_eq!(mul(&x, &y), mul(&y, &x));
        prop_assert_eq!(mul(&mul(&x, &y), &w), mul(&x, &mul(&y, &w)));
        prop_assert_eq!(mul(&x, &add(&y, &w)), add(&mul(&x, &y), &mul(&x, &w)));
        prop_assert_eq!(mul(&x, &LaurentPoly::one(2)), x.clone());
        prop_assert!(add(&x, &-&x).is_zero());
        if !y.is_zero() {
            prop_assert_eq!(mul(&x, &y).div_exact(&y).unwrap(), x.clone());
        }
        prop_assert_eq!(LaurentPoly::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn mutation_preserves_skew_symmetry(qi in 0usize..5, word in prop::collection::vec(0usize..3, 0..10)) {
        let q = &quivers()[qi];
        let n = q.vertex_count();
        let word: Vec<usize> = word.into_iter().map(|k| k % n).collect();
        let s = mutate_word(&Seed::initial(q), &word).unwrap();
        let b = s.exchange_matrix();
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                prop_assert_eq!(*x, -b[j][i]);
            }
        }
        // mutation is a unimodular congruence, so rank mod 2 and the gcd of
        // the entries survive (single entries may change parity)
        let b0 = q.exchange_matrix();
        prop_assert_eq!(rank_mod2(b), rank_mod2(&b0));
        prop_assert_eq!(entry_gcd(b), entry_gcd(&b0));
        if let Some(&k) = word.last() {
            let back = mutate(&s, k).unwrap();
            let before = mutate_word(&Seed::initial(q), &word[..word.len() - 1]).unwrap();
            prop_assert_eq!(back.exchange_matrix(), before.exchange_matrix());
            prop_assert_eq!(back.cluster(), before.cluster());
        }
    }

    #[test]
    fn hom_minus_ext_is_euler_form(qi in 0usize..5, a in vector(3, 0, 3), b in vector(3, 0, 3), seed in any::<u64>()) {
        let q = &quivers()[qi];
        let n = q.vertex_count();
        let a = DimVector::new(a.as_slice()[..n].to_vec());
        let b = DimVector::new(b.as_slice()[..n].to_vec());
        let mut rng = SeedTree::new(seed).rng();
        let m = random_integer_representation(q, &a, 3, &mut rng).unwrap();
        let m2 = random_integer_representation(q, &b, 3, &mut rng).unwrap();
        let hom = hom_dim(&m, &m2).unwrap() as i64;
        let ext = ext_dim(&m, &m2).unwrap() as i64;
        prop_assert!(ext >= 0);
        prop_assert_eq!(hom - ext, q.euler_form(&a, &b).unwrap());

        // base change at every vertex leaves the isomorphism class alone
        let (g, g_inv): (Vec<_>, Vec<_>) = a.iter().map(|&k| random_unimodular(k as usize, 4, &mut rng)).unzip();
        let c = m.conjugate(&g, &g_inv).unwrap();
        prop_assert_eq!(hom_dim(&c, &m2).unwrap() as i64, hom);
        prop_assert_eq!(ext_dim(&c, &m2).unwrap() as i64, ext);
        prop_assert_eq!(Representation::from_json(q, &c.to_json()).unwrap(), c);
    }

    #[test]
    fn base_changes_round_trip(a in 0usize..3, b in 0usize..3, c in 0usize..3, size in 1usize..=10) {
        let k = BasisKind::ALL;
        let ab = base_change(k[a], k[b], size).unwrap();
        let ba = base_change(k[b], k[a], size).unwrap();
        prop_assert_eq!(ab.compose(&ba).unwrap(), BaseChangeMatrix::identity(k[a], size));
        prop_assert!(ab.is_unipotent());
        let bc = base_change(k[b], k[c], size).unwrap();
        prop_assert_eq!(ab.compose(&bc).unwrap(), base_change(k[a], k[c], size).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generic_variables_have_the_right_denominator(d in vector(3, -2, 2), seed in 0u64..4) {
        let q = Quiver::linear_a(3);
        let g = GenericEngine::new(&q, &Config::with_seed(seed));
        let x = g.generic_variable(&d).unwrap();
        prop_assert_eq!(x.value.denominator_vector().unwrap(), d.clone());
        // the canonical factorization recomputed summand by summand
        if let Some(part) = &x.module_part {
            let shift: Vec<i64> = d.iter().map(|&v| (-v).max(0)).collect();
            let mut acc = LaurentPoly::monomial(3, shift, 1);
            for s in &part.decomposition.summands {
                let y = g.generic_module(&s.root).unwrap().value;
                acc = acc.try_mul(&y.pow(s.multiplicity as u32)).unwrap();
            }
            prop_assert_eq!(acc, x.value);
        }
    }

    #[test]
    fn generic_variable_is_seed_independent(a in 0i64..=2, b in 0i64..=2, s1 in 0u64..100, s2 in 0u64..100) {
        let q = Quiver::kronecker();
        let d = DimVector::new(vec![a, b]);
        let x1 = GenericEngine::new(&q, &Config::with_seed(s1)).generic_variable(&d).unwrap().value;
        let x2 = GenericEngine::new(&q, &Config::with_seed(s2)).generic_variable(&d).unwrap().value;
        prop_assert_eq!(x1, x2);
    }
}

#[test]
fn direct_sum_over_q_matches_parts() {
    let q = Quiver::kronecker();
    let s0 = Representation::simple(&q, 0, Field::Rational);
    let s1 = Representation::simple(&q, 1, Field::Rational);
    let m = s0.direct_sum(&s1).unwrap();
    assert_eq!(hom_dim(&m, &m).unwrap(), 2);
    assert_eq!(ext_dim(&m, &m).unwrap(), 2);
}
