mod common;

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Pow;
use proptest::prelude::*;

use jesma::arith::{
    factorize, factorize_u64, gcd_u64, is_perfect_power_of, is_prime_u64, modpow_u64, mult_order,
    radical, totient_u64, valuation,
};
use jesma::expr::{ExpEquation, Poly, SignedSum};
use jesma::reduction::{classify_ordering, OrderingClass};
use jesma::search::{find_terai_solutions, run_instance, EquationInstance, ExponentSolution};
use jesma::sieve::{congruence_solutions, ConstraintSet, Term};
use jesma::triples::{primitive_from_pq, Triple};

use common::{brute_force, powmod, z_bound};

fn b(n: u64) -> BigUint {
    BigUint::from(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_search_matches_naive_scan(a in 2u64..=50, bb in 2u64..=50, c in 2u64..=50, xm in 1u64..=8, ym in 1u64..=8) {
        let inst = EquationInstance::general(b(a), b(bb), b(c)).unwrap();
        let fast = run_instance(inst.clone(), xm, ym).unwrap();
        prop_assert_eq!(fast.solutions, brute_force(&inst, xm, ym, z_bound(&inst, xm, ym)));
    }

    #[test]
    fn scaled_search_matches_naive_scan(p in 2u64..=7, q in 1u64..=6, k in 1u64..=12) {
        prop_assume!(p > q && gcd_u64(p, q) == 1 && (p + q) % 2 == 1);
        let t = primitive_from_pq(&b(p), &b(q)).unwrap();
        let inst = EquationInstance::scaled(&t, &b(k)).unwrap();
        let fast = run_instance(inst.clone(), 7, 7).unwrap();
        let slow = brute_force(&inst, 7, 7, z_bound(&inst, 7, 7));
        prop_assert_eq!(&fast.solutions, &slow);
        prop_assert!(fast.solutions.iter().all(|s| inst.holds(s)));
    }

    #[test]
    fn terai_search_matches_naive_scan(bb in 2u64..=30, c in 2u64..=30) {
        let fast = find_terai_solutions(&b(bb), &b(c), 6, 6).unwrap();
        let mut slow = Vec::new();
        for m in 1..=6u64 {
            for n in 1..=6u64 {
                let d = Pow::pow(&b(c), n) - Pow::pow(&b(bb), m).min(Pow::pow(&b(c), n));
                let r = d.sqrt();
                if Pow::pow(&b(c), n) > Pow::pow(&b(bb), m) && &r * &r == d {
                    slow.push(ExponentSolution::new(u64::try_from(&r).unwrap(), m, n));
                }
            }
        }
        slow.sort();
        prop_assert_eq!(fast.solutions, slow);
    }

    #[test]
    fn multiplicative_order_is_least_and_divides_totient(a in 1u64..500, m in 2u64..500) {
        prop_assume!(gcd_u64(a, m) == 1);
        let d = mult_order(a, m).unwrap();
        prop_assert_eq!(modpow_u64(a, d, m), 1 % m);
        prop_assert_eq!(totient_u64(m) % d, 0);
        for e in 1..d {
            prop_assert_ne!(powmod(a, e, m), 1);
        }
    }

    #[test]
    fn noncoprime_order_is_an_error(a in 2u64..200, m in 2u64..200) {
        prop_assume!(gcd_u64(a, m) != 1);
        prop_assert!(mult_order(a, m).is_err());
    }

    #[test]
    fn valuation_splits_exactly(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101]), e in 0u32..12, cof in 1u64..10_000) {
        prop_assume!(cof % p != 0);
        let n = Pow::pow(&b(p), e) * b(cof);
        prop_assert_eq!(valuation(&b(p), &n).unwrap(), (u64::from(e), b(cof)));
    }

    #[test]
    fn radical_is_the_product_of_distinct_primes(n in 1u64..1_000_000) {
        let expected: u64 = factorize_u64(n).iter().map(|(p, _)| *p).product();
        prop_assert_eq!(radical(&b(n)).unwrap(), b(expected));
        let f = factorize(&b(n));
        prop_assert_eq!(f.value(), b(n));
        prop_assert!(f.primes().all(|p| is_prime_u64(u64::try_from(p).unwrap())));
    }

    #[test]
    fn perfect_powers_are_recognised(base in 2u64..100, e in 1u32..20, off in 0u64..3) {
        let n = Pow::pow(&b(base), e) + b(off);
        let got = is_perfect_power_of(&n, &b(base)).unwrap();
        if off == 0 {
            prop_assert_eq!(got, Some(e));
        } else if got.is_some() {
            prop_assert_eq!(Pow::pow(&b(base), got.unwrap()), n);
        }
    }

    #[test]
    fn ordering_classes_partition_the_cube(x in 1u64..40, y in 1u64..40, z in 1u64..40) {
        let s = ExponentSolution::new(x, y, z);
        let class = classify_ordering(&s);
        prop_assert!(class.contains(&s));
        let all = [
            OrderingClass::AllEqual, OrderingClass::ZGeMax, OrderingClass::Case11, OrderingClass::Case12,
            OrderingClass::Case21, OrderingClass::Case22, OrderingClass::HasTie,
        ];
        prop_assert_eq!(all.iter().filter(|c| c.contains(&s)).count(), 1);
    }

    #[test]
    fn signed_sums_print_and_parse(coeffs in prop::collection::vec((any::<bool>(), 2u64..200, 0i64..4, 0i64..4), 1..5)) {
        let text: Vec<String> = coeffs
            .iter()
            .enumerate()
            .map(|(i, (neg, base, cx, cy))| {
                let sign = if i == 0 { if *neg { "-" } else { "" } } else if *neg { " - " } else { " + " };
                format!("{sign}{base}^({cx}*x + {cy}*y)")
            })
            .collect();
        let sum: SignedSum = text.concat().parse().unwrap();
        let again: SignedSum = sum.to_string().parse().unwrap();
        prop_assert_eq!(&again, &sum);
    }

    #[test]
    fn equations_evaluate_consistently(x in 1i128..6, y in 1i128..6) {
        let eq: ExpEquation = "3^x + 4^y = 5^(x + y - 2)".parse().unwrap();
        let values = HashMap::from([("x".to_string(), x), ("y".to_string(), y)]);
        let truth = 3i128.pow(x as u32) + 4i128.pow(y as u32) == 5i128.pow((x + y - 2).max(0) as u32);
        if x + y >= 2 {
            prop_assert_eq!(eq.holds_at(&values).unwrap(), truth);
        }
    }

    #[test]
    fn congruence_classes_contain_every_actual_solution(a in 2u64..30, bb in 2u64..30, m in 2u64..40) {
        prop_assume!(gcd_u64(a, m) == 1 && gcd_u64(bb, m) == 1);
        let terms = [Term::power(1, a, "x"), Term::power(-1, bb, "y")];
        let set = congruence_solutions(&terms, m, &ConstraintSet::new()).unwrap();
        let (px, py) = (set.period_of("x").unwrap(), set.period_of("y").unwrap());
        let ix = set.vars.iter().position(|v| v == "x").unwrap();
        let tuples = set.tuples();
        for x in 1..=2 * px {
            for y in 1..=2 * py {
                let holds = powmod(a, x, m) == powmod(bb, y, m);
                let mut t = vec![0; 2];
                t[ix] = x % px;
                t[1 - ix] = y % py;
                prop_assert_eq!(holds, tuples.contains(&t), "x = {}, y = {}", x, y);
            }
        }
    }
}

#[test]
fn poly_arithmetic_matches_evaluation() {
    let p: Poly = "r*z - r*x - 2*x".parse().unwrap();
    let q: Poly = "x + 3".parse().unwrap();
    let values = HashMap::from([
        ("r".to_string(), 4i128),
        ("z".to_string(), 3),
        ("x".to_string(), 2),
    ]);
    assert_eq!(p.eval(&values).unwrap(), 0);
    assert_eq!((&p * &q).eval(&values).unwrap(), 0);
    assert_eq!((&p + &q).eval(&values).unwrap(), 5);
    assert!(Triple::from_u64(3, 4, 6).is_err());
}
