//! One pass/fail line per acceptance criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Pow;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use jesma::arith::{is_perfect_power_of, mult_order, radical, valuation};
use jesma::certificate::{
    builtin_certificates, verify_certificate, Certificate, Verdict, THEOREM_TITLE,
};
use jesma::cli::corpus::shipped_corpus;
use jesma::reduction::{deng_cohen_filter, miyazaki_parity_check};
use jesma::search::{
    find_solutions, find_solutions_scaled, run_instance, EquationInstance, ExponentSolution, Form,
};
use jesma::sieve::{
    congruence_solutions, find_killing_modulus, two_term_solutions, two_term_solutions_with,
    ConstraintSet, Term,
};
use jesma::triples::Triple;

use common::mutations::mutations;
use common::{brute_force, powmod, sol, z_bound};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn b(n: u64) -> BigUint {
    BigUint::from(n)
}

fn set(v: &[(u64, u64, u64)]) -> Vec<ExponentSolution> {
    v.iter().map(|&t| t.into()).collect()
}

fn scaled_family(
    triples: &[(u64, u64, u64)],
    ks: std::ops::RangeInclusive<u64>,
    bound: u64,
) -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for &(u, v, w) in triples {
        let t = Triple::from_u64(u, v, w).map_err(|e| e.to_string())?;
        for k in ks.clone() {
            let r = find_solutions_scaled(&t, &b(k), bound, bound).map_err(|e| e.to_string())?;
            ensure(r.solutions == [sol(2, 2, 2)], || {
                format!("({u}, {v}, {w}) k = {k}: found {:?}", r.tuples())
            })?;
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{count} instances give exactly {{(2, 2, 2)}} in {elapsed:?}"
    ))
}

fn criterion_1() -> Outcome {
    scaled_family(
        &[
            (3, 4, 5),
            (5, 12, 13),
            (7, 24, 25),
            (9, 40, 41),
            (11, 60, 61),
        ],
        1..=20,
        25,
    )
}

fn criterion_2() -> Outcome {
    scaled_family(&[(20, 99, 101)], 1..=50, 20)
}

fn criterion_3() -> Outcome {
    let mut cases: Vec<((u64, u64, u64), u64, Vec<ExponentSolution>)> = vec![
        ((3, 2, 5), 30, set(&[(1, 1, 1), (2, 4, 2)])),
        ((7, 2, 3), 30, set(&[(1, 1, 2), (2, 5, 4)])),
        ((89, 2, 91), 30, set(&[(1, 1, 1), (1, 13, 2)])),
    ];
    for n in 3..=6u32 {
        let p = 1u64 << n;
        cases.push((
            (p - 1, 2, p + 1),
            30,
            set(&[(1, 1, 1), (2, u64::from(n) + 2, 2)]),
        ));
    }
    for n in 2..=10u64 {
        let expected = if n == 3 {
            set(&[(2, 2, 2)])
        } else {
            Vec::new()
        };
        cases.push(((n, n + 1, n + 2), 25, expected));
    }
    for ((a, bb, c), bound, expected) in &cases {
        let r =
            find_solutions(&b(*a), &b(*bb), &b(*c), *bound, *bound).map_err(|e| e.to_string())?;
        ensure(r.solutions == *expected, || {
            format!(
                "{a}^x + {bb}^y = {c}^z: found {:?}, expected {expected:?}",
                r.tuples()
            )
        })?;
    }
    Ok(format!(
        "{} equations reproduce their exact solution sets",
        cases.len()
    ))
}

fn criterion_4() -> Outcome {
    // (a) 101^z - 1 - 99^y 2^a 5^b with z even
    let sum: jesma::expr::SignedSum = "101^z - 1 - 99^y*2^a*5^b".parse().unwrap();
    let terms: Vec<Term> = sum
        .terms
        .iter()
        .map(|(neg, m)| Term::new(if *neg { -1 } else { 1 }, m.clone()))
        .collect();
    let cs = ConstraintSet::parse(&["z even"]).unwrap();
    let km = find_killing_modulus(&terms, &cs, 100, 120).ok_or("no killing modulus up to 100")?;
    ensure(km.modulus <= 17, || {
        format!("killing modulus {} > 17", km.modulus)
    })?;
    // independent check of the mod-17 facts on actual residues
    for z in (2..=64).step_by(2) {
        ensure(powmod(101, z, 17) == 1, || {
            format!("101^{z} is not 1 mod 17")
        })?;
    }
    for (y, a, bb) in
        (1..=16).flat_map(|y| (1..=8).flat_map(move |a| (1..=16).map(move |bb| (y, a, bb))))
    {
        let t = powmod(99, y, 17) * powmod(2, a, 17) % 17 * powmod(5, bb, 17) % 17;
        ensure(t != 0, || format!("99^{y} 2^{a} 5^{bb} vanishes mod 17"))?;
    }

    // (b) 2^z = 4^x mod 11
    let classes = two_term_solutions(2, 4, 11).map_err(|e| e.to_string())?;
    let (px, pz) = (classes.period_of("x"), classes.period_of("z"));
    ensure(px == Some(5) && pz == Some(10), || {
        format!("periods {px:?}, {pz:?}")
    })?;
    let ix = classes.vars.iter().position(|v| v == "x").unwrap();
    let pairs: BTreeSet<(u64, u64)> = classes
        .tuples()
        .iter()
        .map(|t| (t[ix], t[1 - ix]))
        .collect();
    let expected: BTreeSet<(u64, u64)> = (0..5).map(|x| (x, 2 * x % 10)).collect();
    ensure(pairs == expected, || {
        format!("(x mod 5, z mod 10) in {pairs:?}")
    })?;
    for x in 1..=40 {
        for z in 1..=40 {
            let holds = powmod(2, z, 11) == powmod(4, x, 11);
            ensure(holds == ((z + 20 - (2 * x) % 10) % 10 == 0), || {
                format!("mismatch at x = {x}, z = {z}")
            })?;
        }
    }

    // (c) 20^x 3^(2y) = 101^z - 11^y mod 4
    let terms = vec![
        Term::new(1, "2^(2*x)*5^x*3^(2*y)".parse().unwrap()),
        Term::power(-1, 101, "z"),
        Term::power(1, 11, "y"),
    ];
    let set_c =
        congruence_solutions(&terms, 4, &ConstraintSet::new()).map_err(|e| e.to_string())?;
    let ys = set_c.project("y", 2).ok_or("no y period")?;
    ensure(ys == BTreeSet::from([0]), || format!("y mod 2 in {ys:?}"))?;
    for (x, y, z) in
        (1..=6).flat_map(|x| (1..=12).flat_map(move |y| (1..=6).map(move |z| (x, y, z))))
    {
        let lhs = powmod(20, x, 4) * powmod(3, 2 * y, 4) % 4;
        let rhs = (powmod(101, z, 4) + 4 - powmod(11, y, 4)) % 4;
        if lhs == rhs {
            ensure(y % 2 == 0, || format!("odd y = {y} survives mod 4"))?;
        }
    }

    // (d) 2^z = 5^x mod 33 with x = 2
    let two = ConstraintSet::parse(&["x = 2"]).unwrap();
    let set_d = two_term_solutions_with(2, 5, 33, &two).map_err(|e| e.to_string())?;
    let zd = set_d.project("z", 10).ok_or("no z period")?;
    ensure(zd == BTreeSet::from([8]), || format!("z mod 10 in {zd:?}"))?;
    let brute: BTreeSet<u64> = (1..=100)
        .filter(|&z| powmod(2, z, 33) == 25)
        .map(|z| z % 10)
        .collect();
    ensure(brute == zd, || format!("enumeration gives {brute:?}"))?;

    Ok(format!(
        "(a) killing modulus {}; (b) z = 2x mod 10; (c) y even; (d) z = 8 mod 10",
        km.modulus
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let dir = common::crate_dir().join("certificates");
    let mut total = 0;
    let mut theorem_valid = false;
    let names: Vec<String> = builtin_certificates()
        .iter()
        .map(|c| c.metadata["name"].clone())
        .collect();
    for name in &names {
        let text =
            std::fs::read_to_string(dir.join(format!("{name}.json"))).map_err(|e| e.to_string())?;
        let c = Certificate::from_json(&text).map_err(|e| e.to_string())?;
        let v = verify_certificate(&c);
        ensure(v.is_valid(), || format!("{name}: {v}"))?;
        theorem_valid |= c.title == THEOREM_TITLE;
        let muts = mutations(&c);
        ensure(muts.len() >= 10, || {
            format!("{name}: only {} mutations", muts.len())
        })?;
        for m in &muts {
            match verify_certificate(&m.certificate) {
                Verdict::Invalid { path, .. } if path == m.path => {}
                other => return Err(format!("{name}: {} gave {other}", m.description)),
            }
        }
        total += muts.len();
    }
    ensure(theorem_valid, || {
        "main theorem certificate is not shipped".into()
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} certificates valid; {total} mutations all rejected at the mutated node, in {elapsed:?}",
        names.len()
    ))
}

fn criterion_6() -> Outcome {
    // (a), (b) over every pythag-exp corpus solution actually found by search
    let mut checked = 0;
    for e in shipped_corpus()
        .iter()
        .filter(|e| e.form == Form::PythagExp)
    {
        for inst in e.instances()? {
            let r = run_instance(inst, e.x_max, e.y_max).map_err(|er| er.to_string())?;
            for s in &r.solutions {
                let all_even = s.x % 2 == 0 && s.y % 2 == 0 && s.z % 2 == 0;
                if all_even {
                    ensure(miyazaki_parity_check(s).is_accept(), || {
                        format!("{}: {s} fails parity", e.name)
                    })?;
                }
                ensure(deng_cohen_filter(s).is_accept(), || {
                    format!("{}: {s} has z >= max(x, y)", e.name)
                })?;
                checked += 1;
            }
        }
    }

    // (c) search against a naive 3-D scan
    let mut rng = StdRng::seed_from_u64(0x6a65_736d);
    for i in 0..50 {
        let (a, bb, c): (u64, u64, u64) = (
            rng.gen_range(2..=50),
            rng.gen_range(2..=50),
            rng.gen_range(2..=50),
        );
        let (xm, ym) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let inst = EquationInstance::general(b(a), b(bb), b(c)).unwrap();
        let fast = run_instance(inst.clone(), xm, ym).map_err(|e| e.to_string())?;
        let slow = brute_force(&inst, xm, ym, z_bound(&inst, xm, ym));
        ensure(fast.solutions == slow, || {
            format!(
                "instance {i}: {inst} differs: {:?} vs {slow:?}",
                fast.tuples()
            )
        })?;
    }
    for (a, bb, c) in [(3u64, 5, 7), (5, 3, 7), (7, 8, 13)] {
        let inst = EquationInstance::eisenstein(b(a), b(bb), b(c)).unwrap();
        let fast = run_instance(inst.clone(), 8, 8).map_err(|e| e.to_string())?;
        ensure(
            fast.solutions == brute_force(&inst, 8, 8, z_bound(&inst, 8, 8)),
            || format!("{inst} differs"),
        )?;
    }

    // (d) arithmetic against definitions
    for m in 2..=300u64 {
        for a in 1..m {
            if gcd(a, m) != 1 {
                continue;
            }
            let d = mult_order(a, m).map_err(|e| e.to_string())?;
            let naive = (1..=m).find(|&d| powmod(a, d, m) == 1).unwrap();
            ensure(d == naive, || {
                format!("ord_{m}({a}) = {d}, expected {naive}")
            })?;
        }
    }
    for n in 1..=3000u64 {
        let mut rad = 1;
        let mut rest = n;
        for p in 2..=n {
            if rest % p == 0 {
                rad *= p;
                while rest % p == 0 {
                    rest /= p;
                }
            }
        }
        ensure(radical(&b(n)).map_err(|e| e.to_string())? == b(rad), || {
            format!("radical({n})")
        })?;
        for p in [2u64, 3, 5, 7, 11, 101] {
            let (e, cof) = valuation(&b(p), &b(n)).map_err(|e| e.to_string())?;
            ensure(
                cof.clone() * Pow::pow(&b(p), e) == b(n) && cof % p != b(0),
                || format!("v_{p}({n})"),
            )?;
        }
    }
    for base in 2..=30u64 {
        for n in 1..=2000u64 {
            let got = is_perfect_power_of(&b(n), &b(base)).map_err(|e| e.to_string())?;
            let naive = (1..=11u32).find(|&k| base.checked_pow(k) == Some(n));
            ensure(got == naive, || {
                format!("{n} as a power of {base}: {got:?} vs {naive:?}")
            })?;
        }
    }
    Ok(format!(
        "(a, b) {checked} pythag-exp corpus solutions pass both filters; (c) 50 random instances match the 3-D scan; (d) arithmetic matches definitions"
    ))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("deng-cohen reproduction", criterion_1),
        ("(20k, 99k, 101k) desk-scale check", criterion_2),
        ("multi-solution equations", criterion_3),
        ("sieve congruence facts", criterion_4),
        ("certificate suite", criterion_5),
        ("property suites", criterion_6),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
