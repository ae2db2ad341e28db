//! Shipped certificates for `(20k)^x + (99k)^y = (101k)^z`.
//!
//! The k-factored payloads are produced with `factor_k` when the tree is
//! assembled; everything else (moduli, residue claims, bounds, inequality
//! chains) is written out by hand. The verifier recomputes all of it.

use std::collections::BTreeMap;

use super::{
    Bound, Certificate, ContradictionKind, FactKind, FactRef, Hypotheses, Node, OrderingCase,
    PatternCase, ResidueCase, ScaleSpec, Target, FORMAT_VERSION,
};
use crate::expr::{Poly, SignedSum};
use crate::reduction::{factor_k, KSpec, OrderingClass, PrimeSymbol};
use crate::search::ExponentSolution;
use crate::sieve::ResidueFact;
use crate::triples::Triple;

pub const THEOREM_TITLE: &str =
    "(20k)^x + (99k)^y = (101k)^z has only the solution (2, 2, 2) for every k >= 1";

fn triple() -> Triple {
    Triple::from_u64(20, 99, 101).expect("Pythagorean")
}

fn sum(s: &str) -> SignedSum {
    s.parse().expect("sum literal")
}

fn poly(s: &str) -> Poly {
    s.parse().expect("polynomial literal")
}

fn boxed(n: Node) -> Box<Node> {
    Box::new(n)
}

fn close(reason: ContradictionKind) -> Node {
    Node::Contradiction { reason }
}

fn cited(lemma: &str) -> Node {
    Node::Cited {
        lemma: lemma.into(),
    }
}

fn kfactor(class: OrderingClass, pattern: &[PrimeSymbol], then: Node) -> Node {
    let form =
        factor_k(&triple(), &KSpec::pattern(pattern.to_vec()), class).expect("branch factors");
    Node::KFactor {
        form,
        then: boxed(then),
    }
}

/// `var mod modulus` takes only the listed residues.
fn congruence(modulus: u64, var: &str, n: u64, allowed: &[u64], then: Node) -> Node {
    Node::Congruence {
        equations: vec![0],
        modulus,
        claim: ResidueFact::single(var, n, allowed.iter().copied()),
        then: boxed(then),
    }
}

fn kill(modulus: u64) -> Node {
    Node::Congruence {
        equations: vec![0],
        modulus,
        claim: ResidueFact::joint(Vec::new(), Vec::new(), Vec::<Vec<u64>>::new()),
        then: boxed(close(ContradictionKind::EmptyCongruence)),
    }
}

fn divide(var: &str, into: &str, then: Node) -> Node {
    Node::Divide {
        var: var.into(),
        factor: 2,
        into: into.into(),
        then: boxed(then),
    }
}

fn square_bound(minus: u64, prime: u64, small: &str, big: &str, then: Node) -> Node {
    Node::SquareBound {
        equation: 0,
        minus,
        prime,
        bound: Bound {
            small: sum(small),
            big: sum(big),
        },
        then: boxed(then),
    }
}

fn inequality(chain: &[&str], strict: &[bool], against: FactKind) -> Node {
    Node::Inequality {
        chain: chain.iter().map(|s| sum(s)).collect(),
        strict: strict.to_vec(),
        against: FactRef {
            kind: against,
            index: 0,
        },
        then: boxed(close(ContradictionKind::Size)),
    }
}

fn case_12_patterns() -> [PrimeSymbol; 2] {
    [PrimeSymbol::positive(2, "r"), PrimeSymbol::positive(5, "s")]
}

fn case_22_patterns() -> [PrimeSymbol; 2] {
    [
        PrimeSymbol::positive(3, "r"),
        PrimeSymbol::positive(11, "q"),
    ]
}

/// Every on/off choice of the split primes, in binary order.
fn patterns(primes: &[PrimeSymbol]) -> Vec<Vec<PrimeSymbol>> {
    (0..1usize << primes.len())
        .map(|bits| {
            primes
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    if bits >> i & 1 == 1 {
                        p.clone()
                    } else {
                        PrimeSymbol {
                            prime: p.prime.clone(),
                            symbol: None,
                        }
                    }
                })
                .collect()
        })
        .collect()
}

fn valuation_split(
    class: OrderingClass,
    primes: &[PrimeSymbol],
    proof: impl Fn(&[PrimeSymbol]) -> Node,
) -> Node {
    Node::ValuationSplit {
        primes: primes.to_vec(),
        cases: patterns(primes)
            .into_iter()
            .map(|pattern| PatternCase {
                proof: kfactor(class, &pattern, proof(&pattern)),
                pattern,
            })
            .collect(),
    }
}

fn on(pattern: &[PrimeSymbol]) -> Vec<bool> {
    pattern.iter().map(|p| p.symbol.is_some()).collect()
}

/// `z < x < y`: dividing out `101^z` leaves a left side above 1.
fn case_11() -> Node {
    valuation_split(
        OrderingClass::Case11,
        &[PrimeSymbol::positive(101, "s")],
        |p| {
            if on(p)[0] {
                inequality(
                    &[
                        "2^(2*x)*5^x + 3^(2*y)*11^y*101^(-s*x + s*y)",
                        "2^(2*x)*5^x",
                        "1",
                    ],
                    &[false, true],
                    FactKind::Equation,
                )
            } else {
                cited("lu-lemma")
            }
        },
    )
}

/// `z < y < x`: symmetric to `z < x < y`.
fn case_21() -> Node {
    valuation_split(
        OrderingClass::Case21,
        &[PrimeSymbol::positive(101, "r")],
        |p| {
            if on(p)[0] {
                inequality(
                    &[
                        "2^(2*x)*5^x*101^(r*x - r*y) + 3^(2*y)*11^y",
                        "3^(2*y)*11^y",
                        "1",
                    ],
                    &[false, true],
                    FactKind::Equation,
                )
            } else {
                cited("lu-lemma")
            }
        },
    )
}

/// `5^x + 2^(r(y - z)) 3^(2y) 11^y = 101^z`: modulo 33 both exponents are
/// even, and the factor `11^y` cannot fit into `101^z1 +- 5^x1`.
fn case_12_two() -> Node {
    Node::FiniteCase {
        equations: vec![0],
        modulus: 33,
        exprs: vec![poly("z"), poly("x")],
        moduli: vec![10, 10],
        listed: [["0", "0"], ["2", "8"], ["4", "6"], ["6", "4"], ["8", "2"]]
            .iter()
            .map(|t| t.iter().map(|s| s.to_string()).collect())
            .collect(),
        then: boxed(divide(
            "x",
            "x1",
            divide(
                "z",
                "z1",
                square_bound(
                    0,
                    11,
                    "11^y",
                    "101^z1 + 5^x1",
                    inequality(
                        &["11^y", "11^(2*z1)", "106^z1", "101^z1 + 5^x1"],
                        &[true, true, true],
                        FactKind::Bound,
                    ),
                ),
            ),
        )),
    }
}

/// `2^(2x) + 3^(2y) 5^(s(y - z)) 11^y = 101^z`: modulo 11 `z` is even.
fn case_12_five() -> Node {
    let after = |_: u64| {
        divide(
            "z",
            "z1",
            square_bound(
                0,
                11,
                "11^y",
                "101^z1 + 2^x",
                inequality(
                    &["11^y", "11^(2*z1)", "106^z1", "101^z1 + 2^x"],
                    &[true, true, true],
                    FactKind::Bound,
                ),
            ),
        )
    };
    congruence(
        11,
        "z",
        2,
        &[0],
        Node::ResidueSplit {
            var: "x".into(),
            modulus: 2,
            cases: (0..2)
                .map(|r| ResidueCase {
                    residue: r,
                    proof: after(r),
                })
                .collect(),
        },
    )
}

/// Both valuations positive: modulo 3 `z` is even, then modulo 17 the
/// right side is 1 and the remaining term cannot vanish.
fn both_primes() -> Node {
    congruence(3, "z", 2, &[0], kill(17))
}

fn case_12() -> Node {
    valuation_split(OrderingClass::Case12, &case_12_patterns(), |p| {
        match on(p)[..] {
            [false, false] => cited("lu-lemma"),
            [true, false] => case_12_two(),
            [false, true] => case_12_five(),
            _ => both_primes(),
        }
    })
}

/// `y < z < x`: modulo 4 `y` is even when only 3 divides `k`; the branches
/// close modulo 183 and 312.
fn case_22() -> Node {
    valuation_split(OrderingClass::Case22, &case_22_patterns(), |p| {
        match on(p)[..] {
            [false, false] => cited("lu-lemma"),
            [true, false] => congruence(4, "y", 2, &[0], kill(183)),
            [false, true] => kill(312),
            _ => both_primes(),
        }
    })
}

fn theorem() -> Certificate {
    let cases = OrderingClass::ALL
        .iter()
        .map(|&class| OrderingCase {
            class,
            proof: match class {
                OrderingClass::AllEqual => Node::Excluded {
                    solution: ExponentSolution::new(2, 2, 2),
                },
                OrderingClass::ZGeMax => cited("deng-cohen"),
                OrderingClass::HasTie => cited("le-distinct"),
                OrderingClass::Case11 => case_11(),
                OrderingClass::Case12 => case_12(),
                OrderingClass::Case21 => case_21(),
                OrderingClass::Case22 => case_22(),
            },
        })
        .collect();
    let metadata = BTreeMap::from([
        ("name".to_string(), "theorem".to_string()),
        (
            "case-1-2 v2=r,v5=0".to_string(),
            "x and z are even by the full modulo-33 solution set, without assuming x = 2".to_string(),
        ),
        (
            "case-2-2".to_string(),
            "the branches with exactly one of 3, 11 dividing k close by single congruences modulo 183 and 312"
                .to_string(),
        ),
    ]);
    Certificate {
        version: FORMAT_VERSION.into(),
        title: THEOREM_TITLE.into(),
        metadata,
        equation: Target::Scaled {
            triple: triple(),
            k: ScaleSpec::Any,
            ordering: None,
            pattern: None,
        },
        excluded: vec![ExponentSolution::new(2, 2, 2)],
        tree: Node::OrderingSplit { cases },
    }
}

fn scoped(
    name: &str,
    title: &str,
    class: OrderingClass,
    pattern: Option<Vec<PrimeSymbol>>,
    tree: Node,
) -> Certificate {
    Certificate {
        version: FORMAT_VERSION.into(),
        title: title.into(),
        metadata: BTreeMap::from([("name".to_string(), name.to_string())]),
        equation: Target::Scaled {
            triple: triple(),
            k: ScaleSpec::Any,
            ordering: Some(class),
            pattern,
        },
        excluded: Vec::new(),
        tree,
    }
}

fn explicit(
    name: &str,
    title: &str,
    equation: &str,
    hypotheses: Hypotheses,
    tree: Node,
) -> Certificate {
    Certificate {
        version: FORMAT_VERSION.into(),
        title: title.into(),
        metadata: BTreeMap::from([("name".to_string(), name.to_string())]),
        equation: Target::Explicit {
            equation: equation.parse().expect("equation literal"),
            hypotheses,
        },
        excluded: Vec::new(),
        tree,
    }
}

fn mod_17_demo() -> Certificate {
    explicit(
        "mod-17",
        "101^z = 1 + 99^y 2^a 5^b has no solution with z even",
        "101^z = 1 + 2^a*5^b*99^y",
        Hypotheses {
            facts: vec![ResidueFact::single("z", 2, [0])],
            ..Hypotheses::default()
        },
        kill(17),
    )
}

fn mod_33_demo() -> Certificate {
    explicit(
        "mod-33-x-2",
        "5^x + 2^(r(y - z)) 3^(2y) 11^y = 101^z has no solution with x = 2 < z < y",
        "5^x + 2^(r*y - r*z)*3^(2*y)*11^y = 101^z",
        Hypotheses {
            lower_bounds: BTreeMap::from([("z".to_string(), 3)]),
            fixed: BTreeMap::from([("x".to_string(), 2)]),
            relations: vec![poly("r*z - r*x - 2*x")],
            chain: Some(vec!["z".into(), "y".into()]),
            ..Hypotheses::default()
        },
        Node::FiniteCase {
            equations: vec![0],
            modulus: 33,
            exprs: vec![poly("z")],
            moduli: vec![10],
            listed: [["8"], ["18"], ["28"]]
                .iter()
                .map(|t| t.iter().map(|s| s.to_string()).collect())
                .collect(),
            then: boxed(divide(
                "z",
                "z1",
                square_bound(
                    0,
                    11,
                    "11^y",
                    "101^z1 + 5",
                    inequality(
                        &["11^y", "11^(2*z1)", "106^z1", "101^z1 + 5"],
                        &[true, true, true],
                        FactKind::Bound,
                    ),
                ),
            )),
        },
    )
}

/// The theorem, the standalone branches with several primes of `UVW` in
/// `k`, and two small explicit congruence arguments.
pub fn builtin_certificates() -> Vec<Certificate> {
    let both_12: Vec<PrimeSymbol> = case_12_patterns().to_vec();
    let both_22: Vec<PrimeSymbol> = case_22_patterns().to_vec();
    vec![
        theorem(),
        scoped(
            "case-1-1",
            "no solution with z < x < y, for every k",
            OrderingClass::Case11,
            None,
            case_11(),
        ),
        scoped(
            "case-1-2-both",
            "no solution with x < z < y when 2 and 5 divide k",
            OrderingClass::Case12,
            Some(both_12.clone()),
            kfactor(OrderingClass::Case12, &both_12, both_primes()),
        ),
        scoped(
            "case-2-2-both",
            "no solution with y < z < x when 3 and 11 divide k",
            OrderingClass::Case22,
            Some(both_22.clone()),
            kfactor(OrderingClass::Case22, &both_22, both_primes()),
        ),
        mod_17_demo(),
        mod_33_demo(),
    ]
}
