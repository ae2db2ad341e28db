//! Single-field mutations of certificate nodes, each of which must make the
//! node it touches fail.

use num_bigint::BigUint;

use jesma::certificate::{Certificate, ContradictionKind, FactKind, Node};
use jesma::search::ExponentSolution;
use jesma::sieve::ResidueFact;

pub struct Mutation {
    pub description: String,
    pub certificate: Certificate,
    /// Path the verifier must report.
    pub path: Vec<String>,
}

fn other_reason(current: Option<ContradictionKind>) -> ContradictionKind {
    match current {
        Some(ContradictionKind::Size) => ContradictionKind::Valuation,
        _ => ContradictionKind::Size,
    }
}

/// Replacement nodes for `node`, with a description of each.
fn variants(node: &Node) -> Vec<(String, Node)> {
    let mut out: Vec<(String, Node)> = Vec::new();
    let current = match node {
        Node::Contradiction { reason } => Some(*reason),
        _ => None,
    };
    out.push((
        "replace by an unknown lemma".into(),
        Node::Cited {
            lemma: "unproved-lemma".into(),
        },
    ));
    out.push((
        "replace by a wrong contradiction".into(),
        Node::Contradiction {
            reason: other_reason(current),
        },
    ));
    if !matches!(node, Node::Excluded { .. }) {
        out.push((
            "replace by an excluded (1, 1, 1)".into(),
            Node::Excluded {
                solution: ExponentSolution::new(1, 1, 1),
            },
        ));
    }
    let mut push = |what: &str, f: &dyn Fn(&mut Node)| {
        let mut n = node.clone();
        f(&mut n);
        if n != *node {
            out.push((what.to_string(), n));
        }
    };
    match node {
        Node::OrderingSplit { .. } => {
            push("drop the last ordering case", &|n| {
                if let Node::OrderingSplit { cases } = n {
                    cases.pop();
                }
            });
            push("duplicate the first ordering case", &|n| {
                if let Node::OrderingSplit { cases } = n {
                    let first = cases[0].clone();
                    *cases.last_mut().unwrap() = first;
                }
            });
        }
        Node::ValuationSplit { .. } => {
            push("drop the last pattern", &|n| {
                if let Node::ValuationSplit { cases, .. } = n {
                    cases.pop();
                }
            });
            push("split on a composite", &|n| {
                if let Node::ValuationSplit { primes, .. } = n {
                    primes[0].prime = BigUint::from(4u32);
                }
            });
        }
        Node::KFactor { .. } => {
            push("change the cofactor", &|n| {
                if let Node::KFactor { form, .. } = n {
                    form.n1 += 2u32;
                }
            });
            push("drop the relations", &|n| {
                if let Node::KFactor { form, .. } = n {
                    form.relations.clear();
                    form.relations.push("x - y".parse().unwrap());
                }
            });
        }
        Node::Congruence { .. } => {
            push("point at a missing equation", &|n| {
                if let Node::Congruence { equations, .. } = n {
                    equations[0] = 7;
                }
            });
            push("claim an extra class", &|n| {
                if let Node::Congruence { claim, .. } = n {
                    if claim.exprs.is_empty() {
                        claim.allowed.insert(Vec::new());
                    } else {
                        let m = claim.moduli[0];
                        let missing = (0..m)
                            .map(|r| {
                                let mut t = vec![r.to_string()];
                                t.extend(std::iter::repeat_n(
                                    "0".to_string(),
                                    claim.exprs.len() - 1,
                                ));
                                t
                            })
                            .find(|t| !claim.allowed.contains(t));
                        match missing {
                            Some(t) => {
                                claim.allowed.insert(t);
                            }
                            None => {
                                claim.allowed.pop_first();
                            }
                        }
                    }
                }
            });
            push("use a trivial modulus", &|n| {
                if let Node::Congruence { modulus, .. } = n {
                    *modulus = 1;
                }
            });
            push("cite no equation", &|n| {
                if let Node::Congruence { equations, .. } = n {
                    equations.clear();
                }
            });
            push("swap the claim", &|n| {
                if let Node::Congruence { claim, .. } = n {
                    *claim = if claim.is_empty() {
                        ResidueFact::single("z", 2, [0, 1])
                    } else {
                        ResidueFact::joint(Vec::new(), Vec::new(), Vec::<Vec<u64>>::new())
                    };
                }
            });
        }
        Node::FiniteCase { .. } => {
            push("shift a listed tuple", &|n| {
                if let Node::FiniteCase { listed, moduli, .. } = n {
                    let last = listed.last_mut().unwrap();
                    let r: u64 = last[0].parse().unwrap();
                    last[0] = ((r + 1) % moduli[0]).to_string();
                }
            });
            push("point at a missing equation", &|n| {
                if let Node::FiniteCase { equations, .. } = n {
                    equations[0] = 7;
                }
            });
            push("use a trivial modulus", &|n| {
                if let Node::FiniteCase { modulus, .. } = n {
                    *modulus = 1;
                }
            });
        }
        Node::ResidueSplit { .. } => {
            push("drop a residue class", &|n| {
                if let Node::ResidueSplit { cases, .. } = n {
                    cases.pop();
                }
            });
            push("repeat a residue class", &|n| {
                if let Node::ResidueSplit { cases, .. } = n {
                    let r = cases[0].residue;
                    cases.last_mut().unwrap().residue = r;
                }
            });
        }
        Node::Divide { .. } => {
            push("divide by three", &|n| {
                if let Node::Divide { factor, .. } = n {
                    *factor = 3;
                }
            });
            push("reuse a live variable", &|n| {
                if let Node::Divide { into, .. } = n {
                    *into = "y".into();
                }
            });
        }
        Node::SquareBound { .. } => {
            push("use another prime", &|n| {
                if let Node::SquareBound { prime, .. } = n {
                    *prime = 13;
                }
            });
            push("shift the square", &|n| {
                if let Node::SquareBound { minus, .. } = n {
                    *minus += 5;
                }
            });
            push("weaken the bound", &|n| {
                if let Node::SquareBound { bound, .. } = n {
                    bound.big = format!("{} + 1", bound.big).parse().unwrap();
                }
            });
            push("point at a missing equation", &|n| {
                if let Node::SquareBound { equation, .. } = n {
                    *equation = 7;
                }
            });
        }
        Node::Inequality { .. } => {
            push("make every link weak", &|n| {
                if let Node::Inequality { strict, .. } = n {
                    strict.iter_mut().for_each(|s| *s = false);
                }
            });
            push("drop the last chain element", &|n| {
                if let Node::Inequality { chain, strict, .. } = n {
                    chain.pop();
                    strict.pop();
                }
            });
            push("point at a missing fact", &|n| {
                if let Node::Inequality { against, .. } = n {
                    against.index = 7;
                }
            });
            push("compare against the wrong kind of fact", &|n| {
                if let Node::Inequality { against, .. } = n {
                    against.kind = match against.kind {
                        FactKind::Bound => FactKind::Equation,
                        FactKind::Equation => FactKind::Bound,
                    };
                }
            });
        }
        Node::Cited { lemma } => {
            let swap = if lemma == "deng-cohen" {
                "lu-lemma"
            } else {
                "deng-cohen"
            };
            push("cite another lemma", &|n| {
                if let Node::Cited { lemma } = n {
                    *lemma = swap.into();
                }
            });
        }
        Node::Excluded { .. } => {
            push("exclude another solution", &|n| {
                if let Node::Excluded { solution } = n {
                    solution.y += 1;
                }
            });
        }
        Node::Contradiction { .. } => {}
    }
    out
}

/// Every single-node mutation of `cert`.
pub fn mutations(cert: &Certificate) -> Vec<Mutation> {
    let mut out = Vec::new();
    for (path, node) in cert.nodes() {
        for (what, replacement) in variants(node) {
            let mut mutated = cert.clone();
            let label = replacement.label();
            *mutated.node_mut(&path).expect("path from nodes()") = replacement;
            let mut expected = path.clone();
            *expected.last_mut().unwrap() = label;
            out.push(Mutation {
                description: format!("{}: {what}", path.join(" / ")),
                certificate: mutated,
                path: expected,
            });
        }
    }
    out
}
