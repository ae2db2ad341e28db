//! Case-tree proof certificates.
//!
//! A [`Certificate`] states an equation, a set of excluded solutions and a
//! tree of steps. Internal nodes split the solution space or refine the
//! accumulated hypotheses; leaves close a branch. [`verify_certificate`]
//! re-derives every step from its payload and the hypotheses gathered on
//! the way down, so nothing in a certificate is taken on trust except the
//! named lemmas of [`lemmas`].

mod builtin;
mod inequality;
pub mod lemmas;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ExpEquation, Poly, SignedSum};
use crate::reduction::{KFactoredForm, OrderingClass, PrimeSymbol};
use crate::search::ExponentSolution;
use crate::sieve::ResidueFact;
use crate::triples::Triple;

pub use builtin::{builtin_certificates, THEOREM_TITLE};
pub use inequality::{verify_inequality, InequalityError};
pub use verify::verify_certificate;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    pub title: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    pub equation: Target,
    #[serde(default)]
    pub excluded: Vec<ExponentSolution>,
    pub tree: Node,
}

/// What the certificate proves has no solutions outside the excluded set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Target {
    /// `(kU)^x + (kV)^y = (kW)^z`, optionally restricted to one ordering
    /// class and one valuation pattern of `k`.
    Scaled {
        triple: Triple,
        k: ScaleSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ordering: Option<OrderingClass>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pattern: Option<Vec<PrimeSymbol>>,
    },
    /// An exponential equation in the named unknowns under hypotheses.
    Explicit {
        equation: ExpEquation,
        #[serde(default)]
        hypotheses: Hypotheses,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScaleSpec {
    /// Every positive integer `k`.
    Any,
    Value {
        #[serde(with = "crate::serde_dec")]
        k: BigUint,
    },
}

/// Unknowns default to `>= 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    #[serde(default, with = "dec_map")]
    pub lower_bounds: BTreeMap<String, i64>,
    #[serde(default, with = "dec_map")]
    pub fixed: BTreeMap<String, i64>,
    #[serde(default)]
    pub facts: Vec<ResidueFact>,
    /// Polynomials that vanish.
    #[serde(default)]
    pub relations: Vec<Poly>,
    /// Unknowns in strictly increasing order, the first at least its lower bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum Node {
    OrderingSplit {
        cases: Vec<OrderingCase>,
    },
    ValuationSplit {
        primes: Vec<PrimeSymbol>,
        cases: Vec<PatternCase>,
    },
    KFactor {
        form: KFactoredForm,
        then: Box<Node>,
    },
    /// The listed equations hold modulo `modulus`; `claim` is the exact
    /// projection of the common solutions.
    Congruence {
        #[serde(with = "crate::serde_dec::u64_vec")]
        equations: Vec<u64>,
        #[serde(with = "crate::serde_dec::u64s")]
        modulus: u64,
        claim: ResidueFact,
        then: Box<Node>,
    },
    /// Like a congruence, with the solutions listed as raw tuples that are
    /// reduced modulo `moduli` before comparison.
    FiniteCase {
        #[serde(with = "crate::serde_dec::u64_vec")]
        equations: Vec<u64>,
        #[serde(with = "crate::serde_dec::u64s")]
        modulus: u64,
        exprs: Vec<Poly>,
        #[serde(with = "crate::serde_dec::u64_vec")]
        moduli: Vec<u64>,
        listed: Vec<Vec<String>>,
        then: Box<Node>,
    },
    ResidueSplit {
        var: String,
        #[serde(with = "crate::serde_dec::u64s")]
        modulus: u64,
        cases: Vec<ResidueCase>,
    },
    /// Replaces `var` by `factor * into`.
    Divide {
        var: String,
        #[serde(with = "crate::serde_dec::u64s")]
        factor: u64,
        into: String,
        then: Box<Node>,
    },
    /// From `P^2 = Q^2 + R` with `p` odd and coprime to `P`, the full power
    /// of `p` in `R` divides `P - Q` or `P + Q`, hence is at most `P + Q`.
    SquareBound {
        #[serde(with = "crate::serde_dec::u64s")]
        equation: u64,
        #[serde(with = "crate::serde_dec::u64s")]
        minus: u64,
        #[serde(with = "crate::serde_dec::u64s")]
        prime: u64,
        bound: Bound,
        then: Box<Node>,
    },
    /// `chain[0] >= chain[1] >= ...` with the marked links strict, where the
    /// ends are the two sides of a known equation or bound.
    Inequality {
        chain: Vec<SignedSum>,
        strict: Vec<bool>,
        against: FactRef,
        then: Box<Node>,
    },
    Contradiction {
        reason: ContradictionKind,
    },
    Cited {
        lemma: String,
    },
    Excluded {
        solution: ExponentSolution,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingCase {
    pub class: OrderingClass,
    pub proof: Node,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCase {
    pub pattern: Vec<PrimeSymbol>,
    pub proof: Node,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCase {
    #[serde(with = "crate::serde_dec::u64s")]
    pub residue: u64,
    pub proof: Node,
}

/// `small <= big`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub small: SignedSum,
    pub big: SignedSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactKind {
    Equation,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactRef {
    pub kind: FactKind,
    #[serde(with = "crate::serde_dec::u64s")]
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContradictionKind {
    EmptyCongruence,
    Valuation,
    Size,
}

impl fmt::Display for ContradictionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContradictionKind::EmptyCongruence => "empty-congruence",
            ContradictionKind::Valuation => "valuation",
            ContradictionKind::Size => "size",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Valid,
    Invalid { path: Vec<String>, reason: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::Invalid { path, reason } => {
                write!(f, "invalid at {}: {reason}", path.join(" / "))
            }
        }
    }
}

pub fn pattern_label(pattern: &[PrimeSymbol]) -> String {
    let parts: Vec<String> = pattern
        .iter()
        .map(|p| match &p.symbol {
            Some(s) => format!("v{}={s}", p.prime),
            None => format!("v{}=0", p.prime),
        })
        .collect();
    parts.join(",")
}

impl Node {
    /// Path component naming this node.
    pub fn label(&self) -> String {
        match self {
            Node::OrderingSplit { .. } => "ordering-split".into(),
            Node::ValuationSplit { .. } => "valuation-split".into(),
            Node::KFactor { .. } => "k-factor".into(),
            Node::Congruence { modulus, .. } => format!("congruence mod {modulus}"),
            Node::FiniteCase { modulus, .. } => format!("finite-case mod {modulus}"),
            Node::ResidueSplit { var, modulus, .. } => format!("residue-split {var} mod {modulus}"),
            Node::Divide {
                var, factor, into, ..
            } => format!("divide {var} = {factor}*{into}"),
            Node::SquareBound { prime, .. } => format!("square-bound {prime}"),
            Node::Inequality { .. } => "inequality".into(),
            Node::Contradiction { reason } => format!("contradiction {reason}"),
            Node::Cited { lemma } => format!("cited {lemma}"),
            Node::Excluded { solution } => format!("excluded {solution}"),
        }
    }

    /// Children with the case label that leads to each.
    pub fn children(&self) -> Vec<(Option<String>, &Node)> {
        match self {
            Node::OrderingSplit { cases } => cases
                .iter()
                .map(|c| (Some(c.class.to_string()), &c.proof))
                .collect(),
            Node::ValuationSplit { cases, .. } => cases
                .iter()
                .map(|c| (Some(pattern_label(&c.pattern)), &c.proof))
                .collect(),
            Node::ResidueSplit {
                var,
                modulus,
                cases,
            } => cases
                .iter()
                .map(|c| (Some(format!("{var}={} mod {modulus}", c.residue)), &c.proof))
                .collect(),
            Node::KFactor { then, .. }
            | Node::Congruence { then, .. }
            | Node::FiniteCase { then, .. }
            | Node::Divide { then, .. }
            | Node::SquareBound { then, .. }
            | Node::Inequality { then, .. } => vec![(None, then.as_ref())],
            Node::Contradiction { .. } | Node::Cited { .. } | Node::Excluded { .. } => Vec::new(),
        }
    }

    fn children_mut(&mut self) -> Vec<(Option<String>, &mut Node)> {
        match self {
            Node::OrderingSplit { cases } => cases
                .iter_mut()
                .map(|c| (Some(c.class.to_string()), &mut c.proof))
                .collect(),
            Node::ValuationSplit { cases, .. } => cases
                .iter_mut()
                .map(|c| (Some(pattern_label(&c.pattern)), &mut c.proof))
                .collect(),
            Node::ResidueSplit {
                var,
                modulus,
                cases,
            } => cases
                .iter_mut()
                .map(|c| {
                    (
                        Some(format!("{var}={} mod {modulus}", c.residue)),
                        &mut c.proof,
                    )
                })
                .collect(),
            Node::KFactor { then, .. }
            | Node::Congruence { then, .. }
            | Node::FiniteCase { then, .. }
            | Node::Divide { then, .. }
            | Node::SquareBound { then, .. }
            | Node::Inequality { then, .. } => vec![(None, then.as_mut())],
            Node::Contradiction { .. } | Node::Cited { .. } | Node::Excluded { .. } => Vec::new(),
        }
    }
}

impl Certificate {
    /// Every node with the path the verifier reports for it.
    pub fn nodes(&self) -> Vec<(Vec<String>, &Node)> {
        fn walk<'a>(node: &'a Node, path: Vec<String>, out: &mut Vec<(Vec<String>, &'a Node)>) {
            let mut here = path;
            here.push(node.label());
            out.push((here.clone(), node));
            for (case, child) in node.children() {
                let mut p = here.clone();
                p.extend(case);
                walk(child, p, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.tree, Vec::new(), &mut out);
        out
    }

    pub fn node_mut(&mut self, path: &[String]) -> Option<&mut Node> {
        fn find<'a>(node: &'a mut Node, path: &[String]) -> Option<&'a mut Node> {
            let (first, rest) = path.split_first()?;
            if *first != node.label() {
                return None;
            }
            if rest.is_empty() {
                return Some(node);
            }
            for (case, child) in node.children_mut() {
                match case {
                    Some(c) if rest[0] == c => return find(child, &rest[1..]),
                    None => return find(child, rest),
                    _ => {}
                }
            }
            None
        }
        find(&mut self.tree, path)
    }

    /// Sorted keys, integers as decimal strings.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("certificates serialize");
        serde_json::to_string_pretty(&value).expect("values serialize")
    }

    pub fn from_json(text: &str) -> Result<Certificate, CertificateError> {
        serde_json::from_str(text).map_err(|e| CertificateError::Malformed(e.to_string()))
    }
}

mod dec_map {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, i64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k, v.to_string())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, i64>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| v.parse().map(|n| (k, n)).map_err(D::Error::custom))
            .collect()
    }
}
