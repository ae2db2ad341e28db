//! Ordering classes, solution filters and k-valuation factoring.
//!
//! [`factor_k`] works prime by prime. For a prime `p` with `v_p(k) = e`
//! and `(u, v, w) = (v_p(U), v_p(V), v_p(W))`, the three terms of
//! `(kU)^x + (kV)^y = (kW)^z` have valuations `x(e+u)`, `y(e+v)`, `z(e+w)`.
//! In a sum of two terms equal to a third, the two smallest valuations
//! coincide. Each of the three ways this can happen is an equality plus an
//! inequality in the exponents; the ordering class refutes some of them.
//! A single survivor yields an exponent relation and the power of `p`
//! that divides out of the equation.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factorize, radical, valuation};
use crate::expr::{ExpEquation, ExpMonomial, Poly};
use crate::params::Params;
use crate::search::ExponentSolution;
use crate::triples::Triple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingClass {
    /// `(2, 2, 2)`.
    AllEqual,
    /// `z >= max(x, y)` other than `(2, 2, 2)`.
    ZGeMax,
    /// `z < x < y`.
    Case11,
    /// `x < z < y`.
    Case12,
    /// `z < y < x`.
    Case21,
    /// `y < z < x`.
    Case22,
    /// `z < max(x, y)` with two exponents equal.
    HasTie,
}

impl OrderingClass {
    pub const ALL: [OrderingClass; 7] = [
        OrderingClass::AllEqual,
        OrderingClass::ZGeMax,
        OrderingClass::Case11,
        OrderingClass::Case12,
        OrderingClass::Case21,
        OrderingClass::Case22,
        OrderingClass::HasTie,
    ];

    pub const STRICT: [OrderingClass; 4] = [
        OrderingClass::Case11,
        OrderingClass::Case12,
        OrderingClass::Case21,
        OrderingClass::Case22,
    ];

    pub fn is_strict(self) -> bool {
        Self::STRICT.contains(&self)
    }

    /// Exponents in increasing order, for the strict classes.
    pub fn chain(self) -> Option<[&'static str; 3]> {
        match self {
            OrderingClass::Case11 => Some(["z", "x", "y"]),
            OrderingClass::Case12 => Some(["x", "z", "y"]),
            OrderingClass::Case21 => Some(["z", "y", "x"]),
            OrderingClass::Case22 => Some(["y", "z", "x"]),
            _ => None,
        }
    }

    /// Parametrization of `x, y, z >= 1` restricted to a strict class.
    pub fn params(self) -> Option<Params> {
        let chain = self.chain()?;
        let mut ps = Params::new();
        ps.chain(&chain, 1);
        Some(ps)
    }

    pub fn name(self) -> &'static str {
        match self {
            OrderingClass::AllEqual => "all-equal",
            OrderingClass::ZGeMax => "z-ge-max",
            OrderingClass::Case11 => "case-1-1",
            OrderingClass::Case12 => "case-1-2",
            OrderingClass::Case21 => "case-2-1",
            OrderingClass::Case22 => "case-2-2",
            OrderingClass::HasTie => "has-tie",
        }
    }

    pub fn contains(self, s: &ExponentSolution) -> bool {
        classify_ordering(s) == self
    }
}

impl fmt::Display for OrderingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_ordering(s: &ExponentSolution) -> OrderingClass {
    let (x, y, z) = s.tuple();
    if (x, y, z) == (2, 2, 2) {
        OrderingClass::AllEqual
    } else if z >= x.max(y) {
        OrderingClass::ZGeMax
    } else if x == y || x == z || y == z {
        OrderingClass::HasTie
    } else if x < y {
        if z < x {
            OrderingClass::Case11
        } else {
            OrderingClass::Case12
        }
    } else if z < y {
        OrderingClass::Case21
    } else {
        OrderingClass::Case22
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "kebab-case")]
pub enum FilterVerdict {
    Accept,
    Reject(String),
    NotApplicable(String),
}

impl FilterVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, FilterVerdict::Accept)
    }

    pub fn is_reject(&self) -> bool {
        matches!(self, FilterVerdict::Reject(_))
    }
}

/// Rejects any solution other than `(2, 2, 2)` with `z >= max(x, y)`,
/// which the Deng–Cohen lemma rules out for every Pythagorean equation.
pub fn deng_cohen_filter(s: &ExponentSolution) -> FilterVerdict {
    if s.tuple() != (2, 2, 2) && s.z >= s.x.max(s.y) {
        FilterVerdict::Reject(format!("{s} has z >= max(x, y) but is not (2, 2, 2)"))
    } else {
        FilterVerdict::Accept
    }
}

/// For all-even solutions, accepts iff `x/2`, `y/2`, `z/2` are all odd.
pub fn miyazaki_parity_check(s: &ExponentSolution) -> FilterVerdict {
    let (x, y, z) = s.tuple();
    if x % 2 != 0 || y % 2 != 0 || z % 2 != 0 {
        return FilterVerdict::NotApplicable(format!("{s} is not all even"));
    }
    match [("x", x), ("y", y), ("z", z)]
        .into_iter()
        .find(|(_, e)| (e / 2) % 2 == 0)
    {
        Some((name, e)) => FilterVerdict::Reject(format!("{name}/2 = {} is even", e / 2)),
        None => FilterVerdict::Accept,
    }
}

/// Le's necessary conditions for a solution other than `(2, 2, 2)` of the
/// scaled equation: (i) `max(x,y) > min(x,y) > z`, `P(k) | W`,
/// `P(k) < P(W)`; (ii) `x > y > z`, `P(k) | V`; (iii) `y > z > x`, `P(k) | U`.
pub fn le_theorem_check(t: &Triple, k: &BigUint, s: &ExponentSolution) -> FilterVerdict {
    let (x, y, z) = s.tuple();
    if (x, y, z) == (2, 2, 2) {
        return FilterVerdict::NotApplicable("(2, 2, 2) is the expected solution".into());
    }
    let Ok(pk) = radical(k) else {
        return FilterVerdict::NotApplicable("k must be positive".into());
    };
    let pw = radical(&t.w).expect("W positive");
    let divides = |n: &BigUint| (n % &pk).is_zero();
    if x.max(y) > x.min(y) && x.min(y) > z && divides(&t.w) && pk < pw {
        return FilterVerdict::Accept;
    }
    if x > y && y > z && divides(&t.v) {
        return FilterVerdict::Accept;
    }
    if y > z && z > x && divides(&t.u) {
        return FilterVerdict::Accept;
    }
    let reason = if x == y || x == z || y == z {
        format!("{s}: x, y and z must be distinct")
    } else {
        format!("{s} meets none of the conditions (i)-(iii) for P(k) = {pk}")
    };
    FilterVerdict::Reject(reason)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("k-factoring applies only to the four strict orderings, not {0}")]
    NotApplicable(OrderingClass),
    #[error("invalid k description: {0}")]
    InvalidK(String),
    #[error("valuations at {prime} admit {count} cases; the ordering does not decide them")]
    Ambiguous { prime: String, count: usize },
    #[error("cannot show that the cofactor n1 is 1: primes {0:?} are not excluded")]
    UnresolvedCofactor(Vec<String>),
}

/// A prime with its valuation symbol. In a pattern, a missing symbol
/// means the prime does not divide `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeSymbol {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
}

impl PrimeSymbol {
    pub fn positive(prime: u64, symbol: &str) -> Self {
        PrimeSymbol {
            prime: prime.into(),
            symbol: Some(symbol.into()),
        }
    }

    pub fn zero(prime: u64) -> Self {
        PrimeSymbol {
            prime: prime.into(),
            symbol: None,
        }
    }
}

/// Either a concrete `k`, or a valuation pattern: each listed prime has
/// valuation 0 or `symbol >= 1`, and the cofactor `n1` is coprime to all
/// listed primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KSpec {
    Concrete {
        #[serde(with = "crate::serde_dec")]
        k: BigUint,
        /// Names for valuations at primes of `gcd(k, UVW)`; unnamed primes
        /// get `r`, `s`, `q`, ... in ascending order.
        #[serde(default)]
        symbols: Vec<PrimeSymbol>,
    },
    Pattern {
        primes: Vec<PrimeSymbol>,
    },
}

impl KSpec {
    pub fn concrete(k: impl Into<BigUint>) -> Self {
        KSpec::Concrete {
            k: k.into(),
            symbols: Vec::new(),
        }
    }

    pub fn pattern(primes: Vec<PrimeSymbol>) -> Self {
        KSpec::Pattern { primes }
    }

    /// Smallest `k` consistent with a pattern when each symbol takes the
    /// given value, or the concrete `k`.
    pub fn instantiate(&self, value: u32) -> BigUint {
        match self {
            KSpec::Concrete { k, .. } => k.clone(),
            KSpec::Pattern { primes } => primes
                .iter()
                .filter(|p| p.symbol.is_some())
                .fold(BigUint::one(), |acc, p| acc * p.prime.pow(value)),
        }
    }
}

impl fmt::Display for KSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSpec::Concrete { k, .. } => write!(f, "k = {k}"),
            KSpec::Pattern { primes } => {
                let parts: Vec<String> = primes
                    .iter()
                    .map(|p| match &p.symbol {
                        Some(s) => format!("v_{}(k) = {s} >= 1", p.prime),
                        None => format!("{} does not divide k", p.prime),
                    })
                    .collect();
                write!(f, "{}", parts.join(", "))
            }
        }
    }
}

/// Valuation of `k` at one prime, symbolic with an optional value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeValuation {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
}

/// Power `prime^exponent` divided out of every term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extracted {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    pub exponent: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KFactoredForm {
    pub triple: Triple,
    pub ordering: OrderingClass,
    pub k: KSpec,
    pub valuations: Vec<PrimeValuation>,
    /// Part of `k` coprime to `UVW` and the pattern primes.
    #[serde(with = "crate::serde_dec")]
    pub n1: BigUint,
    /// Polynomials that vanish on every solution in the class.
    pub relations: Vec<Poly>,
    pub extracted: Vec<Extracted>,
    /// Equation left after dividing out the extracted powers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ExpEquation>,
    /// Why no solution exists in the class, when that is already decided.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infeasible: Option<String>,
}

impl KFactoredForm {
    pub fn is_infeasible(&self) -> bool {
        self.infeasible.is_some()
    }
}

const DEFAULT_SYMBOLS: [&str; 3] = ["r", "s", "q"];
const GENERIC: &str = "t";
const RESERVED: [&str; 4] = ["x", "y", "z", GENERIC];

/// How the valuations of one prime can balance.
#[derive(Debug, Clone)]
struct PrimeAnalysis {
    vals: [Poly; 3],
    survivors: Vec<(usize, usize, usize)>,
}

const DISJUNCTS: [(usize, usize, usize); 3] = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
const EXPONENTS: [&str; 3] = ["x", "y", "z"];

fn analyse(legs: [&BigUint; 3], p: &BigUint, e: &Poly, ps: &Params) -> PrimeAnalysis {
    let vals: [Poly; 3] = std::array::from_fn(|i| {
        let (leg_val, _) = valuation(p, legs[i]).expect("legs are positive");
        &Poly::var(EXPONENTS[i]) * &(e + &Poly::constant(leg_val as i64))
    });
    let survivors = DISJUNCTS
        .into_iter()
        .filter(|&(i, j, third)| {
            let diff = &vals[j] - &vals[i];
            let unequal = ps.proves_positive(&diff) || ps.proves_positive(&diff.scale(-1));
            let third_below = ps.proves_positive(&(&vals[i] - &vals[third]))
                || ps.proves_positive(&(&vals[j] - &vals[third]));
            !unequal && !third_below
        })
        .collect();
    PrimeAnalysis { vals, survivors }
}

/// Derives the exponent relations, cofactor and reduced equation of
/// `(kU)^x + (kV)^y = (kW)^z` in a strict ordering class.
pub fn factor_k(
    t: &Triple,
    k: &KSpec,
    ordering: OrderingClass,
) -> Result<KFactoredForm, FactorError> {
    let mut ps = ordering
        .params()
        .ok_or(FactorError::NotApplicable(ordering))?;
    let legs = [&t.u, &t.v, &t.w];
    let uvw = &(&t.u * &t.v) * &t.w;
    let uvw_primes: BTreeSet<BigUint> = factorize(&uvw).primes().cloned().collect();

    // (prime, valuation of k, symbol if any)
    let mut analysed: Vec<(BigUint, Poly)> = Vec::new();
    let mut valuations = Vec::new();
    // primes that must turn out infeasible for n1 = 1 (pattern mode)
    let mut cofactor_candidates: Vec<BigUint> = Vec::new();
    let mut n1 = BigUint::one();
    let mut concrete_n1_primes: Vec<(BigUint, u64)> = Vec::new();
    let mut used_symbols: BTreeSet<String> = BTreeSet::new();
    let mut claim_symbol = |s: &str| -> Result<(), FactorError> {
        if RESERVED.contains(&s) || s.starts_with('_') || !used_symbols.insert(s.to_string()) {
            return Err(FactorError::InvalidK(format!(
                "valuation symbol {s:?} is reserved or repeated"
            )));
        }
        Ok(())
    };

    match k {
        KSpec::Concrete { k, symbols } => {
            if k.is_zero() {
                return Err(FactorError::InvalidK("k must be at least 1".into()));
            }
            let mut defaults = DEFAULT_SYMBOLS.iter();
            for (p, e) in factorize(k).pairs() {
                if uvw_primes.contains(p) {
                    let named = symbols
                        .iter()
                        .find(|s| &s.prime == p)
                        .and_then(|s| s.symbol.clone());
                    let symbol = match named {
                        Some(s) => s,
                        None => loop {
                            match defaults.next() {
                                Some(d)
                                    if !symbols.iter().any(|s| s.symbol.as_deref() == Some(*d)) =>
                                {
                                    break d.to_string()
                                }
                                Some(_) => continue,
                                None => break format!("e{p}"),
                            }
                        },
                    };
                    claim_symbol(&symbol)?;
                    ps.fix(&symbol, *e as i64);
                    analysed.push((p.clone(), Poly::var(&symbol)));
                    valuations.push(PrimeValuation {
                        prime: p.clone(),
                        symbol,
                        value: Some(*e),
                    });
                } else {
                    n1 *= p.pow(*e as u32);
                    concrete_n1_primes.push((p.clone(), *e));
                }
            }
            for p in &uvw_primes {
                if !analysed.iter().any(|(q, _)| q == p) {
                    analysed.push((p.clone(), Poly::zero()));
                }
            }
        }
        KSpec::Pattern { primes } => {
            for ps_entry in primes {
                if !uvw_primes.contains(&ps_entry.prime) {
                    return Err(FactorError::InvalidK(format!(
                        "pattern prime {} does not divide UVW = {uvw}",
                        ps_entry.prime
                    )));
                }
                if analysed.iter().any(|(q, _)| q == &ps_entry.prime) {
                    return Err(FactorError::InvalidK(format!(
                        "prime {} listed twice",
                        ps_entry.prime
                    )));
                }
                match &ps_entry.symbol {
                    Some(s) => {
                        claim_symbol(s)?;
                        ps.declare(s, 1).expect("fresh symbol");
                        analysed.push((ps_entry.prime.clone(), Poly::var(s)));
                        valuations.push(PrimeValuation {
                            prime: ps_entry.prime.clone(),
                            symbol: s.clone(),
                            value: None,
                        });
                    }
                    None => analysed.push((ps_entry.prime.clone(), Poly::zero())),
                }
            }
            cofactor_candidates = uvw_primes
                .iter()
                .filter(|p| !analysed.iter().any(|(q, _)| q == *p))
                .cloned()
                .collect();
            for p in &cofactor_candidates {
                analysed.push((p.clone(), Poly::zero()));
            }
        }
    }
    analysed.sort_by(|a, b| a.0.cmp(&b.0));

    let mut form = KFactoredForm {
        triple: t.clone(),
        ordering,
        k: k.clone(),
        valuations,
        n1: n1.clone(),
        relations: Vec::new(),
        extracted: Vec::new(),
        reduced: None,
        infeasible: None,
    };

    // cofactor primes: a dividing prime must be impossible
    ps.declare(GENERIC, 1).expect("generic symbol is reserved");
    let generic = Poly::var(GENERIC);
    let mut unresolved = Vec::new();
    for p in &cofactor_candidates {
        if !analyse(legs, p, &generic, &ps).survivors.is_empty() {
            unresolved.push(p.to_string());
        }
    }
    if matches!(k, KSpec::Pattern { .. }) {
        let outside = next_prime_outside(&uvw);
        if !analyse(legs, &outside, &generic, &ps).survivors.is_empty() {
            unresolved.push("any prime not dividing UVW".into());
        }
    }
    if !unresolved.is_empty() {
        return Err(FactorError::UnresolvedCofactor(unresolved));
    }
    let excluded = concrete_n1_primes.iter().find(|(p, e)| {
        analyse(legs, p, &Poly::constant(*e as i64), &ps)
            .survivors
            .is_empty()
    });
    if let Some((p, _)) = excluded {
        form.infeasible = Some(format!(
            "prime {p} of n1 = {n1} admits no balance of valuations"
        ));
        return Ok(form);
    }
    if let Some((p, _)) = concrete_n1_primes.first() {
        return Err(FactorError::InvalidK(format!(
            "prime {p} of n1 = {n1} is not excluded"
        )));
    }

    // per-prime balance; exponents of each term after division
    let mut reduced_exps: Vec<(BigUint, [Poly; 3])> = Vec::new();
    for (p, e) in &analysed {
        let a = analyse(legs, p, e, &ps);
        match a.survivors.as_slice() {
            [] => {
                form.infeasible = Some(format!(
                    "valuations {}, {}, {} at {p} cannot balance",
                    a.vals[0], a.vals[1], a.vals[2]
                ));
                form.relations.clear();
                form.extracted.clear();
                return Ok(form);
            }
            [(i, j, third)] => {
                let rel = &a.vals[*j] - &a.vals[*i];
                if !rel.is_zero() {
                    form.relations.push(orient(rel));
                }
                let from_i = &a.vals[*third] - &a.vals[*i];
                let from_j = &a.vals[*third] - &a.vals[*j];
                let (m, rest) = if from_j.terms().count() < from_i.terms().count() {
                    (a.vals[*j].clone(), from_j)
                } else {
                    (a.vals[*i].clone(), from_i)
                };
                if !m.is_zero() {
                    form.extracted.push(Extracted {
                        prime: p.clone(),
                        exponent: m,
                    });
                }
                let mut exps: [Poly; 3] = std::array::from_fn(|_| Poly::zero());
                exps[*third] = rest;
                reduced_exps.push((p.clone(), exps));
            }
            many => {
                return Err(FactorError::Ambiguous {
                    prime: p.to_string(),
                    count: many.len(),
                })
            }
        }
    }
    let monomials: Vec<ExpMonomial> = (0..3)
        .map(|i| {
            let mut m = ExpMonomial::one();
            for (p, exps) in &reduced_exps {
                if !exps[i].is_zero() {
                    m.mul_factor(p.clone(), exps[i].clone());
                }
            }
            m
        })
        .collect();
    form.reduced = Some(ExpEquation::new(
        vec![monomials[0].clone(), monomials[1].clone()],
        vec![monomials[2].clone()],
    ));
    Ok(form)
}

/// Sign convention for relations: no more positive than negative coefficients.
pub fn orient(p: Poly) -> Poly {
    let pos = p.terms().filter(|(_, c)| *c > 0).count();
    let neg = p.terms().filter(|(_, c)| *c < 0).count();
    if pos > neg {
        p.scale(-1)
    } else {
        p
    }
}

fn next_prime_outside(n: &BigUint) -> BigUint {
    let mut p = BigUint::from(2u32);
    loop {
        if crate::arith::is_prime(&p) && !(n % &p).is_zero() {
            return p;
        }
        p += 1u32;
    }
}

/// The original equation's terms with exponents `x, y, z`, bases
/// factored into primes and `k` written through its valuations.
pub fn scaled_terms(form: &KFactoredForm) -> Option<[ExpMonomial; 3]> {
    let legs = [&form.triple.u, &form.triple.v, &form.triple.w];
    let mut out: [ExpMonomial; 3] = std::array::from_fn(|_| ExpMonomial::one());
    for (i, leg) in legs.iter().enumerate() {
        let var = Poly::var(EXPONENTS[i]);
        for (p, e) in factorize(leg).pairs() {
            out[i].mul_factor(p.clone(), var.scale(*e as i64));
        }
        for v in &form.valuations {
            out[i].mul_factor(v.prime.clone(), &var * &Poly::var(&v.symbol));
        }
        if form.n1 > BigUint::one() {
            let n1 = form.n1.to_u64()?;
            out[i].mul_factor(n1.into(), var.clone());
        }
    }
    Some(out)
}

/// Checks a factored form against the original equation at one point:
/// each original term equals the reduced term times the extracted powers.
pub fn reproduces_at(
    form: &KFactoredForm,
    values: &std::collections::HashMap<String, i128>,
) -> bool {
    let (Some(reduced), Some(orig)) = (&form.reduced, scaled_terms(form)) else {
        return false;
    };
    if form
        .relations
        .iter()
        .any(|r| r.eval(values).ok() != Some(0))
    {
        return false;
    }
    let reduced_terms = [&reduced.lhs[0], &reduced.lhs[1], &reduced.rhs[0]];
    let mut extracted = BigUint::one();
    for e in &form.extracted {
        match e
            .exponent
            .eval(values)
            .ok()
            .and_then(|v| u32::try_from(v).ok())
        {
            Some(v) => extracted *= e.prime.pow(v),
            None => return false,
        }
    }
    (0..3).all(
        |i| match (orig[i].eval(values), reduced_terms[i].eval(values)) {
            (Ok(o), Ok(r)) => o == r * &extracted,
            _ => false,
        },
    )
}

/// Primes of `gcd(k, n)`.
pub fn common_primes(k: &BigUint, n: &BigUint) -> Vec<BigUint> {
    factorize(&k.gcd(n)).primes().cloned().collect()
}
