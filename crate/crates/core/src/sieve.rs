//! Exponential congruence engine.
//!
//! A congruence `Σ c_i · ∏ b_ij^(e_ij) ≡ 0 (mod m)` has exponents that are
//! polynomials in the unknowns. The power sequence of every base modulo
//! `m` is eventually periodic, so the congruence only depends on each
//! unknown modulo a period (the lcm of the periods of the bases its
//! exponents feed). The engine enumerates that finite torus exactly and
//! filters it by the constraint set; no CRT algebra is involved.
//!
//! Non-unit bases have a pre-period (`2^e mod 12` is periodic from
//! `e = 2`). An exponent is reduced periodically only once a lower bound
//! proves it has reached the pre-period; otherwise the modulus is refused.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, lcm_u64};
use crate::expr::{ExpEquation, ExpMonomial, Poly};
use crate::params::Params;

/// Upper bound on the number of torus points enumerated for one modulus.
pub const TORUS_LIMIT: u64 = 4_000_000;

/// Default cap on unit-base periods when scanning for a killing modulus.
pub const DEFAULT_PERIOD_CAP: u64 = 120;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),
    #[error("congruence has no terms")]
    EmptyTerms,
    #[error("{base} is not a unit modulo {m}")]
    NotAUnit { base: String, m: u64 },
    #[error("exponent {exponent} of {base} is not proven to reach the pre-period {preperiod} modulo {m}")]
    PreperiodUnresolved {
        base: String,
        exponent: String,
        preperiod: u64,
        m: u64,
    },
    #[error("negative exponent {exponent} of {base}")]
    NegativeExponent { base: String, exponent: i64 },
    #[error("torus of size {size} modulo {m} exceeds the enumeration limit")]
    TorusTooLarge { size: u128, m: u64 },
    #[error("invalid constraint {0:?}")]
    BadConstraint(String),
}

/// One summand `coefficient · monomial`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coefficient: BigInt,
    pub monomial: ExpMonomial,
}

impl Term {
    pub fn new(coefficient: impl Into<BigInt>, monomial: ExpMonomial) -> Self {
        Term {
            coefficient: coefficient.into(),
            monomial,
        }
    }

    /// `coefficient · base^var`.
    pub fn power(coefficient: i64, base: u64, var: &str) -> Self {
        Term::new(
            coefficient,
            ExpMonomial::power(BigUint::from(base), Poly::var(var)),
        )
    }

    pub fn constant(c: i64) -> Self {
        Term::new(c, ExpMonomial::one())
    }
}

/// Terms of `lhs - rhs`.
pub fn terms_of_equation(eq: &ExpEquation) -> Vec<Term> {
    eq.signed_terms()
        .into_iter()
        .map(|(neg, m)| Term::new(if neg { -1 } else { 1 }, m))
        .collect()
}

/// Residue constraint on one or more polynomial expressions: the tuple of
/// `(expr_i mod moduli_i)` must lie in `allowed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueFact {
    pub exprs: Vec<Poly>,
    #[serde(with = "crate::serde_dec::u64_vec")]
    pub moduli: Vec<u64>,
    pub allowed: BTreeSet<Vec<String>>,
}

impl ResidueFact {
    pub fn single(var: &str, modulus: u64, allowed: impl IntoIterator<Item = u64>) -> Self {
        ResidueFact {
            exprs: vec![Poly::var(var)],
            moduli: vec![modulus],
            allowed: allowed
                .into_iter()
                .map(|r| vec![(r % modulus).to_string()])
                .collect(),
        }
    }

    pub fn joint(
        exprs: Vec<Poly>,
        moduli: Vec<u64>,
        allowed: impl IntoIterator<Item = Vec<u64>>,
    ) -> Self {
        let allowed = allowed
            .into_iter()
            .map(|t| {
                t.iter()
                    .zip(&moduli)
                    .map(|(r, m)| (r % m).to_string())
                    .collect()
            })
            .collect();
        ResidueFact {
            exprs,
            moduli,
            allowed,
        }
    }

    pub fn allowed_tuples(&self) -> BTreeSet<Vec<u64>> {
        self.allowed
            .iter()
            .map(|t| t.iter().map(|s| s.parse().unwrap_or(u64::MAX)).collect())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn substitute(&self, var: &str, value: &Poly) -> ResidueFact {
        ResidueFact {
            exprs: self
                .exprs
                .iter()
                .map(|e| e.substitute(var, value))
                .collect(),
            moduli: self.moduli.clone(),
            allowed: self.allowed.clone(),
        }
    }
}

impl fmt::Display for ResidueFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exprs: Vec<String> = self
            .exprs
            .iter()
            .zip(&self.moduli)
            .map(|(e, m)| format!("{e} mod {m}"))
            .collect();
        let allowed: Vec<String> = self
            .allowed
            .iter()
            .map(|t| format!("({})", t.join(",")))
            .collect();
        write!(f, "({}) in {{{}}}", exprs.join(", "), allowed.join(", "))
    }
}

/// Hypotheses restricting the unknowns of a congruence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    /// Default lower bound is 1 (all exponents are positive).
    pub lower_bounds: BTreeMap<String, i64>,
    pub fixed: BTreeMap<String, u64>,
    pub residues: Vec<ResidueFact>,
    /// Polynomials asserted to vanish.
    pub relations: Vec<Poly>,
    /// Marked unsatisfiable regardless of the terms.
    pub empty: bool,
}

impl ConstraintSet {
    pub fn new() -> Self {
        ConstraintSet::default()
    }

    pub fn with_residue(
        mut self,
        var: &str,
        modulus: u64,
        allowed: impl IntoIterator<Item = u64>,
    ) -> Self {
        self.residues
            .push(ResidueFact::single(var, modulus, allowed));
        self
    }

    pub fn with_fixed(mut self, var: &str, value: u64) -> Self {
        self.fixed.insert(var.into(), value);
        self
    }

    pub fn with_lower_bound(mut self, var: &str, lb: i64) -> Self {
        self.lower_bounds.insert(var.into(), lb);
        self
    }

    /// Parses `z even`, `z odd`, `x = 2`, `y = 2 mod 4`, `x >= 3`.
    pub fn add_clause(&mut self, clause: &str) -> Result<(), SieveError> {
        let bad = || SieveError::BadConstraint(clause.to_string());
        let words: Vec<&str> = clause
            .split(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .filter(|w| !w.is_empty())
            .collect();
        let num = |w: &str| w.parse::<u64>().map_err(|_| bad());
        match words.as_slice() {
            [v, "even"] => self.residues.push(ResidueFact::single(v, 2, [0])),
            [v, "odd"] => self.residues.push(ResidueFact::single(v, 2, [1])),
            [v, "=", n] => {
                self.fixed.insert((*v).into(), num(n)?);
            }
            [v, ">=", n] => {
                self.lower_bounds.insert((*v).into(), num(n)? as i64);
            }
            [v, "=" | "≡", r, "mod", m] => {
                let m = num(m)?;
                if m < 2 {
                    return Err(bad());
                }
                self.residues.push(ResidueFact::single(v, m, [num(r)? % m]));
            }
            _ => return Err(bad()),
        }
        Ok(())
    }

    pub fn parse(clauses: &[&str]) -> Result<Self, SieveError> {
        let mut cs = ConstraintSet::new();
        for c in clauses {
            for part in c.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                cs.add_clause(part)?;
            }
        }
        Ok(cs)
    }

    /// Parametrization of the given variables from the lower bounds and
    /// fixed values.
    pub fn params_for<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Params {
        let mut ps = Params::new();
        for v in vars {
            if ps.is_declared(v) {
                continue;
            }
            match self.fixed.get(v) {
                Some(&value) => ps.fix(v, value as i64),
                None => ps
                    .declare(v, *self.lower_bounds.get(v).unwrap_or(&1))
                    .expect("fresh variable"),
            }
        }
        ps
    }
}

/// Exact solution classes of a congruence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueClassSet {
    #[serde(with = "crate::serde_dec::u64s")]
    pub modulus: u64,
    /// Enumerated unknowns, in order of first appearance.
    pub vars: Vec<String>,
    /// Each component of a solution tuple lies in `[0, period)`.
    #[serde(with = "crate::serde_dec::u64_vec")]
    pub periods: Vec<u64>,
    /// Unknowns pinned to a value by the constraints.
    pub fixed: BTreeMap<String, String>,
    pub solutions: BTreeSet<Vec<String>>,
}

impl ResidueClassSet {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn tuples(&self) -> BTreeSet<Vec<u64>> {
        self.solutions
            .iter()
            .map(|t| {
                t.iter()
                    .map(|s| s.parse().expect("decimal residue"))
                    .collect()
            })
            .collect()
    }

    pub fn torus_size(&self) -> u128 {
        self.periods.iter().map(|&p| p as u128).product()
    }

    pub fn period_of(&self, var: &str) -> Option<u64> {
        self.vars
            .iter()
            .position(|v| v == var)
            .map(|i| self.periods[i])
    }

    /// Residues of `var` modulo `n` over all solutions; `n` must divide
    /// the variable's period.
    pub fn project(&self, var: &str, n: u64) -> Option<BTreeSet<u64>> {
        self.project_joint(&[Poly::var(var)], &[n])
            .map(|s| s.into_iter().map(|t| t[0]).collect())
    }

    /// Values of `(expr_i mod n_i)` over all solutions. `None` when some
    /// expression is not determined by the enumerated residues.
    pub fn project_joint(&self, exprs: &[Poly], moduli: &[u64]) -> Option<BTreeSet<Vec<u64>>> {
        for (e, &n) in exprs.iter().zip(moduli) {
            for v in e.vars() {
                if let Some(p) = self.period_of(&v) {
                    if p % n != 0 {
                        return None;
                    }
                } else if !self.fixed.contains_key(&v) {
                    return None;
                }
            }
        }
        let mut out = BTreeSet::new();
        for t in self.tuples() {
            let mut values: HashMap<String, u64> =
                self.vars.iter().cloned().zip(t.iter().copied()).collect();
            for (v, val) in &self.fixed {
                values.insert(v.clone(), val.parse().expect("decimal"));
            }
            out.insert(
                exprs
                    .iter()
                    .zip(moduli)
                    .map(|(e, &n)| e.eval_mod(&values, n))
                    .collect(),
            );
        }
        Some(out)
    }
}

impl fmt::Display for ResidueClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header: Vec<String> = self
            .vars
            .iter()
            .zip(&self.periods)
            .map(|(v, p)| format!("{v} mod {p}"))
            .collect();
        write!(f, "mod {}: ({})", self.modulus, header.join(", "))?;
        for (v, val) in &self.fixed {
            write!(f, " [{v} = {val}]")?;
        }
        if self.solutions.is_empty() {
            return write!(f, " -> no solutions");
        }
        let sols: Vec<String> = self
            .solutions
            .iter()
            .map(|t| format!("({})", t.join(",")))
            .collect();
        write!(f, " -> {{{}}}", sols.join(", "))
    }
}

/// Power sequence of `b` modulo `m`: `b^e mod m` for `e < preperiod` is
/// arbitrary, afterwards it has period `period`. `values` covers
/// `e in [0, preperiod + period)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerCycle {
    pub preperiod: u64,
    pub period: u64,
    pub values: Vec<u64>,
}

impl PowerCycle {
    pub fn new(b: u64, m: u64) -> PowerCycle {
        let b = b % m;
        if arith::gcd_u64(b, m) == 1 {
            let period = arith::mult_order(b, m).expect("unit");
            let values = (0..period).map(|e| arith::modpow_u64(b, e, m)).collect();
            return PowerCycle {
                preperiod: 0,
                period,
                values,
            };
        }
        let mut seen: HashMap<u64, u64> = HashMap::new();
        let mut values = Vec::new();
        let mut cur = 1 % m;
        let mut e = 0u64;
        loop {
            if let Some(&first) = seen.get(&cur) {
                return PowerCycle {
                    preperiod: first,
                    period: e - first,
                    values,
                };
            }
            seen.insert(cur, e);
            values.push(cur);
            cur = cur * b % m;
            e += 1;
        }
    }

    /// `b^e mod m` for an exponent known to be `≡ r (mod period)` and at
    /// least the pre-period.
    pub fn at_residue(&self, r: u64) -> u64 {
        let offset = (r + self.period - self.preperiod % self.period) % self.period;
        self.values[(self.preperiod + offset) as usize]
    }

    pub fn at_exact(&self, e: u64) -> u64 {
        if e < self.preperiod {
            self.values[e as usize]
        } else {
            self.at_residue(e % self.period)
        }
    }
}

struct CompiledPoly {
    constant: i64,
    terms: Vec<(i64, Vec<usize>)>,
}

impl CompiledPoly {
    fn new(p: &Poly, index: &HashMap<String, usize>) -> Self {
        let mut constant = 0;
        let mut terms = Vec::new();
        for (k, c) in p.terms() {
            if k.is_empty() {
                constant = c;
            } else {
                terms.push((c, k.iter().map(|v| index[v]).collect()));
            }
        }
        CompiledPoly { constant, terms }
    }

    fn eval_mod(&self, values: &[u64], m: u64) -> u64 {
        let m = m as i128;
        let mut acc = (self.constant as i128).rem_euclid(m);
        for (c, vars) in &self.terms {
            let mut t = (*c as i128).rem_euclid(m);
            for &i in vars {
                t = t * (values[i] as i128 % m) % m;
            }
            acc = (acc + t) % m;
        }
        acc as u64
    }
}

enum FactorEval {
    Fixed(u64),
    Periodic {
        cycle: PowerCycle,
        exponent: CompiledPoly,
    },
}

struct CompiledTerm {
    coefficient: u64,
    factors: Vec<FactorEval>,
}

/// Exact solution set of `Σ terms ≡ 0 (mod m)` under a parametrization
/// (which supplies lower bounds), residue facts, vanishing relations and
/// fixed values.
pub fn solve_torus(
    terms: &[Term],
    m: u64,
    params: &Params,
    fixed: &BTreeMap<String, u64>,
    facts: &[ResidueFact],
    relations: &[Poly],
) -> Result<ResidueClassSet, SieveError> {
    solve_system(&[terms.to_vec()], m, params, fixed, facts, relations)
}

/// Common solutions of several congruences `Σ terms_i ≡ 0 (mod m)`.
pub fn solve_system(
    systems: &[Vec<Term>],
    m: u64,
    params: &Params,
    fixed: &BTreeMap<String, u64>,
    facts: &[ResidueFact],
    relations: &[Poly],
) -> Result<ResidueClassSet, SieveError> {
    if m < 2 {
        return Err(SieveError::InvalidModulus(m));
    }
    if systems.is_empty() || systems.iter().any(Vec::is_empty) {
        return Err(SieveError::EmptyTerms);
    }
    let fixed_polys: BTreeMap<String, Poly> = fixed
        .iter()
        .map(|(v, &val)| (v.clone(), Poly::constant(val as i64)))
        .collect();

    let mut order: Vec<String> = Vec::new();
    let mut periods: HashMap<String, u64> = HashMap::new();
    let mut note_var = |v: &str, period: u64, order: &mut Vec<String>| {
        if fixed.contains_key(v) {
            return;
        }
        if !periods.contains_key(v) {
            order.push(v.to_string());
        }
        let e = periods.entry(v.to_string()).or_insert(1);
        *e = lcm_u64(*e, period);
    };

    // pass 1: periods
    let mut staged_systems: Vec<Vec<(u64, Vec<(PowerCycle, Poly)>)>> = Vec::new();
    let big_m = BigInt::from(m);
    for terms in systems {
        let mut staged: Vec<(u64, Vec<(PowerCycle, Poly)>)> = Vec::new();
        for t in terms {
            let c = t
                .coefficient
                .mod_floor(&big_m)
                .to_u64()
                .expect("residue fits");
            let mut factors = Vec::new();
            for (base, exp) in t.monomial.factors() {
                let b = (base % m).to_u64().expect("residue fits");
                let cycle = PowerCycle::new(b, m);
                let e = exp.substitute_all(&fixed_polys);
                if let Some(c) = e.as_constant() {
                    if c < 0 {
                        return Err(SieveError::NegativeExponent {
                            base: base.to_string(),
                            exponent: c,
                        });
                    }
                } else {
                    if !params.proves_at_least(&e, cycle.preperiod as i64) {
                        return Err(SieveError::PreperiodUnresolved {
                            base: base.to_string(),
                            exponent: e.to_string(),
                            preperiod: cycle.preperiod,
                            m,
                        });
                    }
                    for v in e.vars() {
                        note_var(&v, cycle.period, &mut order);
                    }
                }
                factors.push((cycle, e));
            }
            staged.push((c, factors));
        }
        staged_systems.push(staged);
    }
    let facts: Vec<ResidueFact> = facts
        .iter()
        .map(|f| {
            let mut g = f.clone();
            g.exprs = g
                .exprs
                .iter()
                .map(|e| e.substitute_all(&fixed_polys))
                .collect();
            g
        })
        .collect();
    for f in &facts {
        for (e, &n) in f.exprs.iter().zip(&f.moduli) {
            for v in e.vars() {
                note_var(&v, n, &mut order);
            }
        }
    }
    let index: HashMap<String, usize> = order
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let period_list: Vec<u64> = order.iter().map(|v| periods[v]).collect();
    let size: u128 = period_list.iter().map(|&p| p as u128).product();
    if size > TORUS_LIMIT as u128 {
        return Err(SieveError::TorusTooLarge { size, m });
    }

    let compiled: Vec<Vec<CompiledTerm>> = staged_systems
        .into_iter()
        .map(|staged| {
            staged
                .into_iter()
                .map(|(coefficient, factors)| CompiledTerm {
                    coefficient,
                    factors: factors
                        .into_iter()
                        .map(|(cycle, e)| match e.as_constant() {
                            Some(k) => FactorEval::Fixed(cycle.at_exact(k as u64)),
                            None => FactorEval::Periodic {
                                exponent: CompiledPoly::new(&e, &index),
                                cycle,
                            },
                        })
                        .collect(),
                })
                .collect()
        })
        .collect();
    let compiled_facts: Vec<(Vec<(CompiledPoly, u64)>, BTreeSet<Vec<u64>>)> = facts
        .iter()
        .map(|f| {
            let exprs = f
                .exprs
                .iter()
                .zip(&f.moduli)
                .map(|(e, &n)| (CompiledPoly::new(e, &index), n))
                .collect();
            (exprs, f.allowed_tuples())
        })
        .collect();

    // relations are usable modulo the gcd of the periods of their variables
    let mut compiled_relations = Vec::new();
    for r in relations {
        let r = r.substitute_all(&fixed_polys);
        if let Some(c) = r.as_constant() {
            if c != 0 {
                return Ok(empty_set(m, order, period_list, fixed));
            }
            continue;
        }
        let vars = r.vars();
        if !vars.iter().all(|v| index.contains_key(v)) {
            continue;
        }
        let g = vars.iter().map(|v| periods[v]).fold(0u64, |a, b| a.gcd(&b));
        if g > 1 {
            compiled_relations.push((CompiledPoly::new(&r, &index), g));
        }
    }

    let n = period_list.len();
    let mut solutions = BTreeSet::new();
    let mut tuple = vec![0u64; n];
    for _ in 0..size {
        let passes_facts = compiled_facts.iter().all(|(exprs, allowed)| {
            let key: Vec<u64> = exprs.iter().map(|(e, n)| e.eval_mod(&tuple, *n)).collect();
            allowed.contains(&key)
        });
        let passes_relations = compiled_relations
            .iter()
            .all(|(p, g)| p.eval_mod(&tuple, *g) == 0);
        if passes_facts && passes_relations {
            let vanishes = |terms: &Vec<CompiledTerm>| {
                let mut total = 0u64;
                for t in terms {
                    let mut v = t.coefficient % m;
                    for f in &t.factors {
                        let fv = match f {
                            FactorEval::Fixed(x) => *x,
                            FactorEval::Periodic { cycle, exponent } => {
                                cycle.at_residue(exponent.eval_mod(&tuple, cycle.period))
                            }
                        };
                        v = ((v as u128 * fv as u128) % m as u128) as u64;
                    }
                    total = (total + v) % m;
                }
                total == 0
            };
            if compiled.iter().all(vanishes) {
                solutions.insert(tuple.iter().map(u64::to_string).collect());
            }
        }
        // odometer
        for i in (0..n).rev() {
            tuple[i] += 1;
            if tuple[i] < period_list[i] {
                break;
            }
            tuple[i] = 0;
        }
    }
    Ok(ResidueClassSet {
        modulus: m,
        vars: order,
        periods: period_list,
        fixed: fixed
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        solutions,
    })
}

fn empty_set(
    m: u64,
    vars: Vec<String>,
    periods: Vec<u64>,
    fixed: &BTreeMap<String, u64>,
) -> ResidueClassSet {
    ResidueClassSet {
        modulus: m,
        vars,
        periods,
        fixed: fixed
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        solutions: BTreeSet::new(),
    }
}

fn term_vars(terms: &[Term]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in terms {
        for v in t.monomial.vars() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Solutions of `Σ terms ≡ 0 (mod m)` intersected with the constraints.
pub fn congruence_solutions(
    terms: &[Term],
    m: u64,
    constraints: &ConstraintSet,
) -> Result<ResidueClassSet, SieveError> {
    let mut vars = term_vars(terms);
    for f in &constraints.residues {
        for e in &f.exprs {
            vars.extend(e.vars());
        }
    }
    let params = constraints.params_for(vars.iter());
    let mut set = solve_torus(
        terms,
        m,
        &params,
        &constraints.fixed,
        &constraints.residues,
        &constraints.relations,
    )?;
    if constraints.empty || constraints.residues.iter().any(ResidueFact::is_empty) {
        set.solutions.clear();
    }
    Ok(set)
}

/// Pairs `(z mod ord(a), x mod ord(b))` with `a^z ≡ b^x (mod m)`.
pub fn two_term_solutions(a: u64, b: u64, m: u64) -> Result<ResidueClassSet, SieveError> {
    two_term_solutions_with(a, b, m, &ConstraintSet::new())
}

pub fn two_term_solutions_with(
    a: u64,
    b: u64,
    m: u64,
    constraints: &ConstraintSet,
) -> Result<ResidueClassSet, SieveError> {
    if m < 2 {
        return Err(SieveError::InvalidModulus(m));
    }
    for base in [a, b] {
        if arith::gcd_u64(base % m, m) != 1 {
            return Err(SieveError::NotAUnit {
                base: base.to_string(),
                m,
            });
        }
    }
    congruence_solutions(
        &[Term::power(1, a, "z"), Term::power(-1, b, "x")],
        m,
        constraints,
    )
}

/// Periods of the unit bases of the terms modulo `m`.
fn unit_periods(terms: &[Term], m: u64) -> Vec<u64> {
    terms
        .iter()
        .flat_map(|t| t.monomial.factors())
        .filter_map(|(b, e)| {
            let b = (b % m).to_u64()?;
            (e.as_constant().is_none() && arith::gcd_u64(b, m) == 1)
                .then(|| arith::mult_order(b, m).expect("unit"))
        })
        .collect()
}

/// A modulus whose congruence has no solution under the constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KillingModulus {
    pub modulus: u64,
    pub witness: ResidueClassSet,
}

/// Smallest `m <= m_max` at which the congruence is unsolvable. Moduli with a
/// unit-base period above `period_cap`, an unresolved pre-period or an
/// oversized torus are skipped.
pub fn find_killing_modulus(
    terms: &[Term],
    constraints: &ConstraintSet,
    m_max: u64,
    period_cap: u64,
) -> Option<KillingModulus> {
    let candidates: Vec<u64> = (2..=m_max).collect();
    candidates
        .par_iter()
        .filter(|&&m| unit_periods(terms, m).iter().all(|&p| p <= period_cap))
        .find_map_first(|&m| match congruence_solutions(terms, m, constraints) {
            Ok(set) if set.is_empty() => Some(KillingModulus {
                modulus: m,
                witness: set,
            }),
            _ => None,
        })
}

impl Term {
    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.coefficient.sign()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuples(set: &ResidueClassSet) -> Vec<Vec<u64>> {
        set.tuples().into_iter().collect()
    }

    #[test]
    fn mod_17_forces_even_exponent() {
        let terms = [Term::power(1, 101, "z"), Term::constant(-1)];
        let set = congruence_solutions(&terms, 17, &ConstraintSet::new()).unwrap();
        assert_eq!(set.periods, vec![2]);
        assert_eq!(tuples(&set), vec![vec![0]]);
    }

    #[test]
    fn mod_11_diagonal() {
        let terms = [Term::power(1, 2, "z"), Term::power(-1, 4, "x")];
        let set = congruence_solutions(&terms, 11, &ConstraintSet::new()).unwrap();
        assert_eq!(set.vars, vec!["z", "x"]);
        assert_eq!(set.periods, vec![10, 5]);
        let expected: BTreeSet<Vec<u64>> = (0..10u64)
            .flat_map(|z| (0..5u64).map(move |x| vec![z, x]))
            .filter(|t| t[0] % 10 == (2 * t[1]) % 10 || (t[0] + 10 - (2 * t[1]) % 10) % 10 == 0)
            .collect();
        assert_eq!(set.tuples(), expected);
        assert_eq!(set.project("z", 2).unwrap(), BTreeSet::from([0]));
    }

    #[test]
    fn identical_terms_fill_the_torus() {
        let terms = [Term::power(1, 3, "x"), Term::power(-1, 3, "x")];
        let set = congruence_solutions(&terms, 7, &ConstraintSet::new()).unwrap();
        assert_eq!(set.len(), 6);
    }

    #[test]
    fn two_term_mod_33() {
        let fixed = ConstraintSet::new().with_fixed("x", 2);
        let set = two_term_solutions_with(2, 5, 33, &fixed).unwrap();
        assert_eq!(set.vars, vec!["z"]);
        assert_eq!(tuples(&set), vec![vec![8]]);
        let diag = two_term_solutions(3, 3, 5).unwrap();
        assert_eq!(
            tuples(&diag),
            (0..4).map(|i| vec![i, i]).collect::<Vec<_>>()
        );
        assert!(matches!(
            two_term_solutions(3, 5, 33),
            Err(SieveError::NotAUnit { .. })
        ));
    }

    #[test]
    fn non_unit_bases_need_a_lower_bound() {
        // 2^x mod 4 is 0 only from x = 2
        let terms = [Term::power(1, 2, "x")];
        assert!(matches!(
            congruence_solutions(&terms, 4, &ConstraintSet::new()),
            Err(SieveError::PreperiodUnresolved { .. })
        ));
        let cs = ConstraintSet::new().with_lower_bound("x", 2);
        let set = congruence_solutions(&terms, 4, &cs).unwrap();
        assert_eq!(set.periods, vec![1]);
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn power_cycles() {
        let c = PowerCycle::new(2, 12);
        assert_eq!((c.preperiod, c.period), (2, 2));
        for e in 0..20u64 {
            assert_eq!(c.at_exact(e), arith::modpow_u64(2, e, 12));
        }
        let d = PowerCycle::new(0, 5);
        assert_eq!((d.preperiod, d.period), (1, 1));
    }

    #[test]
    fn clauses() {
        let cs = ConstraintSet::parse(&["z even", "x = 2", "y = 2 mod 4", "w odd"]).unwrap();
        assert_eq!(cs.fixed["x"], 2);
        assert_eq!(cs.residues.len(), 3);
        assert!(ConstraintSet::parse(&["z prime"]).is_err());
    }

    #[test]
    fn killing_modulus_examples() {
        let eq: ExpEquation = "101^z = 1 + 99^y*2^a*5^b".parse().unwrap();
        let terms = terms_of_equation(&eq);
        let cs = ConstraintSet::parse(&["z even"]).unwrap();
        let km = find_killing_modulus(&terms, &cs, 100, DEFAULT_PERIOD_CAP).unwrap();
        assert!(km.modulus <= 17, "{}", km.modulus);
        assert!(km.witness.is_empty());

        let contradictory = ConstraintSet::parse(&["z even", "z odd"]).unwrap();
        assert_eq!(
            find_killing_modulus(&terms, &contradictory, 100, DEFAULT_PERIOD_CAP)
                .unwrap()
                .modulus,
            2
        );

        let identity = [
            Term::new(9, ExpMonomial::one()),
            Term::constant(16),
            Term::constant(-25),
        ];
        assert!(
            find_killing_modulus(&identity, &ConstraintSet::new(), 200, DEFAULT_PERIOD_CAP)
                .is_none()
        );
    }
}
