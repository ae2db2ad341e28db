//! Re-derivation of every step against the accumulated branch context.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use super::inequality::verify_inequality;
use super::lemmas::{self, BranchFacts};
use super::{
    pattern_label, Bound, Certificate, ContradictionKind, FactKind, FactRef, Node, ScaleSpec,
    Target, FORMAT_VERSION,
};
use crate::arith::is_prime_u64;
use crate::expr::{ExpEquation, ExpMonomial, Poly, SignedSum};
use crate::params::Params;
use crate::reduction::{factor_k, KSpec, OrderingClass, PrimeSymbol};
use crate::search::ExponentSolution;
use crate::sieve::{solve_system, terms_of_equation, ResidueFact};
use crate::triples::Triple;

const RESERVED: [&str; 4] = ["x", "y", "z", "t"];

type Failure = (Vec<String>, String);

#[derive(Debug, Clone)]
struct Context<'a> {
    excluded: &'a [ExponentSolution],
    triple: Option<&'a Triple>,
    scale: Option<&'a ScaleSpec>,
    ordering: Option<OrderingClass>,
    pattern: Option<Vec<PrimeSymbol>>,
    factored: bool,
    k_is_one: bool,
    params: Params,
    fixed: BTreeMap<String, u64>,
    equations: Vec<ExpEquation>,
    facts: Vec<ResidueFact>,
    relations: Vec<Poly>,
    bounds: Vec<Bound>,
    closed: Option<ContradictionKind>,
}

/// Valid iff every node re-derives. Sibling branches are checked in
/// parallel; the reported failure is the first one in tree order.
pub fn verify_certificate(cert: &Certificate) -> super::Verdict {
    let root = vec![cert.tree.label()];
    let result = initial_context(cert).and_then(|ctx| check(&cert.tree, ctx, root.clone()));
    match result {
        Ok(()) => super::Verdict::Valid,
        Err((path, reason)) => super::Verdict::Invalid { path, reason },
    }
}

fn initial_context(cert: &Certificate) -> Result<Context<'_>, Failure> {
    let fail = |msg: String| (vec!["target".to_string()], msg);
    if cert.version != FORMAT_VERSION {
        return Err(fail(format!("unsupported version {:?}", cert.version)));
    }
    let mut ctx = Context {
        excluded: &cert.excluded,
        triple: None,
        scale: None,
        ordering: None,
        pattern: None,
        factored: false,
        k_is_one: false,
        params: Params::new(),
        fixed: BTreeMap::new(),
        equations: Vec::new(),
        facts: Vec::new(),
        relations: Vec::new(),
        bounds: Vec::new(),
        closed: None,
    };
    match &cert.equation {
        Target::Scaled {
            triple,
            k,
            ordering,
            pattern,
        } => {
            if &triple.u * &triple.u + &triple.v * &triple.v != &triple.w * &triple.w {
                return Err(fail(format!("{triple} is not a Pythagorean triple")));
            }
            ctx.triple = Some(triple);
            ctx.scale = Some(k);
            for v in ["x", "y", "z"] {
                ctx.params.declare(v, 1).expect("fresh");
            }
            if let ScaleSpec::Value { k } = k {
                if k < &BigUint::one() {
                    return Err(fail("k must be positive".into()));
                }
                ctx.k_is_one = k.is_one();
                let eq: ExpEquation = format!(
                    "{}^x + {}^y = {}^z",
                    k * &triple.u,
                    k * &triple.v,
                    k * &triple.w
                )
                .parse()
                .expect("scaled equation parses");
                ctx.equations.push(eq);
            }
            if let Some(class) = ordering {
                enter_ordering(&mut ctx, *class);
            }
            if let Some(p) = pattern {
                if matches!(k, ScaleSpec::Value { .. }) {
                    return Err(fail(
                        "a valuation pattern needs k to range over all values".into(),
                    ));
                }
                check_pattern(&ctx, p).map_err(fail)?;
                if ordering.is_none() {
                    return Err(fail("a valuation pattern needs an ordering class".into()));
                }
                ctx.pattern = Some(p.clone());
            }
        }
        Target::Explicit {
            equation,
            hypotheses,
        } => {
            let mut vars: BTreeSet<String> = equation.vars();
            for f in &hypotheses.facts {
                vars.extend(f.exprs.iter().flat_map(Poly::vars));
            }
            for r in &hypotheses.relations {
                vars.extend(r.vars());
            }
            vars.extend(hypotheses.lower_bounds.keys().cloned());
            vars.extend(hypotheses.fixed.keys().cloned());
            if let Some(chain) = &hypotheses.chain {
                for v in chain {
                    if !vars.contains(v) {
                        return Err(fail(format!("chain variable {v} does not occur")));
                    }
                }
                let lower = chain
                    .first()
                    .and_then(|v| hypotheses.lower_bounds.get(v))
                    .copied()
                    .unwrap_or(1);
                let names: Vec<&str> = chain.iter().map(String::as_str).collect();
                ctx.params.chain(&names, lower);
            }
            for v in &vars {
                if ctx.params.is_declared(v) {
                    continue;
                }
                if let Some(&value) = hypotheses.fixed.get(v) {
                    let value = u64::try_from(value)
                        .map_err(|_| fail(format!("{v} is fixed to a negative value")))?;
                    ctx.params.fix(v, value as i64);
                    ctx.fixed.insert(v.clone(), value);
                } else {
                    let lower = hypotheses.lower_bounds.get(v).copied().unwrap_or(1);
                    if lower < 0 {
                        return Err(fail(format!(
                            "unknown {v} needs a non-negative lower bound"
                        )));
                    }
                    ctx.params.declare(v, lower).expect("fresh");
                }
            }
            if hypotheses
                .facts
                .iter()
                .any(|f| f.exprs.len() != f.moduli.len() || f.moduli.contains(&0))
            {
                return Err(fail(
                    "a hypothesis fact has mismatched expressions and moduli".into(),
                ));
            }
            let mut equation = equation.clone();
            ctx.facts = hypotheses.facts.clone();
            ctx.relations = hypotheses.relations.clone();
            for (v, &value) in &ctx.fixed {
                let c = Poly::constant(value as i64);
                equation = equation.substitute(v, &c);
                ctx.facts = ctx.facts.iter().map(|f| f.substitute(v, &c)).collect();
                ctx.relations = ctx.relations.iter().map(|r| r.substitute(v, &c)).collect();
            }
            ctx.equations.push(equation);
            ctx.factored = true;
        }
    }
    Ok(ctx)
}

fn enter_ordering(ctx: &mut Context, class: OrderingClass) {
    ctx.ordering = Some(class);
    if let Some(ps) = class.params() {
        ctx.params = ps;
    }
}

fn check_split_primes(ctx: &Context, primes: &[PrimeSymbol]) -> Result<(), String> {
    let mut seen_p = BTreeSet::new();
    let mut seen_s = BTreeSet::new();
    for p in primes {
        let prime =
            u64::try_from(&p.prime).map_err(|_| format!("prime {} is too large", p.prime))?;
        if !is_prime_u64(prime) {
            return Err(format!("{prime} is not prime"));
        }
        let sym = p
            .symbol
            .as_deref()
            .ok_or(format!("prime {prime} has no valuation symbol"))?;
        if RESERVED.contains(&sym) || ctx.params.is_declared(sym) || !is_ident(sym) {
            return Err(format!("valuation symbol {sym:?} is not a fresh name"));
        }
        if !seen_p.insert(prime) || !seen_s.insert(sym) {
            return Err(format!("prime {prime} or symbol {sym} is repeated"));
        }
    }
    Ok(())
}

fn check_pattern(ctx: &Context, primes: &[PrimeSymbol]) -> Result<(), String> {
    let named: Vec<PrimeSymbol> = primes
        .iter()
        .map(|p| PrimeSymbol {
            prime: p.prime.clone(),
            symbol: Some(
                p.symbol
                    .clone()
                    .unwrap_or_else(|| format!("unnamed{}", p.prime)),
            ),
        })
        .collect();
    check_split_primes(ctx, &named)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

fn index(list: u64, len: usize, what: &str) -> Result<usize, String> {
    usize::try_from(list)
        .ok()
        .filter(|&i| i < len)
        .ok_or(format!("{what} index {list} is out of range ({len} known)"))
}

fn check(node: &Node, mut ctx: Context, path: Vec<String>) -> Result<(), Failure> {
    let fail = |msg: String| (path.clone(), msg);
    if let Some(kind) = ctx.closed {
        if !matches!(node, Node::Contradiction { .. }) {
            return Err(fail(format!(
                "branch is already closed ({kind}); expected a contradiction leaf"
            )));
        }
    }
    match node {
        Node::OrderingSplit { cases } => {
            if ctx.triple.is_none() || ctx.ordering.is_some() {
                return Err(fail(
                    "an ordering split needs a scaled target without a fixed class".into(),
                ));
            }
            let classes: Vec<OrderingClass> = cases.iter().map(|c| c.class).collect();
            if let Some(missing) = OrderingClass::ALL.iter().find(|c| !classes.contains(c)) {
                return Err(fail(format!(
                    "ordering split is not exhaustive: {missing} is missing"
                )));
            }
            if classes.len() != OrderingClass::ALL.len() {
                return Err(fail("ordering split repeats a class".into()));
            }
            let runs: Vec<(&Node, Context, Vec<String>)> = cases
                .iter()
                .map(|c| {
                    let mut child = ctx.clone();
                    enter_ordering(&mut child, c.class);
                    (
                        &c.proof,
                        child,
                        extend(&path, c.class.to_string(), &c.proof),
                    )
                })
                .collect();
            run_all(runs)
        }
        Node::ValuationSplit { primes, cases } => {
            if !matches!(ctx.scale, Some(ScaleSpec::Any)) || ctx.pattern.is_some() || ctx.factored {
                return Err(fail(
                    "a valuation split needs an undivided, unrestricted k".into(),
                ));
            }
            if !ctx.ordering.is_some_and(OrderingClass::is_strict) {
                return Err(fail(
                    "a valuation split needs a strict ordering class".into(),
                ));
            }
            check_split_primes(&ctx, primes).map_err(fail)?;
            let mut seen = BTreeSet::new();
            for c in cases {
                if c.pattern.len() != primes.len()
                    || c.pattern.iter().zip(primes).any(|(a, b)| {
                        a.prime != b.prime || (a.symbol.is_some() && a.symbol != b.symbol)
                    })
                {
                    return Err(fail(format!(
                        "pattern {} does not match the split primes",
                        pattern_label(&c.pattern)
                    )));
                }
                let bits: Vec<bool> = c.pattern.iter().map(|p| p.symbol.is_some()).collect();
                if !seen.insert(bits) {
                    return Err(fail(format!(
                        "pattern {} is repeated",
                        pattern_label(&c.pattern)
                    )));
                }
            }
            if seen.len() != 1usize << primes.len() {
                return Err(fail(format!(
                    "valuation split is not exhaustive: {} of {} patterns",
                    seen.len(),
                    1usize << primes.len()
                )));
            }
            let runs = cases
                .iter()
                .map(|c| {
                    let mut child = ctx.clone();
                    child.pattern = Some(c.pattern.clone());
                    (
                        &c.proof,
                        child,
                        extend(&path, pattern_label(&c.pattern), &c.proof),
                    )
                })
                .collect();
            run_all(runs)
        }
        Node::KFactor { form, then } => {
            let (Some(triple), Some(ordering)) = (ctx.triple, ctx.ordering) else {
                return Err(fail(
                    "k-factoring needs a scaled target and an ordering class".into(),
                ));
            };
            if ctx.factored {
                return Err(fail("the equation is already factored".into()));
            }
            let spec = match (ctx.scale, &ctx.pattern) {
                (Some(ScaleSpec::Any), Some(p)) => KSpec::pattern(p.clone()),
                (Some(ScaleSpec::Any), None) => {
                    return Err(fail(
                        "k is unrestricted; split on its valuations first".into(),
                    ))
                }
                (Some(ScaleSpec::Value { k }), _) => match &form.k {
                    KSpec::Concrete {
                        k: claimed,
                        symbols,
                    } if claimed == k => KSpec::Concrete {
                        k: k.clone(),
                        symbols: symbols.clone(),
                    },
                    _ => return Err(fail(format!("form is not for k = {k}"))),
                },
                (None, _) => unreachable!("scaled targets carry k"),
            };
            let derived = factor_k(triple, &spec, ordering).map_err(|e| fail(e.to_string()))?;
            if &derived != form {
                return Err(fail(form_difference(form, &derived)));
            }
            if derived.is_infeasible() {
                ctx.closed = Some(ContradictionKind::Valuation);
            } else {
                for v in &derived.valuations {
                    match v.value {
                        Some(value) => {
                            ctx.params.fix(&v.symbol, value as i64);
                            ctx.fixed.insert(v.symbol.clone(), value);
                        }
                        None => ctx
                            .params
                            .declare(&v.symbol, 1)
                            .map_err(|e| fail(e.to_string()))?,
                    }
                }
                ctx.relations.extend(derived.relations.iter().cloned());
                ctx.equations = vec![derived.reduced.clone().expect("feasible forms are reduced")];
                ctx.k_is_one = derived.n1.is_one()
                    && match &spec {
                        KSpec::Pattern { primes } => primes.iter().all(|p| p.symbol.is_none()),
                        KSpec::Concrete { k, .. } => k.is_one(),
                    };
            }
            ctx.factored = true;
            check(then, ctx, extend(&path, None, then))
        }
        Node::Congruence {
            equations,
            modulus,
            claim,
            then,
        } => {
            if claim.exprs.len() != claim.moduli.len() || claim.moduli.contains(&0) {
                return Err(fail("claim expressions and moduli do not match".into()));
            }
            let found =
                project(&ctx, equations, *modulus, &claim.exprs, &claim.moduli).map_err(fail)?;
            let claimed = claim.allowed_tuples();
            if claimed != found {
                return Err(fail(format!(
                    "claimed {} residue tuples, computed {}: {}",
                    claimed.len(),
                    found.len(),
                    describe(&found)
                )));
            }
            record(
                &mut ctx,
                ResidueFact::joint(claim.exprs.clone(), claim.moduli.clone(), found),
            );
            check(then, ctx, extend(&path, None, then))
        }
        Node::FiniteCase {
            equations,
            modulus,
            exprs,
            moduli,
            listed,
            then,
        } => {
            if exprs.len() != moduli.len() || moduli.contains(&0) {
                return Err(fail("expressions and moduli do not match".into()));
            }
            let mut claimed = BTreeSet::new();
            for t in listed {
                if t.len() != exprs.len() {
                    return Err(fail(format!(
                        "listed tuple ({}) has the wrong length",
                        t.join(",")
                    )));
                }
                let mut row = Vec::new();
                for (s, &n) in t.iter().zip(moduli) {
                    row.push(
                        s.parse::<u64>()
                            .map_err(|e| fail(format!("bad residue {s:?}: {e}")))?
                            % n,
                    );
                }
                claimed.insert(row);
            }
            let found = project(&ctx, equations, *modulus, exprs, moduli).map_err(fail)?;
            if claimed != found {
                return Err(fail(format!(
                    "listed cases reduce to {} classes, computed {}: {}",
                    claimed.len(),
                    found.len(),
                    describe(&found)
                )));
            }
            record(
                &mut ctx,
                ResidueFact::joint(exprs.clone(), moduli.clone(), found),
            );
            check(then, ctx, extend(&path, None, then))
        }
        Node::ResidueSplit {
            var,
            modulus,
            cases,
        } => {
            if !ctx.params.is_declared(var)
                || ctx.fixed.contains_key(var)
                || !ctx
                    .params
                    .expr(var)
                    .is_some_and(|e| e.as_constant().is_none())
            {
                return Err(fail(format!("{var} is not a free unknown")));
            }
            if *modulus < 2 {
                return Err(fail("modulus must be at least 2".into()));
            }
            let residues: BTreeSet<u64> = cases.iter().map(|c| c.residue).collect();
            if residues.len() != cases.len() || residues != (0..*modulus).collect() {
                return Err(fail(format!(
                    "residues do not cover 0..{} exactly once",
                    modulus - 1
                )));
            }
            let runs = cases
                .iter()
                .map(|c| {
                    let mut child = ctx.clone();
                    child
                        .facts
                        .push(ResidueFact::single(var, *modulus, [c.residue]));
                    let _ = child
                        .params
                        .restrict_residue(var, *modulus as i64, c.residue as i64);
                    let label = format!("{var}={} mod {modulus}", c.residue);
                    (&c.proof, child, extend(&path, label, &c.proof))
                })
                .collect();
            run_all(runs)
        }
        Node::Divide {
            var,
            factor,
            into,
            then,
        } => {
            if *factor < 2 || !ctx.params.is_declared(var) || ctx.fixed.contains_key(var) {
                return Err(fail(format!("cannot divide {var} by {factor}")));
            }
            if !is_ident(into) || ctx.params.is_declared(into) || RESERVED.contains(&into.as_str())
            {
                return Err(fail(format!("{into:?} is not a fresh name")));
            }
            let k = *factor as i64;
            let divisible = ctx.params.expr(var).and_then(|e| e.div_exact(k)).is_some();
            if !divisible {
                if !fact_forces_zero(&ctx.facts, var, *factor) {
                    return Err(fail(format!("no known fact shows {var} = 0 mod {factor}")));
                }
                match ctx.params.restrict_residue(var, k, 0) {
                    Ok(true) => {}
                    _ => {
                        return Err(fail(format!(
                            "the parametrization of {var} cannot be refined mod {factor}"
                        )))
                    }
                }
            }
            ctx.params
                .divide(var, k, into)
                .map_err(|e| fail(e.to_string()))?;
            ctx.params.remove(var);
            let value = Poly::var(into).scale(k);
            ctx.equations = ctx
                .equations
                .iter()
                .map(|e| e.substitute(var, &value))
                .collect();
            ctx.facts = ctx
                .facts
                .iter()
                .map(|f| f.substitute(var, &value))
                .collect();
            ctx.relations = ctx
                .relations
                .iter()
                .map(|r| r.substitute(var, &value))
                .collect();
            ctx.bounds = ctx
                .bounds
                .iter()
                .map(|b| Bound {
                    small: substitute_sum(&b.small, var, &value),
                    big: substitute_sum(&b.big, var, &value),
                })
                .collect();
            check(then, ctx, extend(&path, None, then))
        }
        Node::SquareBound {
            equation,
            minus,
            prime,
            bound,
            then,
        } => {
            let i = index(*equation, ctx.equations.len(), "equation").map_err(fail)?;
            let derived = square_bound(&ctx.equations[i], *minus, *prime).map_err(fail)?;
            if canonical_sum(&derived.small) != canonical_sum(&bound.small)
                || canonical_sum(&derived.big) != canonical_sum(&bound.big)
            {
                return Err(fail(format!(
                    "bound is {} <= {}, not {} <= {}",
                    derived.small, derived.big, bound.small, bound.big
                )));
            }
            ctx.bounds.push(derived);
            check(then, ctx, extend(&path, None, then))
        }
        Node::Inequality {
            chain,
            strict,
            against,
            then,
        } => {
            if chain.len() < 2 || strict.len() != chain.len() - 1 || !strict.iter().any(|&s| s) {
                return Err(fail(
                    "a chain needs two ends and at least one strict link".into(),
                ));
            }
            let (first, last) = (&chain[0], &chain[chain.len() - 1]);
            let ends = fact_sides(&ctx, against).map_err(fail)?;
            let matches = ends.iter().any(|(a, b)| {
                canonical_sum(a) == canonical_sum(first) && canonical_sum(b) == canonical_sum(last)
            });
            if !matches {
                return Err(fail(format!(
                    "chain {first} > {last} does not contradict the referenced fact"
                )));
            }
            for (i, pair) in chain.windows(2).enumerate() {
                verify_inequality(&pair[0], &pair[1], strict[i], &ctx.params)
                    .map_err(|e| fail(format!("link {i} ({} vs {}): {e}", pair[0], pair[1])))?;
            }
            ctx.closed = Some(ContradictionKind::Size);
            check(then, ctx, extend(&path, None, then))
        }
        Node::Contradiction { reason } => match ctx.closed {
            Some(kind) if kind == *reason => Ok(()),
            Some(kind) => Err(fail(format!("branch closed by {kind}, not {reason}"))),
            None => Err(fail(
                "no contradiction has been derived on this branch".into(),
            )),
        },
        Node::Cited { lemma } => {
            let l =
                lemmas::lookup(lemma).ok_or_else(|| fail(format!("unknown lemma {lemma:?}")))?;
            let facts = BranchFacts {
                triple: ctx.triple,
                ordering: ctx.ordering,
                k_is_one: ctx.k_is_one,
            };
            (l.applies)(&facts).map_err(|e| fail(format!("{lemma} does not apply: {e}")))
        }
        Node::Excluded { solution } => {
            if ctx.ordering != Some(OrderingClass::AllEqual)
                || !OrderingClass::AllEqual.contains(solution)
            {
                return Err(fail(format!("{solution} does not make up this branch")));
            }
            if !ctx.excluded.contains(solution) {
                return Err(fail(format!("{solution} is not in the excluded set")));
            }
            Ok(())
        }
    }
}

fn extend(path: &[String], case: impl Into<Option<String>>, next: &Node) -> Vec<String> {
    let mut p = path.to_vec();
    p.extend(case.into());
    p.push(next.label());
    p
}

fn run_all(runs: Vec<(&Node, Context, Vec<String>)>) -> Result<(), Failure> {
    match runs
        .into_par_iter()
        .find_map_first(|(node, ctx, path)| check(node, ctx, path).err())
    {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn project(
    ctx: &Context,
    equations: &[u64],
    modulus: u64,
    exprs: &[Poly],
    moduli: &[u64],
) -> Result<BTreeSet<Vec<u64>>, String> {
    if equations.is_empty() {
        return Err("no equations referenced".into());
    }
    let systems = equations
        .iter()
        .map(|&e| {
            index(e, ctx.equations.len(), "equation").map(|i| terms_of_equation(&ctx.equations[i]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let set = solve_system(
        &systems,
        modulus,
        &ctx.params,
        &ctx.fixed,
        &ctx.facts,
        &ctx.relations,
    )
    .map_err(|e| e.to_string())?;
    set.project_joint(exprs, moduli)
        .ok_or_else(|| "claim is not determined by the enumerated residues".to_string())
}

fn record(ctx: &mut Context, fact: ResidueFact) {
    if fact.is_empty() {
        ctx.closed = Some(ContradictionKind::EmptyCongruence);
    }
    ctx.facts.push(fact);
}

fn describe(set: &BTreeSet<Vec<u64>>) -> String {
    if set.is_empty() {
        return "none".into();
    }
    let shown: Vec<String> = set
        .iter()
        .take(12)
        .map(|t| {
            format!(
                "({})",
                t.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    let more = if set.len() > 12 { ", ..." } else { "" };
    format!("{}{more}", shown.join(", "))
}

fn fact_forces_zero(facts: &[ResidueFact], var: &str, k: u64) -> bool {
    let target = Poly::var(var);
    facts.iter().any(|f| {
        f.exprs
            .iter()
            .zip(&f.moduli)
            .enumerate()
            .any(|(i, (e, &n))| {
                *e == target && n % k == 0 && f.allowed_tuples().iter().all(|t| t[i] % k == 0)
            })
    })
}

fn substitute_sum(s: &SignedSum, var: &str, value: &Poly) -> SignedSum {
    SignedSum {
        terms: s
            .terms
            .iter()
            .map(|(n, m)| (*n, m.substitute(var, value)))
            .collect(),
    }
}

fn canonical_sum(s: &SignedSum) -> Vec<(bool, ExpMonomial)> {
    let mut v: Vec<(bool, ExpMonomial)> =
        s.terms.iter().map(|(n, m)| (*n, m.canonical())).collect();
    v.sort();
    v
}

/// Both orientations of an equation, or the bound as `small`, `big`.
fn fact_sides(ctx: &Context, r: &FactRef) -> Result<Vec<(SignedSum, SignedSum)>, String> {
    match r.kind {
        FactKind::Equation => {
            let e = &ctx.equations[index(r.index, ctx.equations.len(), "equation")?];
            let (l, rr) = (SignedSum::positive(&e.lhs), SignedSum::positive(&e.rhs));
            Ok(vec![(l.clone(), rr.clone()), (rr, l)])
        }
        FactKind::Bound => {
            let b = &ctx.bounds[index(r.index, ctx.bounds.len(), "bound")?];
            Ok(vec![(b.small.clone(), b.big.clone())])
        }
    }
}

fn half(m: &ExpMonomial) -> Option<ExpMonomial> {
    let mut out = ExpMonomial::one();
    for (b, e) in m.canonical().factors() {
        out.mul_factor(b.clone(), e.div_exact(2)?);
    }
    Some(out)
}

fn square_bound(eq: &ExpEquation, minus: u64, prime: u64) -> Result<Bound, String> {
    let (single, pair) = match (eq.lhs.len(), eq.rhs.len()) {
        (1, 2) => (&eq.lhs[0], &eq.rhs),
        (2, 1) => (&eq.rhs[0], &eq.lhs),
        _ => return Err(format!("{eq} is not of the form A = B + C")),
    };
    let q = usize::try_from(minus)
        .ok()
        .filter(|&i| i < 2)
        .ok_or("minus must be 0 or 1")?;
    let p_half = half(single).ok_or_else(|| format!("{single} is not a square"))?;
    let q_half = half(&pair[q]).ok_or_else(|| format!("{} is not a square", pair[q]))?;
    let rest = pair[1 - q].canonical();
    if prime < 3 || !is_prime_u64(prime) {
        return Err(format!("{prime} is not an odd prime"));
    }
    let pb = BigUint::from(prime);
    if !p_half.exponent_of(&pb).is_zero() {
        return Err(format!("{prime} divides {p_half}"));
    }
    let e = rest.exponent_of(&pb);
    Ok(Bound {
        small: SignedSum::positive(&[ExpMonomial::power(prime, e)]),
        big: SignedSum::positive(&[p_half, q_half]),
    })
}

fn form_difference(
    claimed: &crate::reduction::KFactoredForm,
    derived: &crate::reduction::KFactoredForm,
) -> String {
    if claimed.relations != derived.relations {
        let show = |r: &[Poly]| r.iter().map(Poly::to_string).collect::<Vec<_>>().join(", ");
        return format!(
            "relations are [{}], not [{}]",
            show(&derived.relations),
            show(&claimed.relations)
        );
    }
    if claimed.reduced != derived.reduced {
        return format!(
            "reduced equation is {}, not {}",
            derived
                .reduced
                .as_ref()
                .map_or("none".into(), ToString::to_string),
            claimed
                .reduced
                .as_ref()
                .map_or("none".into(), ToString::to_string)
        );
    }
    if claimed.infeasible != derived.infeasible {
        return format!("feasibility differs: derived {:?}", derived.infeasible);
    }
    "k-factored form does not match the derived one".into()
}
