//! Parametrization of the exponent variables of a proof branch.
//!
//! Every named variable is written as a polynomial in hidden parameters
//! that range over all non-negative integers, such that the branch's
//! ordering, lower-bound and residue hypotheses hold for every parameter
//! choice and every admissible assignment is reached by some choice.
//! For `z < x < y` that is `z = 1 + a`, `x = 2 + a + b`, `y = 3 + a + b + c`.
//!
//! Lower bounds then come for free: a polynomial whose parametrized form
//! has only non-negative non-constant coefficients is at least its
//! constant term.

use std::collections::BTreeMap;

use num_integer::Integer;
use thiserror::Error;

use crate::expr::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("variable {0} is not declared")]
    Undeclared(String),
    #[error("variable {0} is already declared")]
    Redeclared(String),
    #[error("{var} = {expr} is not divisible by {k} in the current parametrization")]
    NotDivisible { var: String, expr: String, k: i64 },
}

/// Names of hidden parameters start with `_` and never appear in certificates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    exprs: BTreeMap<String, Poly>,
    next: usize,
}

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    fn fresh(&mut self) -> Poly {
        let name = format!("_p{}", self.next);
        self.next += 1;
        Poly::var(&name)
    }

    pub fn is_declared(&self, var: &str) -> bool {
        self.exprs.contains_key(var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.exprs.keys()
    }

    pub fn expr(&self, var: &str) -> Option<&Poly> {
        self.exprs.get(var)
    }

    /// `var >= lower`, otherwise unconstrained.
    pub fn declare(&mut self, var: &str, lower: i64) -> Result<(), ParamError> {
        if self.is_declared(var) {
            return Err(ParamError::Redeclared(var.into()));
        }
        let e = &Poly::constant(lower) + &self.fresh();
        self.exprs.insert(var.into(), e);
        Ok(())
    }

    pub fn fix(&mut self, var: &str, value: i64) {
        self.exprs.insert(var.into(), Poly::constant(value));
    }

    /// Redeclares `chain[0] < chain[1] < ...` with `chain[0] >= lower`.
    pub fn chain(&mut self, chain: &[&str], lower: i64) {
        let mut prev = &Poly::constant(lower - 1) + &Poly::zero();
        for v in chain {
            let e = &(&prev + &Poly::constant(1)) + &self.fresh();
            self.exprs.insert((*v).into(), e.clone());
            prev = e;
        }
    }

    /// Rewrites a polynomial in named variables over the parameters.
    pub fn expand(&self, p: &Poly) -> Result<Poly, ParamError> {
        for v in p.vars() {
            if !self.exprs.contains_key(&v) {
                return Err(ParamError::Undeclared(v));
            }
        }
        Ok(p.substitute_all(&self.exprs))
    }

    /// Proven lower bound, if the expansion has no negative coefficient
    /// outside the constant term.
    pub fn lower_bound(&self, p: &Poly) -> Option<i64> {
        let e = self.expand(p).ok()?;
        let nonneg = e.terms().all(|(k, c)| k.is_empty() || c >= 0);
        nonneg.then(|| e.constant_term())
    }

    pub fn proves_at_least(&self, p: &Poly, c: i64) -> bool {
        self.lower_bound(p).is_some_and(|lb| lb >= c)
    }

    pub fn proves_positive(&self, p: &Poly) -> bool {
        self.proves_at_least(p, 1)
    }

    /// Refines the parametrization so that `var = residue (mod modulus)`
    /// holds. Succeeds when some parameter enters `var` linearly with a
    /// coefficient invertible mod `modulus` and every other parameter's
    /// coefficient is divisible by `modulus`. Returns whether it applied.
    pub fn restrict_residue(
        &mut self,
        var: &str,
        modulus: i64,
        residue: i64,
    ) -> Result<bool, ParamError> {
        let e = self
            .exprs
            .get(var)
            .ok_or_else(|| ParamError::Undeclared(var.into()))?
            .clone();
        if modulus <= 1 {
            return Ok(true);
        }
        if e.degree() > 1 {
            return Ok(false);
        }
        if let Some(c) = e.as_constant() {
            return Ok(c.mod_floor(&modulus) == residue.mod_floor(&modulus));
        }
        let params: Vec<(String, i64)> = e
            .terms()
            .filter(|(k, _)| k.len() == 1)
            .map(|(k, c)| (k[0].clone(), c))
            .collect();
        let pick = params.iter().find(|(name, a)| {
            a.gcd(&modulus) == 1
                && params
                    .iter()
                    .all(|(other, b)| other == name || b.mod_floor(&modulus) == 0)
        });
        let Some((name, a)) = pick.cloned() else {
            return Ok(false);
        };
        let inv = mod_inverse(a.mod_floor(&modulus), modulus).expect("coprime coefficient");
        let t = ((residue - e.constant_term()).mod_floor(&modulus) * inv).mod_floor(&modulus);
        let replacement = &Poly::constant(t) + &self.fresh().scale(modulus);
        for expr in self.exprs.values_mut() {
            *expr = expr.substitute(&name, &replacement);
        }
        Ok(true)
    }

    /// Declares `new_var = var / k`; the current parametrization of `var`
    /// must be divisible by `k` as a polynomial.
    pub fn divide(&mut self, var: &str, k: i64, new_var: &str) -> Result<(), ParamError> {
        let e = self
            .exprs
            .get(var)
            .ok_or_else(|| ParamError::Undeclared(var.into()))?;
        if self.exprs.contains_key(new_var) {
            return Err(ParamError::Redeclared(new_var.into()));
        }
        let q = e.div_exact(k).ok_or_else(|| ParamError::NotDivisible {
            var: var.into(),
            expr: e.to_string(),
            k,
        })?;
        self.exprs.insert(new_var.into(), q);
        Ok(())
    }

    pub fn remove(&mut self, var: &str) {
        self.exprs.remove(var);
    }

    /// Base point: every parameter at zero.
    pub fn base_values(&self) -> BTreeMap<String, i64> {
        self.exprs
            .iter()
            .map(|(v, e)| (v.clone(), e.constant_term()))
            .collect()
    }
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let g = a.extended_gcd(&m);
    (g.gcd == 1).then(|| g.x.mod_floor(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn chain_gives_strict_order() {
        let mut ps = Params::new();
        ps.chain(&["z", "x", "y"], 1);
        assert_eq!(ps.lower_bound(&p("z")), Some(1));
        assert_eq!(ps.lower_bound(&p("y")), Some(3));
        assert!(ps.proves_positive(&p("x - z")));
        assert!(ps.proves_positive(&p("y - x")));
        assert!(!ps.proves_positive(&p("z - x")));
    }

    #[test]
    fn products_of_positive_differences() {
        let mut ps = Params::new();
        ps.chain(&["y", "z", "x"], 1);
        ps.declare("r", 1).unwrap();
        assert!(ps.proves_positive(&p("r*(x - z)")));
        assert!(ps.proves_at_least(&p("2*x - 1"), 5));
        // r*(z - y) - 2*y has no sign
        assert_eq!(ps.lower_bound(&p("r*z - r*y - 2*y")), None);
    }

    #[test]
    fn residue_refinement_and_division() {
        let mut ps = Params::new();
        ps.chain(&["y", "z", "x"], 1);
        assert!(ps.restrict_residue("y", 2, 0).unwrap());
        assert!(ps.restrict_residue("z", 2, 0).unwrap());
        ps.divide("y", 2, "y1").unwrap();
        ps.divide("z", 2, "z1").unwrap();
        assert_eq!(ps.lower_bound(&p("y1")), Some(1));
        assert_eq!(ps.lower_bound(&p("z1")), Some(2));
        assert!(ps.proves_positive(&p("x - 2*z1")));
        // x = z + 1 + c with z even: parity of x is carried by c alone
        assert!(ps.restrict_residue("x", 2, 1).unwrap());
        assert!(ps.divide("x", 2, "x1").is_err());
    }

    #[test]
    fn refinement_needs_a_free_parameter() {
        let mut ps = Params::new();
        ps.chain(&["x", "z"], 1);
        // z = 2 + a + b: neither parameter controls the parity alone
        assert!(!ps.restrict_residue("z", 2, 0).unwrap());
    }
}
