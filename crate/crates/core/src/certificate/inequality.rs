//! Exponential inequalities by monotone induction over the parameters.
//!
//! Both sides are moved to positive sums and common monomials cancelled.
//! With every exponent linear in the parameters, the claim holds if it
//! holds with all parameters at zero and raising any one parameter by one
//! multiplies each left term by at least the largest factor by which any
//! right term grows.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{ExpMonomial, SignedSum};
use crate::params::Params;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InequalityError {
    #[error("unsupported inequality: {0}")]
    Unsupported(String),
    #[error("fails at the base point: {lhs} vs {rhs}")]
    BaseCase { lhs: String, rhs: String },
    #[error("growth in {param}: left side grows by at least {lhs}, right side by up to {rhs}")]
    Growth {
        param: String,
        lhs: String,
        rhs: String,
    },
}

/// Monomial with exponents rewritten over the parameters.
struct Expanded {
    factors: Vec<(BigUint, i64, Vec<(String, i64)>)>,
}

impl Expanded {
    fn new(m: &ExpMonomial, params: &Params) -> Result<Expanded, InequalityError> {
        let mut factors = Vec::new();
        for (b, e) in m.canonical().factors() {
            let p = params
                .expand(e)
                .map_err(|err| InequalityError::Unsupported(err.to_string()))?;
            if p.degree() > 1 {
                return Err(InequalityError::Unsupported(format!(
                    "exponent {e} of {b} is not linear in the parameters"
                )));
            }
            let linear = p
                .terms()
                .filter(|(k, _)| k.len() == 1)
                .map(|(k, c)| (k[0].clone(), c))
                .collect();
            factors.push((b.clone(), p.constant_term(), linear));
        }
        Ok(Expanded { factors })
    }

    fn params(&self) -> impl Iterator<Item = &String> {
        self.factors
            .iter()
            .flat_map(|(_, _, l)| l.iter().map(|(v, _)| v))
    }

    fn base_value(&self) -> BigRational {
        self.factors
            .iter()
            .fold(BigRational::one(), |acc, (b, c, _)| acc * power(b, *c))
    }

    fn growth(&self, param: &str) -> BigRational {
        self.factors
            .iter()
            .fold(BigRational::one(), |acc, (b, _, l)| {
                let c = l.iter().find(|(v, _)| v == param).map_or(0, |(_, c)| *c);
                acc * power(b, c)
            })
    }
}

fn power(b: &BigUint, e: i64) -> BigRational {
    let n = BigRational::from_integer(BigInt::from(b.clone()));
    let k = u32::try_from(e.unsigned_abs()).expect("small exponent");
    let p = num_traits::pow(n, k as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Positive monomials of `lhs >= rhs` after moving negative terms across
/// and cancelling common monomials.
fn normalise(lhs: &SignedSum, rhs: &SignedSum) -> (Vec<ExpMonomial>, Vec<ExpMonomial>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (neg, m) in &lhs.terms {
        if *neg {
            right.push(m.canonical())
        } else {
            left.push(m.canonical())
        }
    }
    for (neg, m) in &rhs.terms {
        if *neg {
            left.push(m.canonical())
        } else {
            right.push(m.canonical())
        }
    }
    let mut kept = Vec::new();
    for m in left {
        if let Some(i) = right.iter().position(|r| *r == m) {
            right.swap_remove(i);
        } else {
            kept.push(m);
        }
    }
    (kept, right)
}

/// Checks `lhs > rhs` (or `>=` when not strict) for every parameter value.
pub fn verify_inequality(
    lhs: &SignedSum,
    rhs: &SignedSum,
    strict: bool,
    params: &Params,
) -> Result<(), InequalityError> {
    let (left, right) = normalise(lhs, rhs);
    if right.is_empty() {
        return if !left.is_empty() || !strict {
            Ok(())
        } else {
            Err(InequalityError::BaseCase {
                lhs: "0".into(),
                rhs: "0".into(),
            })
        };
    }
    if left.is_empty() {
        return Err(InequalityError::BaseCase {
            lhs: "0".into(),
            rhs: SignedSum::positive(&right).to_string(),
        });
    }
    let left: Vec<Expanded> = left
        .iter()
        .map(|m| Expanded::new(m, params))
        .collect::<Result<_, _>>()?;
    let right: Vec<Expanded> = right
        .iter()
        .map(|m| Expanded::new(m, params))
        .collect::<Result<_, _>>()?;

    let total = |side: &[Expanded]| {
        side.iter()
            .fold(BigRational::zero(), |acc, t| acc + t.base_value())
    };
    let (l0, r0) = (total(&left), total(&right));
    if !(l0 > r0 || (!strict && l0 == r0)) {
        return Err(InequalityError::BaseCase {
            lhs: l0.to_string(),
            rhs: r0.to_string(),
        });
    }

    let names: BTreeSet<&String> = left
        .iter()
        .chain(&right)
        .flat_map(Expanded::params)
        .collect();
    for p in names {
        let gl = left.iter().map(|t| t.growth(p)).min().expect("nonempty");
        let gr = right.iter().map(|t| t.growth(p)).max().expect("nonempty");
        if gl < gr {
            return Err(InequalityError::Growth {
                param: p.clone(),
                lhs: gl.to_string(),
                rhs: gr.to_string(),
            });
        }
    }
    Ok(())
}
