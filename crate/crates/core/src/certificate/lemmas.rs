//! Published results a certificate may cite instead of proving.
//!
//! Each lemma states the branch hypotheses under which it closes a case;
//! the verifier checks those hypotheses, not the lemma.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::reduction::OrderingClass;
use crate::triples::{lu_family, Triple};

/// What a lemma may inspect about the branch it closes.
#[derive(Debug, Clone, Copy)]
pub struct BranchFacts<'a> {
    pub triple: Option<&'a Triple>,
    pub ordering: Option<OrderingClass>,
    /// `k = 1` has been established on this branch.
    pub k_is_one: bool,
}

pub struct Lemma {
    pub name: &'static str,
    pub statement: &'static str,
    pub applies: fn(&BranchFacts) -> Result<(), String>,
}

pub const LEMMAS: [Lemma; 3] = [
    Lemma {
        name: "lu-lemma",
        statement: "(4n^2 - 1)^x + (4n)^y = (4n^2 + 1)^z has only the solution (2, 2, 2)",
        applies: lu_applies,
    },
    Lemma {
        name: "deng-cohen",
        statement:
            "for U^2 + V^2 = W^2, any solution of U^x + V^y = W^z with z >= max(x, y) is (2, 2, 2)",
        applies: deng_cohen_applies,
    },
    Lemma {
        name: "le-distinct",
        statement:
            "for a primitive triple and any k, a solution other than (2, 2, 2) has x, y, z distinct",
        applies: le_applies,
    },
];

pub fn lookup(name: &str) -> Option<&'static Lemma> {
    LEMMAS.iter().find(|l| l.name == name)
}

/// `n` with `triple` equal to `lu_family(n)` up to leg order.
pub fn lu_parameter(t: &Triple) -> Option<BigUint> {
    if t.w.is_zero() {
        return None;
    }
    let n = ((&t.w - 1u32) / 4u32).sqrt();
    if n.is_zero() {
        return None;
    }
    lu_family(&n)
        .ok()
        .filter(|l| l.same_up_to_leg_order(t))
        .map(|_| n)
}

fn lu_applies(b: &BranchFacts) -> Result<(), String> {
    let t = b.triple.ok_or("needs a scaled Pythagorean target")?;
    if lu_parameter(t).is_none() {
        return Err(format!("{t} is not of the form (4n^2 - 1, 4n, 4n^2 + 1)"));
    }
    if !b.k_is_one {
        return Err("k = 1 is not established on this branch".into());
    }
    match b.ordering {
        Some(OrderingClass::AllEqual) => Err("(2, 2, 2) must be excluded, not cited".into()),
        Some(_) => Ok(()),
        None => Err("ordering class is not fixed".into()),
    }
}

fn deng_cohen_applies(b: &BranchFacts) -> Result<(), String> {
    b.triple.ok_or("needs a scaled Pythagorean target")?;
    match b.ordering {
        Some(OrderingClass::ZGeMax) => Ok(()),
        other => Err(format!("needs the z >= max(x, y) class, not {other:?}")),
    }
}

fn le_applies(b: &BranchFacts) -> Result<(), String> {
    let t = b.triple.ok_or("needs a scaled Pythagorean target")?;
    if !t.is_primitive() {
        return Err(format!("{t} is not primitive"));
    }
    match b.ordering {
        Some(OrderingClass::HasTie) => Ok(()),
        other => Err(format!("needs the tied class, not {other:?}")),
    }
}
