//! Pythagorean triple families and the Fibonacci near-triple.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("non-primitive parameters (p, q) = ({p}, {q}): {condition}")]
    NonPrimitiveParameters {
        p: String,
        q: String,
        condition: &'static str,
    },
    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),
    #[error("({u}, {v}, {w}) is not a Pythagorean triple")]
    NotPythagorean { u: String, v: String, w: String },
}

/// Family a triple was generated from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Explicit,
    Pq {
        #[serde(with = "crate::serde_dec")]
        p: BigUint,
        #[serde(with = "crate::serde_dec")]
        q: BigUint,
    },
    Jesmanowicz {
        #[serde(with = "crate::serde_dec")]
        n: BigUint,
    },
    Lu {
        #[serde(with = "crate::serde_dec")]
        n: BigUint,
    },
    Fermat {
        n: u32,
    },
}

/// `U^2 + V^2 = W^2`, legs stored in the order the family writes them.
/// Equations always bind `x` to `U` and `y` to `V`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    #[serde(with = "crate::serde_dec")]
    pub u: BigUint,
    #[serde(with = "crate::serde_dec")]
    pub v: BigUint,
    #[serde(with = "crate::serde_dec")]
    pub w: BigUint,
    pub family: Family,
}

impl Triple {
    pub fn new(u: BigUint, v: BigUint, w: BigUint) -> Result<Self, TripleError> {
        Self::with_family(u, v, w, Family::Explicit)
    }

    pub fn from_u64(u: u64, v: u64, w: u64) -> Result<Self, TripleError> {
        Self::new(u.into(), v.into(), w.into())
    }

    fn with_family(
        u: BigUint,
        v: BigUint,
        w: BigUint,
        family: Family,
    ) -> Result<Self, TripleError> {
        if u.is_zero() || v.is_zero() || &u * &u + &v * &v != &w * &w {
            return Err(TripleError::NotPythagorean {
                u: u.to_string(),
                v: v.to_string(),
                w: w.to_string(),
            });
        }
        Ok(Triple { u, v, w, family })
    }

    pub fn is_primitive(&self) -> bool {
        self.u.gcd(&self.v).is_one() && (self.u.is_even() != self.v.is_even())
    }

    pub fn legs_sorted(&self) -> (BigUint, BigUint, BigUint) {
        if self.u <= self.v {
            (self.u.clone(), self.v.clone(), self.w.clone())
        } else {
            (self.v.clone(), self.u.clone(), self.w.clone())
        }
    }

    /// Same legs as `other`, ignoring order.
    pub fn same_up_to_leg_order(&self, other: &Triple) -> bool {
        self.legs_sorted() == other.legs_sorted()
    }

    pub fn swapped(&self) -> Triple {
        Triple {
            u: self.v.clone(),
            v: self.u.clone(),
            w: self.w.clone(),
            family: self.family.clone(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.u, self.v, self.w)
    }
}

/// `(p^2 - q^2, 2pq, p^2 + q^2)` for coprime `p > q >= 1` of opposite parity.
pub fn primitive_from_pq(p: &BigUint, q: &BigUint) -> Result<Triple, TripleError> {
    let fail = |condition| TripleError::NonPrimitiveParameters {
        p: p.to_string(),
        q: q.to_string(),
        condition,
    };
    if q.is_zero() {
        return Err(fail("q must be at least 1"));
    }
    if p <= q {
        return Err(fail("p must exceed q"));
    }
    if !p.gcd(q).is_one() {
        return Err(fail("gcd(p, q) must be 1"));
    }
    if p.is_even() == q.is_even() {
        return Err(fail("p and q must have opposite parity"));
    }
    let (p2, q2) = (p * p, q * q);
    Triple::with_family(
        &p2 - &q2,
        BigUint::from(2u32) * p * q,
        p2 + q2,
        Family::Pq {
            p: p.clone(),
            q: q.clone(),
        },
    )
}

fn positive(n: &BigUint, what: &str) -> Result<(), TripleError> {
    if n.is_zero() {
        Err(TripleError::InvalidParameter(format!(
            "{what} requires n >= 1"
        )))
    } else {
        Ok(())
    }
}

/// `(2n+1, 2n(n+1), 2n(n+1)+1)`.
pub fn jesmanowicz_family(n: &BigUint) -> Result<Triple, TripleError> {
    positive(n, "jesmanowicz family")?;
    let leg = BigUint::from(2u32) * n * (n + 1u32);
    Triple::with_family(
        BigUint::from(2u32) * n + 1u32,
        leg.clone(),
        leg + 1u32,
        Family::Jesmanowicz { n: n.clone() },
    )
}

/// `(4n^2 - 1, 4n, 4n^2 + 1)`, odd leg first.
pub fn lu_family(n: &BigUint) -> Result<Triple, TripleError> {
    positive(n, "lu family")?;
    let sq4 = BigUint::from(4u32) * n * n;
    Triple::with_family(
        &sq4 - 1u32,
        BigUint::from(4u32) * n,
        sq4 + 1u32,
        Family::Lu { n: n.clone() },
    )
}

/// `F_n = 2^(2^n) + 1`.
pub fn fermat_number(n: u32) -> BigUint {
    (BigUint::one() << (1usize << n)) + 1u32
}

/// `(F_n - 2, 2^(2^(n-1)+1), F_n)`.
pub fn fermat_family(n: u32) -> Result<Triple, TripleError> {
    if n == 0 {
        return Err(TripleError::InvalidParameter(
            "fermat family requires n >= 1".into(),
        ));
    }
    if n > 24 {
        return Err(TripleError::InvalidParameter(
            "fermat family index too large".into(),
        ));
    }
    let f = fermat_number(n);
    Triple::with_family(
        &f - 2u32,
        BigUint::one() << ((1usize << (n - 1)) + 1),
        f,
        Family::Fermat { n },
    )
}

/// Fibonacci numbers with `F_1 = F_2 = 1`.
pub fn fibonacci(n: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `(F_n, F_{2n+2}, F_{n+2})`, which satisfies `F_n^2 + F_{2n+2} = F_{n+2}^2`.
pub fn fibonacci_triple(n: u64) -> Result<(BigUint, BigUint, BigUint), TripleError> {
    if n < 3 {
        return Err(TripleError::InvalidParameter(
            "fibonacci triple requires n >= 3".into(),
        ));
    }
    let (a, b, c) = (fibonacci(n), fibonacci(2 * n + 2), fibonacci(n + 2));
    assert_eq!(
        &a * &a + &b,
        &c * &c,
        "Fibonacci identity failed at n = {n}"
    );
    Ok((a, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn legs(t: &Triple) -> (BigUint, BigUint, BigUint) {
        (t.u.clone(), t.v.clone(), t.w.clone())
    }

    #[test]
    fn pq_examples() {
        assert_eq!(
            legs(&primitive_from_pq(&b(2), &b(1)).unwrap()),
            (b(3), b(4), b(5))
        );
        assert_eq!(
            legs(&primitive_from_pq(&b(10), &b(1)).unwrap()),
            (b(99), b(20), b(101))
        );
        assert_eq!(
            legs(&primitive_from_pq(&b(5), &b(2)).unwrap()),
            (b(21), b(20), b(29))
        );
    }

    #[test]
    fn pq_rejections_name_the_condition() {
        let cases = [
            (3, 1, "opposite parity"),
            (6, 4, "gcd"),
            (2, 2, "exceed"),
            (1, 2, "exceed"),
            (2, 0, "at least 1"),
        ];
        for (p, q, needle) in cases {
            match primitive_from_pq(&b(p), &b(q)) {
                Err(TripleError::NonPrimitiveParameters { condition, .. }) => {
                    assert!(condition.contains(needle), "{p},{q}: {condition}")
                }
                other => panic!("{p},{q}: {other:?}"),
            }
        }
    }

    #[test]
    fn named_families() {
        assert_eq!(
            legs(&jesmanowicz_family(&b(1)).unwrap()),
            (b(3), b(4), b(5))
        );
        assert_eq!(
            legs(&jesmanowicz_family(&b(2)).unwrap()),
            (b(5), b(12), b(13))
        );
        assert_eq!(
            legs(&jesmanowicz_family(&b(5)).unwrap()),
            (b(11), b(60), b(61))
        );
        assert_eq!(legs(&lu_family(&b(1)).unwrap()), (b(3), b(4), b(5)));
        assert_eq!(legs(&lu_family(&b(2)).unwrap()), (b(15), b(8), b(17)));
        assert_eq!(legs(&lu_family(&b(5)).unwrap()), (b(99), b(20), b(101)));
        assert_eq!(legs(&fermat_family(1).unwrap()), (b(3), b(4), b(5)));
        assert_eq!(legs(&fermat_family(2).unwrap()), (b(15), b(8), b(17)));
        assert_eq!(legs(&fermat_family(3).unwrap()), (b(255), b(32), b(257)));
        assert!(jesmanowicz_family(&b(0)).is_err());
        assert!(lu_family(&b(0)).is_err());
        assert!(fermat_family(0).is_err());
    }

    #[test]
    fn fibonacci_triples() {
        assert_eq!(fibonacci_triple(3).unwrap(), (b(2), b(21), b(5)));
        assert_eq!(fibonacci_triple(4).unwrap(), (b(3), b(55), b(8)));
        assert_eq!(fibonacci_triple(5).unwrap(), (b(5), b(144), b(13)));
        assert!(fibonacci_triple(2).is_err());
    }

    #[test]
    fn construction_checks_pythagoras() {
        assert!(Triple::from_u64(3, 4, 6).is_err());
        assert!(Triple::from_u64(20, 99, 101).unwrap().is_primitive());
        assert!(!Triple::from_u64(6, 8, 10).unwrap().is_primitive());
    }

    #[test]
    fn fermat_matches_lu() {
        for n in 1..=4u32 {
            let m = BigUint::one() << ((1usize << (n - 1)) - 1);
            assert!(fermat_family(n)
                .unwrap()
                .same_up_to_leg_order(&lu_family(&m).unwrap()));
        }
    }
}
