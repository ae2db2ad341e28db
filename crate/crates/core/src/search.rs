//! Bounded exhaustive search, the ground truth for every other module.
//!
//! Each search is a scan over the two free exponents; the third is
//! recovered exactly from the sum by repeated division. Rows of the grid
//! run in parallel and results are merged into a sorted list.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{exact_sqrt, is_perfect_power_of};
use crate::triples::Triple;

/// Default exponent bound for both scanned exponents.
pub const DEFAULT_BOUND: u64 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    /// A base of 1 makes every exponent of that term free.
    #[error(
        "degenerate base {position} = {value}: with a base of 1 the equation has infinite parametric \
         solution families, as Cao observed, so it is not searched"
    )]
    DegenerateBase {
        position: &'static str,
        value: String,
    },
    #[error("exponent bounds must be at least 1")]
    InvalidBound,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("solution {solution} does not satisfy {instance}")]
    VerificationFailed { instance: String, solution: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    /// `(kU)^x + (kV)^y = (kW)^z`.
    PythagExp,
    /// `a^x + b^y = c^z`.
    GeneralExp,
    /// `x^2 + b^m = c^n`; solutions are stored as `(x, m, n)`.
    Terai,
    /// `a^(2x) + a^x b^y + b^(2y) = c^z`.
    Eisenstein,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::PythagExp => "pythag-exp",
            Form::GeneralExp => "general-exp",
            Form::Terai => "terai",
            Form::Eisenstein => "eisenstein",
        })
    }
}

/// A concrete equation. For `pythag-exp` the bases are already scaled by
/// `k`; for `terai` the first base is unused and stored as 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationInstance {
    pub form: Form,
    #[serde(with = "crate::serde_dec")]
    pub a: BigUint,
    #[serde(with = "crate::serde_dec")]
    pub b: BigUint,
    #[serde(with = "crate::serde_dec")]
    pub c: BigUint,
    #[serde(with = "crate::serde_dec")]
    pub k: BigUint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<Triple>,
    #[serde(default)]
    pub provenance: String,
}

fn check_base(position: &'static str, value: &BigUint) -> Result<(), SearchError> {
    if *value <= BigUint::one() {
        Err(SearchError::DegenerateBase {
            position,
            value: value.to_string(),
        })
    } else {
        Ok(())
    }
}

impl EquationInstance {
    pub fn general(a: BigUint, b: BigUint, c: BigUint) -> Result<Self, SearchError> {
        check_base("a", &a)?;
        check_base("b", &b)?;
        check_base("c", &c)?;
        Ok(EquationInstance {
            form: Form::GeneralExp,
            a,
            b,
            c,
            k: BigUint::one(),
            triple: None,
            provenance: String::new(),
        })
    }

    pub fn scaled(t: &Triple, k: &BigUint) -> Result<Self, SearchError> {
        if k.is_zero() {
            return Err(SearchError::InvalidInstance(
                "scale k must be at least 1".into(),
            ));
        }
        let (a, b, c) = (k * &t.u, k * &t.v, k * &t.w);
        check_base("kU", &a)?;
        check_base("kV", &b)?;
        check_base("kW", &c)?;
        Ok(EquationInstance {
            form: Form::PythagExp,
            a,
            b,
            c,
            k: k.clone(),
            triple: Some(t.clone()),
            provenance: String::new(),
        })
    }

    pub fn terai(b: BigUint, c: BigUint) -> Result<Self, SearchError> {
        check_base("b", &b)?;
        check_base("c", &c)?;
        Ok(EquationInstance {
            form: Form::Terai,
            a: BigUint::zero(),
            b,
            c,
            k: BigUint::one(),
            triple: None,
            provenance: String::new(),
        })
    }

    pub fn eisenstein(a: BigUint, b: BigUint, c: BigUint) -> Result<Self, SearchError> {
        check_base("a", &a)?;
        check_base("b", &b)?;
        check_base("c", &c)?;
        if &a * &a + &a * &b + &b * &b != &c * &c {
            return Err(SearchError::InvalidInstance(format!(
                "({a}, {b}, {c}) violates a^2 + ab + b^2 = c^2"
            )));
        }
        Ok(EquationInstance {
            form: Form::Eisenstein,
            a,
            b,
            c,
            k: BigUint::one(),
            triple: None,
            provenance: String::new(),
        })
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Exact substitution check.
    pub fn holds(&self, s: &ExponentSolution) -> bool {
        if s.x == 0 || s.y == 0 || s.z == 0 {
            return false;
        }
        match self.form {
            Form::PythagExp | Form::GeneralExp => {
                Pow::pow(&self.a, s.x) + Pow::pow(&self.b, s.y) == Pow::pow(&self.c, s.z)
            }
            Form::Terai => {
                let x = BigUint::from(s.x);
                &x * &x + Pow::pow(&self.b, s.y) == Pow::pow(&self.c, s.z)
            }
            Form::Eisenstein => {
                let ax = Pow::pow(&self.a, s.x);
                let by = Pow::pow(&self.b, s.y);
                &ax * &ax + &ax * &by + &by * &by == Pow::pow(&self.c, s.z)
            }
        }
    }
}

impl fmt::Display for EquationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        match self.form {
            Form::PythagExp | Form::GeneralExp => write!(f, "{a}^x + {b}^y = {c}^z"),
            Form::Terai => write!(f, "x^2 + {b}^m = {c}^n"),
            Form::Eisenstein => write!(f, "{a}^(2x) + {a}^x*{b}^y + {b}^(2y) = {c}^z"),
        }
    }
}

/// Positive exponents. For the Terai form the fields hold `(x, m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExponentSolution {
    #[serde(with = "crate::serde_dec::u64s")]
    pub x: u64,
    #[serde(with = "crate::serde_dec::u64s")]
    pub y: u64,
    #[serde(with = "crate::serde_dec::u64s")]
    pub z: u64,
}

impl ExponentSolution {
    pub fn new(x: u64, y: u64, z: u64) -> Self {
        ExponentSolution { x, y, z }
    }

    pub fn tuple(&self) -> (u64, u64, u64) {
        (self.x, self.y, self.z)
    }
}

impl From<(u64, u64, u64)> for ExponentSolution {
    fn from((x, y, z): (u64, u64, u64)) -> Self {
        ExponentSolution { x, y, z }
    }
}

impl fmt::Display for ExponentSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub instance: EquationInstance,
    /// Bounds on the first and second scanned exponents.
    #[serde(with = "crate::serde_dec::u64s")]
    pub x_max: u64,
    #[serde(with = "crate::serde_dec::u64s")]
    pub y_max: u64,
    pub solutions: Vec<ExponentSolution>,
    #[serde(with = "crate::serde_dec::u64s")]
    pub candidates: u64,
    #[serde(with = "duration_micros")]
    pub elapsed: Duration,
}

impl SearchReport {
    /// Sorts, deduplicates and re-verifies every solution.
    pub fn new(
        instance: EquationInstance,
        x_max: u64,
        y_max: u64,
        mut solutions: Vec<ExponentSolution>,
        candidates: u64,
        elapsed: Duration,
    ) -> Result<Self, SearchError> {
        solutions.sort();
        solutions.dedup();
        if let Some(bad) = solutions.iter().find(|s| !instance.holds(s)) {
            return Err(SearchError::VerificationFailed {
                instance: instance.to_string(),
                solution: bad.to_string(),
            });
        }
        Ok(SearchReport {
            instance,
            x_max,
            y_max,
            solutions,
            candidates,
            elapsed,
        })
    }

    pub fn tuples(&self) -> Vec<(u64, u64, u64)> {
        self.solutions.iter().map(ExponentSolution::tuple).collect()
    }
}

mod duration_micros {
    use std::time::Duration;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&d.as_micros().to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<u64>()
            .map(Duration::from_micros)
            .map_err(|_| D::Error::custom(format!("not a duration in microseconds: {text:?}")))
    }
}

fn check_bounds(x_max: u64, y_max: u64) -> Result<(), SearchError> {
    if x_max == 0 || y_max == 0 {
        Err(SearchError::InvalidBound)
    } else {
        Ok(())
    }
}

fn powers(base: &BigUint, max: u64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(max as usize);
    let mut p = base.clone();
    for _ in 0..max {
        let next = &p * base;
        out.push(std::mem::replace(&mut p, next));
    }
    out
}

/// Scans `(i, j)` in `[1, i_max] x [1, j_max]`; `third` maps the two
/// precomputed powers to the recovered third exponent, if any.
fn scan<F>(row: &BigUint, col: &BigUint, i_max: u64, j_max: u64, third: F) -> Vec<ExponentSolution>
where
    F: Fn(&BigUint, &BigUint) -> Option<u64> + Sync,
{
    let cols = powers(col, j_max);
    (1..=i_max)
        .into_par_iter()
        .flat_map_iter(|i| {
            let ri = Pow::pow(row, i);
            cols.iter()
                .enumerate()
                .filter_map(|(j, cj)| {
                    third(&ri, cj).map(|z| ExponentSolution::new(i, j as u64 + 1, z))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn power_of(s: &BigUint, c: &BigUint) -> Option<u64> {
    is_perfect_power_of(s, c).ok().flatten().map(u64::from)
}

/// All `(x, y, z)` with `1 <= x <= x_max`, `1 <= y <= y_max` and
/// `a^x + b^y = c^z`.
pub fn find_solutions(
    a: &BigUint,
    b: &BigUint,
    c: &BigUint,
    x_max: u64,
    y_max: u64,
) -> Result<SearchReport, SearchError> {
    let instance = EquationInstance::general(a.clone(), b.clone(), c.clone())?;
    run_exp(instance, x_max, y_max)
}

/// `find_solutions` on the bases `(kU, kV, kW)`.
pub fn find_solutions_scaled(
    t: &Triple,
    k: &BigUint,
    x_max: u64,
    y_max: u64,
) -> Result<SearchReport, SearchError> {
    let instance = EquationInstance::scaled(t, k)?;
    run_exp(instance, x_max, y_max)
}

/// Runs the search matching the instance's form.
pub fn run_instance(
    instance: EquationInstance,
    x_max: u64,
    y_max: u64,
) -> Result<SearchReport, SearchError> {
    match instance.form {
        Form::PythagExp | Form::GeneralExp => run_exp(instance, x_max, y_max),
        Form::Terai => run_terai(instance, x_max, y_max),
        Form::Eisenstein => run_eisenstein(instance, x_max, y_max),
    }
}

fn run_exp(
    instance: EquationInstance,
    x_max: u64,
    y_max: u64,
) -> Result<SearchReport, SearchError> {
    check_bounds(x_max, y_max)?;
    let start = Instant::now();
    let c = instance.c.clone();
    let sols = scan(&instance.a, &instance.b, x_max, y_max, |ax, by| {
        power_of(&(ax + by), &c)
    });
    SearchReport::new(instance, x_max, y_max, sols, x_max * y_max, start.elapsed())
}

/// All `(x, m, n)` with `x >= 1`, `m <= m_max`, `n <= n_max` and
/// `x^2 + b^m = c^n`.
pub fn find_terai_solutions(
    b: &BigUint,
    c: &BigUint,
    m_max: u64,
    n_max: u64,
) -> Result<SearchReport, SearchError> {
    let instance = EquationInstance::terai(b.clone(), c.clone())?;
    run_terai(instance, m_max, n_max)
}

fn run_terai(
    instance: EquationInstance,
    m_max: u64,
    n_max: u64,
) -> Result<SearchReport, SearchError> {
    check_bounds(m_max, n_max)?;
    let start = Instant::now();
    let raw = scan(&instance.b, &instance.c, m_max, n_max, |bm, cn| {
        if cn <= bm {
            return None;
        }
        exact_sqrt(&(cn - bm)).and_then(|x| u64::try_from(&x).ok())
    });
    // scan yields (m, n, x); store as (x, m, n)
    let sols = raw
        .into_iter()
        .map(|s| ExponentSolution::new(s.z, s.x, s.y))
        .collect();
    SearchReport::new(instance, m_max, n_max, sols, m_max * n_max, start.elapsed())
}

/// All `(x, y, z)` in bounds with `a^(2x) + a^x b^y + b^(2y) = c^z`;
/// requires `a^2 + ab + b^2 = c^2`.
pub fn find_eisenstein_solutions(
    a: &BigUint,
    b: &BigUint,
    c: &BigUint,
    x_max: u64,
    y_max: u64,
) -> Result<SearchReport, SearchError> {
    let instance = EquationInstance::eisenstein(a.clone(), b.clone(), c.clone())?;
    run_eisenstein(instance, x_max, y_max)
}

fn run_eisenstein(
    instance: EquationInstance,
    x_max: u64,
    y_max: u64,
) -> Result<SearchReport, SearchError> {
    check_bounds(x_max, y_max)?;
    let start = Instant::now();
    let c = instance.c.clone();
    let sols = scan(&instance.a, &instance.b, x_max, y_max, |ax, by| {
        power_of(&(ax * ax + ax * by + by * by), &c)
    });
    SearchReport::new(instance, x_max, y_max, sols, x_max * y_max, start.elapsed())
}
