//! Symbolic exponent polynomials and exponential monomials.
//!
//! A [`Poly`] is an integer polynomial in named non-negative integer
//! variables (`x`, `r`, `z1`, ...). It is used for exponents such as
//! `r*(y - z)`. An [`ExpMonomial`] is a product `b1^e1 * b2^e2 * ...` of
//! integer bases raised to polynomial exponents, and an [`ExpEquation`]
//! states that two sums of monomials are equal.
//!
//! Textual forms are canonical: `Display` output parses back to an equal
//! value, which is what the certificate format relies on.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("negative exponent {0} in exact evaluation")]
    NegativeExponent(i128),
    #[error("integer overflow in exponent arithmetic")]
    Overflow,
}

/// Integer polynomial over named variables. Keys are sorted variable
/// multisets; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<String>, i64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![name.to_string()], 1);
        p
    }

    fn add_term(&mut self, mut key: Vec<String>, c: i64) {
        if c == 0 {
            return;
        }
        key.sort();
        let entry = self.terms.entry(key.clone()).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[String], i64)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> i64 {
        self.terms.get(&Vec::new()).copied().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<i64> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms.keys().flatten().cloned().collect()
    }

    /// Coefficient of a single variable in a polynomial of degree at most one.
    pub fn linear_coeff(&self, var: &str) -> i64 {
        self.terms.get(&vec![var.to_string()]).copied().unwrap_or(0)
    }

    pub fn scale(&self, k: i64) -> Poly {
        let mut out = Poly::zero();
        for (key, c) in &self.terms {
            out.add_term(key.clone(), c * k);
        }
        out
    }

    /// Exact division by an integer, if every coefficient is divisible.
    pub fn div_exact(&self, k: i64) -> Option<Poly> {
        if k == 0 || self.terms.values().any(|c| c % k != 0) {
            return None;
        }
        let mut out = Poly::zero();
        for (key, c) in &self.terms {
            out.add_term(key.clone(), c / k);
        }
        Some(out)
    }

    pub fn substitute(&self, var: &str, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (key, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for v in key {
                if v == var {
                    term = &term * value;
                } else {
                    term = &term * &Poly::var(v);
                }
            }
            out = &out + &term;
        }
        out
    }

    pub fn substitute_all(&self, map: &BTreeMap<String, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (key, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for v in key {
                let factor = map.get(v).cloned().unwrap_or_else(|| Poly::var(v));
                term = &term * &factor;
            }
            out = &out + &term;
        }
        out
    }

    pub fn eval(&self, values: &HashMap<String, i128>) -> Result<i128, ExprError> {
        let mut total: i128 = 0;
        for (key, c) in &self.terms {
            let mut t = *c as i128;
            for v in key {
                let x = values.get(v).ok_or_else(|| ExprError::Unbound(v.clone()))?;
                t = t.checked_mul(*x).ok_or(ExprError::Overflow)?;
            }
            total = total.checked_add(t).ok_or(ExprError::Overflow)?;
        }
        Ok(total)
    }

    /// Value modulo `m` given residues of the variables; only meaningful
    /// when every variable is known modulo a multiple of `m`.
    pub fn eval_mod(&self, values: &HashMap<String, u64>, m: u64) -> u64 {
        let m128 = m as i128;
        let mut total: i128 = 0;
        for (key, c) in &self.terms {
            let mut t = (*c as i128).rem_euclid(m128);
            for v in key {
                let x = values[v] as i128 % m128;
                t = t * x % m128;
            }
            total = (total + t) % m128;
        }
        total.rem_euclid(m128) as u64
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (key, c) in &rhs.terms {
            out.add_term(key.clone(), *c);
        }
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let mut key = ka.clone();
                key.extend(kb.iter().cloned());
                out.add_term(key, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Vec<String>> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        for (i, key) in keys.into_iter().enumerate() {
            let c = self.terms[key];
            let (neg, mag) = (c < 0, c.unsigned_abs());
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if key.is_empty() {
                write!(f, "{mag}")?;
            } else {
                if mag != 1 {
                    write!(f, "{mag}*")?;
                }
                write!(f, "{}", key.join("*"))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, ExprError> {
        let mut p = Parser::new(s);
        let out = p.poly()?;
        p.finish()?;
        Ok(out)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// `∏ base^exponent` with integer bases `>= 2`. Base 1 and zero exponents
/// are dropped; repeated bases are merged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExpMonomial {
    factors: BTreeMap<BigUint, Poly>,
}

impl ExpMonomial {
    pub fn one() -> Self {
        ExpMonomial::default()
    }

    pub fn power(base: impl Into<BigUint>, exponent: Poly) -> Self {
        let mut m = ExpMonomial::one();
        m.mul_factor(base.into(), exponent);
        m
    }

    pub fn constant(c: impl Into<BigUint>) -> Self {
        ExpMonomial::power(c, Poly::constant(1))
    }

    pub fn mul_factor(&mut self, base: BigUint, exponent: Poly) {
        if base.is_one() || exponent.is_zero() {
            return;
        }
        let merged = match self.factors.remove(&base) {
            Some(e) => &e + &exponent,
            None => exponent,
        };
        if !merged.is_zero() {
            self.factors.insert(base, merged);
        }
    }

    pub fn factors(&self) -> impl Iterator<Item = (&BigUint, &Poly)> {
        self.factors.iter()
    }

    pub fn exponent_of(&self, base: &BigUint) -> Poly {
        self.factors.get(base).cloned().unwrap_or_default()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn mul(&self, other: &ExpMonomial) -> ExpMonomial {
        let mut out = self.clone();
        for (b, e) in &other.factors {
            out.mul_factor(b.clone(), e.clone());
        }
        out
    }

    pub fn pow(&self, k: i64) -> ExpMonomial {
        let mut out = ExpMonomial::one();
        for (b, e) in &self.factors {
            out.mul_factor(b.clone(), e.scale(k));
        }
        out
    }

    /// Rewrites every base as a product of primes.
    pub fn canonical(&self) -> ExpMonomial {
        let mut out = ExpMonomial::one();
        for (b, e) in &self.factors {
            for (p, k) in arith::factorize(b).pairs() {
                out.mul_factor(p.clone(), e.scale(*k as i64));
            }
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.factors.values().flat_map(Poly::vars).collect()
    }

    pub fn substitute(&self, var: &str, value: &Poly) -> ExpMonomial {
        let mut out = ExpMonomial::one();
        for (b, e) in &self.factors {
            out.mul_factor(b.clone(), e.substitute(var, value));
        }
        out
    }

    pub fn substitute_all(&self, map: &BTreeMap<String, Poly>) -> ExpMonomial {
        let mut out = ExpMonomial::one();
        for (b, e) in &self.factors {
            out.mul_factor(b.clone(), e.substitute_all(map));
        }
        out
    }

    pub fn eval(&self, values: &HashMap<String, i128>) -> Result<BigUint, ExprError> {
        let mut acc = BigUint::one();
        for (b, e) in &self.factors {
            let k = e.eval(values)?;
            if k < 0 {
                return Err(ExprError::NegativeExponent(k));
            }
            let k = u32::try_from(k).map_err(|_| ExprError::Overflow)?;
            acc *= b.pow(k);
        }
        Ok(acc)
    }
}

impl fmt::Display for ExpMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (b, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            match e.as_constant() {
                Some(1) => write!(f, "{b}")?,
                Some(c) if c >= 0 => write!(f, "{b}^{c}")?,
                _ => {
                    let vars = e.vars();
                    if e.terms.len() == 1
                        && e.degree() == 1
                        && e.linear_coeff(vars.iter().next().unwrap()) == 1
                    {
                        write!(f, "{b}^{e}")?
                    } else {
                        write!(f, "{b}^({e})")?
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for ExpMonomial {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, ExprError> {
        let mut p = Parser::new(s);
        let out = p.monomial()?;
        p.finish()?;
        Ok(out)
    }
}

impl Serialize for ExpMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExpMonomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Sum of monomials with signs, as written in `101^z - 1 - 99^y*2^a`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignedSum {
    pub terms: Vec<(bool, ExpMonomial)>,
}

impl SignedSum {
    /// Splits into (positive side, negated negative side), so that the
    /// signed sum vanishing is the equation `lhs = rhs`.
    pub fn into_equation(self) -> ExpEquation {
        let mut eq = ExpEquation::default();
        for (negative, m) in self.terms {
            if negative {
                eq.rhs.push(m);
            } else {
                eq.lhs.push(m);
            }
        }
        eq
    }
}

impl SignedSum {
    /// All-positive sum of the given monomials.
    pub fn positive(side: &[ExpMonomial]) -> Self {
        SignedSum {
            terms: side.iter().map(|m| (false, m.clone())).collect(),
        }
    }
}

impl fmt::Display for SignedSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, m)) in self.terms.iter().enumerate() {
            match (i, neg) {
                (0, false) => write!(f, "{m}")?,
                (0, true) => write!(f, "-{m}")?,
                (_, false) => write!(f, " + {m}")?,
                (_, true) => write!(f, " - {m}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for SignedSum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignedSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for SignedSum {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, ExprError> {
        let mut p = Parser::new(s);
        let out = p.signed_sum()?;
        p.finish()?;
        Ok(out)
    }
}

/// `Σ lhs = Σ rhs` over positive monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExpEquation {
    pub lhs: Vec<ExpMonomial>,
    pub rhs: Vec<ExpMonomial>,
}

impl ExpEquation {
    pub fn new(lhs: Vec<ExpMonomial>, rhs: Vec<ExpMonomial>) -> Self {
        ExpEquation { lhs, rhs }
    }

    /// Prime bases, sorted sides. Two equations stating the same thing in
    /// the same orientation have equal canonical forms.
    pub fn canonical(&self) -> ExpEquation {
        let side = |s: &[ExpMonomial]| {
            let mut v: Vec<ExpMonomial> = s.iter().map(ExpMonomial::canonical).collect();
            v.sort();
            v
        };
        ExpEquation {
            lhs: side(&self.lhs),
            rhs: side(&self.rhs),
        }
    }

    pub fn same_statement(&self, other: &ExpEquation) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a == b || (a.lhs == b.rhs && a.rhs == b.lhs)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.lhs
            .iter()
            .chain(&self.rhs)
            .flat_map(ExpMonomial::vars)
            .collect()
    }

    pub fn substitute(&self, var: &str, value: &Poly) -> ExpEquation {
        ExpEquation {
            lhs: self.lhs.iter().map(|m| m.substitute(var, value)).collect(),
            rhs: self.rhs.iter().map(|m| m.substitute(var, value)).collect(),
        }
    }

    /// Signed terms with the right side negated: the equation is `Σ = 0`.
    pub fn signed_terms(&self) -> Vec<(bool, ExpMonomial)> {
        self.lhs
            .iter()
            .map(|m| (false, m.clone()))
            .chain(self.rhs.iter().map(|m| (true, m.clone())))
            .collect()
    }

    pub fn holds_at(&self, values: &HashMap<String, i128>) -> Result<bool, ExprError> {
        let sum = |side: &[ExpMonomial]| -> Result<BigUint, ExprError> {
            side.iter()
                .try_fold(BigUint::zero(), |acc, m| Ok(acc + m.eval(values)?))
        };
        Ok(sum(&self.lhs)? == sum(&self.rhs)?)
    }
}

fn fmt_side(side: &[ExpMonomial], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if side.is_empty() {
        return write!(f, "0");
    }
    for (i, m) in side.iter().enumerate() {
        if i > 0 {
            write!(f, " + ")?;
        }
        write!(f, "{m}")?;
    }
    Ok(())
}

impl fmt::Display for ExpEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_side(&self.lhs, f)?;
        write!(f, " = ")?;
        fmt_side(&self.rhs, f)
    }
}

impl FromStr for ExpEquation {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, ExprError> {
        let mut p = Parser::new(s);
        let left = p.signed_sum()?;
        p.expect('=')?;
        let right = p.signed_sum()?;
        p.finish()?;
        let mut eq = ExpEquation::default();
        for (neg, m) in left.terms {
            if neg {
                eq.rhs.push(m)
            } else {
                eq.lhs.push(m)
            }
        }
        for (neg, m) in right.terms {
            if neg {
                eq.lhs.push(m)
            } else {
                eq.rhs.push(m)
            }
        }
        Ok(eq)
    }
}

impl Serialize for ExpEquation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExpEquation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser {
            src: s.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src.get(self.pos).map(|&c| c as char)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn finish(&mut self) -> Result<(), ExprError> {
        if self.peek().is_some() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn integer(&mut self) -> Result<BigUint, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse"))
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            Some(String::from_utf8(self.src[start..self.pos].to_vec()).expect("ascii ident"))
        } else {
            None
        }
    }

    fn small_integer(&mut self) -> Result<i64, ExprError> {
        let n = self.integer()?;
        n.to_i64()
            .map_or_else(|| self.err("coefficient too large"), Ok)
    }

    fn poly(&mut self) -> Result<Poly, ExprError> {
        let mut negative = self.eat('-');
        let mut acc = Poly::zero();
        loop {
            let t = self.poly_term()?;
            acc = if negative { &acc - &t } else { &acc + &t };
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn poly_term(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.poly_atom()?;
        while self.eat('*') {
            acc = &acc * &self.poly_atom()?;
        }
        Ok(acc)
    }

    fn poly_atom(&mut self) -> Result<Poly, ExprError> {
        if self.eat('(') {
            let p = self.poly()?;
            self.expect(')')?;
            return Ok(p);
        }
        if let Some(name) = self.ident() {
            return Ok(Poly::var(&name));
        }
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Poly::constant(self.small_integer()?)),
            _ => self.err("expected variable, integer or '('"),
        }
    }

    fn monomial(&mut self) -> Result<ExpMonomial, ExprError> {
        let mut m = ExpMonomial::one();
        loop {
            let base = self.integer()?;
            let exponent = if self.eat('^') {
                if self.eat('(') {
                    let p = self.poly()?;
                    self.expect(')')?;
                    p
                } else if let Some(name) = self.ident() {
                    Poly::var(&name)
                } else {
                    Poly::constant(self.small_integer()?)
                }
            } else {
                Poly::constant(1)
            };
            if base.is_zero() {
                return self.err("base 0 is not allowed");
            }
            m.mul_factor(base, exponent);
            if !self.eat('*') {
                return Ok(m);
            }
        }
    }

    fn signed_sum(&mut self) -> Result<SignedSum, ExprError> {
        let mut out = SignedSum::default();
        let mut negative = self.eat('-');
        loop {
            out.terms.push((negative, self.monomial()?));
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                return Ok(out);
            }
        }
    }
}
