//! Exact integer number theory: modular powers, multiplicative orders,
//! valuations, radicals, factorization and perfect-power tests.
//!
//! Everything here works on unbounded integers (`BigUint`) except the
//! `*_u64` helpers, which the congruence sieve uses for its small moduli.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(String),
    #[error("{a} is not a unit modulo {m}")]
    NotAUnit { a: String, m: String },
    #[error("valuation of 0 is undefined")]
    UndefinedValuation,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// Trial division bound used by [`factorize`] before switching to Pollard rho.
pub const TRIAL_DIVISION_BOUND: u32 = 1_000_000;

/// Miller-Rabin rounds used above 2^64.
pub const PROBABLE_PRIME_ROUNDS: usize = 40;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_BOUND))
}

/// Sieve of Eratosthenes, inclusive bound.
pub fn primes_up_to(bound: u32) -> Vec<u32> {
    let n = bound as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn modpow(base: &BigUint, exp: &BigUint, m: &BigUint) -> Result<BigUint, ArithError> {
    if *m < BigUint::from(2u32) {
        return Err(ArithError::InvalidModulus(m.to_string()));
    }
    Ok(base.modpow(exp, m))
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` on machine words. `m` must be at least 1.
pub fn modpow_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mulmod(result, b, m);
        }
        b = mulmod(b, b, m);
        exp >>= 1;
    }
    result
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Euler's totient of a machine word.
pub fn totient_u64(m: u64) -> u64 {
    factorize_u64(m)
        .into_iter()
        .fold(1u64, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// Least `d > 0` with `a^d = 1 (mod m)`.
///
/// Computed by factoring the totient and stripping prime factors from it
/// while the power stays 1.
pub fn mult_order(a: u64, m: u64) -> Result<u64, ArithError> {
    if m < 2 {
        return Err(ArithError::InvalidModulus(m.to_string()));
    }
    if gcd_u64(a % m, m) != 1 {
        return Err(ArithError::NotAUnit {
            a: a.to_string(),
            m: m.to_string(),
        });
    }
    let phi = totient_u64(m);
    let mut order = phi;
    for (p, _) in factorize_u64(phi) {
        while order.is_multiple_of(p) && modpow_u64(a, order / p, m) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// Returns `(e, cofactor)` with `p^e * cofactor = n` and `p` not dividing the cofactor.
pub fn valuation(p: &BigUint, n: &BigUint) -> Result<(u64, BigUint), ArithError> {
    if n.is_zero() {
        return Err(ArithError::UndefinedValuation);
    }
    if *p < BigUint::from(2u32) {
        return Err(ArithError::InvalidArgument(
            "valuation base must be a prime",
        ));
    }
    let mut e = 0u64;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            break;
        }
        rest = q;
        e += 1;
    }
    Ok((e, rest))
}

/// Product of the distinct primes dividing `k` (the squarefree kernel).
pub fn radical(k: &BigUint) -> Result<BigUint, ArithError> {
    if k.is_zero() {
        return Err(ArithError::InvalidArgument("radical of 0 is undefined"));
    }
    Ok(factorize(k)
        .pairs()
        .iter()
        .fold(BigUint::one(), |acc, (p, _)| acc * p))
}

/// Prime factorization, sorted ascending by prime.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pairs: Vec<(BigUint, u64)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(BigUint, u64)] {
        &self.pairs
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.pairs.iter().map(|(p, _)| p)
    }

    pub fn exponent_of(&self, p: &BigUint) -> u64 {
        self.pairs
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn value(&self) -> BigUint {
        self.pairs
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e as u32))
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn from_unsorted(mut primes: Vec<BigUint>) -> Self {
        primes.sort();
        let mut pairs: Vec<(BigUint, u64)> = Vec::new();
        for p in primes {
            match pairs.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => pairs.push((p, 1)),
            }
        }
        Factorization { pairs }
    }
}

pub fn factorize(n: &BigUint) -> Factorization {
    let mut primes = Vec::new();
    if n.is_zero() {
        return Factorization::default();
    }
    let mut rest = n.clone();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            primes.push(pb.clone());
            rest = q;
        }
    }
    if !rest.is_one() {
        split_large(rest, &mut primes);
    }
    Factorization::from_unsorted(primes)
}

/// Factorization of a machine word as `(prime, exponent)` pairs.
pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    factorize(&BigUint::from(n))
        .pairs
        .into_iter()
        .map(|(p, e)| (p.to_u64().expect("factor of u64 fits"), e as u32))
        .collect()
}

// `n` has no prime factor below the trial division bound.
fn split_large(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    let d = match n.to_u64() {
        Some(small) => BigUint::from(rho_u64(small)),
        None => rho_big(&n),
    };
    split_large(&n / &d, out);
    split_large(d, out);
}

const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES_U64 {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES_U64 {
        let mut x = modpow_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality: deterministic below 2^64, Miller-Rabin with
/// [`PROBABLE_PRIME_ROUNDS`] fixed prime witnesses above.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in small_primes().iter().take(PROBABLE_PRIME_ROUNDS) {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant; `n` is odd and composite.
fn rho_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut power = 1u64;
        let mut lam = 1u64;
        while g == 1 {
            if power == lam {
                x = y;
                power *= 2;
                lam = 0;
            }
            y = f(y);
            lam += 1;
            g = gcd_u64(x.abs_diff(y), n);
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = one.clone();
        while g.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

/// Returns `z >= 1` with `base^z = s`, found by repeated exact division.
pub fn is_perfect_power_of(s: &BigUint, base: &BigUint) -> Result<Option<u32>, ArithError> {
    if s.is_zero() {
        return Err(ArithError::InvalidArgument("perfect power test of 0"));
    }
    if *base < BigUint::from(2u32) {
        return Err(ArithError::InvalidArgument(
            "perfect power base must be at least 2",
        ));
    }
    let mut rest = s.clone();
    let mut z = 0u32;
    while !rest.is_one() {
        let (q, r) = rest.div_rem(base);
        if !r.is_zero() {
            return Ok(None);
        }
        rest = q;
        z += 1;
    }
    Ok(if z == 0 { None } else { Some(z) })
}

/// Exact integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}
