#![allow(dead_code)]

pub mod mutations;

use std::path::PathBuf;

use num_bigint::BigUint;
use num_traits::{One, Pow};

use jesma::search::{EquationInstance, ExponentSolution, Form};

/// Naive 3-D scan: every `(x, y, z)` with `x <= x_max`, `y <= y_max` and
/// `z <= z_max` is substituted directly.
pub fn brute_force(
    inst: &EquationInstance,
    x_max: u64,
    y_max: u64,
    z_max: u64,
) -> Vec<ExponentSolution> {
    let mut out = Vec::new();
    for x in 1..=x_max {
        for y in 1..=y_max {
            let lhs = match inst.form {
                Form::PythagExp | Form::GeneralExp => Pow::pow(&inst.a, x) + Pow::pow(&inst.b, y),
                Form::Terai => unreachable!("the terai form scans x^2, not a^x"),
                Form::Eisenstein => {
                    let ax: BigUint = Pow::pow(&inst.a, x);
                    let by: BigUint = Pow::pow(&inst.b, y);
                    &ax * &ax + &ax * &by + &by * &by
                }
            };
            let mut cz = BigUint::one();
            for z in 1..=z_max {
                cz *= &inst.c;
                if cz == lhs {
                    out.push(ExponentSolution::new(x, y, z));
                }
                if cz > lhs {
                    break;
                }
            }
        }
    }
    out
}

/// Largest `z` for which `c^z` can equal a sum bounded by the exponent bounds.
pub fn z_bound(inst: &EquationInstance, x_max: u64, y_max: u64) -> u64 {
    let a: BigUint = Pow::pow(&inst.a, x_max);
    let b: BigUint = Pow::pow(&inst.b, y_max);
    let top = match inst.form {
        Form::Eisenstein => (&a + &b) * (&a + &b),
        _ => a + b,
    };
    let mut z = 0;
    let mut cz = BigUint::one();
    while cz <= top {
        cz *= &inst.c;
        z += 1;
    }
    z
}

pub fn powmod(b: u64, mut e: u64, m: u64) -> u64 {
    let (mut acc, mut b) = (1u128 % m as u128, (b % m) as u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    acc as u64
}

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn sol(x: u64, y: u64, z: u64) -> ExponentSolution {
    ExponentSolution::new(x, y, z)
}
