//! Search, congruence sieving and proof certificates for exponential
//! Diophantine equations of the shape `(kU)^x + (kV)^y = (kW)^z` with
//! `U^2 + V^2 = W^2`, and the related families `a^x + b^y = c^z`,
//! `x^2 + b^m = c^n` and `a^(2x) + a^x b^y + b^(2y) = c^z`.
//!
//! - [`arith`]: exact number theory primitives.
//! - [`triples`]: Pythagorean triple families.
//! - [`search`]: bounded exhaustive solution search, the ground truth.
//! - [`reduction`]: ordering classes, solution filters and k-valuation factoring.
//! - [`sieve`]: exponential congruence enumeration and killing moduli.
//! - [`certificate`]: case-tree proof objects and their verifier.
//! - [`cli`]: command-line front end, corpus runner and JSON reports.

pub mod arith;
pub mod certificate;
pub mod cli;
pub mod expr;
pub mod params;
pub mod reduction;
pub mod search;
pub mod sieve;
pub mod triples;

/// Serde adapter writing unbounded integers as decimal strings.
pub mod serde_dec {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        BigUint::parse_bytes(text.trim().as_bytes(), 10)
            .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {text:?}")))
    }

    /// Same, for machine integers.
    pub mod u64s {
        use serde::{de::Error, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(n: &u64, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&n.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
            let text = String::deserialize(d)?;
            text.trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("not a decimal integer: {text:?}")))
        }
    }

    pub mod u64_vec {
        use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(ns: &[u64], s: S) -> Result<S::Ok, S::Error> {
            let text: Vec<String> = ns.iter().map(u64::to_string).collect();
            text.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
            let text = Vec::<String>::deserialize(d)?;
            text.iter()
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| D::Error::custom(format!("not a decimal integer: {t:?}")))
                })
                .collect()
        }
    }
}
