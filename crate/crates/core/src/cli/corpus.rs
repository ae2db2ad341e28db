//! Regression corpus: equation instances with their expected solution sets.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::search::{run_instance, EquationInstance, ExponentSolution, Form};
use crate::triples::{fermat_family, jesmanowicz_family, lu_family, primitive_from_pq, Triple};

/// Generator of a Pythagorean triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Explicit {
        #[serde(with = "crate::serde_dec")]
        u: BigUint,
        #[serde(with = "crate::serde_dec")]
        v: BigUint,
        #[serde(with = "crate::serde_dec")]
        w: BigUint,
    },
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
        #[serde(with = "crate::serde_dec::u64s")]
        n: u64,
    },
}

impl FamilySpec {
    pub fn triple(&self) -> Result<Triple, String> {
        let t = match self {
            FamilySpec::Explicit { u, v, w } => Triple::new(u.clone(), v.clone(), w.clone()),
            FamilySpec::Pq { p, q } => primitive_from_pq(p, q),
            FamilySpec::Jesmanowicz { n } => jesmanowicz_family(n),
            FamilySpec::Lu { n } => lu_family(n),
            FamilySpec::Fermat { n } => fermat_family(
                u32::try_from(*n).map_err(|_| format!("fermat index {n} is too large"))?,
            ),
        };
        t.map_err(|e| e.to_string())
    }
}

/// Inclusive range of scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRange {
    #[serde(with = "crate::serde_dec::u64s")]
    pub from: u64,
    #[serde(with = "crate::serde_dec::u64s")]
    pub to: u64,
}

/// One instance, or one triple over a range of scales, with the solution
/// set every instance must have within the bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    /// Where the expected set comes from.
    pub source: String,
    pub form: Form,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    /// `[a, b, c]`, or `[b, c]` for the Terai form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<KRange>,
    #[serde(with = "crate::serde_dec::u64s")]
    pub x_max: u64,
    #[serde(with = "crate::serde_dec::u64s")]
    pub y_max: u64,
    pub expected: Vec<ExponentSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn big(s: &str) -> Result<BigUint, String> {
    s.parse()
        .map_err(|_| format!("{s:?} is not a non-negative integer"))
}

impl CorpusEntry {
    /// The instances the entry stands for, after checking that every
    /// expected solution satisfies each of them.
    pub fn instances(&self) -> Result<Vec<EquationInstance>, String> {
        let bases = || -> Result<Vec<BigUint>, String> {
            self.bases
                .as_ref()
                .ok_or("entry needs bases")?
                .iter()
                .map(|s| big(s))
                .collect()
        };
        let out = match self.form {
            Form::PythagExp => {
                let t = self
                    .family
                    .as_ref()
                    .ok_or("pythag-exp entry needs a family")?
                    .triple()?;
                let range = self.k.unwrap_or(KRange { from: 1, to: 1 });
                if range.from == 0 || range.from > range.to {
                    return Err(format!("bad k range {}..={}", range.from, range.to));
                }
                (range.from..=range.to)
                    .map(|k| {
                        EquationInstance::scaled(&t, &BigUint::from(k)).map_err(|e| e.to_string())
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            Form::GeneralExp | Form::Eisenstein => match bases()?.as_slice() {
                [a, b, c] => {
                    let i = if self.form == Form::GeneralExp {
                        EquationInstance::general(a.clone(), b.clone(), c.clone())
                    } else {
                        EquationInstance::eisenstein(a.clone(), b.clone(), c.clone())
                    };
                    vec![i.map_err(|e| e.to_string())?]
                }
                _ => return Err("entry needs three bases".into()),
            },
            Form::Terai => match bases()?.as_slice() {
                [b, c] => {
                    vec![EquationInstance::terai(b.clone(), c.clone()).map_err(|e| e.to_string())?]
                }
                _ => return Err("terai entry needs two bases [b, c]".into()),
            },
        };
        let out: Vec<EquationInstance> = out
            .into_iter()
            .map(|i| i.with_provenance(self.source.clone()))
            .collect();
        for i in &out {
            if let Some(bad) = self.expected.iter().find(|s| !i.holds(s)) {
                return Err(format!("expected solution {bad} does not satisfy {i}"));
            }
        }
        if self.x_max == 0 || self.y_max == 0 {
            return Err("bounds must be at least 1".into());
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryStatus {
    Pass,
    Fail,
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub instance: String,
    pub found: Vec<ExponentSolution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryOutcome {
    #[serde(with = "crate::serde_dec::u64s")]
    pub index: u64,
    pub name: String,
    pub status: EntryStatus,
    #[serde(with = "crate::serde_dec::u64s")]
    pub instances: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<Mismatch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(rename = "elapsed-us", with = "crate::serde_dec::u64s")]
    pub elapsed_us: u64,
}

fn micros(d: Duration) -> u64 {
    u64::try_from(d.as_micros()).unwrap_or(u64::MAX)
}

fn run_entry(index: usize, raw: &serde_json::Value) -> EntryOutcome {
    let start = Instant::now();
    let name = raw
        .get("name")
        .and_then(|n| n.as_str())
        .unwrap_or("?")
        .to_string();
    let malformed = |msg: String| EntryOutcome {
        index: index as u64,
        name: name.clone(),
        status: EntryStatus::Malformed,
        instances: 0,
        mismatches: Vec::new(),
        diagnostic: Some(msg),
        elapsed_us: micros(start.elapsed()),
    };
    let entry: CorpusEntry = match serde_json::from_value(raw.clone()) {
        Ok(e) => e,
        Err(e) => return malformed(e.to_string()),
    };
    let instances = match entry.instances() {
        Ok(i) => i,
        Err(e) => return malformed(e),
    };
    let mut expected = entry.expected.clone();
    expected.sort();
    expected.dedup();
    let mut mismatches = Vec::new();
    for inst in &instances {
        let label = inst.to_string();
        match run_instance(inst.clone(), entry.x_max, entry.y_max) {
            Ok(report) if report.solutions == expected => {}
            Ok(report) => mismatches.push(Mismatch {
                instance: label,
                found: report.solutions,
            }),
            Err(e) => return malformed(e.to_string()),
        }
    }
    EntryOutcome {
        index: index as u64,
        name: entry.name,
        status: if mismatches.is_empty() {
            EntryStatus::Pass
        } else {
            EntryStatus::Fail
        },
        instances: instances.len() as u64,
        mismatches,
        diagnostic: None,
        elapsed_us: micros(start.elapsed()),
    }
}

/// Runs every entry of a parsed corpus array; outcomes are in entry order.
pub fn run_corpus(entries: &[serde_json::Value]) -> Vec<EntryOutcome> {
    entries
        .par_iter()
        .enumerate()
        .map(|(i, raw)| run_entry(i, raw))
        .collect()
}

pub const SHIPPED_CORPUS: &str = include_str!("../../corpus/corpus.json");

pub fn shipped_corpus() -> Vec<CorpusEntry> {
    serde_json::from_str(SHIPPED_CORPUS).expect("shipped corpus parses")
}
