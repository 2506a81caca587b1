//! Report schema shared by every command.
//!
//! JSON field order follows the struct declarations below and is part of
//! the schema. There are no floating-point fields; norms are integers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::modarith::PrimeSweep;
use crate::singular::{DescentParams, ExplicitForm, GoodKReport, IntervalWitness, SingularReport};
use crate::verifier::VerifyRecord;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub records: Vec<Record>,
    pub tool_version: String,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(command: &str, params: BTreeMap<String, String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            params,
            records: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_ms: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub n: u64,
    pub seq: Vec<u64>,
    pub index: u64,
    pub witness: u64,
    /// `[g, norm_g]` pairs; present only when the full table was requested.
    pub norms: Option<Vec<[u64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub n: u64,
    pub form: ExplicitForm,
    pub seq: Vec<u64>,
    /// Divisors `(lo, hi)` of the open interval `(n/lo, n/hi)`.
    pub interval: [u64; 2],
    pub witness: Option<IntervalWitness>,
    /// Index of the form, computed directly when the interval is empty.
    pub fallback_index: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub n: u64,
    pub seq: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Verify(VerifyRecord),
    Index(IndexRecord),
    GoodK(GoodKReport),
    Descent(DescentParams),
    Singular(SingularReport),
    Witness(WitnessRecord),
    Primes(PrimeSweep),
    Sequence(SequenceRecord),
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Plain-text rendering for terminals.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let mut verify_header = false;
    for rec in &report.records {
        match rec {
            Record::Verify(r) => {
                if !verify_header {
                    let _ = writeln!(
                        out,
                        "{:>8} {:>12} {:>10} {:>9} {:>10}",
                        "n", "minimal", "orbits", "max_ind", "ms"
                    );
                    verify_header = true;
                }
                let _ = writeln!(
                    out,
                    "{:>8} {:>12} {:>10} {:>9} {:>10}",
                    r.n, r.total_minimal, r.orbit_count, r.max_index, r.elapsed_ms
                );
                for ex in &r.index2_examples {
                    let _ = writeln!(out, "  index {} orbit ({})", ex.index, join(&ex.elems));
                    for [g, v] in &ex.norms {
                        let _ = writeln!(out, "    g={g} norm={v}");
                    }
                }
            }
            Record::Index(r) => {
                let _ = writeln!(out, "n = {}, S = ({})", r.n, join(&r.seq));
                let _ = writeln!(out, "index = {}, witness g = {}", r.index, r.witness);
                if let Some(norms) = &r.norms {
                    for [g, v] in norms {
                        let _ = writeln!(out, "  g={g:<8} norm={v}");
                    }
                }
            }
            Record::GoodK(r) => {
                let _ = writeln!(
                    out,
                    "k={:<8} f(k)={:<10} F(k)={:<10} pow2={} below_n/6={} good={}",
                    r.k, r.f_k, r.big_f_k, r.is_pow2, r.below_sixth, r.good
                );
            }
            Record::Descent(d) => {
                let _ = writeln!(
                    out,
                    "b = {}, k* = {}, chain = [{}], final_bound = {}, n - final_bound = {}",
                    d.b,
                    d.k_star,
                    join(&d.chain),
                    d.final_bound,
                    d.n - d.final_bound
                );
            }
            Record::Singular(r) => {
                let _ = writeln!(
                    out,
                    "n = {:<8} singular = {:<8} (x3=x2+1: {}, x2=n-2: {}) violations = {}",
                    r.n,
                    r.checked,
                    r.successor_branch,
                    r.n_minus_2_branch,
                    r.violations.len() + r.x4_not_below_x2.len()
                );
                for v in r.violations.iter().chain(&r.x4_not_below_x2) {
                    let _ = writeln!(out, "  ({})", join(v));
                }
            }
            Record::Witness(w) => {
                let _ = writeln!(
                    out,
                    "n = {}, form {} = ({}), interval (n/{}, n/{})",
                    w.n,
                    w.form,
                    join(&w.seq),
                    w.interval[0],
                    w.interval[1]
                );
                match (&w.witness, w.fallback_index) {
                    (Some(x), _) => {
                        let _ = writeln!(out, "g = {}, count = {}", x.g, x.count);
                    }
                    (None, Some(i)) => {
                        let _ = writeln!(out, "no unit in interval; direct index = {i}");
                    }
                    (None, None) => {
                        let _ = writeln!(out, "no unit in interval");
                    }
                }
            }
            Record::Primes(p) => {
                let _ = writeln!(
                    out,
                    "checked N in [2, {}]: (2N,3N) failures = {}, [N+1,3(N+1)/2) failures = {}",
                    p.max,
                    p.bertrand_failures.len(),
                    p.half_open_failures.len()
                );
            }
            Record::Sequence(s) => {
                let _ = writeln!(out, "({})", join(&s.seq));
            }
        }
    }
    out
}

pub const CSV_HEADER: [&str; 6] = [
    "n",
    "total_minimal",
    "orbit_count",
    "max_index",
    "index2_count",
    "elapsed_ms",
];

/// Flat rows for the verify records of a report.
pub fn render_csv(report: &Report) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for rec in &report.records {
        if let Record::Verify(r) = rec {
            w.write_record([
                r.n.to_string(),
                r.total_minimal.to_string(),
                r.orbit_count.to_string(),
                r.max_index.to_string(),
                r.index2_examples.len().to_string(),
                r.elapsed_ms.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
