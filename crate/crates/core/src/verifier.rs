//! Exhaustive verification over length-4 minimal zero-sum sequences.
//!
//! Multisets are enumerated as sorted tuples `a <= b <= c <= d` with
//! `d ≡ -(a + b + c) (mod n)`. For fixed `(a, b)` the admissible `c` form at
//! most two intervals, so the loop never visits a tuple that fails the sum
//! constraint. Orbit representatives are recognised without scanning the
//! whole unit group: the smallest element reachable in the orbit of a tuple
//! is `min_i gcd(x_i, n)`, so only units sending some element to that value
//! can produce a smaller sorted tuple.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{gcd, mod_inverse, mul_mod, GroupContext, UnitTable, MIN_MODULUS};
use crate::zseq::{scan_index, ZsSeq};
use crate::SCHEMA_VERSION;

/// An orbit whose index exceeds 1, with every generator's norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index2Example {
    pub elems: Vec<u64>,
    pub index: u64,
    /// `[g, norm_g]` for every generator `g`, ascending.
    pub norms: Vec<[u64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub n: u64,
    pub total_minimal: u64,
    pub orbit_count: u64,
    pub max_index: u64,
    pub index2_examples: Vec<Index2Example>,
    pub elapsed_ms: u64,
}

impl VerifyRecord {
    pub fn conjecture_holds(&self) -> bool {
        self.max_index <= 1
    }
}

/// Sorted minimal zero-sum 4-tuples over Z/n, ascending lexicographically.
#[derive(Debug, Clone)]
pub struct MinimalSeqs {
    n: u64,
    a: u64,
    b: u64,
    buf: Vec<[u64; 4]>,
    pos: usize,
}

impl MinimalSeqs {
    fn new(n: u64) -> Self {
        Self {
            n,
            a: 1,
            b: 0,
            buf: Vec::new(),
            pos: 0,
        }
    }

    /// Advances to the next `(a, b)` prefix and fills the buffer with its
    /// tuples. Returns false when the space is exhausted.
    fn refill(&mut self) -> bool {
        let n = self.n;
        loop {
            self.b += 1;
            if self.b >= n {
                self.a += 1;
                self.b = self.a;
            }
            if self.a >= n {
                return false;
            }
            self.buf.clear();
            self.pos = 0;
            push_minimal_tuples(n, self.a, self.b, &mut self.buf);
            if !self.buf.is_empty() {
                return true;
            }
        }
    }
}

impl Iterator for MinimalSeqs {
    type Item = [u64; 4];

    fn next(&mut self) -> Option<[u64; 4]> {
        if self.pos == self.buf.len() && !self.refill() {
            return None;
        }
        self.pos += 1;
        Some(self.buf[self.pos - 1])
    }
}

fn push_minimal_tuples(n: u64, a: u64, b: u64, out: &mut Vec<[u64; 4]>) {
    if a + b == n {
        return;
    }
    let r = (a + b) % n;
    // c + r < n: d = n - r - c, need d >= c
    let lo = b;
    let hi = (n - r - 1).min((n - r) / 2);
    for c in lo..=hi {
        push_if_minimal(n, [a, b, c, n - r - c], out);
    }
    // c + r > n: d = 2n - r - c, need d >= c and d <= n - 1
    let lo = b.max(n - r + 1);
    let hi = (n - 1).min((2 * n - r) / 2);
    for c in lo..=hi {
        push_if_minimal(n, [a, b, c, 2 * n - r - c], out);
    }
}

#[inline]
fn push_if_minimal(n: u64, t: [u64; 4], out: &mut Vec<[u64; 4]>) {
    let [a, b, c, d] = t;
    // zero-sum by construction; only pairs can be proper zero-sum parts
    if a + c != n && a + d != n && b + c != n && b + d != n && c + d != n {
        out.push(t);
    }
}

/// Precomputed data for orbit-representative tests over one modulus.
#[derive(Debug, Clone)]
pub struct OrbitTester {
    n: u64,
}

impl OrbitTester {
    pub fn new(n: u64) -> Self {
        Self { n }
    }

    /// Whether the sorted tuple `t` is the lexicographically smallest sorted
    /// tuple in its unit orbit.
    pub fn is_canonical(&self, t: &[u64; 4]) -> bool {
        let n = self.n;
        let d = t[0];
        // the orbit minimum is min gcd(x_i, n), and t[0] >= gcd(t[0], n)
        if !n.is_multiple_of(d) || t[1..].iter().any(|&x| gcd(x, n) < d) {
            return false;
        }
        let m = n / d;
        for &x in t.iter().filter(|&&x| gcd(x, n) == d) {
            let s = (x / d) % m;
            let base = match mod_inverse(s as i64, m) {
                Ok(v) => v,
                Err(_) => continue,
            };
            for j in 0..d {
                let u = base + j * m;
                if u >= n || gcd(u, n) != 1 || u == 1 {
                    continue;
                }
                let mut img = t.map(|x| mul_mod(u, x, n));
                img.sort_unstable();
                if img < *t {
                    return false;
                }
            }
        }
        true
    }
}

/// Every minimal zero-sum length-4 multiset over Z/n, ascending; with
/// `orbits_only`, just the canonical orbit representatives.
pub fn enumerate_minimal(n: u64, orbits_only: bool) -> Result<impl Iterator<Item = ZsSeq>> {
    let ctx = GroupContext::new(n)?;
    let tester = OrbitTester::new(n);
    Ok(MinimalSeqs::new(n)
        .filter(move |t| !orbits_only || tester.is_canonical(t))
        .map(move |t| ZsSeq::with_context(ctx, t.to_vec()).expect("elements in range")))
}

fn norm_profile(t: &[u64], table: &UnitTable) -> Vec<[u64; 2]> {
    let n = table.n();
    table
        .units()
        .iter()
        .map(|&g| {
            let u = table.inverse(g).expect("unit");
            let total: u64 = t.iter().map(|&x| mul_mod(u, x, n)).sum();
            [g, total / n]
        })
        .collect()
}

/// Enumerates, reduces to orbit representatives, and computes each
/// representative's index with early exit.
pub fn verify_n(n: u64) -> Result<VerifyRecord> {
    if n < MIN_MODULUS {
        return Err(Error::UnsupportedModulus {
            n,
            min: MIN_MODULUS,
        });
    }
    let start = Instant::now();
    let table = UnitTable::new(n)?;
    let tester = OrbitTester::new(n);
    let mut rec = VerifyRecord {
        n,
        total_minimal: 0,
        orbit_count: 0,
        max_index: 0,
        index2_examples: Vec::new(),
        elapsed_ms: 0,
    };
    for t in MinimalSeqs::new(n) {
        rec.total_minimal += 1;
        if !tester.is_canonical(&t) {
            continue;
        }
        rec.orbit_count += 1;
        let (index, _) = scan_index(&t, &table);
        rec.max_index = rec.max_index.max(index);
        if index > 1 {
            rec.index2_examples.push(Index2Example {
                elems: t.to_vec(),
                index,
                norms: norm_profile(&t, &table),
            });
        }
    }
    rec.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}

/// One ledger line: a completed modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub schema_version: u32,
    #[serde(flatten)]
    pub record: VerifyRecord,
}

/// A ledger line that could not be used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeRun {
    /// One record per modulus in range coprime to 6, ascending by n.
    pub records: Vec<VerifyRecord>,
    /// Moduli taken from the ledger instead of recomputed.
    pub resumed: Vec<u64>,
    pub corrupt_lines: Vec<CorruptLine>,
}

struct Ledger {
    path: PathBuf,
    file: Mutex<File>,
}

impl Ledger {
    /// Opens (creating if needed) the ledger and reads completed records.
    fn open(path: &Path) -> Result<(Self, Vec<VerifyRecord>, Vec<CorruptLine>)> {
        let io_err = |source| Error::Checkpoint {
            path: path.to_path_buf(),
            source,
        };
        let mut file = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(path)
            .map_err(io_err)?;
        let mut done = Vec::new();
        let mut corrupt = Vec::new();
        for (i, line) in BufReader::new(&file).lines().enumerate() {
            let line = match line {
                Ok(l) => l,
                Err(e) => {
                    corrupt.push(CorruptLine {
                        line: i + 1,
                        reason: e.to_string(),
                    });
                    continue;
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<LedgerEntry>(&line) {
                Ok(e) if e.schema_version == SCHEMA_VERSION => done.push(e.record),
                Ok(e) => corrupt.push(CorruptLine {
                    line: i + 1,
                    reason: format!("schema version {}", e.schema_version),
                }),
                Err(e) => corrupt.push(CorruptLine {
                    line: i + 1,
                    reason: e.to_string(),
                }),
            }
        }
        // a torn final line must not swallow the next append
        let len = file.seek(SeekFrom::End(0)).map_err(io_err)?;
        if len > 0 {
            let mut last = [0u8; 1];
            file.seek(SeekFrom::Start(len - 1)).map_err(io_err)?;
            file.read_exact(&mut last).map_err(io_err)?;
            if last[0] != b'\n' {
                file.write_all(b"\n").map_err(io_err)?;
            }
        }
        Ok((
            Self {
                path: path.to_path_buf(),
                file: Mutex::new(file),
            },
            done,
            corrupt,
        ))
    }

    fn append(&self, record: &VerifyRecord) -> Result<()> {
        let entry = LedgerEntry {
            schema_version: SCHEMA_VERSION,
            record: record.clone(),
        };
        let mut line = serde_json::to_vec(&entry).expect("ledger entry serializes");
        line.push(b'\n');
        let mut file = self.file.lock().expect("ledger lock");
        file.write_all(&line)
            .and_then(|_| file.flush())
            .map_err(|source| Error::Checkpoint {
                path: self.path.clone(),
                source,
            })
    }
}

/// Moduli in `[lo, hi]` coprime to 6.
pub fn range_moduli(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|n| n % 2 != 0 && n % 3 != 0).collect()
}

/// Verifies every modulus in `[lo, hi]` coprime to 6 on `workers` threads.
/// With a checkpoint, completed moduli are appended to the ledger one line
/// each and skipped when the ledger is reopened.
pub fn verify_range(
    lo: u64,
    hi: u64,
    workers: usize,
    checkpoint: Option<&Path>,
) -> Result<RangeRun> {
    if lo < MIN_MODULUS || lo > hi {
        return Err(Error::Domain(format!(
            "range must satisfy {MIN_MODULUS} <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if workers == 0 {
        return Err(Error::Domain("workers must be positive".into()));
    }
    let wanted = range_moduli(lo, hi);
    let (ledger, prior, corrupt_lines) = match checkpoint {
        Some(p) => {
            let (l, d, c) = Ledger::open(p)?;
            (Some(l), d, c)
        }
        None => (None, Vec::new(), Vec::new()),
    };
    let wanted_set: BTreeSet<u64> = wanted.iter().copied().collect();
    let mut done: BTreeMap<u64, VerifyRecord> = BTreeMap::new();
    for r in prior {
        if wanted_set.contains(&r.n) {
            done.entry(r.n).or_insert(r);
        }
    }
    let resumed: Vec<u64> = done.keys().copied().collect();
    let todo: Vec<u64> = wanted
        .into_iter()
        .filter(|n| !done.contains_key(n))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Fault(format!("thread pool: {e}")))?;
    let fresh: Vec<VerifyRecord> = pool.install(|| {
        todo.par_iter()
            .map(|&n| {
                let rec = verify_n(n)?;
                if let Some(l) = &ledger {
                    l.append(&rec)?;
                }
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    for r in fresh {
        done.insert(r.n, r);
    }
    Ok(RangeRun {
        records: done.into_values().collect(),
        resumed,
        corrupt_lines,
    })
}
