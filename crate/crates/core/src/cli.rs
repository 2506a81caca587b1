//! The `zsindex` command line.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 a mathematical check
//! failed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::Error;
use crate::modarith::sweep_prime_intervals;
use crate::report::{
    render_csv, render_text, IndexRecord, Record, Report, SequenceRecord, WitnessRecord,
};
use crate::singular::{
    descent_params, good_report, interval_witness, verify_singular_theorem, ExplicitForm,
};
use crate::verifier::{enumerate_minimal, range_moduli, verify_range};
use crate::zseq::ZsSeq;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "zsindex",
    version,
    about = "Index of minimal zero-sum sequences over Z/n"
)]
struct Cli {
    /// Emit the JSON report
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit verify records as CSV rows
    #[arg(long, global = true)]
    csv: bool,
    /// Report every elapsed time as 0 so output is reproducible byte for byte
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Target {
    /// Single modulus
    #[arg(long)]
    n: Option<u64>,
    /// Inclusive modulus range
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    range: Option<Vec<u64>>,
}

impl Target {
    fn bounds(&self) -> Result<(u64, u64), String> {
        match (&self.n, &self.range) {
            (Some(n), None) => Ok((*n, *n)),
            (None, Some(r)) if r[0] <= r[1] => Ok((r[0], r[1])),
            (None, Some(r)) => Err(format!("empty range {} {}", r[0], r[1])),
            _ => Err("give exactly one of --n or --range".into()),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Index of a zero-sum sequence, with its smallest witness generator
    Index {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        seq: Vec<i64>,
        /// Print the norm of every generator
        #[arg(long)]
        norms: bool,
    },
    /// Check that every minimal zero-sum length-4 sequence has index 1
    Verify {
        #[command(flatten)]
        target: Target,
        /// Worker threads (default: available parallelism)
        #[arg(long)]
        jobs: Option<usize>,
        /// Append completed moduli to this ledger and skip those already in it
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Check that every singular sequence has index 1
    Singular {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Evaluate the good-k predicate and the descent bound
    Goodk {
        #[arg(long)]
        n: u64,
    },
    /// Find a unit in the witness interval of an explicit form
    Witness {
        #[arg(long)]
        n: u64,
        /// 6 for (1)(n-4)(n-3)(6), 4 for (1)(n-3)(n-2)(4)
        #[arg(long)]
        form: ExplicitForm,
    },
    /// List minimal zero-sum length-4 sequences
    Enumerate {
        #[arg(long)]
        n: u64,
        /// Only canonical orbit representatives
        #[arg(long)]
        orbits: bool,
    },
    /// Check both prime-interval statements for every 2 <= N <= max
    PrimesCheck {
        #[arg(long)]
        max: u64,
    },
}

impl clap::ValueEnum for ExplicitForm {
    fn value_variants<'a>() -> &'a [Self] {
        &ExplicitForm::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            ExplicitForm::WithSix => "6",
            ExplicitForm::WithFour => "4",
        }))
    }
}

enum Failure {
    Usage(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Runs the command line and returns the process exit code. Reports go to
/// `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let (mut report, result) = execute(&cli.cmd);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    if cli.no_timing {
        report.elapsed_ms = 0;
        for rec in &mut report.records {
            if let Record::Verify(r) = rec {
                r.elapsed_ms = 0;
            }
        }
    }
    if let Err(Failure::Usage(msg)) = &result {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let rendered = if cli.json {
        serde_json::to_string_pretty(&report)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string())
    } else if cli.csv {
        if !matches!(cli.cmd, Command::Verify { .. }) {
            eprintln!("error: --csv applies to verify only");
            return EXIT_USAGE;
        }
        render_csv(&report).map_err(|e| e.to_string())
    } else {
        Ok(render_text(&report))
    };
    match rendered {
        Ok(s) => {
            if out.write_all(s.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(_) => EXIT_CHECK_FAILED,
    }
}

fn execute(cmd: &Command) -> (Report, Result<(), Failure>) {
    let mut report = Report::new("", BTreeMap::new());
    let result = fill(cmd, &mut report);
    (report, result)
}

fn fill(cmd: &Command, report: &mut Report) -> Result<(), Failure> {
    match cmd {
        Command::Index { n, seq, norms } => {
            *report = Report::new(
                "index",
                params([
                    ("n", n.to_string()),
                    (
                        "seq",
                        seq.iter().map(i64::to_string).collect::<Vec<_>>().join(","),
                    ),
                    ("norms", norms.to_string()),
                ]),
            );
            let s = ZsSeq::new(*n, seq)?;
            let r = s.index_with_witness()?;
            report.records.push(Record::Index(IndexRecord {
                n: *n,
                seq: s.elems().to_vec(),
                index: r.index,
                witness: r.witness,
                norms: norms.then(|| r.norms.iter().map(|(&g, &v)| [g, v]).collect()),
            }));
            Ok(())
        }
        Command::Verify {
            target,
            jobs,
            checkpoint,
        } => {
            let (lo, hi) = target.bounds().map_err(Failure::Usage)?;
            let jobs = jobs.unwrap_or_else(default_jobs);
            // worker count is left out so reports stay identical across --jobs
            let mut p = params([("lo", lo.to_string()), ("hi", hi.to_string())]);
            if let Some(c) = checkpoint {
                p.insert("checkpoint".into(), c.display().to_string());
            }
            *report = Report::new("verify", p);
            let run = verify_range(lo, hi, jobs, checkpoint.as_deref())?;
            for c in &run.corrupt_lines {
                eprintln!(
                    "warning: ledger line {} unusable ({}); re-verified",
                    c.line, c.reason
                );
            }
            if !run.resumed.is_empty() {
                eprintln!("resumed {} moduli from the ledger", run.resumed.len());
            }
            let ok = run.records.iter().all(|r| r.conjecture_holds());
            report
                .records
                .extend(run.records.into_iter().map(Record::Verify));
            if ok {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Singular { target, jobs } => {
            let (lo, hi) = target.bounds().map_err(Failure::Usage)?;
            *report = Report::new(
                "singular",
                params([("lo", lo.to_string()), ("hi", hi.to_string())]),
            );
            let ns: Vec<u64> = range_moduli(lo.max(11), hi);
            if ns.is_empty() {
                return Err(Failure::Usage(format!(
                    "no modulus n >= 11 with gcd(n, 6) = 1 in [{lo}, {hi}]"
                )));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.unwrap_or_else(default_jobs))
                .build()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let reports = pool.install(|| {
                ns.par_iter()
                    .map(|&n| verify_singular_theorem(n))
                    .collect::<crate::Result<Vec<_>>>()
            })?;
            let ok = reports.iter().all(|r| r.passed());
            report
                .records
                .extend(reports.into_iter().map(Record::Singular));
            if ok {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Goodk { n } => {
            *report = Report::new("goodk", params([("n", n.to_string())]));
            let mut k = 1u64;
            while k <= *n {
                report.records.push(Record::GoodK(good_report(k, *n)?));
                k *= 2;
            }
            if *n > 24 {
                report.records.push(Record::Descent(descent_params(*n)?));
            }
            Ok(())
        }
        Command::Witness { n, form } => {
            *report = Report::new(
                "witness",
                params([("n", n.to_string()), ("form", form_arg(*form).to_string())]),
            );
            if *n < 11 {
                return Err(Failure::Usage(format!(
                    "n = {n} is too small for the explicit forms"
                )));
            }
            let witness = interval_witness(*n, *form)?;
            let (lo, hi) = form.witness_interval();
            let seq = form.elems(*n).to_vec();
            let fallback_index = match witness {
                Some(_) => None,
                None => Some(ZsSeq::from_residues(*n, &seq)?.index_with_witness()?.index),
            };
            report.records.push(Record::Witness(WitnessRecord {
                n: *n,
                form: *form,
                seq,
                interval: [lo, hi],
                witness,
                fallback_index,
            }));
            let ok = witness.map_or(fallback_index == Some(1), |w| w.count != 2);
            if ok {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Enumerate { n, orbits } => {
            *report = Report::new(
                "enumerate",
                params([("n", n.to_string()), ("orbits", orbits.to_string())]),
            );
            for s in enumerate_minimal(*n, *orbits)? {
                report.records.push(Record::Sequence(SequenceRecord {
                    n: *n,
                    seq: s.elems().to_vec(),
                }));
            }
            Ok(())
        }
        Command::PrimesCheck { max } => {
            *report = Report::new("primes-check", params([("max", max.to_string())]));
            if *max < 2 {
                return Err(Failure::Usage("--max must be at least 2".into()));
            }
            let sweep = sweep_prime_intervals(*max)?;
            let ok = sweep.holds();
            report.records.push(Record::Primes(sweep));
            if ok {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

fn form_arg(form: ExplicitForm) -> &'static str {
    match form {
        ExplicitForm::WithSix => "6",
        ExplicitForm::WithFour => "4",
    }
}
