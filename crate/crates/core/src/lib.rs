//! Exact index computation and exhaustive verification for minimal
//! zero-sum sequences of length 4 over the cyclic group Z/n.
//!
//! - [`modarith`]: residues, inverses, unit groups, primality and the
//!   prime-interval sweep.
//! - [`zseq`]: sequences, zero-sum and minimality predicates, g-norms and
//!   the index.
//! - [`singular`]: the singular shape, good powers of two and the descent
//!   bound, the explicit forms and their interval witnesses.
//! - [`verifier`]: enumeration with orbit reduction and parallel range
//!   verification with a resumable ledger.
//! - [`report`] and [`cli`]: machine-readable reports and the `zsindex`
//!   command line.

pub mod cli;
pub mod error;
pub mod modarith;
pub mod report;
pub mod singular;
pub mod verifier;
pub mod zseq;

pub use error::{Error, Result};
pub use modarith::GroupContext;
pub use zseq::{IndexResult, ZsSeq};

/// Version of the JSON schema shared by `--json` reports and checkpoint
/// ledgers.
pub const SCHEMA_VERSION: u32 = 1;
