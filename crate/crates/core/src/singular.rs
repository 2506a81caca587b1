//! The singular case: sequences `(1)(x2)(x3)(x4)` with `x3 = x2 + 1` or
//! `x2 = n - 2`, all elements units.
//!
//! Besides the singularity predicate this module carries the arithmetic that
//! bounds `x2` for a hypothetical index-2 sequence of this shape (good
//! powers of two, the bound `f(k)`, the descent exponent `b`), the two
//! residual explicit forms, the reduction of the `x2 = n - 2` branch to the
//! successor branch, and the search for a unit in a short interval that
//! settles the explicit forms.
//!
//! Every comparison against a fraction of `n` is done by cross
//! multiplication; nothing here touches floating point.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{gcd, mod_inverse, mul_mod, UnitTable};
use crate::zseq::{count_large, scan_index, ZsSeq};

fn require_coprime6(n: u64) -> Result<()> {
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return Err(Error::Domain(format!("gcd({n}, 6) != 1")));
    }
    Ok(())
}

/// Definition of singularity, trying every labeling of the four elements.
pub fn is_singular(s: &ZsSeq) -> Result<bool> {
    if s.len() != 4 {
        return Err(Error::Domain(format!(
            "singularity is defined for length 4, got {}",
            s.len()
        )));
    }
    let n = s.n();
    if !s.ctx().coprime6() || !s.is_minimal_zero_sum() {
        return Ok(false);
    }
    if s.elems().iter().any(|&x| gcd(x, n) != 1) {
        return Ok(false);
    }
    Ok(singular_labeling(s.elems(), n).is_some())
}

/// A labeling `(1, x2, x3, x4)` of `e` satisfying the shape conditions
/// (first element 1; `x2 + 1 = x3` or `x2 = n - 2`).
fn singular_labeling(e: &[u64], n: u64) -> Option<[u64; 4]> {
    const PERMS: [[usize; 4]; 24] = permutations4();
    PERMS
        .iter()
        .map(|p| p.map(|i| e[i]))
        .find(|&[x1, x2, x3, _]| x1 == 1 && (x2 + 1 == x3 || x2 == n - 2))
}

const fn permutations4() -> [[usize; 4]; 24] {
    let mut out = [[0; 4]; 24];
    let mut idx = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && a != c && b != c {
                    out[idx] = [a, b, c, 6 - a - b - c];
                    idx += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
}

/// `f(k) = floor((3k - 1) n / (3k))`.
pub fn f_val(k: u64, n: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::Domain("f(k) needs k >= 1".into()));
    }
    if n < 5 {
        return Err(Error::UnsupportedModulus { n, min: 5 });
    }
    let num = (3 * k as u128 - 1)
        .checked_mul(n as u128)
        .ok_or(Error::Overflow("f(k)"))?;
    u64::try_from(num / (3 * k as u128)).map_err(|_| Error::Overflow("f(k)"))
}

/// Evaluation of the "good" predicate for one `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodKReport {
    pub n: u64,
    pub k: u64,
    /// `k = 2^l` for some `l >= 0`.
    pub is_pow2: bool,
    /// `k < n/6`.
    pub below_sixth: bool,
    pub f_k: u64,
    /// `F(k) = (2n - 2 - 2 f(k)) k`.
    #[serde(rename = "F_k")]
    pub big_f_k: u64,
    pub good: bool,
}

pub fn good_report(k: u64, n: u64) -> Result<GoodKReport> {
    require_coprime6(n)?;
    let f_k = f_val(k, n)?;
    // f(k) <= n - 1, so the factor is nonnegative
    let big_f_k = (2 * n as u128 - 2 - 2 * f_k as u128)
        .checked_mul(k as u128)
        .and_then(|v| u64::try_from(v).ok())
        .ok_or(Error::Overflow("F(k)"))?;
    let is_pow2 = k.is_power_of_two();
    let below_sixth = (6 * k as u128) < n as u128;
    let above_half = 2 * big_f_k as u128 > n as u128 - 1;
    Ok(GoodKReport {
        n,
        k,
        is_pow2,
        below_sixth,
        f_k,
        big_f_k,
        good: is_pow2 && below_sixth && above_half,
    })
}

/// The descent exponent and the chain of lower bounds it produces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentParams {
    pub n: u64,
    /// Unique `b` with `3 * 2^b < n < 3 * 2^(b+1)`.
    pub b: u32,
    /// `2^(b-2)`
    pub k_star: u64,
    /// `[f(2), f(4), ..., f(2^(b-1))]`
    pub chain: Vec<u64>,
    pub final_bound: u64,
}

/// Exponent `b` with `3 * 2^b < n < 3 * 2^(b+1)`, found by bisection over
/// the exponent range. `None` if `n <= 6` or `n` equals some `3 * 2^b`.
pub fn descent_exponent(n: u64) -> Option<u32> {
    let below = |b: u32| 3u128 << b < n as u128;
    if !below(0) {
        return None;
    }
    // largest b with 3 * 2^b < n; below() is monotone decreasing in b
    let (mut lo, mut hi) = (0u32, 64u32);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((n as u128) < 3u128 << (lo + 1)).then_some(lo)
}

pub fn descent_params(n: u64) -> Result<DescentParams> {
    require_coprime6(n)?;
    if n <= 24 {
        return Err(Error::Domain(format!("descent needs n > 24, got {n}")));
    }
    let b = descent_exponent(n)
        .ok_or_else(|| Error::Fault(format!("no descent exponent for n = {n}")))?;
    debug_assert!(b >= 3);
    for t in 0..=b - 2 {
        let r = good_report(1 << t, n)?;
        if !r.good {
            return Err(Error::Fault(format!("2^{t} is not good for n = {n}")));
        }
    }
    let chain = (1..b)
        .map(|t| f_val(1 << t, n))
        .collect::<Result<Vec<_>>>()?;
    if chain.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Fault(format!("descent chain decreases for n = {n}")));
    }
    let final_bound = *chain.last().expect("b >= 3 gives a nonempty chain");
    Ok(DescentParams {
        n,
        b,
        k_star: 1 << (b - 2),
        chain,
        final_bound,
    })
}

/// The two sequences left over by the descent bound, named by their
/// distinguishing last element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExplicitForm {
    /// `(1)(n-4)(n-3)(6)`
    #[serde(rename = "6")]
    WithSix,
    /// `(1)(n-3)(n-2)(4)`
    #[serde(rename = "4")]
    WithFour,
}

impl ExplicitForm {
    pub const ALL: [ExplicitForm; 2] = [ExplicitForm::WithSix, ExplicitForm::WithFour];

    /// Elements for modulus `n >= 7`; not validated against minimality.
    pub fn elems(self, n: u64) -> [u64; 4] {
        match self {
            ExplicitForm::WithSix => [1, n - 4, n - 3, 6 % n],
            ExplicitForm::WithFour => [1, n - 3, n - 2, 4],
        }
    }

    /// Open interval `(n/lo, n/hi)` searched for a witness unit, as the
    /// divisor pair `(lo, hi)`. On `(n/12, n/8)` the multipliers
    /// `(1, -3, -2, 4)` of the second form leave exactly two residues above
    /// `n/2`, so that form uses the neighbouring interval `(n/8, n/6)`,
    /// where three of them are.
    pub fn witness_interval(self) -> (u64, u64) {
        match self {
            ExplicitForm::WithSix => (12, 8),
            ExplicitForm::WithFour => (8, 6),
        }
    }
}

impl fmt::Display for ExplicitForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExplicitForm::WithSix => f.write_str("(1)(n-4)(n-3)(6)"),
            ExplicitForm::WithFour => f.write_str("(1)(n-3)(n-2)(4)"),
        }
    }
}

impl FromStr for ExplicitForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "6" => Ok(ExplicitForm::WithSix),
            "4" => Ok(ExplicitForm::WithFour),
            other => Err(Error::Domain(format!(
                "unknown form {other:?}, expected 6 or 4"
            ))),
        }
    }
}

pub fn explicit_forms(n: u64) -> Result<(ZsSeq, ZsSeq)> {
    require_coprime6(n)?;
    if n < 11 {
        return Err(Error::Degenerate(n));
    }
    Ok((
        ZsSeq::from_residues(n, &ExplicitForm::WithSix.elems(n))?,
        ZsSeq::from_residues(n, &ExplicitForm::WithFour.elems(n))?,
    ))
}

/// `(1, f(k), f(k) + 1, 2n - 2 - 2 f(k))` for a good `k`.
pub fn good_k_quadruple(k: u64, n: u64) -> Result<ZsSeq> {
    let report = good_report(k, n)?;
    if !report.good {
        return Err(Error::Domain(format!("k = {k} is not good for n = {n}")));
    }
    let f = report.f_k;
    let x4 = 2 * n - 2 - 2 * f;
    ZsSeq::from_residues(n, &[1, f, f + 1, x4])
}

/// Rewrites `(1)(n-2)(x3)(x4)` in base `x3`: returns
/// `(1, (x3^{-1} - 1)_n, (x3^{-1})_n, (x3^{-1} (n-2))_n)`, a singular sequence
/// of the successor shape with the same index.
///
/// The input order matters: position 2 is taken as `x3`.
pub fn successor_reduction(s: &ZsSeq) -> Result<ZsSeq> {
    let n = s.n();
    let e = s.elems();
    if e.len() != 4 || e[0] != 1 || e[1] != n - 2 {
        return Err(Error::Domain(format!(
            "successor reduction needs (1)(n-2)(x3)(x4), got {s}"
        )));
    }
    if !is_singular(s)? {
        return Err(Error::Domain(format!("{s} is not singular")));
    }
    let inv = mod_inverse(e[2] as i64, n)?;
    let y = [1, (inv + n - 1) % n, inv, mul_mod(inv, e[1], n)];
    ZsSeq::from_residues(n, &y)
}

/// Unit found in the witness interval of an explicit form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalWitness {
    pub g: u64,
    /// `#{i : (x_i g)_n > n/2}` for the form's elements.
    pub count: usize,
}

/// Units `g` with `n/lo < g < n/hi`, ascending.
pub fn units_in_interval(n: u64, lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    let n128 = n as u128;
    (n / lo + 1..=n / hi)
        .filter(move |&g| lo as u128 * g as u128 > n128 && (hi as u128 * g as u128) < n128)
        .filter(move |&g| gcd(g, n) == 1)
}

/// Smallest unit in the form's witness interval, with its large-residue
/// count. `None` when the interval holds no unit.
pub fn interval_witness(n: u64, form: ExplicitForm) -> Result<Option<IntervalWitness>> {
    require_coprime6(n)?;
    let (lo, hi) = form.witness_interval();
    let elems = form.elems(n);
    Ok(units_in_interval(n, lo, hi)
        .next()
        .map(|g| IntervalWitness {
            g,
            count: count_large(&elems, g, n),
        }))
}

/// Result of checking every singular sequence over one modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularReport {
    pub n: u64,
    /// Distinct singular multisets checked.
    pub checked: u64,
    /// Of which admit a labeling with `x3 = x2 + 1`.
    pub successor_branch: u64,
    /// Of which admit a labeling with `x2 = n - 2`.
    pub n_minus_2_branch: u64,
    /// Singular sequences whose index is not 1 (sorted elements).
    pub violations: Vec<Vec<u64>>,
    /// Successor-shape violations with `x4 >= x2`.
    pub x4_not_below_x2: Vec<Vec<u64>>,
}

impl SingularReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.x4_not_below_x2.is_empty()
    }
}

/// All singular multisets over Z/n in the successor branch, as labeled
/// tuples `(1, x2, x2 + 1, x4)`.
pub fn successor_branch(n: u64) -> Vec<[u64; 4]> {
    let mut out = Vec::new();
    for x2 in 1..n - 1 {
        for m in 1..=3u64 {
            let x4 = m as i128 * n as i128 - 2 - 2 * x2 as i128;
            if x4 >= 1 && x4 < n as i128 {
                let t = [1, x2, x2 + 1, x4 as u64];
                if singular_tuple(&t, n) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// All singular sequences over Z/n in the `x2 = n - 2` branch, as labeled
/// tuples `(1, n - 2, x3, x4)`; both labelings of `{x3, x4}` appear.
pub fn n_minus_2_branch(n: u64) -> Vec<[u64; 4]> {
    let mut out = Vec::new();
    for x3 in 1..n {
        for m in 1..=3u64 {
            let x4 = m as i128 * n as i128 - 1 - (n as i128 - 2) - x3 as i128;
            if x4 >= 1 && x4 < n as i128 {
                let t = [1, n - 2, x3, x4 as u64];
                if singular_tuple(&t, n) {
                    out.push(t);
                }
            }
        }
    }
    out
}

fn singular_tuple(t: &[u64; 4], n: u64) -> bool {
    t.iter().all(|&x| gcd(x, n) == 1)
        && ZsSeq::from_residues(n, t).is_ok_and(|s| s.is_minimal_zero_sum())
}

/// Enumerates every singular sequence over Z/n and confirms each has
/// index 1.
pub fn verify_singular_theorem(n: u64) -> Result<SingularReport> {
    require_coprime6(n)?;
    if n < 11 {
        return Err(Error::Degenerate(n));
    }
    let table = UnitTable::new(n)?;
    let sorted = |t: &[u64; 4]| {
        let mut v = *t;
        v.sort_unstable();
        v
    };
    let succ: BTreeSet<[u64; 4]> = successor_branch(n).iter().map(sorted).collect();
    let nm2: BTreeSet<[u64; 4]> = n_minus_2_branch(n).iter().map(sorted).collect();

    let mut report = SingularReport {
        n,
        checked: 0,
        successor_branch: succ.len() as u64,
        n_minus_2_branch: nm2.len() as u64,
        violations: Vec::new(),
        x4_not_below_x2: Vec::new(),
    };
    for t in succ.union(&nm2) {
        report.checked += 1;
        let (index, _) = scan_index(t, &table);
        if index != 1 {
            report.violations.push(t.to_vec());
        }
    }
    for t in successor_branch(n) {
        let [_, x2, _, x4] = t;
        if x4 >= x2 && scan_index(&t, &table).0 == 2 {
            report.x4_not_below_x2.push(t.to_vec());
        }
    }
    Ok(report)
}
