//! Sequences over Z/n, their g-norms, and the index.
//!
//! A sequence is stored as residues in `[1, n-1]`. The g-norm with respect to
//! a generator `g` is computed by multiplying every element by `g^{-1}`: the
//! coefficient of `x` in base `g` is `(g^{-1} x)_n`, so
//! `n * norm_g(S) = residue_sum(S, g^{-1})`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{gcd, mod_inverse, mul_mod, GroupContext, UnitTable};

/// Subset enumeration is used for minimality below this length; longer
/// sequences fall back to a residue reachability table.
const SUBSET_ENUM_MAX: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZsSeq {
    ctx: GroupContext,
    elems: Vec<u64>,
}

impl ZsSeq {
    /// Validates `elems` against `[1, n-1]`. Out-of-range values are
    /// rejected, never reduced.
    pub fn new(n: u64, elems: &[i64]) -> Result<Self> {
        let ctx = GroupContext::new(n)?;
        let elems = elems
            .iter()
            .enumerate()
            .map(|(pos, &value)| {
                if value >= 1 && (value as u64) < n {
                    Ok(value as u64)
                } else {
                    Err(Error::InvalidElement {
                        pos,
                        value,
                        max: n - 1,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_context(ctx, elems)
    }

    pub fn with_context(ctx: GroupContext, elems: Vec<u64>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(pos) = elems.iter().position(|&x| x == 0 || x >= ctx.n()) {
            return Err(Error::InvalidElement {
                pos,
                value: elems[pos] as i64,
                max: ctx.n() - 1,
            });
        }
        Ok(Self { ctx, elems })
    }

    pub fn from_residues(n: u64, elems: &[u64]) -> Result<Self> {
        Self::with_context(GroupContext::new(n)?, elems.to_vec())
    }

    #[inline]
    pub fn ctx(&self) -> GroupContext {
        self.ctx
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.ctx.n()
    }

    #[inline]
    pub fn elems(&self) -> &[u64] {
        &self.elems
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Elements in ascending order; the multiset identity of the sequence.
    pub fn sorted_elems(&self) -> Vec<u64> {
        let mut v = self.elems.clone();
        v.sort_unstable();
        v
    }

    pub fn same_multiset(&self, other: &ZsSeq) -> bool {
        self.n() == other.n() && self.sorted_elems() == other.sorted_elems()
    }

    fn sum(&self) -> u128 {
        self.elems.iter().map(|&x| x as u128).sum()
    }

    pub fn is_zero_sum(&self) -> bool {
        self.sum().is_multiple_of(self.n() as u128)
    }

    /// Zero-sum with no nonempty proper zero-sum sub-multiset.
    ///
    /// If `T` is a proper zero-sum part then so is its complement, and one of
    /// the two avoids the last element, so it suffices to search the subsets
    /// of the first `k - 1` elements.
    pub fn is_minimal_zero_sum(&self) -> bool {
        if !self.is_zero_sum() {
            return false;
        }
        let n = self.n();
        let head = &self.elems[..self.len() - 1];
        if let [a, b, c] = *head {
            // singletons are nonzero, triples are complements of singletons
            return (a + b) % n != 0 && (a + c) % n != 0 && (b + c) % n != 0;
        }
        if head.len() <= SUBSET_ENUM_MAX {
            !(1u32..1 << head.len()).any(|mask| {
                let s: u128 = head
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x as u128)
                    .sum();
                s.is_multiple_of(n as u128)
            })
        } else {
            let mut reach = vec![false; n as usize];
            for &x in head {
                let prev = reach.clone();
                reach[x as usize] = true;
                for (r, _) in prev.iter().enumerate().filter(|(_, &b)| b) {
                    reach[(r + x as usize) % n as usize] = true;
                }
                if reach[0] {
                    return false;
                }
            }
            true
        }
    }

    fn require_unit(&self, u: u64) -> Result<()> {
        if self.ctx.is_unit(u) {
            Ok(())
        } else {
            Err(Error::NonUnit { a: u, n: self.n() })
        }
    }

    /// `sum_i (u * x_i)_n`.
    pub fn residue_sum(&self, u: u64) -> Result<u64> {
        self.require_unit(u)?;
        let (u, n) = (u % self.n(), self.n());
        self.elems
            .iter()
            .try_fold(0u64, |acc, &x| acc.checked_add(mul_mod(u, x, n)))
            .ok_or(Error::Overflow("residue sum"))
    }

    #[inline]
    fn residue_sum_unchecked(&self, u: u64) -> u64 {
        let n = self.n();
        self.elems.iter().map(|&x| mul_mod(u, x, n)).sum()
    }

    /// The g-norm `(sum_i (g^{-1} x_i)_n) / n`.
    pub fn g_norm(&self, g: u64) -> Result<Ratio<u64>> {
        self.require_unit(g)?;
        let total = self.residue_sum(mod_inverse(g as i64, self.n())?)?;
        Ok(Ratio::new(total, self.n()))
    }

    /// Exact index with the full norm profile. The witness is the smallest
    /// generator attaining the minimum.
    pub fn index_with_witness(&self) -> Result<IndexResult> {
        if !self.is_zero_sum() {
            return Err(Error::NotZeroSum(self.elems.clone()));
        }
        let table = UnitTable::new(self.n())?;
        let n = self.n();
        let mut norms = BTreeMap::new();
        let mut best: Option<(u64, u64)> = None;
        for &g in table.units() {
            let u = table.inverse(g).expect("unit");
            let norm = self.residue_sum_unchecked(u) / n;
            norms.insert(g, norm);
            if best.is_none_or(|(b, _)| norm < b) {
                best = Some((norm, g));
            }
        }
        let (index, witness) = best.expect("Z/n has at least one unit");
        Ok(IndexResult {
            index,
            witness,
            norms,
        })
    }

    /// Index and smallest witness, stopping at the first norm-1 generator.
    pub fn index_early_exit(&self, table: &UnitTable) -> Result<(u64, u64)> {
        if !self.is_zero_sum() {
            return Err(Error::NotZeroSum(self.elems.clone()));
        }
        if table.n() != self.n() {
            return Err(Error::Domain(format!(
                "unit table for n = {} used with n = {}",
                table.n(),
                self.n()
            )));
        }
        Ok(scan_index(&self.elems, table))
    }

    /// `#{i : (u x_i)_n > n/2}`.
    pub fn count_large_residues(&self, u: u64) -> Result<usize> {
        self.require_unit(u)?;
        Ok(count_large(&self.elems, u, self.n()))
    }

    /// Elementwise `x -> (u x)_n`, order preserved.
    pub fn unit_transform(&self, u: u64) -> Result<ZsSeq> {
        self.require_unit(u)?;
        let n = self.n();
        Ok(ZsSeq {
            ctx: self.ctx,
            elems: self.elems.iter().map(|&x| mul_mod(u, x, n)).collect(),
        })
    }

    /// Lexicographically smallest sorted tuple in the unit orbit.
    pub fn canonical_orbit_rep(&self) -> ZsSeq {
        let n = self.n();
        let mut best = self.sorted_elems();
        let mut buf = best.clone();
        for u in (2..n).filter(|&u| gcd(u, n) == 1) {
            for (b, &x) in buf.iter_mut().zip(&self.elems) {
                *b = mul_mod(u, x, n);
            }
            buf.sort_unstable();
            if buf < best {
                best.copy_from_slice(&buf);
            }
        }
        ZsSeq {
            ctx: self.ctx,
            elems: best,
        }
    }
}

impl fmt::Display for ZsSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.elems {
            write!(f, "({x})")?;
        }
        write!(f, " mod {}", self.n())
    }
}

#[inline]
pub(crate) fn count_large(elems: &[u64], u: u64, n: u64) -> usize {
    elems.iter().filter(|&&x| 2 * mul_mod(u, x, n) > n).count()
}

/// Scans generators in ascending order; returns `(index, smallest witness)`.
/// `elems` must be zero-sum.
pub(crate) fn scan_index(elems: &[u64], table: &UnitTable) -> (u64, u64) {
    let n = table.n();
    let mut best = (u64::MAX, 0);
    for &g in table.units() {
        let u = table.inverse(g).expect("unit");
        let total: u64 = elems.iter().map(|&x| mul_mod(u, x, n)).sum();
        if total == n {
            return (1, g);
        }
        let norm = total / n;
        if norm < best.0 {
            best = (norm, g);
        }
    }
    best
}

/// Index of a sequence together with the generator that attains it and the
/// norm of every generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexResult {
    pub index: u64,
    pub witness: u64,
    pub norms: BTreeMap<u64, u64>,
}
