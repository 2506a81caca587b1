//! Brute-force reference implementations, kept independent of the library's
//! enumeration, minimality, norm and orbit code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use zerosum_index::verifier::{Index2Example, VerifyRecord};

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn coprime6(n: u64) -> bool {
    !n.is_multiple_of(2) && !n.is_multiple_of(3)
}

fn minimal_by_subsets(n: u64, t: &[u64; 4]) -> bool {
    let total: u64 = t.iter().sum();
    if !total.is_multiple_of(n) {
        return false;
    }
    (1u32..15).all(|mask| {
        let s: u64 = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| t[i]).sum();
        !s.is_multiple_of(n)
    })
}

/// `coef[h][x]` = the `y` in `[1, n-1]` with `y * h ≡ x`, built by walking
/// the multiples of each generator `h`.
pub struct Coefficients {
    n: u64,
    table: BTreeMap<u64, Vec<u64>>,
}

impl Coefficients {
    pub fn new(n: u64) -> Self {
        let mut table = BTreeMap::new();
        for h in (1..n).filter(|&h| gcd(h, n) == 1) {
            let mut row = vec![0u64; n as usize];
            for y in 1..n {
                row[(y * h % n) as usize] = y;
            }
            table.insert(h, row);
        }
        Self { n, table }
    }

    pub fn generators(&self) -> impl Iterator<Item = u64> + '_ {
        self.table.keys().copied()
    }

    /// `sum y_i` where `x_i = y_i h`.
    pub fn coefficient_sum(&self, h: u64, elems: &[u64]) -> u64 {
        let row = &self.table[&h];
        elems.iter().map(|&x| row[x as usize]).sum()
    }

    pub fn norms(&self, elems: &[u64]) -> Vec<[u64; 2]> {
        self.generators()
            .map(|h| [h, self.coefficient_sum(h, elems) / self.n])
            .collect()
    }
}

pub fn orbit_min(n: u64, t: &[u64; 4]) -> [u64; 4] {
    let mut best = *t;
    best.sort_unstable();
    for u in (1..n).filter(|&u| gcd(u, n) == 1) {
        let mut img = t.map(|x| u * x % n);
        img.sort_unstable();
        best = best.min(img);
    }
    best
}

/// All ordered 4-tuples, deduplicated at the end; every orbit grouped by
/// scanning the whole unit group; every index by a full scan.
pub fn naive_verify(n: u64) -> VerifyRecord {
    let mut sequences = BTreeSet::new();
    for a in 1..n {
        for b in 1..n {
            for c in 1..n {
                for d in 1..n {
                    let t = [a, b, c, d];
                    if minimal_by_subsets(n, &t) {
                        let mut s = t;
                        s.sort_unstable();
                        sequences.insert(s);
                    }
                }
            }
        }
    }
    let coef = Coefficients::new(n);
    let mut orbits: BTreeMap<[u64; 4], u64> = BTreeMap::new();
    for s in &sequences {
        let norms = coef.norms(s);
        let index = norms.iter().map(|&[_, v]| v).min().unwrap();
        let rep = orbit_min(n, s);
        if let Some(&prev) = orbits.get(&rep) {
            assert_eq!(prev, index, "index not constant on the orbit of {rep:?}");
        }
        orbits.insert(rep, index);
    }
    let index2_examples = orbits
        .iter()
        .filter(|(_, &i)| i > 1)
        .map(|(rep, &i)| Index2Example {
            elems: rep.to_vec(),
            index: i,
            norms: coef.norms(rep),
        })
        .collect();
    VerifyRecord {
        n,
        total_minimal: sequences.len() as u64,
        orbit_count: orbits.len() as u64,
        max_index: orbits.values().copied().max().unwrap_or(0),
        index2_examples,
        elapsed_ms: 0,
    }
}

/// Number of distinct prime factors for every m <= limit, from a
/// smallest-prime-factor sieve.
pub fn omega_table(limit: usize) -> Vec<u8> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            for j in (i..=limit).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
            }
        }
    }
    let mut omega = vec![0u8; limit + 1];
    for m in 2..=limit {
        let p = spf[m] as usize;
        let mut rest = m / p;
        while rest.is_multiple_of(p) {
            rest /= p;
        }
        omega[m] = omega[rest] + 1;
    }
    omega
}

/// Prints one result line and passes the verdict through.
pub fn verdict(id: &str, ok: bool, detail: impl AsRef<str>) -> bool {
    println!(
        "criterion {id}: {} {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    ok
}
