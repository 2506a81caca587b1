//! Exact modular and prime arithmetic.
//!
//! Everything here works on `u64` residues. Products go through `u128`, so
//! nothing wraps; results that do not fit back into `u64` are reported as
//! [`Error::Overflow`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest modulus the sequence machinery accepts.
pub const MIN_MODULUS: u64 = 5;

/// The cyclic group Z/n with a few cached facts about n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupContext {
    n: u64,
    coprime6: bool,
    unit_count: u64,
}

impl GroupContext {
    pub fn new(n: u64) -> Result<Self> {
        if n < MIN_MODULUS {
            return Err(Error::UnsupportedModulus {
                n,
                min: MIN_MODULUS,
            });
        }
        Ok(Self {
            n,
            coprime6: !n.is_multiple_of(2) && !n.is_multiple_of(3),
            unit_count: euler_phi(n),
        })
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `gcd(n, 6) = 1`.
    #[inline]
    pub fn coprime6(&self) -> bool {
        self.coprime6
    }

    #[inline]
    pub fn unit_count(&self) -> u64 {
        self.unit_count
    }

    #[inline]
    pub fn is_unit(&self, u: u64) -> bool {
        !u.is_multiple_of(self.n) && gcd(u, self.n) == 1
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least nonnegative residue of `x` modulo `y`.
pub fn reduce(x: i64, y: u64) -> Result<u64> {
    if y == 0 {
        return Err(Error::InvalidModulus(y));
    }
    Ok((x as i128).rem_euclid(y as i128) as u64)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    if (a | b) >> 32 == 0 {
        a * b % n
    } else {
        ((a as u128 * b as u128) % n as u128) as u64
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` in (Z/n)*, in `[1, n)` (or 0 when n = 1).
pub fn mod_inverse(a: i64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidModulus(n));
    }
    let a = reduce(a, n)?;
    let (g, x, _) = ext_gcd(a as i128, n as i128);
    if g != 1 {
        return Err(Error::NonUnit { a, n });
    }
    Ok(x.rem_euclid(n as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

/// All `u` in `[1, n)` with `gcd(u, n) = 1`, ascending.
pub fn units(n: u64) -> Result<Vec<u64>> {
    if n < 2 {
        return Err(Error::UnsupportedModulus { n, min: 2 });
    }
    Ok((1..n).filter(|&u| gcd(u, n) == 1).collect())
}

/// Distinct prime factors of `n` by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    distinct_prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

/// Units of Z/n together with their inverses, for hot loops that scan
/// every generator.
#[derive(Debug, Clone)]
pub struct UnitTable {
    n: u64,
    units: Vec<u64>,
    // inverse[u] for units u, 0 elsewhere
    inverse: Vec<u64>,
}

impl UnitTable {
    pub fn new(n: u64) -> Result<Self> {
        let units = units(n)?;
        let mut inverse = vec![0u64; n as usize];
        for &u in &units {
            if inverse[u as usize] == 0 {
                let v = mod_inverse(u as i64, n)?;
                inverse[u as usize] = v;
                inverse[v as usize] = u;
            }
        }
        Ok(Self { n, units, inverse })
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn units(&self) -> &[u64] {
        &self.units
    }

    /// Inverse of the unit `u`; `None` if `u` is not a unit.
    #[inline]
    pub fn inverse(&self, u: u64) -> Option<u64> {
        match self.inverse.get(u as usize) {
            Some(&0) | None => None,
            Some(&v) => Some(v),
        }
    }
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin; the fixed base set is exact for every `u64`.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if m.is_multiple_of(p) {
            return m == p;
        }
    }
    let mut d = m - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn check_interval_arg(big_n: u64) -> Result<()> {
    if big_n < 2 {
        return Err(Error::Domain(format!("N must be >= 2, got {big_n}")));
    }
    Ok(())
}

/// Smallest prime p with 2N < p < 3N.
pub fn prime_in_bertrand(big_n: u64) -> Result<Option<u64>> {
    check_interval_arg(big_n)?;
    let lo = big_n.checked_mul(2).ok_or(Error::Overflow("2N"))?;
    let hi = big_n.checked_mul(3).ok_or(Error::Overflow("3N"))?;
    Ok((lo + 1..hi).find(|&p| is_prime(p)))
}

/// Smallest prime p with N+1 <= p < 3(N+1)/2.
pub fn prime_in_half_open(big_n: u64) -> Result<Option<u64>> {
    check_interval_arg(big_n)?;
    let lo = big_n + 1;
    let hi3 = lo.checked_mul(3).ok_or(Error::Overflow("3(N+1)"))?;
    // p < 3(N+1)/2  <=>  2p < 3(N+1)
    Ok((lo..).take_while(|&p| 2 * p < hi3).find(|&p| is_prime(p)))
}

const SEGMENT: u64 = 1 << 18;

/// All primes `<= limit`, produced by a segmented sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = isqrt(limit);
    let base = simple_sieve(root);
    let mut out = Vec::new();
    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        seg[..len].fill(true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut m = start;
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        out.extend(
            seg[..len]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| lo + i as u64),
        );
        lo = hi + 1;
    }
    out
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut is_p = vec![true; limit + 1];
    is_p[0] = false;
    if limit >= 1 {
        is_p[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if is_p[i] {
            for j in (i * i..=limit).step_by(i) {
                is_p[j] = false;
            }
        }
        i += 1;
    }
    is_p.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

/// Outcome of sweeping both prime-interval statements over `2..=max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSweep {
    pub max: u64,
    pub checked: u64,
    /// N for which (2N, 3N) holds no prime.
    pub bertrand_failures: Vec<u64>,
    /// N for which [N+1, 3(N+1)/2) holds no prime.
    pub half_open_failures: Vec<u64>,
}

impl PrimeSweep {
    pub fn holds(&self) -> bool {
        self.bertrand_failures.is_empty() && self.half_open_failures.is_empty()
    }
}

/// Checks both interval statements for every `2 <= N <= max` against one
/// sieve of all primes below `3 * max`.
pub fn sweep_prime_intervals(max: u64) -> Result<PrimeSweep> {
    let limit = max.checked_mul(3).ok_or(Error::Overflow("3 * max"))?;
    let primes = primes_up_to(limit);
    let mut sweep = PrimeSweep {
        max,
        checked: 0,
        bertrand_failures: Vec::new(),
        half_open_failures: Vec::new(),
    };
    // first prime > 2N, and first prime >= N+1; both pointers only advance
    let (mut i, mut j) = (0usize, 0usize);
    for big_n in 2..=max {
        while i < primes.len() && primes[i] <= 2 * big_n {
            i += 1;
        }
        if !primes.get(i).is_some_and(|&p| p < 3 * big_n) {
            sweep.bertrand_failures.push(big_n);
        }
        while j < primes.len() && primes[j] < big_n + 1 {
            j += 1;
        }
        if !primes.get(j).is_some_and(|&p| 2 * p < 3 * (big_n + 1)) {
            sweep.half_open_failures.push(big_n);
        }
        sweep.checked += 1;
    }
    Ok(sweep)
}
