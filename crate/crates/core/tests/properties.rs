mod common;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use common::{coprime6, naive_verify, orbit_min};
use zerosum_index::modarith::{mod_inverse, reduce, units, UnitTable};
use zerosum_index::singular::{is_singular, successor_branch, verify_singular_theorem};
use zerosum_index::verifier::{enumerate_minimal, verify_n, verify_range, LedgerEntry};
use zerosum_index::{Error, ZsSeq};

/// A zero-sum 4-tuple over a random modulus below `max_n`, elements nonzero.
fn zero_sum4(max_n: u64) -> impl Strategy<Value = ZsSeq> {
    (5u64..max_n)
        .prop_flat_map(|n| (Just(n), prop::array::uniform3(1..n)))
        .prop_filter_map("last element would be 0", |(n, [a, b, c])| {
            let d = (3 * n - a - b - c) % n;
            (d != 0).then(|| ZsSeq::from_residues(n, &[a, b, c, d]).unwrap())
        })
}

/// As `zero_sum4`, restricted to moduli of the form 6m ± 1.
fn zero_sum4_coprime6(max_m: u64) -> impl Strategy<Value = ZsSeq> {
    (1u64..max_m, any::<bool>())
        .prop_map(|(m, plus)| if plus { 6 * m + 1 } else { 6 * m - 1 })
        .prop_flat_map(|n| (Just(n), prop::array::uniform3(1..n)))
        .prop_filter_map("last element would be 0", |(n, [a, b, c])| {
            let d = (3 * n - a - b - c) % n;
            (d != 0).then(|| ZsSeq::from_residues(n, &[a, b, c, d]).unwrap())
        })
}

fn random_unit(n: u64, seed: u64) -> u64 {
    let us = units(n).unwrap();
    us[(seed % us.len() as u64) as usize]
}

proptest! {
    #[test]
    fn reduce_is_least_residue(x in any::<i64>(), y in 1u64..u64::MAX) {
        let r = reduce(x, y).unwrap();
        prop_assert!(r < y);
        prop_assert_eq!((x as i128 - r as i128).rem_euclid(y as i128), 0);
    }

    #[test]
    fn inverse_round_trip(n in 2u64..1_000_000, seed in any::<u64>()) {
        let a = (seed % (n - 1)) + 1;
        match mod_inverse(a as i64, n) {
            Ok(v) => {
                prop_assert_eq!((a as u128 * v as u128 % n as u128) as u64, 1);
                prop_assert_eq!(mod_inverse(v as i64, n).unwrap(), a);
            }
            Err(Error::NonUnit { .. }) => prop_assert!(common::gcd(a, n) != 1),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn norm_duality(s in zero_sum4(2000), seed in any::<u64>()) {
        let g = random_unit(s.n(), seed);
        let sum = s.g_norm(g).unwrap() + s.g_norm(s.n() - g).unwrap();
        prop_assert_eq!(sum, num_rational::Ratio::from_integer(4));
    }

    #[test]
    fn coefficient_identity(s in zero_sum4(2000), seed in any::<u64>()) {
        let g = random_unit(s.n(), seed);
        let inv = mod_inverse(g as i64, s.n()).unwrap();
        let lhs = s.g_norm(inv).unwrap() * num_rational::Ratio::from_integer(s.n());
        prop_assert_eq!(lhs, num_rational::Ratio::from_integer(s.residue_sum(g).unwrap()));
    }

    #[test]
    fn unit_action_preserves_index_and_minimality(s in zero_sum4(200), seed in any::<u64>()) {
        let u = random_unit(s.n(), seed);
        let t = s.unit_transform(u).unwrap();
        prop_assert_eq!(t.is_minimal_zero_sum(), s.is_minimal_zero_sum());
        prop_assert_eq!(
            t.index_with_witness().unwrap().index,
            s.index_with_witness().unwrap().index
        );
    }

    #[test]
    fn index_result_is_consistent(s in zero_sum4(500)) {
        let r = s.index_with_witness().unwrap();
        prop_assert_eq!(r.norms[&r.witness], r.index);
        prop_assert_eq!(*r.norms.values().min().unwrap(), r.index);
        prop_assert!(r.norms.iter().all(|(&g, &v)| g >= r.witness || v > r.index));
        for (&g, &v) in &r.norms {
            prop_assert_eq!(v + r.norms[&(s.n() - g)], 4);
        }
    }

    #[test]
    fn two_large_residues_when_index_two(s in zero_sum4_coprime6(50), seed in any::<u64>()) {
        let u = random_unit(s.n(), seed);
        if s.count_large_residues(u).unwrap() != 2 && s.is_minimal_zero_sum() {
            prop_assert_ne!(s.index_with_witness().unwrap().index, 2);
        }
    }
}

#[test]
fn repeated_unit_element_forces_index_one() {
    // minimal, gcd(n, 6) = 1, all elements units, some element repeated
    for n in (5..=120u64).filter(|&n| coprime6(n)) {
        let table = UnitTable::new(n).unwrap();
        for s in enumerate_minimal(n, false).unwrap() {
            let e = s.elems();
            let units_only = e.iter().all(|&x| common::gcd(x, n) == 1);
            let repeated = e.windows(2).any(|w| w[0] == w[1]);
            if units_only && repeated {
                assert_eq!(s.index_early_exit(&table).unwrap().0, 1, "{s}");
            }
        }
    }
}

fn orbit_size(n: u64, t: &[u64; 4]) -> usize {
    let images: BTreeSet<[u64; 4]> = (1..n)
        .filter(|&u| common::gcd(u, n) == 1)
        .map(|u| {
            let mut img = t.map(|x| u * x % n);
            img.sort_unstable();
            img
        })
        .collect();
    images.len()
}

#[test]
fn orbit_soundness() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(200);
    for n in 5..=200u64 {
        let reps: Vec<Vec<u64>> = enumerate_minimal(n, true)
            .unwrap()
            .map(|s| s.elems().to_vec())
            .collect();
        let rep_set: BTreeSet<Vec<u64>> = reps.iter().cloned().collect();
        assert_eq!(
            rep_set.len(),
            reps.len(),
            "duplicate representative, n = {n}"
        );
        // each representative is its own orbit minimum and the orbits
        // together cover every minimal sequence exactly once
        let mut covered = 0usize;
        for rep in &reps {
            let t: [u64; 4] = rep.as_slice().try_into().unwrap();
            assert_eq!(orbit_min(n, &t), t, "n = {n}");
            covered += orbit_size(n, &t);
        }
        assert_eq!(
            covered,
            enumerate_minimal(n, false).unwrap().count(),
            "n = {n}"
        );
        if n <= 80 {
            let mut seen = BTreeSet::new();
            for s in enumerate_minimal(n, false).unwrap() {
                let t: [u64; 4] = s.elems().try_into().unwrap();
                let rep = orbit_min(n, &t).to_vec();
                assert!(
                    rep_set.contains(&rep),
                    "n = {n}: {t:?} has no representative"
                );
                seen.insert(rep);
            }
            assert_eq!(seen, rep_set, "n = {n}");
        }
        if n <= 120 || coprime6(n) {
            let table = UnitTable::new(n).unwrap();
            let us = units(n).unwrap();
            for rep in &reps {
                let s = ZsSeq::from_residues(n, rep).unwrap();
                let idx = s.index_early_exit(&table).unwrap().0;
                for _ in 0..20 {
                    let u = us[rng.gen_range(0..us.len())];
                    let moved = s.unit_transform(u).unwrap();
                    assert_eq!(moved.index_early_exit(&table).unwrap().0, idx);
                    assert!(moved.is_minimal_zero_sum());
                }
            }
        }
    }
}

#[test]
fn oracle_equivalence_off_the_coprime_case() {
    // moduli sharing a factor with 6 have index-2 orbits; the dumps must
    // agree with the brute-force reference too
    for n in [6u64, 8, 9, 10, 12, 14, 15, 16, 18, 20, 21, 22, 24, 27, 30] {
        let mut fast = verify_n(n).unwrap();
        fast.elapsed_ms = 0;
        assert_eq!(fast, naive_verify(n), "n = {n}");
    }
}

#[test]
fn singular_successor_branch_has_x4_below_x2_or_index_one() {
    for n in (11..=400u64).filter(|&n| coprime6(n)) {
        let r = verify_singular_theorem(n).unwrap();
        assert!(r.x4_not_below_x2.is_empty());
        for t in successor_branch(n) {
            assert!(is_singular(&ZsSeq::from_residues(n, &t).unwrap()).unwrap());
        }
    }
}

#[test]
fn range_is_worker_independent() {
    let one = verify_range(5, 100, 1, None).unwrap();
    let four = verify_range(5, 100, 4, None).unwrap();
    assert_eq!(one.records.len(), 32);
    let strip = |v: &[zerosum_index::verifier::VerifyRecord]| {
        v.iter()
            .map(|r| {
                let mut r = r.clone();
                r.elapsed_ms = 0;
                r
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&one.records), strip(&four.records));
    assert!(one.records.iter().all(|r| r.max_index == 1));
}

fn ledger_ns(path: &std::path::Path) -> Vec<u64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| serde_json::from_str::<LedgerEntry>(l).ok())
        .map(|e| e.record.n)
        .collect()
}

#[test]
fn checkpoint_resume_skips_completed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ledger.jsonl");

    // an interrupted run that finished only part of the range
    let first = verify_range(5, 40, 2, Some(&path)).unwrap();
    assert!(first.resumed.is_empty());
    assert_eq!(ledger_ns(&path).len(), first.records.len());

    let second = verify_range(5, 80, 3, Some(&path)).unwrap();
    assert_eq!(
        second.resumed,
        first.records.iter().map(|r| r.n).collect::<Vec<_>>()
    );
    let mut ns = ledger_ns(&path);
    let total = ns.len();
    ns.sort_unstable();
    ns.dedup();
    assert_eq!(ns.len(), total, "some modulus verified twice");
    assert_eq!(ns, (5..=80).filter(|&n| coprime6(n)).collect::<Vec<_>>());

    // nothing left to do
    let third = verify_range(5, 80, 1, Some(&path)).unwrap();
    assert_eq!(third.resumed.len(), second.records.len());
    assert_eq!(ledger_ns(&path).len(), total);
    assert_eq!(third.records, second.records);
}

#[test]
fn checkpoint_reports_corrupt_lines_and_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ledger.jsonl");
    verify_range(5, 30, 1, Some(&path)).unwrap();

    // damage the record for n = 7 and leave a torn final line
    let text = fs::read_to_string(&path).unwrap();
    let damaged: String = text
        .lines()
        .map(|l| {
            if l.contains("\"n\":7,") {
                l[..l.len() / 2].to_string()
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let mut f = fs::File::create(&path).unwrap();
    write!(f, "{damaged}\n{{\"schema_version\":1,\"n\":3").unwrap();
    drop(f);

    let run = verify_range(5, 30, 2, Some(&path)).unwrap();
    assert_eq!(run.corrupt_lines.len(), 2);
    assert!(!run.resumed.contains(&7));
    assert!(run.records.iter().any(|r| r.n == 7));
    // the re-verified record landed on its own line
    assert!(ledger_ns(&path).contains(&7));
    let again = verify_range(5, 30, 1, Some(&path)).unwrap();
    assert!(again.resumed.contains(&7));
}

#[test]
fn checkpoint_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("ledger.jsonl");
    assert!(matches!(
        verify_range(5, 20, 1, Some(&path)),
        Err(Error::Checkpoint { .. })
    ));
}
