//! Range sweeps: Carmichael enumeration and the half-liar characterization
//! check.
//!
//! Ranges are cut into blocks of [`BLOCK_SIZE`] aligned integers. Blocks are
//! processed in waves on a dedicated worker pool and merged strictly in block
//! order, so every result is independent of the worker count.

use std::num::NonZeroUsize;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::is_special_carmichael;
use crate::error::{Error, Result};
use crate::factor::{factor_range, small_primes, RANGE_FACTOR_LIMIT};
use crate::liars::{census_with_bound, monier_euler_liar_count, DEFAULT_CENSUS_BOUND};

pub const BLOCK_SIZE: u64 = 10_000;

/// Upper limit for [`enumerate_carmichael`] and friends.
pub const ENUMERATION_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CarmichaelKind {
    Carmichael,
    SpecialCarmichael,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiarCountMode {
    /// exhaustive census of every base
    BruteForce,
    /// closed form from the factorization
    Monier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub workers: usize,
    pub census_bound: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            workers: std::thread::available_parallelism().map_or(1, NonZeroUsize::get),
            census_bound: DEFAULT_CENSUS_BOUND,
        }
    }
}

impl SweepOptions {
    pub fn with_workers(workers: usize) -> Self {
        SweepOptions {
            workers,
            ..Default::default()
        }
    }
}

/// Reported after each block is merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockProgress {
    pub blocks_done: usize,
    pub blocks_total: usize,
}

/// `[lo, hi)` windows aligned to multiples of the block size.
fn blocks(lo: u64, hi_exclusive: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = lo;
    while start < hi_exclusive {
        let end = ((start / BLOCK_SIZE + 1) * BLOCK_SIZE).min(hi_exclusive);
        out.push((start, end));
        start = end;
    }
    out
}

/// Runs `work` on every block and hands the results to `merge` in block order.
fn sweep_blocks<T, W, M>(
    lo: u64,
    hi_exclusive: u64,
    workers: usize,
    progress: &mut dyn FnMut(BlockProgress),
    work: W,
    mut merge: M,
) -> Result<()>
where
    T: Send,
    W: Fn(u64, u64) -> Result<T> + Sync,
    M: FnMut(T),
{
    if workers == 0 {
        return Err(Error::usage("worker count must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::usage(format!("cannot start worker pool: {e}")))?;
    let all = blocks(lo, hi_exclusive);
    let total = all.len();
    let mut done = 0;
    for wave in all.chunks(workers * 4) {
        let results: Vec<Result<T>> =
            pool.install(|| wave.par_iter().map(|&(a, b)| work(a, b)).collect());
        for r in results {
            merge(r?);
            done += 1;
            progress(BlockProgress {
                blocks_done: done,
                blocks_total: total,
            });
        }
    }
    Ok(())
}

/// Korselt test for every odd `n` in `[lo, hi)` without building
/// factorizations: primes up to `sqrt(hi)` are sieved out of a residual
/// array, and the leftover cofactor is the one remaining large prime.
fn korselt_block(lo: u64, hi: u64, kind: CarmichaelKind) -> Vec<u64> {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut alive: Vec<bool> = (lo..hi).map(|n| n & 1 == 1 && n >= 3).collect();
    let mut distinct = vec![0u8; len];
    let target = |n: u64| match kind {
        CarmichaelKind::Carmichael => n - 1,
        CarmichaelKind::SpecialCarmichael => (n - 1) / 2,
    };
    let max = hi - 1;
    for &p in &small_primes()[1..] {
        if p * p > max {
            break;
        }
        let mut first = lo.div_ceil(p) * p;
        if first & 1 == 0 {
            first += p;
        }
        let mut idx = (first - lo) as usize;
        while idx < len {
            if alive[idx] {
                let n = lo + idx as u64;
                rem[idx] /= p;
                if rem[idx].is_multiple_of(p) || target(n) % (p - 1) != 0 {
                    alive[idx] = false;
                } else {
                    distinct[idx] += 1;
                }
            }
            idx += 2 * p as usize;
        }
    }
    (0..len)
        .filter(|&i| alive[i])
        .filter_map(|i| {
            let n = lo + i as u64;
            let mut count = distinct[i];
            let r = rem[i];
            if r > 1 {
                if target(n) % (r - 1) != 0 {
                    return None;
                }
                count += 1;
            }
            (count >= 2).then_some(n)
        })
        .collect()
}

fn check_limit(limit: u64) -> Result<()> {
    if limit > ENUMERATION_LIMIT {
        return Err(Error::range("enumeration limit exceeds 10^9"));
    }
    Ok(())
}

/// Streams every number of `kind` up to `limit` to `sink`, in increasing order.
/// Returns how many were found.
pub fn enumerate_streaming(
    kind: CarmichaelKind,
    limit: u64,
    opts: &SweepOptions,
    progress: &mut dyn FnMut(BlockProgress),
    sink: &mut dyn FnMut(u64),
) -> Result<u64> {
    check_limit(limit)?;
    let mut count = 0;
    sweep_blocks(
        3,
        limit.saturating_add(1).max(3),
        opts.workers,
        progress,
        |a, b| Ok(korselt_block(a, b, kind)),
        |found: Vec<u64>| {
            count += found.len() as u64;
            found.into_iter().for_each(&mut *sink);
        },
    )?;
    Ok(count)
}

pub fn enumerate_kind(kind: CarmichaelKind, limit: u64, opts: &SweepOptions) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    enumerate_streaming(kind, limit, opts, &mut |_| {}, &mut |n| out.push(n))?;
    Ok(out)
}

/// All Carmichael numbers `<= limit`, ascending.
pub fn enumerate_carmichael(limit: u64) -> Result<Vec<u64>> {
    enumerate_kind(CarmichaelKind::Carmichael, limit, &SweepOptions::default())
}

/// All special Carmichael numbers `<= limit`, ascending.
pub fn enumerate_special_carmichael(limit: u64) -> Result<Vec<u64>> {
    enumerate_kind(CarmichaelKind::SpecialCarmichael, limit, &SweepOptions::default())
}

/// Liar count and classification of one odd composite in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiarRecord {
    pub n: u64,
    pub phi: u64,
    pub euler_liars: u64,
    pub special_carmichael: bool,
}

impl LiarRecord {
    /// Whether the record agrees with "exactly half the units are liars iff
    /// special Carmichael".
    pub fn consistent(&self) -> bool {
        (2 * self.euler_liars == self.phi) == self.special_carmichael
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub lo: u64,
    pub hi: u64,
    pub mode: LiarCountMode,
    /// odd composites examined
    pub checked: u64,
    pub violations: Vec<LiarRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn check_sweep_range(lo: u64, hi: u64, mode: LiarCountMode, opts: &SweepOptions) -> Result<()> {
    if lo < 9 {
        return Err(Error::usage("sweep must start at 9 or above"));
    }
    if lo > hi {
        return Err(Error::usage(format!("empty range: {lo} > {hi}")));
    }
    if hi >= RANGE_FACTOR_LIMIT {
        return Err(Error::range("sweep limited to n < 10^10"));
    }
    if mode == LiarCountMode::BruteForce && hi > opts.census_bound {
        return Err(Error::usage(format!(
            "brute-force sweep needs hi <= census bound {}",
            opts.census_bound
        )));
    }
    Ok(())
}

fn liar_block(lo: u64, hi: u64, mode: LiarCountMode, bound: u64) -> Result<Vec<LiarRecord>> {
    factor_range(lo, hi)?
        .into_iter()
        .filter(|f| f.n() & 1 == 1 && !f.is_prime())
        .map(|f| {
            let euler_liars = match mode {
                LiarCountMode::BruteForce => census_with_bound(f.n(), bound)?.euler_liars,
                LiarCountMode::Monier => monier_euler_liar_count(&f)?.closed_form_count,
            };
            Ok(LiarRecord {
                n: f.n(),
                phi: f.euler_phi(),
                euler_liars,
                special_carmichael: is_special_carmichael(&f),
            })
        })
        .collect()
}

/// Per-`n` Euler liar counts for every odd composite in `[lo, hi]`.
pub fn liar_counts(lo: u64, hi: u64, mode: LiarCountMode, opts: &SweepOptions) -> Result<Vec<LiarRecord>> {
    check_sweep_range(lo, hi, mode, opts)?;
    let mut out = Vec::new();
    sweep_blocks(
        lo,
        hi + 1,
        opts.workers,
        &mut |_| {},
        |a, b| liar_block(a, b, mode, opts.census_bound),
        |recs| out.extend(recs),
    )?;
    Ok(out)
}

/// Checks, for every odd composite `n` in `[lo, hi]`, that exactly half of
/// the units are Euler liars precisely when `n` is a special Carmichael
/// number.
pub fn verify_characterization(
    lo: u64,
    hi: u64,
    mode: LiarCountMode,
    opts: &SweepOptions,
    progress: &mut dyn FnMut(BlockProgress),
) -> Result<SweepReport> {
    check_sweep_range(lo, hi, mode, opts)?;
    let started = Instant::now();
    let mut checked = 0;
    let mut violations = Vec::new();
    sweep_blocks(
        lo,
        hi + 1,
        opts.workers,
        progress,
        |a, b| liar_block(a, b, mode, opts.census_bound),
        |recs| {
            checked += recs.len() as u64;
            violations.extend(recs.into_iter().filter(|r| !r.consistent()));
        },
    )?;
    Ok(SweepReport {
        lo,
        hi,
        mode,
        checked,
        violations,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::is_carmichael;
    use crate::factor::factorize;

    fn brute(limit: u64, special: bool) -> Vec<u64> {
        (3..=limit)
            .step_by(2)
            .filter(|&n| {
                let f = factorize(n).unwrap();
                if special {
                    is_special_carmichael(&f)
                } else {
                    is_carmichael(&f)
                }
            })
            .collect()
    }

    #[test]
    fn carmichael_examples() {
        assert!(enumerate_carmichael(500).unwrap().is_empty());
        assert_eq!(enumerate_carmichael(600).unwrap(), [561]);
        let l = enumerate_carmichael(2000).unwrap();
        assert!(l.contains(&561) && l.contains(&1105) && l.contains(&1729));
        assert!(enumerate_carmichael(ENUMERATION_LIMIT + 1).is_err());
        assert!(enumerate_carmichael(0).unwrap().is_empty());
    }

    #[test]
    fn special_examples() {
        assert!(enumerate_special_carmichael(1728).unwrap().is_empty());
        assert_eq!(enumerate_special_carmichael(2465).unwrap(), [1729, 2465]);
    }

    #[test]
    fn block_sieve_matches_factorization() {
        assert_eq!(enumerate_carmichael(200_000).unwrap(), brute(200_000, false));
        assert_eq!(enumerate_special_carmichael(200_000).unwrap(), brute(200_000, true));
    }

    #[test]
    fn blocks_cover_range() {
        assert_eq!(blocks(9, 25_001), [(9, 10_000), (10_000, 20_000), (20_000, 25_001)]);
        assert!(blocks(5, 5).is_empty());
    }

    #[test]
    fn single_point_sweep() {
        let r = verify_characterization(1729, 1729, LiarCountMode::BruteForce, &SweepOptions::default(), &mut |_| {})
            .unwrap();
        assert_eq!((r.checked, r.violations.len()), (1, 0));
        let recs = liar_counts(1729, 1729, LiarCountMode::BruteForce, &SweepOptions::default()).unwrap();
        assert_eq!(recs[0].euler_liars, 648);
        assert_eq!(recs[0].phi, 1296);
    }

    #[test]
    fn sweep_usage_errors() {
        let o = SweepOptions::default();
        let p = &mut |_| {};
        assert!(matches!(verify_characterization(10, 9, LiarCountMode::Monier, &o, p), Err(Error::Usage(_))));
        assert!(matches!(verify_characterization(3, 99, LiarCountMode::Monier, &o, p), Err(Error::Usage(_))));
        assert!(matches!(
            verify_characterization(9, 2_000_000, LiarCountMode::BruteForce, &o, p),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            verify_characterization(9, 99, LiarCountMode::Monier, &SweepOptions::with_workers(0), p),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn progress_reports_every_block() {
        let mut seen = Vec::new();
        verify_characterization(9, 29_999, LiarCountMode::Monier, &SweepOptions::with_workers(2), &mut |p| {
            seen.push(p)
        })
        .unwrap();
        assert_eq!(seen.len(), 3);
        assert_eq!(seen.last().unwrap().blocks_done, 3);
        assert!(seen.iter().all(|p| p.blocks_total == 3));
    }
}
