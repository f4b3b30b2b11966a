//! Seeded Solovay-Strassen primality testing.

use serde::{Deserialize, Serialize};

use crate::classify::WitnessCertificate;
use crate::error::{Error, Result};
use crate::liars::euler_congruence_holds;
use crate::modmath::{gcd, MAX_MODULUS};

/// SplitMix64 (Steele, Lea and Flood 2014; reference code by Vigna).
///
/// The state advances by the golden-ratio increment `0x9E3779B97F4A7C15` and
/// each output is the state passed through the variant-13 finalizer
/// (shifts 30/27/31, multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`).
/// Seeded with 1234567 the first outputs are 6457827717110365317,
/// 3203168211198807973, 9817491932198370423.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[lo, hi]` by rejection, free of modulo bias.
    pub fn uniform_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        let span = hi - lo;
        if span == u64::MAX {
            return self.next_u64();
        }
        let size = span + 1;
        // largest multiple of `size` that fits in 2^64
        let zone = u64::MAX - (u64::MAX - size + 1) % size;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return lo + x % size;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestVerdict {
    Composite,
    ProbablyPrime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub n: u64,
    pub verdict: TestVerdict,
    pub rounds_run: u32,
    pub witness: Option<WitnessCertificate>,
    pub seed: u64,
}

fn check_input(n: u64) -> Result<()> {
    if n & 1 == 0 {
        return Err(Error::domain("n must be odd"));
    }
    if n < 3 {
        return Err(Error::domain("n must be at least 3"));
    }
    if n > MAX_MODULUS {
        return Err(Error::range("n exceeds 2^62"));
    }
    Ok(())
}

/// Runs up to `rounds` Solovay-Strassen rounds with bases drawn uniformly
/// from `[2, n - 1]`.
///
/// A base sharing a factor with `n` or failing `a^((n-1)/2) = (a/n)` ends
/// the test with a certificate. A composite survives all rounds with
/// probability at most `2^-rounds`.
pub fn solovay_strassen(n: u64, rounds: u32, seed: u64) -> Result<TestOutcome> {
    check_input(n)?;
    if rounds == 0 {
        return Err(Error::usage("rounds must be positive"));
    }
    let mut rng = SplitMix64::new(seed);
    for round in 1..=rounds {
        let a = rng.uniform_inclusive(2, n - 1);
        if let Some(w) = WitnessCertificate::euler(n, a) {
            return Ok(TestOutcome {
                n,
                verdict: TestVerdict::Composite,
                rounds_run: round,
                witness: Some(w),
                seed,
            });
        }
    }
    Ok(TestOutcome {
        n,
        verdict: TestVerdict::ProbablyPrime,
        rounds_run: rounds,
        witness: None,
        seed,
    })
}

/// Empirical liar rate over sampled units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiarSample {
    pub n: u64,
    /// all bases drawn from `[2, n - 1]`
    pub draws: u64,
    /// draws coprime to `n`
    pub unit_draws: u64,
    /// unit draws satisfying the Euler congruence
    pub liar_draws: u64,
}

impl LiarSample {
    pub fn liar_fraction(&self) -> f64 {
        self.liar_draws as f64 / self.unit_draws as f64
    }
}

/// Draws bases with the same sampler as [`solovay_strassen`] until `units`
/// coprime bases have been seen, counting how many are Euler liars.
pub fn sample_liar_fraction(n: u64, units: u64, seed: u64) -> Result<LiarSample> {
    check_input(n)?;
    let mut rng = SplitMix64::new(seed);
    let mut s = LiarSample {
        n,
        draws: 0,
        unit_draws: 0,
        liar_draws: 0,
    };
    while s.unit_draws < units {
        let a = rng.uniform_inclusive(2, n - 1);
        s.draws += 1;
        if gcd(a, n) != 1 {
            continue;
        }
        s.unit_draws += 1;
        if euler_congruence_holds(a, n) {
            s.liar_draws += 1;
        }
    }
    Ok(s)
}
