//! Primality, factorization and multiplicative functions up to 2^62.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modmath::{gcd, mul_mod, pow_mod, MAX_MODULUS};

/// Trial division covers every prime below this bound before rho takes over.
pub const TRIAL_DIVISION_BOUND: u64 = 100_000;

/// Largest `hi` accepted by [`factor_range`]; its square root stays below
/// [`TRIAL_DIVISION_BOUND`].
pub const RANGE_FACTOR_LIMIT: u64 = TRIAL_DIVISION_BOUND * TRIAL_DIVISION_BOUND;

// Deterministic Miller-Rabin witness set for every 64-bit input.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub(crate) fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let bound = TRIAL_DIVISION_BOUND as usize;
        let mut composite = vec![false; bound];
        let mut primes = Vec::new();
        for i in 2..bound {
            if !composite[i] {
                primes.push(i as u64);
                for j in (i * i..bound).step_by(i) {
                    composite[j] = true;
                }
            }
        }
        primes
    })
}

/// An integer `n >= 2` with its prime factorization in increasing prime order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Builds a factorization from explicit `(prime, multiplicity)` pairs,
    /// checking every structural invariant.
    pub fn new(n: u64, factors: Vec<(u64, u32)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("factored integer must be at least 2"));
        }
        if factors.is_empty() {
            return Err(Error::domain("factor list is empty"));
        }
        let mut product: u64 = 1;
        let mut last = 0;
        for &(p, k) in &factors {
            if p <= last {
                return Err(Error::domain("primes must be strictly increasing"));
            }
            if k == 0 {
                return Err(Error::domain("multiplicities must be positive"));
            }
            if !is_prime(p) {
                return Err(Error::domain(format!("{p} is not prime")));
            }
            for _ in 0..k {
                product = product
                    .checked_mul(p)
                    .ok_or_else(|| Error::domain("factor product overflows"))?;
            }
            last = p;
        }
        if product != n {
            return Err(Error::domain(format!("factors multiply to {product}, not {n}")));
        }
        Ok(FactoredInteger { n, factors })
    }

    pub(crate) fn from_trusted(n: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert_eq!(
            factors.iter().map(|&(p, k)| p.pow(k)).product::<u64>(),
            n
        );
        FactoredInteger { n, factors }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, k)| p.pow(k)).product()
    }

    /// Euler's totient, `prod p^(k-1) (p - 1)`.
    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, k)| p.pow(k - 1) * (p - 1))
            .product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, k)| k == 1)
    }
}

/// Exact primality for every `u64`.
///
/// Trial division by the primes below 40, then a strong-pseudoprime test to
/// the first twelve prime bases, which has no 64-bit counterexample.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let odd = d >> s;
    'bases: for a in MR_BASES {
        let mut x = pow_mod(a, odd, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Integer square root check; 0 and 1 count as squares.
pub fn is_perfect_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}

fn cache() -> &'static RwLock<HashMap<u64, FactoredInteger>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, FactoredInteger>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Complete factorization of `2 <= n <= 2^62`.
pub fn factorize(n: u64) -> Result<FactoredInteger> {
    factorize_inner(n, None)
}

/// Like [`factorize`], but gives up with [`Error::FactorizationTimeout`]
/// once `budget` has elapsed.
pub fn factorize_with_budget(n: u64, budget: Duration) -> Result<FactoredInteger> {
    factorize_inner(n, Some(Instant::now() + budget))
}

fn factorize_inner(n: u64, deadline: Option<Instant>) -> Result<FactoredInteger> {
    if n < 2 {
        return Err(Error::domain("can only factor integers >= 2"));
    }
    if n > MAX_MODULUS {
        return Err(Error::range("integer exceeds 2^62"));
    }
    if let Some(hit) = cache().read().get(&n) {
        return Ok(hit.clone());
    }

    let mut factors = Vec::new();
    let mut rem = n;
    for &p in small_primes() {
        if p * p > rem {
            break;
        }
        if rem.is_multiple_of(p) {
            let mut k = 0;
            while rem.is_multiple_of(p) {
                rem /= p;
                k += 1;
            }
            factors.push((p, k));
        }
    }
    if rem == 1 {
        return Ok(FactoredInteger::from_trusted(n, factors));
    }
    if rem < TRIAL_DIVISION_BOUND * TRIAL_DIVISION_BOUND || is_prime(rem) {
        factors.push((rem, 1));
        return Ok(FactoredInteger::from_trusted(n, factors));
    }

    // Every remaining prime factor exceeds the trial bound.
    let mut large = Vec::new();
    split_cofactor(rem, deadline, &mut large).map_err(|_| Error::FactorizationTimeout { n })?;
    large.sort_unstable();
    for p in large {
        match factors.last_mut() {
            Some((q, k)) if *q == p => *k += 1,
            _ => factors.push((p, 1)),
        }
    }
    let f = FactoredInteger::from_trusted(n, factors);
    cache().write().insert(n, f.clone());
    Ok(f)
}

struct Timeout;

fn split_cofactor(n: u64, deadline: Option<Instant>, out: &mut Vec<u64>) -> std::result::Result<(), Timeout> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    let r = n.isqrt();
    if r * r == n {
        split_cofactor(r, deadline, out)?;
        return split_cofactor(r, deadline, out);
    }
    let d = pollard_brent(n, deadline)?;
    split_cofactor(d, deadline, out)?;
    split_cofactor(n / d, deadline, out)
}

/// Brent's cycle-finding variant of Pollard rho on `x^2 + c`.
///
/// Restarts with `c + 1` whenever a cycle closes without a proper factor, so
/// the result is a deterministic function of `n`.
fn pollard_brent(n: u64, deadline: Option<Instant>) -> std::result::Result<u64, Timeout> {
    const BATCH: u64 = 128;
    let step = |x: u64, c: u64| (mul_mod(x, x, n) + c) % n;
    for c in 1.. {
        let mut y = 2;
        let mut x = y;
        let mut ys = y;
        let mut q = 1;
        let mut g = 1;
        let mut r = 1u64;
        while g == 1 {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(Timeout);
            }
            x = y;
            for _ in 0..r {
                y = step(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // The batch overshot; replay it one step at a time.
            loop {
                ys = step(ys, c);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Ok(g);
        }
    }
    unreachable!()
}

/// Factors every integer in `[lo, hi)` with a segmented sieve.
///
/// Requires `2 <= lo` and `hi <= RANGE_FACTOR_LIMIT`; intended for the
/// block-sized windows used by the sweeps.
pub fn factor_range(lo: u64, hi: u64) -> Result<Vec<FactoredInteger>> {
    if lo < 2 {
        return Err(Error::domain("range must start at 2 or above"));
    }
    if hi > RANGE_FACTOR_LIMIT {
        return Err(Error::range("range factorization is limited to 10^10"));
    }
    if hi <= lo {
        return Ok(Vec::new());
    }
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut factors: Vec<Vec<(u64, u32)>> = vec![Vec::new(); len];
    let max = hi - 1;
    for &p in small_primes() {
        if p * p > max {
            break;
        }
        let first = lo.div_ceil(p) * p;
        let mut idx = (first - lo) as usize;
        while idx < len {
            let mut k = 0;
            while rem[idx].is_multiple_of(p) {
                rem[idx] /= p;
                k += 1;
            }
            factors[idx].push((p, k));
            idx += p as usize;
        }
    }
    Ok(factors
        .into_iter()
        .zip(rem)
        .enumerate()
        .map(|(i, (mut f, r))| {
            if r > 1 {
                f.push((r, 1));
            }
            FactoredInteger::from_trusted(lo + i as u64, f)
        })
        .collect())
}
