//! Counting Fermat and Euler liars for a single odd composite modulus.
//!
//! [`census`] enumerates the whole unit group; [`monier_euler_liar_count`]
//! evaluates the closed-form count from the factorization alone. The two are
//! computed independently so each can check the other.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{is_prime, FactoredInteger};
use crate::modmath::{dyadic_valuation, gcd, jacobi_unchecked, mul_mod, pow_mod, Barrett32};

/// Default cap on `n` for exhaustive enumeration.
pub const DEFAULT_CENSUS_BOUND: u64 = 1_000_000;

/// Exact liar statistics for one odd composite `n`, over the units mod `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiarCensus {
    pub n: u64,
    pub phi: u64,
    /// `a^(n-1) = 1`
    pub fermat_liars: u64,
    /// `a^((n-1)/2) = (a/n)`
    pub euler_liars: u64,
    /// `a^((n-1)/2) = +-1`
    pub b_count: u64,
    /// `a^((n-1)/2) = 1`
    pub b_plus_count: u64,
    /// `(a/n) = 1`
    pub p_count: u64,
    /// `(a/n) = -1`
    pub n_count: u64,
}

fn check_odd_composite(n: u64) -> Result<()> {
    if n & 1 == 0 {
        return Err(Error::domain("n must be odd"));
    }
    if n < 9 || is_prime(n) {
        return Err(Error::domain(format!("{n} is not an odd composite")));
    }
    Ok(())
}

fn check_unit(a: u64, n: u64) -> Result<()> {
    if n < 3 || n & 1 == 0 {
        return Err(Error::domain("n must be odd and >= 3"));
    }
    if gcd(a, n) != 1 {
        return Err(Error::domain(format!("gcd({a}, {n}) != 1")));
    }
    Ok(())
}

/// Whether `a^((n-1)/2)` matches the Jacobi symbol `(a/n)` modulo `n`.
pub fn is_euler_liar(a: u64, n: u64) -> Result<bool> {
    check_unit(a, n)?;
    Ok(euler_congruence_holds(a, n))
}

/// Whether `a^(n-1) = 1 (mod n)`.
pub fn is_fermat_liar(a: u64, n: u64) -> Result<bool> {
    check_unit(a, n)?;
    Ok(pow_mod(a, n - 1, n) == 1)
}

#[inline]
pub(crate) fn symbol_residue(symbol: i8, n: u64) -> u64 {
    match symbol {
        1 => 1,
        -1 => n - 1,
        _ => 0,
    }
}

pub(crate) fn euler_congruence_holds(a: u64, n: u64) -> bool {
    pow_mod(a, (n - 1) / 2, n) == symbol_residue(jacobi_unchecked(a, n), n)
}

// Smallest-prime-factor table shared by every census up to the default bound.
fn shared_spf() -> &'static [u32] {
    static SPF: OnceLock<Vec<u32>> = OnceLock::new();
    SPF.get_or_init(|| spf_table(DEFAULT_CENSUS_BOUND as usize))
}

fn spf_table(len: usize) -> Vec<u32> {
    let mut spf = vec![0u32; len];
    for i in 2..len {
        if spf[i] == 0 {
            spf[i] = i as u32;
            if i * i < len {
                for j in (i * i..len).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
    }
    spf
}

/// Exhaustive census of `U(Z/nZ)` with the default bound.
pub fn census(n: u64) -> Result<LiarCensus> {
    census_with_bound(n, DEFAULT_CENSUS_BOUND)
}

/// Exhaustive census of `U(Z/nZ)`, refusing `n > bound`.
///
/// Every base in `[1, n)` is evaluated. Both `a -> a^((n-1)/2) mod n` and
/// `a -> (a/n)` are completely multiplicative in `a`, so a base with smallest
/// prime factor `p < a` is evaluated as the product of the values at `p` and
/// `a / p`; only prime bases pay for a full exponentiation.
pub fn census_with_bound(n: u64, bound: u64) -> Result<LiarCensus> {
    check_odd_composite(n)?;
    if n > bound {
        return Err(Error::domain(format!(
            "{n} exceeds the exhaustive census bound {bound}"
        )));
    }
    if n > u32::MAX as u64 {
        return Err(Error::range("census is limited to n < 2^32"));
    }
    let len = n as usize;
    let local;
    let spf: &[u32] = if n <= DEFAULT_CENSUS_BOUND {
        shared_spf()
    } else {
        local = spf_table(len);
        &local
    };

    let m = (n - 1) / 2;
    let reducer = Barrett32::new(n);
    let mut half = vec![0u32; len];
    let mut symbol = vec![0i8; len];
    half[1] = 1;
    symbol[1] = 1;
    for a in 2..len {
        let p = spf[a] as usize;
        if p == a {
            half[a] = pow_mod(a as u64, m, n) as u32;
            symbol[a] = jacobi_unchecked(a as u64, n);
        } else {
            let b = a / p;
            half[a] = reducer.mul(half[p] as u64, half[b] as u64) as u32;
            symbol[a] = symbol[p] * symbol[b];
        }
    }

    let mut c = LiarCensus {
        n,
        phi: 0,
        fermat_liars: 0,
        euler_liars: 0,
        b_count: 0,
        b_plus_count: 0,
        p_count: 0,
        n_count: 0,
    };
    for (&h, &s) in half[1..].iter().zip(&symbol[1..]) {
        if s != 0 {
            let h = h as u64;
            tally(&mut c, h, reducer.mul(h, h), s, n);
        }
    }
    Ok(c)
}

#[inline]
fn tally(c: &mut LiarCensus, half: u64, full: u64, symbol: i8, n: u64) {
    c.phi += 1;
    if full == 1 {
        c.fermat_liars += 1;
    }
    if half == symbol_residue(symbol, n) {
        c.euler_liars += 1;
    }
    if half == 1 {
        c.b_plus_count += 1;
        c.b_count += 1;
    } else if half == n - 1 {
        c.b_count += 1;
    }
    if symbol == 1 {
        c.p_count += 1;
    } else {
        c.n_count += 1;
    }
}

/// Number of units mod odd `n >= 3` with Jacobi symbol `+1` and `-1`,
/// counted over every base in `[1, n)`. Primes are allowed.
pub fn jacobi_sign_counts(n: u64) -> Result<(u64, u64)> {
    if n < 3 || n & 1 == 0 {
        return Err(Error::domain("n must be odd and >= 3"));
    }
    if n > DEFAULT_CENSUS_BOUND {
        return Err(Error::domain(format!(
            "{n} exceeds the exhaustive census bound {DEFAULT_CENSUS_BOUND}"
        )));
    }
    let spf = shared_spf();
    let len = n as usize;
    let mut symbol = vec![0i8; len];
    symbol[1] = 1;
    for a in 2..len {
        let p = spf[a] as usize;
        symbol[a] = if p == a {
            jacobi_unchecked(a as u64, n)
        } else {
            symbol[p] * symbol[a / p]
        };
    }
    let plus = symbol.iter().filter(|&&s| s == 1).count() as u64;
    let minus = symbol.iter().filter(|&&s| s == -1).count() as u64;
    Ok((plus, minus))
}

/// The same census computed base by base with a gcd test, one modular
/// exponentiation and one Jacobi symbol per unit. Slow; used to cross-check
/// [`census_with_bound`].
pub fn census_direct(n: u64) -> Result<LiarCensus> {
    check_odd_composite(n)?;
    let m = (n - 1) / 2;
    let mut c = LiarCensus {
        n,
        phi: 0,
        fermat_liars: 0,
        euler_liars: 0,
        b_count: 0,
        b_plus_count: 0,
        p_count: 0,
        n_count: 0,
    };
    for a in 1..n {
        if gcd(a, n) != 1 {
            continue;
        }
        let half = pow_mod(a, m, n);
        tally(&mut c, half, mul_mod(half, half, n), jacobi_unchecked(a, n), n);
    }
    Ok(c)
}

/// Which multiplier applies to the product of the row gcds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaClass {
    Half,
    One,
    Two,
}

/// Per-prime data for the closed-form count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonierRow {
    pub prime: u64,
    pub multiplicity: u32,
    /// dyadic valuation of `prime - 1`
    pub e: u32,
    /// `gcd((n-1)/2, prime - 1)`
    pub g: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonierProfile {
    pub n: u64,
    /// `(n - 1) / 2`
    pub m: u64,
    /// dyadic valuation of `m`
    pub v: u32,
    pub rows: Vec<MonierRow>,
    pub delta_class: DeltaClass,
    pub closed_form_count: u64,
}

/// Closed-form number of Euler liars for an odd composite `n`.
///
/// With `m = (n-1)/2` and `v = v2(m)` the count is `delta * prod gcd(m, p_i - 1)`
/// where `delta` is
/// * 1/2 if some prime with odd multiplicity has `v2(p_i - 1) <= v`,
/// * 2 if every prime has `v2(p_i - 1) > v` and the primes of odd
///   multiplicity with `v2(p_i - 1) = v + 1` are odd in number,
/// * 1 otherwise.
pub fn monier_euler_liar_count(f: &FactoredInteger) -> Result<MonierProfile> {
    let n = f.n();
    if n & 1 == 0 {
        return Err(Error::domain("n must be odd"));
    }
    if f.is_prime() {
        return Err(Error::domain(format!("{n} is prime")));
    }
    let m = (n - 1) / 2;
    let v = dyadic_valuation(m)?;
    let rows: Vec<MonierRow> = f
        .factors()
        .iter()
        .map(|&(p, k)| MonierRow {
            prime: p,
            multiplicity: k,
            e: (p - 1).trailing_zeros(),
            g: gcd(m, p - 1),
        })
        .collect();

    let odd_mult = |r: &&MonierRow| r.multiplicity % 2 == 1;
    let delta_class = if rows.iter().filter(odd_mult).any(|r| r.e <= v) {
        DeltaClass::Half
    } else if rows.iter().all(|r| r.e > v)
        && rows.iter().filter(odd_mult).filter(|r| r.e == v + 1).count() % 2 == 1
    {
        DeltaClass::Two
    } else {
        DeltaClass::One
    };

    let product: u64 = rows.iter().map(|r| r.g).product();
    let closed_form_count = match delta_class {
        DeltaClass::Half => {
            debug_assert_eq!(product % 2, 0);
            product / 2
        }
        DeltaClass::One => product,
        DeltaClass::Two => product * 2,
    };
    Ok(MonierProfile {
        n,
        m,
        v,
        rows,
        delta_class,
        closed_form_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factorize;

    #[test]
    fn liar_predicates() {
        for n in [9, 15, 21, 561, 1729] {
            assert!(is_euler_liar(1, n).unwrap());
            assert!(is_fermat_liar(1, n).unwrap());
        }
        assert!(is_euler_liar(14, 15).unwrap());
        assert!(!is_euler_liar(4, 15).unwrap());
        assert!(is_fermat_liar(2, 561).unwrap());
        assert!(!is_fermat_liar(2, 15).unwrap());
        assert!(is_euler_liar(3, 15).is_err());
        assert!(is_fermat_liar(5, 15).is_err());
        assert!(is_euler_liar(1, 16).is_err());
    }

    #[test]
    fn census_examples() {
        let c = census(15).unwrap();
        assert_eq!((c.phi, c.euler_liars), (8, 2));
        let c = census(9).unwrap();
        assert_eq!((c.euler_liars, c.p_count, c.n_count), (2, 6, 0));
        let c = census(1729).unwrap();
        assert_eq!((c.phi, c.euler_liars), (1296, 648));
        assert_eq!(c.b_plus_count, 1296);
        let c = census(561).unwrap();
        assert_eq!((c.phi, c.euler_liars, c.fermat_liars), (320, 80, 320));
    }

    #[test]
    fn census_errors() {
        assert_eq!(census(14), Err(Error::Domain("n must be odd".into())));
        assert!(census(7).is_err());
        assert!(census(3).is_err());
        assert!(census(1_000_003 * 3).is_err());
        assert!(census_with_bound(1729, 1000).is_err());
    }

    #[test]
    fn sign_counts() {
        assert_eq!(jacobi_sign_counts(7).unwrap(), (3, 3));
        assert_eq!(jacobi_sign_counts(9).unwrap(), (6, 0));
        assert_eq!(jacobi_sign_counts(15).unwrap(), (4, 4));
        assert!(jacobi_sign_counts(4).is_err());
    }

    #[test]
    fn census_above_shared_table() {
        // 1_000_001 = 101 * 9901
        let c = census_with_bound(1_000_001, 2_000_000).unwrap();
        assert_eq!(c, census_direct(1_000_001).unwrap());
    }

    #[test]
    fn sieve_census_matches_direct() {
        for n in (9..3000).step_by(2).filter(|&n| !is_prime(n)) {
            assert_eq!(census(n).unwrap(), census_direct(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn monier_examples() {
        let p = monier_euler_liar_count(&factorize(1729).unwrap()).unwrap();
        assert_eq!(p.v, 5);
        assert_eq!(p.rows.iter().map(|r| r.e).collect::<Vec<_>>(), [1, 2, 1]);
        assert_eq!(p.rows.iter().map(|r| r.g).collect::<Vec<_>>(), [6, 12, 18]);
        assert_eq!((p.delta_class, p.closed_form_count), (DeltaClass::Half, 648));

        let p = monier_euler_liar_count(&factorize(15).unwrap()).unwrap();
        assert_eq!(p.v, 0);
        assert_eq!(p.rows.iter().map(|r| r.e).collect::<Vec<_>>(), [1, 2]);
        assert_eq!(p.rows.iter().map(|r| r.g).collect::<Vec<_>>(), [1, 1]);
        assert_eq!((p.delta_class, p.closed_form_count), (DeltaClass::Two, 2));

        let p = monier_euler_liar_count(&factorize(561).unwrap()).unwrap();
        assert_eq!(p.v, 3);
        assert_eq!(p.rows.iter().map(|r| r.e).collect::<Vec<_>>(), [1, 1, 4]);
        assert_eq!(p.rows.iter().map(|r| r.g).collect::<Vec<_>>(), [2, 10, 8]);
        assert_eq!((p.delta_class, p.closed_form_count), (DeltaClass::Half, 80));
    }

    #[test]
    fn monier_rejects_primes_and_evens() {
        assert!(monier_euler_liar_count(&factorize(7919).unwrap()).is_err());
        assert!(monier_euler_liar_count(&factorize(12).unwrap()).is_err());
    }

    #[test]
    fn monier_row_primes_do_not_divide_m() {
        for n in (9..20_000u64).step_by(2).filter(|&n| !is_prime(n)) {
            let p = monier_euler_liar_count(&factorize(n).unwrap()).unwrap();
            assert!(p.rows.iter().all(|r| !p.m.is_multiple_of(r.prime)));
        }
    }
}
