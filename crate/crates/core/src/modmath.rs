//! Modular arithmetic on machine words.
//!
//! Every modulus handled here is at most [`MAX_MODULUS`], so the product of
//! two reduced residues always fits a single 128-bit widening multiply.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus (and largest integer in general) the library accepts.
pub const MAX_MODULUS: u64 = 1 << 62;

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        // Both operands are already reduced, so the product fits in 64 bits.
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// Barrett reduction for a fixed modulus below 2^32, where products of two
/// residues fit in 64 bits.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Barrett32 {
    modulus: u64,
    inverse: u64,
}

impl Barrett32 {
    pub(crate) fn new(modulus: u64) -> Self {
        assert!((2..=u32::MAX as u64).contains(&modulus));
        Barrett32 {
            modulus,
            inverse: u64::MAX / modulus,
        }
    }

    #[inline]
    pub(crate) fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.inverse as u128) >> 64) as u64;
        let mut r = x - q * self.modulus;
        while r >= self.modulus {
            r -= self.modulus;
        }
        r
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }
}

/// `base^exp mod m` without argument checks; `m` must be at least 2.
#[inline]
pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Computes `base^exponent mod modulus` by square-and-multiply.
pub fn mod_pow(base: u64, exponent: u64, modulus: u64) -> Result<u64> {
    if modulus < 2 {
        return Err(Error::domain("modulus must be at least 2"));
    }
    Ok(pow_mod(base, exponent, modulus))
}

/// Greatest common divisor, with `gcd(0, 0) = 0`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exponent of the largest power of two dividing `x`.
pub fn dyadic_valuation(x: u64) -> Result<u32> {
    if x == 0 {
        return Err(Error::domain("dyadic valuation of 0 is infinite"));
    }
    Ok(x.trailing_zeros())
}

#[inline]
pub(crate) fn jacobi_unchecked(a: u64, n: u64) -> i8 {
    let mut a = a % n;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        // (2/n) = -1 iff n = 3, 5 mod 8
        if twos & 1 == 1 && matches!(n & 7, 3 | 5) {
            sign = -sign;
        }
        // reciprocity for two odd numbers
        if a & 3 == 3 && n & 3 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// The Jacobi symbol `(a/n)` for odd `n >= 3`.
///
/// Uses the binary reduction (factor out twos, then flip by reciprocity), so
/// `n` is never factored. Returns 0 exactly when `gcd(a, n) > 1`.
pub fn jacobi_symbol(a: u64, n: u64) -> Result<i8> {
    if n < 3 || n & 1 == 0 {
        return Err(Error::domain("Jacobi symbol needs an odd modulus >= 3"));
    }
    Ok(jacobi_unchecked(a, n))
}

/// Inverse of `a` modulo `m`, in `(0, m)`.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::domain("modulus must be at least 2"));
    }
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::domain(format!("{a} is not invertible modulo {m}")));
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// An element of `Z/nZ` for an odd modulus `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Reduces `value` into `[0, modulus)`.
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if modulus < 3 || modulus & 1 == 0 {
            return Err(Error::domain("residue modulus must be odd and >= 3"));
        }
        if modulus > MAX_MODULUS {
            return Err(Error::range("residue modulus exceeds 2^62"));
        }
        Ok(Residue {
            value: value % modulus,
            modulus,
        })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn pow(self, exponent: u64) -> Self {
        Residue {
            value: pow_mod(self.value, exponent, self.modulus),
            ..self
        }
    }

    pub fn jacobi(self) -> i8 {
        jacobi_unchecked(self.value, self.modulus)
    }

    pub fn is_unit(self) -> bool {
        gcd(self.value, self.modulus) == 1
    }

    /// Maps a Jacobi symbol value onto its residue, with -1 as `modulus - 1`.
    pub fn from_symbol(symbol: i8, modulus: u64) -> Result<Self> {
        let value = match symbol {
            1 => 1,
            0 => 0,
            -1 => modulus.wrapping_sub(1),
            _ => return Err(Error::domain("symbol must be -1, 0 or 1")),
        };
        Residue::new(value, modulus)
    }
}

impl std::ops::Mul for Residue {
    type Output = Residue;

    fn mul(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "residues with different moduli");
        Residue {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

/// A system of congruences `x = r_i mod m_i` with pairwise coprime moduli.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSystem {
    congruences: Vec<(u64, u64)>,
}

impl CongruenceSystem {
    /// Validates `(residue, modulus)` pairs.
    pub fn new(congruences: Vec<(u64, u64)>) -> Result<Self> {
        if congruences.is_empty() {
            return Err(Error::domain("congruence system is empty"));
        }
        for (i, &(r, m)) in congruences.iter().enumerate() {
            if m < 2 {
                return Err(Error::domain("congruence modulus must be at least 2"));
            }
            if r >= m {
                return Err(Error::domain(format!("residue {r} is not reduced modulo {m}")));
            }
            for &(_, other) in &congruences[..i] {
                if gcd(m, other) != 1 {
                    return Err(Error::domain(format!(
                        "moduli {other} and {m} are not coprime"
                    )));
                }
            }
        }
        Ok(CongruenceSystem { congruences })
    }

    pub fn congruences(&self) -> &[(u64, u64)] {
        &self.congruences
    }
}

/// Solves a congruence system by folding one congruence at a time.
///
/// Returns the unique solution below the product of the moduli.
pub fn crt_solve(system: &CongruenceSystem) -> Result<u64> {
    let mut congruences = system.congruences.iter();
    let &(mut x, mut modulus) = congruences.next().expect("validated nonempty");
    for &(r, m) in congruences {
        let combined = modulus
            .checked_mul(m)
            .filter(|&c| c <= MAX_MODULUS)
            .ok_or_else(|| Error::range("product of moduli exceeds 2^62"))?;
        // x + modulus * t = r (mod m)
        let inv = mod_inverse(modulus % m, m)?;
        let diff = (r + m - x % m) % m;
        let t = mul_mod(diff, inv, m);
        x += modulus * t;
        modulus = combined;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_examples() {
        for m in [2, 3, 17, 1729] {
            assert_eq!(mod_pow(123, 0, m).unwrap(), 1);
        }
        assert_eq!(mod_pow(8, 4, 9).unwrap(), 1);
        // 2^864 mod 1729 computed independently with arbitrary precision.
        assert_eq!(mod_pow(2, 864, 1729).unwrap(), 1);
        assert!(mod_pow(2, 3, 1).is_err());
        assert!(mod_pow(2, 3, 0).is_err());
    }

    #[test]
    fn pow_near_range_limit() {
        let m = MAX_MODULUS - 1;
        assert_eq!(mod_pow(m - 1, 2, m).unwrap(), 1);
        assert_eq!(mod_pow(m - 1, 3, m).unwrap(), m - 1);
    }

    #[test]
    fn barrett_matches_remainder() {
        for m in [2u64, 3, 1729, 65_537, 999_999_937, u32::MAX as u64] {
            let b = Barrett32::new(m);
            for x in [0, 1, m - 1, m, m + 1, (m - 1) * (m - 1), u64::MAX, 0xDEAD_BEEF_1234_5678] {
                assert_eq!(b.reduce(x), x % m, "x={x} m={m}");
            }
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(864, 6), 6);
        assert_eq!(gcd(280, 16), 8);
        assert_eq!(gcd(0, 0), 0);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(dyadic_valuation(1).unwrap(), 0);
        assert_eq!(dyadic_valuation(12).unwrap(), 2);
        assert_eq!(dyadic_valuation(864).unwrap(), 5);
        assert!(dyadic_valuation(0).is_err());
    }

    #[test]
    fn jacobi_examples() {
        for n in (3..200).step_by(2) {
            assert_eq!(jacobi_symbol(1, n).unwrap(), 1);
            assert_eq!(jacobi_symbol(0, n).unwrap(), 0);
        }
        assert_eq!(jacobi_symbol(14, 15).unwrap(), -1);
        for a in 1..9 {
            if gcd(a, 9) == 1 {
                assert_eq!(jacobi_symbol(a, 9).unwrap(), 1);
            }
        }
        assert!(jacobi_symbol(3, 8).is_err());
        assert!(jacobi_symbol(3, 1).is_err());
    }

    #[test]
    fn jacobi_zero_iff_shared_factor() {
        for n in (3..300).step_by(2) {
            for a in 0..2 * n {
                assert_eq!(jacobi_symbol(a, n).unwrap() == 0, gcd(a, n) > 1, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 7).unwrap(), 1);
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert!(mod_inverse(2, 4).is_err());
    }

    #[test]
    fn crt_examples() {
        let sys = CongruenceSystem::new(vec![(2, 3), (3, 5)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap(), 8);
        let sys = CongruenceSystem::new(vec![(4, 11)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap(), 4);
        // Found by scanning 0..1729 for the unique match.
        let sys = CongruenceSystem::new(vec![(3, 7), (2, 13), (1, 19)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap(), 1445);
    }

    #[test]
    fn crt_errors() {
        assert!(CongruenceSystem::new(vec![(1, 6), (1, 4)]).is_err());
        assert!(CongruenceSystem::new(vec![]).is_err());
        assert!(CongruenceSystem::new(vec![(5, 5)]).is_err());
        let big = CongruenceSystem::new(vec![(1, (1 << 31) - 1), (1, (1 << 32) + 1)]).unwrap();
        assert!(matches!(crt_solve(&big), Err(Error::Range(_))));
    }

    #[test]
    fn residue_arithmetic() {
        let a = Residue::new(20, 15).unwrap();
        assert_eq!(a.value(), 5);
        assert!(!a.is_unit());
        let b = Residue::new(14, 15).unwrap();
        assert_eq!(b.jacobi(), -1);
        assert_eq!(b.pow(7), Residue::from_symbol(-1, 15).unwrap());
        assert_eq!((b * b).value(), 1);
        assert!(Residue::new(1, 10).is_err());
    }
}
