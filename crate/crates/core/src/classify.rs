//! Korselt-style classification and constructive witnesses.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factorize, factorize_with_budget, is_perfect_square, is_prime, FactoredInteger};
use crate::liars::symbol_residue;
use crate::modmath::{crt_solve, gcd, jacobi_unchecked, pow_mod, CongruenceSystem, MAX_MODULUS};

/// Time allowed for factoring inside [`classify`].
pub const CLASSIFY_FACTOR_BUDGET: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Prime,
    CompositeOrdinary,
    Carmichael,
    SpecialCarmichael,
}

/// Divisibility facts for one prime factor `p` of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KorseltFact {
    pub prime: u64,
    pub multiplicity: u32,
    /// `p - 1 | n - 1`
    pub divides_n_minus_1: bool,
    /// `p - 1 | (n - 1) / 2`
    pub divides_half_n_minus_1: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub n: u64,
    pub verdict: Verdict,
    pub factors: Option<FactoredInteger>,
    pub korselt_evidence: Vec<KorseltFact>,
}

fn korselt(f: &FactoredInteger, divisor_of: u64) -> bool {
    let n = f.n();
    n & 1 == 1
        && !f.is_prime()
        && f.is_squarefree()
        && f.primes().all(|p| divisor_of.is_multiple_of(p - 1))
}

/// Korselt's criterion: composite, squarefree and `p - 1 | n - 1` for every
/// prime `p | n`.
pub fn is_carmichael(f: &FactoredInteger) -> bool {
    korselt(f, f.n() - 1)
}

/// Composite, squarefree and `p - 1 | (n - 1)/2` for every prime `p | n`.
pub fn is_special_carmichael(f: &FactoredInteger) -> bool {
    korselt(f, (f.n() - 1) / 2)
}

fn check_odd(n: u64) -> Result<()> {
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

/// Classifies odd `n` as prime, ordinary composite, Carmichael or special
/// Carmichael.
pub fn classify(n: u64) -> Result<ClassificationReport> {
    check_odd(n)?;
    if is_prime(n) {
        return Ok(ClassificationReport {
            n,
            verdict: Verdict::Prime,
            factors: None,
            korselt_evidence: Vec::new(),
        });
    }
    let f = factorize_with_budget(n, CLASSIFY_FACTOR_BUDGET)?;
    let verdict = if is_special_carmichael(&f) {
        Verdict::SpecialCarmichael
    } else if is_carmichael(&f) {
        Verdict::Carmichael
    } else {
        Verdict::CompositeOrdinary
    };
    let korselt_evidence = f
        .factors()
        .iter()
        .map(|&(p, k)| KorseltFact {
            prime: p,
            multiplicity: k,
            divides_n_minus_1: (n - 1).is_multiple_of(p - 1),
            divides_half_n_minus_1: ((n - 1) / 2).is_multiple_of(p - 1),
        })
        .collect();
    Ok(ClassificationReport {
        n,
        verdict,
        factors: Some(f),
        korselt_evidence,
    })
}

/// Smallest primitive root modulo an odd prime `p`.
pub fn find_generator(p: u64) -> Result<u64> {
    if p & 1 == 0 || !is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    let order = p - 1;
    let cofactors: Vec<u64> = factorize(order)?.primes().map(|q| order / q).collect();
    (2..p)
        .find(|&g| cofactors.iter().all(|&c| pow_mod(g, c, p) != 1))
        .ok_or_else(|| Error::domain(format!("no primitive root modulo {p}")))
}

/// Some `x` with Jacobi symbol `(x/n) = -1`, for odd `n` that is not a square.
///
/// Takes the first prime `p` of odd multiplicity `k`, the least quadratic
/// non-residue `q` mod `p`, and solves `x = q (mod p^k)`, `x = 1 (mod n/p^k)`.
pub fn find_nonresidue(f: &FactoredInteger) -> Result<u64> {
    let n = f.n();
    if n & 1 == 0 {
        return Err(Error::domain("n must be odd"));
    }
    if is_perfect_square(n) {
        return Err(Error::domain(format!("{n} is a perfect square")));
    }
    let &(p, k) = f
        .factors()
        .iter()
        .find(|&&(_, k)| k % 2 == 1)
        .expect("a non-square has a prime of odd multiplicity");
    let q = (2..p)
        .find(|&q| jacobi_unchecked(q, p) == -1)
        .expect("every odd prime has a non-residue");
    let prime_power = p.pow(k);
    let rest = n / prime_power;
    let mut system = vec![(q, prime_power)];
    if rest > 1 {
        system.push((1, rest));
    }
    crt_solve(&CongruenceSystem::new(system)?)
}

/// The computation that refutes primality for a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessEvidence {
    /// `1 < gcd(base, n) < n`
    Gcd { divisor: u64 },
    /// `base^(n-1) mod n`, which is not 1
    Fermat { power: u64 },
    /// `base^((n-1)/2) mod n` and the Jacobi symbol it fails to match
    Euler { half_power: u64, jacobi: i8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Gcd,
    Fermat,
    Euler,
}

/// A base that proves `n` composite, with the residues that show it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub n: u64,
    pub base: u64,
    #[serde(flatten)]
    pub evidence: WitnessEvidence,
}

impl WitnessCertificate {
    /// A gcd or Euler certificate for `base`, if `base` is either.
    pub fn euler(n: u64, base: u64) -> Option<Self> {
        if n < 3 || n & 1 == 0 {
            return None;
        }
        let d = gcd(base, n);
        let evidence = if d > 1 && d < n {
            WitnessEvidence::Gcd { divisor: d }
        } else if d == 1 {
            let half_power = pow_mod(base, (n - 1) / 2, n);
            let jacobi = jacobi_unchecked(base, n);
            if half_power == symbol_residue(jacobi, n) {
                return None;
            }
            WitnessEvidence::Euler { half_power, jacobi }
        } else {
            return None;
        };
        Some(WitnessCertificate { n, base, evidence })
    }

    /// A Fermat certificate for `base`, if `base` is a coprime Fermat witness.
    pub fn fermat(n: u64, base: u64) -> Option<Self> {
        if n < 3 || gcd(base, n) != 1 {
            return None;
        }
        let power = pow_mod(base, n - 1, n);
        (power != 1).then_some(WitnessCertificate {
            n,
            base,
            evidence: WitnessEvidence::Fermat { power },
        })
    }

    pub fn kind(&self) -> WitnessKind {
        match self.evidence {
            WitnessEvidence::Gcd { .. } => WitnessKind::Gcd,
            WitnessEvidence::Fermat { .. } => WitnessKind::Fermat,
            WitnessEvidence::Euler { .. } => WitnessKind::Euler,
        }
    }

    /// Recomputes the evidence from `n` and `base` and checks that it both
    /// matches the recorded values and refutes primality.
    pub fn verify(&self) -> bool {
        let n = self.n;
        if n < 3 {
            return false;
        }
        match self.evidence {
            WitnessEvidence::Gcd { divisor } => {
                divisor > 1 && divisor < n && gcd(self.base, n) == divisor
            }
            WitnessEvidence::Fermat { power } => {
                gcd(self.base, n) == 1 && power != 1 && pow_mod(self.base, n - 1, n) == power
            }
            WitnessEvidence::Euler { half_power, jacobi } => {
                n & 1 == 1
                    && gcd(self.base, n) == 1
                    && pow_mod(self.base, (n - 1) / 2, n) == half_power
                    && jacobi_unchecked(self.base, n) == jacobi
                    && half_power != symbol_residue(jacobi, n)
            }
        }
    }
}

/// First base `a = 2, 3, ...` that is a gcd or Euler witness for odd
/// composite `n`.
pub fn find_euler_witness(n: u64) -> Result<WitnessCertificate> {
    check_odd(n)?;
    if is_prime(n) {
        return Err(Error::domain(format!("{n} is prime and has no witnesses")));
    }
    (2..n)
        .find_map(|a| WitnessCertificate::euler(n, a))
        .ok_or_else(|| Error::domain(format!("no witness found for {n}")))
}

/// For a Carmichael `n = p_1 ... p_r`, the bases `x_i` with
/// `x_i = g_i (mod p_i)` and `x_i = 1 (mod n/p_i)`, where `g_i` is the least
/// primitive root mod `p_i`.
///
/// Each `x_i^((n-1)/2)` is congruent to 1 modulo every prime except `p_i`, so
/// none of them is `-1 (mod n)`, and those that differ from 1 are pairwise
/// distinct.
pub fn find_independent_witnesses(f: &FactoredInteger) -> Result<Vec<u64>> {
    if !is_carmichael(f) {
        return Err(Error::domain(format!("{} is not a Carmichael number", f.n())));
    }
    let n = f.n();
    f.primes()
        .map(|p| {
            let g = find_generator(p)?;
            crt_solve(&CongruenceSystem::new(vec![(g, p), (1, n / p)])?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liars::census;

    fn fact(n: u64) -> FactoredInteger {
        factorize(n).unwrap()
    }

    #[test]
    fn carmichael_predicates() {
        assert!(is_carmichael(&fact(561)));
        assert!(is_carmichael(&fact(1729)));
        assert!(!is_carmichael(&fact(15)));
        assert!(is_special_carmichael(&fact(1729)));
        assert!(!is_special_carmichael(&fact(561)));
        assert!(is_special_carmichael(&fact(2465)));
        assert!(!is_carmichael(&fact(7)));
        assert!(!is_special_carmichael(&fact(13)));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(7).unwrap().verdict, Verdict::Prime);
        assert_eq!(classify(46657).unwrap().verdict, Verdict::SpecialCarmichael);
        assert_eq!(classify(9).unwrap().verdict, Verdict::CompositeOrdinary);
        let r = classify(561).unwrap();
        assert_eq!(r.verdict, Verdict::Carmichael);
        assert_eq!(r.korselt_evidence.len(), 3);
        assert!(r.korselt_evidence.iter().all(|k| k.divides_n_minus_1));
        assert!(!r.korselt_evidence[2].divides_half_n_minus_1);
        assert_eq!(classify(2), Err(Error::Domain("n must be odd".into())));
        assert!(classify(1).is_err());
        assert!(matches!(classify(MAX_MODULUS + 1), Err(Error::Range(_))));
    }

    #[test]
    fn carmichael_verdicts_have_three_squarefree_primes() {
        for n in (9..50_000).step_by(2) {
            let r = classify(n).unwrap();
            if matches!(r.verdict, Verdict::Carmichael | Verdict::SpecialCarmichael) {
                let f = r.factors.unwrap();
                assert!(f.is_squarefree() && f.factors().len() >= 3, "n={n}");
                assert!(r.korselt_evidence.iter().all(|k| k.divides_n_minus_1));
            }
            if r.verdict == Verdict::SpecialCarmichael {
                assert!(r.korselt_evidence.iter().all(|k| k.divides_half_n_minus_1));
                assert_eq!(n % 4, 1);
            }
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(find_generator(3).unwrap(), 2);
        assert_eq!(find_generator(7).unwrap(), 3);
        assert_eq!(find_generator(13).unwrap(), 2);
        assert!(find_generator(2).is_err());
        assert!(find_generator(15).is_err());
    }

    #[test]
    fn generator_has_full_order() {
        for p in (3..3000u64).filter(|&p| is_prime(p)) {
            let g = find_generator(p).unwrap();
            let order = (1..p).find(|&k| pow_mod(g, k, p) == 1).unwrap();
            assert_eq!(order, p - 1, "p={p}");
            // and nothing smaller is a generator
            for h in 2..g {
                assert!((1..p - 1).any(|k| pow_mod(h, k, p) == 1));
            }
        }
    }

    #[test]
    fn nonresidue_examples() {
        assert_eq!(find_nonresidue(&fact(15)).unwrap(), 11);
        let x = find_nonresidue(&fact(21)).unwrap();
        assert_eq!(jacobi_unchecked(x, 21), -1);
        assert!(find_nonresidue(&fact(9)).is_err());
        // prime modulus and prime-power modulus
        assert_eq!(jacobi_unchecked(find_nonresidue(&fact(23)).unwrap(), 23), -1);
        assert_eq!(jacobi_unchecked(find_nonresidue(&fact(27)).unwrap(), 27), -1);
    }

    #[test]
    fn nonresidue_always_negative() {
        for n in (3..20_000u64).step_by(2).filter(|&n| !is_perfect_square(n)) {
            let x = find_nonresidue(&fact(n)).unwrap();
            assert_eq!(jacobi_unchecked(x, n), -1, "n={n}");
        }
    }

    #[test]
    fn euler_witness_examples() {
        let w = find_euler_witness(9).unwrap();
        assert_eq!((w.base, w.kind()), (2, WitnessKind::Euler));
        assert_eq!(w.evidence, WitnessEvidence::Euler { half_power: 7, jacobi: 1 });
        // 2^7 = 8 and (2/15) = 1, so 2 already refutes 15
        let w = find_euler_witness(15).unwrap();
        assert_eq!((w.base, w.kind()), (2, WitnessKind::Euler));
        assert!(find_euler_witness(7).is_err());
        assert!(find_euler_witness(10).is_err());
    }

    #[test]
    fn euler_witness_for_1729_is_first_non_liar() {
        let n = 1729;
        let expected = (2..n)
            .find(|&a| gcd(a, n) > 1 || jacobi_unchecked(a, n) != 1)
            .unwrap();
        let w = find_euler_witness(n).unwrap();
        assert_eq!(w.base, expected);
        assert_eq!(census(n).unwrap().euler_liars, 648);
        assert!(w.verify());
    }

    #[test]
    fn certificates_reverify() {
        for n in (9..5000u64).step_by(2).filter(|&n| !is_prime(n)) {
            let w = find_euler_witness(n).unwrap();
            assert!(w.verify(), "n={n}");
            for a in 2..w.base {
                assert!(gcd(a, n) == 1 && crate::liars::is_euler_liar(a, n).unwrap());
            }
        }
        let w = WitnessCertificate::fermat(15, 2).unwrap();
        assert_eq!(w.evidence, WitnessEvidence::Fermat { power: 4 });
        assert!(w.verify());
        assert!(WitnessCertificate::fermat(561, 2).is_none());
        let forged = WitnessCertificate {
            n: 1729,
            base: 2,
            evidence: WitnessEvidence::Euler { half_power: 1, jacobi: -1 },
        };
        assert!(!forged.verify());
    }

    fn half_powers(n: u64, xs: &[u64]) -> Vec<u64> {
        xs.iter().map(|&x| pow_mod(x, (n - 1) / 2, n)).collect()
    }

    fn check_independent(n: u64) -> Vec<u64> {
        let f = fact(n);
        let xs = find_independent_witnesses(&f).unwrap();
        assert_eq!(xs.len(), f.factors().len());
        for (&x, p) in xs.iter().zip(f.primes()) {
            assert_eq!(x % p, find_generator(p).unwrap());
            assert_eq!(x % (n / p), 1 % (n / p));
        }
        let hp = half_powers(n, &xs);
        assert!(hp.iter().all(|&h| h != n - 1));
        let nontrivial: Vec<u64> = hp.iter().copied().filter(|&h| h != 1).collect();
        for i in 0..nontrivial.len() {
            for j in 0..i {
                assert_ne!(nontrivial[i], nontrivial[j]);
            }
        }
        hp
    }

    #[test]
    fn independent_witness_examples() {
        // only 17 - 1 fails to divide 280
        assert_eq!(check_independent(561).iter().filter(|&&h| h != 1).count(), 1);
        assert_eq!(check_independent(1105).len(), 3);
        assert!(check_independent(1729).iter().all(|&h| h == 1));
        assert!(find_independent_witnesses(&fact(15)).is_err());
    }
}
