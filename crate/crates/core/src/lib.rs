//! Euler pseudoprimes and the Solovay-Strassen test on 64-bit integers.
//!
//! An odd composite `n` is an Euler pseudoprime to the base `a` when
//! `a^((n-1)/2)` is congruent to the Jacobi symbol `(a/n)` modulo `n`. At most
//! half of the units mod `n` can be such liars, and exactly half are precisely
//! when `n` is a *special Carmichael number*: squarefree with `p - 1`
//! dividing `(n-1)/2` for every prime `p | n`. This crate counts liars
//! exhaustively and in closed form, classifies numbers, builds witnesses,
//! enumerates (special) Carmichael numbers and sweeps ranges to check the
//! characterization.

pub mod classify;
pub mod enumerate;
pub mod error;
pub mod factor;
pub mod liars;
pub mod modmath;
pub mod sstest;

pub use classify::{
    classify, find_euler_witness, find_generator, find_independent_witnesses, find_nonresidue,
    is_carmichael, is_special_carmichael, ClassificationReport, KorseltFact, Verdict,
    WitnessCertificate, WitnessEvidence, WitnessKind,
};
pub use enumerate::{
    enumerate_carmichael, enumerate_kind, enumerate_special_carmichael, enumerate_streaming,
    liar_counts, verify_characterization, BlockProgress, CarmichaelKind, LiarCountMode,
    LiarRecord, SweepOptions, SweepReport,
};
pub use error::{Error, Result};
pub use factor::{factorize, is_perfect_square, is_prime, FactoredInteger};
pub use liars::{
    census, census_with_bound, is_euler_liar, is_fermat_liar, jacobi_sign_counts, monier_euler_liar_count,
    DeltaClass, LiarCensus, MonierProfile, MonierRow, DEFAULT_CENSUS_BOUND,
};
pub use modmath::{
    crt_solve, dyadic_valuation, gcd, jacobi_symbol, mod_inverse, mod_pow, CongruenceSystem,
    Residue, MAX_MODULUS,
};
pub use sstest::{sample_liar_fraction, solovay_strassen, LiarSample, SplitMix64, TestOutcome, TestVerdict};
