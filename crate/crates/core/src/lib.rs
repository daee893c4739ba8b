//! k-Göbel sequences: `g_0 = 1` and `g_n = (1 + sum_{j<n} g_j^k) / n`.
//!
//! These are rational by definition yet integral for a long stretch. This
//! crate computes them exactly ([`exact`]), tracks them modulo prime powers
//! with explicit precision ([`residue`]), and finds the first non-integral
//! index `N_k` with a replayable certificate ([`nk`]). It also runs the
//! finite check showing `N_k >= 19` for every `k`, with equality exactly for
//! `k = 6, 14 (mod 18)`.
//!
//! ```
//! use goebel::{compute_nk, NkStatus};
//! use num_bigint::BigUint;
//!
//! let result = compute_nk(6, &BigUint::from(2u32), 4096).unwrap();
//! assert_eq!(result.status, NkStatus::Found(19));
//! ```

pub mod error;
pub mod exact;
pub mod nk;
pub mod padic;
pub mod residue;

pub use error::{Error, Result};
pub use exact::{
    check_sum_product_agreement, exact_sequence, exact_sequence_by_sum, first_noninteger, DigitBudget, ExactSequence,
    ExactTerm, NonIntegerVerdict,
};
pub use nk::{
    compute_nk, compute_nk_with_map, n_set_scan, nk_table, periodic_representative, prime_class_scan,
    replay_certificate, variant_nk, verify_main_theorem, verify_main_theorem_with, Certificate, NSetSummary, NkResult,
    NkStatus, PrimePlan, TheoremReport, DEFAULT_HARD_CAP,
};
pub use padic::{mod_inverse, mod_pow, nu, nu_factorial, primes_up_to, totient_prime_power, PrimePower};
pub use residue::{initial_state, run, run_summary, step, SequenceConfig, Trace, TrackedResidue};
