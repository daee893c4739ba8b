//! Exact rational evaluation of Göbel sequences.
//!
//! Two independent routes are provided: the defining sum
//! `g_n = (1 + sum_{j<n} g_j^k) / n` with `g_0 = 1`, and the product
//! recursion `n g_n = g_{n-1} (n - 1 + g_{n-1}^{k-1})` started from `g_1`.
//! Only the product route admits a different starting value; such variant
//! sequences are indexed from `n = 1`.
//!
//! Terms grow doubly exponentially, so every evaluation runs under a
//! [`DigitBudget`]. A term whose numerator would exceed the budget is never
//! approximated; the sequence is truncated there instead.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Limits for exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitBudget {
    /// Largest admissible decimal digit count of a numerator.
    pub max_decimal_digits: u64,
    /// Last index an open-ended search may visit.
    pub max_index: u64,
}

impl DigitBudget {
    pub fn new(max_decimal_digits: u64) -> Result<Self> {
        if max_decimal_digits == 0 {
            return Err(Error::Domain("digit budget must be at least 1".into()));
        }
        Ok(Self {
            max_decimal_digits,
            ..Self::default()
        })
    }

    pub fn with_max_index(mut self, max_index: u64) -> Self {
        self.max_index = max_index;
        self
    }

    fn admits(&self, numerator: &BigInt) -> bool {
        !exceeds_decimal_digits(numerator.magnitude(), self.max_decimal_digits)
    }
}

impl Default for DigitBudget {
    fn default() -> Self {
        Self {
            max_decimal_digits: 1_000_000,
            max_index: 10_000,
        }
    }
}

/// Whether `x` has more than `max` decimal digits.
fn exceeds_decimal_digits(x: &BigUint, max: u64) -> bool {
    let bits = x.bits();
    if bits == 0 {
        return false;
    }
    // x lies in [2^(bits-1), 2^bits)
    let upper = bits as f64 * std::f64::consts::LOG10_2;
    let lower = (bits - 1) as f64 * std::f64::consts::LOG10_2;
    if upper < max as f64 - 0.5 {
        return false;
    }
    if lower > max as f64 + 0.5 {
        return true;
    }
    let max = u32::try_from(max).expect("digit budget beyond u32 range");
    *x >= BigUint::from(10u32).pow(max)
}

/// One exact term `g_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTerm {
    pub n: u64,
    pub value: BigRational,
}

impl ExactTerm {
    pub fn is_integer(&self) -> bool {
        self.value.is_integer()
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    /// `value mod p^b` for a value whose denominator is prime to `p`.
    pub fn residue_mod(&self, modulus: &BigUint) -> Option<BigUint> {
        if modulus.is_one() {
            return Some(BigUint::zero());
        }
        let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
        let num = self.numerator().mod_floor(&m);
        let den = self.denominator().mod_floor(&m);
        let inv = crate::padic::mod_inverse(den.magnitude(), modulus).ok()?;
        Some((num.magnitude() * inv) % modulus)
    }
}

/// `num/den`, or the bare integer.
impl std::fmt::Display for ExactTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numerator())
        } else {
            write!(f, "{}/{}", self.numerator(), self.denominator())
        }
    }
}

/// Terms of one sequence, possibly cut short by the budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSequence {
    pub k: u64,
    pub init: BigUint,
    pub terms: Vec<ExactTerm>,
    /// Index of the first term that exceeded the digit budget.
    pub truncated_at: Option<u64>,
}

impl ExactSequence {
    pub fn term(&self, n: u64) -> Option<&ExactTerm> {
        self.terms.iter().find(|t| t.n == n)
    }
}

fn check_k(k: u64) -> Result<u32> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    u32::try_from(k - 1).map_err(|_| Error::Domain(format!("k = {k} is too large for exact evaluation")))
}

fn is_canonical(init: &BigUint) -> bool {
    *init == BigUint::from(2u32)
}

/// Product-recursion successor of `prev = g_{n-1}`, or `None` when the
/// unreduced numerator breaks the budget.
fn product_step(prev: &BigRational, n: u64, power: u32, budget: &DigitBudget) -> Option<BigRational> {
    let (p, q) = (prev.numer(), prev.denom());
    let q_pow = num_traits::pow(q.clone(), power as usize);
    let inner = q_pow.clone() * BigInt::from(n - 1) + num_traits::pow(p.clone(), power as usize);
    let numerator = p * inner;
    if !budget.admits(&numerator) {
        return None;
    }
    let denominator = q_pow * q * BigInt::from(n);
    Some(BigRational::new(numerator, denominator))
}

/// `g_n` for `n = 0..=n_max` (canonical `init = 2`) or `n = 1..=n_max`
/// (any other `init`), via the product recursion.
pub fn exact_sequence(k: u64, n_max: u64, init: &BigUint, budget: &DigitBudget) -> Result<ExactSequence> {
    let power = check_k(k)?;
    if init.is_zero() {
        return Err(Error::Domain("initial value must be at least 1".into()));
    }
    let mut out = ExactSequence {
        k,
        init: init.clone(),
        terms: Vec::new(),
        truncated_at: None,
    };
    if is_canonical(init) {
        out.terms.push(ExactTerm {
            n: 0,
            value: BigRational::one(),
        });
    }
    if n_max == 0 {
        return Ok(out);
    }
    let first = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, init.clone()));
    if !budget.admits(first.numer()) {
        out.truncated_at = Some(1);
        return Ok(out);
    }
    out.terms.push(ExactTerm { n: 1, value: first });
    for n in 2..=n_max {
        let prev = &out.terms.last().expect("at least g_1").value;
        match product_step(prev, n, power, budget) {
            Some(value) => out.terms.push(ExactTerm { n, value }),
            None => {
                out.truncated_at = Some(n);
                break;
            }
        }
    }
    Ok(out)
}

/// The canonical sequence via the defining sum. Independent of
/// [`exact_sequence`]; used to cross-check it.
pub fn exact_sequence_by_sum(k: u64, n_max: u64, budget: &DigitBudget) -> Result<ExactSequence> {
    let power = check_k(k)? + 1;
    let mut out = ExactSequence {
        k,
        init: BigUint::from(2u32),
        terms: vec![ExactTerm {
            n: 0,
            value: BigRational::one(),
        }],
        truncated_at: None,
    };
    let mut sum = BigRational::one(); // 1 + sum_{j<n} g_j^k
    for n in 1..=n_max {
        let last = &out.terms.last().expect("g_0").value;
        let kth = num_traits::pow(last.clone(), power as usize);
        sum += kth;
        let value = &sum / BigRational::from_integer(BigInt::from(n));
        if !budget.admits(value.numer()) {
            out.truncated_at = Some(n);
            break;
        }
        out.terms.push(ExactTerm { n, value });
    }
    Ok(out)
}

/// Whether the sum and product routes agree on every term both computed.
/// Only defined for the canonical starting value.
pub fn check_sum_product_agreement(k: u64, n_max: u64, init: &BigUint, budget: &DigitBudget) -> Result<bool> {
    if !is_canonical(init) {
        return Err(Error::Domain(
            "the defining sum only exists for the canonical start g_0 = 1, g_1 = 2".into(),
        ));
    }
    let by_product = exact_sequence(k, n_max, init, budget)?;
    let by_sum = exact_sequence_by_sum(k, n_max, budget)?;
    Ok(by_product
        .terms
        .iter()
        .zip(&by_sum.terms)
        .all(|(a, b)| a.n == b.n && a.value == b.value))
}

/// Outcome of an open-ended search for the first non-integer term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonIntegerVerdict {
    /// Least `n` whose term is not an integer.
    pub index: Option<u64>,
    /// Every term up to here was computed (and, absent `index`, integral).
    pub searched_through: u64,
    /// The search stopped because the next term broke the digit budget.
    pub budget_exhausted: bool,
}

/// Least `n` with `g_n` not an integer, searching until the budget or
/// `budget.max_index` runs out.
pub fn first_noninteger(k: u64, init: &BigUint, budget: &DigitBudget) -> Result<NonIntegerVerdict> {
    let power = check_k(k)?;
    if init.is_zero() {
        return Err(Error::Domain("initial value must be at least 1".into()));
    }
    let mut verdict = NonIntegerVerdict {
        index: None,
        searched_through: if is_canonical(init) { 0 } else { 1 },
        budget_exhausted: false,
    };
    let mut value = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, init.clone()));
    if !budget.admits(value.numer()) {
        verdict.budget_exhausted = true;
        verdict.searched_through = 0;
        return Ok(verdict);
    }
    verdict.searched_through = 1;
    for n in 2..=budget.max_index {
        match product_step(&value, n, power, budget) {
            Some(next) => {
                value = next;
                verdict.searched_through = n;
                if !value.is_integer() {
                    verdict.index = Some(n);
                    return Ok(verdict);
                }
            }
            None => {
                verdict.budget_exhausted = true;
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> BigUint {
        BigUint::from(2u32)
    }

    fn render(seq: &ExactSequence) -> Vec<String> {
        seq.terms.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn canonical_square_prefix() {
        let seq = exact_sequence(2, 9, &two(), &DigitBudget::default()).unwrap();
        assert_eq!(
            render(&seq),
            ["1", "2", "3", "5", "10", "28", "154", "3520", "1551880", "267593772160"]
        );
        assert_eq!(seq.truncated_at, None);
    }

    #[test]
    fn cubes_by_hand() {
        // g_0 = 1, g_1 = 2, g_2 = (1 + 1 + 8)/2 = 5, g_3 = (10 + 125)/3 = 45,
        // g_4 = (135 + 91125)/4 = 22815
        let seq = exact_sequence(3, 4, &two(), &DigitBudget::default()).unwrap();
        assert_eq!(render(&seq), ["1", "2", "5", "45", "22815"]);
    }

    #[test]
    fn variant_start_three() {
        let seq = exact_sequence(2, 7, &BigUint::from(3u32), &DigitBudget::default()).unwrap();
        assert_eq!(render(&seq), ["3", "6", "16", "76", "1216", "247456", "61235956672/7"]);
        assert_eq!(seq.terms[0].n, 1);
    }

    #[test]
    fn empty_and_tiny_ranges() {
        let seq = exact_sequence(2, 0, &two(), &DigitBudget::default()).unwrap();
        assert_eq!(render(&seq), ["1"]);
        let seq = exact_sequence(2, 0, &BigUint::from(5u32), &DigitBudget::default()).unwrap();
        assert!(seq.terms.is_empty());
        assert!(exact_sequence(1, 3, &two(), &DigitBudget::default()).is_err());
        assert!(exact_sequence(2, 3, &BigUint::zero(), &DigitBudget::default()).is_err());
    }

    #[test]
    fn sum_and_product_agree() {
        let budget = DigitBudget::default();
        assert!(check_sum_product_agreement(2, 12, &two(), &budget).unwrap());
        assert!(check_sum_product_agreement(5, 8, &two(), &budget).unwrap());
        assert!(check_sum_product_agreement(3, 10, &two(), &budget).unwrap());
        assert!(check_sum_product_agreement(2, 5, &BigUint::from(3u32), &budget).is_err());
    }

    #[test]
    fn budget_truncates() {
        let budget = DigitBudget::new(5).unwrap();
        let seq = exact_sequence(2, 20, &two(), &budget).unwrap();
        // 154 fits, 3520 fits, 1551880 has 7 digits.
        assert_eq!(seq.truncated_at, Some(8));
        assert_eq!(seq.terms.last().unwrap().n, 7);
        let seq = exact_sequence(2, 3, &BigUint::from(123_456u32), &budget).unwrap();
        assert_eq!(seq.truncated_at, Some(1));
        assert!(seq.terms.is_empty());
    }

    #[test]
    fn digit_counting_is_exact_at_the_boundary() {
        for d in 1..60u32 {
            let ten = BigUint::from(10u32).pow(d);
            assert!(!exceeds_decimal_digits(&(&ten - 1u32), u64::from(d)));
            assert!(exceeds_decimal_digits(&ten, u64::from(d)));
        }
        assert!(!exceeds_decimal_digits(&BigUint::zero(), 1));
    }

    #[test]
    fn first_noninteger_variant() {
        let v = first_noninteger(2, &BigUint::from(3u32), &DigitBudget::default()).unwrap();
        assert_eq!(v.index, Some(7));
        assert!(!v.budget_exhausted);
    }

    #[test]
    fn all_ones_never_fails() {
        let budget = DigitBudget::default().with_max_index(500);
        let v = first_noninteger(2, &BigUint::one(), &budget).unwrap();
        assert_eq!(v.index, None);
        assert_eq!(v.searched_through, 500);
        assert!(!v.budget_exhausted);
        let seq = exact_sequence(7, 30, &BigUint::one(), &budget).unwrap();
        assert!(seq.terms.iter().all(|t| t.value.is_one()));
    }

    #[test]
    fn residue_reduction() {
        let seq = exact_sequence(2, 7, &BigUint::from(3u32), &DigitBudget::default()).unwrap();
        let last = seq.terms.last().unwrap();
        assert_eq!(last.residue_mod(&BigUint::from(7u32)), None);
        let r = last.residue_mod(&BigUint::from(125u32)).unwrap();
        assert_eq!((r * 7u32) % 125u32, BigUint::from(61_235_956_672u64 % 125));
    }
}
