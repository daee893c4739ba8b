//! Tracked-precision residues of a Göbel sequence at a single prime.
//!
//! With `g_1 = init` and `n g_n = g_{n-1} (n - 1 + g_{n-1}^{k-1})`, the value
//! `g_n` is known modulo `p^b` where `b = r - nu_p(n!)`: each step divides by
//! `n`, which costs `nu_p(n)` digits of precision. If the product on the
//! right is not divisible by `p^{nu_p(n)}`, then `g_n` has `p` in its
//! denominator and the state becomes [`TrackedResidue::Failure`], which is
//! absorbing.
//!
//! The recursion is only meaningful while `nu_p(n!) <= r`. [`run`] refuses
//! anything longer; [`step`] reports [`Error::PrecisionExhausted`] if driven
//! past the end of the precision.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{is_prime, mod_inverse, nu_factorial, nu_unchecked};

/// `a mod p^b`, or the failure sentinel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrackedResidue {
    Value { a: BigUint, b: u32 },
    Failure,
}

impl TrackedResidue {
    pub fn value(a: impl Into<BigUint>, b: u32) -> Self {
        TrackedResidue::Value { a: a.into(), b }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, TrackedResidue::Failure)
    }

    /// Residue and precision exponent, or `None` for the failure state.
    pub fn residue(&self) -> Option<(&BigUint, u32)> {
        match self {
            TrackedResidue::Value { a, b } => Some((a, *b)),
            TrackedResidue::Failure => None,
        }
    }
}

/// Renders as `{a,b}` or `F`.
impl fmt::Display for TrackedResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackedResidue::Value { a, b } => write!(f, "{{{a},{b}}}"),
            TrackedResidue::Failure => f.write_str("F"),
        }
    }
}

/// Exponent `k`, prime `p`, starting precision `r` and the value of `g_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceConfig {
    k: u64,
    p: u64,
    r: u32,
    init: BigUint,
}

impl SequenceConfig {
    /// The canonical sequence, `g_1 = 2`.
    pub fn new(k: u64, p: u64, r: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {k}")));
        }
        if r < 1 {
            return Err(Error::Domain("precision r must be at least 1".into()));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self {
            k,
            p,
            r,
            init: BigUint::from(2u32),
        })
    }

    /// Replaces `g_1`; any positive integer is allowed.
    pub fn with_init(mut self, init: impl Into<BigUint>) -> Result<Self> {
        let init = init.into();
        if init.is_zero() {
            return Err(Error::Domain("initial value must be at least 1".into()));
        }
        self.init = init;
        Ok(self)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn init(&self) -> &BigUint {
        &self.init
    }

    /// Largest `n` with `nu_p(n!) <= r`.
    pub fn max_index(&self) -> u64 {
        let r = u64::from(self.r);
        // nu_p(((r + 1) p)!) >= r + 1, so the answer lies below (r + 1) p.
        let (mut lo, mut hi) = (1u64, (r + 1) * self.p);
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if nu_factorial(self.p, mid) <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn check_index(&self, n_max: u64) -> Result<()> {
        if n_max == 0 {
            return Err(Error::Domain("tracked sequences start at n = 1".into()));
        }
        let needed = nu_factorial(self.p, n_max);
        if needed > u64::from(self.r) {
            return Err(Error::Domain(format!(
                "n_max = {n_max} needs precision {needed} at p = {p}, but r = {r}; \
                 the largest legal n_max is {max}",
                p = self.p,
                r = self.r,
                max = self.max_index(),
            )));
        }
        Ok(())
    }
}

/// The state at `n = 1`: `init mod p^r`.
pub fn initial_state(cfg: &SequenceConfig) -> TrackedResidue {
    let modulus = BigUint::from(cfg.p).pow(cfg.r);
    TrackedResidue::Value {
        a: &cfg.init % &modulus,
        b: cfg.r,
    }
}

/// Advances the index-`(n-1)` state to index `n`.
pub fn step(state: &TrackedResidue, cfg: &SequenceConfig, n: u64) -> Result<TrackedResidue> {
    let mut cursor = match state {
        TrackedResidue::Failure => return Ok(TrackedResidue::Failure),
        TrackedResidue::Value { a, b } => Cursor::new(cfg, a.clone(), *b),
    };
    cursor.advance(cfg, n)?;
    Ok(cursor.state())
}

/// A live non-failure state together with its modulus `p^b`, so the hot
/// loop never recomputes powers of `p`.
struct Cursor {
    a: BigUint,
    b: u32,
    modulus: BigUint,
    exponent: BigUint,
    failed: bool,
}

impl Cursor {
    fn new(cfg: &SequenceConfig, a: BigUint, b: u32) -> Self {
        Self {
            a,
            b,
            modulus: BigUint::from(cfg.p).pow(b),
            exponent: BigUint::from(cfg.k - 1),
            failed: false,
        }
    }

    fn start(cfg: &SequenceConfig) -> Self {
        let modulus = BigUint::from(cfg.p).pow(cfg.r);
        Self {
            a: &cfg.init % &modulus,
            b: cfg.r,
            modulus,
            exponent: BigUint::from(cfg.k - 1),
            failed: false,
        }
    }

    fn state(&self) -> TrackedResidue {
        if self.failed {
            TrackedResidue::Failure
        } else {
            TrackedResidue::Value {
                a: self.a.clone(),
                b: self.b,
            }
        }
    }

    fn advance(&mut self, cfg: &SequenceConfig, n: u64) -> Result<()> {
        if self.failed {
            return Ok(());
        }
        let e = nu_unchecked(cfg.p, n);
        if self.b < e {
            return Err(Error::PrecisionExhausted {
                n,
                precision: self.b,
                needed: e,
            });
        }
        if self.b == 0 {
            // Trivial ring: the only residue is 0 mod 1.
            return Ok(());
        }
        // t = a (n - 1 + a^{k-1}) mod p^b
        let mut t = self.a.modpow(&self.exponent, &self.modulus);
        t += n - 1;
        t = (t * &self.a) % &self.modulus;

        if e == 0 {
            let inv = mod_inverse(&BigUint::from(n), &self.modulus)?;
            self.a = (t * inv) % &self.modulus;
            return Ok(());
        }

        let p_e = BigUint::from(cfg.p).pow(e);
        let (quotient, rem) = t.div_rem(&p_e);
        if !rem.is_zero() {
            self.failed = true;
            return Ok(());
        }
        self.b -= e;
        if self.b == 0 {
            self.a = BigUint::zero();
            self.modulus = BigUint::one();
            return Ok(());
        }
        self.modulus /= &p_e;
        let unit = n / cfg.p.pow(e);
        let inv = mod_inverse(&BigUint::from(unit), &self.modulus)?;
        self.a = (quotient * inv) % &self.modulus;
        Ok(())
    }
}

/// A materialised run over `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    states: Vec<TrackedResidue>,
    pub first_failure: Option<u64>,
    /// First index whose state is `{0,0}`. From there on a non-failure
    /// carries no information about integrality.
    pub zero_precision_from: Option<u64>,
}

impl Trace {
    /// State at index `n` (1-based).
    pub fn get(&self, n: u64) -> Option<&TrackedResidue> {
        usize::try_from(n)
            .ok()
            .and_then(|n| n.checked_sub(1))
            .and_then(|i| self.states.get(i))
    }

    pub fn states(&self) -> &[TrackedResidue] {
        &self.states
    }

    /// `(n, state)` pairs starting at `n = 1`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &TrackedResidue)> {
        (1u64..).zip(self.states.iter())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Runs `n = 1..=n_max` and keeps every state. Stops computing at the first
/// failure; the remaining entries are filled with `F`.
pub fn run(cfg: &SequenceConfig, n_max: u64) -> Result<Trace> {
    cfg.check_index(n_max)?;
    let mut cursor = Cursor::start(cfg);
    let mut states = Vec::with_capacity(n_max as usize);
    states.push(cursor.state());
    let mut first_failure = None;
    let mut zero_precision_from = (cursor.b == 0).then_some(1);
    for n in 2..=n_max {
        if first_failure.is_some() {
            states.push(TrackedResidue::Failure);
            continue;
        }
        cursor.advance(cfg, n)?;
        if cursor.failed {
            first_failure = Some(n);
        } else if cursor.b == 0 && zero_precision_from.is_none() {
            zero_precision_from = Some(n);
        }
        states.push(cursor.state());
    }
    Ok(Trace {
        states,
        first_failure,
        zero_precision_from,
    })
}

/// The memory-flat result of a run: last state and failure index only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Last index actually computed.
    pub last_index: u64,
    pub last: TrackedResidue,
    pub first_failure: Option<u64>,
    pub zero_precision_from: Option<u64>,
}

/// Like [`run`] but keeps only the final state.
pub fn run_summary(cfg: &SequenceConfig, n_max: u64) -> Result<RunSummary> {
    run_while(cfg, n_max, |_| true)
}

/// Runs up to `n_max`, consulting `keep_going(n)` before each step `n >= 2`
/// and stopping early when it returns `false` or at the first failure.
pub fn run_while(cfg: &SequenceConfig, n_max: u64, mut keep_going: impl FnMut(u64) -> bool) -> Result<RunSummary> {
    cfg.check_index(n_max)?;
    let mut cursor = Cursor::start(cfg);
    let mut last_index = 1;
    let mut first_failure = None;
    let mut zero_precision_from = (cursor.b == 0).then_some(1);
    for n in 2..=n_max {
        if !keep_going(n) {
            break;
        }
        cursor.advance(cfg, n)?;
        last_index = n;
        if cursor.failed {
            first_failure = Some(n);
            break;
        }
        if cursor.b == 0 && zero_precision_from.is_none() {
            zero_precision_from = Some(n);
        }
    }
    Ok(RunSummary {
        last_index,
        last: cursor.state(),
        first_failure,
        zero_precision_from,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: u64, p: u64, r: u32) -> SequenceConfig {
        SequenceConfig::new(k, p, r).unwrap()
    }

    fn v(a: u64, b: u32) -> TrackedResidue {
        TrackedResidue::value(a, b)
    }

    #[test]
    fn initial_states() {
        assert_eq!(initial_state(&cfg(2, 7, 2)), v(2, 2));
        assert_eq!(initial_state(&cfg(6, 19, 1)), v(2, 1));
        let eight = cfg(2, 2, 3).with_init(8u32).unwrap();
        assert_eq!(initial_state(&eight), v(0, 3));
    }

    #[test]
    fn single_steps() {
        assert_eq!(step(&v(7, 2), &cfg(2, 7, 2), 7).unwrap(), v(6, 1));
        assert_eq!(step(&v(16, 1), &cfg(6, 19, 1), 19).unwrap(), TrackedResidue::Failure);
        assert_eq!(step(&v(1, 1), &cfg(2, 7, 2), 14).unwrap(), v(0, 0));
        for n in [2, 7, 19, 100] {
            assert_eq!(
                step(&TrackedResidue::Failure, &cfg(3, 7, 2), n).unwrap(),
                TrackedResidue::Failure
            );
        }
    }

    #[test]
    fn step_past_precision_is_an_error() {
        assert_eq!(
            step(&v(0, 0), &cfg(2, 7, 2), 21),
            Err(Error::PrecisionExhausted {
                n: 21,
                precision: 0,
                needed: 1
            })
        );
        assert!(step(&v(3, 1), &cfg(2, 7, 2), 49).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SequenceConfig::new(1, 7, 2).is_err());
        assert!(SequenceConfig::new(2, 7, 0).is_err());
        assert_eq!(SequenceConfig::new(2, 9, 1), Err(Error::NotPrime(9)));
        assert!(cfg(2, 7, 1).with_init(0u32).is_err());
    }

    #[test]
    fn max_index_matches_legendre() {
        assert_eq!(cfg(2, 7, 2).max_index(), 20);
        assert_eq!(cfg(2, 19, 1).max_index(), 37);
        assert_eq!(cfg(2, 2, 16).max_index(), 19);
        for p in [2, 3, 5, 7, 11, 13] {
            for r in 1..20 {
                let m = cfg(2, p, r).max_index();
                assert!(nu_factorial(p, m) <= u64::from(r));
                assert!(nu_factorial(p, m + 1) > u64::from(r));
            }
        }
    }

    #[test]
    fn run_rejects_out_of_domain() {
        let err = run(&cfg(2, 7, 2), 21).unwrap_err();
        match err {
            Error::Domain(msg) => assert!(msg.contains("largest legal n_max is 20"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(run(&cfg(2, 7, 2), 0).is_err());
        assert!(run(&cfg(2, 7, 2), 20).is_ok());
    }

    #[test]
    fn failure_fills_the_tail() {
        let trace = run(&cfg(6, 19, 1), 37).unwrap();
        assert_eq!(trace.first_failure, Some(19));
        assert!(trace.states()[18..].iter().all(TrackedResidue::is_failure));
        assert_eq!(trace.len(), 37);
    }

    #[test]
    fn summary_agrees_with_trace() {
        for (k, p, r, n_max) in [(2, 7, 2, 18), (6, 19, 1, 19), (2, 17, 1, 18), (5, 2, 16, 18)] {
            let c = cfg(k, p, r);
            let trace = run(&c, n_max).unwrap();
            let summary = run_summary(&c, n_max).unwrap();
            assert_eq!(trace.first_failure, summary.first_failure);
            assert_eq!(trace.zero_precision_from, summary.zero_precision_from);
            assert_eq!(trace.get(summary.last_index), Some(&summary.last));
        }
    }

    #[test]
    fn zero_precision_flag() {
        let trace = run(&cfg(2, 7, 2), 18).unwrap();
        assert_eq!(trace.zero_precision_from, Some(14));
        let trace = run(&cfg(2, 7, 3), 18).unwrap();
        assert_eq!(trace.zero_precision_from, None);
    }

    #[test]
    fn display() {
        assert_eq!(v(28, 2).to_string(), "{28,2}");
        assert_eq!(TrackedResidue::Failure.to_string(), "F");
    }
}
