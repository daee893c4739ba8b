//! Integrality horizons `N_k` with certificates, the periodicity reduction
//! in `k`, and the finite check behind `min N_k = 19`.
//!
//! # Coverage
//!
//! Every denominator of `g_n` divides `n!`: `g_1` is an integer and
//! `g_n = g_{n-1}(n - 1 + g_{n-1}^{k-1}) / n` only divides by `n`, so by
//! induction the denominator of `g_n` divides `n * (n-1)! = n!`. Hence for
//! `n <= n_cap` only primes `p <= n_cap` can witness non-integrality, and
//! tracking each of them at precision `r = nu_p(n_cap!)` keeps every step up
//! to `n_cap` inside the tracked recursion's domain. The least failing index
//! over those primes is `N_k`, provided it is at most `n_cap`.
//!
//! Searches deepen `n_cap` through 64, 128, 256, ... up to a hard cap, since
//! precision (and cost) grows with `n_cap`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{first_noninteger, DigitBudget, NonIntegerVerdict};
use crate::padic::{is_prime, nu_factorial, primes_up_to, totient_prime_power, PrimePower};
use crate::residue::{run, run_while, RunSummary, SequenceConfig, TrackedResidue};

pub const DEFAULT_HARD_CAP: u64 = 4096;
const FIRST_CAP: u64 = 64;

/// The primes `p <= n_cap`, each paired with `r = nu_p(n_cap!)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePlan {
    n_cap: u64,
    entries: Vec<(u64, u32)>,
}

impl PrimePlan {
    pub fn new(n_cap: u64) -> Result<Self> {
        let entries = primes_up_to(n_cap)
            .into_iter()
            .map(|p| {
                let r = nu_factorial(p, n_cap);
                u32::try_from(r)
                    .map(|r| (p, r))
                    .map_err(|_| Error::Domain(format!("precision {r} for p = {p} is out of range")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { n_cap, entries })
    }

    pub fn n_cap(&self) -> u64 {
        self.n_cap
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn precision_for(&self, p: u64) -> Option<u32> {
        self.entries.iter().find(|(q, _)| *q == p).map(|&(_, r)| r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NkStatus {
    Found(u64),
    ExceedsCap(u64),
}

/// A replayable witness: tracking `g` at prime `p` with precision `r`
/// reaches `F` first at index `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub p: u64,
    pub r: u32,
    pub n: u64,
    /// SHA-256 of the rendered trace, one `"<n> <state>\n"` line per index.
    pub trace_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NkResult {
    pub k: u64,
    pub init: BigUint,
    pub status: NkStatus,
    pub certificate: Option<Certificate>,
    /// First failure of every prime in the final plan, when requested.
    pub per_prime: Option<BTreeMap<u64, Option<u64>>>,
}

impl NkResult {
    pub fn value(&self) -> Option<u64> {
        match self.status {
            NkStatus::Found(n) => Some(n),
            NkStatus::ExceedsCap(_) => None,
        }
    }
}

fn deepening_schedule(hard_cap: u64) -> Vec<u64> {
    let mut caps = Vec::new();
    let mut cap = FIRST_CAP;
    while cap < hard_cap {
        caps.push(cap);
        cap = cap.saturating_mul(2);
    }
    caps.push(hard_cap);
    caps
}

fn trace_digest(cfg: &SequenceConfig, n: u64) -> Result<String> {
    let trace = run(cfg, n)?;
    let mut hasher = Sha256::new();
    for (i, state) in trace.iter() {
        hasher.update(format!("{i} {state}\n").as_bytes());
    }
    let mut hex = String::with_capacity(64);
    for byte in hasher.finalize() {
        write!(hex, "{byte:02x}").expect("writing to a String");
    }
    Ok(hex)
}

/// Replays a certificate: the failure must occur at exactly `cert.n`.
pub fn replay_certificate(k: u64, init: &BigUint, cert: &Certificate) -> Result<bool> {
    let cfg = SequenceConfig::new(k, cert.p, cert.r)?.with_init(init.clone())?;
    let trace = run(&cfg, cert.n)?;
    Ok(trace.first_failure == Some(cert.n) && trace_digest(&cfg, cert.n)? == cert.trace_digest)
}

fn validate(k: u64, init: &BigUint, hard_cap: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    if init.is_zero() {
        return Err(Error::Domain("initial value must be at least 1".into()));
    }
    if hard_cap < 2 {
        return Err(Error::Domain("hard cap must be at least 2".into()));
    }
    Ok(())
}

/// Least `(n, p)` failure over the plan, skipping work past the best
/// failure seen so far.
fn sweep(k: u64, init: &BigUint, plan: &PrimePlan) -> Result<Option<(u64, u64)>> {
    let best = AtomicU64::new(plan.n_cap());
    let hits = plan
        .entries()
        .par_iter()
        .map(|&(p, r)| -> Result<Option<(u64, u64)>> {
            // p cannot fail before index p
            if p > best.load(Ordering::Relaxed) {
                return Ok(None);
            }
            let cfg = SequenceConfig::new(k, p, r)?.with_init(init.clone())?;
            let summary = run_while(&cfg, plan.n_cap(), |n| n <= best.load(Ordering::Relaxed))?;
            Ok(summary.first_failure.map(|n| {
                best.fetch_min(n, Ordering::Relaxed);
                (n, p)
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(hits.into_iter().flatten().min())
}

fn per_prime_map(k: u64, init: &BigUint, plan: &PrimePlan) -> Result<BTreeMap<u64, Option<u64>>> {
    plan.entries()
        .par_iter()
        .map(|&(p, r)| {
            let cfg = SequenceConfig::new(k, p, r)?.with_init(init.clone())?;
            Ok((p, run_while(&cfg, plan.n_cap(), |_| true)?.first_failure))
        })
        .collect()
}

/// `N_k` for the sequence starting at `g_1 = init`, searched up to `hard_cap`.
pub fn compute_nk(k: u64, init: &BigUint, hard_cap: u64) -> Result<NkResult> {
    search(k, init, hard_cap, false)
}

/// As [`compute_nk`], additionally recording every prime's first failure in
/// the deciding plan.
pub fn compute_nk_with_map(k: u64, init: &BigUint, hard_cap: u64) -> Result<NkResult> {
    search(k, init, hard_cap, true)
}

fn search(k: u64, init: &BigUint, hard_cap: u64, with_map: bool) -> Result<NkResult> {
    validate(k, init, hard_cap)?;
    for n_cap in deepening_schedule(hard_cap) {
        let plan = PrimePlan::new(n_cap)?;
        let Some((n, p)) = sweep(k, init, &plan)? else {
            continue;
        };
        let r = plan.precision_for(p).expect("prime from this plan");
        let cfg = SequenceConfig::new(k, p, r)?.with_init(init.clone())?;
        let certificate = Certificate {
            p,
            r,
            n,
            trace_digest: trace_digest(&cfg, n)?,
        };
        let per_prime = if with_map {
            Some(per_prime_map(k, init, &plan)?)
        } else {
            None
        };
        return Ok(NkResult {
            k,
            init: init.clone(),
            status: NkStatus::Found(n),
            certificate: Some(certificate),
            per_prime,
        });
    }
    let per_prime = if with_map {
        Some(per_prime_map(k, init, &PrimePlan::new(hard_cap)?)?)
    } else {
        None
    };
    Ok(NkResult {
        k,
        init: init.clone(),
        status: NkStatus::ExceedsCap(hard_cap),
        certificate: None,
        per_prime,
    })
}

/// `N_k` for every `k` in `k_from..=k_to`, in order.
pub fn nk_table(k_from: u64, k_to: u64, init: &BigUint, hard_cap: u64) -> Result<Vec<NkResult>> {
    if k_from > k_to {
        return Err(Error::Domain(format!("empty range {k_from}..{k_to}")));
    }
    (k_from..=k_to)
        .into_par_iter()
        .map(|k| compute_nk(k, init, hard_cap))
        .collect()
}

/// The canonical `l = k (mod phi(p^r))` in the window
/// `[max(2, r+1), max(2, r+1) + phi(p^r) - 1]`; `k` itself when `k` is below
/// the window, where the reduction does not apply.
///
/// Tracked traces at `(p, r)` depend on `k` only through this value.
pub fn periodic_representative(p: u64, r: u32, k: u64) -> Result<u64> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    let phi = totient_prime_power(PrimePower::new(p, r)?)?;
    let start = 2u64.max(u64::from(r) + 1);
    if k < start {
        return Ok(k);
    }
    let offset = BigUint::from(k - start) % phi;
    Ok(start + offset.to_u64().expect("offset below k"))
}

/// The representatives `k` of every class for `(p, r)`, i.e. the full
/// window `[2, phi(p^r) + r]`.
pub fn periodic_window(p: u64, r: u32) -> Result<std::ops::RangeInclusive<u64>> {
    let phi = totient_prime_power(PrimePower::new(p, r)?)?;
    let phi = phi
        .to_u64()
        .ok_or_else(|| Error::Domain(format!("phi({p}^{r}) is too large to enumerate")))?;
    let start = 2u64.max(u64::from(r) + 1);
    Ok(2..=start + phi - 1)
}

/// Pass counts for one prime below 19.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub r: u32,
    pub k_from: u64,
    pub k_to: u64,
    pub cases: u64,
    pub passed: u64,
    /// Cases whose final state is `{0,0}`.
    pub ended_at_zero: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCase {
    pub k: u64,
    pub failed: bool,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    /// Every `g_{k,n}` with `n <= target_index` is shown to be an integer.
    pub target_index: u64,
    pub prime_checks: Vec<PrimeCheck>,
    pub boundary_prime: u64,
    /// `g_{k,19}` tracked at `p = 19, r = 1` for one representative per class.
    pub boundary_row: Vec<BoundaryCase>,
    /// `min N_k`, when some class fails at the boundary.
    pub min_nk: Option<u64>,
    /// Classes of `k` with `N_k = min_nk`, modulo `period`.
    pub failing_classes: Vec<u64>,
    pub period: u64,
}

impl TheoremReport {
    pub fn total_cases(&self) -> u64 {
        self.prime_checks.iter().map(|c| c.cases).sum()
    }
}

/// Runs the finite check with the standard tracked-residue runner.
pub fn verify_main_theorem() -> Result<TheoremReport> {
    verify_main_theorem_with(|cfg, n| run_while(cfg, n, |_| true))
}

/// The finite check with a caller-supplied runner, so a broken runner can be
/// shown to trip the check.
///
/// 1. For each prime `p < 19` with `r = nu_p(18!)` and every `k` in the
///    periodic window, the tracked sequence must reach `n = 18` without `F`.
///    Primes `>= 19` never divide a denominator below index 19.
/// 2. At `p = 19, r = 1` the window is `k = 2..=19`, one `k` per class mod 18.
///    A class failing at `n = 19` has `N_k = 19`; any other class has
///    `g_{k,19}` integral, since 19 is the only prime dividing 19.
pub fn verify_main_theorem_with<F>(runner: F) -> Result<TheoremReport>
where
    F: Fn(&SequenceConfig, u64) -> Result<RunSummary> + Sync,
{
    const TARGET: u64 = 18;
    const BOUNDARY: u64 = TARGET + 1;

    let mut prime_checks = Vec::new();
    for p in primes_up_to(TARGET) {
        let r = u32::try_from(nu_factorial(p, TARGET)).expect("small");
        let window = periodic_window(p, r)?;
        let (k_from, k_to) = (*window.start(), *window.end());
        let outcomes = window
            .into_par_iter()
            .map(|k| {
                let cfg = SequenceConfig::new(k, p, r)?;
                let summary = runner(&cfg, TARGET)?;
                Ok((k, summary))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some((k, s)) = outcomes.iter().find(|(_, s)| s.first_failure.is_some()) {
            return Err(Error::VerificationFailed {
                k: *k,
                p,
                n: s.first_failure.expect("checked"),
            });
        }
        let zero = TrackedResidue::value(0u32, 0);
        prime_checks.push(PrimeCheck {
            p,
            r,
            k_from,
            k_to,
            cases: outcomes.len() as u64,
            passed: outcomes.len() as u64,
            ended_at_zero: outcomes.iter().filter(|(_, s)| s.last == zero).count() as u64,
        });
    }

    let period = BOUNDARY - 1;
    let boundary_row = periodic_window(BOUNDARY, 1)?
        .map(|k| {
            let cfg = SequenceConfig::new(k, BOUNDARY, 1)?;
            let summary = runner(&cfg, BOUNDARY)?;
            Ok(BoundaryCase {
                k,
                failed: summary.first_failure == Some(BOUNDARY),
                state: summary.last.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut failing_classes: Vec<u64> = boundary_row.iter().filter(|c| c.failed).map(|c| c.k % period).collect();
    failing_classes.sort_unstable();
    let min_nk = (!failing_classes.is_empty()).then_some(BOUNDARY);

    Ok(TheoremReport {
        target_index: TARGET,
        prime_checks,
        boundary_prime: BOUNDARY,
        boundary_row,
        min_nk,
        failing_classes,
        period,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSetMember {
    pub value: u64,
    pub smallest_k: u64,
    pub attained_by: Vec<u64>,
    pub is_prime: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSetSummary {
    pub k_to: u64,
    pub members: Vec<NSetMember>,
    /// `k` whose search hit the cap.
    pub exceeds_cap: Vec<u64>,
}

/// The distinct values of `N_k` for `k = 2..=k_to`.
pub fn n_set_scan(k_to: u64, hard_cap: u64) -> Result<NSetSummary> {
    let table = nk_table(2, k_to, &BigUint::from(2u32), hard_cap)?;
    Ok(summarize_n_set(k_to, &table))
}

pub fn summarize_n_set(k_to: u64, table: &[NkResult]) -> NSetSummary {
    let mut by_value: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut exceeds_cap = Vec::new();
    for row in table {
        match row.status {
            NkStatus::Found(n) => by_value.entry(n).or_default().push(row.k),
            NkStatus::ExceedsCap(_) => exceeds_cap.push(row.k),
        }
    }
    let members = by_value
        .into_iter()
        .map(|(value, mut ks)| {
            ks.sort_unstable();
            NSetMember {
                value,
                smallest_k: ks[0],
                attained_by: ks,
                is_prime: is_prime(value),
            }
        })
        .collect();
    NSetSummary {
        k_to,
        members,
        exceeds_cap,
    }
}

/// A variant search together with its exact cross-check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantReport {
    pub result: NkResult,
    pub exact: NonIntegerVerdict,
}

/// `N_k` for the sequence with `g_1 = init`, cross-checked against exact
/// rational evaluation as far as `budget` allows.
pub fn variant_nk(k: u64, init: &BigUint, hard_cap: u64, budget: &DigitBudget) -> Result<VariantReport> {
    let result = compute_nk(k, init, hard_cap)?;
    let exact_budget = budget.with_max_index(budget.max_index.min(hard_cap));
    let exact = first_noninteger(k, init, &exact_budget)?;
    let agrees = match (result.status, exact.index) {
        (NkStatus::Found(n), Some(m)) => n == m,
        (NkStatus::ExceedsCap(_), Some(_)) => false,
        (NkStatus::Found(n), None) => n > exact.searched_through,
        (NkStatus::ExceedsCap(_), None) => true,
    };
    if !agrees {
        return Err(Error::OracleDisagreement {
            k,
            init: init.to_string(),
            residue: result.value(),
            exact: exact.index,
        });
    }
    Ok(VariantReport { result, exact })
}

/// Per-`k` outcome of [`prime_class_scan`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassOutcome {
    pub k: u64,
    pub first_failure: Option<u64>,
}

/// Tracks every class representative of `k` at prime `p` up to `n_target`
/// with `r = nu_p(n_target!)`. Raw material for hand-directed questions
/// such as which classes can have `N_k = p`; it proves nothing on its own.
pub fn prime_class_scan(p: u64, n_target: u64) -> Result<Vec<ClassOutcome>> {
    let r = u32::try_from(nu_factorial(p, n_target)).map_err(|_| Error::Domain("precision out of range".into()))?;
    if r == 0 {
        return Err(Error::Domain(format!("n_target = {n_target} is below p = {p}")));
    }
    periodic_window(p, r)?
        .into_par_iter()
        .map(|k| {
            let cfg = SequenceConfig::new(k, p, r)?;
            Ok(ClassOutcome {
                k,
                first_failure: run_while(&cfg, n_target, |_| true)?.first_failure,
            })
        })
        .collect()
}
