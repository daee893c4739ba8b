use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use goebel::nk::{summarize_n_set, NSetSummary};
use goebel::residue::RunSummary;
use goebel::{
    exact_sequence, nk_table, run, variant_nk, verify_main_theorem_with, DigitBudget, NkResult, NkStatus,
    SequenceConfig, TheoremReport, DEFAULT_HARD_CAP,
};
use goebel_cli::bfile;
use goebel_cli::krange::KRange;
use goebel_cli::record::{CertificateRow, RunRecord};

#[derive(Parser)]
#[command(
    name = "goebel",
    version,
    about = "Exact and p-adic computation of k-Göbel sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact terms g_{k,0..n_max} (or g_{k,1..n_max} for a variant start).
    Seq {
        #[arg(long)]
        k: u64,
        #[arg(long = "n-max")]
        n_max: u64,
        #[arg(long, default_value_t = BigUint::from(2u32))]
        init: BigUint,
        /// Stop (exit 2) once a numerator or denominator needs more decimal digits.
        #[arg(long = "digit-budget", default_value_t = 1_000_000)]
        digit_budget: u64,
    },
    /// Tracked residues g_{k,n,p,r} for n = 1..n_max.
    Modseq {
        #[arg(long)]
        k: u64,
        /// Prime.
        #[arg(long)]
        p: u64,
        /// Starting precision: residues are mod p^(r - nu_p(n!)).
        #[arg(long)]
        r: u32,
        #[arg(long = "n-max")]
        n_max: u64,
        #[arg(long, default_value_t = BigUint::from(2u32))]
        init: BigUint,
    },
    /// N_k with certificates, for one k or a range a..b.
    Nk {
        /// A single k, or a range a..b (inclusive; a..=b also accepted).
        #[arg(long)]
        k: KRange,
        /// Initial value g_1; anything but 2 is a variant sequence.
        #[arg(long, default_value_t = BigUint::from(2u32))]
        init: BigUint,
        /// Give up (reporting a lower bound) past this index.
        #[arg(long = "hard-cap", default_value_t = DEFAULT_HARD_CAP)]
        hard_cap: u64,
        /// Digit budget for the exact cross-check of variant starts.
        #[arg(long = "digit-budget", default_value_t = 10_000)]
        digit_budget: u64,
    },
    /// Finite check that N_k >= 19 for all k, with equality iff k = 6, 14 (mod 18).
    Verify {
        /// Shorthand for --format json.
        #[arg(long)]
        json: bool,
    },
    /// Distinct values of N_k for k = 2..k_to.
    Nset {
        #[arg(long = "k-to")]
        k_to: u64,
        #[arg(long = "hard-cap", default_value_t = DEFAULT_HARD_CAP)]
        hard_cap: u64,
    },
    /// Compare computed N_k against an OEIS b-file (A108394).
    OeisCheck {
        /// b-file: one "index value" pair per line, '#' comments allowed.
        path: PathBuf,
        /// Only check k up to this value.
        #[arg(long = "k-to")]
        k_to: Option<u64>,
        /// File index corresponding to k = 2.
        #[arg(long, default_value_t = 2)]
        offset: i64,
        #[arg(long = "hard-cap", default_value_t = DEFAULT_HARD_CAP)]
        hard_cap: u64,
    },
}

/// Exit codes: 0 success, 1 verification or mismatch failure, 2 usage,
/// domain or parse error.
enum Failure {
    Check(String),
    Usage(String),
}

impl From<goebel::Error> for Failure {
    fn from(e: goebel::Error) -> Self {
        match e {
            goebel::Error::VerificationFailed { k, p, n } => {
                Failure::Check(format!("verification failed: counterexample k = {k}, p = {p}, n = {n}"))
            }
            e @ goebel::Error::OracleDisagreement { .. } => Failure::Check(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        pool = pool.num_threads(jobs.max(1));
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let started = Instant::now();
    match &cli.command {
        Command::Seq {
            k,
            n_max,
            init,
            digit_budget,
        } => seq(cli.format, started, *k, *n_max, init, *digit_budget),
        Command::Modseq { k, p, r, n_max, init } => modseq(cli.format, started, *k, *p, *r, *n_max, init),
        Command::Nk {
            k,
            init,
            hard_cap,
            digit_budget,
        } => nk(cli.format, started, *k, init, *hard_cap, *digit_budget),
        Command::Verify { json } => {
            let format = if *json { Format::Json } else { cli.format };
            verify(format)
        }
        Command::Nset { k_to, hard_cap } => nset(cli.format, started, *k_to, *hard_cap),
        Command::OeisCheck {
            path,
            k_to,
            offset,
            hard_cap,
        } => oeis_check(cli.format, started, path, *k_to, *offset, *hard_cap),
    }
}

/// Writes to stdout, treating a closed pipe as the reader being done.
fn out(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush());
}

fn emit(format: Format, mut record: RunRecord, started: Instant, text: impl FnOnce(&RunRecord) -> String) {
    record.wall_time_ms = started.elapsed().as_millis() as u64;
    match format {
        Format::Text => out(&text(&record)),
        Format::Json => out(&format!("{}\n", record.to_json())),
        Format::Csv => out(&record.to_csv()),
    }
}

fn seq(format: Format, started: Instant, k: u64, n_max: u64, init: &BigUint, digits: u64) -> Outcome {
    let budget = DigitBudget::new(digits)?;
    let seq = exact_sequence(k, n_max, init, &budget)?;
    let mut record = RunRecord::new("seq", "n", "g")
        .param("k", k)
        .param("n_max", n_max)
        .param("init", init)
        .param("digit_budget", digits);
    for term in &seq.terms {
        record.push(term.n, term);
    }
    if let Some(n) = seq.truncated_at {
        record
            .notes
            .push(format!("truncated at n = {n}: digit budget exceeded"));
    }
    emit(format, record, started, |r| {
        let values: Vec<&str> = r.results.iter().map(|row| row.value.as_str()).collect();
        format!("{}\n", values.join(" "))
    });
    match seq.truncated_at {
        Some(n) => {
            eprintln!("truncated at n = {n}: numerator exceeds {digits} decimal digits");
            Ok(ExitCode::from(2))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn modseq(format: Format, started: Instant, k: u64, p: u64, r: u32, n_max: u64, init: &BigUint) -> Outcome {
    let cfg = SequenceConfig::new(k, p, r)?.with_init(init.clone())?;
    let trace = run(&cfg, n_max)?;
    let mut record = RunRecord::new("modseq", "n", "residue")
        .param("k", k)
        .param("p", p)
        .param("r", r)
        .param("n_max", n_max)
        .param("init", init);
    for (n, state) in trace.iter() {
        record.push(n, state);
    }
    if let Some(n) = trace.first_failure {
        record.notes.push(format!("first failure at n = {n}"));
    }
    if let Some(n) = trace.zero_precision_from {
        let note = format!("precision exhausted from n = {n}: later non-failures carry no information");
        if format == Format::Text {
            eprintln!("note: {note}");
        }
        record.notes.push(note);
    }
    emit(format, record, started, |r| {
        r.results
            .iter()
            .map(|row| format!("{} {}\n", row.index, row.value))
            .collect()
    });
    Ok(ExitCode::SUCCESS)
}

fn nk_value(result: &NkResult) -> String {
    match result.status {
        NkStatus::Found(n) => n.to_string(),
        NkStatus::ExceedsCap(cap) => format!(">{cap}"),
    }
}

fn add_nk_rows(record: &mut RunRecord, results: &[NkResult]) {
    for res in results {
        record.push(res.k, nk_value(res));
        if let Some(c) = &res.certificate {
            record.certificates.push(CertificateRow {
                index: res.k.to_string(),
                p: c.p,
                r: c.r,
                n: c.n,
                trace_digest: c.trace_digest.clone(),
            });
        }
    }
}

fn nk(format: Format, started: Instant, ks: KRange, init: &BigUint, hard_cap: u64, digits: u64) -> Outcome {
    let results = if *init == BigUint::from(2u32) {
        nk_table(ks.from, ks.to, init, hard_cap)?
    } else {
        use rayon::prelude::*;
        let budget = DigitBudget::new(digits)?;
        ks.iter()
            .into_par_iter()
            .map(|k| variant_nk(k, init, hard_cap, &budget).map(|v| v.result))
            .collect::<goebel::Result<Vec<_>>>()?
    };
    let mut record = RunRecord::new("nk", "k", "n_k")
        .param("k", ks)
        .param("init", init)
        .param("hard_cap", hard_cap);
    add_nk_rows(&mut record, &results);
    emit(format, record, started, |r| {
        let mut text = String::new();
        for row in &r.results {
            text.push_str(&format!("{} {}", row.index, row.value));
            if let Some(c) = r.certificates.iter().find(|c| c.index == row.index) {
                text.push_str(&format!(" p={} n={}", c.p, c.n));
            }
            text.push('\n');
        }
        text
    });
    Ok(ExitCode::SUCCESS)
}

/// Test builds honour `GOEBEL_FAULT_INJECT=<k>,<p>`: that case is reported
/// as failing at its first index divisible by `p`.
fn fault_injection() -> Option<(u64, u64)> {
    if !cfg!(debug_assertions) {
        return None;
    }
    let spec = std::env::var("GOEBEL_FAULT_INJECT").ok()?;
    let (k, p) = spec.split_once(',')?;
    Some((k.trim().parse().ok()?, p.trim().parse().ok()?))
}

fn verify(format: Format) -> Outcome {
    let fault = fault_injection();
    let report = verify_main_theorem_with(|cfg, n| {
        let mut summary: RunSummary = goebel::residue::run_while(cfg, n, |_| true)?;
        if fault == Some((cfg.k(), cfg.p())) {
            summary.first_failure = Some(cfg.p());
            summary.last = goebel::TrackedResidue::Failure;
        }
        Ok(summary)
    })?;
    let confirmed = report.min_nk.is_some();
    match format {
        Format::Json => out(&format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("TheoremReport is serialisable")
        )),
        Format::Csv => {
            let mut csv = String::from("p,r,k_from,k_to,cases,passed\n");
            for c in &report.prime_checks {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.p, c.r, c.k_from, c.k_to, c.cases, c.passed
                ));
            }
            out(&csv);
        }
        Format::Text => out(&render_report(&report)),
    }
    Ok(if confirmed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn render_report(report: &TheoremReport) -> String {
    let mut out = String::new();
    for c in &report.prime_checks {
        out.push_str(&format!(
            "p = {:>2}, r = {:>2}: k = {}..{} ({} cases), {} integral through n = {}, {} ending at {{0,0}}\n",
            c.p, c.r, c.k_from, c.k_to, c.cases, c.passed, report.target_index, c.ended_at_zero
        ));
    }
    out.push_str(&format!(
        "total: {} cases\np = {}, r = 1, n = {}:\n",
        report.total_cases(),
        report.boundary_prime,
        report.boundary_prime
    ));
    for case in &report.boundary_row {
        out.push_str(&format!("  k = {:>2}: {}\n", case.k, case.state));
    }
    let classes: Vec<String> = report.failing_classes.iter().map(ToString::to_string).collect();
    match report.min_nk {
        Some(min) => out.push_str(&format!(
            "min N_k = {min}; N_k = {min} iff k ≡ {} (mod {}): CONFIRMED\n",
            classes.join(","),
            report.period
        )),
        None => out.push_str(&format!(
            "no class fails at n = {}: NOT CONFIRMED\n",
            report.boundary_prime
        )),
    }
    out
}

fn nset(format: Format, started: Instant, k_to: u64, hard_cap: u64) -> Outcome {
    let table = nk_table(2, k_to.max(2), &BigUint::from(2u32), hard_cap)?;
    let summary: NSetSummary = summarize_n_set(k_to, &table);
    let mut record = RunRecord::new("nset", "n_k", "smallest_k")
        .param("k_to", k_to)
        .param("hard_cap", hard_cap);
    for m in &summary.members {
        record.push(m.value, m.smallest_k);
    }
    for k in &summary.exceeds_cap {
        record.notes.push(format!("k = {k} exceeds the cap {hard_cap}"));
    }
    emit(format, record, started, |_| {
        let mut out = String::new();
        for m in &summary.members {
            let ks: Vec<String> = m.attained_by.iter().map(ToString::to_string).collect();
            out.push_str(&format!(
                "{} {} k = {}\n",
                m.value,
                if m.is_prime { "prime" } else { "composite" },
                ks.join(",")
            ));
        }
        if !summary.exceeds_cap.is_empty() {
            let ks: Vec<String> = summary.exceeds_cap.iter().map(ToString::to_string).collect();
            out.push_str(&format!("exceeds cap {hard_cap}: k = {}\n", ks.join(",")));
        }
        out
    });
    Ok(ExitCode::SUCCESS)
}

fn oeis_check(
    format: Format,
    started: Instant,
    path: &PathBuf,
    k_to: Option<u64>,
    offset: i64,
    hard_cap: u64,
) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let entries = bfile::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut expected = Vec::new();
    for e in &entries {
        let k = e.index - offset + 2;
        if k < 2 || k_to.is_some_and(|top| k as u64 > top) {
            continue;
        }
        expected.push((k as u64, e.value.clone()));
    }
    let mut record = RunRecord::new("oeis-check", "k", "status")
        .param("path", path.display())
        .param("offset", offset)
        .param("hard_cap", hard_cap);
    if let Some(top) = k_to {
        record = record.param("k_to", top);
    }
    let mut mismatches = 0;
    if let (Some(first), Some(last)) = (expected.first(), expected.last()) {
        let table = nk_table(first.0, last.0, &BigUint::from(2u32), hard_cap)?;
        for (k, want) in &expected {
            let got = &table[(k - first.0) as usize];
            let ok = got.value().map(num_bigint::BigInt::from).as_ref() == Some(want);
            if !ok {
                mismatches += 1;
            }
            record.push(
                k,
                format!(
                    "{} expected={} computed={}",
                    if ok { "match" } else { "mismatch" },
                    want,
                    nk_value(got)
                ),
            );
        }
    }
    let matches = expected.len() - mismatches;
    record.notes.push(format!("{matches} matches, {mismatches} mismatches"));
    emit(format, record, started, |r| {
        let mut out: String = r
            .results
            .iter()
            .map(|row| format!("k = {}: {}\n", row.index, row.value))
            .collect();
        out.push_str(&format!("{matches} matches, {mismatches} mismatches\n"));
        out
    });
    Ok(if mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
