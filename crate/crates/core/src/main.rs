use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use unramified::bar::{qz_orders, BarOptions, CohomologyOrders};
use unramified::cochain::{verify_all, LabOptions, Status, VerificationResult};
use unramified::group::{builtin, verify_group, GroupSpec, GroupVerification, BUILTINS};
use unramified::guard::GUARD_ENV;
use unramified::obstruction::{analyze, compare_decomposables};
use unramified::{Error, Guard};

const EXIT_VERIFICATION_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "unramified", version, about = "Unramified cohomology obstructions for exponent-p central extensions")]
struct Cli {
    /// Work-unit budget for enumerations (default 2^28)
    #[arg(long, global = true, env = GUARD_ENV, value_name = "UNITS")]
    guard: Option<u64>,
    /// Wall-clock limit for long eliminations
    #[arg(long, global = true, value_name = "SECONDS")]
    timeout: Option<u64>,
    /// Emit JSON
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit human-readable text (default)
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Spec file in JSON
    #[arg(long, value_name = "PATH")]
    spec: Option<PathBuf>,
    /// Name of a builtin spec
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
}

#[derive(Args)]
struct Strictness {
    /// Reject specs with non-surjective gamma or nontrivial radical
    #[arg(long, overrides_with = "no_strict")]
    strict: bool,
    #[arg(long, overrides_with = "strict")]
    no_strict: bool,
}

impl Strictness {
    fn resolve(&self, default: bool) -> bool {
        if self.strict {
            true
        } else if self.no_strict {
            false
        } else {
            default
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute K, S, S_dec and K_max in degrees 2 and 3 with the verdict
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        strictness: Strictness,
    },
    /// Check group axioms, exponent, derived subgroup and center
    VerifyGroup {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        strictness: Strictness,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the cochain identities exhaustively
    VerifyLemmas {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        strictness: Strictness,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Independent oracles
    Oracle {
        #[command(subcommand)]
        which: Oracle,
    },
    /// List the builtin specs
    Builtins,
}

#[derive(Subcommand)]
enum Oracle {
    /// Cohomology orders from the normalized bar complex
    Cohomology {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        strictness: Strictness,
        /// Highest degree
        #[arg(long, default_value_t = 2)]
        degree: usize,
        /// Coefficient modulus, a power of p (default |G|)
        #[arg(long)]
        modulus: Option<u64>,
        /// Allow differentials beyond the guaranteed tier
        #[arg(long)]
        allow_heavy: bool,
    },
    /// Fast versus brute-force decomposable subspace
    Decomposables {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        strictness: Strictness,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
}

struct Context {
    json: bool,
    guard: Guard,
}

impl Context {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<(), Error> {
        let out = if self.json {
            let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
            s.push('\n');
            s
        } else {
            text()
        };
        let mut stdout = std::io::stdout().lock();
        match stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Internal(format!("stdout: {e}"))),
            _ => Ok(()),
        }
    }
}

fn load(input: &Input, strict: bool) -> Result<GroupSpec, Error> {
    let spec = match (&input.spec, &input.builtin) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
            GroupSpec::from_json(&text)?
        }
        (None, Some(name)) => builtin(name)?,
        _ => return Err(Error::InvalidArgument("exactly one of --spec, --builtin".into())),
    };
    spec.validate(strict)?;
    Ok(spec)
}

fn group_text(v: &GroupVerification) -> String {
    let mut out = format!("|G| = {}, mode: {}\n", v.order, match &v.mode {
        unramified::group::CheckMode::Exhaustive => "exhaustive".to_string(),
        unramified::group::CheckMode::Sampled { seed, samples } => format!("sampled ({samples} triples, seed {seed})"),
    });
    for c in &v.checks {
        out.push_str(&format!("{}: {} ({} cases)", c.name, if c.pass { "pass" } else { "FAIL" }, c.cases));
        if let Some(x) = &c.counterexample {
            out.push_str(&format!(" counterexample: {x}"));
        }
        out.push('\n');
    }
    out
}

fn lemmas_text(results: &[VerificationResult]) -> String {
    let mut out = String::new();
    for r in results {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        };
        out.push_str(&format!("{}: {status}", r.identity.name()));
        match (&r.status, &r.detail) {
            (Status::Skipped, Some(d)) => out.push_str(&format!(" ({})", d.trim_start_matches("skipped: "))),
            (_, Some(d)) => out.push_str(&format!(" ({} cases) {d}", r.cases)),
            (_, None) => out.push_str(&format!(" ({} cases)", r.cases)),
        }
        out.push('\n');
    }
    out
}

fn cohomology_text(r: &CohomologyOrders) -> String {
    let mut out = format!("|G| = {}, coefficients Z/{}\n", r.group_order, r.modulus);
    for d in &r.degrees {
        out.push_str(&format!("|H^{}(G, Z/{})| = {}", d.degree, r.modulus, d.order_mod));
        if let Some(q) = d.qz_order {
            out.push_str(&format!(", |H^{}(Q/Z)| = {q}", d.degree));
            if d.qz_killed_by_p == Some(true) {
                out.push_str(" (killed by p)");
            }
        }
        out.push('\n');
    }
    out
}

fn log_base(p: u64, modulus: u64) -> Result<u32, Error> {
    let mut k = 0u32;
    let mut m = modulus;
    while m > 1 && m % p == 0 {
        m /= p;
        k += 1;
    }
    if m != 1 || k == 0 {
        return Err(Error::InvalidArgument(format!("modulus {modulus} is not a positive power of {p}")));
    }
    Ok(k)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let mut guard = cli.guard.map(Guard::new).unwrap_or_default();
    if let Some(secs) = cli.timeout {
        guard = guard.with_timeout(Duration::from_secs(secs));
    }
    let ctx = Context { json: cli.json, guard };
    match cli.command {
        Command::Analyze { input, strictness } => {
            let spec = load(&input, strictness.resolve(true))?;
            let report = analyze(&spec, strictness.resolve(true))?;
            ctx.emit(&report, || report.to_text())?;
            Ok(0)
        }
        Command::VerifyGroup { input, strictness, seed } => {
            let spec = load(&input, strictness.resolve(true))?;
            let v = verify_group(&spec, seed, &ctx.guard)?;
            ctx.emit(&v, || group_text(&v))?;
            Ok(if v.pass() { 0 } else { EXIT_VERIFICATION_FAILED })
        }
        Command::VerifyLemmas { input, strictness, seed } => {
            let spec = load(&input, strictness.resolve(false))?;
            let results = verify_all(&spec, &LabOptions { seed, guard: ctx.guard })?;
            ctx.emit(&results, || lemmas_text(&results))?;
            Ok(if results.iter().all(VerificationResult::pass) { 0 } else { EXIT_VERIFICATION_FAILED })
        }
        Command::Oracle { which: Oracle::Cohomology { input, strictness, degree, modulus, allow_heavy } } => {
            let spec = load(&input, strictness.resolve(false))?;
            let k = modulus.map(|m| log_base(spec.p() as u64, m)).transpose()?;
            let r = qz_orders(&spec, degree, k, &BarOptions { allow_heavy, guard: ctx.guard })?;
            ctx.emit(&r, || cohomology_text(&r))?;
            Ok(0)
        }
        Command::Oracle { which: Oracle::Decomposables { input, strictness, degree } } => {
            let spec = load(&input, strictness.resolve(false))?;
            let c = compare_decomposables(&spec, degree, &ctx.guard)?;
            ctx.emit(&c, || format!("{}\n", c.to_text()))?;
            Ok(if c.agree { 0 } else { EXIT_VERIFICATION_FAILED })
        }
        Command::Builtins => {
            #[derive(Serialize)]
            struct Entry {
                name: &'static str,
                description: &'static str,
            }
            let entries: Vec<Entry> = BUILTINS
                .iter()
                .map(|b| Entry { name: b.name, description: b.description })
                .collect();
            ctx.emit(&entries, || {
                entries.iter().map(|e| format!("{:<12} {}\n", e.name, e.description)).collect()
            })?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
