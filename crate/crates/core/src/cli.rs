//! Command-line front end: curve generation, the extra-syzygy count, genus
//! sweeps, the Koszul oracle and an all-in-one `verify`.
//!
//! Exit codes: 0 pass, 1 usage, 2 degenerate instance, 3 applicability
//! violation (scalar window, construction threshold), 4 a check failed or
//! could not be completed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::comparison::{
    betti_delta, forced_factor_count, kernel_element, mapping_cone_betti, theorem_threshold, BettiDelta,
    ComparisonError,
};
use crate::gonal5::{
    bertini_predicate, config_for_genus, generate_curve, laplace_identity, random_psi, BundleJson, CurveBundle,
    GonalError,
};
use crate::koszul::{curve_quotient, koszul_betti, KoszulError, MonomialOrder};
use crate::linalg::{LinalgError, PrimeField, DEFAULT_MEMORY_BUDGET, DEFAULT_PRIME};

/// Version of the report layout in `schemas/run_report.schema.json`.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest genus for which sweeps and `verify` compute the full kernel.
pub const FULL_MODE_MAX_GENUS: u32 = 19;

/// Oracle positions above this need `--slow`.
pub const ORACLE_FAST_MAX_P: usize = 2;

/// Largest scalar map ranked when predicting Betti numbers from the mapping cone.
const CONE_MAX_DIM: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Usage = 1,
    Degenerate = 2,
    Applicability = 3,
    Failure = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    fn new(exit: Exit, message: impl Into<String>) -> Self {
        CliError {
            exit,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(Exit::Usage, message)
    }
}

impl From<GonalError> for CliError {
    fn from(e: GonalError) -> Self {
        let exit = match &e {
            GonalError::GenusTooSmall(_) | GonalError::InvalidBundle(_) => Exit::Usage,
            GonalError::Linalg(LinalgError::NotPrime(_)) => Exit::Usage,
            GonalError::Degenerate { .. } => Exit::Degenerate,
            _ => Exit::Failure,
        };
        CliError::new(exit, e.to_string())
    }
}

impl From<ComparisonError> for CliError {
    fn from(e: ComparisonError) -> Self {
        match e {
            ComparisonError::Gonal(g) => g.into(),
            ComparisonError::WindowViolated { .. } | ComparisonError::Threshold { .. } => {
                CliError::new(Exit::Applicability, e.to_string())
            }
            ComparisonError::Degenerate { .. } => CliError::new(Exit::Degenerate, e.to_string()),
            _ => CliError::new(Exit::Failure, e.to_string()),
        }
    }
}

impl From<KoszulError> for CliError {
    fn from(e: KoszulError) -> Self {
        CliError::new(Exit::Failure, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(Exit::Failure, e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "syzygy5", version, about = "Extra syzygies of 5-gonal canonical curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random 5-gonal curve and write it as JSON.
    GenCurve(GenCurveArgs),
    /// dim ker ψ_{n-2} and the Betti numbers of scroll and curve.
    BettiDelta(BettiDeltaArgs),
    /// Certificates (and kernel dimensions) over a list of genera.
    Sweep(SweepArgs),
    /// Koszul-cohomology Betti numbers compared with the mapping cone.
    Oracle(OracleArgs),
    /// Run every check for one genus.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Characteristic of the base field.
    #[arg(long, env = "SYZYGY5_PRIME", default_value_t = DEFAULT_PRIME)]
    pub prime: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct GenCurveArgs {
    #[arg(long)]
    pub genus: u32,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// A curve written by `gen-curve`.
    #[arg(long = "in", conflicts_with = "genus", required_unless_present = "genus")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub genus: Option<u32>,
    #[command(flatten)]
    pub field: FieldArgs,
}

#[derive(Args, Debug)]
pub struct BettiDeltaArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Repeat at a second prime and warn if the kernel dimensions differ.
    #[arg(long)]
    pub second_prime: Option<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Full,
    Certificate,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Comma-separated genera or ranges `A-B` / `A-B:STEP`, e.g. `21-41:2,28,30`.
    #[arg(long, value_parser = parse_genus_list)]
    pub genus_list: GenusList,
    #[arg(long, default_value_t = 0)]
    pub shift: usize,
    #[arg(long, value_enum, default_value_t = SweepMode::Certificate)]
    pub mode: SweepMode,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Positions `p`, comma separated.
    #[arg(long = "p", value_delimiter = ',', default_values_t = [1usize, 2])]
    pub positions: Vec<usize>,
    /// Bytes, with an optional K, M or G suffix.
    #[arg(long, value_parser = parse_bytes, default_value = "4G")]
    pub memory_budget: usize,
    /// Allow positions above 2 (minutes of work and gigabytes of memory).
    #[arg(long)]
    pub slow: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub genus: u32,
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusList(pub Vec<u32>);

pub fn parse_genus_list(s: &str) -> Result<GenusList, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (range, step) = match item.split_once(':') {
            Some((r, st)) => (r, st.parse::<u32>().map_err(|e| format!("bad step in {item:?}: {e}"))?),
            None => (item, 1),
        };
        if step == 0 {
            return Err(format!("zero step in {item:?}"));
        }
        let num = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("bad genus {x:?}: {e}"));
        match range.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range {item:?}"));
                }
                out.extend((a..=b).step_by(step as usize));
            }
            None => out.push(num(range)?),
        }
    }
    if out.is_empty() {
        return Err("no genera given".into());
    }
    Ok(GenusList(out))
}

pub fn parse_bytes(s: &str) -> Result<usize, String> {
    let s = s.trim();
    let (num, mult) = match s.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&s[..s.len() - 1], 1usize << 10),
        Some('M') => (&s[..s.len() - 1], 1 << 20),
        Some('G') => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    num.trim()
        .parse::<usize>()
        .map_err(|e| format!("bad byte count {s:?}: {e}"))?
        .checked_mul(mult)
        .ok_or_else(|| format!("{s:?} overflows"))
}

/// Machine-readable record of one command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub version: String,
    pub command: String,
    pub inputs: Value,
    /// SHA-256 of the compact JSON of `inputs`.
    pub config_hash: String,
    pub outputs: Value,
    /// Seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub exit_code: i32,
}

impl RunReport {
    fn new(command: &str, inputs: Value) -> Self {
        let digest = Sha256::digest(inputs.to_string().as_bytes());
        RunReport {
            schema_version: REPORT_SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_hash: digest.iter().map(|b| format!("{b:02x}")).collect(),
            inputs,
            outputs: Value::Null,
            timings: BTreeMap::new(),
            exit_code: 0,
        }
    }
}

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Timer(Instant::now())
    }

    fn stop(self, report: &mut RunReport, phase: &str) -> f64 {
        let s = self.0.elapsed().as_secs_f64();
        *report.timings.entry(phase.to_string()).or_default() += s;
        s
    }
}

fn field(prime: u32) -> Result<PrimeField, CliError> {
    PrimeField::new(prime).map_err(|e| CliError::usage(format!("--prime: {e}")))
}

fn load_bundle(path: &Path) -> Result<CurveBundle, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let json: BundleJson = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{} is not a curve bundle: {e}", path.display())))?;
    Ok(CurveBundle::from_json(&json)?)
}

fn input_bundle(args: &InputArgs) -> Result<CurveBundle, CliError> {
    match (&args.input, args.genus) {
        (Some(path), _) => load_bundle(path),
        (None, Some(g)) => Ok(generate_curve(g, &field(args.field.prime)?, args.field.seed)?),
        (None, None) => Err(CliError::usage("give --in FILE or --genus G")),
    }
}

fn input_json(args: &InputArgs) -> Value {
    json!({
        "in": args.input.as_ref().map(|p| p.display().to_string()),
        "genus": args.genus,
        "prime": args.field.prime,
        "seed": args.field.seed,
    })
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    if e.kind() == DisplayHelpOnMissingArgumentOrSubcommand {
                        Exit::Usage
                    } else {
                        Exit::Pass
                    }
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    Exit::Usage
                }
            };
            return code as i32;
        }
    };
    let result = match &cli.command {
        Command::GenCurve(a) => cmd_gen_curve(a, out),
        Command::BettiDelta(a) => cmd_betti_delta(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(exit) => exit as i32,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            if e.exit == Exit::Usage {
                let _ = writeln!(err, "run `syzygy5 --help` for usage");
            }
            e.exit as i32
        }
    }
}

fn emit_json(out: &mut dyn Write, report: &RunReport) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, report).map_err(|e| CliError::new(Exit::Failure, e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn cmd_gen_curve(args: &GenCurveArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let mut report = RunReport::new(
        "gen-curve",
        json!({"genus": args.genus, "prime": args.field.prime, "seed": args.field.seed}),
    );
    let field = field(args.field.prime)?;
    let t = Timer::start();
    let bundle = generate_curve(args.genus, &field, args.field.seed)?;
    t.stop(&mut report, "generate");
    let text =
        serde_json::to_string_pretty(&bundle.to_json()).map_err(|e| CliError::new(Exit::Failure, e.to_string()))?;
    match &args.out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| CliError::new(Exit::Failure, format!("cannot write {}: {e}", path.display())))?,
        None if !args.json => writeln!(out, "{text}")?,
        None => {}
    }
    let g = args.genus as usize;
    report.outputs = json!({
        "quadrics": bundle.quadrics.len(),
        "hilbert": [3 * g - 3, 5 * g - 5],
        "type": bundle.config().type_tag.to_string(),
        "out": args.out.as_ref().map(|p| p.display().to_string()),
    });
    if args.json {
        emit_json(out, &report)?;
    } else if let Some(path) = &args.out {
        writeln!(
            out,
            "genus {}: {} quadrics, Hilbert function {} and {} in degrees 2 and 3; written to {}",
            args.genus,
            bundle.quadrics.len(),
            3 * g - 3,
            5 * g - 5,
            path.display()
        )?;
    }
    Ok(Exit::Pass)
}

fn delta_json(d: &BettiDelta) -> Value {
    json!({
        "genus": d.genus,
        "prime": d.prime,
        "seed": d.seed,
        "j": d.j,
        "rows": d.rows,
        "cols": d.cols,
        "rank": d.rank,
        "dim_ker": d.dim_ker,
        "betti_X": d.betti_x,
        "betti_C": d.betti_c,
    })
}

pub fn cmd_betti_delta(args: &BettiDeltaArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Exit, CliError> {
    let mut inputs = input_json(&args.input);
    inputs["second_prime"] = json!(args.second_prime);
    let mut report = RunReport::new("betti-delta", inputs);
    let t = Timer::start();
    let bundle = input_bundle(&args.input)?;
    t.stop(&mut report, "generate");
    let t = Timer::start();
    let d = betti_delta(&bundle.psi)?;
    t.stop(&mut report, "rank");
    let mut outputs = delta_json(&d);
    outputs["type"] = json!(bundle.config().type_tag.to_string());
    let mut warning = None;
    if let Some(p2) = args.second_prime {
        let f2 = field(p2)?;
        let t = Timer::start();
        let psi2 = random_psi(bundle.config(), &f2, bundle.psi.seed);
        let d2 = betti_delta(&psi2)?;
        t.stop(&mut report, "second_prime");
        if d2.dim_ker != d.dim_ker {
            warning = Some(format!(
                "bad-prime warning: dim ker is {} mod {} but {} mod {}",
                d.dim_ker, d.prime, d2.dim_ker, d2.prime
            ));
        }
        outputs["second"] = delta_json(&d2);
    }
    outputs["warning"] = json!(warning);
    report.outputs = outputs;
    if let Some(w) = &warning {
        writeln!(err, "{w}")?;
    }
    if args.json {
        emit_json(out, &report)?;
    } else {
        let n = bundle.config().n;
        writeln!(
            out,
            "genus {} (type {}), prime {}, seed {}",
            d.genus,
            bundle.config().type_tag,
            d.prime,
            d.seed
        )?;
        writeln!(out, "psi_{}: {} x {}, rank {}", d.j, d.rows, d.cols, d.rank)?;
        writeln!(out, "dim ker       = {}", d.dim_ker)?;
        writeln!(out, "beta_{{{n},{}}}(X) = {}", n + 1, d.betti_x)?;
        writeln!(out, "beta_{{{n},{}}}(C) = {}", n + 1, d.betti_c)?;
    }
    Ok(Exit::Pass)
}

/// One genus of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub genus: u32,
    pub shift: usize,
    pub j: Option<usize>,
    pub forced: Option<usize>,
    pub threshold_met: bool,
    /// `verified`, `expected` (below the threshold, construction unavailable),
    /// `failed`, `degenerate` or `error`.
    pub status: String,
    pub certificate: Option<bool>,
    pub dim_ker: Option<usize>,
    pub note: Option<String>,
    pub seconds: f64,
}

impl SweepRow {
    fn passed(&self) -> bool {
        self.status == "verified" || self.status == "expected"
    }
}

pub fn sweep_row(g: u32, shift: usize, mode: SweepMode, field: &PrimeField, seed: u64) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow {
        genus: g,
        shift,
        j: None,
        forced: None,
        threshold_met: theorem_threshold(g, shift),
        status: "error".into(),
        certificate: None,
        dim_ker: None,
        note: None,
        seconds: 0.0,
    };
    let cfg = match config_for_genus(g) {
        Ok(c) => c,
        Err(e) => {
            row.note = Some(e.to_string());
            return row;
        }
    };
    row.j = Some(cfg.n as usize - 2 + shift);
    row.forced = Some(forced_factor_count(&cfg, shift));
    let psi = random_psi(&cfg, field, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    match kernel_element(&psi, shift, &mut rng) {
        Ok(el) => {
            row.certificate = Some(el.certificate.verified);
            ok &= el.certificate.verified;
            if !el.certificate.verified {
                row.note = Some("certificate checks failed".into());
            }
        }
        Err(e @ ComparisonError::Threshold { .. }) if !row.threshold_met => {
            row.note = Some(format!("expected: {e}"));
        }
        Err(e @ ComparisonError::Degenerate { .. }) => {
            row.status = "degenerate".into();
            row.note = Some(e.to_string());
            row.seconds = start.elapsed().as_secs_f64();
            return row;
        }
        Err(e) => {
            ok = false;
            row.note = Some(e.to_string());
        }
    }
    if mode == SweepMode::Full && g <= FULL_MODE_MAX_GENUS && shift == 0 {
        match betti_delta(&psi) {
            Ok(d) => {
                row.dim_ker = Some(d.dim_ker);
                if row.threshold_met && d.dim_ker == 0 {
                    ok = false;
                    row.note = Some("dim ker is 0 above the threshold".into());
                }
            }
            Err(e) => {
                ok = false;
                row.note = Some(e.to_string());
            }
        }
    }
    row.status = match (ok, row.certificate) {
        (false, _) => "failed",
        (true, Some(true)) => "verified",
        (true, _) if !row.threshold_met => "expected",
        _ => "failed",
    }
    .into();
    row.seconds = start.elapsed().as_secs_f64();
    row
}

/// [`sweep_row`] for every genus, spread over the available cores. Rows come
/// back in input order.
pub fn sweep_rows(genera: &[u32], shift: usize, mode: SweepMode, field: &PrimeField, seed: u64) -> Vec<SweepRow> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(genera.len());
    if workers <= 1 {
        return genera.iter().map(|&g| sweep_row(g, shift, mode, field, seed)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut rows: Vec<Option<SweepRow>> = vec![None; genera.len()];
    let done = std::sync::Mutex::new(&mut rows);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if k >= genera.len() {
                    break;
                }
                let row = sweep_row(genera[k], shift, mode, field, seed);
                done.lock().unwrap()[k] = Some(row);
            });
        }
    });
    rows.into_iter().map(|r| r.expect("every genus is processed")).collect()
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let mut report = RunReport::new(
        "sweep",
        json!({
            "genus_list": args.genus_list.0,
            "shift": args.shift,
            "mode": args.mode,
            "prime": args.field.prime,
            "seed": args.field.seed,
        }),
    );
    let field = field(args.field.prime)?;
    if !args.json {
        writeln!(
            out,
            "{:>5} {:>2} {:>3} {:>6} {:>9} {:>11} {:>7} {:>9}",
            "genus", "c", "j", "forced", "threshold", "certificate", "dim_ker", "seconds"
        )?;
    }
    let start = Instant::now();
    let rows = sweep_rows(&args.genus_list.0, args.shift, args.mode, &field, args.field.seed);
    report.timings.insert("total".into(), start.elapsed().as_secs_f64());
    for row in &rows {
        if !args.json {
            let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
            writeln!(
                out,
                "{:>5} {:>2} {:>3} {:>6} {:>9} {:>11} {:>7} {:>9.2}  {}{}",
                row.genus,
                row.shift,
                opt(row.j),
                opt(row.forced),
                if row.threshold_met { "met" } else { "not met" },
                match row.certificate {
                    Some(true) => "verified",
                    Some(false) => "FAILED",
                    None => "-",
                },
                opt(row.dim_ker),
                row.seconds,
                row.status,
                row.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default()
            )?;
        }
    }
    let exit = if rows.iter().any(|r| !r.passed() && r.status != "degenerate") {
        Exit::Failure
    } else if rows.iter().any(|r| r.status == "degenerate") {
        Exit::Degenerate
    } else {
        Exit::Pass
    };
    report.exit_code = exit as i32;
    report.outputs = json!({ "rows": rows });
    if args.json {
        emit_json(out, &report)?;
    }
    Ok(exit)
}

/// One oracle position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub p: usize,
    pub koszul: Option<usize>,
    pub mapping_cone: Option<usize>,
    /// `agree`, `disagree`, `no prediction` or `error`.
    pub verdict: String,
    pub error: Option<String>,
    pub seconds: f64,
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let mut inputs = input_json(&args.input);
    inputs["p"] = json!(args.positions);
    inputs["memory_budget"] = json!(args.memory_budget);
    inputs["slow"] = json!(args.slow);
    let mut report = RunReport::new("oracle", inputs);
    if let Some(&p) = args.positions.iter().find(|&&p| p > ORACLE_FAST_MAX_P && !args.slow) {
        return Err(CliError::usage(format!("p = {p} is a slow computation; pass --slow")));
    }
    let t = Timer::start();
    let bundle = input_bundle(&args.input)?;
    t.stop(&mut report, "generate");
    let field = bundle.field();
    let t = Timer::start();
    let table = mapping_cone_betti(&bundle.psi, CONE_MAX_DIM)?;
    t.stop(&mut report, "mapping_cone");
    let quotient = curve_quotient(&bundle, MonomialOrder::Lex)?;
    let mut rows = Vec::new();
    for &p in &args.positions {
        let start = Instant::now();
        let prediction = table.linear.get(p).copied().flatten();
        let (koszul, error) = match koszul_betti(&field, &quotient, p, args.memory_budget) {
            Ok(b) => (Some(b), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let verdict = match (koszul, prediction) {
            (None, _) => "error",
            (Some(_), None) => "no prediction",
            (Some(k), Some(m)) if k == m => "agree",
            _ => "disagree",
        };
        let seconds = start.elapsed().as_secs_f64();
        *report.timings.entry("koszul".into()).or_default() += seconds;
        rows.push(OracleRow {
            p,
            koszul,
            mapping_cone: prediction,
            verdict: verdict.into(),
            error,
            seconds,
        });
        if koszul.is_none() {
            // budget exhausted: report what we have
            break;
        }
    }
    let exit = if rows.len() == args.positions.len() && rows.iter().all(|r| r.verdict == "agree") {
        Exit::Pass
    } else {
        Exit::Failure
    };
    report.exit_code = exit as i32;
    report.outputs = json!({
        "genus": bundle.genus(),
        "quotient_dim": quotient.dim(),
        "rows": rows,
        "complete": rows.len() == args.positions.len(),
    });
    if args.json {
        emit_json(out, &report)?;
    } else {
        writeln!(
            out,
            "genus {}, prime {}, seed {}",
            bundle.genus(),
            field.p(),
            bundle.psi.seed
        )?;
        writeln!(
            out,
            "{:>3} {:>7} {:>12} {:>14} {:>8}",
            "p", "koszul", "mapping-cone", "verdict", "seconds"
        )?;
        for r in &rows {
            let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
            writeln!(
                out,
                "{:>3} {:>7} {:>12} {:>14} {:>8.2}{}",
                r.p,
                opt(r.koszul),
                opt(r.mapping_cone),
                r.verdict,
                r.seconds,
                r.error.as_ref().map(|e| format!("  {e}")).unwrap_or_default()
            )?;
        }
        if rows.len() < args.positions.len() {
            writeln!(
                out,
                "stopped early; positions after p = {} were not computed",
                rows.last().map_or(0, |r| r.p)
            )?;
        }
    }
    Ok(exit)
}

/// One check of `verify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `pass`, `fail`, `expected` or `skipped`.
    pub status: String,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        status: if pass { "pass" } else { "fail" }.into(),
        detail: detail.into(),
    }
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let g = args.genus;
    let (prime, seed) = (args.field.prime, args.field.seed);
    let mut report = RunReport::new("verify", json!({"genus": g, "prime": prime, "seed": seed}));
    let field = field(prime)?;
    let replay = |cmd: &str| format!("syzygy5 {cmd} --genus {g} --prime {prime} --seed {seed}");
    let mut checks: Vec<(Check, Exit, String)> = Vec::new();

    let t = Timer::start();
    let bundle = match generate_curve(g, &field, seed) {
        Ok(b) => b,
        Err(e) => {
            let err: CliError = e.into();
            return Err(CliError::new(
                err.exit,
                format!("{}; reproduce with `{}`", err.message, replay("gen-curve")),
            ));
        }
    };
    t.stop(&mut report, "generate");
    let cfg = bundle.config().clone();
    let gu = g as usize;
    checks.push((
        check(
            "curve",
            true,
            format!(
                "{} quadrics, Hilbert function {} and {}",
                bundle.quadrics.len(),
                3 * gu - 3,
                5 * gu - 5
            ),
        ),
        Exit::Degenerate,
        replay("gen-curve"),
    ));
    let laplace = laplace_identity(&bundle.psi, &bundle.pfaffians)?;
    checks.push((
        check("laplace", laplace, "Σ_i Ψ_qi Pf_i = 0 for every row"),
        Exit::Failure,
        replay("gen-curve"),
    ));
    checks.push((
        Check {
            name: "bertini".into(),
            status: "pass".into(),
            detail: format!(
                "global generation predicate is {}",
                bertini_predicate(&cfg, &bundle.psi.scroll)
            ),
        },
        Exit::Failure,
        String::new(),
    ));

    let threshold = theorem_threshold(g, 0);
    if g <= FULL_MODE_MAX_GENUS {
        let t = Timer::start();
        let c = match betti_delta(&bundle.psi) {
            Ok(d) => check(
                "dim_ker",
                !threshold || d.dim_ker >= 1,
                format!(
                    "dim ker = {}, beta(C) = {}, beta(X) = {}",
                    d.dim_ker, d.betti_c, d.betti_x
                ),
            ),
            Err(e @ ComparisonError::WindowViolated { .. }) => Check {
                name: "dim_ker".into(),
                status: if threshold { "fail" } else { "skipped" }.into(),
                detail: e.to_string(),
            },
            Err(e) => check("dim_ker", false, e.to_string()),
        };
        t.stop(&mut report, "rank");
        checks.push((c, Exit::Failure, replay("betti-delta")));
    }

    let t = Timer::start();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = match kernel_element(&bundle.psi, 0, &mut rng) {
        Ok(el) => check(
            "certificate",
            el.certificate.verified,
            format!(
                "decomposable element of ker ψ_{} with {} forced factors: {}",
                el.j,
                el.forced,
                if el.certificate.verified {
                    "verified"
                } else {
                    "membership checks failed"
                }
            ),
        ),
        Err(e @ ComparisonError::Threshold { .. }) if !threshold => Check {
            name: "certificate".into(),
            status: "expected".into(),
            detail: format!("below the construction threshold: {e}"),
        },
        Err(e) => check("certificate", false, e.to_string()),
    };
    t.stop(&mut report, "certificate");
    checks.push((
        c,
        Exit::Failure,
        format!("syzygy5 sweep --genus-list {g} --prime {prime} --seed {seed}"),
    ));

    if g == 13 {
        let t = Timer::start();
        let c = (|| -> Result<Check, CliError> {
            let table = mapping_cone_betti(&bundle.psi, CONE_MAX_DIM)?;
            let q = curve_quotient(&bundle, MonomialOrder::Lex)?;
            let mut agree = true;
            let mut parts = Vec::new();
            for p in 1..=ORACLE_FAST_MAX_P {
                let k = koszul_betti(&field, &q, p, DEFAULT_MEMORY_BUDGET)?;
                agree &= table.linear[p] == Some(k);
                parts.push(format!("p={p}: {k}"));
            }
            Ok(check("oracle", agree, parts.join(", ")))
        })()
        .unwrap_or_else(|e| check("oracle", false, e.message));
        t.stop(&mut report, "oracle");
        checks.push((c, Exit::Failure, replay("oracle")));
    }

    let first_failure = checks.iter().find(|c| c.0.status == "fail");
    let exit = first_failure.map_or(Exit::Pass, |c| c.1);
    report.exit_code = exit as i32;
    report.outputs = json!({
        "genus": g,
        "type": cfg.type_tag.to_string(),
        "checks": checks.iter().map(|c| &c.0).collect::<Vec<_>>(),
    });
    if args.json {
        emit_json(out, &report)?;
    } else {
        writeln!(out, "genus {g} (type {}), prime {prime}, seed {seed}", cfg.type_tag)?;
        for (c, _, _) in &checks {
            writeln!(out, "  {:<12} {:<8} {}", c.name, c.status.to_uppercase(), c.detail)?;
        }
        if let Some((c, _, cmd)) = first_failure {
            writeln!(out, "first failure: {}; reproduce with `{cmd}`", c.name)?;
        }
    }
    Ok(exit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_lists() {
        assert_eq!(parse_genus_list("13,15").unwrap().0, vec![13, 15]);
        assert_eq!(parse_genus_list("21-27:2, 28").unwrap().0, vec![21, 23, 25, 27, 28]);
        assert_eq!(parse_genus_list("9-11").unwrap().0, vec![9, 10, 11]);
        assert!(parse_genus_list("").is_err());
        assert!(parse_genus_list("15-13").is_err());
        assert!(parse_genus_list("13-15:0").is_err());
        assert!(parse_genus_list("x").is_err());
    }

    #[test]
    fn byte_counts() {
        assert_eq!(parse_bytes("4G").unwrap(), 4 << 30);
        assert_eq!(parse_bytes("512m").unwrap(), 512 << 20);
        assert_eq!(parse_bytes("1000").unwrap(), 1000);
        assert!(parse_bytes("lots").is_err());
    }

    #[test]
    fn config_hash_depends_on_inputs() {
        let a = RunReport::new("x", json!({"genus": 13}));
        let b = RunReport::new("x", json!({"genus": 15}));
        assert_eq!(a.config_hash.len(), 64);
        assert_ne!(a.config_hash, b.config_hash);
        assert_eq!(a.config_hash, RunReport::new("x", json!({"genus": 13})).config_hash);
    }
}
