//! `qed` command-line front end.
//!
//! Every subcommand takes its settings from flags and, optionally, a JSON
//! config file given with `--config`; flags win over the file. Runs that write
//! files also write `<out stem>.manifest.json`, which echoes the merged
//! config and can be passed back as `--config` to reproduce the run.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 when a valid run fails
//! (for example when no codewords survive post-selection).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qed_core::codes::{code_distance_bruteforce, Distance, DEFAULT_DISTANCE_BUDGET};
use qed_core::experiments::{
    code_hash, codeword_timing_benchmark, mean_growth_ratio, run_pseudothreshold, run_sweep,
    write_timing_csv, CodeFamily, CrossoverReference, Method, PseudothresholdConfig,
    SweepConfig,
};
use qed_core::{
    circuit_stats, synthesize_encoder, validate_code, verify_encoder, CliffordCircuit, Error,
    ExperimentKind, LogicalBasis, NoiseKind, NoiseModel, NoisePlacement, StabilizerCode,
    StatsMode,
};

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "QED_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qed", version, about = "Error-detection experiments on stabilizer codes")]
pub struct Cli {
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Memory experiments: encode, apply an even number of X̄, measure.
    Memory(SweepArgs),
    /// Logical Bell-state experiments on two code blocks.
    Bell(SweepArgs),
    /// Noise rate below which error detection beats the unencoded circuit.
    Pseudothreshold(PseudothresholdArgs),
    /// Wall time of codeword enumeration on random codes.
    CodewordsBench(BenchArgs),
    /// Write an encoding circuit for a code.
    Encode(EncodeArgs),
    /// Check a code's invariants and search for its distance.
    ValidateCode(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Memory(_) => "memory",
            Command::Bell(_) => "bell",
            Command::Pseudothreshold(_) => "pseudothreshold",
            Command::CodewordsBench(_) => "codewords-bench",
            Command::Encode(_) => "encode",
            Command::ValidateCode(_) => "validate-code",
        }
    }
}

/// Settings for `memory` and `bell`.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    /// JSON config or manifest; flags take precedence over it.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Code family: repetition or color.
    #[arg(long)]
    pub code: Option<String>,
    /// Code sizes: qubit count for repetition codes, distance for color codes.
    #[arg(long = "size", visible_aliases = ["n", "distance"], value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Even numbers of X̄ layers.
    #[arg(long = "depth", value_delimiter = ',')]
    pub depths: Option<Vec<usize>>,
    /// Logical measurement basis: z or x.
    #[arg(long)]
    pub basis: Option<String>,
    /// `none`, `depolarizing1q:<p>` or `depolarizing_global:<p>`.
    #[arg(long)]
    pub noise: Option<String>,
    /// all-moments or post-encoding.
    #[arg(long)]
    pub placement: Option<String>,
    /// sampled or exact.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub physical_shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Route encoded circuits onto heavy-hex before running.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub routed: Option<bool>,
    /// native-cx or native-cz.
    #[arg(long)]
    pub stats_mode: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PseudothresholdArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub code: Option<String>,
    #[arg(long = "size", visible_aliases = ["n", "distance"], value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long = "depth", value_delimiter = ',')]
    pub depths: Option<Vec<usize>>,
    /// memory or bell.
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long)]
    pub basis: Option<String>,
    /// depolarizing1q or depolarizing_global.
    #[arg(long)]
    pub noise_kind: Option<String>,
    #[arg(long)]
    pub placement: Option<String>,
    /// Error rates: `r1,r2,...` or `log:<lo>:<hi>:<count>`.
    #[arg(long)]
    pub rates: Option<String>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub physical_shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// physical or distance-pairs.
    #[arg(long)]
    pub reference: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Qubit counts.
    #[arg(long = "n", value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long)]
    pub codes_per_n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Restrict to CSS codes and time the CSS shortcut as well.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub css_form: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A code given either by family and size or by a code file.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeArgs {
    #[arg(long)]
    pub code: Option<String>,
    #[arg(long = "distance", visible_aliases = ["n", "size"])]
    pub size: Option<usize>,
    /// Code in text form; overrides `--code`.
    #[arg(long)]
    pub code_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Largest weight searched for logical operators (default: claimed distance).
    #[arg(long)]
    pub max_weight: Option<usize>,
    /// Cap on candidate operators in the distance search.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INVALID,
            message: e.to_string(),
        }
    }

    fn failed(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_FAILED,
            message: e.to_string(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn invalid<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::invalid(msg.into()))
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub outputs: Vec<PathBuf>,
    pub code_hashes: BTreeMap<String, String>,
    pub summary: Value,
}

/// Reads a config file. A manifest is accepted too, as long as it was written
/// by the same subcommand.
pub fn load_config(path: &Path, command: &str) -> Outcome<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::invalid(format!("{} is not valid JSON: {e}", path.display())))?;
    if let (Some(cmd), Some(cfg)) = (v.get("command"), v.get("config")) {
        if cmd != command {
            return invalid(format!(
                "{} is a manifest for {cmd}, not {command}",
                path.display()
            ));
        }
        return Ok(cfg.clone());
    }
    Ok(v)
}

/// Overlays the flags that were given on top of the file config.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<Value>) -> Outcome<T> {
    let mut base = match file {
        Some(Value::Object(m)) => m,
        Some(_) => return invalid("config must be a JSON object"),
        None => Default::default(),
    };
    if let Value::Object(over) = serde_json::to_value(flags).map_err(Failure::invalid)? {
        for (k, v) in over {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| Failure::invalid(format!("bad config: {e}")))
}

fn with_config<T: Serialize + DeserializeOwned>(
    flags: &T,
    config: &Option<PathBuf>,
    command: &str,
) -> Outcome<T> {
    let file = config.as_deref().map(|p| load_config(p, command)).transpose()?;
    merge(flags, file)
}

fn parse<T: std::str::FromStr>(v: &Option<String>, default: T) -> Outcome<T>
where
    T::Err: std::fmt::Display,
{
    match v {
        None => Ok(default),
        Some(s) => s.parse().map_err(Failure::invalid),
    }
}

fn parse_basis(v: &Option<String>) -> Outcome<LogicalBasis> {
    match v.as_deref().map(str::to_ascii_lowercase).as_deref() {
        None | Some("z") => Ok(LogicalBasis::Z),
        Some("x") => Ok(LogicalBasis::X),
        Some(other) => invalid(format!("unknown basis {other:?}, expected z or x")),
    }
}

fn parse_placement(v: &Option<String>) -> Outcome<NoisePlacement> {
    match v.as_deref() {
        None | Some("all-moments") => Ok(NoisePlacement::AllMoments),
        Some("post-encoding") => Ok(NoisePlacement::PostEncoding),
        Some(other) => invalid(format!(
            "unknown placement {other:?}, expected all-moments or post-encoding"
        )),
    }
}

fn parse_stats_mode(v: &Option<String>) -> Outcome<StatsMode> {
    match v.as_deref() {
        None | Some("native-cx") => Ok(StatsMode::NativeCx),
        Some("native-cz") => Ok(StatsMode::NativeCz),
        Some(other) => invalid(format!(
            "unknown stats mode {other:?}, expected native-cx or native-cz"
        )),
    }
}

fn parse_experiment(v: &Option<String>, default: ExperimentKind) -> Outcome<ExperimentKind> {
    match v.as_deref() {
        None => Ok(default),
        Some("memory") => Ok(ExperimentKind::Memory),
        Some("bell") => Ok(ExperimentKind::Bell),
        Some(other) => invalid(format!("unknown experiment {other:?}, expected memory or bell")),
    }
}

fn parse_noise_kind(v: &Option<String>) -> Outcome<NoiseKind> {
    match v.as_deref() {
        None | Some("depolarizing1q") => Ok(NoiseKind::SingleQubitDepolarizing),
        Some("depolarizing_global") => Ok(NoiseKind::GlobalDepolarizing),
        Some(other) => invalid(format!(
            "unknown noise kind {other:?}, expected depolarizing1q or depolarizing_global"
        )),
    }
}

/// `r1,r2,...` or `log:<lo>:<hi>:<count>`.
pub fn parse_rates(s: &str) -> Outcome<Vec<f64>> {
    let num = |t: &str| -> Outcome<f64> {
        t.trim()
            .parse()
            .map_err(|_| Failure::invalid(format!("bad rate {t:?}")))
    };
    if let Some(rest) = s.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return invalid("log grid must be log:<lo>:<hi>:<count>");
        };
        let (lo, hi) = (num(lo)?, num(hi)?);
        let count: usize = count
            .parse()
            .map_err(|_| Failure::invalid(format!("bad count {count:?}")))?;
        if count < 2 || !(lo > 0.0 && hi > lo) {
            return invalid("log grid needs 0 < lo < hi and at least two points");
        }
        let step = (hi / lo).ln() / (count - 1) as f64;
        return Ok((0..count).map(|i| lo * (step * i as f64).exp()).collect());
    }
    s.split(',').map(num).collect()
}

pub const DEFAULT_RATES: &str = "log:1e-3:0.3:81";

fn default_out(command: &str, out: &Option<PathBuf>, ext: &str) -> PathBuf {
    match out {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
            dir.join(format!("{command}.{ext}"))
        }
    }
}

/// `<dir>/<stem>.<suffix>` next to `out`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn create(path: &Path) -> Outcome<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(Failure::failed)?;
    }
    fs::File::create(path).map_err(|e| Failure::failed(format!("cannot write {}: {e}", path.display())))
}

fn write_manifest(out: &Path, m: &Manifest) -> Outcome<PathBuf> {
    let path = sibling(out, "manifest.json");
    let mut f = create(&path)?;
    let text = serde_json::to_string_pretty(m).map_err(Failure::failed)?;
    writeln!(f, "{text}").map_err(Failure::failed)?;
    Ok(path)
}

fn manifest(
    command: &str,
    config: &impl Serialize,
    outputs: Vec<PathBuf>,
    code_hashes: BTreeMap<String, String>,
    summary: Value,
) -> Outcome<Manifest> {
    Ok(Manifest {
        tool: "qed".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config: serde_json::to_value(config).map_err(Failure::failed)?,
        outputs,
        code_hashes,
        summary,
    })
}

/// Core sweep config from merged arguments.
pub fn sweep_config(kind: ExperimentKind, a: &SweepArgs) -> Outcome<SweepConfig> {
    let default_family = match kind {
        ExperimentKind::Memory => CodeFamily::Repetition,
        ExperimentKind::Bell => CodeFamily::Color,
    };
    let family = parse(&a.code, default_family)?;
    let Some(sizes) = a.sizes.clone() else {
        return invalid("missing --size (or --n / --distance)");
    };
    let Some(depths) = a.depths.clone() else {
        return invalid("missing --depth");
    };
    let noise = parse(&a.noise, NoiseModel::noiseless())?.with_placement(parse_placement(&a.placement)?);
    let mut cfg = SweepConfig::new(kind, family, sizes, depths).with_noise(noise);
    cfg.basis = parse_basis(&a.basis)?;
    cfg.method = parse(&a.method, Method::Sampled)?;
    cfg.shots = a.shots.unwrap_or(cfg.shots);
    cfg.physical_shots = a.physical_shots.unwrap_or(cfg.physical_shots);
    cfg.seed = a.seed.unwrap_or(0);
    cfg.routed = a.routed.unwrap_or(false);
    cfg.stats_mode = parse_stats_mode(&a.stats_mode)?;
    cfg.validate().map_err(Failure::invalid)?;
    Ok(cfg)
}

/// Core pseudothreshold config from merged arguments.
pub fn pseudothreshold_config(a: &PseudothresholdArgs) -> Outcome<PseudothresholdConfig> {
    let family = parse(&a.code, CodeFamily::Color)?;
    let rates = parse_rates(a.rates.as_deref().unwrap_or(DEFAULT_RATES))?;
    let mut cfg = PseudothresholdConfig::new(
        family,
        a.sizes.clone().unwrap_or_else(|| vec![3]),
        a.depths.clone().unwrap_or_else(|| vec![0, 4, 8, 12]),
        rates,
    );
    cfg.kind = parse_experiment(&a.experiment, ExperimentKind::Bell)?;
    cfg.basis = parse_basis(&a.basis)?;
    cfg.noise_kind = parse_noise_kind(&a.noise_kind)?;
    cfg.placement = parse_placement(&a.placement)?;
    cfg.method = parse(&a.method, Method::Exact)?;
    cfg.shots = a.shots.unwrap_or(cfg.shots);
    cfg.physical_shots = a.physical_shots.unwrap_or(cfg.physical_shots);
    cfg.seed = a.seed.unwrap_or(0);
    cfg.reference = match a.reference.as_deref() {
        None | Some("physical") => CrossoverReference::Physical,
        Some("distance-pairs") => CrossoverReference::DistancePairs,
        Some(other) => {
            return invalid(format!(
                "unknown reference {other:?}, expected physical or distance-pairs"
            ))
        }
    };
    cfg.validate().map_err(Failure::invalid)?;
    Ok(cfg)
}

fn load_code(a: &CodeArgs) -> Outcome<StabilizerCode> {
    if let Some(path) = &a.code_file {
        return StabilizerCode::read_from(path).map_err(Failure::invalid);
    }
    let family: CodeFamily = parse(&a.code, CodeFamily::Color)?;
    let Some(size) = a.size else {
        return invalid("missing --distance (or --code-file)");
    };
    family.code(size).map_err(Failure::invalid)
}

fn code_label(a: &CodeArgs, c: &StabilizerCode) -> String {
    match (&a.code_file, &a.code) {
        (Some(p), _) => p.display().to_string(),
        (None, family) => format!(
            "{}-{}",
            family.as_deref().unwrap_or("color"),
            a.size.unwrap_or(c.n)
        ),
    }
}

fn sweep(kind: ExperimentKind, flags: &SweepArgs, command: &str) -> Outcome<()> {
    let args = with_config(flags, &flags.config, command)?;
    let cfg = sweep_config(kind, &args)?;
    let out = default_out(command, &args.out, "csv");
    let mut echoed = args.clone();
    echoed.out = Some(out.clone());
    let result = run_sweep(&cfg).map_err(Failure::failed)?;
    result.write_csv(create(&out)?).map_err(Failure::failed)?;
    let hashes = result
        .code_hashes()
        .map_err(Failure::failed)?
        .into_iter()
        .map(|(s, h)| (s.to_string(), h))
        .collect();
    let seeds: Vec<u64> = result.points.iter().map(|p| p.seed).collect();
    let m = manifest(command, &echoed, vec![out.clone()], hashes, json!({ "points": result.points.len(), "seeds": seeds }))?;
    let mpath = write_manifest(&out, &m)?;
    println!("wrote {} points to {} ({})", result.points.len(), out.display(), mpath.display());
    Ok(())
}

fn pseudothreshold(flags: &PseudothresholdArgs) -> Outcome<()> {
    let command = "pseudothreshold";
    let args = with_config(flags, &flags.config, command)?;
    let cfg = pseudothreshold_config(&args)?;
    let out = default_out(command, &args.out, "csv");
    let mut echoed = args.clone();
    echoed.out = Some(out.clone());
    let report = run_pseudothreshold(&cfg).map_err(Failure::failed)?;
    report.write_curves_csv(create(&out)?).map_err(Failure::failed)?;
    let tpath = sibling(&out, "thresholds.csv");
    report.write_thresholds_csv(create(&tpath)?).map_err(Failure::failed)?;
    let mut hashes = BTreeMap::new();
    for &s in &cfg.sizes {
        let c = cfg.family.code(s).map_err(Failure::failed)?;
        hashes.insert(s.to_string(), code_hash(&c));
    }
    let summary = json!({ "thresholds": report.thresholds, "fit": report.fit });
    let m = manifest(command, &echoed, vec![out.clone(), tpath.clone()], hashes, summary)?;
    write_manifest(&out, &m)?;
    for t in &report.thresholds {
        println!("D = {:>3}  p* = {:.6}", t.depth, t.p_star);
    }
    if let Some(f) = &report.fit {
        println!("ln p* = {:.4} {:+.5}·D  (R² = {:.4})", f.intercept, f.slope, f.r_squared);
    }
    Ok(())
}

fn codewords_bench(flags: &BenchArgs) -> Outcome<()> {
    let command = "codewords-bench";
    let args = with_config(flags, &flags.config, command)?;
    let ns = args.ns.clone().unwrap_or_else(|| (4..=20).step_by(2).collect());
    let per_n = args.codes_per_n.unwrap_or(3);
    if per_n == 0 || ns.is_empty() {
        return invalid("need at least one n and one code per n");
    }
    if let Some(&n) = ns.iter().find(|&&n| n == 0 || n > qed_core::codes::DEFAULT_GENERAL_CAP) {
        return invalid(format!(
            "n = {n} is outside 1..={}",
            qed_core::codes::DEFAULT_GENERAL_CAP
        ));
    }
    let out = default_out(command, &args.out, "csv");
    let mut echoed = args.clone();
    echoed.out = Some(out.clone());
    let rows = codeword_timing_benchmark(&ns, per_n, args.seed.unwrap_or(0), args.css_form.unwrap_or(false))
        .map_err(Failure::failed)?;
    write_timing_csv(&rows, create(&out)?).map_err(Failure::failed)?;
    let lo = *ns.iter().min().expect("nonempty");
    let hi = *ns.iter().max().expect("nonempty");
    let ratio = mean_growth_ratio(&rows, lo, hi);
    let m = manifest(command, &echoed, vec![out.clone()], BTreeMap::new(), json!({ "mean_ratio_per_2_qubits": ratio }))?;
    write_manifest(&out, &m)?;
    for (n, t) in qed_core::experiments::mean_times(&rows) {
        println!("n = {n:>2}  mean {t:.3e} s");
    }
    if let Some(r) = ratio {
        println!("mean t(n+2)/t(n) = {r:.2}");
    }
    Ok(())
}

fn encode(flags: &EncodeArgs) -> Outcome<()> {
    let command = "encode";
    let args = with_config(flags, &flags.config, command)?;
    let code = load_code(&args.code)?;
    let report = validate_code(&code);
    if !report.is_valid() {
        return invalid(format!("code is not valid: {:?}", report.failures));
    }
    let out = default_out(command, &args.out, "enc");
    let mut echoed = args.clone();
    echoed.out = Some(out.clone());
    let u = synthesize_encoder(&code).map_err(Failure::failed)?;
    let mut f = create(&out)?;
    write!(f, "# encoder for [[{}, {}, {}]] {}\n{}", code.n, code.k, code.d, code_label(&args.code, &code), u.to_text())
        .map_err(Failure::failed)?;
    drop(f);
    // reload what was written and check it against the code
    let text = fs::read_to_string(&out).map_err(Failure::failed)?;
    let reloaded: CliffordCircuit = text.parse().map_err(Failure::failed)?;
    let bad = verify_encoder(&code, &reloaded).map_err(Failure::failed)?;
    if !bad.is_empty() {
        return Err(Failure::failed(format!(
            "encoder check failed for {} operators",
            bad.len()
        )));
    }
    let stats = circuit_stats(&reloaded, StatsMode::NativeCx);
    let hashes = BTreeMap::from([(code_label(&args.code, &code), code_hash(&code))]);
    let summary = json!({ "stats": stats, "circuit_hash": reloaded.content_hash() });
    let m = manifest(command, &echoed, vec![out.clone()], hashes, summary)?;
    write_manifest(&out, &m)?;
    println!(
        "wrote {} ({} two-qubit gates, depth {}); encoder check passed",
        out.display(),
        stats.two_qubit_count,
        stats.depth
    );
    Ok(())
}

#[derive(Serialize)]
struct ValidationOutput {
    n: usize,
    k: usize,
    claimed_distance: usize,
    generators: usize,
    css: bool,
    valid: bool,
    rank: usize,
    failures: Vec<String>,
    distance: Option<Distance>,
}

fn validate(flags: &ValidateArgs) -> Outcome<()> {
    let command = "validate-code";
    let args = with_config(flags, &flags.config, command)?;
    let code = load_code(&args.code)?;
    let report = validate_code(&code);
    let distance = if report.is_valid() && code.k > 0 {
        let w = args.max_weight.unwrap_or(code.d);
        Some(
            code_distance_bruteforce(&code, w, args.budget.unwrap_or(DEFAULT_DISTANCE_BUDGET))
                .map_err(Failure::failed)?,
        )
    } else {
        None
    };
    let output = ValidationOutput {
        n: code.n,
        k: code.k,
        claimed_distance: code.d,
        generators: code.generators.len(),
        css: code.is_css,
        valid: report.is_valid(),
        rank: report.rank,
        failures: report.failures.iter().map(|f| format!("{f:?}")).collect(),
        distance,
    };
    let text = serde_json::to_string_pretty(&output).map_err(Failure::failed)?;
    println!("{text}");
    if let Some(out) = &args.out {
        writeln!(create(out)?, "{text}").map_err(Failure::failed)?;
        let hashes = BTreeMap::from([(code_label(&args.code, &code), code_hash(&code))]);
        let m = manifest(command, &args, vec![out.clone()], hashes, json!({ "valid": output.valid }))?;
        write_manifest(out, &m)?;
    }
    if !report.is_valid() {
        return Err(Failure {
            code: EXIT_INVALID,
            message: "code failed validation".into(),
        });
    }
    if let Some(Distance::Exact(d)) = distance {
        if d != code.d {
            return Err(Failure {
                code: EXIT_INVALID,
                message: format!("claimed distance {} but found {d}", code.d),
            });
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Outcome<()> {
    match &cli.command {
        Command::Memory(a) => sweep(ExperimentKind::Memory, a, "memory"),
        Command::Bell(a) => sweep(ExperimentKind::Bell, a, "bell"),
        Command::Pseudothreshold(a) => pseudothreshold(a),
        Command::CodewordsBench(a) => codewords_bench(a),
        Command::Encode(a) => encode(a),
        Command::ValidateCode(a) => validate(a),
    }
}

/// Parses `argv` (program name first), runs one subcommand, and returns the
/// exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(Failure::invalid("--jobs must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure::failed(e)),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("qed {}: {}", cli.command.name(), f.message);
            f.code
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::failed(e)
    }
}
