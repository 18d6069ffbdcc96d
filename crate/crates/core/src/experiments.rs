//! Experiment drivers: memory and Bell sweeps against an unencoded baseline,
//! pseudothreshold estimation, and codeword-enumeration timing.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::{conjugate_by_circuit, CircuitBuilder, CliffordCircuit, Gate};
use crate::codes::{enumerate_codewords, EnumerationPath, StabilizerCode, DEFAULT_GENERAL_CAP};
use crate::detect::{sample_detection, DetectionResult};
use crate::encode::{build_experiment_circuit, ExperimentCircuit, ExperimentKind, LogicalBasis};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::route::{
    circuit_stats, heavy_hex_graph, heavy_hex_line_layout, route_experiment, StatsMode,
};
use crate::sim::{exact_postselection, NoiseKind, NoiseModel, NoisePlacement, DEFAULT_EFFECT_CAP};

pub const DEFAULT_ENCODED_SHOTS: u64 = 100_000;
pub const DEFAULT_PHYSICAL_SHOTS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    Repetition,
    Color,
}

impl CodeFamily {
    /// The family member of the given size: the qubit count of a repetition
    /// code (which is also its distance), the distance of a color code.
    pub fn code(self, size: usize) -> Result<StabilizerCode> {
        match self {
            CodeFamily::Repetition => StabilizerCode::repetition(size),
            CodeFamily::Color => StabilizerCode::triangular_color(size),
        }
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeFamily::Repetition => "repetition",
            CodeFamily::Color => "color",
        })
    }
}

impl FromStr for CodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "repetition" | "rep" => Ok(CodeFamily::Repetition),
            "color" => Ok(CodeFamily::Color),
            other => Err(Error::InvalidParameter(format!(
                "unknown code family {other:?}, expected repetition or color"
            ))),
        }
    }
}

/// How a grid point is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Pauli-frame sampling and post-selection.
    #[default]
    Sampled,
    /// Exact post-selection over fault effects; needs CSS codes with few checks.
    Exact,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampled" => Ok(Method::Sampled),
            "exact" => Ok(Method::Exact),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?}, expected sampled or exact"
            ))),
        }
    }
}

/// Seed for one job of a run, derived from the master seed and the job's
/// coordinates so that results do not depend on scheduling.
pub fn derive_seed(master: u64, tag: &str, coords: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(tag.as_bytes());
    for c in coords {
        h.update(c.to_le_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// SHA-256 of a code's text form.
pub fn code_hash(c: &StabilizerCode) -> String {
    hex::encode(Sha256::digest(c.to_text().as_bytes()))
}

fn evaluate(
    e: &ExperimentCircuit,
    nm: &NoiseModel,
    method: Method,
    shots: u64,
    seed: u64,
) -> Result<DetectionResult> {
    match method {
        Method::Sampled => sample_detection(e, nm, shots, seed),
        Method::Exact => Ok(exact_postselection(e, nm, DEFAULT_EFFECT_CAP)?.into()),
    }
}

/// Grid of memory or Bell experiments over code sizes and depths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: ExperimentKind,
    pub family: CodeFamily,
    pub sizes: Vec<usize>,
    pub depths: Vec<usize>,
    pub basis: LogicalBasis,
    pub noise: NoiseModel,
    pub method: Method,
    pub shots: u64,
    pub physical_shots: u64,
    pub seed: u64,
    /// Route encoded circuits onto a heavy-hex device first.
    pub routed: bool,
    pub stats_mode: StatsMode,
}

impl SweepConfig {
    pub fn new(kind: ExperimentKind, family: CodeFamily, sizes: Vec<usize>, depths: Vec<usize>) -> Self {
        Self {
            kind,
            family,
            sizes,
            depths,
            basis: LogicalBasis::Z,
            noise: NoiseModel::noiseless(),
            method: Method::Sampled,
            shots: DEFAULT_ENCODED_SHOTS,
            physical_shots: DEFAULT_PHYSICAL_SHOTS,
            seed: 0,
            routed: false,
            stats_mode: StatsMode::NativeCx,
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.check()?;
        if self.sizes.is_empty() || self.depths.is_empty() {
            return Err(Error::InvalidParameter("empty size or depth list".into()));
        }
        if let Some(d) = self.depths.iter().find(|&&d| d % 2 != 0) {
            return Err(Error::InvalidParameter(format!("depth must be even, got {d}")));
        }
        if self.method == Method::Sampled && (self.shots == 0 || self.physical_shots == 0) {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        for &s in &self.sizes {
            let code = self.family.code(s)?;
            if self.basis == LogicalBasis::X && !code.is_self_dual_css() {
                return Err(Error::Unsupported(format!(
                    "X̄ measurement needs a transversal Hadamard, which the {} code of size {s} lacks",
                    self.family
                )));
            }
        }
        Ok(())
    }
}

/// One grid point: the encoded estimate, its unencoded baseline, and circuit
/// statistics of the encoded circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub size: usize,
    pub n_qubits: usize,
    pub depth: usize,
    pub p: f64,
    pub value: f64,
    pub stderr: f64,
    pub f_c: f64,
    pub kept: u64,
    pub total: u64,
    pub ideal: f64,
    pub baseline: f64,
    pub baseline_stderr: f64,
    pub two_qubit_count: usize,
    pub circuit_depth: usize,
    pub swap_count: usize,
    pub seed: u64,
}

impl SweepPoint {
    pub fn detection(&self) -> DetectionResult {
        DetectionResult {
            value: self.value,
            f_c: self.f_c,
            kept: self.kept,
            total: self.total,
            stderr: self.stderr,
        }
    }

    pub fn encoded_error(&self) -> f64 {
        (self.ideal - self.value).abs()
    }

    pub fn baseline_error(&self) -> f64 {
        (self.ideal - self.baseline).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for p in &self.points {
            out.serialize(p)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn point(&self, size: usize, depth: usize) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.size == size && p.depth == depth)
    }

    /// Code hash per size, for manifests.
    pub fn code_hashes(&self) -> Result<BTreeMap<usize, String>> {
        self.config
            .sizes
            .iter()
            .map(|&s| Ok((s, code_hash(&self.config.family.code(s)?))))
            .collect()
    }
}

/// Builds the encoded experiment of a grid point, routed if requested.
pub fn sweep_experiment(
    cfg: &SweepConfig,
    size: usize,
    depth: usize,
) -> Result<(ExperimentCircuit, usize)> {
    let code = cfg.family.code(size)?;
    let e = build_experiment_circuit(cfg.kind, &code, depth, cfg.basis)?;
    if !cfg.routed {
        return Ok((e, 0));
    }
    let ((rows, cols), layout) = heavy_hex_line_layout(code.n, cfg.kind.blocks())?;
    let g = heavy_hex_graph(rows, cols)?;
    let r = route_experiment(&e, &g, &layout)?;
    Ok((r.experiment, r.swap_count))
}

/// Runs every `(size, depth)` point of a sweep. The unencoded baseline is the
/// same experiment on single-qubit blocks under the same noise.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let grid: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&s| cfg.depths.iter().map(move |&d| (s, d)))
        .collect();
    let points = grid
        .into_par_iter()
        .map(|(size, depth)| -> Result<SweepPoint> {
            let (e, swap_count) = sweep_experiment(cfg, size, depth)?;
            let seed = derive_seed(cfg.seed, "encoded", &[size as u64, depth as u64]);
            let r = evaluate(&e, &cfg.noise, cfg.method, cfg.shots, seed)?;
            let base = build_experiment_circuit(
                cfg.kind,
                &StabilizerCode::unencoded(1),
                depth,
                cfg.basis,
            )?;
            let base_seed = derive_seed(cfg.seed, "physical", &[depth as u64]);
            let b = evaluate(&base, &cfg.noise, cfg.method, cfg.physical_shots, base_seed)?;
            let stats = circuit_stats(&e.circuit, cfg.stats_mode);
            Ok(SweepPoint {
                size,
                n_qubits: e.n_qubits(),
                depth,
                p: cfg.noise.p,
                value: r.value,
                stderr: r.stderr,
                f_c: r.f_c,
                kept: r.kept,
                total: r.total,
                ideal: e.ideal_value()?,
                baseline: b.value,
                baseline_stderr: b.stderr,
                two_qubit_count: stats.two_qubit_count,
                circuit_depth: stats.depth,
                swap_count,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        config: cfg.clone(),
        points,
    })
}

/// Memory sweep over repetition codes.
pub fn run_memory_sweep(
    sizes: &[usize],
    depths: &[usize],
    nm: NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<SweepResult> {
    let mut cfg = SweepConfig::new(
        ExperimentKind::Memory,
        CodeFamily::Repetition,
        sizes.to_vec(),
        depths.to_vec(),
    )
    .with_noise(nm);
    cfg.shots = shots;
    cfg.seed = seed;
    run_sweep(&cfg)
}

/// Bell sweep over distances of one code family.
#[allow(clippy::too_many_arguments)]
pub fn run_bell_sweep(
    family: CodeFamily,
    distances: &[usize],
    depths: &[usize],
    basis: LogicalBasis,
    nm: NoiseModel,
    shots: u64,
    seed: u64,
    routed: bool,
) -> Result<SweepResult> {
    let mut cfg = SweepConfig::new(ExperimentKind::Bell, family, distances.to_vec(), depths.to_vec())
        .with_noise(nm);
    cfg.basis = basis;
    cfg.shots = shots;
    cfg.seed = seed;
    cfg.routed = routed;
    run_sweep(&cfg)
}

/// What the encoded error is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverReference {
    /// Encoded against the unencoded experiment.
    #[default]
    Physical,
    /// Consecutive distances against each other.
    DistancePairs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudothresholdConfig {
    pub kind: ExperimentKind,
    pub family: CodeFamily,
    pub sizes: Vec<usize>,
    pub depths: Vec<usize>,
    pub basis: LogicalBasis,
    pub noise_kind: NoiseKind,
    pub placement: NoisePlacement,
    /// Increasing physical error rates. For global depolarizing noise the rate
    /// is `1 − p`.
    pub rates: Vec<f64>,
    pub method: Method,
    pub shots: u64,
    pub physical_shots: u64,
    pub seed: u64,
    pub reference: CrossoverReference,
}

impl PseudothresholdConfig {
    pub fn new(family: CodeFamily, sizes: Vec<usize>, depths: Vec<usize>, rates: Vec<f64>) -> Self {
        Self {
            kind: ExperimentKind::Bell,
            family,
            sizes,
            depths,
            basis: LogicalBasis::Z,
            noise_kind: NoiseKind::SingleQubitDepolarizing,
            placement: NoisePlacement::AllMoments,
            rates,
            method: Method::Exact,
            shots: DEFAULT_ENCODED_SHOTS,
            physical_shots: DEFAULT_PHYSICAL_SHOTS,
            seed: 0,
            reference: CrossoverReference::Physical,
        }
    }

    pub fn noise(&self, rate: f64) -> Result<NoiseModel> {
        let p = match self.noise_kind {
            NoiseKind::GlobalDepolarizing => 1.0 - rate,
            _ => rate,
        };
        Ok(NoiseModel::new(self.noise_kind, p)?.with_placement(self.placement))
    }

    pub fn validate(&self) -> Result<()> {
        if self.noise_kind == NoiseKind::None {
            return Err(Error::InvalidParameter("pseudothresholds need a noise kind".into()));
        }
        if self.rates.len() < 2 {
            return Err(Error::InvalidParameter("need at least two error rates".into()));
        }
        if !self.rates.iter().all(|&r| r > 0.0 && r < 1.0)
            || !self.rates.windows(2).all(|w| w[0] < w[1])
        {
            return Err(Error::InvalidParameter(
                "error rates must be increasing and inside (0, 1)".into(),
            ));
        }
        let needed = match self.reference {
            CrossoverReference::Physical => 1,
            CrossoverReference::DistancePairs => 2,
        };
        if self.sizes.len() < needed {
            return Err(Error::InvalidParameter(format!(
                "need at least {needed} code sizes for this reference"
            )));
        }
        if self.depths.is_empty() {
            return Err(Error::InvalidParameter("empty depth list".into()));
        }
        let mut sweep = SweepConfig::new(self.kind, self.family, self.sizes.clone(), self.depths.clone());
        sweep.basis = self.basis;
        sweep.method = self.method;
        sweep.shots = self.shots;
        sweep.physical_shots = self.physical_shots;
        sweep.validate()
    }
}

/// Logical error of one curve at one rate. `size = 0` is the unencoded
/// experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub depth: usize,
    pub size: usize,
    pub rate: f64,
    pub value: f64,
    pub stderr: f64,
    pub f_c: f64,
    pub error: f64,
}

/// One crossing of two error curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Sizes compared; `0` is the unencoded experiment.
    pub pair: (usize, usize),
    pub p_star: f64,
    /// Grid rates that bracket the crossing.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudothresholdResult {
    pub depth: usize,
    /// Mean of the crossings.
    pub p_star: f64,
    pub crossings: Vec<Crossing>,
}

/// Least-squares fit of `ln p* = intercept + slope · D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudothresholdReport {
    pub config: PseudothresholdConfig,
    pub curves: Vec<CurvePoint>,
    pub thresholds: Vec<PseudothresholdResult>,
    pub fit: Option<ExponentialFit>,
}

impl PseudothresholdReport {
    pub fn write_curves_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for c in &self.curves {
            out.serialize(c)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_thresholds_csv<W: Write>(&self, w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            depth: usize,
            p_star: f64,
            crossings: usize,
        }
        let mut out = csv::Writer::from_writer(w);
        for t in &self.thresholds {
            out.serialize(Row {
                depth: t.depth,
                p_star: t.p_star,
                crossings: t.crossings.len(),
            })?;
        }
        out.flush()?;
        Ok(())
    }
}

/// First rate at which `worse` overtakes `better`, interpolated linearly in
/// `(ln rate, ln error)`. Falls back to interpolating the plain difference
/// when an error is zero.
pub fn crossover(rates: &[f64], better: &[f64], worse: &[f64]) -> Result<(f64, (f64, f64))> {
    if rates.len() != better.len() || rates.len() != worse.len() {
        return Err(Error::Dimension {
            expected: rates.len(),
            found: better.len().min(worse.len()),
        });
    }
    for i in 0..rates.len().saturating_sub(1) {
        let (s0, s1) = (better[i] - worse[i], better[i + 1] - worse[i + 1]);
        if !(s0 < 0.0 && s1 >= 0.0) {
            continue;
        }
        let (x0, x1) = (rates[i].ln(), rates[i + 1].ln());
        let logs = [better[i], worse[i], better[i + 1], worse[i + 1]]
            .iter()
            .all(|&e| e > 0.0);
        let (g0, g1) = if logs {
            (better[i].ln() - worse[i].ln(), better[i + 1].ln() - worse[i + 1].ln())
        } else {
            (s0, s1)
        };
        let t = if g1 == g0 { 0.0 } else { -g0 / (g1 - g0) };
        return Ok(((x0 + t * (x1 - x0)).exp(), (rates[i], rates[i + 1])));
    }
    Err(Error::NoCrossover(format!(
        "curves do not cross between rates {} and {}",
        rates.first().copied().unwrap_or(f64::NAN),
        rates.last().copied().unwrap_or(f64::NAN)
    )))
}

/// Linear regression of `ln p*` on depth.
pub fn fit_exponential(depths: &[f64], p_stars: &[f64]) -> Result<ExponentialFit> {
    if depths.len() != p_stars.len() || depths.len() < 2 {
        return Err(Error::InvalidParameter("need at least two points to fit".into()));
    }
    let y: Vec<f64> = p_stars.iter().map(|p| p.ln()).collect();
    let n = depths.len() as f64;
    let mx = depths.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = depths.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("depths must not all be equal".into()));
    }
    let sxy: f64 = depths.iter().zip(&y).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = depths
        .iter()
        .zip(&y)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ExponentialFit {
        slope,
        intercept,
        r_squared,
        residuals,
    })
}

fn curve(
    cfg: &PseudothresholdConfig,
    depth: usize,
    size: usize,
) -> Result<Vec<CurvePoint>> {
    let code = if size == 0 {
        StabilizerCode::unencoded(1)
    } else {
        cfg.family.code(size)?
    };
    let e = build_experiment_circuit(cfg.kind, &code, depth, cfg.basis)?;
    let ideal = e.ideal_value()?;
    let shots = if size == 0 { cfg.physical_shots } else { cfg.shots };
    cfg.rates
        .par_iter()
        .enumerate()
        .map(|(i, &rate)| {
            let seed = derive_seed(cfg.seed, "pseudothreshold", &[depth as u64, size as u64, i as u64]);
            let r = evaluate(&e, &cfg.noise(rate)?, cfg.method, shots, seed)?;
            Ok(CurvePoint {
                depth,
                size,
                rate,
                value: r.value,
                stderr: r.stderr,
                f_c: r.f_c,
                error: (ideal - r.value).abs(),
            })
        })
        .collect()
}

/// Pseudothreshold at one depth, with the error curves it was read from.
pub fn estimate_pseudothreshold(
    cfg: &PseudothresholdConfig,
    depth: usize,
) -> Result<(PseudothresholdResult, Vec<CurvePoint>)> {
    cfg.validate()?;
    let mut sizes = cfg.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let pairs: Vec<(usize, usize)> = match cfg.reference {
        CrossoverReference::Physical => sizes.iter().map(|&s| (s, 0)).collect(),
        CrossoverReference::DistancePairs => sizes.windows(2).map(|w| (w[1], w[0])).collect(),
    };
    let mut wanted: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    wanted.sort_unstable();
    wanted.dedup();
    let curves: BTreeMap<usize, Vec<CurvePoint>> = wanted
        .into_iter()
        .map(|s| Ok((s, curve(cfg, depth, s)?)))
        .collect::<Result<_>>()?;
    let errors = |s: usize| -> Vec<f64> { curves[&s].iter().map(|c| c.error).collect() };
    let crossings = pairs
        .iter()
        .map(|&(better, worse)| {
            let (p_star, bracket) = crossover(&cfg.rates, &errors(better), &errors(worse))?;
            Ok(Crossing {
                pair: (better, worse),
                p_star,
                bracket,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let p_star = crossings.iter().map(|c| c.p_star).sum::<f64>() / crossings.len() as f64;
    Ok((
        PseudothresholdResult {
            depth,
            p_star,
            crossings,
        },
        curves.into_values().flatten().collect(),
    ))
}

/// Pseudothresholds at every configured depth, plus an exponential fit in
/// depth when there are at least two.
pub fn run_pseudothreshold(cfg: &PseudothresholdConfig) -> Result<PseudothresholdReport> {
    cfg.validate()?;
    let mut thresholds = Vec::new();
    let mut curves = Vec::new();
    for &depth in &cfg.depths {
        let (t, c) = estimate_pseudothreshold(cfg, depth)?;
        thresholds.push(t);
        curves.extend(c);
    }
    let fit = if thresholds.len() >= 2 {
        let d: Vec<f64> = thresholds.iter().map(|t| t.depth as f64).collect();
        let p: Vec<f64> = thresholds.iter().map(|t| t.p_star).collect();
        Some(fit_exponential(&d, &p)?)
    } else {
        None
    };
    Ok(PseudothresholdReport {
        config: cfg.clone(),
        curves,
        thresholds,
        fit,
    })
}

/// Random Clifford circuit of `layers` layers. Each layer applies a random
/// single-qubit gate from `{I, H, S}` to every qubit and CX gates on a random
/// matching. With `css_form` the single-qubit part is replaced by one
/// initial layer of `H` on a random subset, which keeps CSS codes CSS.
pub fn random_clifford<R: Rng + ?Sized>(
    n: usize,
    layers: usize,
    css_form: bool,
    rng: &mut R,
) -> CliffordCircuit {
    let mut b = CircuitBuilder::new(n);
    let add = |b: &mut CircuitBuilder, g| b.add(g).expect("qubits in range");
    if css_form {
        for q in 0..n {
            if rng.random::<bool>() {
                add(&mut b, Gate::H(q));
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..layers {
        if !css_form {
            for q in 0..n {
                match rng.random_range(0..3) {
                    0 => {}
                    1 => add(&mut b, Gate::H(q)),
                    _ => add(&mut b, Gate::S(q)),
                }
            }
        }
        order.shuffle(rng);
        for pair in order.chunks_exact(2) {
            add(&mut b, Gate::CX(pair[0], pair[1]));
        }
    }
    b.finish()
}

/// A random `[[n, 1]]` code: the trivial code (`Z` on qubits `1..n`, logical
/// qubit 0) conjugated by a random Clifford.
pub fn random_code<R: Rng + ?Sized>(n: usize, css_form: bool, rng: &mut R) -> Result<StabilizerCode> {
    if n == 0 {
        return Err(Error::InvalidParameter("codes need at least one qubit".into()));
    }
    let u = random_clifford(n, n, css_form, rng);
    let push = |p: PauliString| conjugate_by_circuit(&p, &u);
    let generators = (1..n)
        .map(|q| push(PauliString::single(n, q, Pauli::Z)))
        .collect::<Result<Vec<_>>>()?;
    let mut code = StabilizerCode {
        n,
        k: 1,
        d: 1,
        generators,
        logical_x: vec![push(PauliString::single(n, 0, Pauli::X))?],
        logical_z: vec![push(PauliString::single(n, 0, Pauli::Z))?],
        is_css: false,
    };
    code.is_css = code.generators_are_css();
    Ok(code)
}

/// Wall time of codeword enumeration for one random code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub index: usize,
    pub css_form: bool,
    pub codewords: usize,
    pub general_seconds: f64,
    /// Time of the CSS shortcut, when the code is CSS.
    pub css_seconds: Option<f64>,
}

/// Times general-path enumeration on `per_n` random codes for each `n`, and
/// the CSS shortcut too when `css_form` restricts codes to CSS form. Codes are
/// timed one at a time so that timings are not skewed by contention.
pub fn codeword_timing_benchmark(
    ns: &[usize],
    per_n: usize,
    seed: u64,
    css_form: bool,
) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for index in 0..per_n {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "codes", &[n as u64, index as u64]));
            let code = random_code(n, css_form, &mut rng)?;
            let path = EnumerationPath::General {
                cap: DEFAULT_GENERAL_CAP,
                seed: derive_seed(seed, "amplitudes", &[n as u64, index as u64]),
            };
            let start = Instant::now();
            let general = enumerate_codewords(&code, path)?;
            let general_seconds = start.elapsed().as_secs_f64();
            let css_seconds = if code.is_css {
                let start = Instant::now();
                let css = enumerate_codewords(&code, EnumerationPath::Css)?;
                let t = start.elapsed().as_secs_f64();
                if css != general {
                    return Err(Error::Internal(format!(
                        "enumeration paths disagree on random code {index} with n = {n}"
                    )));
                }
                Some(t)
            } else {
                None
            };
            rows.push(TimingRow {
                n,
                index,
                css_form,
                codewords: general.len(),
                general_seconds,
                css_seconds,
            });
        }
    }
    Ok(rows)
}

/// Mean general-path time per `n`.
pub fn mean_times(rows: &[TimingRow]) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry(r.n).or_insert((0.0, 0));
        e.0 += r.general_seconds;
        e.1 += 1;
    }
    acc.into_iter().map(|(n, (t, c))| (n, t / c as f64)).collect()
}

/// Average of `t(n + 2) / t(n)` over the measured `n` in `lo..=hi`.
pub fn mean_growth_ratio(rows: &[TimingRow], lo: usize, hi: usize) -> Option<f64> {
    let t = mean_times(rows);
    let ratios: Vec<f64> = t
        .range(lo..=hi)
        .filter_map(|(&n, &tn)| t.get(&(n + 2)).filter(|_| n + 2 <= hi).map(|&t2| t2 / tn))
        .collect();
    (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
}

pub fn write_timing_csv<W: Write>(rows: &[TimingRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::analytic_mitigated_value;

    #[test]
    fn seeds_depend_on_every_coordinate() {
        let a = derive_seed(1, "x", &[2, 3]);
        assert_eq!(a, derive_seed(1, "x", &[2, 3]));
        assert_ne!(a, derive_seed(2, "x", &[2, 3]));
        assert_ne!(a, derive_seed(1, "y", &[2, 3]));
        assert_ne!(a, derive_seed(1, "x", &[3, 2]));
    }

    #[test]
    fn noiseless_sweep_is_exactly_one() {
        let r = run_memory_sweep(&[3, 5], &[0, 2], NoiseModel::noiseless(), 500, 1).unwrap();
        assert_eq!(r.points.len(), 4);
        for p in &r.points {
            assert_eq!((p.value, p.f_c, p.baseline), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn exact_global_sweep_matches_closed_form() {
        let nm = NoiseModel::global(0.95).unwrap();
        let mut cfg = SweepConfig::new(ExperimentKind::Memory, CodeFamily::Repetition, vec![3, 5], vec![2, 6])
            .with_noise(nm);
        cfg.method = Method::Exact;
        let r = run_sweep(&cfg).unwrap();
        for p in &r.points {
            let want = analytic_mitigated_value(0.95, p.depth as u32, p.size as u32, 1.0);
            assert!((p.value - want).abs() < 1e-12, "{p:?}");
            assert!((p.baseline - 0.95f64.powi(p.depth as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_depth_is_rejected() {
        let cfg = SweepConfig::new(ExperimentKind::Memory, CodeFamily::Repetition, vec![3], vec![1]);
        assert!(matches!(run_sweep(&cfg), Err(Error::InvalidParameter(_))));
        let mut cfg = SweepConfig::new(ExperimentKind::Memory, CodeFamily::Repetition, vec![3], vec![2]);
        cfg.basis = LogicalBasis::X;
        assert!(matches!(run_sweep(&cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn crossover_interpolates_in_log_space() {
        let rates = [0.01, 0.1];
        // better = rate², worse = rate / 10 cross at rate 0.1 exactly
        let (p, bracket) = crossover(&rates, &[1e-4, 1e-2], &[1e-3, 1e-2]).unwrap();
        assert!((p - 0.1).abs() < 1e-12);
        assert_eq!(bracket, (0.01, 0.1));
        // better = rate², worse = rate / 20 cross at 0.05
        let (p, _) = crossover(&rates, &[1e-4, 1e-2], &[5e-4, 5e-3]).unwrap();
        assert!((p - 0.05).abs() < 1e-12);
        assert!(matches!(
            crossover(&rates, &[1e-5, 1e-4], &[1e-3, 1e-2]),
            Err(Error::NoCrossover(_))
        ));
    }

    #[test]
    fn exponential_fit_recovers_a_line() {
        let d = [0.0, 4.0, 8.0, 12.0];
        let p: Vec<f64> = d.iter().map(|x| (0.5f64).ln() - 0.1 * x).map(f64::exp).collect();
        let f = fit_exponential(&d, &p).unwrap();
        assert!((f.slope + 0.1).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pseudothreshold_below_range_fails() {
        let mut cfg = PseudothresholdConfig::new(CodeFamily::Color, vec![3], vec![0], vec![1e-6, 1e-5]);
        cfg.method = Method::Exact;
        assert!(matches!(run_pseudothreshold(&cfg), Err(Error::NoCrossover(_))));
    }

    #[test]
    fn random_codes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..8 {
            for css in [false, true] {
                let c = random_code(n, css, &mut rng).unwrap();
                assert!(crate::codes::validate_code(&c).is_valid());
                if css {
                    assert!(c.is_css);
                }
            }
        }
    }

    #[test]
    fn timing_rows_check_css_agreement() {
        let rows = codeword_timing_benchmark(&[4, 6], 2, 9, true).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.css_seconds.is_some() && r.codewords > 0));
    }
}
