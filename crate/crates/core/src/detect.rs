//! Error-mitigated estimators: codeword post-selection over samples or exact
//! distributions, projector expectations, and the global-depolarizing closed
//! form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::codes::{CodewordSet, ProjectorExpansion};
use crate::encode::ExperimentCircuit;
use crate::error::{Error, Result};
use crate::sim::{ExactDetection, ExactExpectation, FrameSampler, NoiseModel, ShotTable};

/// Denominators below this are treated as an empty codespace.
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-12;

/// A mitigated expectation value with its codeword fraction.
///
/// Exact results carry `kept = total = 0` and `stderr = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub value: f64,
    pub f_c: f64,
    pub kept: u64,
    pub total: u64,
    pub stderr: f64,
}

impl DetectionResult {
    fn from_counts(kept: u64, total: u64, plus: u64) -> Result<Self> {
        if kept == 0 {
            return Err(Error::NoCodewords { total });
        }
        let value = (2.0 * plus as f64 - kept as f64) / kept as f64;
        Ok(Self {
            value,
            f_c: kept as f64 / total as f64,
            kept,
            total,
            stderr: ((1.0 - value * value).max(0.0) / kept as f64).sqrt(),
        })
    }

    fn exact(value: f64, f_c: f64) -> Self {
        Self {
            value,
            f_c,
            kept: 0,
            total: 0,
            stderr: 0.0,
        }
    }

    /// Error of the estimate against an ideal value.
    pub fn error(&self, ideal: f64) -> f64 {
        (ideal - self.value).abs()
    }
}

impl From<ExactDetection> for DetectionResult {
    fn from(d: ExactDetection) -> Self {
        Self::exact(d.value, d.f_c)
    }
}

fn sign(mask: &Bits, negative: bool, bits: &Bits) -> bool {
    // true for a +1 outcome
    !(mask.dot(bits) ^ negative)
}

fn check_width(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// Post-selects a shot table on `codewords` and averages `(−1)^{mask·b} · s`
/// over the kept strings, with `s = −1` when `negative`.
pub fn postselect_estimate(
    t: &ShotTable,
    codewords: &CodewordSet,
    mask: &Bits,
    negative: bool,
) -> Result<DetectionResult> {
    if let Some(w) = t.width() {
        check_width(mask.len(), w)?;
    }
    let (mut kept, mut plus) = (0u64, 0u64);
    for (b, n) in t.iter() {
        if codewords.contains(b) {
            kept += n;
            if sign(mask, negative, b) {
                plus += n;
            }
        }
    }
    DetectionResult::from_counts(kept, t.shots, plus)
}

/// Post-selection applied to an exact outcome distribution.
pub fn postselect_distribution(
    dist: &BTreeMap<Bits, f64>,
    codewords: &CodewordSet,
    mask: &Bits,
    negative: bool,
) -> Result<DetectionResult> {
    let (mut kept, mut signed) = (0.0, 0.0);
    for (b, &p) in dist {
        check_width(mask.len(), b.len())?;
        if codewords.contains(b) {
            kept += p;
            signed += if sign(mask, negative, b) { p } else { -p };
        }
    }
    if kept <= 0.0 {
        return Err(Error::NoCodewords { total: 0 });
    }
    Ok(DetectionResult::exact(signed / kept, kept))
}

/// Ratio of exact projector traces, with the denominator as the codespace
/// population.
pub fn projector_estimate(x: &ExactExpectation, floor: f64) -> Result<DetectionResult> {
    if !(x.denominator > floor) {
        return Err(Error::VanishingCodespace {
            population: x.denominator,
            floor,
        });
    }
    Ok(DetectionResult::exact(
        x.numerator / x.denominator,
        x.denominator,
    ))
}

/// The part of an experiment's codespace projector that the final
/// measurement resolves: the projector onto the span of its codewords.
pub fn codeword_projector(e: &ExperimentCircuit, cap: usize) -> Result<ProjectorExpansion> {
    Ok(e.projector(cap)?.diagonal_part())
}

/// Codespace population after `d` global-depolarizing layers of fidelity `p`
/// on an `n`-qubit, one-logical-qubit code.
pub fn f_c_prediction(p: f64, d: u32, n: u32) -> f64 {
    let pd = p.powi(d as i32);
    pd + (1.0 - pd) / 2f64.powi(n as i32 - 1)
}

/// Post-selected expectation under the same model, starting from `ideal`.
pub fn analytic_mitigated_value(p: f64, d: u32, n: u32, ideal: f64) -> f64 {
    p.powi(d as i32) * ideal / f_c_prediction(p, d, n)
}

/// Samples an experiment and post-selects on the fly, without building a
/// shot table.
pub fn sample_detection(
    e: &ExperimentCircuit,
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<DetectionResult> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let sampler = FrameSampler::for_experiment(e, nm)?;
    let codewords = e.codewords()?;
    let (mask, negative) = e.parity_mask();
    let (kept, plus) = sampler.fold(
        shots,
        seed,
        || (0u64, 0u64),
        |acc, b| {
            if codewords.contains(b) {
                acc.0 += 1;
                acc.1 += sign(&mask, negative, b) as u64;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    DetectionResult::from_counts(kept, shots, plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::StabilizerCode;
    use crate::encode::{build_experiment_circuit, ExperimentKind, LogicalBasis};
    use crate::sim::{exact_distribution, exact_expectation, DEFAULT_DENSE_CAP};

    fn b(s: &str) -> Bits {
        Bits::parse_binary(s).unwrap()
    }

    fn rep3_bell() -> ExperimentCircuit {
        let code = StabilizerCode::repetition(3).unwrap();
        build_experiment_circuit(ExperimentKind::Bell, &code, 0, LogicalBasis::Z).unwrap()
    }

    #[test]
    fn hand_counted_bell_table() {
        let e = rep3_bell();
        let mut t = ShotTable::new(0);
        t.add(b("000000"), 50);
        t.add(b("111111"), 30);
        t.add(b("010000"), 20);
        let (mask, neg) = e.parity_mask();
        let r = postselect_estimate(&t, &e.codewords().unwrap(), &mask, neg).unwrap();
        assert_eq!(r.kept, 80);
        assert_eq!(r.total, 100);
        assert_eq!(r.f_c, 0.8);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn mixed_signs_and_stderr() {
        let mut t = ShotTable::new(0);
        t.add(b("000"), 75);
        t.add(b("111"), 25);
        let cw = CodewordSet::from_strings([b("000"), b("111")]);
        let r = postselect_estimate(&t, &cw, &b("100"), false).unwrap();
        assert_eq!(r.value, 0.5);
        assert!((r.stderr - (0.75f64 / 100.0).sqrt()).abs() < 1e-15);
        let r = postselect_estimate(&t, &cw, &b("100"), true).unwrap();
        assert_eq!(r.value, -0.5);
    }

    #[test]
    fn no_codewords_is_an_error() {
        let mut t = ShotTable::new(0);
        t.add(b("010"), 10);
        let cw = CodewordSet::from_strings([b("000"), b("111")]);
        match postselect_estimate(&t, &cw, &b("100"), false) {
            Err(Error::NoCodewords { total }) => assert_eq!(total, 10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let mut t = ShotTable::new(0);
        t.add(b("0000"), 1);
        let cw = CodewordSet::from_strings([b("000")]);
        assert!(matches!(
            postselect_estimate(&t, &cw, &b("100"), false),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn vanishing_denominator() {
        let x = ExactExpectation {
            numerator: 0.0,
            denominator: 1e-14,
            value: 0.0,
        };
        assert!(matches!(
            projector_estimate(&x, DEFAULT_DENOMINATOR_FLOOR),
            Err(Error::VanishingCodespace { .. })
        ));
    }

    #[test]
    fn closed_form_limits() {
        assert_eq!(analytic_mitigated_value(0.7, 3, 1, 1.0), 0.7f64.powi(3));
        assert_eq!(analytic_mitigated_value(1.0, 9, 5, -1.0), -1.0);
        assert_eq!(analytic_mitigated_value(0.3, 0, 5, 0.5), 0.5);
        assert_eq!(analytic_mitigated_value(0.0, 2, 1, 1.0), 0.0);
        assert_eq!(f_c_prediction(1.0, 4, 7), 1.0);
        assert_eq!(f_c_prediction(0.4, 4, 1), 1.0);
        let want = 0.9f64.powi(5) + (1.0 - 0.9f64.powi(5)) / 16.0;
        assert!((f_c_prediction(0.9, 5, 5) - want).abs() < 1e-15);
    }

    #[test]
    fn result_json_keys() {
        let r = DetectionResult::exact(0.5, 0.25);
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["f_c", "kept", "stderr", "total", "value"]);
    }

    #[test]
    fn strategies_agree_on_exact_distribution() {
        let nm = NoiseModel::depolarizing1q(0.1).unwrap();
        for code in [
            StabilizerCode::repetition(3).unwrap(),
            StabilizerCode::triangular_color(3).unwrap(),
        ] {
            let e = build_experiment_circuit(ExperimentKind::Memory, &code, 4, LogicalBasis::Z)
                .unwrap();
            let dist = exact_distribution(&e, &nm, DEFAULT_DENSE_CAP).unwrap();
            let (mask, neg) = e.parity_mask();
            let a = postselect_distribution(&dist, &e.codewords().unwrap(), &mask, neg).unwrap();
            let pi = codeword_projector(&e, 24).unwrap();
            let x = exact_expectation(&e, &nm, &pi, &e.measured_observable(), DEFAULT_DENSE_CAP)
                .unwrap();
            let b = projector_estimate(&x, DEFAULT_DENOMINATOR_FLOOR).unwrap();
            assert!((a.value - b.value).abs() < 1e-10);
            assert!((a.f_c - b.f_c).abs() < 1e-10);
        }
    }

    #[test]
    fn streaming_matches_table() {
        let code = StabilizerCode::repetition(3).unwrap();
        let e = build_experiment_circuit(ExperimentKind::Memory, &code, 6, LogicalBasis::Z).unwrap();
        let nm = NoiseModel::depolarizing1q(0.05).unwrap();
        let t = crate::sim::sample_shots(&e, &nm, 20_000, 3).unwrap();
        let (mask, neg) = e.parity_mask();
        let a = postselect_estimate(&t, &e.codewords().unwrap(), &mask, neg).unwrap();
        let b = sample_detection(&e, &nm, 20_000, 3).unwrap();
        assert_eq!(a, b);
    }
}
