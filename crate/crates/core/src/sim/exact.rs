use std::collections::HashMap;

use rayon::prelude::*;

use super::frame::FaultMap;
use super::{NoiseKind, NoiseModel};
use crate::bits::Bits;
use crate::codes::CodewordSet;
use crate::encode::ExperimentCircuit;
use crate::error::{Error, Result};
use crate::gf2::XorBasis;
use crate::tableau::{RandomOutcome, Tableau};
use rand::SeedableRng;

/// Default cap on parity checks plus the observable bit.
pub const DEFAULT_EFFECT_CAP: usize = 26;

const CHUNK: u64 = 1 << 12;

/// Exact post-selected value and codeword fraction under Pauli noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactDetection {
    pub value: f64,
    pub f_c: f64,
}

/// Exact result of codeword post-selection, without sampling.
///
/// Only the checks and the observable parity matter, so every fault is
/// summarized by its effect on those `s + 1` bits. The effects of independent
/// faults add over GF(2), so their distribution is a convolution; in the
/// Walsh–Hadamard domain a depolarizing location contributes `1` or
/// `1 − 4p/3` per character, a global channel `1` or `p`, and the input
/// gauge `1` or `0`. The two accepted outcomes are then read off with one
/// pass over the `2^{s+1}` characters.
pub fn exact_postselection(
    e: &ExperimentCircuit,
    nm: &NoiseModel,
    cap: usize,
) -> Result<ExactDetection> {
    nm.check()?;
    let checks = match e.codewords()? {
        CodewordSet::ParityChecks { checks, .. } => checks,
        CodewordSet::Explicit(_) => {
            return Err(Error::Unsupported(
                "exact post-selection needs parity-check codewords".into(),
            ))
        }
    };
    // independent checks only; dependent ones add nothing
    let mut basis = XorBasis::new();
    let checks: Vec<(Bits, bool)> = checks
        .into_iter()
        .filter(|(h, _)| basis.insert(h.clone()))
        .collect();
    let width = checks.len() + 1;
    if width > cap || width > 63 {
        return Err(Error::Capacity(format!(
            "{} checks exceed the exact post-selection cap of {}",
            checks.len(),
            cap - 1
        )));
    }
    let (mask, negative) = e.parity_mask();
    let effect = |f: &Bits| -> u64 {
        let mut v = 0u64;
        for (i, (h, _)) in checks.iter().enumerate() {
            v |= (h.dot(f) as u64) << i;
        }
        v | (mask.dot(f) as u64) << checks.len()
    };
    let noisy = nm.noisy_moments(&e.circuit, e.noise_start);
    let map = FaultMap::new(&e.circuit, &noisy)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let reference = Tableau::sample(&e.circuit, RandomOutcome::Zero, &mut rng)?;

    // character u survives the gauge iff it is orthogonal to every gauge effect
    let gauge: Vec<u64> = map.gauge.iter().map(effect).collect();
    // depolarizing locations keyed by their (X, Z) effects, with multiplicity
    let mut local: HashMap<(u64, u64), u32> = HashMap::new();
    // global channels keyed by the basis of their effects
    let mut global: HashMap<Vec<u64>, u32> = HashMap::new();
    match nm.kind {
        NoiseKind::None => {}
        NoiseKind::SingleQubitDepolarizing => {
            for m in &map.moments {
                for q in 0..map.n_qubits {
                    let key = (effect(&m.x[q]), effect(&m.z[q]));
                    if key != (0, 0) {
                        *local.entry(key).or_insert(0) += 1;
                    }
                }
            }
        }
        NoiseKind::GlobalDepolarizing => {
            for m in &map.moments {
                let mut b = XorBasis::new();
                for f in m.x.iter().chain(&m.z) {
                    b.insert(Bits::from_u64(width, effect(f)));
                }
                let mut key: Vec<u64> = b.vectors().map(Bits::low_u64).collect();
                key.sort_unstable();
                if !key.is_empty() {
                    *global.entry(key).or_insert(0) += 1;
                }
            }
        }
    }
    let local: Vec<((u64, u64), u32)> = local.into_iter().collect();
    let global: Vec<(Vec<u64>, u32)> = global.into_iter().collect();
    let shrink = 1.0 - 4.0 * nm.p / 3.0;

    // accepted flips satisfy h·f = h·ref ⊕ parity for every check
    let mut target = 0u64;
    for (i, (h, parity)) in checks.iter().enumerate() {
        target |= ((h.dot(&reference) ^ parity) as u64) << i;
    }
    let obs_bit = 1u64 << checks.len();
    let character = |u: u64| -> (f64, f64) {
        if gauge.iter().any(|&g| (u & g).count_ones() % 2 == 1) {
            return (0.0, 0.0);
        }
        let mut hits = 0u32;
        for &((ex, ez), count) in &local {
            if (u & ex).count_ones() % 2 == 1 || (u & ez).count_ones() % 2 == 1 {
                hits += count;
            }
        }
        let mut f = if hits == 0 { 1.0 } else { shrink.powi(hits as i32) };
        for (span, count) in &global {
            if span.iter().any(|&s| (u & s).count_ones() % 2 == 1) {
                f *= nm.p.powi(*count as i32);
            }
        }
        let chi = |v: u64| if (u & v).count_ones() % 2 == 1 { -f } else { f };
        (chi(target), chi(target | obs_bit))
    };
    // fixed chunks summed in order keep the result independent of the thread count
    let total = 1u64 << width;
    let partial: Vec<(f64, f64)> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(total))
                .map(character)
                .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
        })
        .collect();
    let (plus, minus) = partial
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let norm = (1u64 << width) as f64;
    let (p_even, p_odd) = (plus / norm, minus / norm);
    let f_c = p_even + p_odd;
    let flip = mask.dot(&reference) ^ negative;
    let signed = if flip { p_odd - p_even } else { p_even - p_odd };
    Ok(ExactDetection {
        value: signed / f_c,
        f_c,
    })
}
