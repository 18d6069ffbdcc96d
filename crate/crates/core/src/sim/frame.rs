use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use super::{NoiseKind, NoiseModel, ShotTable};
use crate::bits::Bits;
use crate::circuit::CliffordCircuit;
use crate::encode::ExperimentCircuit;
use crate::error::{Error, Result};
use crate::gf2::XorBasis;
use crate::pauli::PauliString;
use crate::tableau::{RandomOutcome, Tableau};

/// Which recorded bits a single-qubit Pauli flips, per noisy moment.
///
/// Built by pulling every measured `Z` back through the circuit: an `X` on
/// qubit `q` after moment `m` flips record bit `j` iff the pulled-back
/// observable of bit `j` has a `Z` or `Y` there, and a `Z` flips it iff the
/// observable has an `X` or `Y` there.
#[derive(Debug, Clone)]
pub struct FaultMap {
    pub n_qubits: usize,
    pub n_bits: usize,
    /// One entry per noisy moment, in circuit order.
    pub moments: Vec<MomentFlips>,
    /// Basis of the outcome flips caused by `Z`s on the input state. These
    /// leave the physical state alone, so a random subset of them resolves
    /// the intrinsic randomness of the measurements.
    pub gauge: Vec<Bits>,
}

#[derive(Debug, Clone)]
pub struct MomentFlips {
    pub moment: usize,
    pub x: Vec<Bits>,
    pub z: Vec<Bits>,
}

impl MomentFlips {
    /// Flips of `X`, `Y`, `Z` on qubit `q`.
    pub fn letters(&self, q: usize) -> [Bits; 3] {
        let mut y = self.x[q].clone();
        y.xor_assign(&self.z[q]);
        [self.x[q].clone(), y, self.z[q].clone()]
    }

    /// Basis of every flip pattern reachable by a Pauli on this moment.
    pub fn span(&self) -> Vec<Bits> {
        let mut b = XorBasis::new();
        for v in self.x.iter().chain(&self.z) {
            b.insert(v.clone());
        }
        b.vectors().cloned().collect()
    }
}

impl FaultMap {
    pub fn new(c: &CliffordCircuit, noisy: &[usize]) -> Result<Self> {
        let n = c.n_qubits();
        let measured = c.measured_qubits();
        let n_bits = measured.len();
        let mut frames: Vec<PauliString> = measured
            .iter()
            .map(|&q| PauliString::z_type(n, [q]))
            .collect();
        let mut is_noisy = vec![false; c.moments().len()];
        for &m in noisy {
            is_noisy[m] = true;
        }
        let mut moments = Vec::with_capacity(noisy.len());
        for (m, moment) in c.moments().iter().enumerate().rev() {
            if moment.has_measurement() {
                continue;
            }
            if is_noisy[m] {
                moments.push(Self::flips(m, n, n_bits, &frames));
            }
            for f in frames.iter_mut() {
                for g in moment.gates() {
                    f.conjugate_gate_inverse(g)?;
                }
            }
        }
        moments.reverse();
        let start = Self::flips(usize::MAX, n, n_bits, &frames);
        let mut gauge = XorBasis::new();
        for v in start.z {
            gauge.insert(v);
        }
        Ok(Self {
            n_qubits: n,
            n_bits,
            moments,
            gauge: gauge.vectors().cloned().collect(),
        })
    }

    fn flips(moment: usize, n: usize, n_bits: usize, frames: &[PauliString]) -> MomentFlips {
        let mut x = vec![Bits::zeros(n_bits); n];
        let mut z = vec![Bits::zeros(n_bits); n];
        for (j, f) in frames.iter().enumerate() {
            for q in f.z_bits().ones() {
                x[q].set(j, true);
            }
            for q in f.x_bits().ones() {
                z[q].set(j, true);
            }
        }
        MomentFlips { moment, x, z }
    }
}

/// Pauli-frame sampler: a noiseless reference record plus independent flips.
#[derive(Debug, Clone)]
pub struct FrameSampler {
    reference: Bits,
    gauge: Vec<Bits>,
    noise: FrameNoise,
}

#[derive(Debug, Clone)]
enum FrameNoise {
    None,
    /// Flattened `(moment, qubit)` locations, each with its X/Y/Z flips.
    Local { p: f64, locations: Vec<[Bits; 3]> },
    /// Per moment, a basis of reachable flips; hit with probability `1 - p`.
    Global { p: f64, spans: Vec<Vec<Bits>> },
}

const CHUNK: u64 = 1 << 12;

impl FrameSampler {
    pub fn new(c: &CliffordCircuit, noise_start: usize, nm: &NoiseModel) -> Result<Self> {
        nm.check()?;
        if !c.has_measurements() {
            return Err(Error::InvalidParameter("circuit measures nothing".into()));
        }
        let noisy = nm.noisy_moments(c, noise_start);
        let map = FaultMap::new(c, &noisy)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let reference = Tableau::sample(c, RandomOutcome::Zero, &mut rng)?;
        let noise = match nm.kind {
            _ if noisy.is_empty() => FrameNoise::None,
            NoiseKind::None => FrameNoise::None,
            NoiseKind::SingleQubitDepolarizing => FrameNoise::Local {
                p: nm.p,
                locations: map
                    .moments
                    .iter()
                    .flat_map(|m| (0..map.n_qubits).map(move |q| m.letters(q)))
                    .collect(),
            },
            NoiseKind::GlobalDepolarizing => FrameNoise::Global {
                p: nm.p,
                spans: map.moments.iter().map(MomentFlips::span).collect(),
            },
        };
        Ok(Self {
            reference,
            gauge: map.gauge,
            noise,
        })
    }

    pub fn for_experiment(e: &ExperimentCircuit, nm: &NoiseModel) -> Result<Self> {
        Self::new(&e.circuit, e.noise_start, nm)
    }

    pub fn n_bits(&self) -> usize {
        self.reference.len()
    }

    /// One record drawn with `rng`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Bits) {
        out.clone_from(&self.reference);
        xor_random_subset(&self.gauge, rng, out);
        match &self.noise {
            FrameNoise::None => {}
            FrameNoise::Local { p, locations } => {
                let geo = Geometric::new(*p).expect("rate checked");
                let total = locations.len() as u64;
                let mut i = geo.sample(rng);
                while i < total {
                    let letter = rng.random_range(0..3);
                    out.xor_assign(&locations[i as usize][letter]);
                    i = i.saturating_add(1).saturating_add(geo.sample(rng));
                }
            }
            FrameNoise::Global { p, spans } => {
                for span in spans {
                    if rng.random::<f64>() >= *p {
                        xor_random_subset(span, rng, out);
                    }
                }
            }
        }
    }

    /// Generator for shot `shot` of a run seeded with `seed`. Each shot has
    /// its own key, so results do not depend on how shots are split across
    /// workers.
    pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&shot.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }

    /// Folds `shots` records into per-chunk accumulators and merges them.
    /// `merge` must be commutative and associative for the result to be
    /// schedule independent.
    pub fn fold<A, I, F, M>(&self, shots: u64, seed: u64, init: I, f: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut A, &Bits) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let chunks = shots.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                let mut bits = Bits::zeros(self.n_bits());
                for shot in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                    let mut rng = Self::shot_rng(seed, shot);
                    self.sample_into(&mut rng, &mut bits);
                    f(&mut acc, &bits);
                }
                acc
            })
            .reduce(&init, &merge)
    }

    pub fn sample_table(&self, shots: u64, seed: u64) -> ShotTable {
        let mut t = self.fold(
            shots,
            seed,
            || ShotTable::new(seed),
            |t, b| t.add(b.clone(), 1),
            |mut a, b| {
                a.merge(b);
                a
            },
        );
        t.seed = seed;
        t
    }
}

fn xor_random_subset<R: Rng + ?Sized>(basis: &[Bits], rng: &mut R, out: &mut Bits) {
    let mut word = 0u64;
    for (i, v) in basis.iter().enumerate() {
        if i % 64 == 0 {
            word = rng.next_u64();
        }
        if word >> (i % 64) & 1 == 1 {
            out.xor_assign(v);
        }
    }
}

/// Samples `shots` records of an experiment under `nm`.
pub fn sample_shots(
    e: &ExperimentCircuit,
    nm: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<ShotTable> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    Ok(FrameSampler::for_experiment(e, nm)?.sample_table(shots, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::StabilizerCode;
    use crate::encode::{build_experiment_circuit, ExperimentKind, LogicalBasis};

    #[test]
    fn bell_pair_outcomes_are_correlated_and_random() {
        let c: CliffordCircuit = "QUBITS 2\nH q0\nCX q0 q1\nM q0 q1\n".parse().unwrap();
        let s = FrameSampler::new(&c, 0, &NoiseModel::noiseless()).unwrap();
        let t = s.sample_table(2000, 1);
        assert_eq!(t.counts.len(), 2);
        for (b, n) in t.iter() {
            assert_eq!(b.get(0), b.get(1));
            assert!(n > 900 && n < 1100, "{n}");
        }
    }

    #[test]
    fn x_error_after_last_moment_flips_its_bit() {
        let c: CliffordCircuit = "QUBITS 2\nCX q0 q1\nM q0 q1\n".parse().unwrap();
        let map = FaultMap::new(&c, &[0]).unwrap();
        assert_eq!(map.moments[0].x[0].to_string(), "10");
        assert!(map.moments[0].z[0].is_zero());
        let before = FaultMap::new(&"QUBITS 2\nH q1\nCX q0 q1\nM q0 q1\n".parse().unwrap(), &[0])
            .unwrap();
        // an X on the control before the CX spreads to both records
        assert_eq!(before.moments[0].x[0].to_string(), "11");
    }

    #[test]
    fn noiseless_color_bell_only_yields_codewords() {
        let code = StabilizerCode::triangular_color(3).unwrap();
        let e = build_experiment_circuit(ExperimentKind::Bell, &code, 0, LogicalBasis::Z).unwrap();
        let t = sample_shots(&e, &NoiseModel::noiseless(), 1000, 3).unwrap();
        let cw = e.codewords().unwrap();
        let (mask, _) = e.parity_mask();
        assert!(t.iter().all(|(b, _)| cw.contains(b) && !mask.dot(b)));
        assert!(t.counts.len() > 20);
    }

    #[test]
    fn same_seed_same_table() {
        let code = StabilizerCode::repetition(3).unwrap();
        let e = build_experiment_circuit(ExperimentKind::Memory, &code, 4, LogicalBasis::Z).unwrap();
        let nm = NoiseModel::depolarizing1q(0.05).unwrap();
        let a = sample_shots(&e, &nm, 10_000, 5).unwrap();
        let b = sample_shots(&e, &nm, 10_000, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_shots(&e, &nm, 10_000, 6).unwrap());
    }

    #[test]
    fn full_rate_global_noise_is_uniform() {
        let c: CliffordCircuit = "QUBITS 2\nX q0\nM q0 q1\n".parse().unwrap();
        let s = FrameSampler::new(&c, 0, &NoiseModel::global(0.0).unwrap()).unwrap();
        let t = s.sample_table(8000, 2);
        assert_eq!(t.counts.len(), 4);
        assert!(t.iter().all(|(_, n)| (1800..2200).contains(&n)));
    }
}
