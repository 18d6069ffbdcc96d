use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{NoiseKind, NoiseModel};
use crate::bits::Bits;
use crate::circuit::{CliffordCircuit, Gate};
use crate::codes::ProjectorExpansion;
use crate::encode::ExperimentCircuit;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Default qubit cap for dense density operators (`4ⁿ` amplitudes).
pub const DEFAULT_DENSE_CAP: usize = 14;

/// Dense `2ⁿ × 2ⁿ` density operator. Entry `ρ[a][b]` lives at `a + (b << n)`,
/// so the ket index occupies the low `n` bits and the bra index the high ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n: usize, cap: usize) -> Result<Self> {
        if n > cap {
            return Err(Error::Capacity(format!(
                "dense simulation of {n} qubits exceeds the cap of {cap}"
            )));
        }
        let mut data = vec![ZERO; 1usize << (2 * n)];
        data[0] = ONE;
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, ket: usize, bra: usize) -> Complex64 {
        self.data[ket + (bra << self.n)]
    }

    pub fn trace(&self) -> f64 {
        (0..1usize << self.n).map(|a| self.entry(a, a).re).sum()
    }

    /// Populations of the computational basis states.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..1usize << self.n).map(|a| self.entry(a, a).re).collect()
    }

    fn single(&mut self, bit: usize, u: [[Complex64; 2]; 2]) {
        let mask = 1usize << bit;
        for i in 0..self.data.len() {
            if i & mask == 0 {
                let (a, b) = (self.data[i], self.data[i | mask]);
                self.data[i] = u[0][0] * a + u[0][1] * b;
                self.data[i | mask] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    fn permute(&mut self, f: impl Fn(usize) -> usize) {
        for i in 0..self.data.len() {
            let j = f(i);
            if j > i {
                self.data.swap(i, j);
            }
        }
    }

    fn phase_where(&mut self, cond: impl Fn(usize) -> bool) {
        for (i, v) in self.data.iter_mut().enumerate() {
            if cond(i) {
                *v = -*v;
            }
        }
    }

    /// `ρ → U ρ U†`.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        let n = self.n;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match *g {
            Gate::H(q) => {
                let h = [
                    [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                    [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
                ];
                self.single(q, h);
                self.single(q + n, h);
            }
            Gate::S(q) => {
                let i = Complex64::new(0.0, 1.0);
                self.single(q, [[ONE, ZERO], [ZERO, i]]);
                self.single(q + n, [[ONE, ZERO], [ZERO, -i]]);
            }
            Gate::X(q) => {
                let m = (1 << q) | (1 << (q + n));
                self.permute(|i| i ^ m);
            }
            Gate::Z(q) => {
                self.phase_where(|i| ((i >> q) ^ (i >> (q + n))) & 1 == 1);
            }
            Gate::CX(c, t) => {
                self.permute(|i| {
                    let mut j = i;
                    if i >> c & 1 == 1 {
                        j ^= 1 << t;
                    }
                    if i >> (c + n) & 1 == 1 {
                        j ^= 1 << (t + n);
                    }
                    j
                });
            }
            Gate::CZ(a, b) => {
                self.phase_where(|i| {
                    ((i >> a) & (i >> b) & 1) ^ ((i >> (a + n)) & (i >> (b + n)) & 1) == 1
                });
            }
            Gate::Swap(a, b) => {
                self.permute(|i| swap_bits(swap_bits(i, a, b), a + n, b + n));
            }
            Gate::M(_) => {
                return Err(Error::Unsupported(
                    "dense evolution ignores terminal measurements; strip them first".into(),
                ))
            }
        }
        Ok(())
    }

    /// Depolarizing channel with error probability `p` on qubit `q`.
    pub fn depolarize1(&mut self, q: usize, p: f64) {
        let (ket, bra) = (1usize << q, 1usize << (q + self.n));
        let both = ket | bra;
        let keep = 1.0 - 2.0 * p / 3.0;
        let move_ = 2.0 * p / 3.0;
        let off = 1.0 - 4.0 * p / 3.0;
        for i in 0..self.data.len() {
            let same = ((i & ket != 0) as u8) == ((i & bra != 0) as u8);
            if !same {
                self.data[i] *= off;
            } else if i & ket == 0 {
                let j = i | both;
                let (a, b) = (self.data[i], self.data[j]);
                self.data[i] = a * keep + b * move_;
                self.data[j] = b * keep + a * move_;
            }
        }
    }

    /// `ρ → p ρ + (1 − p) Tr[ρ] I / 2ⁿ`.
    pub fn depolarize_global(&mut self, p: f64) {
        let tr = self.trace();
        let dim = 1usize << self.n;
        self.data.iter_mut().for_each(|v| *v *= p);
        let add = (1.0 - p) * tr / dim as f64;
        for a in 0..dim {
            self.data[a + (a << self.n)] += add;
        }
    }

    /// `Tr[ρ P]`.
    pub fn expectation(&self, p: &PauliString) -> Result<Complex64> {
        if p.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: p.n(),
            });
        }
        let x = p.x_bits().low_u64() as usize;
        let z = p.z_bits().low_u64() as usize;
        let ys = (x & z).count_ones();
        let base = match ys % 4 {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => -ONE,
            _ => Complex64::new(0.0, -1.0),
        } * if p.is_negative() { -1.0 } else { 1.0 };
        let mut acc = ZERO;
        for a in 0..1usize << self.n {
            let v = self.entry(a, a ^ x);
            if (a & z).count_ones() % 2 == 1 {
                acc -= v;
            } else {
                acc += v;
            }
        }
        Ok(acc * base)
    }

    /// Evolves `|0…0⟩` through the unitary part of `c`, with the noise channel
    /// after each moment selected by `nm`.
    pub fn evolve(
        c: &CliffordCircuit,
        noise_start: usize,
        nm: &NoiseModel,
        cap: usize,
    ) -> Result<Self> {
        nm.check()?;
        let mut rho = Self::zero_state(c.n_qubits(), cap)?;
        let noisy = nm.noisy_moments(c, noise_start);
        for (i, m) in c.moments().iter().enumerate() {
            for g in m.gates().iter().filter(|g| !g.is_measurement()) {
                rho.apply_gate(g)?;
            }
            if noisy.binary_search(&i).is_ok() {
                match nm.kind {
                    NoiseKind::None => {}
                    NoiseKind::SingleQubitDepolarizing => {
                        for q in 0..rho.n {
                            rho.depolarize1(q, nm.p);
                        }
                    }
                    NoiseKind::GlobalDepolarizing => rho.depolarize_global(nm.p),
                }
            }
        }
        Ok(rho)
    }
}

fn swap_bits(i: usize, a: usize, b: usize) -> usize {
    if (i >> a & 1) != (i >> b & 1) {
        i ^ (1 << a) ^ (1 << b)
    } else {
        i
    }
}

/// `Tr[ρ Π Ō]`, `Tr[ρ Π]` and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactExpectation {
    pub numerator: f64,
    pub denominator: f64,
    pub value: f64,
}

/// Exact mitigated expectation of an experiment's pre-measurement state.
/// `projector` and `obs` act on the measured qubits in record order; `obs`
/// must commute with every projector term.
pub fn exact_expectation(
    e: &ExperimentCircuit,
    nm: &NoiseModel,
    projector: &ProjectorExpansion,
    obs: &PauliString,
    cap: usize,
) -> Result<ExactExpectation> {
    let measured = e.circuit.measured_qubits();
    if projector.n != measured.len() || obs.n() != measured.len() {
        return Err(Error::Dimension {
            expected: measured.len(),
            found: obs.n(),
        });
    }
    let rho = DensityMatrix::evolve(&e.circuit, e.noise_start, nm, cap)?;
    let total = e.n_qubits();
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for (c, s) in projector.iter() {
        if !s.commutes(obs)? {
            return Err(Error::Contract(format!(
                "projector term {s} does not commute with the observable {obs}"
            )));
        }
        let so = s.mul(obs)?;
        denominator += c * rho.expectation(&s.embed(total, &measured)?)?.re;
        numerator += c * rho.expectation(&so.embed(total, &measured)?)?.re;
    }
    Ok(ExactExpectation {
        numerator,
        denominator,
        value: numerator / denominator,
    })
}

/// Exact distribution of the measurement record, zero entries omitted.
pub fn exact_distribution(
    e: &ExperimentCircuit,
    nm: &NoiseModel,
    cap: usize,
) -> Result<BTreeMap<Bits, f64>> {
    let rho = DensityMatrix::evolve(&e.circuit, e.noise_start, nm, cap)?;
    let measured = e.circuit.measured_qubits();
    let mut out = BTreeMap::new();
    for (a, p) in rho.diagonal().into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let bits = Bits::from_bools(&measured.iter().map(|&q| a >> q & 1 == 1).collect::<Vec<_>>());
        *out.entry(bits).or_insert(0.0) += p;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn bell_state_correlations() {
        let c: CliffordCircuit = "QUBITS 2\nH q0\nCX q0 q1\n".parse().unwrap();
        let rho = DensityMatrix::evolve(&c, 0, &NoiseModel::noiseless(), 4).unwrap();
        assert!((rho.expectation(&p("XX")).unwrap().re - 1.0).abs() < 1e-12);
        assert!((rho.expectation(&p("YY")).unwrap().re + 1.0).abs() < 1e-12);
        assert!(rho.expectation(&p("Z_")).unwrap().norm() < 1e-12);
    }

    #[test]
    fn s_gate_maps_x_to_y() {
        let c: CliffordCircuit = "QUBITS 1\nH q0\nS q0\n".parse().unwrap();
        let rho = DensityMatrix::evolve(&c, 0, &NoiseModel::noiseless(), 4).unwrap();
        assert!((rho.expectation(&p("Y")).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_shrinks_bloch_vector() {
        let c: CliffordCircuit = "QUBITS 1\nH q0\n".parse().unwrap();
        let nm = NoiseModel::depolarizing1q(0.3).unwrap();
        let rho = DensityMatrix::evolve(&c, 0, &nm, 4).unwrap();
        let x = rho.expectation(&p("X")).unwrap().re;
        assert!((x - (1.0 - 4.0 * 0.3 / 3.0)).abs() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_channel_mixes() {
        let c: CliffordCircuit = "QUBITS 2\nX q0\nX q0\n".parse().unwrap();
        let nm = NoiseModel::global(0.9).unwrap();
        let rho = DensityMatrix::evolve(&c, 0, &nm, 4).unwrap();
        let z = rho.expectation(&p("Z_")).unwrap().re;
        assert!((z - 0.81).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            DensityMatrix::zero_state(5, 4),
            Err(Error::Capacity(_))
        ));
    }
}
