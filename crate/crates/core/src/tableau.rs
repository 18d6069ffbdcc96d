//! Stabilizer tableau simulation (destabilizer/stabilizer form).

use rand::Rng;

use crate::bits::Bits;
use crate::circuit::{CliffordCircuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Stabilizer state on `n` qubits, starting from `|0…0⟩`.
#[derive(Debug, Clone)]
pub struct Tableau {
    n: usize,
    destab: Vec<PauliString>,
    stab: Vec<PauliString>,
}

/// How to resolve a measurement whose outcome is random.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomOutcome {
    /// Always choose `0`.
    Zero,
    /// Flip a fair coin from the supplied generator.
    Coin,
}

impl Tableau {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            destab: (0..n).map(|q| PauliString::single(n, q, Pauli::X)).collect(),
            stab: (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stab
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            row.conjugate_gate(gate)?;
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &CliffordCircuit) -> Result<()> {
        if c.n_qubits() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: c.n_qubits(),
            });
        }
        for g in c.gates() {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Expectation of a Hermitian Pauli: `Some(±1)` when deterministic, `None` when
    /// the outcome is uniformly random (expectation 0).
    pub fn expectation(&self, p: &PauliString) -> Result<Option<i8>> {
        if p.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: p.n(),
            });
        }
        if self.stab.iter().any(|s| !s.commutes_unchecked(p)) {
            return Ok(None);
        }
        let mut acc = PauliString::identity(self.n);
        for (d, s) in self.destab.iter().zip(&self.stab) {
            if !d.commutes_unchecked(p) {
                acc.mul_assign_commuting(s);
            }
        }
        if !acc.same_letters(p) {
            return Err(Error::Internal(format!(
                "{p} commutes with the stabilizer group but is not generated by it"
            )));
        }
        Ok(Some(if acc.is_negative() == p.is_negative() { 1 } else { -1 }))
    }

    /// Measures `Z_q`, collapsing the state; returns the outcome bit.
    pub fn measure_z<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        mode: RandomOutcome,
        rng: &mut R,
    ) -> bool {
        let n = self.n;
        if let Some(p) = (0..n).find(|&i| self.stab[i].x_bits().get(q)) {
            let pivot = self.stab[p].clone();
            for i in 0..n {
                if i != p && self.stab[i].x_bits().get(q) {
                    self.stab[i].mul_assign_commuting(&pivot);
                }
                if self.destab[i].x_bits().get(q) && i != p {
                    self.destab[i].mul_assign_commuting(&pivot);
                }
            }
            self.destab[p] = pivot;
            let outcome = match mode {
                RandomOutcome::Zero => false,
                RandomOutcome::Coin => rng.random::<bool>(),
            };
            let mut z = PauliString::single(n, q, Pauli::Z);
            z.set_negative(outcome);
            self.stab[p] = z;
            outcome
        } else {
            let mut acc = PauliString::identity(n);
            for i in 0..n {
                if self.destab[i].x_bits().get(q) {
                    acc.mul_assign_commuting(&self.stab[i]);
                }
            }
            acc.is_negative()
        }
    }

    /// Runs a circuit with terminal measurements and returns one valid outcome
    /// record (random outcomes resolved by `mode`).
    pub fn sample<R: Rng + ?Sized>(
        c: &CliffordCircuit,
        mode: RandomOutcome,
        rng: &mut R,
    ) -> Result<Bits> {
        let mut t = Tableau::new(c.n_qubits());
        let mut out = Vec::new();
        for m in c.moments() {
            for g in m.gates() {
                match g {
                    Gate::M(q) => out.push(t.measure_z(*q, mode, rng)),
                    other => t.apply(other)?,
                }
            }
        }
        Ok(Bits::from_bools(&out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn bell_state_expectations() {
        let mut b = CircuitBuilder::new(2);
        b.add(Gate::H(0)).unwrap();
        b.add(Gate::CX(0, 1)).unwrap();
        let mut t = Tableau::new(2);
        t.apply_circuit(&b.finish()).unwrap();
        assert_eq!(t.expectation(&p("ZZ")).unwrap(), Some(1));
        assert_eq!(t.expectation(&p("XX")).unwrap(), Some(1));
        assert_eq!(t.expectation(&p("YY")).unwrap(), Some(-1));
        assert_eq!(t.expectation(&p("Z_")).unwrap(), None);
    }

    #[test]
    fn measurement_collapses_bell_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut t = Tableau::new(2);
            t.apply(&Gate::H(0)).unwrap();
            t.apply(&Gate::CX(0, 1)).unwrap();
            let a = t.measure_z(0, RandomOutcome::Coin, &mut rng);
            let b = t.measure_z(1, RandomOutcome::Coin, &mut rng);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn deterministic_outcome_after_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = Tableau::new(1);
        t.apply(&Gate::X(0)).unwrap();
        assert!(t.measure_z(0, RandomOutcome::Coin, &mut rng));
        assert_eq!(t.expectation(&p("Z")).unwrap(), Some(-1));
    }
}
