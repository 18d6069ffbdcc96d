//! Encoding circuits, logical gates, and full memory/Bell experiment circuits.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::circuit::{CircuitBuilder, CliffordCircuit, Gate};
use crate::codes::{
    projector_terms, validate_code, CodewordSet, ProjectorExpansion, StabilizerCode,
};
use crate::error::{Error, Result};
use crate::gf2::{rref_gf2, CheckMatrix};
use crate::pauli::{Pauli, PauliString};
use crate::tableau::Tableau;

/// Unitary `U` with `U|0…0⟩ = |0̄⟩`.
///
/// The stabilizers of `|0̄⟩` (generators plus logical Zs) are reduced to single
/// `Z`s one pivot at a time. At each step the remaining rows are brought to
/// row-echelon form with X columns first; the leading row's pivot qubit is
/// turned into a bare `X` by fanning out CX/CZ from the pivot and then rotated
/// to `Z` with `H`. For CSS codes this yields the usual "H on pivots, then CX
/// fan-out" encoder, and codes whose `|0̄⟩` is a product state need no gates.
/// The collected reduction circuit is inverted to give `U`.
pub fn synthesize_encoder(c: &StabilizerCode) -> Result<CliffordCircuit> {
    let report = validate_code(c);
    if !report.is_valid() {
        return Err(Error::InvalidParameter(format!(
            "code fails validation: {:?}",
            report.failures
        )));
    }
    let n = c.n;
    let mut remaining: Vec<PauliString> =
        c.generators.iter().chain(&c.logical_z).cloned().collect();
    if remaining.len() != n {
        return Err(Error::Internal(format!(
            "{} stabilizers for a {n}-qubit state",
            remaining.len()
        )));
    }
    let mut reduction = CircuitBuilder::new(n);
    while !remaining.is_empty() {
        let rr = rref_gf2(&CheckMatrix::new(n, remaining.clone())?);
        if rr.rank < remaining.len() {
            return Err(Error::Internal("stabilizers of |0̄⟩ are dependent".into()));
        }
        let mut rows = rr.reduced.into_rows();
        let q = rr.pivot_columns[0];
        if q >= n {
            // only Z-type rows left and they reduce to single-qubit Zs
            for (row, &col) in rows.iter().zip(&rr.pivot_columns) {
                if row.weight() != 1 {
                    return Err(Error::Internal(format!("residual row {row} is not local")));
                }
                if row.is_negative() {
                    reduction.add(Gate::X(col - n))?;
                }
            }
            break;
        }
        let mut pivot = rows.remove(0);
        let mut apply = |g: Gate, pivot: &mut PauliString, rows: &mut [PauliString]| -> Result<()> {
            reduction.add(g)?;
            pivot.conjugate_gate(&g)?;
            rows.iter_mut().try_for_each(|r| r.conjugate_gate(&g))
        };
        if pivot.get(q) == Pauli::Y {
            apply(Gate::S(q), &mut pivot, &mut rows)?;
        }
        for t in pivot.support() {
            if t == q {
                continue;
            }
            match pivot.get(t) {
                Pauli::X => apply(Gate::CX(q, t), &mut pivot, &mut rows)?,
                Pauli::Z => apply(Gate::CZ(q, t), &mut pivot, &mut rows)?,
                Pauli::Y => {
                    apply(Gate::S(t), &mut pivot, &mut rows)?;
                    apply(Gate::CX(q, t), &mut pivot, &mut rows)?;
                }
                Pauli::I => unreachable!(),
            }
        }
        apply(Gate::H(q), &mut pivot, &mut rows)?;
        debug_assert_eq!(pivot.weight(), 1);
        for r in rows.iter_mut() {
            if r.get(q) != Pauli::I {
                *r = r.mul(&pivot)?;
            }
        }
        if pivot.is_negative() {
            reduction.add(Gate::X(q))?;
        }
        remaining = rows;
    }
    reduction.finish().inverse()
}

/// Checks that every generator and logical Z is deterministically `+1` on
/// `U|0…0⟩`. Returns the offending operators.
pub fn verify_encoder(c: &StabilizerCode, u: &CliffordCircuit) -> Result<Vec<PauliString>> {
    if u.n_qubits() != c.n {
        return Err(Error::Dimension {
            expected: c.n,
            found: u.n_qubits(),
        });
    }
    let mut t = Tableau::new(c.n);
    t.apply_circuit(u)?;
    let mut bad = Vec::new();
    for p in c.generators.iter().chain(&c.logical_z) {
        if t.expectation(p)? != Some(1) {
            bad.push(p.clone());
        }
    }
    Ok(bad)
}

/// One code block placed on a set of physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalBlock {
    pub code: StabilizerCode,
    pub qubits: Vec<usize>,
}

impl LogicalBlock {
    pub fn new(code: StabilizerCode, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != code.n {
            return Err(Error::Dimension {
                expected: code.n,
                found: qubits.len(),
            });
        }
        let mut seen = qubits.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != qubits.len() {
            return Err(Error::InvalidParameter("block qubits repeat".into()));
        }
        Ok(Self { code, qubits })
    }

    /// `count` consecutive blocks of `code` starting at qubit 0.
    pub fn consecutive(code: &StabilizerCode, count: usize) -> Vec<LogicalBlock> {
        (0..count)
            .map(|b| LogicalBlock {
                code: code.clone(),
                qubits: (b * code.n..(b + 1) * code.n).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogicalGateKind {
    X,
    H,
    Cnot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalGate {
    pub circuit: CliffordCircuit,
    /// False for the repetition-code Hadamard ladder, which spreads bit flips.
    pub fault_tolerant: bool,
}

/// How a code realizes its logical Hadamard, if at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HadamardStyle {
    Transversal,
    /// `H` on the first qubit, then a CX chain; only maps `|0̄⟩` to `|+̄⟩`.
    Ladder,
}

fn hadamard_style(c: &StabilizerCode) -> Option<HadamardStyle> {
    if c.k != 1 {
        return None;
    }
    if c.is_self_dual_css() {
        return Some(HadamardStyle::Transversal);
    }
    let all_x = c.logical_x[0].is_x_type() && c.logical_x[0].weight() == c.n;
    let plus_z_checks = c.generators.iter().all(|g| g.is_z_type() && !g.is_negative());
    if all_x && plus_z_checks && c.r() + 1 == c.n {
        return Some(HadamardStyle::Ladder);
    }
    None
}

/// Physical gates realizing a logical gate on `blocks` inside an
/// `n_qubits`-qubit register. Every block must encode one logical qubit.
pub fn logical_gate(
    kind: LogicalGateKind,
    blocks: &[LogicalBlock],
    n_qubits: usize,
) -> Result<LogicalGate> {
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("no blocks given".into()));
    }
    for b in blocks {
        if b.code.k != 1 {
            return Err(Error::Unsupported(format!(
                "logical gates need k = 1, block has k = {}",
                b.code.k
            )));
        }
        if let Some(&q) = b.qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::InvalidParameter(format!(
                "block qubit {q} outside register of {n_qubits}"
            )));
        }
    }
    let mut out = CircuitBuilder::new(n_qubits);
    let mut fault_tolerant = true;
    match kind {
        LogicalGateKind::X => {
            for b in blocks {
                let lx = &b.code.logical_x[0];
                for q in lx.support() {
                    let p = b.qubits[q];
                    match lx.get(q) {
                        Pauli::X => out.add(Gate::X(p))?,
                        Pauli::Z => out.add(Gate::Z(p))?,
                        Pauli::Y => {
                            out.add(Gate::X(p))?;
                            out.add(Gate::Z(p))?;
                        }
                        Pauli::I => {}
                    }
                }
            }
        }
        LogicalGateKind::H => {
            for b in blocks {
                match hadamard_style(&b.code) {
                    Some(HadamardStyle::Transversal) => {
                        for &p in &b.qubits {
                            out.add(Gate::H(p))?;
                        }
                    }
                    Some(HadamardStyle::Ladder) => {
                        fault_tolerant = false;
                        out.add(Gate::H(b.qubits[0]))?;
                        for w in b.qubits.windows(2) {
                            out.add(Gate::CX(w[0], w[1]))?;
                        }
                    }
                    None => {
                        return Err(Error::Unsupported(
                            "code has no transversal or ladder Hadamard".into(),
                        ))
                    }
                }
            }
        }
        LogicalGateKind::Cnot => {
            let [a, b] = blocks else {
                return Err(Error::InvalidParameter(format!(
                    "logical CNOT takes two blocks, got {}",
                    blocks.len()
                )));
            };
            if a.code != b.code {
                return Err(Error::InvalidParameter(
                    "logical CNOT blocks use different codes".into(),
                ));
            }
            if !a.code.generators_are_css() {
                return Err(Error::Unsupported("transversal CNOT needs a CSS code".into()));
            }
            for (&c, &t) in a.qubits.iter().zip(&b.qubits) {
                out.add(Gate::CX(c, t))?;
            }
        }
    }
    Ok(LogicalGate {
        circuit: out.finish(),
        fault_tolerant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Memory,
    Bell,
}

impl ExperimentKind {
    pub fn blocks(self) -> usize {
        match self {
            ExperimentKind::Memory => 1,
            ExperimentKind::Bell => 2,
        }
    }
}

/// Logical basis of the final measurement: `Z̄…Z̄` or `X̄…X̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogicalBasis {
    Z,
    X,
}

/// A full experiment: encoding, logical gates, `D` layers of `X̄`, optional
/// basis rotation, and a terminal measurement of every qubit in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentCircuit {
    pub kind: ExperimentKind,
    pub circuit: CliffordCircuit,
    pub blocks: Vec<LogicalBlock>,
    pub basis: LogicalBasis,
    pub depth: usize,
    /// Index of the first moment after encoding.
    pub noise_start: usize,
    pub fault_tolerant: bool,
}

/// Sidecar describing an experiment circuit stored as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentMetadata {
    pub kind: ExperimentKind,
    pub basis: LogicalBasis,
    pub depth: usize,
    pub noise_start: usize,
    pub fault_tolerant: bool,
    pub n_qubits: usize,
    pub blocks: Vec<Vec<usize>>,
    pub code: StabilizerCode,
    pub circuit_hash: String,
}

pub fn build_experiment_circuit(
    kind: ExperimentKind,
    code: &StabilizerCode,
    depth: usize,
    basis: LogicalBasis,
) -> Result<ExperimentCircuit> {
    if depth % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "depth must be even, got {depth}"
        )));
    }
    if code.k != 1 {
        return Err(Error::Unsupported("experiments need one logical qubit per block".into()));
    }
    if basis == LogicalBasis::X && hadamard_style(code) != Some(HadamardStyle::Transversal) {
        return Err(Error::Unsupported(
            "X̄ observables need a transversal Hadamard".into(),
        ));
    }
    let count = kind.blocks();
    let n_total = code.n * count;
    let blocks = LogicalBlock::consecutive(code, count);
    let encoder = synthesize_encoder(code)?;
    let encoders: Vec<CliffordCircuit> = blocks
        .iter()
        .map(|b| encoder.embed(n_total, &b.qubits))
        .collect::<Result<_>>()?;
    let mut circuit = CliffordCircuit::parallel(n_total, &encoders)?;
    let noise_start = circuit.depth();
    let mut fault_tolerant = true;
    if kind == ExperimentKind::Bell {
        let h = logical_gate(LogicalGateKind::H, &blocks[..1], n_total)?;
        fault_tolerant &= h.fault_tolerant;
        circuit.append(&h.circuit)?;
        circuit.append(&logical_gate(LogicalGateKind::Cnot, &blocks, n_total)?.circuit)?;
    }
    let x_layer = logical_gate(LogicalGateKind::X, &blocks, n_total)?.circuit;
    for _ in 0..depth {
        circuit.append(&x_layer)?;
    }
    if basis == LogicalBasis::X {
        circuit.append(&logical_gate(LogicalGateKind::H, &blocks, n_total)?.circuit)?;
    }
    circuit.push_moment((0..n_total).map(Gate::M).collect())?;
    Ok(ExperimentCircuit {
        kind,
        circuit,
        blocks,
        basis,
        depth,
        noise_start,
        fault_tolerant,
    })
}

impl ExperimentCircuit {
    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }

    /// The per-block code, tensored over blocks. Its qubits are the measurement
    /// record bits, which coincide with circuit qubits unless the circuit was
    /// routed.
    pub fn code(&self) -> StabilizerCode {
        self.blocks[0].code.blocks(self.blocks.len())
    }

    /// The code as seen by the final measurement: conjugated by the basis
    /// rotation when measuring `X̄`.
    pub fn measured_code(&self) -> StabilizerCode {
        let mut c = self.code();
        if self.basis == LogicalBasis::X {
            let rotate = |p: &PauliString| -> PauliString {
                let mut q = p.clone();
                for i in 0..c.n {
                    q.conjugate_gate(&Gate::H(i)).expect("single-qubit gate in range");
                }
                q
            };
            c.generators = c.generators.iter().map(rotate).collect();
            let lx: Vec<PauliString> = c.logical_x.iter().map(rotate).collect();
            let lz: Vec<PauliString> = c.logical_z.iter().map(rotate).collect();
            c.logical_x = lz;
            c.logical_z = lx;
        }
        c
    }

    /// Product of the measured logical operator over blocks, as a Z-type Pauli
    /// on the pre-measurement state.
    pub fn measured_observable(&self) -> PauliString {
        let c = self.measured_code();
        let mut acc = PauliString::identity(c.n);
        for lz in &c.logical_z {
            acc = acc.mul(lz).expect("logical Zs commute");
        }
        acc
    }

    /// Measured-bit support of the observable and whether its sign is negative.
    pub fn parity_mask(&self) -> (Bits, bool) {
        let o = self.measured_observable();
        (o.z_bits().clone(), o.is_negative())
    }

    /// Codeword membership for post-selection of measured strings.
    pub fn codewords(&self) -> Result<CodewordSet> {
        CodewordSet::for_code(&self.measured_code())
    }

    /// Projector of the measured code.
    pub fn projector(&self, cap: usize) -> Result<ProjectorExpansion> {
        projector_terms(&self.measured_code(), cap)
    }

    /// Noiseless expectation of the measured observable.
    pub fn ideal_value(&self) -> Result<f64> {
        let mut t = Tableau::new(self.n_qubits());
        t.apply_circuit(&self.circuit.without_measurements())?;
        let obs = self
            .measured_observable()
            .embed(self.n_qubits(), &self.circuit.measured_qubits())?;
        Ok(t.expectation(&obs)?.map_or(0.0, f64::from))
    }

    pub fn metadata(&self) -> ExperimentMetadata {
        ExperimentMetadata {
            kind: self.kind,
            basis: self.basis,
            depth: self.depth,
            noise_start: self.noise_start,
            fault_tolerant: self.fault_tolerant,
            n_qubits: self.n_qubits(),
            blocks: self.blocks.iter().map(|b| b.qubits.clone()).collect(),
            code: self.blocks[0].code.clone(),
            circuit_hash: self.circuit.content_hash(),
        }
    }

    /// Reassembles an experiment from a circuit and its sidecar, checking that
    /// they belong together.
    pub fn from_parts(circuit: CliffordCircuit, meta: ExperimentMetadata) -> Result<Self> {
        if circuit.content_hash() != meta.circuit_hash {
            return Err(Error::InvalidParameter(
                "circuit does not match its metadata hash".into(),
            ));
        }
        let blocks = meta
            .blocks
            .into_iter()
            .map(|q| LogicalBlock::new(meta.code.clone(), q))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind: meta.kind,
            circuit,
            blocks,
            basis: meta.basis,
            depth: meta.depth,
            noise_start: meta.noise_start,
            fault_tolerant: meta.fault_tolerant,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::conjugate_by_circuit;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn repetition_encoder_is_empty() {
        for n in [3, 5, 9] {
            let c = StabilizerCode::repetition(n).unwrap();
            assert_eq!(synthesize_encoder(&c).unwrap().depth(), 0);
        }
    }

    #[test]
    fn steane_encoder_prepares_logical_zero() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        let u = synthesize_encoder(&c).unwrap();
        assert!(verify_encoder(&c, &u).unwrap().is_empty());
        assert!(u.gates().all(|g| matches!(g, Gate::H(_) | Gate::CX(..))));
    }

    #[test]
    fn non_css_five_qubit_code() {
        let gens = ["XZZX_", "_XZZX", "X_XZZ", "ZX_XZ"].map(p).to_vec();
        let c = StabilizerCode {
            n: 5,
            k: 1,
            d: 3,
            generators: gens,
            logical_x: vec![p("XXXXX")],
            logical_z: vec![p("ZZZZZ")],
            is_css: false,
        };
        let u = synthesize_encoder(&c).unwrap();
        assert!(verify_encoder(&c, &u).unwrap().is_empty());
    }

    #[test]
    fn signed_generators_are_honoured() {
        let mut c = StabilizerCode::triangular_color(3).unwrap();
        c.generators[0] = c.generators[0].clone().negated();
        c.generators[4] = c.generators[4].clone().negated();
        c.logical_z[0] = c.logical_z[0].clone().negated();
        let u = synthesize_encoder(&c).unwrap();
        assert!(verify_encoder(&c, &u).unwrap().is_empty());
    }

    #[test]
    fn verify_catches_wrong_circuit() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        let bad = verify_encoder(&c, &CliffordCircuit::new(7)).unwrap();
        assert_eq!(bad.len(), 3);
    }

    #[test]
    fn repetition_cnot_is_three_gates() {
        let c = StabilizerCode::repetition(3).unwrap();
        let blocks = LogicalBlock::consecutive(&c, 2);
        let g = logical_gate(LogicalGateKind::Cnot, &blocks, 6).unwrap();
        assert_eq!(g.circuit.gates().count(), 3);
        assert_eq!(g.circuit.depth(), 1);
    }

    #[test]
    fn steane_hadamard_is_one_moment() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        let g = logical_gate(LogicalGateKind::H, &LogicalBlock::consecutive(&c, 1), 7).unwrap();
        assert_eq!(g.circuit.depth(), 1);
        assert_eq!(g.circuit.gates().count(), 7);
        assert!(g.fault_tolerant);
    }

    #[test]
    fn repetition_hadamard_is_flagged() {
        let c = StabilizerCode::repetition(5).unwrap();
        let g = logical_gate(LogicalGateKind::H, &LogicalBlock::consecutive(&c, 1), 5).unwrap();
        assert!(!g.fault_tolerant);
        assert_eq!(g.circuit.gates().filter(|g| g.is_two_qubit()).count(), 4);
    }

    #[test]
    fn cnot_heisenberg_action() {
        let c = StabilizerCode::repetition(3).unwrap();
        let g = logical_gate(LogicalGateKind::Cnot, &LogicalBlock::consecutive(&c, 2), 6).unwrap();
        let conj = |s: &str| conjugate_by_circuit(&p(s), &g.circuit).unwrap().to_string();
        assert_eq!(conj("XXX___"), "+XXXXXX");
        assert_eq!(conj("___Z__"), "+Z__Z__");
        assert_eq!(conj("Z_____"), "+Z_____");
    }

    #[test]
    fn memory_depth_zero_is_measurement_only() {
        let c = StabilizerCode::repetition(3).unwrap();
        let e = build_experiment_circuit(ExperimentKind::Memory, &c, 0, LogicalBasis::Z).unwrap();
        assert_eq!(e.circuit.depth(), 1);
        assert!(e.circuit.moments()[0].is_measurement_only());
        assert_eq!(e.ideal_value().unwrap(), 1.0);
    }

    #[test]
    fn repetition_bell_gate_count() {
        let c = StabilizerCode::repetition(3).unwrap();
        let e = build_experiment_circuit(ExperimentKind::Bell, &c, 0, LogicalBasis::Z).unwrap();
        let two = e.circuit.gates().filter(|g| g.is_two_qubit()).count();
        assert_eq!(two, 5);
        assert!(!e.fault_tolerant);
    }

    #[test]
    fn odd_depth_and_rep_x_basis_rejected() {
        let c = StabilizerCode::repetition(3).unwrap();
        assert!(build_experiment_circuit(ExperimentKind::Memory, &c, 3, LogicalBasis::Z).is_err());
        assert!(matches!(
            build_experiment_circuit(ExperimentKind::Bell, &c, 2, LogicalBasis::X),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn color_bell_ideal_values() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        for basis in [LogicalBasis::Z, LogicalBasis::X] {
            for depth in [0, 2, 4] {
                let e = build_experiment_circuit(ExperimentKind::Bell, &c, depth, basis).unwrap();
                assert_eq!(e.ideal_value().unwrap(), 1.0, "{basis:?} D={depth}");
            }
        }
    }

    #[test]
    fn physical_bell_is_two_qubits() {
        let c = StabilizerCode::unencoded(1);
        let e = build_experiment_circuit(ExperimentKind::Bell, &c, 2, LogicalBasis::X).unwrap();
        assert_eq!(e.n_qubits(), 2);
        assert_eq!(e.ideal_value().unwrap(), 1.0);
    }

    #[test]
    fn metadata_round_trip() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        let e = build_experiment_circuit(ExperimentKind::Bell, &c, 2, LogicalBasis::Z).unwrap();
        let json = serde_json::to_string(&e.metadata()).unwrap();
        let meta: ExperimentMetadata = serde_json::from_str(&json).unwrap();
        let text = e.circuit.to_text();
        let back = ExperimentCircuit::from_parts(text.parse().unwrap(), meta).unwrap();
        assert_eq!(back, e);
    }
}
