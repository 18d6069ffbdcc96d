//! Moment-ordered Clifford circuits over the gate set `{H, S, X, Z, CX, CZ, SWAP, M}`.
//!
//! Text form, one moment per line, gates separated by `;`:
//!
//! ```text
//! QUBITS 3
//! H q0
//! CX q0 q1; X q2
//! M q0 q1 q2
//! ```
//!
//! `#` starts a comment. Printing is canonical, so parse/print round-trips exactly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    CX(usize, usize),
    CZ(usize, usize),
    Swap(usize, usize),
    /// Z-basis measurement.
    M(usize),
}

impl Gate {
    pub fn qubits(&self) -> GateQubits {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Z(q) | Gate::M(q) => GateQubits::One(q),
            Gate::CX(a, b) | Gate::CZ(a, b) | Gate::Swap(a, b) => GateQubits::Two(a, b),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.qubits(), GateQubits::Two(..))
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Gate::M(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::CX(..) => "CX",
            Gate::CZ(..) => "CZ",
            Gate::Swap(..) => "SWAP",
            Gate::M(_) => "M",
        }
    }

    /// Same gate with qubits relabelled through `f`.
    pub fn map_qubits(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::S(q) => Gate::S(f(q)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::Z(q) => Gate::Z(f(q)),
            Gate::M(q) => Gate::M(f(q)),
            Gate::CX(a, b) => Gate::CX(f(a), f(b)),
            Gate::CZ(a, b) => Gate::CZ(f(a), f(b)),
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateQubits {
    One(usize),
    Two(usize, usize),
}

impl GateQubits {
    pub fn as_slice(&self) -> Vec<usize> {
        match *self {
            GateQubits::One(q) => vec![q],
            GateQubits::Two(a, b) => vec![a, b],
        }
    }
}

/// A parallel layer of gates on pairwise-disjoint qubits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Moment {
    gates: Vec<Gate>,
}

impl Moment {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn has_measurement(&self) -> bool {
        self.gates.iter().any(Gate::is_measurement)
    }

    pub fn is_measurement_only(&self) -> bool {
        !self.gates.is_empty() && self.gates.iter().all(Gate::is_measurement)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordCircuit {
    n_qubits: usize,
    moments: Vec<Moment>,
}

impl CliffordCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            moments: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn moments(&self) -> &[Moment] {
        &self.moments
    }

    /// Number of non-empty moments.
    pub fn depth(&self) -> usize {
        self.moments.iter().filter(|m| !m.is_empty()).count()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.moments.iter().flat_map(|m| m.gates.iter())
    }

    pub fn has_measurements(&self) -> bool {
        self.gates().any(Gate::is_measurement)
    }

    /// Measured qubits in record order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        self.gates()
            .filter_map(|g| match g {
                Gate::M(q) => Some(*q),
                _ => None,
            })
            .collect()
    }

    /// Appends a moment after validating qubit ranges, disjointness and
    /// terminal-measurement placement. Empty moments are ignored.
    pub fn push_moment(&mut self, gates: Vec<Gate>) -> Result<()> {
        if gates.is_empty() {
            return Ok(());
        }
        let mut used = vec![false; self.n_qubits];
        let measured = self.measured_mask();
        let measuring_started = self.has_measurements();
        for g in &gates {
            for q in g.qubits().as_slice() {
                if q >= self.n_qubits {
                    return Err(Error::InvalidParameter(format!(
                        "gate {} on qubit {q} outside register of {}",
                        g.name(),
                        self.n_qubits
                    )));
                }
                if used[q] {
                    return Err(Error::InvalidParameter(format!(
                        "qubit {q} appears twice in one moment"
                    )));
                }
                used[q] = true;
                if measured[q] {
                    return Err(Error::Unsupported(format!(
                        "qubit {q} used after its measurement"
                    )));
                }
            }
            if let GateQubits::Two(a, b) = g.qubits() {
                if a == b {
                    return Err(Error::InvalidParameter(format!(
                        "two-qubit gate {} on a single qubit {a}",
                        g.name()
                    )));
                }
            }
            if measuring_started && !g.is_measurement() {
                return Err(Error::Unsupported(
                    "non-measurement gate after measurements; measurements must be terminal".into(),
                ));
            }
        }
        self.moments.push(Moment { gates });
        Ok(())
    }

    fn measured_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n_qubits];
        for q in self.measured_qubits() {
            m[q] = true;
        }
        m
    }

    /// Appends all moments of `other` (same register) after this circuit's.
    pub fn append(&mut self, other: &CliffordCircuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        for m in &other.moments {
            self.push_moment(m.gates.clone())?;
        }
        Ok(())
    }

    /// Places `other` on the qubits `positions` of a `total`-qubit register,
    /// moment by moment.
    pub fn embed(&self, total: usize, positions: &[usize]) -> Result<CliffordCircuit> {
        if positions.len() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: positions.len(),
            });
        }
        let mut out = CliffordCircuit::new(total);
        for m in &self.moments {
            out.push_moment(m.gates.iter().map(|g| g.map_qubits(|q| positions[q])).collect())?;
        }
        Ok(out)
    }

    /// Runs several circuits side by side, merging their `i`-th moments.
    /// The circuits must act on disjoint qubits.
    pub fn parallel(n_qubits: usize, parts: &[CliffordCircuit]) -> Result<CliffordCircuit> {
        let depth = parts.iter().map(|c| c.moments.len()).max().unwrap_or(0);
        let mut out = CliffordCircuit::new(n_qubits);
        for i in 0..depth {
            let mut gates = Vec::new();
            for c in parts {
                if c.n_qubits != n_qubits {
                    return Err(Error::Dimension {
                        expected: n_qubits,
                        found: c.n_qubits,
                    });
                }
                if let Some(m) = c.moments.get(i) {
                    gates.extend_from_slice(&m.gates);
                }
            }
            out.push_moment(gates)?;
        }
        Ok(out)
    }

    /// The first `at` moments and the rest, as two circuits on the same register.
    pub fn split_at(&self, at: usize) -> (CliffordCircuit, CliffordCircuit) {
        let at = at.min(self.moments.len());
        let part = |ms: &[Moment]| CliffordCircuit {
            n_qubits: self.n_qubits,
            moments: ms.to_vec(),
        };
        (part(&self.moments[..at]), part(&self.moments[at..]))
    }

    /// The circuit without its measurement gates.
    pub fn without_measurements(&self) -> CliffordCircuit {
        let mut out = CliffordCircuit::new(self.n_qubits);
        for m in &self.moments {
            let gates: Vec<Gate> = m.gates.iter().filter(|g| !g.is_measurement()).copied().collect();
            if !gates.is_empty() {
                out.moments.push(Moment { gates });
            }
        }
        out
    }

    /// Inverse circuit; `S` becomes `S·Z`. Fails on measurements.
    pub fn inverse(&self) -> Result<CliffordCircuit> {
        let mut b = CircuitBuilder::new(self.n_qubits);
        for m in self.moments.iter().rev() {
            for g in m.gates.iter().rev() {
                match g {
                    Gate::M(_) => {
                        return Err(Error::Unsupported("cannot invert a measurement".into()));
                    }
                    Gate::S(q) => {
                        b.add(Gate::S(*q))?;
                        b.add(Gate::Z(*q))?;
                    }
                    other => b.add(*other)?,
                }
            }
        }
        Ok(b.finish())
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

impl fmt::Display for CliffordCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.n_qubits)?;
        for m in &self.moments {
            let mut tokens: Vec<String> = Vec::new();
            let mut i = 0;
            while i < m.gates.len() {
                match m.gates[i] {
                    Gate::M(_) => {
                        let mut t = String::from("M");
                        while let Some(Gate::M(q)) = m.gates.get(i) {
                            t.push_str(&format!(" q{q}"));
                            i += 1;
                        }
                        tokens.push(t);
                        continue;
                    }
                    g => {
                        let qs = g.qubits().as_slice();
                        let mut t = g.name().to_string();
                        for q in qs {
                            t.push_str(&format!(" q{q}"));
                        }
                        tokens.push(t);
                    }
                }
                i += 1;
            }
            writeln!(f, "{}", tokens.join("; "))?;
        }
        Ok(())
    }
}

fn parse_qubit(tok: &str, line: usize) -> Result<usize> {
    tok.strip_prefix('q')
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("expected qubit like q3, got {tok:?}")))
}

impl FromStr for CliffordCircuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut circuit: Option<CliffordCircuit> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some(c) = circuit.as_mut() else {
                let mut it = line.split_whitespace();
                if it.next() != Some("QUBITS") {
                    return Err(Error::parse(line_no, "expected QUBITS header"));
                }
                let n = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::parse(line_no, "bad qubit count"))?;
                circuit = Some(CliffordCircuit::new(n));
                continue;
            };
            let mut gates = Vec::new();
            for tok in line.split(';') {
                let parts: Vec<&str> = tok.split_whitespace().collect();
                let Some((&name, args)) = parts.split_first() else {
                    continue;
                };
                let qs = args
                    .iter()
                    .map(|a| parse_qubit(a, line_no))
                    .collect::<Result<Vec<_>>>()?;
                let arity = |k: usize| {
                    if qs.len() == k {
                        Ok(())
                    } else {
                        Err(Error::parse(line_no, format!("{name} takes {k} qubit(s)")))
                    }
                };
                match name {
                    "H" | "S" | "X" | "Z" => {
                        arity(1)?;
                        gates.push(match name {
                            "H" => Gate::H(qs[0]),
                            "S" => Gate::S(qs[0]),
                            "X" => Gate::X(qs[0]),
                            _ => Gate::Z(qs[0]),
                        });
                    }
                    "CX" | "CZ" | "SWAP" => {
                        arity(2)?;
                        gates.push(match name {
                            "CX" => Gate::CX(qs[0], qs[1]),
                            "CZ" => Gate::CZ(qs[0], qs[1]),
                            _ => Gate::Swap(qs[0], qs[1]),
                        });
                    }
                    "M" => {
                        if qs.is_empty() {
                            return Err(Error::parse(line_no, "M needs at least one qubit"));
                        }
                        gates.extend(qs.into_iter().map(Gate::M));
                    }
                    other => return Err(Error::parse(line_no, format!("unknown gate {other:?}"))),
                }
            }
            c.push_moment(gates).map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        circuit.ok_or_else(|| Error::parse(0, "missing QUBITS header"))
    }
}

/// Builds circuits gate by gate with as-soon-as-possible moment placement.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n_qubits: usize,
    layers: Vec<Vec<Gate>>,
    frontier: Vec<usize>,
}

impl CircuitBuilder {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            layers: Vec::new(),
            frontier: vec![0; n_qubits],
        }
    }

    /// Places `gate` in the earliest moment after every earlier gate on its qubits.
    pub fn add(&mut self, gate: Gate) -> Result<()> {
        if gate.is_measurement() {
            return Err(Error::Unsupported(
                "measurements are appended with CliffordCircuit::push_moment".into(),
            ));
        }
        let qs = gate.qubits().as_slice();
        for &q in &qs {
            if q >= self.n_qubits {
                return Err(Error::InvalidParameter(format!(
                    "qubit {q} outside register of {}",
                    self.n_qubits
                )));
            }
        }
        if let [a, b] = qs[..] {
            if a == b {
                return Err(Error::InvalidParameter(format!(
                    "two-qubit gate on a single qubit {a}"
                )));
            }
        }
        let slot = qs.iter().map(|&q| self.frontier[q]).max().unwrap_or(0);
        if slot == self.layers.len() {
            self.layers.push(Vec::new());
        }
        self.layers[slot].push(gate);
        for &q in &qs {
            self.frontier[q] = slot + 1;
        }
        Ok(())
    }

    /// Forces all subsequent gates after everything placed so far.
    pub fn barrier(&mut self) {
        let d = self.layers.len();
        self.frontier.iter_mut().for_each(|f| *f = d);
    }

    pub fn finish(self) -> CliffordCircuit {
        CliffordCircuit {
            n_qubits: self.n_qubits,
            moments: self
                .layers
                .into_iter()
                .filter(|l| !l.is_empty())
                .map(|gates| Moment { gates })
                .collect(),
        }
    }
}

impl PauliString {
    /// `p ← G p G†` for a single unitary gate.
    pub fn conjugate_gate(&mut self, gate: &Gate) -> Result<()> {
        let (x, z, neg) = self.parts_mut();
        match *gate {
            Gate::H(q) => {
                let (a, b) = (x.get(q), z.get(q));
                *neg ^= a & b;
                x.set(q, b);
                z.set(q, a);
            }
            Gate::S(q) => {
                let (a, b) = (x.get(q), z.get(q));
                *neg ^= a & b;
                z.set(q, b ^ a);
            }
            Gate::X(q) => *neg ^= z.get(q),
            Gate::Z(q) => *neg ^= x.get(q),
            Gate::CX(c, t) => {
                let (xc, zc, xt, zt) = (x.get(c), z.get(c), x.get(t), z.get(t));
                *neg ^= xc & zt & !(xt ^ zc);
                x.set(t, xt ^ xc);
                z.set(c, zc ^ zt);
            }
            Gate::CZ(a, b) => {
                let (xa, za, xb, zb) = (x.get(a), z.get(a), x.get(b), z.get(b));
                *neg ^= xa & xb & (za ^ zb);
                z.set(a, za ^ xb);
                z.set(b, zb ^ xa);
            }
            Gate::Swap(a, b) => {
                let (xa, za, xb, zb) = (x.get(a), z.get(a), x.get(b), z.get(b));
                x.set(a, xb);
                z.set(a, zb);
                x.set(b, xa);
                z.set(b, za);
            }
            Gate::M(_) => {
                return Err(Error::Unsupported(
                    "cannot conjugate through a measurement".into(),
                ))
            }
        }
        Ok(())
    }

    /// `p ← G† p G`.
    pub fn conjugate_gate_inverse(&mut self, gate: &Gate) -> Result<()> {
        if let Gate::S(q) = *gate {
            let (x, z, neg) = self.parts_mut();
            let (a, b) = (x.get(q), z.get(q));
            *neg ^= a & !b;
            z.set(q, b ^ a);
            return Ok(());
        }
        self.conjugate_gate(gate)
    }
}

/// `c p c†`, gate by gate through the circuit.
pub fn conjugate_by_circuit(p: &PauliString, c: &CliffordCircuit) -> Result<PauliString> {
    if p.n() != c.n_qubits() {
        return Err(Error::Dimension {
            expected: c.n_qubits(),
            found: p.n(),
        });
    }
    let mut out = p.clone();
    for m in c.moments() {
        for g in m.gates() {
            out.conjugate_gate(g)?;
        }
    }
    Ok(out)
}
