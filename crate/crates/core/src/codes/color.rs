use serde::{Deserialize, Serialize};

use super::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Triangular patch of the 6.6.6 (hexagonal) color-code lattice.
///
/// Points `(r, c)` with `0 ≤ c ≤ r ≤ 3(d-1)/2` form a triangle on a triangular
/// lattice whose six neighbours are `(±1, 0)`, `(0, ±1)`, `±(1, 1)`. Points with
/// `(r + c) mod 3 = 1` are face centres; all other points are qubits. A face
/// acts on its in-bounds neighbours, giving hexagons in the bulk and squares on
/// the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorCodeLattice {
    pub distance: usize,
    /// Qubit coordinates, row-major.
    pub vertices: Vec<(usize, usize)>,
    pub faces: Vec<Face>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub center: (usize, usize),
    /// Color in `0..3`.
    pub color: u8,
    /// Qubit indices, ascending.
    pub qubits: Vec<usize>,
}

const NEIGHBOURS: [(isize, isize); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)];

impl ColorCodeLattice {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 || d % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "triangular color code needs odd d >= 3, got {d}"
            )));
        }
        let bound = 3 * (d - 1) / 2;
        let is_face = |r: usize, c: usize| (r + c) % 3 == 1;
        let mut index = std::collections::HashMap::new();
        let mut vertices = Vec::new();
        for r in 0..=bound {
            for c in 0..=r {
                if !is_face(r, c) {
                    index.insert((r, c), vertices.len());
                    vertices.push((r, c));
                }
            }
        }
        let mut faces = Vec::new();
        for r in 0..=bound {
            for c in 0..=r {
                if !is_face(r, c) {
                    continue;
                }
                let mut qubits: Vec<usize> = NEIGHBOURS
                    .iter()
                    .filter_map(|&(dr, dc)| {
                        let (rr, cc) = (r as isize + dr, c as isize + dc);
                        if rr < 0 || cc < 0 {
                            return None;
                        }
                        index.get(&(rr as usize, cc as usize)).copied()
                    })
                    .collect();
                qubits.sort_unstable();
                faces.push(Face {
                    center: (r, c),
                    color: (r % 3) as u8,
                    qubits,
                });
            }
        }
        let lattice = Self {
            distance: d,
            vertices,
            faces,
        };
        lattice.check()?;
        Ok(lattice)
    }

    fn check(&self) -> Result<()> {
        let d = self.distance;
        let n = self.vertices.len();
        if n != (3 * d * d + 1) / 4 {
            return Err(Error::Internal(format!("vertex count {n} for d = {d}")));
        }
        if self.faces.len() != (n - 1) / 2 {
            return Err(Error::Internal(format!("face count {}", self.faces.len())));
        }
        for f in &self.faces {
            if f.qubits.len() != 4 && f.qubits.len() != 6 {
                return Err(Error::Internal(format!(
                    "face at {:?} has {} vertices",
                    f.center,
                    f.qubits.len()
                )));
            }
        }
        for (i, a) in self.faces.iter().enumerate() {
            for b in &self.faces[i + 1..] {
                let shared = a.qubits.iter().filter(|q| b.qubits.contains(q)).count();
                if shared >= 2 && a.color == b.color {
                    return Err(Error::Internal(format!(
                        "adjacent faces {:?} and {:?} share a color",
                        a.center, b.center
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// Qubits on the `c = 0` side of the triangle; `d` of them.
    pub fn boundary(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, &(_, c))| c == 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// X-type generators for every face (row-major by centre), then Z-type.
    pub fn code(&self) -> StabilizerCode {
        let n = self.n();
        let xs = self
            .faces
            .iter()
            .map(|f| PauliString::x_type(n, f.qubits.iter().copied()));
        let zs = self
            .faces
            .iter()
            .map(|f| PauliString::z_type(n, f.qubits.iter().copied()));
        let boundary = self.boundary();
        StabilizerCode {
            n,
            k: 1,
            d: self.distance,
            generators: xs.chain(zs).collect(),
            logical_x: vec![PauliString::x_type(n, boundary.iter().copied())],
            logical_z: vec![PauliString::z_type(n, boundary.iter().copied())],
            is_css: true,
        }
    }
}
