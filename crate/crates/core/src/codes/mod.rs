//! Stabilizer codes: construction, validation, distance search, codeword
//! enumeration, projector expansion and the text serialization format.

mod codewords;
mod color;
mod distance;
mod projector;
mod text;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::gf2::{rref_gf2, CheckMatrix, XorBasis};
use crate::pauli::{Pauli, PauliString};

pub use codewords::{enumerate_codewords, CodewordSet, EnumerationPath, DEFAULT_GENERAL_CAP};
pub use color::ColorCodeLattice;
pub use distance::{
    code_distance_bruteforce, code_distance_for, Distance, ErrorClass, DEFAULT_DISTANCE_BUDGET,
};
pub use projector::{projector_terms, ProjectorExpansion, DEFAULT_PROJECTOR_CAP};

/// An `[[n, k, d]]` stabilizer code with `r = n - k` generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub n: usize,
    pub k: usize,
    /// Claimed distance.
    pub d: usize,
    pub generators: Vec<PauliString>,
    pub logical_x: Vec<PauliString>,
    pub logical_z: Vec<PauliString>,
    pub is_css: bool,
}

impl StabilizerCode {
    /// Number of generators.
    pub fn r(&self) -> usize {
        self.generators.len()
    }

    /// The `[[n, 1, n]]` bit-flip repetition code with `Z̄ = Z_1`, `X̄ = X_1⋯X_n`.
    pub fn repetition(n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "repetition code needs odd n >= 3, got {n}"
            )));
        }
        Ok(Self {
            n,
            k: 1,
            d: n,
            generators: (0..n - 1).map(|i| PauliString::z_type(n, [i, i + 1])).collect(),
            logical_x: vec![PauliString::x_type(n, 0..n)],
            logical_z: vec![PauliString::z_type(n, [0])],
            is_css: true,
        })
    }

    /// The distance-`d` triangular 6.6.6 color code on `(3d² + 1)/4` qubits.
    pub fn triangular_color(d: usize) -> Result<Self> {
        let lattice = ColorCodeLattice::new(d)?;
        Ok(lattice.code())
    }

    /// `n` unencoded qubits: no generators, `X̄_i = X_i`, `Z̄_i = Z_i`.
    pub fn unencoded(n: usize) -> Self {
        Self {
            n,
            k: n,
            d: 1,
            generators: Vec::new(),
            logical_x: (0..n).map(|q| PauliString::single(n, q, Pauli::X)).collect(),
            logical_z: (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect(),
            is_css: true,
        }
    }

    /// Independent blocks side by side: `self ⊗ other`.
    pub fn tensor(&self, other: &StabilizerCode) -> StabilizerCode {
        let (a, b) = (self.n, other.n);
        let left = |p: &PauliString| p.tensor(&PauliString::identity(b));
        let right = |p: &PauliString| PauliString::identity(a).tensor(p);
        StabilizerCode {
            n: a + b,
            k: self.k + other.k,
            d: self.d.min(other.d),
            generators: self
                .generators
                .iter()
                .map(left)
                .chain(other.generators.iter().map(right))
                .collect(),
            logical_x: self
                .logical_x
                .iter()
                .map(left)
                .chain(other.logical_x.iter().map(right))
                .collect(),
            logical_z: self
                .logical_z
                .iter()
                .map(left)
                .chain(other.logical_z.iter().map(right))
                .collect(),
            is_css: self.is_css && other.is_css,
        }
    }

    /// `count` copies of this code side by side.
    pub fn blocks(&self, count: usize) -> StabilizerCode {
        let mut out = self.clone();
        for _ in 1..count {
            out = out.tensor(self);
        }
        out
    }

    pub fn check_matrix(&self) -> CheckMatrix {
        CheckMatrix::new(self.n, self.generators.clone()).expect("generator lengths checked")
    }

    pub fn x_type_generators(&self) -> impl Iterator<Item = &PauliString> {
        self.generators
            .iter()
            .filter(|g| g.is_x_type() && !g.is_identity())
    }

    pub fn z_type_generators(&self) -> impl Iterator<Item = &PauliString> {
        self.generators
            .iter()
            .filter(|g| g.is_z_type() && !g.is_identity())
    }

    /// Whether every generator is purely X-type or purely Z-type.
    pub fn generators_are_css(&self) -> bool {
        self.generators.iter().all(|g| g.is_x_type() || g.is_z_type())
    }

    /// Whether `p` (ignoring sign) lies in the stabilizer group.
    pub fn in_stabilizer_group(&self, p: &PauliString) -> bool {
        let mut basis = XorBasis::new();
        for g in &self.generators {
            basis.insert(g.symplectic());
        }
        basis.contains(&p.symplectic())
    }

    /// Signed membership: returns `Some(true)` if `+p` is in the group,
    /// `Some(false)` if `-p` is, `None` if neither.
    pub fn group_sign_of(&self, p: &PauliString) -> Option<bool> {
        // Row-reduce the generators and peel `p` down to the identity.
        let rr = rref_gf2(&self.check_matrix());
        let n = self.n;
        let mut acc = PauliString::identity(n);
        let mut rest = p.symplectic();
        for (row, &col) in rr.reduced.rows().iter().zip(&rr.pivot_columns) {
            if rest.get(col) {
                rest.xor_assign(&row.symplectic());
                acc = acc.mul(row).ok()?;
            }
        }
        if !rest.is_zero() {
            return None;
        }
        Some(acc.is_negative() == p.is_negative())
    }

    /// Whether transversal H maps the stabilizer group to itself and swaps X̄ and Z̄.
    pub fn is_self_dual_css(&self) -> bool {
        if !self.is_css || !self.generators_are_css() {
            return false;
        }
        let xs: std::collections::BTreeSet<Bits> =
            self.x_type_generators().map(|g| g.x_bits().clone()).collect();
        let zs: std::collections::BTreeSet<Bits> =
            self.z_type_generators().map(|g| g.z_bits().clone()).collect();
        if rank_of_set(&xs) != rank_of_set(&zs) {
            return false;
        }
        let mut basis = XorBasis::new();
        for v in &xs {
            basis.insert(v.clone());
        }
        zs.iter().all(|v| basis.contains(v))
            && self
                .logical_x
                .iter()
                .zip(&self.logical_z)
                .all(|(lx, lz)| lx.is_x_type() && lz.is_z_type() && lx.x_bits() == lz.z_bits())
    }
}

fn rank_of_set(s: &std::collections::BTreeSet<Bits>) -> usize {
    let v: Vec<Bits> = s.iter().cloned().collect();
    crate::gf2::rank_of(&v)
}

/// One failed invariant found by [`validate_code`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ValidationFailure {
    LengthMismatch { what: String, found: usize },
    GeneratorCount { r: usize, expected: usize },
    GeneratorsAnticommute { i: usize, j: usize },
    RankDeficient { rank: usize, expected: usize },
    LogicalCount { x: usize, z: usize, k: usize },
    LogicalPairCommutes { i: usize },
    LogicalCrossAnticommute { x: usize, z: usize },
    LogicalsAnticommuteWithin { kind: String, i: usize, j: usize },
    LogicalAnticommutesGenerator { logical: String, generator: usize },
    LogicalInStabilizerGroup { logical: String },
    CssFlag { claimed: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
    pub rank: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every structural invariant of a stabilizer code. Failures are
/// collected rather than returned as errors.
pub fn validate_code(c: &StabilizerCode) -> ValidationReport {
    let mut failures = Vec::new();
    let all = c
        .generators
        .iter()
        .map(|g| ("generator", g))
        .chain(c.logical_x.iter().map(|g| ("logical_x", g)))
        .chain(c.logical_z.iter().map(|g| ("logical_z", g)));
    let mut bad_len = false;
    for (what, p) in all {
        if p.n() != c.n {
            failures.push(ValidationFailure::LengthMismatch {
                what: what.into(),
                found: p.n(),
            });
            bad_len = true;
        }
    }
    if bad_len {
        return ValidationReport { failures, rank: 0 };
    }
    if c.k > c.n || c.r() != c.n - c.k {
        failures.push(ValidationFailure::GeneratorCount {
            r: c.r(),
            expected: c.n.saturating_sub(c.k),
        });
    }
    for i in 0..c.r() {
        for j in i + 1..c.r() {
            if !c.generators[i].commutes_unchecked(&c.generators[j]) {
                failures.push(ValidationFailure::GeneratorsAnticommute { i, j });
            }
        }
    }
    let rank = rref_gf2(&c.check_matrix()).rank;
    if rank != c.r() {
        failures.push(ValidationFailure::RankDeficient {
            rank,
            expected: c.r(),
        });
    }
    if c.logical_x.len() != c.k || c.logical_z.len() != c.k {
        failures.push(ValidationFailure::LogicalCount {
            x: c.logical_x.len(),
            z: c.logical_z.len(),
            k: c.k,
        });
    }
    for (i, lx) in c.logical_x.iter().enumerate() {
        for (j, lz) in c.logical_z.iter().enumerate() {
            let comm = lx.commutes_unchecked(lz);
            if i == j && comm {
                failures.push(ValidationFailure::LogicalPairCommutes { i });
            } else if i != j && !comm {
                failures.push(ValidationFailure::LogicalCrossAnticommute { x: i, z: j });
            }
        }
    }
    for (kind, ops) in [("X", &c.logical_x), ("Z", &c.logical_z)] {
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                if !ops[i].commutes_unchecked(&ops[j]) {
                    failures.push(ValidationFailure::LogicalsAnticommuteWithin {
                        kind: kind.into(),
                        i,
                        j,
                    });
                }
            }
        }
    }
    for (name, ops) in [("X", &c.logical_x), ("Z", &c.logical_z)] {
        for (li, l) in ops.iter().enumerate() {
            for (gi, g) in c.generators.iter().enumerate() {
                if !l.commutes_unchecked(g) {
                    failures.push(ValidationFailure::LogicalAnticommutesGenerator {
                        logical: format!("{name}{li}"),
                        generator: gi,
                    });
                }
            }
            if c.in_stabilizer_group(l) {
                failures.push(ValidationFailure::LogicalInStabilizerGroup {
                    logical: format!("{name}{li}"),
                });
            }
        }
    }
    if c.is_css && !c.generators_are_css() {
        failures.push(ValidationFailure::CssFlag { claimed: c.is_css });
    }
    ValidationReport { failures, rank }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn repetition_three_matches_definition() {
        let c = StabilizerCode::repetition(3).unwrap();
        assert_eq!(c.generators, vec![p("ZZ_"), p("_ZZ")]);
        assert_eq!(c.logical_z, vec![p("Z__")]);
        assert_eq!(c.logical_x, vec![p("XXX")]);
        assert!(c.is_css);
    }

    #[test]
    fn repetition_rejects_even_or_small() {
        for n in [0, 1, 2, 4, 6] {
            assert!(matches!(
                StabilizerCode::repetition(n),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn repetition_five_validates() {
        let c = StabilizerCode::repetition(5).unwrap();
        assert_eq!(c.r(), 4);
        assert!(validate_code(&c).is_valid());
    }

    #[test]
    fn anticommuting_generators_are_reported() {
        let c = StabilizerCode {
            n: 1,
            k: 0,
            d: 1,
            generators: vec![p("X"), p("Z")],
            logical_x: vec![],
            logical_z: vec![],
            is_css: true,
        };
        let report = validate_code(&c);
        assert!(report
            .failures
            .contains(&ValidationFailure::GeneratorsAnticommute { i: 0, j: 1 }));
    }

    #[test]
    fn group_sign_detects_products() {
        let c = StabilizerCode::repetition(3).unwrap();
        assert_eq!(c.group_sign_of(&p("Z_Z")), Some(true));
        assert_eq!(c.group_sign_of(&p("-Z_Z")), Some(false));
        assert_eq!(c.group_sign_of(&p("Z__")), None);
    }

    #[test]
    fn tensor_offsets_second_block() {
        let c = StabilizerCode::repetition(3).unwrap().blocks(2);
        assert_eq!(c.n, 6);
        assert_eq!(c.k, 2);
        assert_eq!(c.logical_z[1], p("___Z__"));
        assert!(validate_code(&c).is_valid());
    }
}
