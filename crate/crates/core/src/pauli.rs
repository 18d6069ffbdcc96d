//! Hermitian Pauli strings with a `±1` sign and bit-packed X/Z parts.
//!
//! Encoding per qubit: `(x, z) = (0,0) I, (1,0) X, (1,1) Y, (0,1) Z`, with `Y`
//! meaning the Hermitian Pauli Y (not `XZ`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => '_',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A power of `i`: the phase `i^k` for `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

/// An `n`-qubit Hermitian Pauli operator `±P_0 ⊗ … ⊗ P_{n-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x: Bits,
    z: Bits,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            x: Bits::zeros(n),
            z: Bits::zeros(n),
            negative: false,
        }
    }

    pub fn from_parts(x: Bits, z: Bits, negative: bool) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self { x, z, negative })
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut out = Self::identity(n);
        out.set(qubit, p);
        out
    }

    /// `∏ X_i` over `support`.
    pub fn x_type(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Self {
            x: Bits::from_indices(n, support),
            z: Bits::zeros(n),
            negative: false,
        }
    }

    /// `∏ Z_i` over `support`.
    pub fn z_type(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Self {
            x: Bits::zeros(n),
            z: Bits::from_indices(n, support),
            negative: false,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Bits, &mut Bits, &mut bool) {
        (&mut self.x, &mut self.z, &mut self.negative)
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// True for `±I`.
    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_x_type(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }

    /// Qubits on which the operator acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&q| self.x.get(q) || self.z.get(q))
            .collect()
    }

    /// Same Pauli letters, ignoring sign.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.x == other.x && self.z == other.z
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }

    /// Whether `self` and `other` commute (symplectic form vanishes).
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let mut acc = 0u32;
        let (ax, az, bx, bz) = (
            self.x.words(),
            self.z.words(),
            other.x.words(),
            other.z.words(),
        );
        for i in 0..ax.len() {
            acc ^= ((ax[i] & bz[i]) ^ (az[i] & bx[i])).count_ones();
        }
        acc & 1 == 0
    }

    /// The product `self · other` as `i^k · Q` with `Q` a Hermitian Pauli carrying
    /// the sign of the real part.
    pub fn mul_phased(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        self.check_len(other)?;
        Ok(self.mul_phased_unchecked(other))
    }

    pub(crate) fn mul_phased_unchecked(&self, other: &PauliString) -> (Phase, PauliString) {
        let mut out = self.clone();
        let k = out.mul_assign_exponent(other);
        (Phase::from_exponent(k), out)
    }

    /// In-place `self ← self · other`; returns the exponent of the residual `i^k`
    /// factor after folding signs into `self` (either 0 or 1 modulo 2 for `k`).
    fn mul_assign_exponent(&mut self, other: &PauliString) -> i64 {
        let mut plus = 0i64;
        let mut minus = 0i64;
        {
            let (x1, z1) = (self.x.words(), self.z.words());
            let (x2, z2) = (other.x.words(), other.z.words());
            for w in 0..x1.len() {
                let (a, b, c, d) = (x1[w], z1[w], x2[w], z2[w]);
                let px = a & !b;
                let py = a & b;
                let pz = !a & b;
                let qx = c & !d;
                let qy = c & d;
                let qz = !c & d;
                // XY = iZ, YZ = iX, ZX = iY; reversed orders give -i.
                plus += ((px & qy) | (py & qz) | (pz & qx)).count_ones() as i64;
                minus += ((px & qz) | (py & qx) | (pz & qy)).count_ones() as i64;
            }
        }
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        let mut k = (plus - minus).rem_euclid(4);
        if other.negative {
            k += 2;
        }
        if self.negative {
            k += 2;
        }
        k %= 4;
        self.negative = k >= 2;
        k % 2
    }

    /// Hermitian product; an imaginary overall phase is a contract violation.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        let (phase, p) = self.mul_phased(other)?;
        if !phase.is_real() {
            return Err(Error::Contract(format!(
                "product {self} · {other} carries an imaginary phase"
            )));
        }
        Ok(if phase == Phase::MINUS_ONE {
            p.negated()
        } else {
            p
        })
    }

    /// In-place product for operators known to commute.
    pub(crate) fn mul_assign_commuting(&mut self, other: &PauliString) {
        let k = self.mul_assign_exponent(other);
        debug_assert_eq!(k, 0, "anticommuting product");
    }

    /// In-place product keeping only the real part's sign when the product is
    /// not Hermitian. Used for row reduction of arbitrary check matrices.
    pub(crate) fn mul_assign_fold(&mut self, other: &PauliString) {
        let k = self.mul_assign_exponent(other);
        // i^1·Q folds to +Q, i^3·Q = -i·Q folds to -Q; negative already flipped.
        let _ = k;
    }

    /// Symplectic row `[x | z]` of length `2n`.
    pub fn symplectic(&self) -> Bits {
        self.x.concat(&self.z)
    }

    pub fn from_symplectic(row: &Bits, negative: bool) -> Result<Self> {
        if row.len() % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "symplectic row has odd length {}",
                row.len()
            )));
        }
        let n = row.len() / 2;
        Ok(Self {
            x: row.slice(0, n),
            z: row.slice(n, n),
            negative,
        })
    }

    /// Embeds into a larger register at the given positions.
    pub fn embed(&self, total: usize, positions: &[usize]) -> Result<PauliString> {
        if positions.len() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: positions.len(),
            });
        }
        let mut out = PauliString::identity(total);
        for (q, &pos) in positions.iter().enumerate() {
            out.set(pos, self.get(q));
        }
        out.negative = self.negative;
        Ok(out)
    }

    /// Reads the letters at `positions` into a new, smaller Pauli with the same sign.
    pub fn restrict(&self, positions: &[usize]) -> PauliString {
        let mut out = PauliString::identity(positions.len());
        for (q, &pos) in positions.iter().enumerate() {
            out.set(q, self.get(pos));
        }
        out.negative = self.negative;
        out
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        PauliString {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            negative: self.negative ^ other.negative,
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.n() + 1);
        s.push(if self.negative { '-' } else { '+' });
        for q in 0..self.n() {
            s.push(self.get(q).symbol());
        }
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Literal form `+XZ_Y`, sign optional; `_` and `I` both mean identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        if body.is_empty() {
            return Err(Error::parse(0, "empty Pauli literal"));
        }
        let mut p = PauliString::identity(body.len());
        for (q, c) in body.chars().enumerate() {
            let letter = match c {
                '_' | 'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::parse(0, format!("bad Pauli letter {other:?}")));
                }
            };
            p.set(q, letter);
        }
        p.negative = negative;
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Top-level helper mirroring the method form.
pub fn pauli_commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.commutes(b)
}

/// Hermitian product of two Paulis; see [`PauliString::mul`].
pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_and_z_anticommute() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
    }

    #[test]
    fn overlapping_zz_and_xxx_commute() {
        assert!(p("ZZ_").commutes(&p("XXX")).unwrap());
    }

    #[test]
    fn repetition_logicals_anticommute() {
        assert!(!p("Z__").commutes(&p("XXX")).unwrap());
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        assert!(matches!(
            p("XX").commutes(&p("XXX")),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(p("XX").mul(&p("X")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn x_squared_is_identity() {
        let r = p("X").mul(&p("X")).unwrap();
        assert!(r.is_identity());
        assert_eq!(r.sign(), 1);
    }

    #[test]
    fn zz_times_zz_overlap() {
        assert_eq!(p("ZZ_").mul(&p("_ZZ")).unwrap(), p("Z_Z"));
    }

    #[test]
    fn xxx_times_zzz_is_imaginary() {
        let (phase, q) = p("XXX").mul_phased(&p("ZZZ")).unwrap();
        // XZ = -iY on each site, (-i)^3 = i.
        assert_eq!(phase, Phase::I);
        assert_eq!(q, p("+YYY"));
        assert!(matches!(p("XXX").mul(&p("ZZZ")), Err(Error::Contract(_))));
    }

    #[test]
    fn signs_multiply() {
        assert_eq!(p("-XZ").mul(&p("-ZX")).unwrap(), p("+YY"));
        assert_eq!(p("-X_").mul(&p("+_Z")).unwrap(), p("-XZ"));
    }

    #[test]
    fn weight_counts_non_identity_sites() {
        assert_eq!(p("X_YZ_").weight(), 3);
        assert_eq!(p("-_____").weight(), 0);
    }

    #[test]
    fn literal_round_trip() {
        for s in ["+XZ_Y", "-____", "+Z"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("XIZ").to_string(), "+X_Z");
        assert!("+XQ".parse::<PauliString>().is_err());
    }
}
