use std::collections::{BTreeSet, HashSet};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::StabilizerCode;
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::gf2::solve_affine;

/// Default qubit cap for dense codeword enumeration.
pub const DEFAULT_GENERAL_CAP: usize = 24;

/// Largest CSS output set materialized, as a power of two.
const CSS_OUTPUT_LOG2_CAP: usize = 26;

const AMPLITUDE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationPath {
    /// Project a random dense state with `S + I` for every generator and read
    /// off its support. Works for any stabilizer code up to `cap` qubits.
    General { cap: usize, seed: u64 },
    /// Solve the Z-type parity checks of a CSS code and list the affine space.
    Css,
}

impl Default for EnumerationPath {
    fn default() -> Self {
        EnumerationPath::General {
            cap: DEFAULT_GENERAL_CAP,
            seed: 0x5eed,
        }
    }
}

/// Computational-basis strings with non-zero amplitude in the codespace.
pub fn enumerate_codewords(c: &StabilizerCode, path: EnumerationPath) -> Result<BTreeSet<Bits>> {
    match path {
        EnumerationPath::General { cap, seed } => enumerate_general(c, cap, seed),
        EnumerationPath::Css => enumerate_css(c),
    }
}

fn enumerate_general(c: &StabilizerCode, cap: usize, seed: u64) -> Result<BTreeSet<Bits>> {
    let n = c.n;
    if n > cap || n >= 64 {
        return Err(Error::Capacity(format!(
            "dense codeword enumeration on {n} qubits exceeds the cap of {cap}; use the CSS path"
        )));
    }
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi: Vec<Complex64> = (0..dim)
        .map(|_| {
            Complex64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for g in &c.generators {
        let x = g.x_bits().low_u64() as usize;
        let z = g.z_bits().low_u64() as usize;
        let ys = (x & z).count_ones();
        let base = i_power(ys) * if g.is_negative() { -1.0 } else { 1.0 };
        next.copy_from_slice(&psi);
        for (j, amp) in psi.iter().enumerate() {
            let sign = if (j & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            next[j ^ x] += base * sign * amp;
        }
        std::mem::swap(&mut psi, &mut next);
        // keep magnitudes near unit scale
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            psi.iter_mut().for_each(|a| *a /= norm);
        }
    }
    Ok(psi
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > AMPLITUDE_FLOOR)
        .map(|(j, _)| Bits::from_u64(n, j as u64))
        .collect())
}

fn i_power(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Z-type checks of a CSS code as `(support, required parity)` pairs.
fn css_checks(c: &StabilizerCode) -> Result<Vec<(Bits, bool)>> {
    if !c.generators_are_css() {
        return Err(Error::Unsupported(
            "CSS enumeration needs purely X- or Z-type generators".into(),
        ));
    }
    Ok(c.z_type_generators()
        .map(|g| (g.z_bits().clone(), g.is_negative()))
        .collect())
}

fn enumerate_css(c: &StabilizerCode) -> Result<BTreeSet<Bits>> {
    let checks = css_checks(c)?;
    let h: Vec<Bits> = checks.iter().map(|(b, _)| b.clone()).collect();
    let s: Vec<bool> = checks.iter().map(|(_, p)| *p).collect();
    let (base, kernel) = solve_affine(&h, &s, c.n)
        .ok_or_else(|| Error::Internal("Z-type generators have inconsistent signs".into()))?;
    if kernel.len() > CSS_OUTPUT_LOG2_CAP {
        return Err(Error::Capacity(format!(
            "codeword set has 2^{} elements",
            kernel.len()
        )));
    }
    let mut out = BTreeSet::new();
    let mut cur = base;
    out.insert(cur.clone());
    // Gray-code walk over the kernel
    for i in 1u64..(1u64 << kernel.len()) {
        let flip = i.trailing_zeros() as usize;
        cur.xor_assign(&kernel[flip]);
        out.insert(cur.clone());
    }
    Ok(out)
}

/// Membership oracle for codewords: an explicit set, or parity checks when the
/// code is CSS (the set can then be far too large to list).
#[derive(Debug, Clone)]
pub enum CodewordSet {
    Explicit(HashSet<Bits>),
    ParityChecks { len: usize, checks: Vec<(Bits, bool)> },
}

impl CodewordSet {
    /// Parity checks for CSS codes, dense enumeration otherwise.
    pub fn for_code(c: &StabilizerCode) -> Result<Self> {
        if c.generators_are_css() {
            Ok(CodewordSet::ParityChecks {
                len: c.n,
                checks: css_checks(c)?,
            })
        } else {
            let set = enumerate_codewords(c, EnumerationPath::default())?;
            Ok(CodewordSet::Explicit(set.into_iter().collect()))
        }
    }

    pub fn from_strings(strings: impl IntoIterator<Item = Bits>) -> Self {
        CodewordSet::Explicit(strings.into_iter().collect())
    }

    pub fn contains(&self, bits: &Bits) -> bool {
        match self {
            CodewordSet::Explicit(set) => set.contains(bits),
            CodewordSet::ParityChecks { len, checks } => {
                bits.len() == *len && checks.iter().all(|(h, p)| h.dot(bits) == *p)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            CodewordSet::Explicit(set) => set.is_empty(),
            CodewordSet::ParityChecks { len, checks } => {
                let h: Vec<Bits> = checks.iter().map(|(b, _)| b.clone()).collect();
                let s: Vec<bool> = checks.iter().map(|(_, p)| *p).collect();
                solve_affine(&h, &s, *len).is_none()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(set: &BTreeSet<Bits>) -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|b| b.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn repetition_three_codewords() {
        let c = StabilizerCode::repetition(3).unwrap();
        let set = enumerate_codewords(&c, EnumerationPath::default()).unwrap();
        assert_eq!(strings(&set), vec!["000", "111"]);
    }

    #[test]
    fn steane_has_sixteen_codewords() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        let general = enumerate_codewords(&c, EnumerationPath::default()).unwrap();
        let css = enumerate_codewords(&c, EnumerationPath::Css).unwrap();
        assert_eq!(general.len(), 16);
        assert_eq!(general, css);
    }

    #[test]
    fn general_path_respects_cap() {
        let c = StabilizerCode::triangular_color(5).unwrap();
        let path = EnumerationPath::General { cap: 10, seed: 1 };
        assert!(matches!(
            enumerate_codewords(&c, path),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn signed_checks_shift_the_coset() {
        let mut c = StabilizerCode::repetition(3).unwrap();
        c.generators[0] = c.generators[0].clone().negated();
        let css = enumerate_codewords(&c, EnumerationPath::Css).unwrap();
        let general = enumerate_codewords(&c, EnumerationPath::default()).unwrap();
        assert_eq!(strings(&css), vec!["011", "100"]);
        assert_eq!(css, general);
    }

    #[test]
    fn parity_oracle_matches_enumeration() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        let oracle = CodewordSet::for_code(&c).unwrap();
        let set = enumerate_codewords(&c, EnumerationPath::Css).unwrap();
        for j in 0..128u64 {
            let b = Bits::from_u64(7, j);
            assert_eq!(oracle.contains(&b), set.contains(&b));
        }
    }
}
