use super::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Default cap on the number of generators expanded (`2^r` terms).
pub const DEFAULT_PROJECTOR_CAP: usize = 24;

/// `Π = 2^{-r} Σ_{S ∈ 𝒮} S`, one signed Pauli per stabilizer-group element.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorExpansion {
    pub n: usize,
    pub coefficient: f64,
    pub terms: Vec<PauliString>,
}

impl ProjectorExpansion {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(coefficient, Pauli)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &PauliString)> {
        self.terms.iter().map(move |t| (self.coefficient, t))
    }

    /// The sub-projector over diagonal (Z-type) group elements only. This is the
    /// part of `Π` that a computational-basis measurement can resolve.
    pub fn diagonal_part(&self) -> ProjectorExpansion {
        let terms: Vec<PauliString> = self.terms.iter().filter(|t| t.is_z_type()).cloned().collect();
        ProjectorExpansion {
            n: self.n,
            coefficient: 1.0 / terms.len() as f64,
            terms,
        }
    }
}

/// Expands the product of `(I + S_i)/2` over the generators into `2^r` terms.
pub fn projector_terms(c: &StabilizerCode, cap: usize) -> Result<ProjectorExpansion> {
    expand(c.n, &c.generators, cap)
}

pub(crate) fn expand(n: usize, generators: &[PauliString], cap: usize) -> Result<ProjectorExpansion> {
    let r = generators.len();
    if r > cap {
        return Err(Error::Capacity(format!(
            "projector with {r} generators has 2^{r} terms; cap is 2^{cap}"
        )));
    }
    let mut terms = Vec::with_capacity(1 << r);
    let mut cur = PauliString::identity(n);
    terms.push(cur.clone());
    // Gray code: consecutive subsets differ in one generator
    for i in 1u64..(1u64 << r) {
        let flip = i.trailing_zeros() as usize;
        cur = cur.mul(&generators[flip])?;
        terms.push(cur.clone());
    }
    Ok(ProjectorExpansion {
        n,
        coefficient: 1.0 / (1u64 << r) as f64,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn repetition_three_terms() {
        let c = StabilizerCode::repetition(3).unwrap();
        let pe = projector_terms(&c, DEFAULT_PROJECTOR_CAP).unwrap();
        let got: HashSet<String> = pe.terms.iter().map(|t| t.to_string()).collect();
        let want: HashSet<String> = ["+___", "+ZZ_", "+_ZZ", "+Z_Z"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, want);
        assert_eq!(pe.coefficient, 0.25);
    }

    #[test]
    fn group_is_closed_and_identity_unique() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        let pe = projector_terms(&c, DEFAULT_PROJECTOR_CAP).unwrap();
        assert_eq!(pe.len(), 64);
        assert_eq!(pe.terms.iter().filter(|t| t.is_identity()).count(), 1);
        let set: HashSet<PauliString> = pe.terms.iter().cloned().collect();
        assert_eq!(set.len(), 64);
        for a in pe.terms.iter().step_by(7) {
            for b in pe.terms.iter().step_by(5) {
                assert!(set.contains(&a.mul(b).unwrap()));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        assert!(matches!(projector_terms(&c, 5), Err(Error::Capacity(_))));
    }

    #[test]
    fn diagonal_part_keeps_z_subgroup() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        let pe = projector_terms(&c, DEFAULT_PROJECTOR_CAP).unwrap().diagonal_part();
        assert_eq!(pe.len(), 8);
        assert_eq!(pe.coefficient, 0.125);
    }
}
