use serde::Serialize;

use super::StabilizerCode;
use crate::bits::word_count;
use crate::error::{Error, Result};
use crate::gf2::XorBasis;
use crate::pauli::{Pauli, PauliString};

/// Default cap on the number of candidate Paulis examined.
pub const DEFAULT_DISTANCE_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Distance {
    Exact(usize),
    /// No logical operator of weight `≤ max_weight` exists.
    GreaterThan(usize),
}

/// Which Pauli letters the search may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ErrorClass {
    Any,
    /// Bit flips only.
    XOnly,
    /// Phase flips only.
    ZOnly,
}

const LETTERS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

struct Search<'a> {
    code: &'a StabilizerCode,
    words: usize,
    // syndrome of letter `l` on qubit `q` at index 3q + l
    table: Vec<Vec<u64>>,
    group: XorBasis,
}

impl<'a> Search<'a> {
    fn new(code: &'a StabilizerCode) -> Self {
        let r = code.r();
        let words = word_count(r.max(1));
        let mut table = Vec::with_capacity(3 * code.n);
        for q in 0..code.n {
            for l in LETTERS {
                let p = PauliString::single(code.n, q, l);
                let mut s = vec![0u64; words];
                for (i, g) in code.generators.iter().enumerate() {
                    if !p.commutes_unchecked(g) {
                        s[i / 64] |= 1 << (i % 64);
                    }
                }
                table.push(s);
            }
        }
        let mut group = XorBasis::new();
        for g in &code.generators {
            group.insert(g.symplectic());
        }
        Self {
            code,
            words,
            table,
            group,
        }
    }

    fn is_logical(&self, support: &[usize], letters: &[usize], scratch: &mut [u64]) -> bool {
        scratch.iter_mut().for_each(|w| *w = 0);
        for (&q, &l) in support.iter().zip(letters) {
            for (s, t) in scratch.iter_mut().zip(&self.table[3 * q + l]) {
                *s ^= t;
            }
        }
        if scratch.iter().any(|&w| w != 0) {
            return false;
        }
        let mut p = PauliString::identity(self.code.n);
        for (&q, &l) in support.iter().zip(letters) {
            p.set(q, LETTERS[l]);
        }
        !self.group.contains(&p.symplectic())
    }

    fn any_logical_at(&self, w: usize, class: ErrorClass) -> bool {
        let n = self.code.n;
        let mut scratch = vec![0u64; self.words];
        let mut letters = vec![0usize; w];
        // pure X, pure Z, then mixed
        let passes: &[Option<usize>] = match class {
            ErrorClass::Any => &[Some(0), Some(2), None],
            ErrorClass::XOnly => &[Some(0)],
            ErrorClass::ZOnly => &[Some(2)],
        };
        for &pure in passes {
            let mut support: Vec<usize> = (0..w).collect();
            loop {
                match pure {
                    Some(l) => {
                        letters.iter_mut().for_each(|x| *x = l);
                        if self.is_logical(&support, &letters, &mut scratch) {
                            return true;
                        }
                    }
                    None => {
                        let total = 3usize.pow(w as u32);
                        for code in 0..total {
                            let mut c = code;
                            for slot in letters.iter_mut() {
                                *slot = c % 3;
                                c /= 3;
                            }
                            if letters.iter().all(|&l| l == 0) || letters.iter().all(|&l| l == 2) {
                                continue;
                            }
                            if self.is_logical(&support, &letters, &mut scratch) {
                                return true;
                            }
                        }
                    }
                }
                if !next_combination(&mut support, n) {
                    break;
                }
            }
        }
        false
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}

/// Minimum weight of a Pauli that commutes with every generator but lies
/// outside the stabilizer group, searched exhaustively up to `max_weight`.
pub fn code_distance_bruteforce(
    c: &StabilizerCode,
    max_weight: usize,
    budget: u64,
) -> Result<Distance> {
    code_distance_for(c, ErrorClass::Any, max_weight, budget)
}

/// Distance against one class of errors.
pub fn code_distance_for(
    c: &StabilizerCode,
    class: ErrorClass,
    max_weight: usize,
    budget: u64,
) -> Result<Distance> {
    if c.k == 0 {
        return Err(Error::InvalidParameter("code encodes no logical qubits".into()));
    }
    let search = Search::new(c);
    let mut spent = 0u64;
    for w in 1..=max_weight.min(c.n) {
        let letters = if class == ErrorClass::Any { 3u64 } else { 1 };
        let cost = binomial(c.n, w).saturating_mul(letters.saturating_pow(w as u32));
        spent = spent.saturating_add(cost);
        if spent > budget {
            return Err(Error::Budget(format!(
                "weight {w} needs {spent} candidates in total, budget is {budget}"
            )));
        }
        if search.any_logical_at(w, class) {
            return Ok(Distance::Exact(w));
        }
    }
    Ok(Distance::GreaterThan(max_weight))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_code_has_weight_one_logical() {
        let c = StabilizerCode::repetition(3).unwrap();
        assert_eq!(
            code_distance_bruteforce(&c, 3, DEFAULT_DISTANCE_BUDGET).unwrap(),
            Distance::Exact(1)
        );
    }

    #[test]
    fn repetition_bit_flip_distance_is_n() {
        for n in [3, 5] {
            let c = StabilizerCode::repetition(n).unwrap();
            assert_eq!(
                code_distance_for(&c, ErrorClass::XOnly, n, DEFAULT_DISTANCE_BUDGET).unwrap(),
                Distance::Exact(n)
            );
            assert_eq!(
                code_distance_for(&c, ErrorClass::ZOnly, n, DEFAULT_DISTANCE_BUDGET).unwrap(),
                Distance::Exact(1)
            );
        }
    }

    #[test]
    fn steane_distance_three() {
        let c = StabilizerCode::triangular_color(3).unwrap();
        assert_eq!(
            code_distance_bruteforce(&c, 3, DEFAULT_DISTANCE_BUDGET).unwrap(),
            Distance::Exact(3)
        );
        assert_eq!(
            code_distance_bruteforce(&c, 2, DEFAULT_DISTANCE_BUDGET).unwrap(),
            Distance::GreaterThan(2)
        );
    }

    #[test]
    fn budget_is_enforced() {
        let c = StabilizerCode::triangular_color(5).unwrap();
        assert!(matches!(
            code_distance_bruteforce(&c, 5, 1000),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 4) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
