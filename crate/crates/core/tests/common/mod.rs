//! Dense-matrix oracles built from first principles: gate and Pauli matrices
//! written out element by element, full matrix products, and noise channels
//! as explicit Kraus sums. Nothing here calls into the library's simulators.
#![allow(dead_code)]

use num_complex::Complex64;
use qed_core::{CliffordCircuit, Gate, Pauli, PauliString};
use rand::Rng;

pub type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Square complex matrix; basis index bit `q` is qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub dim: usize,
    pub data: Vec<C>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let d = self.dim;
        let mut out = Mat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * o.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat {
        let d = self.dim;
        let mut out = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: C) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn trace(&self) -> C {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_diff(&self, o: &Mat) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.data[i * d + j] * v[j]).sum())
            .collect()
    }

    /// Whether `self + eps·I` has a Cholesky factorization, i.e. the smallest
    /// eigenvalue of this Hermitian matrix is above `-eps`.
    pub fn is_psd(&self, eps: f64) -> bool {
        let d = self.dim;
        let mut l = vec![ZERO; d * d];
        for j in 0..d {
            let mut diag = self[(j, j)].re + eps;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * d + j] = C::new(ljj, 0.0);
            for i in j + 1..d {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = s / ljj;
            }
        }
        true
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.dim + j]
    }
}

fn letter(p: Pauli) -> [[C; 2]; 2] {
    let i = C::new(0.0, 1.0);
    match p {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -i], [i, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// `u` on qubit `q` of `n`.
pub fn on_qubit(n: usize, q: usize, u: [[C; 2]; 2]) -> Mat {
    let d = 1 << n;
    let mut m = Mat::zeros(d);
    for a in 0..d {
        for b in 0..d {
            if (a ^ b) & !(1 << q) == 0 {
                m[(a, b)] = u[a >> q & 1][b >> q & 1];
            }
        }
    }
    m
}

pub fn pauli_matrix(p: &PauliString) -> Mat {
    let n = p.n();
    let mut m = Mat::identity(1 << n);
    for q in 0..n {
        m = m.mul(&on_qubit(n, q, letter(p.get(q))));
    }
    if p.is_negative() {
        m = m.scale(-ONE);
    }
    m
}

/// Permutation matrix of a classical reversible map on basis states.
fn permutation(n: usize, f: impl Fn(usize) -> usize) -> Mat {
    let d = 1 << n;
    let mut m = Mat::zeros(d);
    for b in 0..d {
        m[(f(b), b)] = ONE;
    }
    m
}

pub fn gate_matrix(n: usize, g: &Gate) -> Mat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bit = |b: usize, q: usize| b >> q & 1;
    match *g {
        Gate::H(q) => on_qubit(n, q, [[C::new(h, 0.0), C::new(h, 0.0)], [C::new(h, 0.0), C::new(-h, 0.0)]]),
        Gate::S(q) => on_qubit(n, q, [[ONE, ZERO], [ZERO, C::new(0.0, 1.0)]]),
        Gate::X(q) => on_qubit(n, q, letter(Pauli::X)),
        Gate::Z(q) => on_qubit(n, q, letter(Pauli::Z)),
        Gate::CX(c, t) => permutation(n, |b| b ^ (bit(b, c) << t)),
        Gate::CZ(a, b2) => {
            let d = 1 << n;
            let mut m = Mat::zeros(d);
            for b in 0..d {
                m[(b, b)] = if bit(b, a) & bit(b, b2) == 1 { -ONE } else { ONE };
            }
            m
        }
        Gate::Swap(a, b2) => permutation(n, |b| {
            let (x, y) = (bit(b, a), bit(b, b2));
            b & !(1 << a) & !(1 << b2) | x << b2 | y << a
        }),
        Gate::M(_) => Mat::identity(1 << n),
    }
}

/// Unitary of a circuit, measurements dropped.
pub fn circuit_unitary(c: &CliffordCircuit) -> Mat {
    let n = c.n_qubits();
    let mut u = Mat::identity(1 << n);
    for g in c.gates() {
        if !g.is_measurement() {
            u = gate_matrix(n, g).mul(&u);
        }
    }
    u
}

pub fn zero_state(n: usize) -> Vec<C> {
    let mut v = vec![ZERO; 1 << n];
    v[0] = ONE;
    v
}

pub fn expectation_pure(v: &[C], m: &Mat) -> C {
    let mv = m.apply(v);
    v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
}

/// `|0…0⟩⟨0…0|`.
pub fn zero_density(n: usize) -> Mat {
    let mut m = Mat::zeros(1 << n);
    m[(0, 0)] = ONE;
    m
}

pub fn conjugate(rho: &Mat, u: &Mat) -> Mat {
    u.mul(rho).mul(&u.adjoint())
}

/// Single-qubit depolarizing with error probability `p` (X, Y, Z each `p/3`).
pub fn depolarize_qubit(rho: &Mat, n: usize, q: usize, p: f64) -> Mat {
    let mut out = rho.scale(C::new(1.0 - p, 0.0));
    for l in [Pauli::X, Pauli::Y, Pauli::Z] {
        let k = on_qubit(n, q, letter(l));
        out = out.add(&conjugate(rho, &k).scale(C::new(p / 3.0, 0.0)));
    }
    out
}

/// `p ρ + (1 − p) I / 2^n`.
pub fn depolarize_global(rho: &Mat, p: f64) -> Mat {
    let d = rho.dim;
    rho.scale(C::new(p, 0.0))
        .add(&Mat::identity(d).scale(C::new((1.0 - p) / d as f64, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleNoise {
    None,
    Local(f64),
    Global(f64),
}

/// Density matrix after running `c` with noise after every moment at index
/// `≥ start` that contains no measurement.
pub fn evolve(c: &CliffordCircuit, start: usize, noise: OracleNoise) -> Mat {
    let n = c.n_qubits();
    let mut rho = zero_density(n);
    for (i, m) in c.moments().iter().enumerate() {
        for g in m.gates() {
            if !g.is_measurement() {
                rho = conjugate(&rho, &gate_matrix(n, g));
            }
        }
        if i < start || m.gates().iter().any(|g| g.is_measurement()) {
            continue;
        }
        match noise {
            OracleNoise::None => {}
            OracleNoise::Local(p) => {
                for q in 0..n {
                    rho = depolarize_qubit(&rho, n, q, p);
                }
            }
            OracleNoise::Global(p) => rho = depolarize_global(&rho, p),
        }
    }
    rho
}

/// `∏ (I + S_i) / 2`.
pub fn projector_matrix(n: usize, generators: &[PauliString]) -> Mat {
    let id = Mat::identity(1 << n);
    let mut m = id.clone();
    for g in generators {
        m = m.mul(&id.add(&pauli_matrix(g)).scale(C::new(0.5, 0.0)));
    }
    m
}

/// Uniformly random Pauli string with a random sign.
pub fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]);
    }
    p.set_negative(rng.random());
    p
}

/// Random circuit over the full gate set, `len` gates.
pub fn random_circuit<R: Rng>(n: usize, len: usize, rng: &mut R) -> CliffordCircuit {
    let mut b = qed_core::CircuitBuilder::new(n);
    for _ in 0..len {
        let q = rng.random_range(0..n);
        let g = match rng.random_range(0..7) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::X(q),
            3 => Gate::Z(q),
            k if n > 1 => {
                let mut r = rng.random_range(0..n - 1);
                if r >= q {
                    r += 1;
                }
                match k {
                    4 => Gate::CX(q, r),
                    5 => Gate::CZ(q, r),
                    _ => Gate::Swap(q, r),
                }
            }
            _ => Gate::H(q),
        };
        b.add(g).unwrap();
    }
    b.finish()
}
