//! Fixtures shared by the benchmarks.

use qed_core::experiments::{random_code, CodeFamily};
use qed_core::{build_experiment_circuit, ExperimentCircuit, ExperimentKind, LogicalBasis, StabilizerCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random `[[n, 1]]` code, reproducible from `seed`.
pub fn seeded_code(n: usize, css_form: bool, seed: u64) -> StabilizerCode {
    random_code(n, css_form, &mut ChaCha8Rng::seed_from_u64(seed)).expect("n ≥ 1")
}

/// Bell experiment on two blocks of a family member.
pub fn bell(family: CodeFamily, size: usize, depth: usize) -> ExperimentCircuit {
    let code = family.code(size).expect("valid size");
    build_experiment_circuit(ExperimentKind::Bell, &code, depth, LogicalBasis::Z).expect("valid experiment")
}
