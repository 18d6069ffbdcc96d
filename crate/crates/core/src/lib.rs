//! Stabilizer-code toolkit for quantum error detection: code construction,
//! encoder synthesis, noisy Clifford sampling, post-selection and projector
//! estimators, routing statistics, and experiment drivers.

pub mod bits;
pub mod circuit;
pub mod codes;
pub mod detect;
pub mod encode;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod pauli;
pub mod route;
pub mod sim;
pub mod tableau;

pub use bits::Bits;
pub use circuit::{conjugate_by_circuit, CircuitBuilder, CliffordCircuit, Gate, Moment};
pub use codes::{
    enumerate_codewords, projector_terms, validate_code, CodewordSet, ColorCodeLattice,
    EnumerationPath, ProjectorExpansion, StabilizerCode, ValidationReport,
};
pub use error::{Error, Result};
pub use experiments::{
    codeword_timing_benchmark, estimate_pseudothreshold, run_bell_sweep, run_memory_sweep,
    run_pseudothreshold, run_sweep, CodeFamily, CrossoverReference, Method,
    PseudothresholdConfig, PseudothresholdReport, PseudothresholdResult, SweepConfig,
    SweepPoint, SweepResult, TimingRow,
};
pub use gf2::{rref_gf2, CheckMatrix, Rref};
pub use pauli::{pauli_commutes, pauli_multiply, Pauli, PauliString, Phase};
pub use tableau::Tableau;
pub use detect::{
    analytic_mitigated_value, codeword_projector, f_c_prediction, postselect_distribution,
    postselect_estimate, projector_estimate, sample_detection, DetectionResult,
};
pub use encode::{
    build_experiment_circuit, logical_gate, synthesize_encoder, verify_encoder,
    ExperimentCircuit, ExperimentKind, ExperimentMetadata, LogicalBasis, LogicalBlock,
    LogicalGate, LogicalGateKind,
};
pub use route::{
    circuit_stats, heavy_hex_graph, heavy_hex_line, heavy_hex_line_layout, route_circuit, route_experiment, CircuitStats, CouplingGraph, RoutedCircuit,
    RoutedExperiment, StatsMode,
};
pub use sim::{
    exact_distribution, exact_expectation, exact_postselection, sample_shots, FrameSampler,
    NoiseKind, NoiseModel, NoisePlacement, ShotTable,
};
