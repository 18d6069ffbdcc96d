//! Noisy execution of experiment circuits: a Pauli-frame sampler, a dense
//! density-operator oracle for small registers, and exact post-selection
//! under Pauli noise.

mod dense;
mod exact;
mod frame;
mod noise;
mod shots;

pub use dense::{
    exact_distribution, exact_expectation, DensityMatrix, ExactExpectation, DEFAULT_DENSE_CAP,
};
pub use exact::{exact_postselection, ExactDetection, DEFAULT_EFFECT_CAP};
pub use frame::{sample_shots, FaultMap, FrameSampler, MomentFlips};
pub use noise::{NoiseKind, NoiseModel, NoisePlacement};
pub use shots::{ShotTable, ShotTableMetadata};
