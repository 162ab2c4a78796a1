//! Output reachable-set estimation and safety verification for multi-layer
//! perceptrons.
//!
//! The input set is covered by ∞-norm lattice cells. Each cell center is
//! simulated through the network and a sound bound on the output deviation
//! over the cell (the *maximum sensitivity*) is propagated layer by layer.
//! The union of the resulting output hyperboxes ("reachtubes") contains every
//! output the network can produce on the input set, which is enough to prove
//! box-shaped safety specifications or to report a concrete counterexample.
//!
//! All numerical code is generic over a [`Scalar`] (`f32` or `f64`). The
//! `*64` aliases at the crate root are what most callers want.

#![forbid(unsafe_code)]

pub mod error;
pub mod lattice;
pub mod network;
pub mod oracle;
pub mod reach;
pub mod scalar;
pub mod sensitivity;
pub mod verify;

mod sampling;

pub use error::{Error, Result};
pub use lattice::{covers, discretize, discretize_union, Coverage, InputBox, LatticeCell};
pub use network::{
    activate, forward, layer_eval, load_network, read_network_file, write_network, Activation,
    LayerParams, Mlp,
};
pub use oracle::{
    brute_sensitivity, corner_lp_oracle, gen_arm_data, sample_containment, tightness, ArmConfig,
    SampleReport, Violation,
};
pub use reach::{contains, export_tubes, import_tubes, output_reach, ReachEstimate, ReachTube};
pub use scalar::Scalar;
pub use sensitivity::{
    layer_sensitivity, max_sensitivity, neuron_deviation, preactivation_bounds, LayerTrace,
    NeuronPreactBounds, SensitivityResult,
};
pub use verify::{
    point_safe, safety_verify, tube_safe, Bound, SafetySpec, Verdict, VerificationReport,
};

pub type Activation64 = Activation<f64>;
pub type LayerParams64 = LayerParams<f64>;
pub type Mlp64 = Mlp<f64>;
pub type Mlp32 = Mlp<f32>;
pub type SensitivityResult64 = SensitivityResult<f64>;
pub type InputBox64 = InputBox<f64>;
pub type LatticeCell64 = LatticeCell<f64>;
pub type ReachTube64 = ReachTube<f64>;
pub type ReachEstimate64 = ReachEstimate<f64>;
pub type SafetySpec64 = SafetySpec<f64>;
pub type Verdict64 = Verdict<f64>;
pub type VerificationReport64 = VerificationReport<f64>;
pub type SampleReport64 = SampleReport<f64>;
