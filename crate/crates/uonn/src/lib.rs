//! Simulation and training library for unitary optical neural networks (UONNs)
//! built from Mach-Zehnder interferometer (MZI) meshes.
//!
//! The crate covers the full pipeline:
//!
//! - complex field/matrix arithmetic and Haar-random unitaries ([`field`])
//! - transfer matrices of beam splitters, phase shifters, and MZIs ([`components`])
//! - Reck (triangular) and Clements (rectangular) mesh layouts, synthesis, and
//!   decomposition of arbitrary unitaries into phase programs ([`mesh`])
//! - multi-layer networks with complex-field and intensity-detected forward
//!   modes ([`network`])
//! - exact two-point shift-rule gradients for real (intensity) and complex
//!   (field) outputs ([`psr`])
//! - independent gradient oracles: central finite differences and the analytic
//!   generator-insertion derivative ([`oracles`])
//! - gradient-descent training with SGD/Adam ([`trainer`])
//! - file formats and the command-line front end ([`io`], [`cli`])
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cli;
pub mod components;
pub mod error;
pub mod field;
pub mod io;
pub mod mesh;
pub mod network;
pub mod oracles;
pub mod psr;
pub mod trainer;

pub use error::{Error, Result};
pub use field::{mat_apply, random_unitary, CMatrix, FieldVec, UnitaryMatrix, UNITARY_TOL};

pub use components::{
    beam_splitter, mzi_from_components, mzi_unitary, phase_shift_rule_spec, phase_shifter,
    phase_shifter_generator, wrap_phase, MziParams, ShiftRuleSpec,
};

pub use mesh::{
    clements_decompose, decompose, mesh_unitary, reck_decompose, MeshLayout, MeshScheme,
    PhaseSlot,
};

pub use network::{
    forward_field, forward_intensity, measure_observable, Activation, DetectionMode, IntensityVec,
    Layer, Network, Observable, ParamRef,
};

pub use psr::{
    grad_field_psr, grad_field_psr_counted, grad_intensity_psr, grad_loss_chained,
    grad_loss_report, shift_rule_general, CrossResidual, GradEntry, GradMethod, GradValue,
    GradientReport,
};

pub use oracles::{grad_analytic, grad_fd, grad_observable_analytic, FdConfig, FdScheme};

pub use trainer::{
    loss_eval, make_unitary_task, randomize_phases, train, LossSpec, Optimizer, Sample, Target,
    TrainConfig, TrainHistory, TrainRecord,
};
