//! Simulation of a microwave-driven, laser-force geometric phase gate on two
//! trapped ions, with Raman scattering and laser intensity noise.
//!
//! The numerical core is generic over `f32` and `f64`; the aliases below fix
//! the precision.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod ion;
pub mod scalar;
pub mod stochastic;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type C64 = C<f64>;
pub type C32 = C<f32>;
pub type Operator64 = tensor::Operator<f64>;
pub type Operator32 = tensor::Operator<f32>;
pub type QuantumState64 = tensor::QuantumState<f64>;
pub type QuantumState32 = tensor::QuantumState<f32>;
pub type GateModel64 = dynamics::GateModel<f64>;
pub type GateModel32 = dynamics::GateModel<f32>;
pub type Lindbladian64 = dynamics::Lindbladian<f64>;
pub type Lindbladian32 = dynamics::Lindbladian<f32>;
pub type GateOutcome64 = experiment::GateOutcome<f64>;
pub type GateOutcome32 = experiment::GateOutcome<f32>;
