//! Model Hamiltonians, dissipators and time integration.

pub mod generator;
pub mod integrate;
pub mod lambda;
pub mod model;

pub use generator::{GeneralLindbladian, Generator, Lindbladian, ModulatedOperator, ModulatedSchrodinger, Schrodinger};
pub use integrate::{
    evolve, grid_index, integrate_master, integrate_pure, integrate_pure_sampled, monitored_modes, taylor_order,
    Checkpoint, Echo, IntegratorConfig, LeakagePolicy, Method, Probes, RunReport, Stepper,
};
pub use lambda::{expm, lambda_reference, propagator, LambdaParams};
pub use model::{Channel, ChannelKind, DissipatorSet, GateModel, HamiltonianKind};
