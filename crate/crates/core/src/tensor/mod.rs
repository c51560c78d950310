//! Complex operator and state algebra over a fixed tensor factorization.
//!
//! Gate layouts are ordered `(qubit 1, qubit 2, COM mode, zig-zag mode)`.

pub mod layout;
pub mod local;
pub mod operator;
pub mod state;

pub use layout::{HilbertLayout, MODE_COM, MODE_ZZ, QUBIT_1, QUBIT_2};
pub use local::{embed, embed_many, ladder, number, pauli, PauliAxis};
pub use operator::{Csr, Operator, Storage};
pub use state::{apply, QuantumState, Side, StateData};
