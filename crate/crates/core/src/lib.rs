//! Building and auditing dynamical maps of finite-dimensional quantum
//! systems.
//!
//! * [`matcore`]: dense complex matrices, Jacobi eigensolver, partial traces.
//! * [`states`]: density matrices, Bloch chart, Bell states, validation.
//! * [`channels`]: transfer/Choi/Kraus representations and positivity verdicts.
//! * [`opendyn`]: assignment maps and reduced dynamics `tr_R(U Φ(ρ) U†)`.
//! * [`compatdomain`]: the set of system states on which an assignment
//!   (or the reduced map built from it) yields positive matrices.
//! * [`json`]: wire formats shared with the command-line tool.

pub mod channels;
pub mod compatdomain;
pub mod error;
pub mod json;
pub mod matcore;
pub mod opendyn;
pub mod random;
pub mod search;
pub mod states;

pub use channels::{ChoiMatrix, KrausSet, PositivityReport, Superoperator};
pub use error::{Error, Result};
pub use matcore::{CMatrix, Subsystem};
pub use opendyn::{AssignmentMap, Generator, ReducedDynamics};
pub use states::{BlochVector, DensityMatrix};
