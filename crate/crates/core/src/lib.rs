//! Bug-triage laboratory: a count-based Markov decision model of assigning
//! bugs to developers, an approximate dynamic programming trainer, a myopic
//! baseline and an exact backward-induction oracle for tiny instances.

pub mod domain;
pub mod environment;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod policies;
pub mod scenario;
pub mod solver;
pub mod stepsize;
pub mod trainer;
pub mod value_store;

pub use error::{Result, TriageError};
