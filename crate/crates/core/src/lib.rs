//! Choi-state representation of noisy quantum operations, twirling into standard forms,
//! designed depolarization, and twirled Lindblad dynamics.

// Dense kernels index several arrays with one loop counter.
#![allow(clippy::needless_range_loop)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod lindblad;
pub mod pauli;
pub mod sacrifice;
pub mod twirl;

#[cfg(test)]
mod testutil;
