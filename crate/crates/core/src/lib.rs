//! Noether-type symmetry/conservation equivalences for finite-dimensional
//! quantum operations, quantum dynamical semigroups, positive (non-CP)
//! stochastic maps and classical Markov chains.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: operators, superoperators (column-stacking vectorization)
//!   and Hilbert–Schmidt orthonormal operator subspaces.
//! - [`channels`]: Kraus channels, Lüders operations, the transpose map,
//!   Choi matrices, positivity profiles and Stinespring dilations.
//! - [`fixed`]: fixed-point spaces, multiplicative and bimodule domains,
//!   the scale of constants and discrete Noether verdicts.
//! - [`semigroup`]: Lindblad generators, evolution, constants of motion,
//!   ergodic projections and continuous Noether verdicts.
//! - [`classical`]: finite-state Markov chains and their diagonal embedding.
//! - [`cli`]: JSON formats, reports and the `noetherq` command dispatcher.

pub mod channels;
pub mod classical;
pub mod cli;
pub mod error;
pub mod fixed;
pub mod linalg;
pub mod random;
pub mod semigroup;
pub mod tol;
pub mod verdict;

pub use error::{Error, Result};
pub use linalg::subspace::OperatorSubspace;
pub use linalg::superop::SuperOperator;
pub use linalg::{Operator, C64};
pub use tol::{AnalysisOptions, Tolerances};
pub use verdict::{Clause, NoetherVerdict};
