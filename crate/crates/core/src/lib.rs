//! Problem Hamiltonians for monotone not-all-equal 3-SAT.
//!
//! The crate builds the conventional diagonal problem Hamiltonian
//! `Hp = sum C_ijm` and the entangling variant `sum C_ijm A_ijm C_ijm`,
//! diagonalizes them exactly at small qubit counts, and measures eigenstate
//! entanglement, ground-space content and adiabatic gaps.
//!
//! - [`sat`]: clauses, instances, brute-force solving, instance generation
//! - [`ops`]: operator builders in the computational basis
//! - [`spectra`]: exact diagonalization, entanglement entropy, verification
//! - [`anneal`]: interpolation `H(s)` and gap scans

pub mod anneal;
pub mod error;
pub mod ops;
pub mod sat;
pub mod spectra;

pub use error::{Error, Result};
pub use ops::{ClauseOperators, OperatorMatrix, PairOperators};
pub use sat::{BitString, Clause, Instance};
pub use spectra::{Cut, EntropyProfile, SpectrumResult};
