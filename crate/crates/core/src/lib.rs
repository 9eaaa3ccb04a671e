//! Correlation-efficient time evolution (CETE) of small fermionic systems.
//!
//! Each time step builds the evolved wavefunction by correlating a single
//! Slater determinant with a product of two-electron unitaries whose
//! generators follow the gradient of the fidelity with an exactly propagated
//! target. The crate also contains everything needed to compare that scheme
//! against sequential Trotter propagation on a dense statevector simulator:
//!
//! * [`pauli`]: symplectic Pauli strings and weighted Pauli sums.
//! * [`fermion`]: FCIDUMP ingestion, reduced-Hamiltonian assembly and the
//!   Jordan-Wigner map.
//! * [`statevector`]: dense amplitudes, Pauli rotations, sampling, noise.
//! * [`circuit`]: Pauli-rotation circuits, Trotterization and depth.
//! * [`evolve`]: exact and sequential reference propagators.
//! * [`cete`]: the variational propagator and the contracted-equation
//!   residuals.
//! * [`tomography`]: shot-based estimation of the 1-RDM and energy.
//!
//! Conventions used throughout: qubit `k` is spin orbital `k`; spin orbitals
//! are ordered spin-block (all alpha, then all beta); basis labels and Pauli
//! labels are written with qubit 0 as the rightmost character; rotations are
//! `exp(-i theta/2 P)`.

pub mod cete;
pub mod circuit;
pub mod error;
pub mod evolve;
pub mod fermion;
pub mod pauli;
pub mod rng;
pub mod statevector;
pub mod tomography;

pub use error::{Error, Result};

/// Attoseconds per atomic unit of time (1 / Hartree).
pub const ATTOSECONDS_PER_AU: f64 = 24.188_843_265_857;
