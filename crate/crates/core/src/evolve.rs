//! Reference propagators.
//!
//! [`ExactPropagator`] diagonalizes a Hamiltonian once and then applies
//! `exp(-i H t)` to any state. [`sequential_evolve`] is the baseline that
//! stacks one Trotter circuit per time step.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::circuit::{trotterize, Circuit};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;

/// Largest register the dense propagator accepts.
pub const MAX_DENSE_QUBITS: usize = 12;

pub const HERMITICITY_TOL: f64 = 1e-10;

/// Time grid in Ha⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    pub step: f64,
    pub substep: f64,
    pub t_max: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            step: 0.9,
            substep: 0.03,
            t_max: 18.0,
        }
    }
}

impl PropagatorConfig {
    /// `t_max = 0` is allowed and yields an empty time grid.
    pub fn validate(&self) -> Result<()> {
        let PropagatorConfig { step, substep, t_max } = *self;
        if !(substep > 0.0 && substep.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "substep must be positive, got {substep}"
            )));
        }
        if !(step >= substep && step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step {step} must be at least substep {substep}"
            )));
        }
        let ratio = step / substep;
        if (ratio - ratio.round()).abs() * substep > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "step {step} is not an integer multiple of substep {substep}"
            )));
        }
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_max must be non-negative, got {t_max}"
            )));
        }
        if t_max > 0.0 && t_max < step {
            return Err(Error::InvalidParameter(format!(
                "t_max {t_max} is shorter than step {step}"
            )));
        }
        Ok(())
    }

    /// Number of whole steps that fit in `t_max`.
    pub fn n_steps(&self) -> usize {
        (self.t_max / self.step + 1e-9).floor() as usize
    }

    /// Times `step, 2 step, ...` up to `t_max`.
    pub fn times(&self) -> Vec<f64> {
        (1..=self.n_steps()).map(|k| k as f64 * self.step).collect()
    }
}

/// `exp(-i H t)` through a one-time eigendecomposition of `H`.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    n_qubits: usize,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl ExactPropagator {
    pub fn new(h: &PauliSum) -> Result<Self> {
        let n = h.n_qubits();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                n_qubits: n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        if !h.is_hermitian(HERMITICITY_TOL) {
            return Err(Error::NotHermitian("Hamiltonian has non-real coefficients".into()));
        }
        let eig = SymmetricEigen::new(h.to_dense());
        Ok(ExactPropagator {
            n_qubits: n,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Eigenvalues in the order nalgebra returns them (unsorted).
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn propagate(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: state.n_qubits(),
            });
        }
        let psi = DVector::from_column_slice(state.amplitudes());
        let mut coeffs = self.eigenvectors.adjoint() * psi;
        for (c, &e) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = &self.eigenvectors * coeffs;
        StateVector::from_amplitudes(out.as_slice().to_vec())
    }
}

/// `exp(-i h epsilon) |state>`.
pub fn exact_step(state: &StateVector, h: &PauliSum, epsilon: f64) -> Result<StateVector> {
    ExactPropagator::new(h)?.propagate(state, epsilon)
}

/// Exact states at every time of `cfg`, excluding `t = 0`.
pub fn exact_trajectory(
    initial: &StateVector,
    propagator: &ExactPropagator,
    cfg: &PropagatorConfig,
) -> Result<Vec<StateVector>> {
    cfg.validate()?;
    cfg.times()
        .into_iter()
        .map(|t| propagator.propagate(initial, t))
        .collect()
}

/// Output of [`sequential_evolve`].
#[derive(Debug, Clone)]
pub struct SequentialRun {
    pub times: Vec<f64>,
    /// State after each step, aligned with `times`.
    pub snapshots: Vec<StateVector>,
    /// Circuit of a single time step.
    pub step_circuit: Circuit,
    /// Preparation circuit followed by `k` step circuits, for `k = 1..`.
    pub circuits: Vec<Circuit>,
}

impl SequentialRun {
    pub fn depths(&self) -> Vec<usize> {
        self.circuits.iter().map(Circuit::depth).collect()
    }
}

/// Evolves the state prepared by `initial` with one Trotterized
/// `exp(-i h step)` circuit per step.
pub fn sequential_evolve(initial: &Circuit, h: &PauliSum, cfg: &PropagatorConfig) -> Result<SequentialRun> {
    cfg.validate()?;
    if initial.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            left: initial.n_qubits(),
            right: h.n_qubits(),
        });
    }
    let generator = h.scale(Complex64::new(0.0, -1.0));
    let step_circuit = trotterize(&generator, cfg.step, cfg.substep)?;
    let times = cfg.times();
    let mut state = initial.execute(None, 0)?;
    let mut cumulative = initial.clone();
    let mut snapshots = Vec::with_capacity(times.len());
    let mut circuits = Vec::with_capacity(times.len());
    for _ in &times {
        step_circuit.apply_to(&mut state)?;
        cumulative.append(&step_circuit)?;
        snapshots.push(state.clone());
        circuits.push(cumulative.clone());
    }
    Ok(SequentialRun {
        times,
        snapshots,
        step_circuit,
        circuits,
    })
}
