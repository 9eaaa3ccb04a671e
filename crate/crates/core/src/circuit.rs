//! Pauli-rotation circuits.
//!
//! A circuit is an optional basis-state preparation followed by rotations
//! `exp(-i angle/2 P)`. Exponentials of anti-Hermitian [`PauliSum`]s are
//! compiled with a first-order product formula by [`trotterize`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::pauli::PauliSum;
use crate::rng::{rng_from_seed, Rng};
use crate::statevector::{basis_label, parse_basis_label, NoiseSpec, StateVector};

/// Coefficients with a real part above this are rejected as non-unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    BasisPrep { index: usize },
    PauliRotation { pauli: PauliString, angle: f64 },
}

impl Gate {
    /// Bitmask of acted-on qubits; a preparation touches every qubit.
    pub fn support(&self, n_qubits: usize) -> u64 {
        match self {
            Gate::BasisPrep { .. } => full_mask(n_qubits),
            Gate::PauliRotation { pauli, .. } => pauli.support(),
        }
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    /// Circuit starting with a preparation of basis state `index`.
    pub fn with_prep(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize.checked_shl(n_qubits as u32).unwrap_or(0);
        if dim != 0 && index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis states",
                index,
                len: dim,
            });
        }
        Ok(Circuit {
            n_qubits,
            gates: vec![Gate::BasisPrep { index }],
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn prep(&self) -> Option<usize> {
        match self.gates.first() {
            Some(Gate::BasisPrep { index }) => Some(*index),
            _ => None,
        }
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.len() - usize::from(self.prep().is_some())
    }

    pub fn push_rotation(&mut self, pauli: PauliString, angle: f64) -> Result<()> {
        if pauli.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: pauli.n_qubits(),
            });
        }
        if !pauli.is_hermitian() {
            return Err(Error::NotHermitian(format!("rotation generator {pauli}")));
        }
        if !angle.is_finite() {
            return Err(Error::InvalidParameter(format!("rotation angle {angle}")));
        }
        self.gates.push(Gate::PauliRotation { pauli, angle });
        Ok(())
    }

    /// Appends the gates of `other`, which must not contain a preparation.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        if other.prep().is_some() {
            return Err(Error::Circuit(
                "cannot append a circuit that prepares a basis state".into(),
            ));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn without_prep(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self
                .gates
                .iter()
                .filter(|g| matches!(g, Gate::PauliRotation { .. }))
                .cloned()
                .collect(),
        }
    }

    /// Reversed gate order with negated angles.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in self.gates.iter().rev() {
            match g {
                Gate::BasisPrep { .. } => {
                    return Err(Error::Circuit(
                        "cannot invert a basis preparation; strip it first".into(),
                    ))
                }
                Gate::PauliRotation { pauli, angle } => gates.push(Gate::PauliRotation {
                    pauli: *pauli,
                    angle: -angle,
                }),
            }
        }
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates,
        })
    }

    /// Applies the rotations to `state`; a preparation resets it first.
    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        self.run(state, None)
    }

    fn run(&self, state: &mut StateVector, mut noise: Option<(&NoiseSpec, &mut Rng)>) -> Result<()> {
        for g in &self.gates {
            match g {
                Gate::BasisPrep { index } => *state = StateVector::basis(self.n_qubits, *index)?,
                Gate::PauliRotation { pauli, angle } => {
                    state.apply_pauli_rotation(pauli, *angle)?;
                    if let Some((spec, rng)) = noise.as_mut() {
                        if spec.two_qubit_depolarizing_p > 0.0 {
                            for pair in entangling_pairs(pauli.support()) {
                                state.apply_depolarizing(pair, spec.two_qubit_depolarizing_p, rng)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs the circuit from `|0...0>`, sampling one noise trajectory when
    /// `noise` is given.
    pub fn execute(&self, noise: Option<&NoiseSpec>, seed: u64) -> Result<StateVector> {
        let mut state = StateVector::basis(self.n_qubits, 0)?;
        match noise {
            Some(spec) => {
                spec.validate()?;
                let mut rng = rng_from_seed(seed);
                self.run(&mut state, Some((spec, &mut rng)))?;
            }
            None => self.run(&mut state, None)?,
        }
        Ok(state)
    }

    /// Layer count under greedy left-justified packing of gates with
    /// disjoint supports.
    pub fn depth(&self) -> usize {
        let mut frontier = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let support = g.support(self.n_qubits);
            let qubits = || (0..self.n_qubits).filter(move |q| support >> q & 1 == 1);
            let layer = 1 + qubits().map(|q| frontier[q]).max().unwrap_or(0);
            if support == 0 {
                continue;
            }
            for q in qubits() {
                frontier[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }
}

/// Qubit pairs that receive a depolarizing event after a rotation: one per
/// link of a ladder through the sorted support.
pub fn entangling_pairs(support: u64) -> Vec<(usize, usize)> {
    let qubits: Vec<usize> = (0..64).filter(|q| support >> q & 1 == 1).collect();
    qubits.windows(2).map(|w| (w[0], w[1])).collect()
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            match g {
                Gate::BasisPrep { index } => writeln!(f, "PREP {}", basis_label(self.n_qubits, *index))?,
                Gate::PauliRotation { pauli, angle } => writeln!(f, "ROT {pauli} {angle:?}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    /// Parses the `PREP`/`ROT` dump; the qubit count comes from the first label.
    fn from_str(s: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        let bad = |reason: String| Error::Circuit(reason);
        for line in s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["PREP", label] => {
                    if circuit.is_some() {
                        return Err(bad("PREP must be the first gate".into()));
                    }
                    circuit = Some(Circuit::with_prep(label.len(), parse_basis_label(label)?)?);
                }
                ["ROT", label, angle] => {
                    let pauli = PauliString::from_label(label)?;
                    let angle: f64 = angle.parse().map_err(|_| bad(format!("invalid angle {angle:?}")))?;
                    circuit
                        .get_or_insert_with(|| Circuit::new(pauli.n_qubits()))
                        .push_rotation(pauli, angle)?;
                }
                _ => return Err(bad(format!("unrecognized gate line {line:?}"))),
            }
        }
        circuit.ok_or_else(|| bad("empty circuit dump".into()))
    }
}

/// Compiles `exp(scale * generator)` for anti-Hermitian `generator`.
///
/// A term `c P` with `c = -i lambda` becomes a rotation of angle
/// `2 lambda dt`. Mutually commuting terms are emitted in one sweep;
/// otherwise `ceil(|scale| / substep)` sweeps are emitted with the final
/// one shortened. Identity terms only contribute a global phase and are
/// dropped. Terms are ordered by `(z_mask, x_mask)`.
pub fn trotterize(generator: &PauliSum, scale: f64, substep: f64) -> Result<Circuit> {
    if !(substep > 0.0 && substep.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "substep must be positive, got {substep}"
        )));
    }
    if !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("scale {scale} is not finite")));
    }
    let n = generator.n_qubits();
    let mut terms = Vec::with_capacity(generator.len());
    for (p, c) in generator.iter() {
        if c.re.abs() > UNITARITY_TOL {
            return Err(Error::NonUnitaryGenerator(format!(
                "term {} has real coefficient {}",
                p.label(),
                c.re
            )));
        }
        if !p.is_identity() {
            terms.push((p, -c.im));
        }
    }
    let mut circuit = Circuit::new(n);
    if terms.is_empty() || scale == 0.0 {
        return Ok(circuit);
    }
    let commuting = terms
        .iter()
        .enumerate()
        .all(|(i, (p, _))| terms[i + 1..].iter().all(|(q, _)| p.commutes_with(q)));
    let steps: Vec<f64> = if commuting {
        vec![scale]
    } else {
        let reps = ((scale.abs() / substep) - 1e-9).ceil().max(1.0) as usize;
        let sign = scale.signum();
        (0..reps)
            .map(|r| {
                if r + 1 < reps {
                    sign * substep
                } else {
                    scale - sign * substep * (reps - 1) as f64
                }
            })
            .collect()
    };
    for dt in steps {
        for (p, lambda) in &terms {
            circuit.push_rotation(*p, 2.0 * lambda * dt)?;
        }
    }
    Ok(circuit)
}
