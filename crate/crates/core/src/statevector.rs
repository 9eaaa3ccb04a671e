//! Dense statevector simulation.
//!
//! Amplitude index bit `k` is qubit `k` (little-endian). Basis labels are
//! written with qubit 0 rightmost, so `"0101"` is index 5.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::rng::{rng_from_seed, Rng};

pub const MAX_QUBITS: usize = 24;

/// Tolerance on the unit norm that every public operation maintains.
pub const NORM_TOL: f64 = 1e-10;

/// Histogram of measured bitstrings (qubit 0 rightmost).
pub type Counts = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

pub fn basis_label(n_qubits: usize, index: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_basis_label(label: &str) -> Result<usize> {
    let n = label.len();
    if n > MAX_QUBITS {
        return Err(Error::TooLarge {
            n_qubits: n,
            limit: MAX_QUBITS,
        });
    }
    label.chars().enumerate().try_fold(0usize, |acc, (pos, ch)| {
        let bit = match ch {
            '0' => 0,
            '1' => 1,
            other => {
                return Err(Error::InvalidLabel {
                    label: label.to_string(),
                    reason: format!("unexpected character {other:?}"),
                })
            }
        };
        Ok(acc | (bit << (n - 1 - pos)))
    })
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooLarge {
            n_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// `|index>` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis states",
                index,
                len: dim,
            });
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Basis state from a label such as `"0101"`.
    pub fn prepare_basis(n_qubits: usize, label: &str) -> Result<Self> {
        if label.len() != n_qubits {
            return Err(Error::InvalidLabel {
                label: label.to_string(),
                reason: format!("expected {n_qubits} characters"),
            });
        }
        Self::basis(n_qubits, parse_basis_label(label)?)
    }

    /// Normalizes `amps`; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_size(n_qubits)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("zero or non-finite norm".into()));
        }
        Ok(StateVector {
            n_qubits,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Index of the most probable basis state; ties go to the lowest index.
    pub fn most_probable(&self) -> usize {
        let mut best = 0;
        let mut best_p = f64::NEG_INFINITY;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > best_p {
                best = i;
                best_p = p;
            }
        }
        best
    }

    fn check_qubits(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: n,
            });
        }
        Ok(())
    }

    /// `P |self>`; any phase is allowed since Pauli strings are unitary.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_qubits(p.n_qubits())?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let (b2, f) = p.apply_to_basis(b);
            out[b2] = a * f;
        }
        self.amps = out;
        Ok(())
    }

    /// `exp(-i theta/2 P) |self> = cos(theta/2) |self> - i sin(theta/2) P |self>`.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        self.check_qubits(p.n_qubits())?;
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(format!(
                "rotation generator {p} has an imaginary phase"
            )));
        }
        if p.is_identity() {
            let sign = p.phase().to_complex().re;
            let f = Complex64::from_polar(1.0, -0.5 * theta * sign);
            self.amps.iter_mut().for_each(|a| *a *= f);
            return Ok(());
        }
        let (s, c) = (0.5 * theta).sin_cos();
        let minus_i_sin = Complex64::new(0.0, -s);
        let x = p.x_mask() as usize;
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                let (_, f) = p.apply_to_basis(b);
                *a *= c + minus_i_sin * f;
            }
            return Ok(());
        }
        // amplitudes pair up as (b, b ^ x); update each pair once
        let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for b in 0..self.amps.len() {
            if b & top != 0 {
                continue;
            }
            let b2 = b ^ x;
            let (_, f_b) = p.apply_to_basis(b); // P|b> = f_b |b2>
            let (_, f_b2) = p.apply_to_basis(b2); // P|b2> = f_b2 |b>
            let a = self.amps[b];
            let a2 = self.amps[b2];
            self.amps[b] = c * a + minus_i_sin * f_b2 * a2;
            self.amps[b2] = c * a2 + minus_i_sin * f_b * a;
        }
        Ok(())
    }

    fn apply_single_qubit(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit != 0 {
                continue;
            }
            let a0 = self.amps[b];
            let a1 = self.amps[b | bit];
            self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Rotates so that a computational-basis measurement samples the
    /// eigenbasis of `p`: Hadamard for X, `H S^dagger` for Y.
    pub fn rotate_to_eigenbasis(&mut self, p: &PauliString) -> Result<()> {
        self.check_qubits(p.n_qubits())?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = [
            [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        ];
        // H S^dagger
        let hsdg = [
            [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
            [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
        ];
        for q in 0..self.n_qubits {
            match p.pauli_at(q) {
                Pauli::X => self.apply_single_qubit(q, hadamard),
                Pauli::Y => self.apply_single_qubit(q, hsdg),
                Pauli::I | Pauli::Z => {}
            }
        }
        Ok(())
    }

    /// `O |self>` as raw (unnormalized) amplitudes.
    pub fn apply_operator(&self, op: &PauliSum) -> Result<Vec<Complex64>> {
        self.check_qubits(op.n_qubits())?;
        Ok(apply_operator_to(&self.amps, op))
    }

    pub fn expectation(&self, obs: &PauliSum) -> Result<Complex64> {
        let image = self.apply_operator(obs)?;
        Ok(dot(&self.amps, &image))
    }

    /// `<self| O |other>`.
    pub fn matrix_element(&self, op: &PauliSum, other: &StateVector) -> Result<Complex64> {
        self.check_qubits(other.n_qubits)?;
        let image = other.apply_operator(op)?;
        Ok(dot(&self.amps, &image))
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_qubits(other.n_qubits)?;
        Ok(dot(&self.amps, &other.amps))
    }

    /// Samples `shots` basis indices from the Born distribution.
    pub fn sample_indices(&self, shots: usize, rng: &mut Rng) -> Vec<usize> {
        let probs = self.probabilities();
        let dist = WeightedIndex::new(&probs).expect("normalized state has positive weight");
        (0..shots).map(|_| dist.sample(rng)).collect()
    }

    /// Measures in the eigenbasis of `basis` and histograms the outcomes.
    pub fn sample_counts(&self, basis: &PauliString, shots: usize, seed: u64) -> Result<Counts> {
        let mut rng = rng_from_seed(seed);
        self.sample_counts_with(basis, shots, &mut rng)
    }

    pub fn sample_counts_with(&self, basis: &PauliString, shots: usize, rng: &mut Rng) -> Result<Counts> {
        if shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        let mut rotated = self.clone();
        rotated.rotate_to_eigenbasis(basis)?;
        let mut counts = Counts::new();
        for b in rotated.sample_indices(shots, rng) {
            *counts.entry(basis_label(self.n_qubits, b)).or_default() += 1;
        }
        Ok(counts)
    }

    /// With probability `p` applies a uniformly random non-identity two-qubit
    /// Pauli to `qubits`: one trajectory of the two-qubit depolarizing channel.
    pub fn apply_depolarizing(&mut self, qubits: (usize, usize), p: f64, rng: &mut Rng) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "depolarizing probability {p} outside [0, 1]"
            )));
        }
        let (a, b) = qubits;
        for q in [a, b] {
            if q >= self.n_qubits {
                return Err(Error::IndexOutOfRange {
                    what: "qubits",
                    index: q,
                    len: self.n_qubits,
                });
            }
        }
        if a == b {
            return Err(Error::InvalidParameter("depolarizing pair must be distinct".into()));
        }
        if p == 0.0 || rng.random::<f64>() >= p {
            return Ok(());
        }
        let k: u8 = rng.random_range(1..16);
        let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let mut s = PauliString::identity(self.n_qubits);
        for (q, which) in [(a, k & 3), (b, k >> 2)] {
            let single = PauliString::single(self.n_qubits, q, paulis[which as usize])?;
            s = s.multiply(&single)?;
        }
        self.apply_pauli(&s)
    }

    /// Seed-taking form of [`apply_depolarizing`](Self::apply_depolarizing).
    pub fn apply_depolarizing_seeded(&mut self, qubits: (usize, usize), p: f64, seed: u64) -> Result<()> {
        let mut rng = rng_from_seed(seed);
        self.apply_depolarizing(qubits, p, &mut rng)
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `O |amps>` for a raw amplitude vector.
pub fn apply_operator_to(amps: &[Complex64], op: &PauliSum) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); amps.len()];
    for (p, c) in op.iter() {
        for (b, &a) in amps.iter().enumerate() {
            let (b2, f) = p.apply_to_basis(b);
            out[b2] += c * f * a;
        }
    }
    out
}

/// Noise model for trajectory sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Depolarizing probability per two-qubit entangling event.
    pub two_qubit_depolarizing_p: f64,
    /// Independent bit-flip probability per measured qubit.
    pub readout_flip_p: f64,
    pub seed: u64,
    /// Number of noise trajectories a shot budget is split across.
    pub trajectories: usize,
}

impl NoiseSpec {
    pub fn new(two_qubit_depolarizing_p: f64, readout_flip_p: f64, seed: u64, trajectories: usize) -> Result<Self> {
        let spec = NoiseSpec {
            two_qubit_depolarizing_p,
            readout_flip_p,
            seed,
            trajectories,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("two_qubit_depolarizing_p", self.two_qubit_depolarizing_p),
            ("readout_flip_p", self.readout_flip_p),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if self.trajectories == 0 {
            return Err(Error::InvalidParameter("trajectories must be at least 1".into()));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.two_qubit_depolarizing_p == 0.0 && self.readout_flip_p == 0.0
    }

    /// Flips each of the low `n_qubits` bits of `outcome` with the readout
    /// probability.
    pub fn flip_readout(&self, outcome: usize, n_qubits: usize, rng: &mut Rng) -> usize {
        if self.readout_flip_p == 0.0 {
            return outcome;
        }
        (0..n_qubits).fold(outcome, |acc, q| {
            if rng.random::<f64>() < self.readout_flip_p {
                acc ^ (1 << q)
            } else {
                acc
            }
        })
    }
}
