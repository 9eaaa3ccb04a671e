#![allow(dead_code)]

use std::f64::consts::PI;

use cete_core::circuit::{trotterize, Circuit};
use cete_core::fermion::{build_hamiltonian, jordan_wigner, Fcidump, FermionTerm, TwoElectronIntegrals};
use cete_core::pauli::PauliSum;
use cete_core::rng::{rng_from_seed, Rng};
use cete_core::statevector::StateVector;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng as _;

pub const FCIDUMP: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/h2_sto3g_0.735.fcidump");
pub const REFERENCE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/h2_sto3g_0.735.reference");

pub fn h2_hamiltonian() -> PauliSum {
    let f = Fcidump::read(FCIDUMP).expect("fixture parses");
    let ints = TwoElectronIntegrals::from_fcidump(&f, 2).expect("integrals");
    build_hamiltonian(&ints).expect("hamiltonian")
}

pub fn reference_value(key: &str) -> f64 {
    let text = std::fs::read_to_string(REFERENCE).expect("reference fixture");
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim().parse().expect("number"))
        .unwrap_or_else(|| panic!("{key} missing from reference"))
}

/// `|0101>` rotated by `exp(0.1 pi A)` with `A = a+_1 a+_3 a_2 a_0 - h.c.`.
pub fn h2_initial_circuit() -> Circuit {
    let t: FermionTerm = "1^ 3^ 2 0".parse().unwrap();
    let fwd = jordan_wigner(&t, 4).unwrap();
    let a = fwd.add(&fwd.adjoint()).unwrap().scale(Complex64::i());
    let mut c = Circuit::with_prep(4, 5).unwrap();
    c.append(&trotterize(&a, 0.1 * PI, 0.03).unwrap()).unwrap();
    c
}

/// `exp(-i H t) psi` by a Taylor series with step splitting, independent of
/// the library's eigendecomposition.
pub fn taylor_propagate(h: &DMatrix<Complex64>, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let norm = h.iter().map(|x| x.norm()).sum::<f64>().max(1.0);
    let pieces = ((norm * t.abs()) / 0.25).ceil().max(1.0) as usize;
    let dt = t / pieces as f64;
    let mut v = DVector::from_column_slice(psi);
    for _ in 0..pieces {
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..40 {
            term = (h * &term) * Complex64::new(0.0, -dt / k as f64);
            acc += &term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        v = acc;
    }
    v.iter().copied().collect()
}

/// Dense `exp(i theta G) psi` for Hermitian `G`.
pub fn taylor_rotate(g: &DMatrix<Complex64>, psi: &[Complex64], theta: f64) -> Vec<Complex64> {
    taylor_propagate(g, psi, -theta)
}

pub fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    overlap(a, b).norm_sqr() / (overlap(a, a).re * overlap(b, b).re)
}

pub fn rng(seed: u64) -> Rng {
    rng_from_seed(seed)
}

pub fn gaussian_complex(rng: &mut Rng) -> Complex64 {
    // Box-Muller
    let u: f64 = rng.random::<f64>().max(1e-300);
    let v: f64 = rng.random();
    let r = (-2.0 * u.ln()).sqrt();
    Complex64::new(r * (2.0 * PI * v).cos(), r * (2.0 * PI * v).sin())
}

/// Random normalized state supported on basis states with `n_electrons` set bits.
pub fn random_sector_state(n_qubits: usize, n_electrons: u32, rng: &mut Rng) -> StateVector {
    let amps = (0..1usize << n_qubits)
        .map(|b| {
            if b.count_ones() == n_electrons {
                gaussian_complex(rng)
            } else {
                Complex64::default()
            }
        })
        .collect();
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn random_state(n_qubits: usize, rng: &mut Rng) -> StateVector {
    let amps = (0..1usize << n_qubits).map(|_| gaussian_complex(rng)).collect();
    StateVector::from_amplitudes(amps).unwrap()
}

/// Number-conserving Hamiltonian from a random `K` with `K[pqrs] = conj(K[rspq])`.
pub fn random_hamiltonian(n: usize, rng: &mut Rng) -> PauliSum {
    let mut ints = TwoElectronIntegrals::zeros(n);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let (a, b) = ((p, q), (r, s));
                    if a > b {
                        continue;
                    }
                    let mut k = gaussian_complex(rng) * 0.3;
                    if a == b {
                        k = Complex64::new(k.re, 0.0);
                    }
                    ints.k2.set(p, q, r, s, k);
                    ints.k2.set(r, s, p, q, k.conj());
                }
            }
        }
    }
    ints.core_energy = rng.random_range(-1.0..1.0);
    build_hamiltonian(&ints).unwrap()
}

/// Random Hermitian operator with `terms` Pauli strings of real coefficients.
pub fn random_hermitian_sum(n: usize, terms: usize, rng: &mut Rng) -> PauliSum {
    let mut out = PauliSum::zero(n);
    for _ in 0..terms {
        let label: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        let p = PauliSum::from_labels(n, [(rng.random_range(-1.0..1.0), label.as_str())]).unwrap();
        out = out.add(&p).unwrap();
    }
    out
}
