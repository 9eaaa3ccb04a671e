use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{jordan_wigner, spin_populations, FermionTerm};
use crate::pauli::PauliSum;

/// Which excitations enter the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolOptions {
    pub one_body: bool,
    pub two_body: bool,
    /// Keep only excitations that conserve `S_z` under spin-block ordering.
    pub conserve_sz: bool,
}

impl Default for PoolOptions {
    fn default() -> Self {
        PoolOptions {
            one_body: true,
            two_body: true,
            conserve_sz: true,
        }
    }
}

/// Hermitian generators `G_k`; a layer applies `exp(i theta_k G_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPool {
    n_qubits: usize,
    generators: Vec<PauliSum>,
    labels: Vec<String>,
}

impl GeneratorPool {
    /// Pool from explicit Hermitian operators.
    pub fn from_generators(n_qubits: usize, generators: Vec<(String, PauliSum)>) -> Result<Self> {
        let mut pool = GeneratorPool {
            n_qubits,
            generators: Vec::new(),
            labels: Vec::new(),
        };
        for (label, g) in generators {
            if g.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: g.n_qubits(),
                });
            }
            if !g.is_hermitian(1e-12) {
                return Err(Error::NotHermitian(format!("pool generator {label}")));
            }
            pool.push(label, g);
        }
        Ok(pool)
    }

    fn push(&mut self, label: String, g: PauliSum) -> bool {
        if g.is_empty() || self.generators.iter().any(|h| proportional(h, &g)) {
            return false;
        }
        self.generators.push(g);
        self.labels.push(label);
        true
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[PauliSum] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, k: usize) -> Option<(&str, &PauliSum)> {
        Some((self.labels.get(k)?.as_str(), self.generators.get(k)?))
    }
}

/// True when `a = lambda b` for some nonzero scalar.
fn proportional(a: &PauliSum, b: &PauliSum) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some((p, ca)) = a.iter().next() else {
        return b.is_empty();
    };
    let cb = b.coefficient(&p);
    if cb.norm() == 0.0 {
        return false;
    }
    let lambda = ca / cb;
    let scale = a.one_norm();
    a.iter()
        .all(|(p, c)| (c - lambda * b.coefficient(&p)).norm() <= 1e-10 * scale)
}

fn spin_of(p: usize, norb: usize) -> usize {
    usize::from(p >= norb)
}

/// Builds `T + T^dagger` and `i (T - T^dagger)` for every one- and two-body
/// excitation `T` that conserves particle number (and `S_z` when requested)
/// and can act inside the sector with `n_electrons` electrons and
/// `2 S_z = ms2`.
pub fn build_pool(n_spin_orbitals: usize, n_electrons: usize, ms2: i64, options: PoolOptions) -> Result<GeneratorPool> {
    let n = n_spin_orbitals;
    if n_electrons > n {
        return Err(Error::InvalidParameter(format!(
            "{n_electrons} electrons do not fit in {n} spin orbitals"
        )));
    }
    let norb = n / 2;
    // electrons of each spin available to be moved
    let capacity = if options.conserve_sz {
        let (na, nb) = spin_populations(n, n_electrons, ms2)?;
        [na, nb]
    } else {
        [n_electrons, n_electrons]
    };
    let feasible = |cre: &[usize], ann: &[usize]| -> bool {
        if ann.len() > n_electrons {
            return false;
        }
        if !options.conserve_sz {
            return true;
        }
        let count = |idx: &[usize], s: usize| idx.iter().filter(|&&p| spin_of(p, norb) == s).count();
        (0..2).all(|s| count(cre, s) == count(ann, s) && count(ann, s) <= capacity[s])
    };

    let mut excitations: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    if options.one_body {
        for p in 0..n {
            for q in 0..p {
                excitations.push((vec![p], vec![q]));
            }
        }
    }
    if options.two_body {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
        for (i, &(p, q)) in pairs.iter().enumerate() {
            for &(r, s) in &pairs[..i] {
                // a+_p a+_q a_s a_r
                excitations.push((vec![p, q], vec![s, r]));
            }
        }
    }

    let mut pool = GeneratorPool {
        n_qubits: n,
        generators: Vec::new(),
        labels: Vec::new(),
    };
    for (cre, ann) in excitations {
        if !feasible(&cre, &ann) {
            continue;
        }
        let Some(t) = FermionTerm::normal_ordered(&cre, &ann, 1.0) else {
            continue;
        };
        let fwd = jordan_wigner(&t, n)?;
        let bwd = fwd.adjoint();
        let herm = fwd.add(&bwd)?.hermitian_part();
        let anti = fwd.sub(&bwd)?.scale(Complex64::new(0.0, 1.0)).hermitian_part();
        let ops: Vec<String> = cre
            .iter()
            .map(|p| format!("{p}^"))
            .chain(ann.iter().map(|p| p.to_string()))
            .collect();
        let ops = ops.join(" ");
        pool.push(format!("re({ops})"), herm);
        pool.push(format!("im({ops})"), anti);
    }
    Ok(pool)
}
