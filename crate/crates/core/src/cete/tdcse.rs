//! Residuals of the contracted Schrödinger equation along a discrete
//! trajectory.
//!
//! For states `psi` and `psi_next` one step `eps` apart, the midpoint
//! `w = (psi + psi_next) / 2` and `v = (psi_next - psi) / eps + i H w`
//! discretize `|psi>` and `(d/dt + iH)|psi>`. Then
//!
//! ```text
//! C[p][q][r][s] = <w| a+_p a+_q a_s a_r |v>
//! R[p][q][r][s] = C[p][q][r][s] - conj(C[r][s][p][q])
//! variance      = <v|v>
//! ```
//!
//! `R` is the expectation of the anticommutator of the two-body operator
//! with `d/dt + iH`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{FermionTerm, Tensor4};
use crate::pauli::PauliSum;
use crate::statevector::{apply_operator_to, StateVector};

#[derive(Debug, Clone)]
pub struct TdcseEvaluation {
    n_spin_orbitals: usize,
    w: Vec<Complex64>,
    v: Vec<Complex64>,
    pub contractions: Tensor4,
    pub residuals: Tensor4,
    pub variance: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn tdcse_residuals(
    psi: &StateVector,
    psi_next: &StateVector,
    h: &PauliSum,
    epsilon: f64,
) -> Result<TdcseEvaluation> {
    if epsilon == 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must be nonzero, got {epsilon}"
        )));
    }
    let n = psi.n_qubits();
    for m in [psi_next.n_qubits(), h.n_qubits()] {
        if m != n {
            return Err(Error::QubitMismatch { left: n, right: m });
        }
    }
    let w: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .zip(psi_next.amplitudes())
        .map(|(a, b)| (a + b) * 0.5)
        .collect();
    let hw = apply_operator_to(&w, h);
    let v: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .zip(psi_next.amplitudes())
        .zip(&hw)
        .map(|((a, b), x)| (b - a) / epsilon + Complex64::i() * x)
        .collect();
    let variance = dot(&v, &v).re;

    let mut contractions = Tensor4::zeros(n);
    for (p, q, r, s) in contractions.indices().collect::<Vec<_>>() {
        if let Some(t) = FermionTerm::normal_ordered(&[p, q], &[s, r], 1.0) {
            contractions.set(p, q, r, s, dot(&w, &t.apply(&v)));
        }
    }
    let mut residuals = Tensor4::zeros(n);
    for (p, q, r, s) in contractions.indices().collect::<Vec<_>>() {
        let value = contractions.get(p, q, r, s) - contractions.get(r, s, p, q).conj();
        residuals.set(p, q, r, s, value);
    }
    Ok(TdcseEvaluation {
        n_spin_orbitals: n,
        w,
        v,
        contractions,
        residuals,
        variance,
    })
}

impl TdcseEvaluation {
    pub fn max_residual(&self) -> f64 {
        self.residuals.max_abs()
    }

    /// Tensor `O` with `variance = -sum O C = -(1/2) sum O R`.
    ///
    /// Defined for two-electron states, where pair operators span every
    /// operator on the sector: `O[p][q][r][s] = <pq| M |rs>` for `p < q`,
    /// `r < s` with
    ///
    /// ```text
    /// M = (|v><w| - |w><v|) / <w|w> + <v|w> |w><w| / <w|w>^2
    /// ```
    pub fn two_body_representation(&self) -> Result<Tensor4> {
        let n = self.n_spin_orbitals;
        let leak: f64 = self
            .w
            .iter()
            .chain(&self.v)
            .enumerate()
            .filter(|(i, _)| (i % self.w.len()).count_ones() != 2)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if leak > 1e-20 {
            return Err(Error::InvalidParameter(
                "two-body representation needs states with exactly two electrons".into(),
            ));
        }
        let ww = dot(&self.w, &self.w);
        let vw = dot(&self.v, &self.w);
        let (w, v) = (&self.w, &self.v);
        let mut o = Tensor4::zeros(n);
        for p in 0..n {
            for q in p + 1..n {
                let a = (1 << p) | (1 << q);
                for r in 0..n {
                    for s in r + 1..n {
                        let b = (1 << r) | (1 << s);
                        let m = (v[a] * w[b].conj() - w[a] * v[b].conj()) / ww + vw * w[a] * w[b].conj() / (ww * ww);
                        o.set(p, q, r, s, m);
                    }
                }
            }
        }
        Ok(o)
    }
}

/// Value at `x = 0` of the polynomial through `(xs[i], ys[i])` (Neville).
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::InvalidParameter(
            "extrapolation needs matching, nonempty samples".into(),
        ));
    }
    let mut p = ys.to_vec();
    let k = xs.len();
    for level in 1..k {
        for i in 0..k - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            if xi == xj {
                return Err(Error::InvalidParameter("repeated abscissa".into()));
            }
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    Ok(p[0])
}
