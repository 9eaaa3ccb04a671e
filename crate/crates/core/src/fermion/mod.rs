//! Second quantization: integrals, fermionic terms and the Jordan-Wigner map.
//!
//! Spin orbitals are ordered spin-block: for `norb` spatial orbitals, index
//! `p < norb` is spatial orbital `p` with alpha spin and `norb + p` the same
//! spatial orbital with beta spin. Spin orbital `p` is qubit `p`.
//!
//! The Hamiltonian is held in the pure two-electron form
//!
//! ```text
//! H = sum_{pqrs} K[p][q][r][s] a+_p a+_q a_s a_r
//! ```
//!
//! with the one-electron integrals folded in for a fixed particle number `N`
//! through `a+_p a_q = (N - 1)^{-1} sum_r a+_p a+_r a_r a_q`. The folded
//! operator agrees with the usual Hamiltonian only inside the `N`-electron
//! sector; every propagation in this crate stays in that sector.

mod fcidump;

pub use fcidump::Fcidump;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum, Phase};

/// Hermiticity tolerance for reduced-Hamiltonian coefficients.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Dense rank-4 complex tensor indexed `[p][q][r][s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<Complex64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![Complex64::default(); n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
        self.data[self.offset(p, q, r, s)]
    }

    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: Complex64) {
        let o = self.offset(p, q, r, s);
        self.data[o] = v;
    }

    pub fn add(&mut self, p: usize, q: usize, r: usize, s: usize, v: Complex64) {
        let o = self.offset(p, q, r, s);
        self.data[o] += v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum_{pqrs} self[pqrs] * other[pqrs]` (no conjugation).
    pub fn contract(&self, other: &Tensor4) -> Complex64 {
        assert_eq!(self.n, other.n, "tensor dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Indices in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |p| (0..n).flat_map(move |q| (0..n).flat_map(move |r| (0..n).map(move |s| (p, q, r, s)))))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Coefficients of the reduced Hamiltonian in Hartree.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoElectronIntegrals {
    pub n_spin_orbitals: usize,
    pub k2: Tensor4,
    pub core_energy: f64,
}

impl TwoElectronIntegrals {
    pub fn zeros(n_spin_orbitals: usize) -> Self {
        TwoElectronIntegrals {
            n_spin_orbitals,
            k2: Tensor4::zeros(n_spin_orbitals),
            core_energy: 0.0,
        }
    }

    /// Converts spatial-orbital chemist-notation integrals to the spin-orbital
    /// reduced Hamiltonian for `n_electrons` electrons.
    ///
    /// The two-electron part is `K[p][q][r][s] = (pr|qs) / 2` when the spins
    /// of `p, r` and of `q, s` agree; the one-electron part enters as
    /// `K[p][t][q][t] += h_pq / (N - 1)` for every spin orbital `t`.
    pub fn from_fcidump(f: &Fcidump, n_electrons: usize) -> Result<Self> {
        if n_electrons < 2 {
            return Err(Error::InvalidParameter(format!(
                "folding one-electron integrals needs at least 2 electrons, got {n_electrons}"
            )));
        }
        if n_electrons > 2 * f.norb {
            return Err(Error::InvalidParameter(format!(
                "{n_electrons} electrons do not fit in {} spin orbitals",
                2 * f.norb
            )));
        }
        let norb = f.norb;
        let n = 2 * norb;
        let spatial = |p: usize| p % norb;
        let spin = |p: usize| p / norb;
        let fold = 1.0 / (n_electrons as f64 - 1.0);
        let mut out = TwoElectronIntegrals::zeros(n);
        out.core_energy = f.core_energy;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    if spin(p) != spin(r) {
                        continue;
                    }
                    for s in 0..n {
                        if spin(q) != spin(s) {
                            continue;
                        }
                        let v = 0.5 * f.eri(spatial(p), spatial(r), spatial(q), spatial(s));
                        if v != 0.0 {
                            out.k2.add(p, q, r, s, Complex64::new(v, 0.0));
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                if spin(p) != spin(q) {
                    continue;
                }
                let h = f.h1(spatial(p), spatial(q)) * fold;
                if h == 0.0 {
                    continue;
                }
                for t in 0..n {
                    out.k2.add(p, t, q, t, Complex64::new(h, 0.0));
                }
            }
        }
        Ok(out)
    }

    /// Checks `K[p][q][r][s] == conj(K[r][s][p][q])`.
    pub fn check_hermitian(&self) -> Result<()> {
        let k = &self.k2;
        for (p, q, r, s) in k.indices() {
            let value = k.get(p, q, r, s);
            let partner = k.get(r, s, p, q);
            let tol = HERMITICITY_TOL * (1.0 + value.norm());
            if (value - partner.conj()).norm() > tol {
                return Err(Error::NonHermitianIntegrals {
                    p,
                    q,
                    r,
                    s,
                    value,
                    partner,
                });
            }
        }
        Ok(())
    }
}

/// A normal-ordered product `coefficient * a+_{c0} a+_{c1} ... a_{a0} a_{a1} ...`
/// with strictly increasing indices inside each group.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    creations: Vec<usize>,
    annihilations: Vec<usize>,
    coefficient: Complex64,
}

/// Sorts ascending, returning the permutation parity, or `None` when an index
/// repeats (the product then vanishes).
fn sort_with_parity(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

impl FermionTerm {
    /// Builds `coefficient * (prod a+_c) (prod a_a)` with operators in the given
    /// product order, reordering each group and absorbing the sign. Returns
    /// `None` if the product is identically zero.
    pub fn normal_ordered(
        creations: &[usize],
        annihilations: &[usize],
        coefficient: impl Into<Complex64>,
    ) -> Option<Self> {
        let (c, odd_c) = sort_with_parity(creations)?;
        let (a, odd_a) = sort_with_parity(annihilations)?;
        let sign = if odd_c ^ odd_a { -1.0 } else { 1.0 };
        Some(FermionTerm {
            creations: c,
            annihilations: a,
            coefficient: coefficient.into() * sign,
        })
    }

    pub fn creations(&self) -> &[usize] {
        &self.creations
    }

    pub fn annihilations(&self) -> &[usize] {
        &self.annihilations
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    pub fn scaled(&self, f: impl Into<Complex64>) -> Self {
        FermionTerm {
            coefficient: self.coefficient * f.into(),
            ..self.clone()
        }
    }

    pub fn adjoint(&self) -> Self {
        let c: Vec<usize> = self.annihilations.iter().rev().copied().collect();
        let a: Vec<usize> = self.creations.iter().rev().copied().collect();
        FermionTerm::normal_ordered(&c, &a, self.coefficient.conj()).expect("adjoint of a nonzero term is nonzero")
    }

    pub fn max_index(&self) -> Option<usize> {
        self.creations.iter().chain(&self.annihilations).copied().max()
    }

    /// Action on an occupation-number basis state, acting right to left.
    /// Returns the image index and sign, or `None` if the state is annihilated.
    pub fn apply_to_basis(&self, mut b: usize) -> Option<(usize, f64)> {
        let mut sign = 1.0;
        for &p in self.annihilations.iter().rev() {
            let bit = 1usize << p;
            if b & bit == 0 {
                return None;
            }
            if (b & (bit - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            b ^= bit;
        }
        for &p in self.creations.iter().rev() {
            let bit = 1usize << p;
            if b & bit != 0 {
                return None;
            }
            if (b & (bit - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            b ^= bit;
        }
        Some((b, sign))
    }

    /// Applies the term (including its coefficient) to a dense amplitude
    /// vector over `2^n` occupation states.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); amps.len()];
        for (b, &a) in amps.iter().enumerate() {
            if a == Complex64::default() {
                continue;
            }
            if let Some((b2, sign)) = self.apply_to_basis(b) {
                out[b2] += a * self.coefficient * sign;
            }
        }
        out
    }
}

impl std::fmt::Display for FermionTerm {
    /// Operator part only, e.g. `1^ 3^ 0 2`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ops: Vec<String> = self
            .creations
            .iter()
            .map(|p| format!("{p}^"))
            .chain(self.annihilations.iter().map(|p| p.to_string()))
            .collect();
        f.write_str(&ops.join(" "))
    }
}

impl std::str::FromStr for FermionTerm {
    type Err = Error;

    /// Parses a product such as `1^ 3^ 2 0` (`p^` creates, `p` annihilates,
    /// creations first) into a unit-coefficient normal-ordered term.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidLabel {
            label: s.to_string(),
            reason: reason.to_string(),
        };
        let mut creations = Vec::new();
        let mut annihilations = Vec::new();
        for tok in s.split_whitespace() {
            let (digits, create) = match tok.strip_suffix('^') {
                Some(d) => (d, true),
                None => (tok, false),
            };
            let p: usize = digits.parse().map_err(|_| bad("expected `p^` or `p`"))?;
            if create {
                if !annihilations.is_empty() {
                    return Err(bad("creation operators must precede annihilations"));
                }
                creations.push(p);
            } else {
                annihilations.push(p);
            }
        }
        if creations.is_empty() && annihilations.is_empty() {
            return Err(bad("empty operator product"));
        }
        FermionTerm::normal_ordered(&creations, &annihilations, 1.0)
            .ok_or_else(|| bad("repeated index makes the product vanish"))
    }
}

fn ladder(p: usize, n: usize, creation: bool) -> PauliSum {
    let z_string = (1u64 << p) - 1;
    let bit = 1u64 << p;
    let x = PauliString::new(n, bit, z_string, Phase::ONE).expect("index checked");
    let y = PauliString::new(n, bit, z_string | bit, Phase::ONE).expect("index checked");
    let y_coeff = if creation {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    let mut s = PauliSum::zero(n);
    s.add_term(x, Complex64::new(0.5, 0.0));
    s.add_term(y, y_coeff);
    s
}

/// Jordan-Wigner image: `a+_p -> Z_{<p} (X_p - i Y_p) / 2` and
/// `a_p -> Z_{<p} (X_p + i Y_p) / 2`.
pub fn jordan_wigner(term: &FermionTerm, n_spin_orbitals: usize) -> Result<PauliSum> {
    if let Some(m) = term.max_index() {
        if m >= n_spin_orbitals {
            return Err(Error::IndexOutOfRange {
                what: "spin orbitals",
                index: m,
                len: n_spin_orbitals,
            });
        }
    }
    let n = n_spin_orbitals;
    let mut acc = PauliSum::identity(n, term.coefficient);
    for &p in &term.creations {
        acc = acc.multiply(&ladder(p, n, true))?;
    }
    for &p in &term.annihilations {
        acc = acc.multiply(&ladder(p, n, false))?;
    }
    Ok(acc)
}

pub fn jordan_wigner_sum<'a>(
    terms: impl IntoIterator<Item = &'a FermionTerm>,
    n_spin_orbitals: usize,
) -> Result<PauliSum> {
    let mut out = PauliSum::zero(n_spin_orbitals);
    for t in terms {
        for (p, c) in jordan_wigner(t, n_spin_orbitals)?.iter() {
            out.add_term(p, c);
        }
    }
    Ok(out)
}

/// Assembles the qubit Hamiltonian, core energy included as identity.
pub fn build_hamiltonian(integrals: &TwoElectronIntegrals) -> Result<PauliSum> {
    integrals.check_hermitian()?;
    let n = integrals.n_spin_orbitals;
    let mut terms = Vec::new();
    for (p, q, r, s) in integrals.k2.indices() {
        let k = integrals.k2.get(p, q, r, s);
        if k == Complex64::default() {
            continue;
        }
        if let Some(t) = FermionTerm::normal_ordered(&[p, q], &[s, r], k) {
            terms.push(t);
        }
    }
    let mut h = jordan_wigner_sum(&terms, n)?;
    if integrals.core_energy != 0.0 {
        h.add_term(PauliString::identity(n), Complex64::new(integrals.core_energy, 0.0));
    }
    // rounding in the expansion can leave ~1e-17 imaginary residue
    Ok(h.hermitian_part())
}

fn number_term(i: usize) -> FermionTerm {
    FermionTerm::normal_ordered(&[i], &[i], 1.0).expect("single index")
}

fn hopping(i: usize, j: usize) -> FermionTerm {
    FermionTerm::normal_ordered(&[i], &[j], 1.0).expect("single index")
}

/// Measurable Hermitian observables for every 1-RDM element `<a+_i a_j>`.
///
/// `D_ii` is the number operator. For `i < j`, `D_ij_herm` is
/// `a+_i a_j + a+_j a_i` and `D_ij_anti` is `i (a+_i a_j - a+_j a_i)`, so that
/// `D_ij = (<D_ij_herm> - i <D_ij_anti>) / 2`.
pub fn rdm_observables(n_spin_orbitals: usize) -> Vec<(String, PauliSum)> {
    let n = n_spin_orbitals;
    let jw = |t: &FermionTerm| jordan_wigner(t, n).expect("indices in range");
    let mut out: Vec<(String, PauliSum)> = (0..n).map(|i| (format!("D_{i}{i}"), jw(&number_term(i)))).collect();
    for i in 0..n {
        for j in i + 1..n {
            let fwd = jw(&hopping(i, j));
            let bwd = jw(&hopping(j, i));
            let herm = fwd.add(&bwd).expect("same size");
            let anti = fwd.sub(&bwd).expect("same size").scale(Complex64::new(0.0, 1.0));
            out.push((format!("D_{i}{j}_herm"), herm));
            out.push((format!("D_{i}{j}_anti"), anti));
        }
    }
    out
}

/// Hermitian pair for the 2-RDM element `<a+_i a+_j a_l a_k>`:
/// `(T + T^dagger, i (T - T^dagger))`. `None` when the element vanishes
/// identically.
pub fn two_rdm_observables(n_spin_orbitals: usize, [i, j, k, l]: [usize; 4]) -> Result<Option<(PauliSum, PauliSum)>> {
    let Some(t) = FermionTerm::normal_ordered(&[i, j], &[l, k], 1.0) else {
        return Ok(None);
    };
    let fwd = jordan_wigner(&t, n_spin_orbitals)?;
    let bwd = fwd.adjoint();
    Ok(Some((fwd.add(&bwd)?, fwd.sub(&bwd)?.scale(Complex64::new(0.0, 1.0)))))
}

/// Dense 1-RDM `D[i][j] = <psi| a+_i a_j |psi>` evaluated directly on
/// amplitudes.
pub fn one_rdm(amps: &[Complex64], n_spin_orbitals: usize) -> Vec<Vec<Complex64>> {
    let n = n_spin_orbitals;
    let mut d = vec![vec![Complex64::default(); n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let image = hopping(i, j).apply(amps);
            *slot = amps.iter().zip(&image).map(|(a, b)| a.conj() * b).sum();
        }
    }
    d
}

pub fn number_operator(n_spin_orbitals: usize) -> PauliSum {
    let terms: Vec<FermionTerm> = (0..n_spin_orbitals).map(number_term).collect();
    jordan_wigner_sum(&terms, n_spin_orbitals).expect("indices in range")
}

/// `S_z` for spin-block ordering (first half alpha, second half beta).
pub fn sz_operator(n_spin_orbitals: usize) -> Result<PauliSum> {
    if !n_spin_orbitals.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "spin-block ordering needs an even number of spin orbitals, got {n_spin_orbitals}"
        )));
    }
    let norb = n_spin_orbitals / 2;
    let terms: Vec<FermionTerm> = (0..n_spin_orbitals)
        .map(|p| number_term(p).scaled(if p < norb { 0.5 } else { -0.5 }))
        .collect();
    jordan_wigner_sum(&terms, n_spin_orbitals)
}

/// Numbers of alpha and beta electrons for `n_electrons` with `2 S_z = ms2`.
pub fn spin_populations(n_spin_orbitals: usize, n_electrons: usize, ms2: i64) -> Result<(usize, usize)> {
    let norb = n_spin_orbitals / 2;
    let twice_alpha = n_electrons as i64 + ms2;
    if !n_spin_orbitals.is_multiple_of(2) || twice_alpha < 0 || twice_alpha % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "no spin sector with N = {n_electrons}, 2Sz = {ms2} on {n_spin_orbitals} spin orbitals"
        )));
    }
    let n_alpha = (twice_alpha / 2) as usize;
    let n_beta = n_electrons
        .checked_sub(n_alpha)
        .ok_or_else(|| Error::InvalidParameter(format!("2Sz = {ms2} exceeds N = {n_electrons}")))?;
    if n_alpha > norb || n_beta > norb {
        return Err(Error::InvalidParameter(format!(
            "N = {n_electrons}, 2Sz = {ms2} does not fit in {norb} spatial orbitals"
        )));
    }
    Ok((n_alpha, n_beta))
}

/// Basis index of the aufbau determinant: lowest alpha then lowest beta
/// orbitals occupied. For H2 in a minimal basis this is `|0101>` (index 5).
pub fn hartree_fock_index(n_spin_orbitals: usize, n_electrons: usize, ms2: i64) -> Result<usize> {
    let (na, nb) = spin_populations(n_spin_orbitals, n_electrons, ms2)?;
    let norb = n_spin_orbitals / 2;
    let alpha = (1usize << na) - 1;
    let beta = ((1usize << nb) - 1) << norb;
    Ok(alpha | beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Oracle: JW matrices assembled from explicit 2x2 factors with Kronecker
    // products, independent of the symplectic Pauli code.
    fn factor(kind: char) -> DMatrix<Complex64> {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        match kind {
            'I' => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            'Z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
            // |0><1| lowers occupation: annihilation
            'a' => DMatrix::from_row_slice(2, 2, &[o, l, o, o]),
            // |1><0| creation
            'c' => DMatrix::from_row_slice(2, 2, &[o, o, l, o]),
            _ => unreachable!(),
        }
    }

    fn ladder_matrix(p: usize, n: usize, creation: bool) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
        for q in (0..n).rev() {
            let k = if q < p {
                'Z'
            } else if q == p {
                if creation {
                    'c'
                } else {
                    'a'
                }
            } else {
                'I'
            };
            m = m.kronecker(&factor(k));
        }
        m
    }

    fn term_matrix(cre: &[usize], ann: &[usize], n: usize, coeff: Complex64) -> DMatrix<Complex64> {
        let dim = 1 << n;
        let mut m = DMatrix::<Complex64>::identity(dim, dim) * coeff;
        for &p in cre {
            m *= ladder_matrix(p, n, true);
        }
        for &p in ann {
            m *= ladder_matrix(p, n, false);
        }
        m
    }

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn creation_on_orbital_zero() {
        let t = FermionTerm::normal_ordered(&[0], &[], 1.0).unwrap();
        let s = jordan_wigner(&t, 4).unwrap();
        let expect = PauliSum::from_labels(4, [(c(0.5, 0.0), "IIIX"), (c(0.0, -0.5), "IIIY")]).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn number_operator_identity() {
        let s = jordan_wigner(&number_term(0), 4).unwrap();
        let expect = PauliSum::from_labels(4, [(0.5, "IIII"), (-0.5, "IIIZ")]).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn double_excitation_matches_dense_oracle() {
        // a+_1 a+_3 a_2 a_0
        let t = FermionTerm::normal_ordered(&[1, 3], &[2, 0], 1.0).unwrap();
        let s = jordan_wigner(&t, 4).unwrap();
        assert_eq!(s.len(), 16);
        let oracle = term_matrix(&[1, 3], &[2, 0], 4, c(1.0, 0.0));
        assert!(close(&s.to_dense(), &oracle, 1e-14));
    }

    #[test]
    fn out_of_range_index_rejected() {
        let t = FermionTerm::normal_ordered(&[4], &[0], 1.0).unwrap();
        assert!(matches!(
            jordan_wigner(&t, 4),
            Err(Error::IndexOutOfRange { index: 4, .. })
        ));
    }

    #[test]
    fn normal_ordering_signs() {
        let t = FermionTerm::normal_ordered(&[3, 1], &[0, 2], 2.0).unwrap();
        assert_eq!(t.creations(), &[1, 3]);
        assert_eq!(t.annihilations(), &[0, 2]);
        assert_eq!(t.coefficient(), c(-2.0, 0.0));
        assert!(FermionTerm::normal_ordered(&[1, 1], &[], 1.0).is_none());
    }

    #[test]
    fn direct_action_matches_jordan_wigner() {
        let n = 4;
        let t = FermionTerm::normal_ordered(&[0, 3], &[1, 2], c(0.3, -0.7)).unwrap();
        let dense = jordan_wigner(&t, n).unwrap().to_dense();
        for b in 0..1 << n {
            let mut e = vec![Complex64::default(); 1 << n];
            e[b] = c(1.0, 0.0);
            let image = t.apply(&e);
            for (row, v) in image.iter().enumerate() {
                assert!((dense[(row, b)] - v).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn anticommutation_relations() {
        let n = 4;
        let dim = 1 << n;
        let id = DMatrix::<Complex64>::identity(dim, dim);
        for p in 0..n {
            for q in 0..n {
                let a = jordan_wigner(&FermionTerm::normal_ordered(&[], &[p], 1.0).unwrap(), n)
                    .unwrap()
                    .to_dense();
                let ad = jordan_wigner(&FermionTerm::normal_ordered(&[q], &[], 1.0).unwrap(), n)
                    .unwrap()
                    .to_dense();
                let anti = &a * &ad + &ad * &a;
                let expect = if p == q { id.clone() } else { id.clone() * c(0.0, 0.0) };
                assert!(close(&anti, &expect, 1e-14), "p={p} q={q}");
                // and the oracle factors agree with the JW images
                assert!(close(&a, &ladder_matrix(p, n, false), 1e-14));
            }
        }
    }

    #[test]
    fn zero_integrals_give_empty_hamiltonian() {
        let h = build_hamiltonian(&TwoElectronIntegrals::zeros(4)).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn single_pair_interaction() {
        let mut ints = TwoElectronIntegrals::zeros(4);
        ints.k2.set(0, 1, 0, 1, c(1.0, 0.0));
        let h = build_hamiltonian(&ints).unwrap();
        // a+_0 a+_1 a_1 a_0 = n_0 n_1
        let oracle = term_matrix(&[0, 1], &[1, 0], 4, c(1.0, 0.0));
        assert!(close(&h.to_dense(), &oracle, 1e-14));
        let n0n1 = jordan_wigner(&number_term(0), 4)
            .unwrap()
            .multiply(&jordan_wigner(&number_term(1), 4).unwrap())
            .unwrap();
        assert!(close(&h.to_dense(), &n0n1.to_dense(), 1e-14));
    }

    #[test]
    fn non_hermitian_integrals_name_the_index() {
        let mut ints = TwoElectronIntegrals::zeros(4);
        ints.k2.set(0, 1, 2, 3, c(1.0, 0.0));
        match build_hamiltonian(&ints) {
            Err(Error::NonHermitianIntegrals { p, q, r, s, .. }) => {
                assert_eq!((p, q, r, s), (0, 1, 2, 3));
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        ints.k2.set(2, 3, 0, 1, c(1.0, 0.0));
        assert!(build_hamiltonian(&ints).is_ok());
    }

    #[test]
    fn rdm_observable_counts_and_labels() {
        let obs = rdm_observables(4);
        assert_eq!(obs.len(), 16);
        assert_eq!(obs.iter().filter(|(l, _)| l.len() == 4).count(), 4);
        assert_eq!(obs[0].0, "D_00");
        let expect = PauliSum::from_labels(4, [(0.5, "IIII"), (-0.5, "IIIZ")]).unwrap();
        assert_eq!(obs[0].1, expect);
        for (label, o) in &obs {
            assert!(o.is_hermitian(1e-14), "{label}");
        }
    }

    #[test]
    fn term_labels_round_trip() {
        let t: FermionTerm = "1^ 3^ 2 0".parse().unwrap();
        assert_eq!(t.creations(), &[1, 3]);
        assert_eq!(t.annihilations(), &[0, 2]);
        assert_eq!(t.coefficient(), c(-1.0, 0.0));
        assert_eq!(t.to_string(), "1^ 3^ 0 2");
        assert!("1 2^".parse::<FermionTerm>().is_err());
        assert!("1^ 1^ 0 2".parse::<FermionTerm>().is_err());
        assert!("x^".parse::<FermionTerm>().is_err());
    }

    #[test]
    fn one_rdm_of_determinant() {
        let mut amps = vec![Complex64::default(); 16];
        amps[0b0101] = c(1.0, 0.0);
        let d = one_rdm(&amps, 4);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let expect = if i == j && (i == 0 || i == 2) { 1.0 } else { 0.0 };
                assert_eq!(x, c(expect, 0.0));
            }
        }
    }

    #[test]
    fn hartree_fock_determinant() {
        assert_eq!(hartree_fock_index(4, 2, 0).unwrap(), 0b0101);
        assert_eq!(hartree_fock_index(6, 3, 1).unwrap(), 0b001011);
        assert!(hartree_fock_index(4, 2, 1).is_err());
        assert!(hartree_fock_index(4, 5, 1).is_err());
    }

    #[test]
    fn two_rdm_pair_is_hermitian() {
        let (a, b) = two_rdm_observables(4, [0, 2, 0, 2]).unwrap().unwrap();
        assert!(a.is_hermitian(1e-14) && b.is_hermitian(1e-14));
        assert!(two_rdm_observables(4, [1, 1, 0, 2]).unwrap().is_none());
    }
}
