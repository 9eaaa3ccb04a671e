//! Pauli strings in symplectic form and weighted Pauli sums.
//!
//! A [`PauliString`] is `phase * P(x, z)` where the single-qubit factor for
//! the bit pair `(x_k, z_k)` is `I` for (0, 0), `X` for (1, 0), `Z` for (0, 1)
//! and `Y` for (1, 1). The phase convention is fixed here and nowhere else:
//!
//! ```text
//! Y = i X Z        so        X Z = -i Y
//! ```
//!
//! Writing each string as `phase * i^{|x & z|} X^x Z^z` turns products into
//! bit operations, because `Z^a X^b = (-1)^{|a & b|} X^b Z^a`.
//!
//! Labels put qubit 0 in the rightmost character: `"XIZY"` is `Y` on qubit 0,
//! `Z` on qubit 1 and `X` on qubit 3.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

/// Absolute coefficient threshold below which sum terms are dropped.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn mask_for(n_qubits: usize) -> u64 {
    if n_qubits == 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

fn popcount(x: u64) -> u32 {
    x.count_ones()
}

/// A power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn conj(self) -> Self {
        Phase::from_power(-(self.0 as i64))
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => I,
            2 => Complex64::new(-1.0, 0.0),
            _ => -I,
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.0 as i64 + rhs.0 as i64)
    }
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString {
            n_qubits,
            x: 0,
            z: 0,
            phase: Phase::ONE,
        }
    }

    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64, phase: Phase) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooLarge {
                n_qubits,
                limit: MAX_QUBITS,
            });
        }
        let outside = !mask_for(n_qubits);
        if (x_mask | z_mask) & outside != 0 {
            return Err(Error::InvalidParameter(format!(
                "masks {x_mask:#x}/{z_mask:#x} have bits beyond {n_qubits} qubits"
            )));
        }
        Ok(PauliString {
            n_qubits,
            x: x_mask,
            z: z_mask,
            phase,
        })
    }

    /// A single-qubit Pauli on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::IndexOutOfRange {
                what: "qubits",
                index: qubit,
                len: n_qubits,
            });
        }
        let (x, z) = pauli.bits();
        Self::new(n_qubits, (x as u64) << qubit, (z as u64) << qubit, Phase::ONE)
    }

    /// Parses a label such as `"XIZY"`, optionally prefixed by `+`, `-`, `i`,
    /// `+i` or `-i`.
    pub fn from_label(label: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = label.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = label.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = label.strip_prefix('i') {
            (Phase::I, rest)
        } else if let Some(rest) = label.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = label.strip_prefix('+') {
            (Phase::ONE, rest)
        } else {
            (Phase::ONE, label)
        };
        let n = body.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::TooLarge {
                n_qubits: n,
                limit: MAX_QUBITS,
            });
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (pos, c) in body.chars().enumerate() {
            let qubit = n - 1 - pos;
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::InvalidLabel {
                        label: label.to_string(),
                        reason: format!("unexpected character {other:?}"),
                    })
                }
            };
            let (xb, zb) = p.bits();
            x |= (xb as u64) << qubit;
            z |= (zb as u64) << qubit;
        }
        Self::new(n, x, z, phase)
    }

    /// Label without the phase, qubit 0 rightmost.
    pub fn label(&self) -> String {
        (0..self.n_qubits).rev().map(|q| self.pauli_at(q).as_char()).collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn pauli_at(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    /// Bitmask of qubits acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        popcount(self.support()) as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// The same string with phase +1.
    pub fn unsigned(self) -> Self {
        self.with_phase(Phase::ONE)
    }

    pub fn adjoint(&self) -> Self {
        self.with_phase(self.phase.conj())
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        (popcount(self.x & other.z) + popcount(self.z & other.x)).is_multiple_of(2)
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = popcount(self.x & self.z) as i64
            + popcount(other.x & other.z) as i64
            + 2 * popcount(self.z & other.x) as i64
            - popcount(x & z) as i64
            + self.phase.0 as i64
            + other.phase.0 as i64;
        PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: Phase::from_power(k),
        }
    }

    /// Action on a computational basis state: `P |b> = factor |b'>`.
    #[inline]
    pub fn apply_to_basis(&self, b: usize) -> (usize, Complex64) {
        let b64 = b as u64;
        let k = self.phase.0 as u32 + popcount(self.x & self.z) + 2 * popcount(self.z & b64);
        (b ^ self.x as usize, Phase((k % 4) as u8).to_complex())
    }

    /// Dense `2^n x 2^n` matrix. Intended for small `n`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (row, f) = self.apply_to_basis(b);
            m[(row, b)] = f;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.0 {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.label())
    }
}

/// Storage key: ordered by `(z_mask, x_mask)`, which is also the deterministic
/// term order used by Trotterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key {
    z: u64,
    x: u64,
}

/// Weighted sum of phase-normalized Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<Key, Complex64>,
    tol: f64,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
            tol: DEFAULT_PRUNE_TOL,
        }
    }

    pub fn identity(n_qubits: usize, coeff: impl Into<Complex64>) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(PauliString::identity(n_qubits), coeff.into());
        s
    }

    pub fn from_string(p: PauliString, coeff: impl Into<Complex64>) -> Self {
        let mut s = Self::zero(p.n_qubits());
        s.add_term(p, coeff.into());
        s
    }

    /// Builds a sum from `(coefficient, label)` pairs, e.g. `(0.5, "XIZY")`.
    pub fn from_labels<'a, C: Into<Complex64>>(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (C, &'a str)>,
    ) -> Result<Self> {
        let mut s = Self::zero(n_qubits);
        for (c, label) in terms {
            let p = PauliString::from_label(label)?;
            if p.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: p.n_qubits(),
                });
            }
            s.add_term(p, c.into());
        }
        Ok(s)
    }

    /// Sets the pruning threshold and prunes immediately.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.prune();
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in `(z_mask, x_mask)` order, strings carrying phase +1.
    pub fn iter(&self) -> impl Iterator<Item = (PauliString, Complex64)> + '_ {
        self.terms.iter().map(move |(k, &c)| {
            (
                PauliString {
                    n_qubits: self.n_qubits,
                    x: k.x,
                    z: k.z,
                    phase: Phase::ONE,
                },
                c,
            )
        })
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        let c = self.terms.get(&Key { z: p.z, x: p.x }).copied().unwrap_or_default();
        // p = phase * P, so the coefficient of p is c / phase
        c * p.phase.conj().to_complex()
    }

    /// Adds `coeff * p` in place, absorbing the string's phase.
    pub fn add_term(&mut self, p: PauliString, coeff: Complex64) {
        assert_eq!(p.n_qubits, self.n_qubits, "qubit count mismatch");
        let c = coeff * p.phase.to_complex();
        let key = Key { z: p.z, x: p.x };
        let entry = self.terms.entry(key).or_default();
        *entry += c;
        if entry.norm() <= self.tol {
            self.terms.remove(&key);
        }
    }

    pub fn prune(&mut self) {
        let tol = self.tol;
        self.terms.retain(|_, c| c.norm() > tol);
    }

    fn check(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = self.clone();
        for (p, c) in other.iter() {
            out.add_term(p, c);
        }
        Ok(out)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> PauliSum {
        let f = factor.into();
        let mut out = PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(k, &c)| (*k, c * f)).collect(),
            tol: self.tol,
        };
        out.prune();
        out
    }

    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check(other)?;
        let mut out = PauliSum::zero(self.n_qubits).with_tolerance(self.tol);
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                out.add_term(a.mul_unchecked(&b), ca * cb);
            }
        }
        Ok(out)
    }

    /// `[self, other] = self * other - other * self`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.multiply(other)?.sub(&other.multiply(self)?)
    }

    /// Conjugate transpose; Pauli strings are Hermitian so only the
    /// coefficients are conjugated.
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
            tol: self.tol,
        }
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> PauliSum {
        let mut out = PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, Complex64::new(c.re, 0.0)))
                .collect(),
            tol: self.tol,
        };
        out.prune();
        out
    }

    /// `(A - A^dagger) / 2`.
    pub fn antihermitian_part(&self) -> PauliSum {
        let mut out = PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, Complex64::new(0.0, c.im)))
                .collect(),
            tol: self.tol,
        };
        out.prune();
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn is_antihermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.re.abs() <= tol)
    }

    /// True when every pair of stored strings commutes.
    pub fn terms_commute(&self) -> bool {
        let strings: Vec<PauliString> = self.iter().map(|(p, _)| p).collect();
        strings
            .iter()
            .enumerate()
            .all(|(i, a)| strings[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Dense `2^n x 2^n` matrix. Intended for small `n`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in self.iter() {
            for b in 0..dim {
                let (row, f) = p.apply_to_basis(b);
                m[(row, b)] += c * f;
            }
        }
        m
    }
}

/// One term per line: `coeff_re coeff_im label`.
impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, c) in self.iter() {
            writeln!(f, "{:?} {:?} {}", c.re, c.im, p.label())?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) format. Blank lines and lines
    /// starting with `#` are ignored; an empty input has zero qubits.
    fn from_str(s: &str) -> Result<Self> {
        let mut out: Option<PauliSum> = None;
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |reason: &str| Error::InvalidLabel {
                label: line.to_string(),
                reason: reason.to_string(),
            };
            if fields.len() != 3 {
                return Err(bad("expected `re im label`"));
            }
            let re: f64 = fields[0].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = fields[1].parse().map_err(|_| bad("bad imaginary part"))?;
            let p = PauliString::from_label(fields[2])?;
            let sum = out.get_or_insert_with(|| PauliSum::zero(p.n_qubits()));
            if sum.n_qubits != p.n_qubits() {
                return Err(Error::QubitMismatch {
                    left: sum.n_qubits,
                    right: p.n_qubits(),
                });
            }
            sum.add_term(p, Complex64::new(re, im));
        }
        Ok(out.unwrap_or_else(|| PauliSum::zero(0)))
    }
}
