//! Correlation-efficient time evolution.
//!
//! Every step builds a target `chi = exp(-i H eps) psi(t)` and re-prepares it
//! from a single determinant `phi_0` with a product of two-body unitaries
//! grown one layer at a time along the fidelity gradient, until
//! `|<phi_m|chi>|^2 >= 1 - delta`.

mod pool;
mod tdcse;

pub use pool::{build_pool, GeneratorPool, PoolOptions};
pub use tdcse::{extrapolate_to_zero, tdcse_residuals, TdcseEvaluation};

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::circuit::{trotterize, Circuit};
use crate::error::{Error, Result};
use crate::evolve::{ExactPropagator, PropagatorConfig};
use crate::pauli::PauliSum;
use crate::rng::{derive_seed, rng_from_seed};
use crate::statevector::StateVector;

/// Rotation by `theta_k` on a generator is dropped when
/// `|theta_k| < LAYER_PRUNE * max_k |theta_k|`.
pub const LAYER_PRUNE: f64 = 1e-12;

/// `|<a|b>|^2`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Fidelity as a device would measure it: prepare `target`, undo the
/// rotations of `ansatz` in reverse order and read the probability of the
/// prepared determinant.
pub fn fidelity_by_inversion(ansatz: &Circuit, target: &StateVector) -> Result<f64> {
    let reference = ansatz.prep().unwrap_or(0);
    let mut state = target.clone();
    ansatz.without_prep().inverse()?.apply_to(&mut state)?;
    Ok(state.amplitudes()[reference].norm_sqr().min(1.0))
}

/// Coefficients of one ansatz layer `prod_k exp(i epsilon theta_k G_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzLayer {
    pub coefficients: Vec<f64>,
    pub epsilon: f64,
}

impl AnsatzLayer {
    /// Product formula for the layer; generators are applied in pool order.
    pub fn circuit(&self, pool: &GeneratorPool, substep: f64) -> Result<Circuit> {
        if self.coefficients.len() != pool.len() {
            return Err(Error::InvalidParameter(format!(
                "layer has {} coefficients for a pool of {}",
                self.coefficients.len(),
                pool.len()
            )));
        }
        if !self.epsilon.is_finite() || self.coefficients.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("layer coefficients must be finite".into()));
        }
        let largest = self.coefficients.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let mut circuit = Circuit::new(pool.n_qubits());
        for (theta, g) in self.coefficients.iter().zip(pool.generators()) {
            if theta.abs() <= LAYER_PRUNE * largest || *theta == 0.0 {
                continue;
            }
            let generator = g.scale(Complex64::i());
            circuit.append(&trotterize(&generator, self.epsilon * theta, substep)?)?;
        }
        Ok(circuit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientMode {
    Exact,
    /// Parameter-shift estimates with `shots` samples per shifted circuit.
    Shots {
        shots: usize,
        seed: u64,
    },
}

/// How far to move along the gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSearch {
    /// Always step by the given scale.
    Fixed(f64),
    /// Start at 1 and halve until the fidelity increases.
    Backtracking,
    /// Backtracking, then expansion and a golden-section maximization of the
    /// fidelity along the gradient direction.
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferencePolicy {
    /// Always start from this determinant.
    Fixed(usize),
    /// Start from the most probable determinant of the target.
    MostProbable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Full,
    Largest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeteConfig {
    pub delta_cutoff: f64,
    pub m_max: usize,
    pub gradient: GradientMode,
    pub line_search: LineSearch,
    pub reference: ReferencePolicy,
    pub selection: Selection,
    /// Gradients with every `|g_k|` below this count as vanishing.
    pub gradient_tol: f64,
    /// Substep for compiling layers and fallback steps.
    pub substep: f64,
}

impl CeteConfig {
    pub fn exact(reference: ReferencePolicy) -> Self {
        CeteConfig {
            delta_cutoff: 1e-6,
            m_max: 8,
            gradient: GradientMode::Exact,
            line_search: LineSearch::Refined,
            reference,
            selection: Selection::Full,
            gradient_tol: 1e-8,
            substep: 0.03,
        }
    }

    pub fn shots(reference: ReferencePolicy, shots: usize, seed: u64) -> Self {
        CeteConfig {
            delta_cutoff: 1e-3,
            gradient: GradientMode::Shots { shots, seed },
            ..Self::exact(reference)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_cutoff > 0.0 && self.delta_cutoff < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_cutoff must lie in (0, 1), got {}",
                self.delta_cutoff
            )));
        }
        if self.m_max == 0 {
            return Err(Error::InvalidParameter("m_max must be at least 1".into()));
        }
        if let GradientMode::Shots { shots: 0, .. } = self.gradient {
            return Err(Error::InvalidParameter("gradient shots must be at least 1".into()));
        }
        if let LineSearch::Fixed(s) = self.line_search {
            if !(s.is_finite() && s != 0.0) {
                return Err(Error::InvalidParameter(format!("fixed line-search step {s}")));
            }
        }
        if self.substep.is_nan() || self.substep <= 0.0 {
            return Err(Error::InvalidParameter(format!("substep {}", self.substep)));
        }
        Ok(())
    }
}

/// Gradient components with standard errors (zero in exact mode).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    pub values: Vec<f64>,
    pub std_errs: Vec<f64>,
}

impl GradientEstimate {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    /// True when no component is distinguishable from zero: below `tol` and,
    /// for sampled estimates, within three standard errors.
    pub fn vanishes(&self, tol: f64) -> bool {
        self.values
            .iter()
            .zip(&self.std_errs)
            .all(|(g, se)| g.abs() < tol.max(3.0 * se))
    }
}

/// `dF/dtheta_k` at `theta = 0` for a new layer `exp(i theta_k G_k)` appended
/// to `ansatz`, with `F = |<chi|U|phi_0>|^2`.
///
/// Exact mode evaluates `2 Re[<phi|chi> <chi| i G_k |phi>]`. Shots mode sums
/// `c_j [F(+pi/4) - F(-pi/4)]` over the Pauli terms `c_j P_j` of `G_k`,
/// each shifted fidelity sampled through the inversion circuit.
pub fn fidelity_gradient(
    ansatz: &Circuit,
    target: &StateVector,
    pool: &GeneratorPool,
    mode: GradientMode,
) -> Result<GradientEstimate> {
    if pool.is_empty() {
        return Err(Error::InvalidParameter("generator pool is empty".into()));
    }
    if pool.n_qubits() != target.n_qubits() {
        return Err(Error::QubitMismatch {
            left: pool.n_qubits(),
            right: target.n_qubits(),
        });
    }
    match mode {
        GradientMode::Exact => {
            let phi = ansatz.execute(None, 0)?;
            let overlap = phi.inner(target)?;
            let values = pool
                .generators()
                .par_iter()
                .map(|g| {
                    let m = target.matrix_element(g, &phi)?;
                    Ok(2.0 * (overlap * Complex64::i() * m).re)
                })
                .collect::<Result<Vec<f64>>>()?;
            let std_errs = vec![0.0; values.len()];
            Ok(GradientEstimate { values, std_errs })
        }
        GradientMode::Shots { shots, seed } => {
            if shots == 0 {
                return Err(Error::InvalidParameter("gradient shots must be at least 1".into()));
            }
            let reference = ansatz.prep().unwrap_or(0);
            let undo = ansatz.without_prep().inverse()?;
            let results = pool
                .generators()
                .par_iter()
                .enumerate()
                .map(|(k, g)| shot_gradient(g, k, target, &undo, reference, shots, seed))
                .collect::<Result<Vec<(f64, f64)>>>()?;
            let (values, std_errs) = results.into_iter().unzip();
            Ok(GradientEstimate { values, std_errs })
        }
    }
}

fn shot_gradient(
    g: &PauliSum,
    k: usize,
    target: &StateVector,
    undo: &Circuit,
    reference: usize,
    shots: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut value = 0.0;
    let mut var = 0.0;
    for (j, (p, c)) in g.iter().enumerate() {
        let c = c.re;
        let mut sampled = [0.0; 2];
        for (slot, sign) in [1.0, -1.0].into_iter().enumerate() {
            // the inversion path applies exp(-i theta P), a rotation by 2 theta,
            // with theta = sign pi/4
            let mut state = target.clone();
            state.apply_pauli_rotation(&p, sign * std::f64::consts::FRAC_PI_2)?;
            undo.apply_to(&mut state)?;
            let prob = state.amplitudes()[reference].norm_sqr().clamp(0.0, 1.0);
            let mut rng = rng_from_seed(derive_seed(seed, &[k as u64, j as u64, slot as u64]));
            let hits = Binomial::new(shots as u64, prob)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .sample(&mut rng);
            sampled[slot] = hits as f64 / shots as f64;
        }
        let [plus, minus] = sampled;
        value += c * (plus - minus);
        var += c * c * (plus * (1.0 - plus) + minus * (1.0 - minus)) / shots as f64;
    }
    Ok((value, var.sqrt()))
}

/// Outcome of one CETE time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub time: f64,
    pub reference: usize,
    pub layers: Vec<AnsatzLayer>,
    /// `F_0, F_1, ...` after each accepted layer.
    pub fidelity_history: Vec<f64>,
    pub fidelity: f64,
    pub depth: usize,
    pub fallback: bool,
}

impl StepRecord {
    pub fn m(&self) -> usize {
        self.layers.len()
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: StateVector,
    pub circuit: Circuit,
    pub record: StepRecord,
}

/// Per-step records, states and circuits of a CETE run.
#[derive(Debug, Clone, Default)]
pub struct CeteTrajectory {
    pub records: Vec<StepRecord>,
    pub states: Vec<StateVector>,
    pub circuits: Vec<Circuit>,
}

impl CeteTrajectory {
    pub fn depths(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.depth).collect()
    }
}

/// CETE driver for a fixed Hamiltonian and pool.
#[derive(Debug, Clone)]
pub struct Cete {
    h: PauliSum,
    propagator: ExactPropagator,
    pool: GeneratorPool,
    cfg: CeteConfig,
}

impl Cete {
    pub fn new(h: &PauliSum, pool: GeneratorPool, cfg: CeteConfig) -> Result<Self> {
        cfg.validate()?;
        if pool.n_qubits() != h.n_qubits() {
            return Err(Error::QubitMismatch {
                left: h.n_qubits(),
                right: pool.n_qubits(),
            });
        }
        Ok(Cete {
            h: h.clone(),
            propagator: ExactPropagator::new(h)?,
            pool,
            cfg,
        })
    }

    pub fn config(&self) -> &CeteConfig {
        &self.cfg
    }

    pub fn pool(&self) -> &GeneratorPool {
        &self.pool
    }

    pub fn propagator(&self) -> &ExactPropagator {
        &self.propagator
    }

    fn search(&self, f0: f64, eval: impl Fn(f64) -> Result<f64>) -> Result<Option<(f64, f64)>> {
        let backtrack = || -> Result<Option<(f64, f64)>> {
            let mut s = 1.0;
            for _ in 0..=20 {
                let fs = eval(s)?;
                if fs > f0 {
                    return Ok(Some((s, fs)));
                }
                s *= 0.5;
            }
            Ok(None)
        };
        match self.cfg.line_search {
            LineSearch::Fixed(s) => Ok(Some((s, eval(s)?))),
            LineSearch::Backtracking => backtrack(),
            LineSearch::Refined => {
                let Some((mut s, mut fs)) = backtrack()? else {
                    return Ok(None);
                };
                let mut lo = 0.0;
                for _ in 0..40 {
                    let f2 = eval(2.0 * s)?;
                    if f2 <= fs {
                        break;
                    }
                    lo = s;
                    s *= 2.0;
                    fs = f2;
                }
                let (mut a, mut b) = (lo, 2.0 * s);
                let ratio = (5f64.sqrt() - 1.0) / 2.0;
                let mut x1 = b - ratio * (b - a);
                let mut x2 = a + ratio * (b - a);
                let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
                for _ in 0..100 {
                    if (b - a) <= 1e-13 * b.abs().max(1e-300) {
                        break;
                    }
                    if f1 < f2 {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + ratio * (b - a);
                        f2 = eval(x2)?;
                    } else {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - ratio * (b - a);
                        f1 = eval(x1)?;
                    }
                }
                let (xb, fb) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
                Ok(Some(if fb > fs { (xb, fb) } else { (s, fs) }))
            }
        }
    }

    /// One step of length `epsilon` from `psi_t`, whose preparation circuit
    /// is `psi_circuit` (used by the Trotter fallback). `step` seeds the
    /// sampled gradients.
    pub fn step(
        &self,
        psi_t: &StateVector,
        psi_circuit: &Circuit,
        epsilon: f64,
        time: f64,
        step: usize,
    ) -> Result<StepOutcome> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time step must be positive, got {epsilon}"
            )));
        }
        let n = self.h.n_qubits();
        let chi = self.propagator.propagate(psi_t, epsilon)?;
        let reference = match self.cfg.reference {
            ReferencePolicy::Fixed(index) => index,
            ReferencePolicy::MostProbable => chi.most_probable(),
        };
        let mut base = Circuit::with_prep(n, reference)?;
        let mut fallback = false;
        let mut layers: Vec<AnsatzLayer> = Vec::new();
        let mut ansatz = base.clone();
        let mut phi = ansatz.execute(None, 0)?;
        let mut history = Vec::new();
        let mut calls = 0u64;

        loop {
            let f = fidelity(&phi, &chi)?;
            history.push(f);
            if f >= 1.0 - self.cfg.delta_cutoff {
                let depth = ansatz.depth();
                return Ok(StepOutcome {
                    state: phi,
                    circuit: ansatz,
                    record: StepRecord {
                        time,
                        reference,
                        layers,
                        fidelity_history: history,
                        fidelity: f,
                        depth,
                        fallback,
                    },
                });
            }
            let mut stalled = None;
            if layers.len() >= self.cfg.m_max {
                stalled = Some(format!("no convergence within {} layers", self.cfg.m_max));
            }
            let mut accepted = None;
            if stalled.is_none() {
                let mode = match self.cfg.gradient {
                    GradientMode::Exact => GradientMode::Exact,
                    GradientMode::Shots { shots, seed } => GradientMode::Shots {
                        shots,
                        seed: derive_seed(seed, &[step as u64, calls]),
                    },
                };
                calls += 1;
                let grad = fidelity_gradient(&ansatz, &chi, &self.pool, mode)?;
                if grad.vanishes(self.cfg.gradient_tol) {
                    stalled = Some("fidelity gradient vanished".into());
                } else {
                    let mut direction = grad.values.clone();
                    if self.cfg.selection == Selection::Largest {
                        let best =
                            direction
                                .iter()
                                .enumerate()
                                .fold(0, |b, (i, g)| if g.abs() > direction[b].abs() { i } else { b });
                        for (i, g) in direction.iter_mut().enumerate() {
                            if i != best {
                                *g = 0.0;
                            }
                        }
                    }
                    let trial = |s: f64| -> Result<(Circuit, StateVector)> {
                        let layer = AnsatzLayer {
                            coefficients: direction.clone(),
                            epsilon: s,
                        };
                        let c = layer.circuit(&self.pool, self.cfg.substep)?;
                        let mut state = phi.clone();
                        c.apply_to(&mut state)?;
                        Ok((c, state))
                    };
                    let eval = |s: f64| -> Result<f64> { fidelity(&trial(s)?.1, &chi) };
                    match self.search(f, eval)? {
                        Some((s, _)) => accepted = Some((s, direction.clone(), trial(s)?)),
                        None => stalled = Some("line search found no improvement".into()),
                    }
                }
            }
            if let Some((s, direction, (c, state))) = accepted {
                layers.push(AnsatzLayer {
                    coefficients: direction,
                    epsilon: s,
                });
                ansatz.append(&c)?;
                phi = state;
                continue;
            }
            let reason = stalled.unwrap_or_default();
            if fallback {
                return Err(Error::NonConvergence {
                    time,
                    fidelity: f,
                    target: 1.0 - self.cfg.delta_cutoff,
                    reason,
                });
            }
            // sequential short-time propagation from psi_t, then keep refining
            fallback = true;
            base = psi_circuit.clone();
            let generator = self.h.scale(Complex64::new(0.0, -1.0));
            base.append(&trotterize(&generator, epsilon, self.cfg.substep)?)?;
            ansatz = base.clone();
            phi = ansatz.execute(None, 0)?;
            layers.clear();
            history.clear();
        }
    }

    /// Chains [`step`](Self::step) over the time grid of `cfg`, starting from
    /// the state prepared by `initial`.
    pub fn evolve(&self, initial: &Circuit, cfg: &PropagatorConfig) -> Result<CeteTrajectory> {
        cfg.validate()?;
        let mut state = initial.execute(None, 0)?;
        let mut circuit = initial.clone();
        let mut trajectory = CeteTrajectory::default();
        for (k, t) in cfg.times().into_iter().enumerate() {
            let out = self.step(&state, &circuit, cfg.step, t, k)?;
            state = out.state.clone();
            circuit = out.circuit.clone();
            trajectory.records.push(out.record);
            trajectory.states.push(out.state);
            trajectory.circuits.push(out.circuit);
        }
        Ok(trajectory)
    }
}
