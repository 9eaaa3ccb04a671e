//! Pauli-sum tomography.
//!
//! Every distinct Pauli string of a plan is measured in its own circuit
//! executions: the state is rotated into the string's eigenbasis, sampled,
//! and the ±1 eigenvalues are averaged. Observables are coefficient-weighted
//! sums of string means with independent standard errors.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::fermion::jordan_wigner;
use crate::fermion::FermionTerm;
use crate::pauli::{PauliString, PauliSum};
use crate::rng::{derive_seed, rng_from_seed};
use crate::statevector::{NoiseSpec, StateVector};
use crate::ATTOSECONDS_PER_AU;

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyPlan {
    observables: Vec<(String, PauliSum)>,
    shots_per_string: usize,
    seed: u64,
}

impl TomographyPlan {
    pub fn new(observables: Vec<(String, PauliSum)>, shots_per_string: usize, seed: u64) -> Result<Self> {
        if shots_per_string == 0 {
            return Err(Error::InvalidParameter("shots_per_string must be at least 1".into()));
        }
        let mut seen = BTreeSet::new();
        for (label, obs) in &observables {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate observable label {label:?}")));
            }
            if !obs.is_hermitian(1e-10) {
                return Err(Error::NotHermitian(format!("observable {label}")));
            }
        }
        if let Some((_, first)) = observables.first() {
            let n = first.n_qubits();
            if let Some((_, o)) = observables.iter().find(|(_, o)| o.n_qubits() != n) {
                return Err(Error::QubitMismatch {
                    left: n,
                    right: o.n_qubits(),
                });
            }
        }
        Ok(TomographyPlan {
            observables,
            shots_per_string,
            seed,
        })
    }

    /// Diagonal 1-RDM elements `D00, D11, ...` followed by the energy `E`.
    pub fn rdm_and_energy(h: &PauliSum, shots_per_string: usize, seed: u64) -> Result<Self> {
        let n = h.n_qubits();
        let mut obs = Vec::with_capacity(n + 1);
        for p in 0..n {
            let t = FermionTerm::normal_ordered(&[p], &[p], 1.0).expect("single index");
            obs.push((format!("D{p}{p}"), jordan_wigner(&t, n)?));
        }
        obs.push(("E".to_string(), h.clone()));
        Self::new(obs, shots_per_string, seed)
    }

    pub fn observables(&self) -> &[(String, PauliSum)] {
        &self.observables
    }

    pub fn labels(&self) -> Vec<&str> {
        self.observables.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn shots_per_string(&self) -> usize {
        self.shots_per_string
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Distinct non-identity strings across all observables, in `(z, x)` order.
    pub fn strings(&self) -> Vec<PauliString> {
        let mut keys = BTreeMap::new();
        for (_, o) in &self.observables {
            for (p, _) in o.iter() {
                if !p.is_identity() {
                    keys.insert((p.z_mask(), p.x_mask()), p);
                }
            }
        }
        keys.into_values().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// How expectation values are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measurement {
    /// Exact amplitudes, no sampling.
    Exact,
    /// Finite shots on the noiseless state.
    Sampled,
    /// Finite shots split across noise trajectories.
    Noisy(NoiseSpec),
}

fn combine(plan: &TomographyPlan, means: &BTreeMap<(u64, u64), Estimate>) -> Vec<(String, Estimate)> {
    plan.observables
        .iter()
        .map(|(label, o)| {
            let mut value = 0.0;
            let mut var = 0.0;
            for (p, c) in o.iter() {
                let c = c.re;
                if p.is_identity() {
                    value += c;
                    continue;
                }
                let m = means[&(p.z_mask(), p.x_mask())];
                value += c * m.value;
                var += c * c * m.std_err * m.std_err;
            }
            (
                label.clone(),
                Estimate {
                    value,
                    std_err: var.sqrt(),
                },
            )
        })
        .collect()
}

/// Sampled estimates with seeds derived from the plan seed and `time_index`.
pub fn estimate_with(
    circuit: &Circuit,
    plan: &TomographyPlan,
    measurement: Measurement,
    time_index: u64,
) -> Result<Vec<(String, Estimate)>> {
    let n = circuit.n_qubits();
    if let Some((_, o)) = plan.observables.iter().find(|(_, o)| o.n_qubits() != n) {
        return Err(Error::QubitMismatch {
            left: n,
            right: o.n_qubits(),
        });
    }
    let strings = plan.strings();
    let noiseless = match measurement {
        Measurement::Noisy(spec) => {
            spec.validate()?;
            None
        }
        _ => Some(circuit.execute(None, 0)?),
    };
    let shots = plan.shots_per_string;
    let means = strings
        .par_iter()
        .map(|p| {
            let key = (p.z_mask(), p.x_mask());
            let seed = derive_seed(plan.seed, &[time_index, key.0, key.1]);
            let est = match (measurement, &noiseless) {
                (Measurement::Exact, Some(state)) => {
                    let value = state.expectation(&PauliSum::from_string(*p, 1.0))?.re;
                    Estimate { value, std_err: 0.0 }
                }
                (Measurement::Sampled, Some(state)) => {
                    let mut rng = rng_from_seed(seed);
                    let total = sample_parity_sum(state, p, shots, None, &mut rng)?;
                    mean_estimate(total, shots)
                }
                (Measurement::Noisy(spec), _) => {
                    let trajectories = spec.trajectories.min(shots);
                    let mut total = 0i64;
                    for k in 0..trajectories {
                        let share = shots / trajectories + usize::from(k < shots % trajectories);
                        let traj_seed = derive_seed(spec.seed, &[time_index, key.0, key.1, k as u64]);
                        let state = circuit.execute(Some(&spec), traj_seed)?;
                        let mut rng = rng_from_seed(derive_seed(seed, &[k as u64]));
                        total += sample_parity_sum(&state, p, share, Some(&spec), &mut rng)?;
                    }
                    mean_estimate(total, shots)
                }
                _ => unreachable!("noiseless state is prepared for noiseless modes"),
            };
            Ok((key, est))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(combine(plan, &means))
}

/// Shot estimates of every plan observable on the state prepared by `circuit`.
pub fn estimate(
    circuit: &Circuit,
    plan: &TomographyPlan,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<(String, Estimate)>> {
    let measurement = match noise {
        Some(spec) => Measurement::Noisy(*spec),
        None => Measurement::Sampled,
    };
    estimate_with(circuit, plan, measurement, 0)
}

/// Exact expectation values of the plan observables on `state`.
pub fn exact_values(state: &StateVector, plan: &TomographyPlan) -> Result<Vec<(String, Estimate)>> {
    plan.observables
        .iter()
        .map(|(label, o)| {
            let value = state.expectation(o)?.re;
            Ok((label.clone(), Estimate { value, std_err: 0.0 }))
        })
        .collect()
}

fn sample_parity_sum(
    state: &StateVector,
    p: &PauliString,
    shots: usize,
    noise: Option<&NoiseSpec>,
    rng: &mut crate::rng::Rng,
) -> Result<i64> {
    if shots == 0 {
        return Ok(0);
    }
    let mut rotated = state.clone();
    rotated.rotate_to_eigenbasis(p)?;
    let support = p.support() as usize;
    let n = state.n_qubits();
    let mut total = 0i64;
    for mut b in rotated.sample_indices(shots, rng) {
        if let Some(spec) = noise {
            b = spec.flip_readout(b, n, rng);
        }
        total += if (b & support).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        };
    }
    Ok(total)
}

fn mean_estimate(total: i64, shots: usize) -> Estimate {
    let m = total as f64 / shots as f64;
    Estimate {
        value: m,
        std_err: ((1.0 - m * m).max(0.0) / shots as f64).sqrt(),
    }
}

/// One row of a measured time series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeseriesRow {
    pub t: f64,
    pub estimates: Vec<(String, Estimate)>,
}

impl TimeseriesRow {
    pub fn get(&self, label: &str) -> Option<Estimate> {
        self.estimates.iter().find(|(l, _)| l == label).map(|(_, e)| *e)
    }
}

/// Evaluates the plan on each `(t, circuit)`, time points in parallel.
pub fn rdm_timeseries(
    circuits: &[(f64, Circuit)],
    plan: &TomographyPlan,
    measurement: Measurement,
) -> Result<Vec<TimeseriesRow>> {
    circuits
        .par_iter()
        .enumerate()
        .map(|(k, (t, c))| {
            Ok(TimeseriesRow {
                t: *t,
                estimates: estimate_with(c, plan, measurement, k as u64)?,
            })
        })
        .collect()
}

/// Exact rows for `(t, state)` pairs.
pub fn exact_timeseries(states: &[(f64, StateVector)], plan: &TomographyPlan) -> Result<Vec<TimeseriesRow>> {
    states
        .iter()
        .map(|(t, s)| {
            Ok(TimeseriesRow {
                t: *t,
                estimates: exact_values(s, plan)?,
            })
        })
        .collect()
}

/// Writes `t, L, L_err, ...` for every label, then `t_as` and `L_clipped`
/// (clamped to `[0, 1]`) for every label starting with `D`.
pub fn write_timeseries_csv(mut out: impl Write, rows: &[TimeseriesRow]) -> std::io::Result<()> {
    let labels: Vec<String> = match rows.first() {
        Some(r) => r.estimates.iter().map(|(l, _)| l.clone()).collect(),
        None => Vec::new(),
    };
    write_timeseries_header(&mut out, &labels)?;
    for row in rows {
        let mut fields = vec![fmt_num(row.t)];
        for (_, e) in &row.estimates {
            fields.push(fmt_num(e.value));
            fields.push(fmt_num(e.std_err));
        }
        fields.push(fmt_num(row.t * ATTOSECONDS_PER_AU));
        for (l, e) in &row.estimates {
            if l.starts_with('D') {
                fields.push(fmt_num(e.value.clamp(0.0, 1.0)));
            }
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_timeseries_header(mut out: impl Write, labels: &[String]) -> std::io::Result<()> {
    let mut cols = vec!["t".to_string()];
    for l in labels {
        cols.push(l.clone());
        cols.push(format!("{l}_err"));
    }
    cols.push("t_as".into());
    cols.extend(
        labels
            .iter()
            .filter(|l| l.starts_with('D'))
            .map(|l| format!("{l}_clipped")),
    );
    writeln!(out, "{}", cols.join(","))
}

/// Shortest round-trip decimal form.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:?}")
    }
}

/// Parses a CSV written by [`write_timeseries_csv`].
pub fn read_timeseries_csv(text: &str) -> Result<Vec<TimeseriesRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty time series".into()))?
        .split(',')
        .collect();
    if header.first() != Some(&"t") {
        return Err(Error::InvalidParameter(
            "time series must start with a `t` column".into(),
        ));
    }
    let mut labels = Vec::new();
    let mut i = 1;
    while i + 1 < header.len() && header[i + 1] == format!("{}_err", header[i]) {
        labels.push(header[i].to_string());
        i += 2;
    }
    let mut rows = Vec::new();
    for (line_no, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::InvalidParameter(format!(
                "row {} has {} fields, header has {}",
                line_no + 2,
                fields.len(),
                header.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("invalid number {s:?} in row {}", line_no + 2)))
        };
        let t = num(fields[0])?;
        let estimates = labels
            .iter()
            .enumerate()
            .map(|(k, l)| {
                Ok((
                    l.clone(),
                    Estimate {
                        value: num(fields[1 + 2 * k])?,
                        std_err: num(fields[2 + 2 * k])?,
                    },
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(TimeseriesRow { t, estimates });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn plan(obs: Vec<(&str, PauliSum)>, shots: usize, seed: u64) -> TomographyPlan {
        TomographyPlan::new(obs.into_iter().map(|(l, o)| (l.to_string(), o)).collect(), shots, seed).unwrap()
    }

    #[test]
    fn identity_observable_is_exact() {
        let p = plan(vec![("one", PauliSum::identity(2, 1.0))], 10, 0);
        let c = Circuit::with_prep(2, 3).unwrap();
        let est = estimate(&c, &p, None).unwrap();
        assert_eq!(
            est[0].1,
            Estimate {
                value: 1.0,
                std_err: 0.0
            }
        );
    }

    #[test]
    fn deterministic_z() {
        let z = PauliSum::from_labels(1, [(1.0, "Z")]).unwrap();
        let p = plan(vec![("z", z)], 37, 5);
        let est = estimate(&Circuit::with_prep(1, 0).unwrap(), &p, None).unwrap();
        assert_eq!(
            est[0].1,
            Estimate {
                value: 1.0,
                std_err: 0.0
            }
        );
    }

    #[test]
    fn plan_validation() {
        let z = PauliSum::from_labels(1, [(1.0, "Z")]).unwrap();
        assert!(TomographyPlan::new(vec![("a".into(), z.clone())], 0, 0).is_err());
        assert!(TomographyPlan::new(vec![("a".into(), z.clone()), ("a".into(), z.clone())], 1, 0).is_err());
        let zz = PauliSum::from_labels(2, [(1.0, "ZZ")]).unwrap();
        assert!(TomographyPlan::new(vec![("a".into(), z.clone()), ("b".into(), zz)], 1, 0).is_err());
        let iz = z.scale(Complex64::new(0.0, 1.0));
        assert!(TomographyPlan::new(vec![("a".into(), iz)], 1, 0).is_err());
    }

    #[test]
    fn strings_are_shared_between_observables() {
        let a = PauliSum::from_labels(2, [(1.0, "ZI"), (0.5, "XX"), (2.0, "II")]).unwrap();
        let b = PauliSum::from_labels(2, [(1.0, "XX"), (1.0, "IZ")]).unwrap();
        let p = plan(vec![("a", a), ("b", b)], 10, 0);
        assert_eq!(p.strings().len(), 3);
    }

    fn tilted_circuit() -> Circuit {
        let mut c = Circuit::with_prep(2, 0).unwrap();
        c.push_rotation(PauliString::from_label("XY").unwrap(), 0.9).unwrap();
        c.push_rotation(PauliString::from_label("IX").unwrap(), -0.4).unwrap();
        c
    }

    fn mixed_observable() -> PauliSum {
        PauliSum::from_labels(2, [(0.7, "ZI"), (-0.3, "XY"), (0.2, "YI"), (0.1, "II")]).unwrap()
    }

    #[test]
    fn exact_mode_matches_expectation() {
        let c = tilted_circuit();
        let o = mixed_observable();
        let p = plan(vec![("o", o.clone())], 1, 0);
        let est = estimate_with(&c, &p, Measurement::Exact, 0).unwrap();
        let exact = c.execute(None, 0).unwrap().expectation(&o).unwrap().re;
        assert!((est[0].1.value - exact).abs() < 1e-12);
    }

    #[test]
    fn unbiased_with_calibrated_error_bars() {
        let c = tilted_circuit();
        let o = mixed_observable();
        let exact = c.execute(None, 0).unwrap().expectation(&o).unwrap().re;
        let seeds = 200;
        let samples: Vec<Estimate> = (0..seeds)
            .map(|s| estimate(&c, &plan(vec![("o", o.clone())], 2000, s), None).unwrap()[0].1)
            .collect();
        let mean = samples.iter().map(|e| e.value).sum::<f64>() / seeds as f64;
        let reported = samples.iter().map(|e| e.std_err).sum::<f64>() / seeds as f64;
        let spread = (samples.iter().map(|e| (e.value - mean).powi(2)).sum::<f64>() / (seeds - 1) as f64).sqrt();
        assert!((mean - exact).abs() <= 5.0 * reported / (seeds as f64).sqrt());
        assert!((spread / reported - 1.0).abs() <= 0.3, "{spread} vs {reported}");
    }

    #[test]
    fn noisy_estimates_are_reproducible_and_degraded() {
        let c = tilted_circuit();
        let z = PauliSum::from_labels(2, [(1.0, "ZZ")]).unwrap();
        let p = plan(vec![("zz", z.clone())], 4000, 9);
        let spec = NoiseSpec::new(0.2, 0.0, 3, 40).unwrap();
        let a = estimate(&c, &p, Some(&spec)).unwrap();
        let b = estimate(&c, &p, Some(&spec)).unwrap();
        assert_eq!(a, b);
        let clean = estimate_with(&c, &p, Measurement::Exact, 0).unwrap()[0].1.value;
        assert!(a[0].1.value.abs() < clean.abs());
        let flip = NoiseSpec::new(0.0, 1.0, 3, 1).unwrap();
        // flipping both bits leaves a ZZ parity unchanged
        let flipped = estimate(&Circuit::with_prep(2, 0).unwrap(), &p, Some(&flip)).unwrap()[0].1;
        assert_eq!(flipped.value, 1.0);
        let zi = plan(vec![("zi", PauliSum::from_labels(2, [(1.0, "ZI")]).unwrap())], 100, 0);
        let flipped = estimate(&Circuit::with_prep(2, 0).unwrap(), &zi, Some(&flip)).unwrap()[0].1;
        assert_eq!(flipped.value, -1.0);
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            TimeseriesRow {
                t: 0.0,
                estimates: vec![
                    (
                        "D00".into(),
                        Estimate {
                            value: 1.02,
                            std_err: 0.01,
                        },
                    ),
                    (
                        "E".into(),
                        Estimate {
                            value: -1.1,
                            std_err: 0.003,
                        },
                    ),
                ],
            },
            TimeseriesRow {
                t: 0.9,
                estimates: vec![
                    (
                        "D00".into(),
                        Estimate {
                            value: 0.5,
                            std_err: 0.0,
                        },
                    ),
                    (
                        "E".into(),
                        Estimate {
                            value: -1.05,
                            std_err: 0.0,
                        },
                    ),
                ],
            },
        ];
        let mut buf = Vec::new();
        write_timeseries_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,D00,D00_err,E,E_err,t_as,D00_clipped"));
        assert!(lines.next().unwrap().ends_with(",0,1.0"));
        assert_eq!(read_timeseries_csv(&text).unwrap(), rows);
    }
}
