mod common;

use cete_core::cete::{build_pool, fidelity, Cete, CeteConfig, PoolOptions, ReferencePolicy};
use cete_core::evolve::{exact_step, sequential_evolve, ExactPropagator, PropagatorConfig};
use cete_core::fermion::{hartree_fock_index, number_operator, sz_operator, Fcidump};
use cete_core::statevector::StateVector;
use cete_core::tomography::{exact_timeseries, read_timeseries_csv, write_timeseries_csv, TomographyPlan};
use common::*;

#[test]
fn fixture_core_energy_is_the_nuclear_repulsion() {
    let f = Fcidump::read(FCIDUMP).unwrap();
    assert_eq!(f.norb, 2);
    assert!((f.core_energy - reference_value("nuclear_repulsion")).abs() < 1e-12);
}

#[test]
fn hamiltonian_is_hermitian_and_symmetric() {
    let h = h2_hamiltonian();
    assert_eq!(h.n_qubits(), 4);
    assert!(h.is_hermitian(1e-12));
    assert_eq!(h.len(), 15);
    let hd = h.to_dense();
    for op in [number_operator(4), sz_operator(4).unwrap()] {
        let od = op.to_dense();
        let comm = &hd * &od - &od * &hd;
        assert!(comm.iter().all(|x| x.norm() < 1e-12));
    }
}

#[test]
fn hartree_fock_determinant_has_the_reference_energy() {
    let h = h2_hamiltonian();
    let hf = hartree_fock_index(4, 2, 0).unwrap();
    assert_eq!(hf, 0b0101);
    let e = StateVector::basis(4, hf).unwrap().expectation(&h).unwrap().re;
    assert!((e - reference_value("hf_energy")).abs() < 1e-9, "{e}");
}

#[test]
fn initial_state_is_a_rotated_determinant() {
    let psi = h2_initial_circuit().execute(None, 0).unwrap();
    let amps = psi.amplitudes();
    let c = (0.1 * std::f64::consts::PI).cos();
    assert!((amps[0b0101].norm() - c).abs() < 1e-12);
    assert!((amps[0b1010].norm_sqr() - (1.0 - c * c)).abs() < 1e-12);
    assert_eq!(psi.most_probable(), 0b0101);
}

#[test]
fn first_cete_step_needs_few_layers() {
    let h = h2_hamiltonian();
    let init = h2_initial_circuit();
    let psi = init.execute(None, 0).unwrap();
    let pool = build_pool(4, 2, 0, PoolOptions::default()).unwrap();
    assert_eq!(pool.len(), 16);
    let cete = Cete::new(&h, pool, CeteConfig::exact(ReferencePolicy::Fixed(5))).unwrap();
    let out = cete.step(&psi, &init, 0.9, 0.9, 0).unwrap();
    assert!(out.record.m() <= 3, "m = {}", out.record.m());
    assert!(!out.record.fallback);
    let target = exact_step(&psi, &h, 0.9).unwrap();
    assert!(fidelity(&out.state, &target).unwrap() >= 1.0 - 1e-6);
    assert_eq!(out.circuit.prep(), Some(5));
}

#[test]
fn shot_gradients_still_track_the_exact_trajectory() {
    let h = h2_hamiltonian();
    let init = h2_initial_circuit();
    let pool = build_pool(4, 2, 0, PoolOptions::default()).unwrap();
    let cfg = PropagatorConfig {
        t_max: 3.6,
        ..PropagatorConfig::default()
    };
    let cete = Cete::new(&h, pool, CeteConfig::shots(ReferencePolicy::MostProbable, 20_000, 3)).unwrap();
    let traj = cete.evolve(&init, &cfg).unwrap();
    let prop = ExactPropagator::new(&h).unwrap();
    let psi0 = init.execute(None, 0).unwrap();
    for (state, record) in traj.states.iter().zip(&traj.records) {
        let exact = prop.propagate(&psi0, record.time).unwrap();
        assert!(fidelity(state, &exact).unwrap() > 0.99, "t = {}", record.time);
        assert!(record.fidelity >= 1.0 - 1e-3 || record.fallback);
    }
}

#[test]
fn sequential_snapshots_are_accurate() {
    let h = h2_hamiltonian();
    let init = h2_initial_circuit();
    let cfg = PropagatorConfig::default();
    let run = sequential_evolve(&init, &h, &cfg).unwrap();
    let prop = ExactPropagator::new(&h).unwrap();
    let psi0 = init.execute(None, 0).unwrap();
    for (s, &t) in run.snapshots.iter().zip(&run.times) {
        assert!(fidelity(s, &prop.propagate(&psi0, t).unwrap()).unwrap() >= 0.9999);
    }
}

#[test]
fn exact_timeseries_round_trips_through_csv() {
    let h = h2_hamiltonian();
    let psi0 = h2_initial_circuit().execute(None, 0).unwrap();
    let prop = ExactPropagator::new(&h).unwrap();
    let states: Vec<(f64, StateVector)> = [0.0, 0.9, 1.8]
        .iter()
        .map(|&t| (t, prop.propagate(&psi0, t).unwrap()))
        .collect();
    let plan = TomographyPlan::rdm_and_energy(&h, 1, 0).unwrap();
    let rows = exact_timeseries(&states, &plan).unwrap();
    let energy = psi0.expectation(&h).unwrap().re;
    for row in &rows {
        assert!((row.get("E").unwrap().value - energy).abs() < 1e-10);
        let total: f64 = (0..4).map(|i| row.get(&format!("D{i}{i}")).unwrap().value).sum();
        assert!((total - 2.0).abs() < 1e-10);
    }
    let mut buf = Vec::new();
    write_timeseries_csv(&mut buf, &rows).unwrap();
    let back = read_timeseries_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in back.iter().zip(&rows) {
        assert_eq!(a.t, b.t);
        for (label, e) in &b.estimates {
            assert_eq!(a.get(label).unwrap().value, e.value);
        }
    }
}
