use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cete_core::cete::{build_pool, Cete, CeteConfig, CeteTrajectory, GradientMode, PoolOptions, ReferencePolicy};
use cete_core::circuit::{trotterize, Circuit};
use cete_core::evolve::{sequential_evolve, ExactPropagator, PropagatorConfig, SequentialRun};
use cete_core::fermion::{
    build_hamiltonian, hartree_fock_index, jordan_wigner, Fcidump, FermionTerm, TwoElectronIntegrals,
};
use cete_core::pauli::PauliSum;
use cete_core::rng::derive_seed;
use cete_core::statevector::{NoiseSpec, StateVector};
use cete_core::tomography::{
    exact_timeseries, fmt_num, rdm_timeseries, write_timeseries_csv, Measurement, TimeseriesRow, TomographyPlan,
};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::config::{CeteReference, GradientKind, InitialState, RunConfig};
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "run_manifest";

/// SHA-256 of the git blob encoding `blob <len>\0<bytes>`.
pub fn git_blob_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

pub struct Summary {
    pub output_dir: PathBuf,
    pub steps: usize,
    pub min_step_fidelity: f64,
    pub max_cete_depth: usize,
    pub final_sequential_depth: usize,
    pub fallbacks: usize,
}

struct Inputs {
    h: PauliSum,
    initial: Circuit,
    hf_index: usize,
    propagation: PropagatorConfig,
    fcidump_hash: String,
}

fn prepare(cfg: &mut RunConfig) -> CliResult<Inputs> {
    let path = cfg
        .fcidump_path
        .clone()
        .ok_or_else(|| CliError::Config("fcidump_path is required".into()))?;
    let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    let text =
        String::from_utf8(bytes).map_err(|_| CliError::Config(format!("{}: not valid UTF-8", path.display())))?;
    let fcidump: Fcidump = text
        .parse()
        .map_err(|e: cete_core::Error| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Ok(abs) = fs::canonicalize(&path) {
        cfg.fcidump_path = Some(abs);
    }
    cfg.resolve(&fcidump);
    let propagation = PropagatorConfig {
        step: cfg.step,
        substep: cfg.substep,
        t_max: cfg.t_max,
    };
    propagation.validate()?;
    if cfg.m_max == 0 {
        return Err(CliError::Config("m_max must be at least 1".into()));
    }
    let n_electrons = cfg.n_electrons.expect("resolved");
    let ints = TwoElectronIntegrals::from_fcidump(&fcidump, n_electrons)?;
    let h = build_hamiltonian(&ints)?;
    let n = h.n_qubits();
    let hf_index = hartree_fock_index(n, n_electrons, cfg.ms2())?;
    let mut initial = Circuit::with_prep(n, hf_index)?;
    if let InitialState::Rotated { generator, angle } = &cfg.initial_state {
        let t: FermionTerm = generator.parse()?;
        let fwd = jordan_wigner(&t, n)?;
        let a = fwd.add(&fwd.adjoint())?.scale(Complex64::i());
        initial.append(&trotterize(&a, *angle, cfg.substep)?)?;
    }
    Ok(Inputs {
        h,
        initial,
        hf_index,
        propagation,
        fcidump_hash: git_blob_sha256(text.as_bytes()),
    })
}

fn cete_config(cfg: &RunConfig, hf_index: usize) -> CeteConfig {
    let reference = match cfg.cete_reference {
        CeteReference::Hf => ReferencePolicy::Fixed(hf_index),
        CeteReference::MostProbable => ReferencePolicy::MostProbable,
    };
    let mut c = match cfg.gradient_mode {
        GradientKind::Exact => CeteConfig::exact(reference),
        GradientKind::Shots => CeteConfig::shots(reference, cfg.shots_gradient, derive_seed(cfg.master_seed, &[0])),
    };
    c.delta_cutoff = cfg.delta_cutoff.expect("resolved");
    c.m_max = cfg.m_max;
    c.substep = cfg.substep;
    if let GradientMode::Shots { shots, .. } = &mut c.gradient {
        *shots = cfg.shots_gradient;
    }
    c
}

fn measure(cfg: &RunConfig, h: &PauliSum, circuits: &[(f64, Circuit)], run: u64) -> CliResult<Vec<TimeseriesRow>> {
    let plan = TomographyPlan::rdm_and_energy(h, cfg.shots_tomography.max(1), derive_seed(cfg.master_seed, &[1, run]))?;
    let measurement = if cfg.shots_tomography == 0 {
        Measurement::Exact
    } else if cfg.noisy() {
        let spec = NoiseSpec::new(
            cfg.depolarizing_p,
            cfg.readout_flip_p,
            derive_seed(cfg.master_seed, &[2, run]),
            cfg.noise_trajectories,
        )?;
        Measurement::Noisy(spec)
    } else {
        Measurement::Sampled
    };
    Ok(rdm_timeseries(circuits, &plan, measurement)?)
}

fn with_start(initial: &Circuit, times: &[f64], circuits: &[Circuit]) -> Vec<(f64, Circuit)> {
    std::iter::once((0.0, initial.clone()))
        .chain(times.iter().copied().zip(circuits.iter().cloned()))
        .collect()
}

fn occupation(n: usize, p: usize) -> PauliSum {
    let t = FermionTerm::normal_ordered(&[p], &[p], 1.0).expect("single index");
    jordan_wigner(&t, n).expect("index in range")
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

fn csv_bytes(rows: &[TimeseriesRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_timeseries_csv(&mut buf, rows).expect("in-memory write");
    buf
}

fn trajectory_csv(h: &PauliSum, traj: &CeteTrajectory) -> CliResult<Vec<u8>> {
    let n = h.n_qubits();
    let mut buf = Vec::new();
    let occ: Vec<String> = (0..n).map(|p| format!("n{p}_exact")).collect();
    writeln!(buf, "t,fidelity,layers,depth,fallback,E_exact,{}", occ.join(",")).expect("in-memory write");
    for (r, s) in traj.records.iter().zip(&traj.states) {
        let mut fields = vec![
            fmt_num(r.time),
            fmt_num(r.fidelity),
            r.m().to_string(),
            r.depth.to_string(),
            u8::from(r.fallback).to_string(),
            fmt_num(s.expectation(h)?.re),
        ];
        for p in 0..n {
            fields.push(fmt_num(s.expectation(&occupation(n, p))?.re));
        }
        writeln!(buf, "{}", fields.join(",")).expect("in-memory write");
    }
    Ok(buf)
}

fn depth_csv(times: &[f64], initial: &Circuit, cete: &CeteTrajectory, seq: &SequentialRun) -> Vec<u8> {
    let mut out = String::from("t,cete_depth,sequential_depth\n");
    let d0 = initial.depth();
    let rows = std::iter::once((0.0, d0, d0)).chain(
        times
            .iter()
            .zip(cete.depths())
            .zip(seq.depths())
            .map(|((&t, c), s)| (t, c, s)),
    );
    for (t, c, s) in rows {
        out.push_str(&format!("{},{c},{s}\n", fmt_num(t)));
    }
    out.into_bytes()
}

pub fn run(mut cfg: RunConfig) -> CliResult<Summary> {
    let inputs = prepare(&mut cfg)?;
    let Inputs {
        h,
        initial,
        hf_index,
        propagation,
        fcidump_hash,
    } = &inputs;
    let times = propagation.times();
    let out_dir = cfg.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let out_dir = fs::canonicalize(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    cfg.output_dir = out_dir.clone();

    let psi0 = initial.execute(None, 0)?;
    let (reference, (sequential, cete)) = std::thread::scope(|s| {
        let reference = s.spawn(|| -> CliResult<Vec<TimeseriesRow>> {
            let prop = ExactPropagator::new(h)?;
            let states = std::iter::once(0.0)
                .chain(times.iter().copied())
                .map(|t| Ok((t, prop.propagate(&psi0, t)?)))
                .collect::<cete_core::Result<Vec<(f64, StateVector)>>>()?;
            let plan = TomographyPlan::rdm_and_energy(h, 1, 0)?;
            Ok(exact_timeseries(&states, &plan)?)
        });
        let sequential = s.spawn(|| -> CliResult<(SequentialRun, Vec<TimeseriesRow>)> {
            let run = sequential_evolve(initial, h, propagation)?;
            let rows = measure(&cfg, h, &with_start(initial, &times, &run.circuits), 1)?;
            Ok((run, rows))
        });
        let cete = s.spawn(|| -> CliResult<(CeteTrajectory, Vec<TimeseriesRow>)> {
            let pool = build_pool(
                h.n_qubits(),
                cfg.n_electrons.expect("resolved"),
                cfg.ms2(),
                PoolOptions::default(),
            )?;
            let engine = Cete::new(h, pool, cete_config(&cfg, *hf_index))?;
            let traj = engine.evolve(initial, propagation)?;
            let rows = measure(&cfg, h, &with_start(initial, &times, &traj.circuits), 0)?;
            Ok((traj, rows))
        });
        let panicked = "run thread panicked";
        (
            reference.join().expect(panicked),
            (sequential.join().expect(panicked), cete.join().expect(panicked)),
        )
    });
    let reference = reference?;
    let (seq_run, seq_rows) = sequential?;
    let (traj, cete_rows) = cete?;

    write_file(&out_dir, "reference_timeseries.csv", &csv_bytes(&reference))?;
    write_file(&out_dir, "sequential_timeseries.csv", &csv_bytes(&seq_rows))?;
    write_file(&out_dir, "cete_timeseries.csv", &csv_bytes(&cete_rows))?;
    write_file(&out_dir, "depth.csv", &depth_csv(&times, initial, &traj, &seq_run))?;
    write_file(&out_dir, "cete_trajectory.csv", &trajectory_csv(h, &traj)?)?;

    let manifest = format!(
        "# cete run manifest; rerun with `cete run --config {MANIFEST}`\n# fcidump_git_blob_sha256 = {fcidump_hash}\n{}",
        cfg.to_text()
    );
    write_file(&out_dir, MANIFEST, manifest.as_bytes())?;

    let depths = traj.depths();
    Ok(Summary {
        output_dir: out_dir,
        steps: times.len(),
        min_step_fidelity: traj.records.iter().map(|r| r.fidelity).fold(1.0, f64::min),
        max_cete_depth: depths.iter().copied().max().unwrap_or(initial.depth()),
        final_sequential_depth: seq_run.depths().last().copied().unwrap_or(initial.depth()),
        fallbacks: traj.records.iter().filter(|r| r.fallback).count(),
    })
}
