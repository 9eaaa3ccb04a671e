use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FCIDUMP: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/h2_sto3g_0.735.fcidump");
const FILES: [&str; 5] = [
    "cete_timeseries.csv",
    "sequential_timeseries.csv",
    "reference_timeseries.csv",
    "depth.csv",
    "cete_trajectory.csv",
];

fn cete(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cete"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec!["run", "--fcidump-path", FCIDUMP, "--output-dir", out];
    args.extend_from_slice(extra);
    cete(&args)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

fn assert_success(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn default_run_writes_every_series() {
    let dir = tmp();
    let out = run_into(dir.path(), &[]);
    assert_success(&out);
    for name in [
        "cete_timeseries.csv",
        "sequential_timeseries.csv",
        "reference_timeseries.csv",
        "depth.csv",
    ] {
        assert_eq!(read(dir.path(), name).lines().count(), 1 + 21, "{name}");
    }
    assert_eq!(read(dir.path(), "cete_trajectory.csv").lines().count(), 1 + 20);

    let reference = read(dir.path(), "reference_timeseries.csv");
    let energy = column(&reference, "E");
    assert!(energy.iter().all(|e| (e - energy[0]).abs() <= 1e-10));
    let t = column(&reference, "t");
    let t_as = column(&reference, "t_as");
    assert!((t[20] - 18.0).abs() < 1e-12 && (t_as[20] - 435.399).abs() < 1e-2);

    let depth = read(dir.path(), "depth.csv");
    let seq = column(&depth, "sequential_depth");
    let d1 = seq[1] - seq[0];
    assert!(seq.iter().enumerate().all(|(k, d)| *d == seq[0] + k as f64 * d1));
    let cete_depth = column(&depth, "cete_depth");
    assert!(cete_depth
        .iter()
        .all(|&d| d <= cete_depth[1..].iter().copied().fold(0.0, f64::max)));

    let traj = read(dir.path(), "cete_trajectory.csv");
    assert!(column(&traj, "fidelity").iter().all(|&f| f >= 1.0 - 1e-6));
    let (n0, n2) = (column(&traj, "n0_exact"), column(&traj, "n2_exact"));
    assert!(n0.iter().zip(&n2).all(|(a, b)| (a - b).abs() < 1e-8));
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let (a, b, c) = (tmp(), tmp(), tmp());
    assert_success(&run_into(a.path(), &["--master-seed", "5"]));
    assert_success(&run_into(b.path(), &["--master-seed", "5"]));
    assert_success(&run_into(c.path(), &["--master-seed", "6"]));
    for name in FILES {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    assert_ne!(
        read(a.path(), "cete_timeseries.csv"),
        read(c.path(), "cete_timeseries.csv")
    );
}

#[test]
fn rerunning_the_manifest_reproduces_outputs() {
    let (a, b) = (tmp(), tmp());
    assert_success(&run_into(
        a.path(),
        &["--master-seed", "3", "--t-max", "4.5", "--gradient-mode", "shots"],
    ));
    let manifest = a.path().join("run_manifest");
    let text = std::fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("gradient_mode = shots") && text.contains("delta_cutoff = 0.001"));
    let hash = text
        .lines()
        .find_map(|l| l.strip_prefix("# fcidump_git_blob_sha256 = "))
        .unwrap();
    assert!(hash.len() == 64 && hash.chars().all(|c| c.is_ascii_hexdigit()));
    let out = cete(&[
        "run",
        "--config",
        manifest.to_str().unwrap(),
        "--output-dir",
        b.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    for name in FILES {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn config_file_with_relative_paths() {
    let dir = tmp();
    std::fs::copy(FCIDUMP, dir.path().join("h2.fcidump")).unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# short run\nfcidump_path = h2.fcidump\nt_max = 1.8\nshots_tomography = 0\noutput_dir = out\n",
    )
    .unwrap();
    assert_success(&cete(&["run", "--config", cfg.to_str().unwrap()]));
    let out: PathBuf = dir.path().join("out");
    let cete_rows = read(&out, "cete_timeseries.csv");
    let reference = read(&out, "reference_timeseries.csv");
    assert_eq!(cete_rows.lines().count(), 4);
    // exact expectations on the CETE states track the exact reference
    for name in ["D00", "D11", "E"] {
        for (a, b) in column(&cete_rows, name).iter().zip(column(&reference, name)) {
            assert!((a - b).abs() < 5e-3, "{name}");
        }
    }
}

#[test]
fn zero_duration_writes_only_the_initial_row() {
    let dir = tmp();
    assert_success(&run_into(dir.path(), &["--t-max", "0"]));
    for name in [
        "cete_timeseries.csv",
        "sequential_timeseries.csv",
        "reference_timeseries.csv",
        "depth.csv",
    ] {
        let text = read(dir.path(), name);
        assert_eq!(text.lines().count(), 2, "{name}");
        assert!(text.lines().nth(1).unwrap().starts_with("0,"));
    }
    assert_eq!(read(dir.path(), "cete_trajectory.csv").lines().count(), 1);
}

#[test]
fn missing_input_is_an_io_error_naming_the_path() {
    let dir = tmp();
    let missing = dir.path().join("absent.fcidump");
    let out = cete(&[
        "run",
        "--fcidump-path",
        missing.to_str().unwrap(),
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains(missing.to_str().unwrap()));
}

#[test]
fn config_errors_have_their_own_exit_code() {
    let dir = tmp();
    for extra in [
        &["--step", "0.95"][..],
        &["--gradient-mode", "maybe"],
        &["--n-electrons", "9"],
    ] {
        let out = run_into(dir.path(), extra);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{extra:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(cete(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn non_convergence_has_a_distinct_exit_code() {
    let dir = tmp();
    let out = run_into(
        dir.path(),
        &["--delta-cutoff", "1e-15", "--m-max", "1", "--t-max", "1.8"],
    );
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn compare_reference_with_itself_is_exact() {
    let dir = tmp();
    assert_success(&run_into(dir.path(), &["--t-max", "2.7"]));
    let r = dir.path().join("reference_timeseries.csv");
    let r = r.to_str().unwrap();
    let out = cete(&["compare", "--cete", r, "--sequential", r, "--reference", r]);
    assert_success(&out);
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().count(), 1 + 6);
    for line in table.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(&f[1..5], &["0", "0", "0", "0"], "{line}");
    }
}

#[test]
fn compare_rejects_misaligned_series() {
    let (a, b) = (tmp(), tmp());
    assert_success(&run_into(a.path(), &["--t-max", "1.8"]));
    assert_success(&run_into(b.path(), &["--t-max", "2.7"]));
    let out = cete(&[
        "compare",
        "--dir",
        a.path().to_str().unwrap(),
        "--reference",
        b.path().join("reference_timeseries.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn noise_penalizes_the_sequential_circuits() {
    let dir = tmp();
    assert_success(&run_into(
        dir.path(),
        &[
            "--depolarizing-p",
            "0.005",
            "--noise-trajectories",
            "50",
            "--shots-tomography",
            "2000",
            "--master-seed",
            "1",
        ],
    ));
    let out = cete(&["compare", "--dir", dir.path().to_str().unwrap()]);
    assert_success(&out);
    let table = String::from_utf8(out.stdout).unwrap();
    let diag = table.lines().find(|l| l.starts_with("D_diag,")).unwrap();
    let ratio: f64 = diag.split(',').nth(5).unwrap().parse().unwrap();
    assert!(ratio > 1.0, "{diag}");
    let seq = read(dir.path(), "sequential_timeseries.csv");
    let reference = read(dir.path(), "reference_timeseries.csv");
    let last = |csv: &str, name: &str| *column(csv, name).last().unwrap();
    let cete_rows = read(dir.path(), "cete_timeseries.csv");
    let err = |csv: &str| {
        (0..4)
            .map(|i| (last(csv, &format!("D{i}{i}")) - last(&reference, &format!("D{i}{i}"))).abs())
            .sum::<f64>()
    };
    assert!(err(&seq) > err(&cete_rows));
}
