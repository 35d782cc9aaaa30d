mod common;

use common::{config_file, configs_dir, le_slack, run, run_ok, Csv};
use thermal_qfi::bounds::{c1_const, ln_c2_const, relative_error_bounds_classical};
use thermal_qfi::models::{ghz_hamiltonian, QubitModel};
use thermal_qfi::qfi::qfi_of_hamiltonian;
use thermal_qfi::{gibbs, thermal_state};

fn config_path(name: &str) -> String {
    configs_dir().join(name).to_string_lossy().into_owned()
}

#[test]
fn qubit_qfi_matches_closed_form() {
    let csv = Csv::parse(&run_ok(&["qfi", "--config", &config_path("qubit.json")]));
    assert_eq!(csv.rows.len(), 1);
    let closed = QubitModel::new(1.0, 0.5, 0.3).unwrap().qfi(2.0).value;
    let got = csv.value(0, "qfi:mu:mu");
    assert!((got - closed).abs() <= 1e-10 * closed, "{got} vs {closed}");
}

#[test]
fn beta_zero_gives_zero_qfi() {
    let cfg = config_file(
        r#"{"schema": "thermal-qfi/1", "beta": 0.0,
            "model": {"kind": "spin_chain", "n": 3, "mu": 0.7, "lambda": 1.3}}"#,
    );
    let csv = Csv::parse(&run_ok(&["qfi", "--config", cfg.path().to_str().unwrap()]));
    for name in ["qfi:mu:mu", "qfi:mu:lambda", "qfi:lambda:mu", "qfi:lambda:lambda"] {
        assert_eq!(csv.value(0, name), 0.0, "{name}");
    }
}

#[test]
fn noncommuting_charge_has_skew() {
    let csv = Csv::parse(&run_ok(&["qfi", "--config", &config_path("charges.json")]));
    assert_eq!(csv.rows.len(), 12);
    for (r, s) in csv.column("skew:q2").iter().enumerate() {
        assert!(*s > 0.0, "row {r}: skew {s}");
    }
    assert!(csv.column("saturability:q1:q2").iter().all(|x| x.is_finite()));
}

#[test]
fn sweep_rows_are_sorted() {
    let cfg = config_file(
        r#"{"schema": "thermal-qfi/1", "beta": 1.0,
            "model": {"kind": "qubit", "omega_x": 1.0, "omega_z": 0.2, "mu": 0.1},
            "sweep": {"variable": "beta", "values": [3.0, 0.5, 2.0, 1.0]}}"#,
    );
    let csv = Csv::parse(&run_ok(&["qfi", "--config", cfg.path().to_str().unwrap()]));
    assert_eq!(csv.column("sweep:beta"), vec![0.5, 1.0, 2.0, 3.0]);
    assert_eq!(csv.column("beta"), vec![0.5, 1.0, 2.0, 3.0]);
}

/// Parses every emitted bounds row and checks the sandwich independently.
fn assert_sandwich_rows(csv: &Csv, labels: &[&str]) {
    for r in 0..csv.rows.len() {
        for l in labels {
            let v = |c: &str| csv.value(r, &format!("{c}:{l}"));
            let qfi = v("qfi");
            let pairs = [
                (v("variance_lower"), qfi),
                (qfi, v("variance_upper_refined")),
                (v("variance_upper_refined"), v("variance_upper")),
                (v("classical_lower"), qfi),
                (qfi, v("classical_upper")),
                (qfi, v("miller_upper")),
            ];
            for (i, (lhs, rhs)) in pairs.into_iter().enumerate() {
                assert!(le_slack(lhs, rhs, 1e-9), "row {r} label {l} relation {i}: {lhs} > {rhs}");
            }
        }
    }
}

#[test]
fn bounds_sandwich_holds_in_emitted_rows() {
    for (file, labels) in [
        ("chain_beta_sweep.json", vec!["mu", "lambda"]),
        ("chain_lambda_sweep.json", vec!["mu", "lambda"]),
        ("charges.json", vec!["q1", "q2"]),
    ] {
        let csv = Csv::parse(&run_ok(&["bounds", "--config", &config_path(file)]));
        assert!(!csv.rows.is_empty());
        assert_sandwich_rows(&csv, &labels);
    }
}

#[test]
fn bounds_columns_are_fixed() {
    let csv = Csv::parse(&run_ok(&["bounds", "--config", &config_path("qubit.json"), "--samples", "10"]));
    let width = csv.header.len();
    assert_eq!(csv.header.last().unwrap(), "note");
    assert!(csv.rows.iter().all(|r| r.len() == width));
    assert_eq!(csv.rows[0][csv.col("n_samples")], "10");
}

#[test]
fn size_sweep_first_row_matches_dense() {
    let csv = Csv::parse(&run_ok(&["fig2", "--n-max", "6"]));
    assert_eq!(csv.value(0, "n"), 2.0);
    let (mu, lambda) = (3.0, 6.0);
    let h = ghz_hamiltonian(2, mu, lambda).unwrap();
    let f = qfi_of_hamiltonian(&h, 1.0).unwrap().get(0, 0);
    let expected = 1.0 / (mu * f.sqrt());
    let got = csv.value(0, "relative_error");
    assert!((got - expected).abs() <= 1e-9 * expected, "{got} vs {expected}");

    let rho = thermal_state(&h, 1.0).unwrap();
    let a = h.term_operator(0).unwrap();
    let seminorm = rho.seminorm();
    let b = relative_error_bounds_classical(
        1.0,
        1,
        mu,
        gibbs::variance(&rho, &a).unwrap(),
        gibbs::classical_uncertainty(&rho, &a).unwrap(),
        c1_const(1.0, seminorm),
        ln_c2_const(1.0, seminorm),
    )
    .unwrap();
    for (name, x) in [
        ("relerr_variance_lower", b.variance_lower),
        ("relerr_variance_upper", b.variance_upper),
        ("relerr_classical_lower", b.classical_lower),
        ("relerr_classical_upper", b.classical_upper),
    ] {
        let got = csv.value(0, name);
        assert!((got - x).abs() <= 1e-9 * x.abs(), "{name}: {got} vs {x}");
    }
}

#[test]
fn size_sweep_reference_column_is_exact() {
    let csv = Csv::parse(&run_ok(&["fig2"]));
    assert_eq!(csv.rows.len(), 23);
    for r in 0..csv.rows.len() {
        let n = csv.value(r, "n");
        assert_eq!(csv.value(r, "sql_reference"), 1.0 / n.sqrt());
        let rel = csv.value(r, "relative_error");
        assert!(le_slack(csv.value(r, "relerr_classical_lower"), rel, 1e-9));
        assert!(le_slack(rel, csv.value(r, "relerr_classical_upper"), 1e-9));
    }
    assert!(csv.footers.iter().any(|f| f.starts_with("slope_fit n_from=10 n_to=24")));
}

#[test]
fn exit_codes() {
    let bad = config_file(r#"{"schema": "thermal-qfi/1", "beta": 1.0, "model": {"kind": "nope"}}"#);
    assert_eq!(run(&["qfi", "--config", bad.path().to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["fig2", "--n-min", "1"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--config", &config_path("qubit.json"), "--samples", "0"]).status.code(), Some(2));
    assert_eq!(run(&["selftest"]).status.code(), Some(0));
    let faulty = run(&["selftest", "--inject-fault", "c2-half"]);
    assert_eq!(faulty.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&faulty.stderr);
    assert!(stderr.contains("qfi <= classical_upper"), "{stderr}");
}

#[test]
fn parse_errors_report_location() {
    let bad = config_file("{\n  \"schema\": \"thermal-qfi/1\",\n  \"beta\": 1.0,\n  \"model\": oops\n}");
    let out = run(&["qfi", "--config", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn output_is_deterministic_across_threads_and_files() {
    let cfg = config_path("chain_beta_sweep.json");
    let a = run_ok(&["bounds", "--config", &cfg]);
    let b = run_ok(&["bounds", "--config", &cfg, "--threads", "1"]);
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    run_ok(&["bounds", "--config", &cfg, "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(path).unwrap(), a);
}
