//! Reduced oracle-agreement and sandwich suites run by `thermal-qfi selftest`.

use rand::Rng;
use thermal_qfi::bounds::{bound_report, BoundReport};
use thermal_qfi::models::{ghz_exact, ghz_hamiltonian, GhzModel, QubitModel};
use thermal_qfi::qfi::{qfi_fidelity_oracle_richardson, qfi_of_hamiltonian, saturability, sld, sld_commutator_trace};
use thermal_qfi::random::{random_commuting_hamiltonian, random_param_hamiltonian, seeded_rng};
use thermal_qfi::{gibbs, thermal_state, ParamHamiltonian};

use crate::error::{CliError, CliResult};
use crate::table::{format_float, Row, Table};

/// Deliberate faults for checking that the suite detects them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Halve the `c2` constant in the classical upper bound.
    C2Half,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub instances: usize,
    pub worst: f64,
    pub tolerance: f64,
    /// First failure, if any.
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    instances: usize,
    worst: f64,
    failure: Option<String>,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            instances: 0,
            worst: 0.0,
            failure: None,
        }
    }

    /// Records an error measure; larger than tolerance (or NaN) fails.
    fn record(&mut self, err: f64, what: impl FnOnce() -> String) {
        self.instances += 1;
        if err.is_nan() || err > self.worst {
            self.worst = err;
        }
        if !(err <= self.tolerance) && self.failure.is_none() {
            self.failure = Some(format!("{}: error {} exceeds {}", what(), format_float(err), self.tolerance));
        }
    }

    fn fail(&mut self, msg: String) {
        self.instances += 1;
        if self.failure.is_none() {
            self.failure = Some(msg);
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            instances: self.instances,
            worst: self.worst,
            tolerance: self.tolerance,
            failure: self.failure,
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn check_qubit(seed: u64) -> CliResult<CheckOutcome> {
    let mut rng = seeded_rng(seed);
    let mut t = Tracker::new("qubit closed form", 1e-10);
    for _ in 0..50 {
        let m = QubitModel::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )?;
        let beta = log_uniform(&mut rng, 1e-3, 100.0) / m.v();
        let dense = qfi_of_hamiltonian(&m.hamiltonian(), beta)?.get(0, 0);
        let closed = m.qfi(beta).value;
        t.record(rel_err(dense, closed), || format!("{m:?} beta={beta}"));
    }
    Ok(t.finish())
}

fn check_fidelity_oracle(seed: u64) -> CliResult<CheckOutcome> {
    let mut rng = seeded_rng(seed.wrapping_add(1));
    let mut t = Tracker::new("fidelity oracle", 1e-4);
    for _ in 0..20 {
        let dim = rng.random_range(2..=6);
        let h = random_param_hamiltonian(&mut rng, dim, 2);
        let s = gibbs::spectral_quantities(&h.total(), None)?.seminorm;
        let beta = log_uniform(&mut rng, 0.1, 20.0) / s;
        let f = qfi_of_hamiltonian(&h, beta)?;
        for l in 0..h.n_params() {
            let oracle = qfi_fidelity_oracle_richardson(&h, l, beta, 1e-3)?;
            t.record(rel_err(f.get(l, l), oracle), || format!("dim={dim} beta={beta} param={l}"));
        }
    }
    Ok(t.finish())
}

fn apply_fault(report: &mut BoundReport, fault: Option<Fault>) {
    if fault == Some(Fault::C2Half) {
        for p in &mut report.parameters {
            p.classical_upper *= 0.5;
        }
    }
}

fn sandwich_instance(t: &mut Tracker, h: &ParamHamiltonian, beta: f64, fault: Option<Fault>) -> CliResult<()> {
    let mut report = bound_report(h, beta, 1, 0.1)?;
    apply_fault(&mut report, fault);
    match report.check_sandwich(1e-9).first() {
        None => t.record(0.0, String::new),
        Some(v) => t.fail(format!(
            "{} violated for {} at beta={}: {} > {}",
            v.relation,
            v.label,
            format_float(beta),
            format_float(v.lhs),
            format_float(v.rhs)
        )),
    }
    Ok(())
}

fn check_sandwich(seed: u64, fault: Option<Fault>) -> CliResult<CheckOutcome> {
    let mut rng = seeded_rng(seed.wrapping_add(2));
    let mut t = Tracker::new("bound sandwich", 1e-9);
    for _ in 0..200 {
        let dim = rng.random_range(2..=8);
        let h = random_param_hamiltonian(&mut rng, dim, 2);
        let s = gibbs::spectral_quantities(&h.total(), None)?.seminorm;
        let beta = log_uniform(&mut rng, 1e-3, 30.0) / s;
        sandwich_instance(&mut t, &h, beta, fault)?;
    }
    Ok(t.finish())
}

fn check_beta_zero(seed: u64, fault: Option<Fault>) -> CliResult<CheckOutcome> {
    let mut rng = seeded_rng(seed.wrapping_add(3));
    let mut t = Tracker::new("beta = 0 corner", 0.0);
    for _ in 0..5 {
        let dim = rng.random_range(2..=6);
        let h = random_param_hamiltonian(&mut rng, dim, 2);
        sandwich_instance(&mut t, &h, 0.0, fault)?;
        let f = qfi_of_hamiltonian(&h, 0.0)?;
        let max = f.values().iter().fold(0.0f64, |a, x| a.max(x.abs()));
        t.record(max, || format!("nonzero qfi at beta=0, dim={dim}"));
    }
    Ok(t.finish())
}

fn check_ghz(_seed: u64) -> CliResult<CheckOutcome> {
    let mut t = Tracker::new("ghz blocks vs dense", 1e-9);
    for n in [2usize, 3] {
        for (mu, lambda, beta) in [(0.7, 1.3, 0.9), (0.4, 0.5, 2.0), (1.0, 2.0, 0.1)] {
            let m = GhzModel::new(n, mu, lambda, beta)?;
            let e = ghz_exact(&m);
            let h = ghz_hamiltonian(n, mu, lambda)?;
            let rho = thermal_state(&h, beta)?;
            let a = h.term_operator(0)?;
            let pairs = [
                (e.var_hmu, gibbs::variance(&rho, &a)?),
                (e.skew_hmu, gibbs::skew_information(&rho, &a)?),
                (e.mean_hmu, gibbs::expectation(&rho, &a)?),
                (e.qfi_mu, qfi_of_hamiltonian(&h, beta)?.get(0, 0)),
            ];
            for (block, dense) in pairs {
                t.record(rel_err(block, dense), || format!("n={n} mu={mu} lambda={lambda} beta={beta}"));
            }
        }
    }
    Ok(t.finish())
}

fn check_saturability(seed: u64) -> CliResult<CheckOutcome> {
    let mut rng = seeded_rng(seed.wrapping_add(4));
    let mut t = Tracker::new("saturability paths", 1e-9);
    for _ in 0..20 {
        let dim = rng.random_range(2..=6);
        let beta = rng.random_range(0.1..3.0);
        let h = random_commuting_hamiltonian(&mut rng, dim, 2);
        let rho = thermal_state(&h, beta)?;
        let g = h.generators();
        t.record(saturability(&rho, &g[0], &g[1])?.abs(), || format!("commuting dim={dim}"));

        let h = random_param_hamiltonian(&mut rng, dim, 2);
        let rho = thermal_state(&h, beta)?;
        let g = h.generators();
        let formula = saturability(&rho, &g[0], &g[1])?;
        let via_sld = sld_commutator_trace(&rho, &sld(&rho, &g[0])?, &sld(&rho, &g[1])?).im;
        t.record((formula - via_sld).abs(), || format!("noncommuting dim={dim} beta={beta}"));
    }
    Ok(t.finish())
}

fn check_trace_inverse(seed: u64) -> CliResult<CheckOutcome> {
    let mut rng = seeded_rng(seed.wrapping_add(5));
    let mut t = Tracker::new("trace inverse chain", 1e-9);
    for _ in 0..40 {
        let dim = rng.random_range(3..=6);
        let h = random_param_hamiltonian(&mut rng, dim, 2);
        let beta = rng.random_range(0.2..3.0);
        let f = qfi_of_hamiltonian(&h, beta)?;
        if f.min_eigenvalue() <= 1e-8 * f.get(0, 0).max(f.get(1, 1)) {
            continue;
        }
        let tr = f.trace_inverse()?;
        let diag = f.sum_inverse_diagonal();
        // Shortfall of tr(F^-1) below the diagonal sum, relative.
        t.record(((diag - tr) / diag).max(0.0), || format!("dim={dim} beta={beta}"));
    }
    Ok(t.finish())
}

/// Runs every check with the given seed.
pub fn run_checks(seed: u64, fault: Option<Fault>) -> CliResult<Vec<CheckOutcome>> {
    Ok(vec![
        check_qubit(seed)?,
        check_fidelity_oracle(seed)?,
        check_sandwich(seed, fault)?,
        check_beta_zero(seed, fault)?,
        check_ghz(seed)?,
        check_saturability(seed)?,
        check_trace_inverse(seed)?,
    ])
}

pub fn outcome_table(outcomes: &[CheckOutcome]) -> Table {
    let header = ["check", "status", "instances", "worst_error", "tolerance"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut table = Table::new(header);
    for o in outcomes {
        let mut row = Row::new();
        row.text(o.name);
        row.text(if o.passed() { "PASS" } else { "FAIL" });
        row.int(o.instances as u64);
        row.num("worst_error", o.worst);
        row.num("tolerance", o.tolerance);
        table.push(row);
    }
    table
}

/// First failing property as an error, if any.
pub fn verdict(outcomes: &[CheckOutcome]) -> CliResult<()> {
    match outcomes.iter().find(|o| !o.passed()) {
        None => Ok(()),
        Some(o) => Err(CliError::Selftest(format!(
            "{} failed: {}",
            o.name,
            o.failure.as_deref().unwrap_or("")
        ))),
    }
}
