//! JSON model configuration.
//!
//! ```json
//! {
//!   "schema": "thermal-qfi/1",
//!   "beta": 1.0,
//!   "model": { "kind": "spin_chain", "n": 5, "mu": 1.0, "lambda": 5.0 },
//!   "sweep": { "variable": "beta", "start": 0.01, "stop": 10, "count": 40, "spacing": "log" }
//! }
//! ```

use num_complex::Complex64;
use serde::Deserialize;
use thermal_qfi::models::{charge_model, ghz_hamiltonian, spin_chain, QubitModel};
use thermal_qfi::operator::{build_pauli_operator, CMatrix, HermitianOperator, PauliString};
use thermal_qfi::{HamiltonianTerm, ParamHamiltonian};

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "thermal-qfi/1";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schema: String,
    pub beta: f64,
    pub model: ModelSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Pauli {
        n_qubits: usize,
        #[serde(default)]
        fixed: Vec<PauliTerm>,
        terms: Vec<LabeledPauli>,
    },
    Dense {
        dim: usize,
        #[serde(default)]
        fixed: Option<Vec<[f64; 2]>>,
        terms: Vec<LabeledDense>,
    },
    Qubit {
        omega_x: f64,
        omega_z: f64,
        mu: f64,
    },
    Ghz {
        n: usize,
        mu: f64,
        lambda: f64,
    },
    SpinChain {
        n: usize,
        mu: f64,
        lambda: f64,
    },
    Charges {
        n_qubits: usize,
        h0: Vec<PauliTerm>,
        charges: Vec<LabeledPauli>,
    },
}

/// `coeff * P` with `P` written like `"X0 Z2"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliTerm {
    pub coeff: f64,
    pub pauli: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledPauli {
    pub label: String,
    pub mu: f64,
    pub operator: Vec<PauliTerm>,
}

/// Row-major `[re, im]` entries.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledDense {
    pub label: String,
    pub mu: f64,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl SweepSpec {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        let range = (self.start, self.stop, self.count);
        let points = match (&self.values, range) {
            (Some(v), (None, None, None)) => v.clone(),
            (None, (Some(start), Some(stop), Some(count))) => {
                if count == 0 {
                    return Err(config_err("sweep.count must be at least 1"));
                }
                if self.spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
                    return Err(config_err("sweep.start and sweep.stop must be positive for log spacing"));
                }
                (0..count)
                    .map(|i| {
                        let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                        match self.spacing {
                            Spacing::Linear => start + t * (stop - start),
                            Spacing::Log => (start.ln() + t * (stop.ln() - start.ln())).exp(),
                        }
                    })
                    .collect()
            }
            _ => {
                return Err(config_err(
                    "sweep needs either `values` or all of `start`, `stop`, `count`",
                ))
            }
        };
        if points.is_empty() {
            return Err(config_err("sweep.values is empty"));
        }
        if let Some(bad) = points.iter().find(|x| !x.is_finite()) {
            return Err(config_err(format!("sweep value {bad} is not finite")));
        }
        Ok(points)
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> CliResult<ModelConfig> {
    let cfg: ModelConfig = serde_json::from_str(text).map_err(|e| {
        config_err(format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &std::path::Path) -> CliResult<ModelConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn check_label(label: &str) -> CliResult<()> {
    if label.is_empty() || label.chars().any(|c| matches!(c, ',' | '"' | '\n' | '\r' | ':')) {
        return Err(config_err(format!(
            "label {label:?} must be non-empty and free of commas, colons, quotes and newlines"
        )));
    }
    if label == "beta" || label == "n" {
        return Err(config_err(format!("label {label:?} is reserved")));
    }
    Ok(())
}

fn pauli_sum(terms: &[PauliTerm], n_qubits: usize, what: &str) -> CliResult<HermitianOperator> {
    let parsed = terms
        .iter()
        .map(|t| PauliString::parse(&t.pauli, n_qubits).map(|p| (t.coeff, p)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| config_err(format!("{what}: {e}")))?;
    build_pauli_operator(&parsed, n_qubits).map_err(|e| config_err(format!("{what}: {e}")))
}

fn dense_matrix(entries: &[[f64; 2]], dim: usize, what: &str) -> CliResult<HermitianOperator> {
    if entries.len() != dim * dim {
        return Err(config_err(format!(
            "{what}: expected {} entries for dim {dim}, found {}",
            dim * dim,
            entries.len()
        )));
    }
    let m = CMatrix::from_row_iterator(dim, dim, entries.iter().map(|[re, im]| Complex64::new(*re, *im)));
    HermitianOperator::new(m).map_err(|e| config_err(format!("{what}: {e}")))
}

impl ModelConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.schema != SCHEMA {
            return Err(config_err(format!("schema must be {SCHEMA:?}, found {:?}", self.schema)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(config_err(format!("beta must be finite and nonnegative, found {}", self.beta)));
        }
        let labels = self.labels();
        for l in &labels {
            check_label(l)?;
        }
        if let Some(sweep) = &self.sweep {
            let var = sweep.variable.as_str();
            let ok = var == "beta"
                || (var == "n" && matches!(self.model, ModelSpec::Ghz { .. } | ModelSpec::SpinChain { .. }))
                || labels.iter().any(|l| l == var);
            if !ok {
                return Err(config_err(format!("sweep.variable {var:?} does not exist in this model")));
            }
            for x in sweep.points()? {
                if var == "beta" && x < 0.0 {
                    return Err(config_err(format!("sweep value beta={x} is negative")));
                }
                if var == "n" && (x.fract() != 0.0 || x < 2.0) {
                    return Err(config_err(format!("sweep value n={x} must be an integer >= 2")));
                }
            }
        }
        // Build once so structural errors surface before any computation.
        self.hamiltonian(None)?;
        Ok(())
    }

    /// Parameter labels in term order.
    pub fn labels(&self) -> Vec<String> {
        match &self.model {
            ModelSpec::Pauli { terms, .. } => terms.iter().map(|t| t.label.clone()).collect(),
            ModelSpec::Dense { terms, .. } => terms.iter().map(|t| t.label.clone()).collect(),
            ModelSpec::Charges { charges, .. } => charges.iter().map(|t| t.label.clone()).collect(),
            ModelSpec::Qubit { .. } | ModelSpec::Ghz { .. } => vec!["mu".into()],
            ModelSpec::SpinChain { .. } => vec!["mu".into(), "lambda".into()],
        }
    }

    pub fn sweep_points(&self) -> CliResult<Option<(String, Vec<f64>)>> {
        match &self.sweep {
            None => Ok(None),
            Some(s) => Ok(Some((s.variable.clone(), s.points()?))),
        }
    }

    /// Hamiltonian and inverse temperature with an optional swept variable applied.
    pub fn point(&self, sweep: Option<(&str, f64)>) -> CliResult<(ParamHamiltonian, f64)> {
        let mut beta = self.beta;
        let mut n_override = None;
        let mut label_override = None;
        match sweep {
            Some(("beta", x)) => beta = x,
            Some(("n", x)) => n_override = Some(x as usize),
            Some((label, x)) => label_override = Some((label, x)),
            None => {}
        }
        let mut h = self.hamiltonian(n_override)?;
        if let Some((label, x)) = label_override {
            let idx = h.index_of(label).map_err(|e| config_err(e.to_string()))?;
            h = h.with_mu(idx, x).map_err(|e| config_err(e.to_string()))?;
        }
        Ok((h, beta))
    }

    fn hamiltonian(&self, n_override: Option<usize>) -> CliResult<ParamHamiltonian> {
        let wrap = |e: thermal_qfi::Error| config_err(e.to_string());
        match &self.model {
            ModelSpec::Pauli { n_qubits, fixed, terms } => {
                let fixed_op = if fixed.is_empty() {
                    None
                } else {
                    Some(pauli_sum(fixed, *n_qubits, "model.fixed")?)
                };
                let terms = terms
                    .iter()
                    .map(|t| {
                        pauli_sum(&t.operator, *n_qubits, &format!("term {:?}", t.label))
                            .map(|op| HamiltonianTerm::new(t.label.clone(), t.mu, op))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                ParamHamiltonian::new(fixed_op, terms).map_err(wrap)
            }
            ModelSpec::Dense { dim, fixed, terms } => {
                let fixed_op = fixed
                    .as_ref()
                    .map(|f| dense_matrix(f, *dim, "model.fixed"))
                    .transpose()?;
                let terms = terms
                    .iter()
                    .map(|t| {
                        dense_matrix(&t.matrix, *dim, &format!("term {:?}", t.label))
                            .map(|op| HamiltonianTerm::new(t.label.clone(), t.mu, op))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                ParamHamiltonian::new(fixed_op, terms).map_err(wrap)
            }
            ModelSpec::Qubit { omega_x, omega_z, mu } => {
                Ok(QubitModel::new(*omega_x, *omega_z, *mu).map_err(wrap)?.hamiltonian())
            }
            ModelSpec::Ghz { n, mu, lambda } => ghz_hamiltonian(n_override.unwrap_or(*n), *mu, *lambda).map_err(wrap),
            ModelSpec::SpinChain { n, mu, lambda } => spin_chain(n_override.unwrap_or(*n), *mu, *lambda).map_err(wrap),
            ModelSpec::Charges { n_qubits, h0, charges } => {
                let h0 = pauli_sum(h0, *n_qubits, "model.h0")?;
                let charges = charges
                    .iter()
                    .map(|c| {
                        pauli_sum(&c.operator, *n_qubits, &format!("charge {:?}", c.label))
                            .map(|op| (c.label.clone(), c.mu, op))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Ok(charge_model(h0, charges).map_err(wrap)?.hamiltonian)
            }
        }
    }
}
