//! Quantum Fisher information of Gibbs states with respect to Hamiltonian
//! coefficients, symmetric logarithmic derivatives, and two independent
//! numerical checks (projective classical Fisher information and a
//! fidelity-based estimate).
//!
//! All pair sums run in the energy eigenbasis. Population ratios enter only
//! through `(p_j - p_k) / (p_j + p_k) = tanh(beta (w_k - w_j) / 2)`, which
//! stays accurate when both populations are tiny.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gibbs::{ParamHamiltonian, ThermalState};
use crate::operator::{eigendecompose, CMatrix, HermitianOperator};
use crate::par;

/// Pairs whose larger population is below this are skipped.
const NEGLIGIBLE_POPULATION: f64 = 1e-300;
/// Outcomes below this probability are excluded from the classical Fisher sum.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;

/// Symmetric QFI matrix with parameter labels.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiMatrix {
    labels: Vec<String>,
    values: DMatrix<f64>,
}

impl QfiMatrix {
    /// Wraps an externally computed matrix; it must be square, labeled and symmetric.
    pub fn from_parts(labels: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        let m = labels.len();
        if values.nrows() != m || values.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: values.nrows(),
            });
        }
        let asym = (&values - values.transpose()).amax();
        if asym > 1e-10 * values.amax().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidArgument(format!("QFI matrix asymmetric by {asym:e}")));
        }
        Ok(Self { labels, values })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn n_params(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, l: usize, m: usize) -> f64 {
        self.values[(l, m)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_params()).map(|l| self.values[(l, l)]).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.values.clone()).eigenvalues.min()
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        let chol = self.values.clone().cholesky().ok_or(Error::SingularQfi)?;
        let inv = chol.inverse();
        if inv.iter().all(|x| x.is_finite()) {
            Ok(inv)
        } else {
            Err(Error::SingularQfi)
        }
    }

    /// `tr(F^-1)`; fails unless `F` is positive definite.
    pub fn trace_inverse(&self) -> Result<f64> {
        Ok(self.inverse()?.trace())
    }

    /// `sum_l 1 / F_ll`.
    pub fn sum_inverse_diagonal(&self) -> f64 {
        self.diagonal().iter().map(|f| 1.0 / f).sum()
    }
}

/// Symmetric logarithmic derivative for one parameter.
#[derive(Debug, Clone)]
pub struct SldOperator {
    pub label: String,
    pub operator: HermitianOperator,
}

/// `tanh(beta (w_k - w_j) / 2)`, i.e. `(p_j - p_k) / (p_j + p_k)`.
fn population_contrast(rho: &ThermalState, j: usize, k: usize) -> f64 {
    let w = rho.energies();
    (0.5 * rho.beta() * (w[k] - w[j])).tanh()
}

/// Per-pair QFI weights `W_jk` with `F_lm = sum_jk W_jk Re(dA^l_jk conj(dA^m_jk))`.
fn qfi_weights(rho: &ThermalState) -> Result<DMatrix<f64>> {
    let d = rho.dim();
    let p = rho.populations();
    let w = rho.energies();
    let beta = rho.beta();
    let mut out = DMatrix::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            if p[j].max(p[k]) < NEGLIGIBLE_POPULATION {
                continue;
            }
            let weight = if rho.is_degenerate(j, k) {
                0.5 * beta * beta * (p[j] + p[k])
            } else {
                let t = population_contrast(rho, j, k);
                let gap = w[j] - w[k];
                2.0 * (p[j] + p[k]) * t * t / (gap * gap)
            };
            if !weight.is_finite() {
                return Err(Error::NonFinitePair {
                    context: "QFI pair weight",
                    j,
                    k,
                });
            }
            out[(j, k)] = weight;
        }
    }
    Ok(out)
}

fn weighted_overlap(weights: &DMatrix<f64>, a: &CMatrix, b: &CMatrix) -> f64 {
    let d = weights.nrows();
    let mut acc = 0.0;
    for k in 0..d {
        for j in 0..d {
            let wjk = weights[(j, k)];
            if wjk != 0.0 {
                acc += wjk * (a[(j, k)] * b[(j, k)].conj()).re;
            }
        }
    }
    acc
}

/// QFI matrix with labels `"0"`, `"1"`, ...
pub fn qfi_matrix(rho: &ThermalState, generators: &[HermitianOperator]) -> Result<QfiMatrix> {
    let labels = (0..generators.len()).map(|i| i.to_string()).collect();
    qfi_matrix_labeled(rho, labels, generators)
}

/// QFI matrix of all coefficients of `h` at inverse temperature `beta`.
pub fn qfi_of_hamiltonian(h: &ParamHamiltonian, beta: f64) -> Result<QfiMatrix> {
    let rho = crate::gibbs::thermal_state(h, beta)?;
    qfi_matrix_labeled(&rho, h.labels(), &h.generators())
}

pub fn qfi_matrix_labeled(
    rho: &ThermalState,
    labels: Vec<String>,
    generators: &[HermitianOperator],
) -> Result<QfiMatrix> {
    if labels.len() != generators.len() {
        return Err(Error::DimensionMismatch {
            expected: generators.len(),
            found: labels.len(),
        });
    }
    let weights = qfi_weights(rho)?;
    let centered: Vec<CMatrix> = par::try_map_slice(generators, |a| rho.centered(a).map(|(m, _)| m))?;
    let m = generators.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|l| (l..m).map(move |k| (l, k))).collect();
    let entries = par::map_slice(&pairs, |&(l, k)| weighted_overlap(&weights, &centered[l], &centered[k]));
    let mut values = DMatrix::zeros(m, m);
    for (&(l, k), &v) in pairs.iter().zip(&entries) {
        if !v.is_finite() {
            return Err(Error::NonFinite("QFI entry"));
        }
        values[(l, k)] = v;
        values[(k, l)] = v;
    }
    Ok(QfiMatrix { labels, values })
}

/// Multiplies `dA_jk` by a pair coefficient and maps back to the computational basis.
fn pairwise_map(rho: &ThermalState, a: &HermitianOperator, coeff: impl Fn(usize, usize) -> f64) -> Result<CMatrix> {
    let (mut m, _) = rho.centered(a)?;
    let d = rho.dim();
    for k in 0..d {
        for j in 0..d {
            let c = coeff(j, k);
            if !c.is_finite() {
                return Err(Error::NonFinitePair {
                    context: "pair coefficient",
                    j,
                    k,
                });
            }
            m[(j, k)] *= c;
        }
    }
    Ok(rho.spectrum().from_eigenbasis(&m))
}

fn sld_coefficient(rho: &ThermalState, j: usize, k: usize) -> f64 {
    if rho.is_degenerate(j, k) {
        -rho.beta()
    } else {
        let w = rho.energies();
        2.0 * population_contrast(rho, j, k) / (w[j] - w[k])
    }
}

/// SLD `L` of the coefficient multiplying `generator`.
pub fn sld(rho: &ThermalState, generator: &HermitianOperator) -> Result<SldOperator> {
    sld_labeled(rho, "", generator)
}

pub fn sld_labeled(rho: &ThermalState, label: &str, generator: &HermitianOperator) -> Result<SldOperator> {
    let m = pairwise_map(rho, generator, |j, k| sld_coefficient(rho, j, k))?;
    Ok(SldOperator {
        label: label.to_string(),
        operator: HermitianOperator::from_matrix_unchecked((&m + m.adjoint()) * Complex64::new(0.5, 0.0)),
    })
}

/// Analytic derivative of the Gibbs state with respect to the coefficient of `generator`.
pub fn state_derivative(rho: &ThermalState, generator: &HermitianOperator) -> Result<CMatrix> {
    let p = rho.populations();
    let w = rho.energies();
    pairwise_map(rho, generator, |j, k| {
        if rho.is_degenerate(j, k) {
            -0.5 * rho.beta() * (p[j] + p[k])
        } else {
            (p[j] + p[k]) * population_contrast(rho, j, k) / (w[j] - w[k])
        }
    })
}

/// Central-difference derivative of the Gibbs state in parameter `l`.
/// `step` defaults to [`default_step`]; Richardson extrapolation combines `h` and `h/2`.
pub fn state_derivative_fd(
    h: &ParamHamiltonian,
    beta: f64,
    l: usize,
    step: Option<f64>,
    richardson: bool,
) -> Result<CMatrix> {
    let mu = h.mus().get(l).copied().ok_or(Error::ParameterIndex {
        index: l,
        count: h.n_params(),
    })?;
    let step = step.unwrap_or_else(|| default_step(mu));
    let central = |s: f64| -> Result<CMatrix> {
        let plus = crate::gibbs::thermal_state(&h.with_mu(l, mu + s)?, beta)?.density_matrix();
        let minus = crate::gibbs::thermal_state(&h.with_mu(l, mu - s)?, beta)?.density_matrix();
        Ok((plus - minus) / Complex64::new(2.0 * s, 0.0))
    };
    let coarse = central(step)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = central(0.5 * step)?;
    Ok((fine * Complex64::new(4.0, 0.0) - coarse) / Complex64::new(3.0, 0.0))
}

/// `||drho - {rho, L}/2||_2 / ||drho||_2` (absolute when `drho` vanishes).
pub fn lyapunov_residual(rho: &ThermalState, l: &SldOperator, drho: &CMatrix) -> f64 {
    let r = rho.density_matrix();
    let lm = l.operator.matrix();
    let anti = (&r * lm + lm * &r) * Complex64::new(0.5, 0.0);
    let residual = (drho - anti).norm();
    let scale = drho.norm();
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

/// Finite-difference step `1e-5 * max(1, |mu|)`.
pub fn default_step(mu: f64) -> f64 {
    1e-5 * mu.abs().max(1.0)
}

/// `tr(rho [L_l, L_m])` from the closed pair sum. The trace is purely
/// imaginary; the real part is returned as computed (zero up to rounding).
pub fn saturability_complex(rho: &ThermalState, a_l: &HermitianOperator, a_m: &HermitianOperator) -> Result<Complex64> {
    let al = rho.spectrum().to_eigenbasis(a_l)?;
    let am = rho.spectrum().to_eigenbasis(a_m)?;
    let d = rho.dim();
    let p = rho.populations();
    let w = rho.energies();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            if rho.is_degenerate(j, k) || p[j].max(p[k]) < NEGLIGIBLE_POPULATION {
                continue;
            }
            let t = population_contrast(rho, j, k);
            let gap = w[j] - w[k];
            let c = 4.0 * (p[j] + p[k]) * t * t * t / (gap * gap);
            if !c.is_finite() {
                return Err(Error::NonFinitePair {
                    context: "saturability pair weight",
                    j,
                    k,
                });
            }
            acc += al[(j, k)] * am[(k, j)] * c;
        }
    }
    Ok(acc)
}

/// Imaginary part of `tr(rho [L_l, L_m])`; antisymmetric in `(l, m)`.
/// Zero for every pair is the condition for jointly attaining the QFI bound.
pub fn saturability(rho: &ThermalState, a_l: &HermitianOperator, a_m: &HermitianOperator) -> Result<f64> {
    Ok(saturability_complex(rho, a_l, a_m)?.im)
}

/// `tr(rho [L_l, L_m])` from explicit SLD matrices.
pub fn sld_commutator_trace(rho: &ThermalState, l: &SldOperator, m: &SldOperator) -> Complex64 {
    let r = rho.density_matrix();
    let (a, b) = (l.operator.matrix(), m.operator.matrix());
    (&r * (a * b - b * a)).trace()
}

/// Classical Fisher information of a projective measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfiResult {
    pub value: f64,
    /// Outcomes dropped because their probability was below [`MIN_OUTCOME_PROBABILITY`].
    pub excluded_outcomes: usize,
    /// Total probability of the dropped outcomes.
    pub excluded_probability: f64,
}

fn outcome_probabilities(h: &ParamHamiltonian, beta: f64, basis: &CMatrix) -> Result<Vec<f64>> {
    let rho = crate::gibbs::thermal_state(h, beta)?.density_matrix();
    let q = basis.adjoint() * rho * basis;
    Ok((0..basis.ncols()).map(|o| q[(o, o)].re).collect())
}

/// CFI of measuring in the columns of `basis`, with central finite
/// differences in parameter `l`.
pub fn classical_fisher_projective(
    h: &ParamHamiltonian,
    beta: f64,
    l: usize,
    basis: &CMatrix,
    step: Option<f64>,
    richardson: bool,
) -> Result<CfiResult> {
    let d = h.dim();
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: basis.nrows(),
        });
    }
    let deviation = (basis.adjoint() * basis - CMatrix::identity(d, d)).norm();
    if !(deviation <= 1e-10 * (d as f64).sqrt()) {
        return Err(Error::NonUnitaryBasis(deviation));
    }
    let mu = h.mus().get(l).copied().ok_or(Error::ParameterIndex {
        index: l,
        count: h.n_params(),
    })?;
    let step = step.unwrap_or_else(|| default_step(mu));
    let q = outcome_probabilities(h, beta, basis)?;
    let central = |s: f64| -> Result<Vec<f64>> {
        let plus = outcome_probabilities(&h.with_mu(l, mu + s)?, beta, basis)?;
        let minus = outcome_probabilities(&h.with_mu(l, mu - s)?, beta, basis)?;
        Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * s)).collect())
    };
    let mut dq = central(step)?;
    if richardson {
        let fine = central(0.5 * step)?;
        dq = fine.iter().zip(&dq).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
    }
    let mut result = CfiResult {
        value: 0.0,
        excluded_outcomes: 0,
        excluded_probability: 0.0,
    };
    for (qo, dqo) in q.iter().zip(&dq) {
        if *qo < MIN_OUTCOME_PROBABILITY {
            result.excluded_outcomes += 1;
            result.excluded_probability += qo.max(0.0);
        } else {
            result.value += dqo * dqo / qo;
        }
    }
    if !result.value.is_finite() {
        return Err(Error::NonFinite("classical Fisher information"));
    }
    Ok(result)
}

/// Root fidelity `tr sqrt(sqrt(rho) sigma sqrt(rho))` of two Gibbs states,
/// computed as the nuclear norm of `diag(sqrt p) V^H W diag(sqrt q)`.
pub fn gibbs_fidelity(rho: &ThermalState, sigma: &ThermalState) -> Result<f64> {
    let d = rho.dim();
    if sigma.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: sigma.dim(),
        });
    }
    let mut overlap = rho.spectrum().eigenvectors().adjoint() * sigma.spectrum().eigenvectors();
    for j in 0..d {
        let sp = (0.5 * rho.log_populations()[j]).exp();
        for k in 0..d {
            overlap[(j, k)] *= sp * (0.5 * sigma.log_populations()[k]).exp();
        }
    }
    let svd = overlap
        .try_svd(false, false, f64::EPSILON, 1000 * d.max(8))
        .ok_or(Error::SvdNonConvergence { dim: d })?;
    let fid: f64 = svd.singular_values.iter().sum();
    if !fid.is_finite() {
        return Err(Error::NonFinite("fidelity"));
    }
    if fid > 1.0 + 1e-10 {
        return Err(Error::FidelityAboveOne(fid));
    }
    Ok(fid)
}

/// `8 (1 - Fid) / eps^2` between the states displaced by `-eps/2` and
/// `+eps/2` in parameter `l`. Bias is `O(eps^2)`; `eps` should lie in
/// roughly `[1e-5, 1e-3]` times the parameter scale.
pub fn qfi_fidelity_oracle(h: &ParamHamiltonian, l: usize, beta: f64, eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("oracle step {eps} must be positive")));
    }
    let mu = h.mus().get(l).copied().ok_or(Error::ParameterIndex {
        index: l,
        count: h.n_params(),
    })?;
    let a = crate::gibbs::thermal_state(&h.with_mu(l, mu - 0.5 * eps)?, beta)?;
    let b = crate::gibbs::thermal_state(&h.with_mu(l, mu + 0.5 * eps)?, beta)?;
    let fid = gibbs_fidelity(&a, &b)?;
    Ok((8.0 * (1.0 - fid) / (eps * eps)).max(0.0))
}

/// Richardson combination of the oracle at `eps` and `eps / 2`.
pub fn qfi_fidelity_oracle_richardson(h: &ParamHamiltonian, l: usize, beta: f64, eps: f64) -> Result<f64> {
    let coarse = qfi_fidelity_oracle(h, l, beta, eps)?;
    let fine = qfi_fidelity_oracle(h, l, beta, 0.5 * eps)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Energy eigenbasis of the Gibbs state (columns), as a measurement basis.
pub fn energy_basis(h: &ParamHamiltonian) -> Result<CMatrix> {
    Ok(eigendecompose(&h.total())?.eigenvectors().clone())
}

/// Eigenbasis of an SLD, as a measurement basis.
pub fn sld_basis(l: &SldOperator) -> Result<CMatrix> {
    Ok(eigendecompose(&l.operator)?.eigenvectors().clone())
}
