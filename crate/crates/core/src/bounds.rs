//! Closed-form upper and lower bounds on the QFI, on estimation error, and on
//! sample complexity.

use crate::error::{Error, Result};
use crate::gibbs::{
    classical_from_centered, diag_block_from_centered, skew_from_centered, thermal_state, variance_from_centered,
    ParamHamiltonian, ThermalState,
};
use crate::operator::{CMatrix, HermitianOperator};
use crate::par;
use crate::qfi::{qfi_matrix_labeled, QfiMatrix};

/// Below this value of `beta * gap` the constants return their series limits.
const SERIES_CUTOFF: f64 = 1e-8;
/// Prefactor of the upper classical-uncertainty bound.
pub const CLASSICAL_UPPER_FACTOR: f64 = 2.4;
/// Prefactor of the lower classical-uncertainty bound.
pub const CLASSICAL_LOWER_FACTOR: f64 = 0.8;

/// `tanh^2(x/2) / x^2` with `x = beta * gap`; 1/4 as `x -> 0`.
pub fn c1_const(beta: f64, gap: f64) -> f64 {
    let x = (beta * gap).abs();
    if x < SERIES_CUTOFF {
        return 0.25;
    }
    let t = (0.5 * x).tanh();
    t * t / (x * x)
}

/// `ln` of `2 sinh(x/2) tanh(x/2) / x^2` with `x = beta * seminorm`.
/// Finite for all finite `x`, unlike the constant itself.
pub fn ln_c2_const(beta: f64, seminorm: f64) -> f64 {
    let x = (beta * seminorm).abs();
    if x < SERIES_CUTOFF {
        return 0.5f64.ln();
    }
    // 2 sinh(x/2) = e^{x/2} (1 - e^{-x})
    0.5 * x + (-(-x).exp_m1()).ln() + (0.5 * x).tanh().ln() - 2.0 * x.ln()
}

/// `2 sinh(x/2) tanh(x/2) / x^2` with `x = beta * seminorm`; 1/2 as `x -> 0`.
pub fn c2_const(beta: f64, seminorm: f64) -> f64 {
    ln_c2_const(beta, seminorm).exp()
}

/// Variance-based QFI bounds for one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceBounds {
    pub upper: f64,
    pub upper_refined: f64,
    pub lower: f64,
}

pub fn qfi_bounds_variance(beta: f64, variance: f64, diag_variance: f64, c1_seminorm: f64, c1_mingap: f64) -> VarianceBounds {
    let b2 = beta * beta;
    let w = 4.0 * c1_mingap;
    VarianceBounds {
        upper: b2 * variance,
        upper_refined: w * b2 * variance + (1.0 - w) * b2 * diag_variance,
        lower: 4.0 * b2 * c1_seminorm * variance,
    }
}

/// Bounds in terms of the classical part of the uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalBounds {
    pub upper: f64,
    pub lower: f64,
}

/// Bounds from `classical = variance - skew`; `ln_c2` from [`ln_c2_const`].
pub fn qfi_bounds_classical(beta: f64, classical: f64, ln_c2: f64) -> ClassicalBounds {
    let b2c = beta * beta * classical.max(0.0);
    let upper = if b2c > 0.0 {
        (CLASSICAL_UPPER_FACTOR.ln() + ln_c2 + b2c.ln()).exp()
    } else {
        0.0
    };
    ClassicalBounds {
        upper,
        lower: CLASSICAL_LOWER_FACTOR * b2c,
    }
}

pub fn qfi_bounds_skew(beta: f64, variance: f64, skew: f64, c2: f64) -> ClassicalBounds {
    qfi_bounds_classical(beta, variance - skew, c2.ln())
}

/// Logarithmic-mean pair weight `(p_j - p_k) / ln(p_j / p_k)`.
fn log_mean_weight(rho: &ThermalState, j: usize, k: usize) -> f64 {
    let p = rho.populations();
    let w = rho.energies();
    let x = rho.beta() * (w[k] - w[j]);
    if x.abs() < SERIES_CUTOFF {
        0.5 * (p[j] + p[k])
    } else {
        (p[j] + p[k]) * (0.5 * x).tanh() / x
    }
}

/// `beta^2 int_0^1 tr(rho^a dA rho^(1-a) dA) da`, integrated in closed form.
pub fn miller_bound(rho: &ThermalState, a: &HermitianOperator) -> Result<f64> {
    let (da, _) = rho.centered(a)?;
    Ok(miller_from_centered(rho, &da))
}

pub(crate) fn miller_from_centered(rho: &ThermalState, da: &CMatrix) -> f64 {
    let d = rho.dim();
    let mut acc = 0.0;
    for j in 0..d {
        for k in 0..d {
            acc += log_mean_weight(rho, j, k) * da[(j, k)].norm_sqr();
        }
    }
    rho.beta() * rho.beta() * acc
}

/// Bounds on the relative error `sqrt(var_opt) / |mu_l|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeErrorBounds {
    pub variance_lower: f64,
    pub variance_upper: f64,
    pub classical_lower: f64,
    pub classical_upper: f64,
}

/// `variance_h` and `skew_h` refer to `H_l = mu_l A_l`, in energy units squared.
pub fn relative_error_bounds(
    beta: f64,
    n_samples: u64,
    mu_l: f64,
    variance_h: f64,
    skew_h: f64,
    c1_seminorm: f64,
    c2: f64,
) -> Result<RelativeErrorBounds> {
    relative_error_bounds_classical(beta, n_samples, mu_l, variance_h, variance_h - skew_h, c1_seminorm, c2.ln())
}

pub fn relative_error_bounds_classical(
    beta: f64,
    n_samples: u64,
    mu_l: f64,
    variance_h: f64,
    classical_h: f64,
    c1_seminorm: f64,
    ln_c2: f64,
) -> Result<RelativeErrorBounds> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if mu_l == 0.0 || !(variance_h > 0.0) || !(beta > 0.0) {
        return Err(Error::NotEstimable { label: String::new() });
    }
    let root_n = (n_samples as f64).sqrt();
    let dh = variance_h.sqrt();
    let root_c = classical_h.max(0.0).sqrt();
    Ok(RelativeErrorBounds {
        variance_lower: 1.0 / (beta * root_n * dh),
        variance_upper: 1.0 / (2.0 * beta * c1_seminorm.sqrt() * root_n * dh),
        classical_lower: 1.0 / ((0.5 * (CLASSICAL_UPPER_FACTOR.ln() + ln_c2)).exp() * beta * root_n * root_c),
        classical_upper: 1.0 / (CLASSICAL_LOWER_FACTOR.sqrt() * beta * root_n * root_c),
    })
}

/// Multiparameter error and sample-count bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiParamBounds {
    /// `tr(F^-1)`, absent when `F` is not positive definite.
    pub trace_inv_qfi: Option<f64>,
    pub sum_inv_diag: f64,
    /// `tr(F^-1) / N`.
    pub eps2_lower_trace: Option<f64>,
    /// `sum_l (1 / F_ll) / N`.
    pub eps2_lower_diag: f64,
    /// Samples needed for total error `eps_err`, classical-uncertainty form.
    pub sample_lower_classical: f64,
    /// Samples needed for total error `eps_err`, variance form.
    pub sample_lower_variance: f64,
    /// `M / (beta^2 eps^2) min_l 1 / var_l`.
    pub sample_order_variance: f64,
    /// `M / (beta^2 eps^2) max{min_l 1 / var_l, min_l (1 / (2 c2)) / classical_l}`.
    pub sample_order_combined: f64,
    pub qfi_positive_definite: bool,
}

pub fn multiparam_bounds(
    f: &QfiMatrix,
    n_samples: u64,
    eps_err: f64,
    beta: f64,
    variances: &[f64],
    classicals: &[f64],
    c2: f64,
) -> Result<MultiParamBounds> {
    let m = f.n_params();
    if variances.len() != m || classicals.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: variances.len().min(classicals.len()),
        });
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if !(eps_err > 0.0) {
        return Err(Error::InvalidArgument(format!("target error {eps_err} must be positive")));
    }
    let n = n_samples as f64;
    let trace_inv_qfi = f.trace_inverse().ok();
    let sum_inv_diag = f.sum_inverse_diagonal();
    let scale = 1.0 / (beta * beta * eps_err * eps_err);
    let half_inv_c2 = 0.5 / c2;
    let sample_lower_classical = scale * classicals.iter().map(|c| half_inv_c2 / c).sum::<f64>();
    let sample_lower_variance = scale * variances.iter().map(|v| 1.0 / v).sum::<f64>();
    let min_inv_var = variances.iter().map(|v| 1.0 / v).fold(f64::INFINITY, f64::min);
    let min_classical = classicals.iter().map(|c| half_inv_c2 / c).fold(f64::INFINITY, f64::min);
    Ok(MultiParamBounds {
        trace_inv_qfi,
        sum_inv_diag,
        eps2_lower_trace: trace_inv_qfi.map(|t| t / n),
        eps2_lower_diag: sum_inv_diag / n,
        sample_lower_classical,
        sample_lower_variance,
        sample_order_variance: m as f64 * scale * min_inv_var,
        sample_order_combined: m as f64 * scale * min_inv_var.max(min_classical),
        qfi_positive_definite: trace_inv_qfi.is_some(),
    })
}

/// Bounds on the optimal variance of a chemical-potential estimate from the
/// classical uncertainty of its charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChemicalPotentialBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn chemical_potential_bounds(beta: f64, n_samples: u64, classical_charge: f64, c2: f64) -> ChemicalPotentialBounds {
    let denom = beta * beta * n_samples as f64 * classical_charge;
    ChemicalPotentialBounds {
        lower: 1.0 / (CLASSICAL_UPPER_FACTOR * c2 * denom),
        upper: 1.0 / (CLASSICAL_LOWER_FACTOR * denom),
    }
}

/// Shared quantities of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundContext {
    pub beta: f64,
    pub seminorm: f64,
    pub min_gap: f64,
    pub c1_seminorm: f64,
    pub c1_mingap: f64,
    pub c2: f64,
    pub ln_c2: f64,
    pub n_samples: u64,
    pub eps_err: f64,
}

/// Exact QFI and all single-parameter bounds for one coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterBounds {
    pub label: String,
    pub mu: f64,
    pub qfi_exact: f64,
    pub variance: f64,
    pub skew: f64,
    pub classical: f64,
    pub diag_variance: f64,
    pub variance_upper: f64,
    pub variance_upper_refined: f64,
    pub variance_lower: f64,
    pub classical_upper: f64,
    pub classical_lower: f64,
    pub miller_upper: f64,
    /// Absent when `mu_l = 0` or the variance vanishes.
    pub relative: Option<RelativeErrorBounds>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub context: BoundContext,
    pub parameters: Vec<ParameterBounds>,
    pub multi: MultiParamBounds,
    pub qfi: QfiMatrix,
}

/// A bound that failed to hold.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub label: String,
    pub relation: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

fn le_with_slack(lhs: f64, rhs: f64, slack: f64) -> bool {
    lhs <= rhs + slack * lhs.abs().max(rhs.abs())
}

impl BoundReport {
    /// Checks every sandwich relation with relative `slack`.
    pub fn check_sandwich(&self, slack: f64) -> Vec<BoundViolation> {
        let mut out = Vec::new();
        for p in &self.parameters {
            let relations: [(&'static str, f64, f64); 6] = [
                ("variance_lower <= qfi", p.variance_lower, p.qfi_exact),
                ("qfi <= variance_upper_refined", p.qfi_exact, p.variance_upper_refined),
                ("variance_upper_refined <= variance_upper", p.variance_upper_refined, p.variance_upper),
                ("classical_lower <= qfi", p.classical_lower, p.qfi_exact),
                ("qfi <= classical_upper", p.qfi_exact, p.classical_upper),
                ("qfi <= miller_upper", p.qfi_exact, p.miller_upper),
            ];
            for (relation, lhs, rhs) in relations {
                if !le_with_slack(lhs, rhs, slack) {
                    out.push(BoundViolation {
                        label: p.label.clone(),
                        relation,
                        lhs,
                        rhs,
                    });
                }
            }
        }
        out
    }
}

/// Per-parameter centered moments needed by the report.
struct Moments {
    variance: f64,
    skew: f64,
    classical: f64,
    diag_variance: f64,
    miller: f64,
}

fn moments(rho: &ThermalState, a: &HermitianOperator) -> Result<Moments> {
    let (da, _) = rho.centered(a)?;
    Ok(Moments {
        variance: variance_from_centered(rho, &da),
        skew: skew_from_centered(rho, &da),
        classical: classical_from_centered(rho, &da),
        diag_variance: diag_block_from_centered(rho, &da),
        miller: miller_from_centered(rho, &da),
    })
}

/// Builds the full report for the Gibbs state of `h` at `beta`.
pub fn bound_report(h: &ParamHamiltonian, beta: f64, n_samples: u64, eps_err: f64) -> Result<BoundReport> {
    let rho = thermal_state(h, beta)?;
    bound_report_for_state(h, &rho, n_samples, eps_err)
}

pub fn bound_report_for_state(
    h: &ParamHamiltonian,
    rho: &ThermalState,
    n_samples: u64,
    eps_err: f64,
) -> Result<BoundReport> {
    let beta = rho.beta();
    let sq = rho.spectral_quantities();
    let ln_c2 = ln_c2_const(beta, sq.seminorm);
    let context = BoundContext {
        beta,
        seminorm: sq.seminorm,
        min_gap: sq.min_gap,
        c1_seminorm: c1_const(beta, sq.seminorm),
        c1_mingap: c1_const(beta, sq.min_gap),
        c2: ln_c2.exp(),
        ln_c2,
        n_samples,
        eps_err,
    };
    let generators = h.generators();
    let qfi = qfi_matrix_labeled(rho, h.labels(), &generators)?;
    let all_moments = par::try_map_slice(&generators, |a| moments(rho, a))?;

    let mut parameters = Vec::with_capacity(generators.len());
    for (l, (term, mo)) in h.terms().iter().zip(&all_moments).enumerate() {
        let vb = qfi_bounds_variance(beta, mo.variance, mo.diag_variance, context.c1_seminorm, context.c1_mingap);
        let cb = qfi_bounds_classical(beta, mo.classical, ln_c2);
        let mu2 = term.mu * term.mu;
        let relative = relative_error_bounds_classical(
            beta,
            n_samples,
            term.mu,
            mu2 * mo.variance,
            mu2 * mo.classical,
            context.c1_seminorm,
            ln_c2,
        )
        .ok();
        parameters.push(ParameterBounds {
            label: term.label.clone(),
            mu: term.mu,
            qfi_exact: qfi.get(l, l),
            variance: mo.variance,
            skew: mo.skew,
            classical: mo.classical,
            diag_variance: mo.diag_variance,
            variance_upper: vb.upper,
            variance_upper_refined: vb.upper_refined,
            variance_lower: vb.lower,
            classical_upper: cb.upper,
            classical_lower: cb.lower,
            miller_upper: mo.miller,
            relative,
        });
    }
    let variances: Vec<f64> = parameters.iter().map(|p| p.variance).collect();
    let classicals: Vec<f64> = parameters.iter().map(|p| p.classical).collect();
    let multi = multiparam_bounds(&qfi, n_samples, eps_err, beta, &variances, &classicals, context.c2)?;
    Ok(BoundReport {
        context,
        parameters,
        multi,
        qfi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn c1_limits() {
        assert_eq!(c1_const(1.0, 0.0), 0.25);
        assert_eq!(c1_const(1e-9, 1.0), 0.25);
        assert_relative_eq!(c1_const(1.0, 2.0), 1f64.tanh().powi(2) / 4.0, epsilon = 1e-16);
        assert_relative_eq!(c1_const(1.0, 200.0), 1.0 / 40000.0, max_relative = 1e-12);
        assert!((c1_const(1.0, 1e-6) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn c2_limits() {
        assert_relative_eq!(c2_const(0.0, 3.0), 0.5, epsilon = 1e-16);
        let x: f64 = 60.0;
        assert_relative_eq!(c2_const(1.0, x), (0.5 * x).exp() / (x * x), max_relative = 1e-12);
        let x: f64 = 1.3;
        assert_relative_eq!(
            c2_const(1.0, x),
            2.0 * (0.5 * x).sinh() * (0.5 * x).tanh() / (x * x),
            max_relative = 1e-14
        );
        let min = (1..4000).map(|i| c2_const(1.0, i as f64 * 0.005)).fold(f64::INFINITY, f64::min);
        assert!(min >= 0.42);
        assert!(ln_c2_const(1.0, 5000.0).is_finite());
    }

    #[test]
    fn zero_beta_bounds_vanish() {
        let vb = qfi_bounds_variance(0.0, 1.3, 0.4, 0.25, 0.25);
        assert_eq!((vb.upper, vb.upper_refined, vb.lower), (0.0, 0.0, 0.0));
        let cb = qfi_bounds_skew(0.0, 1.0, 0.0, 0.5);
        assert_eq!((cb.upper, cb.lower), (0.0, 0.0));
    }

    #[test]
    fn high_temperature_classical_limits() {
        let beta = 1e-4;
        let cb = qfi_bounds_skew(beta, 1.0, 0.0, c2_const(beta, 1.0));
        assert_relative_eq!(cb.upper / (beta * beta), 1.2, max_relative = 1e-6);
        assert_relative_eq!(cb.lower / (beta * beta), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn pure_state_limit_classical_bounds_vanish() {
        let cb = qfi_bounds_skew(3.0, 0.7, 0.7, 2.0);
        assert_eq!((cb.upper, cb.lower), (0.0, 0.0));
    }

    #[test]
    fn relative_bounds_scale_as_inverse_root_n() {
        let a = relative_error_bounds(0.5, 1, 0.3, 0.2, 0.05, 0.2, 0.6).unwrap();
        let b = relative_error_bounds(0.5, 100, 0.3, 0.2, 0.05, 0.2, 0.6).unwrap();
        assert_relative_eq!(a.variance_lower / b.variance_lower, 10.0, epsilon = 1e-12);
        assert_relative_eq!(a.variance_upper / b.variance_upper, 10.0, epsilon = 1e-12);
        assert_relative_eq!(a.classical_lower / b.classical_lower, 10.0, epsilon = 1e-12);
        assert_relative_eq!(a.classical_upper / b.classical_upper, 10.0, epsilon = 1e-12);
        assert!(matches!(
            relative_error_bounds(0.5, 1, 0.3, 0.0, 0.0, 0.2, 0.6),
            Err(Error::NotEstimable { .. })
        ));
    }

    #[test]
    fn equal_variances_sample_bound() {
        use nalgebra::DMatrix;
        let f = QfiMatrix::from_parts(vec!["a".into(), "b".into(), "c".into()], DMatrix::from_diagonal_element(3, 3, 2.0)).unwrap();
        let (beta, eps, var) = (0.7, 0.1, 0.4);
        let mb = multiparam_bounds(&f, 10, eps, beta, &[var; 3], &[0.3; 3], 0.6).unwrap();
        assert_relative_eq!(mb.sample_lower_variance, 3.0 / (beta * beta * eps * eps * var), max_relative = 1e-14);
        assert_relative_eq!(mb.trace_inv_qfi.unwrap(), mb.sum_inv_diag, max_relative = 1e-14);
        assert_relative_eq!(mb.eps2_lower_diag, 1.5 / 10.0, max_relative = 1e-14);
    }
}
