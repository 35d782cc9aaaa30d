//! Gibbs states `rho = exp(-beta H) / Z` and thermal moments.
//!
//! Populations are kept in the log domain, shifted by the ground energy, so
//! `beta * ||H||_s` in the hundreds neither overflows nor silently loses the
//! ground state. Square roots of `rho` are only ever taken on the diagonal of
//! the energy eigenbasis.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{eigendecompose, CMatrix, HermitianOperator, SpectralDecomposition};

/// Default degeneracy tolerance relative to the Hamiltonian seminorm.
pub const DEFAULT_RELATIVE_DEGENERACY_TOL: f64 = 1e-10;

/// One `mu_l A_l` term of a parameterized Hamiltonian.
#[derive(Debug, Clone)]
pub struct HamiltonianTerm {
    pub label: String,
    pub mu: f64,
    pub generator: HermitianOperator,
}

impl HamiltonianTerm {
    pub fn new(label: impl Into<String>, mu: f64, generator: HermitianOperator) -> Self {
        Self {
            label: label.into(),
            mu,
            generator,
        }
    }
}

/// `H(mu) = H0 + sum_l mu_l A_l`.
#[derive(Debug, Clone)]
pub struct ParamHamiltonian {
    fixed_term: Option<HermitianOperator>,
    terms: Vec<HamiltonianTerm>,
    dim: usize,
}

impl ParamHamiltonian {
    pub fn new(fixed_term: Option<HermitianOperator>, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        let dim = fixed_term
            .as_ref()
            .map(HermitianOperator::dim)
            .or_else(|| terms.first().map(|t| t.generator.dim()))
            .ok_or_else(|| Error::InvalidArgument("Hamiltonian has no terms".into()))?;
        let mut labels = HashSet::new();
        for t in &terms {
            if t.generator.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.generator.dim(),
                });
            }
            if !t.mu.is_finite() {
                return Err(Error::NonFinite("term coefficient"));
            }
            if !labels.insert(t.label.as_str()) {
                return Err(Error::DuplicateLabel(t.label.clone()));
            }
        }
        Ok(Self {
            fixed_term,
            terms,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fixed_term(&self) -> Option<&HermitianOperator> {
        self.fixed_term.as_ref()
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn n_params(&self) -> usize {
        self.terms.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.label.clone()).collect()
    }

    pub fn mus(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.mu).collect()
    }

    pub fn generators(&self) -> Vec<HermitianOperator> {
        self.terms.iter().map(|t| t.generator.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.terms
            .iter()
            .position(|t| t.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.terms.len() {
            Ok(())
        } else {
            Err(Error::ParameterIndex {
                index,
                count: self.terms.len(),
            })
        }
    }

    /// A copy with `mu_index` replaced.
    pub fn with_mu(&self, index: usize, mu: f64) -> Result<Self> {
        self.check_index(index)?;
        if !mu.is_finite() {
            return Err(Error::NonFinite("term coefficient"));
        }
        let mut out = self.clone();
        out.terms[index].mu = mu;
        Ok(out)
    }

    /// `H_l = mu_l A_l`.
    pub fn term_operator(&self, index: usize) -> Result<HermitianOperator> {
        self.check_index(index)?;
        let t = &self.terms[index];
        Ok(t.generator.scale(t.mu))
    }

    /// `H0 + sum_l mu_l A_l`.
    pub fn total(&self) -> HermitianOperator {
        let mut acc = self
            .fixed_term
            .clone()
            .unwrap_or_else(|| HermitianOperator::zeros(self.dim));
        for t in &self.terms {
            acc = acc
                .try_add_scaled(&t.generator, t.mu)
                .expect("dimensions validated at construction");
        }
        acc
    }
}

/// Seminorm and minimum gap of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralQuantities {
    /// `max omega - min omega`.
    pub seminorm: f64,
    /// Smallest gap between distinct degeneracy groups; 0 when fully degenerate.
    pub min_gap: f64,
    pub fully_degenerate: bool,
}

impl SpectralQuantities {
    /// `eigenvalues` must be ascending.
    pub fn from_sorted(eigenvalues: &[f64], degeneracy_tol: f64) -> Self {
        let seminorm = eigenvalues[eigenvalues.len() - 1] - eigenvalues[0];
        let mut min_gap = f64::INFINITY;
        for w in eigenvalues.windows(2) {
            let gap = w[1] - w[0];
            if gap > degeneracy_tol {
                min_gap = min_gap.min(gap);
            }
        }
        let fully_degenerate = !min_gap.is_finite();
        Self {
            seminorm,
            min_gap: if fully_degenerate { 0.0 } else { min_gap },
            fully_degenerate,
        }
    }
}

/// Seminorm and minimum gap of `h`. `degeneracy_tol` defaults to
/// `1e-10 * seminorm`.
pub fn spectral_quantities(h: &HermitianOperator, degeneracy_tol: Option<f64>) -> Result<SpectralQuantities> {
    let spec = eigendecompose(h)?;
    let w = spec.eigenvalues();
    let tol = degeneracy_tol.unwrap_or(DEFAULT_RELATIVE_DEGENERACY_TOL * (spec.max() - spec.min()));
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("degeneracy tolerance {tol} must be nonnegative")));
    }
    Ok(SpectralQuantities::from_sorted(w, tol))
}

/// A Gibbs state with its cached spectral data.
#[derive(Debug, Clone)]
pub struct ThermalState {
    beta: f64,
    spectrum: SpectralDecomposition,
    log_populations: Vec<f64>,
    populations: Vec<f64>,
    partition_log: f64,
    degeneracy_tol: f64,
    groups: Vec<usize>,
}

/// Gibbs state of `H(mu)` at inverse temperature `beta`.
pub fn thermal_state(h: &ParamHamiltonian, beta: f64) -> Result<ThermalState> {
    ThermalState::from_operator(&h.total(), beta)
}

impl ThermalState {
    pub fn from_operator(h: &HermitianOperator, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidBeta(beta));
        }
        if h.dim() < 2 {
            return Err(Error::DimensionTooSmall(h.dim()));
        }
        let spectrum = eigendecompose(h)?;
        Self::from_spectrum(spectrum, beta)
    }

    pub fn from_spectrum(spectrum: SpectralDecomposition, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidBeta(beta));
        }
        let w = spectrum.eigenvalues();
        let w0 = spectrum.min();
        let exponents: Vec<f64> = w.iter().map(|&x| -beta * (x - w0)).collect();
        if exponents.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Boltzmann exponent"));
        }
        // The ground state has exponent 0, so the sum is in [1, d].
        let log_sum = exponents.iter().map(|&e| e.exp()).sum::<f64>().ln();
        let log_populations: Vec<f64> = exponents.iter().map(|&e| e - log_sum).collect();
        let populations = log_populations.iter().map(|&l| l.exp()).collect();
        let partition_log = -beta * w0 + log_sum;
        if !partition_log.is_finite() {
            return Err(Error::NonFinite("log partition function"));
        }
        let tol = DEFAULT_RELATIVE_DEGENERACY_TOL * (spectrum.max() - w0);
        let groups = degeneracy_groups(w, tol);
        Ok(Self {
            beta,
            spectrum,
            log_populations,
            populations,
            partition_log,
            degeneracy_tol: tol,
            groups,
        })
    }

    /// Overrides the absolute degeneracy tolerance used for branch selection.
    pub fn with_degeneracy_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("degeneracy tolerance {tol} must be nonnegative")));
        }
        self.degeneracy_tol = tol;
        self.groups = degeneracy_groups(self.spectrum.eigenvalues(), tol);
        Ok(self)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn energies(&self) -> &[f64] {
        self.spectrum.eigenvalues()
    }

    pub fn log_populations(&self) -> &[f64] {
        &self.log_populations
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    /// `ln Z` for the unshifted Hamiltonian.
    pub fn partition_log(&self) -> f64 {
        self.partition_log
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    /// Whether eigenpairs `j` and `k` fall in the same degeneracy group.
    pub fn is_degenerate(&self, j: usize, k: usize) -> bool {
        self.groups[j] == self.groups[k]
    }

    pub fn spectral_quantities(&self) -> SpectralQuantities {
        SpectralQuantities::from_sorted(self.energies(), self.degeneracy_tol)
    }

    pub fn seminorm(&self) -> f64 {
        self.spectrum.max() - self.spectrum.min()
    }

    pub fn density_matrix(&self) -> CMatrix {
        self.spectrum.from_diagonal(&self.populations)
    }

    pub fn sqrt_density_matrix(&self) -> CMatrix {
        let sq: Vec<f64> = self.log_populations.iter().map(|l| (0.5 * l).exp()).collect();
        self.spectrum.from_diagonal(&sq)
    }

    /// `sqrt(p_j) - sqrt(p_k)` without cancellation.
    pub(crate) fn sqrt_population_diff(&self, j: usize, k: usize) -> f64 {
        let (lj, lk) = (self.log_populations[j], self.log_populations[k]);
        if lj >= lk {
            -(0.5 * lj).exp() * ((0.5 * (lk - lj)).exp_m1())
        } else {
            (0.5 * lk).exp() * ((0.5 * (lj - lk)).exp_m1())
        }
    }

    /// `<j|A|k>` in the energy eigenbasis together with `<A>`.
    pub(crate) fn centered(&self, a: &HermitianOperator) -> Result<(CMatrix, f64)> {
        let mut m = self.spectrum.to_eigenbasis(a)?;
        let mean: f64 = (0..self.dim()).map(|j| self.populations[j] * m[(j, j)].re).sum();
        for j in 0..self.dim() {
            m[(j, j)] -= Complex64::new(mean, 0.0);
        }
        Ok((m, mean))
    }
}

/// Chains consecutive sorted eigenvalues closer than `tol` into groups.
fn degeneracy_groups(sorted: &[f64], tol: f64) -> Vec<usize> {
    let mut groups = Vec::with_capacity(sorted.len());
    let mut g = 0;
    for (i, &w) in sorted.iter().enumerate() {
        if i > 0 && w - sorted[i - 1] > tol {
            g += 1;
        }
        groups.push(g);
    }
    groups
}

/// `tr(rho A)`.
pub fn expectation(rho: &ThermalState, a: &HermitianOperator) -> Result<f64> {
    Ok(rho.centered(a)?.1)
}

/// `<A^2> - <A>^2`, evaluated as `sum_jk p_j |<j|dA|k>|^2` so it is never negative.
pub fn variance(rho: &ThermalState, a: &HermitianOperator) -> Result<f64> {
    let (da, _) = rho.centered(a)?;
    Ok(variance_from_centered(rho, &da))
}

pub(crate) fn variance_from_centered(rho: &ThermalState, da: &CMatrix) -> f64 {
    let d = rho.dim();
    (0..d)
        .map(|j| rho.populations[j] * (0..d).map(|k| da[(j, k)].norm_sqr()).sum::<f64>())
        .sum()
}

/// Wigner-Yanase skew information `(1/2) ||[sqrt(rho), A]||_2^2`.
pub fn skew_information(rho: &ThermalState, a: &HermitianOperator) -> Result<f64> {
    let (da, _) = rho.centered(a)?;
    Ok(skew_from_centered(rho, &da))
}

pub(crate) fn skew_from_centered(rho: &ThermalState, da: &CMatrix) -> f64 {
    // Diagonal terms vanish, so centering does not matter.
    let d = rho.dim();
    let mut acc = 0.0;
    for j in 0..d {
        for k in (j + 1)..d {
            let s = rho.sqrt_population_diff(j, k);
            acc += s * s * da[(j, k)].norm_sqr();
        }
    }
    acc
}

/// Classical part of the uncertainty, `tr(sqrt(rho) dA sqrt(rho) dA)`, which
/// equals `variance - skew_information`. Computed directly so low-temperature
/// values are not lost to cancellation.
pub fn classical_uncertainty(rho: &ThermalState, a: &HermitianOperator) -> Result<f64> {
    let (da, _) = rho.centered(a)?;
    Ok(classical_from_centered(rho, &da))
}

pub(crate) fn classical_from_centered(rho: &ThermalState, da: &CMatrix) -> f64 {
    let d = rho.dim();
    let lp = &rho.log_populations;
    let mut acc = 0.0;
    for j in 0..d {
        acc += rho.populations[j] * da[(j, j)].norm_sqr();
        for k in (j + 1)..d {
            acc += 2.0 * (0.5 * (lp[j] + lp[k])).exp() * da[(j, k)].norm_sqr();
        }
    }
    acc
}

/// Variance of the block-diagonal part of `A` (elements between degenerate
/// energy levels only).
pub fn diag_block_variance(rho: &ThermalState, a: &HermitianOperator) -> Result<f64> {
    let (da, _) = rho.centered(a)?;
    Ok(diag_block_from_centered(rho, &da))
}

pub(crate) fn diag_block_from_centered(rho: &ThermalState, da: &CMatrix) -> f64 {
    let d = rho.dim();
    let mut acc = 0.0;
    for j in 0..d {
        for k in 0..d {
            if rho.is_degenerate(j, k) {
                acc += rho.populations[j] * da[(j, k)].norm_sqr();
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli_matrix, Axis};
    use approx::assert_relative_eq;

    fn qubit(ox: f64, oz: f64, mu: f64) -> ParamHamiltonian {
        let fixed = pauli_matrix(Axis::X)
            .scale(ox)
            .try_add_scaled(&pauli_matrix(Axis::Z), oz)
            .unwrap();
        ParamHamiltonian::new(Some(fixed), vec![HamiltonianTerm::new("mu", mu, pauli_matrix(Axis::Z))]).unwrap()
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let h = qubit(0.3, 0.2, 0.9);
        let rho = thermal_state(&h, 0.0).unwrap();
        for &p in rho.populations() {
            assert_relative_eq!(p, 0.5, epsilon = 1e-15);
        }
        let z = pauli_matrix(Axis::Z);
        assert_relative_eq!(variance(&rho, &z).unwrap(), 1.0, epsilon = 1e-14);
        assert!(skew_information(&rho, &z).unwrap().abs() < 1e-15);
        let a = HermitianOperator::from_real_diagonal(&[1.0, 4.0]).unwrap();
        assert_relative_eq!(expectation(&rho, &a).unwrap(), 2.5, epsilon = 1e-14);
    }

    #[test]
    fn two_level_boltzmann() {
        let (mu, beta) = (0.8, 1.7);
        let h = ParamHamiltonian::new(None, vec![HamiltonianTerm::new("mu", mu, pauli_matrix(Axis::Z))]).unwrap();
        let rho = thermal_state(&h, beta).unwrap();
        let want = (beta * mu).exp() / ((beta * mu).exp() + (-beta * mu).exp());
        assert_relative_eq!(rho.populations()[0], want, epsilon = 1e-14);
        assert_relative_eq!(
            rho.partition_log(),
            (2.0 * (beta * mu).cosh()).ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn qubit_density_matrix_closed_form() {
        let (ox, oz, mu, beta) = (0.6, -0.2, 0.5, 1.3);
        let rho = thermal_state(&qubit(ox, oz, mu), beta).unwrap();
        let v = (ox * ox + (oz + mu).powi(2)).sqrt();
        let z = 2.0 * (beta * v).cosh();
        let x = pauli_matrix(Axis::X);
        let sz = pauli_matrix(Axis::Z);
        let vs = x.scale(ox).try_add_scaled(&sz, oz + mu).unwrap();
        let want = (CMatrix::identity(2, 2) * Complex64::new((beta * v).cosh(), 0.0)
            - vs.matrix() * Complex64::new((beta * v).sinh() / v, 0.0))
            / Complex64::new(z, 0.0);
        assert!((rho.density_matrix() - want).norm() < 1e-14);
    }

    #[test]
    fn qubit_moments() {
        let (ox, oz, mu, beta) = (0.9, 0.1, -0.4, 2.2);
        let rho = thermal_state(&qubit(ox, oz, mu), beta).unwrap();
        let v = (ox * ox + (oz + mu).powi(2)).sqrt();
        let t = (beta * v).tanh();
        let z = pauli_matrix(Axis::Z);
        assert_relative_eq!(expectation(&rho, &z).unwrap(), -t * (oz + mu) / v, epsilon = 1e-13);
        assert_relative_eq!(
            variance(&rho, &z).unwrap(),
            1.0 - t * t * (oz + mu).powi(2) / (v * v),
            epsilon = 1e-13
        );
        assert_relative_eq!(
            skew_information(&rho, &z).unwrap(),
            (1.0 - 1.0 / (beta * v).cosh()) * ox * ox / (v * v),
            epsilon = 1e-13
        );
        let identity = HermitianOperator::identity(2);
        assert_relative_eq!(expectation(&rho, &identity).unwrap(), 1.0, epsilon = 1e-14);
        assert!(variance(&rho, &identity.scale(3.0)).unwrap() < 1e-28);
    }

    #[test]
    fn commuting_observable_has_no_skew() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.5]).unwrap();
        let rho = ThermalState::from_operator(&h, 0.7).unwrap();
        let a = HermitianOperator::from_real_diagonal(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(skew_information(&rho, &a).unwrap(), 0.0);
    }

    #[test]
    fn spectral_quantities_examples() {
        let sq = spectral_quantities(&HermitianOperator::from_real_diagonal(&[0.0, 1.0, 3.0]).unwrap(), None).unwrap();
        assert_eq!((sq.seminorm, sq.min_gap), (3.0, 1.0));
        let sq = spectral_quantities(&HermitianOperator::from_real_diagonal(&[0.0, 0.0, 5.0]).unwrap(), None).unwrap();
        assert_eq!((sq.seminorm, sq.min_gap), (5.0, 5.0));
        let sq = spectral_quantities(&HermitianOperator::identity(3), None).unwrap();
        assert!(sq.fully_degenerate);
        assert_eq!(sq.min_gap, 0.0);
        let (ox, oz) = (0.3, 0.4);
        let h = pauli_matrix(Axis::X).scale(ox).try_add_scaled(&pauli_matrix(Axis::Z), oz).unwrap();
        let sq = spectral_quantities(&h, None).unwrap();
        assert_relative_eq!(sq.seminorm, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn huge_beta_does_not_overflow() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let rho = ThermalState::from_operator(&h, 700.0).unwrap();
        assert_relative_eq!(rho.populations()[0], 1.0, epsilon = 1e-15);
        assert!(rho.log_populations()[2].is_finite());
        assert_relative_eq!(rho.log_populations()[2], -1400.0, epsilon = 1e-12);
        assert!(ThermalState::from_operator(&h, 1e5).is_ok());
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]).unwrap();
        assert!(matches!(ThermalState::from_operator(&h, -1.0), Err(Error::InvalidBeta(_))));
        assert!(matches!(ThermalState::from_operator(&h, f64::NAN), Err(Error::InvalidBeta(_))));
        let one = HermitianOperator::from_real_diagonal(&[1.0]).unwrap();
        assert!(matches!(ThermalState::from_operator(&one, 1.0), Err(Error::DimensionTooSmall(1))));
        let rho = ThermalState::from_operator(&h, 1.0).unwrap();
        assert!(matches!(
            variance(&rho, &HermitianOperator::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let z = pauli_matrix(Axis::Z);
        let r = ParamHamiltonian::new(
            None,
            vec![HamiltonianTerm::new("a", 1.0, z.clone()), HamiltonianTerm::new("a", 2.0, z)],
        );
        assert!(matches!(r, Err(Error::DuplicateLabel(_))));
    }
}
