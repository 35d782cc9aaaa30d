//! Named models: a driven qubit with closed forms, the GHZ-type Hamiltonian
//! with an exact block solver, the open transverse spin chain, and
//! generalized Gibbs models with conserved charges.

use nalgebra::DVector;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::gibbs::{HamiltonianTerm, ParamHamiltonian};
use crate::operator::{build_pauli_operator, commutator_frobenius_sq, Axis, HermitianOperator, PauliString};
use crate::par;

/// A closed-form value that may sit on the fully degenerate point `v = 0`,
/// where the limit along `Omega_x = 0` is returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub value: f64,
    pub degenerate: bool,
}

/// `H = Omega_x X + (Omega_z + mu) Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitModel {
    pub omega_x: f64,
    pub omega_z: f64,
    pub mu: f64,
}

impl QubitModel {
    pub fn new(omega_x: f64, omega_z: f64, mu: f64) -> Result<Self> {
        if !(omega_x.is_finite() && omega_z.is_finite() && mu.is_finite()) {
            return Err(Error::NonFinite("qubit model coefficient"));
        }
        Ok(Self { omega_x, omega_z, mu })
    }

    /// Length of the field vector.
    pub fn v(&self) -> f64 {
        self.omega_x.hypot(self.omega_z + self.mu)
    }

    pub fn seminorm(&self) -> f64 {
        2.0 * self.v()
    }

    pub fn hamiltonian(&self) -> ParamHamiltonian {
        let x = pauli_1q(Axis::X);
        let z = pauli_1q(Axis::Z);
        let fixed = x.scale(self.omega_x).try_add_scaled(&z, self.omega_z).expect("2x2");
        ParamHamiltonian::new(Some(fixed), vec![HamiltonianTerm::new("mu", self.mu, z)]).expect("valid qubit")
    }

    /// QFI for `mu`.
    pub fn qfi(&self, beta: f64) -> ClosedForm {
        let v = self.v();
        if v == 0.0 {
            return ClosedForm {
                value: beta * beta,
                degenerate: true,
            };
        }
        let x = beta * v;
        let t = x.tanh();
        let sech = 1.0 / x.cosh();
        let bz = self.omega_z + self.mu;
        ClosedForm {
            value: t * t * self.omega_x.powi(2) / v.powi(4) + beta * beta * bz * bz / (v * v) * sech * sech,
            degenerate: false,
        }
    }

    /// Skew information of `Z`.
    pub fn skew(&self, beta: f64) -> ClosedForm {
        let v = self.v();
        if v == 0.0 {
            return ClosedForm {
                value: 0.0,
                degenerate: true,
            };
        }
        let x = beta * v;
        // 1 - sech x = 2 sinh^2(x/2) / cosh x
        let one_minus_sech = 2.0 * (0.5 * x).sinh().powi(2) / x.cosh();
        let one_minus_sech = if one_minus_sech.is_finite() { one_minus_sech } else { 1.0 };
        ClosedForm {
            value: one_minus_sech * self.omega_x.powi(2) / (v * v),
            degenerate: false,
        }
    }

    /// `<Z>` in the Gibbs state.
    pub fn mean_z(&self, beta: f64) -> f64 {
        let v = self.v();
        if v == 0.0 {
            return 0.0;
        }
        -(beta * v).tanh() * (self.omega_z + self.mu) / v
    }

    /// Variance of `Z`.
    pub fn variance(&self, beta: f64) -> f64 {
        1.0 - self.mean_z(beta).powi(2)
    }
}

pub fn qubit_qfi_closed_form(m: &QubitModel, beta: f64) -> ClosedForm {
    m.qfi(beta)
}

pub fn qubit_skew_closed_form(m: &QubitModel, beta: f64) -> ClosedForm {
    m.skew(beta)
}

fn pauli_1q(axis: Axis) -> HermitianOperator {
    crate::operator::pauli_matrix(axis)
}

/// Largest qubit count accepted by the block solver.
pub const GHZ_MAX_QUBITS: usize = 64;

/// `H = mu sum_j (Z_j + 1) - lambda n X^{(x)n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzModel {
    pub n: usize,
    pub mu: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl GhzModel {
    pub fn new(n: usize, mu: f64, lambda: f64, beta: f64) -> Result<Self> {
        if !(2..=GHZ_MAX_QUBITS).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "GHZ model needs 2 <= n <= {GHZ_MAX_QUBITS}, got {n}"
            )));
        }
        for (name, x) in [("mu", mu), ("lambda", lambda), ("beta", beta)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidArgument(format!("GHZ model needs {name} > 0, got {x}")));
            }
        }
        Ok(Self { n, mu, lambda, beta })
    }

    /// Number of two-dimensional blocks.
    pub fn block_count(&self) -> f64 {
        2f64.powi(self.n as i32 - 1)
    }
}

/// Exact thermal quantities of the GHZ model, for the `mu` term `H_mu = mu A_mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzExact {
    /// `ln Z` of the unshifted Hamiltonian.
    pub log_z: f64,
    pub mean_hmu: f64,
    pub var_hmu: f64,
    /// QFI with respect to `mu`.
    pub qfi_mu: f64,
    pub skew_hmu: f64,
    /// `var_hmu - skew_hmu`, computed directly.
    pub classical_hmu: f64,
    pub seminorm: f64,
}

/// One Hamming-weight class: `k` ones (and its complement), sharing one 2x2 block shape.
struct BlockClass {
    log_mult: f64,
    z: f64,
    energy: f64,
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Exact solution by Hamming-weight classes. Each computational state `s`
/// pairs with its complement; within that block `A_mu = n + z Z` with
/// `z = 2k - n`, and cross-block elements of `A_mu` vanish.
pub fn ghz_exact(m: &GhzModel) -> GhzExact {
    let n = m.n;
    let nf = n as f64;
    let classes: Vec<BlockClass> = par::map_range(n / 2 + 1, |k| {
        let mut log_mult = ln_gamma(nf + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
        if 2 * k == n {
            log_mult -= std::f64::consts::LN_2;
        }
        let z = 2.0 * k as f64 - nf;
        BlockClass {
            log_mult,
            z,
            energy: (m.mu * z).hypot(m.lambda * nf),
        }
    });
    let beta = m.beta;
    let log_weights: Vec<f64> = classes
        .iter()
        .flat_map(|c| [c.log_mult - beta * c.energy, c.log_mult + beta * c.energy])
        .collect();
    let log_z_shifted = log_sum_exp(&log_weights);

    // Class weights summed over all blocks of the class: (upper, lower) level.
    let weights: Vec<(f64, f64)> = classes
        .iter()
        .map(|c| {
            (
                (c.log_mult - beta * c.energy - log_z_shifted).exp(),
                (c.log_mult + beta * c.energy - log_z_shifted).exp(),
            )
        })
        .collect();
    // u = <+|Z|+> for the upper level of mu z Z - lambda n X.
    let u: Vec<f64> = classes.iter().map(|c| m.mu * c.z / c.energy).collect();
    let offdiag_sq: Vec<f64> = classes
        .iter()
        .map(|c| {
            let s = m.lambda * nf / c.energy;
            c.z * c.z * s * s
        })
        .collect();

    let mean_a: f64 = classes
        .iter()
        .zip(&weights)
        .zip(&u)
        .map(|((c, &(wp, wm)), &uc)| wp * (nf + c.z * uc) + wm * (nf - c.z * uc))
        .sum();

    let mut diag_sq = 0.0;
    let mut var_a = 0.0;
    let mut qfi = 0.0;
    let mut skew = 0.0;
    let mut classical = 0.0;
    for (i, c) in classes.iter().enumerate() {
        let (wp, wm) = weights[i];
        let dp = nf + c.z * u[i] - mean_a;
        let dm = nf - c.z * u[i] - mean_a;
        let diag = wp * dp * dp + wm * dm * dm;
        let off = offdiag_sq[i];
        diag_sq += diag;
        var_a += (wp + wm) * off;
        let t = (beta * c.energy).tanh();
        qfi += (wp + wm) * t * t / (c.energy * c.energy) * off;
        // sqrt(w_lower) - sqrt(w_upper) = -sqrt(w_lower) expm1(-beta E)
        skew += wm * (-beta * c.energy).exp_m1().powi(2) * off;
        classical += 2.0 * wm * (-beta * c.energy).exp() * off;
    }
    var_a += diag_sq;
    qfi += beta * beta * diag_sq;
    classical += diag_sq;

    let mu2 = m.mu * m.mu;
    GhzExact {
        log_z: log_z_shifted - beta * m.mu * nf,
        mean_hmu: m.mu * mean_a,
        var_hmu: mu2 * var_a,
        qfi_mu: qfi,
        skew_hmu: mu2 * skew,
        classical_hmu: mu2 * classical,
        seminorm: 2.0 * nf * m.mu.hypot(m.lambda),
    }
}

/// Dense form: fixed term `-lambda n X^{(x)n}` and the `mu` term with
/// generator `sum_j (Z_j + 1)`.
pub fn ghz_hamiltonian(n: usize, mu: f64, lambda: f64) -> Result<ParamHamiltonian> {
    let all_x = PauliString::new(n, (0..n).map(|j| (j, Axis::X)).collect())?;
    let fixed = build_pauli_operator(&[(-lambda * n as f64, all_x)], n)?;
    let mut terms = vec![(n as f64, PauliString::identity(n)?)];
    for j in 0..n {
        terms.push((1.0, PauliString::single(n, j, Axis::Z)?));
    }
    let a_mu = build_pauli_operator(&terms, n)?;
    ParamHamiltonian::new(Some(fixed), vec![HamiltonianTerm::new("mu", mu, a_mu)])
}

/// `(|0...0> + |1...1>) / sqrt 2`.
pub fn ghz_state(n: usize) -> DVector<Complex64> {
    let d = 1usize << n;
    let mut v = DVector::zeros(d);
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[0] = amp;
    v[d - 1] = amp;
    v
}

/// Open chain `mu sum_j Z_j + lambda sum_j X_j X_{j+1}` with terms `mu` and `lambda`.
pub fn spin_chain(n: usize, mu: f64, lambda: f64) -> Result<ParamHamiltonian> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let field: Vec<(f64, PauliString)> = (0..n)
        .map(|j| PauliString::single(n, j, Axis::Z).map(|p| (1.0, p)))
        .collect::<Result<_>>()?;
    let coupling: Vec<(f64, PauliString)> = (0..n - 1)
        .map(|j| PauliString::new(n, vec![(j, Axis::X), (j + 1, Axis::X)]).map(|p| (1.0, p)))
        .collect::<Result<_>>()?;
    ParamHamiltonian::new(
        None,
        vec![
            HamiltonianTerm::new("mu", mu, build_pauli_operator(&field, n)?),
            HamiltonianTerm::new("lambda", lambda, build_pauli_operator(&coupling, n)?),
        ],
    )
}

/// Relative tolerance for commutation checks.
pub const COMMUTATION_TOL: f64 = 1e-10;

/// A generalized Gibbs model whose charges all commute with `H0`.
#[derive(Debug, Clone)]
pub struct ChargeModel {
    pub hamiltonian: ParamHamiltonian,
    /// Label pairs of charges that do not commute with each other.
    pub noncommuting_pairs: Vec<(String, String)>,
}

impl ChargeModel {
    pub fn has_noncommuting_charges(&self) -> bool {
        !self.noncommuting_pairs.is_empty()
    }
}

fn relative_commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    let scale = a.frobenius_norm() * b.frobenius_norm();
    let c = commutator_frobenius_sq(a, b)?.sqrt();
    Ok(if scale > 0.0 { c / scale } else { 0.0 })
}

/// Builds `H0 + sum_l mu_l Q_l`, rejecting any charge with `[H0, Q_l] != 0`.
pub fn charge_model(h0: HermitianOperator, charges: Vec<(String, f64, HermitianOperator)>) -> Result<ChargeModel> {
    for (label, _, q) in &charges {
        let r = relative_commutator(&h0, q)?;
        if r > COMMUTATION_TOL {
            return Err(Error::ChargeNotConserved {
                label: label.clone(),
                norm: r,
            });
        }
    }
    let mut noncommuting_pairs = Vec::new();
    for (i, (li, _, qi)) in charges.iter().enumerate() {
        for (lj, _, qj) in &charges[i + 1..] {
            if relative_commutator(qi, qj)? > COMMUTATION_TOL {
                noncommuting_pairs.push((li.clone(), lj.clone()));
            }
        }
    }
    let terms = charges
        .into_iter()
        .map(|(label, mu, q)| HamiltonianTerm::new(label, mu, q))
        .collect();
    Ok(ChargeModel {
        hamiltonian: ParamHamiltonian::new(Some(h0), terms)?,
        noncommuting_pairs,
    })
}

/// Two qubits with `H0 = Z Z` and charges `Q1 = Z 1`, `Q2 = X X`.
pub fn two_qubit_charge_example(mu1: f64, mu2: f64) -> Result<ChargeModel> {
    let op = |s: &str| -> Result<HermitianOperator> { build_pauli_operator(&[(1.0, PauliString::parse(s, 2)?)], 2) };
    charge_model(
        op("Z0 Z1")?,
        vec![("Q1".into(), mu1, op("Z0")?), ("Q2".into(), mu2, op("X0 X1")?)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn qubit_limits() {
        let beta = 0.7;
        let q = QubitModel::new(0.0, 0.4, 0.3).unwrap();
        let x: f64 = beta * 0.7;
        assert_relative_eq!(q.qfi(beta).value, beta * beta * (1.0 - x.tanh().powi(2)), max_relative = 1e-14);
        assert_eq!(q.skew(beta).value, 0.0);
        let d = QubitModel::new(0.0, 0.5, -0.5).unwrap();
        assert!(d.qfi(2.0).degenerate);
        assert_eq!(d.qfi(2.0).value, 4.0);
        let small = QubitModel::new(0.3, 0.1, 0.2).unwrap();
        let b = 1e-4;
        let v = small.v();
        assert_relative_eq!(small.skew(b).value, (b * v).powi(2) * 0.09 / (2.0 * v * v), max_relative = 1e-6);
    }

    #[test]
    fn spin_chain_two_sites() {
        let h = spin_chain(2, 1.0, 1.0).unwrap();
        let a_mu = h.terms()[0].generator.matrix().map(|z| z.re);
        let a_l = h.terms()[1].generator.matrix().map(|z| z.re);
        assert_eq!(a_mu, nalgebra::DMatrix::from_diagonal(&DVector::from_vec(vec![-2.0, 0.0, 0.0, 2.0])));
        let mut anti = nalgebra::DMatrix::zeros(4, 4);
        for i in 0..4 {
            anti[(i, 3 - i)] = 1.0;
        }
        assert_eq!(a_l, anti);
        assert_eq!(spin_chain(5, 1.0, 5.0).unwrap().dim(), 32);
    }

    #[test]
    fn ghz_block_count_and_weights() {
        let m = GhzModel::new(6, 0.5, 1.0, 0.8).unwrap();
        assert_eq!(m.block_count(), 32.0);
        let e = ghz_exact(&m);
        assert!(e.var_hmu > 0.0 && e.qfi_mu > 0.0);
        assert!(e.skew_hmu <= e.var_hmu);
        assert_relative_eq!(e.var_hmu - e.skew_hmu, e.classical_hmu, max_relative = 1e-12);
        assert!(GhzModel::new(1, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn ghz_large_n_is_finite() {
        let e = ghz_exact(&GhzModel::new(64, 3.0, 6.0, 1.0).unwrap());
        assert!(e.log_z.is_finite() && e.var_hmu.is_finite() && e.qfi_mu.is_finite());
    }

    #[test]
    fn charge_examples() {
        let m = two_qubit_charge_example(0.5, 0.7).unwrap();
        assert_eq!(m.noncommuting_pairs, vec![("Q1".to_string(), "Q2".to_string())]);
        let op = |s: &str| build_pauli_operator(&[(1.0, PauliString::parse(s, 2).unwrap())], 2).unwrap();
        let bad = charge_model(op("Z0 Z1"), vec![("Q".into(), 1.0, op("X0"))]);
        assert!(matches!(bad, Err(Error::ChargeNotConserved { .. })));
        let ok = charge_model(op("Z0 Z1"), vec![("Q1".into(), 0.5, op("Z0")), ("Q2".into(), 0.7, op("Z0 Z1"))]).unwrap();
        assert!(!ok.has_noncommuting_charges());
    }
}
