use approx::assert_relative_eq;
use thermal_qfi::models::QubitModel;
use thermal_qfi::qfi::{
    classical_fisher_projective, energy_basis, lyapunov_residual, qfi_of_hamiltonian, sld, sld_basis,
    state_derivative_fd,
};
use thermal_qfi::random::{random_param_hamiltonian, seeded_rng};
use thermal_qfi::{thermal_state, HamiltonianTerm, HermitianOperator, ParamHamiltonian};

#[test]
fn energy_basis_cfi_is_exact_for_commuting_family() {
    let h0 = HermitianOperator::from_real_diagonal(&[0.0, 0.3, 1.2, 2.0]).unwrap();
    let a = HermitianOperator::from_real_diagonal(&[1.0, 0.0, -1.0, 2.0]).unwrap();
    let h = ParamHamiltonian::new(Some(h0), vec![HamiltonianTerm::new("a", 0.4, a)]).unwrap();
    let beta = 1.1;
    let f = qfi_of_hamiltonian(&h, beta).unwrap().get(0, 0);
    let cfi = classical_fisher_projective(&h, beta, 0, &energy_basis(&h).unwrap(), None, true).unwrap();
    assert_relative_eq!(cfi.value, f, max_relative = 1e-6);
}

#[test]
fn energy_basis_loses_information_at_low_temperature() {
    let m = QubitModel::new(1.0, 0.0, 0.2).unwrap();
    let beta = 5.0 / m.v();
    let h = m.hamiltonian();
    let f = m.qfi(beta).value;
    let cfi = classical_fisher_projective(&h, beta, 0, &energy_basis(&h).unwrap(), None, true).unwrap();
    assert!(cfi.value < f * (1.0 - 1e-3), "cfi {} qfi {}", cfi.value, f);
}

#[test]
fn sld_eigenbasis_saturates_for_qubits() {
    let mut rng = seeded_rng(23);
    use rand::Rng;
    for _ in 0..20 {
        let m = QubitModel::new(rng.random_range(0.1..2.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)).unwrap();
        let beta = rng.random_range(0.1..8.0) / m.v();
        let h = m.hamiltonian();
        let rho = thermal_state(&h, beta).unwrap();
        let l = sld(&rho, &h.terms()[0].generator).unwrap();
        let cfi = classical_fisher_projective(&h, beta, 0, &sld_basis(&l).unwrap(), None, true).unwrap();
        assert_relative_eq!(cfi.value, m.qfi(beta).value, max_relative = 1e-4);
    }
}

#[test]
fn lyapunov_residual_against_finite_difference() {
    let mut rng = seeded_rng(41);
    for _ in 0..5 {
        let h = random_param_hamiltonian(&mut rng, 6, 2);
        let beta = 0.8;
        let rho = thermal_state(&h, beta).unwrap();
        for (l, g) in h.generators().iter().enumerate() {
            let op = sld(&rho, g).unwrap();
            let fd = state_derivative_fd(&h, beta, l, None, true).unwrap();
            let r = lyapunov_residual(&rho, &op, &fd);
            assert!(r < 1e-8, "residual {r}");
        }
    }
}
