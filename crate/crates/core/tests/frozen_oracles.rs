//! Reference values computed independently with numpy/scipy: dense `expm`
//! Gibbs states, five-point finite-difference state derivatives, the
//! Lyapunov-form QFI `2 |<j|drho|k>|^2 / (p_j + p_k)`, `sqrtm` for the skew
//! information, and adaptive quadrature for the Miller integral.

use approx::assert_relative_eq;
use thermal_qfi::bounds::miller_bound;
use thermal_qfi::gibbs::{expectation, skew_information, variance};
use thermal_qfi::models::{ghz_exact, spin_chain, two_qubit_charge_example, GhzModel};
use thermal_qfi::operator::{build_pauli_operator, PauliString};
use thermal_qfi::qfi::qfi_of_hamiltonian;
use thermal_qfi::{thermal_state, HamiltonianTerm, ParamHamiltonian};

const TOL: f64 = 1e-8;

fn assert_matrix(got: &thermal_qfi::QfiMatrix, want: [[f64; 2]; 2]) {
    for l in 0..2 {
        for m in 0..2 {
            assert_relative_eq!(got.get(l, m), want[l][m], max_relative = TOL);
        }
    }
}

#[test]
fn spin_chain_three_sites() {
    let h = spin_chain(3, 0.7, 1.3).unwrap();
    let f = qfi_of_hamiltonian(&h, 0.9).unwrap();
    assert_matrix(
        &f,
        [[0.9907088664410596, -0.24312337814388904], [-0.24312337814388904, 0.4688113069203964]],
    );
    let rho = thermal_state(&h, 0.9).unwrap();
    let a = &h.terms()[0].generator;
    assert_relative_eq!(expectation(&rho, a).unwrap(), -1.172126939963885, max_relative = 1e-12);
    assert_relative_eq!(variance(&rho, a).unwrap(), 2.7072087745521998, max_relative = 1e-12);
    assert_relative_eq!(skew_information(&rho, a).unwrap(), 1.379784279788578, max_relative = 1e-10);
    assert_relative_eq!(miller_bound(&rho, a).unwrap(), 1.4037576570617911, max_relative = 1e-10);
}

#[test]
fn two_qubit_charges() {
    let model = two_qubit_charge_example(0.5, 0.7).unwrap();
    let f = qfi_of_hamiltonian(&model.hamiltonian, 1.0).unwrap();
    assert_matrix(
        &f,
        [[0.6079385985496631, -0.06634297218364903], [-0.06634297218364903, 0.5624462747658787]],
    );
    let rho = thermal_state(&model.hamiltonian, 1.0).unwrap();
    let q2 = &model.hamiltonian.terms()[1].generator;
    assert_relative_eq!(expectation(&rho, q2).unwrap(), -0.5666656452910295, max_relative = 1e-12);
    assert_relative_eq!(variance(&rho, q2).unwrap(), 0.6788900464469012, max_relative = 1e-12);
    assert_relative_eq!(skew_information(&rho, q2).unwrap(), 0.09537982469768626, max_relative = 1e-10);
    assert_relative_eq!(miller_bound(&rho, q2).unwrap(), 0.6145394891549266, max_relative = 1e-10);
}

#[test]
fn mixed_pauli_terms_with_y() {
    let p = |s: &str| build_pauli_operator(&[(1.0, PauliString::parse(s, 2).unwrap())], 2).unwrap();
    let fixed = p("X0").scale(0.3).try_add_scaled(&p("Y1"), 0.2).unwrap();
    let h = ParamHamiltonian::new(
        Some(fixed),
        vec![
            HamiltonianTerm::new("a", 0.4, p("Y0 Z1")),
            HamiltonianTerm::new("b", -0.6, p("Z0 X1")),
        ],
    )
    .unwrap();
    let f = qfi_of_hamiltonian(&h, 1.7).unwrap();
    assert_matrix(&f, [[1.5984927064396894, 0.01439273809688177], [0.01439273809688177, 1.015155771252842]]);
}

#[test]
fn ghz_three_qubits() {
    let e = ghz_exact(&GhzModel::new(3, 0.7, 1.3, 0.9).unwrap());
    assert_relative_eq!(e.log_z, 3.1858206404504354, max_relative = 1e-12);
    assert_relative_eq!(e.mean_hmu, 1.6832338357717487, max_relative = 1e-12);
    assert_relative_eq!(e.var_hmu, 1.6356277716406655, max_relative = 1e-12);
    assert_relative_eq!(e.skew_hmu, 1.4050660507203876, max_relative = 1e-10);
    assert_relative_eq!(e.qfi_mu, 0.44145507027075137, max_relative = TOL);
}
