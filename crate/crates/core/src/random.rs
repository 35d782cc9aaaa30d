//! Seeded random instances for tests, self-checks and benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::gibbs::{HamiltonianTerm, ParamHamiltonian};
use crate::operator::{CMatrix, HermitianOperator};

/// Deterministic generator for a seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// GUE-like Hermitian matrix with unit-order spectrum times `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> HermitianOperator {
    let g = complex_gaussian(rng, dim);
    let norm = Complex64::new(scale / (2.0 * (2.0 * dim as f64).sqrt()), 0.0);
    HermitianOperator::from_matrix_unchecked((&g + g.adjoint()) * norm)
}

/// Haar-distributed unitary from the phase-corrected QR of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let (mut q, r) = complex_gaussian(rng, dim).qr().unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for x in q.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    q
}

/// Random `H0 + sum_l mu_l A_l` with `n_terms` labeled `a0, a1, ...`.
pub fn random_param_hamiltonian<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_terms: usize) -> ParamHamiltonian {
    let fixed = random_hermitian(rng, dim, 1.0);
    let terms = (0..n_terms)
        .map(|l| {
            let mu = rng.random_range(-1.5..1.5);
            HamiltonianTerm::new(format!("a{l}"), mu, random_hermitian(rng, dim, 1.0))
        })
        .collect();
    ParamHamiltonian::new(Some(fixed), terms).expect("consistent random instance")
}

/// Generators and fixed term all diagonal in a shared random basis.
pub fn random_commuting_hamiltonian<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_terms: usize) -> ParamHamiltonian {
    let u = random_unitary(rng, dim);
    let diag_op = |rng: &mut R| {
        let d: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        HermitianOperator::from_real_diagonal(&d)
            .expect("finite")
            .conjugate_by(&u)
            .expect("square unitary")
    };
    let fixed = diag_op(rng);
    let terms = (0..n_terms)
        .map(|l| {
            let mu = rng.random_range(-1.5..1.5);
            HamiltonianTerm::new(format!("a{l}"), mu, diag_op(rng))
        })
        .collect();
    ParamHamiltonian::new(Some(fixed), terms).expect("consistent random instance")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded_rng(3);
        let u = random_unitary(&mut rng, 6);
        assert!((u.adjoint() * &u - CMatrix::identity(6, 6)).norm() < 1e-12);
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_hermitian(&mut seeded_rng(11), 4, 1.0);
        let b = random_hermitian(&mut seeded_rng(11), 4, 1.0);
        assert_eq!(a, b);
    }
}
