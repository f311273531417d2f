//! HF and KS fixed-point iteration with aufbau occupation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::edf::{hf_from_hamiltonian, ks_fields, KSFunctional};
use crate::error::{Error, Result};
use crate::fock::TwoBodyHamiltonian;
use crate::matrix::{c64, commutator_norm, density_from_orbitals, eig_hermitian, frobenius, projector_defect, random, CMat};
use crate::scf::config::{InitialGuess, SolverConfig, SolverReport, Warning};

const DEGENERACY_TOL: f64 = 1e-9;

fn aufbau(f: &KSFunctional, rho: &CMat, n: usize) -> Result<(CMat, Vec<f64>, CMat)> {
    let fields = ks_fields(f, rho)?;
    let eig = eig_hermitian(&fields.h)?;
    let occ: Vec<usize> = (0..n).collect();
    let new = density_from_orbitals(&eig.vectors, &occ)?.into_inner();
    Ok((new, eig.values, eig.vectors))
}

pub(crate) fn initial_density(f: &KSFunctional, n: usize, guess: &InitialGuess) -> Result<CMat> {
    let m = f.orbitals();
    match guess {
        InitialGuess::Core => Ok(aufbau(f, &CMat::zeros(m, m), n)?.0),
        InitialGuess::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(random::slater_density(&mut rng, m, n))
        }
        InitialGuess::Provided { rho, .. } => {
            if rho.nrows() != m || rho.ncols() != m {
                return Err(Error::Dimension(format!("initial density must be {m}x{m}")));
            }
            Ok(rho.clone())
        }
    }
}

/// Self-consistent KS iteration: `h = h^KS[ϱ]`, occupy the lowest `n`
/// eigenvectors, mix linearly until the density change drops below tolerance.
pub fn solve_ks(f: &KSFunctional, n: usize, cfg: &SolverConfig) -> Result<SolverReport> {
    cfg.validate()?;
    let m = f.orbitals();
    if n > m {
        return Err(Error::InvalidOccupation(format!("N = {n} exceeds M = {m}")));
    }
    let mut rho = initial_density(f, n, &cfg.initial)?;
    let mut warnings = Vec::new();
    let mut history = Vec::new();
    let mut converged = false;
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    let mut final_rho = rho.clone();

    for it in 1..=cfg.max_iter {
        iterations = it;
        let (new, _, _) = aufbau(f, &rho, n)?;
        change = frobenius(&(&new - &rho));
        let e = f.energy(&new, &CMat::zeros(m, m));
        if let Some(&prev) = history.last() {
            let de: f64 = e - prev;
            if !e.is_finite() || de.abs() > cfg.divergence_limit {
                warnings.push(Warning::Diverged { iteration: it, energy_change: de });
                final_rho = new;
                break;
            }
        }
        history.push(e);
        final_rho = new.clone();
        if change <= cfg.density_tol {
            converged = true;
            break;
        }
        rho = &rho * c64(1.0 - cfg.mixing, 0.0) + new * c64(cfg.mixing, 0.0);
        rho = (&rho + rho.adjoint()) * c64(0.5, 0.0);
    }
    if !converged && !warnings.iter().any(|w| matches!(w, Warning::Diverged { .. })) {
        warnings.push(Warning::NotConverged { iterations, density_change: change });
    }

    let fields = ks_fields(f, &final_rho)?;
    let eig = eig_hermitian(&fields.h)?;
    if n > 0 && n < m {
        let gap = eig.values[n] - eig.values[n - 1];
        if gap.abs() < DEGENERACY_TOL {
            warnings.push(Warning::DegenerateFermiLevel { gap });
        }
    }
    Ok(SolverReport {
        converged,
        energy: fields.energy,
        idempotency_defect: projector_defect(&final_rho),
        trace_error: (final_rho.trace().re - n as f64).abs(),
        commutator: commutator_norm(fields.h.as_matrix(), &final_rho),
        rho: final_rho,
        kappa: None,
        r: None,
        mu: None,
        spectrum: eig.values,
        qp_spectrum: None,
        orbitals: eig.vectors,
        iterations,
        density_change: change,
        spectral_asymmetry: None,
        q: fields.q,
        lambda: fields.lambda,
        condensate: None,
        kappa_auxiliary: false,
        warnings,
        energy_history: history,
    })
}

/// Hartree–Fock for `N` particles.
pub fn solve_hf(h: &TwoBodyHamiltonian, n: usize, cfg: &SolverConfig) -> Result<SolverReport> {
    solve_ks(&hf_from_hamiltonian(h), n, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{HermitianMatrix, SPBasis};

    #[test]
    fn non_interacting_converges_in_one_iteration() {
        let t = HermitianMatrix::from_real_diagonal(&[0.5, -1.0, 2.0, 0.1]);
        let h = TwoBodyHamiltonian::one_body(SPBasis::indexed(4).unwrap(), t).unwrap();
        let rep = solve_hf(&h, 2, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert!((rep.energy - (-1.0 + 0.1)).abs() < 1e-15);
    }

    #[test]
    fn hubbard_dimer_restricted_solution() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 4.0).unwrap();
        let rep = solve_hf(&h, 2, &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert!(rep.energy.abs() < 1e-10);
        assert!(rep.idempotency_defect < 1e-12);
    }

    #[test]
    fn too_many_particles() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 4.0).unwrap();
        assert!(matches!(solve_hf(&h, 5, &SolverConfig::default()), Err(Error::InvalidOccupation(_))));
    }

    #[test]
    fn bad_mixing_rejected() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 4.0).unwrap();
        let cfg = SolverConfig { mixing: 1.5, ..Default::default() };
        assert!(matches!(solve_hf(&h, 2, &cfg), Err(Error::Config(_))));
    }
}
