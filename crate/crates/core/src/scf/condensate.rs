//! Pair-condensate amplitude `z = (V U⁻¹)*` of a quasiparticle vacuum.

use crate::error::{Error, Result};
use crate::matrix::{antisymmetry_defect, c64, eigh, BogoliubovTransform, CMat};
use crate::scf::config::Condensate;

const BLOCKED_TOL: f64 = 1e-10;
const AMBIGUOUS_TOL: f64 = 1e-6;

/// Computes `z = κ (1 − ϱ*)⁺`, which equals `(V U⁻¹)*` when `U` is invertible.
/// Canonical orbitals with occupation one make `U` singular; they are removed
/// from the inverse and returned as blocked orbitals, so the vacuum is
/// `∏_c b†_c exp(Σ_{k<ℓ} z_{kℓ} a†_k a†_ℓ)|0⟩`.
pub fn condensate_amplitude(w: &BogoliubovTransform) -> Result<Condensate> {
    let (rho, kappa) = w.vacuum_densities();
    let m = rho.nrows();
    let eig = eigh(&rho)?;
    let mut pinv = CMat::zeros(m, m);
    let mut blocked = Vec::new();
    for (i, &n) in eig.values.iter().enumerate() {
        let phi = eig.vectors.column(i);
        if n > 1.0 - BLOCKED_TOL {
            blocked.push(phi.clone_owned());
        } else if n > 1.0 - AMBIGUOUS_TOL {
            return Err(Error::SingularU(format!(
                "canonical occupation {n} is neither blocked nor safely invertible"
            )));
        } else {
            let pc = phi.conjugate();
            pinv += &pc * pc.adjoint() * c64(1.0 / (1.0 - n), 0.0);
        }
    }
    let z = &kappa * pinv;
    let defect = antisymmetry_defect(&z);
    if defect > 1e-8 {
        return Err(Error::SingularU(format!("z is not antisymmetric (defect {defect:.3e})")));
    }
    let z = (&z - z.transpose()) * c64(0.5, 0.0);
    let blocked = if blocked.is_empty() { CMat::zeros(m, 0) } else { CMat::from_columns(&blocked) };
    Ok(Condensate { z, blocked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{condensate_state, one_body_density, pairing_tensor_of};
    use crate::matrix::frobenius;

    #[test]
    fn bare_vacuum_has_no_condensate() {
        let c = condensate_amplitude(&BogoliubovTransform::identity(3)).unwrap();
        assert_eq!(frobenius(&c.z), 0.0);
        assert_eq!(c.blocked.ncols(), 0);
    }

    #[test]
    fn single_bcs_pair() {
        let s = 0.5f64.sqrt();
        let u = CMat::identity(2, 2) * c64(s, 0.0);
        let mut v = CMat::zeros(2, 2);
        v[(0, 1)] = c64(s, 0.0);
        v[(1, 0)] = c64(-s, 0.0);
        let w = BogoliubovTransform::new(u, v).unwrap();
        let c = condensate_amplitude(&w).unwrap();
        assert!((c.z[(0, 1)] - c64(1.0, 0.0)).norm() < 1e-14);
        let psi = condensate_state(&c.z, &c.blocked).unwrap();
        let (rho, kappa) = w.vacuum_densities();
        assert!(frobenius(&(one_body_density(&psi).unwrap().as_matrix() - rho)) < 1e-12);
        assert!(frobenius(&(pairing_tensor_of(&psi).unwrap().as_matrix() - kappa)) < 1e-12);
    }

    #[test]
    fn fully_occupied_orbital_is_blocked() {
        // Orbital 0 occupied (U=0, V=1 on that mode), orbital 1 empty.
        let mut u = CMat::zeros(2, 2);
        u[(1, 1)] = c64(1.0, 0.0);
        let mut v = CMat::zeros(2, 2);
        v[(0, 0)] = c64(1.0, 0.0);
        let w = BogoliubovTransform::new(u, v).unwrap();
        let c = condensate_amplitude(&w).unwrap();
        assert_eq!(c.blocked.ncols(), 1);
        let psi = condensate_state(&c.z, &c.blocked).unwrap();
        let rho = one_body_density(&psi).unwrap();
        assert!((rho.as_matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
    }
}
