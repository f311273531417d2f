//! Hartree–Fock and Hartree–Fock–Bogoliubov energies of a two-body Hamiltonian.
//!
//! With `ϱ_{kℓ} = ⟨a†_ℓ a_k⟩` and `κ_{kℓ} = ⟨a_ℓ a_k⟩`:
//!
//! * `E^HF = tr(tϱ) + ½ Σ V̄_{kk'ℓℓ'} ϱ_{ℓk} ϱ_{ℓ'k'}`
//! * `h_{kℓ} = ∂E/∂ϱ_{ℓk} = t_{kℓ} + Σ_{k'ℓ'} V̄_{kk'ℓℓ'} ϱ_{ℓ'k'}`
//! * `E^HFB = E^HF + ¼ Σ V̄_{kk'ℓℓ'} κ*_{kk'} κ_{ℓℓ'}`
//! * `Δ_{kℓ} = ½ Σ_{ab} V̄_{kℓab} κ_{ab}`

use crate::fock::{Tensor4, TwoBodyHamiltonian};
use crate::matrix::{CMat, HermitianMatrix, C64};

/// `Γ_{kℓ} = Σ_{k'ℓ'} V̄_{kk'ℓℓ'} ϱ_{ℓ'k'}`.
pub fn mean_field(vbar: &Tensor4, rho: &CMat) -> CMat {
    let m = vbar.dim();
    let data = vbar.data();
    let mut g = CMat::zeros(m, m);
    for k in 0..m {
        for kp in 0..m {
            for l in 0..m {
                let base = ((k * m + kp) * m + l) * m;
                let mut acc = C64::default();
                for lp in 0..m {
                    acc += data[base + lp] * rho[(lp, kp)];
                }
                g[(k, l)] += acc;
            }
        }
    }
    g
}

/// `Δ_{kℓ} = ½ Σ_{ab} V̄_{kℓab} κ_{ab}`.
pub fn pairing_field(vbar: &Tensor4, kappa: &CMat) -> CMat {
    let m = vbar.dim();
    let data = vbar.data();
    let mut d = CMat::zeros(m, m);
    for k in 0..m {
        for l in 0..m {
            let base = (k * m + l) * m * m;
            let mut acc = C64::default();
            for a in 0..m {
                for b in 0..m {
                    acc += data[base + a * m + b] * kappa[(a, b)];
                }
            }
            d[(k, l)] = acc * 0.5;
        }
    }
    d
}

fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::default();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn hf_energy_and_field(h: &TwoBodyHamiltonian, rho: &CMat) -> (f64, HermitianMatrix) {
    let t = h.t().as_matrix();
    let gamma = mean_field(h.vbar(), rho);
    let e = trace_product(t, rho).re + 0.5 * trace_product(&gamma, rho).re;
    let field = HermitianMatrix::from_upper(t + gamma).expect("finite mean field");
    (e, field)
}

pub fn hfb_energy_and_fields(h: &TwoBodyHamiltonian, rho: &CMat, kappa: &CMat) -> (f64, HermitianMatrix, CMat) {
    let (e_hf, field) = hf_energy_and_field(h, rho);
    let delta = pairing_field(h.vbar(), kappa);
    let mut e_pair = C64::default();
    for k in 0..kappa.nrows() {
        for l in 0..kappa.ncols() {
            e_pair += kappa[(k, l)].conj() * delta[(k, l)];
        }
    }
    (e_hf + 0.5 * e_pair.re, field, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{antisymmetry_defect, c64, SPBasis};

    #[test]
    fn non_interacting_reduces_to_t() {
        let t = HermitianMatrix::new(CMat::from_row_slice(2, 2, &[
            c64(0.3, 0.0),
            c64(0.1, 0.2),
            c64(0.1, -0.2),
            c64(-0.5, 0.0),
        ]))
        .unwrap();
        let h = TwoBodyHamiltonian::one_body(SPBasis::indexed(2).unwrap(), t.clone()).unwrap();
        let rho = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]).into_inner();
        let (e, f) = hf_energy_and_field(&h, &rho);
        assert_eq!(e, 0.3);
        assert_eq!(f, t);
    }

    #[test]
    fn hubbard_dimer_restricted_hf() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 4.0).unwrap();
        // Bonding orbital doubly occupied: ϱ = ½[[1,1],[1,1]] per spin.
        let mut rho = CMat::zeros(4, 4);
        for s in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    rho[(2 * i + s, 2 * j + s)] = c64(0.5, 0.0);
                }
            }
        }
        let (e, _) = hf_energy_and_field(&h, &rho);
        assert!(e.abs() < 1e-14);
    }

    #[test]
    fn pairing_model_gap_structure() {
        let g = 0.5;
        let h = TwoBodyHamiltonian::pairing(3, 1.0, g).unwrap();
        let c = 0.3;
        let mut kappa = CMat::zeros(6, 6);
        for p in 0..3 {
            kappa[(2 * p, 2 * p + 1)] = c64(c, 0.0);
            kappa[(2 * p + 1, 2 * p)] = c64(-c, 0.0);
        }
        let rho = CMat::zeros(6, 6);
        let (_, _, delta) = hfb_energy_and_fields(&h, &rho, &kappa);
        for p in 0..3 {
            assert!((delta[(2 * p, 2 * p + 1)] - c64(-g * 3.0 * c, 0.0)).norm() < 1e-14);
        }
        assert!(antisymmetry_defect(&delta) < 1e-14);
    }
}
