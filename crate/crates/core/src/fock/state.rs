//! Many-body states, exact ground states and reduced density matrices.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::basis::{annihilate, create, enumerate_basis, FockBasis, Sector};
use crate::fock::hamiltonian::{hamiltonian_operator, SparseOperator, Tensor4, TwoBodyHamiltonian};
use crate::matrix::{c64, eigh, CMat, CVec, DensityMatrix, PairingTensor, C64};

/// Largest basis diagonalized densely.
pub const DENSE_LIMIT: usize = 4096;
const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    basis: Arc<FockBasis>,
    amps: CVec,
}

impl ManyBodyState {
    pub fn new(basis: Arc<FockBasis>, amps: CVec) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a basis of size {}",
                amps.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, amps })
    }

    /// The occupation-number state `|word⟩`.
    pub fn basis_state(basis: Arc<FockBasis>, word: u64) -> Result<Self> {
        let i = basis
            .index_of(word)
            .ok_or_else(|| Error::Sector(format!("word {word:#b} is not in the basis")))?;
        let mut amps = CVec::zeros(basis.dim());
        amps[i] = c64(1.0, 0.0);
        Ok(Self { basis, amps })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidMatrix("state has zero or non-finite norm".into()));
        }
        self.amps /= c64(n, 0.0);
        Ok(self)
    }

    /// Copies the amplitudes into the full Fock sector of the same orbital count.
    pub fn embed_in_full(&self) -> Result<Self> {
        let full = Arc::new(enumerate_basis(self.basis.orbitals(), Sector::Full)?);
        let mut amps = CVec::zeros(full.dim());
        for (i, &w) in self.basis.words().iter().enumerate() {
            amps[w as usize] = self.amps[i];
        }
        Ok(Self { basis: full, amps })
    }

    fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::Invariant(format!("state norm {} is not 1", self.norm())))
        }
    }
}

/// `HΨ` on the state's basis.
pub fn apply_hamiltonian(h: &TwoBodyHamiltonian, psi: &ManyBodyState) -> Result<ManyBodyState> {
    let op = hamiltonian_operator(h, psi.basis())?;
    ManyBodyState::new(psi.basis().clone(), op.apply(psi.amplitudes()))
}

/// `⟨Ψ|H|Ψ⟩` for a normalized state.
pub fn energy_expectation(h: &TwoBodyHamiltonian, psi: &ManyBodyState) -> Result<f64> {
    Ok(hamiltonian_operator(h, psi.basis())?.expectation(psi.amplitudes()))
}

/// Full spectrum and eigenvectors of a sparse operator by dense diagonalization.
pub fn dense_eigen(op: &SparseOperator) -> Result<(Vec<f64>, CMat)> {
    if op.dim() > DENSE_LIMIT {
        return Err(Error::TooLarge(format!(
            "basis of size {} exceeds the dense diagonalization limit {DENSE_LIMIT}",
            op.dim()
        )));
    }
    let e = eigh(&op.to_dense())?;
    Ok((e.values, e.vectors))
}

/// Lowest eigenvalue and phase-fixed eigenvector of `H` on `basis`.
pub fn ground_state(h: &TwoBodyHamiltonian, basis: &Arc<FockBasis>) -> Result<(f64, ManyBodyState)> {
    let op = hamiltonian_operator(h, basis)?;
    let (values, vectors) = dense_eigen(&op)?;
    let psi = ManyBodyState::new(basis.clone(), vectors.column(0).clone_owned())?;
    Ok((values[0], psi))
}

/// `T_{kℓ} = ⟨bra|a†_ℓ a_k|ket⟩` for two vectors on the same basis.
pub fn transition_density(basis: &FockBasis, bra: &CVec, ket: &CVec) -> CMat {
    let m = basis.orbitals();
    let mut t = CMat::zeros(m, m);
    for (j, &w) in basis.words().iter().enumerate() {
        let a = ket[j];
        if a == C64::default() {
            continue;
        }
        for k in 0..m {
            let Some((w1, s1)) = annihilate(w, k) else { continue };
            for l in 0..m {
                let Some((w2, s2)) = create(w1, l) else { continue };
                if let Some(i) = basis.index_of(w2) {
                    t[(k, l)] += bra[i].conj() * a * (s1 * s2);
                }
            }
        }
    }
    t
}

/// `ϱ_{kℓ} = ⟨Ψ|a†_ℓ a_k|Ψ⟩`.
pub fn one_body_density(psi: &ManyBodyState) -> Result<DensityMatrix> {
    psi.require_normalized()?;
    let rho = transition_density(psi.basis(), psi.amplitudes(), psi.amplitudes());
    let n = psi.basis().particle_number().map(|n| n as f64);
    Ok(DensityMatrix::from_trusted(rho, n))
}

/// `κ_{kℓ} = ⟨Ψ|a_ℓ a_k|Ψ⟩`; requires a full-sector state.
pub fn pairing_tensor_of(psi: &ManyBodyState) -> Result<PairingTensor> {
    if psi.basis().sector() != Sector::Full {
        return Err(Error::Sector("pairing tensor needs a state on the full Fock sector".into()));
    }
    psi.require_normalized()?;
    let basis = psi.basis();
    let m = basis.orbitals();
    let amps = psi.amplitudes();
    let mut kappa = CMat::zeros(m, m);
    for (j, &w) in basis.words().iter().enumerate() {
        let a = amps[j];
        if a == C64::default() {
            continue;
        }
        for k in 0..m {
            let Some((w1, s1)) = annihilate(w, k) else { continue };
            for l in 0..m {
                let Some((w2, s2)) = annihilate(w1, l) else { continue };
                let i = w2 as usize;
                kappa[(k, l)] += amps[i].conj() * a * (s1 * s2);
            }
        }
    }
    Ok(PairingTensor::from_trusted(&kappa))
}

/// Two-body correlation `C⁽²⁾_{kk'ℓℓ'} = ⟨a†_ℓ a†_ℓ' a_k' a_k⟩ − ϱ_{kℓ}ϱ_{k'ℓ'} + ϱ_{kℓ'}ϱ_{k'ℓ}`.
pub fn two_body_correlation(psi: &ManyBodyState) -> Result<Tensor4> {
    psi.require_normalized()?;
    let basis = psi.basis();
    let m = basis.orbitals();
    let rho = transition_density(basis, psi.amplitudes(), psi.amplitudes());

    let target = match basis.sector() {
        Sector::Full => Arc::new(enumerate_basis(m, Sector::Full)?),
        Sector::Fixed(n) if n >= 2 => Arc::new(enumerate_basis(m, Sector::Fixed(n - 2))?),
        Sector::Fixed(_) => {
            let mut out = Tensor4::zeros(m);
            fill_disconnected(&mut out, &rho, |_, _, _, _| C64::default());
            return Ok(out);
        }
    };

    // φ_{kk'} = a_k' a_k Ψ for k < k'.
    let mut phi: Vec<CVec> = Vec::with_capacity(m * m);
    for k in 0..m {
        for kp in 0..m {
            let mut v = CVec::zeros(target.dim());
            if k < kp {
                for (j, &w) in basis.words().iter().enumerate() {
                    let a = psi.amplitudes()[j];
                    if a == C64::default() {
                        continue;
                    }
                    let Some((w1, s1)) = annihilate(w, k) else { continue };
                    let Some((w2, s2)) = annihilate(w1, kp) else { continue };
                    if let Some(i) = target.index_of(w2) {
                        v[i] += a * (s1 * s2);
                    }
                }
            }
            phi.push(v);
        }
    }
    let g2 = |k: usize, kp: usize, l: usize, lp: usize| -> C64 {
        if k == kp || l == lp {
            return C64::default();
        }
        let (a, b, sa) = if k < kp { (k, kp, 1.0) } else { (kp, k, -1.0) };
        let (c, d, sc) = if l < lp { (l, lp, 1.0) } else { (lp, l, -1.0) };
        phi[c * m + d].dotc(&phi[a * m + b]) * (sa * sc)
    };
    let mut out = Tensor4::zeros(m);
    fill_disconnected(&mut out, &rho, g2);
    Ok(out)
}

fn fill_disconnected<F>(out: &mut Tensor4, rho: &CMat, g2: F)
where
    F: Fn(usize, usize, usize, usize) -> C64,
{
    let m = rho.nrows();
    for k in 0..m {
        for kp in 0..m {
            for l in 0..m {
                for lp in 0..m {
                    let v = g2(k, kp, l, lp) - rho[(k, l)] * rho[(kp, lp)] + rho[(k, lp)] * rho[(kp, l)];
                    out.set(k, kp, l, lp, v);
                }
            }
        }
    }
}

/// Normalized `∏_c b†_c exp(Σ_{k<ℓ} z_{kℓ} a†_k a†_ℓ)|0⟩` on the full sector,
/// where `b†_c = Σ_k B_{kc} a†_k` are the columns of `blocked`.
pub fn condensate_state(z: &CMat, blocked: &CMat) -> Result<ManyBodyState> {
    let m = z.nrows();
    if z.ncols() != m || (blocked.ncols() > 0 && blocked.nrows() != m) {
        return Err(Error::Dimension("z must be square and blocked orbitals M-dimensional".into()));
    }
    let basis = Arc::new(enumerate_basis(m, Sector::Full)?);
    let dim = basis.dim();

    let apply_pair = |x: &CVec| -> CVec {
        let mut y = CVec::zeros(dim);
        for (j, a) in x.iter().enumerate() {
            if *a == C64::default() {
                continue;
            }
            let w = j as u64;
            for k in 0..m {
                for l in (k + 1)..m {
                    let zkl = z[(k, l)];
                    if zkl == C64::default() {
                        continue;
                    }
                    let Some((w1, s1)) = create(w, l) else { continue };
                    let Some((w2, s2)) = create(w1, k) else { continue };
                    y[w2 as usize] += zkl * *a * (s1 * s2);
                }
            }
        }
        y
    };

    let mut term = CVec::zeros(dim);
    term[0] = c64(1.0, 0.0);
    let mut acc = term.clone();
    for n in 1..=(m / 2) {
        term = apply_pair(&term) / c64(n as f64, 0.0);
        acc += &term;
    }

    for c in 0..blocked.ncols() {
        let mut y = CVec::zeros(dim);
        for (j, a) in acc.iter().enumerate() {
            if *a == C64::default() {
                continue;
            }
            for k in 0..m {
                let b = blocked[(k, c)];
                if b == C64::default() {
                    continue;
                }
                if let Some((w1, s1)) = create(j as u64, k) {
                    y[w1 as usize] += b * *a * s1;
                }
            }
        }
        acc = y;
    }
    ManyBodyState::new(basis, acc)?.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::word_from_string;
    use crate::matrix::{frobenius, HermitianMatrix, SPBasis};

    fn fixed(m: usize, n: usize) -> Arc<FockBasis> {
        Arc::new(enumerate_basis(m, Sector::Fixed(n)).unwrap())
    }

    #[test]
    fn two_level_ground_state() {
        let h = TwoBodyHamiltonian::one_body(
            SPBasis::indexed(2).unwrap(),
            HermitianMatrix::from_real_diagonal(&[-1.0, 1.0]),
        )
        .unwrap();
        let (e0, psi) = ground_state(&h, &fixed(2, 1)).unwrap();
        assert!((e0 + 1.0).abs() < 1e-15);
        assert!(psi.is_normalized());
    }

    #[test]
    fn hubbard_dimer_matches_closed_form() {
        for (tau, u) in [(1.0, 4.0), (1.0, 2.0), (0.5, 3.0)] {
            let h = TwoBodyHamiltonian::hubbard_chain(2, tau, u).unwrap();
            let (e0, _) = ground_state(&h, &fixed(4, 2)).unwrap();
            let exact = (u - (u * u + 16.0 * tau * tau as f64).sqrt()) / 2.0;
            assert!((e0 - exact).abs() < 1e-12, "{e0} vs {exact}");
        }
    }

    #[test]
    fn determinant_densities() {
        let basis = fixed(4, 2);
        let psi = ManyBodyState::basis_state(basis, word_from_string("1100").unwrap()).unwrap();
        let rho = one_body_density(&psi).unwrap();
        let expect = HermitianMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0]).into_inner();
        assert_eq!(rho.as_matrix(), &expect);
        let c2 = two_body_correlation(&psi).unwrap();
        assert!(c2.max_abs() < 1e-12);
    }

    #[test]
    fn superposition_density() {
        let basis = fixed(2, 1);
        let s = 0.5f64.sqrt();
        let psi = ManyBodyState::new(basis, CVec::from_vec(vec![c64(s, 0.0), c64(s, 0.0)])).unwrap();
        let rho = one_body_density(&psi).unwrap();
        for z in rho.as_matrix().iter() {
            assert!((z.re - 0.5).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn bcs_pair_tensor() {
        let basis = Arc::new(enumerate_basis(2, Sector::Full).unwrap());
        let s = 0.5f64.sqrt();
        let mut amps = CVec::zeros(4);
        amps[0] = c64(s, 0.0);
        amps[3] = c64(s, 0.0);
        let psi = ManyBodyState::new(basis, amps).unwrap();
        let kappa = pairing_tensor_of(&psi).unwrap();
        assert!((kappa.as_matrix()[(0, 1)] - c64(0.5, 0.0)).norm() < 1e-15);
        assert!((kappa.as_matrix()[(1, 0)] + c64(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fixed_sector_pairing_rejected_and_embedded_is_zero() {
        let h = TwoBodyHamiltonian::pairing(2, 1.0, 0.5).unwrap();
        let (_, psi) = ground_state(&h, &fixed(4, 2)).unwrap();
        assert!(matches!(pairing_tensor_of(&psi), Err(Error::Sector(_))));
        let full = psi.embed_in_full().unwrap();
        assert_eq!(frobenius(pairing_tensor_of(&full).unwrap().as_matrix()), 0.0);
    }

    #[test]
    fn condensate_of_single_pair() {
        let mut z = CMat::zeros(2, 2);
        z[(0, 1)] = c64(1.0, 0.0);
        z[(1, 0)] = c64(-1.0, 0.0);
        let psi = condensate_state(&z, &CMat::zeros(2, 0)).unwrap();
        let kappa = pairing_tensor_of(&psi).unwrap();
        assert!((kappa.as_matrix()[(0, 1)] - c64(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn correlated_dimer() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 4.0).unwrap();
        let (_, psi) = ground_state(&h, &fixed(4, 2)).unwrap();
        let occ = one_body_density(&psi).unwrap().occupations();
        assert!(occ.iter().all(|&n| n > 1e-3 && n < 1.0 - 1e-3));
        assert!(two_body_correlation(&psi).unwrap().frobenius() > 1e-2);
    }
}
