//! Second-quantized two-body Hamiltonians and their sparse Fock-space matrices.
//!
//! `H = Σ t_{kℓ} a†_k a_ℓ + ¼ Σ V̄_{kk'ℓℓ'} a†_k a†_k' a_ℓ' a_ℓ`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::basis::{annihilate, create, FockBasis};
use crate::matrix::{c64, CMat, CVec, HermitianMatrix, SPBasis, C64};

const SYMMETRY_TOL: f64 = 1e-14;

/// Dense rank-4 tensor `T_{kk'ℓℓ'}` over `M` orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    m: usize,
    data: Vec<C64>,
}

impl Tensor4 {
    pub fn zeros(m: usize) -> Self {
        Self { m, data: vec![C64::default(); m * m * m * m] }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, k: usize, kp: usize, l: usize, lp: usize) -> usize {
        ((k * self.m + kp) * self.m + l) * self.m + lp
    }

    #[inline]
    pub fn get(&self, k: usize, kp: usize, l: usize, lp: usize) -> C64 {
        self.data[self.idx(k, kp, l, lp)]
    }

    #[inline]
    pub fn set(&mut self, k: usize, kp: usize, l: usize, lp: usize, v: C64) {
        let i = self.idx(k, kp, l, lp);
        self.data[i] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyHamiltonian {
    basis: SPBasis,
    t: HermitianMatrix,
    vbar: Tensor4,
}

impl TwoBodyHamiltonian {
    /// Validates `V̄_{kk'ℓℓ'} = −V̄_{k'kℓℓ'} = −V̄_{kk'ℓ'ℓ} = V̄*_{ℓℓ'kk'}` within `1e−14`.
    pub fn new(basis: SPBasis, t: HermitianMatrix, vbar: Tensor4) -> Result<Self> {
        let m = basis.dim();
        if t.dim() != m || vbar.dim() != m {
            return Err(Error::Dimension(format!(
                "basis has {m} orbitals, t is {}x{}, V̄ has {}",
                t.dim(),
                t.dim(),
                vbar.dim()
            )));
        }
        for k in 0..m {
            for kp in 0..m {
                for l in 0..m {
                    for lp in 0..m {
                        let v = vbar.get(k, kp, l, lp);
                        if !(v.re.is_finite() && v.im.is_finite()) {
                            return Err(Error::InvalidMatrix("non-finite V̄ entry".into()));
                        }
                        let bad = (v + vbar.get(kp, k, l, lp)).norm() > SYMMETRY_TOL
                            || (v + vbar.get(k, kp, lp, l)).norm() > SYMMETRY_TOL
                            || (v - vbar.get(l, lp, k, kp).conj()).norm() > SYMMETRY_TOL;
                        if bad {
                            return Err(Error::Invariant(format!(
                                "V̄ symmetry violated at ({k},{kp},{l},{lp})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { basis, t, vbar })
    }

    /// Non-interacting Hamiltonian.
    pub fn one_body(basis: SPBasis, t: HermitianMatrix) -> Result<Self> {
        let m = basis.dim();
        Self::new(basis, t, Tensor4::zeros(m))
    }

    /// Builds `V̄` from a list of `(k, k', ℓ, ℓ', value)` entries, filling in every
    /// antisymmetry and hermiticity image. Conflicting entries are rejected.
    pub fn from_entries(basis: SPBasis, t: HermitianMatrix, entries: &[(usize, usize, usize, usize, C64)]) -> Result<Self> {
        let m = basis.dim();
        let mut vbar = Tensor4::zeros(m);
        let mut set = vec![false; m * m * m * m];
        for &(k, kp, l, lp, v) in entries {
            if k >= m || kp >= m || l >= m || lp >= m {
                return Err(Error::Dimension(format!("V̄ index ({k},{kp},{l},{lp}) out of range")));
            }
            if (k == kp || l == lp) && v != C64::default() {
                return Err(Error::Invariant(format!(
                    "V̄ entry ({k},{kp},{l},{lp}) must vanish by antisymmetry"
                )));
            }
            let images = [
                (k, kp, l, lp, v),
                (kp, k, l, lp, -v),
                (k, kp, lp, l, -v),
                (kp, k, lp, l, v),
                (l, lp, k, kp, v.conj()),
                (lp, l, k, kp, -v.conj()),
                (l, lp, kp, k, -v.conj()),
                (lp, l, kp, k, v.conj()),
            ];
            for (a, b, c, d, val) in images {
                let i = vbar.idx(a, b, c, d);
                if set[i] && (vbar.data[i] - val).norm() > SYMMETRY_TOL {
                    return Err(Error::Invariant(format!(
                        "conflicting V̄ entries at ({a},{b},{c},{d})"
                    )));
                }
                vbar.data[i] = val;
                set[i] = true;
            }
        }
        Self::new(basis, t, vbar)
    }

    /// Open Hubbard chain of `l` sites: orbital `2i+σ`, hopping `−tau` between
    /// neighbours, on-site repulsion `u n_{i↑} n_{i↓}`. Partners are `(i↑, i↓)`.
    pub fn hubbard_chain(l: usize, tau: f64, u: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::Domain("Hubbard chain needs at least one site".into()));
        }
        let m = 2 * l;
        let labels = (0..l)
            .flat_map(|i| [format!("{}up", i + 1), format!("{}dn", i + 1)])
            .collect();
        let partners = (0..m).map(|k| k ^ 1).collect();
        let basis = SPBasis::new(labels)?.with_partners(partners)?;
        let mut t = CMat::zeros(m, m);
        for i in 0..l.saturating_sub(1) {
            for s in 0..2 {
                t[(2 * i + s, 2 * i + 2 + s)] = c64(-tau, 0.0);
                t[(2 * i + 2 + s, 2 * i + s)] = c64(-tau, 0.0);
            }
        }
        let entries: Vec<_> = (0..l).map(|i| (2 * i, 2 * i + 1, 2 * i, 2 * i + 1, c64(u, 0.0))).collect();
        Self::from_entries(basis, HermitianMatrix::new(t)?, &entries)
    }

    /// Seniority pairing model: level `p` holds orbitals `(2p, 2p+1)` at energy
    /// `p·spacing`, with interaction `−G Σ_{pp'} P†_p P_p'`, `P†_p = a†_{2p} a†_{2p+1}`.
    pub fn pairing(levels: usize, spacing: f64, g: f64) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain("pairing model needs at least one level".into()));
        }
        let m = 2 * levels;
        let labels = (0..levels)
            .flat_map(|p| [format!("{}+", p + 1), format!("{}-", p + 1)])
            .collect();
        let partners = (0..m).map(|k| k ^ 1).collect();
        let basis = SPBasis::new(labels)?.with_partners(partners)?;
        let diag: Vec<f64> = (0..m).map(|k| (k / 2) as f64 * spacing).collect();
        let mut entries = Vec::new();
        for p in 0..levels {
            for q in 0..levels {
                entries.push((2 * p, 2 * p + 1, 2 * q, 2 * q + 1, c64(-g, 0.0)));
            }
        }
        Self::from_entries(basis, HermitianMatrix::from_real_diagonal(&diag), &entries)
    }

    pub fn orbitals(&self) -> usize {
        self.basis.dim()
    }

    pub fn sp_basis(&self) -> &SPBasis {
        &self.basis
    }

    pub fn t(&self) -> &HermitianMatrix {
        &self.t
    }

    pub fn vbar(&self) -> &Tensor4 {
        &self.vbar
    }

    pub fn is_interacting(&self) -> bool {
        self.vbar.max_abs() > 0.0
    }

    /// Same interaction with one-body part `t + shift`.
    pub fn with_one_body_shift(&self, shift: &CMat) -> Result<Self> {
        let t = HermitianMatrix::new(self.t.as_matrix() + shift)?;
        Ok(Self { basis: self.basis.clone(), t, vbar: self.vbar.clone() })
    }

    /// Nonzero `V̄_{kk'ℓℓ'}` with `k<k'`, grouped by the annihilated pair `ℓ<ℓ'`.
    fn pair_terms(&self) -> Vec<Vec<(usize, usize, C64)>> {
        let m = self.orbitals();
        let mut out = vec![Vec::new(); m * m];
        for l in 0..m {
            for lp in (l + 1)..m {
                for k in 0..m {
                    for kp in (k + 1)..m {
                        let v = self.vbar.get(k, kp, l, lp);
                        if v != C64::default() {
                            out[l * m + lp].push((k, kp, v));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Sparse matrix of an operator on a Fock basis, stored by rows.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    basis: Arc<FockBasis>,
    rows: Vec<Vec<(usize, C64)>>,
}

fn compress(mut row: Vec<(usize, C64)>) -> Vec<(usize, C64)> {
    row.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, C64)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| e.1 != C64::default());
    out
}

impl SparseOperator {
    /// Builds a hermitian operator row by row from its action on basis words.
    /// `act(word, push)` must emit `(word', amplitude)` for `O|word⟩`.
    fn from_action<F>(basis: &Arc<FockBasis>, act: F) -> Self
    where
        F: Fn(u64, &mut dyn FnMut(u64, C64)),
    {
        let rows = (0..basis.dim())
            .map(|i| {
                let mut row = Vec::new();
                act(basis.word(i), &mut |w, v| {
                    if let Some(r) = basis.index_of(w) {
                        // O|w_i⟩ = Σ_r O_{ri} |w_r⟩ and O_{ir} = O*_{ri} for hermitian O.
                        row.push((r, v.conj()));
                    }
                });
                compress(row)
            })
            .collect();
        Self { basis: basis.clone(), rows }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        CVec::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|row| row.iter().fold(C64::default(), |acc, &(c, v)| acc + v * x[c])),
        )
    }

    /// `⟨x|O|x⟩` (real part; exact for hermitian operators).
    pub fn expectation(&self, x: &CVec) -> f64 {
        x.dotc(&self.apply(x)).re
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                out[(i, c)] += v;
            }
        }
        out
    }

    /// `self + scale·other` on the same basis.
    pub fn plus_scaled(&self, other: &SparseOperator, scale: f64) -> Result<SparseOperator> {
        if self.basis.as_ref() != other.basis.as_ref() {
            return Err(Error::Dimension("operators live on different bases".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut row = a.clone();
                row.extend(b.iter().map(|&(c, v)| (c, v * scale)));
                compress(row)
            })
            .collect();
        Ok(Self { basis: self.basis.clone(), rows })
    }
}

/// Sparse matrix of `H` on `basis`.
pub fn hamiltonian_operator(h: &TwoBodyHamiltonian, basis: &Arc<FockBasis>) -> Result<SparseOperator> {
    let m = h.orbitals();
    if basis.orbitals() != m {
        return Err(Error::Dimension(format!(
            "Hamiltonian has {m} orbitals, basis has {}",
            basis.orbitals()
        )));
    }
    let t = h.t().as_matrix().clone();
    let pairs = h.pair_terms();
    Ok(SparseOperator::from_action(basis, |w, push| {
        one_body_action(&t, m, w, push);
        for l in 0..m {
            for lp in (l + 1)..m {
                let terms = &pairs[l * m + lp];
                if terms.is_empty() {
                    continue;
                }
                // a†_k a†_k' a_ℓ' a_ℓ: a_ℓ acts first.
                let Some((w1, s1)) = annihilate(w, l) else { continue };
                let Some((w2, s2)) = annihilate(w1, lp) else { continue };
                for &(k, kp, v) in terms {
                    let Some((w3, s3)) = create(w2, kp) else { continue };
                    let Some((w4, s4)) = create(w3, k) else { continue };
                    push(w4, v * (s1 * s2 * s3 * s4));
                }
            }
        }
    }))
}

fn one_body_action(a: &CMat, m: usize, w: u64, push: &mut dyn FnMut(u64, C64)) {
    for l in 0..m {
        let Some((w1, s1)) = annihilate(w, l) else { continue };
        for k in 0..m {
            let v = a[(k, l)];
            if v == C64::default() {
                continue;
            }
            if let Some((w2, s2)) = create(w1, k) {
                push(w2, v * (s1 * s2));
            }
        }
    }
}

/// Sparse matrix of the hermitian one-body operator `Σ A_{kℓ} a†_k a_ℓ`.
pub fn one_body_operator(a: &CMat, basis: &Arc<FockBasis>) -> Result<SparseOperator> {
    let m = basis.orbitals();
    if a.nrows() != m || a.ncols() != m {
        return Err(Error::Dimension(format!("one-body matrix must be {m}x{m}")));
    }
    let a = HermitianMatrix::new(a.clone())?.into_inner();
    Ok(SparseOperator::from_action(basis, |w, push| one_body_action(&a, m, w, push)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::{enumerate_basis, Sector};

    #[test]
    fn hubbard_symmetries_hold() {
        let h = TwoBodyHamiltonian::hubbard_chain(3, 1.0, 4.0).unwrap();
        assert_eq!(h.orbitals(), 6);
        assert_eq!(h.vbar().get(0, 1, 0, 1), c64(4.0, 0.0));
        assert_eq!(h.vbar().get(1, 0, 0, 1), c64(-4.0, 0.0));
        assert_eq!(h.sp_basis().partner(2), Some(3));
    }

    #[test]
    fn conflicting_entries_rejected() {
        let b = SPBasis::indexed(2).unwrap();
        let t = HermitianMatrix::zeros(2);
        let e = [(0, 1, 0, 1, c64(1.0, 0.0)), (1, 0, 0, 1, c64(1.0, 0.0))];
        assert!(TwoBodyHamiltonian::from_entries(b, t, &e).is_err());
    }

    #[test]
    fn sparse_matrix_is_hermitian() {
        let h = TwoBodyHamiltonian::pairing(3, 1.0, 0.7).unwrap();
        let basis = Arc::new(enumerate_basis(6, Sector::Full).unwrap());
        let op = hamiltonian_operator(&h, &basis).unwrap();
        let d = op.to_dense();
        assert!(crate::matrix::hermiticity_defect(&d) < 1e-14);
    }

    #[test]
    fn number_operator_counts_particles() {
        let basis = Arc::new(enumerate_basis(4, Sector::Full).unwrap());
        let n = one_body_operator(&CMat::identity(4, 4), &basis).unwrap().to_dense();
        for (i, &w) in basis.words().iter().enumerate() {
            assert_eq!(n[(i, i)].re, w.count_ones() as f64);
        }
    }
}
