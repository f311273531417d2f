//! Dense complex matrix kernel and the density-matrix data model.
//!
//! Conventions used throughout the crate:
//!
//! * `ϱ_{kℓ} = ⟨Ψ|a†_ℓ a_k|Ψ⟩`, so a Slater determinant built from the columns
//!   `u_i` of a unitary has `ϱ = Σ_i u_i u_i†`.
//! * `κ_{kℓ} = ⟨Ψ|a_ℓ a_k|Ψ⟩`, antisymmetric.
//! * The generalized density is `R = [[ϱ, κ], [−κ*, 1−ϱ*]]` and a Bogoliubov
//!   transform is `W = [[U, V*], [V, U*]]`.
//!
//! Matrices are dense `nalgebra` matrices of `Complex<f64>`; indices in the
//! Rust API are zero-based.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Slack allowed on the Pauli bounds `0 ≤ n ≤ 1` of density eigenvalues.
pub const PAULI_TOL: f64 = 1e-10;
/// Slack allowed on `tr ϱ = N` when a particle number is declared.
pub const TRACE_TOL: f64 = 1e-8;
/// Bound on `‖W†W − 1‖_F` for a Bogoliubov transform.
pub const UNITARY_TOL: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Frobenius norm.
pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖AB − BA‖_F`.
pub fn commutator_norm(a: &CMat, b: &CMat) -> f64 {
    frobenius(&(a * b - b * a))
}

/// `‖P² − P‖_F`.
pub fn projector_defect(p: &CMat) -> f64 {
    frobenius(&(p * p - p))
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn antisymmetry_defect(m: &CMat) -> f64 {
    frobenius(&(m + m.transpose()))
}

fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Overwrites the strict lower triangle with the conjugate of the upper one
/// and drops the imaginary part of the diagonal.
fn mirror_upper(m: &mut CMat) {
    let n = m.nrows();
    for k in 0..n {
        m[(k, k)] = c64(m[(k, k)].re, 0.0);
        for l in (k + 1)..n {
            m[(l, k)] = m[(k, l)].conj();
        }
    }
}

/// Single-particle basis `{φ_k}` with an optional pairing-partner map `k ↔ k̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct SPBasis {
    labels: Vec<String>,
    pair_partner: Option<Vec<usize>>,
}

impl SPBasis {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Dimension("single-particle basis must be non-empty".into()));
        }
        Ok(Self { labels, pair_partner: None })
    }

    /// Basis labelled `1..=M`.
    pub fn indexed(m: usize) -> Result<Self> {
        Self::new((1..=m).map(|k| k.to_string()).collect())
    }

    /// Attaches a partner map; it must be an involution without fixed points.
    pub fn with_partners(mut self, partners: Vec<usize>) -> Result<Self> {
        let m = self.labels.len();
        if partners.len() != m {
            return Err(Error::Dimension(format!(
                "partner map has {} entries for {} orbitals",
                partners.len(),
                m
            )));
        }
        for (k, &p) in partners.iter().enumerate() {
            if p >= m || p == k || partners[p] != k {
                return Err(Error::Invariant(format!(
                    "pair partner map is not a fixed-point-free involution at orbital {k}"
                )));
            }
        }
        self.pair_partner = Some(partners);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn partner(&self, k: usize) -> Option<usize> {
        self.pair_partner.as_ref().map(|p| p[k])
    }

    pub fn partners(&self) -> Option<&[usize]> {
        self.pair_partner.as_deref()
    }

    /// Pairs `(k, k̄)` with `k < k̄`.
    pub fn partner_pairs(&self) -> Vec<(usize, usize)> {
        match &self.pair_partner {
            Some(p) => p.iter().enumerate().filter(|(k, &q)| *k < q).map(|(k, &q)| (k, q)).collect(),
            None => Vec::new(),
        }
    }
}

/// Hermitian matrix; the lower triangle is always the mirror of the upper one.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMat);

impl HermitianMatrix {
    /// Accepts `m` if it is hermitian to within `1e-10` (relative), then mirrors
    /// the upper triangle so the stored matrix is exactly hermitian.
    pub fn new(mut m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
        }
        if !all_finite(&m) {
            return Err(Error::InvalidMatrix("non-finite entries".into()));
        }
        let scale = frobenius(&m).max(1.0);
        let defect = hermiticity_defect(&m);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::InvalidMatrix(format!("not hermitian (defect {defect:.3e})")));
        }
        mirror_upper(&mut m);
        Ok(Self(m))
    }

    /// Builds from the upper triangle only; the lower triangle of `m` is ignored.
    pub fn from_upper(mut m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        mirror_upper(&mut m);
        if !all_finite(&m) {
            return Err(Error::InvalidMatrix("non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self(CMat::from_fn(n, n, |i, j| if i == j { c64(d[i], 0.0) } else { C64::default() }))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMat::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }
}

/// Eigenpairs in ascending order; columns of `vectors` are orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

/// Diagonalizes a hermitian matrix.
///
/// Eigenvalues are ascending. Each eigenvector is rescaled so its
/// largest-magnitude component is real and positive; inside a degenerate
/// cluster vectors are ordered by the index of that component.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    eigh(a.as_matrix())
}

/// Same as [`eig_hermitian`] on a raw matrix that the caller guarantees to be
/// hermitian. Only the upper triangle is read.
pub fn eigh(a: &CMat) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    if !all_finite(a) {
        return Err(Error::InvalidMatrix("non-finite entries".into()));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(EigenDecomposition { values: Vec::new(), vectors: CMat::zeros(0, 0) });
    }
    let mut m = a.clone();
    mirror_upper(&mut m);

    let (values, vectors): (Vec<f64>, CMat) = if m.iter().all(|z| z.im == 0.0) {
        let re = m.map(|z| z.re);
        let eig = SymmetricEigen::try_new(re, f64::EPSILON, 0)
            .ok_or_else(|| Error::InvalidMatrix("eigensolver did not converge".into()))?;
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| c64(x, 0.0)))
    } else {
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
            .ok_or_else(|| Error::InvalidMatrix("eigensolver did not converge".into()))?;
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

    let mut out_vals = Vec::with_capacity(n);
    let mut out_vecs = CMat::zeros(n, n);
    let mut lead = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        out_vals.push(values[src]);
        let mut v = vectors.column(src).clone_owned();
        let (imax, _) = v
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bm), (i, z)| if z.norm() > bm { (i, z.norm()) } else { (bi, bm) });
        let pivot = v[imax];
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            v *= phase;
            v[imax] = c64(v[imax].norm(), 0.0);
        }
        out_vecs.set_column(col, &v);
        lead.push(imax);
    }

    // Deterministic order inside degenerate clusters.
    let scale = out_vals.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (out_vals[end] - out_vals[end - 1]).abs() <= 1e-12 * scale {
            end += 1;
        }
        if end - start > 1 {
            let mut idx: Vec<usize> = (start..end).collect();
            idx.sort_by_key(|&i| lead[i]);
            let cols: Vec<CVec> = idx.iter().map(|&i| out_vecs.column(i).clone_owned()).collect();
            let vals: Vec<f64> = idx.iter().map(|&i| out_vals[i]).collect();
            for (off, (v, val)) in cols.into_iter().zip(vals).enumerate() {
                out_vecs.set_column(start + off, &v);
                out_vals[start + off] = val;
            }
        }
        start = end;
    }

    Ok(EigenDecomposition { values: out_vals, vectors: out_vecs })
}

/// One-body density matrix with an optional declared particle number.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
    particles: Option<f64>,
}

impl DensityMatrix {
    /// Validates hermiticity, the Pauli bounds on the eigenvalues and, when
    /// `particles` is given, the trace condition.
    pub fn new(mat: CMat, particles: Option<f64>) -> Result<Self> {
        let h = HermitianMatrix::new(mat)?;
        let eig = eig_hermitian(&h)?;
        if let (Some(&lo), Some(&hi)) = (eig.values.first(), eig.values.last()) {
            if lo < -PAULI_TOL || hi > 1.0 + PAULI_TOL {
                return Err(Error::Invariant(format!(
                    "density eigenvalues [{lo:.3e}, {hi:.3e}] violate the Pauli bound"
                )));
            }
        }
        let mat = h.into_inner();
        if let Some(n) = particles {
            let tr = mat.trace().re;
            if (tr - n).abs() > TRACE_TOL {
                return Err(Error::Invariant(format!("tr ϱ = {tr} but N = {n}")));
            }
        }
        Ok(Self { mat, particles })
    }

    /// Wraps a matrix that is already known to be a valid density.
    pub(crate) fn from_trusted(mut mat: CMat, particles: Option<f64>) -> Self {
        mirror_upper(&mut mat);
        Self { mat, particles }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_inner(self) -> CMat {
        self.mat
    }

    pub fn particles(&self) -> Option<f64> {
        self.particles
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Natural occupation numbers (eigenvalues of ϱ), ascending.
    pub fn occupations(&self) -> Vec<f64> {
        eigh(&self.mat).map(|e| e.values).unwrap_or_default()
    }
}

/// `ϱ = Σ_{i∈occ} u_i u_i†` for the listed columns of `orbitals`.
pub fn density_from_orbitals(orbitals: &CMat, occupied: &[usize]) -> Result<DensityMatrix> {
    let m = orbitals.nrows();
    let mut seen = vec![false; orbitals.ncols()];
    for &i in occupied {
        if i >= orbitals.ncols() {
            return Err(Error::InvalidOccupation(format!("orbital index {i} out of range")));
        }
        if seen[i] {
            return Err(Error::InvalidOccupation(format!("orbital {i} listed twice")));
        }
        seen[i] = true;
    }
    let mut rho = CMat::zeros(m, m);
    for &i in occupied {
        let u = orbitals.column(i);
        rho += &u * u.adjoint();
    }
    Ok(DensityMatrix::from_trusted(rho, Some(occupied.len() as f64)))
}

/// `‖ϱ² − ϱ‖_F`; zero exactly for single Slater determinants.
pub fn idempotency_defect(rho: &DensityMatrix) -> f64 {
    projector_defect(rho.as_matrix())
}

/// Antisymmetric pairing tensor `κ_{kℓ} = ⟨a_ℓ a_k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingTensor(CMat);

impl PairingTensor {
    /// Requires `κ_{ℓk} = −κ_{kℓ}` exactly.
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("pairing tensor is not square".into()));
        }
        if !all_finite(&m) {
            return Err(Error::InvalidMatrix("non-finite entries".into()));
        }
        let n = m.nrows();
        for k in 0..n {
            for l in k..n {
                if m[(l, k)] != -m[(k, l)] {
                    return Err(Error::Invariant(format!(
                        "pairing tensor is not antisymmetric at ({k}, {l})"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds from the strict upper triangle; everything else is ignored.
    pub fn from_upper(m: &CMat) -> Result<Self> {
        let n = m.nrows();
        let mut out = CMat::zeros(n, n);
        for k in 0..n {
            for l in (k + 1)..n {
                out[(k, l)] = m[(k, l)];
                out[(l, k)] = -m[(k, l)];
            }
        }
        Self::new(out)
    }

    /// Antisymmetrizes `(m − mᵀ)/2`.
    pub(crate) fn from_trusted(m: &CMat) -> Self {
        let n = m.nrows();
        let mut out = CMat::zeros(n, n);
        for k in 0..n {
            for l in (k + 1)..n {
                let v = (m[(k, l)] - m[(l, k)]) * 0.5;
                out[(k, l)] = v;
                out[(l, k)] = -v;
            }
        }
        Self(out)
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMat::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }
}

/// `R = [[ϱ, κ], [−κ*, 1−ϱ*]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedDensity {
    rho: DensityMatrix,
    kappa: PairingTensor,
    r: CMat,
}

pub fn generalized_matrix(rho: &CMat, kappa: &CMat) -> CMat {
    let m = rho.nrows();
    let mut r = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            r[(i, j)] = rho[(i, j)];
            r[(i, m + j)] = kappa[(i, j)];
            r[(m + i, j)] = -kappa[(i, j)].conj();
            let one = if i == j { 1.0 } else { 0.0 };
            r[(m + i, m + j)] = c64(one, 0.0) - rho[(i, j)].conj();
        }
    }
    r
}

pub fn assemble_generalized(rho: &DensityMatrix, kappa: &PairingTensor) -> Result<GeneralizedDensity> {
    if rho.dim() != kappa.dim() {
        return Err(Error::Dimension(format!(
            "ϱ is {0}x{0} but κ is {1}x{1}",
            rho.dim(),
            kappa.dim()
        )));
    }
    let r = generalized_matrix(rho.as_matrix(), kappa.as_matrix());
    let defect = hermiticity_defect(&r);
    if defect > HERMITIAN_TOL * frobenius(&r).max(1.0) {
        return Err(Error::Invariant(format!("R is not hermitian (defect {defect:.3e})")));
    }
    let eig = eigh(&r)?;
    if let (Some(&lo), Some(&hi)) = (eig.values.first(), eig.values.last()) {
        if lo < -PAULI_TOL || hi > 1.0 + PAULI_TOL {
            return Err(Error::Invariant(format!(
                "generalized density eigenvalues [{lo:.3e}, {hi:.3e}] outside [0, 1]"
            )));
        }
    }
    Ok(GeneralizedDensity { rho: rho.clone(), kappa: kappa.clone(), r })
}

impl GeneralizedDensity {
    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn kappa(&self) -> &PairingTensor {
        &self.kappa
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.r
    }

    /// `‖R² − R‖_F`; zero for quasiparticle vacua.
    pub fn vacuum_defect(&self) -> f64 {
        projector_defect(&self.r)
    }
}

/// Bogoliubov transform `W = [[U, V*], [V, U*]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform {
    u: CMat,
    v: CMat,
}

impl BogoliubovTransform {
    pub fn new(u: CMat, v: CMat) -> Result<Self> {
        if !u.is_square() || u.shape() != v.shape() {
            return Err(Error::Dimension("U and V must be square and of equal size".into()));
        }
        let t = Self { u, v };
        let defect = t.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::Invariant(format!("W is not unitary (defect {defect:.3e})")));
        }
        Ok(t)
    }

    pub fn identity(m: usize) -> Self {
        Self { u: CMat::identity(m, m), v: CMat::zeros(m, m) }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &CMat {
        &self.u
    }

    pub fn v(&self) -> &CMat {
        &self.v
    }

    pub fn w(&self) -> CMat {
        let m = self.dim();
        let mut w = CMat::zeros(2 * m, 2 * m);
        w.view_mut((0, 0), (m, m)).copy_from(&self.u);
        w.view_mut((0, m), (m, m)).copy_from(&self.v.conjugate());
        w.view_mut((m, 0), (m, m)).copy_from(&self.v);
        w.view_mut((m, m), (m, m)).copy_from(&self.u.conjugate());
        w
    }

    pub fn unitarity_defect(&self) -> f64 {
        let w = self.w();
        let n = w.nrows();
        frobenius(&(w.adjoint() * &w - CMat::identity(n, n)))
    }

    /// Densities of the quasiparticle vacuum: `ϱ = V*Vᵀ`, `κ = V*Uᵀ`.
    pub fn vacuum_densities(&self) -> (CMat, CMat) {
        let vc = self.v.conjugate();
        (&vc * self.v.transpose(), &vc * self.u.transpose())
    }
}

/// `Σₓ = [[0, 1], [1, 0]]` in `M×M` blocks.
pub fn sigma_x(m: usize) -> CMat {
    let mut s = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        s[(i, m + i)] = c64(1.0, 0.0);
        s[(m + i, i)] = c64(1.0, 0.0);
    }
    s
}

/// `‖Σₓ H Σₓ + H*‖_F` for a `2M×2M` quasiparticle Hamiltonian.
pub fn qp_symmetry_defect(h: &CMat) -> Result<f64> {
    if !h.is_square() || h.nrows() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "quasiparticle Hamiltonian must be square of even size, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let s = sigma_x(h.nrows() / 2);
    Ok(frobenius(&(&s * h * &s + h.conjugate())))
}

/// `H = [[h − μ, Δ], [−Δ*, −h* + μ]]`.
pub fn quasiparticle_hamiltonian(h: &CMat, delta: &CMat, mu: f64) -> CMat {
    let m = h.nrows();
    let mut out = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let shift = if i == j { mu } else { 0.0 };
            out[(i, j)] = h[(i, j)] - shift;
            out[(i, m + j)] = delta[(i, j)];
            out[(m + i, j)] = -delta[(i, j)].conj();
            out[(m + i, m + j)] = -h[(i, j)].conj() + shift;
        }
    }
    out
}

/// Random matrices for seeded sampling of test points.
pub mod random {
    use super::*;

    pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| gaussian_c64(rng))
    }

    pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
        let a = gaussian_matrix(rng, n, n);
        HermitianMatrix::new((&a + a.adjoint()) * c64(0.5, 0.0)).expect("symmetrized matrix is hermitian")
    }

    /// Haar-ish unitary from the eigenvectors of a random hermitian matrix.
    pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
        let h = hermitian(rng, n);
        eig_hermitian(&h).expect("finite hermitian matrix").vectors
    }

    pub fn antisymmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
        let a = gaussian_matrix(rng, n, n);
        (&a - a.transpose()) * c64(0.5, 0.0)
    }

    /// Density with eigenvalues drawn from `[lo, hi] ⊂ [0, 1]` in a random basis.
    pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> CMat {
        let u = unitary(rng, n);
        let occ: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
        let d = CMat::from_fn(n, n, |i, j| if i == j { c64(occ[i], 0.0) } else { C64::default() });
        let mut rho = &u * d * u.adjoint();
        mirror_upper(&mut rho);
        rho
    }

    /// Random Slater determinant density of `n_occ` particles.
    pub fn slater_density<R: Rng + ?Sized>(rng: &mut R, n: usize, n_occ: usize) -> CMat {
        let u = unitary(rng, n);
        let occ: Vec<usize> = (0..n_occ).collect();
        density_from_orbitals(&u, &occ).expect("valid occupation").into_inner()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(rows: &[&[f64]]) -> CMat {
        CMat::from_fn(rows.len(), rows[0].len(), |i, j| c64(rows[i][j], 0.0))
    }

    #[test]
    fn identity_spectrum() {
        let e = eig_hermitian(&HermitianMatrix::new(CMat::identity(3, 3)).unwrap()).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let h = HermitianMatrix::new(real(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_and_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random::hermitian(&mut rng, 6);
        let e = eig_hermitian(&h).unwrap();
        let lam = CMat::from_fn(6, 6, |i, j| if i == j { c64(e.values[i], 0.0) } else { C64::default() });
        let rec = &e.vectors * lam * e.vectors.adjoint();
        assert!(frobenius(&(rec - h.as_matrix())) <= 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for j in 0..6 {
            let col = e.vectors.column(j);
            let big = col.iter().fold(C64::default(), |b, z| if z.norm() > b.norm() { *z } else { b });
            assert!(big.im.abs() < 1e-15 && big.re > 0.0);
        }
        let again = eig_hermitian(&h).unwrap();
        assert_eq!(again, e);
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = c64(f64::NAN, 0.0);
        assert!(matches!(eigh(&m), Err(Error::InvalidMatrix(_))));
        assert!(matches!(HermitianMatrix::new(m), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn projector_examples() {
        let u = CMat::identity(4, 4);
        let rho = density_from_orbitals(&u, &[0, 1]).unwrap();
        assert_eq!(rho.as_matrix(), &real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0]
        ]));
        let all = density_from_orbitals(&u, &[0, 1, 2, 3]).unwrap();
        assert_eq!(all.as_matrix(), &CMat::identity(4, 4));

        let th: f64 = 0.37;
        let rot = real(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]);
        let rho = density_from_orbitals(&rot, &[0]).unwrap();
        let expect = real(&[&[th.cos().powi(2), th.cos() * th.sin()], &[th.cos() * th.sin(), th.sin().powi(2)]]);
        assert!(frobenius(&(rho.as_matrix() - expect)) < 1e-15);
    }

    #[test]
    fn duplicate_occupation_rejected() {
        let u = CMat::identity(3, 3);
        assert!(matches!(density_from_orbitals(&u, &[1, 1]), Err(Error::InvalidOccupation(_))));
        assert!(matches!(density_from_orbitals(&u, &[3]), Err(Error::InvalidOccupation(_))));
    }

    #[test]
    fn idempotency_examples() {
        let pure = DensityMatrix::new(real(&[&[1.0, 0.0], &[0.0, 0.0]]), Some(1.0)).unwrap();
        assert_eq!(idempotency_defect(&pure), 0.0);
        let half = DensityMatrix::new(real(&[&[0.5, 0.0], &[0.0, 0.5]]), Some(1.0)).unwrap();
        assert!((idempotency_defect(&half) - 2f64.sqrt() * 0.25).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityMatrix::new(real(&[&[1.2, 0.0], &[0.0, 0.0]]), None),
            Err(Error::Invariant(_))
        ));
        assert!(matches!(
            DensityMatrix::new(real(&[&[1.0, 0.0], &[0.0, 0.0]]), Some(2.0)),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn generalized_density_of_empty_pairing() {
        let rho = DensityMatrix::new(real(&[&[1.0, 0.0], &[0.0, 0.0]]), None).unwrap();
        let g = assemble_generalized(&rho, &PairingTensor::zeros(2)).unwrap();
        let mut expect = CMat::zeros(4, 4);
        expect[(0, 0)] = c64(1.0, 0.0);
        expect[(3, 3)] = c64(1.0, 0.0);
        assert_eq!(g.as_matrix(), &expect);
        assert_eq!(g.vacuum_defect(), 0.0);
    }

    #[test]
    fn pairing_tensor_rejects_non_antisymmetric() {
        let mut k = CMat::zeros(2, 2);
        k[(0, 1)] = c64(0.3, 0.0);
        k[(1, 0)] = c64(0.3, 0.0);
        assert!(matches!(PairingTensor::new(k), Err(Error::Invariant(_))));
    }

    #[test]
    fn dimension_mismatch() {
        let rho = DensityMatrix::new(CMat::zeros(2, 2), None).unwrap();
        assert!(matches!(assemble_generalized(&rho, &PairingTensor::zeros(3)), Err(Error::Dimension(_))));
        assert!(matches!(qp_symmetry_defect(&CMat::zeros(3, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn identity_breaks_quasiparticle_symmetry() {
        let m = 3;
        let d = qp_symmetry_defect(&CMat::identity(2 * m, 2 * m)).unwrap();
        assert!((d - 2.0 * ((2 * m) as f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn valid_layout_has_mirror_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 4;
        let h = random::hermitian(&mut rng, m);
        let delta = random::antisymmetric(&mut rng, m);
        let big = quasiparticle_hamiltonian(h.as_matrix(), &delta, 0.3);
        assert!(qp_symmetry_defect(&big).unwrap() <= 1e-12);
        let e = eigh(&big).unwrap();
        let s = sigma_x(m);
        for i in 0..2 * m {
            assert!((e.values[i] + e.values[2 * m - 1 - i]).abs() <= 1e-10);
            let w = e.vectors.column(i).clone_owned();
            let partner = &s * w.conjugate();
            let resid = &big * &partner + partner.clone() * c64(e.values[i], 0.0);
            assert!(resid.norm() <= 1e-10);
        }
    }

    #[test]
    fn partner_map_must_be_involution() {
        let b = SPBasis::indexed(4).unwrap();
        assert!(b.clone().with_partners(vec![1, 0, 3, 2]).is_ok());
        assert!(b.clone().with_partners(vec![0, 1, 3, 2]).is_err());
        assert!(b.with_partners(vec![1, 2, 3, 0]).is_err());
    }

    #[test]
    fn bogoliubov_identity_is_unitary() {
        let w = BogoliubovTransform::identity(3);
        assert_eq!(w.unitarity_defect(), 0.0);
        let (rho, kappa) = w.vacuum_densities();
        assert_eq!(rho, CMat::zeros(3, 3));
        assert_eq!(kappa, CMat::zeros(3, 3));
    }
}
