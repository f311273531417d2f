//! Levy constrained search `E^HK[q] = min_{Ψ→q} ⟨Ψ|H|Ψ⟩` by a quadratic penalty.
//!
//! Each restart minimizes `⟨H⟩ + μ Σ_A (Q^A[Ψ] − q^A)²` on the unit sphere with
//! Polak–Ribière conjugate gradients along great circles. Every observable is a
//! hermitian one-body operator, so the objective along a great circle is a
//! trigonometric polynomial that is minimized essentially exactly.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::fock::hamiltonian::{hamiltonian_operator, one_body_operator, SparseOperator, TwoBodyHamiltonian};
use crate::fock::state::ManyBodyState;
use crate::matrix::{c64, random, CMat, CVec};
use crate::optimize::brent_min;

/// A real observable linear in the one-body density.
#[derive(Debug, Clone, PartialEq)]
pub enum StateObservable {
    /// `ϱ_{kk}`.
    Occupation(usize),
    /// `Re ϱ_{kℓ}`.
    RealElement(usize, usize),
    /// `Im ϱ_{kℓ}`.
    ImagElement(usize, usize),
    /// `tr ϱ`.
    Trace,
    /// `tr(Aϱ)` for a hermitian `A`, i.e. `⟨Σ A_{kℓ} a†_k a_ℓ⟩`.
    OneBody { label: String, matrix: CMat },
}

impl StateObservable {
    pub fn label(&self) -> String {
        match self {
            Self::Occupation(k) => format!("rho[{},{}]", k + 1, k + 1),
            Self::RealElement(k, l) => format!("re rho[{},{}]", k + 1, l + 1),
            Self::ImagElement(k, l) => format!("im rho[{},{}]", k + 1, l + 1),
            Self::Trace => "tr rho".into(),
            Self::OneBody { label, .. } => label.clone(),
        }
    }

    /// Matrix `A` with `Q = tr(Aϱ)`.
    pub fn operator_matrix(&self, m: usize) -> Result<CMat> {
        let check = |k: usize| {
            if k < m {
                Ok(())
            } else {
                Err(Error::Dimension(format!("orbital index {k} out of range for M = {m}")))
            }
        };
        let mut a = CMat::zeros(m, m);
        match self {
            Self::Occupation(k) => {
                check(*k)?;
                a[(*k, *k)] = c64(1.0, 0.0);
            }
            // ϱ_{kℓ} = ⟨a†_ℓ a_k⟩, so Re ϱ_{kℓ} = ½⟨a†_ℓ a_k + a†_k a_ℓ⟩.
            Self::RealElement(k, l) => {
                check(*k)?;
                check(*l)?;
                a[(*l, *k)] += c64(0.5, 0.0);
                a[(*k, *l)] += c64(0.5, 0.0);
            }
            Self::ImagElement(k, l) => {
                check(*k)?;
                check(*l)?;
                a[(*l, *k)] += c64(0.0, -0.5);
                a[(*k, *l)] += c64(0.0, 0.5);
            }
            Self::Trace => a = CMat::identity(m, m),
            Self::OneBody { matrix, .. } => {
                if matrix.nrows() != m || matrix.ncols() != m {
                    return Err(Error::Dimension(format!("observable matrix must be {m}x{m}")));
                }
                a = matrix.clone();
            }
        }
        Ok(a)
    }

    /// Value on a density matrix.
    pub fn value(&self, rho: &CMat) -> Result<f64> {
        let a = self.operator_matrix(rho.nrows())?;
        Ok((a * rho).trace().re)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Penalty strengths, applied in order with warm starts.
    pub penalties: Vec<f64>,
    pub restarts: usize,
    pub seed: u64,
    /// Conjugate-gradient iterations per penalty level.
    pub max_iter: usize,
    /// Stop a level once the Riemannian gradient norm falls below this.
    pub grad_tol: f64,
    /// Constraint residual above which the target is declared not representable.
    pub residual_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            penalties: vec![1e1, 1e2, 1e3, 1e4, 1e5, 1e6],
            restarts: 8,
            seed: 42,
            max_iter: 3000,
            grad_tol: 1e-10,
            residual_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// `⟨H⟩ + 2μ Σ r_A²`, the first-order estimate of `E^HK` at the target.
    pub energy: f64,
    /// `⟨Ψ_min|H|Ψ_min⟩`.
    pub expectation: f64,
    pub state: ManyBodyState,
    /// `Q[Ψ_min]`.
    pub achieved: Vec<f64>,
    /// `‖Q[Ψ_min] − q‖∞`.
    pub residual: f64,
    /// Final penalty strength.
    pub penalty: f64,
    /// Index of the winning restart.
    pub restart: usize,
}

struct Problem {
    h: SparseOperator,
    g: Vec<SparseOperator>,
    q: Vec<f64>,
}

struct Point {
    psi: CVec,
    hpsi: CVec,
    gpsi: Vec<CVec>,
    e: f64,
    qv: Vec<f64>,
}

impl Problem {
    fn point(&self, psi: CVec) -> Point {
        let hpsi = self.h.apply(&psi);
        let e = psi.dotc(&hpsi).re;
        let gpsi: Vec<CVec> = self.g.iter().map(|g| g.apply(&psi)).collect();
        let qv = gpsi.iter().map(|gp| psi.dotc(gp).re).collect();
        Point { psi, hpsi, gpsi, e, qv }
    }

    fn objective(&self, p: &Point, mu: f64) -> f64 {
        p.e + mu * p.qv.iter().zip(&self.q).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
    }

    /// Euclidean gradient `g` with `df = 2 Re⟨dΨ|g⟩`.
    fn gradient(&self, p: &Point, mu: f64) -> CVec {
        let mut g = p.hpsi.clone();
        for ((gp, qa), qt) in p.gpsi.iter().zip(&p.qv).zip(&self.q) {
            g.axpy(c64(2.0 * mu * (qa - qt), 0.0), gp, c64(1.0, 0.0));
        }
        g
    }

    fn minimize_level(&self, mut p: Point, mu: f64, max_iter: usize, grad_tol: f64) -> Point {
        let mut dir: Option<CVec> = None;
        let mut prev_grad: Option<CVec> = None;
        let mut f = self.objective(&p, mu);
        let mut stalls = 0;
        for _ in 0..max_iter {
            let g = self.gradient(&p, mu);
            let gr = &g - &p.psi * p.psi.dotc(&g);
            let gnorm = gr.norm();
            if gnorm <= grad_tol {
                break;
            }
            let mut d = -gr.clone();
            if let (Some(dp), Some(gp)) = (&dir, &prev_grad) {
                let beta = (gr.dotc(&(&gr - gp)).re / gp.norm_squared()).max(0.0);
                let transported = dp - &p.psi * p.psi.dotc(dp);
                d += transported * c64(beta, 0.0);
                if d.dotc(&gr).re >= 0.0 {
                    d = -gr.clone();
                }
            }
            let dn = d.norm();
            if !(dn > 0.0 && dn.is_finite()) {
                break;
            }
            let x = &d / c64(dn, 0.0);
            let Some((theta, f_new)) = self.great_circle_min(&p, &x, mu) else { break };
            if f_new >= f {
                stalls += 1;
                dir = None;
                prev_grad = None;
                if stalls > 2 {
                    break;
                }
                continue;
            }
            stalls = 0;
            let (s, c) = theta.sin_cos();
            let psi = (&p.psi * c64(c, 0.0) + &x * c64(s, 0.0)).normalize();
            let rel = (f - f_new) / (1.0 + f.abs());
            p = self.point(psi);
            f = self.objective(&p, mu);
            dir = Some(d);
            prev_grad = Some(gr);
            if rel < 1e-16 {
                break;
            }
        }
        p
    }

    /// Minimizes the objective along `cos θ Ψ + sin θ X`, `θ ∈ [0, π)`.
    fn great_circle_min(&self, p: &Point, x: &CVec, mu: f64) -> Option<(f64, f64)> {
        let hx = self.h.apply(x);
        let h_xx = x.dotc(&hx).re;
        let h_xp = x.dotc(&p.hpsi).re;
        let mut coeffs = Vec::with_capacity(self.g.len());
        for (gi, (gp, qa)) in self.g.iter().zip(p.gpsi.iter().zip(&p.qv)) {
            let gx = gi.apply(x);
            coeffs.push((*qa, x.dotc(&gx).re, x.dotc(gp).re));
        }
        let f = |theta: f64| -> f64 {
            let (s, c) = theta.sin_cos();
            let e = c * c * p.e + s * s * h_xx + 2.0 * s * c * h_xp;
            let pen: f64 = coeffs
                .iter()
                .zip(&self.q)
                .map(|(&(a, b, cc), qt)| (c * c * a + s * s * b + 2.0 * s * c * cc - qt).powi(2))
                .sum();
            e + mu * pen
        };
        let f0 = f(0.0);
        // Coarse scan, finer near θ = 0 where small steps live at large μ.
        let mut grid: Vec<f64> = (1..=40).map(|i| 1e-8 * 10f64.powf(i as f64 * 0.2)).collect();
        grid.extend((1..256).map(|i| std::f64::consts::PI * i as f64 / 256.0));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let mut best = (0usize, f64::INFINITY);
        for (i, &t) in grid.iter().enumerate() {
            let v = f(t);
            if v < best.1 {
                best = (i, v);
            }
        }
        if !(best.1 < f0) {
            return None;
        }
        let lo = if best.0 == 0 { 0.0 } else { grid[best.0 - 1] };
        let hi = if best.0 + 1 < grid.len() { grid[best.0 + 1] } else { std::f64::consts::PI };
        let (t, v) = brent_min(&f, lo, hi, 1e-14, 200);
        if v <= best.1 {
            Some((t, v))
        } else {
            Some((grid[best.0], best.1))
        }
    }
}

/// Runs the penalty search and returns the best restart regardless of the
/// final residual.
pub fn constrained_search_raw(
    h: &TwoBodyHamiltonian,
    basis: &Arc<FockBasis>,
    q_spec: &[StateObservable],
    q_target: &[f64],
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if q_spec.len() != q_target.len() {
        return Err(Error::Dimension(format!(
            "{} observables but {} target values",
            q_spec.len(),
            q_target.len()
        )));
    }
    if q_target.iter().any(|q| !q.is_finite()) {
        return Err(Error::Domain("constraint targets must be finite".into()));
    }
    if opts.penalties.is_empty() || opts.restarts == 0 {
        return Err(Error::Config("search needs at least one penalty level and one restart".into()));
    }
    let m = h.orbitals();
    let hop = hamiltonian_operator(h, basis)?;
    let g = q_spec
        .iter()
        .map(|o| one_body_operator(&o.operator_matrix(m)?, basis))
        .collect::<Result<Vec<_>>>()?;
    let problem = Problem { h: hop, g, q: q_target.to_vec() };
    let mu_final = *opts.penalties.last().unwrap();

    let runs: Vec<Point> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let psi = random::gaussian_matrix(&mut rng, basis.dim(), 1).column(0).normalize();
            let mut p = problem.point(psi);
            for &mu in &opts.penalties {
                p = problem.minimize_level(p, mu, opts.max_iter, opts.grad_tol);
            }
            p
        })
        .collect();

    let mut best = 0;
    let mut best_f = f64::INFINITY;
    for (i, p) in runs.iter().enumerate() {
        let f = problem.objective(p, mu_final);
        if f < best_f {
            best = i;
            best_f = f;
        }
    }
    let p = &runs[best];
    let residual = p.qv.iter().zip(q_target).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
    let sq: f64 = p.qv.iter().zip(q_target).map(|(x, y)| (x - y).powi(2)).sum();
    Ok(SearchResult {
        energy: p.e + 2.0 * mu_final * sq,
        expectation: p.e,
        state: ManyBodyState::new(basis.clone(), p.psi.clone())?,
        achieved: p.qv.clone(),
        residual,
        penalty: mu_final,
        restart: best,
    })
}

/// Constrained search; fails with `NotRepresentable` when the best restart
/// misses the target by more than `opts.residual_tol`.
pub fn constrained_search(
    h: &TwoBodyHamiltonian,
    basis: &Arc<FockBasis>,
    q_spec: &[StateObservable],
    q_target: &[f64],
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let res = constrained_search_raw(h, basis, q_spec, q_target, opts)?;
    if res.residual > opts.residual_tol {
        return Err(Error::NotRepresentable { residual: res.residual });
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::{enumerate_basis, Sector};
    use crate::fock::state::{ground_state, one_body_density};
    use crate::matrix::{HermitianMatrix, SPBasis};

    fn quick() -> SearchOptions {
        SearchOptions { restarts: 3, ..Default::default() }
    }

    #[test]
    fn observables_match_density() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 4.0).unwrap();
        let basis = Arc::new(enumerate_basis(4, Sector::Fixed(2)).unwrap());
        let (_, psi) = ground_state(&h, &basis).unwrap();
        let rho = one_body_density(&psi).unwrap().into_inner();
        for obs in [StateObservable::Occupation(1), StateObservable::RealElement(0, 2), StateObservable::Trace] {
            let a = obs.operator_matrix(4).unwrap();
            let op = one_body_operator(&a, &basis).unwrap();
            let direct = op.expectation(psi.amplitudes());
            assert!((direct - obs.value(&rho).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn target_at_ground_state_recovers_e0() {
        let h = TwoBodyHamiltonian::pairing(2, 1.0, 0.5).unwrap();
        let basis = Arc::new(enumerate_basis(4, Sector::Fixed(2)).unwrap());
        let (e0, psi) = ground_state(&h, &basis).unwrap();
        let q = StateObservable::Occupation(0);
        let q0 = q.value(&one_body_density(&psi).unwrap().into_inner()).unwrap();
        let res = constrained_search(&h, &basis, &[q], &[q0], &quick()).unwrap();
        assert!((res.energy - e0).abs() < 1e-7, "{} vs {e0}", res.energy);
    }

    #[test]
    fn wrong_trace_is_not_representable() {
        let h = TwoBodyHamiltonian::pairing(2, 1.0, 0.5).unwrap();
        let basis = Arc::new(enumerate_basis(4, Sector::Fixed(2)).unwrap());
        let err = constrained_search(&h, &basis, &[StateObservable::Trace], &[1.5], &quick()).unwrap_err();
        assert!(matches!(err, Error::NotRepresentable { .. }));
    }

    #[test]
    fn two_level_linear_curve() {
        let h = TwoBodyHamiltonian::one_body(
            SPBasis::indexed(2).unwrap(),
            HermitianMatrix::from_real_diagonal(&[-1.0, 1.0]),
        )
        .unwrap();
        let basis = Arc::new(enumerate_basis(2, Sector::Fixed(1)).unwrap());
        for q in [0.0, 0.3, 0.75, 1.0] {
            let res = constrained_search(&h, &basis, &[StateObservable::Occupation(0)], &[q], &quick()).unwrap();
            assert!((res.energy - (1.0 - 2.0 * q)).abs() < 1e-6, "q={q}: {}", res.energy);
        }
    }

    #[test]
    fn deterministic() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 4.0).unwrap();
        let basis = Arc::new(enumerate_basis(4, Sector::Fixed(2)).unwrap());
        let q = [StateObservable::Occupation(0)];
        let a = constrained_search(&h, &basis, &q, &[0.3], &quick()).unwrap();
        let b = constrained_search(&h, &basis, &q, &[0.3], &quick()).unwrap();
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.state, b.state);
    }
}
