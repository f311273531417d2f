//! Can a Slater determinant reproduce given observable values?

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::StateObservable;
use crate::matrix::{c64, eigh, random, CMat};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Levenberg–Marquardt iterations per restart.
    pub max_iter: usize,
    /// Residual at or below which the target is declared reachable.
    pub feasible_tol: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { restarts: 8, seed: 42, max_iter: 500, feasible_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub feasible: bool,
    /// Best idempotent density found.
    pub rho: CMat,
    /// `‖Q[ϱ] − q‖₂` at the best restart.
    pub residual: f64,
    pub restart: usize,
    /// Final residual of every restart, in restart order.
    pub restart_residuals: Vec<f64>,
}

/// All independent real components of a hermitian `ϱ`: `Re ϱ_{kℓ}` for
/// `k ≤ ℓ` and `Im ϱ_{kℓ}` for `k < ℓ`.
pub fn density_observables(m: usize) -> Vec<StateObservable> {
    let mut v = Vec::with_capacity(m * m);
    for k in 0..m {
        for l in k..m {
            if k == l {
                v.push(StateObservable::Occupation(k));
            } else {
                v.push(StateObservable::RealElement(k, l));
                v.push(StateObservable::ImagElement(k, l));
            }
        }
    }
    v
}

/// The diagonal `ϱ_{kk}`.
pub fn occupation_observables(m: usize) -> Vec<StateObservable> {
    (0..m).map(StateObservable::Occupation).collect()
}

/// `C (C†C)^{−1/2}`.
fn polar(c: &CMat) -> Result<CMat> {
    let eig = eigh(&(c.adjoint() * c))?;
    if eig.values[0] <= 1e-14 * eig.values[eig.values.len() - 1].max(1.0) {
        return Err(Error::Invariant("orbital coefficients lost rank".into()));
    }
    let d = CMat::from_diagonal(&eig.values.iter().map(|&x| c64(1.0 / x.sqrt(), 0.0)).collect::<Vec<_>>().into());
    Ok(c * (&eig.vectors * d * eig.vectors.adjoint()))
}

struct Fit<'a> {
    ops: &'a [CMat],
    q: &'a [f64],
}

impl Fit<'_> {
    fn residual(&self, rho: &CMat) -> DVector<f64> {
        DVector::from_iterator(self.ops.len(), self.ops.iter().zip(self.q).map(|(a, q)| (a * rho).trace().re - q))
    }

    /// Jacobian of the residuals along the tangent of `ϱ = CC†` with respect
    /// to `(Re C, Im C)`, column-major in `C`.
    fn jacobian(&self, c: &CMat, rho: &CMat) -> DMatrix<f64> {
        let (m, n) = c.shape();
        let comp = CMat::identity(m, m) - rho;
        let mut j = DMatrix::zeros(self.ops.len(), 2 * m * n);
        for (row, a) in self.ops.iter().enumerate() {
            let b = c.adjoint() * a * &comp;
            for col in 0..n {
                for i in 0..m {
                    let p = col * m + i;
                    j[(row, p)] = 2.0 * b[(col, i)].re;
                    j[(row, m * n + p)] = -2.0 * b[(col, i)].im;
                }
            }
        }
        j
    }

    fn run(&self, mut c: CMat, max_iter: usize) -> Result<(f64, CMat)> {
        let (m, n) = c.shape();
        let mut rho = &c * c.adjoint();
        let mut r = self.residual(&rho);
        let mut lambda = 1e-3;
        for _ in 0..max_iter {
            if r.norm() < 1e-15 {
                break;
            }
            let j = self.jacobian(&c, &rho);
            let jt = j.transpose();
            let g = &jt * &r;
            let jtj = &jt * &j;
            let mut accepted = false;
            while lambda < 1e12 {
                let mut a = jtj.clone();
                let scale = jtj.diagonal().max().max(1e-12);
                for i in 0..a.nrows() {
                    a[(i, i)] += lambda * scale;
                }
                let Some(chol) = a.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let step = chol.solve(&g);
                let dc = CMat::from_fn(m, n, |i, k| c64(-step[k * m + i], -step[m * n + k * m + i]));
                let trial = polar(&(&c + dc))?;
                let trial_rho = &trial * trial.adjoint();
                let tr = self.residual(&trial_rho);
                if tr.norm() < r.norm() {
                    c = trial;
                    rho = trial_rho;
                    r = tr;
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !accepted {
                break;
            }
        }
        Ok((r.norm(), rho))
    }
}

/// Minimizes `‖Q[ϱ(C)] − q‖₂` over orthonormal `M × N` orbital matrices from
/// several seeded starts (Levenberg–Marquardt steps followed by polar
/// projection back onto orthonormal columns).
pub fn ks_representability_probe(
    q_spec: &[StateObservable],
    q_target: &[f64],
    m: usize,
    n: usize,
    opts: &ProbeOptions,
) -> Result<ProbeResult> {
    if q_spec.len() != q_target.len() {
        return Err(Error::Dimension(format!("{} observables but {} targets", q_spec.len(), q_target.len())));
    }
    if q_target.iter().any(|q| !q.is_finite()) {
        return Err(Error::Domain("probe targets must be finite".into()));
    }
    if n == 0 || n > m || opts.restarts == 0 {
        return Err(Error::InvalidOccupation(format!("probe needs 0 < N ≤ M and a restart, got N = {n}, M = {m}")));
    }
    let ops = q_spec.iter().map(|o| o.operator_matrix(m)).collect::<Result<Vec<_>>>()?;
    let fit = Fit { ops: &ops, q: q_target };
    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let c0 = polar(&random::gaussian_matrix(&mut rng, m, n))?;
            fit.run(c0, opts.max_iter)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.0 < runs[best].0 {
            best = i;
        }
    }
    let residual = runs[best].0;
    Ok(ProbeResult {
        feasible: residual <= opts.feasible_tol,
        rho: runs[best].1.clone(),
        residual,
        restart: best,
        restart_residuals: runs.iter().map(|r| r.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{enumerate_basis, ground_state, one_body_density, Sector, TwoBodyHamiltonian};
    use crate::matrix::projector_defect;
    use std::sync::Arc;

    fn targets(obs: &[StateObservable], rho: &CMat) -> Vec<f64> {
        obs.iter().map(|o| o.value(rho).unwrap()).collect()
    }

    #[test]
    fn slater_target_is_reached() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random::slater_density(&mut rng, 5, 2);
        let obs = density_observables(5);
        let res = ks_representability_probe(&obs, &targets(&obs, &rho), 5, 2, &ProbeOptions::default()).unwrap();
        assert!(res.feasible && res.residual <= 1e-8, "{}", res.residual);
        assert!(projector_defect(&res.rho) < 1e-12);
    }

    #[test]
    fn correlated_density_is_not_reachable() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 4.0).unwrap();
        let basis = Arc::new(enumerate_basis(4, Sector::Fixed(2)).unwrap());
        let (_, psi) = ground_state(&h, &basis).unwrap();
        let rho = one_body_density(&psi).unwrap().into_inner();
        let obs = density_observables(4);
        let res = ks_representability_probe(&obs, &targets(&obs, &rho), 4, 2, &ProbeOptions::default()).unwrap();
        assert!(!res.feasible);
        assert!(res.restart_residuals.iter().all(|&r| r >= 1e-3));

        let obs = occupation_observables(4);
        let res = ks_representability_probe(&obs, &targets(&obs, &rho), 4, 2, &ProbeOptions::default()).unwrap();
        assert!(res.feasible, "{}", res.residual);
    }
}
