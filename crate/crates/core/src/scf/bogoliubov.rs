//! HFB and KSBdG iteration with a chemical-potential search.

use crate::edf::{hfb_from_hamiltonian, ksbdg_fields, KSFunctional};
use crate::error::{Error, Result};
use crate::fock::TwoBodyHamiltonian;
use crate::matrix::{
    commutator_norm, eigh, frobenius, generalized_matrix, projector_defect, quasiparticle_hamiltonian,
    c64, BogoliubovTransform, CMat,
};
use crate::optimize::bisect;
use crate::scf::condensate::condensate_amplitude;
use crate::scf::config::{InitialGuess, SolverConfig, SolverReport, Warning};
use crate::scf::mean_field::initial_density;

const DEGENERACY_TOL: f64 = 1e-9;

/// Quasiparticle vacuum of `H(h, Δ, μ)`.
struct Vacuum {
    rho: CMat,
    kappa: CMat,
    u: CMat,
    v: CMat,
}

fn vacuum(h: &CMat, delta: &CMat, mu: f64) -> Result<Vacuum> {
    let m = h.nrows();
    let hqp = quasiparticle_hamiltonian(h, delta, mu);
    let eig = eigh(&hqp)?;
    // The upper half of the spectrum (ε ≥ 0) holds the columns (U; V).
    let u = eig.vectors.view((0, m), (m, m)).clone_owned();
    let v = eig.vectors.view((m, m), (m, m)).clone_owned();
    let vc = v.conjugate();
    let rho = &vc * v.transpose();
    let kappa = &vc * u.transpose();
    Ok(Vacuum { rho: (&rho + rho.adjoint()) * c64(0.5, 0.0), kappa: (&kappa - kappa.transpose()) * c64(0.5, 0.0), u, v })
}

/// Finds μ with `tr ϱ(μ) = n` by bisection.
fn solve_mu(h: &CMat, delta: &CMat, n: usize, cfg: &SolverConfig) -> Result<(f64, Vacuum)> {
    let eig = eigh(h)?;
    let lo = eig.values[0] - cfg.mu_padding;
    let hi = eig.values[eig.values.len() - 1] + cfg.mu_padding;
    let target = n as f64;
    let count = |mu: f64| vacuum(h, delta, mu).map(|v| v.rho.trace().re);
    let (n_lo, n_hi) = (count(lo)?, count(hi)?);
    if !(n_lo <= target + cfg.trace_tol && n_hi >= target - cfg.trace_tol) {
        let trace = (0..=20)
            .map(|i| {
                let mu = lo + (hi - lo) * i as f64 / 20.0;
                (mu, count(mu).unwrap_or(f64::NAN))
            })
            .collect();
        return Err(Error::Bracket {
            message: format!("N(μ) over [{lo:.6}, {hi:.6}] spans [{n_lo:.6}, {n_hi:.6}], target {target}"),
            trace,
        });
    }
    let mut best = (f64::INFINITY, lo);
    let mu = bisect(
        |mu| {
            let d = count(mu).unwrap_or(f64::NAN) - target;
            if d.abs() < best.0 {
                best = (d.abs(), mu);
            }
            if d.abs() <= 0.01 * cfg.trace_tol {
                0.0
            } else {
                d
            }
        },
        lo,
        hi,
        1e-15 * (1.0 + hi.abs().max(lo.abs())),
        200,
    );
    let mu = if (count(mu)? - target).abs() <= best.0 { mu } else { best.1 };
    Ok((mu, vacuum(h, delta, mu)?))
}

fn seed_pairs(m: usize, pairs: &[(usize, usize)], value: f64) -> CMat {
    let mut kappa = CMat::zeros(m, m);
    for &(k, l) in pairs {
        kappa[(k, l)] += c64(value, 0.0);
        kappa[(l, k)] -= c64(value, 0.0);
    }
    kappa
}

fn solve_pairing(
    f: &KSFunctional,
    n: usize,
    cfg: &SolverConfig,
    pairs: &[(usize, usize)],
    auxiliary: bool,
) -> Result<SolverReport> {
    cfg.validate()?;
    let m = f.orbitals();
    if n > m {
        return Err(Error::InvalidOccupation(format!("N = {n} exceeds M = {m}")));
    }
    let mut rho = initial_density(f, n, &cfg.initial)?;
    let mut kappa = match &cfg.initial {
        InitialGuess::Provided { kappa: Some(k), .. } => {
            if k.nrows() != m || k.ncols() != m {
                return Err(Error::Dimension(format!("initial pairing tensor must be {m}x{m}")));
            }
            k.clone()
        }
        _ => seed_pairs(m, pairs, cfg.pair_seed),
    };

    let mut warnings = Vec::new();
    let mut history = Vec::new();
    let mut converged = false;
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    let mut last: Option<(f64, Vacuum)> = None;

    for it in 1..=cfg.max_iter {
        iterations = it;
        let fields = ksbdg_fields(f, &rho, &kappa)?;
        let (mu, vac) = solve_mu(fields.h.as_matrix(), &fields.delta, n, cfg)?;
        change = (frobenius(&(&vac.rho - &rho)).powi(2) + frobenius(&(&vac.kappa - &kappa)).powi(2)).sqrt();
        let e = f.energy(&vac.rho, &vac.kappa);
        let diverged = history.last().map(|&p: &f64| !e.is_finite() || (e - p).abs() > cfg.divergence_limit);
        if diverged == Some(true) {
            warnings.push(Warning::Diverged { iteration: it, energy_change: e - history.last().unwrap() });
            last = Some((mu, vac));
            break;
        }
        history.push(e);
        if change <= cfg.density_tol {
            converged = true;
            last = Some((mu, vac));
            break;
        }
        rho = &rho * c64(1.0 - cfg.mixing, 0.0) + &vac.rho * c64(cfg.mixing, 0.0);
        kappa = &kappa * c64(1.0 - cfg.mixing, 0.0) + &vac.kappa * c64(cfg.mixing, 0.0);
        last = Some((mu, vac));
    }
    if !converged && !warnings.iter().any(|w| matches!(w, Warning::Diverged { .. })) {
        warnings.push(Warning::NotConverged { iterations, density_change: change });
    }

    let (mu, vac) = last.expect("at least one iteration");
    let r = generalized_matrix(&vac.rho, &vac.kappa);
    let fields = ksbdg_fields(f, &vac.rho, &vac.kappa)?;
    let hqp_final = quasiparticle_hamiltonian(fields.h.as_matrix(), &fields.delta, mu);
    let qp = eigh(&hqp_final)?.values;
    let asym = (0..2 * m).fold(0.0_f64, |a, i| a.max((qp[i] + qp[2 * m - 1 - i]).abs()));
    let min_qp = qp[m];
    if min_qp.abs() < DEGENERACY_TOL {
        warnings.push(Warning::DegenerateFermiLevel { gap: min_qp });
    }
    let trace_error = (vac.rho.trace().re - n as f64).abs();
    if trace_error > cfg.trace_tol {
        warnings.push(Warning::ParticleNumber { error: trace_error });
    }
    let w = BogoliubovTransform::new(vac.u.clone(), vac.v.clone())
        .unwrap_or_else(|_| BogoliubovTransform::identity(m));
    let condensate = condensate_amplitude(&w).ok();
    Ok(SolverReport {
        converged,
        energy: fields.energy,
        idempotency_defect: projector_defect(&r),
        trace_error,
        commutator: commutator_norm(&hqp_final, &r),
        rho: vac.rho.clone(),
        kappa: Some(vac.kappa.clone()),
        r: Some(r),
        mu: Some(mu),
        spectrum: qp[m..].to_vec(),
        qp_spectrum: Some(qp),
        orbitals: w.w(),
        iterations,
        density_change: change,
        spectral_asymmetry: Some(asym),
        q: fields.q,
        lambda: fields.lambda,
        condensate,
        kappa_auxiliary: auxiliary,
        warnings,
        energy_history: history,
    })
}

/// Hartree–Fock–Bogoliubov for average particle number `N`. The initial κ is
/// seeded on the pair partners of the single-particle basis (or on
/// consecutive orbitals when the basis has none).
pub fn solve_hfb(h: &TwoBodyHamiltonian, n: usize, cfg: &SolverConfig) -> Result<SolverReport> {
    let mut pairs = h.sp_basis().partner_pairs();
    if pairs.is_empty() {
        pairs = (0..h.orbitals() / 2).map(|p| (2 * p, 2 * p + 1)).collect();
    }
    solve_pairing(&hfb_from_hamiltonian(h), n, cfg, &pairs, false)
}

/// KSBdG iteration; the initial κ is seeded on all consecutive orbital pairs.
pub fn solve_ksbdg(f: &KSFunctional, n: usize, cfg: &SolverConfig) -> Result<SolverReport> {
    let m = f.orbitals();
    let pairs: Vec<_> = (0..m.saturating_sub(1)).map(|k| (k, k + 1)).collect();
    solve_pairing(f, n, cfg, &pairs, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scf::solve_hf;

    #[test]
    fn zero_coupling_reduces_to_hf() {
        let h = TwoBodyHamiltonian::pairing(3, 1.0, 0.0).unwrap();
        let hfb = solve_hfb(&h, 2, &SolverConfig::default()).unwrap();
        let hf = solve_hf(&h, 2, &SolverConfig::default()).unwrap();
        assert!(hfb.converged);
        assert!((hfb.energy - hf.energy).abs() < 1e-10);
        assert!(frobenius(hfb.kappa.as_ref().unwrap()) < 1e-10);
        assert!(frobenius(&(&hfb.rho - &hf.rho)) < 1e-8);
    }

    #[test]
    fn pairing_model_has_gap_and_vacuum_invariants() {
        let h = TwoBodyHamiltonian::pairing(2, 1.0, 2.0).unwrap();
        let rep = solve_hfb(&h, 2, &SolverConfig::default()).unwrap();
        assert!(rep.converged, "{:?}", rep.warnings);
        assert!(frobenius(rep.kappa.as_ref().unwrap()) > 1e-3);
        assert!(rep.idempotency_defect <= 1e-8);
        assert!(rep.trace_error <= 1e-8);
        assert!(rep.spectral_asymmetry.unwrap() <= 1e-10);
    }
}
