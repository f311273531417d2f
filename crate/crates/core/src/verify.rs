//! Invariant suite over the preset battery, reported as pass/fail rows.

use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::edf::{fd_gradient_check, repartition, Direction, KSFunctional};
use crate::error::Result;
use crate::fock::{enumerate_basis, ground_state, SearchOptions, Sector, StateObservable};
use crate::matrix::{c64, eigh, frobenius, random, CMat};
use crate::presets::{parse_model, BATTERY};
use crate::scf::{solve_hf, solve_hfb, solve_ks, solve_ksbdg, SolverConfig, SolverReport};
use crate::search::{
    density_observables, hk_scan, kink_scan, ks_representability_probe, phi_inner_min, two_step_min, ProbeOptions,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Functionals for the finite-difference check: `(label, model, pairing)`.
pub const GRADIENT_PRESETS: &[(&str, &str, bool)] = &[
    ("hf", "hubbard_chain:L=3,U=4", false),
    ("hfb", "pairing:levels=3,G=0.7", true),
    ("hfb-hubbard", "hubbard_chain:L=2,U=3", true),
    ("ks-occupations", "hubbard_chain:L=3,U=4,functional=occupations", false),
    ("ks-lattice", "lattice1d:L=8,N=3", false),
    ("ks-lattice-kinetic", "lattice1d:L=8,N=3,partition=kinetic", false),
    ("ksbdg-lattice-direct", "lattice1d:L=6,N=2,pairing=direct,g=1.5", true),
    ("ksbdg-lattice-principal", "lattice1d:L=6,N=2,pairing=principal,g=1.5", true),
];

/// Largest relative finite-difference error over `points` seeded random
/// `(ϱ, κ)` with occupations in `[0.05, 0.95]`.
pub fn gradient_error(f: &KSFunctional, pairing: bool, points: usize, seed: u64) -> f64 {
    let m = f.orbitals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..points)
        .map(|_| {
            let rho = random::density(&mut rng, m, 0.05, 0.95);
            let kappa =
                if pairing { random::antisymmetric(&mut rng, m) * c64(0.2, 0.0) } else { CMat::zeros(m, m) };
            let r = fd_gradient_check(f, &rho, &kappa, 1e-5);
            if r.singular {
                f64::INFINITY
            } else {
                r.max_rel_error
            }
        })
        .fold(0.0, f64::max)
}

/// Converged-solution invariants; `None` when they all hold.
pub fn solution_defects(rep: &SolverReport) -> Option<String> {
    let mut bad = Vec::new();
    if !rep.converged {
        bad.push(format!("not converged ({})", rep.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("; ")));
    }
    if rep.idempotency_defect > 1e-8 {
        bad.push(format!("idempotency {:.2e}", rep.idempotency_defect));
    }
    if rep.trace_error > 1e-8 {
        bad.push(format!("trace {:.2e}", rep.trace_error));
    }
    match rep.spectral_asymmetry {
        Some(a) if a > 1e-10 => bad.push(format!("±ε asymmetry {a:.2e}")),
        None if rep.commutator > 1e-7 => bad.push(format!("[h, ϱ] {:.2e}", rep.commutator)),
        _ => {}
    }
    if bad.is_empty() {
        None
    } else {
        Some(bad.join(", "))
    }
}

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckOutcome {
    let t = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckOutcome { name: name.to_string(), passed, detail, seconds: t.elapsed().as_secs_f64() }
}

/// Runs every check; `seed` drives all random points and restarts.
pub fn run_checks(seed: u64) -> Vec<CheckOutcome> {
    let cfg = SolverConfig::default();
    let mut out = Vec::new();

    out.push(timed("matrix: eigendecomposition reconstructs", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::hermitian(&mut rng, 8).into_inner();
        let e = eigh(&a)?;
        let d = CMat::from_diagonal(&e.values.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>().into());
        let err = frobenius(&(&e.vectors * d * e.vectors.adjoint() - &a));
        Ok((err <= 1e-12, format!("residual {err:.2e}")))
    }));

    for (label, spec, pairing) in GRADIENT_PRESETS {
        out.push(timed(&format!("gradient: {label}"), || {
            let f = parse_model(spec)?.functional(*pairing);
            let err = gradient_error(&f, *pairing, 10, seed);
            Ok((err <= 1e-6, format!("max relative error {err:.2e}")))
        }));
    }

    for spec in BATTERY {
        out.push(timed(&format!("mean field: {spec}"), || {
            let p = parse_model(spec)?;
            let rep = match p.hamiltonian() {
                Some(h) => solve_hf(h, p.particles, &cfg)?,
                None => solve_ks(&p.functional(false), p.particles, &cfg)?,
            };
            if let Some(h) = p.hamiltonian() {
                let basis = Arc::new(enumerate_basis(h.orbitals(), Sector::Fixed(p.particles))?);
                let (e0, _) = ground_state(h, &basis)?;
                if rep.energy < e0 - 1e-9 {
                    return Ok((false, format!("E = {} below E0 = {e0}", rep.energy)));
                }
            }
            let defects = solution_defects(&rep);
            Ok((defects.is_none(), defects.unwrap_or_else(|| format!("E = {:.12}", rep.energy))))
        }));
        out.push(timed(&format!("pairing: {spec}"), || {
            let p = parse_model(spec)?;
            let rep = match p.hamiltonian() {
                Some(h) => solve_hfb(h, p.particles, &cfg)?,
                None => solve_ksbdg(&p.functional(true), p.particles, &cfg)?,
            };
            let defects = solution_defects(&rep);
            Ok((defects.is_none(), defects.unwrap_or_else(|| format!("E = {:.12}", rep.energy))))
        }));
    }

    out.push(timed("repartition: lattice1d", || {
        let f = parse_model("lattice1d:L=20,N=3")?.functional(false);
        let xi: Vec<String> = (1..=20).map(|x| format!("xi[{x}]")).collect();
        let xi: Vec<&str> = xi.iter().map(String::as_str).collect();
        let g = repartition(&f, &xi, Direction::ToRegular)?;
        let h = repartition(&g, &xi, Direction::ToIrregular)?;
        let base = solve_ks(&f, 3, &cfg)?;
        let mut worst = (0.0_f64, 0.0_f64);
        for other in [&g, &h] {
            let r = solve_ks(other, 3, &cfg)?;
            worst.0 = worst.0.max((r.energy - base.energy).abs());
            worst.1 = worst.1.max(frobenius(&(&r.rho - &base.rho)));
        }
        Ok((worst.0 <= 1e-10 && worst.1 <= 1e-8, format!("ΔE {:.2e}, Δϱ {:.2e}", worst.0, worst.1)))
    }));

    out.push(timed("appendix: two-step minimum and kinks", || {
        let mut ok = true;
        for d in [0.5_f64, 1.0, 2.0] {
            let m = two_step_min(d)?;
            ok &= (m.value + 27.0 * d.powi(4)).abs() <= 1e-10 * d.powi(4);
            let k = kink_scan(|y| phi_inner_min(y, d).map(|r| r.0).unwrap_or(f64::NAN), (-5.0 * d, 5.0 * d), 1e-4 * d, None)?;
            let locs = k.locations();
            ok &= locs.len() == 3 && locs.iter().zip([-3.0 * d, 0.0, 3.0 * d]).all(|(l, e)| (l - e).abs() <= 1e-3 * d);
        }
        Ok((ok, "d ∈ {0.5, 1, 2}".into()))
    }));

    out.push(timed("constrained search: two-level line", || {
        let p = parse_model("two_level")?;
        let h = p.hamiltonian().expect("Hamiltonian preset");
        let basis = Arc::new(enumerate_basis(2, Sector::Fixed(1))?);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let opts = SearchOptions { seed, ..Default::default() };
        let c = hk_scan(h, &basis, &StateObservable::Occupation(0), &grid, &opts)?;
        let err = c.points().iter().map(|p| (p.value - (1.0 - 2.0 * p.param)).abs()).fold(0.0, f64::max);
        Ok((err <= 1e-6, format!("max deviation {err:.2e}")))
    }));

    out.push(timed("probe: Slater target feasible", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::slater_density(&mut rng, 4, 2);
        let obs = density_observables(4);
        let q: Vec<f64> = obs.iter().map(|o| o.value(&rho)).collect::<Result<_>>()?;
        let r = ks_representability_probe(&obs, &q, 4, 2, &ProbeOptions { seed, ..Default::default() })?;
        Ok((r.residual <= 1e-8, format!("residual {:.2e}", r.residual)))
    }));

    out
}
