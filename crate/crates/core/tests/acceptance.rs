//! Acceptance battery: one PASS/FAIL line per criterion, with the pinned
//! tolerance and runtime budget. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scmfkit::edf::{repartition, Direction};
use scmfkit::fock::{enumerate_basis, ground_state, one_body_density, SearchOptions, Sector, StateObservable};
use scmfkit::matrix::{eigh, frobenius, random, CMat};
use scmfkit::presets::{parse_model, BATTERY};
use scmfkit::scf::{solve_hf, solve_hfb, solve_ks, solve_ksbdg, SolverConfig};
use scmfkit::search::{
    density_observables, hk_scan, kink_scan, ks_representability_probe, phi_c_curve, phi_inner_min, two_step_min,
    ProbeOptions,
};
use scmfkit::verify::{gradient_error, GRADIENT_PRESETS};
use scmfkit::Result;

const SEED: u64 = 42;

struct Criterion {
    name: &'static str,
    tolerance: &'static str,
    budget: f64,
    run: fn() -> Result<(bool, String)>,
}

/// Closed-form `φ_c` from its three branch formulas.
fn phi_c_closed(y: f64, d: f64) -> f64 {
    if y <= -3.0 * d || y >= 3.0 * d {
        0.0
    } else if y >= 0.0 {
        (y + d).powi(3) * (y - 3.0 * d)
    } else {
        (y - d).powi(3) * (y + 3.0 * d)
    }
}

fn appendix() -> Result<(bool, String)> {
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64);
    for d in [0.5_f64, 1.0, 2.0] {
        let d4 = d.powi(4);
        let expected = [-3.0 * d, 0.0, 3.0 * d];
        let m = two_step_min(d)?;
        let value_err = (m.value + 27.0 * d4).abs() / d4;
        let at_2d = !m.points.is_empty() && m.points.iter().all(|&(_, y)| (y.abs() - 2.0 * d).abs() <= 1e-3 * d);
        let curve = phi_c_curve(d, -5.0 * d, 5.0 * d, 1001)?;
        let curve_err =
            curve.points().iter().map(|p| (p.value - phi_c_closed(p.param, d)).abs() / d4).fold(0.0, f64::max);
        let kinks = kink_scan(
            |y| phi_inner_min(y, d).map(|r| r.0).unwrap_or(f64::NAN),
            (-5.0 * d, 5.0 * d),
            1e-4 * d,
            None,
        )?
        .locations();
        if kinks.len() != 3 {
            return Ok((false, format!("d = {d}: kinks at {kinks:?}")));
        }
        let offset = kinks.iter().zip(expected).map(|(l, e)| (l - e).abs() / d).fold(0.0, f64::max);
        if value_err > 1e-10 || !at_2d || curve_err > 1e-10 || offset > 1e-3 {
            return Ok((
                false,
                format!("d = {d}: min err {value_err:.1e}, argmin {:?}, φ_c err {curve_err:.1e}, kinks {kinks:?}", m.points),
            ));
        }
        worst = (worst.0.max(value_err), worst.1.max(curve_err), worst.2.max(offset));
    }
    Ok((true, format!("min err {:.1e}·d⁴, φ_c err {:.1e}·d⁴, kink offset {:.1e}·d", worst.0, worst.1, worst.2)))
}

fn gradients() -> Result<(bool, String)> {
    let mut worst = (0.0_f64, "");
    for (label, spec, pairing) in GRADIENT_PRESETS {
        let f = parse_model(spec)?.functional(*pairing);
        let e = gradient_error(&f, *pairing, 10, SEED);
        if !(e <= worst.0) {
            worst = (e, label);
        }
    }
    Ok((worst.0 <= 1e-6, format!("{} functionals, worst {:.1e} ({})", GRADIENT_PRESETS.len(), worst.0, worst.1)))
}

fn invariants() -> Result<(bool, String)> {
    let cfg = SolverConfig::default();
    let mut failures = Vec::new();
    let mut runs = 0;
    for spec in BATTERY {
        let p = parse_model(spec)?;
        let mf = match p.hamiltonian() {
            Some(h) => solve_hf(h, p.particles, &cfg)?,
            None => solve_ks(&p.functional(false), p.particles, &cfg)?,
        };
        let pr = match p.hamiltonian() {
            Some(h) => solve_hfb(h, p.particles, &cfg)?,
            None => solve_ksbdg(&p.functional(true), p.particles, &cfg)?,
        };
        runs += 2;
        if !mf.converged || !pr.converged {
            failures.push(format!("{spec}: not converged"));
            continue;
        }
        if mf.idempotency_defect > 1e-8 || mf.commutator > 1e-7 {
            failures.push(format!("{spec}: ϱ² − ϱ {:.1e}, [h, ϱ] {:.1e}", mf.idempotency_defect, mf.commutator));
        }
        let asym = pr.spectral_asymmetry.unwrap_or(f64::INFINITY);
        if pr.idempotency_defect > 1e-8 || pr.trace_error > 1e-8 || asym > 1e-10 {
            failures.push(format!(
                "{spec}: R² − R {:.1e}, tr {:.1e}, ±ε {asym:.1e}",
                pr.idempotency_defect, pr.trace_error
            ));
        }
    }
    let ok = failures.is_empty() && BATTERY.len() >= 6;
    Ok((ok, if ok { format!("{} models, {runs} converged runs", BATTERY.len()) } else { failures.join("; ") }))
}

fn oracle_bounds() -> Result<(bool, String)> {
    let cfg = SolverConfig::default();
    let mut failures = Vec::new();
    let mut checked = 0;
    let interacting = [
        "hubbard_chain:L=2,U=4",
        "hubbard_chain:L=3,U=2,N=3",
        "hubbard_chain:L=4,U=2",
        "hubbard_chain:L=5,U=3,N=4",
        "hubbard_chain:L=6,U=4",
        "pairing:levels=2,G=0.5",
        "pairing:levels=3,G=1,N=4",
        "pairing:levels=4,G=0.5",
        "pairing:levels=4,G=1,N=2",
    ];
    for spec in interacting {
        let p = parse_model(spec)?;
        let h = p.hamiltonian().expect("Hamiltonian preset");
        let basis = Arc::new(enumerate_basis(h.orbitals(), Sector::Fixed(p.particles))?);
        let (e0, _) = ground_state(h, &basis)?;
        let hf = solve_hf(h, p.particles, &cfg)?;
        checked += 1;
        if hf.energy < e0 - 1e-9 {
            failures.push(format!("{spec}: E_HF {} < E0 {e0}", hf.energy));
        }
    }
    // Dimer ground state against (U − √(U² + 16τ²))/2.
    for (tau, u) in [(1.0_f64, 4.0_f64), (0.5, 1.0), (1.0, 0.0)] {
        let p = parse_model(&format!("hubbard_dimer:tau={tau},U={u}"))?;
        let h = p.hamiltonian().expect("Hamiltonian preset");
        let basis = Arc::new(enumerate_basis(4, Sector::Fixed(2))?);
        let (e0, _) = ground_state(h, &basis)?;
        let exact = (u - (u * u + 16.0 * tau * tau).sqrt()) / 2.0;
        checked += 1;
        if (e0 - exact).abs() > 1e-12 {
            failures.push(format!("dimer τ={tau} U={u}: E0 {e0} vs {exact}"));
        }
    }
    for spec in ["two_level", "random_one_body:M=5,N=2", "random_one_body:M=8,N=3,seed=7", "hubbard_chain:L=6,U=0"] {
        let p = parse_model(spec)?;
        let h = p.hamiltonian().expect("Hamiltonian preset");
        let ks = solve_ks(&p.functional(false), p.particles, &cfg)?;
        let e = eigh(h.t().as_matrix())?;
        let exact: f64 = e.values.iter().take(p.particles).sum();
        checked += 1;
        if (ks.energy - exact).abs() > 1e-12 {
            failures.push(format!("{spec}: E_KS {} vs Σε {exact}", ks.energy));
        }
    }
    let ok = failures.is_empty();
    Ok((ok, if ok { format!("{checked} models") } else { failures.join("; ") }))
}

fn constrained_search() -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    let presets = [
        "hubbard_dimer",
        "hubbard_chain:L=3,U=2,N=2",
        "hubbard_chain:L=4,U=2",
        "hubbard_chain:L=6,U=4",
        "pairing:levels=2,G=2",
        "pairing:levels=3,G=1,N=2",
        "pairing:levels=4,G=1",
        "pairing:levels=4,G=1,N=2",
        "two_level",
        "random_one_body:M=5,N=2",
    ];
    let opts = SearchOptions { seed: SEED, ..Default::default() };
    for spec in presets {
        let p = parse_model(spec)?;
        let h = p.hamiltonian().expect("Hamiltonian preset");
        let basis = Arc::new(enumerate_basis(h.orbitals(), Sector::Fixed(p.particles))?);
        let (e0, psi) = ground_state(h, &basis)?;
        let obs = StateObservable::Occupation(0);
        let q0 = obs.value(one_body_density(&psi)?.as_matrix())?;
        // The grid contains the ground-state value, where E^HK attains E0.
        let grid: Vec<f64> =
            [q0 - 0.2, q0 - 0.1, q0, q0 + 0.1, q0 + 0.2].into_iter().filter(|q| (0.0..=1.0).contains(q)).collect();
        let curve = hk_scan(h, &basis, &obs, &grid, &opts)?;
        match curve.min_feasible() {
            Some(m) => {
                worst = worst.max((m.value - e0).abs());
                if (m.value - e0).abs() > 1e-6 {
                    failures.push(format!("{spec}: min {} vs E0 {e0}", m.value));
                }
            }
            None => failures.push(format!("{spec}: no feasible point")),
        }
    }
    let p = parse_model("two_level")?;
    let h = p.hamiltonian().expect("Hamiltonian preset");
    let basis = Arc::new(enumerate_basis(2, Sector::Fixed(1))?);
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let line = hk_scan(h, &basis, &StateObservable::Occupation(0), &grid, &opts)?;
    let line_err = line.points().iter().map(|pt| (pt.value - (1.0 - 2.0 * pt.param)).abs()).fold(0.0, f64::max);
    if line_err > 1e-6 {
        failures.push(format!("two-level line deviates by {line_err:.1e}"));
    }
    let ok = failures.is_empty();
    let detail = if ok {
        format!("{} presets, worst |min − E0| {worst:.1e}, line err {line_err:.1e}", presets.len())
    } else {
        failures.join("; ")
    };
    Ok((ok, detail))
}

fn equivalence() -> Result<(bool, String)> {
    let cfg = SolverConfig::default();
    let f = parse_model("lattice1d:L=20,N=3")?.functional(false);
    let labels: Vec<String> = (1..=20).map(|x| format!("xi[{x}]")).collect();
    let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
    let moved = repartition(&f, &labels, Direction::ToRegular)?;
    let back = repartition(&moved, &labels, Direction::ToIrregular)?;
    let base = solve_ks(&f, 3, &cfg)?;
    let mut worst = (0.0_f64, 0.0_f64);
    let mut converged = base.converged;
    for g in [&moved, &back] {
        let r = solve_ks(g, 3, &cfg)?;
        converged &= r.converged;
        worst.0 = worst.0.max((r.energy - base.energy).abs());
        worst.1 = worst.1.max(frobenius(&(&r.rho - &base.rho)));
    }
    Ok((converged && worst.0 <= 1e-10 && worst.1 <= 1e-8, format!("ΔE {:.1e}, ‖Δϱ‖ {:.1e}", worst.0, worst.1)))
}

fn representability() -> Result<(bool, String)> {
    let opts = ProbeOptions { seed: SEED, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut slater_worst = 0.0_f64;
    for (m, n) in [(4, 2), (5, 2), (6, 3)] {
        let rho = random::slater_density(&mut rng, m, n);
        let obs = density_observables(m);
        let q: Vec<f64> = obs.iter().map(|o| o.value(&rho)).collect::<Result<_>>()?;
        let r = ks_representability_probe(&obs, &q, m, n, &opts)?;
        slater_worst = slater_worst.max(r.residual);
    }
    let p = parse_model("hubbard_dimer")?;
    let h = p.hamiltonian().expect("Hamiltonian preset");
    let basis = Arc::new(enumerate_basis(4, Sector::Fixed(2))?);
    let (_, psi) = ground_state(h, &basis)?;
    let rho: CMat = one_body_density(&psi)?.into_inner();
    let obs = density_observables(4);
    let q: Vec<f64> = obs.iter().map(|o| o.value(&rho)).collect::<Result<_>>()?;
    let r = ks_representability_probe(&obs, &q, 4, 2, &opts)?;
    let floor = r.restart_residuals.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = slater_worst <= 1e-8 && r.restart_residuals.len() == 8 && floor >= 1e-3 && !r.feasible;
    Ok((
        ok,
        format!(
            "Slater residual {slater_worst:.1e}, dimer residual floor {floor:.3e} over {} restarts",
            r.restart_residuals.len()
        ),
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "1 appendix reproduction", tolerance: "1e-10·d⁴, kinks ±1e-3·d", budget: 1.0, run: appendix },
        Criterion { name: "2 gradient consistency", tolerance: "rel 1e-6", budget: 10.0, run: gradients },
        Criterion {
            name: "3 idempotency and vacuum invariants",
            tolerance: "1e-8, [h,ϱ] 1e-7, ±ε 1e-10",
            budget: 30.0,
            run: invariants,
        },
        Criterion { name: "4 oracle bounds", tolerance: "E_HF ≥ E0 − 1e-9, E_KS 1e-12", budget: 60.0, run: oracle_bounds },
        Criterion { name: "5 constrained-search consistency", tolerance: "1e-6", budget: 120.0, run: constrained_search },
        Criterion { name: "6 equational equivalence", tolerance: "ΔE 1e-10, ‖Δϱ‖ 1e-8", budget: 10.0, run: equivalence },
        Criterion {
            name: "7 representability discrimination",
            tolerance: "feasible 1e-8, infeasible ≥ 1e-3",
            budget: 60.0,
            run: representability,
        },
    ];
    let mut all = true;
    for c in criteria {
        let t = Instant::now();
        let (passed, detail) = (c.run)().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = t.elapsed().as_secs_f64();
        let passed = passed && secs < c.budget;
        all &= passed;
        println!(
            "{} {} [tol {}; {secs:.2} s of {} s] {detail}",
            if passed { "PASS" } else { "FAIL" },
            c.name,
            c.tolerance,
            c.budget
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
