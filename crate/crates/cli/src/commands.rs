//! Subcommand implementations. Each returns a document and whether the run
//! succeeded in the physical sense (converged, feasible, all checks passed).

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scmfkit::fock::{
    enumerate_basis, ground_state, hamiltonian_operator, one_body_density, SearchOptions, Sector, StateObservable,
    TwoBodyHamiltonian,
};
use scmfkit::fock::state::dense_eigen;
use scmfkit::matrix::{c64, random, CMat};
use scmfkit::presets::{parse_model, Preset};
use scmfkit::scf::{solve_hf, solve_hfb, solve_ks, solve_ksbdg, SolverConfig, SolverReport};
use scmfkit::search::{
    density_observables, direct_min_2d, hk_scan, kink_scan, kink_scan_samples, ks_representability_probe,
    occupation_observables, phi_c_curve, phi_inner_min, two_step_min, KinkReport, ProbeOptions,
};
use scmfkit::verify::run_checks;

use crate::config::{parse_grid, RunConfig};
use crate::report::{num, Document};
use crate::CliError;

pub struct Outcome {
    pub doc: Document,
    pub ok: bool,
    /// Extra files as `(file name, contents)`.
    pub attachments: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Hf,
    Ks,
    Hfb,
    Ksbdg,
}

impl Solver {
    pub fn command(&self) -> &'static str {
        match self {
            Solver::Hf => "solve-hf",
            Solver::Ks => "solve-ks",
            Solver::Hfb => "solve-hfb",
            Solver::Ksbdg => "solve-ksbdg",
        }
    }
}

pub fn model(cfg: &RunConfig) -> Result<(Preset, usize), CliError> {
    let spec = cfg.model.preset.as_deref().ok_or_else(|| CliError::Usage("no model given (use --model or [model] preset)".into()))?;
    let preset = parse_model(spec)?;
    let n = cfg.model.particles.unwrap_or(preset.particles);
    if n > preset.orbitals() {
        return Err(CliError::Usage(format!("N = {n} exceeds the {} orbitals of the model", preset.orbitals())));
    }
    Ok((preset, n))
}

fn hamiltonian<'a>(p: &'a Preset, command: &str) -> Result<&'a TwoBodyHamiltonian, CliError> {
    p.hamiltonian()
        .ok_or_else(|| CliError::Usage(format!("`{command}` needs a Hamiltonian model, `{}` is a functional", p.name)))
}

fn header(command: &str, cfg: &RunConfig, preset: Option<(&Preset, usize)>) -> Document {
    let mut doc = Document::new(command);
    if let Some((p, n)) = preset {
        doc.str("model", &p.spec());
        doc.int("particles", n);
    }
    doc.section("config");
    doc.raw(&cfg.to_toml());
    doc
}

pub fn solve(kind: Solver, cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let (p, n) = model(cfg)?;
    let scfg: SolverConfig = cfg.solver_config(seed).map_err(CliError::Usage)?;
    let rep = match kind {
        Solver::Hf => solve_hf(hamiltonian(&p, kind.command())?, n, &scfg)?,
        Solver::Hfb => solve_hfb(hamiltonian(&p, kind.command())?, n, &scfg)?,
        Solver::Ks => solve_ks(&p.functional(false), n, &scfg)?,
        Solver::Ksbdg => solve_ksbdg(&p.functional(true), n, &scfg)?,
    };
    let mut doc = header(kind.command(), cfg, Some((&p, n)));
    write_report(&mut doc, &rep);
    Ok(Outcome { doc, ok: rep.converged, attachments: Vec::new() })
}

pub fn write_report(doc: &mut Document, rep: &SolverReport) {
    doc.section("energy");
    doc.real("E", rep.energy);
    if let Some(mu) = rep.mu {
        doc.real("mu", mu);
    }
    doc.section("spectra");
    doc.reals("eps", &rep.spectrum);
    if let Some(qp) = &rep.qp_spectrum {
        doc.reals("qp", qp);
    }
    doc.section("densities");
    doc.matrix("rho", &rep.rho);
    if let Some(k) = &rep.kappa {
        doc.flag("kappa_auxiliary", rep.kappa_auxiliary);
        doc.matrix("kappa", k);
    }
    if !rep.q.is_empty() {
        doc.reals("q.re", &rep.q.iter().map(|z| z.re).collect::<Vec<_>>());
        doc.reals("q.im", &rep.q.iter().map(|z| z.im).collect::<Vec<_>>());
        doc.reals("lambda.re", &rep.lambda.iter().map(|z| z.re).collect::<Vec<_>>());
        doc.reals("lambda.im", &rep.lambda.iter().map(|z| z.im).collect::<Vec<_>>());
    }
    doc.matrix("orbitals", &rep.orbitals);
    if let Some(c) = &rep.condensate {
        doc.matrix("z", &c.z);
        doc.int("blocked", c.blocked.ncols());
    }
    doc.section("residuals");
    doc.flag("converged", rep.converged);
    doc.int("iterations", rep.iterations);
    doc.real("density_change", rep.density_change);
    doc.real("idempotency_defect", rep.idempotency_defect);
    doc.real("trace_error", rep.trace_error);
    doc.real("commutator", rep.commutator);
    if let Some(a) = rep.spectral_asymmetry {
        doc.real("spectral_asymmetry", a);
    }
    doc.warnings(&rep.warnings);
}

pub fn oracle(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (p, n) = model(cfg)?;
    let h = hamiltonian(&p, "oracle")?;
    let m = h.orbitals();
    let sector = match cfg.task.sector.as_deref().unwrap_or("fixed") {
        "fixed" => Sector::Fixed(n),
        "full" => Sector::Full,
        other => return Err(CliError::Usage(format!("sector must be `fixed` or `full`, got `{other}`"))),
    };
    let mu = cfg.task.mu.unwrap_or(0.0);
    let shifted = if mu != 0.0 { h.with_one_body_shift(&(CMat::identity(m, m) * c64(-mu, 0.0)))? } else { h.clone() };
    let basis = Arc::new(enumerate_basis(m, sector)?);
    let (values, _) = dense_eigen(&hamiltonian_operator(&shifted, &basis)?)?;
    let (e0, psi) = ground_state(&shifted, &basis)?;
    let rho = one_body_density(&psi)?.into_inner();

    let mut doc = header("oracle", cfg, Some((&p, n)));
    doc.section("energy");
    doc.str("sector", if sector == Sector::Full { "full" } else { "fixed" });
    doc.real("mu", mu);
    doc.real("E0", e0);
    doc.real("particle_number", rho.trace().re);
    doc.section("spectra");
    doc.reals("lowest", &values[..values.len().min(8)]);
    doc.section("densities");
    doc.matrix("rho", &rho);
    println!("E0 = {}", num(e0));
    Ok(Outcome { doc, ok: true, attachments: Vec::new() })
}

/// `rho[k]`, `rho[k,k]`, `re rho[k,l]`, `im rho[k,l]` (1-based) or `trace`.
pub fn parse_observable(s: &str, m: usize) -> Result<StateObservable, CliError> {
    let bad = || CliError::Usage(format!("cannot parse observable `{s}`; use rho[k], re rho[k,l], im rho[k,l] or trace"));
    let s = s.trim();
    if s == "trace" {
        return Ok(StateObservable::Trace);
    }
    let (part, rest) = match s.split_once(' ') {
        Some((p @ ("re" | "im"), r)) => (p, r.trim()),
        Some(_) => return Err(bad()),
        None => ("re", s),
    };
    let inner = rest.strip_prefix("rho[").and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    let idx: Vec<usize> = inner.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let (k, l) = match idx[..] {
        [k] => (k, k),
        [k, l] => (k, l),
        _ => return Err(bad()),
    };
    if k == 0 || l == 0 || k > m || l > m {
        return Err(CliError::Usage(format!("observable `{s}` is out of range for {m} orbitals (indices are 1-based)")));
    }
    let (k, l) = (k - 1, l - 1);
    Ok(match (part, k == l) {
        ("re", true) => StateObservable::Occupation(k),
        ("re", false) => StateObservable::RealElement(k, l),
        (_, _) => StateObservable::ImagElement(k, l),
    })
}

fn kinks_section(doc: &mut Document, r: &KinkReport) {
    doc.section("kinks");
    doc.real("step", r.step);
    doc.real("threshold", r.threshold);
    doc.int("count", r.kinks.len());
    for (i, k) in r.kinks.iter().enumerate() {
        doc.reals(&format!("kink.{}", i + 1), &[k.location, k.left_slope, k.right_slope, k.jump]);
    }
}

pub fn hk(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let (p, n) = model(cfg)?;
    let h = hamiltonian(&p, "hk-scan")?;
    let m = h.orbitals();
    let obs = parse_observable(cfg.task.observable.as_deref().unwrap_or("rho[1]"), m)?;
    let grid = parse_grid(cfg.task.grid.as_deref().unwrap_or("0:1:21")).map_err(CliError::Usage)?;
    let opts = SearchOptions { seed, restarts: cfg.task.restarts.unwrap_or(8), ..Default::default() };
    let basis = Arc::new(enumerate_basis(m, Sector::Fixed(n))?);
    let curve = hk_scan(h, &basis, &obs, &grid, &opts)?;
    let (e0, _) = ground_state(h, &basis)?;

    let mut doc = header("hk-scan", cfg, Some((&p, n)));
    doc.section("energy");
    doc.str("observable", &obs.label());
    doc.real("E0", e0);
    let all_feasible = curve.points().iter().all(|p| p.feasible);
    if let Some(best) = curve.min_feasible() {
        doc.real("curve_min", best.value);
        doc.real("curve_argmin", best.param);
    }
    doc.int("infeasible_points", curve.points().iter().filter(|p| !p.feasible).count());
    if all_feasible && grid.len() >= 3 {
        let r = kink_scan_samples(&curve.params(), &curve.values(), None)?;
        kinks_section(&mut doc, &r);
    }
    Ok(Outcome { doc, ok: all_feasible, attachments: vec![("hk-scan.csv".into(), curve.to_csv())] })
}

pub fn appendix(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = cfg.task.d.unwrap_or(1.0);
    let curve = phi_c_curve(d, -5.0 * d, 5.0 * d, 1001)?;
    let two = two_step_min(d)?;
    let direct = direct_min_2d(d)?;
    let kinks = kink_scan(|y| phi_inner_min(y, d).map(|r| r.0).unwrap_or(f64::NAN), (-5.0 * d, 5.0 * d), 1e-4 * d, None)?;

    let mut doc = header("appendix", cfg, None);
    doc.section("energy");
    doc.real("d", d);
    doc.real("two_step_min", two.value);
    for (i, (x, y)) in two.points.iter().enumerate() {
        doc.reals(&format!("two_step_argmin.{}", i + 1), &[*x, *y]);
    }
    doc.real("direct_min", direct.value);
    for (i, (x, y)) in direct.points.iter().enumerate() {
        doc.reals(&format!("direct_argmin.{}", i + 1), &[*x, *y]);
    }
    doc.real("expected_min", -27.0 * d.powi(4));
    kinks_section(&mut doc, &kinks);
    let locs: Vec<String> = kinks.locations().iter().map(|l| format!("{l:.6}")).collect();
    println!("min φ_c = {} at y = {:?}", num(two.value), two.points.iter().map(|p| p.1).collect::<Vec<_>>());
    println!("kinks at y = [{}]", locs.join(", "));
    Ok(Outcome { doc, ok: true, attachments: vec![("appendix.csv".into(), curve.to_csv())] })
}

pub fn probe(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let (p, n) = model(cfg)?;
    let m = p.orbitals();
    let obs = match cfg.task.observables.as_deref().unwrap_or("density") {
        "density" => density_observables(m),
        "occupations" => occupation_observables(m),
        other => return Err(CliError::Usage(format!("observables must be `density` or `occupations`, got `{other}`"))),
    };
    let target_rho = match cfg.task.target.as_deref().unwrap_or("ground") {
        "ground" => {
            let h = hamiltonian(&p, "probe-rep")?;
            let basis = Arc::new(enumerate_basis(m, Sector::Fixed(n))?);
            one_body_density(&ground_state(h, &basis)?.1)?.into_inner()
        }
        "slater" => random::slater_density(&mut ChaCha8Rng::seed_from_u64(seed), m, n),
        other => return Err(CliError::Usage(format!("target must be `ground` or `slater`, got `{other}`"))),
    };
    let q: Vec<f64> = obs.iter().map(|o| o.value(&target_rho)).collect::<Result<_, _>>()?;
    let opts = ProbeOptions { seed, restarts: cfg.task.restarts.unwrap_or(8), ..Default::default() };
    let r = ks_representability_probe(&obs, &q, m, n, &opts)?;

    let mut doc = header("probe-rep", cfg, Some((&p, n)));
    doc.section("residuals");
    doc.flag("feasible", r.feasible);
    doc.real("residual", r.residual);
    doc.int("restart", r.restart);
    doc.reals("restart_residuals", &r.restart_residuals);
    doc.section("densities");
    doc.matrix("target_rho", &target_rho);
    doc.matrix("rho", &r.rho);
    println!("feasible = {}, residual = {}", r.feasible, num(r.residual));
    Ok(Outcome { doc, ok: r.feasible, attachments: Vec::new() })
}

pub fn check(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let results = run_checks(seed);
    let mut doc = header("check", cfg, None);
    doc.section("checks");
    let width = results.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &results {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status}  {:<width$}  {}", c.name, c.detail);
        doc.str(&c.name, &format!("{status} ({})", c.detail));
    }
    let failed = results.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", results.len());
    Ok(Outcome { doc, ok: failed == 0, attachments: Vec::new() })
}
