//! Named model families addressed as `name:key=value,...`.

use std::collections::BTreeMap;

use crate::edf::{
    hf_from_hamiltonian, hfb_from_hamiltonian, ks_partitioned, lattice1d, KSFunctional, LatticeModel1D,
    LatticePairing, LatticePartition,
};
use crate::error::{Error, Result};
use crate::fock::TwoBodyHamiltonian;
use crate::matrix::{random, SPBasis};

/// The physical content of a preset.
#[derive(Debug, Clone)]
pub enum Model {
    Hamiltonian(TwoBodyHamiltonian),
    Functional(KSFunctional),
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    /// Every parameter with its resolved value, defaults included.
    pub params: BTreeMap<String, String>,
    pub model: Model,
    pub particles: usize,
    /// `hf` or `occupations`: how a Hamiltonian preset becomes a KS functional.
    functional: String,
}

impl Preset {
    pub fn hamiltonian(&self) -> Option<&TwoBodyHamiltonian> {
        match &self.model {
            Model::Hamiltonian(h) => Some(h),
            Model::Functional(_) => None,
        }
    }

    pub fn orbitals(&self) -> usize {
        match &self.model {
            Model::Hamiltonian(h) => h.orbitals(),
            Model::Functional(f) => f.orbitals(),
        }
    }

    /// KS functional of the preset; Hamiltonian presets give their HF(B)
    /// functional, or the occupation-partitioned one when so configured.
    pub fn functional(&self, pairing: bool) -> KSFunctional {
        match &self.model {
            Model::Functional(f) => f.clone(),
            Model::Hamiltonian(h) if pairing => hfb_from_hamiltonian(h),
            Model::Hamiltonian(h) if self.functional == "occupations" => ks_partitioned(h),
            Model::Hamiltonian(h) => hf_from_hamiltonian(h),
        }
    }

    /// Canonical `name:key=value,...` form with every parameter explicit.
    pub fn spec(&self) -> String {
        let kv: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}:{}", self.name, kv.join(","))
    }
}

pub const PRESET_NAMES: &[&str] = &["hubbard_chain", "hubbard_dimer", "pairing", "two_level", "random_one_body", "lattice1d"];

struct Params {
    given: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Params {
    fn parse(body: &str) -> Result<Self> {
        let mut given = BTreeMap::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("model parameter `{item}` is not key=value")))?;
            if given.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("model parameter `{k}` given twice")));
            }
        }
        Ok(Self { given, resolved: BTreeMap::new() })
    }

    fn raw(&mut self, key: &str, default: &str) -> String {
        let v = self.given.remove(key).unwrap_or_else(|| default.to_string());
        self.resolved.insert(key.to_string(), v.clone());
        v
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.raw(key, &format!("{default:?}"));
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Config(format!("model parameter `{key}` must be a finite number, got `{v}`")))
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = self.raw(key, &default.to_string());
        v.parse::<usize>()
            .map_err(|_| Error::Config(format!("model parameter `{key}` must be a non-negative integer, got `{v}`")))
    }

    fn choice(&mut self, key: &str, default: &str, allowed: &[&str]) -> Result<String> {
        let v = self.raw(key, default);
        if allowed.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(Error::Config(format!("model parameter `{key}` must be one of {allowed:?}, got `{v}`")))
        }
    }

    fn finish(self, name: &str) -> Result<BTreeMap<String, String>> {
        if let Some(k) = self.given.keys().next() {
            return Err(Error::Config(format!("unknown parameter `{k}` for model `{name}`")));
        }
        Ok(self.resolved)
    }
}

/// Parses `name` or `name:key=value,...` into a preset.
///
/// * `hubbard_chain`: `L=2, tau=1, U=4, N=L, functional=hf|occupations`
/// * `hubbard_dimer`: `hubbard_chain` with `L=2`
/// * `pairing`: `levels=2, spacing=1, G=0.5, N=levels, functional`
/// * `two_level`: `H = diag(−e, e)`, `e=1, N=1`
/// * `random_one_body`: `M=4, seed=42, N=2`
/// * `lattice1d`: `L=20, N=3, k=0.05, a=1, m=1, t0=−2, t3=12, gamma=1,
///   partition=standard|kinetic|empty, pairing=none|direct|principal, g=0`
pub fn parse_model(spec: &str) -> Result<Preset> {
    let (name, body) = spec.split_once(':').unwrap_or((spec, ""));
    let name = name.trim();
    let mut p = Params::parse(body)?;
    let hamiltonian_functional = |p: &mut Params| p.choice("functional", "hf", &["hf", "occupations"]);
    let (model, particles, functional) = match name {
        "hubbard_chain" | "hubbard_dimer" => {
            let l = if name == "hubbard_dimer" { 2 } else { p.usize("L", 2)? };
            let tau = p.f64("tau", 1.0)?;
            let u = p.f64("U", 4.0)?;
            let n = p.usize("N", l)?;
            let f = hamiltonian_functional(&mut p)?;
            (Model::Hamiltonian(TwoBodyHamiltonian::hubbard_chain(l, tau, u)?), n, f)
        }
        "pairing" => {
            let levels = p.usize("levels", 2)?;
            let spacing = p.f64("spacing", 1.0)?;
            let g = p.f64("G", 0.5)?;
            let n = p.usize("N", levels)?;
            let f = hamiltonian_functional(&mut p)?;
            (Model::Hamiltonian(TwoBodyHamiltonian::pairing(levels, spacing, g)?), n, f)
        }
        "two_level" => {
            let e = p.f64("e", 1.0)?;
            let n = p.usize("N", 1)?;
            let t = crate::matrix::HermitianMatrix::from_real_diagonal(&[-e, e]);
            (Model::Hamiltonian(TwoBodyHamiltonian::one_body(SPBasis::indexed(2)?, t)?), n, "hf".into())
        }
        "random_one_body" => {
            use rand::SeedableRng;
            let m = p.usize("M", 4)?;
            let seed = p.usize("seed", 42)? as u64;
            let n = p.usize("N", 2)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = random::hermitian(&mut rng, m);
            (Model::Hamiltonian(TwoBodyHamiltonian::one_body(SPBasis::indexed(m)?, t)?), n, "hf".into())
        }
        "lattice1d" => {
            let l = p.usize("L", 20)?;
            let n = p.usize("N", 3)?;
            let k = p.f64("k", 0.05)?;
            let a = p.f64("a", 1.0)?;
            let mass = p.f64("m", 1.0)?;
            let t0 = p.f64("t0", LatticeModel1D::DEFAULT_T0)?;
            let t3 = p.f64("t3", LatticeModel1D::DEFAULT_T3)?;
            let gamma = p.f64("gamma", LatticeModel1D::DEFAULT_GAMMA)?;
            let partition = match p.choice("partition", "standard", &["standard", "kinetic", "empty"])?.as_str() {
                "standard" => LatticePartition::Standard,
                "kinetic" => LatticePartition::WithKinetic,
                _ => LatticePartition::Empty,
            };
            let mode = p.choice("pairing", "none", &["none", "direct", "principal"])?;
            let g = p.f64("g", 0.0)?;
            let pairing = match mode.as_str() {
                "direct" => LatticePairing::Direct(g),
                "principal" => LatticePairing::Principal(g),
                _ => LatticePairing::None,
            };
            let centre = (l as f64 - 1.0) / 2.0;
            let potential = (0..l).map(|x| k * ((x as f64 - centre) * a).powi(2)).collect();
            let model = LatticeModel1D::new(l, a, mass, potential, t0, t3, gamma)?;
            (Model::Functional(lattice1d(&model, partition, pairing)), n, "hf".into())
        }
        _ => return Err(Error::Config(format!("unknown model `{name}`; known models: {}", PRESET_NAMES.join(", ")))),
    };
    let params = p.finish(name)?;
    let preset = Preset { name: name.to_string(), params, model, particles, functional };
    if preset.particles > preset.orbitals() {
        return Err(Error::Config(format!("N = {} exceeds the {} orbitals of `{name}`", particles, preset.orbitals())));
    }
    Ok(preset)
}

/// Small models used by the verification suite.
pub const BATTERY: &[&str] = &[
    "hubbard_dimer",
    "hubbard_chain:L=4,U=2",
    "hubbard_chain:L=6,U=4",
    "pairing:levels=2,G=2",
    "pairing:levels=4,G=1",
    "pairing:levels=4,G=1,N=2",
    "two_level",
    "random_one_body:M=5,N=2",
    "lattice1d:L=12,N=3",
    "lattice1d:L=12,N=4,pairing=direct,g=4",
];
