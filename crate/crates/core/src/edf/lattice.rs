//! One-dimensional lattice functional with a quasi-local energy density
//!
//! `ℋ(x) = ξ(x)/2m + (t0/2) ρ(x)² + (t3/12) ρ(x)^{γ+2} + U(x) ρ(x)`,
//!
//! `E = a Σ_x ℋ(x)`, `ρ(x) = ϱ_{xx}/a`, on a spinless chain with hard walls.

use std::sync::Arc;

use crate::edf::ks::{ConjugatePairProduct, DirectPairingEnergy, EnergyTerm, KSFunctional, LinearInVariables, PowerOfVariables};
use crate::edf::variables::PrincipalVariable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel1D {
    pub sites: usize,
    pub spacing: f64,
    pub mass: f64,
    pub potential: Vec<f64>,
    pub t0: f64,
    pub t3: f64,
    pub gamma: f64,
}

impl LatticeModel1D {
    pub const DEFAULT_T0: f64 = -2.0;
    pub const DEFAULT_T3: f64 = 12.0;
    pub const DEFAULT_GAMMA: f64 = 1.0;

    pub fn new(sites: usize, spacing: f64, mass: f64, potential: Vec<f64>, t0: f64, t3: f64, gamma: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::Domain(format!("lattice needs at least 2 sites, got {sites}")));
        }
        if !(spacing > 0.0 && mass > 0.0 && gamma > 0.0) {
            return Err(Error::Domain("spacing, mass and gamma must be positive".into()));
        }
        if potential.len() != sites {
            return Err(Error::Dimension(format!("{} potential values for {sites} sites", potential.len())));
        }
        if !(t0.is_finite() && t3.is_finite() && potential.iter().all(|u| u.is_finite())) {
            return Err(Error::Domain("lattice parameters must be finite".into()));
        }
        Ok(Self { sites, spacing, mass, potential, t0, t3, gamma })
    }

    /// Default couplings with `U(x) = k (x − x_c)²`, `x_c` the chain centre.
    pub fn harmonic(sites: usize, k: f64) -> Result<Self> {
        let centre = (sites as f64 - 1.0) / 2.0;
        let potential = (0..sites).map(|x| k * (x as f64 - centre).powi(2)).collect();
        Self::new(sites, 1.0, 1.0, potential, Self::DEFAULT_T0, Self::DEFAULT_T3, Self::DEFAULT_GAMMA)
    }
}

/// How the lattice energy is split between `E_irr` and `E_reg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticePartition {
    /// `Q = {ρ}`, `E_irr` = kinetic + external, `E_reg` = t0 + t3.
    Standard,
    /// `Q = {ρ, ξ}`, kinetic energy also regular.
    WithKinetic,
    /// `Q = {}`, everything irregular.
    Empty,
}

/// Optional nearest-neighbour pairing `−g Σ_x |κ_{x,x+1}|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatticePairing {
    None,
    /// Read directly from κ as part of `E_irr`.
    Direct(f64),
    /// Through principal variables `κ_{x,x+1}` and `κ*_{x,x+1}` in `E_reg`.
    Principal(f64),
}

pub fn lattice1d(model: &LatticeModel1D, partition: LatticePartition, pairing: LatticePairing) -> KSFunctional {
    let l = model.sites;
    let a = model.spacing;
    let rho: Vec<PrincipalVariable> = (0..l).map(|x| PrincipalVariable::local_density(x, a)).collect();
    let xi: Vec<PrincipalVariable> = (0..l).map(|x| PrincipalVariable::kinetic_density(x, l, a)).collect();
    let rho_labels: Vec<String> = rho.iter().map(|v| v.label().to_string()).collect();
    let xi_labels: Vec<String> = xi.iter().map(|v| v.label().to_string()).collect();
    let mut catalog: Vec<PrincipalVariable> = rho.into_iter().chain(xi).collect();

    let kinetic: Arc<dyn EnergyTerm> = Arc::new(LinearInVariables {
        name: "kinetic".into(),
        inputs: xi_labels.clone(),
        coeffs: vec![a / (2.0 * model.mass); l],
    });
    let external: Arc<dyn EnergyTerm> = Arc::new(LinearInVariables {
        name: "external".into(),
        inputs: rho_labels.clone(),
        coeffs: model.potential.iter().map(|u| a * u).collect(),
    });
    let t0: Arc<dyn EnergyTerm> = Arc::new(PowerOfVariables {
        name: "t0".into(),
        inputs: rho_labels.clone(),
        coeff: a * model.t0 / 2.0,
        power: 2.0,
    });
    let t3: Arc<dyn EnergyTerm> = Arc::new(PowerOfVariables {
        name: "t3".into(),
        inputs: rho_labels.clone(),
        coeff: a * model.t3 / 12.0,
        power: model.gamma + 2.0,
    });

    let (mut principal, mut irr, mut reg) = match partition {
        LatticePartition::Standard => (rho_labels.clone(), vec![kinetic, external], vec![t0, t3]),
        LatticePartition::WithKinetic => {
            (rho_labels.iter().chain(&xi_labels).cloned().collect(), vec![external], vec![kinetic, t0, t3])
        }
        LatticePartition::Empty => (Vec::new(), vec![kinetic, external, t0, t3], Vec::new()),
    };

    let has_pairing = !matches!(pairing, LatticePairing::None);
    match pairing {
        LatticePairing::None => {}
        LatticePairing::Direct(g) => irr.push(Arc::new(DirectPairingEnergy {
            name: "pairing".into(),
            pairs: (0..l - 1).map(|x| (x, x + 1)).collect(),
            coeff: -g,
        })),
        LatticePairing::Principal(g) => {
            let mut inputs = Vec::new();
            for x in 0..l - 1 {
                for conj in [false, true] {
                    let v = PrincipalVariable::pair_amplitude(x, x + 1, conj);
                    inputs.push(v.label().to_string());
                    catalog.push(v);
                }
            }
            let term: Arc<dyn EnergyTerm> =
                Arc::new(ConjugatePairProduct { name: "pairing".into(), inputs: inputs.clone(), coeff: -g });
            if partition == LatticePartition::Empty {
                irr.push(term);
            } else {
                principal.extend(inputs);
                reg.push(term);
            }
        }
    }

    KSFunctional::new(l, has_pairing, catalog, principal, irr, reg).expect("valid lattice functional")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edf::ks::{ks_fields, repartition, Direction};
    use crate::matrix::{frobenius, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameter_validation() {
        assert!(LatticeModel1D::new(1, 1.0, 1.0, vec![0.0], -2.0, 12.0, 1.0).is_err());
        assert!(LatticeModel1D::new(3, 0.0, 1.0, vec![0.0; 3], -2.0, 12.0, 1.0).is_err());
        assert!(LatticeModel1D::new(3, 1.0, 1.0, vec![0.0; 3], -2.0, 12.0, 0.0).is_err());
    }

    #[test]
    fn partitions_share_the_composed_functional() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = LatticeModel1D::harmonic(6, 0.05).unwrap();
        let fs = [
            lattice1d(&model, LatticePartition::Standard, LatticePairing::None),
            lattice1d(&model, LatticePartition::WithKinetic, LatticePairing::None),
            lattice1d(&model, LatticePartition::Empty, LatticePairing::None),
        ];
        let moved = repartition(&fs[0], &["xi[1]", "xi[2]", "xi[3]", "xi[4]", "xi[5]", "xi[6]"], Direction::ToRegular)
            .unwrap();
        assert_eq!(moved.principal().len(), 12);
        for _ in 0..20 {
            let rho = random::density(&mut rng, 6, 0.05, 0.95);
            let base = ks_fields(&fs[0], &rho).unwrap();
            for f in fs.iter().skip(1).chain(std::iter::once(&moved)) {
                let o = ks_fields(f, &rho).unwrap();
                assert!((o.energy - base.energy).abs() <= 1e-12);
                assert!(frobenius(&(o.h.as_matrix() - base.h.as_matrix())) <= 1e-12);
            }
        }
    }

    #[test]
    fn electrons_style_split_is_t_plus_diagonal() {
        let model = LatticeModel1D::harmonic(5, 0.1).unwrap();
        let f = lattice1d(&model, LatticePartition::Standard, LatticePairing::None);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random::density(&mut rng, 5, 0.1, 0.9);
        let out = ks_fields(&f, &rho).unwrap();
        let off = out.h.as_matrix() - out.gamma.as_matrix();
        // Γ is diagonal and the remainder is the fixed tridiagonal kinetic + external matrix.
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(out.gamma.as_matrix()[(i, j)].norm(), 0.0);
                }
                if (i as i64 - j as i64).abs() > 1 {
                    assert_eq!(off[(i, j)].norm(), 0.0);
                }
            }
        }
    }
}
