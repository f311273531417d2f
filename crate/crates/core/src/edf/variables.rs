//! Principal variables `Q^A[ϱ, κ]` and their derivatives.
//!
//! Derivatives are unconstrained Wirtinger partials: `ϱ_{ab}` and `ϱ_{ba}` are
//! independent, as are `κ_{ab}`, `κ_{ba}` and their conjugates.

use std::fmt;
use std::sync::Arc;

use crate::matrix::{c64, CMat, C64};

/// User-supplied principal variable.
pub trait CustomVariable: Send + Sync + fmt::Debug {
    fn value(&self, rho: &CMat, kappa: &CMat) -> C64;
    /// `∂Q/∂ϱ_{ab}`.
    fn d_rho(&self, rho: &CMat, kappa: &CMat) -> CMat;
    /// `∂Q/∂κ*_{ab}`.
    fn d_kappa_conj(&self, rho: &CMat, _kappa: &CMat) -> CMat {
        CMat::zeros(rho.nrows(), rho.ncols())
    }
    /// `∂Q/∂κ_{ab}`.
    fn d_kappa(&self, rho: &CMat, _kappa: &CMat) -> CMat {
        CMat::zeros(rho.nrows(), rho.ncols())
    }
    /// Label of the conjugate variable, or `None` for a real variable.
    fn conjugate_label(&self) -> Option<String> {
        None
    }
}

#[derive(Debug, Clone)]
pub enum VariableKind {
    /// `ρ(x) = ϱ_{xx} / a`.
    LocalDensity { site: usize, spacing: f64 },
    /// `ϱ_{kℓ}`.
    MatrixElement { k: usize, l: usize },
    /// Lattice kinetic density with hard walls:
    /// `ξ(x) = [D(x, x+1) + D(x−1, x)] / 2a²`,
    /// `D(x, y) = ϱ_{xx} + ϱ_{yy} − 2 Re ϱ_{yx}` and out-of-lattice entries zero.
    KineticDensity { site: usize, sites: usize, spacing: f64 },
    /// `κ_{kℓ}`, or `κ*_{kℓ}` when `conjugate`.
    PairAmplitude { k: usize, l: usize, conjugate: bool },
    Custom(Arc<dyn CustomVariable>),
}

#[derive(Debug, Clone)]
pub struct PrincipalVariable {
    label: String,
    kind: VariableKind,
}

/// Derivatives of one variable at a point.
#[derive(Debug, Clone)]
pub struct VariableDerivative {
    pub d_rho: CMat,
    pub d_kappa: CMat,
    pub d_kappa_conj: CMat,
}

fn unit(m: usize, a: usize, b: usize, v: f64) -> CMat {
    let mut d = CMat::zeros(m, m);
    d[(a, b)] = c64(v, 0.0);
    d
}

impl PrincipalVariable {
    pub fn new(label: impl Into<String>, kind: VariableKind) -> Self {
        Self { label: label.into(), kind }
    }

    pub fn local_density(site: usize, spacing: f64) -> Self {
        Self::new(format!("rho[{}]", site + 1), VariableKind::LocalDensity { site, spacing })
    }

    pub fn matrix_element(k: usize, l: usize) -> Self {
        Self::new(format!("rho[{},{}]", k + 1, l + 1), VariableKind::MatrixElement { k, l })
    }

    pub fn kinetic_density(site: usize, sites: usize, spacing: f64) -> Self {
        Self::new(format!("xi[{}]", site + 1), VariableKind::KineticDensity { site, sites, spacing })
    }

    pub fn pair_amplitude(k: usize, l: usize, conjugate: bool) -> Self {
        let name = if conjugate { "kappa*" } else { "kappa" };
        Self::new(format!("{name}[{},{}]", k + 1, l + 1), VariableKind::PairAmplitude { k, l, conjugate })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &VariableKind {
        &self.kind
    }

    pub fn depends_on_pairing(&self) -> bool {
        matches!(self.kind, VariableKind::PairAmplitude { .. } | VariableKind::Custom(_))
    }

    pub fn value(&self, rho: &CMat, kappa: &CMat) -> C64 {
        match &self.kind {
            VariableKind::LocalDensity { site, spacing } => rho[(*site, *site)] / *spacing,
            VariableKind::MatrixElement { k, l } => rho[(*k, *l)],
            VariableKind::KineticDensity { site, sites, spacing } => {
                let x = *site;
                let diff = |a: usize, b: Option<usize>| -> C64 {
                    match b {
                        Some(b) => rho[(a, a)] + rho[(b, b)] - (rho[(b, a)] + rho[(a, b)]),
                        None => rho[(a, a)],
                    }
                };
                let fwd = diff(x, (x + 1 < *sites).then_some(x + 1));
                let bwd = diff(x, x.checked_sub(1));
                (fwd + bwd) / (2.0 * spacing * spacing)
            }
            VariableKind::PairAmplitude { k, l, conjugate } => {
                let v = kappa[(*k, *l)];
                if *conjugate {
                    v.conj()
                } else {
                    v
                }
            }
            VariableKind::Custom(c) => c.value(rho, kappa),
        }
    }

    pub fn derivatives(&self, rho: &CMat, kappa: &CMat) -> VariableDerivative {
        let m = rho.nrows();
        let zero = || CMat::zeros(m, m);
        match &self.kind {
            VariableKind::LocalDensity { site, spacing } => VariableDerivative {
                d_rho: unit(m, *site, *site, 1.0 / spacing),
                d_kappa: zero(),
                d_kappa_conj: zero(),
            },
            VariableKind::MatrixElement { k, l } => VariableDerivative {
                d_rho: unit(m, *k, *l, 1.0),
                d_kappa: zero(),
                d_kappa_conj: zero(),
            },
            VariableKind::KineticDensity { site, sites, spacing } => {
                let x = *site;
                let s = 1.0 / (2.0 * spacing * spacing);
                let mut d = zero();
                d[(x, x)] += c64(2.0 * s, 0.0);
                for y in [x.checked_sub(1), (x + 1 < *sites).then_some(x + 1)].into_iter().flatten() {
                    d[(y, y)] += c64(s, 0.0);
                    d[(x, y)] += c64(-s, 0.0);
                    d[(y, x)] += c64(-s, 0.0);
                }
                VariableDerivative { d_rho: d, d_kappa: zero(), d_kappa_conj: zero() }
            }
            VariableKind::PairAmplitude { k, l, conjugate } => {
                let u = unit(m, *k, *l, 1.0);
                if *conjugate {
                    VariableDerivative { d_rho: zero(), d_kappa: zero(), d_kappa_conj: u }
                } else {
                    VariableDerivative { d_rho: zero(), d_kappa: u, d_kappa_conj: zero() }
                }
            }
            VariableKind::Custom(c) => VariableDerivative {
                d_rho: c.d_rho(rho, kappa),
                d_kappa: c.d_kappa(rho, kappa),
                d_kappa_conj: c.d_kappa_conj(rho, kappa),
            },
        }
    }

    /// Whether the variable is real for every hermitian `ϱ`.
    pub fn is_real(&self) -> bool {
        match &self.kind {
            VariableKind::LocalDensity { .. } | VariableKind::KineticDensity { .. } => true,
            VariableKind::MatrixElement { k, l } => k == l,
            VariableKind::PairAmplitude { .. } => false,
            VariableKind::Custom(c) => c.conjugate_label().is_none(),
        }
    }

    /// Whether `other` is the complex conjugate of this variable.
    pub fn is_conjugate_of(&self, other: &PrincipalVariable) -> bool {
        match (&self.kind, &other.kind) {
            (VariableKind::MatrixElement { k, l }, VariableKind::MatrixElement { k: k2, l: l2 }) => k == l2 && l == k2,
            (
                VariableKind::PairAmplitude { k, l, conjugate },
                VariableKind::PairAmplitude { k: k2, l: l2, conjugate: c2 },
            ) => k == k2 && l == l2 && conjugate != c2,
            (VariableKind::Custom(c), _) => c.conjugate_label().as_deref() == Some(other.label()),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Central differences of a variable along every independent direction of
    /// hermitian ϱ and antisymmetric κ, against the chain rule of its partials.
    fn check(var: &PrincipalVariable, rho: &CMat, kappa: &CMat) -> f64 {
        let m = rho.nrows();
        let h = 1e-6;
        let d = var.derivatives(rho, kappa);
        let mut worst: f64 = 0.0;
        let mut dirs: Vec<(CMat, CMat)> = Vec::new();
        for k in 0..m {
            for l in k..m {
                let mut re = CMat::zeros(m, m);
                re[(k, l)] = c64(1.0, 0.0);
                re[(l, k)] = c64(1.0, 0.0);
                dirs.push((re, CMat::zeros(m, m)));
                if k != l {
                    let mut im = CMat::zeros(m, m);
                    im[(k, l)] = c64(0.0, 1.0);
                    im[(l, k)] = c64(0.0, -1.0);
                    dirs.push((im, CMat::zeros(m, m)));
                    for ph in [c64(1.0, 0.0), c64(0.0, 1.0)] {
                        let mut kk = CMat::zeros(m, m);
                        kk[(k, l)] = ph;
                        kk[(l, k)] = -ph;
                        dirs.push((CMat::zeros(m, m), kk));
                    }
                }
            }
        }
        for (dr, dk) in dirs {
            let plus = var.value(&(rho + &dr * c64(h, 0.0)), &(kappa + &dk * c64(h, 0.0)));
            let minus = var.value(&(rho - &dr * c64(h, 0.0)), &(kappa - &dk * c64(h, 0.0)));
            let fd = (plus - minus) / (2.0 * h);
            let mut an = C64::default();
            for a in 0..m {
                for b in 0..m {
                    an += d.d_rho[(a, b)] * dr[(a, b)] + d.d_kappa[(a, b)] * dk[(a, b)]
                        + d.d_kappa_conj[(a, b)] * dk[(a, b)].conj();
                }
            }
            worst = worst.max((fd - an).norm());
        }
        worst
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = 5;
        let rho = random::density(&mut rng, m, 0.1, 0.9);
        let kappa = random::antisymmetric(&mut rng, m) * c64(0.2, 0.0);
        let vars = [
            PrincipalVariable::local_density(2, 0.7),
            PrincipalVariable::matrix_element(1, 3),
            PrincipalVariable::matrix_element(2, 2),
            PrincipalVariable::kinetic_density(0, m, 1.0),
            PrincipalVariable::kinetic_density(2, m, 0.5),
            PrincipalVariable::kinetic_density(4, m, 1.0),
            PrincipalVariable::pair_amplitude(0, 1, false),
            PrincipalVariable::pair_amplitude(3, 4, true),
        ];
        for v in &vars {
            assert!(check(v, &rho, &kappa) < 1e-8, "{}", v.label());
        }
    }

    #[test]
    fn conjugate_pairs() {
        let a = PrincipalVariable::matrix_element(0, 1);
        let b = PrincipalVariable::matrix_element(1, 0);
        assert!(a.is_conjugate_of(&b) && !a.is_real());
        assert!(PrincipalVariable::matrix_element(1, 1).is_real());
        let k = PrincipalVariable::pair_amplitude(0, 1, false);
        let kc = PrincipalVariable::pair_amplitude(0, 1, true);
        assert!(k.is_conjugate_of(&kc));
    }

    #[test]
    fn kinetic_density_of_uniform_orbital_is_zero_inside() {
        // A constant orbital has vanishing interior gradient.
        let m = 4;
        let rho = CMat::from_element(m, m, c64(0.25, 0.0));
        let xi = PrincipalVariable::kinetic_density(1, m, 1.0).value(&rho, &CMat::zeros(m, m));
        assert!(xi.norm() < 1e-15);
    }
}
