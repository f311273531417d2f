//! Kohn–Sham functionals partitioned into irregular and regular parts.
//!
//! `E^KS[ϱ, κ] = E_irr[ϱ, κ; q] + E_reg[q]` with the principal variables
//! substituted, `q = Q[ϱ, κ]`. Each part is a list of [`EnergyTerm`]s; a term
//! reads some variables by label and, if `direct`, the densities themselves.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::edf::hf::{mean_field, pairing_field};
use crate::edf::variables::PrincipalVariable;
use crate::error::{Error, Result};
use crate::fock::{Tensor4, TwoBodyHamiltonian};
use crate::matrix::{c64, frobenius, hermiticity_defect, CMat, HermitianMatrix, C64};

/// Arguments handed to an energy term.
pub struct TermInput<'a> {
    pub rho: &'a CMat,
    pub kappa: &'a CMat,
    /// Values of the term's declared inputs, in declaration order.
    pub q: &'a [C64],
}

/// Partials of a term: `∂E/∂ϱ_{ab}`, `∂E/∂κ*_{ab}` and `∂E/∂q^A`.
#[derive(Debug, Clone, Default)]
pub struct TermGradient {
    pub d_rho: Option<CMat>,
    pub d_kappa_conj: Option<CMat>,
    pub d_q: Vec<C64>,
}

pub trait EnergyTerm: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    /// Labels of the principal variables the term reads.
    fn inputs(&self) -> &[String];
    /// Whether the term reads ϱ or κ other than through its inputs.
    fn direct(&self) -> bool;
    fn energy(&self, x: &TermInput) -> f64;
    fn gradient(&self, x: &TermInput) -> TermGradient;
}

fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let mut acc = C64::default();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `tr(tϱ)`.
#[derive(Debug, Clone)]
pub struct OneBodyEnergy {
    pub name: String,
    pub t: CMat,
}

impl EnergyTerm for OneBodyEnergy {
    fn name(&self) -> &str {
        &self.name
    }
    fn inputs(&self) -> &[String] {
        &[]
    }
    fn direct(&self) -> bool {
        true
    }
    fn energy(&self, x: &TermInput) -> f64 {
        trace_product(&self.t, x.rho).re
    }
    fn gradient(&self, _x: &TermInput) -> TermGradient {
        TermGradient { d_rho: Some(self.t.transpose()), ..Default::default() }
    }
}

/// `½ Σ V̄_{kk'ℓℓ'} ϱ_{ℓk} ϱ_{ℓ'k'}`.
#[derive(Debug, Clone)]
pub struct MeanFieldEnergy {
    pub vbar: Tensor4,
}

impl EnergyTerm for MeanFieldEnergy {
    fn name(&self) -> &str {
        "mean-field"
    }
    fn inputs(&self) -> &[String] {
        &[]
    }
    fn direct(&self) -> bool {
        true
    }
    fn energy(&self, x: &TermInput) -> f64 {
        0.5 * trace_product(&mean_field(&self.vbar, x.rho), x.rho).re
    }
    fn gradient(&self, x: &TermInput) -> TermGradient {
        TermGradient { d_rho: Some(mean_field(&self.vbar, x.rho).transpose()), ..Default::default() }
    }
}

/// `¼ Σ V̄_{kk'ℓℓ'} κ*_{kk'} κ_{ℓℓ'}`.
#[derive(Debug, Clone)]
pub struct PairingEnergy {
    pub vbar: Tensor4,
}

impl EnergyTerm for PairingEnergy {
    fn name(&self) -> &str {
        "pairing"
    }
    fn inputs(&self) -> &[String] {
        &[]
    }
    fn direct(&self) -> bool {
        true
    }
    fn energy(&self, x: &TermInput) -> f64 {
        let d = pairing_field(&self.vbar, x.kappa);
        let mut acc = C64::default();
        for (k, v) in x.kappa.iter().zip(d.iter()) {
            acc += k.conj() * v;
        }
        0.5 * acc.re
    }
    fn gradient(&self, x: &TermInput) -> TermGradient {
        TermGradient {
            d_kappa_conj: Some(pairing_field(&self.vbar, x.kappa) * c64(0.5, 0.0)),
            ..Default::default()
        }
    }
}

/// `Σ_A c_A q^A` over real variables.
#[derive(Debug, Clone)]
pub struct LinearInVariables {
    pub name: String,
    pub inputs: Vec<String>,
    pub coeffs: Vec<f64>,
}

impl EnergyTerm for LinearInVariables {
    fn name(&self) -> &str {
        &self.name
    }
    fn inputs(&self) -> &[String] {
        &self.inputs
    }
    fn direct(&self) -> bool {
        false
    }
    fn energy(&self, x: &TermInput) -> f64 {
        x.q.iter().zip(&self.coeffs).map(|(q, c)| c * q.re).sum()
    }
    fn gradient(&self, _x: &TermInput) -> TermGradient {
        TermGradient { d_q: self.coeffs.iter().map(|&c| c64(c, 0.0)).collect(), ..Default::default() }
    }
}

/// `c Σ_A (q^A)^p` over real variables.
#[derive(Debug, Clone)]
pub struct PowerOfVariables {
    pub name: String,
    pub inputs: Vec<String>,
    pub coeff: f64,
    pub power: f64,
}

impl EnergyTerm for PowerOfVariables {
    fn name(&self) -> &str {
        &self.name
    }
    fn inputs(&self) -> &[String] {
        &self.inputs
    }
    fn direct(&self) -> bool {
        false
    }
    fn energy(&self, x: &TermInput) -> f64 {
        x.q.iter().map(|q| self.coeff * q.re.powf(self.power)).sum()
    }
    fn gradient(&self, x: &TermInput) -> TermGradient {
        let d_q = x.q.iter().map(|q| c64(self.coeff * self.power * q.re.powf(self.power - 1.0), 0.0)).collect();
        TermGradient { d_q, ..Default::default() }
    }
}

/// `½ Σ_{AB} C_{AB} q^A q^B` over real variables, `C` symmetric.
#[derive(Debug, Clone)]
pub struct QuadraticInVariables {
    pub name: String,
    pub inputs: Vec<String>,
    pub c: DMatrix<f64>,
}

impl EnergyTerm for QuadraticInVariables {
    fn name(&self) -> &str {
        &self.name
    }
    fn inputs(&self) -> &[String] {
        &self.inputs
    }
    fn direct(&self) -> bool {
        false
    }
    fn energy(&self, x: &TermInput) -> f64 {
        let n = self.inputs.len();
        let mut e = 0.0;
        for a in 0..n {
            for b in 0..n {
                e += 0.5 * self.c[(a, b)] * x.q[a].re * x.q[b].re;
            }
        }
        e
    }
    fn gradient(&self, x: &TermInput) -> TermGradient {
        let n = self.inputs.len();
        let d_q = (0..n).map(|a| c64((0..n).map(|b| self.c[(a, b)] * x.q[b].re).sum(), 0.0)).collect();
        TermGradient { d_q, ..Default::default() }
    }
}

/// `c Σ_i q^{A_i} q^{B_i}` for conjugate pairs `(A_i, B_i)`; inputs are
/// `[A_1, B_1, A_2, B_2, …]`.
#[derive(Debug, Clone)]
pub struct ConjugatePairProduct {
    pub name: String,
    pub inputs: Vec<String>,
    pub coeff: f64,
}

impl EnergyTerm for ConjugatePairProduct {
    fn name(&self) -> &str {
        &self.name
    }
    fn inputs(&self) -> &[String] {
        &self.inputs
    }
    fn direct(&self) -> bool {
        false
    }
    fn energy(&self, x: &TermInput) -> f64 {
        x.q.chunks(2).map(|p| self.coeff * (p[0] * p[1]).re).sum()
    }
    fn gradient(&self, x: &TermInput) -> TermGradient {
        let d_q = x.q.chunks(2).flat_map(|p| [p[1] * self.coeff, p[0] * self.coeff]).collect();
        TermGradient { d_q, ..Default::default() }
    }
}

/// `c Σ_{(k,ℓ)} |κ_{kℓ}|²` over listed index pairs, read directly from κ.
#[derive(Debug, Clone)]
pub struct DirectPairingEnergy {
    pub name: String,
    pub pairs: Vec<(usize, usize)>,
    pub coeff: f64,
}

impl EnergyTerm for DirectPairingEnergy {
    fn name(&self) -> &str {
        &self.name
    }
    fn inputs(&self) -> &[String] {
        &[]
    }
    fn direct(&self) -> bool {
        true
    }
    fn energy(&self, x: &TermInput) -> f64 {
        self.pairs.iter().map(|&(k, l)| self.coeff * x.kappa[(k, l)].norm_sqr()).sum()
    }
    fn gradient(&self, x: &TermInput) -> TermGradient {
        let m = x.kappa.nrows();
        let mut d = CMat::zeros(m, m);
        for &(k, l) in &self.pairs {
            d[(k, l)] += x.kappa[(k, l)] * self.coeff;
        }
        TermGradient { d_kappa_conj: Some(d), ..Default::default() }
    }
}

/// A partitioned functional: catalog of variables, principal set `Q`, and the
/// irregular and regular energy terms.
#[derive(Debug, Clone)]
pub struct KSFunctional {
    m: usize,
    pairing: bool,
    catalog: Vec<PrincipalVariable>,
    principal: Vec<String>,
    irregular: Vec<Arc<dyn EnergyTerm>>,
    regular: Vec<Arc<dyn EnergyTerm>>,
}

/// Output of [`ks_fields`] and [`ksbdg_fields`].
#[derive(Debug, Clone)]
pub struct KsFields {
    pub energy: f64,
    /// `q^A = Q^A[ϱ, κ]` in principal order.
    pub q: Vec<C64>,
    /// `Λ_A = ∂E_irr/∂q^A + ∂E_reg/∂q^A`.
    pub lambda: Vec<C64>,
    /// `Γ^KS = Σ_A Λ_A ∂Q^A/∂ϱ` in field index order.
    pub gamma: HermitianMatrix,
    pub h: HermitianMatrix,
    /// Antisymmetric pairing field; zero for functionals without pairing.
    pub delta: CMat,
}

impl KSFunctional {
    pub fn new(
        m: usize,
        pairing: bool,
        catalog: Vec<PrincipalVariable>,
        principal: Vec<String>,
        irregular: Vec<Arc<dyn EnergyTerm>>,
        regular: Vec<Arc<dyn EnergyTerm>>,
    ) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, v) in catalog.iter().enumerate() {
            if seen.insert(v.label().to_string(), i).is_some() {
                return Err(Error::Config(format!("duplicate variable label `{}`", v.label())));
            }
        }
        let mut pset = std::collections::HashSet::new();
        for p in &principal {
            if !seen.contains_key(p) {
                return Err(Error::Label(p.clone()));
            }
            if !pset.insert(p.clone()) {
                return Err(Error::Config(format!("principal label `{p}` listed twice")));
            }
        }
        for t in irregular.iter().chain(&regular) {
            for inp in t.inputs() {
                if !seen.contains_key(inp) {
                    return Err(Error::Label(inp.clone()));
                }
            }
        }
        for t in &regular {
            if t.direct() {
                return Err(Error::Config(format!("regular term `{}` reads the densities directly", t.name())));
            }
            if let Some(bad) = t.inputs().iter().find(|l| !pset.contains(*l)) {
                return Err(Error::Config(format!(
                    "regular term `{}` reads `{bad}`, which is not a principal variable",
                    t.name()
                )));
            }
        }
        let f = Self { m, pairing, catalog, principal, irregular, regular };
        f.check_conjugates()?;
        Ok(f)
    }

    pub fn orbitals(&self) -> usize {
        self.m
    }

    pub fn has_pairing(&self) -> bool {
        self.pairing
    }

    pub fn catalog(&self) -> &[PrincipalVariable] {
        &self.catalog
    }

    pub fn principal(&self) -> &[String] {
        &self.principal
    }

    pub fn irregular_terms(&self) -> &[Arc<dyn EnergyTerm>] {
        &self.irregular
    }

    pub fn regular_terms(&self) -> &[Arc<dyn EnergyTerm>] {
        &self.regular
    }

    fn variable(&self, label: &str) -> Option<&PrincipalVariable> {
        self.catalog.iter().find(|v| v.label() == label)
    }

    fn check_conjugates(&self) -> Result<()> {
        for p in &self.principal {
            let v = self.variable(p).expect("validated label");
            if v.is_real() {
                continue;
            }
            let ok = self
                .principal
                .iter()
                .any(|o| v.is_conjugate_of(self.variable(o).expect("validated label")));
            if !ok {
                return Err(Error::ConjugateMissing(p.clone()));
            }
        }
        Ok(())
    }

    /// Composed energy `E^KS[ϱ, κ; Q[ϱ, κ]]`.
    pub fn energy(&self, rho: &CMat, kappa: &CMat) -> f64 {
        let values = self.values(rho, kappa);
        self.irregular
            .iter()
            .chain(&self.regular)
            .map(|t| {
                let q: Vec<C64> = t.inputs().iter().map(|l| values[l]).collect();
                t.energy(&TermInput { rho, kappa, q: &q })
            })
            .sum()
    }

    fn values(&self, rho: &CMat, kappa: &CMat) -> HashMap<String, C64> {
        let mut out = HashMap::new();
        for t in self.irregular.iter().chain(&self.regular) {
            for l in t.inputs() {
                if !out.contains_key(l) {
                    out.insert(l.clone(), self.variable(l).expect("validated label").value(rho, kappa));
                }
            }
        }
        for l in &self.principal {
            if !out.contains_key(l) {
                out.insert(l.clone(), self.variable(l).expect("validated label").value(rho, kappa));
            }
        }
        out
    }

    fn evaluate(&self, rho: &CMat, kappa: &CMat) -> Result<KsFields> {
        let m = self.m;
        if rho.nrows() != m || rho.ncols() != m || kappa.nrows() != m || kappa.ncols() != m {
            return Err(Error::Dimension(format!("functional expects {m}x{m} densities")));
        }
        self.check_conjugates()?;
        let values = self.values(rho, kappa);
        let index: HashMap<&str, usize> = self.principal.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut lambda = vec![C64::default(); self.principal.len()];
        let mut g_direct = CMat::zeros(m, m);
        let mut k_direct = CMat::zeros(m, m);
        let mut energy = 0.0;
        let mut g_chain = CMat::zeros(m, m);
        let mut k_chain = CMat::zeros(m, m);

        for t in self.irregular.iter().chain(&self.regular) {
            let q: Vec<C64> = t.inputs().iter().map(|l| values[l]).collect();
            let x = TermInput { rho, kappa, q: &q };
            energy += t.energy(&x);
            let grad = t.gradient(&x);
            if let Some(d) = grad.d_rho {
                g_direct += d;
            }
            if let Some(d) = grad.d_kappa_conj {
                k_direct += d;
            }
            for (label, dq) in t.inputs().iter().zip(grad.d_q) {
                match index.get(label.as_str()) {
                    Some(&a) => lambda[a] += dq,
                    None => {
                        let d = self.variable(label).expect("validated label").derivatives(rho, kappa);
                        g_chain += d.d_rho * dq;
                        k_chain += d.d_kappa_conj * dq;
                    }
                }
            }
        }

        let mut g_gamma = CMat::zeros(m, m);
        let mut k_gamma = CMat::zeros(m, m);
        for (label, lam) in self.principal.iter().zip(&lambda) {
            let d = self.variable(label).expect("validated label").derivatives(rho, kappa);
            g_gamma += d.d_rho * *lam;
            k_gamma += d.d_kappa_conj * *lam;
        }

        let gamma = g_gamma.transpose();
        let h = (g_direct + g_chain).transpose() + &gamma;
        let scale = frobenius(&h).max(1.0);
        if hermiticity_defect(&h) > 1e-10 * scale || hermiticity_defect(&gamma) > 1e-10 * scale {
            return Err(Error::ConjugateMissing(
                "field is not hermitian; a complex principal variable lacks its conjugate".into(),
            ));
        }
        let k_total = k_direct + k_chain + k_gamma;
        let delta = &k_total - k_total.transpose();
        let q = self.principal.iter().map(|l| values[l]).collect();
        Ok(KsFields {
            energy,
            q,
            lambda,
            gamma: HermitianMatrix::from_upper(gamma)?,
            h: HermitianMatrix::from_upper(h)?,
            delta,
        })
    }
}

/// KS fields at `ϱ` with `κ = 0`.
pub fn ks_fields(f: &KSFunctional, rho: &CMat) -> Result<KsFields> {
    f.evaluate(rho, &CMat::zeros(f.m, f.m))
}

/// KSBdG fields at `(ϱ, κ)`.
pub fn ksbdg_fields(f: &KSFunctional, rho: &CMat, kappa: &CMat) -> Result<KsFields> {
    f.evaluate(rho, kappa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Add the labels to `Q` and move the irregular terms that now read only
    /// principal variables into the regular part.
    ToRegular,
    /// Drop the labels from `Q` and move every regular term that reads them
    /// into the irregular part.
    ToIrregular,
}

/// Moves variables between `Q` and the irregular part without changing the
/// composed functional of `(ϱ, κ)`.
pub fn repartition(f: &KSFunctional, labels: &[&str], direction: Direction) -> Result<KSFunctional> {
    for l in labels {
        let known = match direction {
            Direction::ToRegular => f.variable(l).is_some(),
            Direction::ToIrregular => f.principal.iter().any(|p| p == l),
        };
        if !known {
            return Err(Error::Label(l.to_string()));
        }
    }
    let moved = |t: &Arc<dyn EnergyTerm>| t.inputs().iter().any(|i| labels.contains(&i.as_str()));
    let mut principal = f.principal.clone();
    let mut irregular = Vec::new();
    let mut regular = Vec::new();
    match direction {
        Direction::ToIrregular => {
            principal.retain(|p| !labels.contains(&p.as_str()));
            irregular.extend(f.irregular.iter().cloned());
            for t in &f.regular {
                if moved(t) {
                    irregular.push(t.clone());
                } else {
                    regular.push(t.clone());
                }
            }
        }
        Direction::ToRegular => {
            for l in labels {
                if !principal.iter().any(|p| p == l) {
                    principal.push(l.to_string());
                }
            }
            regular.extend(f.regular.iter().cloned());
            for t in &f.irregular {
                let all_principal = t.inputs().iter().all(|i| principal.contains(i));
                if !t.direct() && !t.inputs().is_empty() && all_principal && moved(t) {
                    regular.push(t.clone());
                } else {
                    irregular.push(t.clone());
                }
            }
        }
    }
    KSFunctional::new(f.m, f.pairing, f.catalog.clone(), principal, irregular, regular)
}

/// HF functional of a Hamiltonian: everything irregular, `Q` empty.
pub fn hf_from_hamiltonian(h: &TwoBodyHamiltonian) -> KSFunctional {
    let mut irr: Vec<Arc<dyn EnergyTerm>> =
        vec![Arc::new(OneBodyEnergy { name: "one-body".into(), t: h.t().as_matrix().clone() })];
    if h.is_interacting() {
        irr.push(Arc::new(MeanFieldEnergy { vbar: h.vbar().clone() }));
    }
    KSFunctional::new(h.orbitals(), false, Vec::new(), Vec::new(), irr, Vec::new()).expect("valid HF functional")
}

/// HFB functional of a Hamiltonian.
pub fn hfb_from_hamiltonian(h: &TwoBodyHamiltonian) -> KSFunctional {
    let mut f = hf_from_hamiltonian(h);
    f.pairing = true;
    if h.is_interacting() {
        f.irregular.push(Arc::new(PairingEnergy { vbar: h.vbar().clone() }));
    }
    f
}

/// `E_irr = tr(tϱ)`, `Q = {ϱ_{kk}}`, `E_reg = ½ Σ V̄_{kk'kk'} ϱ_{kk} ϱ_{k'k'}`:
/// the direct diagonal part of the interaction as a function of occupations.
pub fn ks_partitioned(h: &TwoBodyHamiltonian) -> KSFunctional {
    let m = h.orbitals();
    let catalog: Vec<PrincipalVariable> = (0..m).map(|k| PrincipalVariable::matrix_element(k, k)).collect();
    let labels: Vec<String> = catalog.iter().map(|v| v.label().to_string()).collect();
    let c = DMatrix::from_fn(m, m, |k, kp| h.vbar().get(k, kp, k, kp).re);
    let irr: Vec<Arc<dyn EnergyTerm>> =
        vec![Arc::new(OneBodyEnergy { name: "one-body".into(), t: h.t().as_matrix().clone() })];
    let reg: Vec<Arc<dyn EnergyTerm>> =
        vec![Arc::new(QuadraticInVariables { name: "occupation-interaction".into(), inputs: labels.clone(), c })];
    KSFunctional::new(m, false, catalog, labels, irr, reg).expect("valid partitioned functional")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edf::hf::{hf_energy_and_field, hfb_energy_and_fields};
    use crate::matrix::{antisymmetry_defect, random, SPBasis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_q_linear_functional_gives_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random::hermitian(&mut rng, 4);
        let h = TwoBodyHamiltonian::one_body(SPBasis::indexed(4).unwrap(), t.clone()).unwrap();
        let f = hf_from_hamiltonian(&h);
        let rho = random::density(&mut rng, 4, 0.0, 1.0);
        let out = ks_fields(&f, &rho).unwrap();
        assert!(frobenius(&(out.h.as_matrix() - t.as_matrix())) < 1e-15);
        assert!(out.q.is_empty());
    }

    #[test]
    fn quadratic_site_density_potential() {
        let m = 3;
        let c = 0.7;
        let catalog: Vec<_> = (0..m).map(|x| PrincipalVariable::local_density(x, 1.0)).collect();
        let labels: Vec<String> = catalog.iter().map(|v| v.label().to_string()).collect();
        let reg: Vec<Arc<dyn EnergyTerm>> =
            vec![Arc::new(PowerOfVariables { name: "c rho^2".into(), inputs: labels.clone(), coeff: c, power: 2.0 })];
        let f = KSFunctional::new(m, false, catalog, labels, Vec::new(), reg).unwrap();
        let rho = HermitianMatrix::from_real_diagonal(&[0.2, 0.5, 0.9]).into_inner();
        let out = ks_fields(&f, &rho).unwrap();
        for x in 0..m {
            let expect = 2.0 * c * rho[(x, x)].re;
            assert!((out.gamma.as_matrix()[(x, x)].re - expect).abs() < 1e-15);
        }
        assert!((out.energy - c * (0.04 + 0.25 + 0.81)).abs() < 1e-15);
    }

    #[test]
    fn hf_preset_matches_direct_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = TwoBodyHamiltonian::pairing(3, 1.0, 0.4).unwrap();
        let rho = random::density(&mut rng, 6, 0.0, 1.0);
        let kappa = random::antisymmetric(&mut rng, 6) * c64(0.1, 0.0);
        let (e, hf, delta) = hfb_energy_and_fields(&h, &rho, &kappa);
        let out = ksbdg_fields(&hfb_from_hamiltonian(&h), &rho, &kappa).unwrap();
        assert!((out.energy - e).abs() < 1e-13);
        assert!(frobenius(&(out.h.as_matrix() - hf.as_matrix())) < 1e-13);
        assert!(frobenius(&(&out.delta - delta)) < 1e-13);
        assert!(antisymmetry_defect(&out.delta) < 1e-14);
        let (e2, _) = hf_energy_and_field(&h, &rho);
        assert!((ks_fields(&hf_from_hamiltonian(&h), &rho).unwrap().energy - e2).abs() < 1e-13);
    }

    #[test]
    fn missing_conjugate_detected() {
        let catalog = vec![PrincipalVariable::matrix_element(0, 1), PrincipalVariable::matrix_element(1, 0)];
        let err = KSFunctional::new(2, false, catalog, vec!["rho[1,2]".into()], Vec::new(), Vec::new()).unwrap_err();
        assert!(matches!(err, Error::ConjugateMissing(_)));
    }

    #[test]
    fn unknown_label_rejected() {
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 2.0).unwrap();
        let f = ks_partitioned(&h);
        assert!(matches!(repartition(&f, &["nope"], Direction::ToIrregular), Err(Error::Label(_))));
    }

    #[test]
    fn repartition_preserves_composed_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = TwoBodyHamiltonian::hubbard_chain(2, 1.0, 2.0).unwrap();
        let f = ks_partitioned(&h);
        let all: Vec<&str> = f.principal().iter().map(String::as_str).collect();
        let g = repartition(&f, &all, Direction::ToIrregular).unwrap();
        assert!(g.principal().is_empty() && g.regular_terms().is_empty());
        let same = repartition(&f, &[], Direction::ToIrregular).unwrap();
        assert_eq!(same.principal(), f.principal());
        let back = repartition(&g, &all, Direction::ToRegular).unwrap();
        assert_eq!(back.regular_terms().len(), 1);
        for _ in 0..20 {
            let rho = random::density(&mut rng, 4, 0.0, 1.0);
            let a = ks_fields(&f, &rho).unwrap();
            let b = ks_fields(&g, &rho).unwrap();
            assert!((a.energy - b.energy).abs() <= 1e-12);
            assert!(frobenius(&(a.h.as_matrix() - b.h.as_matrix())) <= 1e-12);
        }
    }
}
