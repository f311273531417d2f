//! Central finite-difference check of analytic fields against the energy.

use crate::edf::ks::{ksbdg_fields, KSFunctional};
use crate::error::Result;
use crate::matrix::{c64, CMat, C64};

/// A real functional of `(ϱ, κ)` with analytic fields `h_{kℓ} = ∂E/∂ϱ_{ℓk}`
/// and `Δ = K − Kᵀ`, `K_{kℓ} = ∂E/∂κ*_{kℓ}`.
pub trait Differentiable {
    fn orbitals(&self) -> usize;
    fn has_pairing(&self) -> bool;
    fn energy(&self, rho: &CMat, kappa: &CMat) -> f64;
    fn fields(&self, rho: &CMat, kappa: &CMat) -> Result<(CMat, CMat)>;
}

impl Differentiable for KSFunctional {
    fn orbitals(&self) -> usize {
        KSFunctional::orbitals(self)
    }
    fn has_pairing(&self) -> bool {
        KSFunctional::has_pairing(self)
    }
    fn energy(&self, rho: &CMat, kappa: &CMat) -> f64 {
        KSFunctional::energy(self, rho, kappa)
    }
    fn fields(&self, rho: &CMat, kappa: &CMat) -> Result<(CMat, CMat)> {
        let f = ksbdg_fields(self, rho, kappa)?;
        Ok((f.h.into_inner(), f.delta))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    /// `max |fd − analytic| / max(‖analytic‖∞, ‖fd‖∞)` over all components.
    pub max_rel_error: f64,
    /// A non-finite energy or field was met inside the stencil.
    pub singular: bool,
    pub components: usize,
}

impl FdReport {
    pub fn passes(&self, tol: f64) -> bool {
        !self.singular && self.max_rel_error <= tol
    }
}

/// Compares analytic fields with central differences over the real and
/// imaginary parts of `ϱ_{kℓ}` (`k ≤ ℓ`) and of the strict upper triangle of κ.
pub fn fd_gradient_check<F: Differentiable + ?Sized>(f: &F, rho: &CMat, kappa: &CMat, h_step: f64) -> FdReport {
    let m = f.orbitals();
    let singular = FdReport { max_rel_error: f64::INFINITY, singular: true, components: 0 };
    let (h, delta) = match f.fields(rho, kappa) {
        Ok(x) => x,
        Err(_) => return singular,
    };
    if h.iter().chain(delta.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return singular;
    }

    let central = |dr: &CMat, dk: &CMat| -> f64 {
        let ep = f.energy(&(rho + dr * c64(h_step, 0.0)), &(kappa + dk * c64(h_step, 0.0)));
        let em = f.energy(&(rho - dr * c64(h_step, 0.0)), &(kappa - dk * c64(h_step, 0.0)));
        (ep - em) / (2.0 * h_step)
    };
    let zero = CMat::zeros(m, m);
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for k in 0..m {
        for l in k..m {
            if k == l {
                let mut d = zero.clone();
                d[(k, k)] = c64(1.0, 0.0);
                pairs.push((central(&d, &zero), h[(k, k)].re));
                continue;
            }
            let mut d = zero.clone();
            d[(k, l)] = c64(1.0, 0.0);
            d[(l, k)] = c64(1.0, 0.0);
            pairs.push((central(&d, &zero), 2.0 * h[(k, l)].re));
            let mut d = zero.clone();
            d[(k, l)] = c64(0.0, 1.0);
            d[(l, k)] = c64(0.0, -1.0);
            pairs.push((central(&d, &zero), 2.0 * h[(k, l)].im));
            if f.has_pairing() {
                for (ph, part) in [(c64(1.0, 0.0), 0), (c64(0.0, 1.0), 1)] {
                    let mut dk = zero.clone();
                    dk[(k, l)] = ph;
                    dk[(l, k)] = -ph;
                    let an: C64 = delta[(k, l)] * 2.0;
                    pairs.push((central(&zero, &dk), if part == 0 { an.re } else { an.im }));
                }
            }
        }
    }
    if pairs.iter().any(|(fd, an)| !(fd.is_finite() && an.is_finite())) {
        return FdReport { components: pairs.len(), ..singular };
    }
    let scale = pairs.iter().fold(f64::MIN_POSITIVE, |s, (fd, an)| s.max(fd.abs()).max(an.abs()));
    let err = pairs.iter().fold(0.0_f64, |e, (fd, an)| e.max((fd - an).abs()));
    FdReport { max_rel_error: err / scale, singular: false, components: pairs.len() }
}
