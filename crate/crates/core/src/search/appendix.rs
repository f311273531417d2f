//! Two-step minimization of `φ(x, y) = 3x⁴ − 8x³y + 6x²(y² − d²)`.
//!
//! Minimizing over `x` first gives `φ_c(y)`, which is continuous but has
//! kinks where the inner minimizer jumps between stationary branches.

use crate::error::{Error, Result};
use crate::optimize::brent_min;
use crate::search::curve::{CurvePoint, ScanCurve};

/// Stationary branch of `∂φ/∂x = 12x((x − y)² − d²) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `x = 0`.
    C0,
    /// `x = y + d`.
    CPlus,
    /// `x = y − d`.
    CMinus,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::C0 => "c0",
            Branch::CPlus => "c+",
            Branch::CMinus => "c-",
        }
    }
}

fn check_d(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("d must be positive, got {d}")))
    }
}

pub fn phi(x: f64, y: f64, d: f64) -> Result<f64> {
    check_d(d)?;
    Ok(phi_unchecked(x, y, d))
}

fn phi_unchecked(x: f64, y: f64, d: f64) -> f64 {
    let x2 = x * x;
    3.0 * x2 * x2 - 8.0 * x2 * x * y + 6.0 * x2 * (y * y - d * d)
}

/// `φ_c(y) = min_x φ(x, y)` with the minimizing `x` and its branch. Exact ties
/// resolve in the order `c0`, `c+`, `c−`.
pub fn phi_inner_min(y: f64, d: f64) -> Result<(f64, f64, Branch)> {
    check_d(d)?;
    let mut best = (0.0, 0.0, Branch::C0);
    for (x, b) in [(y + d, Branch::CPlus), (y - d, Branch::CMinus)] {
        let v = phi_unchecked(x, y, d);
        if v < best.0 {
            best = (v, x, b);
        }
    }
    Ok(best)
}

/// `φ_c` sampled on `points` evenly spaced values of `[lo, hi]`.
pub fn phi_c_curve(d: f64, lo: f64, hi: f64, points: usize) -> Result<ScanCurve> {
    check_d(d)?;
    if points < 2 || !(hi > lo) {
        return Err(Error::Domain("curve needs at least two points on a non-empty interval".into()));
    }
    let step = (hi - lo) / (points - 1) as f64;
    let pts = (0..points)
        .map(|i| {
            let y = if i == points - 1 { hi } else { lo + step * i as f64 };
            let (v, x, b) = phi_inner_min(y, d)?;
            Ok(CurvePoint::feasible(y, v, x, b.label()))
        })
        .collect::<Result<Vec<_>>>()?;
    ScanCurve::new(pts)
}

/// Minimum of a two-step or direct minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub value: f64,
    /// Every minimizer `(x, y)` found, sorted by `y`.
    pub points: Vec<(f64, f64)>,
}

/// `min_y φ_c(y)` over `[−5d, 5d]`: a grid of step `10⁻³ d`, then Brent
/// refinement around every grid-local minimum that ties the best value.
pub fn two_step_min(d: f64) -> Result<Minimum> {
    check_d(d)?;
    let h = 1e-3 * d;
    let n = 10_000;
    let ys: Vec<f64> = (0..=n).map(|i| -5.0 * d + h * i as f64).collect();
    let vals: Vec<f64> = ys.iter().map(|&y| phi_inner_min(y, d).map(|r| r.0)).collect::<Result<_>>()?;
    let mut cands = Vec::new();
    for i in 1..n {
        if vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] {
            let f = |y: f64| phi_inner_min(y, d).map(|r| r.0).unwrap_or(f64::INFINITY);
            let (y, v) = brent_min(f, ys[i - 1], ys[i + 1], 1e-12 * d, 200);
            cands.push((y, v));
        }
    }
    select_minima(cands, d, |y| phi_inner_min(y, d).map(|r| r.1).unwrap_or(f64::NAN))
}

fn select_minima(cands: Vec<(f64, f64)>, d: f64, x_of: impl Fn(f64) -> f64) -> Result<Minimum> {
    let value = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    if !value.is_finite() {
        return Err(Error::Invariant("no interior minimum found".into()));
    }
    let tie = 1e-9 * d.powi(4);
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (y, v) in cands {
        if v <= value + tie && points.iter().all(|p| (p.1 - y).abs() > 1e-3 * d) {
            points.push((x_of(y), y));
        }
    }
    points.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(Minimum { value, points })
}

/// `min_{x,y} φ` by Newton iteration from a `21 × 21` grid of starts on
/// `[−5d, 5d]²`, with no reference to the inner minimization.
pub fn direct_min_2d(d: f64) -> Result<Minimum> {
    check_d(d)?;
    let grad = |x: f64, y: f64| {
        let gx = 12.0 * x.powi(3) - 24.0 * x * x * y + 12.0 * x * (y * y - d * d);
        let gy = -8.0 * x.powi(3) + 12.0 * x * x * y;
        (gx, gy)
    };
    let hess = |x: f64, y: f64| {
        let hxx = 36.0 * x * x - 48.0 * x * y + 12.0 * (y * y - d * d);
        let hxy = -24.0 * x * x + 24.0 * x * y;
        let hyy = 12.0 * x * x;
        (hxx, hxy, hyy)
    };
    let mut cands = Vec::new();
    for i in 0..=20 {
        for j in 0..=20 {
            let (mut x, mut y) = (-5.0 * d + 0.5 * d * i as f64, -5.0 * d + 0.5 * d * j as f64);
            for _ in 0..200 {
                let (gx, gy) = grad(x, y);
                let (a, b, c) = hess(x, y);
                let det = a * c - b * b;
                // Newton only where the Hessian is positive definite, else a
                // scaled gradient step.
                let (dx, dy) = if a > 0.0 && det > 1e-12 * (a * a + c * c) {
                    ((c * gx - b * gy) / det, (a * gy - b * gx) / det)
                } else {
                    let s = 1e-3 / (1.0 + a.abs() + c.abs());
                    (s * gx, s * gy)
                };
                let f0 = phi_unchecked(x, y, d);
                let mut t = 1.0;
                while t > 1e-12 && phi_unchecked(x - t * dx, y - t * dy, d) > f0 {
                    t *= 0.5;
                }
                x -= t * dx;
                y -= t * dy;
                if (t * dx).hypot(t * dy) < 1e-15 * d {
                    break;
                }
            }
            let (gx, gy) = grad(x, y);
            let (a, b, c) = hess(x, y);
            if gx.hypot(gy) < 1e-8 * d.powi(3) && a > 0.0 && a * c - b * b > 0.0 {
                cands.push((x, y, phi_unchecked(x, y, d)));
            }
        }
    }
    let value = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let tie = 1e-9 * d.powi(4);
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (x, y, v) in cands {
        if v <= value + tie && points.iter().all(|p| (p.0 - x).hypot(p.1 - y) > 1e-3 * d) {
            points.push((x, y));
        }
    }
    points.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(Minimum { value, points })
}
