//! `E^HK[q]` along a one-parameter family of constraint values.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Result;
use crate::fock::{constrained_search_raw, FockBasis, SearchOptions, StateObservable, TwoBodyHamiltonian};
use crate::search::curve::{CurvePoint, ScanCurve};

/// Runs the constrained search at every grid value of a single observable.
/// Points whose residual exceeds `opts.residual_tol` stay in the curve with
/// the infeasible flag. `argmin` holds the achieved observable value and
/// `branch` the winning restart.
pub fn hk_scan(
    h: &TwoBodyHamiltonian,
    basis: &Arc<FockBasis>,
    q: &StateObservable,
    grid: &[f64],
    opts: &SearchOptions,
) -> Result<ScanCurve> {
    let points = grid
        .par_iter()
        .map(|&g| {
            let r = constrained_search_raw(h, basis, std::slice::from_ref(q), &[g], opts)?;
            Ok(CurvePoint {
                param: g,
                value: r.energy,
                argmin: Some(r.achieved[0]),
                branch: format!("r{}", r.restart),
                residual: r.residual,
                feasible: r.residual <= opts.residual_tol,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ScanCurve::new(points)
}
