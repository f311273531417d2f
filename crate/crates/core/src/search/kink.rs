//! Detection of slope discontinuities on uniformly sampled curves.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Kink {
    /// Intersection of the left and right tangent lines.
    pub location: f64,
    pub left_slope: f64,
    pub right_slope: f64,
    /// `|right_slope − left_slope|`.
    pub jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinkReport {
    pub kinks: Vec<Kink>,
    pub step: f64,
    pub threshold: f64,
}

impl KinkReport {
    pub fn locations(&self) -> Vec<f64> {
        self.kinks.iter().map(|k| k.location).collect()
    }
}

/// Half-width of the sliding median used to estimate smooth curvature.
const MEDIAN_HALF_WIDTH: usize = 5;

/// Samples `f` on `[a, b]` with step `h` and reports kinks. Without an explicit
/// threshold the default is `50 κ h`, where `κ` is the largest sliding-median
/// curvature (so isolated kink spikes do not inflate it), plus a round-off
/// floor.
pub fn kink_scan<F: Fn(f64) -> f64>(f: F, interval: (f64, f64), h: f64, threshold: Option<f64>) -> Result<KinkReport> {
    let (a, b) = interval;
    if !(h > 0.0) || !(b > a) {
        return Err(Error::Domain("kink scan needs h > 0 and a non-empty interval".into()));
    }
    let n = ((b - a) / h).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    kink_scan_samples(&xs, &ys, threshold)
}

/// Kink detection on samples `ys` over a uniform ascending grid `xs`.
pub fn kink_scan_samples(xs: &[f64], ys: &[f64], threshold: Option<f64>) -> Result<KinkReport> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Dimension("kink scan needs at least three matching samples".into()));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Domain("curve must be finite on the scan interval".into()));
    }
    let n = xs.len();
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    let slope = |i: usize| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    // jumps[i] = |forward − backward| slope at interior point i + 1.
    let jumps: Vec<f64> = (1..n - 1).map(|i| (slope(i) - slope(i - 1)).abs()).collect();
    let threshold = threshold.unwrap_or_else(|| {
        let curv: Vec<f64> = jumps.iter().map(|j| j / h).collect();
        let kappa = (0..curv.len())
            .map(|i| {
                let lo = i.saturating_sub(MEDIAN_HALF_WIDTH);
                let hi = (i + MEDIAN_HALF_WIDTH + 1).min(curv.len());
                let mut w = curv[lo..hi].to_vec();
                w.sort_by(f64::total_cmp);
                w[w.len() / 2]
            })
            .fold(0.0, f64::max);
        let scale = ys.iter().fold(1.0_f64, |s, y| s.max(y.abs()));
        50.0 * kappa * h + 1e3 * f64::EPSILON * scale / h
    });

    let mut kinks = Vec::new();
    let mut j = 0;
    while j < jumps.len() {
        if jumps[j] <= threshold {
            j += 1;
            continue;
        }
        // Adjacent flagged points belong to one kink lying between samples.
        let first = j + 1;
        while j + 1 < jumps.len() && jumps[j + 1] > threshold {
            j += 1;
        }
        let last = j + 1;
        j += 1;
        let left = slope(first - 1);
        let right = slope(last);
        let (xl, yl) = (xs[first], ys[first]);
        let (xr, yr) = (xs[last], ys[last]);
        let mut location = (yl - yr + right * xr - left * xl) / (right - left);
        if !location.is_finite() {
            location = 0.5 * (xl + xr);
        }
        let location = location.clamp(xl - h, xr + h);
        kinks.push(Kink { location, left_slope: left, right_slope: right, jump: (right - left).abs() });
    }
    Ok(KinkReport { kinks, step: h, threshold })
}
