//! Two-step minimization, kink detection, constrained-search scans and
//! Slater-representability probes.

pub mod appendix;
pub mod curve;
pub mod hk;
pub mod kink;
pub mod probe;

pub use appendix::{direct_min_2d, phi, phi_c_curve, phi_inner_min, two_step_min, Branch, Minimum};
pub use curve::{CurvePoint, ScanCurve, CSV_HEADER};
pub use hk::hk_scan;
pub use kink::{kink_scan, kink_scan_samples, Kink, KinkReport};
pub use probe::{density_observables, ks_representability_probe, occupation_observables, ProbeOptions, ProbeResult};
