//! One-parameter scan results and their CSV form.

use std::fmt::Write;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "param,value,argmin,branch,residual,flag";

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub param: f64,
    pub value: f64,
    /// Minimizer of the inner problem, when it is a single number.
    pub argmin: Option<f64>,
    /// Which branch or restart produced the value.
    pub branch: String,
    /// Constraint residual of the inner problem.
    pub residual: f64,
    pub feasible: bool,
}

impl CurvePoint {
    pub fn feasible(param: f64, value: f64, argmin: f64, branch: &str) -> Self {
        Self { param, value, argmin: Some(argmin), branch: branch.into(), residual: 0.0, feasible: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanCurve {
    points: Vec<CurvePoint>,
}

impl ScanCurve {
    /// Requires a strictly ascending grid and finite values at feasible points.
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].param > w[0].param)) {
            return Err(Error::Domain("scan grid must be strictly ascending".into()));
        }
        if let Some(p) = points.iter().find(|p| p.feasible && !p.value.is_finite()) {
            return Err(Error::Invariant(format!("non-finite value at feasible point {}", p.param)));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn params(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.param).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Lowest feasible point; ties go to the smallest parameter.
    pub fn min_feasible(&self) -> Option<&CurvePoint> {
        self.points
            .iter()
            .filter(|p| p.feasible)
            .fold(None, |best: Option<&CurvePoint>, p| match best {
                Some(b) if b.value <= p.value => Some(b),
                _ => Some(p),
            })
    }

    /// CSV with a header row; numbers use the shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for p in &self.points {
            let argmin = p.argmin.map(|x| format!("{x:?}")).unwrap_or_default();
            let flag = if p.feasible { "ok" } else { "infeasible" };
            let _ = writeln!(s, "{:?},{:?},{},{},{:?},{}", p.param, p.value, argmin, p.branch, p.residual, flag);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips() {
        let c = ScanCurve::new(vec![
            CurvePoint::feasible(0.1, 1.0 / 3.0, -2.0, "c+"),
            CurvePoint { param: 0.2, value: 5.0, argmin: None, branch: "r1".into(), residual: 1e-3, feasible: false },
        ])
        .unwrap();
        let csv = c.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert!(lines.next().unwrap().ends_with(",,r1,0.001,infeasible"));
        assert_eq!(c.min_feasible().unwrap().param, 0.1);
    }

    #[test]
    fn rejects_unsorted_grid() {
        let p = |x| CurvePoint::feasible(x, 0.0, 0.0, "c0");
        assert!(ScanCurve::new(vec![p(1.0), p(1.0)]).is_err());
    }
}
