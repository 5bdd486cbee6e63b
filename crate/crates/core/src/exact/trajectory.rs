use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which probability a trajectory records.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryLabel {
    P_QA,
    P_SA,
    P_QA_stationary,
    P_SA_stationary,
    P_QA_imaginary,
}

impl fmt::Display for TrajectoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Ground-state probability sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTrajectory {
    pub label: TrajectoryLabel,
    pub samples: Vec<(f64, f64)>,
}

impl OverlapTrajectory {
    pub fn new(label: TrajectoryLabel) -> Self {
        Self { label, samples: Vec::new() }
    }

    /// Append a sample. Rounding can push `p` a hair outside `[0, 1]`;
    /// it is clamped.
    pub(crate) fn push(&mut self, t: f64, p: f64) {
        debug_assert!(self.samples.last().map_or(true, |&(last, _)| t > last));
        self.samples.push((t, p.clamp(0.0, 1.0)));
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        self.samples.last().copied()
    }

    /// Value at the sample whose time equals `t` to relative `1e-12`.
    pub fn at(&self, t: f64) -> Option<f64> {
        self.samples.iter().find(|s| (s.0 - t).abs() <= 1e-12 * t.abs().max(1.0)).map(|s| s.1)
    }

    /// CSV with header `t,p,label`; floats in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,p,label")?;
        for &(t, p) in &self.samples {
            writeln!(out, "{t:?},{p:?},{}", self.label)?;
        }
        Ok(())
    }
}

/// `per_decade` points per factor of ten from `lo` to `hi`, both included.
pub fn log_spaced(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || per_decade == 0 {
        return Err(Error::InvalidParameter(format!("log grid needs 0 < lo < hi and per_decade > 0, got {lo}, {hi}, {per_decade}")));
    }
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).ceil().max(1.0) as usize;
    let mut v: Vec<f64> = (0..n).map(|k| lo * 10f64.powf(decades * k as f64 / n as f64)).collect();
    v.push(hi);
    Ok(v)
}

/// Check a sample grid against an integration window.
pub(crate) fn validate_samples(t_start: f64, t_end: f64, samples: &[f64]) -> Result<()> {
    if !t_start.is_finite() {
        return Err(Error::InvalidParameter("integration start must be finite; set t0 on the schedule".into()));
    }
    if !(t_end >= t_start) {
        return Err(Error::InvalidParameter(format!("t_end {t_end} precedes start {t_start}")));
    }
    let mut prev = f64::NEG_INFINITY;
    for &t in samples {
        if !(t > prev) || t < t_start || t > t_end {
            return Err(Error::InvalidParameter(format!(
                "sample times must increase strictly within [{t_start}, {t_end}], got {t}"
            )));
        }
        prev = t;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_density() {
        let g = log_spaced(1.0, 1000.0, 5).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 1.0);
        assert_eq!(*g.last().unwrap(), 1000.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(log_spaced(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut tr = OverlapTrajectory::new(TrajectoryLabel::P_SA);
        tr.push(0.5, 0.25);
        tr.push(1.0, 1.0 + 1e-15);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,p,label\n0.5,0.25,P_SA\n1.0,1.0,P_SA\n");
    }
}
