//! Post-processing of trajectories: power-law fits of `1 - P(t)` and
//! side-by-side comparison of two methods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln t, ln(1 - p))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub t_lo: f64,
    pub t_hi: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Samples in the window dropped because `p ≥ 1`.
    pub n_excluded: usize,
}

/// Minimum number of usable samples for [`fit_one_over_t`].
pub const MIN_FIT_POINTS: usize = 10;

/// Fit `1 - p ∝ t^slope` over `t_lo ≤ t ≤ t_hi`.
///
/// `1 - p = 5/t` gives a slope of −1:
///
/// ```
/// use qanneal::analysis::fit_one_over_t;
/// let pts: Vec<(f64, f64)> = (0..20).map(|k| {
///     let t = 100.0 * 10f64.powf(k as f64 / 19.0);
///     (t, 1.0 - 5.0 / t)
/// }).collect();
/// let fit = fit_one_over_t(&pts, (100.0, 1000.0)).unwrap();
/// assert!((fit.slope + 1.0).abs() < 1e-9);
/// ```
pub fn fit_one_over_t(samples: &[(f64, f64)], window: (f64, f64)) -> Result<FitReport> {
    let (t_lo, t_hi) = window;
    if !(t_lo > 0.0 && t_lo < t_hi) {
        return Err(Error::InvalidParameter(format!("fit window must satisfy 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]")));
    }
    let in_window: Vec<(f64, f64)> = samples.iter().copied().filter(|&(t, _)| t >= t_lo && t <= t_hi).collect();
    let usable: Vec<(f64, f64)> = in_window
        .iter()
        .filter(|&&(_, p)| p < 1.0)
        .map(|&(t, p)| (t.ln(), (1.0 - p).ln()))
        .collect();
    let excluded = in_window.len() - usable.len();
    if excluded > 0 {
        log::warn!("fit: {excluded} samples with p >= 1 excluded");
    }
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidParameter(format!(
            "fit needs at least {MIN_FIT_POINTS} samples with p < 1 in the window, got {}",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit window holds a single distinct time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(FitReport { t_lo, t_hi, slope, intercept, r_squared, n_points: usable.len(), n_excluded: excluded })
}

/// A time series with the cost factor used for `t' = factor · t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub time_factor: f64,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, time_factor: f64) -> Self {
        Self { label: label.into(), points, time_factor }
    }

    /// Read a CSV written by this crate.
    ///
    /// Trajectory files (`t,p,label`) give `(t, p)`. Monte Carlo records
    /// give `(mc_step, column)`, where `column` defaults to the ground-state
    /// fraction `ground_hits / n_replicas`, and the time factor is read
    /// from `rescaled_time / mc_step`. Rows at `t = 0` are skipped.
    pub fn from_csv(text: &str, label: impl Into<String>, column: Option<&str>) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header: Vec<&str> = lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "empty CSV".into() })?.split(',').collect();
        let col = |name: &str| header.iter().position(|h| h.trim() == name);
        let (time, rescaled) = match (col("t"), col("mc_step")) {
            (Some(t), _) => (t, None),
            (None, Some(s)) => (s, col("rescaled_time")),
            _ => return Err(Error::Parse { line: 1, msg: "CSV has neither `t` nor `mc_step`".into() }),
        };
        let value = match column {
            Some(name) => Some(col(name).ok_or_else(|| Error::Parse { line: 1, msg: format!("no column `{name}`") })?),
            None => col("p"),
        };
        let ratio = match (value, col("ground_hits"), col("n_replicas")) {
            (Some(_), _, _) => None,
            (None, Some(h), Some(r)) => Some((h, r)),
            _ => return Err(Error::Parse { line: 1, msg: "choose a value column".into() }),
        };
        let mut points = Vec::new();
        let mut time_factor = 1.0;
        for (k, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            let num = |i: usize| -> Result<f64> {
                fields
                    .get(i)
                    .and_then(|f| f.trim().parse().ok())
                    .ok_or_else(|| Error::Parse { line: k + 2, msg: format!("bad number in column {}", i + 1) })
            };
            let t = num(time)?;
            if t <= 0.0 {
                continue;
            }
            let v = match (value, ratio) {
                (Some(i), _) => num(i)?,
                (None, Some((h, r))) => num(h)? / num(r)?.max(1.0),
                (None, None) => unreachable!(),
            };
            if let Some(r) = rescaled {
                time_factor = num(r)? / t;
            }
            points.push((t, v));
        }
        Ok(Self { label: label.into(), points, time_factor })
    }

    fn times(&self, rescale: bool) -> Vec<f64> {
        let f = if rescale { self.time_factor } else { 1.0 };
        self.points.iter().map(|p| p.0 * f).collect()
    }
}

/// One aligned time of a [`Comparison`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label_a: String,
    pub label_b: String,
    pub rescaled: bool,
    /// Whether `b` was interpolated (linearly in `ln t`) onto `a`'s grid.
    pub resampled: bool,
    pub rows: Vec<ComparisonRow>,
    /// Times where `a - b` changes sign, interpolated in `ln t`.
    pub crossings: Vec<f64>,
}

impl Comparison {
    pub const CSV_HEADER: &'static str = "t,a,b,diff";

    pub fn final_row(&self) -> Option<&ComparisonRow> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# a = {}, b = {}, rescaled = {}, resampled = {}\n", self.label_a, self.label_b, self.rescaled, self.resampled));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.t, r.a, r.b, r.diff));
        }
        out
    }
}

/// Align `b` to `a` in `t` (or `t'` when `rescale`) and tabulate `a - b`.
///
/// Grids that differ are bridged by linear interpolation in `ln t`; only
/// the overlap of the two time ranges is reported.
pub fn compare(a: &Series, b: &Series, rescale: bool) -> Result<Comparison> {
    let ta = a.times(rescale);
    let tb = b.times(rescale);
    for (s, t) in [(a, &ta), (b, &tb)] {
        if t.is_empty() || t.windows(2).any(|w| w[0] >= w[1]) || t.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidParameter(format!("series `{}` needs positive, increasing times", s.label)));
        }
    }
    let resampled = ta != tb;
    let (lo, hi) = (tb[0], tb[tb.len() - 1]);
    let mut rows = Vec::new();
    for (k, &t) in ta.iter().enumerate() {
        if resampled && (t < lo || t > hi) {
            continue;
        }
        let bv = if resampled { interp_log(&tb, &b.points, t) } else { b.points[k].1 };
        let av = a.points[k].1;
        rows.push(ComparisonRow { t, a: av, b: bv, diff: av - bv });
    }
    if rows.is_empty() {
        return Err(Error::InvalidParameter("series do not overlap in time".into()));
    }
    let mut crossings = Vec::new();
    for w in rows.windows(2) {
        let (d0, d1) = (w[0].diff, w[1].diff);
        if d0 != 0.0 && d1 != 0.0 && (d0 < 0.0) != (d1 < 0.0) {
            let f = d0 / (d0 - d1);
            crossings.push((w[0].t.ln() + f * (w[1].t.ln() - w[0].t.ln())).exp());
        }
    }
    Ok(Comparison { label_a: a.label.clone(), label_b: b.label.clone(), rescaled: rescale, resampled, rows, crossings })
}

fn interp_log(times: &[f64], points: &[(f64, f64)], t: f64) -> f64 {
    let i = times.partition_point(|&x| x < t);
    if i < times.len() && times[i] == t {
        return points[i].1;
    }
    let (i0, i1) = (i - 1, i);
    let f = (t.ln() - times[i0].ln()) / (times[i1].ln() - times[i0].ln());
    points[i0].1 + f * (points[i1].1 - points[i0].1)
}
