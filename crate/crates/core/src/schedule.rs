//! Annealing schedules for the transverse field `Γ(t)` or the temperature `T(t)`.
//!
//! Descriptors have the form `kind:key=value[,key=value]`:
//!
//! | descriptor          | value                |
//! |---------------------|----------------------|
//! | `inv_log:c=3`       | `c / ln(t + 1)`      |
//! | `inv_sqrt:c=3`      | `c / √t`             |
//! | `inv:c=3`           | `c / t`              |
//! | `linear_neg:c=0.05` | `-c t`, for `t <= 0` |
//! | `const:v=0.0316`    | `v`                  |
//!
//! An optional `t0=` key overrides the integration origin (default `1e-2`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default start of integration for the forms that diverge at `t = 0`.
pub const DEFAULT_T_START: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ScheduleForm {
    InverseLog { c: f64 },
    InverseSqrt { c: f64 },
    Inverse { c: f64 },
    LinearNegative { c: f64 },
    Constant { v: f64 },
}

/// A control schedule plus the time at which integration starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub form: ScheduleForm,
    pub t_start: f64,
}

impl Schedule {
    pub fn new(form: ScheduleForm) -> Result<Self> {
        let check = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
            }
        };
        match form {
            ScheduleForm::InverseLog { c }
            | ScheduleForm::InverseSqrt { c }
            | ScheduleForm::Inverse { c }
            | ScheduleForm::LinearNegative { c } => check("c", c)?,
            ScheduleForm::Constant { v } => {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParameter(format!("constant value must be >= 0, got {v}")));
                }
            }
        }
        let t_start = match form {
            ScheduleForm::LinearNegative { .. } => f64::NEG_INFINITY,
            ScheduleForm::Constant { .. } => 0.0,
            _ => DEFAULT_T_START,
        };
        Ok(Self { form, t_start })
    }

    pub fn inverse_log(c: f64) -> Result<Self> {
        Self::new(ScheduleForm::InverseLog { c })
    }

    pub fn inverse_sqrt(c: f64) -> Result<Self> {
        Self::new(ScheduleForm::InverseSqrt { c })
    }

    pub fn inverse(c: f64) -> Result<Self> {
        Self::new(ScheduleForm::Inverse { c })
    }

    pub fn linear_negative(c: f64) -> Result<Self> {
        Self::new(ScheduleForm::LinearNegative { c })
    }

    pub fn constant(v: f64) -> Result<Self> {
        Self::new(ScheduleForm::Constant { v })
    }

    pub fn with_t_start(mut self, t_start: f64) -> Result<Self> {
        self.check_domain(t_start)?;
        self.t_start = t_start;
        Ok(self)
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let ok = match self.form {
            ScheduleForm::InverseLog { .. } | ScheduleForm::InverseSqrt { .. } | ScheduleForm::Inverse { .. } => t > 0.0,
            ScheduleForm::LinearNegative { .. } => t <= 0.0,
            ScheduleForm::Constant { .. } => !t.is_nan(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("t = {t} is outside the domain of {self}")))
        }
    }

    /// `Γ(t)` (or `T(t)`).
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.value_unchecked(t))
    }

    /// [`Schedule::value`] without the domain check, for hot loops that
    /// have already validated their time grid.
    #[inline]
    pub fn value_unchecked(&self, t: f64) -> f64 {
        match self.form {
            ScheduleForm::InverseLog { c } => c / t.ln_1p(),
            ScheduleForm::InverseSqrt { c } => c / t.sqrt(),
            ScheduleForm::Inverse { c } => c / t,
            ScheduleForm::LinearNegative { c } => -c * t,
            ScheduleForm::Constant { v } => v,
        }
    }

    /// `dΓ/dt`.
    pub fn derivative(&self, t: f64) -> f64 {
        match self.form {
            ScheduleForm::InverseLog { c } => {
                let l = t.ln_1p();
                -c / (l * l * (1.0 + t))
            }
            ScheduleForm::InverseSqrt { c } => -0.5 * c / (t * t.sqrt()),
            ScheduleForm::Inverse { c } => -c / (t * t),
            ScheduleForm::LinearNegative { c } => -c,
            ScheduleForm::Constant { .. } => 0.0,
        }
    }

    /// Descriptor string understood by [`FromStr`].
    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, key, x) = match self.form {
            ScheduleForm::InverseLog { c } => ("inv_log", "c", c),
            ScheduleForm::InverseSqrt { c } => ("inv_sqrt", "c", c),
            ScheduleForm::Inverse { c } => ("inv", "c", c),
            ScheduleForm::LinearNegative { c } => ("linear_neg", "c", c),
            ScheduleForm::Constant { v } => ("const", "v", v),
        };
        write!(f, "{kind}:{key}={x}")?;
        let default = Schedule::new(self.form).map(|s| s.t_start).unwrap_or(self.t_start);
        if self.t_start != default {
            write!(f, ",t0={}", self.t_start)?;
        }
        Ok(())
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let (kind, params) = s.trim().split_once(':').ok_or_else(|| bad(format!("schedule `{s}` lacks `kind:`")))?;
        let mut amp = None;
        let mut t0 = None;
        for kv in params.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|e| bad(format!("{k}: {e}")))?;
            match k.trim() {
                "c" | "v" => amp = Some((k.trim().to_string(), v)),
                "t0" => t0 = Some(v),
                other => return Err(bad(format!("unknown schedule key `{other}`"))),
            }
        }
        let (key, x) = amp.ok_or_else(|| bad(format!("schedule `{s}` lacks its amplitude")))?;
        let form = match (kind.trim(), key.as_str()) {
            ("inv_log", "c") => ScheduleForm::InverseLog { c: x },
            ("inv_sqrt", "c") => ScheduleForm::InverseSqrt { c: x },
            ("inv", "c") => ScheduleForm::Inverse { c: x },
            ("linear_neg", "c") => ScheduleForm::LinearNegative { c: x },
            ("const", "v") => ScheduleForm::Constant { v: x },
            (k, key) => return Err(bad(format!("unknown schedule `{k}` with key `{key}`"))),
        };
        let sched = Schedule::new(form)?;
        match t0 {
            Some(t0) => sched.with_t_start(t0),
            None => Ok(sched),
        }
    }
}
