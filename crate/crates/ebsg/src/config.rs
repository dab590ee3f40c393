//! Flat `key = value` run configuration for the command-line front end.
//!
//! A configuration file is UTF-8 text, one assignment per line; `#` starts a
//! comment anywhere on a line and blank lines are skipped. Keys:
//!
//! | key          | required | meaning                                            |
//! |--------------|----------|----------------------------------------------------|
//! | `problem`    | yes      | `advection` (translating profile) or `pulse`       |
//! | `dt`         | yes      | time step (> 0)                                    |
//! | `t_final`    | yes      | simulation horizon (≥ 0)                           |
//! | `p`          | yes      | tension parameter (> 0)                            |
//! | `n`          | one of   | number of mesh elements (≥ 3)                      |
//! | `h`          | one of   | mesh spacing; must divide the domain evenly        |
//! | `xi`         | no       | velocity override                                  |
//! | `lambda`     | no       | diffusivity override (`pulse` only, > 0)           |
//! | `x0`         | no       | initial profile/pulse center override              |
//! | `snapshots`  | no       | comma-separated capture times                      |
//! | `quad_order` | no       | assembly quadrature order (8–30, default 10)       |
//!
//! Exactly one of `n`/`h` must be present. Unknown and duplicate keys are hard
//! errors naming the key, so typos cannot silently fall back to defaults.

use crate::assembly::{MAX_QUAD_ORDER, MIN_ASSEMBLY_QUAD_ORDER};
use crate::problems::{AdvectedGaussian, DiffusingPulse};
use crate::solver::{Discretization, ProblemSpec};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// Errors from parsing or validating a run configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    /// A non-comment line has no `=`.
    #[error("line {line} is not a `key = value` assignment: {text:?}")]
    MalformedLine { line: usize, text: String },
    /// A key outside the supported set.
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    /// The same key assigned twice.
    #[error("configuration key {0:?} is set more than once")]
    DuplicateKey(String),
    /// A required key is absent.
    #[error("missing required configuration key {0:?}")]
    MissingKey(&'static str),
    /// A value failed to parse or violates its constraint.
    #[error("invalid value {value:?} for key {key:?}: {reason}")]
    InvalidValue {
        key: &'static str,
        value: String,
        reason: String,
    },
    /// `n` and `h` are mutually exclusive.
    #[error("keys \"n\" and \"h\" are both set; give exactly one")]
    BothMeshKeys,
    /// Neither `n` nor `h` given.
    #[error("one of the keys \"n\" or \"h\" is required")]
    MissingMeshKey,
    /// `h` does not evenly divide the problem domain.
    #[error("mesh spacing h={h} does not divide the domain length {length} into whole elements")]
    UnevenSpacing { h: f64, length: f64 },
    /// Problem selectors this front end does not accept.
    #[error(
        "problem {0:?} is not available from configuration files; \
         use \"advection\" or \"pulse\" (custom problems are built \
         programmatically against the library API)"
    )]
    UnsupportedProblem(String),
}

/// Which benchmark problem a run solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Pure advection of a Gaussian concentration profile.
    Advection,
    /// Advection–diffusion of an initially sharp Gaussian pulse.
    Pulse,
}

impl ProblemKind {
    /// The selector spelled as it appears in configuration files.
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Advection => "advection",
            ProblemKind::Pulse => "pulse",
        }
    }
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// The benchmark problem to solve.
    pub problem: ProblemKind,
    /// Time step.
    pub dt: f64,
    /// Simulation horizon.
    pub t_final: f64,
    /// Tension parameter.
    pub p: f64,
    /// Mesh elements (resolved from `n` or `h`).
    pub n: usize,
    /// Velocity override.
    pub xi: Option<f64>,
    /// Diffusivity override (`pulse` only).
    pub lambda: Option<f64>,
    /// Initial center override.
    pub x0: Option<f64>,
    /// Requested snapshot capture times.
    pub snapshots: Vec<f64>,
    /// Assembly quadrature order.
    pub quad_order: usize,
}

/// A configuration resolved into solver-facing objects.
pub struct ResolvedRun {
    /// The problem description handed to the solver.
    pub spec: ProblemSpec,
    /// The discretization handed to the solver.
    pub disc: Discretization,
    /// Closed-form solution `(x, t) ↦ u` for error reporting.
    pub exact: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    /// The problem domain.
    pub domain: (f64, f64),
}

fn parse_f64(key: &'static str, value: &str) -> Result<f64, ConfigError> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|e| ConfigError::InvalidValue {
            key,
            value: value.trim().to_string(),
            reason: e.to_string(),
        })
}

fn require_finite(key: &'static str, v: f64, raw: &str) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::InvalidValue {
            key,
            value: raw.trim().to_string(),
            reason: "must be finite".to_string(),
        })
    }
}

impl RunConfig {
    /// Parses and validates a configuration from its textual form.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(ConfigError::MalformedLine {
                    line: idx + 1,
                    text: raw_line.trim().to_string(),
                });
            };
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            const KNOWN: [&str; 11] = [
                "problem",
                "dt",
                "t_final",
                "p",
                "n",
                "h",
                "xi",
                "lambda",
                "x0",
                "snapshots",
                "quad_order",
            ];
            if !KNOWN.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey(key));
            }
            if seen.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey(key));
            }
        }

        let problem_raw = seen
            .remove("problem")
            .ok_or(ConfigError::MissingKey("problem"))?;
        let problem = match problem_raw.as_str() {
            "advection" => ProblemKind::Advection,
            "pulse" => ProblemKind::Pulse,
            other => return Err(ConfigError::UnsupportedProblem(other.to_string())),
        };

        let dt_raw = seen.remove("dt").ok_or(ConfigError::MissingKey("dt"))?;
        let dt = require_finite("dt", parse_f64("dt", &dt_raw)?, &dt_raw)?;
        if dt <= 0.0 {
            return Err(ConfigError::InvalidValue {
                key: "dt",
                value: dt_raw,
                reason: "time step must be positive".to_string(),
            });
        }

        let tf_raw = seen
            .remove("t_final")
            .ok_or(ConfigError::MissingKey("t_final"))?;
        let t_final = require_finite("t_final", parse_f64("t_final", &tf_raw)?, &tf_raw)?;
        if t_final < 0.0 {
            return Err(ConfigError::InvalidValue {
                key: "t_final",
                value: tf_raw,
                reason: "final time must be non-negative".to_string(),
            });
        }

        let p_raw = seen.remove("p").ok_or(ConfigError::MissingKey("p"))?;
        let p = require_finite("p", parse_f64("p", &p_raw)?, &p_raw)?;
        if p <= 0.0 {
            return Err(ConfigError::InvalidValue {
                key: "p",
                value: p_raw,
                reason: "tension parameter must be positive".to_string(),
            });
        }

        let domain = match problem {
            ProblemKind::Advection => AdvectedGaussian::default().domain,
            ProblemKind::Pulse => DiffusingPulse::default().domain,
        };
        let n_raw = seen.remove("n");
        let h_raw = seen.remove("h");
        let n = match (n_raw, h_raw) {
            (Some(_), Some(_)) => return Err(ConfigError::BothMeshKeys),
            (None, None) => return Err(ConfigError::MissingMeshKey),
            (Some(nv), None) => {
                nv.trim()
                    .parse::<usize>()
                    .map_err(|e| ConfigError::InvalidValue {
                        key: "n",
                        value: nv.trim().to_string(),
                        reason: e.to_string(),
                    })?
            }
            (None, Some(hv)) => {
                let h = require_finite("h", parse_f64("h", &hv)?, &hv)?;
                if h <= 0.0 {
                    return Err(ConfigError::InvalidValue {
                        key: "h",
                        value: hv,
                        reason: "mesh spacing must be positive".to_string(),
                    });
                }
                let length = domain.1 - domain.0;
                let ratio = length / h;
                let rounded = ratio.round();
                if (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) || rounded < 1.0 {
                    return Err(ConfigError::UnevenSpacing { h, length });
                }
                rounded as usize
            }
        };
        if n < 3 {
            return Err(ConfigError::InvalidValue {
                key: "n",
                value: n.to_string(),
                reason: "the solver needs at least 3 elements".to_string(),
            });
        }

        let xi = match seen.remove("xi") {
            Some(v) => Some(require_finite("xi", parse_f64("xi", &v)?, &v)?),
            None => None,
        };
        let lambda = match seen.remove("lambda") {
            Some(v) => {
                let val = require_finite("lambda", parse_f64("lambda", &v)?, &v)?;
                match problem {
                    ProblemKind::Advection => {
                        return Err(ConfigError::InvalidValue {
                            key: "lambda",
                            value: v,
                            reason: "the advection problem is purely advective; \
                                     use problem = pulse for nonzero diffusion"
                                .to_string(),
                        })
                    }
                    ProblemKind::Pulse if val <= 0.0 => {
                        return Err(ConfigError::InvalidValue {
                            key: "lambda",
                            value: v,
                            reason: "the pulse's closed form needs positive diffusivity"
                                .to_string(),
                        })
                    }
                    ProblemKind::Pulse => Some(val),
                }
            }
            None => None,
        };
        let x0 = match seen.remove("x0") {
            Some(v) => Some(require_finite("x0", parse_f64("x0", &v)?, &v)?),
            None => None,
        };
        let snapshots = match seen.remove("snapshots") {
            Some(v) if v.trim().is_empty() => Vec::new(),
            Some(v) => {
                let mut times = Vec::new();
                for part in v.split(',') {
                    let t = require_finite("snapshots", parse_f64("snapshots", part)?, part)?;
                    if t < 0.0 {
                        return Err(ConfigError::InvalidValue {
                            key: "snapshots",
                            value: part.trim().to_string(),
                            reason: "snapshot times must be non-negative".to_string(),
                        });
                    }
                    times.push(t);
                }
                times
            }
            None => Vec::new(),
        };
        let quad_order = match seen.remove("quad_order") {
            Some(v) => {
                let q = v
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| ConfigError::InvalidValue {
                        key: "quad_order",
                        value: v.trim().to_string(),
                        reason: e.to_string(),
                    })?;
                if !(MIN_ASSEMBLY_QUAD_ORDER..=MAX_QUAD_ORDER).contains(&q) {
                    return Err(ConfigError::InvalidValue {
                        key: "quad_order",
                        value: v.trim().to_string(),
                        reason: format!(
                            "must be between {MIN_ASSEMBLY_QUAD_ORDER} and {MAX_QUAD_ORDER}"
                        ),
                    });
                }
                q
            }
            None => 10,
        };

        debug_assert!(seen.is_empty(), "all keys consumed");
        Ok(RunConfig {
            problem,
            dt,
            t_final,
            p,
            n,
            xi,
            lambda,
            x0,
            snapshots,
            quad_order,
        })
    }

    /// The canonical textual form: parsing it reproduces `self` exactly.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("problem = {}\n", self.problem.as_str()));
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("p = {}\n", self.p));
        out.push_str(&format!("dt = {}\n", self.dt));
        out.push_str(&format!("t_final = {}\n", self.t_final));
        if let Some(xi) = self.xi {
            out.push_str(&format!("xi = {xi}\n"));
        }
        if let Some(lambda) = self.lambda {
            out.push_str(&format!("lambda = {lambda}\n"));
        }
        if let Some(x0) = self.x0 {
            out.push_str(&format!("x0 = {x0}\n"));
        }
        if !self.snapshots.is_empty() {
            let times: Vec<String> = self.snapshots.iter().map(|t| format!("{t}")).collect();
            out.push_str(&format!("snapshots = {}\n", times.join(", ")));
        }
        if self.quad_order != 10 {
            out.push_str(&format!("quad_order = {}\n", self.quad_order));
        }
        out
    }

    /// Applies the overrides and produces the solver-facing objects.
    pub fn resolve(&self) -> ResolvedRun {
        let disc = Discretization {
            n: self.n,
            p: self.p,
            dt: self.dt,
            quad_order: self.quad_order,
        };
        match self.problem {
            ProblemKind::Advection => {
                let mut prob = AdvectedGaussian::default();
                if let Some(xi) = self.xi {
                    prob.velocity = xi;
                }
                if let Some(x0) = self.x0 {
                    prob.start_center = x0;
                }
                ResolvedRun {
                    spec: prob.problem_spec(),
                    disc,
                    exact: Arc::new(move |x, t| prob.exact(x, t)),
                    domain: prob.domain,
                }
            }
            ProblemKind::Pulse => {
                let mut prob = DiffusingPulse::default();
                if let Some(xi) = self.xi {
                    prob.velocity = xi;
                }
                if let Some(lambda) = self.lambda {
                    prob.diffusivity = lambda;
                }
                if let Some(x0) = self.x0 {
                    prob.start_center = x0;
                }
                ResolvedRun {
                    spec: prob.problem_spec(),
                    disc,
                    exact: Arc::new(move |x, t| prob.exact(x, t)),
                    domain: prob.domain,
                }
            }
        }
    }
}
