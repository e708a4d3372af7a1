//! Flat TOML scenario files.
//!
//! ```toml
//! chart = "PL"            # PL | PW | REDUCED | TWISTOR
//! a = -1.0
//! b = 0.3
//! c = 1.0
//! d = 0.5
//! initial = [2.0, 0.3, -0.4, 0.5, 0.2, 0.1, -0.3, 0.4, -0.2, 0.6]
//! t0 = 0.0
//! t1 = 10.0
//! samples = 201
//! rel_tol = 1e-10
//! abs_tol = 1e-12
//! max_steps = 1000000
//! checks = ["chart-equivalence", "quadrature"]
//! seed = 42
//! ```

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use spinorbit::dynamics::{Chart, ChartPoint, IntegrateOptions, PwState};
use spinorbit::liepencil::{PencilParams, PoincareState};
use spinorbit::quadrature::{l_from_w, reduce, ReducedState};
use spinorbit::twistor::TwistorPoint;
use spinorbit::Vec3;

use crate::suites::Suite;
use crate::CliError;

/// The bundled default scenario.
pub const DEFAULT_SCENARIO: &str = include_str!("../scenarios/default.toml");

fn default_t0() -> f64 {
    0.0
}
fn default_samples() -> usize {
    101
}
fn default_rel_tol() -> f64 {
    1e-10
}
fn default_abs_tol() -> f64 {
    1e-12
}
fn default_drift_tol() -> f64 {
    1e-8
}
fn default_max_steps() -> usize {
    1_000_000
}
fn default_light_speed() -> f64 {
    1.0
}

/// Scenario file contents. See the module docs for the key set.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub chart: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// PL: `p0 p1 p2 p3 l1 l2 l3 j1 j2 j3`.
    /// PW: `p0 p1 p2 p3 j1 j2 j3 w1 w2 w3`, or a PL state.
    /// REDUCED: `w0 y z p0 |J|² c1 c2 h2`, or a PL state.
    /// TWISTOR: `re ζ₁, im ζ₁, re ζ₂, im ζ₂, re ζ, im ζ, α`.
    pub initial: Vec<f64>,
    #[serde(default = "default_t0")]
    pub t0: f64,
    pub t1: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    /// Tolerance on the relative drift of `c₁, c₂, h₁, h₂, h`.
    #[serde(default = "default_drift_tol")]
    pub drift_tol: f64,
    /// Integrator step budget; running out counts as a singularity.
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    /// Trials for randomized checks; each suite's default when absent.
    #[serde(default)]
    pub trials: Option<usize>,
    /// Light speed `c` in `X⁰ = c t`.
    #[serde(default = "default_light_speed")]
    pub light_speed: f64,
}

/// A scenario with every field validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub scenario: Scenario,
    pub params: PencilParams<f64>,
    pub initial: ChartPoint<f64>,
    /// Full state when the initial data determines one.
    pub state: Option<PoincareState<f64>>,
    pub checks: Vec<Suite>,
    pub options: IntegrateOptions<f64>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid scenario: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn prepare(self) -> Result<Prepared, CliError> {
        let usage = |m: String| CliError::Usage(m);
        let params = PencilParams::new(self.a, self.b, self.c, self.d).map_err(|e| usage(e.to_string()))?;
        let chart: Chart = self.chart.parse().map_err(|_| usage(format!("unknown chart '{}'", self.chart)))?;
        if !(self.t1 > self.t0) || !self.t0.is_finite() || !self.t1.is_finite() {
            return Err(usage("t1 must exceed t0".into()));
        }
        if self.samples < 2 {
            return Err(usage("samples must be at least 2".into()));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.drift_tol > 0.0) {
            return Err(usage("tolerances must be positive".into()));
        }
        if !(self.light_speed > 0.0) {
            return Err(usage("light_speed must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(usage("max_steps must be positive".into()));
        }
        if self.trials == Some(0) {
            return Err(usage("trials must be positive".into()));
        }
        let checks = self.checks.iter().map(|c| c.parse::<Suite>()).collect::<Result<Vec<_>, _>>()?;
        let v = &self.initial;
        let want = |n: &[usize]| {
            if n.contains(&v.len()) {
                Ok(())
            } else {
                Err(usage(format!("chart {} expects {:?} initial values, got {}", chart, n, v.len())))
            }
        };
        let (initial, state) = match chart {
            Chart::Pl => {
                want(&[10])?;
                let x = PoincareState::from_slice(v);
                (ChartPoint::Pl(x), Some(x))
            }
            Chart::Pw => {
                want(&[10])?;
                let s = PwState {
                    p0: v[0],
                    p: Vec3([v[1], v[2], v[3]]),
                    j: Vec3([v[4], v[5], v[6]]),
                    w: Vec3([v[7], v[8], v[9]]),
                };
                // L is fixed by W up to its part along P; take ξ = J·L = 0
                let x = l_from_w(&s.p, &s.j, &s.w, 0.0).ok().map(|l| PoincareState::new(s.p0, s.p, l, s.j));
                (ChartPoint::Pw(s), x)
            }
            Chart::Reduced => {
                want(&[8, 10])?;
                if v.len() == 10 {
                    let x = PoincareState::from_slice(v);
                    (ChartPoint::Reduced(reduce(&x, &params)), Some(x))
                } else {
                    let r = ReducedState::from_parts(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], &params);
                    (ChartPoint::Reduced(r), None)
                }
            }
            Chart::Twistor => {
                want(&[7])?;
                let t = TwistorPoint::new(
                    Complex::new(v[0], v[1]),
                    Complex::new(v[2], v[3]),
                    Complex::new(v[4], v[5]),
                    v[6],
                );
                (ChartPoint::Twistor(t), None)
            }
            Chart::Angles => return Err(usage("chart must be one of PL, PW, REDUCED, TWISTOR".into())),
        };
        initial.validate(&params).map_err(|e| usage(format!("initial data rejected: {e}")))?;
        let state = state.or_else(|| initial.to_poincare());
        let options = IntegrateOptions { rel_tol: self.rel_tol, abs_tol: self.abs_tol, samples: self.samples, max_steps: self.max_steps };
        Ok(Prepared { scenario: self, params, initial, state, checks, options })
    }
}
