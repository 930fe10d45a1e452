//! Lyapunov objectives, their Lie derivatives and the unit-norm descent law.
//!
//! Each objective is a sum of squares over the reduced state. Lie derivatives
//! are formed as `∇V · f`, `∇V · g1`, `∇V · g2` from the analytic gradient;
//! the finite-difference checks in [`crate::lie_oracle`] cover the gradients.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{control_fields, drift_field, ControlInput, DiskParams, StateVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    /// Spin about the first body axis: `½(ω2² + ω3²)` plus the inertia
    /// restoring term.
    Alignment,
    /// Kinetic energy plus the inertia restoring term.
    Passive,
    /// `½‖ω × I·ω‖²` plus the inertia restoring term.
    Precession,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 3] = [
        ObjectiveKind::Alignment,
        ObjectiveKind::Passive,
        ObjectiveKind::Precession,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Alignment => "alignment",
            ObjectiveKind::Passive => "passive",
            ObjectiveKind::Precession => "precession",
        }
    }

    /// Whether `L_f V` vanishes identically, so that the unit-norm law makes
    /// `V` non-increasing along every trajectory.
    pub fn has_zero_drift(self) -> bool {
        matches!(self, ObjectiveKind::Alignment | ObjectiveKind::Passive)
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "alignment" => Ok(ObjectiveKind::Alignment),
            "passive" => Ok(ObjectiveKind::Passive),
            "precession" => Ok(ObjectiveKind::Precession),
            other => Err(Error::Config(format!(
                "unknown objective '{other}' (expected alignment, passive or precession)"
            ))),
        }
    }
}

/// Objective value, gradient and Lie derivatives at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveEval {
    pub value: f64,
    pub grad: StateVector,
    pub lf: f64,
    pub lg1: f64,
    pub lg2: f64,
}

impl ObjectiveEval {
    /// `√(L_g1 V² + L_g2 V²)`, the largest achievable decrease rate for a
    /// unit input.
    pub fn input_gain(&self) -> f64 {
        self.lg1.hypot(self.lg2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlLawConfig {
    deadband_eps: f64,
    gain: f64,
}

impl ControlLawConfig {
    pub const DEFAULT_DEADBAND: f64 = 1e-9;

    pub fn new(deadband_eps: f64, gain: f64) -> Result<Self> {
        if !(deadband_eps.is_finite() && deadband_eps > 0.0) {
            return Err(Error::Config(format!(
                "deadband must be positive, got {deadband_eps}"
            )));
        }
        if !(gain.is_finite() && gain > 0.0) {
            return Err(Error::Config(format!("gain must be positive, got {gain}")));
        }
        Ok(Self { deadband_eps, gain })
    }

    pub fn deadband_eps(&self) -> f64 {
        self.deadband_eps
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }
}

impl Default for ControlLawConfig {
    fn default() -> Self {
        Self {
            deadband_eps: Self::DEFAULT_DEADBAND,
            gain: 1.0,
        }
    }
}

/// Piecewise-constant objective schedule. Segment `k` covers
/// `[end_{k-1}, end_k)`; the last segment extends forever.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulePlan {
    segments: Vec<(f64, ObjectiveKind)>,
}

impl SchedulePlan {
    pub fn new(segments: Vec<(f64, ObjectiveKind)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Config("schedule plan is empty".into()));
        }
        for (end, _) in &segments {
            if !end.is_finite() {
                return Err(Error::Config(format!("non-finite segment end time {end}")));
            }
        }
        for w in segments.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Config(format!(
                    "segment end times must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self { segments })
    }

    /// A single objective for the whole run.
    pub fn single(end: f64, kind: ObjectiveKind) -> Self {
        Self {
            segments: vec![(end, kind)],
        }
    }

    pub fn segments(&self) -> &[(f64, ObjectiveKind)] {
        &self.segments
    }

    /// Index of the segment active at time `t`.
    pub fn segment_at(&self, t: f64) -> usize {
        self.segments
            .iter()
            .position(|&(end, _)| end > t)
            .unwrap_or(self.segments.len() - 1)
    }

    pub fn kind_at(&self, t: f64) -> ObjectiveKind {
        self.segments[self.segment_at(t)].1
    }
}

/// Objective active at time `t` under `plan`.
pub fn scheduled_kind(plan: &SchedulePlan, t: f64) -> ObjectiveKind {
    plan.kind_at(t)
}

fn restoring(x: &StateVector, params: &DiskParams) -> (f64, f64) {
    (x[3] - params.nominal_i2(), x[4] - params.nominal_i3())
}

/// Objective value alone.
pub fn objective_value(kind: ObjectiveKind, x: &StateVector, params: &DiskParams) -> Result<f64> {
    // validates the inertia entries
    drift_field(x)?;
    let (w1, w2, w3, i2, i3) = (x[0], x[1], x[2], x[3], x[4]);
    let (d2, d3) = restoring(x, params);
    let potential = 0.5 * (d2 * d2 + d3 * d3);
    let v = match kind {
        ObjectiveKind::Alignment => 0.5 * (w2 * w2 + w3 * w3) + potential,
        ObjectiveKind::Passive => {
            0.5 * (i2 + i3) * w1 * w1 + 0.5 * i2 * w2 * w2 + 0.5 * i3 * w3 * w3 + potential
        }
        ObjectiveKind::Precession => {
            let a = (i3 - i2) * w2 * w3;
            let b = i2 * w1 * w3;
            let c = -i3 * w1 * w2;
            0.5 * (a * a + b * b + c * c) + potential
        }
    };
    Ok(v)
}

fn gradient(kind: ObjectiveKind, x: &StateVector, params: &DiskParams) -> StateVector {
    let (w1, w2, w3, i2, i3) = (x[0], x[1], x[2], x[3], x[4]);
    let (d2, d3) = restoring(x, params);
    match kind {
        ObjectiveKind::Alignment => StateVector::new(0.0, w2, w3, d2, d3),
        ObjectiveKind::Passive => StateVector::new(
            (i2 + i3) * w1,
            i2 * w2,
            i3 * w3,
            0.5 * w1 * w1 + 0.5 * w2 * w2 + d2,
            0.5 * w1 * w1 + 0.5 * w3 * w3 + d3,
        ),
        ObjectiveKind::Precession => {
            let k = i3 - i2;
            let (w1s, w2s, w3s) = (w1 * w1, w2 * w2, w3 * w3);
            StateVector::new(
                i2 * i2 * w1 * w3s + i3 * i3 * w1 * w2s,
                k * k * w2 * w3s + i3 * i3 * w1s * w2,
                k * k * w2s * w3 + i2 * i2 * w1s * w3,
                -k * w2s * w3s + i2 * w1s * w3s + d2,
                k * w2s * w3s + i3 * w1s * w2s + d3,
            )
        }
    }
}

/// Value, gradient and Lie derivatives of `kind` at `x`.
pub fn evaluate(
    kind: ObjectiveKind,
    x: &StateVector,
    params: &DiskParams,
) -> Result<ObjectiveEval> {
    let value = objective_value(kind, x, params)?;
    let grad = gradient(kind, x, params);
    let f = drift_field(x)?;
    let (g1, g2) = control_fields(x)?;
    Ok(ObjectiveEval {
        value,
        grad,
        lf: grad.dot(&f),
        lg1: grad.dot(&g1),
        lg2: grad.dot(&g2),
    })
}

/// Steepest-descent input of magnitude `gain`: `u = -gain · a / ‖a‖` with
/// `a = (L_g1 V, L_g2 V)`. Inside the deadband the input is zero.
pub fn control_law(eval: &ObjectiveEval, cfg: &ControlLawConfig) -> ControlInput {
    let n = eval.input_gain();
    if n.is_nan() || n < cfg.deadband_eps {
        return ControlInput::ZERO;
    }
    let scale = -cfg.gain / n;
    ControlInput::new(scale * eval.lg1, scale * eval.lg2)
}
