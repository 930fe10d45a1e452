//! Run summaries.

use std::fmt;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::objectives::ObjectiveKind;
use crate::simulation::Trace;

/// Slack allowed per recorded step when checking that `V` does not rise.
pub const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSummary {
    pub index: usize,
    pub kind: ObjectiveKind,
    pub t_start: f64,
    pub t_end: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub v_first: f64,
    pub v_last: f64,
    /// Largest single-step increase of `V` within the segment.
    pub max_rise: f64,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub scenario: String,
    pub final_t: f64,
    pub final_omega: Vector3<f64>,
    pub final_inertia: (f64, f64),
    pub max_momentum_drift: f64,
    pub initial_precession_norm_sq: f64,
    pub final_precession_norm_sq: f64,
    pub segments: Vec<SegmentSummary>,
}

impl Summary {
    pub fn monotone(&self) -> bool {
        self.segments.iter().all(|s| s.monotone)
    }
}

pub fn summarize(trace: &Trace) -> Result<Summary> {
    let first = trace.rows.first().ok_or(Error::EmptyTrace)?;
    let last = trace.rows.last().expect("non-empty");
    let l0 = first.momentum;
    let scale = if l0.norm() > 0.0 { l0.norm() } else { 1.0 };
    let max_momentum_drift = trace
        .rows
        .iter()
        .map(|r| (r.momentum - l0).norm() / scale)
        .fold(0.0, f64::max);

    let mut segments: Vec<SegmentSummary> = Vec::new();
    let mut prev: Option<(usize, f64)> = None;
    for row in &trace.rows {
        let rise = match prev {
            Some((seg, v)) if seg == row.segment => row.value - v,
            _ => f64::NEG_INFINITY,
        };
        match segments.last_mut() {
            Some(s) if s.index == row.segment => {
                s.t_end = row.t;
                s.v_min = s.v_min.min(row.value);
                s.v_max = s.v_max.max(row.value);
                s.v_last = row.value;
                s.max_rise = s.max_rise.max(rise);
                s.monotone &= rise <= MONOTONE_SLACK;
            }
            _ => segments.push(SegmentSummary {
                index: row.segment,
                kind: row.objective,
                t_start: row.t,
                t_end: row.t,
                v_min: row.value,
                v_max: row.value,
                v_first: row.value,
                v_last: row.value,
                max_rise: f64::NEG_INFINITY,
                monotone: true,
            }),
        }
        prev = Some((row.segment, row.value));
    }

    Ok(Summary {
        scenario: trace.scenario.clone(),
        final_t: last.t,
        final_omega: last.omega,
        final_inertia: (last.i2, last.i3),
        max_momentum_drift,
        initial_precession_norm_sq: first.precession_norm_sq,
        final_precession_norm_sq: last.precession_norm_sq,
        segments,
    })
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.final_omega;
        writeln!(f, "scenario {} (t = {})", self.scenario, self.final_t)?;
        writeln!(
            f,
            "  final omega       ({:.6}, {:.6}, {:.6})",
            w.x, w.y, w.z
        )?;
        writeln!(
            f,
            "  final I2, I3      {:.6}, {:.6}",
            self.final_inertia.0, self.final_inertia.1
        )?;
        writeln!(f, "  momentum drift    {:.3e}", self.max_momentum_drift)?;
        writeln!(
            f,
            "  precession        {:.6e} -> {:.6e}",
            self.initial_precession_norm_sq, self.final_precession_norm_sq
        )?;
        for s in &self.segments {
            writeln!(
                f,
                "  segment {} {:<10} [{}, {}]  V {:.6e} -> {:.6e}  (min {:.6e}, max {:.6e})  {}",
                s.index,
                s.kind,
                s.t_start,
                s.t_end,
                s.v_first,
                s.v_last,
                s.v_min,
                s.v_max,
                if s.monotone {
                    "non-increasing"
                } else {
                    "NOT monotone"
                }
            )?;
        }
        Ok(())
    }
}
