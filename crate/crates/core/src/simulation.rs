//! Fixed-step closed-loop simulation.
//!
//! The reduced state `(ω, I2, I3)` advances by classical RK4. The input is
//! sampled once per step and held (zero-order hold) unless the scenario asks
//! for per-stage feedback. The attitude advances by `R ← R·exp(φ)` with the
//! rotation vector `φ = ω̄·dt + (dt²/12)·ω(t) × ω(t + dt)`, where `ω̄` is the
//! RK4-weighted mean of the stage body rates. The cross term is the
//! second Magnus (coning) term; without it the attitude is only second-order
//! accurate.

use nalgebra::{Matrix3, Vector3};

use crate::dynamics::{
    angular_momentum, display_lengths, kinetic_energy, precession_norm_sq, state_rhs, BodyState,
    ControlInput, DiskParams, InertiaState, StateVector,
};
use crate::error::{Error, Result};
use crate::objectives::{
    control_law, evaluate, objective_value, ControlLawConfig, ObjectiveKind, SchedulePlan,
};
use crate::so3::exp_map;

/// When the feedback law is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlSampling {
    /// Once per step at the step start, held over the step.
    #[default]
    Step,
    /// At every RK4 stage, i.e. the continuous closed loop.
    Stage,
}

impl ControlSampling {
    pub fn name(self) -> &'static str {
        match self {
            ControlSampling::Step => "step",
            ControlSampling::Stage => "stage",
        }
    }
}

impl std::str::FromStr for ControlSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "step" => Ok(ControlSampling::Step),
            "stage" => Ok(ControlSampling::Stage),
            other => Err(Error::Config(format!(
                "unknown sampling '{other}' (expected step or stage)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub omega0: Vector3<f64>,
    pub inertia0: InertiaState,
    pub attitude0: Matrix3<f64>,
    pub plan: SchedulePlan,
    pub t_end: f64,
    pub dt: f64,
    pub params: DiskParams,
    pub control: ControlLawConfig,
    /// Saturate the inputs so neither mass pair moves beyond the rim.
    pub clamp_l_to_radius: bool,
    /// For objectives with `L_f V ≡ 0`, replace a held input that would
    /// raise `V` over the step by the zero input, which keeps `V` constant.
    pub descent_guard: bool,
    pub sampling: ControlSampling,
    /// Apply `u ≡ 0` regardless of the plan. `V` is still recorded.
    pub open_loop: bool,
}

impl Scenario {
    pub const DEFAULT_DT: f64 = 1e-3;

    /// Scenario with the given initial rate and schedule and every other
    /// field at its default.
    pub fn new(name: &str, omega0: Vector3<f64>, plan: SchedulePlan, t_end: f64) -> Self {
        let params = DiskParams::default();
        Self {
            name: name.to_string(),
            omega0,
            inertia0: params.nominal_inertia(),
            attitude0: Matrix3::identity(),
            plan,
            t_end,
            dt: Self::DEFAULT_DT,
            params,
            control: ControlLawConfig::default(),
            clamp_l_to_radius: false,
            descent_guard: true,
            sampling: ControlSampling::Step,
            open_loop: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(Error::Config(format!(
                "t_end must be at least dt, got t_end = {}, dt = {}",
                self.t_end, self.dt
            )));
        }
        if !self.omega0.iter().all(|w| w.is_finite()) {
            return Err(Error::Config("omega0 must be finite".into()));
        }
        if crate::so3::orthonormality_error(&self.attitude0) > 1e-9
            || (self.attitude0.determinant() - 1.0).abs() > 1e-9
        {
            return Err(Error::Config("initial attitude is not a rotation".into()));
        }
        Ok(())
    }

    /// Number of integration steps; rows are written at `0, dt, …, steps·dt`.
    pub fn steps(&self) -> usize {
        let ratio = self.t_end / self.dt;
        let nearest = ratio.round();
        let n = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            ratio.floor()
        };
        n as usize
    }

    pub fn initial_state(&self) -> BodyState {
        BodyState::new(self.attitude0, self.omega0, self.inertia0)
    }

    fn inertia_ceiling(&self) -> (f64, f64) {
        let r2 = self.params.radius() * self.params.radius();
        (
            self.params.nominal_i2() + 0.5 * r2,
            self.params.nominal_i3() + 0.5 * r2,
        )
    }

    /// Feedback input at `x` with the rim clamp applied.
    fn feedback(&self, kind: ObjectiveKind, x: &StateVector) -> Result<ControlInput> {
        if self.open_loop {
            return Ok(ControlInput::ZERO);
        }
        let eval = evaluate(kind, x, &self.params)?;
        Ok(self.saturate(control_law(&eval, &self.control), x))
    }

    fn saturate(&self, mut u: ControlInput, x: &StateVector) -> ControlInput {
        if self.clamp_l_to_radius {
            let (max2, max3) = self.inertia_ceiling();
            u.u1 = u.u1.min(((max2 - x[3]) / self.dt).max(0.0));
            u.u2 = u.u2.min(((max3 - x[4]) / self.dt).max(0.0));
        }
        u
    }
}

/// One recorded sample of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub omega: Vector3<f64>,
    pub i2: f64,
    pub i3: f64,
    pub l2: f64,
    pub l3: f64,
    /// Input applied over `[t, t + dt)`; for the last row, the input the
    /// law would apply.
    pub u: ControlInput,
    pub objective: ObjectiveKind,
    pub segment: usize,
    pub value: f64,
    pub kinetic_energy: f64,
    pub momentum: Vector3<f64>,
    pub precession_norm_sq: f64,
    pub attitude: Matrix3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub scenario: String,
    pub rows: Vec<TraceRow>,
}

/// Result of one closed-loop step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: BodyState,
    pub input: ControlInput,
    pub kind: ObjectiveKind,
}

fn rk4<F>(x: &StateVector, dt: f64, mut rhs: F) -> Result<(StateVector, Vector3<f64>)>
where
    F: FnMut(&StateVector) -> Result<StateVector>,
{
    let k1 = rhs(x)?;
    let x2 = x + k1 * (0.5 * dt);
    let k2 = rhs(&x2)?;
    let x3 = x + k2 * (0.5 * dt);
    let k3 = rhs(&x3)?;
    let x4 = x + k3 * dt;
    let k4 = rhs(&x4)?;
    let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let rate = |y: &StateVector| Vector3::new(y[0], y[1], y[2]);
    let mean_rate = (rate(x) + rate(&x2) * 2.0 + rate(&x3) * 2.0 + rate(&x4)) / 6.0;
    Ok((next, mean_rate))
}

fn finish(
    state: &BodyState,
    next: StateVector,
    mean_rate: Vector3<f64>,
    dt: f64,
) -> Result<BodyState> {
    if !next.iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("state became non-finite".into()));
    }
    let end_rate = Vector3::new(next[0], next[1], next[2]);
    let phi = mean_rate * dt + state.omega.cross(&end_rate) * (dt * dt / 12.0);
    BodyState::from_reduced(state.attitude * exp_map(&phi), &next)
}

/// Advances `state` by `dt` with the input held at `u`.
pub fn held_step(state: &BodyState, dt: f64, u: &ControlInput) -> Result<BodyState> {
    let x = state.reduced();
    let (next, mean_rate) = rk4(&x, dt, |y| state_rhs(y, u))?;
    finish(state, next, mean_rate, dt)
}

fn stage_step(
    state: &BodyState,
    dt: f64,
    kind: ObjectiveKind,
    scenario: &Scenario,
) -> Result<BodyState> {
    let x = state.reduced();
    let (next, mean_rate) = rk4(&x, dt, |y| {
        let u = scenario.feedback(kind, y)?;
        state_rhs(y, &u)
    })?;
    finish(state, next, mean_rate, dt)
}

/// One closed-loop step from time `t`, reporting the applied input.
pub fn advance(state: &BodyState, t: f64, dt: f64, scenario: &Scenario) -> Result<StepOutcome> {
    let failure = |e: Error| Error::IntegrationFailure {
        t,
        reason: e.to_string(),
    };
    let kind = scenario.plan.kind_at(t);
    let x = state.reduced();
    let u = scenario.feedback(kind, &x).map_err(failure)?;
    let next = match scenario.sampling {
        ControlSampling::Step => held_step(state, dt, &u),
        ControlSampling::Stage => stage_step(state, dt, kind, scenario),
    }
    .map_err(failure)?;

    if scenario.descent_guard && kind.has_zero_drift() && u != ControlInput::ZERO {
        let before = objective_value(kind, &x, &scenario.params).map_err(failure)?;
        let after = objective_value(kind, &next.reduced(), &scenario.params).map_err(failure)?;
        if after > before {
            let free = held_step(state, dt, &ControlInput::ZERO).map_err(failure)?;
            return Ok(StepOutcome {
                state: free,
                input: ControlInput::ZERO,
                kind,
            });
        }
    }
    Ok(StepOutcome {
        state: next,
        input: u,
        kind,
    })
}

/// Classical RK4 step of the closed loop (see [`advance`]).
pub fn rk4_step(state: &BodyState, t: f64, dt: f64, scenario: &Scenario) -> Result<BodyState> {
    advance(state, t, dt, scenario).map(|o| o.state)
}

fn record(t: f64, state: &BodyState, u: ControlInput, scenario: &Scenario) -> Result<TraceRow> {
    let x = state.reduced();
    let segment = scenario.plan.segment_at(t);
    let objective = scenario.plan.segments()[segment].1;
    let (l2, l3) = display_lengths(&scenario.params, &state.inertia);
    Ok(TraceRow {
        t,
        omega: state.omega,
        i2: state.inertia.i2(),
        i3: state.inertia.i3(),
        l2,
        l3,
        u,
        objective,
        segment,
        value: objective_value(objective, &x, &scenario.params)?,
        kinetic_energy: kinetic_energy(state),
        momentum: angular_momentum(state),
        precession_norm_sq: precession_norm_sq(&x),
        attitude: state.attitude,
    })
}

/// Runs `scenario` to `t_end`, recording one row per step.
pub fn run(scenario: &Scenario) -> Result<Trace> {
    scenario.validate()?;
    let steps = scenario.steps();
    let mut rows = Vec::with_capacity(steps + 1);
    let mut state = scenario.initial_state();
    for i in 0..steps {
        let t = i as f64 * scenario.dt;
        let outcome = advance(&state, t, scenario.dt, scenario)?;
        rows.push(record(t, &state, outcome.input, scenario)?);
        state = outcome.state;
    }
    let t = steps as f64 * scenario.dt;
    let kind = scenario.plan.kind_at(t);
    let u = scenario.feedback(kind, &state.reduced())?;
    rows.push(record(t, &state, u, scenario)?);
    Ok(Trace {
        scenario: scenario.name.clone(),
        rows,
    })
}

pub const BUILTIN_NAMES: [&str; 4] = ["alignment", "passive", "precession", "combined"];

/// The four reference experiments: alignment, passive, precession and the
/// alignment-then-precession combination.
pub fn builtin_scenarios() -> Vec<Scenario> {
    use ObjectiveKind::*;
    let spin_y = Vector3::new(1e-5, 10.0, 0.0);
    let tumbling = Vector3::new(10.0, 4.0, 1.0);
    vec![
        Scenario::new(
            "alignment",
            spin_y,
            SchedulePlan::single(40.0, Alignment),
            40.0,
        ),
        Scenario::new(
            "passive",
            tumbling,
            SchedulePlan::single(40.0, Passive),
            40.0,
        ),
        Scenario::new(
            "precession",
            tumbling,
            SchedulePlan::single(80.0, Precession),
            80.0,
        ),
        Scenario::new(
            "combined",
            spin_y,
            SchedulePlan::new(vec![(20.0, Alignment), (40.0, Precession)])
                .expect("static plan is valid"),
            40.0,
        ),
    ]
}

pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}
