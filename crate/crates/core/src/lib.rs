//! Inertia-shaping control of a torque-free spinning flat disk.
//!
//! A flat disk (`I1 = I2 + I3`) spins freely in space. Two symmetric pairs of
//! internal masses change `I2` and `I3`, and Lyapunov-based feedback on the
//! inertia rates steers the body rotation vector while the world-frame
//! angular momentum stays fixed.
//!
//! - [`dynamics`]: inertia model, control-affine Euler equations, momentum
//!   and energy.
//! - [`objectives`]: alignment, passive and precession objectives, the
//!   unit-norm descent law and time schedules.
//! - [`simulation`]: RK4 closed-loop runs and the built-in scenarios.
//! - [`lie_oracle`]: finite-difference verification of the Lie derivatives.
//! - [`config`], [`trace_csv`], [`plot`], [`summary`]: command-line I/O.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod lie_oracle;
pub mod objectives;
pub mod plot;
pub mod simulation;
pub mod so3;
pub mod summary;
pub mod trace_csv;

pub use dynamics::{BodyState, ControlInput, DiskParams, InertiaState, StateVector};
pub use error::{Error, Result};
pub use objectives::{ControlLawConfig, ObjectiveEval, ObjectiveKind, SchedulePlan};
pub use simulation::{Scenario, Trace, TraceRow};
