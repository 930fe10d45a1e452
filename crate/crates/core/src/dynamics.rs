//! Flat-disk inertia model and the controlled Euler rotation dynamics.
//!
//! The disk carries two symmetric pairs of movable masses, one pair along
//! the body `y` axis and one along `z`. Moving them changes the principal
//! inertias `I2`, `I3`, while flatness pins `I1 = I2 + I3`. The reduced state
//! used by the controllers is the 5-vector `(ω1, ω2, ω3, I2, I3)` and the
//! inputs are the inertia rates `u1 = İ2`, `u2 = İ3`.
//!
//! Everything here is a pure function of its arguments.

use nalgebra::{Matrix3, Vector3, Vector5};

use crate::error::{Error, Result};

/// Reduced state `(ω1, ω2, ω3, I2, I3)`.
pub type StateVector = Vector5<f64>;

/// Relative tolerance used when deciding whether an inertia sits below the
/// rest configuration.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Physical constants of the disk, stored as `m·r²` and `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskParams {
    mr2: f64,
    radius: f64,
}

impl DiskParams {
    pub fn new(mass: f64, radius: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        Self::with_mr2(mass * radius * radius, radius)
    }

    /// Disk of the given `m·r²` and radius.
    pub fn with_mr2(mr2: f64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if !(mr2.is_finite() && mr2 > 0.0) {
            return Err(Error::Domain(format!("m·r² must be positive, got {mr2}")));
        }
        Ok(Self { mr2, radius })
    }

    /// Disk of the given `m·r²` with unit radius.
    pub fn from_mr2(mr2: f64) -> Result<Self> {
        Self::with_mr2(mr2, 1.0)
    }

    pub fn mass(&self) -> f64 {
        self.mr2 / (self.radius * self.radius)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn mr2(&self) -> f64 {
        self.mr2
    }

    /// Rest inertia about the second axis, `m·r²/4`.
    pub fn nominal_i2(&self) -> f64 {
        0.25 * self.mr2()
    }

    /// Rest inertia about the third axis, `m·r²/4`.
    pub fn nominal_i3(&self) -> f64 {
        0.25 * self.mr2()
    }

    /// Rest inertia about the spin axis. Computed as the sum of the other two
    /// so flatness holds bit-exactly.
    pub fn nominal_i1(&self) -> f64 {
        self.nominal_i2() + self.nominal_i3()
    }

    pub fn nominal_inertia(&self) -> InertiaState {
        InertiaState {
            i2: self.nominal_i2(),
            i3: self.nominal_i3(),
        }
    }
}

impl Default for DiskParams {
    /// `m·r² = 4`, giving the rest inertia `diag(2, 1, 1)`.
    fn default() -> Self {
        Self {
            mr2: 4.0,
            radius: 1.0,
        }
    }
}

/// The two controllable principal inertias. `I1` is always derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaState {
    i2: f64,
    i3: f64,
}

impl InertiaState {
    pub fn new(i2: f64, i3: f64) -> Result<Self> {
        check_positive(i2, i3)?;
        Ok(Self { i2, i3 })
    }

    pub fn i1(&self) -> f64 {
        self.i2 + self.i3
    }

    pub fn i2(&self) -> f64 {
        self.i2
    }

    pub fn i3(&self) -> f64 {
        self.i3
    }

    /// Principal inertias `(I1, I2, I3)`.
    pub fn diagonal(&self) -> Vector3<f64> {
        Vector3::new(self.i1(), self.i2, self.i3)
    }
}

/// Inertia rates applied by the mass actuators.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput {
    pub u1: f64,
    pub u2: f64,
}

impl ControlInput {
    pub const ZERO: ControlInput = ControlInput { u1: 0.0, u2: 0.0 };

    pub fn new(u1: f64, u2: f64) -> Self {
        Self { u1, u2 }
    }

    pub fn norm(&self) -> f64 {
        self.u1.hypot(self.u2)
    }
}

/// Full simulation state: body-to-world attitude, body rotation vector and
/// inertia.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    pub attitude: Matrix3<f64>,
    pub omega: Vector3<f64>,
    pub inertia: InertiaState,
}

impl BodyState {
    pub fn new(attitude: Matrix3<f64>, omega: Vector3<f64>, inertia: InertiaState) -> Self {
        Self {
            attitude,
            omega,
            inertia,
        }
    }

    pub fn reduced(&self) -> StateVector {
        StateVector::new(
            self.omega.x,
            self.omega.y,
            self.omega.z,
            self.inertia.i2,
            self.inertia.i3,
        )
    }

    /// Rebuilds a state from a reduced vector and an attitude.
    pub fn from_reduced(attitude: Matrix3<f64>, x: &StateVector) -> Result<Self> {
        Ok(Self {
            attitude,
            omega: Vector3::new(x[0], x[1], x[2]),
            inertia: InertiaState::new(x[3], x[4])?,
        })
    }
}

fn check_positive(i2: f64, i3: f64) -> Result<()> {
    if i2 > 0.0 && i3 > 0.0 && i2.is_finite() && i3.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "inertia must be positive and finite, got I2 = {i2}, I3 = {i3}"
        )))
    }
}

fn check_state(x: &StateVector) -> Result<()> {
    check_positive(x[3], x[4])
}

/// Inertia produced by placing the `y` pair at distance `l2` and the `z` pair
/// at distance `l3` from the center.
pub fn inertia_from_lengths(params: &DiskParams, l2: f64, l3: f64) -> Result<InertiaState> {
    if !(l2 >= 0.0 && l3 >= 0.0) || !l2.is_finite() || !l3.is_finite() {
        return Err(Error::Domain(format!(
            "mass distances must be nonnegative, got l2 = {l2}, l3 = {l3}"
        )));
    }
    InertiaState::new(
        params.nominal_i2() + 0.5 * l2 * l2,
        params.nominal_i3() + 0.5 * l3 * l3,
    )
}

/// Inverse of [`inertia_from_lengths`].
pub fn lengths_from_inertia(params: &DiskParams, inertia: &InertiaState) -> Result<(f64, f64)> {
    let excursion = |i: f64, nominal: f64, axis: u8| {
        let d = i - nominal;
        if d < -FEASIBILITY_TOL * nominal {
            Err(Error::InfeasibleInertia(format!(
                "I{axis} = {i} is below the rest value {nominal}"
            )))
        } else {
            Ok((2.0 * d.max(0.0)).sqrt())
        }
    };
    Ok((
        excursion(inertia.i2, params.nominal_i2(), 2)?,
        excursion(inertia.i3, params.nominal_i3(), 3)?,
    ))
}

/// Mass distances for output. Inertias at or below rest report zero.
pub fn display_lengths(params: &DiskParams, inertia: &InertiaState) -> (f64, f64) {
    let l = |i: f64, nominal: f64| (2.0 * (i - nominal).max(0.0)).sqrt();
    (
        l(inertia.i2, params.nominal_i2()),
        l(inertia.i3, params.nominal_i3()),
    )
}

/// Free (input-independent) part `f(x)` of the control-affine dynamics.
pub fn drift_field(x: &StateVector) -> Result<StateVector> {
    check_state(x)?;
    let (w1, w2, w3, i2, i3) = (x[0], x[1], x[2], x[3], x[4]);
    Ok(StateVector::new(
        -(i3 - i2) / (i2 + i3) * w2 * w3,
        -w3 * w1,
        w1 * w2,
        0.0,
        0.0,
    ))
}

/// Input directions `(g1(x), g2(x))` of the control-affine dynamics.
pub fn control_fields(x: &StateVector) -> Result<(StateVector, StateVector)> {
    check_state(x)?;
    let (w1, w2, w3, i2, i3) = (x[0], x[1], x[2], x[3], x[4]);
    let i1 = i2 + i3;
    Ok((
        StateVector::new(-w1 / i1, -w2 / i2, 0.0, 1.0, 0.0),
        StateVector::new(-w1 / i1, 0.0, -w3 / i3, 0.0, 1.0),
    ))
}

/// Time derivative of the reduced state under input `u`.
///
/// Written out directly from the time-varying Euler equation with the
/// flatness substitution, not assembled from [`drift_field`] and
/// [`control_fields`], so the affine split can be checked against it.
pub fn state_rhs(x: &StateVector, u: &ControlInput) -> Result<StateVector> {
    check_state(x)?;
    let (w1, w2, w3, i2, i3) = (x[0], x[1], x[2], x[3], x[4]);
    let i1 = i2 + i3;
    Ok(StateVector::new(
        -w1 / i1 * (u.u1 + u.u2) - (i3 - i2) / i1 * w2 * w3,
        -w2 / i2 * u.u1 - w3 * w1,
        -w3 / i3 * u.u2 + w1 * w2,
        u.u1,
        u.u2,
    ))
}

/// Matrix `[v]×` such that `[v]× w = v × w`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Attitude kinematics `Ṙ = R [ω]×`.
pub fn attitude_rhs(attitude: &Matrix3<f64>, omega: &Vector3<f64>) -> Matrix3<f64> {
    attitude * skew(omega)
}

/// World-frame angular momentum `R · I · ω`.
pub fn angular_momentum(state: &BodyState) -> Vector3<f64> {
    state.attitude * state.inertia.diagonal().component_mul(&state.omega)
}

pub fn kinetic_energy(state: &BodyState) -> f64 {
    0.5 * state
        .inertia
        .diagonal()
        .component_mul(&state.omega)
        .dot(&state.omega)
}

/// `‖ω × I·ω‖²`, zero exactly when ω is along a principal axis.
pub fn precession_norm_sq(x: &StateVector) -> f64 {
    let (w1, w2, w3, i2, i3) = (x[0], x[1], x[2], x[3], x[4]);
    let i1 = i2 + i3;
    let a = (i3 - i2) * w2 * w3;
    let b = (i1 - i3) * w3 * w1;
    let c = (i2 - i1) * w1 * w2;
    a * a + b * b + c * c
}
