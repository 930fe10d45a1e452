//! Finite-difference checks of the analytic gradients and Lie derivatives.
//!
//! The oracle only ever calls [`objective_value`] and the vector fields, so
//! it stays independent of the hand-derived gradients it checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{control_fields, drift_field, DiskParams, StateVector};
use crate::error::{Error, Result};
use crate::objectives::{evaluate, objective_value, ObjectiveKind};

pub const DEFAULT_STEP: f64 = 1e-5;

/// Number of times a coordinate step is divided by ten when the stencil
/// leaves the domain of `f`.
const MAX_SHRINKS: usize = 3;

/// Central-difference gradient of `f` at `x`.
pub fn fd_gradient<F>(f: F, x: &StateVector, h: f64) -> Result<StateVector>
where
    F: Fn(&StateVector) -> Result<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let mut grad = StateVector::zeros();
    for i in 0..5 {
        let mut step = h;
        let mut attempt = 0;
        grad[i] = loop {
            let mut plus = *x;
            let mut minus = *x;
            plus[i] += step;
            minus[i] -= step;
            match (f(&plus), f(&minus)) {
                (Ok(a), Ok(b)) => break (a - b) / (2.0 * step),
                (Err(e), _) | (_, Err(e)) => {
                    if attempt == MAX_SHRINKS {
                        return Err(Error::Domain(format!(
                            "finite-difference stencil for coordinate {i} leaves the domain: {e}"
                        )));
                    }
                    attempt += 1;
                    step /= 10.0;
                }
            }
        };
    }
    Ok(grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub kind: ObjectiveKind,
    pub samples: usize,
    pub tolerance: f64,
    pub max_rel_error_grad: f64,
    pub max_rel_error_lf: f64,
    pub max_rel_error_lg1: f64,
    pub max_rel_error_lg2: f64,
    /// Sample with the largest error over all compared quantities.
    pub worst_state: StateVector,
    pub pass: bool,
}

impl VerificationReport {
    pub fn max_error(&self) -> f64 {
        self.max_rel_error_grad
            .max(self.max_rel_error_lf)
            .max(self.max_rel_error_lg1)
            .max(self.max_rel_error_lg2)
    }
}

fn rel_error(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / (1.0 + reference.abs())
}

/// Samples a state with `ω ∈ [-10, 10]³` and `I2, I3 ∈ [Ī/2, 3Ī]`.
pub fn sample_state<R: Rng>(rng: &mut R, params: &DiskParams) -> StateVector {
    let mut w = || rng.gen_range(-10.0..=10.0);
    let (w1, w2, w3) = (w(), w(), w());
    let i2 = rng.gen_range(0.5 * params.nominal_i2()..=3.0 * params.nominal_i2());
    let i3 = rng.gen_range(0.5 * params.nominal_i3()..=3.0 * params.nominal_i3());
    StateVector::new(w1, w2, w3, i2, i3)
}

/// Compares the analytic evaluation of `kind` against central differences
/// on `n_samples` seeded random states of the default disk.
pub fn verify_objective(
    kind: ObjectiveKind,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> VerificationReport {
    verify_objective_with(&DiskParams::default(), kind, n_samples, tol, seed)
}

pub fn verify_objective_with(
    params: &DiskParams,
    kind: ObjectiveKind,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport {
        kind,
        samples: n_samples,
        tolerance: tol,
        max_rel_error_grad: 0.0,
        max_rel_error_lf: 0.0,
        max_rel_error_lg1: 0.0,
        max_rel_error_lg2: 0.0,
        worst_state: StateVector::zeros(),
        pass: false,
    };
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n_samples {
        let x = sample_state(&mut rng, params);
        // an evaluation failure at a sampled state counts as a failed check
        let errors = check_state(params, kind, &x).unwrap_or([f64::INFINITY; 4]);
        report.max_rel_error_grad = report.max_rel_error_grad.max(errors[0]);
        report.max_rel_error_lf = report.max_rel_error_lf.max(errors[1]);
        report.max_rel_error_lg1 = report.max_rel_error_lg1.max(errors[2]);
        report.max_rel_error_lg2 = report.max_rel_error_lg2.max(errors[3]);
        let e = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if e > worst {
            worst = e;
            report.worst_state = x;
        }
    }
    report.pass = n_samples > 0 && report.max_error() < tol;
    report
}

fn check_state(params: &DiskParams, kind: ObjectiveKind, x: &StateVector) -> Option<[f64; 4]> {
    let analytic = evaluate(kind, x, params).ok()?;
    let numeric = fd_gradient(|y| objective_value(kind, y, params), x, DEFAULT_STEP).ok()?;
    let f = drift_field(x).ok()?;
    let (g1, g2) = control_fields(x).ok()?;
    let grad = analytic
        .grad
        .iter()
        .zip(numeric.iter())
        .map(|(&a, &n)| rel_error(a, n))
        .fold(0.0, f64::max);
    Some([
        grad,
        rel_error(analytic.lf, numeric.dot(&f)),
        rel_error(analytic.lg1, numeric.dot(&g1)),
        rel_error(analytic.lg2, numeric.dot(&g2)),
    ])
}
