//! Exponential map on SO(3).

use nalgebra::{Matrix3, Vector3};

use crate::dynamics::skew;

/// Rotation matrix `exp([φ]×)` by the Rodrigues formula.
pub fn exp_map(phi: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = phi.norm_squared();
    let k = skew(phi);
    // series for sin(θ)/θ and (1 - cos θ)/θ² below θ ≈ 1e-4
    let (a, b) = if theta2 < 1e-8 {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Largest entry of `RᵀR - I`.
pub fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    (r.transpose() * r - Matrix3::identity()).amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Rotation3;
    use proptest::prelude::*;

    #[test]
    fn quarter_turn_about_z() {
        let r = exp_map(&Vector3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
        assert_relative_eq!(r * Vector3::x(), Vector3::y(), epsilon = 1e-15);
        assert_eq!(exp_map(&Vector3::zeros()), Matrix3::identity());
    }

    proptest! {
        #[test]
        fn matches_axis_angle(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64, s in prop::sample::select(vec![1.0, 1e-3, 1e-5, 1e-9])) {
            let phi = Vector3::new(x, y, z) * s;
            let r = exp_map(&phi);
            let reference = Rotation3::new(phi);
            prop_assert!((r - reference.matrix()).amax() < 1e-14);
            prop_assert!(orthonormality_error(&r) < 1e-14);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-14);
        }
    }
}
