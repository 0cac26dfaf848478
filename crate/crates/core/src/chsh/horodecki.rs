use nalgebra::Matrix3;

use super::observables::{expectation, observable_matrix, MeasurementDirection};
use crate::states::TwoQubitState;
use std::f64::consts::FRAC_PI_2;

/// Pauli axes 1↔x, 2↔y, 3↔z in the observable parameterization.
fn pauli_axes() -> [MeasurementDirection; 3] {
    [
        MeasurementDirection { theta: FRAC_PI_2, phi: 0.0 },
        MeasurementDirection { theta: FRAC_PI_2, phi: FRAC_PI_2 },
        MeasurementDirection::z(),
    ]
}

/// `T_nm = Tr[ρ σ_n ⊗ σ_m]`.
pub fn correlation_matrix(state: &TwoQubitState) -> Matrix3<f64> {
    let paulis = pauli_axes().map(|d| observable_matrix(&d));
    Matrix3::from_fn(|n, m| expectation(state.matrix(), &paulis[n], &paulis[m]).re)
}

/// Largest CHSH value over all settings, `2√(u₁ + u₂)` with `u₁ ≥ u₂` the top
/// eigenvalues of `TᵀT`.
pub fn horodecki_max(state: &TwoQubitState) -> f64 {
    let t = correlation_matrix(state);
    let mut u: Vec<f64> = (t.transpose() * t).symmetric_eigenvalues().iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    2.0 * (u[0] + u[1]).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{propagate_x, DecoherenceAmplitude};
    use crate::states::{build_bell_like, ewl_view, EwlParams, Family};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bell_state_reaches_tsirelson() {
        let s = build_bell_like(&EwlParams::new(Family::Psi, 1.0, FRAC_1_SQRT_2, 0.0)).unwrap();
        let t = correlation_matrix(&s);
        assert!((t - Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, 1.0))).norm() < 1e-15);
        assert_abs_diff_eq!(horodecki_max(&s), 2.0 * 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn maximally_mixed_is_zero() {
        assert_eq!(correlation_matrix(&TwoQubitState::maximally_mixed()), Matrix3::zeros());
        assert_abs_diff_eq!(horodecki_max(&TwoQubitState::maximally_mixed()), 0.0);
    }

    #[test]
    fn evolved_werner_phi_at_three_quarters() {
        let v0 = ewl_view(&EwlParams::werner(Family::Phi, 1.0)).unwrap();
        let q = DecoherenceAmplitude::from_population(0.75).unwrap();
        let s = propagate_x(&v0, q, q).to_state().unwrap();
        let t = correlation_matrix(&s);
        assert_abs_diff_eq!(t[(0, 0)], 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(t[(1, 1)], 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(t[(2, 2)], -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(horodecki_max(&s), 2.0 * 1.125f64.sqrt(), epsilon = 1e-13);
    }
}
