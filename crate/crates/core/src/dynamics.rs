//! Independent zero-temperature amplitude damping of two qubits.
//!
//! Each qubit's reduced dynamics is fixed by one complex amplitude `q`:
//! `ρ₁₁ → |q|²ρ₁₁`, `ρ₁₀ → qρ₁₀`, `ρ₀₀ → ρ₀₀ + (1 − |q|²)ρ₁₁`. The two-qubit
//! map is the contraction of the two single-qubit coefficient tensors with the
//! initial matrix.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{phase, validate, TwoQubitState, XStateView, PSD_TOL, TRACE_TOL};

/// Slack on `|q| ≤ 1` for amplitudes assembled from rounded arithmetic.
const UNIT_DISK_SLACK: f64 = 1e-12;

/// Decoherence amplitude `q`, a point of the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct DecoherenceAmplitude(Complex64);

impl DecoherenceAmplitude {
    pub fn new(q: Complex64) -> Result<Self> {
        let norm = q.norm();
        if norm.is_finite() && norm <= 1.0 + UNIT_DISK_SLACK {
            Ok(Self(q))
        } else {
            Err(Error::Domain {
                name: "|q|",
                value: norm,
                expected: "<= 1",
            })
        }
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::new(Complex64::new(q, 0.0))
    }

    /// The real non-negative amplitude with `|q|² = x`.
    pub fn from_population(x: f64) -> Result<Self> {
        crate::error::check_range("x", x, 0.0, 1.0, "[0, 1]")?;
        Ok(Self(Complex64::new(x.sqrt(), 0.0)))
    }

    pub fn identity() -> Self {
        Self(Complex64::new(1.0, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    /// Population parameter `|q|²`.
    pub fn population(&self) -> f64 {
        self.0.norm_sqr()
    }

    /// Amplitude of two channels applied in sequence.
    pub fn compose(&self, then: &Self) -> Self {
        Self(self.0 * then.0)
    }
}

impl TryFrom<Complex64> for DecoherenceAmplitude {
    type Error = String;
    fn try_from(q: Complex64) -> std::result::Result<Self, String> {
        Self::new(q).map_err(|e| e.to_string())
    }
}

impl From<DecoherenceAmplitude> for Complex64 {
    fn from(q: DecoherenceAmplitude) -> Self {
        q.0
    }
}

/// Single-qubit density matrix in the basis {|1⟩, |0⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitState {
    matrix: Matrix2<Complex64>,
}

impl SingleQubitState {
    pub fn new(matrix: Matrix2<Complex64>) -> Result<Self> {
        let herm = (matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let trace = (matrix.trace() - Complex64::new(1.0, 0.0)).norm();
        let min_eig = (matrix + matrix.adjoint())
            .scale(0.5)
            .symmetric_eigenvalues()
            .min();
        if herm <= crate::states::HERMITIAN_TOL && trace <= TRACE_TOL && min_eig >= -PSD_TOL {
            Ok(Self { matrix })
        } else {
            Err(Error::Domain {
                name: "single-qubit state",
                value: min_eig.min(-herm).min(-trace),
                expected: "Hermitian, unit trace, positive semidefinite",
            })
        }
    }

    pub fn excited() -> Self {
        Self {
            matrix: Matrix2::new(
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ),
        }
    }

    pub fn ground() -> Self {
        Self {
            matrix: Matrix2::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ),
        }
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.matrix
    }

    /// `ρ₁₁`, the excited-state population.
    pub fn excited_population(&self) -> f64 {
        self.matrix[(0, 0)].re
    }
}

/// Maps a qubit value (1 = excited, 0 = ground) to its position in {|1⟩, |0⟩}.
fn pos(v: usize) -> usize {
    1 - v
}

fn pair_index(a: usize, b: usize) -> usize {
    2 * pos(a) + pos(b)
}

/// Non-zero coefficients `C_{ii′}^{ll′}` of a single-qubit map
/// `ρ_{ii′}(t) = Σ C_{ii′}^{ll′} ρ_{ll′}(0)`; indices are qubit values 0/1.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCoefficients {
    pub entries: Vec<ChannelEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEntry {
    pub out_row: usize,
    pub out_col: usize,
    pub in_row: usize,
    pub in_col: usize,
    pub value: Complex64,
}

impl ChannelCoefficients {
    pub fn amplitude_damping(q: DecoherenceAmplitude) -> Self {
        let q = q.value();
        let x = q.norm_sqr();
        let entry = |out_row, out_col, in_row, in_col, value| ChannelEntry {
            out_row,
            out_col,
            in_row,
            in_col,
            value,
        };
        Self {
            entries: vec![
                entry(1, 1, 1, 1, Complex64::new(x, 0.0)),
                entry(1, 0, 1, 0, q),
                entry(0, 1, 0, 1, q.conj()),
                entry(0, 0, 0, 0, Complex64::new(1.0, 0.0)),
                entry(0, 0, 1, 1, Complex64::new(1.0 - x, 0.0)),
            ],
        }
    }

    fn apply_single(&self, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        let mut out = Matrix2::zeros();
        for e in &self.entries {
            out[(pos(e.out_row), pos(e.out_col))] += e.value * rho[(pos(e.in_row), pos(e.in_col))];
        }
        out
    }
}

pub fn single_qubit_map(rho0: &SingleQubitState, q: DecoherenceAmplitude) -> SingleQubitState {
    SingleQubitState {
        matrix: ChannelCoefficients::amplitude_damping(q).apply_single(&rho0.matrix),
    }
}

/// `p = ρ₁₁(0)|q|²`.
pub fn excited_population(rho0: &SingleQubitState, q: DecoherenceAmplitude) -> f64 {
    rho0.excited_population() * q.population()
}

/// `ρ_{ii′,jj′}(t) = Σ A_{ii′}^{ll′} B_{jj′}^{mm′} ρ_{ll′,mm′}(0)`.
pub fn contract(
    rho0: &Matrix4<Complex64>,
    a: &ChannelCoefficients,
    b: &ChannelCoefficients,
) -> Matrix4<Complex64> {
    let mut out = Matrix4::zeros();
    for ea in &a.entries {
        for eb in &b.entries {
            let row = pair_index(ea.out_row, eb.out_row);
            let col = pair_index(ea.out_col, eb.out_col);
            let src_row = pair_index(ea.in_row, eb.in_row);
            let src_col = pair_index(ea.in_col, eb.in_col);
            out[(row, col)] += ea.value * eb.value * rho0[(src_row, src_col)];
        }
    }
    out
}

pub fn propagate(
    rho0: &TwoQubitState,
    q_a: DecoherenceAmplitude,
    q_b: DecoherenceAmplitude,
) -> TwoQubitState {
    let a = ChannelCoefficients::amplitude_damping(q_a);
    let b = ChannelCoefficients::amplitude_damping(q_b);
    TwoQubitState::from_matrix_unchecked(contract(rho0.matrix(), &a, &b))
}

/// Closed-form evolution of an X state; agrees with [`propagate`] on the
/// embedded matrix.
pub fn propagate_x(
    view0: &XStateView,
    q_a: DecoherenceAmplitude,
    q_b: DecoherenceAmplitude,
) -> XStateView {
    let (qa, qb) = (q_a.value(), q_b.value());
    let (xa, xb) = (qa.norm_sqr(), qb.norm_sqr());
    let p11 = xa * xb * view0.p11;
    let p22 = xa * view0.p22 + xa * (1.0 - xb) * view0.p11;
    let p33 = xb * view0.p33 + (1.0 - xa) * xb * view0.p11;
    let scale = qa.norm() * qb.norm();
    let shift14 = phase(qa * qb);
    let shift23 = phase(qa * qb.conj());
    XStateView {
        p11,
        p22,
        p33,
        p44: 1.0 - (p11 + p22 + p33),
        m14: scale * view0.m14,
        m23: scale * view0.m23,
        d14: if scale * view0.m14 == 0.0 {
            0.0
        } else {
            crate::states::wrap_angle(view0.d14 + shift14)
        },
        d23: if scale * view0.m23 == 0.0 {
            0.0
        } else {
            crate::states::wrap_angle(view0.d23 + shift23)
        },
    }
}

/// `ρ_A ⊗ ρ_B` in the two-qubit basis.
pub fn product(a: &SingleQubitState, b: &SingleQubitState) -> TwoQubitState {
    TwoQubitState::from_matrix_unchecked(a.matrix.kronecker(&b.matrix))
}

/// Reduced state of qubit A.
pub fn trace_out_b(state: &TwoQubitState) -> SingleQubitState {
    let m = state.matrix();
    SingleQubitState {
        matrix: Matrix2::from_fn(|i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)]),
    }
}

/// Reduced state of qubit B.
pub fn trace_out_a(state: &TwoQubitState) -> SingleQubitState {
    let m = state.matrix();
    SingleQubitState {
        matrix: Matrix2::from_fn(|i, j| m[(i, j)] + m[(i + 2, j + 2)]),
    }
}

/// Fails if an evolved state drifted outside the density-matrix tolerances.
pub fn check_evolved(state: &TwoQubitState) -> Result<()> {
    let report = validate(state.matrix());
    if report.passed() {
        Ok(())
    } else {
        Err(Error::InvalidState(report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_bell_like, EwlParams, Family};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn excited_qubit_decays() {
        let q = DecoherenceAmplitude::real(0.6).unwrap();
        let out = single_qubit_map(&SingleQubitState::excited(), q);
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(out.matrix()[(1, 1)].re, 0.64, epsilon = 1e-15);
    }

    #[test]
    fn ground_state_is_fixed() {
        for q in [c(0.0, 0.0), c(0.3, -0.4), c(1.0, 0.0)] {
            let out = single_qubit_map(&SingleQubitState::ground(), DecoherenceAmplitude::new(q).unwrap());
            assert_eq!(out, SingleQubitState::ground());
        }
    }

    #[test]
    fn coherence_scales_by_q() {
        let plus = SingleQubitState::new(Matrix2::from_element(c(0.5, 0.0))).unwrap();
        let out = single_qubit_map(&plus, DecoherenceAmplitude::real(0.6).unwrap());
        assert_abs_diff_eq!(out.matrix()[(0, 1)].re, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(out.matrix()[(1, 0)].re, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn excited_population_values() {
        let mixed = |p: f64| {
            SingleQubitState::new(Matrix2::new(c(p, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0 - p, 0.0)))
                .unwrap()
        };
        let q08 = DecoherenceAmplitude::from_population(0.8).unwrap();
        assert_abs_diff_eq!(excited_population(&mixed(1.0), q08), 0.8, epsilon = 1e-15);
        let q05 = DecoherenceAmplitude::from_population(0.5).unwrap();
        assert_abs_diff_eq!(excited_population(&mixed(0.5), q05), 0.25, epsilon = 1e-15);
        let qi = DecoherenceAmplitude::new(c(0.0, 0.6)).unwrap();
        assert_abs_diff_eq!(excited_population(&mixed(0.3), qi), 0.108, epsilon = 1e-15);
    }

    #[test]
    fn amplitude_outside_disk_is_rejected() {
        assert!(DecoherenceAmplitude::new(c(0.8, 0.7)).is_err());
        assert!(DecoherenceAmplitude::from_population(1.2).is_err());
        assert!(DecoherenceAmplitude::new(c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn unit_amplitude_is_identity() {
        let s = crate::states::random_state(&mut rand::rng());
        let out = propagate(&s, DecoherenceAmplitude::identity(), DecoherenceAmplitude::identity());
        assert_eq!(out, s);
    }

    #[test]
    fn complete_decay_reaches_ground() {
        let s = crate::states::random_state(&mut rand::rng());
        let zero = DecoherenceAmplitude::real(0.0).unwrap();
        let out = propagate(&s, zero, zero);
        let mut expected = Matrix4::zeros();
        expected[(3, 3)] = c(1.0, 0.0);
        assert!((out.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn bell_phi_at_half_population() {
        let bell = build_bell_like(&EwlParams::new(Family::Phi, 1.0, FRAC_1_SQRT_2, 0.0)).unwrap();
        let q = DecoherenceAmplitude::from_population(0.5).unwrap();
        let out = propagate(&bell, q, q);
        assert_abs_diff_eq!(out.element(1, 1).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(out.element(2, 2).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(out.element(3, 3).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out.element(1, 2).re, 0.25, epsilon = 1e-15);
        let v = propagate_x(&bell.as_x_view().unwrap(), q, q);
        assert!((v.to_matrix() - out.matrix()).norm() < 1e-12);
    }

    #[test]
    fn doubly_excited_decays_binomially() {
        let view = XStateView {
            p11: 1.0,
            p22: 0.0,
            p33: 0.0,
            p44: 0.0,
            m14: 0.0,
            m23: 0.0,
            d14: 0.0,
            d23: 0.0,
        };
        for x in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let q = DecoherenceAmplitude::from_population(x).unwrap();
            let v = propagate_x(&view, q, q);
            assert_abs_diff_eq!(v.p11, x * x, epsilon = 1e-15);
            assert_abs_diff_eq!(v.p22, x * (1.0 - x), epsilon = 1e-15);
            assert_abs_diff_eq!(v.p33, x * (1.0 - x), epsilon = 1e-15);
            assert_abs_diff_eq!(v.p44, (1.0 - x) * (1.0 - x), epsilon = 1e-15);
            assert_abs_diff_eq!(v.excited_a(), x, epsilon = 1e-15);
            assert_abs_diff_eq!(v.excited_b(), x, epsilon = 1e-15);
        }
    }

    #[test]
    fn propagate_x_identity() {
        let view = crate::states::random_x_view(&mut rand::rng());
        let id = DecoherenceAmplitude::identity();
        let v = propagate_x(&view, id, id);
        assert_abs_diff_eq!(v.p11, view.p11);
        assert_abs_diff_eq!(v.p44, view.p44, epsilon = 1e-15);
        assert_abs_diff_eq!(v.d14, view.d14);
        assert_abs_diff_eq!(v.m23, view.m23);
    }

    #[test]
    fn complex_phases_follow_the_contraction() {
        let view = crate::states::random_x_view(&mut rand::rng());
        let qa = DecoherenceAmplitude::new(c(0.3, 0.5)).unwrap();
        let qb = DecoherenceAmplitude::new(c(-0.6, 0.2)).unwrap();
        let full = propagate(&view.to_state().unwrap(), qa, qb);
        let closed = propagate_x(&view, qa, qb);
        assert!((full.matrix() - closed.to_matrix()).norm() < 1e-12);
    }

    #[test]
    fn coefficient_table_has_five_entries() {
        let t = ChannelCoefficients::amplitude_damping(DecoherenceAmplitude::real(0.5).unwrap());
        assert_eq!(t.entries.len(), 5);
        let decay = t
            .entries
            .iter()
            .find(|e| (e.out_row, e.out_col, e.in_row, e.in_col) == (0, 0, 1, 1))
            .unwrap();
        assert_abs_diff_eq!(decay.value.re, 0.75);
    }
}
