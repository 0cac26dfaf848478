//! Two-qubit density matrices in the basis {|11⟩, |10⟩, |01⟩, |00⟩}.
//!
//! The first label is qubit A, the second qubit B, and `|1⟩` (excited) comes
//! before `|0⟩` (ground) for each qubit, so `ρ_A ⊗ ρ_B` written in the
//! single-qubit basis {|1⟩, |0⟩} lands directly in this ordering.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// Scalar type for every amplitude and matrix element.
pub type ComplexValue = Complex64;

/// Serialized basis label; all matrices use this row/column order.
pub const BASIS_LABEL: &str = "11,10,01,00";

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Looser than the Hermiticity tolerance: eigen-solvers amplify rounding.
pub const PSD_TOL: f64 = 1e-10;
/// Largest magnitude an off-X element may have for the state to count as X-shaped.
pub const X_TOL: f64 = 1e-12;

/// Positions that must vanish in an X-shaped 4×4 matrix.
const OFF_X: [(usize, usize); 8] = [
    (0, 1),
    (0, 2),
    (1, 0),
    (1, 3),
    (2, 0),
    (2, 3),
    (3, 1),
    (3, 2),
];

/// Residuals of the density-matrix conditions for a raw 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// max |ρ_ij − conj(ρ_ji)|
    pub hermiticity_residual: f64,
    /// |Tr ρ − 1|
    pub trace_residual: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    pub hermitian: bool,
    pub unit_trace: bool,
    pub positive: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.hermitian && self.unit_trace && self.positive
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        write!(
            f,
            "hermiticity {:.3e} ({}), trace {:.3e} ({}), min eigenvalue {:.3e} ({})",
            self.hermiticity_residual,
            mark(self.hermitian),
            self.trace_residual,
            mark(self.unit_trace),
            self.min_eigenvalue,
            mark(self.positive),
        )
    }
}

/// Checks Hermiticity, unit trace and positivity of a raw matrix.
pub fn validate(m: &Matrix4<Complex64>) -> ValidationReport {
    let adjoint = m.adjoint();
    let hermiticity_residual = (m - adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let trace_residual = (m.trace() - Complex64::new(1.0, 0.0)).norm();
    let hermitian_part = (m + adjoint).scale(0.5);
    let min_eigenvalue = if hermitian_part.iter().all(|z| z.is_finite()) {
        hermitian_part
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    } else {
        f64::NAN
    };
    ValidationReport {
        hermiticity_residual,
        trace_residual,
        min_eigenvalue,
        hermitian: hermiticity_residual <= HERMITIAN_TOL,
        unit_trace: trace_residual <= TRACE_TOL,
        positive: min_eigenvalue >= -PSD_TOL,
    }
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct TwoQubitState {
    matrix: Matrix4<Complex64>,
}

impl TwoQubitState {
    /// Wraps `matrix` after checking the density-matrix conditions.
    pub fn new(matrix: Matrix4<Complex64>) -> Result<Self> {
        let report = validate(&matrix);
        if report.passed() {
            Ok(Self { matrix })
        } else {
            Err(Error::InvalidState(report))
        }
    }

    /// Caller guarantees the matrix is a density matrix up to rounding.
    pub(crate) fn from_matrix_unchecked(matrix: Matrix4<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Matrix4::identity().scale(0.25),
        }
    }

    /// Rank-one state `|ψ⟩⟨ψ|`; the amplitudes are normalized first.
    pub fn from_pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain {
                name: "state vector norm",
                value: norm,
                expected: "finite and > 0",
            });
        }
        let psi = amplitudes.map(|a| a / norm);
        Ok(Self {
            matrix: Matrix4::from_fn(|i, j| psi[i] * psi[j].conj()),
        })
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix4<Complex64> {
        self.matrix
    }

    /// Element `ρ_ij` with zero-based indices.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.matrix)
    }

    pub fn as_x_view(&self) -> Result<XStateView> {
        as_x_view(self)
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    basis: String,
    elements: Vec<[f64; 2]>,
}

impl From<TwoQubitState> for StateRepr {
    fn from(state: TwoQubitState) -> Self {
        // nalgebra storage is column-major; serialize row-major.
        let elements = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| {
                let z = state.matrix[(i, j)];
                [z.re, z.im]
            })
            .collect();
        Self {
            basis: BASIS_LABEL.to_string(),
            elements,
        }
    }
}

impl TryFrom<StateRepr> for TwoQubitState {
    type Error = String;

    fn try_from(repr: StateRepr) -> std::result::Result<Self, String> {
        if repr.basis != BASIS_LABEL {
            return Err(format!(
                "unsupported basis {:?}, expected {BASIS_LABEL:?}",
                repr.basis
            ));
        }
        if repr.elements.len() != 16 {
            return Err(format!("expected 16 elements, got {}", repr.elements.len()));
        }
        let matrix = Matrix4::from_fn(|i, j| {
            let [re, im] = repr.elements[4 * i + j];
            Complex64::new(re, im)
        });
        TwoQubitState::new(matrix).map_err(|e| e.to_string())
    }
}

/// The eight real degrees of freedom of an X-shaped state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateView {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    /// |ρ₁₄|
    pub m14: f64,
    /// |ρ₂₃|
    pub m23: f64,
    /// arg ρ₁₄ in [0, 2π)
    pub d14: f64,
    /// arg ρ₂₃ in [0, 2π)
    pub d23: f64,
}

impl XStateView {
    /// Checks normalization and the 2×2 block positivity conditions.
    pub fn check(&self) -> Result<()> {
        let pops = [self.p11, self.p22, self.p33, self.p44];
        for (name, p) in ["p11", "p22", "p33", "p44"].into_iter().zip(pops) {
            check_range(name, p, -PSD_TOL, 1.0 + PSD_TOL, "[0, 1]")?;
        }
        let sum: f64 = pops.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::Domain {
                name: "population sum",
                value: sum,
                expected: "1",
            });
        }
        for (name, m, bound) in [
            ("m14", self.m14, self.p11 * self.p44),
            ("m23", self.m23, self.p22 * self.p33),
        ] {
            if !(m >= 0.0 && m * m <= bound + PSD_TOL) {
                return Err(Error::Domain {
                    name,
                    value: m,
                    expected: "0 <= m and m^2 <= product of the matching populations",
                });
            }
        }
        Ok(())
    }

    /// Embeds the view back into a 4×4 matrix.
    pub fn to_matrix(&self) -> Matrix4<Complex64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = Complex64::new(self.p11, 0.0);
        m[(1, 1)] = Complex64::new(self.p22, 0.0);
        m[(2, 2)] = Complex64::new(self.p33, 0.0);
        m[(3, 3)] = Complex64::new(self.p44, 0.0);
        let r14 = Complex64::from_polar(self.m14, self.d14);
        let r23 = Complex64::from_polar(self.m23, self.d23);
        m[(0, 3)] = r14;
        m[(3, 0)] = r14.conj();
        m[(1, 2)] = r23;
        m[(2, 1)] = r23.conj();
        m
    }

    pub fn to_state(&self) -> Result<TwoQubitState> {
        self.check()?;
        Ok(TwoQubitState::from_matrix_unchecked(self.to_matrix()))
    }

    /// Excited-state population of qubit A (`ρ₁₁ + ρ₂₂`).
    pub fn excited_a(&self) -> f64 {
        self.p11 + self.p22
    }

    /// Excited-state population of qubit B (`ρ₁₁ + ρ₃₃`).
    pub fn excited_b(&self) -> f64 {
        self.p11 + self.p33
    }
}

/// Argument of `z` in `[0, 2π)`, with the phase of an exact zero set to 0.
pub(crate) fn phase(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        return 0.0;
    }
    wrap_angle(z.arg())
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Extracts the X-state parameters, rejecting states with off-X weight.
pub fn as_x_view(state: &TwoQubitState) -> Result<XStateView> {
    let m = state.matrix();
    for (row, col) in OFF_X {
        let magnitude = m[(row, col)].norm();
        if magnitude > X_TOL {
            return Err(Error::NotXState {
                row,
                col,
                magnitude,
            });
        }
    }
    Ok(XStateView {
        p11: m[(0, 0)].re,
        p22: m[(1, 1)].re,
        p33: m[(2, 2)].re,
        p44: m[(3, 3)].re,
        m14: m[(0, 3)].norm(),
        m23: m[(1, 2)].norm(),
        d14: phase(m[(0, 3)]),
        d23: phase(m[(1, 2)]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Pure part `α|01⟩ + β e^{iδ}|10⟩`.
    Phi,
    /// Pure part `α|00⟩ + β e^{iδ}|11⟩`.
    Psi,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Phi => "phi",
            Family::Psi => "psi",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(Family::Phi),
            "psi" => Ok(Family::Psi),
            other => Err(format!("unknown family {other:?} (expected phi or psi)")),
        }
    }
}

/// Parameters of an extended Werner-like state `r|χ⟩⟨χ| + (1−r)/4 I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwlParams {
    pub family: Family,
    /// Purity weight of the pure part, in [0, 1].
    pub r: f64,
    /// Real amplitude in [−1, 1].
    pub alpha: f64,
    /// Relative phase in radians.
    pub delta: f64,
}

impl EwlParams {
    pub fn new(family: Family, r: f64, alpha: f64, delta: f64) -> Self {
        Self {
            family,
            r,
            alpha,
            delta,
        }
    }

    /// Werner-like state with a maximally entangled pure part (`α = β = 1/√2`, `δ = 0`).
    pub fn werner(family: Family, r: f64) -> Self {
        Self::new(family, r, std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }

    /// Non-negative root of `α² + β² = 1`; a negative β is carried by `δ = π`.
    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }

    fn check_alpha(&self) -> Result<()> {
        check_range("alpha", self.alpha, -1.0, 1.0, "[-1, 1]")?;
        check_range("delta", self.delta, f64::MIN, f64::MAX, "finite")
    }

    pub fn check(&self) -> Result<()> {
        self.check_alpha()?;
        check_range("r", self.r, 0.0, 1.0, "[0, 1]")
    }
}

/// Pure Bell-like state of the chosen family; `r` is ignored.
pub fn build_bell_like(params: &EwlParams) -> Result<TwoQubitState> {
    params.check_alpha()?;
    let a = Complex64::new(params.alpha, 0.0);
    let b = Complex64::from_polar(params.beta(), params.delta);
    let zero = Complex64::new(0.0, 0.0);
    let psi = match params.family {
        Family::Phi => [zero, b, a, zero],
        Family::Psi => [b, zero, zero, a],
    };
    Ok(TwoQubitState::from_matrix_unchecked(Matrix4::from_fn(
        |i, j| psi[i] * psi[j].conj(),
    )))
}

/// Extended Werner-like state, element by element.
pub fn build_ewl(params: &EwlParams) -> Result<TwoQubitState> {
    Ok(TwoQubitState::from_matrix_unchecked(ewl_view(params)?.to_matrix()))
}

/// X-state parameters of the extended Werner-like state.
pub fn ewl_view(params: &EwlParams) -> Result<XStateView> {
    params.check()?;
    let r = params.r;
    let mixed = (1.0 - r) / 4.0;
    let alpha2 = params.alpha * params.alpha;
    let beta = params.beta();
    let beta2 = beta * beta;
    let coherence = Complex64::from_polar(params.alpha * beta * r, params.delta);
    let (m, d) = (coherence.norm(), phase(coherence));
    Ok(match params.family {
        Family::Phi => XStateView {
            p11: mixed,
            p22: mixed + beta2 * r,
            p33: mixed + alpha2 * r,
            p44: mixed,
            m14: 0.0,
            m23: m,
            d14: 0.0,
            d23: d,
        },
        Family::Psi => XStateView {
            p11: mixed + beta2 * r,
            p22: mixed,
            p33: mixed,
            p44: mixed + alpha2 * r,
            m14: m,
            m23: 0.0,
            d14: d,
            d23: 0.0,
        },
    })
}

/// Random X state: populations uniform on the simplex, coherence magnitudes
/// uniform within the positivity bound, phases uniform.
pub fn random_x_view<R: Rng + ?Sized>(rng: &mut R) -> XStateView {
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
    let total: f64 = w.iter().sum();
    let [p11, p22, p33, p44] = w.map(|v| v / total);
    XStateView {
        p11,
        p22,
        p33,
        p44,
        m14: rng.random::<f64>() * (p11 * p44).sqrt(),
        m23: rng.random::<f64>() * (p22 * p33).sqrt(),
        d14: rng.random::<f64>() * TAU,
        d23: rng.random::<f64>() * TAU,
    }
}

/// Random mixed state `G G† / Tr(G G†)` with a complex Ginibre matrix `G`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let g = Matrix4::from_fn(|_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let rho = g * g.adjoint();
    let tr = rho.trace().re;
    let mut rho = rho.unscale(tr);
    // Exact Hermiticity on the diagonal.
    for i in 0..4 {
        rho[(i, i)] = Complex64::new(rho[(i, i)].re, 0.0);
    }
    TwoQubitState::from_matrix_unchecked(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bell_like_phi_maximally_entangled() {
        let s = build_bell_like(&EwlParams::new(Family::Phi, 0.0, FRAC_1_SQRT_2, 0.0)).unwrap();
        for (i, j, v) in [(1, 1, 0.5), (2, 2, 0.5), (1, 2, 0.5), (2, 1, 0.5)] {
            assert_abs_diff_eq!(s.element(i, j).re, v, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(s.element(0, 0).norm() + s.element(3, 3).norm(), 0.0);
        assert!(s.validate().passed());
    }

    #[test]
    fn bell_like_psi_product_case() {
        let s = build_bell_like(&EwlParams::new(Family::Psi, 0.3, 1.0, 2.1)).unwrap();
        let mut expected = Matrix4::zeros();
        expected[(3, 3)] = c(1.0, 0.0);
        assert_eq!(*s.matrix(), expected);
    }

    #[test]
    fn bell_like_phi_unbalanced_with_phase() {
        let s = build_bell_like(&EwlParams::new(Family::Phi, 1.0, 0.6, FRAC_PI_3)).unwrap();
        assert_abs_diff_eq!(s.element(2, 2).re, 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(1, 1).re, 0.64, epsilon = 1e-15);
        let expected = Complex64::from_polar(0.48, FRAC_PI_3);
        assert!((s.element(1, 2) - expected).norm() < 1e-15);
    }

    #[test]
    fn bell_like_rejects_alpha_out_of_range() {
        let err = build_bell_like(&EwlParams::new(Family::Phi, 1.0, 1.2, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Domain { name: "alpha", .. }));
    }

    #[test]
    fn ewl_zero_purity_is_maximally_mixed() {
        for alpha in [-1.0, 0.0, 0.3, FRAC_1_SQRT_2] {
            let s = build_ewl(&EwlParams::new(Family::Phi, 0.0, alpha, 0.7)).unwrap();
            assert_eq!(s, TwoQubitState::maximally_mixed());
        }
    }

    #[test]
    fn ewl_phi_pure_werner() {
        let s = build_ewl(&EwlParams::werner(Family::Phi, 1.0)).unwrap();
        assert_abs_diff_eq!(s.element(1, 1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(2, 2).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(1, 2).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(0, 0).re, 0.0);
    }

    #[test]
    fn ewl_psi_r09() {
        let s = build_ewl(&EwlParams::werner(Family::Psi, 0.9)).unwrap();
        assert_abs_diff_eq!(s.element(0, 0).re, 0.475, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(3, 3).re, 0.475, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(1, 1).re, 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(2, 2).re, 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(0, 3).re, 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(0, 3).im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ewl_rejects_bad_purity() {
        for r in [-0.1, 1.5, f64::NAN] {
            let err = build_ewl(&EwlParams::new(Family::Psi, r, 0.5, 0.0)).unwrap_err();
            assert!(matches!(err, Error::Domain { name: "r", .. }));
        }
    }

    #[test]
    fn negative_beta_is_expressed_through_delta() {
        let a = build_bell_like(&EwlParams::new(Family::Phi, 1.0, FRAC_1_SQRT_2, PI)).unwrap();
        assert!(a.element(1, 2).re < -0.49);
    }

    #[test]
    fn validate_maximally_mixed_passes() {
        let r = validate(TwoQubitState::maximally_mixed().matrix());
        assert!(r.passed());
        assert_abs_diff_eq!(r.min_eigenvalue, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn validate_reports_trace_deficit() {
        let m = Matrix4::<Complex64>::identity().scale(0.225);
        let r = validate(&m);
        assert!(!r.passed());
        assert!(!r.unit_trace);
        assert!(r.hermitian && r.positive);
        assert_abs_diff_eq!(r.trace_residual, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn validate_flags_non_hermitian() {
        let mut m = *TwoQubitState::maximally_mixed().matrix();
        m[(0, 1)] = c(0.1, 0.0);
        let r = validate(&m);
        assert!(!r.hermitian);
        assert_abs_diff_eq!(r.hermiticity_residual, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn validate_flags_x_coherence_beyond_bound() {
        // 2×2 block [[0.25, 0.3], [0.3, 0.25]] has eigenvalue 0.25 − 0.3 = −0.05.
        let view = XStateView {
            p11: 0.25,
            p22: 0.25,
            p33: 0.25,
            p44: 0.25,
            m14: 0.3,
            m23: 0.0,
            d14: 0.0,
            d23: 0.0,
        };
        let r = validate(&view.to_matrix());
        assert!(!r.positive);
        assert_abs_diff_eq!(r.min_eigenvalue, -0.05, epsilon = 1e-12);
        assert!(view.check().is_err());
        assert!(matches!(
            TwoQubitState::new(view.to_matrix()),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn x_view_of_ewl_phi() {
        let s = build_ewl(&EwlParams::werner(Family::Phi, 0.5)).unwrap();
        let v = s.as_x_view().unwrap();
        assert_abs_diff_eq!(v.m23, 0.25, epsilon = 1e-15);
        assert_eq!(v.m14, 0.0);
        assert_eq!(v.d14, 0.0);
    }

    #[test]
    fn x_view_rejects_plus_plus_product() {
        let h = c(0.5, 0.0);
        let s = TwoQubitState::from_pure([h, h, h, h]).unwrap();
        match s.as_x_view() {
            Err(Error::NotXState { row: 0, col: 1, magnitude }) => {
                assert_abs_diff_eq!(magnitude, 0.25, epsilon = 1e-15)
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn x_view_of_maximally_mixed() {
        let v = TwoQubitState::maximally_mixed().as_x_view().unwrap();
        assert_eq!((v.m14, v.m23, v.d14, v.d23), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn phases_wrap_into_range() {
        let s = build_ewl(&EwlParams::new(Family::Psi, 0.8, 0.6, -FRAC_PI_3)).unwrap();
        let v = s.as_x_view().unwrap();
        assert_abs_diff_eq!(v.d14, 2.0 * PI - FRAC_PI_3, epsilon = 1e-12);
        assert_eq!(wrap_angle(-1e-18), 0.0);
    }

    #[test]
    fn json_layout_is_row_major_pairs() {
        let s = build_bell_like(&EwlParams::new(Family::Phi, 1.0, 0.6, FRAC_PI_3)).unwrap();
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["basis"], BASIS_LABEL);
        let elems = json["elements"].as_array().unwrap();
        assert_eq!(elems.len(), 16);
        // row 1, col 2 is ρ₂₃
        let e = elems[4 + 2].as_array().unwrap();
        assert_abs_diff_eq!(e[0].as_f64().unwrap(), 0.48 * FRAC_PI_3.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(e[1].as_f64().unwrap(), 0.48 * FRAC_PI_3.sin(), epsilon = 1e-15);
        let back: TwoQubitState = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_rejects_wrong_basis_and_invalid_state() {
        let mut json = serde_json::to_value(TwoQubitState::maximally_mixed()).unwrap();
        json["basis"] = "00,01,10,11".into();
        assert!(serde_json::from_value::<TwoQubitState>(json.clone()).is_err());
        json["basis"] = BASIS_LABEL.into();
        json["elements"][0] = serde_json::json!([0.5, 0.0]);
        assert!(serde_json::from_value::<TwoQubitState>(json).is_err());
    }

    #[test]
    fn x_view_serializes_named_fields() {
        let v = ewl_view(&EwlParams::werner(Family::Psi, 0.9)).unwrap();
        let json = serde_json::to_value(v).unwrap();
        let obj = json.as_object().unwrap();
        assert_eq!(obj.len(), 8);
        for key in ["p11", "p22", "p33", "p44", "m14", "m23", "d14", "d23"] {
            assert!(obj.contains_key(key), "{key}");
        }
    }

    #[test]
    fn family_parses_case_insensitively() {
        assert_eq!("PHI".parse::<Family>().unwrap(), Family::Phi);
        assert!("chi".parse::<Family>().is_err());
    }
}
