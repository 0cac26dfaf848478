use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};
use crate::states::{wrap_angle, TwoQubitState};

/// Direction of a ±1-valued spin observable, `(sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDirection {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_range("theta", theta, 0.0, PI, "[0, pi]")?;
        check_range("phi", phi, 0.0, TAU, "[0, 2pi)")?;
        Ok(Self {
            theta,
            phi: wrap_angle(phi),
        })
    }

    /// Same unit vector with angles folded into `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn canonical(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        Self {
            theta,
            phi: wrap_angle(phi),
        }
    }

    pub fn z() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn x() -> Self {
        Self {
            theta: PI / 2.0,
            phi: 0.0,
        }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        unit_vector(self.theta, self.phi)
    }
}

pub(crate) fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Observables `a`, `a′` on qubit A and `b`, `b′` on qubit B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: MeasurementDirection,
    pub a_prime: MeasurementDirection,
    pub b: MeasurementDirection,
    pub b_prime: MeasurementDirection,
}

impl ChshSettings {
    pub(crate) fn angles(&self) -> [f64; 8] {
        [
            self.a.theta,
            self.a.phi,
            self.a_prime.theta,
            self.a_prime.phi,
            self.b.theta,
            self.b.phi,
            self.b_prime.theta,
            self.b_prime.phi,
        ]
    }

    pub(crate) fn from_angles(v: &[f64; 8]) -> Self {
        Self {
            a: MeasurementDirection::canonical(v[0], v[1]),
            a_prime: MeasurementDirection::canonical(v[2], v[3]),
            b: MeasurementDirection::canonical(v[4], v[5]),
            b_prime: MeasurementDirection::canonical(v[6], v[7]),
        }
    }
}

/// `cosθ(|1⟩⟨1| − |0⟩⟨0|) + sinθ(e^{iφ}|1⟩⟨0| + e^{−iφ}|0⟩⟨1|)` in the basis {|1⟩, |0⟩}.
pub fn observable_matrix(dir: &MeasurementDirection) -> Matrix2<Complex64> {
    let (st, ct) = dir.theta.sin_cos();
    let off = Complex64::from_polar(st, dir.phi);
    Matrix2::new(Complex64::new(ct, 0.0), off, off.conj(), Complex64::new(-ct, 0.0))
}

/// `Tr(ρ · O ⊗ O′)` for arbitrary 2×2 operators on the two qubits.
pub(crate) fn expectation(
    rho: &Matrix4<Complex64>,
    op_a: &Matrix2<Complex64>,
    op_b: &Matrix2<Complex64>,
) -> Complex64 {
    let op = op_a.kronecker(op_b);
    (rho * op).trace()
}

/// `⟨O_A O_B⟩ = Tr(ρ O_A ⊗ O_B)`.
pub fn correlation(
    state: &TwoQubitState,
    dir_a: &MeasurementDirection,
    dir_b: &MeasurementDirection,
) -> f64 {
    let e = expectation(
        state.matrix(),
        &observable_matrix(dir_a),
        &observable_matrix(dir_b),
    );
    debug_assert!(e.im.abs() < 1e-10, "imaginary correlation {}", e.im);
    e.re
}

/// `|⟨ab⟩ − ⟨ab′⟩| + ⟨a′b⟩ + ⟨a′b′⟩`.
pub fn bell_function(state: &TwoQubitState, s: &ChshSettings) -> f64 {
    let e = |x: &MeasurementDirection, y: &MeasurementDirection| correlation(state, x, y);
    (e(&s.a, &s.b) - e(&s.a, &s.b_prime)).abs() + e(&s.a_prime, &s.b) + e(&s.a_prime, &s.b_prime)
}
