//! Closed-form CHSH maximum for X states with one A observable pinned to z.
//!
//! With `a = ẑ`, `a′` in the transverse plane, and `b`, `b′` mirror images
//! about the transverse plane, the Bell function of an X state is
//! `2(cosθ |P| + sinθ Q)` where `P = ⟨σ₃σ₃⟩` and `Q` is the transverse
//! correlation. Its maximum over `θ` is `2√(P² + Q²)` at `θ = arctan(Q/|P|)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::observables::{ChshSettings, MeasurementDirection};
use crate::error::{check_range, Result};
use crate::states::{wrap_angle, XStateView};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictedMax {
    pub value: f64,
    pub p: f64,
    pub q: f64,
    pub settings: ChshSettings,
}

/// `P` and `Q` for equal population parameters `x` on both qubits, in terms
/// of the time-zero X state.
pub fn p_and_q(initial: &XStateView, x: f64) -> (f64, f64) {
    let p = 1.0 - 2.0 * x * (1.0 + initial.p11 - initial.p44 - 2.0 * initial.p11 * x);
    let q = 2.0 * x * (initial.m14 + initial.m23);
    (p, q)
}

/// Polar angle of `b`; `b′` sits at `π − θ`.
pub fn optimal_b_theta(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        FRAC_PI_2
    } else {
        (q / p.abs()).atan()
    }
}

/// Achieving settings for coherence phases `d14`, `d23` of the state being
/// measured. `k` and `k_prime` pick the branch of the azimuth formula; odd
/// values flip the sign of the ρ₁₄ (`k`) or ρ₂₃ (`k_prime`) contribution.
pub fn restricted_settings(d14: f64, d23: f64, p: f64, q: f64, k: i64, k_prime: i64) -> ChshSettings {
    let theta_b = optimal_b_theta(p, q);
    let phi_a = wrap_angle((d14 + d23 - (k + k_prime) as f64 * PI) / 2.0);
    let phi_b = wrap_angle((d14 - d23 - (k - k_prime) as f64 * PI) / 2.0);
    ChshSettings {
        a: MeasurementDirection { theta: 0.0, phi: phi_a },
        a_prime: MeasurementDirection { theta: FRAC_PI_2, phi: phi_a },
        b: MeasurementDirection { theta: theta_b, phi: phi_b },
        b_prime: MeasurementDirection { theta: PI - theta_b, phi: phi_b },
    }
}

/// `2√(P² + Q²)` after both qubits reach population parameter `x` through
/// real non-negative amplitudes, with the settings that achieve it.
pub fn restricted_max(initial: &XStateView, x: f64) -> Result<RestrictedMax> {
    check_range("x", x, 0.0, 1.0, "[0, 1]")?;
    let (p, q) = p_and_q(initial, x);
    Ok(RestrictedMax {
        value: 2.0 * p.hypot(q),
        p,
        q,
        settings: restricted_settings(initial.d14, initial.d23, p, q, 0, 0),
    })
}
