//! CHSH-Bell function and its maxima.
//!
//! Three evaluators are kept side by side and never substituted for one
//! another: the closed-form restricted maximum, the Horodecki maximum over
//! all settings, and a numerical search used as an oracle for both.

mod brute_force;
mod horodecki;
mod observables;
mod restricted;
mod simplex;

use serde::{Deserialize, Serialize};

pub use brute_force::{
    brute_force_max, BruteForceConfig, BruteForceDiagnostics, BruteForceResult, SearchSpace,
    AGREEMENT_TOL,
};
pub use horodecki::{correlation_matrix, horodecki_max};
pub use observables::{bell_function, correlation, observable_matrix, ChshSettings, MeasurementDirection};
pub use restricted::{optimal_b_theta, p_and_q, restricted_max, restricted_settings, RestrictedMax};

use crate::dynamics::{propagate_x, DecoherenceAmplitude};
use crate::error::{Error, Result};
use crate::states::XStateView;

/// Local bound of the CHSH combination.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// Quantum bound `2√2`.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;
/// Agreement required between the restricted maximum and the Bell function
/// evaluated at its settings.
pub const SETTINGS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellEvaluation {
    pub x: f64,
    pub restricted_max: f64,
    pub horodecki_max: f64,
    /// Absent when the numerical search was skipped.
    pub brute_force_max: Option<f64>,
    pub restricted_settings: ChshSettings,
    pub brute_force_settings: Option<ChshSettings>,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

/// Runs every evaluator on the state reached from `initial` when both qubits
/// have population parameter `x`.
pub fn evaluate(initial: &XStateView, x: f64, brute_force: Option<&BruteForceConfig>) -> Result<BellEvaluation> {
    let restricted = restricted_max(initial, x)?;
    let q = DecoherenceAmplitude::from_population(x)?;
    let evolved = propagate_x(initial, q, q).to_state()?;

    let at_settings = bell_function(&evolved, &restricted.settings);
    if (at_settings - restricted.value).abs() > SETTINGS_TOL {
        return Err(Error::Numerical(format!(
            "Bell function at the restricted settings is {at_settings}, expected {}",
            restricted.value
        )));
    }

    let brute = brute_force.map(|cfg| brute_force_max(&evolved, cfg));
    Ok(BellEvaluation {
        x,
        restricted_max: restricted.value,
        horodecki_max: horodecki_max(&evolved),
        brute_force_max: brute.map(|b| b.value),
        restricted_settings: restricted.settings,
        brute_force_settings: brute.map(|b| b.settings),
        p: restricted.p,
        q: restricted.q,
    })
}
