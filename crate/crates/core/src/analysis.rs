//! Violation thresholds, critical purity, and sweep/time-series generation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::{evaluate, horodecki_max, p_and_q, BellEvaluation, BruteForceConfig, CLASSICAL_BOUND};
use crate::dynamics::{propagate_x, DecoherenceAmplitude};
use crate::error::{check_range, Result};
use crate::reservoir::{ReservoirModel, TimeGrid};
use crate::states::{ewl_view, EwlParams, Family, XStateView};

/// A Bell value counts as a violation only above `2 + VIOLATION_TOL`.
pub const VIOLATION_TOL: f64 = 1e-12;
pub const DEFAULT_SWEEP_POINTS: usize = 201;
/// Samples used to locate violation windows before bisection.
const SCAN_POINTS: usize = 2001;
const BISECTION_TOL: f64 = 1e-13;

pub fn violates(b: f64) -> bool {
    b > CLASSICAL_BOUND + VIOLATION_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evaluator {
    /// Closed form with one A observable pinned to z.
    Restricted,
    /// Maximum over all settings from the correlation matrix.
    Horodecki,
}

impl fmt::Display for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evaluator::Restricted => "restricted",
            Evaluator::Horodecki => "horodecki",
        })
    }
}

impl FromStr for Evaluator {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "restricted" => Ok(Evaluator::Restricted),
            "horodecki" => Ok(Evaluator::Horodecki),
            other => Err(format!("unknown evaluator {other:?} (expected restricted or horodecki)")),
        }
    }
}

/// Bell value of the state reached from `initial` at population parameter `x`.
pub fn bell_value(initial: &XStateView, x: f64, evaluator: Evaluator) -> f64 {
    match evaluator {
        Evaluator::Restricted => {
            let (p, q) = p_and_q(initial, x);
            2.0 * p.hypot(q)
        }
        Evaluator::Horodecki => {
            let q = DecoherenceAmplitude::from_population(x.clamp(0.0, 1.0)).expect("clamped");
            let state = crate::states::TwoQubitState::from_matrix_unchecked(propagate_x(initial, q, q).to_matrix());
            horodecki_max(&state)
        }
    }
}

/// Uniform grid on [0, 1] whose last point is exactly 1.
pub fn unit_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|k| if k == n - 1 { 1.0 } else { k as f64 / (n - 1) as f64 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub x: f64,
    pub restricted_max: f64,
    pub horodecki_max: f64,
    pub violation_restricted: bool,
    pub violation_horodecki: bool,
    pub p_excited_a: f64,
    pub p_excited_b: f64,
}

/// Both evaluators on `points` uniform population parameters in [0, 1].
pub fn sweep(params: &EwlParams, points: usize) -> Result<Vec<SweepRecord>> {
    let view = ewl_view(params)?;
    Ok(unit_grid(points)
        .par_iter()
        .map(|&x| {
            let restricted_max = bell_value(&view, x, Evaluator::Restricted);
            let horodecki_max = bell_value(&view, x, Evaluator::Horodecki);
            SweepRecord {
                x,
                restricted_max,
                horodecki_max,
                violation_restricted: violates(restricted_max),
                violation_horodecki: violates(horodecki_max),
                p_excited_a: view.excited_a() * x,
                p_excited_b: view.excited_b() * x,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub exists: bool,
    pub x_star: Option<f64>,
    pub evaluator: Evaluator,
}

/// Bisects for the boundary between `lo` (not violating) and `hi` (violating).
fn bisect<F: Fn(f64) -> bool>(pred: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximization of `f` on `[lo, hi]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Maximum of `f` on [0, 1]: grid, golden-section around the best sample, and both endpoints.
fn max_on_unit<F: Fn(f64) -> f64>(f: F, samples: usize) -> (f64, f64) {
    let grid = unit_grid(samples);
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let (k, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    let refined = golden_max(&f, lo, hi, 1e-12);
    [(grid[k], values[k]), refined, (0.0, values[0]), (1.0, values[values.len() - 1])]
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidates")
}

/// Lower edge of the violation window adjacent to the largest violating `x`.
pub fn threshold_for_view(view: &XStateView, evaluator: Evaluator) -> ThresholdResult {
    let f = |x: f64| bell_value(view, x, evaluator);
    let grid = unit_grid(SCAN_POINTS);
    let top = grid.iter().rev().copied().find(|&x| violates(f(x))).or_else(|| {
        // A window narrower than the scan spacing.
        let (x_peak, b_peak) = max_on_unit(f, SCAN_POINTS);
        violates(b_peak).then_some(x_peak)
    });
    let Some(mut hi) = top else {
        return ThresholdResult {
            exists: false,
            x_star: None,
            evaluator,
        };
    };
    let start = hi;
    let mut lo = None;
    for &x in grid.iter().rev().filter(|&&x| x < start) {
        if violates(f(x)) {
            hi = x;
        } else {
            lo = Some(x);
            break;
        }
    }
    let x_star = match lo {
        Some(lo) => bisect(|x| violates(f(x)), lo, hi, BISECTION_TOL),
        None => 0.0,
    };
    ThresholdResult {
        exists: true,
        x_star: Some(x_star),
        evaluator,
    }
}

pub fn threshold_population(params: &EwlParams, evaluator: Evaluator) -> Result<ThresholdResult> {
    Ok(threshold_for_view(&ewl_view(params)?, evaluator))
}

/// Largest Bell value over x ∈ [0, 1] for the EWL state with purity `r`.
pub fn peak_over_population(params: &EwlParams, evaluator: Evaluator) -> Result<(f64, f64)> {
    let view = ewl_view(params)?;
    Ok(max_on_unit(|x| bell_value(&view, x, evaluator), 101))
}

/// Smallest purity at which some population parameter gives a violation.
pub fn critical_purity(family: Family, alpha: f64, evaluator: Evaluator) -> Result<Option<f64>> {
    check_range("alpha", alpha, -1.0, 1.0, "[-1, 1]")?;
    let violating = |r: f64| -> Result<bool> {
        let (_, peak) = peak_over_population(&EwlParams::new(family, r, alpha, 0.0), evaluator)?;
        Ok(violates(peak))
    };
    if !violating(1.0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if violating(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub t: f64,
    pub x: f64,
    pub evaluation: BellEvaluation,
    pub violation_restricted: bool,
    pub violation_horodecki: bool,
    pub p_excited_a: f64,
    pub p_excited_b: f64,
}

impl TimeSample {
    pub fn violation(&self, evaluator: Evaluator) -> bool {
        match evaluator {
            Evaluator::Restricted => self.violation_restricted,
            Evaluator::Horodecki => self.violation_horodecki,
        }
    }
}

/// Evaluates the EWL state along a reservoir trajectory; both qubits see the same reservoir.
pub fn time_series(
    params: &EwlParams,
    model: &ReservoirModel,
    grid: &TimeGrid,
    brute_force: Option<&BruteForceConfig>,
) -> Result<Vec<TimeSample>> {
    let view = ewl_view(params)?;
    let trajectory = model.trajectory(grid)?;
    trajectory
        .par_iter()
        .map(|point| {
            let x = point.x.min(1.0);
            let evaluation = evaluate(&view, x, brute_force)?;
            Ok(TimeSample {
                t: point.t,
                x,
                violation_restricted: violates(evaluation.restricted_max),
                violation_horodecki: violates(evaluation.horodecki_max),
                evaluation,
                p_excited_a: view.excited_a() * x,
                p_excited_b: view.excited_b() * x,
            })
        })
        .collect()
}
