//! Direct numerical maximization of the Bell function over measurement angles.
//!
//! A coarse grid over four polar angles and one shared azimuth per qubit
//! seeds local Nelder–Mead searches over all eight angles, together with
//! seeded random starts. Local searches run in parallel; the reduction is
//! ordered so results do not depend on scheduling.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::observables::{bell_function, correlation, unit_vector, ChshSettings, MeasurementDirection};
use super::simplex::nelder_mead;
use crate::states::TwoQubitState;

/// Two local searches agreeing within this count as confirming each other.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchSpace {
    /// All eight angles free.
    Full,
    /// First observable on qubit A fixed to the z axis; the other three free.
    PinnedAz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceConfig {
    pub restarts: usize,
    pub grid_density: usize,
    pub seed: u64,
    /// Best grid points used as local-search starts.
    pub grid_starts: usize,
    pub space: SearchSpace,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            grid_density: 12,
            seed: 0,
            grid_starts: 4,
            space: SearchSpace::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceDiagnostics {
    pub grid_best: f64,
    pub local_searches: usize,
    /// Local searches ending within [`AGREEMENT_TOL`] of the best value.
    pub agreeing_searches: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub value: f64,
    pub settings: ChshSettings,
    pub diagnostics: BruteForceDiagnostics,
}

/// Fast Bell function on a precomputed correlation tensor. Angles are
/// `[θa, φa, θa′, φa′, θb, φb, θb′, φb′]`.
struct Objective {
    t: Matrix3<f64>,
}

impl Objective {
    fn new(state: &TwoQubitState) -> Self {
        let axes = [
            MeasurementDirection { theta: PI / 2.0, phi: 0.0 },
            MeasurementDirection { theta: PI / 2.0, phi: PI / 2.0 },
            MeasurementDirection::z(),
        ];
        Self {
            t: Matrix3::from_fn(|n, m| correlation(state, &axes[n], &axes[m])),
        }
    }

    fn corr(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        a.dot(&(self.t * b))
    }

    fn value(&self, angles: &[f64; 8]) -> f64 {
        let v = |i: usize| Vector3::from(unit_vector(angles[i], angles[i + 1]));
        let (a, ap, b, bp) = (v(0), v(2), v(4), v(6));
        (self.corr(&a, &b) - self.corr(&a, &bp)).abs() + self.corr(&ap, &b) + self.corr(&ap, &bp)
    }
}

fn expand(space: SearchSpace, free: &[f64]) -> [f64; 8] {
    match space {
        SearchSpace::Full => free.try_into().expect("eight angles"),
        SearchSpace::PinnedAz => [0.0, 0.0, free[0], free[1], free[2], free[3], free[4], free[5]],
    }
}

fn restrict(space: SearchSpace, angles: &[f64; 8]) -> Vec<f64> {
    match space {
        SearchSpace::Full => angles.to_vec(),
        SearchSpace::PinnedAz => angles[2..].to_vec(),
    }
}

/// Objective value and the eight angles.
type Candidate = (f64, [f64; 8]);

/// Grid over `θa, θa′, θb, θb′` and shared azimuths `φA`, `φB`; keeps the
/// `keep` best points.
fn grid_search(obj: &Objective, space: SearchSpace, density: usize, keep: usize) -> (Vec<Candidate>, usize) {
    let n = density.max(2);
    let thetas: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect();
    let phis: Vec<f64> = (0..n).map(|j| j as f64 * TAU / n as f64).collect();
    let a_thetas: Vec<f64> = match space {
        SearchSpace::Full => thetas.clone(),
        SearchSpace::PinnedAz => vec![0.0],
    };

    let per_phi: Vec<(Vec<Candidate>, usize)> = phis
        .par_iter()
        .map(|&phi_a| {
            let mut best: Vec<Candidate> = Vec::with_capacity(keep + 1);
            let mut evaluations = 0;
            let a_vecs: Vec<Vector3<f64>> = thetas.iter().map(|&t| Vector3::from(unit_vector(t, phi_a))).collect();
            let a0_vecs: Vec<Vector3<f64>> = a_thetas.iter().map(|&t| Vector3::from(unit_vector(t, phi_a))).collect();
            for &phi_b in &phis {
                let tb: Vec<Vector3<f64>> = thetas
                    .iter()
                    .map(|&t| obj.t * Vector3::from(unit_vector(t, phi_b)))
                    .collect();
                let e_first: Vec<Vec<f64>> = a0_vecs.iter().map(|a| tb.iter().map(|v| a.dot(v)).collect()).collect();
                let e_second: Vec<Vec<f64>> = a_vecs.iter().map(|a| tb.iter().map(|v| a.dot(v)).collect()).collect();
                for (i, row_a) in e_first.iter().enumerate() {
                    for (ip, row_ap) in e_second.iter().enumerate() {
                        for j in 0..n {
                            for jp in 0..n {
                                evaluations += 1;
                                let value = (row_a[j] - row_a[jp]).abs() + row_ap[j] + row_ap[jp];
                                if best.len() < keep || value > best[best.len() - 1].0 {
                                    let angles = [
                                        a_thetas[i], phi_a, thetas[ip], phi_a, thetas[j], phi_b, thetas[jp], phi_b,
                                    ];
                                    let pos = best.partition_point(|(v, _)| *v >= value);
                                    best.insert(pos, (value, angles));
                                    best.truncate(keep);
                                }
                            }
                        }
                    }
                }
            }
            (best, evaluations)
        })
        .collect();

    let evaluations = per_phi.iter().map(|(_, e)| e).sum();
    let mut all: Vec<(f64, [f64; 8])> = per_phi.into_iter().flat_map(|(b, _)| b).collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| lex(&a.1, &b.1)));
    all.truncate(keep);
    (all, evaluations)
}

fn lex(a: &[f64; 8], b: &[f64; 8]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Repeated Nelder–Mead with shrinking initial simplices.
fn local_search(obj: &Objective, space: SearchSpace, start: &[f64; 8]) -> (f64, [f64; 8], usize) {
    let f = |free: &[f64]| -obj.value(&expand(space, free));
    let mut x = restrict(space, start);
    let mut evaluations = 0;
    for step in [0.3, 0.05, 0.01, 1e-3] {
        let m = nelder_mead(&f, &x, step, 1e-15, 20_000);
        evaluations += m.evaluations;
        x = m.x;
    }
    let angles = expand(space, &x);
    (obj.value(&angles), angles, evaluations)
}

/// Maximizes the Bell function of `state` numerically.
pub fn brute_force_max(state: &TwoQubitState, config: &BruteForceConfig) -> BruteForceResult {
    let obj = Objective::new(state);
    let space = config.space;
    let (grid, grid_evals) = grid_search(&obj, space, config.grid_density, config.grid_starts.max(1));
    let grid_best = grid.first().map(|(v, _)| *v).unwrap_or(f64::NEG_INFINITY);

    let mut starts: Vec<[f64; 8]> = grid.iter().map(|(_, a)| *a).collect();
    starts.extend((0..config.restarts).map(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64 + 1);
        let mut angles = [0.0; 8];
        for (k, a) in angles.iter_mut().enumerate() {
            *a = if k % 2 == 0 { rng.random::<f64>() * PI } else { rng.random::<f64>() * TAU };
        }
        if space == SearchSpace::PinnedAz {
            angles[0] = 0.0;
            angles[1] = 0.0;
        }
        angles
    }));

    let results: Vec<(f64, [f64; 8], usize)> = starts.par_iter().map(|s| local_search(&obj, space, s)).collect();

    let mut best: Option<(f64, ChshSettings)> = None;
    for (value, angles, _) in &results {
        let settings = ChshSettings::from_angles(angles);
        best = match best {
            None => Some((*value, settings)),
            Some((bv, bs)) => {
                let better = match value.total_cmp(&bv) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => lex(&settings.angles(), &bs.angles()).is_lt(),
                };
                Some(if better { (*value, settings) } else { (bv, bs) })
            }
        };
    }
    let (search_best, settings) = best.expect("at least one local search");
    let agreeing = results.iter().filter(|(v, _, _)| search_best - v <= AGREEMENT_TOL).count();
    let evaluations = grid_evals + results.iter().map(|(_, _, e)| e).sum::<usize>();

    BruteForceResult {
        value: bell_function(state, &settings),
        settings,
        diagnostics: BruteForceDiagnostics {
            grid_best,
            local_searches: results.len(),
            agreeing_searches: agreeing,
            evaluations,
            converged: agreeing >= 2.min(results.len()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::horodecki::horodecki_max;
    use crate::states::{build_bell_like, EwlParams, Family};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn quick() -> BruteForceConfig {
        BruteForceConfig {
            restarts: 8,
            grid_density: 8,
            ..Default::default()
        }
    }

    #[test]
    fn bell_state_reaches_tsirelson() {
        let s = build_bell_like(&EwlParams::new(Family::Psi, 1.0, FRAC_1_SQRT_2, 0.0)).unwrap();
        let r = brute_force_max(&s, &quick());
        assert_abs_diff_eq!(r.value, 2.0 * 2f64.sqrt(), epsilon = 1e-6);
        assert!(r.value <= 2.0 * 2f64.sqrt() + 1e-9);
        assert!(r.diagnostics.converged);
    }

    #[test]
    fn maximally_mixed_is_zero() {
        let r = brute_force_max(&TwoQubitState::maximally_mixed(), &quick());
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn fast_objective_matches_literal_bell_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = crate::states::random_state(&mut rng);
        let obj = Objective::new(&s);
        for _ in 0..20 {
            let angles: [f64; 8] = std::array::from_fn(|_| rng.random::<f64>() * 7.0 - 1.0);
            let settings = ChshSettings::from_angles(&angles);
            assert_abs_diff_eq!(obj.value(&angles), bell_function(&s, &settings), epsilon = 1e-13);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = crate::states::random_state(&mut rng);
        let a = brute_force_max(&s, &quick());
        let b = brute_force_max(&s, &quick());
        assert_eq!(a, b);
    }

    #[test]
    fn random_states_match_horodecki() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let s = crate::states::random_state(&mut rng);
            let r = brute_force_max(&s, &BruteForceConfig::default());
            assert_abs_diff_eq!(r.value, horodecki_max(&s), epsilon = 1e-4);
        }
    }
}
