//! Phenomenological reservoir models producing the decoherence amplitude `q(t)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::DecoherenceAmplitude;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ReservoirModel {
    /// Memoryless decay, `q = exp(−γ₀t/2)`.
    Markovian { gamma0: f64 },
    /// Resonant Lorentzian spectral density of width `lambda`.
    Lorentzian { gamma0: f64, lambda: f64 },
    /// `q = w + (1 − w) exp(−γ₀t/2)`; the population parameter traps at `w²`.
    Trapping { gamma0: f64, w: f64 },
}

impl fmt::Display for ReservoirModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Markovian { gamma0 } => write!(f, "markovian(gamma0={gamma0})"),
            Self::Lorentzian { gamma0, lambda } => {
                write!(f, "lorentzian(gamma0={gamma0}, lambda={lambda})")
            }
            Self::Trapping { gamma0, w } => write!(f, "trapping(gamma0={gamma0}, w={w})"),
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: v,
            expected: "> 0",
        })
    }
}

/// `sinh(z)/z`, continuous at zero.
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

impl ReservoirModel {
    pub fn check(&self) -> Result<()> {
        match *self {
            Self::Markovian { gamma0 } => positive("gamma0", gamma0),
            Self::Lorentzian { gamma0, lambda } => {
                positive("gamma0", gamma0)?;
                positive("lambda", lambda)
            }
            Self::Trapping { gamma0, w } => {
                positive("gamma0", gamma0)?;
                crate::error::check_range("w", w, 0.0, 1.0, "[0, 1]")
            }
        }
    }

    pub fn gamma0(&self) -> f64 {
        match *self {
            Self::Markovian { gamma0 }
            | Self::Lorentzian { gamma0, .. }
            | Self::Trapping { gamma0, .. } => gamma0,
        }
    }

    pub fn q_of_t(&self, t: f64) -> Result<DecoherenceAmplitude> {
        self.check()?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain {
                name: "t",
                value: t,
                expected: ">= 0",
            });
        }
        let q = match *self {
            Self::Markovian { gamma0 } => (-gamma0 * t / 2.0).exp(),
            Self::Lorentzian { gamma0, lambda } => {
                // d may be imaginary (λ < 2γ₀); the combination is even in d.
                let d = Complex64::new(lambda * lambda - 2.0 * gamma0 * lambda, 0.0).sqrt();
                let half = d * (t / 2.0);
                let q = (-lambda * t / 2.0).exp()
                    * (half.cosh() + lambda * t / 2.0 * sinhc(half));
                if q.im.abs() >= 1e-12 {
                    return Err(Error::Numerical(format!(
                        "lorentzian q(t={t}) has imaginary residual {:.3e}",
                        q.im
                    )));
                }
                q.re
            }
            Self::Trapping { gamma0, w } => w + (1.0 - w) * (-gamma0 * t / 2.0).exp(),
        };
        DecoherenceAmplitude::real(q)
    }

    /// Long-time limit of `|q(t)|²`.
    pub fn asymptotic_population_parameter(&self) -> f64 {
        match *self {
            Self::Markovian { .. } | Self::Lorentzian { .. } => 0.0,
            Self::Trapping { w, .. } => w * w,
        }
    }

    pub fn trajectory(&self, grid: &TimeGrid) -> Result<Vec<TrajectoryPoint>> {
        grid.check()?;
        grid.times()
            .map(|t| {
                let q = self.q_of_t(t)?;
                Ok(TrajectoryPoint {
                    t,
                    q,
                    x: q.population(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, n: usize) -> Result<Self> {
        let grid = Self { t0, t1, n };
        grid.check()?;
        Ok(grid)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t0 >= 0.0 && self.t1 > self.t0) {
            return Err(Error::InvalidGrid(format!(
                "need t1 > t0 >= 0, got t0={} t1={}",
                self.t0, self.t1
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidGrid(format!("need n >= 2, got {}", self.n)));
        }
        Ok(())
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.t1 - self.t0) / (self.n - 1) as f64;
        (0..self.n).map(move |k| {
            if k == self.n - 1 {
                self.t1
            } else {
                self.t0 + k as f64 * step
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub q: DecoherenceAmplitude,
    pub x: f64,
}
