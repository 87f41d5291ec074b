//! Exponential saturation fits of discovery trajectories.
//!
//! The model is `count(t) = A * (1 - exp(-k t)) + B` with `t` in minutes.
//! Parameters are estimated by damped Gauss-Newton (Levenberg-Marquardt
//! with Marquardt diagonal scaling) on the analytic Jacobian, projecting
//! onto `A >= 1`, `k >= 1e-6`, `B >= 0` after every step.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discovery::DiscoveryTrajectory;

const MIN_AMPLITUDE: f64 = 1.0;
const MIN_RATE: f64 = 1e-6;
const FALLBACK_RATE: f64 = 0.02;
/// Smallest acceptable reciprocal condition number of the column-normalized
/// normal matrix at the solution.
const MIN_RCOND: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SatFitError {
    #[error("no convergence after {iterations} iterations")]
    NonConvergent { iterations: usize },
    #[error("parameters are not identifiable from this trajectory")]
    IllConditioned,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("times and counts differ in length")]
    LengthMismatch,
    #[error("saturation rate must be positive, got {0}")]
    NonPositiveRate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the relative parameter change.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationFit {
    /// Growth amplitude `A` (tokens).
    pub amplitude: f64,
    /// Saturation rate `k` (per minute).
    pub rate: f64,
    /// Early-activation offset `B` (tokens).
    pub offset: f64,
    pub r_squared: f64,
    pub t90_minutes: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SaturationFit {
    pub fn eval(&self, t: f64) -> f64 {
        eval_saturation(self.amplitude, self.rate, self.offset, t)
    }

    pub fn asymptote(&self) -> f64 {
        self.amplitude + self.offset
    }
}

pub fn eval_saturation(amplitude: f64, rate: f64, offset: f64, t: f64) -> f64 {
    amplitude * -(-rate * t).exp_m1() + offset
}

/// Minutes until the fitted curve covers 90% of its amplitude: `ln(10)/k`.
pub fn compute_t90(rate: f64) -> Result<f64, SatFitError> {
    if rate.is_nan() || rate <= 0.0 || rate.is_infinite() {
        return Err(SatFitError::NonPositiveRate(rate));
    }
    Ok(std::f64::consts::LN_10 / rate)
}

/// Fraction of the amplitude reached at `t`, i.e. `1 - exp(-k t)`.
pub fn coverage_at(fit: &SaturationFit, t: f64) -> f64 {
    -(-fit.rate * t).exp_m1()
}

/// Fitted value at `t` as a fraction of the full asymptote `A + B`.
pub fn asymptote_fraction_at(fit: &SaturationFit, t: f64) -> f64 {
    fit.eval(t) / fit.asymptote()
}

pub fn fit_saturation(trajectory: &DiscoveryTrajectory) -> Result<SaturationFit, SatFitError> {
    fit_saturation_curve(
        &trajectory.checkpoints,
        &trajectory.counts_f64(),
        &FitOptions::default(),
    )
}

fn project(p: Vector3<f64>) -> Vector3<f64> {
    Vector3::new(p[0].max(MIN_AMPLITUDE), p[1].max(MIN_RATE), p[2].max(0.0))
}

fn initial_guess(times: &[f64], values: &[f64]) -> Vector3<f64> {
    let b0 = values[0];
    let a0 = (values.iter().cloned().fold(f64::MIN, f64::max) - b0).max(MIN_AMPLITUDE);
    let half = b0 + a0 / 2.0;
    let k0 = times
        .iter()
        .zip(values)
        .find(|&(&t, &v)| v > half && t > 0.0)
        .map(|(&t, _)| std::f64::consts::LN_2 / t)
        .unwrap_or(FALLBACK_RATE);
    project(Vector3::new(a0, k0, b0))
}

struct Problem<'a> {
    times: &'a [f64],
    values: &'a [f64],
}

impl Problem<'_> {
    fn rss(&self, p: &Vector3<f64>) -> f64 {
        self.times
            .iter()
            .zip(self.values)
            .map(|(&t, &y)| (y - eval_saturation(p[0], p[1], p[2], t)).powi(2))
            .sum()
    }

    /// Normal matrix `J^T J` and gradient `J^T r` with `r = y - model`.
    fn normal_equations(&self, p: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>) {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (&t, &y) in self.times.iter().zip(self.values) {
            let e = (-p[1] * t).exp();
            let row = Vector3::new(1.0 - e, p[0] * t * e, 1.0);
            let r = y - eval_saturation(p[0], p[1], p[2], t);
            jtj += row * row.transpose();
            jtr += row * r;
        }
        (jtj, jtr)
    }
}

fn relative_change(old: &Vector3<f64>, new: &Vector3<f64>) -> f64 {
    (0..3)
        .map(|i| (new[i] - old[i]).abs() / (old[i].abs() + f64::EPSILON))
        .fold(0.0, f64::max)
}

/// Least-squares fit on arbitrary real-valued observations.
pub fn fit_saturation_curve(
    times: &[f64],
    values: &[f64],
    opts: &FitOptions,
) -> Result<SaturationFit, SatFitError> {
    if times.len() != values.len() {
        return Err(SatFitError::LengthMismatch);
    }
    if times.len() < 4 {
        return Err(SatFitError::TooFewPoints {
            needed: 4,
            got: times.len(),
        });
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let tss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    if tss == 0.0 {
        // a flat series leaves the rate unidentifiable
        return Err(SatFitError::IllConditioned);
    }

    let problem = Problem { times, values };
    let mut p = initial_guess(times, values);
    let mut rss = problem.rss(&p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    'outer: while iterations < opts.max_iterations {
        iterations += 1;
        let (jtj, jtr) = problem.normal_equations(&p);
        let diag_floor = jtj.diagonal().max() * 1e-15;
        loop {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(diag_floor);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&jtr)) else {
                lambda *= 10.0;
                if lambda > 1e30 {
                    break 'outer;
                }
                continue;
            };
            let trial = project(p + step);
            let change = relative_change(&p, &trial);
            let trial_rss = problem.rss(&trial);
            if trial_rss <= rss {
                p = trial;
                rss = trial_rss;
                lambda = (lambda / 10.0).max(1e-12);
                if change < opts.tolerance {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            if change < opts.tolerance {
                // no descent left at the resolution we care about
                converged = true;
                break 'outer;
            }
            lambda *= 10.0;
            if lambda > 1e30 {
                break 'outer;
            }
        }
    }

    if !converged {
        return Err(SatFitError::NonConvergent { iterations });
    }
    if p[1] <= MIN_RATE * (1.0 + 1e-9) || !is_identifiable(&problem, &p) {
        return Err(SatFitError::IllConditioned);
    }
    Ok(SaturationFit {
        amplitude: p[0],
        rate: p[1],
        offset: p[2],
        r_squared: 1.0 - rss / tss,
        t90_minutes: compute_t90(p[1])?,
        converged,
        iterations,
    })
}

fn is_identifiable(problem: &Problem<'_>, p: &Vector3<f64>) -> bool {
    let (jtj, _) = problem.normal_equations(p);
    let d = jtj.diagonal().map(|v| v.sqrt());
    if d.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return false;
    }
    let mut corr = jtj;
    for i in 0..3 {
        for j in 0..3 {
            corr[(i, j)] /= d[i] * d[j];
        }
    }
    let eig = SymmetricEigen::new(corr).eigenvalues;
    let max = eig.max();
    max > 0.0 && eig.min() / max > MIN_RCOND
}
