//! The Markov process itself: path sampling, the harness coefficients and
//! the verification battery for its transition kernels.

mod sampling;
mod sweep;
mod verify;

pub use sampling::{sample_path, sample_paths, uniform_draw, PathEnsemble};
pub use sweep::{parameter_sweep, SweepCase};
pub use verify::{
    check_chapman_kolmogorov, check_harness_moments, check_martingale_polynomials, check_quadratic_variance_moments,
    hankel_closed_form, hankel_value, increment_closed_forms, increment_moments, JointLaw3,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::qcalc::ProcessParams;

/// Strictly increasing, non-negative observation times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return domain("time grid is empty");
        }
        if !times.iter().all(|t| t.is_finite()) || times[0] < 0.0 {
            return domain("time grid needs finite times >= 0");
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("time grid must be strictly increasing");
        }
        Ok(Self(times))
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One trajectory observed on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub seed: u64,
    /// Position of the path in its ensemble; selects the random stream.
    pub index: u64,
}

/// Bridge weights: `E(X_t | X_s, X_u) = a X_s + b X_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnessCoefficients {
    pub a: f64,
    pub b: f64,
}

fn check_order(s: f64, t: f64, u: f64) -> Result<()> {
    if !(0.0 <= s && s < t && t < u) {
        return domain(format!("need 0 <= s < t < u, got ({s}, {t}, {u})"));
    }
    Ok(())
}

/// `a = (u-t)/(u-s)`, `b = (t-s)/(u-s)`.
pub fn harness_coeffs(s: f64, t: f64, u: f64) -> Result<HarnessCoefficients> {
    check_order(s, t, u)?;
    Ok(HarnessCoefficients { a: (u - t) / (u - s), b: (t - s) / (u - s) })
}

/// Coefficients of the two-sided second moment
/// `E(X_t^2 | X_s, X_u) = A X_s^2 + B X_s X_u + C X_u^2 + alpha X_s + beta X_u + D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticVarianceCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Closed forms with `den = u + tau - q s`:
/// `A = (u-t)(u+tau-qt) / ((u-s) den)`, `B = (1+q)(t-s)(u-t) / ((u-s) den)`,
/// `C = (t-s)(t+tau-qs) / ((u-s) den)`, `D = (u-t)(t-s) / den`,
/// `alpha = -theta D / (u-s)`, `beta = theta D / (u-s)`.
pub fn qv_coeffs(params: &ProcessParams, s: f64, t: f64, u: f64) -> Result<QuadraticVarianceCoefficients> {
    check_order(s, t, u)?;
    let (theta, tau, q) = (params.theta(), params.tau(), params.q());
    let den = u + tau - q * s;
    let span = u - s;
    let d = (u - t) * (t - s) / den;
    Ok(QuadraticVarianceCoefficients {
        a: (u - t) / span * (u + tau - q * t) / den,
        b: (1.0 + q) * (t - s) / span * (u - t) / den,
        c: (t - s) / span * (t + tau - q * s) / den,
        d,
        alpha: -theta * d / span,
        beta: theta * d / span,
    })
}
