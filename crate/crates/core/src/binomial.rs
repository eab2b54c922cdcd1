//! A finite Markov chain on `{0..m}` whose two-sided conditional moments are
//! linear and quadratic with coefficients that do not depend on `m`.
//!
//! Each of `m` trials succeeds once, at a time with sub-probability density
//! `p`; `Y_t` counts the successes by time `t`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest `m` accepted by [`BinomialChain`].
pub const MAX_TRIALS: u32 = 12;

/// Piecewise-constant rate on `[0, T]`: `values[k]` on
/// `[breakpoints[k], breakpoints[k + 1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl RateProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return domain("need one more breakpoint than rate values");
        }
        if breakpoints[0] != 0.0 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("breakpoints must start at 0 and increase strictly");
        }
        if !breakpoints.iter().all(|b| b.is_finite()) || !values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return domain("rates must be finite and non-negative");
        }
        let profile = Self { breakpoints, values };
        let total = profile.cumulative(0.0, profile.horizon());
        if !(total < 1.0) {
            return domain(format!("total rate mass must be below 1, got {total}"));
        }
        Ok(profile)
    }

    pub fn constant(rate: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![0.0, horizon], vec![rate])
    }

    /// The right end `T`.
    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().expect("non-empty")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `pi(s, t)`, the integral of the rate over `[s, t]` (clipped to `[0, T]`).
    pub fn cumulative(&self, s: f64, t: f64) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| {
                let overlap = t.min(w[1]) - s.max(w[0]);
                if overlap > 0.0 {
                    v * overlap
                } else {
                    0.0
                }
            })
            .sum()
    }
}

/// `m` trials driven by a rate profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinomialChain {
    trials: u32,
    rate: RateProfile,
}

/// Row-major `(m+1) x (m+1)` matrix.
pub type TransitionMatrix = Vec<Vec<f64>>;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl BinomialChain {
    pub fn new(trials: u32, rate: RateProfile) -> Result<Self> {
        if !(1..=MAX_TRIALS).contains(&trials) {
            return domain(format!("need 1 <= m <= {MAX_TRIALS}, got {trials}"));
        }
        Ok(Self { trials, rate })
    }

    pub fn trials(&self) -> u32 {
        self.trials
    }

    pub fn rate(&self) -> &RateProfile {
        &self.rate
    }

    fn check_times(&self, times: &[f64]) -> Result<()> {
        let ordered = times.windows(2).all(|w| w[0] < w[1]);
        if !(times[0] >= 0.0 && ordered && times[times.len() - 1] <= self.rate.horizon()) {
            return domain(format!("need increasing times in [0, {}], got {times:?}", self.rate.horizon()));
        }
        Ok(())
    }

    /// `P(Y_t = j | Y_s = i) = C(m-i, j-i) pi(s,t)^{j-i} (1-pi(0,t))^{m-j} / (1-pi(0,s))^{m-i}`.
    pub fn transition_matrix(&self, s: f64, t: f64) -> Result<TransitionMatrix> {
        self.check_times(&[s, t])?;
        let before = 1.0 - self.rate.cumulative(0.0, s);
        if !(before > 0.0) {
            return domain("pi(0, s) must be below 1");
        }
        let step = self.rate.cumulative(s, t) / before;
        let stay = (1.0 - self.rate.cumulative(0.0, t)) / before;
        let m = self.trials;
        Ok((0..=m)
            .map(|i| {
                (0..=m)
                    .map(|j| {
                        if j < i {
                            0.0
                        } else {
                            binomial(m - i, j - i) * step.powi((j - i) as i32) * stay.powi((m - j) as i32)
                        }
                    })
                    .collect()
            })
            .collect())
    }

    /// Law of `Y_t` started from `Y_0 = 0`.
    pub fn marginal(&self, t: f64) -> Result<Vec<f64>> {
        if t == 0.0 {
            let mut point = vec![0.0; self.trials as usize + 1];
            point[0] = 1.0;
            return Ok(point);
        }
        Ok(self.transition_matrix(0.0, t)?.swap_remove(0))
    }

    /// `P(Y_s = i, Y_t = j, Y_u = k)` indexed `[i][j][k]`, built from the
    /// transition matrices.
    pub fn joint_law(&self, s: f64, t: f64, u: f64) -> Result<Vec<Vec<Vec<f64>>>> {
        self.check_times(&[s, t, u])?;
        let start = self.marginal(s)?;
        let first = self.transition_matrix(s, t)?;
        let second = self.transition_matrix(t, u)?;
        Ok(start
            .iter()
            .zip(&first)
            .map(|(pi, row)| {
                row.iter().zip(&second).map(|(pij, next)| next.iter().map(|pjk| pi * pij * pjk).collect()).collect()
            })
            .collect())
    }
}

/// `Cov(Y_s, Y_t) = m pi(0,s) (1 - pi(0,t))` for `s <= t`.
pub fn chain_covariance(chain: &BinomialChain, s: f64, t: f64) -> Result<f64> {
    if !(0.0 <= s && s <= t && t <= chain.rate.horizon()) {
        return domain(format!("need 0 <= s <= t <= T, got ({s}, {t})"));
    }
    let r = &chain.rate;
    Ok(f64::from(chain.trials) * r.cumulative(0.0, s) * (1.0 - r.cumulative(0.0, t)))
}

/// Largest absolute deviation found by [`verify_chain_identities`], per
/// identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainResiduals {
    /// `E(Y_t | Y_s, Y_u)` against `Y_s + pi(s,t)/pi(s,u) (Y_u - Y_s)`.
    pub conditional_mean: f64,
    /// `Var(Y_t | Y_s, Y_u)` against `pi(s,t) pi(t,u) / pi(s,u)^2 (Y_u - Y_s)`.
    pub conditional_variance: f64,
    /// The conditional law against `Y_s + Binomial(Y_u - Y_s, pi(s,t)/pi(s,u))`.
    pub conditional_pmf: f64,
    /// `P(s,t) P(t,u)` against `P(s,u)`.
    pub chapman_kolmogorov: f64,
    /// Row sums of `P(s,t)`, `P(t,u)` and `P(s,u)` against 1.
    pub row_sums: f64,
}

impl ChainResiduals {
    pub fn max(&self) -> f64 {
        [self.conditional_mean, self.conditional_variance, self.conditional_pmf, self.chapman_kolmogorov, self.row_sums]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Conditional law of `Y_t` on each endpoint pair `(i, k)` of positive mass.
#[allow(clippy::needless_range_loop)]
fn endpoint_conditionals(joint: &[Vec<Vec<f64>>]) -> Vec<(usize, usize, f64, Vec<f64>)> {
    let states = joint.len();
    let mut out = Vec::new();
    for i in 0..states {
        for k in i..states {
            let mass: f64 = (0..states).map(|j| joint[i][j][k]).sum();
            if mass > 0.0 {
                out.push((i, k, mass, (0..states).map(|j| joint[i][j][k] / mass).collect()));
            }
        }
    }
    out
}

/// Exhaustive check over every state triple of the chain.
pub fn verify_chain_identities(chain: &BinomialChain, s: f64, t: f64, u: f64) -> Result<ChainResiduals> {
    let joint = chain.joint_law(s, t, u)?;
    let r = &chain.rate;
    let (p_st, p_tu, p_su) = (r.cumulative(s, t), r.cumulative(t, u), r.cumulative(s, u));
    // with pi(s,u) = 0 no trial fires in [s,u] and Y_u = Y_s
    let success = if p_su > 0.0 { p_st / p_su } else { 0.0 };
    let spread = if p_su > 0.0 { p_st * p_tu / (p_su * p_su) } else { 0.0 };

    let mut res = ChainResiduals {
        conditional_mean: 0.0,
        conditional_variance: 0.0,
        conditional_pmf: 0.0,
        chapman_kolmogorov: 0.0,
        row_sums: 0.0,
    };
    for (i, k, _, law) in endpoint_conditionals(&joint) {
        let n = (k - i) as u32;
        let mean: f64 = law.iter().enumerate().map(|(j, p)| j as f64 * p).sum();
        let var: f64 = law.iter().enumerate().map(|(j, p)| (j as f64 - mean).powi(2) * p).sum();
        res.conditional_mean = res.conditional_mean.max((mean - (i as f64 + success * f64::from(n))).abs());
        res.conditional_variance = res.conditional_variance.max((var - spread * f64::from(n)).abs());
        for (j, p) in law.iter().enumerate() {
            let expected = if j < i || j > k {
                0.0
            } else {
                let hits = (j - i) as u32;
                binomial(n, hits) * success.powi(hits as i32) * (1.0 - success).powi((n - hits) as i32)
            };
            res.conditional_pmf = res.conditional_pmf.max((p - expected).abs());
        }
    }

    let (a, b, c) = (chain.transition_matrix(s, t)?, chain.transition_matrix(t, u)?, chain.transition_matrix(s, u)?);
    for i in 0..a.len() {
        for k in 0..a.len() {
            let composed: f64 = (0..a.len()).map(|j| a[i][j] * b[j][k]).sum();
            res.chapman_kolmogorov = res.chapman_kolmogorov.max((composed - c[i][k]).abs());
        }
    }
    res.row_sums = [&a, &b, &c]
        .into_iter()
        .flat_map(|m| m.iter().map(|row| (row.iter().sum::<f64>() - 1.0).abs()))
        .fold(0.0, f64::max);
    Ok(res)
}

/// Coefficients fitted to the conditional moments by probability-weighted
/// least squares: `E(Y_t | Y_s, Y_u) ~ a Y_s + b Y_u` and
/// `Var(Y_t | Y_s, Y_u) ~ variance (Y_u - Y_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCoefficients {
    pub a: f64,
    pub b: f64,
    pub variance: f64,
}

pub fn fit_chain_coefficients(chain: &BinomialChain, s: f64, t: f64, u: f64) -> Result<ChainCoefficients> {
    let joint = chain.joint_law(s, t, u)?;
    let (mut ss, mut su, mut uu, mut sy, mut uy, mut nn, mut nv) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, k, w, law) in endpoint_conditionals(&joint) {
        let (ys, yu) = (i as f64, k as f64);
        let mean: f64 = law.iter().enumerate().map(|(j, p)| j as f64 * p).sum();
        let var: f64 = law.iter().enumerate().map(|(j, p)| (j as f64 - mean).powi(2) * p).sum();
        ss += w * ys * ys;
        su += w * ys * yu;
        uu += w * yu * yu;
        sy += w * ys * mean;
        uy += w * yu * mean;
        nn += w * (yu - ys).powi(2);
        nv += w * (yu - ys) * var;
    }
    let det = ss * uu - su * su;
    if !(det > 1e-12 * (ss * uu).max(f64::MIN_POSITIVE)) || !(nn > 0.0) {
        return domain("the endpoint law is too degenerate to fit coefficients");
    }
    Ok(ChainCoefficients { a: (uu * sy - su * uy) / det, b: (ss * uy - su * sy) / det, variance: nv / nn })
}

/// The three rate profiles exercised by the verification battery, each
/// with a time triple inside its horizon.
pub fn reference_profiles() -> Vec<(RateProfile, [f64; 3])> {
    vec![
        (RateProfile::constant(0.1, 5.0).expect("valid"), [1.0, 2.0, 3.0]),
        (
            RateProfile::new(vec![0.0, 1.0, 2.5, 4.0], vec![0.05, 0.2, 0.1]).expect("valid"),
            [0.5, 1.7, 3.2],
        ),
        (RateProfile::new(vec![0.0, 1.0, 3.0], vec![0.0, 0.3]).expect("valid"), [1.2, 1.9, 2.8]),
    ]
}
