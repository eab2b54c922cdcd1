//! The verification battery: each suite runs its checkers over a seeded
//! parameter sweep and reduces the residuals to one summary per check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::{chain_covariance, fit_chain_coefficients, reference_profiles, verify_chain_identities, BinomialChain};
use crate::error::Result;
use crate::kernels::kernel_measure;
use crate::markov::{
    check_chapman_kolmogorov, check_harness_moments, check_martingale_polynomials, check_quadratic_variance_moments,
    hankel_closed_form, hankel_value, increment_closed_forms, increment_moments, parameter_sweep, qv_coeffs, SweepCase,
};
use crate::orthopoly::{check_bms_identity, check_convolution_identity, generating_fn, generating_radius_bound};
use crate::qcalc::{KernelCoordinates, ProcessParams};
use crate::residual::{worst, Residual};
use crate::tolerances::*;

/// Highest polynomial degree checked by the kernel suites.
pub const DEGREE: usize = 8;
/// Nodes per kernel in the triple-nested joint laws.
pub const JOINT_NODES: usize = 16;
/// Number of sweep cases used by the two-sided suites.
pub const TWO_SIDED_CASES: usize = 25;
/// Largest chain size in the binomial suite.
pub const BINOMIAL_TRIALS: u32 = 6;

/// Which group of checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Ck,
    Martingale,
    Harness,
    Qvar,
    Identities,
    Binomial,
    Moments,
}

/// Sweep settings shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub seed: u64,
    /// Number of random parameter cases.
    pub sweep: usize,
    /// Nodes per kernel outside the joint laws.
    pub nodes: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self { seed: 20240601, sweep: 50, nodes: crate::quadrature::DEFAULT_NODES }
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    /// Number of residuals reduced into this line.
    pub cases: usize,
    pub max_relative_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckSummary {
    pub fn from_residuals(name: &str, residuals: &[Residual], tolerance: f64) -> Self {
        Self::from_value(name, residuals.len(), worst(residuals), tolerance)
    }

    /// A summary whose value is already a worst-case measure; NaN fails.
    pub fn from_value(name: &str, cases: usize, value: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), cases, max_relative_residual: value, tolerance, pass: value <= tolerance }
    }
}

/// Runs `suite` and returns its summaries in a fixed order.
pub fn run_suite(suite: Suite, config: &BatteryConfig) -> Result<Vec<CheckSummary>> {
    let cases = parameter_sweep(config.seed, config.sweep);
    let two_sided = &cases[..cases.len().min(TWO_SIDED_CASES)];
    Ok(match suite {
        Suite::All => {
            let mut out = Vec::new();
            for s in [Suite::Moments, Suite::Identities, Suite::Ck, Suite::Martingale, Suite::Harness, Suite::Qvar, Suite::Binomial] {
                out.extend(run_suite(s, config)?);
            }
            out
        }
        Suite::Ck => vec![chapman_kolmogorov(&cases, config.nodes)?],
        Suite::Martingale => martingale(&cases, config.nodes)?,
        Suite::Harness => vec![harness(two_sided)?],
        Suite::Qvar => quadratic_variance(two_sided)?,
        Suite::Identities => identities(config.seed, 2 * config.sweep)?,
        Suite::Binomial => binomial()?,
        Suite::Moments => moments(&cases, config.nodes)?,
    })
}

fn collect<T: Send>(cases: &[SweepCase], f: impl Fn(&SweepCase) -> Result<Vec<T>> + Sync + Send) -> Result<Vec<T>> {
    let parts: Vec<Vec<T>> = cases.par_iter().map(f).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn chapman_kolmogorov(cases: &[SweepCase], nodes: usize) -> Result<CheckSummary> {
    let r = collect(cases, |c| check_chapman_kolmogorov(&c.params, c.x, c.s, c.t, c.u, nodes, DEGREE))?;
    Ok(CheckSummary::from_residuals("chapman_kolmogorov", &r, CHAPMAN_KOLMOGOROV))
}

/// Martingale polynomials up to [`DEGREE`], plus the conditional mean `x`
/// and variance `t - s` of each kernel.
pub fn martingale(cases: &[SweepCase], nodes: usize) -> Result<Vec<CheckSummary>> {
    let r = collect(cases, |c| check_martingale_polynomials(&c.params, c.x, c.s, c.t, nodes, DEGREE))?;
    let low = collect(cases, |c| {
        let m = kernel_measure(&c.params, &KernelCoordinates::new(c.x, c.s, c.t)?, nodes)?;
        let mean = m.moment(1);
        let var = m.expect(|y| (y - mean).powi(2));
        Ok(vec![Residual::of(mean, c.x), Residual::of(var, c.t - c.s)])
    })?;
    Ok(vec![
        CheckSummary::from_residuals("martingale_polynomials", &r, MARTINGALE),
        CheckSummary::from_residuals("conditional_mean_variance", &low, MARTINGALE),
    ])
}

pub fn harness(cases: &[SweepCase]) -> Result<CheckSummary> {
    let r = collect(cases, |c| check_harness_moments(&c.params, c.s, c.t, c.u, JOINT_NODES, 6))?;
    Ok(CheckSummary::from_residuals("harness_moments", &r, TWO_SIDED_MOMENTS))
}

/// Two-sided second moments, plus the coefficient invariants
/// `A + B + C = 1`, `alpha + beta = 0`, `(u - s) B / D = 1 + q`.
pub fn quadratic_variance(cases: &[SweepCase]) -> Result<Vec<CheckSummary>> {
    let r = collect(cases, |c| check_quadratic_variance_moments(&c.params, c.s, c.t, c.u, JOINT_NODES, 4))?;
    let inv = collect(cases, |c| {
        let k = qv_coeffs(&c.params, c.s, c.t, c.u)?;
        Ok(vec![
            Residual::of(k.a + k.b + k.c, 1.0),
            Residual::new((k.alpha + k.beta).abs(), 1.0 + k.alpha.abs()),
            Residual::of((c.u - c.s) * k.b / k.d, 1.0 + c.params.q()),
        ])
    })?;
    Ok(vec![
        CheckSummary::from_residuals("quadratic_variance_moments", &r, TWO_SIDED_MOMENTS),
        CheckSummary::from_residuals("quadratic_variance_coefficients", &inv, QV_COEFFICIENTS),
    ])
}

/// `draws` random points for the convolution and BMS identities (every
/// fourth at `q = -1` or `q = 1`) and for the generating-product identity
/// at `|q| <= 0.8`.
pub fn identities(seed: u64, draws: usize) -> Result<Vec<CheckSummary>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1de7);
    let mut algebraic = Vec::new();
    let mut product = Vec::new();
    for i in 0..draws {
        let q = match i % 4 {
            0 => -1.0,
            2 => 1.0,
            _ => rng.gen_range(-1.0..=1.0),
        };
        let params = ProcessParams::new(rng.gen_range(-1.5..=1.5), rng.gen_range(0.0..=1.5), q)?;
        let [x, y, z]: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..=2.0));
        let s = rng.gen_range(0.0..1.0);
        let t = s + rng.gen_range(0.1..1.0);
        let u = t + rng.gen_range(0.1..1.0);
        for n in 1..=DEGREE {
            algebraic.push(check_convolution_identity(&params, x, y, z, s, t, u, n)?);
            algebraic.push(check_bms_identity(&params, y, z, t, u, n)?);
        }

        let params = ProcessParams::new(params.theta(), params.tau(), rng.gen_range(-0.8..=0.8))?;
        let bound = generating_radius_bound(&params, z, x, s, u)
            .max(generating_radius_bound(&params, y, x, s, t))
            .max(generating_radius_bound(&params, z, y, t, u));
        let zeta = rng.gen_range(-0.9..0.9) / bound;
        let lhs = generating_fn(&params, zeta, z, x, s, u, 200)?;
        let rhs = generating_fn(&params, zeta, y, x, s, t, 200)? * generating_fn(&params, zeta, z, y, t, u, 200)?;
        product.push(Residual::new((lhs - rhs).abs(), lhs.abs()));
    }
    Ok(vec![
        CheckSummary::from_residuals("algebraic_identities", &algebraic, ALGEBRAIC_IDENTITY),
        CheckSummary::from_residuals("generating_product", &product, GENERATING_PRODUCT),
    ])
}

/// Every chain size up to [`BINOMIAL_TRIALS`] on the reference profiles.
pub fn binomial() -> Result<Vec<CheckSummary>> {
    let mut identities = 0.0f64;
    let mut covariance = 0.0f64;
    let mut spread = 0.0f64;
    let mut cases = 0;
    for (profile, [s, t, u]) in reference_profiles() {
        let mut fits = Vec::new();
        for m in 1..=BINOMIAL_TRIALS {
            let chain = BinomialChain::new(m, profile.clone())?;
            identities = identities.max(verify_chain_identities(&chain, s, t, u)?.max());
            covariance = covariance.max((enumerated_covariance(&chain, s, t)? - chain_covariance(&chain, s, t)?).abs());
            fits.push(fit_chain_coefficients(&chain, s, t, u)?);
            cases += 1;
        }
        for f in &fits {
            spread = spread
                .max((f.a - fits[0].a).abs())
                .max((f.b - fits[0].b).abs())
                .max((f.variance - fits[0].variance).abs());
        }
    }
    Ok(vec![
        CheckSummary::from_value("binomial_identities", cases, identities, BINOMIAL_EXACT),
        CheckSummary::from_value("binomial_covariance", cases, covariance, BINOMIAL_EXACT),
        CheckSummary::from_value("binomial_m_independence", cases, spread, BINOMIAL_EXACT),
    ])
}

fn enumerated_covariance(chain: &BinomialChain, s: f64, t: f64) -> Result<f64> {
    let start = chain.marginal(s)?;
    let step = chain.transition_matrix(s, t)?;
    let (mut es, mut et, mut est) = (0.0, 0.0, 0.0);
    for (i, pi) in start.iter().enumerate() {
        for (j, pij) in step[i].iter().enumerate() {
            let w = pi * pij;
            es += w * i as f64;
            et += w * j as f64;
            est += w * (i * j) as f64;
        }
    }
    Ok(est - es * et)
}

/// Marginal moments `0, t, theta t, (1+q) t (t+tau) + t (t + theta^2)`,
/// the increment moments and the increment Hankel determinant.
pub fn moments(cases: &[SweepCase], nodes: usize) -> Result<Vec<CheckSummary>> {
    let marginal = collect(cases, |c| {
        let (theta, tau, q) = (c.params.theta(), c.params.tau(), c.params.q());
        let t = c.t;
        let m = kernel_measure(&c.params, &KernelCoordinates::marginal(t)?, nodes)?;
        let m4 = (1.0 + q) * t * (t + tau) + t * (t + theta * theta);
        // the odd moments are judged on the scale of their absolute moments
        Ok(vec![
            Residual::new(m.moment(1).abs(), m.absolute_moment(1)),
            Residual::new((m.moment(2) - t).abs(), t),
            Residual::new((m.moment(3) - theta * t).abs(), m.absolute_moment(3)),
            Residual::new((m.moment(4) - m4).abs(), m4),
        ])
    })?;
    let increments = collect(cases, |c| {
        let (m2, m3, m4) = increment_moments(&c.params, c.s, c.t, nodes)?;
        let (c2, c3, c4) = increment_closed_forms(&c.params, c.s, c.t);
        let hv = hankel_value(&c.params, c.s, c.t, nodes)?;
        Ok(vec![
            Residual::new((m2 - c2).abs(), 1.0 + c2.abs()),
            Residual::new((m3 - c3).abs(), 1.0 + c3.abs()),
            Residual::new((m4 - c4).abs(), 1.0 + c4.abs()),
            Residual::of(hv, hankel_closed_form(&c.params, c.s, c.t)),
        ])
    })?;
    let lowest = cases.iter().map(|c| hankel_closed_form(&c.params, c.s, c.t)).fold(f64::INFINITY, f64::min);
    Ok(vec![
        CheckSummary::from_residuals("marginal_moments", &marginal, MARGINAL_MOMENTS),
        CheckSummary::from_residuals("increment_moments", &increments, INCREMENT_MOMENTS),
        // reported as the negative part of the smallest determinant value
        CheckSummary::from_value("hankel_positivity", cases.len(), (-lowest).max(0.0), -HANKEL_FLOOR),
    ])
}
