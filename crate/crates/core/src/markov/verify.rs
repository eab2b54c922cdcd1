//! Residual checks of the Markov structure, evaluated by nested quadrature.

use super::{harness_coeffs, qv_coeffs};
use crate::error::{domain, Result};
use crate::kernels::kernel_measure;
use crate::orthopoly::PolynomialFamily;
use crate::qcalc::{KernelCoordinates, ProcessParams};
use crate::residual::Residual;
use crate::tolerances::ROUNDING_FLOOR;

/// `int int Q_n(z|x,s,u) mu_{y,t,u}(dz) mu_{x,s,t}(dy)` for `n = 1..=n_max`,
/// which vanishes when the kernels compose.
///
/// Each residual is judged against `||Q_n|| + ROUNDING_FLOOR * S^n`, where
/// `||Q_n||` is the `L^2(mu_{x,s,u})` norm and `S >= 1` bounds the nodes.
#[allow(clippy::too_many_arguments)]
pub fn check_chapman_kolmogorov(
    params: &ProcessParams,
    x: f64,
    s: f64,
    t: f64,
    u: f64,
    nodes: usize,
    n_max: usize,
) -> Result<Vec<Residual>> {
    if !(0.0 <= s && s < t && t < u) {
        return domain(format!("need 0 <= s < t < u, got ({s}, {t}, {u})"));
    }
    let family = PolynomialFamily::raw(params, x, s, u, n_max)?;
    let first = kernel_measure(params, &KernelCoordinates::new(x, s, t)?, nodes)?;
    let direct = kernel_measure(params, &KernelCoordinates::new(x, s, u)?, nodes)?;

    let mut bound: f64 = 1.0;
    let mut composed = vec![0.0; n_max + 1];
    for (&y, &wy) in first.nodes().iter().zip(first.weights()) {
        let second = kernel_measure(params, &KernelCoordinates::new(y, t, u)?, nodes)?;
        for (&z, &wz) in second.nodes().iter().zip(second.weights()) {
            bound = bound.max(z.abs());
            for (acc, value) in composed.iter_mut().zip(family.eval(z)) {
                *acc += wy * wz * value;
            }
        }
        bound = bound.max(y.abs());
    }
    let mut norms = vec![0.0; n_max + 1];
    for (&z, &w) in direct.nodes().iter().zip(direct.weights()) {
        bound = bound.max(z.abs());
        for (acc, value) in norms.iter_mut().zip(family.eval(z)) {
            *acc += w * value * value;
        }
    }
    Ok((1..=n_max)
        .map(|n| Residual::new(composed[n].abs(), norms[n].sqrt() + ROUNDING_FLOOR * bound.powi(n as i32)))
        .collect())
}

/// `|int p_n(y,t) mu_{x,s,t}(dy) - p_n(x,s)|` for `n = 1..=n_max`, on the
/// scale `1 + |p_n(x,s)|`.
pub fn check_martingale_polynomials(
    params: &ProcessParams,
    x: f64,
    s: f64,
    t: f64,
    nodes: usize,
    n_max: usize,
) -> Result<Vec<Residual>> {
    if !(0.0 < s && s < t) {
        return domain(format!("need 0 < s < t, got ({s}, {t})"));
    }
    let at_t = PolynomialFamily::marginal(params, t, n_max)?;
    let start = PolynomialFamily::marginal(params, s, n_max)?.eval(x);
    let measure = kernel_measure(params, &KernelCoordinates::new(x, s, t)?, nodes)?;
    let mut expected = vec![0.0; n_max + 1];
    for (&y, &w) in measure.nodes().iter().zip(measure.weights()) {
        for (acc, value) in expected.iter_mut().zip(at_t.eval(y)) {
            *acc += w * value;
        }
    }
    Ok((1..=n_max).map(|n| Residual::of(start[n], expected[n])).collect())
}

/// Joint law of `(X_s, X_t, X_u)` as a product of three quadrature kernels
/// started from `X_0 = 0`.
#[derive(Debug, Clone)]
pub struct JointLaw3 {
    /// `(weight, x_s, x_t, x_u)`.
    atoms: Vec<[f64; 4]>,
}

impl JointLaw3 {
    pub fn new(params: &ProcessParams, s: f64, t: f64, u: f64, nodes: usize) -> Result<Self> {
        if !(0.0 < s && s < t && t < u) {
            return domain(format!("need 0 < s < t < u, got ({s}, {t}, {u})"));
        }
        let mut atoms = Vec::with_capacity(nodes.pow(3));
        let at_s = kernel_measure(params, &KernelCoordinates::marginal(s)?, nodes)?;
        for (&xs, &ws) in at_s.nodes().iter().zip(at_s.weights()) {
            let at_t = kernel_measure(params, &KernelCoordinates::new(xs, s, t)?, nodes)?;
            for (&xt, &wt) in at_t.nodes().iter().zip(at_t.weights()) {
                let at_u = kernel_measure(params, &KernelCoordinates::new(xt, t, u)?, nodes)?;
                for (&xu, &wu) in at_u.nodes().iter().zip(at_u.weights()) {
                    atoms.push([ws * wt * wu, xs, xt, xu]);
                }
            }
        }
        Ok(Self { atoms })
    }

    pub fn expect(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        self.atoms.iter().map(|&[w, a, b, c]| w * f(a, b, c)).sum()
    }

    /// `E[X_s^i X_t^j X_u^k]`.
    pub fn moment(&self, i: u32, j: u32, k: u32) -> f64 {
        self.expect(|a, b, c| a.powi(i as i32) * b.powi(j as i32) * c.powi(k as i32))
    }

    /// `E|X_s^i X_t^j X_u^k|`.
    pub fn absolute_moment(&self, i: u32, j: u32, k: u32) -> f64 {
        self.expect(|a, b, c| (a.powi(i as i32) * b.powi(j as i32) * c.powi(k as i32)).abs())
    }

    /// Residual of `E[X_s^m X_t^j X_u^n] = sum_r coef_r E[X_s^{m+di_r} X_u^{n+dk_r}]`,
    /// scaled by the absolute moments of every term.
    fn moment_identity(&self, m: u32, j: u32, n: u32, terms: &[(f64, u32, u32)]) -> Residual {
        let lhs = self.moment(m, j, n);
        let mut rhs = 0.0;
        let mut scale = self.absolute_moment(m, j, n);
        for &(coef, di, dk) in terms {
            rhs += coef * self.moment(m + di, 0, n + dk);
            scale += coef.abs() * self.absolute_moment(m + di, 0, n + dk);
        }
        Residual::new((lhs - rhs).abs(), scale)
    }
}

fn exponent_pairs(degree_cap: u32) -> impl Iterator<Item = (u32, u32)> {
    (0..=degree_cap).flat_map(move |m| (0..=degree_cap - m).map(move |n| (m, n)))
}

/// `E[X_s^m X_t X_u^n] = a E[X_s^{m+1} X_u^n] + b E[X_s^m X_u^{n+1}]` for
/// `m + n <= degree_cap`.
pub fn check_harness_moments(
    params: &ProcessParams,
    s: f64,
    t: f64,
    u: f64,
    nodes: usize,
    degree_cap: u32,
) -> Result<Vec<Residual>> {
    let h = harness_coeffs(s, t, u)?;
    let law = JointLaw3::new(params, s, t, u, nodes)?;
    Ok(exponent_pairs(degree_cap)
        .map(|(m, n)| law.moment_identity(m, 1, n, &[(h.a, 1, 0), (h.b, 0, 1)]))
        .collect())
}

/// `E[X_s^m X_t^2 X_u^n] = A E[X_s^{m+2} X_u^n] + B E[X_s^{m+1} X_u^{n+1}]
/// + C E[X_s^m X_u^{n+2}] + alpha E[X_s^{m+1} X_u^n] + beta E[X_s^m X_u^{n+1}]
/// + D E[X_s^m X_u^n]` for `m + n <= degree_cap`.
pub fn check_quadratic_variance_moments(
    params: &ProcessParams,
    s: f64,
    t: f64,
    u: f64,
    nodes: usize,
    degree_cap: u32,
) -> Result<Vec<Residual>> {
    let c = qv_coeffs(params, s, t, u)?;
    let law = JointLaw3::new(params, s, t, u, nodes)?;
    let terms = [(c.a, 2, 0), (c.b, 1, 1), (c.c, 0, 2), (c.alpha, 1, 0), (c.beta, 0, 1), (c.d, 0, 0)];
    Ok(exponent_pairs(degree_cap).map(|(m, n)| law.moment_identity(m, 2, n, &terms)).collect())
}

/// `E(X_t - X_s)^k` for `k = 2, 3, 4`, from the joint law of `(X_s, X_t)`.
pub fn increment_moments(params: &ProcessParams, s: f64, t: f64, nodes: usize) -> Result<(f64, f64, f64)> {
    if !(0.0 <= s && s < t) {
        return domain(format!("need 0 <= s < t, got ({s}, {t})"));
    }
    let mut m = [0.0; 3];
    let mut accumulate = |w: f64, d: f64| {
        m[0] += w * d * d;
        m[1] += w * d * d * d;
        m[2] += w * d * d * d * d;
    };
    if s == 0.0 {
        let at_t = kernel_measure(params, &KernelCoordinates::marginal(t)?, nodes)?;
        for (&y, &w) in at_t.nodes().iter().zip(at_t.weights()) {
            accumulate(w, y);
        }
    } else {
        let at_s = kernel_measure(params, &KernelCoordinates::marginal(s)?, nodes)?;
        for (&x, &ws) in at_s.nodes().iter().zip(at_s.weights()) {
            let at_t = kernel_measure(params, &KernelCoordinates::new(x, s, t)?, nodes)?;
            for (&y, &wt) in at_t.nodes().iter().zip(at_t.weights()) {
                accumulate(ws * wt, y - x);
            }
        }
    }
    Ok((m[0], m[1], m[2]))
}

/// `(t - s, theta (t - s), (t - s)(6s + theta^2 - tau + (2 + q)(t + tau - 3s)))`.
pub fn increment_closed_forms(params: &ProcessParams, s: f64, t: f64) -> (f64, f64, f64) {
    let (theta, tau, q) = (params.theta(), params.tau(), params.q());
    let d = t - s;
    (d, theta * d, d * (6.0 * s + theta * theta - tau + (2.0 + q) * (t + tau - 3.0 * s)))
}

/// Hankel determinant `det [[1, 0, m2], [0, m2, m3], [m2, m3, m4]]` of the
/// increment moments, divided by `(t - s)^2`.
pub fn hankel_value(params: &ProcessParams, s: f64, t: f64, nodes: usize) -> Result<f64> {
    let (m2, m3, m4) = increment_moments(params, s, t, nodes)?;
    let d = t - s;
    Ok((m2 * m4 - m3 * m3 - m2 * m2 * m2) / (d * d))
}

/// `q (t + tau - 3s) + s + t + tau`.
pub fn hankel_closed_form(params: &ProcessParams, s: f64, t: f64) -> f64 {
    let (tau, q) = (params.tau(), params.q());
    q * (t + tau - 3.0 * s) + s + t + tau
}
