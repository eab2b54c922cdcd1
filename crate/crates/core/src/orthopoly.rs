//! The kernel polynomials `Q_n(y | x, s, t)`, the martingale polynomials
//! `p_n(y, t)` and residual checks of their algebraic identities.

use crate::error::{domain, Error, Result};
use crate::qcalc::{q_binomial, qint, KernelCoordinates, ProcessParams, RecurrenceCoeffs};
use crate::residual::Residual;

/// Largest degree a family may be built with.
pub const MAX_DEGREE: usize = 40;

/// Monic polynomials `Q_0..Q_{n_max}` of one recurrence, evaluated by the
/// forward three-term recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFamily {
    params: ProcessParams,
    x: f64,
    s: f64,
    t: f64,
    rec: RecurrenceCoeffs,
}

impl PolynomialFamily {
    /// `Q_n(. | x, s, t)` for validated coordinates.
    pub fn kernel(params: &ProcessParams, coords: &KernelCoordinates, n_max: usize) -> Result<Self> {
        Self::raw(params, coords.x(), coords.s(), coords.t(), n_max)
    }

    /// `p_n(., t) = Q_n(. | 0, 0, t)`.
    pub fn marginal(params: &ProcessParams, t: f64, n_max: usize) -> Result<Self> {
        if !(t > 0.0) {
            return domain(format!("marginal polynomials need t > 0, got {t}"));
        }
        Self::raw(params, 0.0, 0.0, t, n_max)
    }

    /// `Q_n(. | x, s, t)` for arbitrary reals. The identities evaluate the
    /// family at reversed or zero times where no measure exists.
    pub fn raw(params: &ProcessParams, x: f64, s: f64, t: f64, n_max: usize) -> Result<Self> {
        if n_max > MAX_DEGREE {
            return domain(format!("degree {n_max} exceeds the cap {MAX_DEGREE}"));
        }
        let rec = RecurrenceCoeffs::raw(params, x, s, t, n_max);
        Ok(Self { params: *params, x, s, t, rec })
    }

    pub fn params(&self) -> &ProcessParams {
        &self.params
    }

    /// The `(x, s, t)` the family was built with.
    pub fn coordinates(&self) -> (f64, f64, f64) {
        (self.x, self.s, self.t)
    }

    pub fn n_max(&self) -> usize {
        self.rec.order()
    }

    /// `[Q_0(y), ..., Q_{n_max}(y)]`.
    pub fn eval(&self, y: f64) -> Vec<f64> {
        let n_max = self.n_max();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(1.0);
        if n_max >= 1 {
            out.push(y - self.rec.alpha(0));
        }
        for n in 1..n_max {
            let next = (y - self.rec.alpha(n)) * out[n] - self.rec.beta(n) * out[n - 1];
            out.push(next);
        }
        out
    }
}

/// `[p_0(y, t), ..., p_{n_max}(y, t)]`.
pub fn eval_p(params: &ProcessParams, t: f64, y: f64, n_max: usize) -> Result<Vec<f64>> {
    Ok(PolynomialFamily::marginal(params, t, n_max)?.eval(y))
}

fn q_binomials(n: usize, q: f64) -> Vec<f64> {
    (0..=n).map(|k| q_binomial(n as i64, k as i64, q).expect("0 <= k <= n")).collect()
}

fn ordered(s: f64, t: f64, u: f64) -> Result<()> {
    if !(0.0 <= s && s <= t && t <= u) {
        return domain(format!("identity needs 0 <= s <= t <= u, got ({s}, {t}, {u})"));
    }
    Ok(())
}

/// Residual of the convolution identity
/// `Q_n(z|x,s,u) = sum_k [n k]_q Q_{n-k}(y|x,s,t) Q_k(z|y,t,u)`,
/// on the scale `1 + |Q_n(z|x,s,u)|`.
#[allow(clippy::too_many_arguments)]
pub fn check_convolution_identity(
    params: &ProcessParams,
    x: f64,
    y: f64,
    z: f64,
    s: f64,
    t: f64,
    u: f64,
    n: usize,
) -> Result<Residual> {
    ordered(s, t, u)?;
    let lhs = PolynomialFamily::raw(params, x, s, u, n)?.eval(z)[n];
    let first = PolynomialFamily::raw(params, x, s, t, n)?.eval(y);
    let second = PolynomialFamily::raw(params, y, t, u, n)?.eval(z);
    let binom = q_binomials(n, params.q());
    let rhs: f64 = (0..=n).map(|k| binom[k] * first[n - k] * second[k]).sum();
    Ok(Residual::of(lhs, rhs))
}

/// Cofactors `B_j(x) = [n j]_q Q_j(0 | x, s, 0)` for `j = 0..n-1`, so that
/// `Q_n(y|x,s,t) = sum_{k=1..n} B_{n-k}(x) (p_k(y,t) - p_k(x,s))`.
pub fn bms_cofactors(params: &ProcessParams, x: f64, s: f64, n: usize) -> Result<Vec<f64>> {
    if n < 1 {
        return domain("cofactors need n >= 1");
    }
    let at_zero = PolynomialFamily::raw(params, x, s, 0.0, n)?.eval(0.0);
    let binom = q_binomials(n, params.q());
    Ok((0..n).map(|j| binom[j] * at_zero[j]).collect())
}

/// Residual of
/// `Q_n(z|y,t,u) = sum_{k>=1} [n k]_q Q_{n-k}(0|y,t,0) (p_k(z,u) - p_k(y,t))`,
/// on the scale `1 + |Q_n(z|y,t,u)|`.
pub fn check_bms_identity(params: &ProcessParams, y: f64, z: f64, t: f64, u: f64, n: usize) -> Result<Residual> {
    if n < 1 {
        return domain("identity needs n >= 1");
    }
    if !(0.0 < t && t <= u) {
        return domain(format!("identity needs 0 < t <= u, got ({t}, {u})"));
    }
    let lhs = PolynomialFamily::raw(params, y, t, u, n)?.eval(z)[n];
    let cofactors = bms_cofactors(params, y, t, n)?;
    let p_z = eval_p(params, u, z, n)?;
    let p_y = eval_p(params, t, y, n)?;
    let rhs: f64 = (1..=n).map(|k| cofactors[n - k] * (p_z[k] - p_y[k])).sum();
    Ok(Residual::of(lhs, rhs))
}

/// Bound `C` with `|Q_{n+1}| <= C^n`; the generating series converges for
/// `|zeta| < 1 / C`.
pub fn generating_radius_bound(params: &ProcessParams, y: f64, x: f64, s: f64, t: f64) -> f64 {
    let q = params.q().abs();
    let c = (x.abs() + y.abs() + params.theta().abs() + params.tau() + t + s) / ((1.0 - q) * (1.0 - q));
    c.max(1.0)
}

/// Truncated product form of `sum_n zeta^n Q_n(y|x,s,t) / [n]_q!`:
/// `prod_{k < k_terms} N_k(x, s) / N_k(y, t)` with
/// `N_k(v, r) = 1 + theta zeta q^k - (1-q) v zeta q^k + ((1-q) r + tau) zeta^2 q^{2k}`.
#[allow(clippy::too_many_arguments)]
pub fn generating_fn(
    params: &ProcessParams,
    zeta: f64,
    y: f64,
    x: f64,
    s: f64,
    t: f64,
    k_terms: usize,
) -> Result<f64> {
    let q = params.q();
    if q.abs() >= 1.0 {
        return Err(Error::Unsupported(format!("generating product needs |q| < 1, got {q}")));
    }
    let radius = 1.0 / generating_radius_bound(params, y, x, s, t);
    if zeta.abs() >= radius {
        return domain(format!("|zeta| = {} lies outside the radius {radius}", zeta.abs()));
    }
    let (theta, tau) = (params.theta(), params.tau());
    let factor = |v: f64, r: f64, qk: f64| {
        1.0 + theta * zeta * qk - (1.0 - q) * v * zeta * qk + ((1.0 - q) * r + tau) * zeta * zeta * qk * qk
    };
    let mut value = 1.0;
    let mut qk = 1.0;
    for _ in 0..k_terms {
        value *= factor(x, s, qk) / factor(y, t, qk);
        qk *= q;
    }
    Ok(value)
}

/// `sum_{n <= n_terms} zeta^n Q_n(y|x,s,t) / [n]_q!`.
pub fn generating_series(
    params: &ProcessParams,
    zeta: f64,
    y: f64,
    x: f64,
    s: f64,
    t: f64,
    n_terms: usize,
) -> Result<f64> {
    let values = PolynomialFamily::raw(params, x, s, t, n_terms)?.eval(y);
    let mut total = 0.0;
    let mut coeff = 1.0; // zeta^n / [n]_q!
    for (n, v) in values.iter().enumerate() {
        if n > 0 {
            coeff *= zeta / qint(n as u64, params.q());
        }
        total += coeff * v;
    }
    Ok(total)
}
