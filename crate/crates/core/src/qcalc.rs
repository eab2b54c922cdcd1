//! q-calculus primitives, process parameters and the three-term recurrence
//! coefficients behind every kernel and marginal law.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// `[n]_q = 1 + q + ... + q^{n-1}`, with `[0]_q = 0`.
pub fn q_int(n: i64, q: f64) -> Result<f64> {
    if n < 0 {
        return domain(format!("q-integer needs n >= 0, got {n}"));
    }
    Ok(qint(n as u64, q))
}

pub(crate) fn qint(n: u64, q: f64) -> f64 {
    if q == 1.0 {
        return n as f64;
    }
    if q == -1.0 {
        return (n % 2) as f64;
    }
    if n <= 64 {
        // Horner keeps full relative accuracy for q close to 1.
        (0..n).fold(0.0, |acc, _| acc * q + 1.0)
    } else {
        (1.0 - q.powi(n as i32)) / (1.0 - q)
    }
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: i64, q: f64) -> Result<f64> {
    if n < 0 {
        return domain(format!("q-factorial needs n >= 0, got {n}"));
    }
    Ok((1..=n as u64).map(|j| qint(j, q)).product())
}

/// Gaussian binomial coefficient `[n choose k]_q`.
///
/// Evaluated as `prod_{j=1..k} [n-j+1]_q / [j]_q`. At `q = -1` the factors
/// `[m]_q` with even `m` vanish; they are paired numerator against
/// denominator using the limit `[2a]_q / [2b]_q -> a / b`.
pub fn q_binomial(n: i64, k: i64, q: f64) -> Result<f64> {
    if k < 0 || k > n {
        return domain(format!("q-binomial needs 0 <= k <= n, got n={n}, k={k}"));
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    if q == -1.0 {
        return Ok(q_binomial_at_minus_one(n, k));
    }
    let mut value = 1.0;
    for j in 1..=k {
        value *= qint(n - j + 1, q) / qint(j, q);
    }
    Ok(value)
}

fn q_binomial_at_minus_one(n: u64, k: u64) -> f64 {
    let top: Vec<u64> = (1..=k).map(|j| n - j + 1).filter(|m| m % 2 == 0).collect();
    let bottom: Vec<u64> = (1..=k).filter(|m| m % 2 == 0).collect();
    if top.len() > bottom.len() {
        return 0.0;
    }
    debug_assert_eq!(top.len(), bottom.len());
    top.iter()
        .zip(&bottom)
        .map(|(a, b)| (a / 2) as f64 / (b / 2) as f64)
        .product()
}

/// The parameter triple `(theta, tau, q)` of a q-Meixner process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    theta: f64,
    tau: f64,
    q: f64,
}

impl ProcessParams {
    /// Validates `tau >= 0` and `-1 <= q <= 1`.
    ///
    /// `q = -1` is accepted and puts every kernel in two-point mode.
    pub fn new(theta: f64, tau: f64, q: f64) -> Result<Self> {
        if !(theta.is_finite() && tau.is_finite() && q.is_finite()) {
            return domain("process parameters must be finite");
        }
        if tau < 0.0 {
            return domain(format!("tau must be >= 0, got {tau}"));
        }
        if !(-1.0..=1.0).contains(&q) {
            return domain(format!("q must lie in [-1, 1], got {q}"));
        }
        Ok(Self { theta, tau, q })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// True when `q = -1`: every transition law is supported on two points.
    pub fn is_two_point(&self) -> bool {
        self.q == -1.0
    }
}

/// Conditioning state `X_s = x` and target time `t` of a transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCoordinates {
    x: f64,
    s: f64,
    t: f64,
}

impl KernelCoordinates {
    /// Validates `0 <= s < t`.
    pub fn new(x: f64, s: f64, t: f64) -> Result<Self> {
        if !(x.is_finite() && s.is_finite() && t.is_finite()) {
            return domain("kernel coordinates must be finite");
        }
        if !(0.0 <= s && s < t) {
            return domain(format!("kernel times need 0 <= s < t, got s={s}, t={t}"));
        }
        Ok(Self { x, s, t })
    }

    /// Coordinates of the marginal law of `X_t` (`x = 0`, `s = 0`).
    pub fn marginal(t: f64) -> Result<Self> {
        Self::new(0.0, 0.0, t)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// Recurrence coefficients `alpha_n` (n = 0..=order) and `beta_n`
/// (n = 1..=order) of the monic three-term recurrence
/// `y Q_n = Q_{n+1} + alpha_n Q_n + beta_n Q_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoeffs {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl RecurrenceCoeffs {
    /// Coefficients for arbitrary real `(x, s, t)`.
    ///
    /// `alpha_n = theta [n]_q + x q^n`,
    /// `beta_n = (t - s q^{n-1} + tau [n-1]_q) [n]_q`.
    /// No ordering is required here; polynomial identities evaluate the
    /// family at swapped or zero times.
    pub fn raw(params: &ProcessParams, x: f64, s: f64, t: f64, order: usize) -> Self {
        let q = params.q;
        let mut alpha = Vec::with_capacity(order + 1);
        let mut beta = Vec::with_capacity(order + 1);
        beta.push(0.0);
        let mut q_pow = 1.0; // q^n
        for n in 0..=order as u64 {
            alpha.push(params.theta * qint(n, q) + x * q_pow);
            if n >= 1 {
                let q_prev = q.powi(n as i32 - 1);
                beta.push((t - s * q_prev + params.tau * qint(n - 1, q)) * qint(n, q));
            }
            q_pow *= q;
        }
        Self { alpha, beta }
    }

    /// Highest index `n` for which coefficients are stored.
    pub fn order(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `alpha_n`.
    pub fn alpha(&self, n: usize) -> f64 {
        self.alpha[n]
    }

    /// `beta_n` for `n >= 1`; `beta_0` is reported as 0.
    pub fn beta(&self, n: usize) -> f64 {
        self.beta[n]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    /// `beta_0..=beta_order`, with the unused `beta_0 = 0` in front.
    pub fn betas(&self) -> &[f64] {
        &self.beta
    }
}

/// Coefficients of the kernel polynomials `Q_n(y | x, s, t)`.
pub fn kernel_recurrence(
    params: &ProcessParams,
    coords: &KernelCoordinates,
    n_max: usize,
) -> Result<RecurrenceCoeffs> {
    if n_max < 1 {
        return domain("kernel recurrence needs n_max >= 1");
    }
    Ok(RecurrenceCoeffs::raw(params, coords.x, coords.s, coords.t, n_max))
}

/// Coefficients of the martingale polynomials `p_n(y, t) = Q_n(y | 0, 0, t)`.
pub fn marginal_recurrence(params: &ProcessParams, t: f64, n_max: usize) -> Result<RecurrenceCoeffs> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("marginal recurrence needs t > 0, got {t}"));
    }
    Ok(RecurrenceCoeffs::raw(params, 0.0, 0.0, t, n_max))
}

/// Partial sum `sum_{n=1..terms} beta_n^{-1/2}` of the Carleman series.
pub fn carleman_partial_sum(params: &ProcessParams, coords: &KernelCoordinates, terms: usize) -> f64 {
    let (q, tau) = (params.q, params.tau);
    let mut total = 0.0;
    let mut q_prev = 1.0; // q^{n-1}
    let mut bracket_prev = 0.0; // [n-1]_q
    for _ in 1..=terms {
        let bracket = 1.0 + q * bracket_prev; // [n]_q
        let beta = (coords.t - coords.s * q_prev + tau * bracket_prev) * bracket;
        total += 1.0 / beta.sqrt();
        q_prev *= q;
        bracket_prev = bracket;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Gaussian binomial by enumeration of k-subsets of {1..n}:
    /// `sum_S q^{sum(S) - k(k+1)/2}`.
    fn q_binomial_by_subsets(n: u32, k: u32, q: f64) -> f64 {
        let base = (k * (k + 1) / 2) as i32;
        (0u32..1 << n)
            .filter(|mask| mask.count_ones() == k)
            .map(|mask| {
                let sum: u32 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum();
                q.powi(sum as i32 - base)
            })
            .sum()
    }

    #[test]
    fn q_int_examples() {
        assert_eq!(q_int(5, 1.0).unwrap(), 5.0);
        assert_eq!(q_int(3, 0.5).unwrap(), 1.75);
        assert_eq!(q_int(2, -1.0).unwrap(), 0.0);
        assert_eq!(q_int(0, 0.3).unwrap(), 0.0);
        assert!(q_int(-1, 0.5).is_err());
    }

    #[test]
    fn q_int_positive_and_alternating() {
        for &q in &[-0.99, -0.5, 0.0, 0.5, 0.999, 1.0] {
            for n in 1..200 {
                assert!(qint(n, q) > 0.0, "q={q} n={n}");
            }
        }
        for n in 0..20u64 {
            assert_eq!(qint(n, -1.0), (n % 2) as f64);
        }
        // both branches of qint agree at the switch
        assert_relative_eq!(qint(65, 0.97), (1.0 - 0.97f64.powi(65)) / 0.03, max_relative = 1e-13);
    }

    #[test]
    fn q_binomial_examples() {
        assert_eq!(q_binomial(4, 2, 1.0).unwrap(), 6.0);
        assert_eq!(q_binomial(4, 2, 0.0).unwrap(), 1.0);
        let oracle = q_binomial_by_subsets(4, 2, 0.5);
        assert_relative_eq!(oracle, 2.1875, max_relative = 1e-15);
        assert_relative_eq!(q_binomial(4, 2, 0.5).unwrap(), 2.1875, max_relative = 1e-14);
        assert!(q_binomial(3, 4, 0.5).is_err());
        assert!(q_binomial(3, -1, 0.5).is_err());
    }

    #[test]
    fn q_binomial_matches_subset_oracle() {
        for &q in &[-1.0, -0.5, 0.0, 0.5, 1.0, 0.93] {
            for n in 0..=12u32 {
                for k in 0..=n {
                    let oracle = q_binomial_by_subsets(n, k, q);
                    let got = q_binomial(n as i64, k as i64, q).unwrap();
                    assert!((got - oracle).abs() <= 1e-12 * oracle.abs().max(1.0), "q={q} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn q_pascal_rule() {
        for &q in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
            for n in 1..=12i64 {
                for k in 1..n {
                    let lhs = q_binomial(n, k, q).unwrap();
                    let rhs = q_binomial(n - 1, k - 1, q).unwrap() + q.powi(k as i32) * q_binomial(n - 1, k, q).unwrap();
                    assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "q={q} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn q_factorial_small() {
        assert_eq!(q_factorial(0, 0.3).unwrap(), 1.0);
        assert_eq!(q_factorial(4, 1.0).unwrap(), 24.0);
        assert_relative_eq!(q_factorial(3, 0.5).unwrap(), 1.0 * 1.5 * 1.75);
    }

    #[test]
    fn params_validation() {
        assert!(ProcessParams::new(0.0, -0.1, 0.0).is_err());
        assert!(ProcessParams::new(0.0, 0.0, 1.01).is_err());
        assert!(ProcessParams::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(ProcessParams::new(1.0, 0.0, -1.0).unwrap().is_two_point());
        assert!(KernelCoordinates::new(0.0, 1.0, 1.0).is_err());
        assert!(KernelCoordinates::new(0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_recurrence_examples() {
        let p = ProcessParams::new(0.0, 0.0, 0.37).unwrap();
        let c = KernelCoordinates::new(0.0, 0.0, 1.0).unwrap();
        let r = kernel_recurrence(&p, &c, 1).unwrap();
        assert_eq!(r.alpha(1), 0.0);
        assert_eq!(r.beta(1), 1.0);

        let p = ProcessParams::new(1.0, 2.0, 0.5).unwrap();
        let c = KernelCoordinates::new(0.3, 1.0, 2.0).unwrap();
        let r = kernel_recurrence(&p, &c, 2).unwrap();
        assert_eq!(r.alpha(0), 0.3);
        assert_relative_eq!(r.alpha(2), 1.575, max_relative = 1e-15);
        assert_relative_eq!(r.beta(2), 5.25, max_relative = 1e-15);
        assert!(kernel_recurrence(&p, &c, 0).is_err());
    }

    #[test]
    fn marginal_recurrence_examples() {
        let p = ProcessParams::new(0.0, 0.0, 1.0).unwrap();
        let r = marginal_recurrence(&p, 1.0, 6).unwrap();
        for n in 1..=6 {
            assert_eq!(r.alpha(n), 0.0);
            assert_eq!(r.beta(n), n as f64);
        }
        let p = ProcessParams::new(2.0, 0.0, 1.0).unwrap();
        let r = marginal_recurrence(&p, 3.0, 2).unwrap();
        assert_eq!(r.alpha(2), 4.0);
        assert_eq!(r.beta(2), 6.0);
        assert!(marginal_recurrence(&p, 0.0, 2).is_err());
    }

    #[test]
    fn marginal_is_kernel_at_origin() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = ProcessParams::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..2.0), rng.gen_range(-1.0..=1.0)).unwrap();
            let t = rng.gen_range(0.1..3.0);
            let a = marginal_recurrence(&p, t, 12).unwrap();
            let b = kernel_recurrence(&p, &KernelCoordinates::marginal(t).unwrap(), 12).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn beta_vanishes_only_at_even_n_for_q_minus_one() {
        let p = ProcessParams::new(0.4, 1.3, -1.0).unwrap();
        let c = KernelCoordinates::new(0.7, 0.5, 2.0).unwrap();
        let r = kernel_recurrence(&p, &c, 10).unwrap();
        for n in 1..=10 {
            if n % 2 == 0 {
                assert_eq!(r.beta(n), 0.0);
            } else {
                assert!(r.beta(n) > 0.0);
            }
        }
    }

    #[test]
    fn carleman_series_keeps_growing() {
        for &(theta, tau, q) in &[(0.0, 0.0, 0.5), (1.0, 2.0, 1.0), (-0.5, 0.3, 0.99), (0.2, 5.0, -0.9)] {
            let p = ProcessParams::new(theta, tau, q).unwrap();
            let c = KernelCoordinates::new(0.3, 0.5, 1.5).unwrap();
            let s2 = carleman_partial_sum(&p, &c, 100);
            let s3 = carleman_partial_sum(&p, &c, 1_000);
            let s4 = carleman_partial_sum(&p, &c, 10_000);
            // per-decade increments do not decay: the series diverges at
            // least logarithmically
            assert!(s4 - s3 >= 0.9 * (s3 - s2), "{theta} {tau} {q}: {s2} {s3} {s4}");
        }
    }

    proptest::proptest! {
        #[test]
        fn beta_nonnegative(theta in -3.0..3.0f64, tau in 0.0..3.0f64, q in -1.0..=1.0f64,
                            x in -3.0..3.0f64, s in 0.0..2.0f64, dt in 1e-3..2.0f64) {
            let p = ProcessParams::new(theta, tau, q).unwrap();
            let c = KernelCoordinates::new(x, s, s + dt).unwrap();
            let r = kernel_recurrence(&p, &c, 30).unwrap();
            for n in 1..=30 {
                proptest::prop_assert!(r.beta(n) >= -1e-14 * (s + dt + tau + 1.0));
            }
        }
    }
}
