//! Jacobi operators built from the recurrence coefficients and the Gauss
//! quadrature measures they define.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcalc::{KernelCoordinates, ProcessParams, RecurrenceCoeffs};
use crate::tridiag::eigen_first_components;

/// Default node count for kernels.
pub const DEFAULT_NODES: usize = 80;

/// `beta_n <= TRUNCATION * scale` ends the operator (finite support).
const TRUNCATION: f64 = 1e-14;
/// `beta_n < -NEGATIVE_BETA * scale` signals an inconsistency.
const NEGATIVE_BETA: f64 = 1e-12;

/// Symmetric tridiagonal operator with diagonal `alpha_0..alpha_{N-1}` and
/// off-diagonal `sqrt(beta_1)..sqrt(beta_{N-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiOperator {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    effective_size: usize,
}

impl JacobiOperator {
    /// Builds the `n x n` operator from recurrence coefficients. The operator is
    /// cut at the first `beta_k` that vanishes relative to `scale`.
    pub fn from_recurrence(rec: &RecurrenceCoeffs, n: usize, scale: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("Jacobi operator needs N >= 1".into()));
        }
        if rec.order() + 1 < n {
            return Err(Error::Domain(format!(
                "recurrence of order {} cannot fill an operator of size {n}",
                rec.order()
            )));
        }
        let diag = rec.alphas()[..n].to_vec();
        let mut offdiag = Vec::with_capacity(n - 1);
        let mut effective_size = n;
        for k in 1..n {
            let beta = rec.beta(k);
            if beta < -NEGATIVE_BETA * scale {
                return Err(Error::Inconsistent(format!("beta_{k} = {beta:e} is negative")));
            }
            if beta <= TRUNCATION * scale && effective_size == n {
                effective_size = k;
            }
            offdiag.push(beta.max(0.0).sqrt());
        }
        Ok(Self { diag, offdiag, effective_size })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Size of the leading block that carries the measure.
    pub fn effective_size(&self) -> usize {
        self.effective_size
    }

    /// Gershgorin bound on the spectrum of the effective block.
    pub fn spectral_bound(&self) -> f64 {
        let n = self.effective_size;
        let a = self.diag[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let b = self.offdiag[..n - 1].iter().fold(0.0f64, |m, v| m.max(*v));
        a + 2.0 * b
    }

    /// The operator multiplied by `factor` (the measure pushed forward by `y -> factor * y`).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|v| v * factor).collect(),
            offdiag: self.offdiag.iter().map(|v| v * factor).collect(),
            effective_size: self.effective_size,
        }
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.effective_size;
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * v[i + 1];
            }
            out[i] = acc;
        }
    }
}

/// Jacobi operator of the transition law `mu_{x,s,t}` truncated to `n` rows.
pub fn build_jacobi(params: &ProcessParams, coords: &KernelCoordinates, n: usize) -> Result<JacobiOperator> {
    let rec = RecurrenceCoeffs::raw(params, coords.x(), coords.s(), coords.t(), n.max(1));
    JacobiOperator::from_recurrence(&rec, n, coords.t() + params.tau() + 1.0)
}

/// Finitely supported probability measure with ascending nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from ascending nodes and positive weights summing to 1.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::Domain("measure needs matching, non-empty nodes and weights".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("measure nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Domain("measure weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("measure weights sum to {total}")));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(y_i)`.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&y, &w)| w * f(y)).sum()
    }

    /// `sum_i w_i y_i^k`.
    pub fn moment(&self, k: u32) -> f64 {
        self.expect(|y| y.powi(k as i32))
    }

    /// `sum_i w_i |y_i|^k`, the natural scale for comparing `moment(k)`.
    pub fn absolute_moment(&self, k: u32) -> f64 {
        self.expect(|y| y.abs().powi(k as i32))
    }

    /// The measure pushed forward by `y -> factor * y` (`factor > 0`).
    pub fn scaled(&self, factor: f64) -> Self {
        Self { nodes: self.nodes.iter().map(|y| y * factor).collect(), weights: self.weights.clone() }
    }

    /// Resolvent `sum_i w_i / (z - y_i)`.
    pub fn cauchy_transform(&self, z: Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&y, &w)| w / (z - y)).sum()
    }

    /// Smallest and largest node.
    pub fn support(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }
}

/// Golub-Welsch: nodes are the eigenvalues of the leading effective block,
/// weights the squared first eigenvector components.
///
/// Weights that underflow to zero are dropped and the rest renormalized.
pub fn gauss_measure(jacobi: &JacobiOperator) -> Result<DiscreteMeasure> {
    let n = jacobi.effective_size;
    let (nodes, weights) = eigen_first_components(&jacobi.diag[..n], &jacobi.offdiag[..n - 1])?;
    let (nodes, weights): (Vec<f64>, Vec<f64>) = nodes.into_iter().zip(weights).filter(|&(_, w)| w > 0.0).unzip();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || nodes.iter().any(|y| !y.is_finite()) {
        return Err(Error::Numerical {
            message: "Gauss quadrature produced no usable nodes".into(),
            dump: format!("{jacobi:?}"),
        });
    }
    let weights = weights.into_iter().map(|w| w / total).collect();
    let measure = DiscreteMeasure { nodes, weights };
    if measure.nodes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Numerical {
            message: "Gauss nodes are not strictly increasing".into(),
            dump: format!("{jacobi:?}"),
        });
    }
    Ok(measure)
}

/// `e0' J^k e0` computed as `(J^a e0) . (J^b e0)` with `a + b = k`.
pub fn oracle_moment(jacobi: &JacobiOperator, k: u32) -> f64 {
    let n = jacobi.effective_size;
    let half = (k / 2) as usize;
    let rest = k as usize - half;
    let mut powers = vec![vec![0.0; n]; rest + 1];
    powers[0][0] = 1.0;
    for j in 1..=rest {
        let (done, todo) = powers.split_at_mut(j);
        jacobi.apply(&done[j - 1], &mut todo[0]);
    }
    powers[half].iter().zip(&powers[rest]).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(theta: f64, tau: f64, q: f64) -> ProcessParams {
        ProcessParams::new(theta, tau, q).unwrap()
    }

    #[test]
    fn two_point_truncation() {
        let p = params(0.0, 0.0, -1.0);
        let c = KernelCoordinates::new(1.0, 1.0, 4.0).unwrap();
        let j = build_jacobi(&p, &c, 10).unwrap();
        assert_eq!(j.effective_size(), 2);
        let m = gauss_measure(&j).unwrap();
        assert_relative_eq!(m.nodes()[0], -2.0, epsilon = 1e-14);
        assert_relative_eq!(m.nodes()[1], 2.0, epsilon = 1e-14);
        assert_relative_eq!(m.weights()[0], 0.25, epsilon = 1e-14);
        assert_relative_eq!(m.weights()[1], 0.75, epsilon = 1e-14);
    }

    #[test]
    fn free_brownian_operator() {
        let j = build_jacobi(&params(0.0, 0.0, 0.0), &KernelCoordinates::marginal(1.0).unwrap(), 6).unwrap();
        assert!(j.diag().iter().all(|&a| a == 0.0));
        assert!(j.offdiag().iter().all(|&b| b == 1.0));
    }

    #[test]
    fn small_operator_entries() {
        let j = build_jacobi(&params(1.0, 2.0, 0.5), &KernelCoordinates::new(0.3, 1.0, 2.0).unwrap(), 3).unwrap();
        assert_eq!(j.diag().len(), 3);
        assert_relative_eq!(j.diag()[0], 0.3);
        assert_relative_eq!(j.diag()[1], 1.15);
        assert_relative_eq!(j.diag()[2], 1.575);
        assert_relative_eq!(j.offdiag()[0], 1.0);
        assert_relative_eq!(j.offdiag()[1], 5.25f64.sqrt());
    }

    #[test]
    fn single_row() {
        let j = build_jacobi(&params(1.0, 1.0, 0.3), &KernelCoordinates::new(0.7, 0.0, 1.0).unwrap(), 1).unwrap();
        let m = gauss_measure(&j).unwrap();
        assert_eq!(m.nodes(), &[0.7]);
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn marginal_low_moments() {
        let (theta, tau, q, t) = (0.7, 0.4, 0.3, 1.7);
        let j = build_jacobi(&params(theta, tau, q), &KernelCoordinates::marginal(t).unwrap(), 40).unwrap();
        let m = gauss_measure(&j).unwrap();
        assert_relative_eq!(m.moment(0), 1.0, epsilon = 1e-13);
        assert!(m.moment(1).abs() < 1e-12);
        assert_relative_eq!(m.moment(2), t, max_relative = 1e-12);
        assert_relative_eq!(m.moment(3), t * theta, max_relative = 1e-12);
        let m4 = (1.0 + q) * t * (t + tau) + t * (t + theta * theta);
        assert_relative_eq!(m.moment(4), m4, max_relative = 1e-12);
        assert_relative_eq!(oracle_moment(&j, 2), t, max_relative = 1e-15);
    }

    #[test]
    fn gauss_exactness_high_degree() {
        for &(theta, tau, q, n) in &[(0.0, 0.0, 1.0, 80), (1.2, 0.5, 0.9, 80), (-0.4, 1.0, -0.7, 40), (0.3, 2.0, 1.0, 80)] {
            let j = build_jacobi(&params(theta, tau, q), &KernelCoordinates::new(0.5, 0.5, 2.0).unwrap(), n).unwrap();
            let c = 1.0 / j.spectral_bound();
            let m = gauss_measure(&j).unwrap().scaled(c);
            let js = j.scaled(c);
            for k in 0..(2 * n as u32) {
                let scale = m.absolute_moment(k);
                let err = (m.moment(k) - oracle_moment(&js, k)).abs() / scale;
                assert!(err < 1e-10, "theta={theta} tau={tau} q={q} k={k}: {err:e}");
            }
        }
    }
}
