//! Transition kernels `mu_{x,s,t}` and the closed forms available in the
//! special cases.
//!
//! [`kernel`] is the only constructor used for sampling: Gauss quadrature in
//! general and an exact two-point law at `q = -1`. The closed forms (q-Brownian,
//! free, classical) exist to cross-check it.

mod classical;
mod free;
mod qbrownian;

pub use classical::{classical_char_fn, classify_classical, ClassicalLawType};
pub use free::{free_atoms, free_cauchy_transform, free_cauchy_transform_cf, free_density, free_r_transform};
pub use qbrownian::{qbrownian_atoms, qbrownian_density, qbrownian_marginal_density};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qcalc::{KernelCoordinates, ProcessParams};
use crate::quadrature::{build_jacobi, gauss_measure, DiscreteMeasure};

/// Default truncation of the infinite products.
pub const DEFAULT_PRODUCT_TERMS: usize = 200;

/// Grid size used to integrate closed-form densities.
const DENSITY_GRID: usize = 4000;

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Law supported on two points, the form every kernel takes at `q = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointKernel {
    pub lower: f64,
    pub upper: f64,
    pub weight_lower: f64,
    pub weight_upper: f64,
}

impl TwoPointKernel {
    /// Spectral measure of `[[a0, b], [b, a1]]` with `b^2 = beta1 > 0`.
    fn from_jacobi_block(a0: f64, a1: f64, beta1: f64) -> Self {
        let mid = 0.5 * (a0 + a1);
        let half_gap = 0.5 * (a0 - a1);
        let radius = half_gap.hypot(beta1.sqrt());
        let weight_upper = 0.5 * (1.0 + half_gap / radius);
        Self {
            lower: mid - radius,
            upper: mid + radius,
            weight_lower: 1.0 - weight_upper,
            weight_upper,
        }
    }

    pub fn to_measure(&self) -> DiscreteMeasure {
        let (nodes, weights): (Vec<f64>, Vec<f64>) = [(self.lower, self.weight_lower), (self.upper, self.weight_upper)]
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .unzip();
        let total: f64 = weights.iter().sum();
        DiscreteMeasure::new(nodes, weights.into_iter().map(|w| w / total).collect())
            .expect("two distinct nodes with positive weights")
    }
}

/// Closed-form transition laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedFormKernel {
    /// q-Brownian transition for `-1 < q < 1`.
    QBrownian { q: f64, x: f64, s: f64, t: f64, product_terms: usize },
    /// Normal law, the q-Brownian transition at `q = 1`.
    Gaussian { mean: f64, variance: f64 },
    /// Free (`q = 0`) transition: density plus at most one atom.
    Free { theta: f64, tau: f64, x: f64, s: f64, t: f64 },
}

impl ClosedFormKernel {
    /// Density of the absolutely continuous part.
    pub fn density(&self, y: f64) -> Result<f64> {
        match *self {
            Self::QBrownian { q, x, s, t, product_terms } => qbrownian_density(q, x, s, t, y, product_terms),
            Self::Gaussian { mean, variance } => {
                Ok((-(y - mean).powi(2) / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt())
            }
            Self::Free { theta, tau, x, s, t } => free_density(theta, tau, x, s, t, y),
        }
    }

    pub fn atoms(&self) -> Vec<Atom> {
        match *self {
            Self::Free { theta, tau, x, s, t } => free_atoms(theta, tau, x, s, t),
            _ => Vec::new(),
        }
    }

    /// Closure of the support of the continuous part.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::QBrownian { q, t, .. } => {
                let edge = 2.0 * (t / (1.0 - q)).sqrt();
                (-edge, edge)
            }
            Self::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Free { theta, tau, t, .. } => {
                let half = 2.0 * (t + tau).sqrt();
                (theta - half, theta + half)
            }
        }
    }

    /// `int f(y) density(y) dy + sum_atoms mass f(location)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let atoms: f64 = self.atoms().iter().map(|a| a.mass * f(a.location)).sum();
        let continuous = match *self {
            Self::Gaussian { mean, variance } => {
                let sd = variance.sqrt();
                integrate_bounded(|y| Ok(f(y) * self.density(y)?), mean - 40.0 * sd, mean + 40.0 * sd)?
            }
            _ => {
                let (lo, hi) = self.support();
                integrate_bounded(|y| Ok(f(y) * self.density(y)?), lo, hi)?
            }
        };
        Ok(continuous + atoms)
    }

    pub fn total_mass(&self) -> Result<f64> {
        self.expect(|_| 1.0)
    }

    pub fn moment(&self, k: u32) -> Result<f64> {
        if let Self::Gaussian { mean, variance } = *self {
            let mut prev = 1.0;
            let mut cur = mean;
            if k == 0 {
                return Ok(1.0);
            }
            for j in 2..=k {
                let next = mean * cur + (j - 1) as f64 * variance * prev;
                prev = cur;
                cur = next;
            }
            return Ok(cur);
        }
        self.expect(|y| y.powi(k as i32))
    }
}

/// Integral over `[lo, hi]` by the substitution `y = c + h cos(phi)` and the
/// midpoint rule in `phi`; spectrally accurate for square-root edge behaviour.
fn integrate_bounded(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<f64> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let step = std::f64::consts::PI / DENSITY_GRID as f64;
    let mut total = 0.0;
    for j in 0..DENSITY_GRID {
        let phi = (j as f64 + 0.5) * step;
        total += f(c + h * phi.cos())? * h * phi.sin();
    }
    Ok(total * step)
}

/// A transition law `mu_{x,s,t}` in one of its representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TransitionKernel {
    Quadrature(DiscreteMeasure),
    TwoPoint(TwoPointKernel),
    ClosedForm(ClosedFormKernel),
}

impl TransitionKernel {
    /// The discrete measure behind a sampling kernel.
    pub fn to_measure(&self) -> Option<DiscreteMeasure> {
        match self {
            Self::Quadrature(m) => Some(m.clone()),
            Self::TwoPoint(k) => Some(k.to_measure()),
            Self::ClosedForm(_) => None,
        }
    }

    pub fn moment(&self, k: u32) -> Result<f64> {
        match self {
            Self::Quadrature(m) => Ok(m.moment(k)),
            Self::TwoPoint(tp) => Ok(tp.to_measure().moment(k)),
            Self::ClosedForm(c) => c.moment(k),
        }
    }

    pub fn total_mass(&self) -> Result<f64> {
        match self {
            Self::Quadrature(m) => Ok(m.weights().iter().sum()),
            Self::TwoPoint(tp) => Ok(tp.weight_lower + tp.weight_upper),
            Self::ClosedForm(c) => c.total_mass(),
        }
    }
}

/// Sampling kernel `mu_{x,s,t}`: two-point at `q = -1`, otherwise the
/// `nodes`-point Gauss quadrature of its Jacobi operator.
pub fn kernel(params: &ProcessParams, coords: &KernelCoordinates, nodes: usize) -> Result<TransitionKernel> {
    if params.is_two_point() {
        let x = coords.x();
        let a1 = params.theta() - x;
        return Ok(TransitionKernel::TwoPoint(TwoPointKernel::from_jacobi_block(x, a1, coords.t() - coords.s())));
    }
    Ok(TransitionKernel::Quadrature(gauss_measure(&build_jacobi(params, coords, nodes)?)?))
}

/// Discrete measure of [`kernel`], the form used by samplers and checks.
pub fn kernel_measure(params: &ProcessParams, coords: &KernelCoordinates, nodes: usize) -> Result<DiscreteMeasure> {
    Ok(kernel(params, coords, nodes)?.to_measure().expect("sampling kernels are discrete"))
}
