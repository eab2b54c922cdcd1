//! Closed forms for the free (`q = 0`) transitions.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::Atom;
use crate::error::{domain, Error, Result};

/// Relative size below which the numerator counts as zero at a zero of `den`.
const REMOVABLE_TOL: f64 = 1e-9;

fn check_args(tau: f64, s: f64, t: f64) -> Result<()> {
    if !(tau >= 0.0) {
        return domain(format!("tau must be >= 0, got {tau}"));
    }
    if !(0.0 <= s && s < t) {
        return domain(format!("need 0 <= s < t, got s={s}, t={t}"));
    }
    Ok(())
}

/// `tau (y-x)^2 + theta (t-s)(y-x) + t x^2 + s y^2 - (s+t) x y + (t-s)^2`.
fn denominator<T>(theta: f64, tau: f64, x: f64, s: f64, t: f64, y: T) -> T
where
    T: Copy + std::ops::Add<f64, Output = T> + std::ops::Sub<f64, Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    let d = y - x;
    d * d * tau + d * (theta * (t - s)) + (y * y * s + y * (-(s + t) * x)) + (t * x * x + (t - s) * (t - s))
}

/// `(z - theta) sqrt(1 - 4(t + tau) / (z - theta)^2)`: the square root of
/// `(z - theta)^2 - 4(t + tau)` that behaves like `z` at infinity, with its
/// cut on the support.
fn exterior_root(theta: f64, tau: f64, t: f64, z: Complex64) -> Complex64 {
    let w = z - theta;
    w * (1.0 - 4.0 * (t + tau) / (w * w)).sqrt()
}

fn on_cut(theta: f64, tau: f64, t: f64, z: Complex64) -> bool {
    z.im == 0.0 && (z.re - theta).powi(2) <= 4.0 * (t + tau)
}

/// Cauchy-Stieltjes transform `int mu_{x,s,t}(dy) / (z - y)` of the free
/// transition, in rational-plus-root form:
///
/// `G = ((t+s+2tau)(z-x) + (t-s)(theta - x) - (t-s) R(z)) / (2 den(z))`,
/// with `R` the exterior root of `(z-theta)^2 - 4(t+tau)`.
pub fn free_cauchy_transform(theta: f64, tau: f64, x: f64, s: f64, t: f64, z: Complex64) -> Result<Complex64> {
    check_args(tau, s, t)?;
    if on_cut(theta, tau, t, z) {
        return domain(format!("z = {z} lies on the support"));
    }
    let den = denominator(theta, tau, x, s, t, z);
    let root = exterior_root(theta, tau, t, z);
    let numerator = (z - x) * (t + s + 2.0 * tau) + (t - s) * (theta - x) - root * (t - s);
    if den.norm() == 0.0 {
        return domain(format!("z = {z} is an atom of the transition"));
    }
    Ok(numerator / (den * 2.0))
}

/// The same transform from its continued fraction,
/// `G = 1 / (z - x - (t - s) / phi(z))`, `phi = (z - theta + R(z)) / 2`.
pub fn free_cauchy_transform_cf(theta: f64, tau: f64, x: f64, s: f64, t: f64, z: Complex64) -> Result<Complex64> {
    check_args(tau, s, t)?;
    if on_cut(theta, tau, t, z) {
        return domain(format!("z = {z} lies on the support"));
    }
    let phi = (z - theta + exterior_root(theta, tau, t, z)) * 0.5;
    let inv = z - x - (t - s) / phi;
    if inv.norm() == 0.0 {
        return domain(format!("z = {z} is an atom of the transition"));
    }
    Ok(1.0 / inv)
}

/// Density of the absolutely continuous part, zero off
/// `(y - theta)^2 < 4(t + tau)`.
pub fn free_density(theta: f64, tau: f64, x: f64, s: f64, t: f64, y: f64) -> Result<f64> {
    check_args(tau, s, t)?;
    let gap = 4.0 * (t + tau) - (y - theta).powi(2);
    if gap <= 0.0 {
        return Ok(0.0);
    }
    let den = denominator(theta, tau, x, s, t, y);
    if !(den > 0.0) {
        return Err(Error::Inconsistent(format!("free density denominator {den:e} at y = {y}")));
    }
    Ok((t - s) * gap.sqrt() / (2.0 * PI * den))
}

/// Atomic part of the free transition: the real zeros `z0` of `den` off
/// the support at which the numerator of [`free_cauchy_transform`] does not
/// vanish, each with the residue `numerator(z0) / (2 den'(z0))` as mass.
///
/// For the states reachable from the origin this gives the two known cases:
///
/// * `tau = 0`, `theta != 0`, `x = -s/theta`, `t < theta^2`: mass
///   `(1 - t/theta^2) / (1 - s/theta^2)` at `-t/theta`;
/// * `theta^2 > 4 tau > 0`, `x = y(s)`: mass `p(t)^+ / p(s)` at `y(t)`, with
///   `y(t) = -t (theta -+ r) / (2 tau)`, `r = sqrt(theta^2 - 4 tau)` and
///   `p(t) = 1 - t (|theta| - r) / (2 tau r)`.
///
/// Other starting points may carry an atom as well.
pub fn free_atoms(theta: f64, tau: f64, x: f64, s: f64, t: f64) -> Vec<Atom> {
    if check_args(tau, s, t).is_err() {
        return Vec::new();
    }
    // den(z) = a z^2 + b z + c
    let a = tau + s;
    let b = -2.0 * tau * x + theta * (t - s) - (s + t) * x;
    let c = (tau + t) * x * x - theta * (t - s) * x + (t - s) * (t - s);
    let roots = if a == 0.0 {
        if b == 0.0 {
            vec![]
        } else {
            vec![-c / b]
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc <= 0.0 {
            // a double zero is not a simple pole; complex zeros are off the real line
            vec![]
        } else {
            let big = -0.5 * (b + b.signum() * disc.sqrt());
            if big == 0.0 {
                vec![0.0]
            } else {
                vec![big / a, c / big]
            }
        }
    };
    let mut atoms: Vec<Atom> = roots
        .into_iter()
        .filter(|&z| (z - theta).powi(2) > 4.0 * (t + tau))
        .filter_map(|z| {
            let w = z - theta;
            let root = w * (1.0 - 4.0 * (t + tau) / (w * w)).sqrt();
            let terms = [(t + s + 2.0 * tau) * (z - x), (t - s) * (theta - x), -(t - s) * root];
            let numerator: f64 = terms.iter().sum();
            let size: f64 = terms.iter().map(|v| v.abs()).sum();
            // a zero shared with the numerator lies on the other sheet
            if numerator.abs() <= REMOVABLE_TOL * size {
                return None;
            }
            let mass = numerator / (2.0 * (2.0 * a * z + b));
            (mass > 0.0).then_some(Atom { location: z, mass })
        })
        .collect();
    atoms.sort_by(|p, q| p.location.total_cmp(&q.location));
    atoms
}

/// R-series of the free marginal law at time `t`,
/// `t (1 - z theta - sqrt((1 - z theta)^2 - 4 z^2 tau)) / (2 z tau)`,
/// evaluated in the equivalent form
/// `2 t z / (1 - z theta + sqrt((1 - z theta)^2 - 4 z^2 tau))`,
/// which is regular at `z = 0` (where it vanishes) and also covers `tau = 0`.
pub fn free_r_transform(theta: f64, tau: f64, t: f64, z: Complex64) -> Result<Complex64> {
    if !(tau >= 0.0) || !(t > 0.0) {
        return domain(format!("need tau >= 0 and t > 0, got tau={tau}, t={t}"));
    }
    let lin = 1.0 - z * theta;
    let root = (lin * lin - z * z * (4.0 * tau)).sqrt();
    let den = lin + root;
    if den.norm() == 0.0 {
        return domain(format!("z = {z} is outside the domain of the R-series"));
    }
    Ok(z * (2.0 * t) / den)
}
