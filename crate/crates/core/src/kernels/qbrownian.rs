//! Closed forms for the q-Brownian motion (`theta = tau = 0`).

use std::f64::consts::PI;

use super::Atom;
use crate::error::{domain, Error, Result};

fn check_q_open(q: f64) -> Result<()> {
    if q == 1.0 || q == -1.0 {
        return Err(Error::Unsupported(format!("the product density needs -1 < q < 1, got {q}")));
    }
    if !(-1.0 < q && q < 1.0) {
        return domain(format!("q must lie in (-1, 1), got {q}"));
    }
    Ok(())
}

/// Transition density from `x` at time `s` to `y` at time `t`, `-1 < q < 1`,
/// as an infinite product truncated after `product_terms` factors.
///
/// Zero outside `(1 - q) y^2 < 4t`.
pub fn qbrownian_density(q: f64, x: f64, s: f64, t: f64, y: f64, product_terms: usize) -> Result<f64> {
    check_q_open(q)?;
    if !(0.0 <= s && s < t) {
        return domain(format!("need 0 <= s < t, got s={s}, t={t}"));
    }
    let edge = 4.0 * t - (1.0 - q) * y * y;
    if edge <= 0.0 {
        return Ok(0.0);
    }
    // The k = 0 numerator carries the factor 4t - (1-q)y^2, which cancels
    // against the prefactor 1 / sqrt(4t - (1-q)y^2).
    let mut value = (1.0 - q).sqrt() * edge.sqrt() / (2.0 * PI);
    let mut qk: f64 = 1.0; // q^k
    for k in 0..product_terms {
        let q2k = qk * qk;
        let spread = if k == 0 { 1.0 } else { t * (1.0 + qk).powi(2) - (1.0 - q) * y * y * qk };
        let numerator = (t - s * qk) * (1.0 - qk * q) * spread;
        let denominator = (t - s * q2k).powi(2) - (1.0 - q) * qk * (t + s * q2k) * x * y
            + (1.0 - q) * (s * y * y + t * x * x) * q2k;
        value *= numerator / denominator;
        qk *= q;
    }
    Ok(value)
}

/// Density of the marginal law at time `t`: the product form for `|q| < 1`
/// and the normal density at `q = 1`. At `q = -1` the law is discrete, see
/// [`qbrownian_atoms`].
pub fn qbrownian_marginal_density(q: f64, t: f64, y: f64, product_terms: usize) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("need t > 0, got {t}"));
    }
    if q == 1.0 {
        return Ok((-y * y / (2.0 * t)).exp() / (2.0 * PI * t).sqrt());
    }
    if q == -1.0 {
        return Err(Error::Unsupported("the law at q = -1 is discrete".into()));
    }
    check_q_open(q)?;
    let edge = 4.0 * t - (1.0 - q) * y * y;
    if edge <= 0.0 {
        return Ok(0.0);
    }
    let mut value = (1.0 - q).sqrt() * edge.sqrt() / (2.0 * PI * t);
    let mut qk: f64 = 1.0;
    for k in 0..product_terms {
        let spread = if k == 0 { 1.0 } else { (1.0 + qk).powi(2) - (1.0 - q) * y * y / t * qk };
        value *= spread * (1.0 - qk * q);
        qk *= q;
    }
    Ok(value)
}

/// The two atoms of the `q = -1` transition: from `x` at `s > 0` the law
/// puts `(1 +- sqrt(s/t)) / 2` on `+-x sqrt(t/s)`; with `s = 0` (and `x = 0`)
/// it is the marginal `(delta_{-sqrt t} + delta_{sqrt t}) / 2`.
///
/// The formula describes the reachable states `x^2 = s`.
pub fn qbrownian_atoms(x: f64, s: f64, t: f64) -> Result<Vec<Atom>> {
    if !(0.0 <= s && s < t) {
        return domain(format!("need 0 <= s < t, got s={s}, t={t}"));
    }
    if s == 0.0 {
        let r = t.sqrt();
        return Ok(vec![Atom { location: -r, mass: 0.5 }, Atom { location: r, mass: 0.5 }]);
    }
    let ratio = (s / t).sqrt();
    let far = x / ratio;
    let mut atoms = vec![
        Atom { location: far, mass: 0.5 * (1.0 + ratio) },
        Atom { location: -far, mass: 0.5 * (1.0 - ratio) },
    ];
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    Ok(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn semicircle_at_q_zero() {
        for &y in &[-1.9f64, -0.3, 0.0, 1.2] {
            let t: f64 = 1.0;
            let expected = (4.0 * t - y * y).sqrt() / (2.0 * PI * t);
            assert_relative_eq!(qbrownian_density(0.0, 0.0, 0.0, t, y, 200).unwrap(), expected, max_relative = 1e-14);
            assert_relative_eq!(qbrownian_marginal_density(0.0, t, y, 200).unwrap(), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn outside_support_is_zero() {
        assert_eq!(qbrownian_density(0.5, 0.1, 0.5, 1.0, 3.0, 200).unwrap(), 0.0);
        assert_eq!(qbrownian_marginal_density(-0.5, 1.0, 2.0, 200).unwrap(), 0.0);
    }

    #[test]
    fn unsupported_endpoints() {
        assert!(matches!(qbrownian_density(1.0, 0.0, 0.0, 1.0, 0.0, 10), Err(Error::Unsupported(_))));
        assert!(matches!(qbrownian_density(-1.0, 0.0, 0.0, 1.0, 0.0, 10), Err(Error::Unsupported(_))));
        assert!(matches!(qbrownian_marginal_density(-1.0, 1.0, 0.0, 10), Err(Error::Unsupported(_))));
        assert_relative_eq!(qbrownian_marginal_density(1.0, 2.0, 0.5, 10).unwrap(), (-0.0625f64).exp() / (4.0 * PI).sqrt());
    }

    #[test]
    fn transition_from_origin_is_marginal() {
        for &q in &[-0.7, -0.2, 0.4, 0.9] {
            for &y in &[-1.1, 0.0, 0.4, 1.3] {
                let a = qbrownian_density(q, 0.0, 0.0, 1.3, y, 200).unwrap();
                let b = qbrownian_marginal_density(q, 1.3, y, 200).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn minus_one_atoms() {
        let a = qbrownian_atoms(1.0, 1.0, 4.0).unwrap();
        assert_eq!(a, vec![Atom { location: -2.0, mass: 0.25 }, Atom { location: 2.0, mass: 0.75 }]);
        let m = qbrownian_atoms(0.0, 0.0, 4.0).unwrap();
        assert_eq!(m[1], Atom { location: 2.0, mass: 0.5 });
    }
}
