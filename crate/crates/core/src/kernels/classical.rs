//! The five Lévy laws of the `q = 1` family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Relative tolerance for the boundary `theta^2 = 4 tau`.
const GAMMA_BOUNDARY_TOL: f64 = 1e-12;

/// Which classical law a `(theta, tau)` pair gives at `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassicalLawType {
    Wiener,
    PoissonType,
    PascalType,
    GammaType,
    MeixnerType,
}

impl ClassicalLawType {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Wiener => "wiener",
            Self::PoissonType => "poisson",
            Self::PascalType => "pascal",
            Self::GammaType => "gamma",
            Self::MeixnerType => "meixner",
        }
    }
}

/// Classifies `(theta, tau)`; `theta^2 = 4 tau` is matched to relative
/// precision 1e-12.
pub fn classify_classical(theta: f64, tau: f64) -> ClassicalLawType {
    let disc = theta * theta - 4.0 * tau;
    if tau == 0.0 {
        if theta == 0.0 {
            ClassicalLawType::Wiener
        } else {
            ClassicalLawType::PoissonType
        }
    } else if disc.abs() <= GAMMA_BOUNDARY_TOL * theta * theta {
        ClassicalLawType::GammaType
    } else if disc > 0.0 {
        ClassicalLawType::PascalType
    } else {
        ClassicalLawType::MeixnerType
    }
}

/// Characteristic function `E exp(i u X_t)` of the marginal law.
///
/// Wiener, Poisson and Gamma laws use the textbook forms. For the Pascal and
/// Meixner laws the exponentials and the `sinh` term carry the sign that
/// makes the law centred with variance `t` and third moment `theta t`.
pub fn classical_char_fn(law: ClassicalLawType, theta: f64, tau: f64, t: f64, u: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return domain(format!("need t > 0, got {t}"));
    }
    if !(tau >= 0.0) {
        return domain(format!("need tau >= 0, got {tau}"));
    }
    let actual = classify_classical(theta, tau);
    if actual != law {
        return domain(format!("(theta={theta}, tau={tau}) is a {} law, not {}", actual.name(), law.name()));
    }
    let i = Complex64::i();
    let log = match law {
        ClassicalLawType::Wiener => Complex64::new(-t * u * u / 2.0, 0.0),
        ClassicalLawType::PoissonType => {
            ((i * (u * theta)).exp() - 1.0) * (t / (theta * theta)) - i * (u * t / theta)
        }
        ClassicalLawType::PascalType => {
            let r = (theta * theta - 4.0 * tau).sqrt();
            let lower = 0.5 * (theta - r);
            let upper = 0.5 * (theta + r);
            let p = upper / r;
            // p e^{iu lower} + (1-p) e^{iu upper}, factored about its dominant
            // term so the logarithm stays on the principal branch
            let base = if p > 0.0 {
                i * (u * lower) + (p + (1.0 - p) * (i * (u * r)).exp()).ln()
            } else {
                i * (u * upper) + ((1.0 - p) + p * (-i * (u * r)).exp()).ln()
            };
            base * (-t / tau)
        }
        ClassicalLawType::GammaType => {
            -i * (2.0 * u * t / theta) + (1.0 - i * (u * theta / 2.0)).ln() * (-4.0 * t / (theta * theta))
        }
        ClassicalLawType::MeixnerType => {
            let a = (4.0 * tau - theta * theta).sqrt();
            let half = a * u / 2.0;
            let inner = Complex64::new(half.cosh(), -(theta / a) * half.sinh());
            -i * (u * theta * t / (2.0 * tau)) + inner.ln() * (-t / tau)
        }
    };
    Ok(log.exp())
}
