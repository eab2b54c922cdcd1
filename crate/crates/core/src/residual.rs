use serde::{Deserialize, Serialize};

/// Absolute residual of an identity together with the scale it is judged
/// against: the check passes when `residual <= tol * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub residual: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(residual: f64, scale: f64) -> Self {
        Self { residual, scale }
    }

    /// `|lhs - rhs|` on the scale `1 + |lhs|`.
    pub fn of(lhs: f64, rhs: f64) -> Self {
        Self::new((lhs - rhs).abs(), 1.0 + lhs.abs())
    }

    pub fn relative(&self) -> f64 {
        if self.residual == 0.0 {
            0.0
        } else {
            self.residual / self.scale
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol * self.scale
    }
}

/// Largest relative residual, `0` for an empty list; NaN propagates.
pub fn worst<'a>(items: impl IntoIterator<Item = &'a Residual>) -> f64 {
    items.into_iter().fold(0.0, |m: f64, r| {
        let v = r.relative();
        if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(v)
        }
    })
}
