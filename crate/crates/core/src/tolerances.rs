//! Pinned tolerances shared by the verification battery, the `verify`
//! subcommand and the acceptance suite.
//!
//! A residual passes when `residual <= TOL * scale`, with the scale chosen by
//! each checker (see the individual check functions).

/// Polynomial identities evaluated pointwise (convolution and BMS forms).
pub const ALGEBRAIC_IDENTITY: f64 = 1e-9;

/// Generating-function product identity.
pub const GENERATING_PRODUCT: f64 = 1e-8;

/// Quadrature marginal moments against their closed forms (relative).
pub const MARGINAL_MOMENTS: f64 = 1e-9;

/// Gauss quadrature moments against `e0' J^k e0` (relative).
pub const GAUSS_EXACTNESS: f64 = 1e-10;

/// Chapman-Kolmogorov residual relative to `||Q_n||`.
pub const CHAPMAN_KOLMOGOROV: f64 = 1e-8;

/// Martingale polynomials, relative to `1 + |p_n(x, s)|`.
pub const MARTINGALE: f64 = 1e-8;

/// Two-sided moment identities (harness and quadratic variance), relative.
pub const TWO_SIDED_MOMENTS: f64 = 1e-7;

/// Algebraic invariants of the quadratic-variance coefficients.
pub const QV_COEFFICIENTS: f64 = 1e-12;

/// Increment moments through nested quadrature, relative to `1 + |closed form|`.
pub const INCREMENT_MOMENTS: f64 = 1e-8;

/// Lower bound accepted for the increment Hankel determinant.
pub const HANKEL_FLOOR: f64 = -1e-10;

/// Binomial chain identities computed by exhaustive enumeration.
pub const BINOMIAL_EXACT: f64 = 1e-12;

/// Closed-form q-Brownian density: normalization and moments.
pub const QBROWNIAN_DENSITY: f64 = 1e-6;

/// Free case: closed-form Cauchy transform against the quadrature resolvent.
pub const FREE_RESOLVENT: f64 = 1e-8;

/// Free case: Stieltjes inversion against the density (sup norm).
pub const FREE_INVERSION: f64 = 1e-4;

/// Free case: total mass of density plus atoms.
pub const FREE_TOTAL_MASS: f64 = 1e-8;

/// Free case: `G(R(z) + 1/z) = z`.
pub const FREE_R_SERIES: f64 = 1e-8;

/// Empirical characteristic function against the classical closed forms.
pub const CLASSICAL_ECF: f64 = 0.02;

/// Added to the Chapman-Kolmogorov scale as `ROUNDING_FLOOR * S^n`, where `S`
/// bounds the support. Needed when `||Q_n||` vanishes (finite-support kernels).
pub const ROUNDING_FLOOR: f64 = 1e-6;
