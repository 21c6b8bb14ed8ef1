//! The monotonicity kernel `delta`, its inverse, the integrand `h`, the
//! sharp threshold `alpha*(i, beta)`, and the parameter classifier.
//!
//! ```text
//! delta(t) = (e^t (t - 1) + 1) / (e^t - 1)^2
//! ```
//!
//! is a strictly decreasing bijection of `(0, inf)` onto `(0, 1/2)`. For
//! derivative order `i >= 1`, exponent `alpha` and shift `beta`, the function
//!
//! ```text
//! h(t) = t/(1 - e^{-t}) + (beta - 1) t + alpha - i - 1
//! ```
//!
//! controls both the monotonicity of `x^alpha |psi^(i)(x + beta)|` and the
//! complete monotonicity of `alpha |psi^(i)(x+beta)| - x |psi^(i+1)(x+beta)|`:
//! `h' = beta - delta`, so for `0 < beta < 1/2` the unique minimum of `h`
//! sits at `t0 = delta^{-1}(beta)`, and demanding that minimum to be
//! nonnegative yields the threshold
//!
//! ```text
//! alpha*(i, beta) = i + 1 - [e^s/(e^s - 1) + beta - 1] s,   s = delta^{-1}(beta),
//! ```
//!
//! with the bracket quantity equal to `s^2 e^s / (e^s - 1)^2` and confined to
//! `(0, 1)`, so that `i < alpha* < i + 1` always.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Coefficients of `S1(t) = sum_j C_j t^{2j-1}`, i.e. `C_j = B_{2j}/(2j-1)!`.
/// Used for the small-argument expansion `delta = 1/2 - S1`. Verified against
/// the exact Bernoulli table in the tests.
const DELTA_SERIES: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 180.0,
    1.0 / 5040.0,
    -1.0 / 151_200.0,
    1.0 / 4_790_016.0,
    -691.0 / 108_972_864_000.0,
    1.0 / 5_337_446_400.0,
];

/// Below this argument `delta` switches to the series expansion; the closed
/// form loses digits to cancellation as `t^2` terms emerge from O(t) data.
const DELTA_SMALL_T: f64 = 1e-2;

/// Residual tolerance contract of [`delta_inv`]: `|delta(s) - beta| <= 1e-13`.
pub const DELTA_INV_TOL: f64 = 1e-13;

/// Maximum number of derivative orders accepted by the classifier machinery.
const MAX_I: u32 = 1_000_000;

/// Parameter triple `(i, alpha, beta)` shared by all kernel-level statements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    /// Polygamma order `i >= 1`.
    pub order: u32,
    /// Power/weight exponent `alpha`.
    pub alpha: f64,
    /// Argument shift `beta >= 0`.
    pub beta: f64,
}

impl KernelParams {
    pub fn new(order: u32, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { order, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 || self.order > MAX_I {
            return Err(domain(format!("order i = {} must satisfy 1 <= i <= {MAX_I}", self.order)));
        }
        if !self.alpha.is_finite() {
            return Err(domain(format!("alpha = {} must be finite", self.alpha)));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(domain(format!("beta = {} must be finite and >= 0", self.beta)));
        }
        Ok(())
    }
}

/// One sample of the sharpness curve: `s = delta^{-1}(beta)` and the
/// threshold exponent for the associated order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub beta: f64,
    pub s: f64,
    pub alpha_star: f64,
}

/// What the theorems say about a parameter triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// `x^alpha |psi^(i)(x+beta)|` strictly increasing, and this is sharp.
    IncreasingIff,
    /// Strictly decreasing, sharp.
    DecreasingIff,
    /// `alpha |psi^(i)| - x |psi^(i+1)|` completely monotonic, sharp.
    CompletelyMonotonicIff,
    /// Its negative completely monotonic, sharp.
    NegativeCompletelyMonotonicIff,
    /// Increasing and completely monotonic by the threshold criterion;
    /// necessity is not asserted.
    SufficientOnly,
    /// No statement covers the triple.
    OutsideKnownConditions,
}

/// Classifier output: which verdicts hold and the rule that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdicts: Vec<Verdict>,
    pub rule: String,
}

impl Classification {
    /// True when the classifier committed to at least one sharp or
    /// sufficient verdict.
    pub fn is_definite(&self) -> bool {
        !self.verdicts.contains(&Verdict::OutsideKnownConditions)
    }
}

fn check_positive_t(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(domain(format!("t = {t} must be positive and finite")));
    }
    Ok(())
}

fn check_beta_open(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(domain(format!("beta = {beta} must lie strictly inside (0, 1/2)")));
    }
    Ok(())
}

/// `delta(t) = (e^t (t-1) + 1)/(e^t - 1)^2`, strictly decreasing from
/// `(0, inf)` onto `(0, 1/2)`.
///
/// Three evaluation regimes keep full accuracy: a Bernoulli expansion below
/// `t = 0.01` (numerator and denominator are both `O(t^2)` there), an
/// `expm1`-based arrangement up to `t = 1`, and a scaled form in `e^{-t}`
/// beyond, which avoids overflow for large `t`.
pub fn delta(t: f64) -> Result<f64> {
    check_positive_t(t)?;
    if t < DELTA_SMALL_T {
        let t2 = t * t;
        let mut s1 = 0.0;
        for c in DELTA_SERIES.iter().rev() {
            s1 = s1 * t2 + c;
        }
        Ok(0.5 - t * s1)
    } else if t < 1.0 {
        let em = t.exp_m1();
        Ok((em * (t - 1.0) + t) / (em * em))
    } else {
        let em = (-t).exp_m1(); // -(1 - e^{-t})
        Ok(((t - 1.0) * (-t).exp() + (-2.0 * t).exp()) / (em * em))
    }
}

/// Analytic `delta'(t)`, used for the Newton polish in [`delta_inv`].
pub fn delta_deriv(t: f64) -> Result<f64> {
    check_positive_t(t)?;
    if t < 0.02 {
        // From the series: delta' = -1/6 + t^2/60 - t^4/1008 + ...
        let t2 = t * t;
        Ok(-1.0 / 6.0 + t2 / 60.0 - t2 * t2 / 1008.0)
    } else {
        let em = (-t).exp_m1();
        let num = (2.0 - t) * (-t).exp() - (t + 2.0) * (-2.0 * t).exp();
        Ok(num / (-em * em * em))
    }
}

/// Inverse of [`delta`] on `(0, 1/2)`: returns `s` with
/// `|delta(s) - beta| <= 1e-13`.
///
/// Geometric bracket expansion from the seed `s0 = 6 (1/2 - beta)` (the
/// small-argument expansion `delta = 1/2 - t/6 + O(t^3)`), bisection, then a
/// Newton polish that usually lands within an ulp.
pub fn delta_inv(beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(domain(format!("beta = {beta} must be finite")));
    }
    check_beta_open(beta)?;

    let seed = (6.0 * (0.5 - beta)).clamp(1e-15, 40.0);
    let mut lo = seed;
    let mut expansions = 0;
    while delta(lo)? < beta {
        lo *= 0.5;
        expansions += 1;
        if expansions > 1100 {
            return Err(Error::Accuracy {
                message: format!("failed to bracket delta_inv({beta}) from below"),
                partial: lo,
                error_estimate: f64::INFINITY,
            });
        }
    }
    let mut hi = seed.max(lo * 2.0);
    while delta(hi)? >= beta {
        hi *= 2.0;
        if hi > 2048.0 {
            return Err(Error::Accuracy {
                message: format!("failed to bracket delta_inv({beta}) from above"),
                partial: hi,
                error_estimate: f64::INFINITY,
            });
        }
    }

    // delta is decreasing: delta(lo) >= beta > delta(hi).
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if delta(mid)? >= beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut s = 0.5 * (lo + hi);
    let mut best = s;
    let mut best_res = (delta(s)? - beta).abs();
    for _ in 0..4 {
        let r = delta(s)? - beta;
        let d = delta_deriv(s)?;
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = (s - r / d).clamp(0.25 * lo, 4.0 * hi.max(lo));
        if !next.is_finite() || next <= 0.0 {
            break;
        }
        s = next;
        let res = (delta(s)? - beta).abs();
        if res < best_res {
            best_res = res;
            best = s;
        }
    }

    if best_res <= DELTA_INV_TOL {
        Ok(best)
    } else {
        Err(Error::Accuracy {
            message: format!("delta_inv({beta}) residual above tolerance"),
            partial: best,
            error_estimate: best_res,
        })
    }
}

/// `h(t) = t/(1 - e^{-t}) + (beta - 1) t + alpha - i - 1`.
///
/// Evaluated through the regrouping `h = beta t + t/(e^t - 1) + alpha - i - 1`
/// (with `t/expm1(t)` for the middle factor): the raw form absorbs the
/// exponentially small remainder into the linear terms once `t` is large,
/// while here nothing cancels; as `t -> 0+` the middle factor tends to 1.
pub fn h(params: &KernelParams, t: f64) -> Result<f64> {
    params.validate()?;
    check_positive_t(t)?;
    let offset = params.alpha - params.order as f64 - 1.0;
    Ok(params.beta * t + t / t.exp_m1() + offset)
}

/// `h'(t) = beta - delta(t)`.
pub fn h_prime(params: &KernelParams, t: f64) -> Result<f64> {
    params.validate()?;
    Ok(params.beta - delta(t)?)
}

/// Location and value of the unique interior minimum of `h`, which exists
/// exactly when `0 < beta < 1/2`; the minimizer is `t0 = delta^{-1}(beta)`.
pub fn h_min(params: &KernelParams) -> Result<(f64, f64)> {
    params.validate()?;
    check_beta_open(params.beta)?;
    let s = delta_inv(params.beta)?;
    let value = bracket_at(s, params.beta) + params.alpha - params.order as f64 - 1.0;
    Ok((s, value))
}

/// `[e^s/(e^s - 1) + beta - 1] s`, regrouped as `beta s + s/(e^s - 1)` so
/// that neither factor cancels; tends to 1 as `s -> 0+` and to 0 along the
/// threshold curve as `beta -> 0+`.
fn bracket_at(s: f64, beta: f64) -> f64 {
    beta * s + s / s.exp_m1()
}

/// The bracket quantity `[e^s/(e^s-1) + beta - 1] s` with
/// `s = delta^{-1}(beta)`; confined to `(0, 1)` on the whole domain.
pub fn bracket_value(beta: f64) -> Result<f64> {
    check_beta_open(beta)?;
    Ok(bracket_at(delta_inv(beta)?, beta))
}

/// The algebraically equal form `s^2 e^s / (e^s - 1)^2` of
/// [`bracket_value`], computed through an independent arrangement; the two
/// routes must agree to ~1e-12 and are compared in the verification suites.
pub fn bracket_value_alt(beta: f64) -> Result<f64> {
    check_beta_open(beta)?;
    let s = delta_inv(beta)?;
    let w = s / (-(-s).exp_m1());
    Ok((-s).exp() * w * w)
}

/// Sharp sufficiency threshold
/// `alpha*(i, beta) = i + 1 - [e^s/(e^s-1) + beta - 1] s`.
///
/// Tends to `i + 1` as `beta -> 0+` and to `i` as `beta -> 1/2-`, strictly
/// decreasing in between.
pub fn alpha_star(order: u32, beta: f64) -> Result<f64> {
    if order < 1 {
        return Err(domain(format!("order i = {order} must be >= 1")));
    }
    Ok(order as f64 + 1.0 - bracket_value(beta)?)
}

/// One sample of the threshold curve.
pub fn threshold_point(order: u32, beta: f64) -> Result<ThresholdPoint> {
    if order < 1 {
        return Err(domain(format!("order i = {order} must be >= 1")));
    }
    let s = delta_inv(beta)?;
    Ok(ThresholdPoint {
        beta,
        s,
        alpha_star: order as f64 + 1.0 - bracket_at(s, beta),
    })
}

/// Decision table over `(i, alpha, beta)`.
///
/// Only statements actually established are reported: the regime
/// `0 < beta < 1/2` with `alpha >= alpha*` carries a sufficiency verdict and
/// nothing else, and gaps are reported as [`Verdict::OutsideKnownConditions`]
/// rather than guessed.
pub fn classify(params: &KernelParams) -> Result<Classification> {
    params.validate()?;
    let i = params.order as f64;
    let (verdicts, rule) = if params.beta == 0.0 {
        if params.alpha >= i + 1.0 {
            (
                vec![Verdict::IncreasingIff, Verdict::CompletelyMonotonicIff],
                format!(
                    "beta = 0, alpha >= i+1 = {}: x^alpha|psi^(i)(x)| strictly increasing and \
                     alpha|psi^(i)(x)| - x|psi^(i+1)(x)| completely monotonic (sharp)",
                    i + 1.0
                ),
            )
        } else if params.alpha <= i {
            (
                vec![Verdict::DecreasingIff, Verdict::NegativeCompletelyMonotonicIff],
                format!(
                    "beta = 0, alpha <= i = {i}: x^alpha|psi^(i)(x)| strictly decreasing and \
                     x|psi^(i+1)(x)| - alpha|psi^(i)(x)| completely monotonic (sharp)"
                ),
            )
        } else {
            (
                vec![Verdict::OutsideKnownConditions],
                format!(
                    "beta = 0, i < alpha < i+1: neither monotone direction holds \
                     (sign scans exhibit both signs); no complete-monotonicity verdict"
                ),
            )
        }
    } else if params.beta >= 0.5 {
        if params.alpha >= i {
            (
                vec![Verdict::IncreasingIff, Verdict::CompletelyMonotonicIff],
                format!(
                    "beta >= 1/2, alpha >= i = {i}: strictly increasing and completely \
                     monotonic (sharp)"
                ),
            )
        } else {
            (
                vec![Verdict::OutsideKnownConditions],
                format!(
                    "beta >= 1/2, alpha < i = {i}: fails the necessary condition alpha >= i; \
                     no positive verdict"
                ),
            )
        }
    } else {
        let a_star = alpha_star(params.order, params.beta)?;
        if params.alpha >= a_star {
            (
                vec![Verdict::SufficientOnly],
                format!(
                    "0 < beta < 1/2, alpha >= alpha*(i, beta) = {a_star:.12}: increasing and \
                     completely monotonic (sufficient; necessity not asserted)"
                ),
            )
        } else if params.alpha < i {
            (
                vec![Verdict::OutsideKnownConditions],
                format!(
                    "0 < beta < 1/2, alpha < i = {i}: fails the necessary condition \
                     alpha >= i for monotonicity; no verdict"
                ),
            )
        } else {
            (
                vec![Verdict::OutsideKnownConditions],
                format!(
                    "0 < beta < 1/2, i <= alpha < alpha*(i, beta) = {a_star:.12}: \
                     no statement covers this gap"
                ),
            )
        }
    };
    Ok(Classification { verdicts, rule })
}
