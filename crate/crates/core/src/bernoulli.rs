//! Exact Bernoulli numbers and the two Bernoulli power series
//!
//! `B_n` are the coefficients of `x/(e^x - 1) = sum B_n x^n / n!`. They are
//! computed exactly with arbitrary-precision rationals: the defining
//! recurrence loses all accuracy past `n ~ 20` in floating point.
//!
//! The two series evaluated here are
//!
//! ```text
//! S1(t) = sum_{k>=1} B_{2k} t^{2k-1} / (2k-1)!        (odd series)
//! S2(t) = sum_{k>=0} B_{2k+2} t^{2k+2} / (2k+2)!      (even series)
//! ```
//!
//! Both power series converge only for `|t| < 2*pi`, but both have closed
//! continuations valid on all of `(0, inf)`:
//!
//! ```text
//! S1(t) = 1/2 - delta(t)               S2(t) = t/(e^t - 1) - 1 + t/2
//! ```
//!
//! with `delta` from [`crate::kernel`]. The production evaluators
//! [`series_odd`] and [`series_even`] use the closed forms for `t >= 0.5`
//! and the truncated series below, where the closed forms cancel away more
//! than 1e-12 of relative accuracy. The explicit truncated evaluators stay
//! public so the two routes can be checked against each other.

use std::fmt;
use std::sync::{OnceLock, RwLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{capacity, domain, Result};
use crate::kernel;

/// Largest index served by [`bernoulli_number`].
pub const DEFAULT_MAX_INDEX: usize = 200;

/// Internal table capacity. The truncated series may consume ratios
/// `B_{2k+2}/B_{2k}` up to `k ~ 500` near the edge of the convergence disk.
const SERIES_MAX_INDEX: usize = 1010;

/// Hard cap on series terms; outside `|t| < 2*pi` the terms grow without
/// bound, so an unconditional stop is mandatory.
const SERIES_TERM_CAP: usize = 500;

/// Relative size at which a series term is considered negligible.
const SERIES_TERM_EPS: f64 = 1e-16;

/// Truncated-series evaluation is only offered this far into the disk.
const SERIES_T_LIMIT: f64 = 2.0 * std::f64::consts::PI - 0.3;

/// Below this `t` the production evaluators use the series directly.
const CLOSED_FORM_SWITCH: f64 = 0.5;

/// Arbitrary-precision signed rational.
///
/// The denominator is always positive and the fraction is always reduced;
/// both invariants are maintained by every constructor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactRational {
    inner: BigRational,
}

impl ExactRational {
    /// Build `numer/denom`. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "ExactRational denominator must be nonzero");
        Self {
            inner: BigRational::new(BigInt::from(numer), BigInt::from(denom)),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self {
            inner: BigRational::from_integer(BigInt::from(n)),
        }
    }

    pub fn numerator(&self) -> &BigInt {
        self.inner.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.inner.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Sign as -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.inner.is_zero() {
            0
        } else if self.inner.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Nearest `f64`, correctly scaled for operands far beyond the `f64`
    /// exponent range (overflow maps to infinity).
    pub fn to_f64(&self) -> f64 {
        big_ratio_to_f64(&self.inner)
    }

    pub(crate) fn from_big(inner: BigRational) -> Self {
        Self { inner }
    }

    pub(crate) fn as_big(&self) -> &BigRational {
        &self.inner
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.denom().is_one() {
            write!(f, "{}", self.inner.numer())
        } else {
            write!(f, "{}/{}", self.inner.numer(), self.inner.denom())
        }
    }
}

fn big_ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let numer = r.numer().abs();
    let denom = r.denom().clone();
    // Scale the quotient to ~64 significant bits, convert exactly, undo the
    // scaling in the exponent.
    let shift = denom.bits() as i64 + 63 - numer.bits() as i64;
    let q = if shift >= 0 {
        (numer << shift as u64) / denom
    } else {
        numer / (denom << (-shift) as u64)
    };
    // q fits in ~64 bits, so the conversion is exact up to one rounding.
    let q = q.to_f64().unwrap_or(f64::INFINITY);
    sign * q * 2f64.powi((-shift).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Cache of exact `B_n` values, filled by the defining recurrence
/// `sum_{j=0}^{n} C(n+1, j) B_j = 0` with `B_0 = 1`.
#[derive(Debug)]
pub struct BernoulliTable {
    values: Vec<BigRational>,
    max_index: usize,
}

impl BernoulliTable {
    pub fn new(max_index: usize) -> Self {
        Self {
            values: vec![BigRational::one()],
            max_index,
        }
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// Exact `B_n`, filling the table up to `n` on first use.
    pub fn get(&mut self, n: usize) -> Result<ExactRational> {
        if n > self.max_index {
            return Err(capacity(format!(
                "Bernoulli index {n} exceeds table capacity {}",
                self.max_index
            )));
        }
        self.ensure(n);
        Ok(ExactRational::from_big(self.values[n].clone()))
    }

    fn ensure(&mut self, n: usize) {
        while self.values.len() <= n {
            let m = self.values.len();
            self.values.push(self.compute(m));
        }
    }

    fn compute(&self, m: usize) -> BigRational {
        debug_assert!(m >= 1);
        if m == 1 {
            return BigRational::new(BigInt::from(-1), BigInt::from(2));
        }
        if m % 2 == 1 {
            return BigRational::zero();
        }
        // B_m = -1/(m+1) * sum_{j=0}^{m-1} C(m+1, j) B_j
        let n_big = BigInt::from(m as u64 + 1);
        let mut binom = BigInt::one(); // C(m+1, 0)
        let mut sum = BigRational::zero();
        for j in 0..m {
            if !self.values[j].is_zero() {
                sum += &self.values[j] * BigRational::from_integer(binom.clone());
            }
            // C(m+1, j+1) = C(m+1, j) * (m+1-j) / (j+1)
            binom = binom * (BigInt::from((m + 1 - j) as u64)) / BigInt::from((j + 1) as u64);
        }
        -sum / BigRational::from_integer(n_big)
    }
}

struct Cache {
    table: BernoulliTable,
    /// `ratios[k] = B_{2k+2} / B_{2k}` as f64, indexed from k = 1.
    ratios: Vec<f64>,
    /// `b2j[j] = B_{2j}` as f64, indexed from j = 0.
    b2j: Vec<f64>,
}

fn cache() -> &'static RwLock<Cache> {
    static CACHE: OnceLock<RwLock<Cache>> = OnceLock::new();
    CACHE.get_or_init(|| {
        RwLock::new(Cache {
            table: BernoulliTable::new(SERIES_MAX_INDEX),
            ratios: vec![f64::NAN, f64::NAN], // k = 0 unused, k = 1 filled lazily
            b2j: Vec::new(),
        })
    })
}

/// Exact `B_n` from the shared table.
///
/// Indices above [`DEFAULT_MAX_INDEX`] are refused; construct a private
/// [`BernoulliTable`] for larger experiments.
pub fn bernoulli_number(n: usize) -> Result<ExactRational> {
    if n > DEFAULT_MAX_INDEX {
        return Err(capacity(format!(
            "Bernoulli index {n} exceeds configured maximum {DEFAULT_MAX_INDEX}"
        )));
    }
    cache().write().unwrap().table.get(n)
}

/// `B_{2j}` as f64 for the polygamma asymptotic series.
pub(crate) fn b2j_f64(j: usize) -> f64 {
    {
        let c = cache().read().unwrap();
        if j < c.b2j.len() {
            return c.b2j[j];
        }
    }
    let mut c = cache().write().unwrap();
    while c.b2j.len() <= j {
        let idx = 2 * c.b2j.len();
        let v = c.table.get(idx).expect("b2j index within capacity").to_f64();
        c.b2j.push(v);
    }
    c.b2j[j]
}

/// `B_{2k+2}/B_{2k}` as f64 (exact rational division, then rounding).
///
/// Consecutive Bernoulli numbers overflow f64 past `2k ~ 250`, so series
/// terms are chained through these ratios instead of raw coefficients.
fn series_ratio(k: usize) -> Result<f64> {
    {
        let c = cache().read().unwrap();
        if k < c.ratios.len() && !c.ratios[k].is_nan() {
            return Ok(c.ratios[k]);
        }
    }
    let mut c = cache().write().unwrap();
    if c.ratios.len() <= k {
        let len = c.ratios.len();
        c.ratios.resize(k + 1, f64::NAN);
        debug_assert!(len >= 2);
    }
    for i in 1..=k {
        if c.ratios[i].is_nan() {
            let hi = c.table.get(2 * i + 2)?;
            let lo = c.table.get(2 * i)?;
            c.ratios[i] = ExactRational::from_big(hi.as_big() / lo.as_big()).to_f64();
        }
    }
    Ok(c.ratios[k])
}

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(domain(format!("series argument t = {t} must be positive and finite")));
    }
    Ok(())
}

/// Odd series `S1(t)` summed term by term.
///
/// Stops when the next term drops below `1e-16` of the partial sum; refuses
/// arguments within 0.3 of the radius `2*pi`, where convergence would need
/// more than the hard term cap.
pub fn series_odd_truncated(t: f64) -> Result<f64> {
    check_t(t)?;
    if t >= SERIES_T_LIMIT {
        return Err(domain(format!(
            "t = {t} is outside the supported truncation range (< {SERIES_T_LIMIT:.6})"
        )));
    }
    let t2 = t * t;
    let mut term = t / 6.0; // B_2 t / 1!
    let mut sum = term;
    for k in 1..SERIES_TERM_CAP {
        term *= series_ratio(k)? * t2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        sum += term;
        if term.abs() <= SERIES_TERM_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(crate::error::Error::Accuracy {
        message: format!("odd Bernoulli series did not converge at t = {t}"),
        partial: sum,
        error_estimate: term.abs(),
    })
}

/// Even series `S2(t)` summed term by term. Same stopping rules as
/// [`series_odd_truncated`].
pub fn series_even_truncated(t: f64) -> Result<f64> {
    check_t(t)?;
    if t >= SERIES_T_LIMIT {
        return Err(domain(format!(
            "t = {t} is outside the supported truncation range (< {SERIES_T_LIMIT:.6})"
        )));
    }
    let t2 = t * t;
    let mut term = t2 / 12.0; // B_2 t^2 / 2!
    let mut sum = term;
    for k in 0..SERIES_TERM_CAP {
        term *= series_ratio(k + 1)? * t2 / ((2 * k + 3) as f64 * (2 * k + 4) as f64);
        sum += term;
        if term.abs() <= SERIES_TERM_EPS * sum.abs() {
            return Ok(sum);
        }
    }
    Err(crate::error::Error::Accuracy {
        message: format!("even Bernoulli series did not converge at t = {t}"),
        partial: sum,
        error_estimate: term.abs(),
    })
}

/// `S1(t) = sum B_{2k} t^{2k-1}/(2k-1)!`, continued to all `t > 0` through
/// the identity `S1 = 1/2 - delta(t)`. Always lies strictly in `(0, 1/2)`.
pub fn series_odd(t: f64) -> Result<f64> {
    check_t(t)?;
    if t < CLOSED_FORM_SWITCH {
        series_odd_truncated(t)
    } else {
        Ok(0.5 - kernel::delta(t)?)
    }
}

/// `S2(t) = sum B_{2k+2} t^{2k+2}/(2k+2)!`, continued through
/// `S2 = t/(e^t - 1) - 1 + t/2`. Lies strictly between `max(0, t/2 - 1)`
/// and `t/2`.
pub fn series_even(t: f64) -> Result<f64> {
    check_t(t)?;
    if t < CLOSED_FORM_SWITCH {
        series_even_truncated(t)
    } else {
        Ok(t / t.exp_m1() + 0.5 * t - 1.0)
    }
}

/// Lower bound for the even series tied to the threshold curve: returns
/// `(S2(t), (1/2 - beta) t + [e^s/(e^s - 1) + beta - 1] s - 1)` with
/// `s = delta^{-1}(beta)`.
///
/// The bracket is the same one that defines the sharp threshold; with it the
/// bound is attained (with equality) exactly at `t = s` and is strict
/// elsewhere.
pub fn series_even_lower_bound(t: f64, beta: f64) -> Result<(f64, f64)> {
    check_t(t)?;
    let lhs = series_even(t)?;
    let rhs = (0.5 - beta) * t + kernel::bracket_value(beta)? - 1.0;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_bernoulli_numbers() {
        assert_eq!(bernoulli_number(0).unwrap(), ExactRational::from_integer(1));
        // Recurrence at n = 1: C(2,0) B_0 + C(2,1) B_1 = 0  =>  B_1 = -1/2.
        assert_eq!(bernoulli_number(1).unwrap(), ExactRational::new(-1, 2));
        assert_eq!(bernoulli_number(2).unwrap(), ExactRational::new(1, 6));
        assert_eq!(bernoulli_number(4).unwrap(), ExactRational::new(-1, 30));
        assert_eq!(bernoulli_number(12).unwrap(), ExactRational::new(-691, 2730));
    }

    #[test]
    fn odd_indices_vanish() {
        for k in 1..=40 {
            assert!(bernoulli_number(2 * k + 1).unwrap().is_zero(), "B_{} != 0", 2 * k + 1);
        }
    }

    #[test]
    fn even_signs_alternate() {
        // sign(B_{2k}) = (-1)^{k+1} for k >= 1
        for k in 1..=30 {
            let expect = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(bernoulli_number(2 * k).unwrap().signum(), expect, "B_{}", 2 * k);
        }
    }

    #[test]
    fn index_above_capacity_is_refused() {
        assert!(matches!(
            bernoulli_number(DEFAULT_MAX_INDEX + 1),
            Err(crate::Error::Capacity(_))
        ));
    }

    #[test]
    fn to_f64_handles_large_entries() {
        let mut table = BernoulliTable::new(400);
        let b120 = table.get(120).unwrap().to_f64();
        // |B_120| ~ 2.38e103
        assert!(b120.is_finite() && b120 < 0.0);
        assert_relative_eq!(b120.abs().log10(), 103.38, max_relative = 1e-2);
        let b400 = table.get(400).unwrap().to_f64();
        assert!(b400.is_infinite());
    }

    #[test]
    fn display_form() {
        assert_eq!(bernoulli_number(12).unwrap().to_string(), "-691/2730");
        assert_eq!(bernoulli_number(0).unwrap().to_string(), "1");
    }

    #[test]
    fn odd_series_vanishes_at_zero() {
        let tiny = series_odd(1e-12).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-12);
    }

    #[test]
    fn odd_series_at_one() {
        let e1 = std::f64::consts::E - 1.0;
        let expected = 0.5 - 1.0 / (e1 * e1);
        assert_relative_eq!(series_odd(1.0).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(expected, 0.1613031, max_relative = 1e-6);
    }

    #[test]
    fn even_series_vanishes_at_zero() {
        let tiny = series_even(1e-12).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-12);
    }

    #[test]
    fn even_series_at_one() {
        let expected = 1.0 / (std::f64::consts::E - 1.0) - 0.5;
        assert_relative_eq!(series_even(1.0).unwrap(), expected, max_relative = 1e-13);
        assert_relative_eq!(expected, 0.081977, max_relative = 1e-4);
    }

    #[test]
    fn even_series_at_ten_is_between_bounds() {
        let v = series_even(10.0).unwrap();
        assert!(v > 4.0 && v < 5.0, "S2(10) = {v}");
    }

    #[test]
    fn truncated_and_closed_forms_agree_midrange() {
        for &t in &[0.6, 1.0, 2.0, 3.5, 5.0, 5.9] {
            let closed = series_odd(t).unwrap();
            let series = series_odd_truncated(t).unwrap();
            assert_relative_eq!(closed, series, max_relative = 1e-12);
            let closed = series_even(t).unwrap();
            let series = series_even_truncated(t).unwrap();
            assert_relative_eq!(closed, series, max_relative = 1e-12);
        }
    }

    #[test]
    fn truncated_series_refuses_radius_edge() {
        assert!(series_odd_truncated(6.1).is_err());
        assert!(series_even_truncated(2.0 * std::f64::consts::PI).is_err());
    }

    #[test]
    fn series_domain_errors() {
        assert!(series_odd(0.0).is_err());
        assert!(series_odd(-1.0).is_err());
        assert!(series_even(f64::NAN).is_err());
    }

    #[test]
    fn lower_bound_at_quarter() {
        let (lhs, rhs) = series_even_lower_bound(1.0, 0.25).unwrap();
        assert_relative_eq!(lhs, 0.081977, max_relative = 1e-4);
        assert!(lhs > rhs, "lhs = {lhs}, rhs = {rhs}");
    }

    #[test]
    fn lower_bound_flattens_as_beta_reaches_half() {
        // s -> 0 sends the bracket to 1 (it behaves like [1/s + O(1)] * s),
        // so the whole bound tends to (1/2 - beta) t + 0 -> 0.
        let (lhs, rhs) = series_even_lower_bound(1.0, 0.5 - 1e-9).unwrap();
        assert!(rhs.abs() < 1e-6, "rhs = {rhs}");
        assert!(lhs > rhs);
    }

    #[test]
    fn lower_bound_rejects_bad_beta() {
        assert!(series_even_lower_bound(1.0, 0.0).is_err());
        assert!(series_even_lower_bound(1.0, 0.5).is_err());
        assert!(series_even_lower_bound(1.0, -0.2).is_err());
    }
}
