//! Closed term algebra for functions `sum c * x^p * psi^(m)(x + beta)` with
//! exact differentiation of arbitrary order, plus grid sign scans used as
//! (non-)complete-monotonicity evidence.
//!
//! The algebra stores signed polygamma factors; constructors bake the
//! `(-1)^{i+1}` orientation into the coefficients so absolute values never
//! appear at evaluation time and differentiation stays a closed operation:
//!
//! ```text
//! d/dx [c x^p psi^(m)(x+b)] = c p x^{p-1} psi^(m)(x+b) + c x^p psi^(m+1)(x+b)
//! ```
//!
//! A scan of order `k` evaluates `(-1)^k f^(k)` over a grid and accepts
//! minima down to `-tol * (1 + scale)`, where `scale` is the sum of the
//! absolute term values at the grid point. The scale factor is what makes
//! the test meaningful: near `x = 0` the terms reach `1e25` and cancel to
//! `O(1)`, so a raw comparison against zero would only measure accumulated
//! rounding of the polygamma evaluator, not the sign of the function.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::kernel::KernelParams;
use crate::polygamma::{polygamma_with, EvalConfig};

/// Largest scan derivative order; beyond ~12 the term magnitudes at small x
/// spread past the dynamic range that keeps sign information meaningful.
pub const MAX_SCAN_ORDER: u32 = 12;

/// One monomial `coeff * x^power * psi^(psi_order)(x + shift)`. A missing
/// `psi_order` marks a pure power term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub coeff: f64,
    pub power: f64,
    pub psi_order: Option<u32>,
    pub shift: f64,
}

impl Term {
    pub fn power_term(coeff: f64, power: f64) -> Self {
        Self { coeff, power, psi_order: None, shift: 0.0 }
    }

    pub fn psi_term(coeff: f64, power: f64, psi_order: u32, shift: f64) -> Self {
        Self { coeff, power, psi_order: Some(psi_order), shift }
    }

    fn key(&self) -> (u64, Option<u32>, u64) {
        (self.power.to_bits(), self.psi_order, self.shift.to_bits())
    }
}

/// A finite sum of [`Term`]s, kept merged and deterministically ordered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expr {
    terms: Vec<Term>,
}

impl Expr {
    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut e = Self { terms };
        e.normalize();
        e
    }

    pub fn empty() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn normalize(&mut self) {
        self.terms.sort_by(|a, b| a.key().cmp(&b.key()));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.key() == t.key() => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        self.terms = merged;
    }

    /// Exact derivative; the algebra is closed under this map.
    pub fn derivative(&self) -> Expr {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.power != 0.0 {
                out.push(Term { coeff: t.coeff * t.power, power: t.power - 1.0, ..*t });
            }
            if let Some(m) = t.psi_order {
                out.push(Term { psi_order: Some(m + 1), ..*t });
            }
        }
        Expr::from_terms(out)
    }

    /// `n`-th derivative by iteration.
    pub fn nth_derivative(&self, n: u32) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.derivative();
        }
        e
    }

    pub fn negated(&self) -> Expr {
        self.scaled(-1.0)
    }

    pub fn scaled(&self, c: f64) -> Expr {
        Expr::from_terms(self.terms.iter().map(|t| Term { coeff: c * t.coeff, ..*t }).collect())
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Expr::from_terms(terms)
    }

    /// Plain evaluation at `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.eval_parts(x, &EvalConfig::default())?.0)
    }

    /// Evaluation returning `(value, scale)` where `scale` is the sum of
    /// absolute term values, the natural yardstick for rounding in the sum.
    pub fn eval_parts(&self, x: f64, cfg: &EvalConfig) -> Result<(f64, f64)> {
        if !x.is_finite() || x <= 0.0 {
            return Err(domain(format!("evaluation point x = {x} must be positive")));
        }
        let mut value = 0.0;
        let mut scale = 0.0;
        for t in &self.terms {
            let xp = if t.power == 0.0 {
                1.0
            } else if t.power.fract() == 0.0 && t.power.abs() <= 64.0 {
                x.powi(t.power as i32)
            } else {
                x.powf(t.power)
            };
            let factor = match t.psi_order {
                None => 1.0,
                Some(m) => {
                    let arg = x + t.shift;
                    if arg <= 0.0 {
                        return Err(domain(format!(
                            "polygamma argument {arg} nonpositive at x = {x}"
                        )));
                    }
                    polygamma_with(m, arg, cfg)?
                }
            };
            let v = t.coeff * xp * factor;
            value += v;
            scale += v.abs();
        }
        Ok((value, scale))
    }
}

/// The signed form of `alpha |psi^(i)(x+beta)| - x |psi^(i+1)(x+beta)|`:
///
/// ```text
/// (-1)^{i+1} [ alpha psi^(i)(x+beta) + x psi^(i+1)(x+beta) ]
/// ```
///
/// This is `g'(x) / x^{alpha-1}` for `g(x) = x^alpha |psi^(i)(x+beta)|`, so
/// its sign decides the monotonicity of `g` and its complete monotonicity is
/// the subject of the sharp threshold statements.
pub fn cm_expr(params: &KernelParams) -> Expr {
    let sign = if params.order % 2 == 1 { 1.0 } else { -1.0 };
    Expr::from_terms(vec![
        Term::psi_term(sign * params.alpha, 0.0, params.order, params.beta),
        Term::psi_term(sign, 1.0, params.order + 1, params.beta),
    ])
}

/// The same expression divided by `x` (every power lowered by one):
/// the signed form of `alpha/x |psi^(i)(x+beta)| - |psi^(i+1)(x+beta)|`.
pub fn cm_expr_divided(params: &KernelParams) -> Expr {
    let sign = if params.order % 2 == 1 { 1.0 } else { -1.0 };
    Expr::from_terms(vec![
        Term::psi_term(sign * params.alpha, -1.0, params.order, params.beta),
        Term::psi_term(sign, 0.0, params.order + 1, params.beta),
    ])
}

/// Grid spacing law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

/// Evaluation grid on `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, count: usize, spacing: Spacing) -> Result<Self> {
        let g = Self { lo, hi, count, spacing };
        g.validate()?;
        Ok(g)
    }

    /// The default scan grid: 400 log-spaced points on `[1e-2, 1e3]`.
    pub fn default_log() -> Self {
        Self { lo: 1e-2, hi: 1e3, count: 400, spacing: Spacing::Log }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0 && self.hi > self.lo) {
            return Err(domain(format!(
                "grid bounds ({}, {}) must satisfy 0 < lo < hi",
                self.lo, self.hi
            )));
        }
        if self.count < 2 {
            return Err(domain(format!("grid count {} must be >= 2", self.count)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let mut pts = Vec::with_capacity(n);
        match self.spacing {
            Spacing::Log => {
                let ratio = self.hi / self.lo;
                for j in 0..n {
                    pts.push(self.lo * ratio.powf(j as f64 / (n - 1) as f64));
                }
            }
            Spacing::Linear => {
                let step = (self.hi - self.lo) / (n - 1) as f64;
                for j in 0..n {
                    pts.push(self.lo + step * j as f64);
                }
            }
        }
        pts
    }
}

/// Extremes of `(-1)^k f^(k)` over the grid for one derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderExtremes {
    pub k: u32,
    /// Smallest raw value of `(-1)^k f^(k)` over the grid.
    pub min_value: f64,
    /// The same minimum normalized by `1 + scale`.
    pub min_normalized: f64,
    pub argmin: f64,
    pub max_value: f64,
    pub max_normalized: f64,
    pub argmax: f64,
}

/// A grid point violating the sign requirement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub k: u32,
    pub x: f64,
    pub value: f64,
    pub normalized: f64,
}

/// Evidence object of a complete-monotonicity scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignScanReport {
    pub k_max: u32,
    pub grid: GridSpec,
    pub tolerance: f64,
    pub per_k: Vec<OrderExtremes>,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
}

impl SignScanReport {
    /// True when some grid point is strictly positive beyond tolerance at
    /// derivative order `k` (used as necessity evidence).
    pub fn strictly_positive_at(&self, k: u32) -> bool {
        self.per_k.iter().any(|e| e.k == k && e.max_normalized > self.tolerance)
    }

    pub fn strictly_negative_at(&self, k: u32) -> bool {
        self.per_k.iter().any(|e| e.k == k && e.min_normalized < -self.tolerance)
    }
}

/// Scan `(-1)^k f^(k) >= 0` for `k = 0..=k_max` over the grid.
///
/// Passes when every normalized minimum stays above `-tolerance`; all
/// violations are recorded as witnesses.
pub fn sign_scan(expr: &Expr, k_max: u32, grid: &GridSpec, tolerance: f64) -> Result<SignScanReport> {
    sign_scan_with(expr, k_max, grid, tolerance, &EvalConfig::default())
}

pub fn sign_scan_with(
    expr: &Expr,
    k_max: u32,
    grid: &GridSpec,
    tolerance: f64,
    cfg: &EvalConfig,
) -> Result<SignScanReport> {
    if k_max > MAX_SCAN_ORDER {
        return Err(domain(format!("k_max = {k_max} exceeds supported maximum {MAX_SCAN_ORDER}")));
    }
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(domain(format!("tolerance = {tolerance} must be positive")));
    }
    grid.validate()?;
    let points = grid.points();

    let mut per_k = Vec::with_capacity(k_max as usize + 1);
    let mut witnesses = Vec::new();
    let mut derivative = expr.clone();
    for k in 0..=k_max {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut extremes: Option<OrderExtremes> = None;
        for &x in &points {
            let (raw, scale) = derivative.eval_parts(x, cfg).map_err(|e| match e {
                crate::Error::Domain(msg) => domain(format!("at (k = {k}, x = {x}): {msg}")),
                other => other,
            })?;
            let value = sign * raw;
            let normalized = value / (1.0 + scale);
            let e = extremes.get_or_insert(OrderExtremes {
                k,
                min_value: value,
                min_normalized: normalized,
                argmin: x,
                max_value: value,
                max_normalized: normalized,
                argmax: x,
            });
            if normalized < e.min_normalized {
                e.min_normalized = normalized;
                e.min_value = value;
                e.argmin = x;
            }
            if normalized > e.max_normalized {
                e.max_normalized = normalized;
                e.max_value = value;
                e.argmax = x;
            }
            if normalized < -tolerance {
                witnesses.push(Witness { k, x, value, normalized });
            }
        }
        per_k.push(extremes.expect("grid has at least two points"));
        if k < k_max {
            derivative = derivative.derivative();
        }
    }

    let pass = per_k.iter().all(|e| e.min_normalized >= -tolerance);
    Ok(SignScanReport {
        k_max,
        grid: *grid,
        tolerance,
        per_k,
        pass,
        witnesses,
    })
}

/// Sign verdict of a monotonicity scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    NonNegative,
    NonPositive,
    Mixed,
}

/// Both one-sided scans of `g'(x)/x^{alpha-1}`; `g` is increasing exactly
/// when the expression is nonnegative and decreasing when nonpositive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityScan {
    pub nonnegative: SignScanReport,
    pub nonpositive: SignScanReport,
    pub direction: Direction,
}

/// Scan the derivative factor of `x^alpha |psi^(i)(x+beta)|` over a grid.
pub fn monotonicity_scan(
    params: &KernelParams,
    grid: &GridSpec,
    tolerance: f64,
) -> Result<MonotonicityScan> {
    params.validate()?;
    let expr = cm_expr(params);
    let nonnegative = sign_scan(&expr, 0, grid, tolerance)?;
    let nonpositive = sign_scan(&expr.negated(), 0, grid, tolerance)?;
    let direction = match (nonnegative.pass, nonpositive.pass) {
        (true, _) => Direction::NonNegative,
        (false, true) => Direction::NonPositive,
        (false, false) => Direction::Mixed,
    };
    Ok(MonotonicityScan { nonnegative, nonpositive, direction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    #[test]
    fn cm_expr_signs() {
        let e = cm_expr(&KernelParams::new(1, 2.0, 0.0).unwrap());
        // 2 psi'(x) + x psi''(x): odd order keeps the + orientation.
        assert_eq!(e.terms().len(), 2);
        assert!(e.terms().iter().any(|t| t.coeff == 2.0 && t.psi_order == Some(1)));
        assert!(e.terms().iter().any(|t| t.coeff == 1.0 && t.psi_order == Some(2) && t.power == 1.0));

        let e = cm_expr(&KernelParams::new(2, 3.0, 1.0).unwrap());
        // -(3 psi''(x+1) + x psi'''(x+1)).
        assert!(e.terms().iter().any(|t| t.coeff == -3.0 && t.psi_order == Some(2) && t.shift == 1.0));
        assert!(e.terms().iter().any(|t| t.coeff == -1.0 && t.psi_order == Some(3)));
    }

    #[test]
    fn cm_expr_value_at_one() {
        let e = cm_expr(&KernelParams::new(1, 2.0, 0.0).unwrap());
        let expected = 2.0 * PI * PI / 6.0 - 2.0 * ZETA3;
        assert_relative_eq!(e.eval(1.0).unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 0.885754, max_relative = 1e-5);
    }

    #[test]
    fn divided_expr_relates_by_factor_x() {
        let p = KernelParams::new(2, 2.5, 0.3).unwrap();
        let full = cm_expr(&p);
        let divided = cm_expr_divided(&p);
        for &x in &[0.17, 1.0, 3.9, 42.0] {
            let a = full.eval(x).unwrap();
            let b = divided.eval(x).unwrap() * x;
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn divided_expr_negative_regime_value() {
        // i = 1, alpha = 1, x = 1: psi'(1) + psi''(1) < 0.
        let e = cm_expr_divided(&KernelParams::new(1, 1.0, 0.0).unwrap());
        let v = e.eval(1.0).unwrap();
        assert_relative_eq!(v, PI * PI / 6.0 - 2.0 * ZETA3, max_relative = 1e-12);
        assert!(v < 0.0);
    }

    #[test]
    fn derivative_product_rule() {
        // d/dx [x psi'(x)] = psi'(x) + x psi''(x)
        let e = Expr::from_terms(vec![Term::psi_term(1.0, 1.0, 1, 0.0)]);
        let d = e.derivative();
        assert_eq!(d.terms().len(), 2);
        assert!(d.terms().iter().any(|t| t.coeff == 1.0 && t.power == 0.0 && t.psi_order == Some(1)));
        assert!(d.terms().iter().any(|t| t.coeff == 1.0 && t.power == 1.0 && t.psi_order == Some(2)));

        // d/dx psi^(m)(x+b) = psi^(m+1)(x+b)
        let e = Expr::from_terms(vec![Term::psi_term(1.0, 0.0, 3, 0.7)]);
        let d = e.derivative();
        assert_eq!(d.terms(), &[Term::psi_term(1.0, 0.0, 4, 0.7)]);

        // Pure powers differentiate as usual and constants vanish.
        let e = Expr::from_terms(vec![Term::power_term(5.0, 2.0), Term::power_term(3.0, 0.0)]);
        let d = e.derivative();
        assert_eq!(d.terms(), &[Term::power_term(10.0, 1.0)]);
    }

    #[test]
    fn like_terms_merge() {
        let e = Expr::from_terms(vec![
            Term::psi_term(1.0, 1.0, 2, 0.5),
            Term::psi_term(2.5, 1.0, 2, 0.5),
            Term::power_term(1.0, 1.0),
            Term::power_term(-1.0, 1.0),
        ]);
        assert_eq!(e.terms(), &[Term::psi_term(3.5, 1.0, 2, 0.5)]);
    }

    #[test]
    fn eval_basics() {
        assert_eq!(Expr::empty().eval(3.0).unwrap(), 0.0);
        let e = Expr::from_terms(vec![Term::power_term(1.0, 2.0)]);
        assert_eq!(e.eval(3.0).unwrap(), 9.0);
        assert!(e.eval(0.0).is_err());
        assert!(e.eval(-1.0).is_err());
    }

    #[test]
    fn scan_passes_in_the_sharp_regime() {
        let grid = GridSpec::new(1e-2, 1e3, 120, Spacing::Log).unwrap();
        let e = cm_expr(&KernelParams::new(1, 2.0, 0.0).unwrap());
        let report = sign_scan(&e, 8, &grid, 1e-9).unwrap();
        assert!(report.pass, "witnesses: {:?}", report.witnesses);

        let e = cm_expr(&KernelParams::new(1, 1.0, 0.0).unwrap()).negated();
        let report = sign_scan(&e, 8, &grid, 1e-9).unwrap();
        assert!(report.pass, "witnesses: {:?}", report.witnesses);
    }

    #[test]
    fn scan_fails_with_witnesses_in_the_gap() {
        let grid = GridSpec::new(1e-2, 1e3, 120, Spacing::Log).unwrap();
        let e = cm_expr(&KernelParams::new(1, 1.5, 0.0).unwrap());
        let up = sign_scan(&e, 0, &grid, 1e-9).unwrap();
        let down = sign_scan(&e.negated(), 0, &grid, 1e-9).unwrap();
        assert!(!up.pass && !down.pass);
        assert!(!up.witnesses.is_empty() && !down.witnesses.is_empty());

        // Re-confirm one witness of each sign with the strict evaluator.
        let strict = EvalConfig::strict();
        let w = up.witnesses[0];
        let (v, scale) = e.eval_parts(w.x, &strict).unwrap();
        assert!(v < -1e-9 * (1.0 + scale), "witness did not survive re-evaluation");
        let w = down.witnesses[0];
        let (v, scale) = e.eval_parts(w.x, &strict).unwrap();
        assert!(v > 1e-9 * (1.0 + scale));
    }

    #[test]
    fn monotonicity_scan_directions() {
        let grid = GridSpec::new(1e-2, 1e3, 120, Spacing::Log).unwrap();
        let m = monotonicity_scan(&KernelParams::new(1, 2.0, 0.0).unwrap(), &grid, 1e-9).unwrap();
        assert_eq!(m.direction, Direction::NonNegative);
        let m = monotonicity_scan(&KernelParams::new(1, 1.0, 0.0).unwrap(), &grid, 1e-9).unwrap();
        assert_eq!(m.direction, Direction::NonPositive);
        let m = monotonicity_scan(&KernelParams::new(2, 2.0, 0.5).unwrap(), &grid, 1e-9).unwrap();
        assert_eq!(m.direction, Direction::NonNegative);
        let m = monotonicity_scan(&KernelParams::new(1, 1.5, 0.0).unwrap(), &grid, 1e-9).unwrap();
        assert_eq!(m.direction, Direction::Mixed);
    }

    #[test]
    fn scan_rejects_out_of_range_k() {
        let grid = GridSpec::default_log();
        let e = cm_expr(&KernelParams::new(1, 2.0, 0.0).unwrap());
        assert!(sign_scan(&e, MAX_SCAN_ORDER + 1, &grid, 1e-9).is_err());
        assert!(sign_scan(&e, 1, &grid, 0.0).is_err());
        assert!(GridSpec::new(0.0, 1.0, 10, Spacing::Log).is_err());
        assert!(GridSpec::new(1.0, 0.5, 10, Spacing::Log).is_err());
        assert!(GridSpec::new(1.0, 2.0, 1, Spacing::Log).is_err());
    }
}
