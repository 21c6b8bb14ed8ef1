//! Independent oracles shared by the integration tests.
//!
//! Everything here deliberately avoids the code paths it is used to check:
//! no Bernoulli asymptotics, no Newton polishing, no symbolic
//! differentiation. Expected values frozen in the test files were produced
//! by these routines.

// Each test binary uses its own subset of the oracles.
#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};

/// Euler-Mascheroni constant by Richardson extrapolation of
/// `H_n - ln n -> gamma + c1/n + c2/n^2 + ...` over `n = 100 * 2^j`.
///
/// Nine extrapolation levels wipe the expansion far below f64 resolution;
/// partial sums use compensated summation.
pub fn euler_gamma_oracle() -> f64 {
    const LEVELS: usize = 9;
    const BASE: u64 = 100;
    let mut row: Vec<f64> = (0..LEVELS)
        .map(|j| {
            let n = BASE << j;
            harmonic(n) - (n as f64).ln()
        })
        .collect();
    for m in 1..LEVELS {
        let p = 2f64.powi(m as i32);
        for j in 0..LEVELS - m {
            row[j] = (p * row[j + 1] - row[j]) / (p - 1.0);
        }
    }
    row[0]
}

fn harmonic(n: u64) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for m in (1..=n).rev() {
        let term = 1.0 / m as f64;
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// `zeta(3)` by direct backward summation of `1/n^3` to two million terms.
/// The discarded tail lies inside `(1/(2(N+1)^2), 1/(2N^2))`, i.e. below
/// 1.3e-13, which is an order under the tolerances it serves.
pub fn zeta3_oracle() -> f64 {
    const N: u64 = 2_000_000;
    let mut sum = 0.0;
    for n in (1..=N).rev() {
        let x = n as f64;
        sum += 1.0 / (x * x * x);
    }
    sum
}

/// Plain bisection inverse of `delta` over the fixed bracket `[1e-8, 60]`:
/// no seed, no derivative, no Newton step.
pub fn bisect_delta_inv(beta: f64) -> f64 {
    let mut lo = 1e-8f64;
    let mut hi = 60.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if polymono::kernel::delta(mid).unwrap() >= beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact finite-difference weights: solves the moment system
/// `sum_j c_j o_j^m = k! [m == k]` for `m = 0..offsets.len()` in rational
/// arithmetic and rounds the solution once at the end.
pub fn fd_weights(offsets: &[i64], k: usize) -> Vec<f64> {
    let n = offsets.len();
    assert!(k < n);
    // Augmented matrix [V | rhs].
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|row| {
            let mut r: Vec<BigRational> = offsets
                .iter()
                .map(|&o| {
                    let mut p = BigRational::one();
                    for _ in 0..row {
                        p *= BigRational::from_integer(BigInt::from(o));
                    }
                    p
                })
                .collect();
            r.push(if row == k {
                let mut f = BigRational::one();
                for j in 2..=k {
                    f *= BigRational::from_integer(BigInt::from(j as i64));
                }
                f
            } else {
                BigRational::zero()
            });
            r
        })
        .collect();

    // Exact Gauss-Jordan elimination.
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).expect("singular system");
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for entry in m[col].iter_mut() {
            *entry /= p.clone();
        }
        for row in 0..n {
            if row != col && !m[row][col].is_zero() {
                let factor = m[row][col].clone();
                for c in col..=n {
                    let sub = &m[col][c] * &factor;
                    m[row][c] -= sub;
                }
            }
        }
    }
    m.iter().map(|row| row[n].to_f64().unwrap()).collect()
}

/// `k`-th derivative of `f` at `x` by an 11-point central stencil with
/// exact weights (accuracy order at least 8 for `k <= 4`).
pub fn fd_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, k: usize, step: f64) -> f64 {
    let offsets: Vec<i64> = (-5..=5).collect();
    let w = fd_weights(&offsets, k);
    let mut sum = 0.0;
    for (j, &o) in offsets.iter().enumerate() {
        sum += w[j] * f(x + o as f64 * step);
    }
    sum / step.powi(k as i32)
}

/// Brute-force minimum of `f` over an `n`-point log grid on `[lo, hi]`.
pub fn grid_min<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, n: usize) -> f64 {
    let ratio = hi / lo;
    let mut min = f64::INFINITY;
    for j in 0..n {
        let t = lo * ratio.powf(j as f64 / (n - 1) as f64);
        min = min.min(f(t));
    }
    min
}

/// Tiny deterministic generator (splitmix64) so sampled parameter sets are
/// identical on every run and platform.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
