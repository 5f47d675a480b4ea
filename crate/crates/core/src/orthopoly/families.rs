use serde::{Deserialize, Serialize};

use super::factorial::{falling_factorial, rising_factorial};
use super::distribution::CountDistribution;
use super::krawtchouk::KrawtchoukBasis;
use crate::error::{invalid, Result};
use crate::scalar::{binomial, powi, Scalar};

/// Tail mass left out of orthogonality sums.
pub const QUADRATURE_TAIL: f64 = 1e-14;

/// Monic Charlier polynomial `C_n(x; alpha)`, orthogonal for `Poi(alpha)`.
///
/// Evaluated through the finite sum `sum_k binom(n,k) (-alpha)^(n-k) (x)_k`.
pub fn charlier<T: Scalar>(n: u32, x: u64, alpha: T) -> T {
    let xs = T::from_i64(x as i64);
    let minus_alpha = -alpha;
    (0..=n).fold(T::zero(), |acc, k| {
        acc + binomial::<T>(n.into(), k.into())
            * powi(&minus_alpha, i64::from(n - k))
            * falling_factorial(xs.clone(), k)
    })
}

/// Monic Meixner polynomial `M_n(x; a; p)`, orthogonal for `NB(a, p)`.
///
/// Finite sum `sum_k binom(n,k) (1 - 1/p)^(k-n) (a+k)^(n-k) (x)_k` with rising
/// factorials `(.)^(j)`.
pub fn meixner<T: Scalar>(n: u32, x: u64, a: T, p: T) -> T {
    let xs = T::from_i64(x as i64);
    let base = T::one() - T::one() / p;
    (0..=n).fold(T::zero(), |acc, k| {
        let shifted = a.clone() + T::from_i64(i64::from(k));
        acc + binomial::<T>(n.into(), k.into())
            * powi(&base, i64::from(k) - i64::from(n))
            * rising_factorial(shifted, n - k)
            * falling_factorial(xs.clone(), k)
    })
}

/// Monic polynomial of degree `n` orthogonal for `Binomial(trials, theta)`.
///
/// Fails for `n > trials`: the binomial law has only `trials + 1` support points.
pub fn krawtchouk<T: Scalar>(n: u32, x: u64, trials: u32, theta: T) -> Result<T> {
    let basis = KrawtchoukBasis::new(trials, theta)?;
    basis.eval(n, x)
}

/// Closed-form generating function `sum_n t^n/n! M_n(x; a; p)` of the monic
/// Meixner polynomials:
/// `((1-p+t)/(1-p+tp))^x * ((1-p)/(1-p+tp))^a`.
pub fn meixner_generating(t: f64, x: u64, a: f64, p: f64) -> Result<f64> {
    check_meixner(a, p)?;
    let denom = 1.0 - p + t * p;
    let num = 1.0 - p + t;
    if denom <= 0.0 || (x > 0 && num <= 0.0) {
        return Err(invalid(format!(
            "generating function bases must be positive (1-p+tp = {denom}, 1-p+t = {num})"
        )));
    }
    Ok((num / denom).powf(x as f64) * ((1.0 - p) / denom).powf(a))
}

pub(crate) fn check_meixner(a: f64, p: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("Meixner shape must be positive, got {a}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("Meixner parameter p must lie in (0,1), got {p}")));
    }
    Ok(())
}

/// Which family of monic orthogonal polynomials, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum PolyParams {
    /// Orthogonal for `Poi(alpha)`.
    Charlier { alpha: f64 },
    /// Orthogonal for `NB(a, p)`.
    Meixner { a: f64, p: f64 },
    /// Orthogonal for `Binomial(trials, theta)`.
    Krawtchouk { trials: u32, theta: f64 },
}

impl PolyParams {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PolyParams::Charlier { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(invalid(format!("Charlier rate must be positive, got {alpha}")));
                }
            }
            PolyParams::Meixner { a, p } => check_meixner(a, p)?,
            PolyParams::Krawtchouk { trials, theta } => {
                if trials == 0 {
                    return Err(invalid("Krawtchouk needs at least one trial"));
                }
                if !(theta > 0.0 && theta < 1.0) {
                    return Err(invalid(format!("Krawtchouk theta must lie in (0,1), got {theta}")));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the degree-`n` member at `x`.
    pub fn eval(&self, n: u32, x: u64) -> Result<f64> {
        self.validate()?;
        match *self {
            PolyParams::Charlier { alpha } => Ok(charlier(n, x, alpha)),
            PolyParams::Meixner { a, p } => Ok(meixner(n, x, a, p)),
            PolyParams::Krawtchouk { trials, theta } => krawtchouk(n, x, trials, theta),
        }
    }

    /// The law the family is orthogonal against.
    pub fn weight(&self) -> CountDistribution {
        match *self {
            PolyParams::Charlier { alpha } => CountDistribution::Poisson { mean: alpha },
            PolyParams::Meixner { a, p } => CountDistribution::NegBinomial { a, p },
            PolyParams::Krawtchouk { trials, theta } => CountDistribution::Binomial { trials, theta },
        }
    }

    /// `sum_x P_n(x) P_m(x) w(x)`.
    ///
    /// Summation runs at least to where the tail mass of `w` drops below
    /// [`QUADRATURE_TAIL`], then on until three consecutive summands are below
    /// `QUADRATURE_TAIL * 1e-3` of the accumulated absolute sum; the polynomial
    /// factors grow like `x^(n+m)`, so the mass bound alone is not enough.
    pub fn quadrature(&self, n: u32, m: u32) -> Result<f64> {
        self.validate()?;
        let w = self.weight();
        let start_checking = w.truncation(QUADRATURE_TAIL);
        let end = w.max_support().unwrap_or(u64::MAX);
        let (mut sum, mut abs_sum, mut small_run) = (0.0, 0.0, 0);
        let mut x = 0u64;
        while x <= end {
            let term = self.eval(n, x)? * self.eval(m, x)? * w.pmf(x);
            sum += term;
            abs_sum += term.abs();
            small_run = if term.abs() <= QUADRATURE_TAIL * 1e-3 * abs_sum { small_run + 1 } else { 0 };
            if x >= start_checking && small_run >= 3 {
                break;
            }
            x += 1;
        }
        Ok(sum)
    }

    /// `sum_x P_n(x)^2 w(x)` for the weight the family is orthogonal against.
    pub fn squared_norm(&self, n: u32) -> Result<f64> {
        self.validate()?;
        let nf: f64 = super::factorial::factorial(n);
        Ok(match *self {
            PolyParams::Charlier { alpha } => alpha.powi(n as i32) * nf,
            PolyParams::Meixner { a, p } => {
                p.powi(n as i32) * nf * rising_factorial(a, n) / (1.0 - p).powi(2 * n as i32)
            }
            PolyParams::Krawtchouk { trials, theta } => {
                if n > trials {
                    return Err(invalid(format!("degree {n} exceeds trials {trials}")));
                }
                nf * falling_factorial(f64::from(trials), n) * (theta * (1.0 - theta)).powi(n as i32)
            }
        })
    }
}
