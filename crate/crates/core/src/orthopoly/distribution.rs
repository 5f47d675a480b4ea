use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::factorial::{falling_factorial, rising_factorial};
use crate::error::{invalid, Result};
use crate::scalar::{binomial, powi, Scalar};

/// Laws on the non-negative integers that serve as single-site marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CountDistribution {
    Poisson { mean: f64 },
    /// `P(k) = (a)^(k) p^k (1-p)^a / k!`
    NegBinomial { a: f64, p: f64 },
    Binomial { trials: u32, theta: f64 },
}

impl CountDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CountDistribution::Poisson { mean } => {
                if !(mean > 0.0 && mean.is_finite()) {
                    return Err(invalid(format!("Poisson mean must be positive, got {mean}")));
                }
            }
            CountDistribution::NegBinomial { a, p } => super::families::check_meixner(a, p)?,
            CountDistribution::Binomial { trials, theta } => {
                if trials == 0 || !(theta > 0.0 && theta <= 1.0) {
                    return Err(invalid(format!(
                        "binomial needs trials >= 1 and theta in (0,1], got ({trials}, {theta})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn pmf(&self, k: u64) -> f64 {
        let kf = k as f64;
        match *self {
            CountDistribution::Poisson { mean } => {
                (-mean + kf * mean.ln() - ln_gamma(kf + 1.0)).exp()
            }
            CountDistribution::NegBinomial { a, p } => (ln_gamma(a + kf) - ln_gamma(a)
                - ln_gamma(kf + 1.0)
                + kf * p.ln()
                + a * (1.0 - p).ln())
            .exp(),
            CountDistribution::Binomial { trials, theta } => {
                if k > u64::from(trials) {
                    return 0.0;
                }
                let n = f64::from(trials);
                if theta == 1.0 {
                    return if k == u64::from(trials) { 1.0 } else { 0.0 };
                }
                (ln_gamma(n + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(n - kf + 1.0)
                    + kf * theta.ln()
                    + (n - kf) * (1.0 - theta).ln())
                .exp()
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            CountDistribution::Poisson { mean } => mean,
            CountDistribution::NegBinomial { a, p } => a * p / (1.0 - p),
            CountDistribution::Binomial { trials, theta } => f64::from(trials) * theta,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            CountDistribution::Poisson { mean } => mean,
            CountDistribution::NegBinomial { a, p } => a * p / ((1.0 - p) * (1.0 - p)),
            CountDistribution::Binomial { trials, theta } => {
                f64::from(trials) * theta * (1.0 - theta)
            }
        }
    }

    /// Largest support point, if the support is finite.
    pub fn max_support(&self) -> Option<u64> {
        match *self {
            CountDistribution::Binomial { trials, .. } => Some(trials.into()),
            _ => None,
        }
    }

    /// Upper bound on `P(X > k)` from a geometric majorant of the pmf ratios.
    pub fn tail_bound(&self, k: u64) -> f64 {
        let kf = k as f64;
        let r = match *self {
            CountDistribution::Poisson { mean } => mean / (kf + 2.0),
            CountDistribution::NegBinomial { a, p } => p.max((a + kf + 1.0) * p / (kf + 2.0)),
            CountDistribution::Binomial { trials, .. } => {
                if k >= u64::from(trials) {
                    return 0.0;
                }
                return f64::INFINITY;
            }
        };
        if r >= 1.0 {
            return f64::INFINITY;
        }
        self.pmf(k + 1) / (1.0 - r)
    }

    /// Smallest `L` with `P(X > L) < tol`.
    pub fn truncation(&self, tol: f64) -> u64 {
        if let Some(max) = self.max_support() {
            return max;
        }
        let mut k = self.mean().ceil() as u64;
        while self.tail_bound(k) >= tol {
            k += 1;
        }
        k
    }

    /// `E[(X)_k]`, the k-th factorial moment.
    pub fn factorial_moment(&self, k: u32) -> f64 {
        self.factorial_moment_in::<f64>(k)
    }

    /// Factorial moment evaluated in the given scalar field (exact for rationals).
    pub fn factorial_moment_in<T: Scalar>(&self, k: u32) -> T {
        match *self {
            CountDistribution::Poisson { mean } => powi(&T::from_f64(mean), k.into()),
            CountDistribution::NegBinomial { a, p } => {
                let p = T::from_f64(p);
                let odds = p.clone() / (T::one() - p);
                rising_factorial(T::from_f64(a), k) * powi(&odds, k.into())
            }
            CountDistribution::Binomial { trials, theta } => {
                falling_factorial(T::from_i64(trials.into()), k)
                    * powi(&T::from_f64(theta), k.into())
            }
        }
    }

    /// `E[X^j]` through Stirling numbers of the second kind.
    pub fn raw_moment(&self, j: u32) -> f64 {
        (0..=j)
            .map(|k| stirling2(j, k) * self.factorial_moment(k))
            .sum()
    }

    /// `P(k+1)/P(k)` in the given scalar field.
    pub fn successive_ratio<T: Scalar>(&self, k: u64) -> T {
        let kk = T::from_i64(k as i64);
        let k1 = kk.clone() + T::one();
        match *self {
            CountDistribution::Poisson { mean } => T::from_f64(mean) / k1,
            CountDistribution::NegBinomial { a, p } => (T::from_f64(a) + kk) * T::from_f64(p) / k1,
            CountDistribution::Binomial { trials, theta } => {
                if k >= u64::from(trials) {
                    return T::zero();
                }
                let th = T::from_f64(theta);
                (T::from_i64(trials.into()) - kk) * th.clone() / (k1 * (T::one() - th))
            }
        }
    }

    /// `P(k)/P(0)` as a product of successive ratios, exact for rationals.
    pub fn relative_weight<T: Scalar>(&self, k: u64) -> T {
        (0..k).fold(T::one(), |acc, j| acc * self.successive_ratio::<T>(j))
    }
}

/// Stirling number of the second kind `S(n, k)`.
pub fn stirling2(n: u32, k: u32) -> f64 {
    if n == 0 && k == 0 {
        return 1.0;
    }
    if n == 0 || k == 0 || k > n {
        return 0.0;
    }
    // Explicit formula, exact in doubles at the small sizes used here.
    let kf: f64 = (1..=k).map(f64::from).product();
    let s: f64 = (0..=k)
        .map(|j| {
            let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial::<f64>(k.into(), j.into()) * f64::from(j).powi(n as i32)
        })
        .sum();
    (s / kf).round()
}
