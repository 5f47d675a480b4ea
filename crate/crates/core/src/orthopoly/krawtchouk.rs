use crate::error::{invalid, Result};
use crate::scalar::{binomial, powi, Scalar};

/// Monic orthogonal polynomials of `Binomial(trials, theta)`, built by the discrete
/// Stieltjes procedure on the `trials + 1` support points.
///
/// The recurrence `P_{n+1}(x) = (x - b_n) P_n(x) - c_n P_{n-1}(x)` is assembled from
/// weighted inner products only, so with rational `theta` every coefficient is exact.
#[derive(Debug, Clone)]
pub struct KrawtchoukBasis<T: Scalar> {
    trials: u32,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> KrawtchoukBasis<T> {
    pub fn new(trials: u32, theta: T) -> Result<Self> {
        if trials == 0 {
            return Err(invalid("Krawtchouk needs at least one trial"));
        }
        if !(theta > T::zero() && theta < T::one()) {
            return Err(invalid(format!(
                "Krawtchouk theta must lie in (0,1), got {}",
                theta.to_f64()
            )));
        }
        let n = trials as usize;
        let q = T::one() - theta.clone();
        let weights: Vec<T> = (0..=trials)
            .map(|k| {
                binomial::<T>(trials.into(), k.into())
                    * powi(&theta, i64::from(k))
                    * powi(&q, i64::from(trials - k))
            })
            .collect();
        let xs: Vec<T> = (0..=trials).map(|k| T::from_i64(i64::from(k))).collect();

        let inner = |u: &[T], v: &[T], scale: bool| -> T {
            let mut acc = T::zero();
            for k in 0..=n {
                let mut term = weights[k].clone() * u[k].clone() * v[k].clone();
                if scale {
                    term = term * xs[k].clone();
                }
                acc = acc + term;
            }
            acc
        };

        let mut b = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        let mut prev: Vec<T> = vec![T::zero(); n + 1];
        let mut cur: Vec<T> = vec![T::one(); n + 1];
        let mut prev_norm = T::one();
        for deg in 0..n {
            let norm = inner(&cur, &cur, false);
            let bn = inner(&cur, &cur, true) / norm.clone();
            let cn = if deg == 0 { T::zero() } else { norm.clone() / prev_norm.clone() };
            let next: Vec<T> = (0..=n)
                .map(|k| {
                    (xs[k].clone() - bn.clone()) * cur[k].clone() - cn.clone() * prev[k].clone()
                })
                .collect();
            b.push(bn);
            c.push(cn);
            prev = std::mem::replace(&mut cur, next);
            prev_norm = norm;
        }
        Ok(Self { trials, b, c })
    }

    pub fn trials(&self) -> u32 {
        self.trials
    }

    /// Recurrence coefficients `(b_n, c_n)` for `n < trials`; `c_0 = 0`.
    pub fn recurrence(&self, n: u32) -> Option<(T, T)> {
        let i = n as usize;
        Some((self.b.get(i)?.clone(), self.c.get(i)?.clone()))
    }

    pub fn eval(&self, n: u32, x: u64) -> Result<T> {
        if n > self.trials {
            return Err(invalid(format!(
                "Krawtchouk degree {n} exceeds the number of trials {}",
                self.trials
            )));
        }
        let xs = T::from_i64(x as i64);
        let mut prev = T::zero();
        let mut cur = T::one();
        for k in 0..n as usize {
            let next = (xs.clone() - self.b[k].clone()) * cur.clone() - self.c[k].clone() * prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }
}
