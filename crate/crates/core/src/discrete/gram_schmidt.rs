use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::orthopoly::{stirling2, CountDistribution};
use crate::scalar::{binomial, powi, Rational, Scalar};

/// Moment matrices with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Projection of the monomial `prod_x eta_x^{d_x}` onto the orthogonal complement of
/// all polynomials of total degree `< sum d_x`, in `L^2` of a product law.
///
/// Computed by solving the moment (Gram) system of the lower-degree monomials in the
/// centred and scaled variables `u_x = (eta_x - mean_x) / sd_x`, which keeps the
/// system well conditioned; moments come from the closed-form factorial moments in
/// exact rational arithmetic.
#[derive(Debug, Clone)]
pub struct OrthogonalProjection {
    degrees: Vec<u32>,
    centers: Vec<f64>,
    scales: Vec<f64>,
    /// `(exponents, coefficient)` in the `u` variables, leading term included.
    terms: Vec<(Vec<u32>, f64)>,
    condition: f64,
}

pub fn gram_schmidt_in(marginals: &[CountDistribution], degrees: &[u32]) -> Result<OrthogonalProjection> {
    if marginals.len() != degrees.len() {
        return Err(Error::DimensionMismatch { expected: marginals.len(), got: degrees.len() });
    }
    for m in marginals {
        m.validate()?;
    }
    let centers: Vec<f64> = marginals.iter().map(CountDistribution::mean).collect();
    let scales: Vec<f64> = marginals.iter().map(|m| m.variance().sqrt()).collect();
    if scales.iter().any(|s| !(*s > 0.0)) {
        return Err(invalid("orthogonal polynomials need marginals with positive variance"));
    }
    let n: u32 = degrees.iter().sum();
    let caps: Vec<u32> = marginals
        .iter()
        .map(|m| m.max_support().map_or(u32::MAX, |s| s as u32))
        .collect();

    // On a finite support, eta_x^{d} with d above the support size minus one is a
    // lower-degree polynomial there, so the projection vanishes.
    if degrees.iter().zip(&caps).any(|(d, c)| d > c) {
        return Ok(OrthogonalProjection { degrees: degrees.to_vec(), centers, scales, terms: Vec::new(), condition: 1.0 });
    }
    let mut terms = vec![(degrees.to_vec(), 1.0)];
    if n == 0 {
        return Ok(OrthogonalProjection { degrees: degrees.to_vec(), centers, scales, terms, condition: 1.0 });
    }

    let basis = multi_indices(degrees.len(), n - 1, &caps);
    let max_order: Vec<u32> = (0..degrees.len())
        .map(|x| 2 * (n - 1).min(caps[x]).max(degrees[x]))
        .collect();
    let moments: Vec<Vec<f64>> = marginals
        .iter()
        .zip(&max_order)
        .zip(scales.iter())
        .map(|((m, &order), &s)| scaled_central_moments(m, s, order))
        .collect();
    let joint = |a: &[u32], b: &[u32]| -> f64 {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(x, (i, j))| moments[x][(i + j) as usize])
            .product()
    };

    let k = basis.len();
    let gram = DMatrix::from_fn(k, k, |i, j| joint(&basis[i], &basis[j]));
    let rhs = DVector::from_fn(k, |i, _| joint(&basis[i], degrees));
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let chol = gram.clone().cholesky().ok_or(Error::IllConditioned { condition })?;
    let mut coef = chol.solve(&rhs);
    // One round of iterative refinement.
    let residual = &rhs - &gram * &coef;
    coef += chol.solve(&residual);

    terms.extend(basis.into_iter().zip(coef.iter()).map(|(a, &c)| (a, -c)));
    Ok(OrthogonalProjection { degrees: degrees.to_vec(), centers, scales, terms, condition })
}

/// `E[((X - mean)/s)^k]` for `k <= order`, exact up to the final rounding.
fn scaled_central_moments(law: &CountDistribution, s: f64, order: u32) -> Vec<f64> {
    let top = order.max(1);
    let factorial: Vec<Rational> = (0..=top).map(|k| law.factorial_moment_in::<Rational>(k)).collect();
    let raw: Vec<Rational> = (0..=top)
        .map(|j| {
            (0..=j).fold(Rational::from_i64(0), |acc, k| {
                acc + Rational::from_f64(stirling2(j, k)) * factorial[k as usize].clone()
            })
        })
        .collect();
    let minus_mean = -raw[1].clone();
    let s = Rational::from_f64(s);
    (0..=order)
        .map(|k| {
            let central = (0..=k).fold(Rational::from_i64(0), |acc, j| {
                acc + binomial::<Rational>(k.into(), j.into())
                    * raw[j as usize].clone()
                    * powi(&minus_mean, i64::from(k - j))
            });
            (central / powi(&s, k.into())).to_f64()
        })
        .collect()
}

/// All exponent vectors of length `m` with total degree `<= max_total` and entries
/// bounded by `caps`, in graded lexicographic order.
fn multi_indices(m: usize, max_total: u32, caps: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        let mut cur = vec![0u32; m];
        compositions(0, total, caps, &mut cur, &mut out);
    }
    out
}

fn compositions(x: usize, left: u32, caps: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if x == cur.len() {
        if left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for k in (0..=left.min(caps[x])).rev() {
        cur[x] = k;
        compositions(x + 1, left - k, caps, cur, out);
    }
    cur[x] = 0;
}

impl OrthogonalProjection {
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    fn leading_scale(&self) -> f64 {
        self.scales
            .iter()
            .zip(&self.degrees)
            .map(|(s, &d)| s.powi(d as i32))
            .product()
    }

    pub fn eval(&self, eta: &[f64]) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        let u: Vec<f64> = eta
            .iter()
            .zip(&self.centers)
            .zip(&self.scales)
            .map(|((e, c), s)| (e - c) / s)
            .collect();
        let total: f64 = self
            .terms
            .iter()
            .map(|(a, c)| c * a.iter().zip(&u).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
            .sum();
        self.leading_scale() * total
    }

    pub fn eval_counts(&self, eta: &[u32]) -> f64 {
        let v: Vec<f64> = eta.iter().map(|&k| f64::from(k)).collect();
        self.eval(&v)
    }

    /// `E[self * other]` under the product law `marginals` the projections were
    /// built for, from exact moments in the centred and scaled variables.
    pub fn inner_product(&self, other: &OrthogonalProjection, marginals: &[CountDistribution]) -> Result<f64> {
        if marginals.len() != self.degrees.len() || other.degrees.len() != self.degrees.len() {
            return Err(Error::DimensionMismatch { expected: self.degrees.len(), got: marginals.len() });
        }
        if self.centers != other.centers || self.scales != other.scales {
            return Err(invalid("projections were built for different laws"));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(0.0);
        }
        let top = |terms: &[(Vec<u32>, f64)], x: usize| terms.iter().map(|(a, _)| a[x]).max().unwrap_or(0);
        let moments: Vec<Vec<f64>> = marginals
            .iter()
            .enumerate()
            .map(|(x, m)| scaled_central_moments(m, self.scales[x], top(&self.terms, x) + top(&other.terms, x)))
            .collect();
        let mut total = 0.0;
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let joint: f64 = (0..a.len()).map(|x| moments[x][(a[x] + b[x]) as usize]).product();
                total += ca * cb * joint;
            }
        }
        Ok(self.leading_scale() * other.leading_scale() * total)
    }

    /// Coefficients in the original monomial basis `prod_x eta_x^{e_x}`.
    pub fn monomial_coefficients(&self) -> BTreeMap<Vec<u32>, f64> {
        let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let lead = self.leading_scale();
        for (a, c) in &self.terms {
            // prod_x ((eta_x - mu_x)/s_x)^{a_x}
            let mut partial: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), c * lead)];
            for (x, &k) in a.iter().enumerate() {
                let (mu, s) = (self.centers[x], self.scales[x]);
                let mut next = Vec::new();
                for (e, w) in &partial {
                    for j in 0..=k {
                        let coeff = binomial::<f64>(k.into(), j.into())
                            * (-mu).powi((k - j) as i32)
                            / s.powi(k as i32);
                        let mut e2 = e.clone();
                        e2.push(j);
                        next.push((e2, w * coeff));
                    }
                }
                partial = next;
            }
            for (e, w) in partial {
                *out.entry(e).or_insert(0.0) += w;
            }
        }
        out
    }
}
