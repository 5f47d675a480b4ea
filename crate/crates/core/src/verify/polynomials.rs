use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::stats::mean_estimate;
use crate::discrete::{gram_schmidt_in, OrthogonalProjection};
use crate::error::{invalid, Result};
use crate::gsip::{cell_counts, sample_pascal_with, ConductanceFn, GsipModel};
use crate::orthopoly::{charlier, factorial, meixner, CountDistribution};
use crate::pointconfig::{lambda_n_integral, AlphaMeasure, Factor, Region, SymmetricFunctionSpec};
use crate::report::{combine, VerificationReport};
use crate::rng::substream;

/// Completely independent point process on `[0,1)` with a given mean structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum PointLaw {
    /// Poisson process with intensity measure `alpha`.
    Poisson,
    /// Pascal process with parameters `alpha` and `p`.
    Pascal { p: f64 },
}

impl PointLaw {
    /// Law of the number of points in a set of `alpha`-mass `mass`.
    pub fn count_law(&self, mass: f64) -> CountDistribution {
        match *self {
            PointLaw::Poisson => CountDistribution::Poisson { mean: mass },
            PointLaw::Pascal { p } => CountDistribution::NegBinomial { a: mass, p },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, model: &GsipModel, rng: &mut R) -> Result<Vec<f64>> {
        match *self {
            PointLaw::Poisson => {
                let mean = model.alpha().total();
                let k = Poisson::new(mean).map_err(|e| invalid(e.to_string()))?.sample(rng) as u64;
                Ok((0..k).map(|_| model.sample_alpha(rng)).collect())
            }
            PointLaw::Pascal { p } => sample_pascal_with(model, p, rng),
        }
    }
}

fn sampling_model(alpha: &AlphaMeasure) -> Result<GsipModel> {
    GsipModel::new(alpha.clone(), ConductanceFn::Constant { kappa: 0.0 })
}

fn check_disjoint(cells: &[Region]) -> Result<()> {
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            if !cells[i].is_disjoint(&cells[j]) {
                return Err(invalid(format!("cells {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}

/// Cell counts of `samples` independent draws, draw `r` using stream `r`.
fn sampled_counts(law: PointLaw, alpha: &AlphaMeasure, cells: &[Region], samples: usize, seed: u64) -> Result<Vec<Vec<u32>>> {
    let model = sampling_model(alpha)?;
    (0..samples)
        .into_par_iter()
        .map(|r| {
            let pts = law.sample(&model, &mut substream(seed, r as u64))?;
            Ok(cell_counts(&pts, cells))
        })
        .collect()
}

/// Exact comparison with tolerance relative to the size of `rhs` (absolute below 1).
pub(crate) fn scaled_exact(check: &str, inputs: &serde_json::Value, lhs: f64, rhs: f64, tolerance: f64) -> VerificationReport {
    VerificationReport::exact(check, inputs, lhs, rhs, tolerance * rhs.abs().max(1.0))
}

/// Projection vs closed-form product on sampled configurations, plus Monte Carlo
/// orthogonality of the projection to the constant and to each cell count.
fn product_check(
    check: &str,
    law: PointLaw,
    alpha: &AlphaMeasure,
    cells: &[Region],
    degrees: &[u32],
    samples: usize,
    seed: u64,
    tolerance: f64,
    closed_form: &dyn Fn(&[u32], &[f64]) -> f64,
) -> Result<VerificationReport> {
    check_disjoint(cells)?;
    if cells.len() != degrees.len() {
        return Err(crate::Error::DimensionMismatch { expected: cells.len(), got: degrees.len() });
    }
    let masses: Vec<f64> = cells.iter().map(|c| alpha.mass(c)).collect();
    let marginals: Vec<CountDistribution> = masses.iter().map(|&m| law.count_law(m)).collect();
    let oracle = gram_schmidt_in(&marginals, degrees)?;
    let inputs = json!({ "law": law, "alpha": alpha, "cells": cells, "degrees": degrees, "samples": samples, "seed": seed });
    let counts = sampled_counts(law, alpha, cells, samples, seed)?;

    let mut parts: Vec<VerificationReport> = counts
        .iter()
        .map(|k| scaled_exact(check, &inputs, oracle.eval_counts(k), closed_form(k, &masses), tolerance))
        .collect();

    let n: u32 = degrees.iter().sum();
    if n > 0 && samples > 1 {
        let values: Vec<f64> = counts.iter().map(|k| oracle.eval_counts(k)).collect();
        let mut tests: Vec<Vec<f64>> = vec![values.clone()];
        if n > 1 {
            for x in 0..cells.len() {
                tests.push(values.iter().zip(&counts).map(|(v, k)| v * f64::from(k[x])).collect());
            }
        }
        for t in tests {
            let est = mean_estimate(&t);
            parts.push(VerificationReport::monte_carlo(check, &inputs, est.mean, 0.0, est.std_error, seed));
        }
    }
    Ok(combine(check, &inputs, &parts))
}

/// The projection of `prod_k eta(A_k)^{d_k}` under a Pascal process equals
/// `prod_k M_{d_k}(eta(A_k); alpha(A_k), p)`.
pub fn meixner_product_check(
    alpha: &AlphaMeasure,
    p: f64,
    cells: &[Region],
    degrees: &[u32],
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let closed = |k: &[u32], masses: &[f64]| -> f64 {
        degrees
            .iter()
            .zip(k)
            .zip(masses)
            .map(|((&d, &c), &a)| meixner(d, c.into(), a, p))
            .product()
    };
    product_check("meixner_product", PointLaw::Pascal { p }, alpha, cells, degrees, samples, seed, tolerance, &closed)
}

/// Poisson analogue of [`meixner_product_check`] with Charlier polynomials, plus
/// the exact orthogonality relation `E[I_n(f)^2] = n! int f~^2 d lambda^{⊗n}`.
pub fn charlier_product_check(
    lambda: &AlphaMeasure,
    cells: &[Region],
    degrees: &[u32],
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let closed = |k: &[u32], masses: &[f64]| -> f64 {
        degrees
            .iter()
            .zip(k)
            .zip(masses)
            .map(|((&d, &c), &m)| charlier(d, c.into(), m))
            .product()
    };
    let pointwise = product_check("charlier_product", PointLaw::Poisson, lambda, cells, degrees, samples, seed, tolerance, &closed)?;

    let masses: Vec<f64> = cells.iter().map(|c| lambda.mass(c)).collect();
    let marginals: Vec<CountDistribution> = masses.iter().map(|&m| CountDistribution::Poisson { mean: m }).collect();
    let oracle = gram_schmidt_in(&marginals, degrees)?;
    let norm = oracle.inner_product(&oracle, &marginals)?;
    // n! int f~^2 d lambda^{⊗n} = prod_k d_k! lambda(B_k)^{d_k} for disjoint cells
    let expected: f64 = degrees
        .iter()
        .zip(&masses)
        .map(|(&d, &m)| factorial::<f64>(d) * m.powi(d as i32))
        .product();
    let inputs = json!({ "lambda": lambda, "cells": cells, "degrees": degrees });
    let mut parts = vec![pointwise, scaled_exact("charlier_orthogonality", &inputs, norm, expected, tolerance)];
    for other in neighbouring_degrees(degrees) {
        let q = gram_schmidt_in(&marginals, &other)?;
        let cross = oracle.inner_product(&q, &marginals)?;
        let scale = (norm * q.inner_product(&q, &marginals)?).sqrt();
        parts.push(scaled_exact("charlier_orthogonality", &inputs, cross / scale.max(1.0), 0.0, tolerance));
    }
    Ok(combine("charlier_product", &inputs, &parts))
}

/// Degree vectors of the same or one lower total degree that differ from `d`.
fn neighbouring_degrees(d: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if let Some(i) = d.iter().position(|&v| v > 0) {
        let mut lower = d.to_vec();
        lower[i] -= 1;
        out.push(lower.clone());
        if d.len() > 1 {
            let mut moved = lower;
            moved[(i + 1) % d.len()] += 1;
            out.push(moved);
        }
    }
    out
}

/// `I_{d_1+...+d_N}(f_1 ⊗ ... ⊗ f_N) = I_{d_1}(f_1) ... I_{d_N}(f_N)` for `f_i`
/// supported on disjoint groups of cells, on sampled configurations.
pub fn factorization_check(
    law: PointLaw,
    alpha: &AlphaMeasure,
    groups: &[(Vec<Region>, Vec<u32>)],
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let cells: Vec<Region> = groups.iter().flat_map(|(c, _)| c.iter().cloned()).collect();
    let degrees: Vec<u32> = groups.iter().flat_map(|(_, d)| d.iter().copied()).collect();
    check_disjoint(&cells)?;
    for (c, d) in groups {
        if c.len() != d.len() {
            return Err(crate::Error::DimensionMismatch { expected: c.len(), got: d.len() });
        }
    }
    let marginals: Vec<CountDistribution> = cells.iter().map(|c| law.count_law(alpha.mass(c))).collect();
    let joint = gram_schmidt_in(&marginals, &degrees)?;
    let mut offset = 0;
    let mut factors: Vec<(std::ops::Range<usize>, OrthogonalProjection)> = Vec::new();
    for (c, d) in groups {
        let range = offset..offset + c.len();
        factors.push((range.clone(), gram_schmidt_in(&marginals[range], d)?));
        offset += c.len();
    }
    let inputs = json!({ "law": law, "alpha": alpha, "cells": cells, "degrees": degrees, "samples": samples, "seed": seed });
    let counts = sampled_counts(law, alpha, &cells, samples, seed)?;
    let parts: Vec<VerificationReport> = counts
        .iter()
        .map(|k| {
            let product: f64 = factors.iter().map(|(r, p)| p.eval_counts(&k[r.clone()])).product();
            scaled_exact("factorization", &inputs, joint.eval_counts(k), product, tolerance)
        })
        .collect();
    Ok(combine("factorization", &inputs, &parts))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

/// `E_rho[I_n(f)^2]` under the Pascal law, from exact moments, against
/// `p^n n! / (1-p)^{2n} int f~^2 d lambda_n` with `f~` the symmetrisation of the
/// tensor indicator `1_{A_1}^{⊗d_1} ⊗ ... ⊗ 1_{A_N}^{⊗d_N}`.
pub fn lambda_orthogonality_check(
    alpha: &AlphaMeasure,
    p: f64,
    cells: &[Region],
    degrees: &[u32],
    tolerance: f64,
) -> Result<VerificationReport> {
    check_disjoint(cells)?;
    let n: u32 = degrees.iter().sum();
    if n > 6 {
        return Err(invalid("lambda orthogonality is checked up to total degree 6"));
    }
    let marginals: Vec<CountDistribution> =
        cells.iter().map(|c| CountDistribution::NegBinomial { a: alpha.mass(c), p }).collect();
    let oracle = gram_schmidt_in(&marginals, degrees)?;
    let lhs = oracle.inner_product(&oracle, &marginals)?;

    let slots: Vec<Factor> = cells
        .iter()
        .zip(degrees)
        .flat_map(|(c, &d)| std::iter::repeat_n(Factor::Indicator(c.clone()), d as usize))
        .collect();
    let n = n as usize;
    let perms = permutations(n);
    let mut sym = 0.0;
    for pi in &perms {
        let f = SymmetricFunctionSpec::Tensor(
            (0..n).map(|k| Factor::Product(vec![slots[pi[k]].clone(), slots[k].clone()])).collect(),
        );
        sym += lambda_n_integral(alpha, n, &f)?;
    }
    sym /= perms.len() as f64;
    let rhs = p.powi(n as i32) * factorial::<f64>(n as u32) / (1.0 - p).powi(2 * n as i32) * sym;
    let inputs = json!({ "alpha": alpha, "p": p, "cells": cells, "degrees": degrees });
    Ok(scaled_exact("lambda_orthogonality", &inputs, lhs, rhs, tolerance))
}
