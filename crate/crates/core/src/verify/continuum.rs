use rayon::prelude::*;
use serde_json::json;

use super::stats::{chi_square_counts, chi_square_z, correlation, mean_estimate};
use crate::discrete::{build_generator, reversible_measure, semigroup_apply_transpose};
use crate::error::{invalid, Result};
use crate::gsip::{cell_counts, reduce_to_discrete, sample_pascal_with, GsipModel, DEFAULT_MAX_EVENTS};
use crate::orthopoly::CountDistribution;
use crate::pointconfig::{factorial_integral, CountingMeasure, Factor, Point, Region, SymmetricFunctionSpec};
use crate::report::{combine, VerificationReport};
use crate::rng::substream;
use crate::scalar::{Rational, Scalar};

/// Largest initial configuration accepted by the Monte Carlo intertwining check.
pub const MAX_INITIAL_POINTS: usize = 12;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn orderings(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in orderings(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

/// `E_eta[int f d eta_t^(n)]` by simulating the process from `eta0`, against
/// `sum over injective n-tuples of eta0's particles of E[f(X_t)]` with `X` the
/// labelled `n`-particle process started from the tuple.
///
/// Tuples are grouped into unordered sets: the labelled dynamics is exchangeable,
/// so each set contributes the expectation of the sum of `f` over all orderings of
/// one labelled run.
pub fn mc_classical_intertwining_gsip(
    model: &GsipModel,
    eta0: &[f64],
    f: &SymmetricFunctionSpec,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let n = f.arity();
    if n == 0 || n > 3 {
        return Err(invalid(format!("the Monte Carlo intertwining check takes 1 <= n <= 3, got {n}")));
    }
    if eta0.len() > MAX_INITIAL_POINTS {
        return Err(invalid(format!("at most {MAX_INITIAL_POINTS} initial points, got {}", eta0.len())));
    }
    let inputs = json!({
        "alpha": model.alpha(), "c": model.conductance(), "eta0": eta0,
        "f": format!("{f:?}"), "t": t, "samples": samples, "seed": seed,
    });
    let check = "mc_intertwining_gsip";
    if n > eta0.len() {
        return Ok(VerificationReport::monte_carlo(check, &inputs, 0.0, 0.0, 0.0, seed)
            .with_note("fewer particles than arguments: both sides vanish"));
    }
    if samples < 2 {
        return Err(crate::Error::InsufficientSamples("at least two samples are needed".into()));
    }
    let start = CountingMeasure::from_coords(eta0)?;
    let lhs_values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let mut x = eta0.to_vec();
            model.evolve(&mut x, t, DEFAULT_MAX_EVENTS, &mut substream(seed, r as u64), None)?;
            factorial_integral(&CountingMeasure::from_coords(&x)?, n, f)
        })
        .collect::<Result<_>>()?;
    let lhs = mean_estimate(&lhs_values);

    let perms = orderings(n);
    let mut rhs = 0.0;
    let mut rhs_var = 0.0;
    for (s, set) in subsets(start.total(), n).iter().enumerate() {
        let values: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|r| {
                let mut x: Vec<f64> = set.iter().map(|&i| eta0[i]).collect();
                let stream = ((s as u64 + 1) << 32) | r as u64;
                model.evolve(&mut x, t, DEFAULT_MAX_EVENTS, &mut substream(seed, stream), None)?;
                Ok(perms
                    .iter()
                    .map(|pi| {
                        let args: Vec<Point> = pi.iter().map(|&k| Point::Coord(x[k])).collect();
                        f.eval(&args)
                    })
                    .sum())
            })
            .collect::<Result<_>>()?;
        let est = mean_estimate(&values);
        rhs += est.mean;
        rhs_var += est.std_error * est.std_error;
    }
    let se = (lhs.std_error * lhs.std_error + rhs_var).sqrt();
    Ok(VerificationReport::monte_carlo(check, &inputs, lhs.mean, rhs, se, seed))
}

fn pascal_counts(model: &GsipModel, p: f64, t: f64, cells: &[Region], samples: usize, seed: u64) -> Result<Vec<Vec<u32>>> {
    (0..samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r as u64);
            let mut x = sample_pascal_with(model, p, &mut rng)?;
            if t > 0.0 {
                model.evolve(&mut x, t, DEFAULT_MAX_EVENTS, &mut rng, None)?;
            }
            Ok(cell_counts(&x, cells))
        })
        .collect()
}

/// Per-cell chi-square fit to `NB(alpha(A), p)` and pairwise correlation screens.
fn count_law_reports(
    check: &str,
    inputs: &serde_json::Value,
    model: &GsipModel,
    p: f64,
    cells: &[Region],
    counts: &[Vec<u32>],
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let n = counts.len() as f64;
    let mut parts = Vec::new();
    let columns: Vec<Vec<u32>> = (0..cells.len()).map(|i| counts.iter().map(|k| k[i]).collect()).collect();
    for (i, cell) in cells.iter().enumerate() {
        let law = CountDistribution::NegBinomial { a: model.alpha().mass(cell), p };
        let (stat, df) = chi_square_counts(&columns[i], |k| law.pmf(k))?;
        let z = chi_square_z(stat, df);
        parts.push(VerificationReport::from_z(check, inputs, stat, df as f64, (2.0 * df as f64).sqrt(), z, seed)
            .with_note(format!("cell {i}: chi-square with {df} degrees of freedom")));
    }
    let as_f64: Vec<Vec<f64>> = columns.iter().map(|c| c.iter().map(|&v| f64::from(v)).collect()).collect();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let r = correlation(&as_f64[i], &as_f64[j]);
            let se = 1.0 / n.sqrt();
            parts.push(VerificationReport::monte_carlo(check, inputs, r, 0.0, se, seed)
                .with_note(format!("correlation of cells {i} and {j}")));
        }
    }
    Ok(parts)
}

/// `Phi(y) = log((1 - p e^{-y}) / (1 - p))`.
pub fn pascal_laplace_exponent(p: f64, y: f64) -> f64 {
    ((1.0 - p * (-y).exp()) / (1.0 - p)).ln()
}

/// Pascal sampler against its defining properties: per-cell `NB(alpha(A), p)`
/// counts (zero-count frequency, mean, chi-square), uncorrelated disjoint cells
/// and the Laplace functional `E exp(-int f d zeta) = exp(-int Phi(f) d alpha)`.
pub fn pascal_sampler_check(
    model: &GsipModel,
    p: f64,
    cells: &[Region],
    laplace: &[Factor],
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let check = "pascal_sampler";
    let inputs = json!({
        "alpha": model.alpha(), "p": p, "cells": cells,
        "laplace": format!("{laplace:?}"), "samples": samples, "seed": seed,
    });
    let draws: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|r| sample_pascal_with(model, p, &mut substream(seed, r as u64)))
        .collect::<Result<_>>()?;
    let counts: Vec<Vec<u32>> = draws.iter().map(|x| cell_counts(x, cells)).collect();
    let mut parts = count_law_reports(check, &inputs, model, p, cells, &counts, seed)?;
    for (i, cell) in cells.iter().enumerate() {
        let law = CountDistribution::NegBinomial { a: model.alpha().mass(cell), p };
        let zero: Vec<f64> = counts.iter().map(|k| if k[i] == 0 { 1.0 } else { 0.0 }).collect();
        let est = mean_estimate(&zero);
        parts.push(VerificationReport::monte_carlo(check, &inputs, est.mean, law.pmf(0), est.std_error, seed)
            .with_note(format!("cell {i}: frequency of no points")));
        let values: Vec<f64> = counts.iter().map(|k| f64::from(k[i])).collect();
        let est = mean_estimate(&values);
        parts.push(VerificationReport::monte_carlo(check, &inputs, est.mean, law.mean(), est.std_error, seed)
            .with_note(format!("cell {i}: mean count")));
    }
    for (j, f) in laplace.iter().enumerate() {
        if f.bound() < 0.0 {
            return Err(invalid("Laplace test functions must be nonnegative"));
        }
        let values: Vec<f64> = draws
            .iter()
            .map(|x| (-x.iter().map(|&v| f.eval(&Point::Coord(v))).sum::<f64>()).exp())
            .collect();
        let est = mean_estimate(&values);
        let expected = (-model.alpha().integrate_map(f, |y| pascal_laplace_exponent(p, y))).exp();
        parts.push(VerificationReport::monte_carlo(check, &inputs, est.mean, expected, est.std_error, seed)
            .with_note(format!("Laplace functional {j}")));
    }
    Ok(combine(check, &inputs, &parts))
}

/// Starts from the Pascal law, runs the process to `t` and compares the cell
/// counts with `NB(alpha(A), p)` (chi-square per cell, pairwise correlations).
pub fn stationarity_check_gsip(
    model: &GsipModel,
    p: f64,
    t: f64,
    samples: usize,
    cells: &[Region],
    seed: u64,
) -> Result<VerificationReport> {
    let check = "gsip_stationarity";
    let inputs = json!({
        "alpha": model.alpha(), "c": model.conductance(), "p": p, "t": t,
        "cells": cells, "samples": samples, "seed": seed,
    });
    let counts = pascal_counts(model, p, t, cells, samples, seed)?;
    let parts = count_law_reports(check, &inputs, model, p, cells, &counts, seed)?;
    Ok(combine(check, &inputs, &parts))
}

/// Law of the cell counts at time `t` against the exact semigroup of the reduced
/// discrete inclusion process, state by state.
pub fn reduction_check_gsip(
    model: &GsipModel,
    cells: &[Region],
    eta0: &[f64],
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let sys = reduce_to_discrete(cells, model.conductance(), model.alpha())?;
    let start = cell_counts(eta0, cells);
    let n = start.iter().sum::<u32>() as usize;
    if n != eta0.len() {
        return Err(invalid("every initial point must lie in one of the cells"));
    }
    let g = build_generator::<f64>(&sys, n)?;
    let mut law = vec![0.0; g.sector.len()];
    law[g.sector.index_of(&start).expect("start is in its sector")] = 1.0;
    let exact = semigroup_apply_transpose(&g.q, t, &law)?;

    let hits: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let mut x = eta0.to_vec();
            model.evolve(&mut x, t, DEFAULT_MAX_EVENTS, &mut substream(seed, r as u64), None)?;
            let k = cell_counts(&x, cells);
            g.sector.index_of(&k).ok_or_else(|| invalid("cell counts left the sector"))
        })
        .collect::<Result<_>>()?;
    let mut freq = vec![0usize; g.sector.len()];
    for h in hits {
        freq[h] += 1;
    }
    let check = "gsip_reduction";
    let inputs = json!({
        "alpha": model.alpha(), "c": model.conductance(), "cells": cells,
        "eta0": eta0, "t": t, "samples": samples, "seed": seed,
    });
    let total = samples as f64;
    let parts: Vec<VerificationReport> = exact
        .iter()
        .zip(&freq)
        .enumerate()
        .map(|(i, (&pi, &f))| {
            let se = (pi.max(0.0) * (1.0 - pi).max(0.0) / total).sqrt();
            VerificationReport::monte_carlo(check, &inputs, f as f64 / total, pi, se, seed)
                .with_note(format!("state {:?}", g.sector.config(i)))
        })
        .collect();
    Ok(combine(check, &inputs, &parts))
}

/// Detailed balance of `⊗ NB(alpha(A_i), p)` for the reduced discrete inclusion
/// process, in exact rational arithmetic, for every particle number up to
/// `max_particles`.
pub fn reduced_detailed_balance(
    model: &GsipModel,
    cells: &[Region],
    p: f64,
    max_particles: usize,
) -> Result<VerificationReport> {
    let sys = reduce_to_discrete(cells, model.conductance(), model.alpha())?;
    let rho = reversible_measure(&sys, p / (1.0 - p))?;
    let inputs = json!({ "alpha": model.alpha(), "c": model.conductance(), "cells": cells, "p": p });
    let mut parts = Vec::new();
    for n in 1..=max_particles {
        let g = build_generator::<Rational>(&sys, n)?;
        let defect = rho.detailed_balance_defect(&g)?.to_f64();
        parts.push(VerificationReport::exact("reduced_detailed_balance", &inputs, defect, 0.0, 1e-12)
            .with_note(format!("{n} particles")));
    }
    Ok(combine("reduced_detailed_balance", &inputs, &parts))
}
