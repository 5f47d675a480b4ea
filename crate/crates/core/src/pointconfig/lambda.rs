use super::alpha::AlphaMeasure;
use super::function::{Factor, SymmetricFunctionSpec};
use super::partition::set_partitions;
use crate::error::{Error, Result};

fn tensor_factors(f: &SymmetricFunctionSpec) -> Result<&[Factor]> {
    match f {
        SymmetricFunctionSpec::Tensor(fs) => Ok(fs),
        SymmetricFunctionSpec::Generic { .. } => Err(Error::Unsupported(
            "generic evaluators have no closed-form alpha integral".into(),
        )),
    }
}

fn block_integral(alpha: &AlphaMeasure, factors: &[Factor], block: &[usize]) -> f64 {
    alpha.integrate(&Factor::Product(block.iter().map(|&i| factors[i].clone()).collect()))
}

/// `lambda_n(f) = sum_sigma prod_{A in sigma} (|A|-1)! int (f)_sigma d alpha^{⊗|sigma|}`.
pub fn lambda_n_integral(alpha: &AlphaMeasure, n: usize, f: &SymmetricFunctionSpec) -> Result<f64> {
    f.check_arity(n)?;
    let factors = tensor_factors(f)?;
    if n == 0 {
        return Ok(1.0);
    }
    Ok(set_partitions(n)?
        .iter()
        .map(|sigma| {
            sigma.block_factorial_weight()
                * sigma
                    .blocks()
                    .iter()
                    .map(|b| block_integral(alpha, factors, b))
                    .product::<f64>()
        })
        .sum())
}

/// `lambda_n(f)` built as `lambda_1 = alpha`, `lambda_{k+1} = lambda_k k_{k,k+1}` where the
/// kernel either draws a fresh `alpha`-distributed point or repeats one of the `k`
/// coordinates already present.
pub fn lambda_sequential(alpha: &AlphaMeasure, f: &SymmetricFunctionSpec) -> Result<f64> {
    let factors = tensor_factors(f)?;
    let n = factors.len();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut owner = vec![0usize; n];
    Ok(extend(alpha, factors, 0, &mut groups, &mut owner))
}

fn extend(
    alpha: &AlphaMeasure,
    factors: &[Factor],
    j: usize,
    groups: &mut Vec<Vec<usize>>,
    owner: &mut [usize],
) -> f64 {
    if j == factors.len() {
        return groups.iter().map(|g| block_integral(alpha, factors, g)).product();
    }
    owner[j] = groups.len();
    groups.push(vec![j]);
    let mut total = extend(alpha, factors, j + 1, groups, owner);
    groups.pop();
    for i in 0..j {
        let g = owner[i];
        owner[j] = g;
        groups[g].push(j);
        total += extend(alpha, factors, j + 1, groups, owner);
        groups[g].pop();
    }
    total
}
