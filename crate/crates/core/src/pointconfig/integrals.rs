use super::function::SymmetricFunctionSpec;
use super::partition::set_partitions;
use super::point::{CountingMeasure, Point};
use crate::error::Result;

/// `int f d eta^(n)`: sum of `f` over ordered n-tuples of distinct particles.
///
/// Tuples run over particle indices, so repeated locations count with multiplicity.
pub fn factorial_integral(eta: &CountingMeasure, n: usize, f: &SymmetricFunctionSpec) -> Result<f64> {
    f.check_arity(n)?;
    if n > eta.total() {
        return Ok(0.0);
    }
    Ok(tuple_sum(eta.points(), f, true))
}

/// `int f d eta^{⊗n}`: sum of `f` over all ordered n-tuples of particles.
pub fn product_integral(eta: &CountingMeasure, n: usize, f: &SymmetricFunctionSpec) -> Result<f64> {
    f.check_arity(n)?;
    Ok(tuple_sum(eta.points(), f, false))
}

fn tuple_sum(points: &[Point], f: &SymmetricFunctionSpec, injective: bool) -> f64 {
    let n = f.arity();
    if n == 0 {
        return f.eval(&[]);
    }
    let mut used = vec![false; points.len()];
    match f {
        SymmetricFunctionSpec::Tensor(factors) => {
            let table: Vec<Vec<f64>> = factors
                .iter()
                .map(|g| points.iter().map(|p| g.eval(p)).collect())
                .collect();
            tensor_dfs(&table, 0, 1.0, injective, &mut used)
        }
        SymmetricFunctionSpec::Generic { .. } => {
            let mut args = Vec::with_capacity(n);
            generic_dfs(points, f, injective, &mut used, &mut args)
        }
    }
}

fn tensor_dfs(table: &[Vec<f64>], depth: usize, acc: f64, injective: bool, used: &mut [bool]) -> f64 {
    if depth == table.len() {
        return acc;
    }
    let mut total = 0.0;
    for (k, &v) in table[depth].iter().enumerate() {
        if v == 0.0 || (injective && used[k]) {
            continue;
        }
        used[k] = true;
        total += tensor_dfs(table, depth + 1, acc * v, injective, used);
        used[k] = false;
    }
    total
}

fn generic_dfs(
    points: &[Point],
    f: &SymmetricFunctionSpec,
    injective: bool,
    used: &mut [bool],
    args: &mut Vec<Point>,
) -> f64 {
    if args.len() == f.arity() {
        return f.eval(args);
    }
    let mut total = 0.0;
    for k in 0..points.len() {
        if injective && used[k] {
            continue;
        }
        used[k] = true;
        args.push(points[k]);
        total += generic_dfs(points, f, injective, used, args);
        args.pop();
        used[k] = false;
    }
    total
}

/// Lenard's K-transform `sum_n (1/n!) int F(delta_{x_1}+...+delta_{x_n}) eta^(n)(dx)`.
///
/// The `1/n!`-weighted sum over ordered distinct tuples equals a sum over
/// n-element sub-configurations, which is what is enumerated. Terms with
/// `n > max_depth` are dropped when a depth is given.
pub fn k_transform(
    eta: &CountingMeasure,
    config_fn: &dyn Fn(&CountingMeasure) -> f64,
    max_depth: Option<usize>,
) -> f64 {
    let total = eta.total();
    let depth = max_depth.unwrap_or(total).min(total);
    let mut sum = 0.0;
    let mut chosen = Vec::with_capacity(depth);
    subsets(eta, 0, depth, &mut chosen, config_fn, &mut sum);
    sum
}

fn subsets(
    eta: &CountingMeasure,
    start: usize,
    depth: usize,
    chosen: &mut Vec<usize>,
    config_fn: &dyn Fn(&CountingMeasure) -> f64,
    sum: &mut f64,
) {
    *sum += config_fn(&eta.select(chosen));
    if chosen.len() == depth {
        return;
    }
    for i in start..eta.total() {
        chosen.push(i);
        subsets(eta, i + 1, depth, chosen, config_fn, sum);
        chosen.pop();
    }
}

/// Lowering operator `(A F)(eta) = sum_{x in eta} F(eta - delta_x)`.
pub fn lowering(eta: &CountingMeasure, config_fn: &dyn Fn(&CountingMeasure) -> f64) -> f64 {
    (0..eta.total()).map(|i| config_fn(&eta.without_index(i))).sum()
}

/// `sum_sigma int (f)_sigma d eta^(|sigma|)`, which regroups `int f d eta^{⊗n}` by
/// which tuple entries coincide.
pub fn monomial_via_factorials(eta: &CountingMeasure, n: usize, f: &SymmetricFunctionSpec) -> Result<f64> {
    f.check_arity(n)?;
    if n == 0 {
        return Ok(f.eval(&[]));
    }
    let mut total = 0.0;
    for sigma in set_partitions(n)? {
        total += factorial_integral(eta, sigma.block_count(), &f.collapse(&sigma)?)?;
    }
    Ok(total)
}

/// Inverse of [`monomial_via_factorials`]:
/// `int f d eta^(n) = sum_sigma (-1)^{n-|sigma|} prod_A (|A|-1)! int (f)_sigma d eta^{⊗|sigma|}`.
pub fn factorial_via_monomials(eta: &CountingMeasure, n: usize, f: &SymmetricFunctionSpec) -> Result<f64> {
    f.check_arity(n)?;
    if n == 0 {
        return Ok(f.eval(&[]));
    }
    let mut total = 0.0;
    for sigma in set_partitions(n)? {
        let sign = if (n - sigma.block_count()).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mono = product_integral(eta, sigma.block_count(), &f.collapse(&sigma)?)?;
        total += sign * sigma.block_factorial_weight() * mono;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointconfig::{Factor, Region};
    use proptest::prelude::*;

    fn ones(n: usize) -> SymmetricFunctionSpec {
        SymmetricFunctionSpec::constant(1.0, n)
    }

    #[test]
    fn factorial_integral_examples() {
        let eta = CountingMeasure::from_occupancy(&[2, 1]);
        assert_eq!(factorial_integral(&eta, 2, &ones(2)).unwrap(), 6.0);
        let cell = Region::site(0);
        let eta3 = CountingMeasure::from_occupancy(&[3, 4]);
        let f = SymmetricFunctionSpec::tensor_indicator(&[cell], &[2]).unwrap();
        assert_eq!(factorial_integral(&eta3, 2, &f).unwrap(), 6.0);
        assert_eq!(factorial_integral(&eta, 3, &ones(3)).unwrap(), 6.0);
        assert_eq!(factorial_integral(&eta, 4, &ones(4)).unwrap(), 0.0);
        assert!(factorial_integral(&eta, 1, &ones(2)).is_err());
    }

    #[test]
    fn product_integral_examples() {
        let eta = CountingMeasure::from_occupancy(&[1, 1]);
        assert_eq!(product_integral(&eta, 2, &ones(2)).unwrap(), 4.0);
        let eta3 = CountingMeasure::from_occupancy(&[3, 4]);
        let f = SymmetricFunctionSpec::tensor_indicator(&[Region::site(0)], &[2]).unwrap();
        assert_eq!(product_integral(&eta3, 2, &f).unwrap(), 9.0);
        let c = SymmetricFunctionSpec::constant(2.5, 0);
        assert_eq!(product_integral(&eta, 0, &c).unwrap(), 2.5);
        assert_eq!(factorial_integral(&eta, 0, &c).unwrap(), 2.5);
    }

    #[test]
    fn k_transform_examples() {
        let cell = Region::site(0);
        let single_in_cell = |c: &CountingMeasure| {
            if c.total() == 1 && c.count_in(&Region::site(0)) == 1 {
                1.0
            } else {
                0.0
            }
        };
        let eta = CountingMeasure::from_occupancy(&[3, 2]);
        assert_eq!(eta.count_in(&cell), 3);
        assert_eq!(k_transform(&eta, &single_in_cell, None), 3.0);
        assert_eq!(k_transform(&eta, &|_| 1.0, None), 32.0);
        assert_eq!(k_transform(&CountingMeasure::empty(), &|_| 7.0, None), 7.0);
        // depth 1: F(0) + N
        assert_eq!(k_transform(&eta, &|_| 1.0, Some(1)), 6.0);
    }

    #[test]
    fn k_transform_matches_tuple_definition() {
        // (1/n!) int F(sum delta) d eta^(n) with F depending on the sub-configuration.
        let eta = CountingMeasure::from_occupancy(&[2, 1, 1]);
        let big_f = |c: &CountingMeasure| {
            let o = c.occupancy(3);
            (o[0] as f64 + 1.0).powi(2) - o[2] as f64 * 0.5 + c.total() as f64
        };
        let mut expected = big_f(&CountingMeasure::empty());
        let mut nf = 1.0;
        for n in 1..=eta.total() {
            nf *= n as f64;
            let g = SymmetricFunctionSpec::generic(n, 1e6, move |args| {
                big_f(&CountingMeasure::new(args.to_vec()).unwrap())
            })
            .unwrap();
            expected += factorial_integral(&eta, n, &g).unwrap() / nf;
        }
        assert!((k_transform(&eta, &big_f, None) - expected).abs() < 1e-12);
    }

    #[test]
    fn lowering_examples() {
        let a = CountingMeasure::from_occupancy(&[1]);
        assert_eq!(lowering(&a, &|_| 1.0), 1.0);
        let aa = CountingMeasure::from_occupancy(&[2]);
        let one_at_a = |c: &CountingMeasure| if c.occupancy(1) == vec![1] { 1.0 } else { 0.0 };
        assert_eq!(lowering(&aa, &one_at_a), 2.0);
        assert_eq!(lowering(&CountingMeasure::empty(), &|_| 1.0), 0.0);
    }

    #[test]
    fn partition_identity_examples() {
        let aa = CountingMeasure::from_occupancy(&[2]);
        assert_eq!(monomial_via_factorials(&aa, 2, &ones(2)).unwrap(), 4.0);
        for big_n in 0..6 {
            let eta = CountingMeasure::from_occupancy(&[big_n]);
            let expected = (big_n * big_n) as f64 - big_n as f64;
            assert_eq!(factorial_via_monomials(&eta, 2, &ones(2)).unwrap(), expected);
        }
    }

    #[test]
    fn signed_inversion_needs_block_factorials() {
        // Without the prod (|A|-1)! weights the signed sum is wrong from n = 3 on:
        // for f = 1 and N points it gives N^3 - 3N^2 + N instead of (N)_3.
        let eta = CountingMeasure::from_occupancy(&[4]);
        let f = ones(3);
        let unweighted: f64 = set_partitions(3)
            .unwrap()
            .iter()
            .map(|s| {
                let sign = if (3 - s.block_count()) % 2 == 0 { 1.0 } else { -1.0 };
                sign * product_integral(&eta, s.block_count(), &f.collapse(s).unwrap()).unwrap()
            })
            .sum();
        assert_eq!(unweighted, 64.0 - 48.0 + 4.0);
        assert_eq!(factorial_integral(&eta, 3, &f).unwrap(), 24.0);
        assert_eq!(factorial_via_monomials(&eta, 3, &f).unwrap(), 24.0);
    }

    fn small_case() -> impl Strategy<Value = (Vec<usize>, Vec<Vec<f64>>)> {
        (prop::collection::vec(0usize..3, 0..=5), 1usize..=4).prop_flat_map(|(sites, n)| {
            let factors = prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), n);
            (Just(sites), factors)
        })
    }

    proptest! {
        #[test]
        fn partition_identities_hold((sites, weights) in small_case()) {
            let eta = CountingMeasure::new(sites.into_iter().map(Point::Site).collect()).unwrap();
            let n = weights.len();
            let f = SymmetricFunctionSpec::Tensor(weights.into_iter().map(Factor::SiteWeights).collect());
            let fact = factorial_integral(&eta, n, &f).unwrap();
            let prod = product_integral(&eta, n, &f).unwrap();
            prop_assert!((fact - factorial_via_monomials(&eta, n, &f).unwrap()).abs() < 1e-12 * (1.0 + fact.abs()));
            prop_assert!((prod - monomial_via_factorials(&eta, n, &f).unwrap()).abs() < 1e-12 * (1.0 + prod.abs()));
        }

        #[test]
        fn factorial_mass_is_falling_factorial(total in 0usize..8, n in 0usize..5) {
            let eta = CountingMeasure::from_occupancy(&[total]);
            let expected: f64 = (0..n).map(|k| total as f64 - k as f64).product::<f64>().max(0.0);
            prop_assert_eq!(factorial_integral(&eta, n, &ones(n)).unwrap(), expected);
        }

        #[test]
        fn k_transform_is_linear(occ in prop::collection::vec(0usize..3, 3), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let eta = CountingMeasure::from_occupancy(&occ);
            let big_f = |c: &CountingMeasure| c.occupancy(3)[0] as f64 + 0.5;
            let big_g = |c: &CountingMeasure| (c.total() as f64).powi(2) - c.occupancy(3)[2] as f64;
            let lhs = k_transform(&eta, &|c| a * big_f(c) + b * big_g(c), None);
            let rhs = a * k_transform(&eta, &big_f, None) + b * k_transform(&eta, &big_g, None);
            prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
        }
    }
}
