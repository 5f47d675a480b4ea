use rand::Rng;
use serde_json::json;

use super::polynomials::scaled_exact;
use crate::discrete::{build_generator, consistency_commutator, reversible_measure, SiteSystem};
use crate::error::{invalid, Result};
use crate::orthopoly::{meixner, PolyParams};
use crate::pointconfig::{
    factorial_integral, factorial_via_monomials, monomial_via_factorials, product_integral, CountingMeasure,
    Factor, Point, SymmetricFunctionSpec,
};
use crate::report::{combine, VerificationReport};
use crate::rng::substream;
use crate::scalar::{binomial, Rational, Scalar};

/// `sum_x P_n(x) P_m(x) w(x)` against `1{n=m} * squared_norm(n)` for all
/// `n, m <= max_degree`, relative to `sqrt(norm_n norm_m)`.
pub fn orthogonality_check(params: PolyParams, max_degree: u32, tolerance: f64) -> Result<VerificationReport> {
    let inputs = json!({ "params": params, "max_degree": max_degree });
    let mut parts = Vec::new();
    for n in 0..=max_degree {
        for m in n..=max_degree {
            if let PolyParams::Krawtchouk { trials, .. } = params {
                if m > trials {
                    continue;
                }
            }
            let got = params.quadrature(n, m)?;
            let scale = (params.squared_norm(n)? * params.squared_norm(m)?).sqrt();
            let expected = if n == m { params.squared_norm(n)? } else { 0.0 };
            parts.push(
                VerificationReport::exact("orthogonality", &inputs, got / scale, expected / scale, tolerance)
                    .with_note(format!("n={n}, m={m}")),
            );
        }
    }
    Ok(combine("orthogonality", &inputs, &parts))
}

/// `M_n(x+y; a+b; p) = sum_k binom(n,k) M_k(x; a; p) M_{n-k}(y; b; p)` on the grid
/// `n <= max_degree`, `x, y <= max_x`, relative to `max(1, |lhs|)`.
pub fn meixner_convolution_check(
    a: f64,
    b: f64,
    p: f64,
    max_degree: u32,
    max_x: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    PolyParams::Meixner { a, p }.validate()?;
    PolyParams::Meixner { a: b, p }.validate()?;
    let inputs = json!({ "a": a, "b": b, "p": p, "max_degree": max_degree, "max_x": max_x });
    let mut parts = Vec::new();
    for n in 0..=max_degree {
        for x in 0..=max_x {
            for y in 0..=max_x {
                let joint = meixner(n, x + y, a + b, p);
                let split: f64 = (0..=n)
                    .map(|k| binomial::<f64>(n.into(), k.into()) * meixner(k, x, a, p) * meixner(n - k, y, b, p))
                    .sum();
                parts.push(
                    scaled_exact("meixner_convolution", &inputs, split, joint, tolerance)
                        .with_note(format!("n={n}, x={x}, y={y}")),
                );
            }
        }
    }
    Ok(combine("meixner_convolution", &inputs, &parts))
}

/// `||Q_n A - A Q_{n-1}||_max` for `1 <= n <= max_n`. With `exact` the generators
/// are built over the rationals from the binary values of the rates.
pub fn consistency_check(sys: &SiteSystem, max_n: usize, exact: bool, tolerance: f64) -> Result<VerificationReport> {
    let inputs = json!({ "system": sys, "max_n": max_n, "exact": exact });
    let mut parts = Vec::new();
    for n in 1..=max_n {
        let defect = if exact {
            consistency_commutator::<Rational>(sys, n)?.to_f64()
        } else {
            consistency_commutator::<f64>(sys, n)?
        };
        parts.push(
            VerificationReport::exact("consistency", &inputs, defect, 0.0, tolerance).with_note(format!("n={n}")),
        );
    }
    Ok(combine("consistency", &inputs, &parts))
}

/// Detailed balance of `rho_theta` in every sector with at most `max_n` particles,
/// over the rationals.
pub fn detailed_balance_check(sys: &SiteSystem, theta: f64, max_n: usize, tolerance: f64) -> Result<VerificationReport> {
    let rho = reversible_measure(sys, theta)?;
    let inputs = json!({ "system": sys, "theta": theta, "max_n": max_n });
    let mut parts = Vec::new();
    for n in 1..=max_n {
        let g = build_generator::<Rational>(sys, n)?;
        let defect = rho.detailed_balance_defect(&g)?.to_f64();
        parts.push(
            VerificationReport::exact("detailed_balance", &inputs, defect, 0.0, tolerance).with_note(format!("n={n}")),
        );
    }
    Ok(combine("detailed_balance", &inputs, &parts))
}

fn random_factor<R: Rng>(rng: &mut R, on_sites: bool) -> Factor {
    if on_sites {
        Factor::SiteWeights((0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
    } else {
        Factor::CellLevels((0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
    }
}

/// Random instances of the monomial/factorial conversions against brute-force
/// tuple sums: up to `max_points` points (sites or coordinates, with repeats),
/// random tensor test functions of arity `1..=max_degree`.
pub fn partition_identity_check(
    instances: usize,
    max_points: usize,
    max_degree: usize,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    if max_degree == 0 {
        return Err(invalid("max_degree must be positive"));
    }
    let inputs = json!({ "instances": instances, "max_points": max_points, "max_degree": max_degree, "seed": seed });
    let mut parts = Vec::new();
    for i in 0..instances {
        let mut rng = substream(seed, i as u64);
        let on_sites = rng.random_bool(0.5);
        let count = rng.random_range(0..=max_points);
        let points: Vec<Point> = (0..count)
            .map(|_| {
                if on_sites {
                    Point::Site(rng.random_range(0..3))
                } else {
                    // a coarse grid so that coordinates repeat
                    Point::Coord(f64::from(rng.random_range(0..8u32)) / 8.0)
                }
            })
            .collect();
        let eta = CountingMeasure::new(points)?;
        let n = rng.random_range(1..=max_degree);
        let f = SymmetricFunctionSpec::Tensor((0..n).map(|_| random_factor(&mut rng, on_sites)).collect());
        let note = format!("instance {i}: {count} points, n={n}");
        parts.push(
            scaled_exact(
                "partition_identities",
                &inputs,
                monomial_via_factorials(&eta, n, &f)?,
                product_integral(&eta, n, &f)?,
                tolerance,
            )
            .with_note(format!("{note}, monomial")),
        );
        parts.push(
            scaled_exact(
                "partition_identities",
                &inputs,
                factorial_via_monomials(&eta, n, &f)?,
                factorial_integral(&eta, n, &f)?,
                tolerance,
            )
            .with_note(format!("{note}, factorial")),
        );
    }
    Ok(combine("partition_identities", &inputs, &parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_orthogonal() {
        for params in [
            PolyParams::Charlier { alpha: 1.0 },
            PolyParams::Meixner { a: 1.0, p: 0.5 },
            PolyParams::Krawtchouk { trials: 4, theta: 0.3 },
        ] {
            let r = orthogonality_check(params, 4, 1e-10).unwrap();
            assert!(r.pass, "{params:?}: {r:?}");
        }
    }

    #[test]
    fn convolution_small_grid() {
        assert!(meixner_convolution_check(0.7, 1.9, 0.35, 3, 4, 1e-10).unwrap().pass);
    }

    #[test]
    fn consistency_and_balance() {
        let c = vec![vec![0.0, 1.0, 0.5], vec![1.0, 0.0, 2.0], vec![0.5, 2.0, 0.0]];
        for sigma in [-1i8, 0, 1] {
            let sys = SiteSystem::new(3, c.clone(), vec![2.0, 1.0, 3.0], sigma).unwrap();
            let r = consistency_check(&sys, 3, true, 1e-12).unwrap();
            assert!(r.pass);
            assert_eq!(r.lhs, 0.0);
            assert!(detailed_balance_check(&sys, 0.25, 3, 1e-12).unwrap().pass);
        }
    }

    #[test]
    fn partition_instances() {
        let r = partition_identity_check(30, 5, 4, 9, 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
