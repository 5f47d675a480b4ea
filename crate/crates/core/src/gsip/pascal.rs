use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::conductance::ConductanceFn;
use super::dynamics::GsipModel;
use crate::error::{invalid, Result};
use crate::pointconfig::{AlphaMeasure, CountingMeasure};
use crate::rng::substream;

/// Largest `p` accepted by the logarithmic sampler.
pub const MAX_PASCAL_P: f64 = 0.95;

/// Draw from the logarithmic law `P(k) = p^k / (k (-ln(1-p)))`, `k >= 1`, by
/// inverting the CDF.
pub fn sample_logarithmic<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u32 {
    let u = rng.random::<f64>();
    let mut k = 1u32;
    let mut pk = p / -(-p).ln_1p();
    let mut cdf = pk;
    while u >= cdf && pk > 0.0 {
        pk *= p * f64::from(k) / f64::from(k + 1);
        k += 1;
        cdf += pk;
    }
    k
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= MAX_PASCAL_P) {
        return Err(invalid(format!("Pascal parameter p must lie in (0, {MAX_PASCAL_P}], got {p}")));
    }
    Ok(())
}

/// Pascal (negative binomial) point process with parameters `alpha` and `p`, as a
/// compound Poisson process: `K ~ Poi(alpha(E) (-ln(1-p)))` marks at
/// `alpha/alpha(E)`-distributed locations, each carrying a logarithmic number of
/// points.
pub fn sample_pascal_with<R: Rng + ?Sized>(model: &GsipModel, p: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_p(p)?;
    let mean = model.alpha().total() * -(-p).ln_1p();
    let k = Poisson::new(mean).map_err(|e| invalid(e.to_string()))?.sample(rng) as u64;
    let mut points = Vec::new();
    for _ in 0..k {
        let x = model.sample_alpha(rng);
        let mult = sample_logarithmic(p, rng);
        points.extend(std::iter::repeat_n(x, mult as usize));
    }
    Ok(points)
}

pub fn sample_pascal(alpha: &AlphaMeasure, p: f64, seed: u64) -> Result<CountingMeasure> {
    let model = GsipModel::new(alpha.clone(), ConductanceFn::Constant { kappa: 0.0 })?;
    let points = sample_pascal_with(&model, p, &mut substream(seed, 0))?;
    CountingMeasure::from_coords(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::CountDistribution;
    use crate::pointconfig::Region;

    #[test]
    fn logarithmic_pmf() {
        let p = 0.6;
        let mut rng = substream(1, 0);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let k = sample_logarithmic(p, &mut rng) as usize;
            if k <= 3 {
                counts[k] += 1;
            }
        }
        let norm = -(1.0f64 - p).ln();
        for k in 1..=3 {
            let expected = p.powi(k as i32) / (k as f64 * norm);
            let se = (expected * (1.0 - expected) / n as f64).sqrt();
            let got = counts[k] as f64 / n as f64;
            assert!((got - expected).abs() < 4.0 * se, "k={k} {got} vs {expected}");
        }
    }

    #[test]
    fn tiny_p_is_almost_always_empty() {
        let alpha = AlphaMeasure::uniform(1.0).unwrap();
        let nonempty = (0..1000).filter(|&s| sample_pascal(&alpha, 1e-9, s).unwrap().total() > 0).count();
        assert_eq!(nonempty, 0);
    }

    #[test]
    fn cell_zero_probability() {
        let alpha = AlphaMeasure::new(vec![1.0, 2.0], vec![(0.25, 0.5)]).unwrap();
        let model = GsipModel::new(alpha.clone(), ConductanceFn::Constant { kappa: 0.0 }).unwrap();
        let cell = Region::Interval(0.0, 0.5);
        let p = 0.4;
        let n = 50_000;
        let mut rng = substream(3, 0);
        let zeros = (0..n)
            .filter(|_| {
                let pts = sample_pascal_with(&model, p, &mut rng).unwrap();
                pts.iter().all(|&x| x >= 0.5)
            })
            .count() as f64
            / n as f64;
        let a = alpha.mass(&cell);
        let expected = CountDistribution::NegBinomial { a, p }.pmf(0);
        assert!((expected - (1.0 - p).powf(a)).abs() < 1e-14);
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((zeros - expected).abs() < 4.0 * se);
    }

    #[test]
    fn rejects_bad_p() {
        let alpha = AlphaMeasure::uniform(1.0).unwrap();
        assert!(sample_pascal(&alpha, 0.0, 1).is_err());
        assert!(sample_pascal(&alpha, 0.99, 1).is_err());
    }
}
