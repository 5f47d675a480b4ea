use super::generator::SectorGenerator;
use super::sector::SectorEnumeration;
use super::system::SiteSystem;
use crate::error::{invalid, Result};
use crate::orthopoly::CountDistribution;
use crate::scalar::Scalar;

/// Product measure `⊗_x rho_{x,theta}` that is reversible for the site system:
/// `Bin(alpha_x, theta)` for exclusion, `Poi(alpha_x theta)` for independent
/// walkers, `NB(alpha_x, theta/(1+theta))` for inclusion.
#[derive(Debug, Clone)]
pub struct ReversibleMeasure {
    pub theta: f64,
    pub marginals: Vec<CountDistribution>,
    sigma: i8,
    alpha: Vec<f64>,
}

pub fn reversible_measure(sys: &SiteSystem, theta: f64) -> Result<ReversibleMeasure> {
    let ok = match sys.sigma() {
        -1 => theta > 0.0 && theta <= 1.0,
        _ => theta > 0.0 && theta.is_finite(),
    };
    if !ok {
        return Err(invalid(format!(
            "theta = {theta} outside the parameter range for sigma = {}",
            sys.sigma()
        )));
    }
    let marginals = sys
        .alpha()
        .iter()
        .map(|&a| match sys.sigma() {
            -1 => CountDistribution::Binomial { trials: a as u32, theta },
            0 => CountDistribution::Poisson { mean: a * theta },
            _ => CountDistribution::NegBinomial { a, p: theta / (1.0 + theta) },
        })
        .collect();
    Ok(ReversibleMeasure { theta, marginals, sigma: sys.sigma(), alpha: sys.alpha().to_vec() })
}

impl ReversibleMeasure {
    pub fn pmf(&self, eta: &[u32]) -> f64 {
        self.marginals.iter().zip(eta).map(|(d, &k)| d.pmf(k.into())).product()
    }

    /// `rho(eta) / rho(0)`, exact for rational scalars.
    ///
    /// Built from `alpha` and `theta` directly rather than from the rounded marginal
    /// parameters, so that site-to-site ratios stay exact.
    pub fn relative_weight<T: Scalar>(&self, eta: &[u32]) -> T {
        let theta = T::from_f64(self.theta);
        let odds = match self.sigma {
            -1 => theta.clone() / (T::one() - theta),
            0 => theta,
            _ => theta.clone() / (T::one() + theta),
        };
        let mut w = T::one();
        for (&a, &k) in self.alpha.iter().zip(eta) {
            let a = T::from_f64(a);
            for j in 0..k {
                let jj = T::from_i64(j.into());
                let num = match self.sigma {
                    -1 => a.clone() - jj.clone(),
                    0 => a.clone(),
                    _ => a.clone() + jj.clone(),
                };
                w = w * num * odds.clone() / (jj + T::one());
            }
        }
        w
    }

    /// `rho` conditioned on the sector, as a probability vector in sector order.
    pub fn sector_distribution(&self, sector: &SectorEnumeration) -> Result<Vec<f64>> {
        let w: Vec<f64> = sector.configs().iter().map(|eta| self.pmf(eta)).collect();
        let z: f64 = w.iter().sum();
        if !(z > 0.0) {
            return Err(invalid(format!(
                "sector with {} particles has zero mass under theta = {}",
                sector.particles(),
                self.theta
            )));
        }
        Ok(w.into_iter().map(|v| v / z).collect())
    }

    /// Largest `|rho(eta) q(eta,eta') - rho(eta') q(eta',eta)|` over the sector, with
    /// `rho` taken relative to `rho(0)` so rational inputs give an exact answer.
    pub fn detailed_balance_defect<T: Scalar>(&self, g: &SectorGenerator<T>) -> Result<T> {
        if self.theta >= 1.0 && self.sigma == -1 {
            return Err(invalid("relative weights need theta < 1 for exclusion"));
        }
        let weights: Vec<T> = g.sector.configs().iter().map(|eta| self.relative_weight(eta)).collect();
        let mut worst = T::zero();
        for i in 0..g.q.dim() {
            for (j, _) in g.q.row(i) {
                let flow = weights[i].clone() * g.q.entry(i, *j);
                let back = weights[*j].clone() * g.q.entry(*j, i);
                let d = (flow - back).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{build_generator, semigroup_apply_transpose};
    use crate::scalar::Rational;

    fn triangle(sigma: i8, alpha: Vec<f64>) -> SiteSystem {
        let c = vec![vec![0.0, 0.5, 1.5], vec![0.5, 0.0, 0.25], vec![1.5, 0.25, 0.0]];
        SiteSystem::new(3, c, alpha, sigma).unwrap()
    }

    #[test]
    fn marginal_families() {
        let r = reversible_measure(&triangle(0, vec![1.0, 2.0, 0.5]), 0.4).unwrap();
        assert_eq!(r.marginals[1], CountDistribution::Poisson { mean: 0.8 });
        let r = reversible_measure(&triangle(1, vec![1.0, 2.0, 0.5]), 1.0).unwrap();
        assert_eq!(r.marginals[0], CountDistribution::NegBinomial { a: 1.0, p: 0.5 });
        assert!(reversible_measure(&triangle(-1, vec![1.0, 2.0, 1.0]), 1.5).is_err());
        assert!(reversible_measure(&triangle(1, vec![1.0, 2.0, 1.0]), 0.0).is_err());
    }

    #[test]
    fn relative_weights_match_pmf_ratios() {
        for (sigma, alpha) in [(-1i8, vec![2.0, 1.0, 3.0]), (0, vec![0.5, 1.5, 2.0]), (1, vec![0.5, 1.5, 2.0])] {
            let r = reversible_measure(&triangle(sigma, alpha), 0.6).unwrap();
            let zero = r.pmf(&[0, 0, 0]);
            for eta in [[1u32, 0, 2], [2, 1, 0], [0, 1, 3]] {
                let w: f64 = r.relative_weight(&eta);
                assert!((w * zero - r.pmf(&eta)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn detailed_balance_is_exact() {
        for (sigma, alpha) in [(-1i8, vec![2.0, 1.0, 3.0]), (0, vec![0.5, 1.5, 2.0]), (1, vec![0.5, 1.5, 2.0])] {
            let sys = triangle(sigma, alpha);
            let r = reversible_measure(&sys, 0.375).unwrap();
            for n in 1..=3 {
                let g = build_generator::<Rational>(&sys, n).unwrap();
                assert_eq!(r.detailed_balance_defect(&g).unwrap(), Rational::from_i64(0));
            }
        }
    }

    #[test]
    fn sector_distribution_is_invariant() {
        let sys = triangle(1, vec![0.5, 1.5, 2.0]);
        let r = reversible_measure(&sys, 0.8).unwrap();
        let g = build_generator::<f64>(&sys, 3).unwrap();
        let pi = r.sector_distribution(&g.sector).unwrap();
        let moved = semigroup_apply_transpose(&g.q, 1.7, &pi).unwrap();
        for (a, b) in pi.iter().zip(&moved) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
