use super::generator::GeneratorMatrix;
use crate::error::{invalid, Result};

/// Poisson tail mass left out of the uniformization series.
pub const UNIFORMIZATION_TAIL: f64 = 1e-14;

/// Largest `Lambda * t` handled in one series; longer times are split into steps.
const MAX_STEP_INTENSITY: f64 = 100.0;

/// `e^{tQ} v` for a function `v` of the state, by uniformization.
///
/// With `Lambda >= max |Q_ii|`, `P = I + Q/Lambda` is stochastic and
/// `e^{tQ} = sum_k Poi(Lambda t)(k) P^k`; the series stops once the Poisson tail
/// drops below [`UNIFORMIZATION_TAIL`].
pub fn semigroup_apply(q: &GeneratorMatrix<f64>, t: f64, v: &[f64]) -> Result<Vec<f64>> {
    uniformize(q, t, v, false)
}

/// `mu e^{tQ}` for a row vector `mu` (distribution transport).
pub fn semigroup_apply_transpose(q: &GeneratorMatrix<f64>, t: f64, mu: &[f64]) -> Result<Vec<f64>> {
    uniformize(q, t, mu, true)
}

fn uniformize(q: &GeneratorMatrix<f64>, t: f64, v: &[f64], transpose: bool) -> Result<Vec<f64>> {
    q.check_dim(v.len())?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("time must be finite and nonnegative, got {t}")));
    }
    let lambda = q.max_exit_rate();
    if t == 0.0 || lambda == 0.0 {
        return Ok(v.to_vec());
    }
    let steps = (lambda * t / MAX_STEP_INTENSITY).ceil().max(1.0) as usize;
    let tau = t / steps as f64;
    let mut cur = v.to_vec();
    for _ in 0..steps {
        cur = series(q, lambda, tau, &cur, transpose)?;
    }
    Ok(cur)
}

fn series(q: &GeneratorMatrix<f64>, lambda: f64, tau: f64, v: &[f64], transpose: bool) -> Result<Vec<f64>> {
    let mean = lambda * tau;
    let max_terms = (mean + 30.0 * mean.sqrt() + 60.0) as usize;
    let mut weight = (-mean).exp();
    let mut cumulative = weight;
    let mut power = v.to_vec();
    let mut out: Vec<f64> = power.iter().map(|x| weight * x).collect();
    let mut k = 0usize;
    while 1.0 - cumulative > UNIFORMIZATION_TAIL && k < max_terms {
        let qv = if transpose { q.apply_transpose(&power)? } else { q.apply(&power)? };
        for (p, d) in power.iter_mut().zip(qv) {
            *p += d / lambda;
        }
        k += 1;
        weight *= mean / k as f64;
        cumulative += weight;
        for (o, p) in out.iter_mut().zip(&power) {
            *o += weight * p;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{build_generator, SiteSystem};

    fn walker() -> SiteSystem {
        SiteSystem::new(2, vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 1.0], 0).unwrap()
    }

    #[test]
    fn time_zero_is_identity() {
        let g = build_generator::<f64>(&walker(), 2).unwrap();
        let v = vec![0.3, -1.0, 2.0];
        assert_eq!(semigroup_apply(&g.q, 0.0, &v).unwrap(), v);
    }

    #[test]
    fn two_state_closed_form() {
        let g = build_generator::<f64>(&walker(), 1).unwrap();
        let start = g.sector.index_of(&[1, 0]).unwrap();
        for t in [0.1, 0.7, 2.0, 40.0] {
            let mut e = vec![0.0; 2];
            e[start] = 1.0;
            let p = semigroup_apply(&g.q, t, &e).unwrap();
            let expected = 0.5 * (1.0 + (-2.0 * t).exp());
            assert!((p[start] - expected).abs() < 1e-13, "t={t}");
            let mu = semigroup_apply_transpose(&g.q, t, &e).unwrap();
            assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let g = build_generator::<f64>(&walker(), 1).unwrap();
        assert!(semigroup_apply(&g.q, 1.0, &[1.0]).is_err());
        assert!(semigroup_apply(&g.q, -1.0, &[1.0, 0.0]).is_err());
    }
}
