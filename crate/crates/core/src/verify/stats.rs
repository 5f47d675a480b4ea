use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Smallest expected count per chi-square bin.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Sample mean and its standard error, summed in input order.
pub fn mean_estimate(values: &[f64]) -> MeanEstimate {
    let n = values.len();
    if n == 0 {
        return MeanEstimate { mean: 0.0, std_error: 0.0, samples: 0 };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    MeanEstimate { mean, std_error: (var / n as f64).sqrt(), samples: n }
}

/// Sample Pearson correlation.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let ma = a.iter().sum::<f64>() / a.len() as f64;
    let mb = b.iter().sum::<f64>() / b.len() as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

/// Standard normal score with the same upper-tail probability as `stat` under a
/// chi-square law with `df` degrees of freedom.
pub fn chi_square_z(stat: f64, df: usize) -> f64 {
    let chi = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    let upper = chi.sf(stat);
    let normal = Normal::standard();
    if upper <= 0.0 {
        return f64::INFINITY;
    }
    normal.inverse_cdf(1.0 - upper).clamp(-40.0, 40.0)
}

/// Chi-square goodness of fit of observed counts `0, 1, 2, ...` (the last bin
/// collecting the tail) against a pmf; bins are merged from the right until each
/// expects at least [`MIN_EXPECTED`] observations.
pub fn chi_square_counts(observed: &[u32], pmf: impl Fn(u64) -> f64) -> Result<(f64, usize)> {
    let n = observed.len() as f64;
    let mut edges = Vec::new();
    let mut k = 0u64;
    let mut covered = 0.0;
    loop {
        let p = pmf(k);
        let tail = 1.0 - covered - p;
        if n * p < MIN_EXPECTED || n * tail < MIN_EXPECTED {
            break;
        }
        covered += p;
        edges.push(k);
        k += 1;
    }
    // bins: {0}, {1}, ..., {k-1}, [k, inf)
    let bins = edges.len() + 1;
    if bins < 2 {
        return Err(Error::InsufficientSamples("a chi-square test needs at least two bins".into()));
    }
    let mut counts = vec![0usize; bins];
    for &o in observed {
        counts[(o as usize).min(bins - 1)] += 1;
    }
    let mut stat = 0.0;
    let mut rest = 1.0;
    for (i, &c) in counts.iter().enumerate() {
        let p = if i + 1 < bins { pmf(i as u64) } else { rest };
        rest -= p;
        let e = n * p;
        stat += (c as f64 - e) * (c as f64 - e) / e;
    }
    Ok((stat, bins - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_error() {
        let m = mean_estimate(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chi_square_median_maps_near_zero() {
        let chi = ChiSquared::new(4.0).unwrap();
        let median = chi.inverse_cdf(0.5);
        assert!(chi_square_z(median, 4).abs() < 1e-8);
        assert!(chi_square_z(100.0, 4) > 3.0);
    }

    #[test]
    fn exact_counts_fit() {
        // observed frequencies equal to the expected ones give statistic ~0
        let pmf = |k: u64| 0.5f64.powi(k as i32 + 1);
        let mut obs = Vec::new();
        for k in 0..6u32 {
            obs.extend(std::iter::repeat_n(k, 1 << (9 - k)));
        }
        obs.extend(std::iter::repeat_n(6u32, 8));
        obs.extend(std::iter::repeat_n(7u32, 8));
        let (stat, df) = chi_square_counts(&obs, pmf).unwrap();
        assert!(df >= 4);
        assert!(stat < 1.0, "{stat}");
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(chi_square_counts(&[0, 1], |_| 0.5), Err(Error::InsufficientSamples(_))));
    }
}
