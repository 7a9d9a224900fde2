use crate::error::{Error, Result};

/// Kolmogorov-Smirnov distance `sup |F_n(x) - F(x)|` between the empirical
/// law of `samples` and a continuous reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("KS distance of an empty sample".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("NaN sample in KS distance".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max(f - i as f64 / n).max(j as f64 / n - f);
        i = j;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::normal_cdf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn own_samples_are_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(ks_distance(&xs, normal_cdf).unwrap() < 0.02);
    }

    #[test]
    fn point_mass() {
        let d = ks_distance(&[0.3; 50], normal_cdf).unwrap();
        let f = normal_cdf(0.3);
        assert!((d - f.max(1.0 - f)).abs() < 1e-15);
    }

    #[test]
    fn grows_with_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut last = 0.0;
        for shift in [0.25, 0.5, 1.0, 2.0] {
            let d = ks_distance(&xs, |x| normal_cdf(x - shift)).unwrap();
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn bounded_and_guarded() {
        let d = ks_distance(&[1e9, 2e9], normal_cdf).unwrap();
        assert!((0.0..=1.0).contains(&d));
        assert!(ks_distance(&[], normal_cdf).is_err());
    }
}
