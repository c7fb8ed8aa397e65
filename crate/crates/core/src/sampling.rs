//! Deterministic sample plans: a randomly shifted Halton sequence on the
//! chart's sample box, rejection-sampled against the domain predicate.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensorlab::chart::{Chart, DOMAIN_MARGIN};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 200;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Maximum number of candidates tried per requested point.
const ATTEMPTS_PER_POINT: usize = 500;

fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut r = 0.0;
    while k > 0 {
        r += (k % b) as f64 * inv;
        k /= b;
        inv /= base as f64;
    }
    r
}

/// Up to `count` points of the chart domain (fewer only if the domain
/// occupies a negligible fraction of the sample box).
pub fn sample_points(chart: &Chart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let dim = chart.dim();
    assert!(
        dim <= PRIMES.len(),
        "sampling supports up to {} dimensions",
        PRIMES.len()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let bounds = chart.sample_box();
    let mut out = Vec::with_capacity(count);
    let mut k = 1u64;
    let limit = (count * ATTEMPTS_PER_POINT) as u64 + 1;
    while out.len() < count && k < limit {
        let p: Vec<f64> = (0..dim)
            .map(|i| {
                let u = (radical_inverse(k, PRIMES[i]) + shift[i]).fract();
                bounds[i].0 + u * (bounds[i].1 - bounds[i].0)
            })
            .collect();
        if chart.contains(&p, DOMAIN_MARGIN) {
            out.push(p);
        }
        k += 1;
    }
    out
}

/// Evenly spaced values `lo..=hi` (`steps` of them).
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_respect_domain_and_are_reproducible() {
        let chart = Chart::new("disc", &["x", "y"], vec![(-1.0, 1.0); 2], |p, m| {
            1.0 - p[0] * p[0] - p[1] * p[1] > m
        });
        let a = sample_points(&chart, 50, 7);
        let b = sample_points(&chart, 50, 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|p| chart.contains(p, DOMAIN_MARGIN)));
        assert_ne!(a, sample_points(&chart, 50, 8));
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
