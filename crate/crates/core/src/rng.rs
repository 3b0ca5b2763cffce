//! Seeded randomness. One root seed fans out into named per-stage streams so
//! that every stage is independently reproducible.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fingerprint::Fnv1a;
use crate::scalar::Real;

/// Deterministic stream for a pipeline stage, derived from the root seed and
/// the stage name.
pub fn stream(root_seed: u64, name: &str) -> ChaCha8Rng {
    let mut h = Fnv1a::new();
    h.update(&root_seed.to_le_bytes());
    h.update(name.as_bytes());
    ChaCha8Rng::seed_from_u64(h.finish())
}

/// Uniform draw in [0, 1) with 53-bit resolution. Draws are generated in f64
/// and converted, so streams are identical across scalar instantiations.
pub fn uniform<T: Real>(rng: &mut impl RngCore) -> T {
    T::from_f64(uniform_f64(rng)).expect("uniform draw representable")
}

fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform_in<T: Real>(rng: &mut impl RngCore, lo: T, hi: T) -> T {
    lo + (hi - lo) * uniform(rng)
}

pub fn bernoulli<T: Real>(rng: &mut impl RngCore, p: T) -> bool {
    uniform_f64(rng) < p.to_f64().unwrap_or(0.0)
}

/// Standard normal via Box-Muller; consumes two uniforms per draw.
pub fn normal<T: Real>(rng: &mut impl RngCore) -> T {
    let u1 = uniform_f64(rng).max(f64::MIN_POSITIVE);
    let u2 = uniform_f64(rng);
    let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    T::from_f64(z).expect("normal draw representable")
}

/// Uniform integer in [0, n) via the multiply-shift bound.
pub fn bounded(rng: &mut impl RngCore, n: u64) -> u64 {
    ((u128::from(rng.next_u64()) * u128::from(n)) >> 64) as u64
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<E>(rng: &mut impl RngCore, items: &mut [E]) {
    for i in (1..items.len()).rev() {
        let j = bounded(rng, (i + 1) as u64) as usize;
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_named() {
        let mut a = stream(42, "split");
        let mut b = stream(42, "split");
        let mut c = stream(42, "init");
        assert_eq!(a.next_u64(), b.next_u64());
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut rng = stream(7, "test");
        for _ in 0..1000 {
            let x: f64 = uniform(&mut rng);
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = stream(9, "test");
        let mut v: Vec<u32> = (0..100).collect();
        shuffle(&mut rng, &mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn normal_has_sane_moments() {
        let mut rng = stream(11, "test");
        let n = 20_000;
        let draws: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "var {var}");
    }
}
