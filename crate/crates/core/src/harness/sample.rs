//! Seeded random inputs shared by the property suites.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flows::{Domain, State};
use crate::function_space::{Func01, SeqFunc};

/// Independent generator for stream `id` under `seed`.
pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A random walk with increments in `[-h, h]`, clamped to `[0, 1]`: a
/// sample of a 1-Lipschitz function into `[0, 1]`.
pub fn random_lipschitz<R: Rng + ?Sized>(rng: &mut R, window: (f64, f64), step: f64) -> Result<Func01> {
    let n = Func01::constant(window, step, 0.0)?.len();
    let mut values = Vec::with_capacity(n);
    let mut v: f64 = rng.gen();
    values.push(v);
    for _ in 1..n {
        v = (v + step * rng.gen_range(-1.0..=1.0)).clamp(0.0, 1.0);
        values.push(v);
    }
    Func01::from_window(window, step, values)
}

pub fn random_seq<R: Rng + ?Sized>(
    rng: &mut R,
    depth: usize,
    window: (f64, f64),
    step: f64,
) -> Result<SeqFunc> {
    SeqFunc::new(
        (0..depth)
            .map(|_| random_lipschitz(rng, window, step))
            .collect::<Result<_>>()?,
    )
}

/// A multiple of `step` drawn uniformly from those with `|r| ≤ r_max`.
pub fn aligned_shift<R: Rng + ?Sized>(rng: &mut R, step: f64, r_max: f64) -> f64 {
    let m = (r_max / step + 1e-9).floor() as i64;
    rng.gen_range(-m..=m) as f64 * step
}

/// Two states at distance at least `min_dist`.
pub fn separated_pair<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &Domain,
    min_dist: f64,
) -> Result<(State, State)> {
    for _ in 0..10_000 {
        let x = domain.sample(rng);
        let y = domain.sample(rng);
        if domain.distance(&x, &y) >= min_dist {
            return Ok((x, y));
        }
    }
    Err(Error::InvalidConfig(format!(
        "could not draw two states at distance {min_dist}; the domain is too small"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::is_in_l;

    #[test]
    fn walks_are_lipschitz() {
        let mut rng = stream(1, 0);
        for _ in 0..50 {
            let f = random_lipschitz(&mut rng, (-2.0, 2.0), 0.01).unwrap();
            assert_eq!(f.len(), 401);
            assert!(is_in_l(&f, 1e-15));
        }
    }

    #[test]
    fn shifts_are_on_the_grid() {
        let mut rng = stream(2, 0);
        for _ in 0..200 {
            let r = aligned_shift(&mut rng, 0.01, 1.0);
            assert!(r.abs() <= 1.0 + 1e-12);
            assert!(((r / 0.01) - (r / 0.01).round()).abs() < 1e-9);
        }
    }

    #[test]
    fn streams_are_independent_and_repeatable() {
        let a: Vec<u64> = (0..4).map(|_| stream(9, 1).gen()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(stream(9, 1).gen::<u64>(), stream(9, 2).gen::<u64>());
    }
}
