//! Seeded random generation of group elements and algebra elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::group::{Algebra, AlgebraElement, Spin4, Su2};

/// Name of the generator recorded in reports.
pub const RNG_NAME: &str = "chacha8 (rand_chacha 0.9, seed_from_u64)";

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream derived from a seed and a tag.
pub fn substream(seed: u64, tag: u64) -> SeededRng {
    rng_from_seed(splitmix64(seed ^ splitmix64(tag)))
}

/// The splitmix64 finalizer, used for hash-derived coefficients.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps a hash to a real in `[-1, 1)`.
pub fn unit_real(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// Haar-uniform SU(2) element.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Su2 {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        if let Some(g) = Su2::from_vector(v) {
            return g;
        }
    }
}

pub fn random_spin4<R: Rng + ?Sized>(rng: &mut R) -> Spin4 {
    Spin4 {
        left: random_su2(rng),
        right: random_su2(rng),
    }
}

/// Algebra element with independent standard normal components.
pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra) -> AlgebraElement {
    let c: Vec<f64> = (0..algebra.dim()).map(|_| rng.sample(StandardNormal)).collect();
    AlgebraElement::new(algebra, &c).expect("dimension matches")
}

/// A point drawn uniformly from the unit 3-sphere in R^4.
pub fn random_s3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    random_su2(rng).coords()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let a = random_su2(&mut rng_from_seed(9));
        let b = random_su2(&mut rng_from_seed(9));
        assert_eq!(a, b);
        assert_ne!(random_su2(&mut substream(9, 1)), random_su2(&mut substream(9, 2)));
    }

    #[test]
    fn unit_real_range() {
        for i in 0..1000 {
            let u = unit_real(splitmix64(i));
            assert!((-1.0..1.0).contains(&u));
        }
    }
}
