//! Seeded, splittable random number generator.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A ChaCha stream that remembers its seed. `split(i)` derives an independent
/// child stream, so parallel cells never share state.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn split(&self, index: u64) -> Self {
        Self::new(splitmix(self.seed ^ splitmix(index.wrapping_add(0x9E37_79B9_7F4A_7C15))))
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn reproducible_and_split_streams_differ() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(SeededRng::new(7), |r, _| Some(r.gen())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(SeededRng::new(7), |r, _| Some(r.gen())).collect();
        assert_eq!(a, b);
        let root = SeededRng::new(7);
        let x: u64 = root.split(0).gen();
        let y: u64 = root.split(1).gen();
        assert_ne!(x, y);
        assert_eq!(root.split(3).seed(), SeededRng::new(7).split(3).seed());
    }
}
