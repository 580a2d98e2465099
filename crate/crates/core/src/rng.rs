//! Counter-based random numbers.
//!
//! Values are pure functions of `(seed, stream, counter)`, so per-sample and
//! per-dimension randomness can be generated on demand without tables and
//! without depending on evaluation order.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed counter-based generator.
#[derive(Clone, Copy, Debug)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng {
            key: splitmix64(seed ^ 0x5851_f42d_4c95_7f2d),
        }
    }

    /// Derives an independent generator for a sub-stream.
    pub fn substream(&self, stream: u64) -> Self {
        CounterRng {
            key: splitmix64(self.key ^ splitmix64(stream.wrapping_mul(GOLDEN))),
        }
    }

    #[inline]
    pub fn u64_at(&self, counter: u64) -> u64 {
        splitmix64(self.key.wrapping_add(counter.wrapping_mul(GOLDEN)) ^ self.key.rotate_left(29))
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn unit_at(&self, counter: u64) -> f64 {
        (self.u64_at(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`, safe to take the logarithm of.
    #[inline]
    pub fn open_unit_at(&self, counter: u64) -> f64 {
        ((self.u64_at(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Sequential stream over a [`CounterRng`], for places that just need a
/// deterministic sequence of draws.
#[derive(Clone, Debug)]
pub struct StreamRng {
    rng: CounterRng,
    counter: u64,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        StreamRng {
            rng: CounterRng::new(seed),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = self.rng.u64_at(self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        let v = self.rng.unit_at(self.counter);
        self.counter += 1;
        v
    }

    /// Uniform integer in `0..bound` (`bound > 0`), via multiply-shift.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}
