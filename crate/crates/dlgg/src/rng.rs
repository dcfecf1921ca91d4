//! Deterministic pseudo-random stream.
//!
//! A counter-based SplitMix64 generator: the state is a 64-bit counter
//! advanced by a fixed odd increment and hashed to produce output. Identical
//! seeds give identical draw sequences on every platform, which is the
//! reproducibility contract the whole sampler rests on. One stream per chain;
//! [`RngStream::split`] forks a statistically independent child stream
//! deterministically.

use crate::scalar::{c, Scalar};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    state: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, state: seed }
    }

    /// Seed this stream was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Fork a child stream; the parent advances by one draw.
    pub fn split(&mut self) -> RngStream {
        let child_seed = self.next_u64() ^ 0x6A09_E667_F3BC_C909;
        RngStream::new(child_seed)
    }

    /// Uniform on the open interval (0, 1); never returns 0 or 1 exactly.
    #[inline]
    pub fn uniform<T: Scalar>(&mut self) -> T {
        let bits = self.next_u64() >> 11; // 53 significant bits
        c::<T>((bits as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0))
    }

    /// Standard normal draw via Box-Muller (two uniforms per draw).
    #[inline]
    pub fn standard_normal<T: Scalar>(&mut self) -> T {
        let u1: T = self.uniform();
        let u2: T = self.uniform();
        let r = (-(c::<T>(2.0)) * u1.ln()).sqrt();
        let theta = c::<T>(std::f64::consts::TAU) * u2;
        r * theta.cos()
    }
}
