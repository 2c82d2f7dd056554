//! Deterministic pseudorandomness shared by every statistical path.
//!
//! Everything random in this crate bottoms out in the SplitMix64 finalizer
//! below, so results are bit-identical across runs, platforms, and thread
//! schedules. The constants are the published SplitMix64 ones:
//!
//! * increment (`GAMMA`): `0x9e3779b97f4a7c15`
//! * mix multipliers:     `0xbf58476d1ce4e5b9`, `0x94d049bb133111eb`
//! * mix shifts:          `30`, `27`, `31`
//!
//! Uniforms in `[0, 1)` take the top 53 bits of a mixed word, so the
//! integer-to-float conversion is exact.

/// SplitMix64 sequence increment (the "golden gamma").
pub const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: a bijective 64-bit mixing function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold several seed components into one, order-sensitively.
///
/// Used to derive per-step stream seeds in the closed loop and per-instance
/// seeds in the bench harness.
pub fn mix_seeds(parts: &[u64]) -> u64 {
    let mut z = 0u64;
    for &p in parts {
        z = mix64(z.wrapping_add(GAMMA).wrapping_add(p));
    }
    z
}

/// Convert a mixed 64-bit word to a uniform in `[0, 1)`.
#[inline]
pub fn to_unit_f64(z: u64) -> f64 {
    // 53-bit mantissa; (z >> 11) in [0, 2^53) maps exactly onto the grid.
    (z >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Sequential SplitMix64 generator for sampling loops.
///
/// Caller-owned state; clone it or re-seed for disjoint parallel streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        to_unit_f64(self.next_u64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixer_is_deterministic() {
        assert_eq!(mix64(0), mix64(0));
        assert_eq!(mix64(12345), mix64(12345));
    }

    #[test]
    fn sequential_generator_repeats_with_same_seed() {
        let mut a = SplitMix64::new(99);
        let mut b = SplitMix64::new(99);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn unit_floats_stay_in_half_open_interval() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn mix_seeds_is_order_sensitive() {
        assert_ne!(mix_seeds(&[1, 2]), mix_seeds(&[2, 1]));
        assert_ne!(mix_seeds(&[1]), mix_seeds(&[1, 0]));
    }

    #[test]
    fn golden_values_pin_the_generator() {
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 16294208416658607535);
        assert_eq!(r.next_u64(), 7960286522194355700);
        assert_eq!(r.next_u64(), 487617019471545679);
        assert_eq!(mix_seeds(&[1, 2, 3]), 7702586659592502839);
    }
}
