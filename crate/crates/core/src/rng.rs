//! Deterministic randomness: SplitMix64 streams plus keyed, counter-based
//! per-decision draws.
//!
//! Every random decision in the crate is reproducible from a 64-bit seed.
//! Independent decisions (edge pair inclusion, per-trial sub-seeds, coloring
//! assignments) are drawn by hashing `(seed, tag, indices...)` through the
//! SplitMix64 finalizer, so the result is a pure function of the key — the
//! output is identical no matter how work is ordered or partitioned across
//! workers. Sequential sampling (shuffles, rejection loops) uses a SplitMix64
//! stream derived from the same keying scheme.

/// Domain-separation tags for keyed draws. Distinct subsystems never share
/// a key space even under equal seeds.
pub mod tag {
    pub const GNP_PAIR: u64 = 0x01;
    pub const CHUNG_LU_PAIR: u64 = 0x02;
    pub const MC_TRIAL: u64 = 0x03;
    pub const ATTRIBUTES: u64 = 0x04;
    pub const QUERY_GEN: u64 = 0x05;
    pub const COLORING: u64 = 0x06;
    pub const CONFIG_SAMPLE: u64 = 0x07;
    pub const DENSITY_ADJUST: u64 = 0x08;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output function (Steele, Lea & Flood's SplittableRandom
/// finalizer; constants due to Stafford's Mix13).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stateless draw keyed on `(seed, tag, a, b)`.
#[inline]
pub fn keyed_u64(seed: u64, tag: u64, a: u64, b: u64) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = mix64(h ^ tag.wrapping_mul(GOLDEN));
    h = mix64(h ^ a.wrapping_mul(GOLDEN));
    h = mix64(h ^ b.wrapping_mul(GOLDEN));
    h
}

/// Uniform `f64` in `[0, 1)` from the top 53 bits of a keyed draw.
#[inline]
pub fn keyed_unit(seed: u64, tag: u64, a: u64, b: u64) -> f64 {
    to_unit(keyed_u64(seed, tag, a, b))
}

/// Bernoulli(p) decision keyed on `(seed, tag, a, b)`; order-independent.
#[inline]
pub fn keyed_bernoulli(seed: u64, tag: u64, a: u64, b: u64, p: f64) -> bool {
    keyed_unit(seed, tag, a, b) < p
}

/// Derives an independent sub-seed, e.g. one per Monte-Carlo trial.
#[inline]
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    keyed_u64(seed, tag, index, 0x5eed)
}

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential SplitMix64 stream for inherently ordered sampling.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_unit() < p
    }

    /// Uniform in `[0, n)` by rejection (no modulo bias). `n > 0`.
    pub fn next_range(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        if n.is_power_of_two() {
            return self.next_u64() & (n - 1);
        }
        // Reject draws from the final partial block of the u64 range.
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_range(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn splitmix64_reference_vectors() {
        // First outputs for seed 0 from the reference implementation; pins
        // the generator identity so seeds stay meaningful across versions.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn keyed_draws_are_pure_functions() {
        let a = keyed_u64(42, tag::GNP_PAIR, 3, 7);
        let b = keyed_u64(42, tag::GNP_PAIR, 3, 7);
        assert_eq!(a, b);
        assert_ne!(a, keyed_u64(42, tag::GNP_PAIR, 7, 3));
        assert_ne!(a, keyed_u64(42, tag::CHUNG_LU_PAIR, 3, 7));
        assert_ne!(a, keyed_u64(43, tag::GNP_PAIR, 3, 7));
    }

    #[test]
    fn unit_draws_are_uniform_enough() {
        let mut rng = SplitMix64::new(0xDEADBEEF);
        let n = 100_000;
        let mut sum = 0.0;
        let mut buckets = [0u32; 10];
        for _ in 0..n {
            let u = rng.next_unit();
            assert!((0.0..1.0).contains(&u));
            sum += u;
            buckets[(u * 10.0) as usize] += 1;
        }
        let mean = sum / n as f64;
        // 3 sigma band for the mean of n uniforms: 0.5 +- 3/sqrt(12 n).
        assert!((mean - 0.5).abs() < 3.0 / (12.0f64 * n as f64).sqrt());
        for &b in &buckets {
            // Each decile expects 10_000 with sigma ~95; allow 5 sigma.
            assert!((b as f64 - 10_000.0).abs() < 475.0, "bucket {b}");
        }
    }

    #[test]
    fn next_range_stays_in_bounds_and_hits_everything() {
        let mut rng = SplitMix64::new(7);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[rng.next_range(7) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        for _ in 0..100 {
            assert!(rng.next_range(1) == 0);
        }
    }

    #[test]
    fn shuffle_is_a_permutation_and_seed_stable() {
        let mut rng = SplitMix64::new(99);
        let mut items: Vec<u32> = (0..20).collect();
        rng.shuffle(&mut items);
        let mut sorted = items.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());

        let mut rng2 = SplitMix64::new(99);
        let mut items2: Vec<u32> = (0..20).collect();
        rng2.shuffle(&mut items2);
        assert_eq!(items, items2);
    }

    #[test]
    fn derive_seed_separates_trials() {
        let s0 = derive_seed(1, tag::MC_TRIAL, 0);
        let s1 = derive_seed(1, tag::MC_TRIAL, 1);
        assert_ne!(s0, s1);
        assert_eq!(s0, derive_seed(1, tag::MC_TRIAL, 0));
    }
}
