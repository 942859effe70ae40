//! Deterministic randomness: keyed hash functions and lazy sample-set
//! membership, all pure functions of a master seed.
//!
//! Sample sets are never stored. Whether element `x` belongs to the sample
//! set of repetition `j` in window `i` is recomputed on demand from
//! `(seed, j, i, x)`, so membership can be re-queried at any later window for
//! free, which is what the interval checks rely on.
//!
//! Probabilities are exact rationals: a draw succeeds iff a 64-bit keyed hash
//! is below `floor(num·2^64/den)`, so `num/den = 1` always succeeds and `0`
//! never does, with no floating-point involvement.

use crate::stream::Element;
use crate::{Error, Result};

/// 64-bit finalizer with full avalanche; bijective.
#[inline(always)]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline(always)]
pub(crate) fn absorb(state: u64, word: u64) -> u64 {
    mix64(state ^ word.wrapping_mul(GOLDEN))
}

/// Keyed hash of a fixed-arity word tuple under a domain tag.
pub(crate) fn prf(seed: u64, tag: u64, words: &[u64]) -> u64 {
    let mut s = mix64(seed ^ tag);
    for &w in words {
        s = absorb(s, w);
    }
    s
}

/// Order-insensitive fingerprint accumulator for config hashing.
pub fn fingerprint(words: &[u64]) -> u64 {
    prf(0x5ee1_f00d, domain::FINGERPRINT, words)
}

pub(crate) mod domain {
    pub const HASH: u64 = 0x68617368_00000001;
    pub const SAMPLE: u64 = 0x73616d70_00000002;
    pub const KSHH_COIN: u64 = 0x636f696e_00000003;
    pub const KSHH_HASH: u64 = 0x6b686173_00000004;
    pub const SIGN: u64 = 0x7369676e_00000005;
    pub const SHUFFLE: u64 = 0x73687566_00000006;
    pub const SUBSEED: u64 = 0x73756273_00000007;
    pub const FINGERPRINT: u64 = 0x66696e67_00000008;
    pub const TRIAL: u64 = 0x74726961_00000009;
}

/// Threshold such that `draw < threshold` holds with probability exactly
/// `num/den` for a uniform 64-bit `draw`.
#[inline]
fn rational_threshold(num: u64, den: u64) -> u128 {
    ((num as u128) << 64) / den as u128
}

/// Uniform value in `[0, bound)` by rejection, exact.
pub(crate) fn bounded(seed: u64, tag: u64, ctr: &mut u64, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let r = prf(seed, tag, &[*ctr]);
        *ctr += 1;
        if r < zone {
            return r % bound;
        }
    }
}

/// The source of every random decision a detector makes: hash values in
/// `[0, K)` per repetition, and per-window sample membership with exact
/// probability `q`.
#[derive(Debug, Clone)]
pub struct RandomnessSource {
    master_seed: u64,
    k: u64,
    q_num: u64,
    q_den: u64,
    q_threshold: u128,
    hash_base: u64,
    sample_base: u64,
}

impl RandomnessSource {
    pub fn new(master_seed: u64, k: u64, q_num: u64, q_den: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("hash range K must be positive"));
        }
        if q_den == 0 || q_num > q_den {
            return Err(Error::config(format!(
                "sampling probability {q_num}/{q_den} is not in [0, 1]"
            )));
        }
        Ok(Self {
            master_seed,
            k,
            q_num,
            q_den,
            q_threshold: rational_threshold(q_num, q_den),
            hash_base: mix64(master_seed ^ domain::HASH),
            sample_base: mix64(master_seed ^ domain::SAMPLE),
        })
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn q(&self) -> (u64, u64) {
        (self.q_num, self.q_den)
    }

    /// Hash value of `x` under repetition `j`, in `[0, K)`.
    pub fn hash_value(&self, j: u32, x: Element) -> u64 {
        self.hash_ctx(j).value(x)
    }

    /// Is `x` in the sample set of repetition `j` at window `i`?
    pub fn in_sample(&self, j: u32, i: u64, x: Element) -> bool {
        self.sample_ctx(j, i).contains(x)
    }

    /// Is `x` in the union of the sample sets of repetition `j` over windows
    /// `lo..=hi`? Exactly the OR of `in_sample` across the range.
    pub fn in_union_sample(&self, j: u32, lo: u64, hi: u64, x: Element) -> Result<bool> {
        if lo > hi {
            return Err(Error::config(format!("empty window range {lo}..={hi}")));
        }
        let base = absorb(self.sample_base, j as u64);
        for i in lo..=hi {
            let draw = absorb(absorb(base, i), x);
            if (draw as u128) < self.q_threshold {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Precomputed per-repetition hash context; `value(x)` equals
    /// `hash_value(j, x)`.
    pub fn hash_ctx(&self, j: u32) -> HashCtx {
        HashCtx {
            base: absorb(self.hash_base, j as u64),
            k: self.k,
        }
    }

    /// Precomputed `(j, window)` sampling context; `contains(x)` equals
    /// `in_sample(j, i, x)`.
    pub fn sample_ctx(&self, j: u32, i: u64) -> SampleCtx {
        SampleCtx {
            base: absorb(absorb(self.sample_base, j as u64), i),
            threshold: self.q_threshold,
        }
    }

    /// Independent coin/hash lane for one candidate-confirmation instance.
    /// Decisions are pure in `(master seed, instance, inputs)` and disjoint
    /// from the sample-set and hash draws above.
    pub fn kshh_lane(&self, instance: u64, p_num: u64, p_den: u64) -> KshhLane {
        KshhLane {
            coin_base: absorb(mix64(self.master_seed ^ domain::KSHH_COIN), instance),
            hash_base: absorb(mix64(self.master_seed ^ domain::KSHH_HASH), instance),
            p_threshold: rational_threshold(p_num, p_den),
            k: self.k,
        }
    }

    /// Signed ±1 lane for one estimator repetition.
    pub fn sign_ctx(&self, rep: u32) -> SignCtx {
        SignCtx {
            base: absorb(mix64(self.master_seed ^ domain::SIGN), rep as u64),
        }
    }

    /// Deterministic sub-seed for a derived component (ladder guesses,
    /// per-trial streams), domain-separated from all other draws.
    pub fn subseed(&self, words: &[u64]) -> u64 {
        prf(self.master_seed, domain::SUBSEED, words)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HashCtx {
    base: u64,
    k: u64,
}

impl HashCtx {
    #[inline(always)]
    pub fn value(&self, x: Element) -> u64 {
        absorb(self.base, x) % self.k
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SampleCtx {
    base: u64,
    threshold: u128,
}

impl SampleCtx {
    #[inline(always)]
    pub fn contains(&self, x: Element) -> bool {
        (absorb(self.base, x) as u128) < self.threshold
    }
}

/// Per-instance coin and short-hash lane used by confirmation machines.
#[derive(Debug, Clone, Copy)]
pub struct KshhLane {
    coin_base: u64,
    hash_base: u64,
    p_threshold: u128,
    k: u64,
}

impl KshhLane {
    /// Sampling coin for the `ctr`-th observed element of this instance.
    #[inline(always)]
    pub fn coin(&self, ctr: u64) -> bool {
        (absorb(self.coin_base, ctr) as u128) < self.p_threshold
    }

    /// Short hash of `x` in `[0, K)`, independent of the repetition hashes.
    #[inline(always)]
    pub fn short_hash(&self, x: Element) -> u64 {
        absorb(self.hash_base, x) % self.k
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SignCtx {
    base: u64,
}

impl SignCtx {
    /// ±1 sign of `x` for this repetition.
    #[inline(always)]
    pub fn sign(&self, x: Element) -> i64 {
        if absorb(self.base, x) >> 63 == 0 {
            1
        } else {
            -1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(q_num: u64, q_den: u64) -> RandomnessSource {
        RandomnessSource::new(0xfeed_beef, 256, q_num, q_den).unwrap()
    }

    #[test]
    fn hash_is_deterministic() {
        let s = src(1, 2);
        assert_eq!(s.hash_value(3, 77), s.hash_value(3, 77));
        assert_eq!(s.hash_ctx(3).value(77), s.hash_value(3, 77));
    }

    #[test]
    fn hash_uniformity_chi_square() {
        let s = src(1, 2);
        let k = 256usize;
        let mut bins = vec![0u64; k];
        let samples = 100_000u64;
        for x in 0..samples {
            bins[s.hash_value(0, x) as usize] += 1;
        }
        let expected = samples as f64 / k as f64;
        let chi2: f64 = bins
            .iter()
            .map(|&b| {
                let d = b as f64 - expected;
                d * d / expected
            })
            .sum();
        // 99.9th percentile of chi-square with 255 degrees of freedom ≈ 334.
        assert!(chi2 < 340.0, "chi2 = {chi2}");
    }

    #[test]
    fn hash_lanes_uncorrelated_across_j() {
        let s = src(1, 2);
        let n = 100_000u64;
        let (mut sa, mut sb, mut sab, mut saa, mut sbb) = (0f64, 0f64, 0f64, 0f64, 0f64);
        for x in 0..n {
            let a = s.hash_value(0, x) as f64;
            let b = s.hash_value(1, x) as f64;
            sa += a;
            sb += b;
            sab += a * b;
            saa += a * a;
            sbb += b * b;
        }
        let nf = n as f64;
        let cov = sab / nf - (sa / nf) * (sb / nf);
        let var_a = saa / nf - (sa / nf) * (sa / nf);
        let var_b = sbb / nf - (sb / nf) * (sb / nf);
        let corr = cov / (var_a * var_b).sqrt();
        assert!(corr.abs() < 0.01, "corr = {corr}");
    }

    #[test]
    fn sample_probability_zero_and_one() {
        let s0 = src(0, 7);
        let s1 = src(7, 7);
        for x in 0..1000 {
            assert!(!s0.in_sample(0, 0, x));
            assert!(s1.in_sample(0, 0, x));
        }
    }

    #[test]
    fn sample_rate_matches_q() {
        let s = src(1, 64);
        let n = 1_000_000u64;
        let mut hits = 0u64;
        for x in 0..n {
            if s.in_sample(2, 5, x) {
                hits += 1;
            }
        }
        let rate = hits as f64 / n as f64;
        assert!((rate - 1.0 / 64.0).abs() < 5e-4, "rate = {rate}");
    }

    #[test]
    fn union_sample_is_or_fold() {
        let s = src(1, 13);
        for x in 0..2_000u64 {
            for (lo, hi) in [(0u64, 0u64), (3, 9), (5, 5), (0, 40)] {
                let direct = s.in_union_sample(9, lo, hi, x).unwrap();
                let or_fold = (lo..=hi).any(|i| s.in_sample(9, i, x));
                assert_eq!(direct, or_fold);
            }
        }
    }

    #[test]
    fn union_sample_rejects_empty_range() {
        assert!(src(1, 2).in_union_sample(0, 4, 3, 1).is_err());
    }

    #[test]
    fn invalid_probability_rejected() {
        assert!(RandomnessSource::new(1, 256, 3, 2).is_err());
        assert!(RandomnessSource::new(1, 256, 1, 0).is_err());
        assert!(RandomnessSource::new(1, 0, 1, 2).is_err());
    }

    #[test]
    fn sample_ctx_matches_point_queries() {
        let s = src(3, 17);
        for j in 0..4u32 {
            for i in 0..8u64 {
                let ctx = s.sample_ctx(j, i);
                for x in 0..500u64 {
                    assert_eq!(ctx.contains(x), s.in_sample(j, i, x));
                }
            }
        }
    }

    #[test]
    fn coin_rate_matches_p() {
        let s = src(1, 2);
        let lane = s.kshh_lane(42, 2, 5);
        let n = 500_000u64;
        let heads = (0..n).filter(|&c| lane.coin(c)).count() as f64;
        let rate = heads / n as f64;
        assert!((rate - 0.4).abs() < 2e-3, "rate = {rate}");
    }

    #[test]
    fn signs_are_balanced() {
        let s = src(1, 2);
        let ctx = s.sign_ctx(7);
        let sum: i64 = (0..100_000u64).map(|x| ctx.sign(x)).sum();
        assert!(sum.abs() < 2_000, "sum = {sum}");
    }

    #[test]
    fn bounded_is_exact_range() {
        let mut ctr = 0u64;
        let mut seen = [false; 10];
        for _ in 0..10_000 {
            let v = bounded(99, 1, &mut ctr, 10);
            assert!(v < 10);
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }
}
