//! Deterministic inverted-dropout mask streams.
//!
//! Training needs dropout masks that are (a) reproducible from a seed,
//! (b) independent across well-named sites (knowledge-graph messages,
//! each propagation layer, each node, each coordinate), and (c) cheap to
//! query out of order. Instead of drawing from a stateful RNG, a mask
//! factor is a pure function of `(seed, domain, index, coordinate)`
//! hashed through a splitmix64-style mixer. Two encoder passes over the
//! same graph with the same seed therefore see bit-identical masks, and
//! two different seeds give independent streams.
//!
//! Masks use the inverted convention: a kept coordinate is scaled by
//! `1 / (1 - ratio)` so the expected value of a masked vector equals the
//! unmasked vector, and evaluation simply runs with a disabled source.

/// Named mask domains so distinct dropout sites never share a stream.
pub mod domains {
    /// Knowledge-graph message dropout at aggregation hop `h`.
    pub fn kg_message(hop: usize) -> u64 {
        0x1000 + hop as u64
    }

    /// User-side propagation dropout entering layer `k` (1-based).
    pub fn layer_user(k: usize) -> u64 {
        0x2000 + k as u64
    }

    /// Item-side propagation dropout entering layer `k` (1-based).
    pub fn layer_item(k: usize) -> u64 {
        0x3000 + k as u64
    }
}

/// splitmix64 finalizer: a fast, well-distributed 64-bit mixer.
#[inline]
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Combine a seed with site identifiers into one well-mixed word.
#[inline]
fn mix_site(seed: u64, domain: u64, index: u64, coord: u64) -> u64 {
    let mut h = mix(seed);
    h = mix(h ^ domain);
    h = mix(h ^ index);
    mix(h ^ coord)
}

/// Derive an independent sub-seed from a base seed and a site tag.
/// Used for per-batch augmentation seeds and batch sampling.
pub fn derive_seed(base: u64, tag: u64, a: u64, b: u64) -> u64 {
    mix_site(base, tag, a, b)
}

/// A seeded, stateless inverted-dropout source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskSource {
    seed: u64,
    ratio: f64,
}

impl MaskSource {
    /// A source that drops each coordinate independently with probability
    /// `ratio` in `[0, 1)`.
    pub fn new(seed: u64, ratio: f64) -> crate::Result<Self> {
        if !(0.0..1.0).contains(&ratio) {
            return Err(crate::Error::Config(format!(
                "dropout ratio must be in [0, 1), got {ratio}"
            )));
        }
        Ok(MaskSource { seed, ratio })
    }

    /// A source that keeps everything (evaluation / pruning passes).
    pub fn disabled() -> Self {
        MaskSource { seed: 0, ratio: 0.0 }
    }

    /// Drop probability.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Seed of this stream.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Whether this source keeps everything.
    pub fn is_disabled(&self) -> bool {
        self.ratio == 0.0
    }

    /// Mask factor for one coordinate: `0.0` (dropped) or `1/(1 - ratio)`
    /// (kept, inverted scaling). A pure function of the arguments.
    #[inline]
    pub fn factor(&self, domain: u64, index: u64, coord: u64) -> f64 {
        if self.ratio == 0.0 {
            return 1.0;
        }
        let h = mix_site(self.seed, domain, index, coord);
        // Top 53 bits -> uniform in [0, 1).
        let u = (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u < self.ratio {
            0.0
        } else {
            1.0 / (1.0 - self.ratio)
        }
    }

    /// Mask factors for coordinates `0..len` of one site.
    pub fn vector(&self, domain: u64, index: u64, len: usize) -> Vec<f64> {
        (0..len).map(|j| self.factor(domain, index, j as u64)).collect()
    }
}
