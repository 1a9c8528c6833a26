//! Model-level contrastive view generation.
//!
//! All three strategies perturb the *encoder*, never the input graphs:
//!
//! * **Dropout** (`D`): run the encoder twice with independent dropout
//!   mask streams; the two final embeddings are the views.
//! * **Cross-layer** (`C`): run the encoder once (a single forward pass,
//!   with one shared mask stream) and take two different layers' outputs
//!   as the views.
//! * **Pruning** (`P`): run the encoder once with the full parameters and
//!   once with a magnitude-pruned copy, dropout disabled for both; the
//!   parameters themselves are never modified.
//!
//! A [`ViewPair`] carries both views, the embeddings the ranking loss
//! should use (the primary pass), and instrumentation: the number of
//! encoder invocations and digests of the graphs each pass consumed, so
//! tests can assert that no strategy touches graph structure.

use ndarray::Array2;

use crate::encoder::{encode, final_embedding, EncoderConfig};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, KnowledgeGraph};
use crate::mask::MaskSource;
use crate::model::{ModelParams, Space};

/// Which augmentation produces the two contrastive views.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AugmentationSpec {
    /// Two encoder passes with independent mask streams at `ratio`.
    Dropout { ratio: f64, seed_a: u64, seed_b: u64 },
    /// One encoder pass; views are layers `k1` and `k2` (`k1 != k2`).
    /// The pass uses the encoder config's own dropout ratio with `seed`.
    CrossLayer { k1: usize, k2: usize, seed: u64 },
    /// Two encoder passes, full vs magnitude-pruned parameters, dropout
    /// disabled.
    Pruning { ratio: f64 },
}

impl AugmentationSpec {
    pub fn validate(&self, layers: usize) -> Result<()> {
        match *self {
            AugmentationSpec::Dropout { ratio, .. } => {
                if !(0.0..1.0).contains(&ratio) {
                    return Err(Error::Config(format!(
                        "dropout ratio must be in [0, 1), got {ratio}"
                    )));
                }
            }
            AugmentationSpec::CrossLayer { k1, k2, .. } => {
                if k1 == k2 {
                    return Err(Error::Config(format!(
                        "cross-layer views need two distinct layers, got k1 = k2 = {k1}"
                    )));
                }
                if k1 > layers || k2 > layers {
                    return Err(Error::Config(format!(
                        "cross-layer indices ({k1}, {k2}) exceed layer count {layers}"
                    )));
                }
            }
            AugmentationSpec::Pruning { ratio } => {
                if !(0.0..1.0).contains(&ratio) {
                    return Err(Error::Config(format!(
                        "prune ratio must be in [0, 1), got {ratio}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Two contrastive views plus the primary embeddings and pass
/// instrumentation. All arrays are ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewPair {
    pub users_a: Array2<f64>,
    pub items_a: Array2<f64>,
    pub users_b: Array2<f64>,
    pub items_b: Array2<f64>,
    /// Embeddings the ranking loss scores against (the primary pass's
    /// final combination).
    pub users_main: Array2<f64>,
    pub items_main: Array2<f64>,
    pub space: Space,
    /// Number of encoder invocations used to build this pair.
    pub encoder_passes: u32,
    /// (interaction, knowledge) graph digests observed before each pass.
    pub graph_digests: Vec<(u64, u64)>,
}

/// Binary masks congruent with the prunable parameter arrays (everything
/// except the curvature scalar), plus the magnitude threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneMask {
    pub user_emb: Array2<f64>,
    pub item_emb: Array2<f64>,
    pub entity_emb: Array2<f64>,
    pub relation_emb: Array2<f64>,
    pub attn_w: Array2<f64>,
    pub threshold: f64,
}

impl PruneMask {
    /// Flat views over the mask arrays, in parameter-field order.
    pub fn flat_views(&self) -> [(&'static str, &[f64]); 5] {
        [
            ("user_emb", self.user_emb.as_slice().unwrap()),
            ("item_emb", self.item_emb.as_slice().unwrap()),
            ("entity_emb", self.entity_emb.as_slice().unwrap()),
            ("relation_emb", self.relation_emb.as_slice().unwrap()),
            ("attn_w", self.attn_w.as_slice().unwrap()),
        ]
    }

    /// Fraction of masked-out (zero) entries.
    pub fn zero_fraction(&self) -> f64 {
        let (zeros, total) = self.flat_views().iter().fold((0usize, 0usize), |acc, (_, v)| {
            (
                acc.0 + v.iter().filter(|&&x| x == 0.0).count(),
                acc.1 + v.len(),
            )
        });
        zeros as f64 / total as f64
    }

    /// A fresh parameter set with the mask applied (`c_raw` untouched;
    /// the input is not modified).
    pub fn apply(&self, params: &ModelParams) -> ModelParams {
        ModelParams {
            user_emb: &params.user_emb * &self.user_emb,
            item_emb: &params.item_emb * &self.item_emb,
            entity_emb: &params.entity_emb * &self.entity_emb,
            relation_emb: &params.relation_emb * &self.relation_emb,
            attn_w: &params.attn_w * &self.attn_w,
            c_raw: params.c_raw,
        }
    }
}

/// Keep-mask over pooled magnitudes: zeroes the `floor(ratio * n)`
/// smallest-|value| entries (ties broken by position), keeps the rest.
/// Returns the 0/1 factors and the threshold actually used.
pub fn magnitude_mask(values: &[f64], ratio: f64) -> (Vec<f64>, f64) {
    let n = values.len();
    let k = (ratio * n as f64).floor() as usize;
    if k == 0 {
        // Nothing pruned; any threshold below all magnitudes works.
        return (vec![1.0; n], -1.0);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a]
            .abs()
            .partial_cmp(&values[b].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut mask = vec![1.0; n];
    for &idx in order.iter().take(k) {
        mask[idx] = 0.0;
    }
    (mask, values[order[k - 1]].abs())
}

/// Magnitude-pruning mask at the given ratio: the threshold is the pooled
/// `ratio`-quantile of |θ| over all prunable arrays, and entries at or
/// below it are zeroed (the zero fraction is exact to quantile
/// granularity, 1/|Θ|).
pub fn prune_mask(params: &ModelParams, ratio: f64) -> Result<PruneMask> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::Config(format!(
            "prune ratio must be in [0, 1), got {ratio}"
        )));
    }
    let mut pooled = Vec::with_capacity(params.prunable_len());
    for (name, view) in params.flat_views() {
        if name != "c_raw" {
            pooled.extend_from_slice(view);
        }
    }
    let (mask, threshold) = magnitude_mask(&pooled, ratio);
    let mut offset = 0;
    let mut take = |shape: (usize, usize)| -> Array2<f64> {
        let len = shape.0 * shape.1;
        let arr = Array2::from_shape_vec(shape, mask[offset..offset + len].to_vec()).unwrap();
        offset += len;
        arr
    };
    Ok(PruneMask {
        user_emb: take(params.user_emb.dim()),
        item_emb: take(params.item_emb.dim()),
        entity_emb: take(params.entity_emb.dim()),
        relation_emb: take(params.relation_emb.dim()),
        attn_w: take(params.attn_w.dim()),
        threshold,
    })
}

fn run_pass(
    params: &ModelParams,
    g1: &BipartiteGraph,
    g2: &KnowledgeGraph,
    cfg: &EncoderConfig,
    mask: &MaskSource,
    digests: &mut Vec<(u64, u64)>,
) -> Result<crate::encoder::LayerOutputs> {
    digests.push((g1.digest(), g2.digest()));
    encode(params, g1, g2, cfg, mask)
}

/// Dropout views: two full passes with independent mask streams over
/// identical parameters. The primary embeddings come from the first pass.
pub fn views_dropout(
    params: &ModelParams,
    g1: &BipartiteGraph,
    g2: &KnowledgeGraph,
    cfg: &EncoderConfig,
    ratio: f64,
    seed_a: u64,
    seed_b: u64,
) -> Result<ViewPair> {
    let mut cfg_d = *cfg;
    cfg_d.dropout_ratio = ratio;
    let mut digests = Vec::new();
    let lo_a = run_pass(params, g1, g2, &cfg_d, &MaskSource::new(seed_a, ratio)?, &mut digests)?;
    let lo_b = run_pass(params, g1, g2, &cfg_d, &MaskSource::new(seed_b, ratio)?, &mut digests)?;
    let (users_a, items_a) = final_embedding(&lo_a, cfg_d.layer_combination)?;
    let (users_b, items_b) = final_embedding(&lo_b, cfg_d.layer_combination)?;
    Ok(ViewPair {
        users_main: users_a.clone(),
        items_main: items_a.clone(),
        users_a,
        items_a,
        users_b,
        items_b,
        space: lo_a.space,
        encoder_passes: 2,
        graph_digests: digests,
    })
}

/// Cross-layer views: a single pass whose layers `k1` and `k2` are the
/// views ("only one forward-passing is required"). The primary embeddings
/// are the pass's configured final combination.
pub fn views_cross_layer(
    params: &ModelParams,
    g1: &BipartiteGraph,
    g2: &KnowledgeGraph,
    cfg: &EncoderConfig,
    k1: usize,
    k2: usize,
    seed: u64,
) -> Result<ViewPair> {
    AugmentationSpec::CrossLayer { k1, k2, seed }.validate(cfg.layers)?;
    let mut digests = Vec::new();
    let mask = MaskSource::new(seed, cfg.dropout_ratio)?;
    let lo = run_pass(params, g1, g2, cfg, &mask, &mut digests)?;
    let (users_main, items_main) = final_embedding(&lo, cfg.layer_combination)?;
    Ok(ViewPair {
        users_a: lo.users[k1].clone(),
        items_a: lo.items[k1].clone(),
        users_b: lo.users[k2].clone(),
        items_b: lo.items[k2].clone(),
        users_main,
        items_main,
        space: lo.space,
        encoder_passes: 1,
        graph_digests: digests,
    })
}

/// Pruning views: full parameters vs a magnitude-pruned copy, dropout
/// disabled for both passes. Returns the mask alongside the pair so the
/// caller can differentiate against the same frozen mask.
pub fn views_pruning(
    params: &ModelParams,
    g1: &BipartiteGraph,
    g2: &KnowledgeGraph,
    cfg: &EncoderConfig,
    ratio: f64,
) -> Result<(ViewPair, PruneMask)> {
    let mask = prune_mask(params, ratio)?;
    let pair = views_pruning_with_mask(params, g1, g2, cfg, &mask)?;
    Ok((pair, mask))
}

/// Pruning views against an already-computed (frozen) mask.
pub fn views_pruning_with_mask(
    params: &ModelParams,
    g1: &BipartiteGraph,
    g2: &KnowledgeGraph,
    cfg: &EncoderConfig,
    mask: &PruneMask,
) -> Result<ViewPair> {
    let mut cfg_p = *cfg;
    cfg_p.dropout_ratio = 0.0;
    let off = MaskSource::disabled();
    let mut digests = Vec::new();
    let lo_a = run_pass(params, g1, g2, &cfg_p, &off, &mut digests)?;
    let pruned = mask.apply(params);
    let lo_b = run_pass(&pruned, g1, g2, &cfg_p, &off, &mut digests)?;
    let (users_a, items_a) = final_embedding(&lo_a, cfg_p.layer_combination)?;
    let (users_b, items_b) = final_embedding(&lo_b, cfg_p.layer_combination)?;
    Ok(ViewPair {
        users_main: users_a.clone(),
        items_main: items_a.clone(),
        users_a,
        items_a,
        users_b,
        items_b,
        space: lo_a.space,
        encoder_passes: 2,
        graph_digests: digests,
    })
}

/// Dispatch on the augmentation kind.
pub fn generate_views(
    params: &ModelParams,
    g1: &BipartiteGraph,
    g2: &KnowledgeGraph,
    cfg: &EncoderConfig,
    spec: &AugmentationSpec,
) -> Result<ViewPair> {
    spec.validate(cfg.layers)?;
    match *spec {
        AugmentationSpec::Dropout { ratio, seed_a, seed_b } => {
            views_dropout(params, g1, g2, cfg, ratio, seed_a, seed_b)
        }
        AugmentationSpec::CrossLayer { k1, k2, seed } => {
            views_cross_layer(params, g1, g2, cfg, k1, k2, seed)
        }
        AugmentationSpec::Pruning { ratio } => {
            Ok(views_pruning(params, g1, g2, cfg, ratio)?.0)
        }
    }
}
