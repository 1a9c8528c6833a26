//! Forward pass: knowledge aggregation followed by LightGCN-style
//! propagation over the interaction graph, all in the selected geometry.
//!
//! Layer 0 holds the input representations — users are their lifted base
//! embeddings, items are their base embeddings fused with attended
//! knowledge-graph messages. Each subsequent layer k+1 is the symmetric
//! degree-normalized neighborhood average computed in tangent space:
//!
//! ```text
//! z_u^(k+1) = exp_o( sum_{i in N_u} log_o(z_i^(k)) / sqrt(|N_u| |N_i|) )
//! ```
//!
//! and symmetrically for items. There is no feature transform and no
//! nonlinearity inside the propagation; isolated nodes receive the empty
//! sum and land exactly on the origin. Dropout (inverted scaling, from a
//! deterministic [`MaskSource`]) applies to each node's aggregated tangent
//! vector entering a layer, and to the knowledge message sum at layer 0.

use ndarray::{Array1, Array2};

use crate::attention::{self, AttentionParams};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, KnowledgeGraph, Side};
use crate::lorentz::{Curvature, LorentzPoint};
use crate::mask::{domains, MaskSource};
use crate::model::{Geometry, ModelParams, Space};

/// How per-layer outputs combine into the final embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerCombination {
    /// Use layer K only (default).
    Last,
    /// Lift the mean of all layers' tangent coordinates (layers 0..=K).
    TangentMean,
}

/// Forward-pass configuration shared by training and evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderConfig {
    /// Propagation depth K >= 1.
    pub layers: usize,
    pub layer_combination: LayerCombination,
    /// Tangent-space dropout probability in [0, 1).
    pub dropout_ratio: f64,
    /// Knowledge-aggregation repetitions at layer 0 (1 hop by default).
    pub kg_hops: usize,
    /// Fermi-Dirac decoder parameters for the attention logits.
    pub c1: f64,
    pub c2: f64,
    pub geometry: Geometry,
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers < 1 {
            return Err(Error::Config("encoder needs at least one layer".to_string()));
        }
        if !(0.0..1.0).contains(&self.dropout_ratio) {
            return Err(Error::Config(format!(
                "dropout ratio must be in [0, 1), got {}",
                self.dropout_ratio
            )));
        }
        if self.c2 <= 0.0 {
            return Err(Error::Config(format!("c2 must be positive, got {}", self.c2)));
        }
        Ok(())
    }
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            layers: 3,
            layer_combination: LayerCombination::Last,
            dropout_ratio: 0.1,
            kg_hops: 1,
            c1: 1.0,
            c2: 1.0,
            geometry: Geometry::Lorentz,
        }
    }
}

/// Ambient coordinates of every user and item at every layer 0..=K.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerOutputs {
    pub users: Vec<Array2<f64>>,
    pub items: Vec<Array2<f64>>,
    pub space: Space,
}

impl LayerOutputs {
    /// Propagation depth K (layer count minus the input layer).
    pub fn depth(&self) -> usize {
        self.users.len() - 1
    }

    /// Typed view of one user at one layer (Lorentz geometry only).
    pub fn user_point(&self, layer: usize, u: usize) -> Result<LorentzPoint> {
        self.point(&self.users[layer], u)
    }

    /// Typed view of one item at one layer (Lorentz geometry only).
    pub fn item_point(&self, layer: usize, i: usize) -> Result<LorentzPoint> {
        self.point(&self.items[layer], i)
    }

    fn point(&self, arr: &Array2<f64>, row: usize) -> Result<LorentzPoint> {
        if self.space.geometry != Geometry::Lorentz {
            return Err(Error::Manifold(
                "typed points are only defined in Lorentz geometry".to_string(),
            ));
        }
        LorentzPoint::new(
            arr.row(row).to_owned(),
            Curvature::new(self.space.c)?,
        )
    }
}

/// Row-wise origin log map: ambient matrix (n x d) to tangent coordinates
/// (n x (d-1)).
pub fn log_rows(space: &Space, ambient: &Array2<f64>) -> Result<Array2<f64>> {
    let n = ambient.nrows();
    let k = ambient.ncols() - 1;
    let mut out = Array2::zeros((n, k));
    for (r, row) in ambient.rows().into_iter().enumerate() {
        out.row_mut(r).assign(&space.log_space(row)?);
    }
    Ok(out)
}

/// Row-wise lift: tangent coordinates (n x (d-1)) to ambient (n x d).
fn lift_rows(space: &Space, tangent: &Array2<f64>) -> Array2<f64> {
    let n = tangent.nrows();
    let d = tangent.ncols() + 1;
    let mut out = Array2::zeros((n, d));
    for (r, row) in tangent.rows().into_iter().enumerate() {
        out.row_mut(r).assign(&space.lift(row));
    }
    out
}

/// Knowledge aggregation for all items: base item tangents plus attended,
/// masked entity messages (`kg_hops` rounds). Returns tangent rows.
fn aggregate_items_kg(
    params: &ModelParams,
    g2: &KnowledgeGraph,
    cfg: &EncoderConfig,
    space: &Space,
    mask: &MaskSource,
) -> Result<Array2<f64>> {
    let att = AttentionParams::new(params.attn_w.view(), cfg.c1, cfg.c2)?;
    let mut tangents = params.item_emb.clone();
    for hop in 0..cfg.kg_hops {
        let prev = tangents.clone();
        for i in 0..params.item_emb.nrows() {
            let neighbors = g2.item_neighbors(i as u32);
            if neighbors.is_empty() {
                continue;
            }
            let t_item = prev.row(i);
            let mut logits = Vec::with_capacity(neighbors.len());
            for &(e, r) in neighbors {
                logits.push(attention::attention_logit_tangent(
                    space,
                    params.entity_emb.row(e as usize),
                    t_item,
                    params.relation_emb.row(r as usize),
                    &att,
                )?);
            }
            let weights = attention::softmax(&logits)?;
            let rows: Vec<_> = neighbors
                .iter()
                .map(|&(e, _)| params.entity_emb.row(e as usize))
                .collect();
            let mut t = prev.row(i).to_owned();
            attention::aggregate_item_tangent(
                &mut t,
                &rows,
                &weights,
                mask,
                (domains::kg_message(hop), i as u64),
            );
            tangents.row_mut(i).assign(&t);
        }
    }
    Ok(tangents)
}

/// One propagation layer: maps layer-k ambient rows to layer-(k+1)
/// ambient rows. `layer_index` is the 1-based index of the produced layer
/// (it names the dropout domain).
pub fn propagate_layer(
    users_prev: &Array2<f64>,
    items_prev: &Array2<f64>,
    g1: &BipartiteGraph,
    space: &Space,
    mask: &MaskSource,
    layer_index: usize,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let t_users = log_rows(space, users_prev)?;
    let t_items = log_rows(space, items_prev)?;
    let k = t_users.ncols();

    let mut next_users = Array2::zeros((users_prev.nrows(), k));
    for u in 0..users_prev.nrows() {
        let du = g1.degree(u as u32, Side::User)?;
        if du == 0 {
            continue;
        }
        let mut sum = Array1::zeros(k);
        for &i in g1.neighbors(u as u32, Side::User)? {
            let di = g1.degree(i, Side::Item)?;
            let coef = 1.0 / ((du * di) as f64).sqrt();
            sum.scaled_add(coef, &t_items.row(i as usize));
        }
        for (j, v) in sum.iter().enumerate() {
            next_users[[u, j]] =
                mask.factor(domains::layer_user(layer_index), u as u64, j as u64) * v;
        }
    }

    let mut next_items = Array2::zeros((items_prev.nrows(), k));
    for i in 0..items_prev.nrows() {
        let di = g1.degree(i as u32, Side::Item)?;
        if di == 0 {
            continue;
        }
        let mut sum = Array1::zeros(k);
        for &u in g1.neighbors(i as u32, Side::Item)? {
            let du = g1.degree(u, Side::User)?;
            let coef = 1.0 / ((di * du) as f64).sqrt();
            sum.scaled_add(coef, &t_users.row(u as usize));
        }
        for (j, v) in sum.iter().enumerate() {
            next_items[[i, j]] =
                mask.factor(domains::layer_item(layer_index), i as u64, j as u64) * v;
        }
    }

    Ok((lift_rows(space, &next_users), lift_rows(space, &next_items)))
}

/// Full forward pass, producing every layer's ambient coordinates.
pub fn encode(
    params: &ModelParams,
    g1: &BipartiteGraph,
    g2: &KnowledgeGraph,
    cfg: &EncoderConfig,
    mask: &MaskSource,
) -> Result<LayerOutputs> {
    cfg.validate()?;
    let shapes = params.shapes();
    if g1.num_users() != shapes.num_users || g1.num_items() != shapes.num_items {
        return Err(Error::DimMismatch {
            expected: shapes.num_users,
            got: g1.num_users(),
        });
    }
    let space = Space::new(cfg.geometry, params.curvature());

    let user0 = lift_rows(&space, &params.user_emb);
    let item_tangent0 = aggregate_items_kg(params, g2, cfg, &space, mask)?;
    let item0 = lift_rows(&space, &item_tangent0);

    let mut users = vec![user0];
    let mut items = vec![item0];
    for k in 1..=cfg.layers {
        let (u_next, i_next) = propagate_layer(
            &users[k - 1],
            &items[k - 1],
            g1,
            &space,
            mask,
            k,
        )?;
        users.push(u_next);
        items.push(i_next);
    }
    Ok(LayerOutputs { users, items, space })
}

/// Combine layer outputs into final per-node ambient embeddings.
pub fn final_embedding(
    lo: &LayerOutputs,
    mode: LayerCombination,
) -> Result<(Array2<f64>, Array2<f64>)> {
    match mode {
        LayerCombination::Last => Ok((
            lo.users.last().unwrap().clone(),
            lo.items.last().unwrap().clone(),
        )),
        LayerCombination::TangentMean => {
            let combine = |layers: &[Array2<f64>]| -> Result<Array2<f64>> {
                let n = layers[0].nrows();
                let k = layers[0].ncols() - 1;
                let mut mean = Array2::zeros((n, k));
                for layer in layers {
                    mean += &log_rows(&lo.space, layer)?;
                }
                mean /= layers.len() as f64;
                Ok(lift_rows(&lo.space, &mean))
            };
            Ok((combine(&lo.users)?, combine(&lo.items)?))
        }
    }
}
