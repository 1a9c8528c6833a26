//! Relation-aware knowledge aggregation with distance-based attention.
//!
//! For a target item `i` with knowledge-graph neighbor entities `t` linked
//! by relations `r`, the attention logit of one neighbor is
//!
//! ```text
//! logit(t) = fermi_dirac( d_L( lift(r),  W (*) (z_t (+) z_i) ) )
//! ```
//!
//! where `(+)` is hyperbolic concatenation (entity first, then item),
//! `(*)` the Lorentzian linear map of the learnable matrix `W`, and
//! `fermi_dirac` the decoder with hyperparameters `c1, c2`. The logits
//! pass through a max-subtracted softmax to give normalized weights, and
//! the item representation becomes
//!
//! ```text
//! z_i' = exp_o( log_o(z_i) + dropout( sum_t pi_t * log_o(z_t) ) )
//! ```
//!
//! with inverted dropout on the tangent-space message sum only — never on
//! manifold coordinates.
//!
//! Everything here operates either on typed [`LorentzPoint`]s (the
//! manifold-facing API) or on raw tangent rows (the batch path used by
//! the encoder, which also supports the Euclidean ablation where the
//! attention scalar is a plain dot product instead of a distance).

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::lorentz::{self, LorentzPoint};
use crate::mask::MaskSource;
use crate::model::{Geometry, Space};

/// Learnable attention transform plus the Fermi-Dirac hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct AttentionParams<'a> {
    /// Shape (d-1) x 2(d-1): maps concatenated tangent coordinates back
    /// to a single tangent vector.
    pub w: ArrayView2<'a, f64>,
    pub c1: f64,
    pub c2: f64,
}

impl<'a> AttentionParams<'a> {
    pub fn new(w: ArrayView2<'a, f64>, c1: f64, c2: f64) -> Result<Self> {
        if c2 <= 0.0 || !c2.is_finite() || !c1.is_finite() {
            return Err(Error::Config(format!(
                "Fermi-Dirac parameters must be finite with c2 > 0, got c1={c1}, c2={c2}"
            )));
        }
        Ok(AttentionParams { w, c1, c2 })
    }
}

/// Normalized attention weights for one item's neighborhood: each in
/// (0, 1), summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionWeights(pub Vec<f64>);

impl AttentionWeights {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Attention logit for one (entity, item, relation) triple on the
/// manifold: `fermi_dirac(d_L(r, W (*) (z_t (+) z_i)))`, a value in (0, 1).
pub fn attention_logit(
    z_t: &LorentzPoint,
    z_i: &LorentzPoint,
    r: &LorentzPoint,
    params: &AttentionParams<'_>,
) -> Result<f64> {
    let cat = lorentz::hyperbolic_concat(z_t, z_i)?;
    if params.w.ncols() != cat.dim() - 1 || params.w.nrows() != r.dim() - 1 {
        return Err(Error::DimMismatch {
            expected: cat.dim() - 1,
            got: params.w.ncols(),
        });
    }
    let transformed = lorentz::lorentzian_linear(params.w, &cat)?;
    let d = lorentz::lorentz_distance(r, &transformed)?;
    Ok(lorentz::fermi_dirac(d, params.c1, params.c2))
}

/// Batch-path logit over raw tangent rows (entity tangent, item tangent,
/// relation row), dispatching on geometry: Lorentz uses the manifold
/// distance between lifted points, the Euclidean ablation uses the dot
/// product of the relation row with the transformed concatenation.
pub fn attention_logit_tangent(
    space: &Space,
    t_entity: ArrayView1<'_, f64>,
    t_item: ArrayView1<'_, f64>,
    r_row: ArrayView1<'_, f64>,
    params: &AttentionParams<'_>,
) -> Result<f64> {
    let k = t_entity.len();
    if t_item.len() != k || r_row.len() != k {
        return Err(Error::DimMismatch {
            expected: k,
            got: t_item.len().max(r_row.len()),
        });
    }
    if params.w.ncols() != 2 * k || params.w.nrows() != k {
        return Err(Error::DimMismatch {
            expected: 2 * k,
            got: params.w.ncols(),
        });
    }
    let mut cat = Array1::zeros(2 * k);
    cat.slice_mut(ndarray::s![..k]).assign(&t_entity);
    cat.slice_mut(ndarray::s![k..]).assign(&t_item);
    let wv = params.w.dot(&cat);
    let scalar = match space.geometry {
        Geometry::Lorentz => {
            let rp = space.lift(r_row);
            let wp = space.lift(wv.view());
            lorentz::raw::distance(rp.view(), wp.view(), space.c)?
        }
        Geometry::Euclidean => r_row.dot(&wv),
    };
    Ok(lorentz::fermi_dirac(scalar, params.c1, params.c2))
}

/// Max-subtracted softmax. Logits must be non-empty and finite.
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::Data("softmax over empty neighborhood".to_string()));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Numerical("non-finite attention logit".to_string()));
    }
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let denom: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / denom).collect())
}

/// Normalized attention weights of an item over its KG neighborhood.
///
/// `neighbors` and `relations` are parallel: `neighbors[j]` is linked to
/// the item by relation `relations[j]`. Errors on an empty neighborhood
/// (the caller skips aggregation in that case).
pub fn attention_weights(
    z_i: &LorentzPoint,
    neighbors: &[LorentzPoint],
    relations: &[LorentzPoint],
    params: &AttentionParams<'_>,
) -> Result<AttentionWeights> {
    if neighbors.is_empty() {
        return Err(Error::Data(
            "attention over an empty neighborhood".to_string(),
        ));
    }
    if neighbors.len() != relations.len() {
        return Err(Error::DimMismatch {
            expected: neighbors.len(),
            got: relations.len(),
        });
    }
    let mut logits = Vec::with_capacity(neighbors.len());
    for (z_t, r) in neighbors.iter().zip(relations.iter()) {
        logits.push(attention_logit(z_t, z_i, r, params)?);
    }
    Ok(AttentionWeights(softmax(&logits)?))
}

/// Aggregate a weighted tangent-space message into an item point:
/// `exp_o(log_o(z_i) + mask (.) sum_t pi_t log_o(z_t))`.
///
/// The mask site is `(domain, index)` — typically the KG-message domain
/// for the current hop and the item id — so that concurrent calls see
/// deterministic masks. With no neighbors the item is returned unchanged
/// (bitwise).
pub fn aggregate_item(
    z_i: &LorentzPoint,
    neighbors: &[LorentzPoint],
    weights: &AttentionWeights,
    dropout: &MaskSource,
    site: (u64, u64),
) -> Result<LorentzPoint> {
    if neighbors.len() != weights.len() {
        return Err(Error::DimMismatch {
            expected: neighbors.len(),
            got: weights.len(),
        });
    }
    if neighbors.is_empty() {
        return Ok(z_i.clone());
    }
    let c = z_i.curvature();
    let t_i = lorentz::log_map_origin(z_i)?;
    let mut msg = Array1::zeros(z_i.dim() - 1);
    for (z_t, &pi) in neighbors.iter().zip(weights.0.iter()) {
        let t_t = lorentz::log_map_origin(z_t)?;
        msg.scaled_add(pi, &t_t.space());
    }
    let mut out = t_i.space().to_owned();
    for (j, m) in msg.iter().enumerate() {
        out[j] += dropout.factor(site.0, site.1, j as u64) * m;
    }
    Ok(lorentz::exp_map_origin(&lorentz::TangentVector::from_space(
        out.view(),
        c,
    )))
}

/// Tangent-space aggregation used by the batch encoder: adds the masked
/// weighted message sum to the item's tangent row in place.
pub fn aggregate_item_tangent(
    t_item: &mut Array1<f64>,
    neighbor_rows: &[ArrayView1<'_, f64>],
    weights: &[f64],
    dropout: &MaskSource,
    site: (u64, u64),
) {
    debug_assert_eq!(neighbor_rows.len(), weights.len());
    let mut msg = Array1::zeros(t_item.len());
    for (row, &pi) in neighbor_rows.iter().zip(weights.iter()) {
        msg.scaled_add(pi, row);
    }
    for (j, m) in msg.iter().enumerate() {
        t_item[j] += dropout.factor(site.0, site.1, j as u64) * m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{lift, origin, Curvature};
    use crate::mask::domains;
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c1() -> Curvature {
        Curvature::new(1.0).unwrap()
    }

    fn rand_point(rng: &mut ChaCha8Rng, k: usize) -> LorentzPoint {
        let z = Array1::from_iter((0..k).map(|_| rng.random_range(-1.0..1.0)));
        lift(z.view(), c1()).unwrap()
    }

    #[test]
    fn zero_w_gives_radial_fermi_score() {
        // W = 0 maps everything to the origin, so the logit reduces to
        // fermi(d(r, o)) = fermi(|r_euclidean|) by radial isometry.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z_t = rand_point(&mut rng, 3);
        let z_i = rand_point(&mut rng, 3);
        let r_vec = array![0.6, -0.3, 0.7];
        let r = lift(r_vec.view(), c1()).unwrap();
        let w = Array2::zeros((3, 6));
        let params = AttentionParams::new(w.view(), 1.0, 1.0).unwrap();
        let logit = attention_logit(&z_t, &z_i, &r, &params).unwrap();
        let norm = r_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(
            logit,
            lorentz::fermi_dirac(norm, 1.0, 1.0),
            epsilon = 1e-9
        );
    }

    #[test]
    fn logit_is_half_at_first_fermi_parameter() {
        // Choose r at distance exactly c1 from the transformed point by
        // putting both on a radial line: W (*) cat lands at the origin
        // (W = 0) and r at radius c1.
        let z_t = origin(c1(), 4).unwrap();
        let z_i = origin(c1(), 4).unwrap();
        let r = lift(array![1.3, 0.0, 0.0].view(), c1()).unwrap();
        let w = Array2::zeros((3, 6));
        let params = AttentionParams::new(w.view(), 1.3, 0.7).unwrap();
        let logit = attention_logit(&z_t, &z_i, &r, &params).unwrap();
        assert_relative_eq!(logit, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn logits_stay_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut w_arr = Array2::zeros((3, 6));
        for v in w_arr.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let params = AttentionParams::new(w_arr.view(), 1.0, 1.0).unwrap();
        for _ in 0..200 {
            let z_t = rand_point(&mut rng, 3);
            let z_i = rand_point(&mut rng, 3);
            let r = rand_point(&mut rng, 3);
            let l = attention_logit(&z_t, &z_i, &r, &params).unwrap();
            assert!(l > 0.0 && l < 1.0, "logit out of range: {l}");
        }
    }

    #[test]
    fn tangent_path_matches_typed_path_on_lorentz() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = 4;
        let mut w_arr = Array2::zeros((k, 2 * k));
        for v in w_arr.iter_mut() {
            *v = rng.random_range(-0.7..0.7);
        }
        let params = AttentionParams::new(w_arr.view(), 1.0, 0.5).unwrap();
        let sp = Space::new(Geometry::Lorentz, 1.0);
        for _ in 0..50 {
            let te = Array1::from_iter((0..k).map(|_| rng.random_range(-1.0..1.0)));
            let ti = Array1::from_iter((0..k).map(|_| rng.random_range(-1.0..1.0)));
            let tr = Array1::from_iter((0..k).map(|_| rng.random_range(-1.0..1.0)));
            let fast =
                attention_logit_tangent(&sp, te.view(), ti.view(), tr.view(), &params).unwrap();
            let typed = attention_logit(
                &lift(te.view(), c1()).unwrap(),
                &lift(ti.view(), c1()).unwrap(),
                &lift(tr.view(), c1()).unwrap(),
                &params,
            )
            .unwrap();
            assert_relative_eq!(fast, typed, epsilon = 1e-9);
        }
    }

    #[test]
    fn single_neighbor_gets_weight_one() {
        assert_eq!(softmax(&[0.37]).unwrap(), vec![1.0]);
    }

    #[test]
    fn equal_logits_share_weight() {
        let w = softmax(&[0.42, 0.42]).unwrap();
        assert_relative_eq!(w[0], 0.5);
        assert_relative_eq!(w[1], 0.5);
    }

    #[test]
    fn softmax_normalization_over_random_neighborhoods() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.random_range(1..=50);
            let logits: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let w = softmax(&logits).unwrap();
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9);
            assert!(w.iter().all(|&x| x > 0.0 && x < 1.0 || n == 1));
        }
    }

    #[test]
    fn softmax_is_permutation_equivariant() {
        let logits = [0.9, 0.1, 0.5, 0.3];
        let w = softmax(&logits).unwrap();
        let perm = [2usize, 0, 3, 1];
        let permuted: Vec<f64> = perm.iter().map(|&j| logits[j]).collect();
        let wp = softmax(&permuted).unwrap();
        for (j, &p) in perm.iter().enumerate() {
            assert_relative_eq!(wp[j], w[p], epsilon = 1e-12);
        }
    }

    #[test]
    fn shrinking_a_distance_raises_that_weight() {
        // Attention sharpness: decrease one neighbor's distance input and
        // its normalized weight must strictly increase.
        let dists = [1.2, 0.8, 1.7];
        let logit = |d: f64| lorentz::fermi_dirac(d, 1.0, 1.0);
        let base: Vec<f64> = dists.iter().map(|&d| logit(d)).collect();
        let w0 = softmax(&base).unwrap();
        let mut closer = base.clone();
        closer[2] = logit(0.4);
        let w1 = softmax(&closer).unwrap();
        assert!(w1[2] > w0[2]);
    }

    #[test]
    fn attention_weights_requires_neighbors() {
        let z = origin(c1(), 3).unwrap();
        let w = Array2::zeros((3, 6));
        let params = AttentionParams::new(w.view(), 1.0, 1.0).unwrap();
        assert!(attention_weights(&z, &[], &[], &params).is_err());
    }

    #[test]
    fn aggregate_empty_neighborhood_is_bitwise_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let z_i = rand_point(&mut rng, 3);
        let out = aggregate_item(
            &z_i,
            &[],
            &AttentionWeights(vec![]),
            &MaskSource::disabled(),
            (domains::kg_message(0), 0),
        )
        .unwrap();
        assert_eq!(out.coords(), z_i.coords());
    }

    #[test]
    fn aggregate_origin_neighbor_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let z_i = rand_point(&mut rng, 3);
        let o = origin(c1(), 4).unwrap();
        let out = aggregate_item(
            &z_i,
            &[o],
            &AttentionWeights(vec![1.0]),
            &MaskSource::disabled(),
            (domains::kg_message(0), 1),
        )
        .unwrap();
        for (a, b) in out.coords().iter().zip(z_i.coords().iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn aggregate_output_is_on_manifold_and_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut w_arr = Array2::zeros((3, 6));
        for v in w_arr.iter_mut() {
            *v = rng.random_range(-0.5..0.5);
        }
        let params = AttentionParams::new(w_arr.view(), 1.0, 1.0).unwrap();
        for trial in 0..50u64 {
            let z_i = rand_point(&mut rng, 3);
            let n = rng.random_range(1..6);
            let nbrs: Vec<LorentzPoint> = (0..n).map(|_| rand_point(&mut rng, 3)).collect();
            let rels: Vec<LorentzPoint> = (0..n).map(|_| rand_point(&mut rng, 3)).collect();
            let w = attention_weights(&z_i, &nbrs, &rels, &params).unwrap();
            let out = aggregate_item(
                &z_i,
                &nbrs,
                &w,
                &MaskSource::disabled(),
                (domains::kg_message(0), trial),
            )
            .unwrap();
            assert!(out.constraint_residual().abs() <= 1e-6);

            // Reverse the neighborhood: weights permute along, aggregate
            // output drifts by at most 1e-9.
            let rnbrs: Vec<LorentzPoint> = nbrs.iter().rev().cloned().collect();
            let rrels: Vec<LorentzPoint> = rels.iter().rev().cloned().collect();
            let wr = attention_weights(&z_i, &rnbrs, &rrels, &params).unwrap();
            for (a, b) in wr.0.iter().zip(w.0.iter().rev()) {
                assert_relative_eq!(a, b, epsilon = 1e-12);
            }
            let out_r = aggregate_item(
                &z_i,
                &rnbrs,
                &wr,
                &MaskSource::disabled(),
                (domains::kg_message(0), trial),
            )
            .unwrap();
            for (a, b) in out_r.coords().iter().zip(out.coords().iter()) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn dropout_zero_aggregation_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let z_i = rand_point(&mut rng, 3);
        let nbrs = vec![rand_point(&mut rng, 3), rand_point(&mut rng, 3)];
        let w = AttentionWeights(vec![0.3, 0.7]);
        let a = aggregate_item(&z_i, &nbrs, &w, &MaskSource::new(1, 0.0).unwrap(), (0, 5)).unwrap();
        let b = aggregate_item(&z_i, &nbrs, &w, &MaskSource::new(2, 0.0).unwrap(), (0, 5)).unwrap();
        assert_eq!(a.coords(), b.coords());
    }

    #[test]
    fn euclidean_ablation_uses_dot_scoring() {
        let sp = Space::new(Geometry::Euclidean, 1.0);
        let k = 2;
        // W = [I | 0]: transformed = entity tangent; logit = fermi(r . t_e).
        let mut w_arr = Array2::zeros((k, 2 * k));
        w_arr[[0, 0]] = 1.0;
        w_arr[[1, 1]] = 1.0;
        let params = AttentionParams::new(w_arr.view(), 1.0, 1.0).unwrap();
        let te = array![0.5, -1.0];
        let ti = array![9.0, 9.0]; // ignored by this W
        let tr = array![2.0, 1.0];
        let logit =
            attention_logit_tangent(&sp, te.view(), ti.view(), tr.view(), &params).unwrap();
        let expect = lorentz::fermi_dirac(2.0 * 0.5 + 1.0 * (-1.0), 1.0, 1.0);
        assert_relative_eq!(logit, expect, epsilon = 1e-12);
    }
}
