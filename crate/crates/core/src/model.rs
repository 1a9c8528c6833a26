//! Learnable parameter container and geometry selection.
//!
//! All embeddings are stored as Euclidean rows of length d-1 (the "space"
//! coordinates); they only become manifold points through the origin
//! exponential map inside the encoder. The curvature is trained through a
//! softplus reparameterization `c = softplus(c_raw) + CURVATURE_FLOOR`,
//! which keeps `c` strictly positive for any real `c_raw`.

use ndarray::{Array1, Array2, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::lorentz;

/// Lower bound added to the softplus so curvature never collapses to 0.
pub const CURVATURE_FLOOR: f64 = 1e-4;

/// Which geometry the encoder runs in. `Euclidean` is the ablation that
/// swaps lift/exp/log for identity maps and distance scoring for dot
/// products, leaving everything else unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Lorentz,
    Euclidean,
}

/// Entity counts and the ambient embedding dimension d (so that space
/// coordinates have length d-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shapes {
    pub num_users: usize,
    pub num_items: usize,
    pub num_entities: usize,
    pub num_relations: usize,
    pub dim: usize,
}

impl Shapes {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::Config(format!(
                "embedding dimension must be >= 2, got {}",
                self.dim
            )));
        }
        if self.num_users == 0 || self.num_items == 0 {
            return Err(Error::Config(
                "model needs at least one user and one item".to_string(),
            ));
        }
        Ok(())
    }
}

/// Numerically stable softplus `ln(1 + e^x)`.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// All trainable parameters.
///
/// `attn_w` is the attention transform applied to concatenated tangent
/// coordinates: shape (d-1) x 2(d-1). `c_raw` parameterizes curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub user_emb: Array2<f64>,
    pub item_emb: Array2<f64>,
    pub entity_emb: Array2<f64>,
    pub relation_emb: Array2<f64>,
    pub attn_w: Array2<f64>,
    pub c_raw: f64,
}

/// Field names in checkpoint/flattening order.
pub const PARAM_FIELDS: [&str; 6] = [
    "user_emb",
    "item_emb",
    "entity_emb",
    "relation_emb",
    "attn_w",
    "c_raw",
];

impl ModelParams {
    /// Gaussian initialization, deterministic per seed. `c_raw` starts at
    /// the value whose softplus reparameterization gives c = 1.
    pub fn init(shapes: &Shapes, init_scale: f64, seed: u64) -> Result<Self> {
        shapes.validate()?;
        if !(init_scale > 0.0 && init_scale.is_finite()) {
            return Err(Error::Config(format!(
                "init scale must be positive, got {init_scale}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, init_scale)
            .map_err(|e| Error::Config(format!("bad init distribution: {e}")))?;
        let k = shapes.dim - 1;
        let mut draw = |rows: usize, cols: usize| -> Array2<f64> {
            Array2::from_shape_fn((rows, cols), |_| normal.sample(&mut rng))
        };
        Ok(ModelParams {
            user_emb: draw(shapes.num_users, k),
            item_emb: draw(shapes.num_items, k),
            entity_emb: draw(shapes.num_entities, k),
            relation_emb: draw(shapes.num_relations, k),
            attn_w: draw(k, 2 * k),
            // softplus(c_raw) + floor = 1.
            c_raw: ((1.0 - CURVATURE_FLOOR) as f64).exp_m1().ln(),
        })
    }

    /// Current curvature `c = softplus(c_raw) + CURVATURE_FLOOR`.
    pub fn curvature(&self) -> f64 {
        softplus(self.c_raw) + CURVATURE_FLOOR
    }

    /// Ambient dimension d.
    pub fn dim(&self) -> usize {
        self.user_emb.ncols() + 1
    }

    /// Shape summary of this parameter set.
    pub fn shapes(&self) -> Shapes {
        Shapes {
            num_users: self.user_emb.nrows(),
            num_items: self.item_emb.nrows(),
            num_entities: self.entity_emb.nrows(),
            num_relations: self.relation_emb.nrows(),
            dim: self.dim(),
        }
    }

    /// Total number of scalar parameters (including `c_raw`).
    pub fn flat_len(&self) -> usize {
        self.prunable_len() + 1
    }

    /// Number of scalars eligible for magnitude pruning (everything
    /// except `c_raw`).
    pub fn prunable_len(&self) -> usize {
        self.user_emb.len()
            + self.item_emb.len()
            + self.entity_emb.len()
            + self.relation_emb.len()
            + self.attn_w.len()
    }

    /// Read-only flat views over every parameter field, in
    /// [`PARAM_FIELDS`] order.
    pub fn flat_views(&self) -> [(&'static str, &[f64]); 6] {
        [
            ("user_emb", self.user_emb.as_slice().unwrap()),
            ("item_emb", self.item_emb.as_slice().unwrap()),
            ("entity_emb", self.entity_emb.as_slice().unwrap()),
            ("relation_emb", self.relation_emb.as_slice().unwrap()),
            ("attn_w", self.attn_w.as_slice().unwrap()),
            ("c_raw", std::slice::from_ref(&self.c_raw)),
        ]
    }

    /// Mutable flat views over every parameter field, in
    /// [`PARAM_FIELDS`] order.
    pub fn flat_views_mut(&mut self) -> [(&'static str, &mut [f64]); 6] {
        let ModelParams {
            user_emb,
            item_emb,
            entity_emb,
            relation_emb,
            attn_w,
            c_raw,
        } = self;
        [
            ("user_emb", user_emb.as_slice_mut().unwrap()),
            ("item_emb", item_emb.as_slice_mut().unwrap()),
            ("entity_emb", entity_emb.as_slice_mut().unwrap()),
            ("relation_emb", relation_emb.as_slice_mut().unwrap()),
            ("attn_w", attn_w.as_slice_mut().unwrap()),
            ("c_raw", std::slice::from_mut(c_raw)),
        ]
    }

    /// Error if any parameter is NaN or infinite.
    pub fn validate_finite(&self) -> Result<()> {
        for (name, view) in self.flat_views() {
            if let Some(pos) = view.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!(
                    "non-finite parameter in {name}[{pos}]"
                )));
            }
        }
        Ok(())
    }
}

/// Gradients (or any parameter-congruent accumulator such as Adam
/// moments), one array per parameter field.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub user_emb: Array2<f64>,
    pub item_emb: Array2<f64>,
    pub entity_emb: Array2<f64>,
    pub relation_emb: Array2<f64>,
    pub attn_w: Array2<f64>,
    pub c_raw: f64,
}

impl GradientSet {
    /// Zero gradients with the same shapes as `params`.
    pub fn zeros_like(params: &ModelParams) -> Self {
        GradientSet {
            user_emb: Array2::zeros(params.user_emb.raw_dim()),
            item_emb: Array2::zeros(params.item_emb.raw_dim()),
            entity_emb: Array2::zeros(params.entity_emb.raw_dim()),
            relation_emb: Array2::zeros(params.relation_emb.raw_dim()),
            attn_w: Array2::zeros(params.attn_w.raw_dim()),
            c_raw: 0.0,
        }
    }

    /// Read-only flat views in [`PARAM_FIELDS`] order.
    pub fn flat_views(&self) -> [(&'static str, &[f64]); 6] {
        [
            ("user_emb", self.user_emb.as_slice().unwrap()),
            ("item_emb", self.item_emb.as_slice().unwrap()),
            ("entity_emb", self.entity_emb.as_slice().unwrap()),
            ("relation_emb", self.relation_emb.as_slice().unwrap()),
            ("attn_w", self.attn_w.as_slice().unwrap()),
            ("c_raw", std::slice::from_ref(&self.c_raw)),
        ]
    }

    /// Mutable flat views in [`PARAM_FIELDS`] order.
    pub fn flat_views_mut(&mut self) -> [(&'static str, &mut [f64]); 6] {
        let GradientSet {
            user_emb,
            item_emb,
            entity_emb,
            relation_emb,
            attn_w,
            c_raw,
        } = self;
        [
            ("user_emb", user_emb.as_slice_mut().unwrap()),
            ("item_emb", item_emb.as_slice_mut().unwrap()),
            ("entity_emb", entity_emb.as_slice_mut().unwrap()),
            ("relation_emb", relation_emb.as_slice_mut().unwrap()),
            ("attn_w", attn_w.as_slice_mut().unwrap()),
            ("c_raw", std::slice::from_mut(c_raw)),
        ]
    }

    /// Largest absolute entry (for logging / divergence checks).
    pub fn max_abs(&self) -> f64 {
        self.flat_views()
            .iter()
            .flat_map(|(_, v)| v.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

/// Geometry-dispatched point maps over raw coordinate rows.
///
/// In Lorentz mode these are the origin exp/log maps under the model's
/// current curvature; in the Euclidean ablation they become identity
/// maps (a Euclidean vector `z` is stored as the ambient row `[0, z]`,
/// keeping widths uniform across geometries).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Space {
    pub geometry: Geometry,
    pub c: f64,
}

impl Space {
    pub fn new(geometry: Geometry, c: f64) -> Self {
        Space { geometry, c }
    }

    /// Map space coordinates (length d-1) to an ambient row (length d).
    pub fn lift(&self, z: ArrayView1<'_, f64>) -> Array1<f64> {
        match self.geometry {
            Geometry::Lorentz => lorentz::raw::lift(z, self.c),
            Geometry::Euclidean => {
                let mut out = Array1::zeros(z.len() + 1);
                out.slice_mut(ndarray::s![1..]).assign(&z);
                out
            }
        }
    }

    /// Map an ambient row (length d) back to space coordinates (d-1).
    pub fn log_space(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        match self.geometry {
            Geometry::Lorentz => lorentz::raw::log_space(x, self.c),
            Geometry::Euclidean => Ok(x.slice(ndarray::s![1..]).to_owned()),
        }
    }

    /// The neutral element: manifold origin, or the zero vector.
    pub fn origin(&self, dim: usize) -> Array1<f64> {
        let mut out = Array1::zeros(dim);
        if self.geometry == Geometry::Lorentz {
            out[0] = self.c.sqrt();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn shapes() -> Shapes {
        Shapes {
            num_users: 3,
            num_items: 4,
            num_entities: 5,
            num_relations: 2,
            dim: 4,
        }
    }

    #[test]
    fn init_is_deterministic_and_shaped() {
        let a = ModelParams::init(&shapes(), 0.1, 7).unwrap();
        let b = ModelParams::init(&shapes(), 0.1, 7).unwrap();
        assert_eq!(a, b);
        let c = ModelParams::init(&shapes(), 0.1, 8).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.user_emb.dim(), (3, 3));
        assert_eq!(a.item_emb.dim(), (4, 3));
        assert_eq!(a.entity_emb.dim(), (5, 3));
        assert_eq!(a.relation_emb.dim(), (2, 3));
        assert_eq!(a.attn_w.dim(), (3, 6));
        assert_eq!(a.dim(), 4);
    }

    #[test]
    fn initial_curvature_is_one() {
        let p = ModelParams::init(&shapes(), 0.1, 0).unwrap();
        assert_relative_eq!(p.curvature(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn curvature_stays_positive_for_any_c_raw() {
        let mut p = ModelParams::init(&shapes(), 0.1, 0).unwrap();
        for cr in [-1e6, -50.0, -1.0, 0.0, 1.0, 50.0] {
            p.c_raw = cr;
            assert!(p.curvature() >= CURVATURE_FLOOR);
            assert!(p.curvature().is_finite());
        }
        p.c_raw = 2.0;
        assert_relative_eq!(p.curvature(), (1.0 + 2.0f64.exp()).ln() + CURVATURE_FLOOR);
    }

    #[test]
    fn flat_views_cover_every_parameter() {
        let p = ModelParams::init(&shapes(), 0.1, 1).unwrap();
        let total: usize = p.flat_views().iter().map(|(_, v)| v.len()).sum();
        assert_eq!(total, p.flat_len());
        assert_eq!(p.prunable_len(), total - 1);
        let names: Vec<&str> = p.flat_views().iter().map(|(n, _)| *n).collect();
        assert_eq!(names, PARAM_FIELDS.to_vec());
    }

    #[test]
    fn gradient_set_is_congruent() {
        let p = ModelParams::init(&shapes(), 0.1, 1).unwrap();
        let g = GradientSet::zeros_like(&p);
        for ((_, pv), (_, gv)) in p.flat_views().iter().zip(g.flat_views().iter()) {
            assert_eq!(pv.len(), gv.len());
        }
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn validate_finite_catches_nan() {
        let mut p = ModelParams::init(&shapes(), 0.1, 1).unwrap();
        assert!(p.validate_finite().is_ok());
        p.item_emb[[2, 1]] = f64::NAN;
        let err = p.validate_finite().unwrap_err();
        assert!(err.to_string().contains("item_emb"), "{err}");
    }

    #[test]
    fn euclidean_space_maps_are_identities() {
        let sp = Space::new(Geometry::Euclidean, 1.0);
        let z = array![0.5, -1.0, 2.0];
        let ambient = sp.lift(z.view());
        assert_eq!(ambient.to_vec(), vec![0.0, 0.5, -1.0, 2.0]);
        let back = sp.log_space(ambient.view()).unwrap();
        assert_eq!(back, z);
        assert_eq!(sp.origin(4).to_vec(), vec![0.0; 4]);
    }

    #[test]
    fn lorentz_space_round_trips() {
        let sp = Space::new(Geometry::Lorentz, 0.8);
        let z = array![0.5, -1.0, 2.0];
        let ambient = sp.lift(z.view());
        let back = sp.log_space(ambient.view()).unwrap();
        for (a, b) in back.iter().zip(z.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
        assert_eq!(sp.origin(4)[0], 0.8f64.sqrt());
    }

    #[test]
    fn softplus_extremes() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0);
        assert_relative_eq!(softplus(0.0), 2.0f64.ln());
    }
}
