//! Lorentz (hyperboloid) model primitives with positive curvature parameter.
//!
//! Points live on the upper sheet of the two-sheeted hyperboloid
//! `<x, x>_L = -c` (c > 0) in an ambient space with Minkowski signature,
//! where the Lorentzian inner product is
//!
//! ```text
//! <a, b>_L = -a_0 * b_0 + sum_{i >= 1} a_i * b_i
//! ```
//!
//! Index 0 is the "time" coordinate, the rest are "space" coordinates.
//! The origin of the model is `o = [sqrt(c), 0, ..., 0]`.
//!
//! All exponential/logarithmic maps here are anchored at the origin;
//! general-base maps are not provided. A Euclidean vector `z` of length
//! d-1 is identified with the origin tangent `[0, z]` and lifted onto the
//! manifold via the origin exponential map:
//!
//! ```text
//! lift(z) = [ sqrt(c) * cosh(|z|/sqrt(c)),  sqrt(c) * sinh(|z|/sqrt(c)) * z/|z| ]
//! ```
//!
//! with `lift(0) = o`. The origin log map inverts this, and geodesic
//! distance is `d(x, y) = sqrt(c) * arcosh(-<x, y>_L / c)`.
//!
//! Floating-point round-off can push the arcosh argument slightly below
//! its mathematical minimum of 1; arguments in `[1 - 1e-9, 1)` are clamped
//! to exactly 1, while anything lower is reported as a manifold violation
//! rather than silently produced as NaN.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Tolerance for the hyperboloid constraint residual `<x, x>_L + c`,
/// scaled by `max(1, c)`.
pub const MANIFOLD_TOL: f64 = 1e-6;

/// Width of the clamp window below 1 inside which arcosh arguments are
/// snapped to 1. Arguments below `1 - ACOSH_SLACK` are errors.
pub const ACOSH_SLACK: f64 = 1e-9;

/// A plain Euclidean vector (d-1 "space" coordinates before lifting).
pub type EuclideanVec = Array1<f64>;

/// Strictly positive, finite curvature magnitude `c`.
///
/// The hyperboloid satisfies `<x, x>_L = -c`; larger `c` flattens the
/// space (sectional curvature is `-1/c`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature(f64);

impl Curvature {
    /// Validate and wrap a curvature value. Must be finite and > 0.
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Curvature(c))
        } else {
            Err(Error::Manifold(format!(
                "curvature must be finite and positive, got {c}"
            )))
        }
    }

    /// The raw value of `c`.
    pub fn value(self) -> f64 {
        self.0
    }

    /// `sqrt(c)`, the time coordinate of the origin.
    pub fn sqrt(self) -> f64 {
        self.0.sqrt()
    }
}

/// A point on the upper sheet of the hyperboloid `<x, x>_L = -c`.
///
/// Invariants checked on construction:
/// * `|<x, x>_L + c| <= MANIFOLD_TOL * max(1, c)`
/// * `x_0 >= sqrt(c)` (upper sheet)
/// * ambient dimension >= 2
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzPoint {
    coords: Array1<f64>,
    curvature: Curvature,
}

impl LorentzPoint {
    /// Construct a point, validating the hyperboloid constraint.
    pub fn new(coords: Array1<f64>, curvature: Curvature) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimMismatch {
                expected: 2,
                got: coords.len(),
            });
        }
        let c = curvature.value();
        let residual = lorentz_inner(coords.view(), coords.view())? + c;
        if residual.abs() > MANIFOLD_TOL * c.max(1.0) {
            return Err(Error::Manifold(format!(
                "point is off the hyperboloid: <x,x>_L + c = {residual:e}"
            )));
        }
        if coords[0] < curvature.sqrt() {
            return Err(Error::Manifold(format!(
                "point is not on the upper sheet: x0 = {} < sqrt(c) = {}",
                coords[0],
                curvature.sqrt()
            )));
        }
        Ok(LorentzPoint { coords, curvature })
    }

    /// Construct without validation. Reserved for kernels whose outputs
    /// are on-manifold by construction; debug builds still check, with a
    /// bound that widens to the representable precision (~eps * x0^2) for
    /// points far from the origin.
    pub(crate) fn new_unchecked(coords: Array1<f64>, curvature: Curvature) -> Self {
        debug_assert!(coords.len() >= 2);
        debug_assert!(
            {
                let c = curvature.value();
                let r = raw::inner(coords.view(), coords.view()) + c;
                let tol = (MANIFOLD_TOL * c.max(1.0)).max(64.0 * f64::EPSILON * coords[0] * coords[0]);
                r.abs() <= tol
            },
            "kernel produced an off-manifold point"
        );
        LorentzPoint { coords, curvature }
    }

    /// Ambient coordinates (length d).
    pub fn coords(&self) -> ArrayView1<'_, f64> {
        self.coords.view()
    }

    /// Time coordinate `x_0`.
    pub fn time(&self) -> f64 {
        self.coords[0]
    }

    /// Space coordinates `x_1 ..= x_{d-1}`.
    pub fn space(&self) -> ArrayView1<'_, f64> {
        self.coords.slice(ndarray::s![1..])
    }

    /// Curvature this point was constructed under.
    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    /// Ambient dimension d.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Constraint residual `<x, x>_L + c` (zero for an exact point).
    pub fn constraint_residual(&self) -> f64 {
        raw::inner(self.coords.view(), self.coords.view()) + self.curvature.value()
    }
}

/// A vector in the tangent space at the origin: time coordinate exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    coords: Array1<f64>,
    curvature: Curvature,
}

impl TangentVector {
    /// Wrap ambient coordinates as an origin tangent. `coords[0]` must be
    /// exactly 0.0.
    pub fn new(coords: Array1<f64>, curvature: Curvature) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimMismatch {
                expected: 2,
                got: coords.len(),
            });
        }
        if coords[0] != 0.0 {
            return Err(Error::Manifold(format!(
                "origin tangent must have zero time coordinate, got {}",
                coords[0]
            )));
        }
        Ok(TangentVector { coords, curvature })
    }

    /// Build a tangent from its space coordinates by prepending the zero
    /// time coordinate.
    pub fn from_space(space: ArrayView1<'_, f64>, curvature: Curvature) -> Self {
        let mut coords = Array1::zeros(space.len() + 1);
        coords.slice_mut(ndarray::s![1..]).assign(&space);
        TangentVector { coords, curvature }
    }

    /// Ambient coordinates (length d, leading zero).
    pub fn coords(&self) -> ArrayView1<'_, f64> {
        self.coords.view()
    }

    /// Space coordinates (length d-1).
    pub fn space(&self) -> ArrayView1<'_, f64> {
        self.coords.slice(ndarray::s![1..])
    }

    /// Curvature of the model this tangent belongs to.
    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    /// Ambient dimension d.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Lorentzian norm. For origin tangents the time part vanishes, so
    /// this equals the Euclidean norm of the space coordinates.
    pub fn norm(&self) -> f64 {
        norm2(self.space())
    }
}

/// Raw kernels on plain coordinate arrays.
///
/// The typed API below wraps these; batch code (the encoder, the autodiff
/// forward) calls them directly on rows of coordinate matrices.
pub(crate) mod raw {
    use super::*;

    /// `<a, b>_L` without length checks (caller guarantees equal lengths >= 2).
    pub fn inner(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
        let mut s = -a[0] * b[0];
        for i in 1..a.len() {
            s += a[i] * b[i];
        }
        s
    }

    /// Origin exponential map from space coordinates: returns ambient
    /// coordinates of `exp_o([0, z])`. The zero vector maps to the origin.
    ///
    /// The time coordinate is computed as `sqrt(c + |xs|^2)` from the
    /// already-scaled space part rather than as `sqrt(c) * cosh(|z|/sqrt(c))`;
    /// the two agree in exact arithmetic, but the former keeps the
    /// constraint residual at rounding level and guarantees the log map's
    /// arcosh argument never falls below 1 on a round trip.
    pub fn lift(space: ArrayView1<'_, f64>, c: f64) -> Array1<f64> {
        let rc = c.sqrt();
        let n = super::norm2(space);
        let mut out = Array1::zeros(space.len() + 1);
        if n == 0.0 {
            out[0] = rc;
            return out;
        }
        let scale = rc * (n / rc).sinh() / n;
        let mut ss = 0.0;
        for (o, z) in out.iter_mut().skip(1).zip(space.iter()) {
            *o = scale * z;
            ss += *o * *o;
        }
        out[0] = (c + ss).sqrt();
        out
    }

    /// Space coordinates of the origin log map of an ambient point.
    pub fn log_space(ambient: ArrayView1<'_, f64>, c: f64) -> Result<Array1<f64>> {
        let rc = c.sqrt();
        let arg = ambient[0] / rc;
        let dist = rc * acosh_clamped(arg)?;
        let xs = ambient.slice(ndarray::s![1..]);
        let n = super::norm2(xs);
        if n == 0.0 {
            // The origin itself: log is the zero tangent.
            return Ok(Array1::zeros(xs.len()));
        }
        Ok(xs.mapv(|v| dist * v / n))
    }

    /// Geodesic distance between two ambient points under curvature `c`.
    pub fn distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>, c: f64) -> Result<f64> {
        let arg = -inner(a, b) / c;
        Ok(c.sqrt() * acosh_clamped(arg)?)
    }

    /// arcosh with the documented clamp window below 1.
    pub fn acosh_clamped(arg: f64) -> Result<f64> {
        if arg >= 1.0 {
            Ok(arg.acosh())
        } else if arg >= 1.0 - ACOSH_SLACK {
            Ok(0.0)
        } else {
            Err(Error::Manifold(format!(
                "arcosh argument {arg} below 1 - {ACOSH_SLACK:e}"
            )))
        }
    }
}

/// Euclidean norm of a coordinate slice.
fn norm2(v: ArrayView1<'_, f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lorentzian inner product `<a, b>_L = -a_0 b_0 + sum_{i>=1} a_i b_i`.
pub fn lorentz_inner(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            got: a.len(),
        });
    }
    Ok(raw::inner(a, b))
}

/// Lorentzian norm of a raw vector claimed to be spacelike:
/// `sqrt(<v, v>_L)`. Values of `<v, v>_L` in `[-1e-9, 0)` are clamped to
/// zero; anything more negative is a manifold violation (the vector is
/// timelike, not a tangent).
pub fn lorentz_norm(v: ArrayView1<'_, f64>) -> Result<f64> {
    let q = lorentz_inner(v, v)?;
    if q >= 0.0 {
        Ok(q.sqrt())
    } else if q >= -ACOSH_SLACK {
        Ok(0.0)
    } else {
        Err(Error::Manifold(format!(
            "vector is timelike: <v,v>_L = {q:e}"
        )))
    }
}

/// The origin `o = [sqrt(c), 0, ..., 0]` in ambient dimension `dim`.
pub fn origin(curvature: Curvature, dim: usize) -> Result<LorentzPoint> {
    if dim < 2 {
        return Err(Error::DimMismatch { expected: 2, got: dim });
    }
    let mut coords = Array1::zeros(dim);
    coords[0] = curvature.sqrt();
    Ok(LorentzPoint::new_unchecked(coords, curvature))
}

/// Lift a Euclidean vector onto the hyperboloid via the origin
/// exponential map (see module docs). The zero vector lifts to the origin.
pub fn lift(z: ArrayView1<'_, f64>, curvature: Curvature) -> Result<LorentzPoint> {
    if z.is_empty() {
        return Err(Error::DimMismatch { expected: 1, got: 0 });
    }
    let coords = raw::lift(z, curvature.value());
    Ok(LorentzPoint::new_unchecked(coords, curvature))
}

/// Origin exponential map. Routes through the same kernel as [`lift`], so
/// `exp_map_origin([0, z])` and `lift(z)` agree bit for bit.
pub fn exp_map_origin(v: &TangentVector) -> LorentzPoint {
    let coords = raw::lift(v.space(), v.curvature().value());
    LorentzPoint::new_unchecked(coords, v.curvature())
}

/// Origin logarithmic map. Inverse of [`exp_map_origin`]:
///
/// ```text
/// log_o(x) = [0, sqrt(c) * arcosh(x_0 / sqrt(c)) * xs / |xs|]
/// ```
///
/// where `xs` are the space coordinates of `x`. The origin maps to the
/// zero tangent.
pub fn log_map_origin(x: &LorentzPoint) -> Result<TangentVector> {
    let space = raw::log_space(x.coords(), x.curvature().value())?;
    Ok(TangentVector::from_space(space.view(), x.curvature()))
}

/// Geodesic distance `d(x, y) = sqrt(c) * arcosh(-<x, y>_L / c)`.
///
/// Errors if the points carry different curvatures or dimensions.
pub fn lorentz_distance(x: &LorentzPoint, y: &LorentzPoint) -> Result<f64> {
    if x.curvature() != y.curvature() {
        return Err(Error::Manifold(format!(
            "distance between points of different curvature: {} vs {}",
            x.curvature().value(),
            y.curvature().value()
        )));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    raw::distance(x.coords(), y.coords(), x.curvature().value())
}

/// Hyperbolic concatenation: log both points, concatenate their space
/// coordinates, and re-lift in the doubled model:
///
/// ```text
/// x (+) y = exp_o([0, space(log_o x), space(log_o y)])
/// ```
///
/// Two points of ambient dimension d produce a point of ambient dimension
/// `2(d-1) + 1` under the same curvature.
pub fn hyperbolic_concat(x: &LorentzPoint, y: &LorentzPoint) -> Result<LorentzPoint> {
    if x.curvature() != y.curvature() {
        return Err(Error::Manifold(
            "concatenation requires equal curvature".to_string(),
        ));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let c = x.curvature().value();
    let xs = raw::log_space(x.coords(), c)?;
    let ys = raw::log_space(y.coords(), c)?;
    let mut space = Array1::zeros(xs.len() + ys.len());
    space.slice_mut(ndarray::s![..xs.len()]).assign(&xs);
    space.slice_mut(ndarray::s![xs.len()..]).assign(&ys);
    Ok(LorentzPoint::new_unchecked(
        raw::lift(space.view(), c),
        x.curvature(),
    ))
}

/// Lorentzian linear layer: apply a Euclidean matrix in the origin tangent
/// space and map back,
///
/// ```text
/// W (*) x = exp_o([0, W . space(log_o x)])
/// ```
///
/// `w` has shape `(m, d-1)` for an input of ambient dimension d and yields
/// a point of ambient dimension `m + 1`.
pub fn lorentzian_linear(w: ArrayView2<'_, f64>, x: &LorentzPoint) -> Result<LorentzPoint> {
    if w.ncols() != x.dim() - 1 {
        return Err(Error::DimMismatch {
            expected: x.dim() - 1,
            got: w.ncols(),
        });
    }
    let c = x.curvature().value();
    let v = raw::log_space(x.coords(), c)?;
    let out = w.dot(&v);
    Ok(LorentzPoint::new_unchecked(
        raw::lift(out.view(), c),
        x.curvature(),
    ))
}

/// Fermi-Dirac decoder `1 / (exp((d - c1)/c2) + 1)`.
///
/// Strictly decreasing in `d`; at `d = c1` it equals 1/2. `c2` must be
/// positive (validated at configuration time).
pub fn fermi_dirac(d: f64, c1: f64, c2: f64) -> f64 {
    1.0 / (((d - c1) / c2).exp() + 1.0)
}

/// Project arbitrary ambient coordinates onto the upper sheet by keeping
/// the space coordinates and recomputing the time coordinate:
///
/// ```text
/// x0 = sqrt(c + |xs|^2)
/// ```
pub fn project_to_hyperboloid(x: ArrayView1<'_, f64>, curvature: Curvature) -> Result<LorentzPoint> {
    if x.len() < 2 {
        return Err(Error::DimMismatch { expected: 2, got: x.len() });
    }
    let c = curvature.value();
    let xs = x.slice(ndarray::s![1..]);
    let mut coords = Array1::zeros(x.len());
    coords[0] = (c + xs.iter().map(|v| v * v).sum::<f64>()).sqrt();
    coords.slice_mut(ndarray::s![1..]).assign(&xs);
    Ok(LorentzPoint::new_unchecked(coords, curvature))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn c(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    #[test]
    fn inner_product_matches_hand_computation() {
        // [2, 1] . [2, 1]: -4 + 1 = -3
        let a = array![2.0, 1.0];
        assert_eq!(lorentz_inner(a.view(), a.view()).unwrap(), -3.0);
        // Mixed vectors.
        let b = array![1.0, 3.0];
        assert_eq!(lorentz_inner(a.view(), b.view()).unwrap(), -2.0 + 3.0);
    }

    #[test]
    fn inner_product_rejects_mismatched_lengths() {
        let a = array![1.0, 0.0];
        let b = array![1.0, 0.0, 0.0];
        assert!(matches!(
            lorentz_inner(a.view(), b.view()),
            Err(Error::DimMismatch { .. })
        ));
        let short = array![1.0];
        assert!(lorentz_inner(short.view(), short.view()).is_err());
    }

    #[test]
    fn norm_of_space_like_vector_is_euclidean() {
        // [0, 3, 4] has Lorentzian norm 5.
        let v = array![0.0, 3.0, 4.0];
        assert_eq!(lorentz_norm(v.view()).unwrap(), 5.0);
    }

    #[test]
    fn norm_clamps_tiny_negative_and_rejects_timelike() {
        // <v,v>_L barely below zero is clamped to zero...
        let v = array![1.0, (1.0f64 - 1e-10).sqrt()];
        assert_eq!(lorentz_norm(v.view()).unwrap(), 0.0);
        // ...but a clearly timelike vector errors.
        let t = array![1.0, 0.0];
        assert!(matches!(lorentz_norm(t.view()), Err(Error::Manifold(_))));
    }

    #[test]
    fn origin_satisfies_constraint() {
        for cv in [0.5, 1.0, 2.0] {
            let o = origin(c(cv), 4).unwrap();
            assert_eq!(o.time(), cv.sqrt());
            assert!(o.constraint_residual().abs() < 1e-15);
        }
    }

    #[test]
    fn lift_unit_vector_frozen_values() {
        // lift([1, 0], c=1) = [cosh 1, sinh 1, 0] = [1.543081, 1.175201, 0].
        let p = lift(array![1.0, 0.0].view(), c(1.0)).unwrap();
        assert_relative_eq!(p.coords()[0], 1.543081, epsilon = 1e-6);
        assert_relative_eq!(p.coords()[1], 1.175201, epsilon = 1e-6);
        assert_eq!(p.coords()[2], 0.0);
    }

    #[test]
    fn exp_map_origin_frozen_values() {
        // exp_o([0, 0, 2], c=1) = [cosh 2, 0, sinh 2] = [3.762196, 0, 3.626860].
        let v = TangentVector::new(array![0.0, 0.0, 2.0], c(1.0)).unwrap();
        let p = exp_map_origin(&v);
        assert_relative_eq!(p.coords()[0], 3.762196, epsilon = 1e-6);
        assert_eq!(p.coords()[1], 0.0);
        assert_relative_eq!(p.coords()[2], 3.626860, epsilon = 1e-6);
    }

    #[test]
    fn exp_map_is_bitwise_identical_to_lift() {
        let z = array![0.31, -1.7, 0.004, 2.5];
        let via_lift = lift(z.view(), c(0.7)).unwrap();
        let via_exp = exp_map_origin(&TangentVector::from_space(z.view(), c(0.7)));
        assert_eq!(via_lift.coords(), via_exp.coords());
    }

    #[test]
    fn zero_vector_lifts_to_origin() {
        let p = lift(array![0.0, 0.0, 0.0].view(), c(2.0)).unwrap();
        let o = origin(c(2.0), 4).unwrap();
        assert_eq!(p.coords(), o.coords());
    }

    #[test]
    fn log_map_frozen_value() {
        // log_o(lift([1, 0, 0])) = [0, 1, 0, 0] at c = 1.
        let p = lift(array![1.0, 0.0, 0.0].view(), c(1.0)).unwrap();
        let v = log_map_origin(&p).unwrap();
        assert_relative_eq!(v.coords()[1], 1.0, max_relative = 1e-12);
        assert_eq!(v.coords()[0], 0.0);
        assert_eq!(v.coords()[2], 0.0);
        assert_eq!(v.coords()[3], 0.0);
    }

    #[test]
    fn log_of_origin_is_zero_tangent() {
        let o = origin(c(0.5), 5).unwrap();
        let v = log_map_origin(&o).unwrap();
        assert!(v.coords().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn distance_frozen_value_antipodal_lifts() {
        // d(lift([1,0]), lift([-1,0])) = 2 at c = 1 (geodesic through o).
        let a = lift(array![1.0, 0.0].view(), c(1.0)).unwrap();
        let b = lift(array![-1.0, 0.0].view(), c(1.0)).unwrap();
        assert_relative_eq!(lorentz_distance(&a, &b).unwrap(), 2.0, max_relative = 1e-9);
    }

    #[test]
    fn distance_to_origin_equals_euclidean_norm_of_lifted_vector() {
        for cv in [0.5, 1.0, 2.0] {
            let z = array![0.3, -0.4, 1.2];
            let p = lift(z.view(), c(cv)).unwrap();
            let o = origin(c(cv), 4).unwrap();
            let n = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert_relative_eq!(lorentz_distance(&p, &o).unwrap(), n, max_relative = 1e-9);
        }
    }

    #[test]
    fn distance_requires_matching_curvature() {
        let a = origin(c(1.0), 3).unwrap();
        let b = origin(c(2.0), 3).unwrap();
        assert!(lorentz_distance(&a, &b).is_err());
    }

    #[test]
    fn acosh_clamp_window() {
        assert_eq!(raw::acosh_clamped(1.0).unwrap(), 0.0);
        assert_eq!(raw::acosh_clamped(1.0 - 0.5e-9).unwrap(), 0.0);
        assert!(raw::acosh_clamped(1.0 - 1e-8).is_err());
        assert!(raw::acosh_clamped(1.5).unwrap() > 0.0);
    }

    #[test]
    fn point_construction_validates_constraint_and_sheet() {
        // Clearly off the hyperboloid.
        assert!(LorentzPoint::new(array![1.0, 1.0], c(1.0)).is_err());
        // Lower sheet: negate the time coordinate of a valid point.
        let p = lift(array![0.5, 0.5].view(), c(1.0)).unwrap();
        let mut coords = p.coords().to_owned();
        coords[0] = -coords[0];
        assert!(LorentzPoint::new(coords, c(1.0)).is_err());
        // A valid point round-trips through the validating constructor.
        assert!(LorentzPoint::new(p.coords().to_owned(), c(1.0)).is_ok());
    }

    #[test]
    fn tangent_requires_exact_zero_time() {
        assert!(TangentVector::new(array![1e-14, 1.0], c(1.0)).is_err());
        assert!(TangentVector::new(array![0.0, 1.0], c(1.0)).is_ok());
    }

    #[test]
    fn concat_of_lift_and_origin_matches_direct_lift() {
        // concat(lift([1,0]), o) at c=1 lives in ambient dimension 5 and
        // equals exp_o([0, 1, 0, 0, 0]).
        let x = lift(array![1.0, 0.0].view(), c(1.0)).unwrap();
        let o = origin(c(1.0), 3).unwrap();
        let cat = hyperbolic_concat(&x, &o).unwrap();
        assert_eq!(cat.dim(), 5);
        let expect = lift(array![1.0, 0.0, 0.0, 0.0].view(), c(1.0)).unwrap();
        let diff = &cat.coords().to_owned() - &expect.coords();
        assert!(diff.iter().all(|d| d.abs() < 1e-9));
    }

    #[test]
    fn concat_output_dimension() {
        let x = lift(array![0.1, 0.2, 0.3].view(), c(0.5)).unwrap();
        let y = lift(array![-0.4, 0.0, 0.9].view(), c(0.5)).unwrap();
        let cat = hyperbolic_concat(&x, &y).unwrap();
        assert_eq!(cat.dim(), 2 * (x.dim() - 1) + 1);
        assert!(cat.constraint_residual().abs() <= MANIFOLD_TOL * 1.0);
    }

    #[test]
    fn linear_with_identity_selector_recovers_first_operand() {
        // W = [I | 0] applied to concat(lift(z), o) recovers lift(z).
        let z = array![0.7, -0.2];
        let x = lift(z.view(), c(1.0)).unwrap();
        let o = origin(c(1.0), 3).unwrap();
        let cat = hyperbolic_concat(&x, &o).unwrap();
        let mut w = Array2::zeros((2, 4));
        w[[0, 0]] = 1.0;
        w[[1, 1]] = 1.0;
        let out = lorentzian_linear(w.view(), &cat).unwrap();
        let diff = &out.coords().to_owned() - &x.coords();
        assert!(diff.iter().all(|d| d.abs() < 1e-9), "got {:?}", out.coords());
    }

    #[test]
    fn fermi_dirac_frozen_values() {
        // At d = c1 the score is exactly 1/2.
        assert_relative_eq!(fermi_dirac(1.0, 1.0, 1.0), 0.5);
        // At d = c1 + c2 it is 1/(e + 1) = 0.268941.
        assert_relative_eq!(fermi_dirac(2.0, 1.0, 1.0), 0.268941, epsilon = 1e-6);
        assert_relative_eq!(fermi_dirac(2.5, 1.5, 1.0), 0.268941, epsilon = 1e-6);
    }

    #[test]
    fn fermi_dirac_is_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let d = i as f64 * 0.37;
            let s = fermi_dirac(d, 1.0, 0.7);
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn projection_frozen_value() {
        // [999, 0, 0] projects to [1, 0, 0] at c = 1 (space part kept).
        let p = project_to_hyperboloid(array![999.0, 0.0, 0.0].view(), c(1.0)).unwrap();
        assert_eq!(p.coords().to_vec(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn projection_fixes_constraint() {
        let p = project_to_hyperboloid(array![0.3, 1.0, -2.0, 0.5].view(), c(2.0)).unwrap();
        assert!(p.constraint_residual().abs() <= MANIFOLD_TOL * 2.0);
        assert_eq!(p.space().to_vec(), vec![1.0, -2.0, 0.5]);
    }

    proptest! {
        /// exp then log round-trips tangent vectors (away from the
        /// arcosh-precision floor near the origin).
        #[test]
        fn prop_log_inverts_exp(
            xs in proptest::collection::vec(-3.0f64..3.0, 2..6),
            cv in 0.5f64..2.0,
        ) {
            let z = Array1::from(xs);
            let n = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assume!(n > 1e-2);
            let curv = c(cv);
            let p = lift(z.view(), curv).unwrap();
            let back = log_map_origin(&p).unwrap();
            for (a, b) in back.space().iter().zip(z.iter()) {
                prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()));
            }
        }

        /// Lifted points satisfy the constraint within tolerance. Ranges
        /// cover the training regime; far outside it the residual check
        /// itself runs out of floating-point resolution.
        #[test]
        fn prop_lift_stays_on_manifold(
            xs in proptest::collection::vec(-2.5f64..2.5, 1..8),
            cv in 0.5f64..2.0,
        ) {
            let z = Array1::from(xs);
            let p = lift(z.view(), c(cv)).unwrap();
            prop_assert!(p.constraint_residual().abs() <= MANIFOLD_TOL * cv.max(1.0));
            prop_assert!(p.time() >= c(cv).sqrt() - 1e-12);
        }

        /// Distance axioms: identity, symmetry (exact), triangle inequality
        /// (with numerical slack).
        #[test]
        fn prop_distance_axioms(
            xs in proptest::collection::vec(-2.0f64..2.0, 3),
            ys in proptest::collection::vec(-2.0f64..2.0, 3),
            zs in proptest::collection::vec(-2.0f64..2.0, 3),
            cv in 0.5f64..2.0,
        ) {
            let curv = c(cv);
            let x = lift(Array1::from(xs).view(), curv).unwrap();
            let y = lift(Array1::from(ys).view(), curv).unwrap();
            let z = lift(Array1::from(zs).view(), curv).unwrap();
            let dxy = lorentz_distance(&x, &y).unwrap();
            let dyx = lorentz_distance(&y, &x).unwrap();
            prop_assert_eq!(dxy, dyx);
            prop_assert!(lorentz_distance(&x, &x).unwrap().abs() <= 1e-6);
            let dxz = lorentz_distance(&x, &z).unwrap();
            let dyz = lorentz_distance(&y, &z).unwrap();
            prop_assert!(dxz <= dxy + dyz + 1e-6);
        }
    }
}
