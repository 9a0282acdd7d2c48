//! Scalar geometric primitives on points of ℝ^D.
//!
//! Everything here is a pure function of its inputs. Vectors are plain
//! `&[f64]` slices so that the same routines serve points stored in a
//! [`Point`] and temporaries built on the stack.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A location in ℝ^D with D ≥ 2 and finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::domain(format!(
                "points need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::domain(format!("non-finite coordinate {c}")));
        }
        Ok(Point(coords))
    }

    /// Planar point. Panics on non-finite input.
    pub fn xy(x: f64, y: f64) -> Self {
        Self::new(vec![x, y]).expect("finite coordinates")
    }

    /// Spatial point. Panics on non-finite input.
    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self::new(vec![x, y, z]).expect("finite coordinates")
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A nonnegative curvature, possibly the distinguished infinite state.
///
/// Ordering is total: every finite value compares below
/// [`Curvature::INFINITE`]. In text form the infinite state is spelled
/// `inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Curvature(f64);

impl Curvature {
    pub const ZERO: Curvature = Curvature(0.0);
    pub const INFINITE: Curvature = Curvature(f64::INFINITY);

    /// Accepts any value in `[0, +∞]`.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::domain(format!("curvature must be >= 0, got {value}")));
        }
        Ok(Curvature(value))
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// The numeric value; `f64::INFINITY` for the infinite state.
    pub fn value(self) -> f64 {
        self.0
    }

    /// Finite value or `None`.
    pub fn finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }
}

impl Eq for Curvature {}

impl PartialOrd for Curvature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Curvature {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Curvature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = crate::io::parse_f64(s)?;
        Curvature::new(v)
    }
}

impl Serialize for Curvature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::io::serde_inf::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Curvature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = crate::io::serde_inf::deserialize(d)?;
        Curvature::new(v).map_err(serde::de::Error::custom)
    }
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Euclidean distance ‖a − b‖.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Angle between two nonzero vectors, in `[0, π]`.
pub fn angle(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v)?;
    let nu = norm(u);
    let nv = norm(v);
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::domain("angle with a zero vector"));
    }
    let cos = (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(cos.acos())
}

/// ‖u ∧ v‖, the area of the parallelogram spanned by `u` and `v`.
///
/// Computed from the 2×2 minors, which avoids the cancellation of the
/// Lagrange form ‖u‖²‖v‖² − ⟨u,v⟩² for nearly parallel vectors.
pub fn wedge_norm(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let d = u.len();
    let mut acc = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let m = u[i] * v[j] - u[j] * v[i];
            acc += m * m;
        }
    }
    acc.sqrt()
}

/// Discrete curvature of the ordered triple `(x, y, z)`: the inverse
/// circumradius when the angle at `y` is at least π/2, and `+∞` otherwise.
/// Collinear triples with `y` between `x` and `z` have curvature 0.
pub fn discrete_curvature(x: &[f64], y: &[f64], z: &[f64]) -> Result<Curvature> {
    check_dims(x, y)?;
    check_dims(y, z)?;
    if x == y || y == z || x == z {
        return Err(Error::domain("discrete curvature of coincident points"));
    }
    Ok(triple_curvature(x, y, z))
}

/// [`discrete_curvature`] without the argument checks. A triple with
/// `x == z` has a zero angle at `y` and therefore infinite curvature;
/// `y` must differ from both neighbours.
pub(crate) fn triple_curvature(x: &[f64], y: &[f64], z: &[f64]) -> Curvature {
    let d = x.len();
    let mut u = [0.0f64; 16];
    let mut v = [0.0f64; 16];
    let (u, v) = if d <= 16 {
        for k in 0..d {
            u[k] = x[k] - y[k];
            v[k] = z[k] - y[k];
        }
        (&u[..d], &v[..d])
    } else {
        return triple_curvature_heap(x, y, z);
    };
    curvature_from_legs(u, v)
}

fn triple_curvature_heap(x: &[f64], y: &[f64], z: &[f64]) -> Curvature {
    let u = sub(x, y);
    let v = sub(z, y);
    curvature_from_legs(&u, &v)
}

// u = x - y, v = z - y
fn curvature_from_legs(u: &[f64], v: &[f64]) -> Curvature {
    // Angle at y is >= π/2 exactly when <u, v> <= 0.
    if dot(u, v) > 0.0 {
        return Curvature::INFINITE;
    }
    let w = wedge_norm(u, v);
    if w == 0.0 {
        return Curvature::ZERO;
    }
    let xz = distance(u, v);
    Curvature(2.0 * w / (norm(u) * norm(v) * xz))
}

/// Minimum-length chord bound (2/κ)·sin(κs/2) for a curve of curvature at
/// most `kappa` and arclength `s ≤ π/κ`.
pub fn chord_lower_bound(kappa: f64, s: f64) -> Result<f64> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::domain(format!("kappa must be finite and > 0, got {kappa}")));
    }
    if s.is_nan() || s < 0.0 {
        return Err(Error::domain(format!("arclength must be >= 0, got {s}")));
    }
    if s > std::f64::consts::PI / kappa {
        return Err(Error::domain(format!(
            "arclength {s} exceeds pi/kappa = {}",
            std::f64::consts::PI / kappa
        )));
    }
    Ok((2.0 / kappa) * (kappa * s / 2.0).sin())
}

/// Side `b` of a triangle with sides `a ≤ c`, obtuse-or-right opposite `c`,
/// and inverse circumradius `kappa`:
/// `c·√(1 − κ²a²/4) − a·√(1 − κ²c²/4)`.
pub fn phi(a: f64, c: f64, kappa: f64) -> Result<f64> {
    check_phi_args(a, c, kappa)?;
    let ka = kappa * a / 2.0;
    let kc = kappa * c / 2.0;
    Ok(c * (1.0 - ka * ka).max(0.0).sqrt() - a * (1.0 - kc * kc).max(0.0).sqrt())
}

/// ∂φ/∂κ in closed form. Requires κc < 2.
pub fn phi_dkappa(a: f64, c: f64, kappa: f64) -> Result<f64> {
    check_phi_args(a, c, kappa)?;
    let (sa, sc) = phi_roots(a, c, kappa)?;
    Ok(kappa * a * c / 4.0 * (c / sc - a / sa))
}

/// ∂²φ/∂κ² in closed form. Requires κc < 2.
pub fn phi_dkappa2(a: f64, c: f64, kappa: f64) -> Result<f64> {
    check_phi_args(a, c, kappa)?;
    let (sa, sc) = phi_roots(a, c, kappa)?;
    Ok(a * c / 4.0 * (c / sc.powi(3) - a / sa.powi(3)))
}

fn phi_roots(a: f64, c: f64, kappa: f64) -> Result<(f64, f64)> {
    let sa = (1.0 - kappa * kappa * a * a / 4.0).sqrt();
    let sc = (1.0 - kappa * kappa * c * c / 4.0).sqrt();
    if sc == 0.0 {
        return Err(Error::domain("derivative of phi is singular at kappa*c = 2"));
    }
    Ok((sa, sc))
}

fn check_phi_args(a: f64, c: f64, kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::domain(format!("kappa must be finite and >= 0, got {kappa}")));
    }
    if !(a >= 0.0 && a <= c && c.is_finite()) {
        return Err(Error::domain(format!("phi needs 0 <= a <= c, got a={a}, c={c}")));
    }
    if kappa * a > 2.0 || kappa * c > 2.0 {
        return Err(Error::domain(format!(
            "phi needs kappa*a <= 2 and kappa*c <= 2, got kappa={kappa}, a={a}, c={c}"
        )));
    }
    Ok(())
}

/// Length of the polygonal line through `points`.
pub fn polyline_length<P: AsRef<[f64]>>(points: &[P]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::domain("polyline with no points"));
    }
    Ok(points
        .windows(2)
        .map(|w| distance(w[0].as_ref(), w[1].as_ref()))
        .sum())
}

/// True when the angle at `y` is at least π/2.
pub fn is_obtuse_or_right(x: &[f64], y: &[f64], z: &[f64]) -> bool {
    let u = sub(x, y);
    let v = sub(z, y);
    dot(&u, &v) <= 0.0
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn angle_examples() {
        assert_abs_diff_eq!(angle(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), PI / 2.0, epsilon = 1e-15);
        assert_eq!(angle(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(angle(&[1.0, 0.0], &[-1.0, 1e-300]).unwrap(), PI, epsilon = 1e-9);
        assert!(angle(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn angle_clamps_rounded_cosine() {
        // The raw cosine of these parallel vectors rounds above 1.
        let u = [0.7, 0.7, 0.7];
        let v = [3.3, 3.3, 3.3];
        let raw = dot(&u, &v) / (norm(&u) * norm(&v));
        assert!(raw > 1.0, "raw cosine {raw}");
        assert_eq!(angle(&u, &v).unwrap(), 0.0);
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge_norm(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(wedge_norm(&[2.0, 0.0], &[3.0, 0.0]), 0.0);
        assert_eq!(wedge_norm(&[1.0, 0.0, 0.0], &[1.0, 1.0, 0.0]), 1.0);
        assert_eq!(wedge_norm(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn curvature_examples() {
        let c = |x: [f64; 2], y: [f64; 2], z: [f64; 2]| discrete_curvature(&x, &y, &z).unwrap();
        assert_eq!(c([0.0, 0.0], [1.0, 0.0], [2.0, 0.0]), Curvature::ZERO);
        assert_abs_diff_eq!(c([0.0, 0.0], [1.0, 0.0], [1.0, 1.0]).value(), SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(c([1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]).value(), 1.0, epsilon = 1e-15);
        assert!(c([0.0, 0.0], [1.0, 0.0], [0.0, 0.5]).is_infinite());
    }

    #[test]
    fn collinear_middle_outside_is_infinite() {
        let k = discrete_curvature(&[0.0, 0.0], &[2.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(k.is_infinite());
    }

    #[test]
    fn curvature_rejects_coincident_points() {
        assert!(discrete_curvature(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(discrete_curvature(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(discrete_curvature(&[0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn curvature_ordering_puts_infinity_last() {
        let k = Curvature::new(1e300).unwrap();
        assert!(k < Curvature::INFINITE);
        assert!(!(Curvature::INFINITE <= k));
        assert!(Curvature::new(-1.0).is_err());
        assert!(Curvature::new(f64::NAN).is_err());
        assert_eq!(Curvature::INFINITE.to_string(), "inf");
        assert_eq!("inf".parse::<Curvature>().unwrap(), Curvature::INFINITE);
        assert_eq!(serde_json::to_string(&Curvature::INFINITE).unwrap(), "\"inf\"");
    }

    #[test]
    fn chord_bound_examples() {
        assert_abs_diff_eq!(chord_lower_bound(1.0, PI).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chord_lower_bound(2.0, PI / 2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chord_lower_bound(1e-9, 1.0).unwrap(), 1.0, epsilon = 1e-12);
        assert!(chord_lower_bound(1.0, PI + 1e-9).is_err());
        assert!(chord_lower_bound(0.0, 1.0).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_abs_diff_eq!(phi(3.0, 5.0, 2.0 / 5.0).unwrap(), 4.0, epsilon = 1e-12);
        assert_eq!(phi(0.0, 2.5, 0.3).unwrap(), 2.5);
        assert_eq!(phi(1.5, 1.5, 0.7).unwrap(), 0.0);
        assert!(phi(1.0, 3.0, 1.0).is_err());
        assert!(phi(2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn polyline_examples() {
        assert_eq!(polyline_length(&[Point::xy(0.0, 0.0)]).unwrap(), 0.0);
        let l = polyline_length(&[Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(1.0, 1.0)]);
        assert_eq!(l.unwrap(), 2.0);
        assert_eq!(polyline_length(&[Point::xy(0.0, 0.0), Point::xy(3.0, 4.0)]).unwrap(), 5.0);
        assert!(polyline_length::<Point>(&[]).is_err());
    }

    #[test]
    fn point_validation() {
        assert!(Point::new(vec![1.0]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert_eq!(Point::xyz(1.0, 2.0, 3.0).dim(), 3);
    }
}
