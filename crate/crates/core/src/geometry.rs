//! Planar rotation and orthogonal-projection primitives.
//!
//! Everything here is a small `Copy` value type. `Vec2` is an arbitrary
//! vector or point, `UnitVec2` is a heading on the unit circle, `Angle` is a
//! signed angle kept in `(-pi, pi]`, and `Mat2` is a 2x2 matrix used for
//! rotations `R(a)` and projectors `P_b = I - b b^T`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Determinant magnitude at or below which `solve_2x2` refuses to invert.
pub const SINGULARITY_THRESHOLD: f64 = 1e-10;

/// Smallest raw norm accepted when normalizing into a `UnitVec2`.
pub const MIN_NORM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("matrix is singular (|det| = {det:e} <= {SINGULARITY_THRESHOLD:e}); headings are parallel")]
    SingularMatrix { det: f64 },
    #[error("cannot normalize vector ({x}, {y}): norm is below {MIN_NORM:e}")]
    ZeroVector { x: f64, y: f64 },
    #[error("vector ({x}, {y}) is not finite")]
    NonFinite { x: f64, y: f64 },
}

/// A plain 2-D vector (or point).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2::new(x, y)
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A heading: a 2-D vector of unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct UnitVec2(Vec2);

impl UnitVec2 {
    pub const E1: UnitVec2 = UnitVec2(Vec2 { x: 1.0, y: 0.0 });
    pub const E2: UnitVec2 = UnitVec2(Vec2 { x: 0.0, y: 1.0 });

    /// Normalizes `(x, y)`. Fails on non-finite input or a norm below [`MIN_NORM`].
    pub fn new(x: f64, y: f64) -> Result<Self, GeometryError> {
        Self::normalize(Vec2::new(x, y))
    }

    pub fn normalize(v: Vec2) -> Result<Self, GeometryError> {
        if !v.is_finite() {
            return Err(GeometryError::NonFinite { x: v.x, y: v.y });
        }
        let n = v.norm();
        if n < MIN_NORM {
            return Err(GeometryError::ZeroVector { x: v.x, y: v.y });
        }
        // Already unit up to rounding: keep the bits so load/save round trips are exact.
        if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(UnitVec2(v));
        }
        Ok(UnitVec2(Vec2::new(v.x / n, v.y / n)))
    }

    /// Wraps a vector the caller has already normalized.
    pub(crate) fn from_normalized(v: Vec2) -> Self {
        UnitVec2(v)
    }

    /// `(cos theta, sin theta)`.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        UnitVec2(Vec2::new(c, s))
    }

    pub fn x(self) -> f64 {
        self.0.x
    }

    pub fn y(self) -> f64 {
        self.0.y
    }

    pub fn as_vec(self) -> Vec2 {
        self.0
    }

    /// Angle of the heading measured from the positive x-axis.
    pub fn angle(self) -> Angle {
        Angle::new(self.0.y.atan2(self.0.x))
    }

    pub fn dot(self, other: UnitVec2) -> f64 {
        self.0.dot(other.0)
    }
}

impl TryFrom<[f64; 2]> for UnitVec2 {
    type Error = GeometryError;
    fn try_from([x, y]: [f64; 2]) -> Result<Self, Self::Error> {
        UnitVec2::new(x, y)
    }
}

impl From<UnitVec2> for [f64; 2] {
    fn from(u: UnitVec2) -> Self {
        u.0.into()
    }
}

impl From<UnitVec2> for Vec2 {
    fn from(u: UnitVec2) -> Self {
        u.0
    }
}

impl Neg for UnitVec2 {
    type Output = UnitVec2;
    fn neg(self) -> UnitVec2 {
        UnitVec2(-self.0)
    }
}

impl fmt::Display for UnitVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A signed angle in radians, canonical in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Self {
        Angle(wrap(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle::new(radians)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> Self {
        a.0
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.0)
    }
}

/// Wraps an angle into `(-pi, pi]`. Values already in range are returned untouched.
pub fn wrap(radians: f64) -> f64 {
    if radians > -PI && radians <= PI {
        return radians;
    }
    let r = radians.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { m: [[1.0, 0.0], [0.0, 1.0]] };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.m[0][0] * v.x + self.m[0][1] * v.y, self.m[1][0] * v.x + self.m[1][1] * v.y)
    }

    /// Rotation matrices map unit vectors to unit vectors; the result is
    /// normalized to absorb rounding.
    pub fn rotate(&self, u: UnitVec2) -> UnitVec2 {
        let v = self.mul_vec(u.as_vec());
        let n = v.norm();
        UnitVec2(Vec2::new(v.x / n, v.y / n))
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).abs());
            }
        }
        worst
    }

    /// `M^T M = I` and `det M = 1` within `tol`.
    pub fn is_rotation(&self, tol: f64) -> bool {
        (self.transpose() * *self).max_abs_diff(&Mat2::IDENTITY) <= tol && (self.det() - 1.0).abs() <= tol
    }

    /// `M = M^T = M^2` within `tol`.
    pub fn is_projection(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.transpose()) <= tol && self.max_abs_diff(&(*self * *self)) <= tol
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        self.mul_vec(v)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

/// Counterclockwise rotation by `alpha`.
pub fn rotation(alpha: Angle) -> Mat2 {
    let (s, c) = alpha.radians().sin_cos();
    Mat2::new(c, -s, s, c)
}

/// Orthogonal projector onto the line perpendicular to `b`: `I - b b^T`.
pub fn projector(b: UnitVec2) -> Mat2 {
    let (x, y) = (b.x(), b.y());
    Mat2::new(1.0 - x * x, -x * y, -x * y, 1.0 - y * y)
}

/// `P_b v` evaluated without forming the matrix. `b` need not be unit
/// length; the formula `v - b (b . v)` is applied as written.
pub fn project(b: Vec2, v: Vec2) -> Vec2 {
    v - b * b.dot(v)
}

/// Signed angle `a` with `rotation(a) * from = to`.
pub fn angle_between(from: UnitVec2, to: UnitVec2) -> Angle {
    let (f, t) = (from.as_vec(), to.as_vec());
    Angle::new(f.cross(t).atan2(f.dot(t)))
}

/// Solves `m x = rhs` by Cramer's rule.
pub fn solve_2x2(m: &Mat2, rhs: Vec2) -> Result<Vec2, GeometryError> {
    let det = m.det();
    // written so that a NaN determinant is rejected too
    if det.abs().partial_cmp(&SINGULARITY_THRESHOLD) != Some(std::cmp::Ordering::Greater) {
        return Err(GeometryError::SingularMatrix { det });
    }
    let a = &m.m;
    Ok(Vec2::new((rhs.x * a[1][1] - a[0][1] * rhs.y) / det, (a[0][0] * rhs.y - a[1][0] * rhs.x) / det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotation(Angle::ZERO), Mat2::IDENTITY);
        let q = rotation(Angle::new(FRAC_PI_2)) * Vec2::new(1.0, 0.0);
        assert!(close(q, Vec2::new(0.0, 1.0), 1e-15));
        // cos(pi/3) = 1/2, sin(pi/3) = sqrt(3)/2
        let r = rotation(Angle::new(PI / 3.0)) * Vec2::new(-1.0, 0.0);
        assert!(close(r, Vec2::new(-0.5, -SQRT3 / 2.0), 1e-15));
    }

    #[test]
    fn projector_examples() {
        assert_eq!(projector(UnitVec2::E1), Mat2::new(0.0, 0.0, 0.0, 1.0));
        let d = UnitVec2::new(1.0, 1.0).unwrap();
        let p = projector(d);
        assert!(p.max_abs_diff(&Mat2::new(0.5, -0.5, -0.5, 0.5)) < 1e-15);
        assert!(close(p * d.as_vec(), Vec2::ZERO, 1e-15));
    }

    #[test]
    fn angle_between_examples() {
        let b = UnitVec2::new(0.3, -0.8).unwrap();
        assert_eq!(angle_between(b, b).radians(), 0.0);
        assert!((angle_between(UnitVec2::E1, UnitVec2::E2).radians() - FRAC_PI_2).abs() < 1e-15);
        let from = UnitVec2::new(-1.0, 0.0).unwrap();
        let to = UnitVec2::new(-0.5, -SQRT3 / 2.0).unwrap();
        assert!((angle_between(from, to).radians() - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn antipodal_angle_is_plus_pi() {
        let a = angle_between(UnitVec2::E1, -UnitVec2::E1);
        assert_eq!(a.radians(), PI);
        let from = UnitVec2::new(-1.0, 0.0).unwrap();
        let to = UnitVec2::new(1.0, -0.0).unwrap();
        assert_eq!(angle_between(from, to).radians(), PI);
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap(-3.0 * FRAC_PI_2) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(wrap(0.25), 0.25);
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_2x2(&Mat2::IDENTITY, Vec2::new(3.0, 4.0)).unwrap(), Vec2::new(3.0, 4.0));
        let m = Mat2::new(2.0, 0.0, 0.0, 2.0);
        assert_eq!(solve_2x2(&m, Vec2::new(2.0, 4.0)).unwrap(), Vec2::new(1.0, 2.0));

        // Hexagon root and first child, both aimed at the origin.
        let b1 = UnitVec2::new(-1.0, 0.0).unwrap();
        let b2 = UnitVec2::new(-0.5, -SQRT3 / 2.0).unwrap();
        let (p1, p2) = (Vec2::new(2.0, 0.0), Vec2::new(1.0, SQRT3));
        let lhs = projector(b1) + projector(b2);
        let rhs = projector(b1) * p1 + projector(b2) * p2;
        assert!(close(solve_2x2(&lhs, rhs).unwrap(), Vec2::ZERO, 1e-12));
    }

    #[test]
    fn solve_rejects_singular() {
        let p = projector(UnitVec2::E1);
        let err = solve_2x2(&(p + p), Vec2::new(1.0, 1.0)).unwrap_err();
        assert!(matches!(err, GeometryError::SingularMatrix { .. }));
        let tiny = Mat2::new(1e-6, 0.0, 0.0, 1e-5);
        assert!(solve_2x2(&tiny, Vec2::ZERO).is_err());
    }

    #[test]
    fn unit_vec_construction() {
        assert!(matches!(UnitVec2::new(0.0, 0.0), Err(GeometryError::ZeroVector { .. })));
        assert!(matches!(UnitVec2::new(f64::NAN, 1.0), Err(GeometryError::NonFinite { .. })));
        let u = UnitVec2::new(3.0, 4.0).unwrap();
        assert!((u.as_vec().norm() - 1.0).abs() < 1e-15);
        assert!(UnitVec2::new(2e-9, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn rotations_compose_and_commute(a in -10.0..10.0f64, b in -10.0..10.0f64) {
            let (ra, rb) = (rotation(Angle::new(a)), rotation(Angle::new(b)));
            let rab = rotation(Angle::new(a + b));
            prop_assert!((ra * rb).max_abs_diff(&rab) < 1e-12);
            prop_assert!((rb * ra).max_abs_diff(&rab) < 1e-12);
            prop_assert!(ra.is_rotation(1e-12));
            prop_assert!((ra * ra.transpose()).max_abs_diff(&Mat2::IDENTITY) < 1e-12);
        }

        #[test]
        fn projector_structure(theta in -4.0..4.0f64) {
            let b = UnitVec2::from_angle(theta);
            let p = projector(b);
            prop_assert!(p.is_projection(1e-12));
            // eigenvalues {0, 1}: trace 1, det 0
            prop_assert!((p.trace() - 1.0).abs() < 1e-12);
            prop_assert!(p.det().abs() < 1e-12);
            prop_assert!((p * b.as_vec()).norm() < 1e-12);
        }

        #[test]
        fn angle_between_inverts_rotation(theta in -4.0..4.0f64, a in -12.0..12.0f64) {
            let v = UnitVec2::from_angle(theta);
            let w = rotation(Angle::new(a)).rotate(v);
            let got = angle_between(v, w).radians();
            let want = wrap(a);
            // (-pi, pi] seam: compare on the circle
            let diff = wrap(got - want).abs();
            prop_assert!(diff < 1e-12, "got {got}, want {want}");
        }

        #[test]
        fn wrap_is_idempotent(a in -100.0..100.0f64) {
            let w = wrap(a);
            prop_assert!(w > -PI && w <= PI);
            prop_assert_eq!(wrap(w), w);
        }
    }
}
