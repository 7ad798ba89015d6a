//! Ellipses in 3-space represented as transformed unit circles.
//!
//! An ellipse is the image of the unit circle `(cos t, sin t, 0)` under
//! `M = M3 * M2 * M1` followed by a translation, where `M1` scales the circle
//! to semi-axes `rho*sqrt(alpha)` and `rho/sqrt(alpha)`, `M2` rotates it in the
//! XY plane by `phi`, and `M3` carries `+z` onto the ellipse normal.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Degeneracy, Error, Result};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Tolerance applied to normalized quantities when deciding that a
/// configuration is degenerate.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Below this `|z x n|` the axis of the normal rotation is undefined.
const AXIS_EPS: f64 = 1e-9;

/// Generative parameters of an ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecFields")]
pub struct EllipseSpec {
    rho: f64,
    alpha: f64,
    phi: f64,
    normal: Vec3,
    center: Vec3,
}

#[derive(Deserialize)]
struct SpecFields {
    rho: f64,
    alpha: f64,
    phi: f64,
    normal: Vec3,
    center: Vec3,
}

impl TryFrom<SpecFields> for EllipseSpec {
    type Error = Error;

    fn try_from(f: SpecFields) -> Result<Self> {
        EllipseSpec::new(f.rho, f.alpha, f.phi, f.normal, f.center)
    }
}

impl EllipseSpec {
    /// Validates and canonicalizes the parameters.
    ///
    /// The normal is rescaled to unit length, `alpha < 1` is folded into
    /// `alpha >= 1` by swapping the axes, and `phi` is reduced mod pi.
    pub fn new(rho: f64, alpha: f64, phi: f64, normal: Vec3, center: Vec3) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter("phi must be finite".into()));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter("center must be finite".into()));
        }
        let len = normal.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::InvalidParameter("normal must be a non-zero finite vector".into()));
        }
        let (alpha, phi) = if alpha < 1.0 {
            (1.0 / alpha, phi + FRAC_PI_2)
        } else {
            (alpha, phi)
        };
        Ok(EllipseSpec {
            rho,
            alpha,
            phi: reduce_mod_pi(phi),
            normal: normal / len,
            center,
        })
    }

    /// Round circle of the given radius.
    pub fn circle(radius: f64, normal: Vec3, center: Vec3) -> Result<Self> {
        Self::new(radius, 1.0, 0.0, normal, center)
    }

    /// Unit circle in the XY plane centered at the origin.
    pub fn unit_circle() -> Self {
        EllipseSpec {
            rho: 1.0,
            alpha: 1.0,
            phi: 0.0,
            normal: Vec3::z(),
            center: Vec3::zeros(),
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    /// `(semi-major, semi-minor)`.
    pub fn semi_axes(&self) -> (f64, f64) {
        let root = self.alpha.sqrt();
        (self.rho * root, self.rho / root)
    }

    pub fn with_center(self, center: Vec3) -> Self {
        EllipseSpec { center, ..self }
    }
}

fn reduce_mod_pi(phi: f64) -> f64 {
    let r = phi.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// `diag(rho*sqrt(alpha), rho/sqrt(alpha), 1)`.
pub fn build_scale_matrix(rho: f64, alpha: f64) -> Result<Mat3> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 1, got {alpha}")));
    }
    let root = alpha.sqrt();
    Ok(Mat3::from_diagonal(&Vec3::new(rho * root, rho / root, 1.0)))
}

/// Rotation by `phi` about the z axis.
pub fn build_in_plane_rotation(phi: f64) -> Mat3 {
    let (s, c) = phi.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rodrigues rotation taking `+z` onto the unit vector `n_hat`.
///
/// Uses `I + V + k V^2` with `V` the cross-product matrix of `z x n_hat` and
/// `k = (1 - c) / s^2`. For `c >= 0` the algebraically equal `k = 1 / (1 + c)`
/// is evaluated instead, which avoids cancellation near `n_hat = +z`. When the
/// axis vanishes the result is the identity (`n_hat = +z`) or a half turn
/// about x (`n_hat = -z`).
pub fn build_normal_rotation(n_hat: &Vec3) -> Mat3 {
    debug_assert!((n_hat.norm() - 1.0).abs() < 1e-9, "normal must be unit length");
    let c = n_hat.z;
    let v = Vec3::z().cross(n_hat);
    let s2 = v.norm_squared();
    if c >= 0.0 {
        let k = 1.0 / (1.0 + c);
        let vm = v.cross_matrix();
        return Mat3::identity() + vm + vm * vm * k;
    }
    if s2.sqrt() < AXIS_EPS {
        return Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0));
    }
    let vm = v.cross_matrix();
    Mat3::identity() + vm + vm * vm * ((1.0 - c) / s2)
}

/// Closed-form 3x3 inverse by cofactors. `None` when the determinant is zero
/// or not finite.
pub fn invert3(m: &Mat3) -> Option<Mat3> {
    let c00 = m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)];
    let c01 = m[(1, 2)] * m[(2, 0)] - m[(1, 0)] * m[(2, 2)];
    let c02 = m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)];
    let det = m[(0, 0)] * c00 + m[(0, 1)] * c01 + m[(0, 2)] * c02;
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv_det = 1.0 / det;
    let adj = Mat3::new(
        c00,
        m[(0, 2)] * m[(2, 1)] - m[(0, 1)] * m[(2, 2)],
        m[(0, 1)] * m[(1, 2)] - m[(0, 2)] * m[(1, 1)],
        c01,
        m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)],
        m[(0, 2)] * m[(1, 0)] - m[(0, 0)] * m[(1, 2)],
        c02,
        m[(0, 1)] * m[(2, 0)] - m[(0, 0)] * m[(2, 1)],
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
    );
    Some(adj * inv_det)
}

/// An ellipse realized from its spec, with the inverse transform cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    matrix: Mat3,
    inverse: Mat3,
    center: Vec3,
    spec: EllipseSpec,
}

/// Builds `M = M3 M2 M1` for `spec` and caches its inverse.
pub fn make_ellipse(spec: EllipseSpec) -> Result<Ellipse> {
    Ellipse::new(spec)
}

impl Ellipse {
    pub fn new(spec: EllipseSpec) -> Result<Self> {
        let scale = build_scale_matrix(spec.rho, spec.alpha)?;
        let matrix = build_normal_rotation(&spec.normal) * build_in_plane_rotation(spec.phi) * scale;
        let inverse = invert3(&matrix)
            .ok_or_else(|| Error::Consistency("ellipse transformation matrix is singular".into()))?;
        Ok(Ellipse {
            matrix,
            inverse,
            center: spec.center,
            spec,
        })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn inverse(&self) -> &Mat3 {
        &self.inverse
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn spec(&self) -> &EllipseSpec {
        &self.spec
    }

    /// Unit normal, i.e. the third column of the transformation matrix.
    pub fn normal(&self) -> Vec3 {
        self.matrix.column(2).into_owned()
    }

    pub fn point_at(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.matrix.column(0) * c + self.matrix.column(1) * s + self.center
    }

    /// Maps `p` into the frame where this ellipse is the unit circle in the XY plane.
    pub fn inverse_transform(&self, p: &Vec3) -> Vec3 {
        self.inverse * (p - self.center)
    }

    /// `n` points at equally spaced parameter angles `2 pi k / n`.
    pub fn discretize(&self, n: usize) -> Result<Polyline3> {
        self.discretize_shifted(n, 0.0)
    }

    /// `n` points at parameter angles `2 pi (k + shift) / n`.
    pub fn discretize_shifted(&self, n: usize, shift: f64) -> Result<Polyline3> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("need at least 3 vertices, got {n}")));
        }
        let points = (0..n)
            .map(|k| self.point_at(TAU * (k as f64 + shift) / n as f64))
            .collect();
        Polyline3::closed(points)
    }

    /// Applies `p -> scale * (rotation * p + translation)` to the ellipse.
    ///
    /// `rotation` must be a proper rotation.
    pub fn transformed(&self, rotation: &Mat3, translation: &Vec3, scale: f64) -> Result<Ellipse> {
        let normal = rotation * self.spec.normal;
        let major = rotation * self.matrix.column(0).normalize();
        let normal = normal.normalize();
        let local = build_normal_rotation(&normal).transpose() * major;
        let phi = local.y.atan2(local.x);
        let center = (rotation * self.center + translation) * scale;
        Ellipse::new(EllipseSpec::new(
            self.spec.rho * scale,
            self.spec.alpha,
            phi,
            normal,
            center,
        )?)
    }
}

pub fn point_at(e: &Ellipse, theta: f64) -> Vec3 {
    e.point_at(theta)
}

pub fn inverse_transform(e: &Ellipse, p: &Vec3) -> Vec3 {
    e.inverse_transform(p)
}

pub fn discretize(e: &Ellipse, n: usize) -> Result<Polyline3> {
    e.discretize(n)
}

/// Closed polygon in 3-space.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline3 {
    points: Vec<Vec3>,
    closed: bool,
}

impl Polyline3 {
    /// Closed polygon through `points`; at least three points, no two
    /// consecutive ones equal (including last-to-first).
    pub fn closed(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "polyline needs at least 3 points, got {}",
                points.len()
            )));
        }
        let n = points.len();
        for i in 0..n {
            if points[i] == points[(i + 1) % n] {
                return Err(Error::InvalidParameter(format!(
                    "consecutive points {} and {} coincide",
                    i,
                    (i + 1) % n
                )));
            }
        }
        Ok(Polyline3 { points, closed: true })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Segments `(p_k, p_{k+1})`, wrapping around for closed polylines.
    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }
}

/// Recovers ellipse parameters from points sampled at equally spaced
/// parameter angles, via the gyration tensor.
///
/// The normal is the eigenvector of the smallest eigenvalue, oriented so its
/// first non-negligible component among (z, x, y) is positive. Arclength-uniform
/// samples are not supported; they bias the eigenvalue ratio.
pub fn fit_from_points(points: &Polyline3) -> Result<EllipseSpec> {
    let pts = points.points();
    if pts.len() < 6 {
        return Err(Error::InvalidParameter(format!(
            "fitting needs at least 6 points, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let center = pts.iter().fold(Vec3::zeros(), |acc, p| acc + p) / n;
    let gyration = pts.iter().fold(Mat3::zeros(), |acc, p| {
        let d = p - center;
        acc + d * d.transpose()
    }) / n;

    let eig = SymmetricEigen::new(gyration);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let (l_max, l_mid) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]]);
    if l_max.is_nan() || l_max <= 0.0 || l_mid <= 1e-12 * l_max {
        return Err(Error::degenerate(Degeneracy::RankDeficient));
    }
    let normal = canonical_sign(eig.eigenvectors.column(order[2]).normalize());

    let semi_major = (2.0 * l_max).sqrt();
    let semi_minor = (2.0 * l_mid).sqrt();
    let alpha = (l_max / l_mid).sqrt();
    let rho = (semi_major * semi_minor).sqrt();

    // 2D gyration tensor in the plane of the ellipse.
    let to_plane = build_normal_rotation(&normal).transpose();
    let planar = pts.iter().fold(Matrix2::<f64>::zeros(), |acc, p| {
        let q = to_plane * (p - center);
        let q = Vec2::new(q.x, q.y);
        acc + q * q.transpose()
    }) / n;
    let phi = 0.5 * (2.0 * planar[(0, 1)]).atan2(planar[(0, 0)] - planar[(1, 1)]);

    EllipseSpec::new(rho, alpha, phi, normal, center)
}

fn canonical_sign(n: Vec3) -> Vec3 {
    const ZERO: f64 = 1e-12;
    let key = if n.z.abs() > ZERO {
        n.z
    } else if n.x.abs() > ZERO {
        n.x
    } else {
        n.y
    };
    if key < 0.0 {
        -n
    } else {
        n
    }
}
