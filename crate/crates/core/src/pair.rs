//! Pairwise configuration of two ellipses.
//!
//! The second ellipse is written in the frame where the first is the unit
//! circle. Its signed distance to the first ellipse's plane is
//! `F(t) = lambda cos t + mu sin t + nu`; the zeros of `F` are where it crosses
//! the plane, and the number of those crossings inside the unit disk decides
//! the configuration. When no crossing lands inside, the roles are swapped.

use serde::Serialize;

use crate::error::{Degeneracy, Error, Result};
use crate::geometry::{Ellipse, Vec2, DEGENERACY_EPS};

/// Largest tolerated `|z|` of a transformed plane crossing, relative to scale.
const PLANE_RESIDUAL_TOL: f64 = 1e-6;

/// Coefficients of `F(t) = lambda cos t + mu sin t + nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneCrossing {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

impl PlaneCrossing {
    /// Distance function of `curve` to the plane of `plane_of`.
    pub fn between(plane_of: &Ellipse, curve: &Ellipse) -> Self {
        let n = plane_of.normal();
        let m = curve.matrix();
        PlaneCrossing {
            lambda: n.dot(&m.column(0)),
            mu: n.dot(&m.column(1)),
            nu: n.dot(&(curve.center() - plane_of.center())),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.lambda * c + self.mu * s + self.nu
    }

    /// Normalization used by every tolerance on these coefficients.
    pub fn scale(&self) -> f64 {
        1f64.max(self.lambda.abs()).max(self.mu.abs()).max(self.nu.abs())
    }

    /// Half the peak-to-peak swing of `F`.
    pub fn amplitude(&self) -> f64 {
        self.lambda.hypot(self.mu)
    }

    /// Normalized distance of the extrema straddle from tangency.
    pub fn margin(&self) -> f64 {
        (self.amplitude() - self.nu.abs()).abs() / self.scale()
    }

    /// Whether the curve crosses the plane transversally.
    ///
    /// Tangency and coplanarity are reported as degeneracies.
    pub fn crossing_exists(&self) -> Result<bool> {
        let tol = DEGENERACY_EPS * self.scale();
        let amp = self.amplitude();
        if amp <= tol && self.nu.abs() <= tol {
            return Err(Error::degenerate(Degeneracy::Coplanar));
        }
        let gap = amp - self.nu.abs();
        if gap.abs() <= tol {
            return Err(Error::degenerate(Degeneracy::Tangent));
        }
        Ok(gap > 0.0)
    }

    /// The two zeros of `F` in `[0, 2 pi)`, from the phase form
    /// `atan2(mu, lambda) +/- acos(-nu / hypot(lambda, mu))`.
    pub fn crossing_angles(&self) -> Result<[f64; 2]> {
        if !self.crossing_exists()? {
            return Err(Error::Contract("crossing_angles called on a curve that does not cross the plane"));
        }
        let phase = self.mu.atan2(self.lambda);
        let spread = (-self.nu / self.amplitude()).clamp(-1.0, 1.0).acos();
        Ok([wrap_angle(phase + spread), wrap_angle(phase - spread)])
    }

    /// Zeros of `F`: empty when the curve misses the plane.
    pub fn zeros(&self) -> Result<Vec<f64>> {
        if self.crossing_exists()? {
            Ok(self.crossing_angles()?.to_vec())
        } else {
            Ok(Vec::new())
        }
    }
}

fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(std::f64::consts::TAU);
    if r >= std::f64::consts::TAU {
        0.0
    } else {
        r
    }
}

pub fn plane_crossing_coeffs(e1: &Ellipse, e2: &Ellipse) -> PlaneCrossing {
    PlaneCrossing::between(e1, e2)
}

/// XY coordinates of `e2`'s plane crossings in the frame where `e1` is the
/// unit circle.
pub fn crossings_in_disk_frame(e1: &Ellipse, e2: &Ellipse, thetas: [f64; 2]) -> Result<[Vec2; 2]> {
    let mut out = [Vec2::zeros(); 2];
    for (slot, &theta) in out.iter_mut().zip(thetas.iter()) {
        let q = e1.inverse_transform(&e2.point_at(theta));
        let tol = PLANE_RESIDUAL_TOL * 1f64.max(q.x.abs()).max(q.y.abs());
        if q.z.abs() > tol {
            return Err(Error::Consistency(format!(
                "plane crossing has out-of-plane residual {:.3e}",
                q.z
            )));
        }
        *slot = Vec2::new(q.x, q.y);
    }
    Ok(out)
}

/// Number of points strictly inside the unit circle. A point within the
/// degeneracy tolerance of the circle is an error.
pub fn count_inside(points: &[Vec2]) -> Result<u8> {
    let mut inside = 0;
    for p in points {
        let r2 = p.norm_squared();
        if (r2 - 1.0).abs() <= DEGENERACY_EPS {
            return Err(Error::degenerate(Degeneracy::BoundaryCrossing));
        }
        if r2 < 1.0 {
            inside += 1;
        }
    }
    Ok(inside)
}

/// Configuration of an ordered pair `(first, second)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairTag {
    /// Neither disk is crossed by the other curve.
    Disjoint,
    /// Each curve passes once through the other's disk.
    Hopf,
    /// The first disk pierces the second: the first curve crosses the second
    /// disk twice.
    Pierce12,
    /// The second disk pierces the first.
    Pierce21,
}

impl PairTag {
    /// Tag for the same pair with its arguments exchanged.
    pub fn swapped(self) -> Self {
        match self {
            PairTag::Pierce12 => PairTag::Pierce21,
            PairTag::Pierce21 => PairTag::Pierce12,
            other => other,
        }
    }

    pub fn is_pierce(self) -> bool {
        matches!(self, PairTag::Pierce12 | PairTag::Pierce21)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PairTag::Disjoint => "disjoint",
            PairTag::Hopf => "hopf",
            PairTag::Pierce12 => "pierce12",
            PairTag::Pierce21 => "pierce21",
        }
    }
}

impl std::fmt::Display for PairTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairClass {
    pub tag: PairTag,
    /// Crossings of the second curve inside the first disk.
    pub second_in_first: u8,
    /// Crossings of the first curve inside the second disk, when that
    /// direction was evaluated.
    pub first_in_second: Option<u8>,
    /// Smallest normalized distance to a degeneracy seen while classifying.
    pub margin: f64,
}

struct Direction {
    inside: u8,
    margin: f64,
}

/// Crossings of `curve` inside the disk of `disk`.
fn inside_count(disk: &Ellipse, curve: &Ellipse) -> Result<Direction> {
    let pc = PlaneCrossing::between(disk, curve);
    let mut margin = pc.margin();
    if !pc.crossing_exists()? {
        return Ok(Direction { inside: 0, margin });
    }
    let points = crossings_in_disk_frame(disk, curve, pc.crossing_angles()?)?;
    for p in &points {
        margin = margin.min((p.norm_squared() - 1.0).abs());
    }
    Ok(Direction {
        inside: count_inside(&points)?,
        margin,
    })
}

/// Classifies two ellipses in standard position.
///
/// Crossings of `e2` with the plane of `e1` are examined first; the swapped
/// direction runs only when none land inside. In debug builds a single
/// inside crossing is cross-checked against the swapped direction.
pub fn classify_pair(e1: &Ellipse, e2: &Ellipse) -> Result<PairClass> {
    let fwd = inside_count(e1, e2)?;
    match fwd.inside {
        1 => {
            let mut first_in_second = None;
            let mut margin = fwd.margin;
            if cfg!(debug_assertions) {
                let rev = inside_count(e2, e1)?;
                if rev.inside != 1 {
                    return Err(Error::Consistency(format!(
                        "one-sided Hopf crossing: reverse direction found {} inside",
                        rev.inside
                    )));
                }
                first_in_second = Some(1);
                margin = margin.min(rev.margin);
            }
            Ok(PairClass {
                tag: PairTag::Hopf,
                second_in_first: 1,
                first_in_second,
                margin,
            })
        }
        2 => Ok(PairClass {
            tag: PairTag::Pierce21,
            second_in_first: 2,
            first_in_second: None,
            margin: fwd.margin,
        }),
        _ => {
            let rev = inside_count(e2, e1)?;
            let tag = match rev.inside {
                1 => PairTag::Hopf,
                2 => PairTag::Pierce12,
                _ => PairTag::Disjoint,
            };
            Ok(PairClass {
                tag,
                second_in_first: 0,
                first_in_second: Some(rev.inside),
                margin: fwd.margin.min(rev.margin),
            })
        }
    }
}
