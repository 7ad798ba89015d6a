//! Brute-force validators working on discretized ellipses.
//!
//! Nothing here goes through the closed-form plane-crossing path: piercings
//! are counted by walking polygon segments across a plane, disk membership
//! uses the ellipse inequality in the disk's own orthonormal frame, and the
//! linking number is summed from exact segment-pair solid angles.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Degeneracy, Error, Result};
use crate::geometry::{Ellipse, Polyline3, Vec3};
use crate::pair::PairTag;
use crate::triple::TripleVerdict;

const SHARED_POINT_TOL: f64 = 1e-12;
const ON_PLANE_TOL: f64 = 1e-12;

/// Oracle polygons sample at half-step offsets `2 pi (k + 1/2) / n`, which
/// keeps them off axis-aligned planes of symmetric configurations.
const SAMPLE_SHIFT: f64 = 0.5;

pub fn oracle_polygon(e: &Ellipse, n: usize) -> Result<Polyline3> {
    e.discretize_shifted(n, SAMPLE_SHIFT)
}

/// Orthonormal frame and semi-axes of an ellipse's disk, read off the matrix
/// columns rather than from the cached inverse.
struct DiskFrame {
    center: Vec3,
    u: Vec3,
    v: Vec3,
    normal: Vec3,
    a: f64,
    b: f64,
}

impl DiskFrame {
    fn of(e: &Ellipse) -> Self {
        let m = e.matrix();
        let c0 = m.column(0).into_owned();
        let c1 = m.column(1).into_owned();
        let (a, b) = (c0.norm(), c1.norm());
        let (u, v) = (c0 / a, c1 / b);
        DiskFrame {
            center: e.center(),
            u,
            v,
            normal: u.cross(&v).normalize(),
            a,
            b,
        }
    }

    fn height(&self, p: &Vec3) -> f64 {
        self.normal.dot(&(p - self.center))
    }

    /// `x^2/a^2 + y^2/b^2` of the in-plane projection of `p`.
    fn radial(&self, p: &Vec3) -> f64 {
        let d = p - self.center;
        let x = self.u.dot(&d) / self.a;
        let y = self.v.dot(&d) / self.b;
        x * x + y * y
    }
}

/// Gauss linking number of two closed polygons from signed solid angles of
/// segment pairs. Exact up to rounding for disjoint polygons.
pub fn gln_discrete(p1: &Polyline3, p2: &Polyline3) -> Result<f64> {
    for a in p1.points() {
        for b in p2.points() {
            if (a - b).norm() < SHARED_POINT_TOL {
                return Err(Error::degenerate(Degeneracy::SharedPoint));
            }
        }
    }
    let mut total = 0.0;
    for (a0, a1) in p1.segments() {
        for (b0, b1) in p2.segments() {
            total += segment_solid_angle(&a0, &a1, &b0, &b1);
        }
    }
    Ok(total / (4.0 * PI))
}

/// Signed solid angle of the quadrilateral spanned by segments `a0-a1` and `b0-b1`.
fn segment_solid_angle(a0: &Vec3, a1: &Vec3, b0: &Vec3, b1: &Vec3) -> f64 {
    let r13 = b0 - a0;
    let r14 = b1 - a0;
    let r23 = b0 - a1;
    let r24 = b1 - a1;
    let orient = (b1 - b0).cross(&(a1 - a0)).dot(&r13);
    if orient == 0.0 {
        return 0.0;
    }
    let faces = [r13.cross(&r14), r14.cross(&r24), r24.cross(&r23), r23.cross(&r13)];
    let mut unit = [Vec3::zeros(); 4];
    for (u, f) in unit.iter_mut().zip(faces.iter()) {
        let len = f.norm();
        if len == 0.0 {
            return 0.0;
        }
        *u = f / len;
    }
    let omega: f64 = (0..4)
        .map(|k| unit[k].dot(&unit[(k + 1) % 4]).clamp(-1.0, 1.0).asin())
        .sum();
    omega * orient.signum()
}

/// Number of times the polygon `curve` crosses the open disk of `disk_of`.
pub fn pierce_count_bruteforce(curve: &Polyline3, disk_of: &Ellipse) -> Result<u8> {
    let frame = DiskFrame::of(disk_of);
    let scale = 1f64.max(frame.a);
    let heights: Vec<f64> = curve.points().iter().map(|p| frame.height(p)).collect();
    if heights.iter().any(|h| h.abs() < ON_PLANE_TOL * scale) {
        return Err(Error::degenerate(Degeneracy::VertexOnPlane));
    }
    let pts = curve.points();
    let n = pts.len();
    let mut count = 0u8;
    for k in 0..n {
        let (h0, h1) = (heights[k], heights[(k + 1) % n]);
        if (h0 < 0.0) == (h1 < 0.0) {
            continue;
        }
        let t = h0 / (h0 - h1);
        let hit = pts[k] + (pts[(k + 1) % n] - pts[k]) * t;
        if frame.radial(&hit) < 1.0 {
            count = count.saturating_add(1);
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub pair_class: PairTag,
    pub gln_abs: f64,
    pub vertices: usize,
    /// Crossings of the first polygon inside the second disk.
    pub first_in_second: u8,
    /// Crossings of the second polygon inside the first disk.
    pub second_in_first: u8,
}

fn tag_from_counts(first_in_second: u8, second_in_first: u8) -> PairTag {
    if first_in_second == 1 || second_in_first == 1 {
        PairTag::Hopf
    } else if second_in_first >= 2 {
        PairTag::Pierce21
    } else if first_in_second >= 2 {
        PairTag::Pierce12
    } else {
        PairTag::Disjoint
    }
}

fn pair_counts(polys: (&Polyline3, &Polyline3), es: (&Ellipse, &Ellipse)) -> Result<(u8, u8)> {
    Ok((
        pierce_count_bruteforce(polys.0, es.1)?,
        pierce_count_bruteforce(polys.1, es.0)?,
    ))
}

/// Pair tag from polygon piercing counts plus `|GLN|` of the two polygons.
pub fn classify_pair_oracle(e1: &Ellipse, e2: &Ellipse, n: usize) -> Result<OracleVerdict> {
    let p1 = oracle_polygon(e1, n)?;
    let p2 = oracle_polygon(e2, n)?;
    let (first_in_second, second_in_first) = pair_counts((&p1, &p2), (e1, e2))?;
    Ok(OracleVerdict {
        pair_class: tag_from_counts(first_in_second, second_in_first),
        gln_abs: gln_discrete(&p1, &p2)?.abs(),
        vertices: n,
        first_in_second,
        second_in_first,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleTripleVerdict {
    /// Tags for pairs `(1,2), (1,3), (2,3)`.
    pub pairs: [PairTag; 3],
    pub triple_point: Option<Vec3>,
    pub verdict: TripleVerdict,
    pub vertices: usize,
}

/// Plane intersection by Cramer's rule with normals taken from `u x v`.
fn cramer_triple_point(frames: &[DiskFrame; 3]) -> Option<Vec3> {
    let (n1, n2, n3) = (frames[0].normal, frames[1].normal, frames[2].normal);
    let det = n1.dot(&n2.cross(&n3));
    if det.abs() < 1e-12 {
        return None;
    }
    let d = [
        n1.dot(&frames[0].center),
        n2.dot(&frames[1].center),
        n3.dot(&frames[2].center),
    ];
    Some((n2.cross(&n3) * d[0] + n3.cross(&n1) * d[1] + n1.cross(&n2) * d[2]) / det)
}

pub fn classify_triple_oracle(e1: &Ellipse, e2: &Ellipse, e3: &Ellipse, n: usize) -> Result<OracleTripleVerdict> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("oracle needs at least 8 vertices, got {n}")));
    }
    let es = [e1, e2, e3];
    let polys = [oracle_polygon(e1, n)?, oracle_polygon(e2, n)?, oracle_polygon(e3, n)?];
    let index = [(0usize, 1usize), (0, 2), (1, 2)];
    let mut tags = [PairTag::Disjoint; 3];
    for (tag, &(i, j)) in tags.iter_mut().zip(index.iter()) {
        let (ij, ji) = pair_counts((&polys[i], &polys[j]), (es[i], es[j])).map_err(|e| e.in_pair(i, j))?;
        *tag = tag_from_counts(ij, ji);
    }
    let mut report = OracleTripleVerdict {
        pairs: tags,
        triple_point: None,
        verdict: TripleVerdict::SplitOrUnlink,
        vertices: n,
    };
    if tags.contains(&PairTag::Hopf) {
        report.verdict = TripleVerdict::ContainsHopf;
        return Ok(report);
    }
    if !tags.iter().all(|t| t.is_pierce()) {
        return Ok(report);
    }
    // Three directed edges on three nodes form a cycle iff every node pierces exactly once.
    let mut out_degree = [0u8; 3];
    for (tag, &(i, j)) in tags.iter().zip(index.iter()) {
        out_degree[if *tag == PairTag::Pierce12 { i } else { j }] += 1;
    }
    if out_degree != [1, 1, 1] {
        return Ok(report);
    }
    let frames = [DiskFrame::of(e1), DiskFrame::of(e2), DiskFrame::of(e3)];
    let p = cramer_triple_point(&frames).ok_or(Error::degenerate(Degeneracy::PlanesNotGeneral))?;
    report.triple_point = Some(p);
    report.verdict = if frames.iter().all(|f| f.radial(&p) < 1.0) {
        TripleVerdict::Borromean
    } else {
        TripleVerdict::PierceChainNoTriplePoint
    };
    Ok(report)
}
