//! Borromean detection for three ellipses.
//!
//! Three ellipses in standard position form Borromean rings exactly when their
//! disks pierce each other in a directed 3-cycle and the three disks share a
//! point.

use serde::Serialize;

use crate::error::{Degeneracy, Error, Result};
use crate::geometry::{invert3, Ellipse, Mat3, Vec3, DEGENERACY_EPS};
use crate::pair::{classify_pair, PairClass, PairTag};

/// Pair order used throughout: `(0,1), (0,2), (1,2)`.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

const PLANE_RESIDUAL_TOL: f64 = 1e-6;

/// Direction of a piercing 3-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cycle {
    /// `1 -> 2 -> 3 -> 1`
    Forward,
    /// `1 -> 3 -> 2 -> 1`
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleVerdict {
    Borromean,
    ContainsHopf,
    SplitOrUnlink,
    /// Cyclic piercing whose disks have no common point: unlinked.
    PierceChainNoTriplePoint,
}

impl TripleVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            TripleVerdict::Borromean => "borromean",
            TripleVerdict::ContainsHopf => "contains_hopf",
            TripleVerdict::SplitOrUnlink => "split_or_unlink",
            TripleVerdict::PierceChainNoTriplePoint => "pierce_chain_no_triple_point",
        }
    }
}

impl std::fmt::Display for TripleVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleReport {
    /// Classes for the pairs in [`PAIRS`] order.
    pub pairs: [PairClass; 3],
    pub triple_point: Option<Vec3>,
    pub triple_point_interior: bool,
    pub cyclic_piercing: Option<Cycle>,
    pub verdict: TripleVerdict,
    /// Smallest normalized distance to a degeneracy seen while classifying.
    pub margin: f64,
}

impl TripleReport {
    pub fn tags(&self) -> [PairTag; 3] {
        [self.pairs[0].tag, self.pairs[1].tag, self.pairs[2].tag]
    }
}

/// Intersection of the three planes, `None` when the plane normals are
/// (nearly) linearly dependent.
pub fn plane_triple_point(e1: &Ellipse, e2: &Ellipse, e3: &Ellipse) -> Option<Vec3> {
    let n = [e1.normal(), e2.normal(), e3.normal()];
    let a = Mat3::from_rows(&[n[0].transpose(), n[1].transpose(), n[2].transpose()]);
    if a.determinant().abs() < DEGENERACY_EPS {
        return None;
    }
    let b = Vec3::new(
        n[0].dot(&e1.center()),
        n[1].dot(&e2.center()),
        n[2].dot(&e3.center()),
    );
    invert3(&a).map(|inv| inv * b)
}

/// Whether `p` lies strictly inside all three disks.
///
/// Returns the verdict together with the smallest `|r^2 - 1|` seen.
pub fn triple_point_interior(p: &Vec3, ellipses: [&Ellipse; 3]) -> Result<(bool, f64)> {
    let mut inside = true;
    let mut margin = f64::INFINITY;
    for e in ellipses {
        let q = e.inverse_transform(p);
        let tol = PLANE_RESIDUAL_TOL * 1f64.max(q.x.abs()).max(q.y.abs());
        if q.z.abs() > tol {
            return Err(Error::Consistency(format!(
                "triple point is off an ellipse plane by {:.3e}",
                q.z
            )));
        }
        let r2 = q.x * q.x + q.y * q.y;
        if (r2 - 1.0).abs() <= DEGENERACY_EPS {
            return Err(Error::degenerate(Degeneracy::TriplePointOnBoundary));
        }
        margin = margin.min((r2 - 1.0).abs());
        inside &= r2 < 1.0;
    }
    Ok((inside, margin))
}

/// Directed piercing 3-cycle among the tags, if there is one.
pub fn piercing_cycle(tags: [PairTag; 3]) -> Option<Cycle> {
    // Edge i -> j when disk i pierces disk j.
    let mut out = [None::<usize>; 3];
    for (&(i, j), tag) in PAIRS.iter().zip(tags.iter()) {
        let (from, to) = match tag {
            PairTag::Pierce12 => (i, j),
            PairTag::Pierce21 => (j, i),
            _ => return None,
        };
        if out[from].replace(to).is_some() {
            return None;
        }
    }
    match out {
        [Some(1), Some(2), Some(0)] => Some(Cycle::Forward),
        [Some(2), Some(0), Some(1)] => Some(Cycle::Backward),
        _ => None,
    }
}

pub fn classify_triple(e1: &Ellipse, e2: &Ellipse, e3: &Ellipse) -> Result<TripleReport> {
    let es = [e1, e2, e3];
    let mut pairs = [None; 3];
    for (slot, &(i, j)) in pairs.iter_mut().zip(PAIRS.iter()) {
        *slot = Some(classify_pair(es[i], es[j]).map_err(|e| e.in_pair(i, j))?);
    }
    let pairs = pairs.map(|p| p.expect("all pairs classified"));
    let tags = [pairs[0].tag, pairs[1].tag, pairs[2].tag];
    let mut margin = pairs.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);

    let mut report = TripleReport {
        pairs,
        triple_point: None,
        triple_point_interior: false,
        cyclic_piercing: None,
        verdict: TripleVerdict::SplitOrUnlink,
        margin,
    };
    if tags.contains(&PairTag::Hopf) {
        report.verdict = TripleVerdict::ContainsHopf;
        return Ok(report);
    }
    let Some(cycle) = piercing_cycle(tags) else {
        return Ok(report);
    };
    report.cyclic_piercing = Some(cycle);

    let p = plane_triple_point(e1, e2, e3).ok_or(Error::degenerate(Degeneracy::PlanesNotGeneral))?;
    let (interior, tp_margin) = triple_point_interior(&p, es)?;
    margin = margin.min(tp_margin);
    report.triple_point = Some(p);
    report.triple_point_interior = interior;
    report.margin = margin;
    report.verdict = if interior {
        TripleVerdict::Borromean
    } else {
        TripleVerdict::PierceChainNoTriplePoint
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_ellipse, EllipseSpec};
    use std::f64::consts::FRAC_PI_2;

    fn plane(normal: Vec3, center: Vec3) -> Ellipse {
        make_ellipse(EllipseSpec::circle(1.0, normal, center).unwrap()).unwrap()
    }

    /// x^2/a^2 + y^2/b^2 = 1 in z = 0 and its two cyclic coordinate permutations.
    fn coordinate_borromean(a: f64, b: f64) -> [Ellipse; 3] {
        let rho = (a * b).sqrt();
        let alpha = a / b;
        let o = Vec3::zeros();
        [
            make_ellipse(EllipseSpec::new(rho, alpha, 0.0, Vec3::z(), o).unwrap()).unwrap(),
            make_ellipse(EllipseSpec::new(rho, alpha, FRAC_PI_2, Vec3::x(), o).unwrap()).unwrap(),
            make_ellipse(EllipseSpec::new(rho, alpha, FRAC_PI_2, Vec3::y(), o).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn coordinate_triple_axes() {
        let [e1, e2, e3] = coordinate_borromean(1.2, 0.8);
        // Major axes along x, y, z respectively.
        assert!((e1.point_at(0.0) - Vec3::new(1.2, 0.0, 0.0)).norm() < 1e-12);
        assert!((e2.point_at(0.0) - Vec3::new(0.0, 1.2, 0.0)).norm() < 1e-12);
        assert!((e3.point_at(0.0).abs() - Vec3::new(0.0, 0.0, 1.2)).norm() < 1e-12);
    }

    #[test]
    fn triple_point_examples() {
        let o = Vec3::zeros();
        let p = plane_triple_point(&plane(Vec3::x(), o), &plane(Vec3::y(), o), &plane(Vec3::z(), o));
        assert!(p.unwrap().norm() < 1e-15);
        let p = plane_triple_point(
            &plane(Vec3::x(), Vec3::new(1.0, 0.0, 0.0)),
            &plane(Vec3::y(), Vec3::new(0.0, 2.0, 0.0)),
            &plane(Vec3::z(), Vec3::new(0.0, 0.0, 3.0)),
        );
        assert!((p.unwrap() - Vec3::new(1.0, 2.0, 3.0)).norm() < 1e-14);
        let p = plane_triple_point(
            &plane(Vec3::z(), o),
            &plane(Vec3::z(), Vec3::new(0.0, 0.0, 1.0)),
            &plane(Vec3::x(), o),
        );
        assert!(p.is_none());
    }

    #[test]
    fn triple_point_interior_examples() {
        let [e1, e2, e3] = coordinate_borromean(1.2, 0.8);
        let (inside, _) = triple_point_interior(&Vec3::zeros(), [&e1, &e2, &e3]).unwrap();
        assert!(inside);

        let (a, b, c) = (
            plane(Vec3::x(), Vec3::new(0.0, 10.0, 0.0)),
            plane(Vec3::y(), Vec3::new(0.0, 0.0, 10.0)),
            plane(Vec3::z(), Vec3::new(10.0, 0.0, 0.0)),
        );
        let (inside, _) = triple_point_interior(&Vec3::zeros(), [&a, &b, &c]).unwrap();
        assert!(!inside);

        let (a, b, c) = (
            plane(Vec3::x(), Vec3::zeros()),
            plane(Vec3::y(), Vec3::zeros()),
            plane(Vec3::z(), Vec3::new(1.0, 0.0, 0.0)),
        );
        let err = triple_point_interior(&Vec3::zeros(), [&a, &b, &c]).unwrap_err();
        assert_eq!(err.degeneracy(), Some(Degeneracy::TriplePointOnBoundary));
    }

    #[test]
    fn coordinate_triple_is_borromean() {
        let [e1, e2, e3] = coordinate_borromean(1.2, 0.8);
        let r = classify_triple(&e1, &e2, &e3).unwrap();
        assert_eq!(r.verdict, TripleVerdict::Borromean);
        assert_eq!(r.cyclic_piercing, Some(Cycle::Forward));
        assert_eq!(r.tags(), [PairTag::Pierce12, PairTag::Pierce21, PairTag::Pierce12]);
        assert!(r.triple_point.unwrap().norm() < 1e-15);
    }

    #[test]
    fn coordinate_triple_permutations() {
        let es = coordinate_borromean(1.2, 0.8);
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for p in perms {
            let r = classify_triple(&es[p[0]], &es[p[1]], &es[p[2]]).unwrap();
            assert_eq!(r.verdict, TripleVerdict::Borromean, "permutation {p:?}");
        }
    }

    #[test]
    fn separated_circles_are_split() {
        let c = |x: f64| plane(Vec3::z(), Vec3::new(x, 0.0, 0.0));
        let r = classify_triple(&c(0.0), &c(5.0), &c(10.0)).unwrap_err();
        // Three coplanar circles: the classifier refuses rather than guesses.
        assert_eq!(r.degeneracy(), Some(Degeneracy::Coplanar));
        assert!(matches!(r, Error::Degenerate { pair: Some((0, 1)), .. }));

        let a = plane(Vec3::z(), Vec3::zeros());
        let b = plane(Vec3::x(), Vec3::new(5.0, 0.0, 0.0));
        let c = plane(Vec3::new(1.0, 1.0, 1.0), Vec3::new(0.0, 7.0, 0.0));
        let r = classify_triple(&a, &b, &c).unwrap();
        assert_eq!(r.verdict, TripleVerdict::SplitOrUnlink);
        assert_eq!(r.tags(), [PairTag::Disjoint; 3]);
    }

    #[test]
    fn hopf_pair_dominates() {
        let a = plane(Vec3::z(), Vec3::zeros());
        let b = plane(Vec3::y(), Vec3::x());
        let c = plane(Vec3::x(), Vec3::new(0.5, 9.0, 0.0));
        let r = classify_triple(&a, &b, &c).unwrap();
        assert_eq!(r.verdict, TripleVerdict::ContainsHopf);
    }

    #[test]
    fn cycle_detection_over_all_patterns() {
        use PairTag::*;
        let mut cyclic = 0;
        for a in [Pierce12, Pierce21] {
            for b in [Pierce12, Pierce21] {
                for c in [Pierce12, Pierce21] {
                    if piercing_cycle([a, b, c]).is_some() {
                        cyclic += 1;
                    }
                }
            }
        }
        assert_eq!(cyclic, 2);
        assert_eq!(piercing_cycle([Pierce12, Pierce21, Pierce12]), Some(Cycle::Forward));
        assert_eq!(piercing_cycle([Pierce21, Pierce12, Pierce21]), Some(Cycle::Backward));
        assert_eq!(piercing_cycle([Pierce12, Disjoint, Pierce12]), None);
    }
}
