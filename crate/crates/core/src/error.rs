use serde::Serialize;
use thiserror::Error;

/// Measure-zero configurations that the classifiers refuse to guess about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// The two ellipses lie in the same plane.
    Coplanar,
    /// One ellipse touches the other's plane at a single point.
    Tangent,
    /// A plane crossing lands on the boundary ellipse, so the curves share a point.
    BoundaryCrossing,
    /// The three planes do not meet in a single point.
    PlanesNotGeneral,
    /// The triple point sits on the boundary of one of the disks.
    TriplePointOnBoundary,
    /// Point cloud is (nearly) collinear or otherwise rank deficient.
    RankDeficient,
    /// Two polygons share a point.
    SharedPoint,
    /// A polygon vertex lies exactly on a disk's plane.
    VertexOnPlane,
}

impl Degeneracy {
    pub fn as_str(self) -> &'static str {
        match self {
            Degeneracy::Coplanar => "coplanar",
            Degeneracy::Tangent => "tangent",
            Degeneracy::BoundaryCrossing => "boundary_crossing",
            Degeneracy::PlanesNotGeneral => "planes_not_general",
            Degeneracy::TriplePointOnBoundary => "triple_point_on_boundary",
            Degeneracy::RankDeficient => "rank_deficient",
            Degeneracy::SharedPoint => "shared_point",
            Degeneracy::VertexOnPlane => "vertex_on_plane",
        }
    }
}

impl std::fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate configuration ({reason}){}", pair_suffix(.pair))]
    Degenerate {
        reason: Degeneracy,
        /// Zero-based indices of the offending pair within a triple, when known.
        pair: Option<(usize, usize)>,
    },

    #[error("contract violation: {0}")]
    Contract(&'static str),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

fn pair_suffix(pair: &Option<(usize, usize)>) -> String {
    match pair {
        Some((i, j)) => format!(" in pair ({}, {})", i + 1, j + 1),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn degenerate(reason: Degeneracy) -> Self {
        Error::Degenerate { reason, pair: None }
    }

    /// The degeneracy behind this error, if it is one.
    pub fn degeneracy(&self) -> Option<Degeneracy> {
        match self {
            Error::Degenerate { reason, .. } => Some(*reason),
            _ => None,
        }
    }

    pub(crate) fn in_pair(self, i: usize, j: usize) -> Self {
        match self {
            Error::Degenerate { reason, pair: None } => Error::Degenerate {
                reason,
                pair: Some((i, j)),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
