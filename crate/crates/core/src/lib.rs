//! Exact classification of Hopf and Borromean linking among ellipses in 3-space.
//!
//! Each ellipse is a unit circle pushed through a 3x3 matrix and a translation.
//! Pulling a second ellipse back through the first one's inverse turns "does
//! it pass through the disk" into "where does it cross the XY plane, and is
//! that inside the unit circle". Pair classes follow from counting those
//! crossings; a triple is Borromean when its disks pierce cyclically and share
//! a point.
//!
//! ```
//! use elliptic_links::{classify_pair, make_ellipse, EllipseSpec, PairTag, Vec3};
//!
//! let a = make_ellipse(EllipseSpec::unit_circle()).unwrap();
//! let b = make_ellipse(EllipseSpec::circle(1.0, Vec3::y(), Vec3::x()).unwrap()).unwrap();
//! assert_eq!(classify_pair(&a, &b).unwrap().tag, PairTag::Hopf);
//! ```

pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod pair;
pub mod records;
pub mod triple;

pub use ensemble::{
    benchmark, random_ellipse, random_triple, run_ensemble, validate_ensemble, BenchReport, EnsembleConfig,
    LinkStats, ValidationReport,
};
pub use error::{Degeneracy, Error, Result};
pub use geometry::{
    build_normal_rotation, build_scale_matrix, discretize, fit_from_points, inverse_transform, make_ellipse,
    point_at, Ellipse, EllipseSpec, Mat3, Polyline3, Vec2, Vec3, DEGENERACY_EPS,
};
pub use oracle::{classify_pair_oracle, classify_triple_oracle, gln_discrete, pierce_count_bruteforce, OracleVerdict};
pub use pair::{classify_pair, count_inside, crossings_in_disk_frame, plane_crossing_coeffs, PairClass, PairTag, PlaneCrossing};
pub use triple::{classify_triple, plane_triple_point, triple_point_interior, Cycle, TripleReport, TripleVerdict};
