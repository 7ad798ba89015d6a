//! Fixtures shared by the criterion benchmarks.

use elliptic_links::{make_ellipse, random_triple, Ellipse, EllipseSpec, EnsembleConfig, Vec3};

/// `count` triples from the default offset ensemble.
pub fn offset_triples(count: usize, seed: u64) -> Vec<[Ellipse; 3]> {
    let cfg = EnsembleConfig { count, seed, ..Default::default() };
    (0..count).map(|i| random_triple(&cfg, i)).collect()
}

/// `count` concentric golden-ratio triples.
pub fn concentric_triples(count: usize, seed: u64) -> Vec<[Ellipse; 3]> {
    let cfg = EnsembleConfig::concentric(count, 1.618, seed);
    (0..count).map(|i| random_triple(&cfg, i)).collect()
}

/// Three congruent ellipses in the coordinate planes forming Borromean rings.
pub fn coordinate_borromean() -> [Ellipse; 3] {
    let (a, b) = (1.2f64, 0.8f64);
    let (rho, alpha) = ((a * b).sqrt(), a / b);
    let e = |phi, n: Vec3| make_ellipse(EllipseSpec::new(rho, alpha, phi, n, Vec3::zeros()).unwrap()).unwrap();
    let half = std::f64::consts::FRAC_PI_2;
    [e(0.0, Vec3::z()), e(half, Vec3::x()), e(half, Vec3::y())]
}
