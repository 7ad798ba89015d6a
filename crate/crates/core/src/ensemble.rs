//! Random ellipse ensembles, Monte Carlo link statistics and timing.
//!
//! Triple `i` of a run draws from its own ChaCha8 stream (`seed`, stream `i`),
//! so results do not depend on how the index range is split across threads.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::hint::black_box;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Ellipse, EllipseSpec, Vec3};
use crate::oracle::classify_triple_oracle;
use crate::pair::PairTag;
use crate::triple::{classify_triple, TripleReport, TripleVerdict};

/// Wall time the reference interpreted implementation needed for 1000 triples.
pub const BASELINE_SECONDS_PER_1000: f64 = 0.2;

/// Disagreements whose exact margin is below this are flagged as boundary cases.
pub const NEAR_BOUNDARY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleConfig {
    /// Number of triples.
    pub count: usize,
    pub rho: f64,
    pub alpha: f64,
    /// Centers are uniform in `[-h, h]^3`; zero gives concentric ellipses.
    pub center_halfwidth: f64,
    pub seed: u64,
    pub vertices_for_oracle: Option<usize>,
}

impl Default for EnsembleConfig {
    /// Unit-area golden-ratio ellipses with centers in `[-0.2, 0.2]^3`.
    fn default() -> Self {
        EnsembleConfig {
            count: 100,
            rho: 1.0,
            alpha: 1.618,
            center_halfwidth: 0.2,
            seed: 0,
            vertices_for_oracle: None,
        }
    }
}

impl EnsembleConfig {
    pub fn concentric(count: usize, alpha: f64, seed: u64) -> Self {
        EnsembleConfig {
            count,
            alpha,
            center_halfwidth: 0.0,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("count must be at least 1".into()));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 1, got {}", self.alpha)));
        }
        if !(self.center_halfwidth.is_finite() && self.center_halfwidth >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "center halfwidth must be >= 0, got {}",
                self.center_halfwidth
            )));
        }
        if let Some(n) = self.vertices_for_oracle {
            if n < 8 {
                return Err(Error::InvalidParameter(format!("oracle needs at least 8 vertices, got {n}")));
            }
        }
        Ok(())
    }
}

/// Generator for triple `index` of a run seeded with `seed`.
pub fn triple_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Normal uniform on the sphere, `phi` uniform on `[0, pi)`, center uniform
/// in the configured cube.
pub fn random_spec<R: Rng + ?Sized>(cfg: &EnsembleConfig, rng: &mut R) -> EllipseSpec {
    let normal = loop {
        let g = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if g.norm() > 1e-12 {
            break g;
        }
    };
    let phi = rng.random_range(0.0..PI);
    let h = cfg.center_halfwidth;
    let center = if h > 0.0 {
        Vec3::new(
            rng.random_range(-h..=h),
            rng.random_range(-h..=h),
            rng.random_range(-h..=h),
        )
    } else {
        Vec3::zeros()
    };
    EllipseSpec::new(cfg.rho, cfg.alpha, phi, normal, center).expect("validated ensemble parameters")
}

pub fn random_ellipse<R: Rng + ?Sized>(cfg: &EnsembleConfig, rng: &mut R) -> Ellipse {
    Ellipse::new(random_spec(cfg, rng)).expect("validated ensemble parameters")
}

pub fn random_triple(cfg: &EnsembleConfig, index: usize) -> [Ellipse; 3] {
    let mut rng = triple_rng(cfg.seed, index as u64);
    [
        random_ellipse(cfg, &mut rng),
        random_ellipse(cfg, &mut rng),
        random_ellipse(cfg, &mut rng),
    ]
}

/// Counts of each pair tag at one pair slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PairTally {
    pub disjoint: u64,
    pub hopf: u64,
    pub pierce12: u64,
    pub pierce21: u64,
}

impl PairTally {
    fn add(&mut self, tag: PairTag) {
        match tag {
            PairTag::Disjoint => self.disjoint += 1,
            PairTag::Hopf => self.hopf += 1,
            PairTag::Pierce12 => self.pierce12 += 1,
            PairTag::Pierce21 => self.pierce21 += 1,
        }
    }

    fn merge(&mut self, other: &PairTally) {
        self.disjoint += other.disjoint;
        self.hopf += other.hopf;
        self.pierce12 += other.pierce12;
        self.pierce21 += other.pierce21;
    }

    pub fn total(&self) -> u64 {
        self.disjoint + self.hopf + self.pierce12 + self.pierce21
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkStats {
    pub config: EnsembleConfig,
    pub n_total: u64,
    pub n_borromean: u64,
    pub n_contains_hopf: u64,
    pub n_split: u64,
    pub n_pierce_chain_no_tp: u64,
    pub n_degenerate: u64,
    /// `n_borromean / (n_total - n_degenerate)`, zero when every triple was degenerate.
    pub borromean_fraction: f64,
    /// Binomial standard error of `borromean_fraction`.
    pub borromean_stderr: f64,
    /// Pair tags over the non-degenerate triples, for pairs `(1,2), (1,3), (2,3)`.
    pub pairs: [PairTally; 3],
    pub degenerate_reasons: BTreeMap<String, u64>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    n_total: u64,
    n_borromean: u64,
    n_contains_hopf: u64,
    n_split: u64,
    n_pierce_chain_no_tp: u64,
    n_degenerate: u64,
    pairs: [PairTally; 3],
    reasons: BTreeMap<String, u64>,
}

impl Tally {
    fn add(&mut self, outcome: &Result<TripleReport>) {
        self.n_total += 1;
        match outcome {
            Ok(r) => {
                match r.verdict {
                    TripleVerdict::Borromean => self.n_borromean += 1,
                    TripleVerdict::ContainsHopf => self.n_contains_hopf += 1,
                    TripleVerdict::SplitOrUnlink => self.n_split += 1,
                    TripleVerdict::PierceChainNoTriplePoint => self.n_pierce_chain_no_tp += 1,
                }
                for (slot, p) in self.pairs.iter_mut().zip(r.pairs.iter()) {
                    slot.add(p.tag);
                }
            }
            Err(e) => {
                self.n_degenerate += 1;
                *self.reasons.entry(reason_label(e)).or_default() += 1;
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.n_total += other.n_total;
        self.n_borromean += other.n_borromean;
        self.n_contains_hopf += other.n_contains_hopf;
        self.n_split += other.n_split;
        self.n_pierce_chain_no_tp += other.n_pierce_chain_no_tp;
        self.n_degenerate += other.n_degenerate;
        for (a, b) in self.pairs.iter_mut().zip(other.pairs.iter()) {
            a.merge(b);
        }
        for (k, v) in other.reasons {
            *self.reasons.entry(k).or_default() += v;
        }
        self
    }
}

/// Short label for a classification failure.
pub fn reason_label(e: &Error) -> String {
    match e.degeneracy() {
        Some(d) => d.as_str().to_string(),
        None => match e {
            Error::Consistency(_) => "consistency".into(),
            Error::Contract(_) => "contract".into(),
            _ => "invalid".into(),
        },
    }
}

pub fn classify_index(cfg: &EnsembleConfig, index: usize) -> Result<TripleReport> {
    let [a, b, c] = random_triple(cfg, index);
    classify_triple(&a, &b, &c)
}

/// Classifies `cfg.count` random triples on the current rayon pool.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<LinkStats> {
    cfg.validate()?;
    let start = Instant::now();
    let tally = (0..cfg.count)
        .into_par_iter()
        .fold(Tally::default, |mut t, i| {
            t.add(&classify_index(cfg, i));
            t
        })
        .reduce(Tally::default, Tally::merge);
    let wall_time = start.elapsed().as_secs_f64();

    let valid = tally.n_total - tally.n_degenerate;
    let (fraction, stderr) = if valid > 0 {
        let f = tally.n_borromean as f64 / valid as f64;
        (f, (f * (1.0 - f) / valid as f64).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(LinkStats {
        config: *cfg,
        n_total: tally.n_total,
        n_borromean: tally.n_borromean,
        n_contains_hopf: tally.n_contains_hopf,
        n_split: tally.n_split,
        n_pierce_chain_no_tp: tally.n_pierce_chain_no_tp,
        n_degenerate: tally.n_degenerate,
        borromean_fraction: fraction,
        borromean_stderr: stderr,
        pairs: tally.pairs,
        degenerate_reasons: tally.reasons,
        wall_time,
    })
}

/// Per-triple reports in index order.
pub fn classify_ensemble(cfg: &EnsembleConfig) -> Result<Vec<Result<TripleReport>>> {
    cfg.validate()?;
    Ok((0..cfg.count).into_par_iter().map(|i| classify_index(cfg, i)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub index: usize,
    pub exact: TripleVerdict,
    pub oracle: TripleVerdict,
    pub exact_pairs: [PairTag; 3],
    pub oracle_pairs: [PairTag; 3],
    /// Normalized distance of the exact classification from a degeneracy.
    pub margin: f64,
    /// `margin < NEAR_BOUNDARY`.
    pub near_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub count: usize,
    pub vertices: usize,
    /// Triples that both classifiers resolved.
    pub compared: u64,
    pub agreements: u64,
    pub agreement_fraction: f64,
    pub exact_degenerate: u64,
    pub oracle_degenerate: u64,
    /// Disagreements with `near_boundary` set.
    pub flagged: u64,
    pub disagreements: Vec<Disagreement>,
}

enum Comparison {
    Agree,
    Disagree(Disagreement),
    ExactDegenerate,
    OracleDegenerate,
}

/// Runs the exact and brute-force classifiers on the same triples.
pub fn validate_ensemble(cfg: &EnsembleConfig) -> Result<ValidationReport> {
    cfg.validate()?;
    let vertices = cfg.vertices_for_oracle.ok_or_else(|| {
        Error::InvalidParameter("validation needs vertices_for_oracle".into())
    })?;
    let outcomes: Vec<Comparison> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let [a, b, c] = random_triple(cfg, i);
            let exact = match classify_triple(&a, &b, &c) {
                Ok(r) => r,
                Err(_) => return Comparison::ExactDegenerate,
            };
            let oracle = match classify_triple_oracle(&a, &b, &c, vertices) {
                Ok(r) => r,
                Err(_) => return Comparison::OracleDegenerate,
            };
            if exact.verdict == oracle.verdict {
                Comparison::Agree
            } else {
                Comparison::Disagree(Disagreement {
                    index: i,
                    exact: exact.verdict,
                    oracle: oracle.verdict,
                    exact_pairs: exact.tags(),
                    oracle_pairs: oracle.pairs,
                    margin: exact.margin,
                    near_boundary: exact.margin < NEAR_BOUNDARY,
                })
            }
        })
        .collect();

    let mut report = ValidationReport {
        count: cfg.count,
        vertices,
        compared: 0,
        agreements: 0,
        agreement_fraction: 0.0,
        exact_degenerate: 0,
        oracle_degenerate: 0,
        flagged: 0,
        disagreements: Vec::new(),
    };
    for o in outcomes {
        match o {
            Comparison::Agree => {
                report.compared += 1;
                report.agreements += 1;
            }
            Comparison::Disagree(d) => {
                report.compared += 1;
                report.flagged += d.near_boundary as u64;
                report.disagreements.push(d);
            }
            Comparison::ExactDegenerate => report.exact_degenerate += 1,
            Comparison::OracleDegenerate => report.oracle_degenerate += 1,
        }
    }
    if report.compared > 0 {
        report.agreement_fraction = report.agreements as f64 / report.compared as f64;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub count: usize,
    pub threads: usize,
    pub single_thread_seconds: f64,
    pub parallel_seconds: f64,
    pub single_thread_triples_per_second: f64,
    pub parallel_triples_per_second: f64,
    pub baseline_seconds: f64,
    /// Baseline time for the same count divided by the single-thread time.
    pub speedup_vs_baseline: f64,
}

/// Times classification of `cfg.count` pre-generated triples, single-threaded
/// and on the current rayon pool. Generation is not timed. Each figure is the
/// best of `repeats` passes.
pub fn benchmark(cfg: &EnsembleConfig, repeats: usize) -> Result<BenchReport> {
    cfg.validate()?;
    let triples: Vec<[Ellipse; 3]> = (0..cfg.count).map(|i| random_triple(cfg, i)).collect();
    let repeats = repeats.max(1);

    let mut single = f64::INFINITY;
    for _ in 0..repeats {
        let start = Instant::now();
        for [a, b, c] in &triples {
            let _ = black_box(classify_triple(black_box(a), black_box(b), black_box(c)));
        }
        single = single.min(start.elapsed().as_secs_f64());
    }
    let mut parallel = f64::INFINITY;
    for _ in 0..repeats {
        let start = Instant::now();
        triples.par_iter().for_each(|[a, b, c]| {
            let _ = black_box(classify_triple(black_box(a), black_box(b), black_box(c)));
        });
        parallel = parallel.min(start.elapsed().as_secs_f64());
    }
    let baseline = BASELINE_SECONDS_PER_1000 * cfg.count as f64 / 1000.0;
    let rate = |t: f64| if t > 0.0 { cfg.count as f64 / t } else { f64::INFINITY };
    Ok(BenchReport {
        count: cfg.count,
        threads: rayon::current_num_threads(),
        single_thread_seconds: single,
        parallel_seconds: parallel,
        single_thread_triples_per_second: rate(single),
        parallel_triples_per_second: rate(parallel),
        baseline_seconds: baseline,
        speedup_vs_baseline: if single > 0.0 { baseline / single } else { f64::INFINITY },
    })
}
