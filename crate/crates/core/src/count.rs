//! Parallel enumeration of all weighted (path, subdivision) pairs.
//!
//! The canonical path stream is cut into contiguous index ranges, each range
//! is processed independently on the rayon pool, and the per-range results are
//! concatenated in range order. Since every range produces its contributions in
//! canonical order and sums are exact, the output does not depend on the number
//! of workers.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::LatticeSegment;
use crate::multiplicity::{cuspidal_multiplicity, severi_multiplicity, Multiplicity, MultiplicityError};
use crate::path::{LambdaPath, LambdaPaths};
use crate::problem::{Mode, ProblemInstance};
use crate::subdivision::{enumerate_markings, irreducible, Marking, Subdivision, SubdivisionContext};

#[derive(Clone, Debug)]
pub struct CountOptions {
    /// Worker threads; 0 lets rayon choose.
    pub threads: usize,
    pub include_contributions: bool,
    pub max_paths: Option<u128>,
    pub max_subdivisions: Option<usize>,
    /// Added to the exact sum before the integrality check. Only useful for
    /// exercising that check.
    pub perturbation: Option<BigRational>,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            include_contributions: true,
            max_paths: None,
            max_subdivisions: None,
            perturbation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contribution {
    pub path: LambdaPath,
    pub subdivision: Subdivision,
    /// Absent in nodal mode.
    pub marking: Option<Marking>,
    pub multiplicity: Multiplicity,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountStats {
    pub paths_scanned: u64,
    pub subdivisions_emitted: u64,
    /// Subdivisions rejected for being dual to a disconnected curve.
    pub reducible_rejected: u64,
    /// Admissible subdivisions with a special tile that also have an inter-tile
    /// edge of length at least 3; only the tile is marked.
    pub special_with_long_edge: u64,
    /// Marked edges that are not vertical.
    pub non_vertical_marked_edges: u64,
    pub shards: u64,
    pub threads: u64,
    pub wall_time_ms: u64,
}

impl CountStats {
    fn absorb(&mut self, other: &CountStats) {
        self.paths_scanned += other.paths_scanned;
        self.subdivisions_emitted += other.subdivisions_emitted;
        self.reducible_rejected += other.reducible_rejected;
        self.special_with_long_edge += other.special_with_long_edge;
        self.non_vertical_marked_edges += other.non_vertical_marked_edges;
    }
}

#[derive(Clone, Debug)]
pub struct CountResult {
    pub instance: ProblemInstance,
    pub total: BigInt,
    pub contributions: Vec<Contribution>,
    pub stats: CountStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("path limit exceeded: {count} paths of length {n}, limit {limit}")]
    PathLimit { count: String, n: u64, limit: u128 },
    #[error("subdivision limit exceeded: more than {0} admissible subdivisions")]
    SubdivisionLimit(usize),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}

impl CountError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CountError::PathLimit { .. } | CountError::SubdivisionLimit(_) => 3,
            CountError::Invariant(_) | CountError::ThreadPool(_) => 4,
        }
    }
}

impl From<MultiplicityError> for CountError {
    fn from(e: MultiplicityError) -> Self {
        CountError::Invariant(e.to_string())
    }
}

/// The exact sum as an integer, or an invariant error naming the fraction.
pub fn integral_total(sum: &BigRational) -> Result<BigInt, CountError> {
    if !sum.is_integer() {
        return Err(CountError::Invariant(format!("total {sum} is not an integer")));
    }
    if sum < &BigRational::zero() {
        return Err(CountError::Invariant(format!("total {sum} is negative")));
    }
    Ok(sum.to_integer())
}

struct ShardOutput {
    sum: BigRational,
    contributions: Vec<Contribution>,
    stats: CountStats,
}

struct Worker<'a> {
    ctx: &'a SubdivisionContext,
    mode: Mode,
    keep: bool,
    emitted: &'a AtomicUsize,
    max_subdivisions: Option<usize>,
}

impl Worker<'_> {
    fn process_path(&self, path: LambdaPath, out: &mut ShardOutput) -> Result<(), CountError> {
        out.stats.paths_scanned += 1;
        let cuspidal = self.mode == Mode::Cuspidal;
        for sub in self.ctx.run_recursion(&path.points, cuspidal) {
            if !self.ctx.check_admissible(&sub, self.mode).is_admissible() {
                continue;
            }
            if !irreducible(&sub) {
                out.stats.reducible_rejected += 1;
                continue;
            }
            out.stats.subdivisions_emitted += 1;
            let seen = self.emitted.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(limit) = self.max_subdivisions {
                if seen > limit {
                    return Err(CountError::SubdivisionLimit(limit));
                }
            }
            if !cuspidal {
                let mu = severi_multiplicity(&sub)?;
                self.push(out, &path, sub, None, mu);
                continue;
            }
            if sub.special.is_some() && !sub.long_edges().is_empty() {
                out.stats.special_with_long_edge += 1;
            }
            for ms in enumerate_markings(&sub) {
                if let Marking::Edge(LatticeSegment { a, b }) = ms.marking {
                    if a.x != b.x {
                        out.stats.non_vertical_marked_edges += 1;
                    }
                }
                let mu = cuspidal_multiplicity(&ms)?;
                self.push(out, &path, ms.base, Some(ms.marking), mu);
            }
        }
        Ok(())
    }

    fn push(
        &self,
        out: &mut ShardOutput,
        path: &LambdaPath,
        subdivision: Subdivision,
        marking: Option<Marking>,
        multiplicity: Multiplicity,
    ) {
        out.sum += multiplicity.value();
        if self.keep {
            out.contributions.push(Contribution { path: path.clone(), subdivision, marking, multiplicity });
        }
    }
}

/// Contiguous `[start, end)` ranges covering `0..total`.
fn shard_bounds(total: u128, shards: u128) -> Vec<(u128, u128)> {
    let shards = shards.clamp(1, total.max(1));
    let size = total.div_ceil(shards).max(1);
    (0..shards)
        .map(|i| (i * size, ((i + 1) * size).min(total)))
        .filter(|(s, e)| s < e)
        .collect()
}

pub fn count(instance: &ProblemInstance, options: &CountOptions) -> Result<CountResult, CountError> {
    let started = Instant::now();
    let paths = LambdaPaths::new(&instance.polygon, instance.n);
    let total_paths = paths.count();
    if let Some(limit) = options.max_paths {
        if total_paths.is_none_or(|c| c > limit) {
            let count = total_paths.map_or_else(|| "more than 2^128".to_string(), |c| c.to_string());
            return Err(CountError::PathLimit { count, n: instance.n, limit });
        }
    }
    let total_paths = total_paths.ok_or_else(|| CountError::PathLimit {
        count: "more than 2^128".into(),
        n: instance.n,
        limit: u128::MAX,
    })?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| CountError::ThreadPool(e.to_string()))?;
    let threads = pool.current_num_threads();
    let bounds = shard_bounds(total_paths, threads as u128 * 8);

    let ctx = SubdivisionContext::new(&instance.polygon);
    let emitted = AtomicUsize::new(0);
    let worker = Worker {
        ctx: &ctx,
        mode: instance.mode,
        keep: options.include_contributions,
        emitted: &emitted,
        max_subdivisions: options.max_subdivisions,
    };
    let shards: Vec<Result<ShardOutput, CountError>> = pool.install(|| {
        bounds
            .par_iter()
            .map(|&(start, end)| {
                let mut out = ShardOutput {
                    sum: BigRational::zero(),
                    contributions: Vec::new(),
                    stats: CountStats::default(),
                };
                for path in paths.range(start, end) {
                    worker.process_path(path, &mut out)?;
                }
                Ok(out)
            })
            .collect()
    });

    let mut sum = BigRational::zero();
    let mut contributions = Vec::new();
    let mut stats = CountStats::default();
    for shard in shards {
        let shard = shard?;
        sum += shard.sum;
        contributions.extend(shard.contributions);
        stats.absorb(&shard.stats);
    }
    if let Some(p) = &options.perturbation {
        sum += p;
    }
    let total = integral_total(&sum)?;
    stats.shards = bounds.len() as u64;
    stats.threads = threads as u64;
    stats.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(CountResult { instance: instance.clone(), total, contributions, stats })
}
