//! The λ-order on lattice points and enumeration of λ-paths.
//!
//! The functional `x - eps*y` with infinitesimal `eps` is never evaluated. Its
//! order is the lexicographic one (`x` ascending, then `y` descending), and the
//! side of a point relative to a λ-increasing segment is the sign of an integer
//! cross product, which is the `eps -> 0` limit of the side with respect to
//! `eps*x + y`.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{lattice_points, orient, LatticePoint, LatticePolygon};

/// `p` strictly precedes `q` in the λ-order.
pub fn lambda_less(p: LatticePoint, q: LatticePoint) -> bool {
    lambda_cmp(&p, &q) == Ordering::Less
}

pub fn lambda_cmp(p: &LatticePoint, q: &LatticePoint) -> Ordering {
    p.x.cmp(&q.x).then(q.y.cmp(&p.y))
}

/// Position of a point relative to a λ-increasing directed segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
    On,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
            Side::On => Side::On,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("segment endpoints {0} and {1} are not λ-increasing")]
    NotIncreasing(LatticePoint, LatticePoint),
}

/// Side of `p` with respect to the line through `u -> w`, where `u ≺ w`.
pub fn side_of(u: LatticePoint, w: LatticePoint, p: LatticePoint) -> Result<Side, PathError> {
    if !lambda_less(u, w) {
        return Err(PathError::NotIncreasing(u, w));
    }
    Ok(side_unchecked(u, w, p))
}

pub(crate) fn side_unchecked(u: LatticePoint, w: LatticePoint, p: LatticePoint) -> Side {
    match orient(u, w, p).signum() {
        1 => Side::Plus,
        -1 => Side::Minus,
        _ => Side::On,
    }
}

/// A λ-monotone broken line from the λ-least to the λ-greatest lattice point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LambdaPath {
    pub points: Vec<LatticePoint>,
}

impl LambdaPath {
    pub fn len(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_lambda_increasing(&self) -> bool {
        self.points.windows(2).all(|w| lambda_less(w[0], w[1]))
    }
}

/// Lattice points of a polygon in λ-order together with an index lookup.
#[derive(Clone, Debug)]
pub struct LambdaOrder {
    points: Vec<LatticePoint>,
    index: HashMap<LatticePoint, usize>,
}

impl LambdaOrder {
    pub fn new(polygon: &LatticePolygon) -> Self {
        let mut points = lattice_points(polygon);
        points.sort_by(lambda_cmp);
        let index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        Self { points, index }
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn index_of(&self, p: LatticePoint) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn min(&self) -> LatticePoint {
        self.points[0]
    }

    pub fn max(&self) -> LatticePoint {
        *self.points.last().unwrap()
    }
}

/// Binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// All λ-paths of a fixed length in a polygon, in lexicographic order of their
/// point sequences (points compared in λ-order).
///
/// A path is fixed by which of the `N - 2` non-extremal lattice points it
/// visits, so the paths of length `n` are the `(n - 1)`-subsets of those points
/// and the canonical order is the lexicographic order of index combinations.
/// Any index range of that order can be produced on its own.
#[derive(Clone, Debug)]
pub struct LambdaPaths {
    order: LambdaOrder,
    n: u64,
}

impl LambdaPaths {
    pub fn new(polygon: &LatticePolygon, n: u64) -> Self {
        Self { order: LambdaOrder::new(polygon), n }
    }

    pub fn order(&self) -> &LambdaOrder {
        &self.order
    }

    /// Whether `1 <= n <= N - 1` for the polygon's `N` lattice points.
    pub fn length_in_range(&self) -> bool {
        self.n >= 1 && self.n < self.order.points.len() as u64
    }

    /// Number of paths; `None` if it overflows `u128`.
    pub fn count(&self) -> Option<u128> {
        if !self.length_in_range() {
            return Some(0);
        }
        let inner = self.order.points.len() as u64 - 2;
        binomial(inner, self.n - 1)
    }

    /// Paths with canonical index in `start..end`.
    pub fn range(&self, start: u128, end: u128) -> PathRange<'_> {
        let total = self.count().unwrap_or(u128::MAX);
        let end = end.min(total);
        let combo = (start < end).then(|| self.unrank(start));
        PathRange { paths: self, combo, remaining: end.saturating_sub(start) }
    }

    pub fn iter(&self) -> PathRange<'_> {
        self.range(0, u128::MAX)
    }

    fn inner_len(&self) -> u64 {
        self.order.points.len() as u64 - 2
    }

    /// The `rank`-th `(n - 1)`-combination of `0..inner_len` in lexicographic order.
    fn unrank(&self, mut rank: u128) -> Vec<usize> {
        let m = self.inner_len();
        let k = self.n - 1;
        let mut combo = Vec::with_capacity(k as usize);
        let mut next = 0u64;
        for slot in 0..k {
            loop {
                // Combinations whose `slot` entry equals `next`.
                let block = binomial(m - next - 1, k - slot - 1).unwrap_or(u128::MAX);
                if rank < block {
                    break;
                }
                rank -= block;
                next += 1;
            }
            combo.push(next as usize);
            next += 1;
        }
        combo
    }

    fn path_of(&self, combo: &[usize]) -> LambdaPath {
        let mut points = Vec::with_capacity(combo.len() + 2);
        points.push(self.order.min());
        points.extend(combo.iter().map(|&i| self.order.points[i + 1]));
        points.push(self.order.max());
        LambdaPath { points }
    }
}

pub struct PathRange<'a> {
    paths: &'a LambdaPaths,
    combo: Option<Vec<usize>>,
    remaining: u128,
}

impl Iterator for PathRange<'_> {
    type Item = LambdaPath;

    fn next(&mut self) -> Option<LambdaPath> {
        if self.remaining == 0 {
            return None;
        }
        let combo = self.combo.as_mut()?;
        let path = self.paths.path_of(combo);
        self.remaining -= 1;
        if self.remaining > 0 {
            let m = self.paths.inner_len() as usize;
            let k = combo.len();
            let mut i = k;
            while i > 0 && combo[i - 1] == m - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                self.remaining = 0;
            } else {
                combo[i - 1] += 1;
                for j in i..k {
                    combo[j] = combo[j - 1] + 1;
                }
            }
        }
        Some(path)
    }
}

/// Convenience wrapper collecting every path of length `n`.
pub fn enumerate_lambda_paths(polygon: &LatticePolygon, n: u64) -> Vec<LambdaPath> {
    LambdaPaths::new(polygon, n).iter().collect()
}
