//! Growing marked admissible subdivisions from a λ-path.
//!
//! Starting from a path `pi0`, the plus phase repeatedly picks the first vertex
//! `v_k` lying strictly below the shortcut `[v_{k-1}, v_{k+1}]` and replaces it
//! (dropping it, or swapping in a new vertex above the shortcut), adding one
//! tile per step; the minus phase does the same downward. A run survives when
//! the plus path ends on the upper boundary chain and the minus path on the
//! lower one, with every boundary lattice point used as a vertex. Between them
//! the two phases may add at most one tile that is neither a triangle nor a
//! parallelogram.
//!
//! Both phases only depend on `pi0`, so they are enumerated separately and
//! paired afterwards under the shared budget for special tiles.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{
    boundary_lattice_points, convex_hull, lattice_area, LatticePoint, LatticePolygon,
    LatticeSegment, LatticeVector,
};
use crate::path::{lambda_cmp, lambda_less, side_unchecked, LambdaOrder, Side};
use crate::problem::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TileKind {
    Triangle,
    Parallelogram,
    QuadNoParallel,
    Trapeze,
}

impl TileKind {
    pub fn is_special(self) -> bool {
        matches!(self, TileKind::QuadNoParallel | TileKind::Trapeze)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TileKind::Triangle => "triangle",
            TileKind::Parallelogram => "parallelogram",
            TileKind::QuadNoParallel => "quadrangle",
            TileKind::Trapeze => "trapeze",
        }
    }
}

/// The recursion step that produced a tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub side: Side,
    pub step: usize,
    pub prev: LatticePoint,
    pub pivot: LatticePoint,
    pub next: LatticePoint,
    /// The vertex that replaced `pivot` in the path, absent for triangles.
    pub replacement: Option<LatticePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tile {
    pub kind: TileKind,
    /// Counterclockwise, starting from the lexicographically least vertex.
    pub vertices: Vec<LatticePoint>,
    pub provenance: Provenance,
}

impl Tile {
    pub fn polygon(&self) -> LatticePolygon {
        convex_hull(&self.vertices).expect("tile vertices are valid")
    }

    pub fn area(&self) -> u64 {
        lattice_area(&self.polygon())
    }

    pub fn sides(&self) -> Vec<LatticeSegment> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| LatticeSegment::new(self.vertices[i], self.vertices[(i + 1) % n]))
            .collect()
    }

    /// Pairs of opposite parallel sides, as side indices.
    pub fn parallel_side_pairs(&self) -> Vec<(usize, usize)> {
        if self.vertices.len() != 4 {
            return Vec::new();
        }
        let e: Vec<LatticeVector> = self.sides().iter().map(|s| s.b - s.a).collect();
        [(0, 2), (1, 3)]
            .into_iter()
            .filter(|&(i, j)| e[i].is_parallel(e[j]))
            .collect()
    }
}

/// A tiling produced by the two recursion phases.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subdivision {
    pub tiles: Vec<Tile>,
    /// Index of the unique quadrangle-without-parallel-sides or trapeze tile.
    pub special: Option<usize>,
}

impl Subdivision {
    fn from_tiles(tiles: Vec<Tile>) -> Self {
        let special = tiles.iter().position(|t| t.kind.is_special());
        Self { tiles, special }
    }

    /// Sorted list of sorted tile vertex lists; equal keys mean equal tilings.
    pub fn canonical_key(&self) -> Vec<Vec<LatticePoint>> {
        let mut key: Vec<Vec<LatticePoint>> = self
            .tiles
            .iter()
            .map(|t| {
                let mut v = t.vertices.clone();
                v.sort();
                v
            })
            .collect();
        key.sort();
        key
    }

    pub fn special_count(&self) -> usize {
        self.tiles.iter().filter(|t| t.kind.is_special()).count()
    }

    /// Every positive-length contact between two tiles.
    pub fn adjacencies(&self) -> Vec<Adjacency> {
        let sides: Vec<Vec<LatticeSegment>> = self.tiles.iter().map(Tile::sides).collect();
        let mut out = Vec::new();
        for a in 0..self.tiles.len() {
            for b in a + 1..self.tiles.len() {
                for (sa, seg_a) in sides[a].iter().enumerate() {
                    for (sb, seg_b) in sides[b].iter().enumerate() {
                        if let Some(segment) = seg_a.overlap(seg_b) {
                            out.push(Adjacency { tiles: (a, b), sides: (sa, sb), segment });
                        }
                    }
                }
            }
        }
        out
    }

    /// Distinct inter-tile segments of lattice length at least 3, sorted.
    pub fn long_edges(&self) -> Vec<LatticeSegment> {
        let set: BTreeSet<LatticeSegment> = self
            .adjacencies()
            .into_iter()
            .map(|a| a.segment)
            .filter(|s| s.lattice_length() >= 3)
            .collect();
        set.into_iter().collect()
    }
}

/// Two tiles touching along `segment`, lying on side `sides.0` of the first
/// and side `sides.1` of the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adjacency {
    pub tiles: (usize, usize),
    pub sides: (usize, usize),
    pub segment: LatticeSegment,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Marking {
    /// Index of the special tile.
    Tile(usize),
    /// An inter-tile segment of lattice length at least 3.
    Edge(LatticeSegment),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSubdivision {
    pub base: Subdivision,
    pub marking: Marking,
}

/// Branch taken at a pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Choice {
    /// Drop the pivot, adding a triangle.
    Drop,
    /// Reflect the pivot through the shortcut midpoint, adding a parallelogram.
    Parallelogram,
    /// Replace the pivot by the given point, adding a special quadrangle.
    Special(LatticePoint),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialBudget {
    Available,
    Spent,
    Forbidden,
}

/// One phase in progress.
#[derive(Clone, Debug)]
pub struct RecursionState {
    pub path: Vec<LatticePoint>,
    pub side: Side,
    pub tiles: Vec<Tile>,
    pub budget: SpecialBudget,
    pub choices: Vec<Choice>,
}

impl RecursionState {
    pub fn new(pi0: &[LatticePoint], side: Side, special_allowed: bool) -> Self {
        Self {
            path: pi0.to_vec(),
            side,
            tiles: Vec::new(),
            budget: if special_allowed { SpecialBudget::Available } else { SpecialBudget::Forbidden },
            choices: Vec::new(),
        }
    }
}

/// A completed phase.
#[derive(Clone, Debug)]
pub struct PhaseOutcome {
    pub tiles: Vec<Tile>,
    pub choices: Vec<Choice>,
    pub special: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("path is terminal after {0} steps but more choices were recorded")]
    Terminal(usize),
    #[error("choice {1:?} at step {0} is not available")]
    Unavailable(usize, Choice),
    #[error("path is not terminal after replaying all choices")]
    Unfinished,
}

/// Per-polygon data shared by all recursions. Immutable once built.
#[derive(Clone, Debug)]
pub struct SubdivisionContext {
    pub polygon: LatticePolygon,
    pub order: LambdaOrder,
    /// Boundary lattice points from the λ-least to the λ-greatest point along
    /// the upper side of the polygon, in λ-order.
    pub upper_chain: Vec<LatticePoint>,
    /// Same along the lower side.
    pub lower_chain: Vec<LatticePoint>,
    pub boundary: HashSet<LatticePoint>,
    pub area: u64,
}

impl SubdivisionContext {
    pub fn new(polygon: &LatticePolygon) -> Self {
        let order = LambdaOrder::new(polygon);
        let boundary_ccw = boundary_lattice_points(polygon);
        let start = boundary_ccw.iter().position(|&p| p == order.min()).expect("λ-min is on the boundary");
        let mut rotated: Vec<LatticePoint> = boundary_ccw[start..].to_vec();
        rotated.extend_from_slice(&boundary_ccw[..start]);
        let split = rotated.iter().position(|&p| p == order.max()).expect("λ-max is on the boundary");
        let lower_chain = rotated[..=split].to_vec();
        let mut upper_chain: Vec<LatticePoint> = rotated[split..].to_vec();
        upper_chain.push(order.min());
        upper_chain.reverse();
        debug_assert!(lower_chain.windows(2).all(|w| lambda_less(w[0], w[1])));
        debug_assert!(upper_chain.windows(2).all(|w| lambda_less(w[0], w[1])));
        Self {
            polygon: polygon.clone(),
            boundary: boundary_ccw.into_iter().collect(),
            area: lattice_area(polygon),
            order,
            upper_chain,
            lower_chain,
        }
    }

    fn target_chain(&self, side: Side) -> &[LatticePoint] {
        match side {
            Side::Plus => &self.upper_chain,
            _ => &self.lower_chain,
        }
    }

    /// Smallest `k >= from` with `v_k` strictly on the far side of the shortcut
    /// `[v_{k-1}, v_{k+1}]`; `None` when the path is terminal.
    pub fn find_pivot_from(&self, path: &[LatticePoint], side: Side, from: usize) -> Option<usize> {
        let want = side.opposite();
        (from.max(1)..path.len().saturating_sub(1))
            .find(|&k| side_unchecked(path[k - 1], path[k + 1], path[k]) == want)
    }

    pub fn find_pivot(&self, state: &RecursionState) -> Option<usize> {
        self.find_pivot_from(&state.path, state.side, 1)
    }

    /// Every legal continuation at pivot `k`, in the order (a), (b), then
    /// special tiles by λ-order of the new vertex.
    pub fn step_candidates(&self, state: &RecursionState, k: usize) -> Vec<(Choice, Tile, Vec<LatticePoint>)> {
        let (prev, pivot, next) = (state.path[k - 1], state.path[k], state.path[k + 1]);
        let step = state.tiles.len();
        let prov = |replacement| Provenance { side: state.side, step, prev, pivot, next, replacement };
        let replaced = |q: LatticePoint| {
            let mut p = state.path.clone();
            p[k] = q;
            p
        };
        let mut out = Vec::with_capacity(2);

        let mut dropped = state.path.clone();
        dropped.remove(k);
        out.push((
            Choice::Drop,
            Tile {
                kind: TileKind::Triangle,
                vertices: convex_hull(&[prev, pivot, next]).unwrap().vertices().to_vec(),
                provenance: prov(None),
            },
            dropped,
        ));

        let reflected = prev + (next - pivot);
        if self.polygon.contains(reflected) {
            out.push((
                Choice::Parallelogram,
                Tile {
                    kind: TileKind::Parallelogram,
                    vertices: convex_hull(&[prev, pivot, next, reflected]).unwrap().vertices().to_vec(),
                    provenance: prov(Some(reflected)),
                },
                replaced(reflected),
            ));
        }

        if state.budget == SpecialBudget::Available {
            let lo = self.order.index_of(prev).expect("path point in polygon");
            let hi = self.order.index_of(next).expect("path point in polygon");
            for &q in &self.order.points()[lo + 1..hi] {
                if q == reflected || side_unchecked(prev, next, q) != state.side {
                    continue;
                }
                let Some(kind) = classify_quadrangle(prev, pivot, next, q) else { continue };
                out.push((
                    Choice::Special(q),
                    Tile {
                        kind,
                        vertices: convex_hull(&[prev, pivot, next, q]).unwrap().vertices().to_vec(),
                        provenance: prov(Some(q)),
                    },
                    replaced(q),
                ));
            }
        }
        out
    }

    /// A chain point that is not a path vertex must lie strictly on the
    /// phase's side of the path, or it can never become a vertex.
    fn is_dead(&self, path: &[LatticePoint], side: Side) -> bool {
        self.target_chain(side).iter().any(|&c| {
            let i = path.partition_point(|p| lambda_less(*p, c));
            if i < path.len() && path[i] == c {
                return false;
            }
            // path[0] is the λ-minimum, so 0 < i < path.len() here.
            side_unchecked(path[i - 1], path[i], c) != side
        })
    }

    /// All completions of one phase starting from `pi0`.
    pub fn run_phase(&self, pi0: &[LatticePoint], side: Side, special_allowed: bool) -> Vec<PhaseOutcome> {
        let mut out = Vec::new();
        let state = RecursionState::new(pi0, side, special_allowed);
        if !self.is_dead(&state.path, side) {
            self.grow(state, 1, &mut out);
        }
        out
    }

    fn grow(&self, state: RecursionState, from: usize, out: &mut Vec<PhaseOutcome>) {
        let Some(k) = self.find_pivot_from(&state.path, state.side, from) else {
            if state.path.as_slice() == self.target_chain(state.side) {
                out.push(PhaseOutcome {
                    special: state.budget == SpecialBudget::Spent,
                    tiles: state.tiles,
                    choices: state.choices,
                });
            }
            return;
        };
        for (choice, tile, path) in self.step_candidates(&state, k) {
            if self.is_dead(&path, state.side) {
                continue;
            }
            let mut child = RecursionState {
                budget: if tile.kind.is_special() { SpecialBudget::Spent } else { state.budget },
                path,
                side: state.side,
                tiles: state.tiles.clone(),
                choices: state.choices.clone(),
            };
            child.tiles.push(tile);
            child.choices.push(choice);
            self.grow(child, k - 1, out);
        }
    }

    /// Re-executes a recorded choice sequence for one phase.
    pub fn replay_phase(
        &self,
        pi0: &[LatticePoint],
        side: Side,
        choices: &[Choice],
    ) -> Result<Vec<Tile>, ReplayError> {
        let mut state = RecursionState::new(pi0, side, true);
        for (i, &choice) in choices.iter().enumerate() {
            let k = self.find_pivot(&state).ok_or(ReplayError::Terminal(i))?;
            let (_, tile, path) = self
                .step_candidates(&state, k)
                .into_iter()
                .find(|(c, _, _)| *c == choice)
                .ok_or(ReplayError::Unavailable(i, choice))?;
            if tile.kind.is_special() {
                state.budget = SpecialBudget::Spent;
            }
            state.tiles.push(tile);
            state.path = path;
            state.choices.push(choice);
        }
        if self.find_pivot(&state).is_some() {
            return Err(ReplayError::Unfinished);
        }
        Ok(state.tiles)
    }

    /// Every subdivision whose two phases terminate on the boundary chains,
    /// deduplicated and in canonical order.
    pub fn run_recursion(&self, pi0: &[LatticePoint], special_allowed: bool) -> Vec<Subdivision> {
        let plus = self.run_phase(pi0, Side::Plus, special_allowed);
        if plus.is_empty() {
            return Vec::new();
        }
        let minus = self.run_phase(pi0, Side::Minus, special_allowed);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in &plus {
            for m in &minus {
                if p.special && m.special {
                    continue;
                }
                let tiles: Vec<Tile> = p.tiles.iter().chain(&m.tiles).cloned().collect();
                let sub = Subdivision::from_tiles(tiles);
                if seen.insert(sub.canonical_key()) {
                    out.push(sub);
                }
            }
        }
        out.sort_by_cached_key(|s| s.canonical_key());
        out
    }

    pub fn check_admissible(&self, s: &Subdivision, mode: Mode) -> AdmissibilityReport {
        let covered: u64 = s.tiles.iter().map(Tile::area).sum();
        let vertices: HashSet<LatticePoint> = s.tiles.iter().flat_map(|t| t.vertices.iter().copied()).collect();
        let specials = s.special_count();
        let long_edge = mode == Mode::Severi || specials > 0 || !s.long_edges().is_empty();
        AdmissibilityReport {
            coverage: covered == self.area,
            boundary_vertices: self.boundary.iter().all(|b| vertices.contains(b)),
            special_count: specials <= if mode == Mode::Severi { 0 } else { 1 },
            long_edge,
        }
    }
}

/// Kind of the quadrangle with cyclic vertex order `prev, pivot, next, q`, or
/// `None` when the four points are not all extreme.
pub fn classify_quadrangle(
    prev: LatticePoint,
    pivot: LatticePoint,
    next: LatticePoint,
    q: LatticePoint,
) -> Option<TileKind> {
    let hull = convex_hull(&[prev, pivot, next, q]).ok()?;
    if hull.vertices().len() != 4 {
        return None;
    }
    let e = [pivot - prev, next - pivot, q - next, prev - q];
    // The hull must visit the points in the given cyclic order.
    let turns = (0..4).map(|i| crate::lattice::cross(e[i], e[(i + 1) % 4]).signum());
    let signs: BTreeSet<i128> = turns.collect();
    if signs.len() != 1 {
        return None;
    }
    let parallel = [e[0].is_parallel(e[2]), e[1].is_parallel(e[3])];
    Some(match parallel.iter().filter(|&&b| b).count() {
        0 => TileKind::QuadNoParallel,
        1 => TileKind::Trapeze,
        _ => TileKind::Parallelogram,
    })
}

/// Independent verdicts of the admissibility conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub coverage: bool,
    pub boundary_vertices: bool,
    pub special_count: bool,
    /// A long edge exists where one is required (cuspidal, no special tile).
    pub long_edge: bool,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.coverage && self.boundary_vertices && self.special_count && self.long_edge
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Whether the dual curve stays connected once every crossing dual to a
/// parallelogram is resolved into two strands.
///
/// Each non-parallelogram tile is one vertex of the dual graph. Each
/// parallelogram contributes two strands, one per pair of opposite sides.
/// Contacts between tiles join whatever occupies the touching sides. A strand
/// running from boundary to boundary through parallelograms only is a line
/// component of its own, so it counts as disconnected.
pub fn irreducible(s: &Subdivision) -> bool {
    let mut first = Vec::with_capacity(s.tiles.len());
    let mut count = 0;
    for t in &s.tiles {
        first.push(count);
        count += if t.kind == TileKind::Parallelogram { 2 } else { 1 };
    }
    if count == 0 {
        return true;
    }
    let element = |tile: usize, side: usize| {
        if s.tiles[tile].kind == TileKind::Parallelogram {
            first[tile] + side % 2
        } else {
            first[tile]
        }
    };
    let mut uf = UnionFind::new(count);
    for adj in s.adjacencies() {
        uf.union(element(adj.tiles.0, adj.sides.0), element(adj.tiles.1, adj.sides.1));
    }
    let root = uf.find(0);
    (1..count).all(|e| uf.find(e) == root)
}

/// The special tile if present, otherwise one marking per long edge.
pub fn enumerate_markings(s: &Subdivision) -> Vec<MarkedSubdivision> {
    let marks: Vec<Marking> = match s.special {
        Some(i) => vec![Marking::Tile(i)],
        None => s.long_edges().into_iter().map(Marking::Edge).collect(),
    };
    marks
        .into_iter()
        .map(|marking| MarkedSubdivision { base: s.clone(), marking })
        .collect()
}

/// λ-order comparison of two point sequences, for canonical sorting.
pub fn cmp_paths(a: &[LatticePoint], b: &[LatticePoint]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(p, q)| lambda_cmp(p, q))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}
