//! Grouping the maximal-genus cuspidal count on the degree-`d` triangle by the
//! pair of lattice points its paths skip.
//!
//! At genus `p_a - 1` every path misses exactly two lattice points of the
//! triangle, and the admissible configurations fall into five families:
//!
//! * (a) `(i,j), (i,j+1)` with `1 <= i <= d-3`, `1 <= j <= d-i-2`
//! * (b) `(i,d-i), (i,d-i-1)` with `1 <= i <= d-2`
//! * (c) `(i,0), (i,1)` with `1 <= i <= d-4`
//! * (d) `(i,0), (i,1)` with `i` in `{d-3, d-2}`
//! * (e) `(i,j)` together with `(i+1,d-i-1)` or `(i-1,0)`, where
//!   `1 <= i <= d-2`, `1 <= j <= d-i-1`

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::count::CountResult;
use crate::lattice::{lattice_points, LatticePoint};
use crate::problem::{parse_polygon_spec, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    Other,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::A, Family::B, Family::C, Family::D, Family::E, Family::Other];

    pub fn label(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::C => "c",
            Family::D => "d",
            Family::E => "e",
            Family::Other => "other",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("result is not a cuspidal count on triangle:{0} at genus {1}")]
    WrongInstance(u64, u64),
    #[error("contributions were not recorded")]
    NoContributions,
    #[error("path misses {0} lattice points, expected 2")]
    MissingCount(usize),
}

/// Family of an unordered pair of skipped points on the degree-`d` triangle.
pub fn classify_missing_pair(d: i64, p: LatticePoint, q: LatticePoint) -> Family {
    let same_column = p.x == q.x && (p.y - q.y).abs() == 1;
    let (lo, hi) = if p.y < q.y { (p, q) } else { (q, p) };
    let i = lo.x;
    if same_column {
        let j = lo.y;
        if hi.y == d - i && (1..=d - 2).contains(&i) {
            return Family::B;
        }
        if j == 0 && (1..=d - 4).contains(&i) {
            return Family::C;
        }
        if j == 0 && i >= 1 && (i == d - 3 || i == d - 2) {
            return Family::D;
        }
        if (1..=d - 3).contains(&i) && (1..=d - i - 2).contains(&j) {
            return Family::A;
        }
        return Family::Other;
    }
    let inner = |a: LatticePoint| (1..=d - 2).contains(&a.x) && (1..=d - a.x - 1).contains(&a.y);
    for (a, b) in [(p, q), (q, p)] {
        if inner(a) && (b == LatticePoint::new(a.x + 1, d - a.x - 1) || b == LatticePoint::new(a.x - 1, 0)) {
            return Family::E;
        }
    }
    Family::Other
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyRow {
    pub family: Family,
    pub contributions: usize,
    #[serde(serialize_with = "ser_rational")]
    pub subtotal: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyTable {
    pub d: u64,
    pub rows: Vec<FamilyRow>,
    #[serde(serialize_with = "ser_int")]
    pub total: BigInt,
}

impl FamilyTable {
    pub fn subtotal(&self, family: Family) -> &BigRational {
        &self.rows.iter().find(|r| r.family == family).expect("every family has a row").subtotal
    }
}

fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_int<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn decompose_families(result: &CountResult, d: u64) -> Result<FamilyTable, FamilyError> {
    let inst = &result.instance;
    let triangle = parse_polygon_spec(&format!("triangle:{d}")).map_err(|_| FamilyError::WrongInstance(d, inst.genus))?;
    if d < 3 || inst.mode != Mode::Cuspidal || inst.polygon != triangle || inst.genus + 1 != inst.pa {
        return Err(FamilyError::WrongInstance(d, inst.genus));
    }
    if result.contributions.is_empty() && !result.total.is_zero() {
        return Err(FamilyError::NoContributions);
    }
    let all = lattice_points(&triangle);
    let mut sums: BTreeMap<Family, (usize, BigRational)> =
        Family::ALL.iter().map(|&f| (f, (0, BigRational::zero()))).collect();
    for c in &result.contributions {
        let missing: Vec<LatticePoint> = all.iter().copied().filter(|p| !c.path.points.contains(p)).collect();
        if missing.len() != 2 {
            return Err(FamilyError::MissingCount(missing.len()));
        }
        let family = classify_missing_pair(d as i64, missing[0], missing[1]);
        let entry = sums.get_mut(&family).expect("initialized");
        entry.0 += 1;
        entry.1 += c.multiplicity.value();
    }
    let rows = sums
        .into_iter()
        .map(|(family, (contributions, subtotal))| FamilyRow { family, contributions, subtotal })
        .collect();
    Ok(FamilyTable { d, rows, total: result.total.clone() })
}
