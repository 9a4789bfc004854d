//! Closed-form multiplicity factors of the cuspidal tropical fragments.
//!
//! The staircase polygons `sigma(p, q, n)` feed the elliptic-edge weight
//! `theta(m)`. The remaining functions are direct rational formulas in the
//! edge weights around a fragment.
//!
//! Reading of the even `theta` formula: the printed expression carries a stray
//! opening bracket; it is evaluated here as
//! `theta(2k) = 4k * (<sigma23(k-2), sigma23(k-1)> + <sigma12(k-1), sigma12(k)>)`.
//! Only `theta(3)` is pinned by published values, so larger weights rely on this
//! reading.

use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{convex_hull, cross, mixed_area, LatticePoint, LatticePolygon, LatticeVector};

/// The five local patterns that can carry the cusp of a tropical curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FragmentKind {
    /// Four-valent vertex dual to a quadrangle without parallel sides.
    AQuadrangle,
    /// Flat trivalent vertex, dual to a trapeze after modification.
    BFlatVertex,
    /// Edge of genus one.
    CEllipticEdge,
    /// Flat cycle.
    DFlatCycle,
    /// Trivalent vertex of genus one.
    EEllipticVertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("staircase polygon needs 1 <= p <= q, got p = {p}, q = {q}")]
    BadStaircase { p: u32, q: u32 },
    #[error("edge vectors {0} and {1} are parallel; the fragment has no curves")]
    Parallel(LatticeVector, LatticeVector),
    #[error("zero edge vector")]
    ZeroVector,
    #[error("weight must be positive")]
    ZeroWeight,
    #[error("total weight {m} differs from {m1} + {m2}")]
    WeightMismatch { m: u64, m1: u64, m2: u64 },
    #[error("reduced vertex multiplicity {mu} is below the cycle weight {m}")]
    MultiplicityBelowWeight { mu: u64, m: u64 },
    #[error("{0:?} fragments have no combinatorial multiplicity formula")]
    Unsupported(FragmentKind),
    #[error("theta({0}) evaluated to a non-integer")]
    NonIntegralTheta(u32),
}

/// `conv{(i, j) : i, j >= 0, p*i + q*j <= n}`; `None` when `n < 0`.
pub fn sigma_polygon(p: u32, q: u32, n: i64) -> Result<Option<LatticePolygon>, FactorError> {
    if p == 0 || p > q {
        return Err(FactorError::BadStaircase { p, q });
    }
    if n < 0 {
        return Ok(None);
    }
    let (p, q) = (p as i64, q as i64);
    let pts: Vec<LatticePoint> = (0..=n / p)
        .flat_map(|i| (0..=(n - p * i) / q).map(move |j| LatticePoint::new(i, j)))
        .collect();
    Ok(Some(convex_hull(&pts).expect("origin is always present")))
}

fn sigma(p: u32, q: u32, n: i64) -> LatticePolygon {
    sigma_polygon(p, q, n)
        .expect("valid staircase parameters")
        .expect("nonnegative staircase index")
}

/// Memoized `theta` values, shareable across threads.
#[derive(Debug, Default)]
pub struct ThetaTable {
    memo: Mutex<HashMap<u32, u64>>,
}

impl ThetaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, m: u32) -> Result<u64, FactorError> {
        if let Some(&v) = self.memo.lock().unwrap().get(&m) {
            return Ok(v);
        }
        let v = theta_uncached(m)?;
        self.memo.lock().unwrap().insert(m, v);
        Ok(v)
    }
}

static THETA: LazyLock<ThetaTable> = LazyLock::new(ThetaTable::new);

/// Number of elliptic curves with one cusp in the fragment of an edge of weight `m`.
pub fn theta(m: u32) -> Result<u64, FactorError> {
    THETA.get(m)
}

fn theta_uncached(m: u32) -> Result<u64, FactorError> {
    let value = match m {
        0 => return Err(FactorError::ZeroWeight),
        1 | 2 => BigRational::zero(),
        3 => BigRational::from_integer(2.into()),
        _ if m % 2 == 1 => {
            let k = (m / 2) as i64;
            let a = mixed_area(&sigma(2, 3, k), &sigma(2, 3, k + 1));
            let b = mixed_area(&sigma(1, 2, k - 1), &sigma(1, 2, k));
            BigRational::from_integer((2 * m).into()) * (a + b)
        }
        _ => {
            let k = (m / 2) as i64;
            let a = mixed_area(&sigma(2, 3, k - 2), &sigma(2, 3, k - 1));
            let b = mixed_area(&sigma(1, 2, k - 1), &sigma(1, 2, k));
            BigRational::from_integer((4 * k).into()) * (a + b)
        }
    };
    if !value.is_integer() {
        return Err(FactorError::NonIntegralTheta(m));
    }
    value
        .to_integer()
        .to_u64()
        .ok_or(FactorError::NonIntegralTheta(m))
}

/// Four-valent vertex factor `|a ^ b|`.
pub fn quad_factor(a: LatticeVector, b: LatticeVector) -> Result<u64, FactorError> {
    if a.is_zero() || b.is_zero() {
        return Err(FactorError::ZeroVector);
    }
    match cross(a, b).unsigned_abs() {
        0 => Err(FactorError::Parallel(a, b)),
        v => Ok(v as u64),
    }
}

/// Orientation of a flat trivalent vertex fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlatVertexCase {
    Upper,
    Middle,
    Lower,
}

/// Flat-vertex factor with `m = m1 + m2`.
pub fn flat_vertex_factor(m1: u64, m2: u64, case: FlatVertexCase) -> Result<BigRational, FactorError> {
    if m1 == 0 || m2 == 0 {
        return Err(FactorError::ZeroWeight);
    }
    let m = m1 + m2;
    let r = |n: u64, d: u64| BigRational::new(BigInt::from(n), BigInt::from(d));
    Ok(match case {
        FlatVertexCase::Upper => r((m + m2) * m1, m * m2),
        FlatVertexCase::Middle => r(m + m2, m),
        FlatVertexCase::Lower => r(m + m2, m2),
    })
}

/// Genus-one edge factor `theta(m) / m`.
pub fn elliptic_edge_factor(m: u32) -> Result<BigRational, FactorError> {
    let t = theta(m)?;
    Ok(BigRational::new(BigInt::from(t), BigInt::from(m)))
}

/// Flat-cycle factor. Not used by the lattice path count, which never meets
/// flat cycles on h-transversal polygons.
///
/// For unequal side weights the smaller one plays `m1`. For equal weights the
/// `special_even_case` flag selects the exceptional branch, which only applies
/// when `m % 4 == 2`.
pub fn flat_cycle_factor(
    mu_reduced: u64,
    m: u64,
    m1: u64,
    m2: u64,
    special_even_case: bool,
) -> Result<BigRational, FactorError> {
    if m1 == 0 || m2 == 0 {
        return Err(FactorError::ZeroWeight);
    }
    if m != m1 + m2 {
        return Err(FactorError::WeightMismatch { m, m1, m2 });
    }
    if mu_reduced < m {
        return Err(FactorError::MultiplicityBelowWeight { mu: mu_reduced, m });
    }
    let mu = BigInt::from(mu_reduced);
    let mb = BigInt::from(m);
    if m1 != m2 {
        let (small, large) = (BigInt::from(m1.min(m2)), BigInt::from(m1.max(m2)));
        let num = &mu * (&mu - &mb) * (&mb + large) * small;
        return Ok(BigRational::new(num, &mb * &mb));
    }
    let three_eighths = BigRational::new(3.into(), 8.into());
    let shift = if special_even_case && m % 4 == 2 {
        &mb + BigInt::from(2)
    } else {
        mb
    };
    Ok(three_eighths * BigRational::from_integer(&mu * (&mu - shift)))
}

/// Genus-one vertex fragments depend on stratum multiplicities that have no
/// closed form here; always an error.
pub fn elliptic_vertex_factor() -> Result<BigRational, FactorError> {
    Err(FactorError::Unsupported(FragmentKind::EEllipticVertex))
}

#[cfg(test)]
fn ratio(n: i64, d: i64) -> BigRational {
    if d == 1 {
        return BigRational::from_integer(n.into());
    }
    BigRational::new(n.into(), d.into())
}
