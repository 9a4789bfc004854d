//! Weights of marked subdivisions.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::factors::{elliptic_edge_factor, flat_vertex_factor, theta, FactorError, FlatVertexCase};
use crate::lattice::triangle_area;
use crate::subdivision::{MarkedSubdivision, Marking, Subdivision, TileKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiplicityError {
    #[error("marked tile {0} is not a quadrangle or trapeze")]
    BadMarkedTile(usize),
    #[error("marked tile {0} has no record of the step that produced it")]
    MissingProvenance(usize),
    #[error("nodal multiplicity requested for a subdivision with a special tile")]
    SpecialTile,
    #[error("edge of lattice length {0} exceeds the supported range")]
    EdgeTooLong(u64),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// Exact nonnegative rational weight, always kept reduced.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiplicity(pub BigRational);

impl Multiplicity {
    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn from_integer(n: u64) -> Self {
        Self(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Always `p/q`, with `q = 1` for integers.
    pub fn fraction_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

/// `p/q` in lowest terms, `q` omitted when it is 1.
impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.fraction_string())
    }
}

/// Product of the lattice areas of the triangles.
fn triangle_product(s: &Subdivision) -> BigInt {
    s.tiles
        .iter()
        .filter(|t| t.kind == TileKind::Triangle)
        .map(|t| BigInt::from(t.area()))
        .product()
}

pub fn severi_multiplicity(s: &Subdivision) -> Result<Multiplicity, MultiplicityError> {
    if s.tiles.iter().any(|t| t.kind.is_special()) {
        return Err(MultiplicityError::SpecialTile);
    }
    Ok(Multiplicity(BigRational::from_integer(triangle_product(s))))
}

pub fn cuspidal_multiplicity(ms: &MarkedSubdivision) -> Result<Multiplicity, MultiplicityError> {
    let base = BigRational::from_integer(triangle_product(&ms.base));
    let factor = match &ms.marking {
        Marking::Edge(seg) => {
            let m = seg.lattice_length();
            let m = u32::try_from(m).map_err(|_| MultiplicityError::EdgeTooLong(m))?;
            if theta(m)? == 0 {
                BigRational::zero()
            } else {
                elliptic_edge_factor(m)?
            }
        }
        Marking::Tile(i) => {
            let tile = &ms.base.tiles[*i];
            let prov = tile.provenance;
            if prov.replacement.is_none() {
                return Err(MultiplicityError::MissingProvenance(*i));
            }
            match tile.kind {
                TileKind::QuadNoParallel => {
                    BigRational::from_integer(triangle_area(prov.prev, prov.pivot, prov.next).into())
                }
                TileKind::Trapeze => {
                    let sides = tile.sides();
                    let (a, b) = *tile.parallel_side_pairs().first().ok_or(MultiplicityError::BadMarkedTile(*i))?;
                    let (long, short) = if sides[a].lattice_length() > sides[b].lattice_length() {
                        (&sides[a], &sides[b])
                    } else {
                        (&sides[b], &sides[a])
                    };
                    // The short base carries the weight that runs on past the
                    // flat vertex, so it plays m2 and the remainder plays m1.
                    let m2 = short.lattice_length();
                    let m1 = long.lattice_length() - m2;
                    let on_long = long.a == prov.pivot || long.b == prov.pivot;
                    let case = if on_long { FlatVertexCase::Lower } else { FlatVertexCase::Upper };
                    flat_vertex_factor(m1, m2, case)?
                }
                _ => return Err(MultiplicityError::BadMarkedTile(*i)),
            }
        }
    };
    Ok(Multiplicity(base * factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::quad_factor;
    use crate::lattice::{convex_hull, pt, LatticePoint, LatticeSegment};
    use crate::path::Side;
    use crate::subdivision::{Provenance, Tile};

    fn tile(kind: TileKind, pts: &[LatticePoint], triple: [LatticePoint; 3], replacement: Option<LatticePoint>) -> Tile {
        Tile {
            kind,
            vertices: convex_hull(pts).unwrap().vertices().to_vec(),
            provenance: Provenance {
                side: Side::Minus,
                step: 0,
                prev: triple[0],
                pivot: triple[1],
                next: triple[2],
                replacement,
            },
        }
    }

    fn tri(a: LatticePoint, b: LatticePoint, c: LatticePoint) -> Tile {
        tile(TileKind::Triangle, &[a, b, c], [a, b, c], None)
    }

    fn sub(tiles: Vec<Tile>) -> Subdivision {
        let special = tiles.iter().position(|t| t.kind.is_special());
        Subdivision { tiles, special }
    }

    fn marked(tiles: Vec<Tile>, marking: Marking) -> MarkedSubdivision {
        MarkedSubdivision { base: sub(tiles), marking }
    }

    fn q(n: i64, d: i64) -> Multiplicity {
        Multiplicity(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn marked_edge_between_area_three_triangles() {
        let e = LatticeSegment::new(pt(1, 0), pt(1, 3));
        let ms = marked(
            vec![
                tri(pt(0, 0), pt(1, 0), pt(1, 3)),
                tri(pt(1, 0), pt(2, 0), pt(1, 3)),
                tri(pt(0, 0), pt(1, 3), pt(0, 1)),
            ],
            Marking::Edge(e),
        );
        assert_eq!(cuspidal_multiplicity(&ms).unwrap(), Multiplicity::from_integer(6));
    }

    #[test]
    fn short_marked_edge_weighs_nothing() {
        let ms = marked(
            vec![tri(pt(0, 0), pt(1, 0), pt(1, 2)), tri(pt(1, 0), pt(2, 0), pt(1, 2))],
            Marking::Edge(LatticeSegment::new(pt(1, 0), pt(1, 2))),
        );
        assert_eq!(cuspidal_multiplicity(&ms).unwrap(), Multiplicity::zero());
    }

    #[test]
    fn quadrangle_markings() {
        let i = 2;
        let (a, b, c) = (pt(i - 1, 0), pt(i, 2), pt(i + 1, 3));
        let quad = tile(TileKind::QuadNoParallel, &[a, pt(i, 0), b, c], [a, b, c], Some(pt(i, 0)));
        let ms = marked(vec![quad, tri(pt(i, 0), pt(i + 1, 0), pt(i, 1))], Marking::Tile(0));
        assert_eq!(cuspidal_multiplicity(&ms).unwrap(), Multiplicity::one());
        assert_eq!(quad_factor(b - a, c - a).unwrap(), 1);

        let (a, b, c) = (pt(i - 1, 0), pt(i + 1, 2), pt(i + 1, 3));
        let quad = tile(TileKind::QuadNoParallel, &[a, pt(i, 0), b, c], [a, b, c], Some(pt(i, 0)));
        let ms = marked(vec![quad], Marking::Tile(0));
        assert_eq!(cuspidal_multiplicity(&ms).unwrap(), Multiplicity::from_integer(2));
        assert_eq!(quad_factor(b - a, c - a).unwrap(), 2);
    }

    #[test]
    fn trapeze_marking_by_pivot_side() {
        // Parallel sides [(0,0),(2,0)] of length 2 and [(0,1),(1,1)] of length 1.
        let pts = [pt(0, 0), pt(2, 0), pt(1, 1), pt(0, 1)];
        let short_pivot = tile(TileKind::Trapeze, &pts, [pt(0, 0), pt(0, 1), pt(1, 1)], Some(pt(2, 0)));
        let area_two = tri(pt(2, 0), pt(1, 1), pt(3, 1));
        let ms = marked(vec![short_pivot, area_two.clone()], Marking::Tile(0));
        assert_eq!(area_two.area(), 2);
        assert_eq!(cuspidal_multiplicity(&ms).unwrap(), Multiplicity::from_integer(3));

        let long_pivot = tile(TileKind::Trapeze, &pts, [pt(0, 1), pt(0, 0), pt(2, 0)], Some(pt(1, 1)));
        let ms = marked(vec![long_pivot], Marking::Tile(0));
        assert_eq!(cuspidal_multiplicity(&ms).unwrap(), Multiplicity::from_integer(3));

        let pts = [pt(0, 0), pt(3, 0), pt(1, 1), pt(0, 1)];
        let t = tile(TileKind::Trapeze, &pts, [pt(0, 0), pt(0, 1), pt(1, 1)], Some(pt(3, 0)));
        // m = 3, short base m2 = 1, m1 = 2: (3 + 1) * 2 / (3 * 1).
        assert_eq!(cuspidal_multiplicity(&marked(vec![t], Marking::Tile(0))).unwrap(), q(8, 3));
        let t = tile(TileKind::Trapeze, &pts, [pt(0, 1), pt(0, 0), pt(3, 0)], Some(pt(1, 1)));
        assert_eq!(cuspidal_multiplicity(&marked(vec![t], Marking::Tile(0))).unwrap(), Multiplicity::from_integer(4));
    }

    #[test]
    fn missing_provenance_is_an_error() {
        let pts = [pt(0, 0), pt(2, 0), pt(1, 1), pt(0, 1)];
        let t = tile(TileKind::Trapeze, &pts, [pt(0, 0), pt(0, 1), pt(1, 1)], None);
        assert_eq!(
            cuspidal_multiplicity(&marked(vec![t], Marking::Tile(0))),
            Err(MultiplicityError::MissingProvenance(0))
        );
    }

    #[test]
    fn severi_products() {
        let units = sub(vec![tri(pt(0, 0), pt(1, 0), pt(0, 1)), tri(pt(1, 0), pt(1, 1), pt(0, 1))]);
        assert_eq!(severi_multiplicity(&units).unwrap(), Multiplicity::one());
        let two = sub(vec![tri(pt(0, 0), pt(2, 0), pt(0, 1)), tri(pt(1, 0), pt(1, 1), pt(0, 1))]);
        assert_eq!(severi_multiplicity(&two).unwrap(), Multiplicity::from_integer(2));
        let nine = sub(vec![tri(pt(0, 0), pt(1, 0), pt(1, 3)), tri(pt(1, 0), pt(2, 0), pt(1, 3))]);
        assert_eq!(severi_multiplicity(&nine).unwrap(), Multiplicity::from_integer(9));
        let pts = [pt(0, 0), pt(2, 0), pt(1, 1), pt(0, 1)];
        let t = tile(TileKind::Trapeze, &pts, [pt(0, 0), pt(0, 1), pt(1, 1)], Some(pt(2, 0)));
        assert_eq!(severi_multiplicity(&sub(vec![t])), Err(MultiplicityError::SpecialTile));
    }

    #[test]
    fn display_is_reduced() {
        assert_eq!(q(6, 4).to_string(), "3/2");
        assert_eq!(q(6, 3).to_string(), "2");
        assert_eq!(serde_json::to_string(&q(1, 3)).unwrap(), "\"1/3\"");
        assert_eq!(serde_json::to_string(&q(4, 2)).unwrap(), "\"2/1\"");
    }
}
