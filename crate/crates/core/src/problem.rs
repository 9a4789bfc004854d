//! Problem instances: polygon specs, degree data and hypothesis checks.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{
    boundary_lattice_points, convex_hull, interior_lattice_points, is_h_transversal, Dimension,
    GeometryError, LatticePoint, LatticePolygon, LatticeVector,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("malformed polygon spec {0:?}: {1}")]
    Malformed(String, &'static str),
    #[error("polygon spec {0:?} does not describe a two-dimensional polygon")]
    NotFullDimensional(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("Newton polygon is degenerate (dimension {0:?})")]
    Degenerate(Dimension),
    #[error("Newton polygon is not h-transversal: edge direction {0} has horizontal step other than 1")]
    NotHTransversal(LatticeVector),
    #[error("degree size |Delta| = {0} is below 5")]
    DegreeTooSmall(u64),
    #[error("no four boundary lattice points span a quadrangle without parallel sides")]
    NoQuadrangleWitness,
    #[error("genus {genus} out of range 0..={max} for {mode} curves (p_a = {pa})")]
    GenusOutOfRange { genus: u64, max: i64, pa: u64, mode: Mode },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Unicuspidal curves through `|Delta| + g - 2` points.
    Cuspidal,
    /// Nodal irreducible curves through `|Delta| + g - 1` points.
    Severi,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cuspidal => "cuspidal",
            Mode::Severi => "severi",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cuspidal" => Ok(Mode::Cuspidal),
            "severi" => Ok(Mode::Severi),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Parses `triangle:<d>`, `rect:<a>,<b>` or `poly:(<x>,<y>),(<x>,<y>),...`.
pub fn parse_polygon_spec(spec: &str) -> Result<LatticePolygon, SpecError> {
    let malformed = |why| SpecError::Malformed(spec.to_string(), why);
    let (kind, body) = spec.split_once(':').ok_or_else(|| malformed("missing ':'"))?;
    let positive = |s: &str| -> Result<i64, SpecError> {
        match s.trim().parse::<i64>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(malformed("expected a positive integer")),
        }
    };
    let points = match kind.trim() {
        "triangle" => {
            let d = positive(body)?;
            vec![LatticePoint::new(0, 0), LatticePoint::new(d, 0), LatticePoint::new(0, d)]
        }
        "rect" => {
            let (a, b) = body.split_once(',').ok_or_else(|| malformed("expected rect:<a>,<b>"))?;
            let (a, b) = (positive(a)?, positive(b)?);
            vec![
                LatticePoint::new(0, 0),
                LatticePoint::new(a, 0),
                LatticePoint::new(a, b),
                LatticePoint::new(0, b),
            ]
        }
        "poly" => parse_point_list(body).ok_or_else(|| malformed("expected (x,y),(x,y),..."))?,
        _ => return Err(malformed("unknown polygon kind")),
    };
    let hull = convex_hull(&points)?;
    if hull.dim() != Dimension::Full {
        return Err(SpecError::NotFullDimensional(spec.to_string()));
    }
    Ok(hull)
}

fn parse_point_list(body: &str) -> Option<Vec<LatticePoint>> {
    let mut rest = body.trim();
    let mut out = Vec::new();
    loop {
        rest = rest.strip_prefix('(')?;
        let close = rest.find(')')?;
        let (x, y) = rest[..close].split_once(',')?;
        out.push(LatticePoint::new(x.trim().parse().ok()?, y.trim().parse().ok()?));
        rest = rest[close + 1..].trim_start();
        if rest.is_empty() {
            return Some(out);
        }
        rest = rest.strip_prefix(',')?.trim_start();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeDatum {
    /// Primitive direction of the polygon edge, CCW orientation.
    pub direction: LatticeVector,
    pub length: u64,
}

/// Degree data read off the Newton polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSummary {
    /// `|Delta|`, the total lattice length of the boundary.
    pub perimeter: u64,
    pub edges: Vec<EdgeDatum>,
}

impl DegreeSummary {
    /// Sum of the edge directions rotated by a quarter turn and weighted by
    /// lattice length. Balanced degrees give the zero vector.
    pub fn rotated_sum(&self) -> LatticeVector {
        self.edges.iter().fold(LatticeVector::new(0, 0), |acc, e| {
            let r = e.direction.rotate_ccw();
            acc + LatticeVector::new(r.x * e.length as i64, r.y * e.length as i64)
        })
    }
}

pub fn degree_of(p: &LatticePolygon) -> DegreeSummary {
    let edges: Vec<EdgeDatum> = p
        .edges()
        .iter()
        .map(|e| {
            let v = e.b - e.a;
            EdgeDatum { direction: v.primitive(), length: v.lattice_length() }
        })
        .collect();
    DegreeSummary { perimeter: edges.iter().map(|e| e.length).sum(), edges }
}

/// Four boundary lattice points spanning a strictly convex quadrangle with no
/// two sides parallel, if such points exist. Exhaustive with early exit.
pub fn has_quadrangle_witness(p: &LatticePolygon) -> Option<[LatticePoint; 4]> {
    let b = boundary_lattice_points(p);
    let n = b.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let quad = [b[i], b[j], b[k], b[l]];
                    if is_quadrangle_without_parallel_sides(&quad) {
                        return Some(quad);
                    }
                }
            }
        }
    }
    None
}

pub(crate) fn is_quadrangle_without_parallel_sides(points: &[LatticePoint; 4]) -> bool {
    let Ok(h) = convex_hull(points) else { return false };
    if h.vertices().len() != 4 {
        return false;
    }
    let e: Vec<LatticeVector> = h.edges().iter().map(|s| s.b - s.a).collect();
    !e[0].is_parallel(e[2]) && !e[1].is_parallel(e[3])
}

/// A validated enumeration problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    pub polygon: LatticePolygon,
    pub genus: u64,
    pub mode: Mode,
    /// Number of interior lattice points.
    pub pa: u64,
    /// Length of the lattice paths to enumerate.
    pub n: u64,
    pub degree: DegreeSummary,
}

pub fn validate_instance(
    polygon: &LatticePolygon,
    genus: u64,
    mode: Mode,
) -> Result<ProblemInstance, ValidationError> {
    if polygon.dim() != Dimension::Full {
        return Err(ValidationError::Degenerate(polygon.dim()));
    }
    let degree = degree_of(polygon);
    let pa = interior_lattice_points(polygon).len() as u64;
    let max_genus = match mode {
        Mode::Cuspidal => pa as i64 - 1,
        Mode::Severi => pa as i64,
    };
    if mode == Mode::Cuspidal {
        if !is_h_transversal(polygon) {
            let bad = degree
                .edges
                .iter()
                .find(|e| e.direction.x.abs() > 1)
                .map(|e| e.direction)
                .expect("non-transversal polygon has a steep edge");
            return Err(ValidationError::NotHTransversal(bad));
        }
        if degree.perimeter < 5 {
            return Err(ValidationError::DegreeTooSmall(degree.perimeter));
        }
        if has_quadrangle_witness(polygon).is_none() {
            return Err(ValidationError::NoQuadrangleWitness);
        }
    }
    if genus as i64 > max_genus {
        return Err(ValidationError::GenusOutOfRange { genus, max: max_genus, pa, mode });
    }
    let n = match mode {
        Mode::Cuspidal => degree.perimeter + genus - 2,
        Mode::Severi => degree.perimeter + genus - 1,
    };
    Ok(ProblemInstance { polygon: polygon.clone(), genus, mode, pa, n, degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::pt;

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_polygon_spec("triangle:3").unwrap().vertices(),
            &[pt(0, 0), pt(3, 0), pt(0, 3)]
        );
        assert_eq!(
            parse_polygon_spec("rect:2,3").unwrap().vertices(),
            &[pt(0, 0), pt(2, 0), pt(2, 3), pt(0, 3)]
        );
        assert_eq!(
            parse_polygon_spec("poly:(0,0),(4,0),(0,2)").unwrap().vertices(),
            &[pt(0, 0), pt(4, 0), pt(0, 2)]
        );
        assert_eq!(
            parse_polygon_spec("poly:(0, 0), (4,0),(0,-2)").unwrap().vertices(),
            &[pt(0, -2), pt(4, 0), pt(0, 0)]
        );
    }

    #[test]
    fn parse_errors() {
        for bad in ["triangle", "triangle:0", "triangle:-2", "rect:3", "hexagon:2", "poly:(0,0),(1,", "poly:"] {
            assert!(matches!(parse_polygon_spec(bad), Err(SpecError::Malformed(..))), "{bad}");
        }
        assert!(matches!(
            parse_polygon_spec("poly:(0,0),(1,1),(2,2)"),
            Err(SpecError::NotFullDimensional(_))
        ));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree_of(&parse_polygon_spec("triangle:3").unwrap()).perimeter, 9);
        assert_eq!(degree_of(&parse_polygon_spec("rect:1,1").unwrap()).perimeter, 4);
        let d = degree_of(&parse_polygon_spec("poly:(0,0),(2,0),(0,1)").unwrap());
        assert_eq!(d.perimeter, 4);
        let mut lengths: Vec<u64> = d.edges.iter().map(|e| e.length).collect();
        lengths.sort();
        assert_eq!(lengths, vec![1, 1, 2]);
        assert_eq!(d.rotated_sum(), LatticeVector::new(0, 0));
    }

    /// Independent brute force: every 4-subset, checked with explicit
    /// orientation tests on all cyclic orders.
    fn brute_witness_exists(p: &LatticePolygon) -> bool {
        let b = boundary_lattice_points(p);
        let n = b.len();
        let orders = [[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3]];
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let q = [b[i], b[j], b[k], b[l]];
                        for ord in orders {
                            let c: Vec<LatticePoint> = ord.iter().map(|&t| q[t]).collect();
                            let turns: Vec<i128> = (0..4)
                                .map(|t| crate::lattice::orient(c[t], c[(t + 1) % 4], c[(t + 2) % 4]))
                                .collect();
                            let convex = turns.iter().all(|&t| t > 0) || turns.iter().all(|&t| t < 0);
                            if convex
                                && !(c[1] - c[0]).is_parallel(c[3] - c[2])
                                && !(c[2] - c[1]).is_parallel(c[0] - c[3])
                            {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn quadrangle_witness_examples() {
        let t3 = parse_polygon_spec("triangle:3").unwrap();
        let w = has_quadrangle_witness(&t3).expect("cubic triangle has a witness");
        assert!(is_quadrangle_without_parallel_sides(&w));
        assert!(brute_witness_exists(&t3));
        let sq = parse_polygon_spec("rect:1,1").unwrap();
        assert!(has_quadrangle_witness(&sq).is_none());
        assert!(!brute_witness_exists(&sq));
        assert!(has_quadrangle_witness(&parse_polygon_spec("triangle:1").unwrap()).is_none());
        for spec in ["triangle:2", "rect:2,1", "rect:2,2", "poly:(0,0),(3,0),(1,2)", "triangle:4"] {
            let p = parse_polygon_spec(spec).unwrap();
            assert_eq!(has_quadrangle_witness(&p).is_some(), brute_witness_exists(&p), "{spec}");
        }
    }

    #[test]
    fn validation_examples() {
        let t3 = parse_polygon_spec("triangle:3").unwrap();
        let inst = validate_instance(&t3, 0, Mode::Cuspidal).unwrap();
        assert_eq!((inst.pa, inst.n), (1, 7));
        assert!(matches!(
            validate_instance(&t3, 1, Mode::Cuspidal),
            Err(ValidationError::GenusOutOfRange { genus: 1, max: 0, .. })
        ));
        assert_eq!(validate_instance(&t3, 0, Mode::Severi).unwrap().n, 8);
        assert_eq!(validate_instance(&t3, 1, Mode::Severi).unwrap().n, 9);
    }

    #[test]
    fn validation_error_variants() {
        let steep = parse_polygon_spec("poly:(0,0),(2,1),(0,3)").unwrap();
        assert!(matches!(
            validate_instance(&steep, 0, Mode::Cuspidal),
            Err(ValidationError::NotHTransversal(_))
        ));
        // Severi mode has no transversality requirement.
        assert!(validate_instance(&steep, 0, Mode::Severi).is_ok());
        let small = parse_polygon_spec("rect:1,1").unwrap();
        assert_eq!(validate_instance(&small, 0, Mode::Cuspidal), Err(ValidationError::DegreeTooSmall(4)));
        let sq = parse_polygon_spec("rect:2,1").unwrap();
        assert_eq!(validate_instance(&sq, 0, Mode::Cuspidal), Err(ValidationError::NoQuadrangleWitness));
        let t2 = parse_polygon_spec("triangle:2").unwrap();
        // Six lattice points admit no quadrangle without parallel sides.
        assert_eq!(validate_instance(&t2, 0, Mode::Cuspidal), Err(ValidationError::NoQuadrangleWitness));
        assert!(matches!(
            validate_instance(&t2, 1, Mode::Severi),
            Err(ValidationError::GenusOutOfRange { genus: 1, max: 0, .. })
        ));
    }

    #[test]
    fn triangle_family_invariants() {
        for d in 3..=8u64 {
            let p = parse_polygon_spec(&format!("triangle:{d}")).unwrap();
            let pa = (d - 1) * (d - 2) / 2;
            for g in 0..pa {
                let inst = validate_instance(&p, g, Mode::Cuspidal).unwrap();
                assert_eq!(inst.pa, pa);
                assert_eq!(inst.degree.perimeter, 3 * d);
                assert_eq!(inst.n, 3 * d + g - 2);
            }
        }
    }
}
