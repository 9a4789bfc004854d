use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;

use cuspcount_core::count::{count, CountOptions, CountResult};
use cuspcount_core::factors::quad_factor;
use cuspcount_core::lattice::{lattice_area, LatticePoint};
use cuspcount_core::multiplicity::cuspidal_multiplicity;
use cuspcount_core::path::{LambdaPaths, Side};
use cuspcount_core::problem::{parse_polygon_spec, validate_instance, Mode};
use cuspcount_core::subdivision::{
    MarkedSubdivision, Marking, SubdivisionContext, Tile, TileKind,
};

fn run(spec: &str, genus: u64, mode: Mode) -> CountResult {
    let p = parse_polygon_spec(spec).unwrap();
    let inst = validate_instance(&p, genus, mode).unwrap();
    count(&inst, &CountOptions::default()).unwrap()
}

fn cross(o: LatticePoint, a: LatticePoint, b: LatticePoint) -> i128 {
    ((a.x - o.x) as i128) * ((b.y - o.y) as i128) - ((a.y - o.y) as i128) * ((b.x - o.x) as i128)
}

/// Separating axis test on the edge normals of both convex tiles.
fn interiors_disjoint(s: &Tile, t: &Tile) -> bool {
    let separated_by = |poly: &[LatticePoint], other: &[LatticePoint]| {
        (0..poly.len()).any(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            // `poly` is counterclockwise, so its interior is to the left of a->b.
            other.iter().all(|&q| cross(a, b, q) <= 0)
        })
    };
    separated_by(&s.vertices, &t.vertices) || separated_by(&t.vertices, &s.vertices)
}

fn check_tiling(result: &CountResult) {
    let area = lattice_area(&result.instance.polygon);
    for c in &result.contributions {
        let tiles = &c.subdivision.tiles;
        assert_eq!(tiles.iter().map(Tile::area).sum::<u64>(), area);
        for (i, s) in tiles.iter().enumerate() {
            for t in &tiles[i + 1..] {
                assert!(interiors_disjoint(s, t), "overlapping tiles {s:?} {t:?}");
            }
        }
    }
}

#[test]
fn emitted_tilings_are_exact_covers() {
    for (spec, g, mode) in [
        ("triangle:3", 0, Mode::Cuspidal),
        ("triangle:4", 2, Mode::Cuspidal),
        ("triangle:4", 1, Mode::Cuspidal),
        ("triangle:3", 0, Mode::Severi),
        ("triangle:4", 1, Mode::Severi),
        ("rect:3,2", 1, Mode::Severi),
    ] {
        check_tiling(&run(spec, g, mode));
    }
}

#[test]
fn nodal_triangles_have_a_vertical_side() {
    for (spec, g) in [("triangle:3", 0), ("triangle:4", 0), ("triangle:4", 2)] {
        let r = run(spec, g, Mode::Severi);
        for c in &r.contributions {
            for t in &c.subdivision.tiles {
                assert!(matches!(t.kind, TileKind::Triangle | TileKind::Parallelogram));
                if t.kind == TileKind::Triangle {
                    assert!(t.sides().iter().any(|s| s.is_vertical()), "{t:?}");
                }
            }
        }
    }
}

#[test]
fn marked_edges_are_vertical_and_quadrangles_match_factor() {
    for (spec, g) in [("triangle:4", 2), ("triangle:4", 1), ("triangle:5", 5)] {
        let r = run(spec, g, Mode::Cuspidal);
        assert_eq!(r.stats.non_vertical_marked_edges, 0);
        for c in &r.contributions {
            match &c.marking {
                Some(Marking::Edge(seg)) => assert!(seg.is_vertical() && seg.lattice_length() >= 3),
                Some(Marking::Tile(i)) => {
                    let tile = &c.subdivision.tiles[*i];
                    assert!(tile.kind.is_special());
                    if tile.kind == TileKind::QuadNoParallel {
                        let p = tile.provenance;
                        let base: u64 = c
                            .subdivision
                            .tiles
                            .iter()
                            .filter(|t| t.kind == TileKind::Triangle)
                            .map(Tile::area)
                            .product();
                        let q = quad_factor(p.pivot - p.prev, p.next - p.prev).unwrap();
                        assert_eq!(c.multiplicity.value(), &BigRational::from_integer(BigInt::from(base * q)));
                    }
                }
                None => panic!("cuspidal contribution without marking"),
            }
            let ms = MarkedSubdivision { base: c.subdivision.clone(), marking: c.marking.clone().unwrap() };
            assert_eq!(cuspidal_multiplicity(&ms).unwrap(), c.multiplicity);
        }
    }
}

#[test]
fn nodal_totals_are_positive() {
    for (spec, g) in [("triangle:3", 0), ("triangle:3", 1), ("triangle:4", 0), ("triangle:4", 3), ("rect:2,2", 0), ("rect:3,2", 2)] {
        let r = run(spec, g, Mode::Severi);
        assert!(r.total >= BigInt::from(1), "{spec} g={g}");
    }
}

#[test]
fn known_nodal_counts() {
    // Plane quartics with one and with two nodes.
    assert_eq!(run("triangle:4", 2, Mode::Severi).total, BigInt::from(27));
    assert_eq!(run("triangle:4", 1, Mode::Severi).total, BigInt::from(225));
    // Rational curves of bidegree (1,1) and (2,1) on the quadric.
    assert_eq!(run("rect:1,1", 0, Mode::Severi).total, BigInt::from(1));
    assert_eq!(run("rect:2,1", 0, Mode::Severi).total, BigInt::from(1));
    // Rational (2,2) curves through 7 points.
    assert_eq!(run("rect:2,2", 0, Mode::Severi).total, BigInt::from(12));
}

#[test]
fn recorded_choices_replay() {
    let p = parse_polygon_spec("triangle:4").unwrap();
    let ctx = SubdivisionContext::new(&p);
    let paths = LambdaPaths::new(&p, 11);
    for path in paths.iter() {
        for side in [Side::Plus, Side::Minus] {
            for outcome in ctx.run_phase(&path.points, side, true) {
                let tiles = ctx.replay_phase(&path.points, side, &outcome.choices).unwrap();
                assert_eq!(tiles, outcome.tiles);
            }
        }
    }
}

#[test]
fn path_stream_has_no_duplicates() {
    let p = parse_polygon_spec("triangle:4").unwrap();
    for n in 1..15 {
        let paths = LambdaPaths::new(&p, n);
        let all: Vec<_> = paths.iter().collect();
        let unique: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), all.len());
        assert_eq!(all.len() as u128, paths.count().unwrap());
        assert!(all.iter().all(|q| q.is_lambda_increasing() && q.len() as u64 == n));
    }
}

#[test]
fn invalid_instances_are_rejected() {
    let p = parse_polygon_spec("triangle:3").unwrap();
    assert!(validate_instance(&p, 1, Mode::Cuspidal).is_err());
    assert!(parse_polygon_spec("triangle:0").is_err());
    assert!(parse_polygon_spec("poly:(0,0),(1,1),(2,2)").is_err());
    assert!(parse_polygon_spec("hexagon:3").is_err());
}
