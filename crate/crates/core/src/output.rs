//! Rendering count results as JSON, CSV, plain text tables and SVG drawings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::count::{Contribution, CountResult, CountStats};
use crate::lattice::{lattice_points, LatticePoint, LatticePolygon};
use crate::multiplicity::Multiplicity;
use crate::problem::Mode;
use crate::subdivision::{Marking, Subdivision, TileKind};

#[derive(Serialize)]
struct JsonResult<'a> {
    polygon: &'a [LatticePoint],
    genus: u64,
    mode: Mode,
    n: u64,
    pa: u64,
    delta_size: u64,
    total: String,
    contributions: Vec<JsonContribution<'a>>,
    stats: &'a CountStats,
}

#[derive(Serialize)]
struct JsonContribution<'a> {
    path: &'a [LatticePoint],
    tiles: Vec<JsonTile<'a>>,
    marking: Option<JsonMarking>,
    multiplicity: &'a Multiplicity,
}

#[derive(Serialize)]
struct JsonTile<'a> {
    kind: &'static str,
    vertices: &'a [LatticePoint],
}

#[derive(Serialize)]
struct JsonMarking {
    #[serde(rename = "type")]
    kind: &'static str,
    data: Vec<LatticePoint>,
}

fn marking_json(sub: &Subdivision, marking: &Option<Marking>) -> Option<JsonMarking> {
    marking.as_ref().map(|m| match m {
        Marking::Tile(i) => JsonMarking { kind: "tile", data: sub.tiles[*i].vertices.clone() },
        Marking::Edge(seg) => JsonMarking { kind: "edge", data: vec![seg.a, seg.b] },
    })
}

fn contribution_json(c: &Contribution) -> JsonContribution<'_> {
    JsonContribution {
        path: &c.path.points,
        tiles: c
            .subdivision
            .tiles
            .iter()
            .map(|t| JsonTile { kind: t.kind.as_str(), vertices: &t.vertices })
            .collect(),
        marking: marking_json(&c.subdivision, &c.marking),
        multiplicity: &c.multiplicity,
    }
}

/// Compact JSON with a fixed key order.
pub fn emit_json(result: &CountResult) -> String {
    let inst = &result.instance;
    let doc = JsonResult {
        polygon: inst.polygon.vertices(),
        genus: inst.genus,
        mode: inst.mode,
        n: inst.n,
        pa: inst.pa,
        delta_size: inst.degree.perimeter,
        total: result.total.to_string(),
        contributions: result.contributions.iter().map(contribution_json).collect(),
        stats: &result.stats,
    };
    serde_json::to_string(&doc).expect("result serializes")
}

fn points_field(points: &[LatticePoint]) -> String {
    points.iter().map(|p| format!("{} {}", p.x, p.y)).collect::<Vec<_>>().join(";")
}

fn marking_field(c: &Contribution) -> (&'static str, String) {
    match &c.marking {
        None => ("", String::new()),
        Some(Marking::Tile(i)) => ("tile", points_field(&c.subdivision.tiles[*i].vertices)),
        Some(Marking::Edge(seg)) => ("edge", points_field(&[seg.a, seg.b])),
    }
}

/// One row per contribution. Point lists are `x y` pairs joined by `;`,
/// tiles are joined by `|`.
pub fn emit_csv(result: &CountResult) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "path", "tiles", "marking_type", "marking", "multiplicity"])?;
    for (i, c) in result.contributions.iter().enumerate() {
        let tiles: Vec<String> = c
            .subdivision
            .tiles
            .iter()
            .map(|t| format!("{}:{}", t.kind.as_str(), points_field(&t.vertices)))
            .collect();
        let (kind, marking) = marking_field(c);
        w.write_record([
            i.to_string(),
            points_field(&c.path.points),
            tiles.join("|"),
            kind.to_string(),
            marking,
            c.multiplicity.fraction_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Human-readable summary followed by one line per contribution.
pub fn emit_table(result: &CountResult) -> String {
    let inst = &result.instance;
    let mut out = String::new();
    let poly = points_field(inst.polygon.vertices());
    let _ = writeln!(out, "polygon   {poly}");
    let _ = writeln!(out, "mode      {}", inst.mode);
    let _ = writeln!(out, "genus     {}  (p_a = {}, |Δ| = {}, path length {})", inst.genus, inst.pa, inst.degree.perimeter, inst.n);
    let _ = writeln!(out, "total     {}", result.total);
    let _ = writeln!(
        out,
        "scanned   {} paths, {} subdivisions, {} ms",
        result.stats.paths_scanned, result.stats.subdivisions_emitted, result.stats.wall_time_ms
    );
    if result.contributions.is_empty() {
        return out;
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:>5}  {:>8}  {:<28}  path", "#", "mult", "marking");
    for (i, c) in result.contributions.iter().enumerate() {
        let (kind, data) = marking_field(c);
        let marking = if kind.is_empty() { "-".to_string() } else { format!("{kind} {data}") };
        let _ = writeln!(out, "{:>5}  {:>8}  {:<28}  {}", i, c.multiplicity.to_string(), marking, points_field(&c.path.points));
    }
    out
}

const SCALE: i64 = 40;
const MARGIN: i64 = 20;

struct Frame {
    min_x: i64,
    max_y: i64,
}

impl Frame {
    fn map(&self, p: LatticePoint) -> (i64, i64) {
        (MARGIN + (p.x - self.min_x) * SCALE, MARGIN + (self.max_y - p.y) * SCALE)
    }

    fn points_attr(&self, pts: &[LatticePoint]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x},{y}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Drawing of a subdivision with its path and marking. Tiles are `<polygon>`
/// elements whose class starts with `tile`; the marked special tile also has
/// class `special`.
pub fn emit_svg(
    polygon: &LatticePolygon,
    subdivision: &Subdivision,
    path: &[LatticePoint],
    marking: Option<&Marking>,
) -> String {
    let vs = polygon.vertices();
    let min_y = vs.iter().map(|p| p.y).min().unwrap_or(0);
    let frame = Frame { min_x: polygon.min_x(), max_y: vs.iter().map(|p| p.y).max().unwrap_or(0) };
    let width = 2 * MARGIN + (polygon.max_x() - polygon.min_x()) * SCALE;
    let height = 2 * MARGIN + (frame.max_y - min_y) * SCALE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        s,
        "<style>.tile{{fill:#eef3fb;stroke:#4a5a78;stroke-width:1.5}}.special{{fill:#f7c873}}\
         .outline{{fill:none;stroke:#111;stroke-width:2.5}}.path{{fill:none;stroke:#c0392b;stroke-width:2.5}}\
         .marking{{stroke:#8e44ad;stroke-width:5;stroke-linecap:round}}.lattice{{fill:#333}}</style>"
    );
    for (i, t) in subdivision.tiles.iter().enumerate() {
        let marked = matches!(marking, Some(Marking::Tile(m)) if *m == i);
        let class = match t.kind {
            TileKind::Triangle | TileKind::Parallelogram => format!("tile {}", t.kind.as_str()),
            k if marked => format!("tile {} special marked", k.as_str()),
            k => format!("tile {} special", k.as_str()),
        };
        let _ = writeln!(s, r#"<polygon class="{class}" points="{}"/>"#, frame.points_attr(&t.vertices));
    }
    let _ = writeln!(s, r#"<polygon class="outline" points="{}"/>"#, frame.points_attr(vs));
    let _ = writeln!(s, r#"<polyline class="path" points="{}"/>"#, frame.points_attr(path));
    if let Some(Marking::Edge(seg)) = marking {
        let ((x1, y1), (x2, y2)) = (frame.map(seg.a), frame.map(seg.b));
        let _ = writeln!(s, r#"<line class="marking" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
    }
    for p in lattice_points(polygon) {
        let (x, y) = frame.map(p);
        let _ = writeln!(s, r#"<circle class="lattice" cx="{x}" cy="{y}" r="3"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::{count, CountOptions};
    use crate::path::enumerate_lambda_paths;
    use crate::problem::{parse_polygon_spec, validate_instance};
    use crate::subdivision::SubdivisionContext;

    fn result(spec: &str, g: u64, mode: Mode) -> CountResult {
        let p = parse_polygon_spec(spec).unwrap();
        count(&validate_instance(&p, g, mode).unwrap(), &CountOptions::default()).unwrap()
    }

    #[test]
    fn json_key_order_and_total() {
        let r = result("triangle:3", 0, Mode::Cuspidal);
        let json = emit_json(&r);
        let keys = ["\"polygon\"", "\"genus\"", "\"mode\"", "\"n\"", "\"pa\"", "\"delta_size\"", "\"total\"", "\"contributions\"", "\"stats\""];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["total"], "24");
        assert_eq!(v["mode"], "cuspidal");
        assert_eq!(v["contributions"].as_array().unwrap().len(), 6);
        let m = &v["contributions"][0]["marking"];
        assert!(m["type"] == "edge" || m["type"] == "tile");
    }

    #[test]
    fn empty_contributions() {
        let mut r = result("triangle:3", 0, Mode::Cuspidal);
        r.contributions.clear();
        r.total = 0.into();
        let v: serde_json::Value = serde_json::from_str(&emit_json(&r)).unwrap();
        assert_eq!(v["contributions"], serde_json::json!([]));
        assert_eq!(v["total"], "0");
    }

    #[test]
    fn csv_rows() {
        let r = result("triangle:3", 0, Mode::Cuspidal);
        let text = emit_csv(&r).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|row| row[5].ends_with("/1")));
        assert!(emit_table(&r).contains("total     24"));
    }

    #[test]
    fn svg_of_unit_triangulation() {
        let p = parse_polygon_spec("triangle:3").unwrap();
        let ctx = SubdivisionContext::new(&p);
        let path = &enumerate_lambda_paths(&p, 9)[0];
        let sub = &ctx.run_recursion(&path.points, false)[0];
        let svg = emit_svg(&p, sub, &path.points, None);
        assert_eq!(svg.matches(r#"class="tile"#).count(), 9);
        assert_eq!(svg.matches("<circle").count(), 10);
    }
}
