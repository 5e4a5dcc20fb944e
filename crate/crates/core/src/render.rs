//! Graphviz and SVG pictures of a foliation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::embedding::Embedding;
use crate::error::Result;
use crate::invariants::{enumerate_polygons, skeleton_decomposition};
use crate::model::{FoliationGraph, PointKind, Sign};
use crate::validate::compile;

fn shape(kind: PointKind) -> &'static str {
    match kind {
        PointKind::Elliptic => "circle",
        PointKind::Hyperbolic => "box",
        PointKind::Embryo => "diamond",
    }
}

fn sign_word(sign: Sign) -> &'static str {
    match sign {
        Sign::Positive => "positive",
        Sign::Negative => "negative",
    }
}

/// DOT text: one node per point, one arc per separatrix and a cluster for
/// each basin and semibasin around its center.
pub fn render_dot(g: &FoliationGraph) -> Result<String> {
    let sk = skeleton_decomposition(g)?;
    let mut centers: BTreeMap<&str, usize> = BTreeMap::new();
    let mut out = String::from("digraph foliation {\n");
    for (i, b) in sk.basins.iter().chain(&sk.semibasins).enumerate() {
        centers.insert(&b.center, i);
        let _ = writeln!(
            out,
            "  subgraph cluster_basin_{i} {{\n    label=\"basin {} ({} faces)\";\n    \"{}\";\n  }}",
            b.center,
            b.faces.len(),
            b.center
        );
    }
    for p in g.points() {
        let _ = writeln!(
            out,
            "  \"{}\" [shape={}, label=\"{}{}\", color={}];",
            p.id,
            shape(p.kind),
            p.id,
            p.sign.symbol(),
            if p.sign == Sign::Positive { "black" } else { "red" }
        );
    }
    for e in g.edges() {
        let mut attrs = vec![format!("label=\"{}\"", e.id)];
        if e.marker {
            attrs.push("style=dashed".into());
        }
        if e.homoclinic {
            attrs.push("penwidth=2".into());
        }
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [{}];",
            e.source.point,
            e.target.point,
            attrs.join(", ")
        );
    }
    out.push_str("}\n");
    Ok(out)
}

const SIZE: f64 = 400.0;

/// Tutte layout: the longest face on a circle, every other point at the
/// average of its neighbours.
fn layout(emb: &Embedding) -> Vec<(f64, f64)> {
    let n = emb.point_count();
    let mut pos = vec![(SIZE / 2.0, SIZE / 2.0); n];
    let outer = (0..emb.faces.len())
        .max_by_key(|&f| (emb.faces[f].darts.len(), std::cmp::Reverse(f)))
        .map(|f| &emb.faces[f]);
    let mut fixed = vec![false; n];
    let mut ring = Vec::new();
    if let Some(face) = outer {
        for c in &face.corners {
            if !fixed[c.vertex] {
                fixed[c.vertex] = true;
                ring.push(c.vertex);
            }
        }
    }
    if ring.is_empty() {
        ring = (0..n).collect();
        fixed = vec![true; n];
    }
    let r = SIZE * 0.4;
    for (i, &v) in ring.iter().enumerate() {
        // walking a face keeps it on the left, so go clockwise
        let t = -2.0 * std::f64::consts::PI * i as f64 / ring.len() as f64;
        pos[v] = (SIZE / 2.0 + r * t.cos(), SIZE / 2.0 + r * t.sin());
    }
    for _ in 0..500 {
        for v in 0..n {
            if fixed[v] || emb.rot[v].is_empty() {
                continue;
            }
            let (mut x, mut y) = (0.0, 0.0);
            for &d in &emb.rot[v] {
                let w = emb.other(d);
                x += pos[w].0;
                y += pos[w].1;
            }
            let k = emb.rot[v].len() as f64;
            pos[v] = (x / k, y / k);
        }
    }
    pos
}

/// Control point of the quadratic curve drawn for each edge; parallel edges
/// fan out on both sides of the straight segment.
fn controls(emb: &Embedding, pos: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    (0..emb.edge_count())
        .map(|e| {
            let (a, b) = (emb.src[e], emb.dst[e]);
            let key = (a.min(b), a.max(b));
            let k = *seen.entry(key).and_modify(|k| *k += 1).or_insert(0);
            let (p, q) = (pos[a], pos[b]);
            let (mx, my) = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
            let (dx, dy) = (q.0 - p.0, q.1 - p.1);
            let len = (dx * dx + dy * dy).sqrt().max(1.0);
            let side = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            let off = side * 30.0 * k.div_ceil(2) as f64 * if a <= b { 1.0 } else { -1.0 };
            (mx - dy / len * off, my + dx / len * off)
        })
        .collect()
}

/// SVG 1.1 picture. When a polygon with corners of one sign exists it is
/// drawn as a closed, filled path.
pub fn render_svg(g: &FoliationGraph) -> Result<String> {
    let emb = compile(g)?;
    let pos = layout(&emb);
    let ctl = controls(&emb, &pos);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    );
    let polygons = enumerate_polygons(g, g.edge_count())?;
    if let Some(p) = polygons.iter().find(|p| p.uniform_sign().is_some()) {
        let mut d = String::new();
        for (i, (id, forward)) in p.walk.iter().enumerate() {
            let e = emb.edge_index[id];
            let (from, to) = if *forward {
                (emb.src[e], emb.dst[e])
            } else {
                (emb.dst[e], emb.src[e])
            };
            if i == 0 {
                let _ = write!(d, "M {:.2} {:.2} ", pos[from].0, pos[from].1);
            }
            let _ = write!(d, "Q {:.2} {:.2} {:.2} {:.2} ", ctl[e].0, ctl[e].1, pos[to].0, pos[to].1);
        }
        d.push('Z');
        let sign = sign_word(p.uniform_sign().expect("checked"));
        let _ = writeln!(
            out,
            "  <path class=\"polygon {sign}\" d=\"{d}\" fill=\"#f4d03f\" fill-opacity=\"0.4\" stroke=\"none\"/>"
        );
    }
    for e in 0..emb.edge_count() {
        let (a, b) = (emb.src[e], emb.dst[e]);
        let class = if emb.marker[e] { "sep marker" } else { "sep" };
        let _ = writeln!(
            out,
            "  <path class=\"{class}\" id=\"{}\" d=\"M {:.2} {:.2} Q {:.2} {:.2} {:.2} {:.2}\" fill=\"none\" stroke=\"#444\"{}/>",
            emb.edge_ids[e],
            pos[a].0,
            pos[a].1,
            ctl[e].0,
            ctl[e].1,
            pos[b].0,
            pos[b].1,
            if emb.marker[e] { " stroke-dasharray=\"4 3\"" } else { "" }
        );
    }
    for v in 0..emb.point_count() {
        let kind = emb.kinds[v].keyword();
        let sign = sign_word(emb.signs[v]);
        let fill = if emb.signs[v] == Sign::Positive { "#ffffff" } else { "#c0392b" };
        let _ = writeln!(
            out,
            "  <circle class=\"point {kind} {sign}\" id=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"6\" fill=\"{fill}\" stroke=\"#000\"/>",
            emb.ids[v], pos[v].0, pos[v].1
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>",
            pos[v].0 + 8.0,
            pos[v].1 - 8.0,
            emb.ids[v]
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn std_dot() {
        let d = render_dot(&fixtures::std()).unwrap();
        assert_eq!(d.matches("shape=").count(), 2);
        assert_eq!(d.matches(" -> ").count(), 1);
    }

    #[test]
    fn eh2_dot_has_two_basins() {
        let d = render_dot(&fixtures::eh2()).unwrap();
        assert_eq!(d.matches("shape=").count(), 4);
        assert_eq!(d.matches("subgraph cluster_basin_").count(), 2);
    }

    #[test]
    fn loop_plus_svg_draws_the_polygon() {
        let s = render_svg(&fixtures::loop_plus()).unwrap();
        let line = s.lines().find(|l| l.contains("class=\"polygon positive\"")).unwrap();
        assert!(line.contains(" Z\""));
        assert_eq!(s.matches("<circle").count(), 4);
        assert!(!render_svg(&fixtures::eh2()).unwrap().contains("polygon"));
    }
}
