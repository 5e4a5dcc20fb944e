//! Structural invariants: d± of regions, the skeleton and its basins, the
//! positive tree Λ and Legendrian polygons.
//!
//! A [`Region`] is a set of singular points closed under flowing backwards
//! (every edge ending inside starts inside). That closure is the
//! combinatorial form of "the boundary is transverse and points outwards":
//! the region is then a regular neighbourhood of its points, edges and the
//! faces whose sink lies inside.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::model::{FoliationGraph, PointKind, Sign};
use crate::validate::compile;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Region {
    pub points: BTreeSet<String>,
}

impl Region {
    pub fn new<I, S>(points: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Region {
            points: points.into_iter().map(Into::into).collect(),
        }
    }

    pub fn whole(g: &FoliationGraph) -> Self {
        Region {
            points: g.point_ids(),
        }
    }
}

/// One connected piece of a region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Piece {
    pub points: Vec<usize>,
    pub euler: i64,
    pub circles: Vec<usize>,
    pub d_plus: i64,
    pub d_minus: i64,
}

/// Components of a region with their boundary circles.
#[derive(Debug, Clone)]
pub(crate) struct Analysis {
    /// Component index per point; `usize::MAX` outside.
    pub comp_of: Vec<usize>,
    pub pieces: Vec<Piece>,
    /// Each circle is the cyclic sequence of edges crossing it.
    pub circles: Vec<Vec<usize>>,
    /// Circle index per edge; `usize::MAX` for edges not crossing.
    pub circle_of_edge: Vec<usize>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

pub(crate) fn analyze(emb: &Embedding, inside: &[bool]) -> Result<Analysis> {
    let n = emb.point_count();
    let m = emb.edge_count();
    for e in 0..m {
        if inside[emb.dst[e]] && !inside[emb.src[e]] {
            return Err(Error::Rejected(format!(
                "boundary is not transverse: {} enters the region from {}",
                emb.edge_id(e),
                emb.id(emb.src[e])
            )));
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for e in 0..m {
        if inside[emb.src[e]] && inside[emb.dst[e]] {
            let (a, b) = (find(&mut parent, emb.src[e]), find(&mut parent, emb.dst[e]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut comp_of = vec![usize::MAX; n];
    let mut root_comp = BTreeMap::new();
    let mut pieces: Vec<Piece> = Vec::new();
    for v in 0..n {
        if !inside[v] {
            continue;
        }
        let r = find(&mut parent, v);
        let c = *root_comp.entry(r).or_insert_with(|| {
            pieces.push(Piece {
                points: Vec::new(),
                euler: 0,
                circles: Vec::new(),
                d_plus: 0,
                d_minus: 0,
            });
            pieces.len() - 1
        });
        comp_of[v] = c;
        let p = &mut pieces[c];
        p.points.push(v);
        p.euler += 1;
        let delta = match emb.kinds[v] {
            PointKind::Elliptic => 1,
            PointKind::Hyperbolic => -1,
            PointKind::Embryo => 0,
        };
        match emb.signs[v] {
            Sign::Positive => p.d_plus += delta,
            Sign::Negative => p.d_minus += delta,
        }
    }
    for e in 0..m {
        if inside[emb.src[e]] && inside[emb.dst[e]] {
            pieces[comp_of[emb.src[e]]].euler -= 1;
        }
    }
    for face in &emb.faces {
        if let Some(t) = face.sink() {
            if inside[t.vertex] {
                pieces[comp_of[t.vertex]].euler += 1;
            }
        }
    }

    let crossing = |e: usize| inside[emb.src[e]] && !inside[emb.dst[e]];
    let mut circle_of_edge = vec![usize::MAX; m];
    let mut circles = Vec::new();
    for e0 in (0..m).filter(|&e| crossing(e)) {
        if circle_of_edge[e0] != usize::MAX {
            continue;
        }
        let c = circles.len();
        let mut seq = Vec::new();
        let start = 2 * e0;
        let mut d = start;
        loop {
            let e = Embedding::edge(d);
            if circle_of_edge[e] == usize::MAX {
                circle_of_edge[e] = c;
                seq.push(e);
            }
            let face = &emb.faces[emb.dart_face[d]];
            let other = face
                .darts
                .iter()
                .copied()
                .find(|&x| x != d && crossing(Embedding::edge(x)))
                .ok_or_else(|| Error::Internal("face crosses the boundary once".into()))?;
            d = other ^ 1;
            if d == start {
                break;
            }
        }
        pieces[comp_of[emb.src[e0]]].circles.push(c);
        circles.push(seq);
    }
    Ok(Analysis {
        comp_of,
        pieces,
        circles,
        circle_of_edge,
    })
}

fn region_mask(emb: &Embedding, r: &Region) -> Result<Vec<bool>> {
    let mut inside = vec![false; emb.point_count()];
    for id in &r.points {
        let v = *emb
            .index
            .get(id)
            .ok_or_else(|| Error::UnknownPoint(id.clone()))?;
        inside[v] = true;
    }
    Ok(inside)
}

/// d± = e± − h± of a region.
pub fn d_invariants(g: &FoliationGraph, r: &Region) -> Result<(i64, i64)> {
    let emb = compile(g)?;
    let inside = region_mask(&emb, r)?;
    let a = analyze(&emb, &inside)?;
    Ok(a.pieces
        .iter()
        .fold((0, 0), |(p, m), c| (p + c.d_plus, m + c.d_minus)))
}

/// Components of a region: point ids, Euler characteristic, number of
/// boundary circles and d± of each piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionComponent {
    pub points: Vec<String>,
    pub euler: i64,
    pub boundary_circles: usize,
    pub d_plus: i64,
    pub d_minus: i64,
}

pub fn region_components(g: &FoliationGraph, r: &Region) -> Result<Vec<RegionComponent>> {
    let emb = compile(g)?;
    let inside = region_mask(&emb, r)?;
    let a = analyze(&emb, &inside)?;
    Ok(a.pieces
        .iter()
        .map(|p| RegionComponent {
            points: p.points.iter().map(|&v| emb.ids[v].clone()).collect(),
            euler: p.euler,
            boundary_circles: p.circles.len(),
            d_plus: p.d_plus,
            d_minus: p.d_minus,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Basin {
    pub center: String,
    pub faces: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkeletonDecomposition {
    pub skeleton: Vec<String>,
    pub basins: Vec<Basin>,
    pub semibasins: Vec<Basin>,
}

pub fn skeleton_decomposition(g: &FoliationGraph) -> Result<SkeletonDecomposition> {
    let emb = compile(g)?;
    let in_skeleton = |e: usize| emb.kinds[emb.src[e]].is_saddle_like();
    let skeleton = (0..emb.edge_count())
        .filter(|&e| in_skeleton(e))
        .map(|e| emb.edge_ids[e].clone())
        .collect();
    let nf = emb.faces.len();
    let mut parent: Vec<usize> = (0..nf).collect();
    for e in (0..emb.edge_count()).filter(|&e| !in_skeleton(e)) {
        let (a, b) = (
            find(&mut parent, emb.dart_face[2 * e]),
            find(&mut parent, emb.dart_face[2 * e + 1]),
        );
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in 0..nf {
        let r = find(&mut parent, f);
        groups.entry(r).or_default().push(f);
    }
    let mut basins = Vec::new();
    let mut semibasins = Vec::new();
    for faces in groups.into_values() {
        let centers: BTreeSet<usize> = faces
            .iter()
            .filter_map(|&f| emb.faces[f].source().map(|c| c.vertex))
            .collect();
        if centers.len() != 1 {
            return Err(Error::Internal("basin without a unique center".into()));
        }
        let c = *centers.iter().next().unwrap();
        let b = Basin {
            center: emb.ids[c].clone(),
            faces,
        };
        match emb.kinds[c] {
            PointKind::Embryo => semibasins.push(b),
            _ => basins.push(b),
        }
    }
    Ok(SkeletonDecomposition {
        skeleton,
        basins,
        semibasins,
    })
}

/// Λ: positive elliptic points joined through positive hyperbolic points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositiveTree {
    pub vertices: Vec<String>,
    /// (hyperbolic point, source of slot 0, source of slot 2)
    pub edges: Vec<(String, String, String)>,
}

impl PositiveTree {
    pub fn component_count(&self) -> usize {
        let idx: BTreeMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        let mut count = self.vertices.len();
        for (_, a, b) in &self.edges {
            let (x, y) = (find(&mut parent, idx[a.as_str()]), find(&mut parent, idx[b.as_str()]));
            if x != y {
                parent[x.max(y)] = x.min(y);
                count -= 1;
            }
        }
        count
    }

    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty()
            && self.edges.len() + 1 == self.vertices.len()
            && self.component_count() == 1
    }
}

pub fn positive_tree(g: &FoliationGraph) -> Result<PositiveTree> {
    if g.has_homoclinic() {
        return Err(Error::Rejected("positive tree needs a homoclinic-free foliation".into()));
    }
    let vertices = g
        .points()
        .filter(|p| p.kind == PointKind::Elliptic && p.sign == Sign::Positive)
        .map(|p| p.id.clone())
        .collect();
    let mut edges = Vec::new();
    for h in g
        .points()
        .filter(|p| p.kind == PointKind::Hyperbolic && p.sign == Sign::Positive)
    {
        let mut src = [String::new(), String::new()];
        for e in g.incoming(&h.id) {
            let s = e.target.slot.unwrap_or(0);
            src[s / 2] = e.source.point.clone();
        }
        let [a, b] = src;
        edges.push((h.id.clone(), a, b));
    }
    Ok(PositiveTree { vertices, edges })
}

/// The hyperbolic points along the path from `a` to `b` in Λ.
pub fn unique_positive_path(g: &FoliationGraph, a: &str, b: &str) -> Result<Vec<String>> {
    let t = positive_tree(g)?;
    if !t.is_tree() {
        return Err(Error::Rejected("positive graph is not a tree".into()));
    }
    tree_path(&t, a, b)
}

pub(crate) fn tree_path(t: &PositiveTree, a: &str, b: &str) -> Result<Vec<String>> {
    for v in [a, b] {
        if !t.vertices.iter().any(|x| x == v) {
            return Err(Error::Rejected(format!("{v} is not a positive elliptic point")));
        }
    }
    let mut prev: BTreeMap<&str, (&str, &str)> = BTreeMap::new();
    let mut queue = VecDeque::from([a]);
    let mut seen = BTreeSet::from([a]);
    while let Some(v) = queue.pop_front() {
        if v == b {
            break;
        }
        for (h, x, y) in &t.edges {
            let w = if x == v {
                y.as_str()
            } else if y == v {
                x.as_str()
            } else {
                continue;
            };
            if seen.insert(w) {
                prev.insert(w, (v, h.as_str()));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = b;
    while v != a {
        let (p, h) = prev[v];
        path.push(h.to_string());
        v = p;
    }
    path.reverse();
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerRole {
    /// An elliptic point or embryo on the boundary.
    Vertex,
    /// A hyperbolic point passed through two stable or two unstable separatrices.
    Pseudovertex,
    /// A hyperbolic point where the boundary turns from stable to unstable.
    HyperbolicCorner,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonCorner {
    pub point: String,
    pub role: CornerRole,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendrianPolygon {
    /// Boundary walk: (edge id, traversed along the flow).
    pub walk: Vec<(String, bool)>,
    pub corners: Vec<PolygonCorner>,
    pub sides: usize,
    /// Faces on the left of the walk.
    pub disc: Vec<usize>,
}

impl LegendrianPolygon {
    /// The common sign of all vertices and pseudovertices, if there is one.
    pub fn uniform_sign(&self) -> Option<Sign> {
        let mut signs = self
            .corners
            .iter()
            .filter(|c| c.role != CornerRole::HyperbolicCorner)
            .map(|c| c.sign);
        let first = signs.next()?;
        signs.all(|s| s == first).then_some(first)
    }
}

/// All injective Legendrian polygons with at most `max_sides` sides.
pub fn enumerate_polygons(g: &FoliationGraph, max_sides: usize) -> Result<Vec<LegendrianPolygon>> {
    let emb = compile(g)?;
    let mut out = Vec::new();
    for cycle in simple_cycles(&emb) {
        let p = polygon_of(&emb, &cycle);
        if p.sides <= max_sides {
            out.push(p);
        }
    }
    Ok(out)
}

/// Simple cycles of the separatrix graph as dart sequences, each cycle once.
fn simple_cycles(emb: &Embedding) -> Vec<Vec<usize>> {
    let n = emb.point_count();
    let mut out = Vec::new();
    for s in 0..n {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        let mut path = Vec::new();
        extend_cycles(emb, s, s, &mut on_path, &mut path, &mut out);
    }
    out
}

fn extend_cycles(
    emb: &Embedding,
    s: usize,
    v: usize,
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for &d in &emb.rot[v] {
        let e = Embedding::edge(d);
        if emb.marker[e] || path.last().is_some_and(|&x| Embedding::edge(x) == e) {
            continue;
        }
        let w = emb.other(d);
        if w == s {
            // each cycle is found from both directions; keep one
            let first = path.first().map_or(e, |&x| Embedding::edge(x));
            if !path.is_empty() && first < e {
                let mut c = path.clone();
                c.push(d);
                out.push(c);
            }
            continue;
        }
        if w < s || on_path[w] {
            continue;
        }
        on_path[w] = true;
        path.push(d);
        extend_cycles(emb, s, w, on_path, path, out);
        path.pop();
        on_path[w] = false;
    }
}

fn polygon_of(emb: &Embedding, cycle: &[usize]) -> LegendrianPolygon {
    let k = cycle.len();
    let mut corners = Vec::new();
    for i in 0..k {
        let leave = cycle[i];
        let arrive = cycle[(i + k - 1) % k] ^ 1;
        let v = emb.vertex(leave);
        let role = match emb.kinds[v] {
            PointKind::Hyperbolic => {
                if Embedding::is_out(arrive) == Embedding::is_out(leave) {
                    CornerRole::Pseudovertex
                } else {
                    CornerRole::HyperbolicCorner
                }
            }
            _ => CornerRole::Vertex,
        };
        corners.push(PolygonCorner {
            point: emb.ids[v].clone(),
            role,
            sign: emb.signs[v],
        });
    }
    let sides = corners
        .iter()
        .filter(|c| c.role != CornerRole::Pseudovertex)
        .count()
        .max(1);
    let on_cycle: BTreeSet<usize> = cycle.iter().map(|&d| Embedding::edge(d)).collect();
    let mut disc = BTreeSet::from([emb.dart_face[cycle[0]]]);
    let mut stack = vec![emb.dart_face[cycle[0]]];
    while let Some(f) = stack.pop() {
        for &d in &emb.faces[f].darts {
            if on_cycle.contains(&Embedding::edge(d)) {
                continue;
            }
            let g = emb.dart_face[d ^ 1];
            if disc.insert(g) {
                stack.push(g);
            }
        }
    }
    LegendrianPolygon {
        walk: cycle
            .iter()
            .map(|&d| (emb.edge_ids[Embedding::edge(d)].clone(), Embedding::is_out(d)))
            .collect(),
        corners,
        sides,
        disc: disc.into_iter().collect(),
    }
}

/// Re-checks a polygon certificate against a graph: the walk is a closed
/// simple cycle of separatrices and the corner data is what the graph says.
pub fn verify_polygon(g: &FoliationGraph, p: &LegendrianPolygon) -> Result<bool> {
    let emb = compile(g)?;
    if p.walk.is_empty() {
        return Ok(false);
    }
    let mut darts = Vec::new();
    for (id, forward) in &p.walk {
        let Some(&e) = emb.edge_index.get(id) else {
            return Ok(false);
        };
        if emb.marker[e] {
            return Ok(false);
        }
        darts.push(if *forward { 2 * e } else { 2 * e + 1 });
    }
    let k = darts.len();
    let mut seen = BTreeSet::new();
    for i in 0..k {
        if emb.other(darts[i]) != emb.vertex(darts[(i + 1) % k]) {
            return Ok(false);
        }
        if !seen.insert(emb.vertex(darts[i])) {
            return Ok(false);
        }
    }
    Ok(polygon_of(&emb, &darts).corners == p.corners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn d_of_whole_sphere() {
        for g in [fixtures::std(), fixtures::eh2()] {
            assert_eq!(d_invariants(&g, &Region::whole(&g)).unwrap(), (1, 1));
        }
    }

    #[test]
    fn d_of_negh_disc() {
        let g = fixtures::negh();
        assert_eq!(d_invariants(&g, &Region::new(["p1", "h1"])).unwrap(), (1, -1));
    }

    #[test]
    fn non_transverse_region_rejected() {
        let g = fixtures::eh2();
        assert!(matches!(
            d_invariants(&g, &Region::new(["h1"])),
            Err(Error::Rejected(_))
        ));
    }

    #[test]
    fn skeletons() {
        let s = skeleton_decomposition(&fixtures::std()).unwrap();
        assert_eq!(s.basins.len(), 1);
        assert!(s.skeleton.is_empty());
        let s = skeleton_decomposition(&fixtures::eh2()).unwrap();
        assert_eq!(s.basins.len(), 2);
        assert_eq!(s.skeleton, ["s3", "s4"]);
        let s = skeleton_decomposition(&fixtures::emb_plus()).unwrap();
        assert_eq!((s.basins.len(), s.semibasins.len()), (1, 1));
    }

    #[test]
    fn lambda_shapes() {
        let t = positive_tree(&fixtures::eh2()).unwrap();
        assert!(t.is_tree());
        let t = positive_tree(&fixtures::cyc()).unwrap();
        assert_eq!((t.vertices.len(), t.edges.len()), (2, 2));
        assert!(!t.is_tree());
        let t = positive_tree(&fixtures::loop_plus()).unwrap();
        assert_eq!(t.edges, [("h1".into(), "p1".into(), "p1".into())]);
        assert!(!t.is_tree());
    }

    #[test]
    fn paths() {
        assert_eq!(unique_positive_path(&fixtures::eh2(), "p1", "p2").unwrap(), ["h1"]);
        assert!(unique_positive_path(&fixtures::eh2(), "p1", "p1").unwrap().is_empty());
        assert_eq!(
            unique_positive_path(&fixtures::chain3(), "p1", "p3").unwrap(),
            ["h1", "h2"]
        );
        assert!(unique_positive_path(&fixtures::cyc(), "p1", "p2").is_err());
    }

    #[test]
    fn polygons() {
        assert!(enumerate_polygons(&fixtures::std(), 8).unwrap().is_empty());
        let ps = enumerate_polygons(&fixtures::loop_plus(), 8).unwrap();
        assert!(ps
            .iter()
            .any(|p| p.sides == 1 && p.uniform_sign() == Some(Sign::Positive)));
        let ps = enumerate_polygons(&fixtures::eh2(), 8).unwrap();
        assert!(!ps.is_empty());
        assert!(ps.iter().all(|p| p.uniform_sign().is_none()));
        for p in &ps {
            assert!(verify_polygon(&fixtures::eh2(), p).unwrap());
        }
    }

    #[test]
    fn sublevel_circles_match_euler() {
        let g = fixtures::chain3_bridged();
        let emb = compile(&g).unwrap();
        for mask in 0u32..(1 << emb.point_count()) {
            let inside: Vec<bool> = (0..emb.point_count()).map(|i| mask >> i & 1 == 1).collect();
            if let Ok(a) = analyze(&emb, &inside) {
                for p in &a.pieces {
                    // planar pieces: χ = 2 − #boundary circles
                    assert_eq!(p.euler, 2 - p.circles.len() as i64);
                }
            }
        }
    }
}
