//! Dart-level view of a [`FoliationGraph`]: rotation system, face tracing and
//! corner classification.
//!
//! Dart `2k` is the source end of edge `k` (outgoing at its point), dart
//! `2k + 1` the target end. Faces are orbits of `d -> succ(twin(d))`.

use std::collections::BTreeMap;

use crate::model::{slot_is_incoming, FoliationGraph, PointKind, Sign};
use crate::validate::Violation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerKind {
    Source,
    Sink,
    Pass,
}

/// The angle at `vertex` between the arriving dart `arrive` and the next dart
/// `leave` counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub vertex: usize,
    pub arrive: usize,
    pub leave: usize,
    pub kind: CornerKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Darts in walk order; each leaves the corner preceding it.
    pub darts: Vec<usize>,
    pub corners: Vec<Corner>,
}

impl Face {
    pub fn sources(&self) -> impl Iterator<Item = &Corner> {
        self.corners.iter().filter(|c| c.kind == CornerKind::Source)
    }

    pub fn sinks(&self) -> impl Iterator<Item = &Corner> {
        self.corners.iter().filter(|c| c.kind == CornerKind::Sink)
    }

    pub fn source(&self) -> Option<&Corner> {
        self.sources().next()
    }

    pub fn sink(&self) -> Option<&Corner> {
        self.sinks().next()
    }
}

#[derive(Debug, Clone)]
pub struct Embedding {
    pub ids: Vec<String>,
    pub kinds: Vec<PointKind>,
    pub signs: Vec<Sign>,
    pub index: BTreeMap<String, usize>,
    pub edge_ids: Vec<String>,
    pub edge_index: BTreeMap<String, usize>,
    pub marker: Vec<bool>,
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
    /// Counter-clockwise darts around each point.
    pub rot: Vec<Vec<usize>>,
    pub pos: Vec<usize>,
    pub faces: Vec<Face>,
    pub dart_face: Vec<usize>,
}

impl Embedding {
    /// Builds the dart structure, reporting local structural violations.
    pub fn build(g: &FoliationGraph) -> Result<Embedding, Vec<Violation>> {
        let mut violations = Vec::new();
        let ids: Vec<String> = g.points().map(|p| p.id.clone()).collect();
        let kinds: Vec<PointKind> = g.points().map(|p| p.kind).collect();
        let signs: Vec<Sign> = g.points().map(|p| p.sign).collect();
        let index: BTreeMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let edge_ids: Vec<String> = g.edges().map(|e| e.id.clone()).collect();
        let edge_index: BTreeMap<String, usize> =
            edge_ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let n = ids.len();
        let m = edge_ids.len();
        let mut src = vec![usize::MAX; m];
        let mut dst = vec![usize::MAX; m];
        let mut marker = vec![false; m];
        let mut slots: Vec<Vec<Vec<usize>>> = kinds
            .iter()
            .map(|k| vec![Vec::new(); k.slot_count().unwrap_or(0)])
            .collect();
        let mut elliptic_darts: Vec<Vec<usize>> = vec![Vec::new(); n];

        for (k, e) in g.edges().enumerate() {
            marker[k] = e.marker;
            for (end, outgoing) in [(&e.source, true), (&e.target, false)] {
                let dart = 2 * k + usize::from(!outgoing);
                let Some(&v) = index.get(&end.point) else {
                    violations.push(Violation::UnknownEndpoint {
                        edge: e.id.clone(),
                        point: end.point.clone(),
                    });
                    continue;
                };
                if outgoing {
                    src[k] = v;
                } else {
                    dst[k] = v;
                }
                match (kinds[v].slot_count(), end.slot) {
                    (None, None) => {
                        let incoming = signs[v] == Sign::Negative;
                        if incoming == outgoing {
                            violations.push(Violation::FlowDirection {
                                edge: e.id.clone(),
                                point: end.point.clone(),
                            });
                        }
                        elliptic_darts[v].push(dart);
                    }
                    (Some(count), Some(s)) if s < count => {
                        if slot_is_incoming(kinds[v], signs[v], s) == outgoing {
                            violations.push(Violation::FlowDirection {
                                edge: e.id.clone(),
                                point: end.point.clone(),
                            });
                        }
                        slots[v][s].push(dart);
                    }
                    (_, slot) => violations.push(Violation::BadSlot {
                        edge: e.id.clone(),
                        point: end.point.clone(),
                        slot,
                    }),
                }
            }
            if src[k] != usize::MAX && dst[k] != usize::MAX {
                let both_elliptic = kinds[src[k]] == PointKind::Elliptic && kinds[dst[k]] == PointKind::Elliptic;
                if e.marker && !both_elliptic {
                    violations.push(Violation::MarkerEndpoints { edge: e.id.clone() });
                }
                if !e.marker && both_elliptic {
                    violations.push(Violation::UnmarkedEllipticEdge { edge: e.id.clone() });
                }
                let saddle_pair = kinds[src[k]].is_saddle_like() && kinds[dst[k]].is_saddle_like();
                if e.homoclinic != saddle_pair {
                    violations.push(Violation::HomoclinicFlag {
                        edge: e.id.clone(),
                        expected: saddle_pair,
                    });
                }
            }
        }

        let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            match kinds[v].slot_count() {
                Some(_) => {
                    for (s, darts) in slots[v].iter().enumerate() {
                        if darts.len() != 1 {
                            violations.push(Violation::SlotOccupancy {
                                point: ids[v].clone(),
                                slot: s,
                                count: darts.len(),
                            });
                        } else {
                            rot[v].push(darts[0]);
                        }
                    }
                    if g.rotation(&ids[v]).is_some() {
                        violations.push(Violation::RotationMismatch { point: ids[v].clone() });
                    }
                }
                None => {
                    let listed = g.rotation(&ids[v]).unwrap_or(&[]);
                    let mut order = Vec::new();
                    for eid in listed {
                        if let Some(&k) = edge_index.get(eid) {
                            let d = if src[k] == v { 2 * k } else { 2 * k + 1 };
                            if dart_vertex(&src, &dst, d) == v {
                                order.push(d);
                                continue;
                            }
                        }
                        order.clear();
                        break;
                    }
                    let mut a = order.clone();
                    a.sort_unstable();
                    let mut b = elliptic_darts[v].clone();
                    b.sort_unstable();
                    if a != b || a.windows(2).any(|w| w[0] == w[1]) {
                        violations.push(Violation::RotationMismatch { point: ids[v].clone() });
                    }
                    rot[v] = order;
                }
            }
        }
        for (p, _) in g.rotations() {
            if !index.contains_key(p) {
                violations.push(Violation::RotationMismatch { point: p.clone() });
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        let mut pos = vec![0; 2 * m];
        for darts in &rot {
            for (i, &d) in darts.iter().enumerate() {
                pos[d] = i;
            }
        }
        let mut emb = Embedding {
            ids,
            kinds,
            signs,
            index,
            edge_ids,
            edge_index,
            marker,
            src,
            dst,
            rot,
            pos,
            faces: Vec::new(),
            dart_face: vec![usize::MAX; 2 * m],
        };
        emb.trace_faces();
        Ok(emb)
    }

    fn trace_faces(&mut self) {
        let darts = 2 * self.edge_ids.len();
        for start in 0..darts {
            if self.dart_face[start] != usize::MAX {
                continue;
            }
            let f = self.faces.len();
            let mut walk = Vec::new();
            let mut corners = Vec::new();
            let mut d = start;
            loop {
                self.dart_face[d] = f;
                walk.push(d);
                let arrive = d ^ 1;
                let leave = self.succ(arrive);
                corners.push(Corner {
                    vertex: self.vertex(arrive),
                    arrive,
                    leave,
                    kind: classify(arrive, leave),
                });
                d = leave;
                if d == start {
                    break;
                }
            }
            // corner i sits before dart i
            corners.rotate_right(1);
            self.faces.push(Face {
                darts: walk,
                corners,
            });
        }
    }

    pub fn point_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn vertex(&self, dart: usize) -> usize {
        dart_vertex(&self.src, &self.dst, dart)
    }

    pub fn other(&self, dart: usize) -> usize {
        self.vertex(dart ^ 1)
    }

    pub fn edge(dart: usize) -> usize {
        dart / 2
    }

    pub fn is_out(dart: usize) -> bool {
        dart.is_multiple_of(2)
    }

    pub fn succ(&self, dart: usize) -> usize {
        let r = &self.rot[self.vertex(dart)];
        r[(self.pos[dart] + 1) % r.len()]
    }

    pub fn pred(&self, dart: usize) -> usize {
        let r = &self.rot[self.vertex(dart)];
        r[(self.pos[dart] + r.len() - 1) % r.len()]
    }

    pub fn face_of_corner(&self, arrive: usize) -> usize {
        self.dart_face[self.succ(arrive)]
    }

    pub fn is_elliptic(&self, v: usize) -> bool {
        self.kinds[v] == PointKind::Elliptic
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edge_ids[e]
    }

    /// Non-marker edges.
    pub fn separatrices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edge_count()).filter(|&e| !self.marker[e])
    }

    /// Connected components of the underlying graph, as a per-point label.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.point_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = count;
            while let Some(v) = stack.pop() {
                for &d in &self.rot[v] {
                    let w = self.other(d);
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }
}

fn dart_vertex(src: &[usize], dst: &[usize], dart: usize) -> usize {
    if dart.is_multiple_of(2) {
        src[dart / 2]
    } else {
        dst[dart / 2]
    }
}

fn classify(arrive: usize, leave: usize) -> CornerKind {
    match (Embedding::is_out(arrive), Embedding::is_out(leave)) {
        (true, true) => CornerKind::Source,
        (false, false) => CornerKind::Sink,
        _ => CornerKind::Pass,
    }
}
