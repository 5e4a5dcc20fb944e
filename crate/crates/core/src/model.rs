//! Combinatorial model of a generalized Morse characteristic foliation on S².
//!
//! A [`FoliationGraph`] stores singular points as vertices and separatrices as
//! directed edges (source to target along the flow). Hyperbolic points and
//! embryos own numbered slots listed counter-clockwise; elliptic points carry
//! an explicit counter-clockwise rotation of the edges attached to them.
//!
//! Slot conventions:
//!
//! * hyperbolic: slots `0..4`, even slots are stable (incoming), odd slots are
//!   unstable (outgoing);
//! * embryo: slot `0` is the lone separatrix (incoming for a positive embryo,
//!   outgoing for a negative one), slots `1` and `2` bound the half-plane of
//!   regular trajectories, so the corner between them is a source (positive)
//!   or sink (negative) corner.
//!
//! Marker leaves are regular trajectories from a positive to a negative
//! elliptic point, stored only so that the embedded graph is cellular.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Elliptic,
    Hyperbolic,
    Embryo,
}

impl PointKind {
    /// Number of owned separatrix slots; `None` for elliptic points.
    pub fn slot_count(self) -> Option<usize> {
        match self {
            PointKind::Elliptic => None,
            PointKind::Hyperbolic => Some(4),
            PointKind::Embryo => Some(3),
        }
    }

    pub fn is_saddle_like(self) -> bool {
        !matches!(self, PointKind::Elliptic)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            PointKind::Elliptic => "elliptic",
            PointKind::Hyperbolic => "hyperbolic",
            PointKind::Embryo => "embryo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Whether the separatrix occupying `slot` of a point of the given kind and
/// sign flows into the point.
pub fn slot_is_incoming(kind: PointKind, sign: Sign, slot: usize) -> bool {
    match kind {
        PointKind::Elliptic => sign == Sign::Negative,
        PointKind::Hyperbolic => slot.is_multiple_of(2),
        PointKind::Embryo => (slot == 0) == (sign == Sign::Positive),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SingularPoint {
    pub id: String,
    pub kind: PointKind,
    pub sign: Sign,
}

impl SingularPoint {
    pub fn new(id: impl Into<String>, kind: PointKind, sign: Sign) -> Self {
        SingularPoint {
            id: id.into(),
            kind,
            sign,
        }
    }
}

/// One end of a separatrix: a point and, for slotted points, the slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct End {
    pub point: String,
    pub slot: Option<usize>,
}

impl End {
    pub fn at(point: impl Into<String>) -> Self {
        End {
            point: point.into(),
            slot: None,
        }
    }

    pub fn slot(point: impl Into<String>, slot: usize) -> Self {
        End {
            point: point.into(),
            slot: Some(slot),
        }
    }
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.slot {
            Some(s) => write!(f, "{}:{}", self.point, s),
            None => write!(f, "{}", self.point),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Separatrix {
    pub id: String,
    pub source: End,
    pub target: End,
    pub marker: bool,
    pub homoclinic: bool,
}

impl Separatrix {
    pub fn new(id: impl Into<String>, source: End, target: End) -> Self {
        Separatrix {
            id: id.into(),
            source,
            target,
            marker: false,
            homoclinic: false,
        }
    }

    pub fn marker(mut self) -> Self {
        self.marker = true;
        self
    }

    pub fn homoclinic(mut self) -> Self {
        self.homoclinic = true;
        self
    }
}

/// Embedded directed separatrix graph on the sphere.
///
/// Values are plain data: constructing one does not validate it, see
/// [`crate::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FoliationGraph {
    points: BTreeMap<String, SingularPoint>,
    edges: BTreeMap<String, Separatrix>,
    rotation: BTreeMap<String, Vec<String>>,
}

impl FoliationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_point(&mut self, point: SingularPoint) -> &mut Self {
        self.points.insert(point.id.clone(), point);
        self
    }

    pub fn add_edge(&mut self, edge: Separatrix) -> &mut Self {
        self.edges.insert(edge.id.clone(), edge);
        self
    }

    /// Sets the counter-clockwise order of edge ends at an elliptic point.
    pub fn set_rotation(&mut self, point: impl Into<String>, order: Vec<String>) -> &mut Self {
        self.rotation.insert(point.into(), normalize_cycle(order));
        self
    }

    pub fn remove_point(&mut self, id: &str) {
        self.points.remove(id);
        self.rotation.remove(id);
    }

    pub fn remove_edge(&mut self, id: &str) {
        self.edges.remove(id);
    }

    pub(crate) fn edge_mut(&mut self, id: &str) -> Option<&mut Separatrix> {
        self.edges.get_mut(id)
    }

    /// Recomputes every homoclinic flag from the endpoint kinds.
    pub(crate) fn refresh_homoclinic_flags(&mut self) {
        let kinds: BTreeMap<String, PointKind> =
            self.points.iter().map(|(k, p)| (k.clone(), p.kind)).collect();
        let saddle = |id: &str| kinds.get(id).is_some_and(|k| k.is_saddle_like());
        for e in self.edges.values_mut() {
            e.homoclinic = saddle(&e.source.point) && saddle(&e.target.point);
        }
    }

    pub fn points(&self) -> impl Iterator<Item = &SingularPoint> {
        self.points.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Separatrix> {
        self.edges.values()
    }

    pub fn point(&self, id: &str) -> Result<&SingularPoint> {
        self.points
            .get(id)
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    pub fn edge(&self, id: &str) -> Result<&Separatrix> {
        self.edges
            .get(id)
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    pub fn has_point(&self, id: &str) -> bool {
        self.points.contains_key(id)
    }

    pub fn rotation(&self, point: &str) -> Option<&[String]> {
        self.rotation.get(point).map(Vec::as_slice)
    }

    pub fn rotations(&self) -> impl Iterator<Item = (&String, &Vec<String>)> {
        self.rotation.iter()
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn count(&self, kind: PointKind, sign: Sign) -> usize {
        self.points
            .values()
            .filter(|p| p.kind == kind && p.sign == sign)
            .count()
    }

    /// Hyperbolic points plus embryos.
    pub fn saddle_count(&self) -> usize {
        self.points.values().filter(|p| p.kind.is_saddle_like()).count()
    }

    /// d = e - h for the given sign, over the whole sphere.
    pub fn d(&self, sign: Sign) -> i64 {
        self.count(PointKind::Elliptic, sign) as i64 - self.count(PointKind::Hyperbolic, sign) as i64
    }

    pub fn has_homoclinic(&self) -> bool {
        self.edges.values().any(|e| e.homoclinic)
    }

    pub fn has_embryo(&self) -> bool {
        self.points.values().any(|p| p.kind == PointKind::Embryo)
    }

    /// Fresh identifier `prefix<n>` not used by any point or edge.
    pub fn fresh_id(&self, prefix: &str) -> String {
        (1..)
            .map(|n| format!("{prefix}{n}"))
            .find(|id| !self.points.contains_key(id) && !self.edges.contains_key(id))
            .expect("unbounded id space")
    }

    /// Flips every sign and every flow direction (the foliation of the
    /// opposite co-orientation). The embedding is unchanged.
    pub fn reverse(&self) -> FoliationGraph {
        let mut out = FoliationGraph::new();
        for p in self.points.values() {
            out.add_point(SingularPoint::new(p.id.clone(), p.kind, p.sign.flip()));
        }
        let reslot = |end: &End| -> End {
            let kind = self.points.get(&end.point).map(|p| p.kind);
            End {
                point: end.point.clone(),
                slot: match (kind, end.slot) {
                    (Some(PointKind::Hyperbolic), Some(s)) => Some((s + 3) % 4),
                    (_, s) => s,
                },
            }
        };
        for e in self.edges.values() {
            out.add_edge(Separatrix {
                id: e.id.clone(),
                source: reslot(&e.target),
                target: reslot(&e.source),
                marker: e.marker,
                homoclinic: e.homoclinic,
            });
        }
        for (p, order) in &self.rotation {
            out.set_rotation(p.clone(), order.clone());
        }
        out
    }

    /// Orientation-reversed embedding: every rotation read clockwise.
    pub fn mirror(&self) -> FoliationGraph {
        let mut out = FoliationGraph::new();
        for p in self.points.values() {
            out.add_point(p.clone());
        }
        let reslot = |end: &End| -> End {
            let kind = self.points.get(&end.point).map(|p| p.kind);
            End {
                point: end.point.clone(),
                slot: match (kind, end.slot) {
                    (Some(PointKind::Hyperbolic), Some(s)) => Some((4 - s) % 4),
                    (Some(PointKind::Embryo), Some(s)) => Some((3 - s) % 3),
                    (_, s) => s,
                },
            }
        };
        for e in self.edges.values() {
            let mut e2 = e.clone();
            e2.source = reslot(&e.source);
            e2.target = reslot(&e.target);
            out.add_edge(e2);
        }
        for (p, order) in &self.rotation {
            let mut rev = order.clone();
            rev.reverse();
            out.set_rotation(p.clone(), rev);
        }
        out
    }

    /// Renames points and edges; ids absent from the maps keep their names.
    pub fn relabeled(
        &self,
        points: &BTreeMap<String, String>,
        edges: &BTreeMap<String, String>,
    ) -> FoliationGraph {
        let pt = |id: &String| points.get(id).cloned().unwrap_or_else(|| id.clone());
        let ed = |id: &String| edges.get(id).cloned().unwrap_or_else(|| id.clone());
        let mut out = FoliationGraph::new();
        for p in self.points.values() {
            out.add_point(SingularPoint::new(pt(&p.id), p.kind, p.sign));
        }
        for e in self.edges.values() {
            out.add_edge(Separatrix {
                id: ed(&e.id),
                source: End {
                    point: pt(&e.source.point),
                    slot: e.source.slot,
                },
                target: End {
                    point: pt(&e.target.point),
                    slot: e.target.slot,
                },
                marker: e.marker,
                homoclinic: e.homoclinic,
            });
        }
        for (p, order) in &self.rotation {
            out.set_rotation(pt(p), order.iter().map(ed).collect());
        }
        out
    }

    /// Same graph with every hyperbolic point's sign taken from `signs`.
    pub fn with_signs(&self, signs: &BTreeMap<String, Sign>) -> FoliationGraph {
        let mut out = self.clone();
        for (id, s) in signs {
            if let Some(p) = out.points.get_mut(id) {
                p.sign = *s;
            }
        }
        out
    }

    pub fn point_ids(&self) -> BTreeSet<String> {
        self.points.keys().cloned().collect()
    }

    /// Edges attached to a point, in no particular order.
    pub fn incident_edges<'a>(&'a self, point: &'a str) -> impl Iterator<Item = &'a Separatrix> + 'a {
        self.edges
            .values()
            .filter(move |e| e.source.point == point || e.target.point == point)
    }

    /// Edges flowing into a point.
    pub fn incoming<'a>(&'a self, point: &'a str) -> impl Iterator<Item = &'a Separatrix> + 'a {
        self.edges.values().filter(move |e| e.target.point == point)
    }

    /// Edges flowing out of a point.
    pub fn outgoing<'a>(&'a self, point: &'a str) -> impl Iterator<Item = &'a Separatrix> + 'a {
        self.edges.values().filter(move |e| e.source.point == point)
    }
}

/// Rotates a cyclic sequence so that its least element comes first.
pub(crate) fn normalize_cycle(mut order: Vec<String>) -> Vec<String> {
    if let Some((i, _)) = order.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)) {
        order.rotate_left(i);
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_directions() {
        use PointKind::*;
        assert!(slot_is_incoming(Hyperbolic, Sign::Positive, 0));
        assert!(!slot_is_incoming(Hyperbolic, Sign::Negative, 3));
        assert!(slot_is_incoming(Embryo, Sign::Positive, 0));
        assert!(!slot_is_incoming(Embryo, Sign::Positive, 2));
        assert!(!slot_is_incoming(Embryo, Sign::Negative, 0));
        assert!(slot_is_incoming(Embryo, Sign::Negative, 1));
    }

    #[test]
    fn rotation_is_normalized() {
        let mut g = FoliationGraph::new();
        g.set_rotation("e", vec!["s3".into(), "s1".into(), "s2".into()]);
        assert_eq!(g.rotation("e").unwrap(), ["s1", "s2", "s3"]);
    }

    #[test]
    fn fresh_ids_skip_used_names() {
        let mut g = FoliationGraph::new();
        g.add_point(SingularPoint::new("e1", PointKind::Elliptic, Sign::Positive));
        assert_eq!(g.fresh_id("e"), "e2");
        assert_eq!(g.fresh_id("h"), "h1");
    }
}
