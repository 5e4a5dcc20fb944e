use std::fmt;

use serde::Serialize;

use crate::embedding::Embedding;
use crate::model::{FoliationGraph, Sign};

/// A single violated invariant of a foliation graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    UnknownEndpoint { edge: String, point: String },
    BadSlot { edge: String, point: String, slot: Option<usize> },
    FlowDirection { edge: String, point: String },
    SlotOccupancy { point: String, slot: usize, count: usize },
    RotationMismatch { point: String },
    MarkerEndpoints { edge: String },
    UnmarkedEllipticEdge { edge: String },
    HomoclinicFlag { edge: String, expected: bool },
    IsolatedPoint { point: String },
    NonCellular { vertices: usize, edges: usize, faces: usize },
    FaceSources { face: usize, count: usize },
    FaceSinks { face: usize, count: usize },
    EulerIdentity { d_plus: i64, d_minus: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            UnknownEndpoint { edge, point } => write!(f, "separatrix {edge} ends at unknown point {point}"),
            BadSlot { edge, point, slot } => write!(f, "separatrix {edge} uses invalid slot {slot:?} at {point}"),
            FlowDirection { edge, point } => write!(f, "separatrix {edge} has the wrong direction at {point}"),
            SlotOccupancy { point, slot, count } => write!(f, "slot {slot} of {point} holds {count} separatrices"),
            RotationMismatch { point } => write!(f, "rotation at {point} does not list its incident edges"),
            MarkerEndpoints { edge } => write!(f, "marker leaf {edge} must join two elliptic points"),
            UnmarkedEllipticEdge { edge } => write!(f, "edge {edge} joins two elliptic points but is not a marker leaf"),
            HomoclinicFlag { edge, expected } => write!(f, "homoclinic flag of {edge} should be {expected}"),
            IsolatedPoint { point } => write!(f, "point {point} has no incident edges"),
            NonCellular { vertices, edges, faces } => {
                write!(f, "non-cellular embedding: V - E + F = {vertices} - {edges} + {faces} != 2")
            }
            FaceSources { face, count } => write!(f, "face {face} has {count} source corners"),
            FaceSinks { face, count } => write!(f, "face {face} has {count} sink corners"),
            EulerIdentity { d_plus, d_minus } => write!(f, "d+ + d- = {d_plus} + {d_minus} != 2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural invariant; an empty violation list means `g` is a
/// valid foliation graph.
pub fn validate(g: &FoliationGraph) -> ValidationReport {
    let emb = match Embedding::build(g) {
        Ok(emb) => emb,
        Err(violations) => {
            return ValidationReport {
                vertices: g.point_count(),
                edges: g.edge_count(),
                faces: 0,
                violations,
            }
        }
    };
    let mut violations = Vec::new();
    let v = emb.point_count();
    let e = emb.edge_count();
    let isolated: Vec<usize> = (0..v).filter(|&i| emb.rot[i].is_empty()).collect();
    let (components, _) = emb.components();
    // an isolated point is a component whose complement is one open face
    let f = (emb.faces.len() + isolated.len() + 1).saturating_sub(components.max(1));
    if v as i64 - e as i64 + f as i64 != 2 || components != 1 {
        violations.push(Violation::NonCellular {
            vertices: v,
            edges: e,
            faces: f,
        });
    }
    if components == 1 {
        for &i in &isolated {
            violations.push(Violation::IsolatedPoint {
                point: emb.ids[i].clone(),
            });
        }
    }
    for (i, face) in emb.faces.iter().enumerate() {
        let sources = face.sources().count();
        let sinks = face.sinks().count();
        if sources != 1 {
            violations.push(Violation::FaceSources { face: i, count: sources });
        }
        if sinks != 1 {
            violations.push(Violation::FaceSinks { face: i, count: sinks });
        }
    }
    let (dp, dm) = (g.d(Sign::Positive), g.d(Sign::Negative));
    if dp + dm != 2 {
        violations.push(Violation::EulerIdentity {
            d_plus: dp,
            d_minus: dm,
        });
    }
    ValidationReport {
        vertices: v,
        edges: e,
        faces: f,
        violations,
    }
}

/// Compiles a graph that is required to be valid.
pub(crate) fn compile(g: &FoliationGraph) -> crate::Result<Embedding> {
    let report = validate(g);
    if let Some(first) = report.violations.first() {
        return Err(crate::Error::Invalid(first.to_string()));
    }
    Embedding::build(g).map_err(|v| crate::Error::Invalid(v[0].to_string()))
}
