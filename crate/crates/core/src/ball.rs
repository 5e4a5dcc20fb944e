//! Extension of a simple function from the sphere to the ball, recorded as a
//! sequence of half-handle attachments with a combinatorial ball tracker.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::model::{FoliationGraph, PointKind, Sign};
use crate::taming::{format_rational, parse_rational, simplicity_of, FnSign, ValueAssignment, Valued};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttachmentKind {
    /// A new ball around a minimum.
    ZeroCell,
    /// Index 2 half-handle along an arc in one boundary disc.
    HalfHandle2,
    /// Index 1 half-handle joining two different balls.
    HalfHandle1,
    /// A half-ball glued onto the disc around a maximum.
    Cap,
    EmbryoNeutral,
}

impl AttachmentKind {
    pub fn dual(self) -> AttachmentKind {
        use AttachmentKind::*;
        match self {
            ZeroCell => Cap,
            Cap => ZeroCell,
            HalfHandle1 => HalfHandle2,
            HalfHandle2 => HalfHandle1,
            EmbryoNeutral => EmbryoNeutral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentRecord {
    /// Critical value, as `n/d`.
    pub value: String,
    pub point: String,
    pub kind: AttachmentKind,
    /// Ball components the attachment touches.
    pub before: Vec<usize>,
    /// The component afterwards.
    pub after: usize,
    /// Boundary discs of `after` once the step is done.
    pub discs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallComponent {
    pub id: usize,
    pub discs: usize,
    /// Minima whose zero cells were merged into this ball.
    pub zero_cells: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleDecomposition {
    pub steps: Vec<AttachmentRecord>,
    pub components: Vec<BallComponent>,
}

impl HandleDecomposition {
    /// The function on the boundary sphere that the decomposition restricts to.
    pub fn boundary_assignment(&self) -> Result<ValueAssignment> {
        let mut a = ValueAssignment::new();
        for s in &self.steps {
            a.set(s.point.clone(), parse_rational(&s.value).map_err(Error::Rejected)?);
        }
        Ok(a)
    }
}

#[derive(Default)]
struct Tracker {
    next: usize,
    live: BTreeMap<usize, BallComponent>,
}

impl Tracker {
    fn fresh(&mut self, discs: usize, zero_cells: Vec<String>) -> usize {
        let id = self.next;
        self.next += 1;
        self.live.insert(id, BallComponent { id, discs, zero_cells });
        id
    }

    fn discs(&self, id: usize) -> usize {
        self.live[&id].discs
    }

    fn apply(&mut self, kind: AttachmentKind, point: &str, before: &[usize]) -> std::result::Result<usize, String> {
        use AttachmentKind::*;
        for b in before {
            if !self.live.contains_key(b) {
                return Err(format!("{point}: component {b} does not exist"));
            }
        }
        match (kind, before) {
            (ZeroCell, []) => Ok(self.fresh(1, vec![point.to_string()])),
            (HalfHandle2, [c]) => {
                let comp = self.live.get_mut(c).expect("checked");
                if comp.discs == 0 {
                    return Err(format!("{point}: no boundary disc to cut"));
                }
                comp.discs += 1;
                Ok(*c)
            }
            (HalfHandle1, [a, b]) => {
                if a == b {
                    return Err(format!("{point}: index 1 half-handle on a single ball closes a solid torus"));
                }
                let (x, y) = (self.live.remove(a).expect("checked"), self.live.remove(b).expect("checked"));
                if x.discs == 0 || y.discs == 0 {
                    return Err(format!("{point}: a closed ball has no disc to attach to"));
                }
                let mut zs = x.zero_cells;
                zs.extend(y.zero_cells);
                Ok(self.fresh(x.discs + y.discs - 1, zs))
            }
            (Cap, [c]) => {
                let comp = self.live.get_mut(c).expect("checked");
                if comp.discs == 0 {
                    return Err(format!("{point}: no disc left to cap"));
                }
                comp.discs -= 1;
                Ok(*c)
            }
            (EmbryoNeutral, [c]) => Ok(*c),
            _ => Err(format!("{point}: {kind:?} touches {} components", before.len())),
        }
    }
}

fn kind_of(v: &Valued, p: usize) -> Result<AttachmentKind> {
    let emb = &v.emb;
    Ok(match (emb.kinds[p], emb.signs[p]) {
        (PointKind::Elliptic, Sign::Positive) => AttachmentKind::ZeroCell,
        (PointKind::Elliptic, Sign::Negative) => AttachmentKind::Cap,
        (PointKind::Embryo, _) => AttachmentKind::EmbryoNeutral,
        (PointKind::Hyperbolic, _) => match crate::taming::fn_sign_of(v, p)? {
            FnSign::FnNegative => AttachmentKind::HalfHandle2,
            FnSign::FnPositive => AttachmentKind::HalfHandle1,
        },
    })
}

/// Positions of the two arc ends on their circle must not separate the ends
/// of any other arc on the same circle.
fn check_unlinked(arcs: &[(String, usize, usize)]) -> Result<()> {
    for (i, (h, a, b)) in arcs.iter().enumerate() {
        let (lo, hi) = ((*a).min(*b), (*a).max(*b));
        for (k, c, d) in &arcs[i + 1..] {
            let inside = |x: usize| lo < x && x < hi;
            if inside(*c) != inside(*d) {
                return Err(Error::Internal(format!("arcs of {h} and {k} are interlinked")));
            }
        }
    }
    Ok(())
}

/// Builds the ball level by level: zero cells, then index 2 half-handles,
/// then index 1 half-handles, then caps. Requires a Lyapunov assignment whose
/// refined ribbon graphs are forests.
pub fn extend_to_ball(g: &FoliationGraph, phi: &ValueAssignment) -> Result<HandleDecomposition> {
    let v = Valued::new(g, phi)?;
    if !crate::taming::lyapunov_of(&v).lyapunov {
        return Err(Error::Rejected("assignment is not Lyapunov".into()));
    }
    let report = simplicity_of(&v)?;
    if let Some(l) = report.levels.iter().find(|l| !l.refined_forest) {
        return Err(Error::Rejected(format!(
            "not simple at level {}: cycle through {}",
            format_rational(&l.value),
            l.cycle.join(", ")
        )));
    }
    let emb = &v.emb;
    let values: BTreeSet<&BigRational> = v.val.iter().collect();
    let mut tracker = Tracker::default();
    let mut owner: Vec<Option<usize>> = vec![None; emb.point_count()];
    let mut steps = Vec::new();
    for a in values {
        let an = v.below(a)?;
        // ball component of each circle below the level
        let mut circle_comp = vec![usize::MAX; an.circles.len()];
        for piece in &an.pieces {
            let c = piece
                .points
                .iter()
                .find_map(|&p| owner[p])
                .ok_or_else(|| Error::Internal("sublevel piece without a ball".into()))?;
            if tracker.discs(c) != piece.circles.len() {
                return Err(Error::Internal(format!(
                    "ball {c} has {} discs but its sublevel piece has {} circles",
                    tracker.discs(c),
                    piece.circles.len()
                )));
            }
            for &ci in &piece.circles {
                circle_comp[ci] = c;
            }
        }
        let circle_of = |e: usize| an.circle_of_edge[e];
        let mut at: Vec<(AttachmentKind, usize)> = Vec::new();
        for p in (0..emb.point_count()).filter(|&p| v.val[p] == *a) {
            at.push((kind_of(&v, p)?, p));
        }
        at.sort_by(|x, y| x.0.cmp(&y.0).then(emb.ids[x.1].cmp(&emb.ids[y.1])));

        let mut arcs: BTreeMap<usize, Vec<(String, usize, usize)>> = BTreeMap::new();
        // merged balls are renamed; follow the chain
        let mut renamed: BTreeMap<usize, usize> = BTreeMap::new();
        let resolve = |renamed: &BTreeMap<usize, usize>, mut c: usize| {
            while let Some(&n) = renamed.get(&c) {
                c = n;
            }
            c
        };
        for (kind, p) in at {
            let incoming: Vec<usize> = emb.rot[p]
                .iter()
                .filter(|&&d| !Embedding::is_out(d))
                .map(|&d| Embedding::edge(d))
                .collect();
            let circles: Vec<usize> = match (kind, emb.kinds[p]) {
                (AttachmentKind::ZeroCell, _) => Vec::new(),
                (_, PointKind::Hyperbolic) => v.stable_edges(p).iter().map(|&e| circle_of(e)).collect(),
                _ => incoming.iter().take(1).map(|&e| circle_of(e)).collect(),
            };
            if circles.contains(&usize::MAX) {
                return Err(Error::Internal(format!("{} is not reached from below", emb.ids[p])));
            }
            let mut before: Vec<usize> = circles
                .iter()
                .map(|&c| resolve(&renamed, circle_comp[c]))
                .collect();
            if kind != AttachmentKind::HalfHandle1 {
                before.dedup();
            }
            if kind == AttachmentKind::HalfHandle2 {
                let [e0, e1] = v.stable_edges(p);
                let seq = &an.circles[circles[0]];
                let pos = |e: usize| seq.iter().position(|&x| x == e).unwrap_or(0);
                arcs.entry(circles[0])
                    .or_default()
                    .push((emb.ids[p].clone(), pos(e0), pos(e1)));
            }
            let after = tracker
                .apply(kind, &emb.ids[p], &before)
                .map_err(Error::Internal)?;
            for &b in &before {
                if b != after {
                    renamed.insert(b, after);
                }
            }
            for o in owner.iter_mut().flatten() {
                *o = resolve(&renamed, *o);
            }
            owner[p] = Some(after);
            steps.push(AttachmentRecord {
                value: format_rational(a),
                point: emb.ids[p].clone(),
                kind,
                before,
                after,
                discs: tracker.discs(after),
            });
        }
        for list in arcs.values() {
            check_unlinked(list)?;
        }
    }
    Ok(HandleDecomposition {
        steps,
        components: tracker.live.into_values().collect(),
    })
}

/// Replays the records from nothing and checks every attachment rule and the
/// final state: one ball, no boundary disc left.
pub fn verify_decomposition(d: &HandleDecomposition) -> bool {
    if d.steps.is_empty() {
        return false;
    }
    let mut t = Tracker::default();
    for s in &d.steps {
        match t.apply(s.kind, &s.point, &s.before) {
            Ok(after) if after == s.after && t.discs(after) == s.discs => {}
            _ => return false,
        }
    }
    let live: Vec<BallComponent> = t.live.into_values().collect();
    live.len() == 1 && live[0].discs == 0 && live == d.components
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use AttachmentKind::*;

    fn kinds(d: &HandleDecomposition) -> Vec<AttachmentKind> {
        d.steps.iter().map(|s| s.kind).collect()
    }

    #[test]
    fn std_is_a_zero_cell_and_a_cap() {
        let g = fixtures::std();
        let d = extend_to_ball(&g, &ValueAssignment::from_levels(&g, &[])).unwrap();
        assert_eq!(kinds(&d), [ZeroCell, Cap]);
        assert!(verify_decomposition(&d));
    }

    #[test]
    fn eh2_joins_two_balls() {
        let phi = ValueAssignment::from_ratios([("p1", 0, 1), ("p2", 0, 1), ("h1", 1, 2), ("n1", 1, 1)]);
        let d = extend_to_ball(&fixtures::eh2(), &phi).unwrap();
        assert_eq!(kinds(&d), [ZeroCell, ZeroCell, HalfHandle1, Cap]);
        assert!(verify_decomposition(&d));
    }

    #[test]
    fn negh_cuts_a_disc() {
        let phi = ValueAssignment::from_ratios([("p1", 0, 1), ("h1", 1, 2), ("n1", 1, 1), ("n2", 1, 1)]);
        let d = extend_to_ball(&fixtures::negh(), &phi).unwrap();
        assert_eq!(kinds(&d), [ZeroCell, HalfHandle2, Cap, Cap]);
        assert!(verify_decomposition(&d));
        assert_eq!(d.boundary_assignment().unwrap(), phi);
    }

    #[test]
    fn broken_records_fail() {
        assert!(!verify_decomposition(&HandleDecomposition {
            steps: Vec::new(),
            components: Vec::new(),
        }));
        let bad = HandleDecomposition {
            steps: vec![
                AttachmentRecord {
                    value: "0".into(),
                    point: "p1".into(),
                    kind: ZeroCell,
                    before: vec![],
                    after: 0,
                    discs: 1,
                },
                AttachmentRecord {
                    value: "1/2".into(),
                    point: "h1".into(),
                    kind: HalfHandle1,
                    before: vec![0, 0],
                    after: 1,
                    discs: 1,
                },
            ],
            components: Vec::new(),
        };
        assert!(!verify_decomposition(&bad));
    }

    #[test]
    fn ties_in_cyc_are_refused() {
        let phi = ValueAssignment::from_levels(&fixtures::cyc(), &[vec!["h1".into(), "h2".into()]]);
        assert!(matches!(extend_to_ball(&fixtures::cyc(), &phi), Err(Error::Rejected(_))));
    }
}
