//! Tightness: allowable points, recursive synthesis of taming functions and
//! the decision procedure with its certificates.

use itertools::Itertools;
use serde::Serialize;

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::invariants::{enumerate_polygons, region_components, verify_polygon, LegendrianPolygon, Region};
use crate::model::{FoliationGraph, PointKind, Sign};
use crate::moves::{apply_recorded, split_along_loop, Move, MoveRecord, Side};
use crate::taming::{is_taming, simplicity_check, RibbonForestReport, ValueAssignment};
use crate::validate::compile;

/// Largest instance accepted by [`oracle_tightness`].
pub const ORACLE_MAX_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AllowabilityCase {
    /// Positive hyperbolic point fed by two different positive elliptic points.
    PosHypDistinctSources,
    /// Negative hyperbolic point fed twice by the same positive elliptic point.
    NegHypSameSource,
    /// Positive embryo fed by a positive elliptic point.
    PosEmbryoEllipticSource,
    /// Negative embryo whose whole inflow comes from one positive elliptic point.
    NegEmbryoAllFromOneElliptic,
    NotAllowable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AllowabilityVerdict {
    pub point: String,
    pub case: AllowabilityCase,
    /// The positive elliptic points feeding the point.
    pub witnesses: Vec<String>,
}

fn positive_elliptic(emb: &Embedding, v: usize) -> bool {
    emb.kinds[v] == PointKind::Elliptic && emb.signs[v] == Sign::Positive
}

fn classify_in(emb: &Embedding, v: usize) -> AllowabilityVerdict {
    use AllowabilityCase::*;
    let source = |slot: usize| emb.src[Embedding::edge(emb.rot[v][slot])];
    let (case, feeders) = match (emb.kinds[v], emb.signs[v]) {
        (PointKind::Hyperbolic, sign) => {
            let (a, b) = (source(0), source(2));
            let fed = positive_elliptic(emb, a) && positive_elliptic(emb, b);
            let case = match sign {
                Sign::Positive if fed && a != b => PosHypDistinctSources,
                Sign::Negative if fed && a == b => NegHypSameSource,
                _ => NotAllowable,
            };
            (case, vec![a, b])
        }
        (PointKind::Embryo, Sign::Positive) => {
            let a = source(0);
            let case = if positive_elliptic(emb, a) {
                PosEmbryoEllipticSource
            } else {
                NotAllowable
            };
            (case, vec![a])
        }
        (PointKind::Embryo, Sign::Negative) => {
            let (a, b) = (source(1), source(2));
            let face = &emb.faces[emb.face_of_corner(emb.rot[v][1])];
            let same = a == b && positive_elliptic(emb, a) && face.source().map(|c| c.vertex) == Some(a);
            let case = if same { NegEmbryoAllFromOneElliptic } else { NotAllowable };
            (case, vec![a, b])
        }
        (PointKind::Elliptic, _) => unreachable!("elliptic points are filtered by the caller"),
    };
    let mut witnesses: Vec<String> = feeders.into_iter().map(|x| emb.ids[x].clone()).collect();
    witnesses.sort();
    witnesses.dedup();
    AllowabilityVerdict {
        point: emb.ids[v].clone(),
        case,
        witnesses,
    }
}

/// Decides which allowable configuration, if any, a hyperbolic point or
/// embryo is in.
pub fn classify_allowable(g: &FoliationGraph, point: &str) -> Result<AllowabilityVerdict> {
    let emb = compile(g)?;
    let v = *emb
        .index
        .get(point)
        .ok_or_else(|| Error::UnknownPoint(point.to_string()))?;
    if emb.kinds[v] == PointKind::Elliptic {
        return Err(Error::Rejected(format!("{point} is elliptic")));
    }
    Ok(classify_in(&emb, v))
}

/// The allowable point with the smallest id, if any.
pub fn find_allowable(g: &FoliationGraph) -> Result<Option<AllowabilityVerdict>> {
    let emb = compile(g)?;
    let mut order: Vec<usize> = (0..emb.point_count())
        .filter(|&v| emb.kinds[v] != PointKind::Elliptic)
        .collect();
    order.sort_by(|&a, &b| emb.ids[a].cmp(&emb.ids[b]));
    Ok(order
        .into_iter()
        .map(|v| classify_in(&emb, v))
        .find(|c| c.case != AllowabilityCase::NotAllowable))
}

/// Eliminates the critical points of a disc component with d₊ = 1 until a
/// single positive elliptic point is left. The outside is untouched.
pub fn collapse_component(g: &FoliationGraph, c: &Region) -> Result<(FoliationGraph, Vec<MoveRecord>)> {
    let comps = region_components(g, c)?;
    if comps.len() != 1 || comps[0].euler != 1 || comps[0].d_plus != 1 {
        return Err(Error::Rejected("region is not a disc with d+ = 1".into()));
    }
    let mut cur = g.clone();
    let mut inside = c.points.clone();
    let mut records = Vec::new();
    loop {
        let saddles: Vec<String> = inside
            .iter()
            .filter(|p| cur.point(p).map(|x| x.kind.is_saddle_like()).unwrap_or(false))
            .cloned()
            .collect();
        if saddles.is_empty() {
            return Ok((cur, records));
        }
        let mut step = None;
        for s in &saddles {
            let v = classify_allowable(&cur, s)?;
            if !v.witnesses.iter().all(|w| inside.contains(w)) {
                continue;
            }
            step = match v.case {
                AllowabilityCase::PosHypDistinctSources => Some(Move::EliminatePair {
                    elliptic: v.witnesses[1].clone(),
                    hyperbolic: s.clone(),
                }),
                AllowabilityCase::PosEmbryoEllipticSource | AllowabilityCase::NegEmbryoAllFromOneElliptic => {
                    Some(Move::EliminateEmbryo { embryo: s.clone() })
                }
                _ => None,
            };
            if step.is_some() {
                break;
            }
        }
        let step = step.ok_or_else(|| Error::Rejected("component cannot be collapsed".into()))?;
        let (next, rec) = apply_recorded(&cur, step)?;
        for r in &rec.removed {
            inside.remove(r);
        }
        cur = next;
        records.push(rec);
    }
}

/// One node of a synthesis: the allowable point used, the moves that
/// removed it, and the smaller foliations it reduced to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthesisStep {
    pub point: String,
    pub case: AllowabilityCase,
    pub moves: Vec<MoveRecord>,
    pub children: Vec<SynthesisStep>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    /// Homoclinic resolutions applied before synthesis.
    pub resolutions: Vec<MoveRecord>,
    pub steps: Option<SynthesisStep>,
    /// Set when the assignment came from exhaustive search over orders.
    pub search: bool,
}

type Synth = Option<(Vec<String>, Option<SynthesisStep>)>;

fn synth(g: &FoliationGraph) -> Result<Synth> {
    if g.saddle_count() == 0 {
        return Ok(Some((Vec::new(), None)));
    }
    let Some(v) = find_allowable(g)? else {
        return Ok(None);
    };
    let mut order = vec![v.point.clone()];
    let mut children = Vec::new();
    let mut moves = Vec::new();
    let parts = if v.case == AllowabilityCase::NegHypSameSource {
        let (a, b) = split_along_loop(g, &v.point)?;
        vec![a, b]
    } else {
        let mut pts = v.witnesses.clone();
        pts.push(v.point.clone());
        let (rest, recs) = collapse_component(g, &Region::new(pts))?;
        moves = recs;
        vec![rest]
    };
    for part in &parts {
        let Some((o, step)) = synth(part)? else {
            return Ok(None);
        };
        order.extend(o);
        children.extend(step);
    }
    Ok(Some((
        order,
        Some(SynthesisStep {
            point: v.point,
            case: v.case,
            moves,
            children,
        }),
    )))
}

fn certifies(g: &FoliationGraph, phi: &ValueAssignment) -> Result<Option<RibbonForestReport>> {
    if !is_taming(g, phi)?.taming {
        return Ok(None);
    }
    let s = simplicity_check(g, phi)?;
    Ok(s.simple.then_some(s))
}

fn singleton_levels(order: &[String]) -> Vec<Vec<String>> {
    order.iter().map(|p| vec![p.clone()]).collect()
}

/// Every way of resolving all homoclinic separatrices, left side first,
/// capped at `limit` branches.
fn resolutions(g: &FoliationGraph, limit: usize) -> Result<Vec<(FoliationGraph, Vec<MoveRecord>)>> {
    let mut out = Vec::new();
    let mut stack = vec![(g.clone(), Vec::new())];
    while let Some((cur, recs)) = stack.pop() {
        if out.len() >= limit {
            break;
        }
        let Some(edge) = cur.edges().find(|e| e.homoclinic).map(|e| e.id.clone()) else {
            out.push((cur, recs));
            continue;
        };
        if recs.len() > 2 * g.edge_count() {
            continue;
        }
        for side in [Side::Right, Side::Left] {
            let step = Move::ResolveHomoclinic {
                edge: edge.clone(),
                side,
            };
            if let Ok((next, rec)) = apply_recorded(&cur, step) {
                let mut r = recs.clone();
                r.push(rec);
                stack.push((next, r));
            }
        }
    }
    Ok(out)
}

/// A taming function constructed by recursion on allowable points, with the
/// transcript that produced it. `None` when the recursion gets stuck.
pub fn synthesize_taming(g: &FoliationGraph) -> Result<Option<(ValueAssignment, Transcript)>> {
    compile(g)?;
    if !g.has_homoclinic() {
        let Some((order, steps)) = synth(g)? else {
            return Ok(None);
        };
        let phi = ValueAssignment::from_levels(g, &singleton_levels(&order));
        if certifies(g, &phi)?.is_none() {
            return Err(Error::Internal(format!("synthesized order {order:?} does not tame")));
        }
        return Ok(Some((
            phi,
            Transcript {
                resolutions: Vec::new(),
                steps,
                search: false,
            },
        )));
    }
    // the recursion often runs on the foliation as it is; resolving first
    // can force an order that breaks the Lyapunov condition along the
    // homoclinic separatrix
    let mut candidates = vec![(g.clone(), Vec::new())];
    candidates.extend(resolutions(g, 64)?);
    for (resolved, recs) in candidates {
        let Ok(Some((order, steps))) = synth(&resolved) else {
            continue;
        };
        let phi = ValueAssignment::from_levels(g, &singleton_levels(&order));
        if certifies(g, &phi)?.is_some() {
            return Ok(Some((
                phi,
                Transcript {
                    resolutions: recs,
                    steps,
                    search: false,
                },
            )));
        }
    }
    let (found, _) = search_orders(g)?;
    Ok(found.map(|phi| {
        (
            phi,
            Transcript {
                search: true,
                ..Transcript::default()
            },
        )
    }))
}

/// Tries every total order of the saddle-like points. Returns the first
/// taming, simple assignment and the number of orders tried.
fn search_orders(g: &FoliationGraph) -> Result<(Option<ValueAssignment>, usize)> {
    let saddles: Vec<String> = g
        .points()
        .filter(|p| p.kind.is_saddle_like())
        .map(|p| p.id.clone())
        .collect();
    let k = saddles.len();
    let mut tried = 0;
    for perm in saddles.into_iter().permutations(k) {
        tried += 1;
        let phi = ValueAssignment::from_levels(g, &singleton_levels(&perm));
        if certifies(g, &phi)?.is_some() {
            return Ok((Some(phi), tried));
        }
    }
    Ok((None, tried))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Tight,
    Overtwisted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Taming {
        assignment: ValueAssignment,
        simplicity: RibbonForestReport,
        transcript: Transcript,
    },
    Polygon {
        polygon: LegendrianPolygon,
    },
    /// No total order of the listed points gives a taming, simple function.
    Exhaustion {
        saddles: Vec<String>,
        orderings: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessResult {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

fn tight(g: &FoliationGraph, assignment: ValueAssignment, transcript: Transcript) -> Result<TightnessResult> {
    let simplicity = simplicity_check(g, &assignment)?;
    Ok(TightnessResult {
        verdict: Verdict::Tight,
        certificate: Certificate::Taming {
            assignment,
            simplicity,
            transcript,
        },
    })
}

fn exhausted(g: &FoliationGraph, orderings: usize) -> TightnessResult {
    TightnessResult {
        verdict: Verdict::Overtwisted,
        certificate: Certificate::Exhaustion {
            saddles: g
                .points()
                .filter(|p| p.kind.is_saddle_like())
                .map(|p| p.id.clone())
                .collect(),
            orderings,
        },
    }
}

/// Decides tightness. Tight answers carry a taming function; overtwisted
/// answers carry a polygon with all corners of one sign when one exists and
/// an exhaustion record otherwise.
pub fn decide_tightness(g: &FoliationGraph) -> Result<TightnessResult> {
    if let Some((phi, t)) = synthesize_taming(g)? {
        return tight(g, phi, t);
    }
    let polygons = enumerate_polygons(g, g.edge_count())?;
    if let Some(p) = polygons.into_iter().find(|p| p.uniform_sign().is_some()) {
        return Ok(TightnessResult {
            verdict: Verdict::Overtwisted,
            certificate: Certificate::Polygon { polygon: p },
        });
    }
    let (found, tried) = search_orders(g)?;
    match found {
        Some(phi) => tight(
            g,
            phi,
            Transcript {
                search: true,
                ..Transcript::default()
            },
        ),
        None => Ok(exhausted(g, tried)),
    }
}

/// Reference decision by brute force over all total orders of the
/// saddle-like points. Only for homoclinic-free instances of at most
/// [`ORACLE_MAX_POINTS`] points.
pub fn oracle_tightness(g: &FoliationGraph) -> Result<TightnessResult> {
    compile(g)?;
    if g.has_homoclinic() {
        return Err(Error::Rejected("oracle needs a homoclinic-free foliation".into()));
    }
    if g.point_count() > ORACLE_MAX_POINTS {
        return Err(Error::Rejected(format!(
            "oracle is limited to {ORACLE_MAX_POINTS} points"
        )));
    }
    let (found, tried) = search_orders(g)?;
    match found {
        Some(phi) => tight(
            g,
            phi,
            Transcript {
                search: true,
                ..Transcript::default()
            },
        ),
        None => Ok(exhausted(g, tried)),
    }
}

/// Rechecks a certificate against the foliation it claims to describe.
pub fn verify_certificate(g: &FoliationGraph, r: &TightnessResult) -> Result<bool> {
    Ok(match (&r.verdict, &r.certificate) {
        (Verdict::Tight, Certificate::Taming { assignment, .. }) => certifies(g, assignment)?.is_some(),
        (Verdict::Overtwisted, Certificate::Polygon { polygon }) => {
            polygon.uniform_sign().is_some() && verify_polygon(g, polygon)?
        }
        (Verdict::Overtwisted, Certificate::Exhaustion { .. }) => search_orders(g)?.0.is_none(),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use num_rational::BigRational;

    #[test]
    fn classification_of_fixtures() {
        use AllowabilityCase::*;
        let case = |g: &FoliationGraph, p: &str| classify_allowable(g, p).unwrap().case;
        assert_eq!(case(&fixtures::eh2(), "h1"), PosHypDistinctSources);
        assert_eq!(case(&fixtures::negh(), "h1"), NegHypSameSource);
        assert_eq!(case(&fixtures::loop_plus(), "h1"), NotAllowable);
        assert_eq!(case(&fixtures::emb_plus(), "o1"), PosEmbryoEllipticSource);
        assert_eq!(case(&fixtures::emb_minus(), "o1"), NegEmbryoAllFromOneElliptic);
        assert!(classify_allowable(&fixtures::std(), "p1").is_err());
    }

    #[test]
    fn find_allowable_on_fixtures() {
        let f = |g: &FoliationGraph| find_allowable(g).unwrap().map(|v| v.point);
        assert_eq!(f(&fixtures::eh2()).as_deref(), Some("h1"));
        assert_eq!(f(&fixtures::loop_plus()), None);
        assert_eq!(f(&fixtures::std()), None);
    }

    #[test]
    fn synthesis_on_fixtures() {
        let (phi, _) = synthesize_taming(&fixtures::std()).unwrap().unwrap();
        assert_eq!(phi.get("p1"), Some(&BigRational::from_integer(0.into())));
        assert_eq!(phi.get("n1"), Some(&BigRational::from_integer(1.into())));
        let (phi, t) = synthesize_taming(&fixtures::eh2()).unwrap().unwrap();
        assert_eq!(phi.get("h1"), Some(&BigRational::new(1.into(), 2.into())));
        assert_eq!(t.steps.unwrap().moves.len(), 1);
        assert!(synthesize_taming(&fixtures::loop_plus()).unwrap().is_none());
    }

    #[test]
    fn decisions_on_fixtures() {
        let r = decide_tightness(&fixtures::negh()).unwrap();
        assert_eq!(r.verdict, Verdict::Tight);
        if let Certificate::Taming { assignment, .. } = &r.certificate {
            assert_eq!(assignment, &ValueAssignment::from_ratios([
                ("p1", 0, 1),
                ("h1", 1, 2),
                ("n1", 1, 1),
                ("n2", 1, 1),
            ]));
        } else {
            panic!("expected a taming certificate");
        }
        let r = decide_tightness(&fixtures::loop_plus()).unwrap();
        assert_eq!(r.verdict, Verdict::Overtwisted);
        assert!(matches!(r.certificate, Certificate::Polygon { .. }));
        for (name, g) in fixtures::canonical_fixtures() {
            let r = decide_tightness(&g).unwrap();
            assert!(verify_certificate(&g, &r).unwrap(), "{name}");
            assert_eq!(r.verdict, oracle_tightness(&g).unwrap().verdict, "{name}");
        }
    }

    #[test]
    fn bridged_chain_splits_and_recurses() {
        let g = fixtures::chain3_bridged();
        let r = decide_tightness(&g).unwrap();
        assert_eq!(r.verdict, Verdict::Tight);
        assert_eq!(r.verdict, oracle_tightness(&g).unwrap().verdict);
    }
}
