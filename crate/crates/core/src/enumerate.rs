//! The test universe: all foliations reachable from the round sphere by
//! births, embryo merges and sign changes, up to isomorphism.

use std::collections::BTreeMap;

use crate::canonical::{canonical_code, canonical_relabel};
use crate::error::{Error, Result};
use crate::model::{FoliationGraph, PointKind, Sign};
use crate::moves::{birth, merge_into_embryo, Trajectory};
use crate::fixtures;

/// Largest saddle count [`enumerate_foliations`] accepts.
pub const MAX_ENUMERATION_SADDLES: usize = 4;

type Shapes = BTreeMap<Vec<u32>, FoliationGraph>;

/// All hyperbolic points made positive: the shape of a foliation.
fn shape(g: &FoliationGraph) -> FoliationGraph {
    let signs = g
        .points()
        .filter(|p| p.kind == PointKind::Hyperbolic)
        .map(|p| (p.id.clone(), Sign::Positive))
        .collect();
    g.with_signs(&signs)
}

fn insert(set: &mut Shapes, g: FoliationGraph) -> bool {
    let Some(code) = canonical_code(&g) else {
        return false;
    };
    if set.contains_key(&code) {
        return false;
    }
    set.insert(code, g);
    true
}

fn trajectories(g: &FoliationGraph, e: &str) -> Vec<Trajectory> {
    let mut out = Vec::new();
    for x in g.rotation(e).unwrap_or_default() {
        if g.edge(x).is_ok_and(|s| !s.marker) {
            out.push(Trajectory::Separatrix(x.clone()));
        }
        out.push(Trajectory::Leaf { after: x.clone() });
    }
    out
}

fn births(g: &FoliationGraph) -> Vec<FoliationGraph> {
    let mut out = Vec::new();
    for p in g.points().filter(|p| p.kind == PointKind::Elliptic) {
        let ts = trajectories(g, &p.id);
        for a in &ts {
            for b in &ts {
                if let Ok(r) = birth(g, &p.id, a, b) {
                    out.push(r);
                }
            }
        }
    }
    out
}

fn merges(g: &FoliationGraph) -> Vec<FoliationGraph> {
    let mut out = Vec::new();
    let hyps: Vec<String> = g
        .points()
        .filter(|p| p.kind == PointKind::Hyperbolic)
        .map(|p| p.id.clone())
        .collect();
    for h in &hyps {
        for sign in [Sign::Positive, Sign::Negative] {
            let signed = g.with_signs(&BTreeMap::from([(h.clone(), sign)]));
            let feeders: Vec<String> = signed
                .incident_edges(h)
                .map(|s| if sign == Sign::Positive { &s.source } else { &s.target })
                .filter(|end| end.point != *h)
                .map(|end| end.point.clone())
                .collect();
            for e in feeders {
                if let Ok(r) = merge_into_embryo(&signed, &e, h) {
                    out.push(shape(&r));
                }
            }
        }
    }
    out
}

fn admissible(g: &FoliationGraph, embryos: bool, homoclinics: bool) -> bool {
    (embryos || !g.has_embryo()) && (homoclinics || !g.has_homoclinic())
}

/// Every valid instance with at most `max_saddles` saddle-like points that the
/// generator reaches, one representative per isomorphism class, in canonical
/// labels and sorted by canonical code.
pub fn enumerate_foliations(max_saddles: usize, allow_embryos: bool, allow_homoclinics: bool) -> Result<Vec<FoliationGraph>> {
    if max_saddles > MAX_ENUMERATION_SADDLES {
        return Err(Error::Rejected(format!(
            "enumeration is limited to {MAX_ENUMERATION_SADDLES} saddles"
        )));
    }
    let mut levels: Vec<Shapes> = vec![Shapes::new()];
    insert(&mut levels[0], fixtures::std());
    for k in 1..=max_saddles {
        let mut next = Shapes::new();
        for g in levels[k - 1].values() {
            for r in births(g) {
                let r = shape(&r);
                if admissible(&r, allow_embryos, allow_homoclinics) {
                    insert(&mut next, r);
                }
            }
        }
        if allow_embryos {
            let mut frontier: Vec<FoliationGraph> = next.values().cloned().collect();
            while let Some(g) = frontier.pop() {
                for r in merges(&g) {
                    if admissible(&r, true, allow_homoclinics) && insert(&mut next, r.clone()) {
                        frontier.push(r);
                    }
                }
            }
        }
        let closed: Vec<FoliationGraph> = next.values().cloned().collect();
        for g in closed {
            insert(&mut next, shape(&g.reverse()));
            insert(&mut next, g.mirror());
        }
        levels.push(next);
    }

    let mut all = Shapes::new();
    for g in levels.iter().flat_map(|l| l.values()) {
        let hyps: Vec<String> = g
            .points()
            .filter(|p| p.kind == PointKind::Hyperbolic)
            .map(|p| p.id.clone())
            .collect();
        for mask in 0u32..(1 << hyps.len()) {
            let signs = hyps
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let s = if mask >> i & 1 == 1 { Sign::Negative } else { Sign::Positive };
                    (h.clone(), s)
                })
                .collect();
            if let Some(c) = canonical_relabel(&g.with_signs(&signs)) {
                insert(&mut all, c);
            }
        }
    }
    Ok(all.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::isomorphic;
    use crate::validate::validate;

    #[test]
    fn zero_saddles_is_std() {
        let u = enumerate_foliations(0, true, true).unwrap();
        assert_eq!(u.len(), 1);
        assert!(isomorphic(&u[0], &fixtures::std()));
    }

    #[test]
    fn one_saddle_contains_the_fixtures() {
        let u = enumerate_foliations(1, false, false).unwrap();
        for g in [fixtures::eh2(), fixtures::negh(), fixtures::loop_plus(), fixtures::loop_plus().reverse()] {
            assert!(u.iter().any(|x| isomorphic(x, &g)));
        }
        assert!(u.iter().all(|g| validate(g).is_valid()));
    }

    #[test]
    fn embryos_appear_when_allowed() {
        let u = enumerate_foliations(1, true, false).unwrap();
        assert!(u.iter().any(|x| isomorphic(x, &fixtures::emb_plus())));
        assert!(u.iter().any(|x| isomorphic(x, &fixtures::emb_minus())));
    }

    #[test]
    fn bound_is_enforced() {
        assert!(enumerate_foliations(MAX_ENUMERATION_SADDLES + 1, false, false).is_err());
    }
}
