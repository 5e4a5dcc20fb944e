//! Local modifications of a foliation as validated graph rewrites.
//!
//! Every move checks its own applicability, works on a copy and validates the
//! result. Negative versions of the elliptic/hyperbolic and embryo moves are
//! obtained by conjugating with [`FoliationGraph::reverse`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::model::{End, FoliationGraph, PointKind, Separatrix, Sign, SingularPoint};
use crate::validate::{compile, validate};

/// A trajectory leaving an elliptic point, named relative to its rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trajectory {
    /// The edge itself.
    Separatrix(String),
    /// A regular leaf in the corner following this edge counter-clockwise.
    Leaf { after: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Towards the next slot counter-clockwise.
    Left,
    /// Towards the previous slot.
    Right,
}

fn inapplicable(msg: impl Into<String>) -> Error {
    Error::Inapplicable(msg.into())
}

/// Dart of edge `e` at point `v` (edges never join a point to itself).
fn dart_at(emb: &Embedding, e: usize, v: usize) -> usize {
    if emb.src[e] == v {
        2 * e
    } else {
        2 * e + 1
    }
}

/// Walks around the blob made of `blob` edges, starting across the blob dart
/// `start`, and returns the darts leaving the blob in counter-clockwise order
/// as seen from the contracted point.
fn contract(emb: &Embedding, start: usize, blob: &BTreeSet<usize>) -> Vec<usize> {
    let in_blob = |d: usize| blob.contains(&Embedding::edge(d));
    let mut out = Vec::new();
    let mut c = start;
    loop {
        c ^= 1;
        if c == start {
            break;
        }
        loop {
            c = emb.succ(c);
            if in_blob(c) {
                break;
            }
            out.push(c);
        }
        if c == start {
            break;
        }
    }
    out
}

fn rotation_vec(g: &FoliationGraph, p: &str) -> Vec<String> {
    g.rotation(p).map(<[String]>::to_vec).unwrap_or_default()
}

fn insert_after(g: &mut FoliationGraph, p: &str, after: &str, new: &[String]) -> Result<()> {
    let mut r = rotation_vec(g, p);
    let i = r
        .iter()
        .position(|x| x == after)
        .ok_or_else(|| Error::Internal(format!("{after} not in rotation of {p}")))?;
    for (k, id) in new.iter().enumerate() {
        r.insert(i + 1 + k, id.clone());
    }
    g.set_rotation(p, r);
    Ok(())
}

fn insert_before(g: &mut FoliationGraph, p: &str, before: &str, new: &str) -> Result<()> {
    let mut r = rotation_vec(g, p);
    let i = r
        .iter()
        .position(|x| x == before)
        .ok_or_else(|| Error::Internal(format!("{before} not in rotation of {p}")))?;
    r.insert(i, new.to_string());
    g.set_rotation(p, r);
    Ok(())
}

fn replace_in_rotation(g: &mut FoliationGraph, p: &str, old: &str, new: &[String]) -> Result<()> {
    let mut r = rotation_vec(g, p);
    let i = r
        .iter()
        .position(|x| x == old)
        .ok_or_else(|| Error::Internal(format!("{old} not in rotation of {p}")))?;
    r.splice(i..=i, new.iter().cloned());
    g.set_rotation(p, r);
    Ok(())
}

/// Removes an edge and its entries in elliptic rotations.
fn remove_edge_fully(g: &mut FoliationGraph, id: &str) {
    let Ok(e) = g.edge(id).cloned() else {
        return;
    };
    for end in [&e.source, &e.target] {
        if let Some(r) = g.rotation(&end.point) {
            let r: Vec<String> = r.iter().filter(|x| *x != id).cloned().collect();
            g.set_rotation(end.point.clone(), r);
        }
    }
    g.remove_edge(id);
}

fn is_elliptic(g: &FoliationGraph, p: &str) -> bool {
    g.point(p).is_ok_and(|p| p.kind == PointKind::Elliptic)
}

/// Drops regular leaves between elliptic points and keeps a marker exactly
/// when there is nothing else to make the graph cellular.
fn normalize_markers(g: &mut FoliationGraph) {
    let plain: Vec<String> = g
        .edges()
        .filter(|e| is_elliptic(g, &e.source.point) && is_elliptic(g, &e.target.point))
        .map(|e| e.id.clone())
        .collect();
    for id in plain {
        remove_edge_fully(g, &id);
    }
    if g.saddle_count() == 0 {
        let p = g.points().find(|p| p.sign == Sign::Positive).map(|p| p.id.clone());
        let n = g.points().find(|p| p.sign == Sign::Negative).map(|p| p.id.clone());
        if let (Some(p), Some(n)) = (p, n) {
            let m = g.fresh_id("m");
            g.add_edge(Separatrix::new(m.clone(), End::at(&p), End::at(&n)).marker());
            g.set_rotation(p, vec![m.clone()]);
            g.set_rotation(n, vec![m]);
        }
    }
}

fn finish(mut g: FoliationGraph) -> Result<FoliationGraph> {
    g.refresh_homoclinic_flags();
    let report = validate(&g);
    match report.violations.first() {
        None => Ok(g),
        Some(v) => Err(Error::Internal(format!("rewrite produced an invalid graph: {v}"))),
    }
}

fn set_source(g: &mut FoliationGraph, edge: &str, end: End) {
    if let Some(e) = g.edge_mut(edge) {
        e.source = end;
    }
}

fn set_target(g: &mut FoliationGraph, edge: &str, end: End) {
    if let Some(e) = g.edge_mut(edge) {
        e.target = end;
    }
}

fn point_index(emb: &Embedding, id: &str) -> Result<usize> {
    emb.index
        .get(id)
        .copied()
        .ok_or_else(|| Error::UnknownPoint(id.to_string()))
}

/// Cancels the elliptic point `e` against the hyperbolic point `h` of the
/// same sign, joined by a separatrix.
pub fn eliminate_pair(g: &FoliationGraph, e: &str, h: &str) -> Result<FoliationGraph> {
    let emb = compile(g)?;
    let (ve, vh) = (point_index(&emb, e)?, point_index(&emb, h)?);
    if emb.kinds[ve] != PointKind::Elliptic || emb.kinds[vh] != PointKind::Hyperbolic {
        return Err(inapplicable(format!("{e} must be elliptic and {h} hyperbolic")));
    }
    if emb.signs[ve] != emb.signs[vh] {
        return Err(inapplicable(format!("{e} and {h} have different signs")));
    }
    if emb.signs[ve] == Sign::Negative {
        return eliminate_pair(&g.reverse(), e, h).map(|r| r.reverse());
    }
    let stables = [Embedding::edge(emb.rot[vh][0]), Embedding::edge(emb.rot[vh][2])];
    let from_e: Vec<usize> = stables.iter().copied().filter(|&k| emb.src[k] == ve).collect();
    let gamma = match from_e.as_slice() {
        [k] => *k,
        [] => return Err(inapplicable(format!("no separatrix joins {e} and {h}"))),
        _ => return Err(inapplicable(format!("both stable separatrices of {h} leave {e}"))),
    };
    let alpha = if stables[0] == gamma { stables[1] } else { stables[0] };
    let x = emb.src[alpha];
    if emb.kinds[x] != PointKind::Elliptic {
        return Err(inapplicable(format!(
            "the other stable separatrix of {h} comes from the saddle {}",
            emb.ids[x]
        )));
    }
    let blob = BTreeSet::from([alpha, gamma]);
    let emitted = contract(&emb, 2 * alpha, &blob);
    let xid = emb.ids[x].clone();
    let mut out = g.clone();
    let ids: Vec<String> = emitted
        .iter()
        .map(|&d| emb.edge_ids[Embedding::edge(d)].clone())
        .collect();
    replace_in_rotation(&mut out, &xid, &emb.edge_ids[alpha], &ids)?;
    for id in &ids {
        set_source(&mut out, id, End::at(&xid));
    }
    out.remove_edge(&emb.edge_ids[alpha]);
    out.remove_edge(&emb.edge_ids[gamma]);
    out.remove_point(e);
    out.remove_point(h);
    normalize_markers(&mut out);
    finish(out)
}

/// Position of a trajectory around a point with `deg` darts: gaps are even,
/// darts odd.
fn trajectory_position(emb: &Embedding, v: usize, t: &Trajectory) -> Result<usize> {
    let deg = emb.rot[v].len();
    let (id, leaf) = match t {
        Trajectory::Separatrix(id) => (id, false),
        Trajectory::Leaf { after } => (after, true),
    };
    let k = *emb
        .edge_index
        .get(id)
        .ok_or_else(|| Error::UnknownEdge(id.clone()))?;
    if emb.src[k] != v && emb.dst[k] != v {
        return Err(inapplicable(format!("{id} does not end at {}", emb.ids[v])));
    }
    let j = emb.pos[dart_at(emb, k, v)];
    Ok(if leaf { 2 * ((j + 1) % deg) } else { 2 * j + 1 })
}

/// Creates an elliptic/hyperbolic pair of the sign of `e` between two
/// adjacent trajectories at `e`; they become the unstable (for a positive
/// `e`) separatrices of the new hyperbolic point.
pub fn create_pair(
    g: &FoliationGraph,
    e: &str,
    first: &Trajectory,
    second: &Trajectory,
) -> Result<FoliationGraph> {
    birth_impl(g, e, first, second, true)
}

/// Like [`create_pair`], but the edges strictly between the two trajectories
/// move to the new elliptic point.
pub fn birth(g: &FoliationGraph, e: &str, first: &Trajectory, second: &Trajectory) -> Result<FoliationGraph> {
    birth_impl(g, e, first, second, false)
}

fn birth_impl(
    g: &FoliationGraph,
    e: &str,
    first: &Trajectory,
    second: &Trajectory,
    adjacent_only: bool,
) -> Result<FoliationGraph> {
    let p = g.point(e)?;
    if p.kind != PointKind::Elliptic {
        return Err(inapplicable(format!("{e} is not elliptic")));
    }
    match p.sign {
        Sign::Positive => birth_positive(g, e, first, second, adjacent_only, "p"),
        Sign::Negative => {
            birth_positive(&g.reverse(), e, first, second, adjacent_only, "n").map(|r| r.reverse())
        }
    }
}

fn birth_positive(
    g: &FoliationGraph,
    e: &str,
    first: &Trajectory,
    second: &Trajectory,
    adjacent_only: bool,
    prefix: &str,
) -> Result<FoliationGraph> {
    let emb = compile(g)?;
    let v = point_index(&emb, e)?;
    let deg = emb.rot[v].len();
    let (p1, p2) = (
        trajectory_position(&emb, v, first)?,
        trajectory_position(&emb, v, second)?,
    );
    if p1 == p2 && p1 % 2 == 1 {
        return Err(inapplicable("the two trajectories coincide"));
    }
    let m = 2 * deg;
    let span = (p2 + m - p1) % m;
    let between: Vec<usize> = (1..span)
        .map(|i| (p1 + i) % m)
        .filter(|q| q % 2 == 1)
        .map(|q| emb.rot[v][q / 2])
        .collect();
    if adjacent_only && !between.is_empty() {
        return Err(inapplicable("trajectories are not adjacent"));
    }
    let rest_len = if span == 0 { m } else { m - span };
    let remaining: Vec<usize> = (1..rest_len)
        .map(|i| (p2 + i) % m)
        .filter(|q| q % 2 == 1)
        .map(|q| emb.rot[v][q / 2])
        .collect();

    let mut out = g.clone();
    let h = out.fresh_id("h");
    out.add_point(SingularPoint::new(&h, PointKind::Hyperbolic, Sign::Positive));
    let e2 = out.fresh_id(prefix);
    out.add_point(SingularPoint::new(&e2, PointKind::Elliptic, Sign::Positive));
    let alpha = out.fresh_id("s");
    out.add_edge(Separatrix::new(&alpha, End::at(e), End::slot(&h, 0)));
    let gamma0 = out.fresh_id("s");
    out.add_edge(Separatrix::new(&gamma0, End::at(&e2), End::slot(&h, 2)));

    // (sink, edge after which to insert, new edge)
    let mut inserts: Vec<(String, String, String)> = Vec::new();
    for (t, q, slot) in [(first, p1, 1), (second, p2, 3)] {
        match t {
            Trajectory::Separatrix(id) => {
                set_source(&mut out, id, End::slot(&h, slot));
                if let Some(edge) = out.edge_mut(id) {
                    edge.marker = false;
                }
            }
            Trajectory::Leaf { .. } => {
                let gap = q / 2;
                let arrive = emb.rot[v][(gap + deg - 1) % deg];
                let face = &emb.faces[emb.face_of_corner(arrive)];
                let sink = face
                    .sink()
                    .ok_or_else(|| Error::Internal("face without sink".into()))?;
                if emb.kinds[sink.vertex] != PointKind::Elliptic {
                    return Err(inapplicable("the leaf ends at an embryo"));
                }
                let u = out.fresh_id("s");
                out.add_edge(Separatrix::new(&u, End::slot(&h, slot), End::at(&emb.ids[sink.vertex])));
                inserts.push((
                    emb.ids[sink.vertex].clone(),
                    emb.edge_ids[Embedding::edge(sink.arrive)].clone(),
                    u,
                ));
            }
        }
    }
    if inserts.len() == 2 && inserts[0].0 == inserts[1].0 && inserts[0].1 == inserts[1].1 {
        let (t, after) = (inserts[0].0.clone(), inserts[0].1.clone());
        insert_after(&mut out, &t, &after, &[inserts[1].2.clone(), inserts[0].2.clone()])?;
    } else {
        for (t, after, u) in &inserts {
            insert_after(&mut out, t, after, std::slice::from_ref(u))?;
        }
    }

    let mut rot_e: Vec<String> = remaining
        .iter()
        .map(|&d| emb.edge_ids[Embedding::edge(d)].clone())
        .collect();
    rot_e.push(alpha);
    out.set_rotation(e, rot_e);
    let mut rot_e2 = vec![gamma0];
    for &d in &between {
        let id = emb.edge_ids[Embedding::edge(d)].clone();
        set_source(&mut out, &id, End::at(&e2));
        rot_e2.push(id);
    }
    out.set_rotation(&e2, rot_e2);
    normalize_markers(&mut out);
    finish(out)
}

/// Removes an embryo, concatenating its lone separatrix with the half-plane
/// of trajectories it bounded.
pub fn eliminate_embryo(g: &FoliationGraph, o: &str) -> Result<FoliationGraph> {
    let emb = compile(g)?;
    let vo = point_index(&emb, o)?;
    if emb.kinds[vo] != PointKind::Embryo {
        return Err(inapplicable(format!("{o} is not an embryo")));
    }
    if emb.signs[vo] == Sign::Negative {
        return eliminate_embryo(&g.reverse(), o).map(|r| r.reverse());
    }
    let iota = Embedding::edge(emb.rot[vo][0]);
    let x = emb.src[iota];
    let mut out = g.clone();
    if emb.kinds[x] == PointKind::Elliptic {
        let emitted = contract(&emb, 2 * iota, &BTreeSet::from([iota]));
        let xid = emb.ids[x].clone();
        let ids: Vec<String> = emitted
            .iter()
            .map(|&d| emb.edge_ids[Embedding::edge(d)].clone())
            .collect();
        replace_in_rotation(&mut out, &xid, &emb.edge_ids[iota], &ids)?;
        for id in &ids {
            set_source(&mut out, id, End::at(&xid));
        }
        out.remove_edge(&emb.edge_ids[iota]);
        out.remove_point(o);
        normalize_markers(&mut out);
        return finish(out);
    }
    // fed by a saddle: the separatrix continues into the sink of the half-plane
    let face = &emb.faces[emb.face_of_corner(emb.rot[vo][1])];
    let sink = face
        .sink()
        .ok_or_else(|| Error::Internal("face without sink".into()))?;
    if emb.kinds[sink.vertex] != PointKind::Elliptic {
        return Err(inapplicable("the half-plane of the embryo drains into a saddle"));
    }
    for slot in [1, 2] {
        let k = Embedding::edge(emb.rot[vo][slot]);
        if emb.kinds[emb.dst[k]] != PointKind::Elliptic {
            return Err(inapplicable("an unstable separatrix of the embryo is homoclinic"));
        }
    }
    let t = emb.ids[sink.vertex].clone();
    let iota_id = emb.edge_ids[iota].clone();
    set_target(&mut out, &iota_id, End::at(&t));
    insert_after(
        &mut out,
        &t,
        &emb.edge_ids[Embedding::edge(sink.arrive)],
        std::slice::from_ref(&iota_id),
    )?;
    for slot in [1, 2] {
        remove_edge_fully(&mut out, &emb.edge_ids[Embedding::edge(emb.rot[vo][slot])]);
    }
    out.remove_point(o);
    finish(out)
}

/// Replaces an embryo by an elliptic/hyperbolic pair of the same sign.
pub fn resolve_embryo(g: &FoliationGraph, o: &str) -> Result<FoliationGraph> {
    let emb = compile(g)?;
    let vo = point_index(&emb, o)?;
    if emb.kinds[vo] != PointKind::Embryo {
        return Err(inapplicable(format!("{o} is not an embryo")));
    }
    if emb.signs[vo] == Sign::Negative {
        return resolve_embryo_positive(&g.reverse(), o, "n").map(|r| r.reverse());
    }
    resolve_embryo_positive(g, o, "p")
}

fn resolve_embryo_positive(g: &FoliationGraph, o: &str, prefix: &str) -> Result<FoliationGraph> {
    let emb = compile(g)?;
    let vo = point_index(&emb, o)?;
    let slot_edge = |s: usize| emb.edge_ids[Embedding::edge(emb.rot[vo][s])].clone();
    let (iota, w1, w2) = (slot_edge(0), slot_edge(1), slot_edge(2));
    let mut out = g.clone();
    out.remove_point(o);
    let h = out.fresh_id("h");
    out.add_point(SingularPoint::new(&h, PointKind::Hyperbolic, Sign::Positive));
    let e = out.fresh_id(prefix);
    out.add_point(SingularPoint::new(&e, PointKind::Elliptic, Sign::Positive));
    let gamma0 = out.fresh_id("s");
    out.add_edge(Separatrix::new(&gamma0, End::at(&e), End::slot(&h, 2)));
    out.set_rotation(&e, vec![gamma0]);
    set_target(&mut out, &iota, End::slot(&h, 0));
    set_source(&mut out, &w1, End::slot(&h, 1));
    set_source(&mut out, &w2, End::slot(&h, 3));
    finish(out)
}

/// Inverse of [`resolve_embryo`]: merges `h` with the degree-one elliptic
/// point `e` of the same sign that feeds it (drains it, when negative).
pub(crate) fn merge_into_embryo(g: &FoliationGraph, e: &str, h: &str) -> Result<FoliationGraph> {
    let hp = g.point(h)?;
    if hp.kind != PointKind::Hyperbolic {
        return Err(inapplicable(format!("{h} is not hyperbolic")));
    }
    if hp.sign == Sign::Negative {
        return merge_positive(&g.reverse(), e, h).map(|r| r.reverse());
    }
    merge_positive(g, e, h)
}

fn merge_positive(g: &FoliationGraph, e: &str, h: &str) -> Result<FoliationGraph> {
    let emb = compile(g)?;
    let (ve, vh) = (point_index(&emb, e)?, point_index(&emb, h)?);
    if emb.kinds[ve] != PointKind::Elliptic || emb.signs[ve] != Sign::Positive || emb.rot[ve].len() != 1 {
        return Err(inapplicable(format!("{e} is not a degree-one source")));
    }
    let slot_edge = |s: usize| emb.edge_ids[Embedding::edge(emb.rot[vh][s])].clone();
    let [iota, w1, w2] = match (0..4).find(|&s| s % 2 == 0 && emb.src[Embedding::edge(emb.rot[vh][s])] == ve) {
        Some(2) => [slot_edge(0), slot_edge(1), slot_edge(3)],
        Some(_) => [slot_edge(2), slot_edge(3), slot_edge(1)],
        None => return Err(inapplicable(format!("{e} does not feed {h}"))),
    };
    if emb.src[emb.edge_index[&iota]] == ve {
        return Err(inapplicable(format!("{e} feeds {h} twice")));
    }
    let mut out = g.clone();
    out.remove_edge(&emb.edge_ids[Embedding::edge(emb.rot[ve][0])]);
    out.remove_point(e);
    out.remove_point(h);
    let o = out.fresh_id("o");
    out.add_point(SingularPoint::new(&o, PointKind::Embryo, Sign::Positive));
    set_target(&mut out, &iota, End::slot(&o, 0));
    set_source(&mut out, &w1, End::slot(&o, 1));
    set_source(&mut out, &w2, End::slot(&o, 2));
    normalize_markers(&mut out);
    finish(out)
}

/// True when one of the faces at `h` is a triangle closed by a marker leaf,
/// the trace of an earlier bypass.
fn is_bypassed(emb: &Embedding, vh: usize) -> bool {
    emb.rot[vh].iter().any(|&d| {
        let f = &emb.faces[emb.dart_face[d]];
        f.darts.len() == 3 && f.darts.iter().any(|&x| emb.marker[Embedding::edge(x)])
    })
}

/// Splices an adjacent stable/unstable pair of `h` into a leaf running past
/// `h` from the source of the stable separatrix to the target of the
/// unstable one.
pub fn bypass_hyperbolic(g: &FoliationGraph, h: &str, stable: usize, unstable: usize) -> Result<FoliationGraph> {
    let emb = compile(g)?;
    let vh = point_index(&emb, h)?;
    if emb.kinds[vh] != PointKind::Hyperbolic {
        return Err(inapplicable(format!("{h} is not hyperbolic")));
    }
    if stable >= 4 || unstable >= 4 || !stable.is_multiple_of(2) || unstable % 2 != 1 {
        return Err(inapplicable("slot mismatch: need an even stable and an odd unstable slot"));
    }
    let next = unstable == (stable + 1) % 4;
    if !next && unstable != (stable + 3) % 4 {
        return Err(inapplicable("slots are not adjacent"));
    }
    if is_bypassed(&emb, vh) {
        return Err(Error::Rejected(format!("{h} has already been bypassed")));
    }
    let es = Embedding::edge(emb.rot[vh][stable]);
    let eu = Embedding::edge(emb.rot[vh][unstable]);
    let (a, b) = (emb.src[es], emb.dst[eu]);
    if emb.kinds[a] != PointKind::Elliptic || emb.kinds[b] != PointKind::Elliptic {
        return Err(inapplicable("bypass needs elliptic ends on both separatrices"));
    }
    let mut out = g.clone();
    let t = out.fresh_id("m");
    out.add_edge(Separatrix::new(&t, End::at(&emb.ids[a]), End::at(&emb.ids[b])).marker());
    let (sid, uid) = (emb.edge_ids[es].clone(), emb.edge_ids[eu].clone());
    if next {
        insert_before(&mut out, &emb.ids[a], &sid, &t)?;
        insert_after(&mut out, &emb.ids[b], &uid, std::slice::from_ref(&t))?;
    } else {
        insert_after(&mut out, &emb.ids[a], &sid, std::slice::from_ref(&t))?;
        insert_before(&mut out, &emb.ids[b], &uid, &t)?;
    }
    finish(out)
}

/// Perturbs the homoclinic separatrix `edge` off its target saddle towards
/// `side`; the stable slot it vacates is refilled from the other side.
pub fn resolve_homoclinic(g: &FoliationGraph, edge: &str, side: Side) -> Result<FoliationGraph> {
    let emb = compile(g)?;
    let k = *emb
        .edge_index
        .get(edge)
        .ok_or_else(|| Error::UnknownEdge(edge.to_string()))?;
    let sep = g.edge(edge)?;
    if !sep.homoclinic {
        return Err(inapplicable(format!("{edge} is not homoclinic")));
    }
    let y = emb.dst[k];
    let n = emb.rot[y].len();
    let s = sep.target.slot.unwrap_or(0);
    let (side_arrive, other_arrive) = match side {
        Side::Left => (emb.rot[y][s], emb.rot[y][(s + n - 1) % n]),
        Side::Right => (emb.rot[y][(s + n - 1) % n], emb.rot[y][s]),
    };
    let f_side = &emb.faces[emb.face_of_corner(side_arrive)];
    let f_other = &emb.faces[emb.face_of_corner(other_arrive)];
    let sink = f_side
        .sink()
        .ok_or_else(|| Error::Internal("face without sink".into()))?;
    let source = f_other
        .source()
        .ok_or_else(|| Error::Internal("face without source".into()))?;
    if emb.kinds[sink.vertex] != PointKind::Elliptic {
        return Err(inapplicable("that side drains into a saddle"));
    }
    if emb.kinds[source.vertex] != PointKind::Elliptic {
        return Err(inapplicable("the opposite side is fed by an embryo"));
    }
    let mut out = g.clone();
    let t = emb.ids[sink.vertex].clone();
    set_target(&mut out, edge, End::at(&t));
    insert_after(
        &mut out,
        &t,
        &emb.edge_ids[Embedding::edge(sink.arrive)],
        &[edge.to_string()],
    )?;
    let z = emb.ids[source.vertex].clone();
    let nu = out.fresh_id("s");
    out.add_edge(Separatrix::new(&nu, End::at(&z), End::slot(&emb.ids[y], s)));
    insert_after(&mut out, &z, &emb.edge_ids[Embedding::edge(source.arrive)], &[nu])?;
    finish(out)
}

/// Cuts the sphere along the loop formed by the two stable separatrices of a
/// negative hyperbolic point `h` whose sources coincide. Each side is closed
/// up by the common source, which absorbs the loop and everything beyond it.
pub(crate) fn split_along_loop(g: &FoliationGraph, h: &str) -> Result<(FoliationGraph, FoliationGraph)> {
    let emb = compile(g)?;
    let vh = point_index(&emb, h)?;
    let (s1, s2) = (Embedding::edge(emb.rot[vh][0]), Embedding::edge(emb.rot[vh][2]));
    let e = emb.src[s1];
    if emb.kinds[vh] != PointKind::Hyperbolic || emb.src[s2] != e || emb.kinds[e] != PointKind::Elliptic {
        return Err(inapplicable(format!("{h} is not fed twice by one elliptic point")));
    }
    let blob = BTreeSet::from([s1, s2]);
    let side = |start: usize| -> Result<FoliationGraph> {
        let emitted = contract(&emb, start, &blob);
        let mut keep = vec![false; emb.point_count()];
        let mut stack: Vec<usize> = emitted.iter().map(|&d| emb.other(d)).collect();
        while let Some(v) = stack.pop() {
            if v == e || v == vh || keep[v] {
                continue;
            }
            keep[v] = true;
            stack.extend(emb.rot[v].iter().map(|&d| emb.other(d)));
        }
        keep[e] = true;
        let mut out = FoliationGraph::new();
        for v in (0..emb.point_count()).filter(|&v| keep[v]) {
            out.add_point(g.point(&emb.ids[v])?.clone());
        }
        let ids: Vec<String> = emitted
            .iter()
            .map(|&d| emb.edge_ids[Embedding::edge(d)].clone())
            .collect();
        for k in 0..emb.edge_count() {
            let id = &emb.edge_ids[k];
            if keep[emb.src[k]] && keep[emb.dst[k]] || ids.contains(id) {
                let mut edge = g.edge(id)?.clone();
                if emb.src[k] == vh {
                    edge.source = End::at(&emb.ids[e]);
                }
                out.add_edge(edge);
            }
        }
        for (p, r) in g.rotations() {
            if out.has_point(p) && *p != emb.ids[e] {
                out.set_rotation(p.clone(), r.clone());
            }
        }
        out.set_rotation(&emb.ids[e], ids);
        normalize_markers(&mut out);
        finish(out)
    };
    Ok((side(2 * s1)?, side(2 * s2)?))
}

/// A move with its arguments, replayable on the pre-state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    EliminatePair { elliptic: String, hyperbolic: String },
    CreatePair { elliptic: String, first: Trajectory, second: Trajectory },
    Birth { elliptic: String, first: Trajectory, second: Trajectory },
    EliminateEmbryo { embryo: String },
    ResolveEmbryo { embryo: String },
    BypassHyperbolic { hyperbolic: String, stable: usize, unstable: usize },
    ResolveHomoclinic { edge: String, side: Side },
}

impl Move {
    pub fn apply(&self, g: &FoliationGraph) -> Result<FoliationGraph> {
        match self {
            Move::EliminatePair { elliptic, hyperbolic } => eliminate_pair(g, elliptic, hyperbolic),
            Move::CreatePair { elliptic, first, second } => create_pair(g, elliptic, first, second),
            Move::Birth { elliptic, first, second } => birth(g, elliptic, first, second),
            Move::EliminateEmbryo { embryo } => eliminate_embryo(g, embryo),
            Move::ResolveEmbryo { embryo } => resolve_embryo(g, embryo),
            Move::BypassHyperbolic { hyperbolic, stable, unstable } => {
                bypass_hyperbolic(g, hyperbolic, *stable, *unstable)
            }
            Move::ResolveHomoclinic { edge, side } => resolve_homoclinic(g, edge, *side),
        }
    }
}

/// Audit entry: the move plus the ids it removed and introduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    #[serde(flatten)]
    pub step: Move,
    pub removed: Vec<String>,
    pub added: Vec<String>,
}

fn all_ids(g: &FoliationGraph) -> BTreeSet<String> {
    g.points()
        .map(|p| p.id.clone())
        .chain(g.edges().map(|e| e.id.clone()))
        .collect()
}

/// Applies a move and records it.
pub fn apply_recorded(g: &FoliationGraph, step: Move) -> Result<(FoliationGraph, MoveRecord)> {
    let out = step.apply(g)?;
    let (before, after) = (all_ids(g), all_ids(&out));
    let record = MoveRecord {
        step,
        removed: before.difference(&after).cloned().collect(),
        added: after.difference(&before).cloned().collect(),
    };
    Ok((out, record))
}

/// Replays a record and checks that it touches the same ids.
pub fn replay(g: &FoliationGraph, record: &MoveRecord) -> Result<FoliationGraph> {
    let (out, again) = apply_recorded(g, record.step.clone())?;
    if again != *record {
        return Err(Error::Rejected("record does not match its replay".into()));
    }
    Ok(out)
}
