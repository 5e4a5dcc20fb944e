//! Canonical forms of embedded foliation graphs up to orientation-preserving
//! isomorphism.

use std::collections::{BTreeMap, VecDeque};

use crate::embedding::Embedding;
use crate::model::{End, FoliationGraph, PointKind, Separatrix, Sign, SingularPoint};

/// Result of a canonical traversal: the invariant code plus the traversal order
/// that realizes it.
#[derive(Debug, Clone)]
struct Traversal {
    code: Vec<u32>,
    points: Vec<usize>,
    edges: Vec<usize>,
}

fn traverse(emb: &Embedding, root: usize) -> Traversal {
    let n = emb.point_count();
    let mut label = vec![u32::MAX; n];
    let mut start = vec![usize::MAX; n];
    let mut seen_edge = vec![false; emb.edge_count()];
    let mut points = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(emb.edge_count());
    let mut code = Vec::new();
    let mut queue = VecDeque::new();

    let r = emb.vertex(root);
    label[r] = 0;
    start[r] = root;
    points.push(r);
    queue.push_back(r);
    while let Some(v) = queue.pop_front() {
        let deg = emb.rot[v].len();
        code.push(emb.kinds[v] as u32);
        code.push(emb.signs[v] as u32);
        code.push(deg as u32);
        let p0 = emb.pos[start[v]];
        for i in 0..deg {
            let d = emb.rot[v][(p0 + i) % deg];
            let w = emb.other(d);
            let twin = d ^ 1;
            if label[w] == u32::MAX {
                label[w] = points.len() as u32;
                start[w] = twin;
                points.push(w);
                queue.push_back(w);
            }
            let e = Embedding::edge(d);
            if !seen_edge[e] {
                seen_edge[e] = true;
                edges.push(e);
            }
            let dw = emb.rot[w].len();
            let rel = (emb.pos[twin] + dw - emb.pos[start[w]]) % dw;
            code.push(u32::from(Embedding::is_out(d)));
            code.push(u32::from(emb.marker[e]));
            code.push(label[w]);
            code.push(rel as u32);
        }
    }
    // unreachable points (invalid input) are appended in index order
    for v in 0..n {
        if label[v] == u32::MAX {
            points.push(v);
            code.extend([u32::MAX, emb.kinds[v] as u32, emb.signs[v] as u32]);
        }
    }
    Traversal { code, points, edges }
}

fn best(emb: &Embedding) -> Traversal {
    let darts = 2 * emb.edge_count();
    if darts == 0 {
        let mut order: Vec<usize> = (0..emb.point_count()).collect();
        order.sort_by_key(|&v| (emb.kinds[v], emb.signs[v]));
        let code = order
            .iter()
            .flat_map(|&v| [emb.kinds[v] as u32, emb.signs[v] as u32, 0])
            .collect();
        return Traversal {
            code,
            points: order,
            edges: Vec::new(),
        };
    }
    (0..darts)
        .map(|d| traverse(emb, d))
        .min_by(|a, b| a.code.cmp(&b.code))
        .expect("at least one dart")
}

/// A complete isomorphism invariant. Two graphs that embed are isomorphic
/// (by an orientation-preserving map respecting kinds, signs, directions and
/// markers) exactly when their codes agree.
pub fn canonical_code(g: &FoliationGraph) -> Option<Vec<u32>> {
    Embedding::build(g).ok().map(|emb| best(&emb).code)
}

pub fn isomorphic(f: &FoliationGraph, g: &FoliationGraph) -> bool {
    match (canonical_code(f), canonical_code(g)) {
        (Some(a), Some(b)) => a == b,
        _ => f == g,
    }
}

fn prefix(kind: PointKind, sign: Sign) -> &'static str {
    match (kind, sign) {
        (PointKind::Elliptic, Sign::Positive) => "p",
        (PointKind::Elliptic, Sign::Negative) => "n",
        (PointKind::Hyperbolic, _) => "h",
        (PointKind::Embryo, _) => "o",
    }
}

/// Relabels points and edges in canonical traversal order and fixes the
/// remaining slot freedom, so isomorphic graphs become equal values.
pub fn canonical_relabel(g: &FoliationGraph) -> Option<FoliationGraph> {
    let emb = Embedding::build(g).ok()?;
    let t = best(&emb);
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    let mut pname = vec![String::new(); emb.point_count()];
    for &v in &t.points {
        let pre = prefix(emb.kinds[v], emb.signs[v]);
        let c = counters.entry(pre).or_insert(0);
        *c += 1;
        pname[v] = format!("{pre}{c}");
    }
    let mut ename = vec![String::new(); emb.edge_count()];
    let mut erank = vec![0; emb.edge_count()];
    let (mut ns, mut nm) = (0, 0);
    for (i, &e) in t.edges.iter().enumerate() {
        erank[e] = i;
        ename[e] = if emb.marker[e] {
            nm += 1;
            format!("m{nm}")
        } else {
            ns += 1;
            format!("s{ns}")
        };
    }

    // hyperbolic slots are defined up to a half turn; put the earlier
    // incoming edge in slot 0
    let mut shift = vec![0usize; emb.point_count()];
    for v in 0..emb.point_count() {
        if emb.kinds[v] == PointKind::Hyperbolic {
            let e0 = Embedding::edge(emb.rot[v][0]);
            let e2 = Embedding::edge(emb.rot[v][2]);
            if erank[e2] < erank[e0] {
                shift[v] = 2;
            }
        }
    }

    let mut out = FoliationGraph::new();
    for v in 0..emb.point_count() {
        out.add_point(SingularPoint::new(pname[v].clone(), emb.kinds[v], emb.signs[v]));
    }
    for e in g.edges() {
        let k = emb.edge_index[&e.id];
        let end = |x: &End| -> End {
            let v = emb.index[&x.point];
            End {
                point: pname[v].clone(),
                slot: x.slot.map(|s| match emb.kinds[v] {
                    PointKind::Hyperbolic => (s + 4 - shift[v]) % 4,
                    _ => s,
                }),
            }
        };
        out.add_edge(Separatrix {
            id: ename[k].clone(),
            source: end(&e.source),
            target: end(&e.target),
            marker: e.marker,
            homoclinic: e.homoclinic,
        });
    }
    for v in 0..emb.point_count() {
        if emb.kinds[v] == PointKind::Elliptic {
            let order = emb.rot[v]
                .iter()
                .map(|&d| ename[Embedding::edge(d)].clone())
                .collect();
            out.set_rotation(pname[v].clone(), order);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn relabeling_preserves_the_class() {
        let g = fixtures::cyc();
        let mut pm = BTreeMap::new();
        pm.insert("p1".to_string(), "zz".to_string());
        pm.insert("h2".to_string(), "a".to_string());
        let mut em = BTreeMap::new();
        em.insert("s1".to_string(), "x9".to_string());
        let r = g.relabeled(&pm, &em);
        assert!(isomorphic(&g, &r));
        assert_eq!(canonical_relabel(&g), canonical_relabel(&r));
    }

    #[test]
    fn signs_distinguish() {
        assert!(!isomorphic(&fixtures::negh(), &fixtures::loop_plus()));
    }

    #[test]
    fn canonical_relabel_is_valid() {
        for (name, g) in fixtures::canonical_fixtures() {
            let c = canonical_relabel(&g).unwrap();
            assert!(crate::validate(&c).is_valid(), "{name}");
            assert!(isomorphic(&g, &c), "{name}");
            assert_eq!(canonical_relabel(&c).unwrap(), c, "{name}");
        }
    }

    #[test]
    fn reverse_of_emb_plus_is_emb_minus_shape() {
        // reversing flips the embryo sign and its flow
        let r = fixtures::emb_plus().reverse();
        assert!(crate::validate(&r).is_valid());
        assert!(isomorphic(&r.mirror(), &fixtures::emb_minus()) || isomorphic(&r, &fixtures::emb_minus()));
    }
}
