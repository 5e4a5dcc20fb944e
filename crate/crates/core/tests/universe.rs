use std::collections::BTreeSet;

use sphere_taming::canonical::{canonical_code, isomorphic};
use sphere_taming::enumerate::enumerate_foliations;
use sphere_taming::format::{emit, parse};
use sphere_taming::invariants::{d_invariants, enumerate_polygons, positive_tree, Region};
use sphere_taming::moves::{create_pair, eliminate_pair, Trajectory};
use sphere_taming::tightness::{decide_tightness, verify_certificate, Verdict};
use sphere_taming::{validate, FoliationGraph, PointKind};

fn small() -> Vec<FoliationGraph> {
    enumerate_foliations(2, true, true).unwrap()
}

fn d_sum(g: &FoliationGraph) -> i64 {
    let (p, m) = d_invariants(g, &Region::whole(g)).unwrap();
    p + m
}

#[test]
fn enumerated_instances_are_valid_and_distinct() {
    let u = small();
    let codes: BTreeSet<_> = u.iter().map(|g| canonical_code(g).unwrap()).collect();
    assert_eq!(codes.len(), u.len());
    for g in &u {
        assert!(validate(g).is_valid(), "{}", emit(g, None));
        assert!(g.saddle_count() <= 2);
    }
}

#[test]
fn relabeling_keeps_isomorphism_class() {
    for g in small() {
        let points = g.points().map(|p| (p.id.clone(), format!("x{}", p.id))).collect();
        let edges = g.edges().map(|e| (e.id.clone(), format!("y{}", e.id))).collect();
        let h = g.relabeled(&points, &edges);
        assert!(isomorphic(&g, &h));
        assert_eq!(canonical_code(&g), canonical_code(&h));
    }
}

#[test]
fn eliminations_keep_validity_and_euler_sum() {
    for g in small() {
        for e in g.points().filter(|p| p.kind == PointKind::Elliptic) {
            for h in g.points().filter(|p| p.kind == PointKind::Hyperbolic) {
                if let Ok(out) = eliminate_pair(&g, &e.id, &h.id) {
                    assert!(validate(&out).is_valid());
                    assert_eq!(d_sum(&out), 2);
                    assert_eq!(out.point_count() + 2, g.point_count());
                }
            }
        }
    }
}

#[test]
fn creation_is_undone_by_elimination() {
    let mut checked = 0;
    for g in enumerate_foliations(1, false, false).unwrap() {
        for e in g.points().filter(|p| p.kind == PointKind::Elliptic) {
            let order = g.rotation(&e.id).unwrap_or_default().to_vec();
            let t: Vec<_> = order
                .iter()
                .flat_map(|x| [Trajectory::Separatrix(x.clone()), Trajectory::Leaf { after: x.clone() }])
                .collect();
            for k in 0..t.len() {
                let Ok(c) = create_pair(&g, &e.id, &t[k], &t[(k + 1) % t.len()]) else { continue };
                assert!(validate(&c).is_valid());
                assert_eq!(d_sum(&c), 2);
                let new: Vec<_> = c.point_ids().difference(&g.point_ids()).cloned().collect();
                let ne = new.iter().find(|p| c.point(p).unwrap().kind == PointKind::Elliptic).unwrap();
                let nh = new.iter().find(|p| c.point(p).unwrap().kind == PointKind::Hyperbolic).unwrap();
                let back = eliminate_pair(&c, ne, nh).unwrap();
                assert!(isomorphic(&back, &g), "{}", emit(&g, None));
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn tight_instances_have_a_positive_tree() {
    for g in small().iter().filter(|g| !g.has_homoclinic()) {
        if decide_tightness(g).unwrap().verdict == Verdict::Tight {
            assert!(positive_tree(g).unwrap().is_tree(), "{}", emit(g, None));
        }
    }
}

#[test]
fn uniform_polygons_mean_overtwisted() {
    for g in small() {
        let polys = enumerate_polygons(&g, g.edge_count()).unwrap();
        let r = decide_tightness(&g).unwrap();
        assert!(verify_certificate(&g, &r).unwrap());
        if polys.iter().any(|p| p.uniform_sign().is_some()) {
            assert_eq!(r.verdict, Verdict::Overtwisted, "{}", emit(&g, None));
        }
    }
}

#[test]
fn documents_round_trip() {
    for g in small() {
        let (back, values) = parse(&emit(&g, None)).unwrap();
        assert_eq!(back, g);
        assert!(values.is_none());
    }
}
