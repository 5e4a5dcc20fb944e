//! Named small foliations used throughout the tests and the CLI.

use std::collections::BTreeMap;

use crate::model::{End, FoliationGraph, PointKind, Separatrix, Sign, SingularPoint};

use PointKind::{Elliptic, Embryo, Hyperbolic};
use Sign::{Negative, Positive};

struct Builder(FoliationGraph);

impl Builder {
    fn new() -> Self {
        Builder(FoliationGraph::new())
    }

    fn point(mut self, id: &str, kind: PointKind, sign: Sign) -> Self {
        self.0.add_point(SingularPoint::new(id, kind, sign));
        self
    }

    fn sep(mut self, id: &str, src: (&str, Option<usize>), dst: (&str, Option<usize>)) -> Self {
        let end = |(p, s): (&str, Option<usize>)| End {
            point: p.to_string(),
            slot: s,
        };
        let homoclinic = src.1.is_some() && dst.1.is_some();
        let mut e = Separatrix::new(id, end(src), end(dst));
        e.homoclinic = homoclinic;
        self.0.add_edge(e);
        self
    }

    fn marker(mut self, id: &str, src: &str, dst: &str) -> Self {
        self.0
            .add_edge(Separatrix::new(id, End::at(src), End::at(dst)).marker());
        self
    }

    fn rot(mut self, p: &str, order: &[&str]) -> Self {
        self.0
            .set_rotation(p, order.iter().map(|s| s.to_string()).collect());
        self
    }

    fn build(self) -> FoliationGraph {
        self.0
    }
}

/// One source, one sink and a single marker leaf: the round sphere.
pub fn std() -> FoliationGraph {
    Builder::new()
        .point("p1", Elliptic, Positive)
        .point("n1", Elliptic, Negative)
        .marker("m1", "p1", "n1")
        .rot("p1", &["m1"])
        .rot("n1", &["m1"])
        .build()
}

/// Two positive elliptic points joined through a positive saddle.
pub fn eh2() -> FoliationGraph {
    Builder::new()
        .point("p1", Elliptic, Positive)
        .point("p2", Elliptic, Positive)
        .point("h1", Hyperbolic, Positive)
        .point("n1", Elliptic, Negative)
        .sep("s1", ("p1", None), ("h1", Some(0)))
        .sep("s2", ("p2", None), ("h1", Some(2)))
        .sep("s3", ("h1", Some(1)), ("n1", None))
        .sep("s4", ("h1", Some(3)), ("n1", None))
        .rot("p1", &["s1"])
        .rot("p2", &["s2"])
        .rot("n1", &["s3", "s4"])
        .build()
}

fn loop_shape(sign: Sign) -> FoliationGraph {
    Builder::new()
        .point("p1", Elliptic, Positive)
        .point("h1", Hyperbolic, sign)
        .point("n1", Elliptic, Negative)
        .point("n2", Elliptic, Negative)
        .sep("s1", ("p1", None), ("h1", Some(0)))
        .sep("s2", ("p1", None), ("h1", Some(2)))
        .sep("s3", ("h1", Some(1)), ("n1", None))
        .sep("s4", ("h1", Some(3)), ("n2", None))
        .rot("p1", &["s1", "s2"])
        .rot("n1", &["s3"])
        .rot("n2", &["s4"])
        .build()
}

/// A negative saddle whose stable separatrices both leave the same source.
pub fn negh() -> FoliationGraph {
    loop_shape(Negative)
}

/// A positive saddle whose stable separatrices both leave the same source.
pub fn loop_plus() -> FoliationGraph {
    loop_shape(Positive)
}

/// A positive embryo fed by the source.
pub fn emb_plus() -> FoliationGraph {
    Builder::new()
        .point("p1", Elliptic, Positive)
        .point("o1", Embryo, Positive)
        .point("n1", Elliptic, Negative)
        .sep("s1", ("p1", None), ("o1", Some(0)))
        .sep("s2", ("o1", Some(1)), ("n1", None))
        .sep("s3", ("o1", Some(2)), ("n1", None))
        .rot("p1", &["s1"])
        .rot("n1", &["s2", "s3"])
        .build()
}

/// A negative embryo draining into the sink, all of its inflow from the source.
pub fn emb_minus() -> FoliationGraph {
    Builder::new()
        .point("p1", Elliptic, Positive)
        .point("o1", Embryo, Negative)
        .point("n1", Elliptic, Negative)
        .sep("s1", ("o1", Some(0)), ("n1", None))
        .sep("s2", ("p1", None), ("o1", Some(1)))
        .sep("s3", ("p1", None), ("o1", Some(2)))
        .rot("p1", &["s2", "s3"])
        .rot("n1", &["s1"])
        .build()
}

/// Two sources joined by two positive saddles: Λ is a 2-cycle.
pub fn cyc() -> FoliationGraph {
    Builder::new()
        .point("p1", Elliptic, Positive)
        .point("p2", Elliptic, Positive)
        .point("h1", Hyperbolic, Positive)
        .point("h2", Hyperbolic, Positive)
        .point("n1", Elliptic, Negative)
        .point("n2", Elliptic, Negative)
        .sep("s1", ("p2", None), ("h1", Some(0)))
        .sep("s2", ("h1", Some(1)), ("n2", None))
        .sep("s3", ("p1", None), ("h1", Some(2)))
        .sep("s4", ("h1", Some(3)), ("n1", None))
        .sep("s5", ("p1", None), ("h2", Some(0)))
        .sep("s6", ("h2", Some(1)), ("n2", None))
        .sep("s7", ("p2", None), ("h2", Some(2)))
        .sep("s8", ("h2", Some(3)), ("n1", None))
        .rot("p1", &["s3", "s5"])
        .rot("p2", &["s1", "s7"])
        .rot("n1", &["s4", "s8"])
        .rot("n2", &["s2", "s6"])
        .build()
}

/// Three basins in a row: p1 - h1 - p2 - h2 - p3, one sink.
pub fn chain3() -> FoliationGraph {
    Builder::new()
        .point("p1", Elliptic, Positive)
        .point("p2", Elliptic, Positive)
        .point("p3", Elliptic, Positive)
        .point("h1", Hyperbolic, Positive)
        .point("h2", Hyperbolic, Positive)
        .point("n1", Elliptic, Negative)
        .sep("s1", ("p2", None), ("h1", Some(0)))
        .sep("s2", ("h1", Some(1)), ("n1", None))
        .sep("s3", ("p1", None), ("h1", Some(2)))
        .sep("s4", ("h1", Some(3)), ("n1", None))
        .sep("s5", ("p3", None), ("h2", Some(0)))
        .sep("s6", ("h2", Some(1)), ("n1", None))
        .sep("s7", ("p2", None), ("h2", Some(2)))
        .sep("s8", ("h2", Some(3)), ("n1", None))
        .rot("p1", &["s3"])
        .rot("p2", &["s1", "s7"])
        .rot("p3", &["s5"])
        .rot("n1", &["s2", "s6", "s8", "s4"])
        .build()
}

/// The three-basin chain closed up by a negative saddle bridging p1 and p3.
pub fn chain3_bridged() -> FoliationGraph {
    Builder::new()
        .point("p1", Elliptic, Positive)
        .point("p2", Elliptic, Positive)
        .point("p3", Elliptic, Positive)
        .point("h1", Hyperbolic, Positive)
        .point("h2", Hyperbolic, Positive)
        .point("h3", Hyperbolic, Negative)
        .point("n1", Elliptic, Negative)
        .point("n2", Elliptic, Negative)
        .sep("s1", ("p2", None), ("h1", Some(0)))
        .sep("s2", ("h1", Some(1)), ("n2", None))
        .sep("s3", ("p1", None), ("h1", Some(2)))
        .sep("s4", ("h1", Some(3)), ("n1", None))
        .sep("s5", ("p3", None), ("h2", Some(0)))
        .sep("s6", ("h2", Some(1)), ("n2", None))
        .sep("s7", ("p2", None), ("h2", Some(2)))
        .sep("s8", ("h2", Some(3)), ("n1", None))
        .sep("s9", ("p1", None), ("h3", Some(0)))
        .sep("s10", ("h3", Some(1)), ("n2", None))
        .sep("s11", ("p3", None), ("h3", Some(2)))
        .sep("s12", ("h3", Some(3)), ("n1", None))
        .rot("p1", &["s3", "s9"])
        .rot("p2", &["s1", "s7"])
        .rot("p3", &["s5", "s11"])
        .rot("n1", &["s8", "s4", "s12"])
        .rot("n2", &["s6", "s10", "s2"])
        .build()
}

/// The named fixture set keyed by its conventional names.
pub fn canonical_fixtures() -> BTreeMap<&'static str, FoliationGraph> {
    BTreeMap::from([
        ("STD", std()),
        ("EH2", eh2()),
        ("NEGH", negh()),
        ("LOOP+", loop_plus()),
        ("EMB+", emb_plus()),
        ("EMB-", emb_minus()),
        ("CYC", cyc()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate;

    #[test]
    fn every_fixture_is_valid() {
        let mut all: Vec<(&str, FoliationGraph)> = canonical_fixtures().into_iter().collect();
        all.push(("CHAIN3", chain3()));
        all.push(("CHAIN3-BRIDGED", chain3_bridged()));
        for (name, g) in all {
            let r = validate(&g);
            assert!(r.is_valid(), "{name}: {:?}", r.violations);
        }
    }

    #[test]
    fn std_counts() {
        let r = validate(&std());
        assert_eq!((r.vertices, r.edges, r.faces), (2, 1, 1));
    }

    #[test]
    fn std_without_marker_is_not_cellular() {
        let mut g = std();
        g.remove_edge("m1");
        g.set_rotation("p1", vec![]);
        g.set_rotation("n1", vec![]);
        let r = validate(&g);
        assert!(r.violations.iter().any(|v| matches!(
            v,
            crate::validate::Violation::NonCellular { vertices: 2, edges: 0, faces: 1 }
        )));
    }

    #[test]
    fn loop_plus_recount() {
        // e+, h+, two sinks; four separatrices; two faces split by the loop
        let r = validate(&loop_plus());
        assert_eq!((r.vertices, r.edges, r.faces), (4, 4, 2));
    }

    #[test]
    fn eh2_counts() {
        let g = eh2();
        assert_eq!(g.count(Elliptic, Positive), 2);
        assert_eq!(g.count(Hyperbolic, Positive), 1);
        assert_eq!(g.d(Positive), 1);
        assert_eq!(g.d(Negative), 1);
    }
}
