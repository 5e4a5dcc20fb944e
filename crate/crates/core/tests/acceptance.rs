//! Acceptance run: one line per criterion. Criteria listed in `KNOWN_RED`
//! are expected to fail and the run fails if one of them passes.

use std::fs;
use std::path::Path;
use std::process::Command;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;

use sphere_taming::ball::{extend_to_ball, verify_decomposition};
use sphere_taming::enumerate::enumerate_foliations;
use sphere_taming::fixtures;
use sphere_taming::format::emit;
use sphere_taming::invariants::{d_invariants, positive_tree, unique_positive_path, Region};
use sphere_taming::moves::{
    create_pair, eliminate_embryo, eliminate_pair, replay, resolve_embryo, resolve_homoclinic, Side, Trajectory,
};
use sphere_taming::taming::{
    eq_simplicity_check, is_lyapunov, is_taming, simplicity_check, sublevel_components, ValueAssignment,
};
use sphere_taming::tightness::{decide_tightness, find_allowable, oracle_tightness, Certificate, Verdict};
use sphere_taming::{FoliationGraph, PointKind, Sign};

const KNOWN_RED: &[usize] = &[6];

type Check = fn(&[Instance]) -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Instance {
    g: FoliationGraph,
    verdict: Verdict,
    certificate: Certificate,
}

fn saddles(g: &FoliationGraph) -> Vec<String> {
    g.points().filter(|p| p.kind.is_saddle_like()).map(|p| p.id.clone()).collect()
}

fn total_orders(g: &FoliationGraph) -> Vec<ValueAssignment> {
    let s = saddles(g);
    let n = s.len();
    s.into_iter()
        .permutations(n)
        .map(|p| {
            let levels: Vec<Vec<String>> = p.into_iter().map(|x| vec![x]).collect();
            ValueAssignment::from_levels(g, &levels)
        })
        .collect()
}

fn verdict(g: &FoliationGraph) -> Verdict {
    decide_tightness(g).expect("decide").verdict
}

fn c1(u: &[Instance]) -> Outcome {
    let bad = u
        .iter()
        .filter(|i| {
            let (p, m) = d_invariants(&i.g, &Region::whole(&i.g)).unwrap();
            p + m != 2
        })
        .count();
    outcome(bad == 0, format!("{} instances, {bad} violations", u.len()))
}

fn c2(u: &[Instance]) -> Outcome {
    let tight: Vec<_> = u.iter().filter(|i| i.verdict == Verdict::Tight).collect();
    let bad = tight
        .iter()
        .filter(|i| d_invariants(&i.g, &Region::whole(&i.g)).unwrap() != (1, 1))
        .count();
    outcome(bad == 0, format!("{} tight, {bad} with d != (1, 1)", tight.len()))
}

fn c3(u: &[Instance]) -> Outcome {
    let (mut n, mut bad, mut searched) = (0, 0, 0);
    for i in u.iter().filter(|i| !i.g.has_homoclinic()) {
        n += 1;
        if oracle_tightness(&i.g).unwrap().verdict != i.verdict {
            bad += 1;
        }
        if matches!(&i.certificate, Certificate::Taming { transcript, .. } if transcript.search) {
            searched += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{n} homoclinic-free, {bad} disagreements, {searched} decided by search"),
    )
}

fn c4(u: &[Instance]) -> Outcome {
    let (mut n, mut bad, mut resolved) = (0, 0, 0);
    for i in u.iter().filter(|i| i.verdict == Verdict::Tight && i.g.saddle_count() > 0) {
        n += 1;
        if find_allowable(&i.g).unwrap().is_some() {
            continue;
        }
        let Certificate::Taming { transcript, .. } = &i.certificate else { unreachable!() };
        let mut h = i.g.clone();
        for r in &transcript.resolutions {
            h = replay(&h, r).unwrap();
        }
        if !transcript.resolutions.is_empty() && find_allowable(&h).unwrap().is_some() {
            resolved += 1;
        } else {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{n} tight, {resolved} needed resolution, {bad} without allowable point"))
}

fn c5(u: &[Instance]) -> Outcome {
    let (mut n, mut bad) = (0, 0);
    for i in u {
        for phi in total_orders(&i.g) {
            if is_taming(&i.g, &phi).unwrap().taming {
                n += 1;
                if !simplicity_check(&i.g, &phi).unwrap().simple {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{n} taming orders, {bad} not simple"))
}

/// Same condition with the largest value on the path instead of the smallest.
fn max_condition(g: &FoliationGraph, phi: &ValueAssignment) -> bool {
    g.points()
        .filter(|p| p.kind == PointKind::Hyperbolic && p.sign == Sign::Negative)
        .all(|h| {
            let src: Vec<_> = g.incoming(&h.id).map(|e| e.source.point.clone()).collect();
            let c = unique_positive_path(g, &src[0], &src[1])
                .unwrap()
                .iter()
                .map(|q| phi.get(q).unwrap().clone())
                .max()
                .unwrap_or_else(BigRational::zero);
            phi.get(&h.id).unwrap() > &c
        })
}

fn c6(u: &[Instance]) -> Outcome {
    let (mut n, mut bad, mut bad_max) = (0, 0, 0);
    let mut first = None;
    for i in u.iter().filter(|i| i.verdict == Verdict::Tight && !i.g.has_homoclinic()) {
        if !positive_tree(&i.g).unwrap().is_tree() {
            continue;
        }
        for phi in total_orders(&i.g) {
            n += 1;
            let t = is_taming(&i.g, &phi).unwrap().taming;
            let l = is_lyapunov(&i.g, &phi).unwrap().lyapunov;
            if t != (l && eq_simplicity_check(&i.g, &phi).unwrap()) {
                bad += 1;
                first.get_or_insert_with(|| phi.levels().iter().map(|(_, p)| p.join(",")).join(" < "));
            }
            if t != (l && max_condition(&i.g, &phi)) {
                bad_max += 1;
            }
        }
    }
    let mut d = format!("{n} orders, {bad} mismatches");
    if let Some(f) = first {
        d += &format!(" (first: {f})");
    }
    d += &format!("; with the path maximum: {bad_max} mismatches");
    outcome(bad == 0, d)
}

fn c7(u: &[Instance]) -> Outcome {
    let (mut n, mut bad) = (0, 0);
    let two = BigRational::from_integer(2.into());
    for i in u {
        for phi in total_orders(&i.g) {
            if !is_taming(&i.g, &phi).unwrap().taming {
                continue;
            }
            let values: Vec<_> = phi.levels().into_iter().map(|(v, _)| v).collect();
            for w in values.windows(2) {
                n += 1;
                let a = (&w[0] + &w[1]) / &two;
                let s = sublevel_components(&i.g, &phi, &a).unwrap();
                if s.components.iter().any(|c| c.d_plus != 1) {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{n} regular thresholds, {bad} with a component of d+ != 1"))
}

fn c8(u: &[Instance]) -> Outcome {
    let (mut n, mut bad) = (0, 0);
    let mut first = None;
    for i in u {
        let Certificate::Taming { assignment, .. } = &i.certificate else { continue };
        n += 1;
        let ok = match extend_to_ball(&i.g, assignment) {
            Ok(d) => verify_decomposition(&d),
            Err(e) => {
                first.get_or_insert(e.to_string());
                false
            }
        };
        bad += usize::from(!ok);
    }
    let mut d = format!("{n} tight, {bad} failures");
    if let Some(f) = first {
        d += &format!(" (first: {f})");
    }
    outcome(bad == 0, d)
}

fn trajectories(g: &FoliationGraph, e: &str) -> Vec<Trajectory> {
    g.rotation(e)
        .unwrap_or_default()
        .iter()
        .flat_map(|x| [Trajectory::Separatrix(x.clone()), Trajectory::Leaf { after: x.clone() }])
        .collect()
}

fn c9(u: &[Instance]) -> Outcome {
    let (mut n, mut bad) = (0, 0);
    let (mut hom_tight, mut hom_flip, mut hom_other) = (0, 0, 0);
    for i in u {
        let g = &i.g;
        let mut results = Vec::new();
        for e in g.points().filter(|p| p.kind == PointKind::Elliptic) {
            for h in g.points().filter(|p| p.kind == PointKind::Hyperbolic) {
                results.push(eliminate_pair(g, &e.id, &h.id));
            }
            if g.saddle_count() < 3 {
                let t = trajectories(g, &e.id);
                for k in 0..t.len() {
                    results.push(create_pair(g, &e.id, &t[k], &t[(k + 1) % t.len()]));
                }
            }
        }
        for o in g.points().filter(|p| p.kind == PointKind::Embryo) {
            results.push(eliminate_embryo(g, &o.id));
            results.push(resolve_embryo(g, &o.id));
        }
        for h in results.into_iter().flatten() {
            n += 1;
            if verdict(&h) != i.verdict {
                bad += 1;
            }
        }
        for e in g.edges().filter(|e| e.homoclinic) {
            for side in [Side::Left, Side::Right] {
                let Ok(h) = resolve_homoclinic(g, &e.id, side) else { continue };
                let v = verdict(&h);
                match i.verdict {
                    Verdict::Tight if v == Verdict::Tight => hom_tight += 1,
                    Verdict::Tight => hom_flip += 1,
                    Verdict::Overtwisted => hom_other += 1,
                }
            }
        }
    }
    outcome(
        bad == 0 && hom_flip == 0,
        format!(
            "{n} pair and embryo moves, {bad} verdict changes; homoclinic resolutions of tight \
             instances: {hom_tight} tight, {hom_flip} not ({hom_other} resolutions of overtwisted ones not compared)"
        ),
    )
}

fn c10(u: &[Instance]) -> Outcome {
    let (mut n, mut bad) = (0, 0);
    for i in u {
        let r = i.g.reverse();
        if verdict(&r) != i.verdict {
            bad += 1;
        }
        for phi in total_orders(&i.g) {
            n += 1;
            let neg = phi.negated();
            let (a, b) = (is_taming(&i.g, &phi).unwrap(), is_taming(&r, &neg).unwrap());
            let mut same = a.taming == b.taming;
            if a.lyapunov.lyapunov {
                same &= simplicity_check(&i.g, &phi).unwrap().simple == simplicity_check(&r, &neg).unwrap().simple;
            }
            bad += usize::from(!same);
        }
    }
    outcome(bad == 0, format!("{} instances, {n} orders, {bad} asymmetries", u.len()))
}

fn cli(args: &[&str], input: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sphere-taming"))
        .args(args)
        .arg("--input")
        .arg(input)
        .output()
        .expect("cli runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn c11(u: &[Instance]) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (input, cert) = (dir.path().join("f.txt"), dir.path().join("c.json"));
    let (mut n, mut bad, mut unstable) = (0, 0, 0);
    for i in u {
        if matches!(i.certificate, Certificate::Exhaustion { .. }) {
            continue;
        }
        n += 1;
        fs::write(&input, emit(&i.g, None)).unwrap();
        let (code, first) = cli(&["decide", "--json"], &input);
        let (_, second) = cli(&["decide", "--json"], &input);
        if first != second {
            unstable += 1;
        }
        let expected = i32::from(i.verdict == Verdict::Overtwisted);
        fs::write(&cert, &first).unwrap();
        let (vcode, _) = cli(&["verify", "--certificate", cert.to_str().unwrap()], &input);
        if code != expected || vcode != 0 {
            bad += 1;
        }
    }
    outcome(
        bad == 0 && unstable == 0,
        format!("{n} certificates, {bad} not re-verified, {unstable} unstable outputs"),
    )
}

fn c12() -> Outcome {
    let mut notes = Vec::new();
    let lp = decide_tightness(&fixtures::loop_plus()).unwrap();
    let lp_ok = lp.verdict == Verdict::Overtwisted
        && matches!(&lp.certificate, Certificate::Polygon { polygon } if polygon.uniform_sign() == Some(Sign::Positive));
    notes.push(format!("LOOP+ {}", if lp_ok { "ok" } else { "wrong" }));
    let eh = decide_tightness(&fixtures::eh2()).unwrap();
    let eh_ok = match &eh.certificate {
        Certificate::Taming { assignment, .. } => {
            let want = ValueAssignment::from_ratios([("p1", 0, 1), ("p2", 0, 1), ("h1", 1, 2), ("n1", 1, 1)]);
            let order = |a: &ValueAssignment| a.levels().into_iter().map(|(_, p)| p).collect::<Vec<_>>();
            order(assignment) == order(&want)
        }
        _ => false,
    };
    notes.push(format!("EH2 {}", if eh_ok { "ok" } else { "wrong" }));
    let ng_ok = decide_tightness(&fixtures::negh()).unwrap().verdict == Verdict::Tight;
    notes.push(format!("NEGH {}", if ng_ok { "ok" } else { "wrong" }));
    outcome(lp_ok && eh_ok && ng_ok, notes.join(", "))
}

fn main() {
    let universe: Vec<Instance> = enumerate_foliations(3, true, true)
        .expect("enumeration")
        .into_iter()
        .map(|g| {
            let r = decide_tightness(&g).expect("decide");
            Instance { g, verdict: r.verdict, certificate: r.certificate }
        })
        .collect();
    let u = &universe;
    let checks: [(usize, &str, Check); 12] = [
        (1, "Euler identity", c1),
        (2, "tight sphere has d+ = d- = 1", c2),
        (3, "decision agrees with the oracle", c3),
        (4, "tight instances have an allowable point", c4),
        (5, "taming implies simple", c5),
        (6, "taming iff Lyapunov and path condition", c6),
        (7, "sublevel components have d+ = 1", c7),
        (8, "ball extension", c8),
        (9, "move invariance", c9),
        (10, "duality", c10),
        (11, "certificate round trip through the CLI", c11),
        (12, "fixture regressions", |_| c12()),
    ];
    let mut unexpected = Vec::new();
    for (k, name, check) in checks {
        let o = check(u);
        println!("criterion {k:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass == KNOWN_RED.contains(&k) {
            unexpected.push(k);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
