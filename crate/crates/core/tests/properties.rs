use num_rational::BigRational;
use proptest::prelude::*;

use sphere_taming::canonical::{canonical_code, isomorphic};
use sphere_taming::fixtures;
use sphere_taming::format::{emit, parse};
use sphere_taming::invariants::{d_invariants, Region};
use sphere_taming::moves::{birth, create_pair, Trajectory};
use sphere_taming::taming::{eq_simplicity_check, is_lyapunov, is_taming, simplicity_check, ValueAssignment};
use sphere_taming::tightness::{decide_tightness, verify_certificate};
use sphere_taming::{validate, FoliationGraph, PointKind, Sign};

/// Applies up to `steps.len()` births or pair creations chosen by index.
fn walk(steps: &[(usize, usize, usize, bool)]) -> FoliationGraph {
    let mut g = fixtures::std();
    for &(e, a, b, create) in steps {
        let ell: Vec<String> = g
            .points()
            .filter(|p| p.kind == PointKind::Elliptic)
            .map(|p| p.id.clone())
            .collect();
        let e = &ell[e % ell.len()];
        let t: Vec<Trajectory> = g
            .rotation(e)
            .unwrap_or_default()
            .iter()
            .flat_map(|x| [Trajectory::Separatrix(x.clone()), Trajectory::Leaf { after: x.clone() }])
            .collect();
        let (a, b) = (&t[a % t.len()], &t[b % t.len()]);
        let next = if create { create_pair(&g, e, a, b) } else { birth(&g, e, a, b) };
        if let Ok(h) = next {
            g = h;
        }
    }
    g
}

fn step() -> impl Strategy<Value = (usize, usize, usize, bool)> {
    (0..8usize, 0..16usize, 0..16usize, any::<bool>())
}

fn signed(g: FoliationGraph, bits: u32) -> FoliationGraph {
    let signs = g
        .points()
        .filter(|p| p.kind == PointKind::Hyperbolic)
        .enumerate()
        .map(|(i, p)| (p.id.clone(), if bits >> i & 1 == 1 { Sign::Negative } else { Sign::Positive }))
        .collect();
    g.with_signs(&signs)
}

fn order(g: &FoliationGraph, perm: &[usize]) -> ValueAssignment {
    let mut s: Vec<String> = g.points().filter(|p| p.kind.is_saddle_like()).map(|p| p.id.clone()).collect();
    for (i, &k) in perm.iter().enumerate().take(s.len()) {
        let j = k % s.len();
        s.swap(i, j);
    }
    let levels: Vec<Vec<String>> = s.into_iter().map(|x| vec![x]).collect();
    ValueAssignment::from_levels(g, &levels)
}

/// A strictly increasing reparametrization x -> x^3 + 2x + 7.
fn reparam(phi: &ValueAssignment) -> ValueAssignment {
    let mut out = ValueAssignment::new();
    for (p, x) in phi.iter() {
        let v = x * x * x + x * BigRational::from_integer(2.into()) + BigRational::from_integer(7.into());
        out.set(p.clone(), v);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn walks_stay_valid(steps in prop::collection::vec(step(), 0..4), bits in any::<u32>()) {
        let g = signed(walk(&steps), bits);
        prop_assert!(validate(&g).is_valid());
        let (p, m) = d_invariants(&g, &Region::whole(&g)).unwrap();
        prop_assert_eq!(p + m, 2);
    }

    #[test]
    fn reverse_is_an_involution(steps in prop::collection::vec(step(), 0..4), bits in any::<u32>()) {
        let g = signed(walk(&steps), bits);
        // twice rotates hyperbolic slots by two, a symmetry of the saddle
        prop_assert!(isomorphic(&g.reverse().reverse(), &g));
        prop_assert!(validate(&g.reverse()).is_valid());
    }

    #[test]
    fn documents_round_trip(steps in prop::collection::vec(step(), 0..4), bits in any::<u32>(), perm in prop::collection::vec(0..8usize, 4)) {
        let g = signed(walk(&steps), bits);
        let phi = order(&g, &perm);
        let (back, values) = parse(&emit(&g, Some(&phi))).unwrap();
        prop_assert_eq!(back, g);
        prop_assert_eq!(values, Some(phi));
    }

    #[test]
    fn verdicts_ignore_labels(steps in prop::collection::vec(step(), 0..3), bits in any::<u32>()) {
        let g = signed(walk(&steps), bits);
        let points = g.points().map(|p| (p.id.clone(), format!("{}z", p.id))).collect();
        let edges = g.edges().map(|e| (e.id.clone(), format!("{}z", e.id))).collect();
        let h = g.relabeled(&points, &edges);
        prop_assert_eq!(canonical_code(&g), canonical_code(&h));
        let (a, b) = (decide_tightness(&g).unwrap(), decide_tightness(&h).unwrap());
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!(verify_certificate(&g, &a).unwrap());
    }

    #[test]
    fn duality_on_total_orders(steps in prop::collection::vec(step(), 0..4), bits in any::<u32>(), perm in prop::collection::vec(0..8usize, 4)) {
        let g = signed(walk(&steps), bits);
        let phi = order(&g, &perm);
        let (r, neg) = (g.reverse(), phi.negated());
        let a = is_taming(&g, &phi).unwrap();
        prop_assert_eq!(a.taming, is_taming(&r, &neg).unwrap().taming);
        if a.lyapunov.lyapunov {
            prop_assert_eq!(simplicity_check(&g, &phi).unwrap().simple, simplicity_check(&r, &neg).unwrap().simple);
        }
    }

    #[test]
    fn only_the_order_matters(steps in prop::collection::vec(step(), 0..4), bits in any::<u32>(), perm in prop::collection::vec(0..8usize, 4)) {
        let g = signed(walk(&steps), bits);
        let phi = order(&g, &perm);
        let psi = reparam(&phi);
        prop_assert_eq!(is_taming(&g, &phi).unwrap().taming, is_taming(&g, &psi).unwrap().taming);
        if is_lyapunov(&g, &phi).unwrap().lyapunov {
            let (s, t) = (simplicity_check(&g, &phi).unwrap(), simplicity_check(&g, &psi).unwrap());
            prop_assert_eq!((s.simple, s.refined_simple), (t.simple, t.refined_simple));
            if let Ok(x) = eq_simplicity_check(&g, &phi) {
                prop_assert_eq!(x, eq_simplicity_check(&g, &psi).unwrap());
            }
        }
    }
}
