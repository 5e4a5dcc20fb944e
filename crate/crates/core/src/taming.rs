//! Value assignments on singular points and the checks built on their
//! sublevel sets: Lyapunov order, function signs of saddles, taming and
//! simplicity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::invariants::{analyze, positive_tree, tree_path, Analysis};
use crate::model::{FoliationGraph, PointKind, Sign};
use crate::validate::compile;

/// Exact rational values on singular points.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValueAssignment {
    values: BTreeMap<String, BigRational>,
}

impl ValueAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, point: impl Into<String>, value: BigRational) -> &mut Self {
        self.values.insert(point.into(), value);
        self
    }

    pub fn get(&self, point: &str) -> Option<&BigRational> {
        self.values.get(point)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// −φ, the assignment matching [`FoliationGraph::reverse`].
    pub fn negated(&self) -> Self {
        ValueAssignment {
            values: self.values.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    /// Builds an assignment from small integer ratios, for tests and fixtures.
    pub fn from_ratios<'a>(pairs: impl IntoIterator<Item = (&'a str, i64, i64)>) -> Self {
        let mut a = Self::new();
        for (p, n, d) in pairs {
            a.set(p, BigRational::new(n.into(), d.into()));
        }
        a
    }

    /// The normal form used by synthesis: positive elliptic points at 0,
    /// negative elliptic points at 1 and the given groups of other points at
    /// `i / (k + 1)` in order.
    pub fn from_levels(g: &FoliationGraph, levels: &[Vec<String>]) -> Self {
        let mut a = Self::new();
        for p in g.points() {
            if p.kind == PointKind::Elliptic {
                let v = if p.sign == Sign::Positive {
                    BigRational::zero()
                } else {
                    BigRational::one()
                };
                a.set(p.id.clone(), v);
            }
        }
        let k = levels.len() as i64;
        for (i, group) in levels.iter().enumerate() {
            for p in group {
                a.set(p.clone(), BigRational::new(BigInt::from(i as i64 + 1), BigInt::from(k + 1)));
            }
        }
        a
    }

    /// Ids grouped by value, in increasing order of value.
    pub fn levels(&self) -> Vec<(BigRational, Vec<String>)> {
        let mut by: BTreeMap<&BigRational, Vec<String>> = BTreeMap::new();
        for (k, v) in &self.values {
            by.entry(v).or_default().push(k.clone());
        }
        by.into_iter().map(|(v, ids)| (v.clone(), ids)).collect()
    }
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| format!("bad numerator {n:?}"))?;
    let d = BigInt::from_str(d).map_err(|_| format!("bad denominator {d:?}"))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(n, d))
}

impl Serialize for ValueAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<&String, String> =
            self.values.iter().map(|(k, v)| (k, format_rational(v))).collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValueAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, String>::deserialize(d)?;
        let mut a = ValueAssignment::new();
        for (k, v) in m {
            a.set(k, parse_rational(&v).map_err(serde::de::Error::custom)?);
        }
        Ok(a)
    }
}

impl fmt::Display for ValueAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(k, v)| format!("{k}={}", format_rational(v)))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Compiled graph plus values indexed by point.
pub(crate) struct Valued {
    pub emb: Embedding,
    pub val: Vec<BigRational>,
}

impl Valued {
    pub fn new(g: &FoliationGraph, phi: &ValueAssignment) -> Result<Self> {
        let emb = compile(g)?;
        let val = emb
            .ids
            .iter()
            .map(|id| {
                phi.get(id)
                    .cloned()
                    .ok_or_else(|| Error::Rejected(format!("no value for {id}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Valued { emb, val })
    }

    /// The sublevel set just below the value `a` (everything strictly less).
    pub fn below(&self, a: &BigRational) -> Result<Analysis> {
        let inside: Vec<bool> = self.val.iter().map(|v| v < a).collect();
        analyze(&self.emb, &inside)
    }

    pub fn stable_edges(&self, h: usize) -> [usize; 2] {
        let r = &self.emb.rot[h];
        [Embedding::edge(r[0]), Embedding::edge(r[2])]
    }

    /// Distinct values carried by saddle-like points, increasing.
    pub fn critical_levels(&self) -> Vec<BigRational> {
        let set: BTreeSet<&BigRational> = (0..self.emb.point_count())
            .filter(|&v| self.emb.kinds[v].is_saddle_like())
            .map(|v| &self.val[v])
            .collect();
        set.into_iter().cloned().collect()
    }

    pub fn fn_sign(&self, h: usize) -> Result<FnSign> {
        let a = self.below(&self.val[h])?;
        let [e0, e1] = self.stable_edges(h);
        let (c0, c1) = (a.circle_of_edge[e0], a.circle_of_edge[e1]);
        if c0 == usize::MAX || c1 == usize::MAX {
            return Err(Error::Rejected("assignment is not Lyapunov".into()));
        }
        Ok(if c0 == c1 {
            FnSign::FnNegative
        } else {
            FnSign::FnPositive
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LyapunovViolation {
    Edge { edge: String },
    Face { source: String, sink: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LyapunovReport {
    pub lyapunov: bool,
    pub violations: Vec<LyapunovViolation>,
}

pub fn is_lyapunov(g: &FoliationGraph, phi: &ValueAssignment) -> Result<LyapunovReport> {
    let v = Valued::new(g, phi)?;
    Ok(lyapunov_of(&v))
}

pub(crate) fn lyapunov_of(v: &Valued) -> LyapunovReport {
    let emb = &v.emb;
    let mut violations = Vec::new();
    for e in emb.separatrices() {
        if v.val[emb.src[e]] >= v.val[emb.dst[e]] {
            violations.push(LyapunovViolation::Edge {
                edge: emb.edge_ids[e].clone(),
            });
        }
    }
    for f in &emb.faces {
        if let (Some(s), Some(t)) = (f.source(), f.sink()) {
            if v.val[s.vertex] >= v.val[t.vertex] {
                violations.push(LyapunovViolation::Face {
                    source: emb.ids[s.vertex].clone(),
                    sink: emb.ids[t.vertex].clone(),
                });
            }
        }
    }
    LyapunovReport {
        lyapunov: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SublevelComponent {
    pub points: Vec<String>,
    pub euler: i64,
    pub d_plus: i64,
    pub d_minus: i64,
    /// Indices into [`SublevelState::circles`].
    pub circles: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SublevelState {
    #[serde(serialize_with = "ser_rational")]
    pub threshold: BigRational,
    pub components: Vec<SublevelComponent>,
    /// Each level circle as the cyclic list of separatrices crossing it.
    pub circles: Vec<Vec<String>>,
}

pub(crate) fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn sublevel_components(
    g: &FoliationGraph,
    phi: &ValueAssignment,
    a: &BigRational,
) -> Result<SublevelState> {
    let v = Valued::new(g, phi)?;
    if let Some(i) = v.val.iter().position(|x| x == a) {
        return Err(Error::Rejected(format!(
            "{} is a critical value (attained at {})",
            format_rational(a),
            v.emb.ids[i]
        )));
    }
    let an = v.below(a)?;
    Ok(sublevel_state(&v.emb, a.clone(), &an))
}

fn sublevel_state(emb: &Embedding, threshold: BigRational, an: &Analysis) -> SublevelState {
    SublevelState {
        threshold,
        components: an
            .pieces
            .iter()
            .map(|p| SublevelComponent {
                points: p.points.iter().map(|&i| emb.ids[i].clone()).collect(),
                euler: p.euler,
                d_plus: p.d_plus,
                d_minus: p.d_minus,
                circles: p.circles.clone(),
            })
            .collect(),
        circles: an
            .circles
            .iter()
            .map(|c| c.iter().map(|&e| emb.edge_ids[e].clone()).collect())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FnSign {
    FnPositive,
    FnNegative,
}

impl FnSign {
    pub fn as_sign(self) -> Sign {
        match self {
            FnSign::FnPositive => Sign::Positive,
            FnSign::FnNegative => Sign::Negative,
        }
    }
}

pub fn saddle_function_sign(g: &FoliationGraph, phi: &ValueAssignment, h: &str) -> Result<FnSign> {
    let v = Valued::new(g, phi)?;
    let i = *v.emb.index.get(h).ok_or_else(|| Error::UnknownPoint(h.into()))?;
    if v.emb.kinds[i] != PointKind::Hyperbolic {
        return Err(Error::Rejected(format!("{h} is not hyperbolic")));
    }
    if !lyapunov_of(&v).lyapunov {
        return Err(Error::Rejected("assignment is not Lyapunov".into()));
    }
    v.fn_sign(i)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaddleSign {
    pub point: String,
    pub sign: Sign,
    pub function_sign: FnSign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TamingReport {
    pub taming: bool,
    pub lyapunov: LyapunovReport,
    pub saddles: Vec<SaddleSign>,
}

pub fn is_taming(g: &FoliationGraph, phi: &ValueAssignment) -> Result<TamingReport> {
    let v = Valued::new(g, phi)?;
    taming_of(&v)
}

pub(crate) fn taming_of(v: &Valued) -> Result<TamingReport> {
    let lyapunov = lyapunov_of(v);
    let mut saddles = Vec::new();
    let mut taming = lyapunov.lyapunov;
    if taming {
        for h in 0..v.emb.point_count() {
            if v.emb.kinds[h] != PointKind::Hyperbolic {
                continue;
            }
            let fs = v.fn_sign(h)?;
            taming &= fs.as_sign() == v.emb.signs[h];
            saddles.push(SaddleSign {
                point: v.emb.ids[h].clone(),
                sign: v.emb.signs[h],
                function_sign: fs,
            });
        }
    }
    Ok(TamingReport {
        taming,
        lyapunov,
        saddles,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RibbonEdge {
    pub saddle: String,
    /// Level circles (or, in the refined graph, sublevel components) joined.
    pub ends: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    pub circles: usize,
    pub components: usize,
    pub edges: Vec<RibbonEdge>,
    /// Per circle, the saddles of this level attached to it, in cyclic order.
    pub ribbon: Vec<Vec<String>>,
    pub forest: bool,
    pub refined_forest: bool,
    /// Saddles closing a cycle, when a graph is not a forest.
    pub cycle: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RibbonForestReport {
    pub levels: Vec<LevelReport>,
    pub simple: bool,
    pub refined_simple: bool,
}

pub fn simplicity_check(g: &FoliationGraph, phi: &ValueAssignment) -> Result<RibbonForestReport> {
    let v = Valued::new(g, phi)?;
    if !lyapunov_of(&v).lyapunov {
        return Err(Error::Rejected("assignment is not Lyapunov".into()));
    }
    simplicity_of(&v)
}

fn forest_closing(n: usize, edges: &[(usize, usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    let mut closing = Vec::new();
    for &(a, b, h) in edges {
        let (x, y) = (root(&mut parent, a), root(&mut parent, b));
        if x == y {
            closing.push(h);
        } else {
            parent[x] = y;
        }
    }
    closing
}

pub(crate) fn simplicity_of(v: &Valued) -> Result<RibbonForestReport> {
    let emb = &v.emb;
    let mut levels = Vec::new();
    for a in v.critical_levels() {
        let an = v.below(&a)?;
        let mut circle_edges = Vec::new();
        let mut comp_edges = Vec::new();
        let mut edges = Vec::new();
        let mut attached: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); an.circles.len()];
        for h in 0..emb.point_count() {
            if emb.kinds[h] != PointKind::Hyperbolic || v.val[h] != a {
                continue;
            }
            let [e0, e1] = v.stable_edges(h);
            let (c0, c1) = (an.circle_of_edge[e0], an.circle_of_edge[e1]);
            attached[c0].insert(h);
            attached[c1].insert(h);
            if c0 == c1 {
                continue;
            }
            circle_edges.push((c0, c1, h));
            let (k0, k1) = (an.comp_of[emb.src[e0]], an.comp_of[emb.src[e1]]);
            comp_edges.push((k0, k1, h));
            edges.push(RibbonEdge {
                saddle: emb.ids[h].clone(),
                ends: (c0, c1),
            });
        }
        let closing = forest_closing(an.circles.len(), &circle_edges);
        let refined_closing = forest_closing(an.pieces.len(), &comp_edges);
        let mut cycle: BTreeSet<String> = BTreeSet::new();
        cycle.extend(closing.iter().chain(&refined_closing).map(|&h| emb.ids[h].clone()));
        let ribbon = an
            .circles
            .iter()
            .enumerate()
            .map(|(c, seq)| {
                seq.iter()
                    .map(|&e| emb.dst[e])
                    .filter(|d| attached[c].contains(d))
                    .map(|d| emb.ids[d].clone())
                    .collect()
            })
            .collect();
        levels.push(LevelReport {
            value: a,
            circles: an.circles.len(),
            components: an.pieces.len(),
            edges,
            ribbon,
            forest: closing.is_empty(),
            refined_forest: refined_closing.is_empty(),
            cycle: cycle.into_iter().collect(),
        });
    }
    Ok(RibbonForestReport {
        simple: levels.iter().all(|l| l.forest),
        refined_simple: levels.iter().all(|l| l.refined_forest),
        levels,
    })
}

/// Every negative hyperbolic point lies above the lowest positive saddle on
/// the Λ-path between the sources of its stable separatrices.
pub fn eq_simplicity_check(g: &FoliationGraph, phi: &ValueAssignment) -> Result<bool> {
    let t = positive_tree(g)?;
    if !t.is_tree() {
        return Err(Error::Rejected("positive graph is not a tree".into()));
    }
    let v = Valued::new(g, phi)?;
    if !lyapunov_of(&v).lyapunov {
        return Err(Error::Rejected("assignment is not Lyapunov".into()));
    }
    for h in 0..v.emb.point_count() {
        if v.emb.kinds[h] != PointKind::Hyperbolic || v.emb.signs[h] != Sign::Negative {
            continue;
        }
        let [e0, e1] = v.stable_edges(h);
        let (a, b) = (v.emb.src[e0], v.emb.src[e1]);
        let c = tree_path(&t, &v.emb.ids[a], &v.emb.ids[b])?
            .iter()
            .map(|p| v.val[v.emb.index[p]].clone())
            .min()
            .unwrap_or_else(BigRational::zero);
        if v.val[h] <= c {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn fn_sign_of(v: &Valued, h: usize) -> Result<FnSign> {
    v.fn_sign(h)
}
