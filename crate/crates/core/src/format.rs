//! The line-oriented text format for foliations, optional values and move
//! transcripts.
//!
//! ```text
//! foliation v1
//! point p1 elliptic +
//! point n1 elliptic -
//! sep m1 p1 n1 marker
//! rot p1: m1
//! rot n1: m1
//! value p1 0/1
//! value n1 1/1
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{End, FoliationGraph, PointKind, Separatrix, Sign, SingularPoint};
use crate::moves::MoveRecord;
use crate::taming::{format_rational, parse_rational, ValueAssignment};

pub const HEADER: &str = "foliation v1";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FoliationDocument {
    pub graph: FoliationGraph,
    pub values: Option<ValueAssignment>,
    pub transcript: Vec<MoveRecord>,
}

struct Line<'a> {
    number: usize,
    text: &'a str,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn new(number: usize, text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    tokens.push((s, &text[s..i]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            tokens.push((s, &text[s..]));
        }
        Line { number, text, tokens }
    }

    fn err_at(&self, byte: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.number,
            column: self.text[..byte].chars().count() + 1,
            message: message.into(),
        }
    }

    fn err(&self, token: usize, message: impl Into<String>) -> Error {
        let byte = self
            .tokens
            .get(token)
            .map(|t| t.0)
            .unwrap_or(self.text.trim_end().len());
        self.err_at(byte, message)
    }

    fn token(&self, i: usize, what: &str) -> Result<&'a str> {
        self.tokens
            .get(i)
            .map(|t| t.1)
            .ok_or_else(|| self.err(i, format!("missing {what}")))
    }

    fn arity(&self, min: usize, max: usize) -> Result<()> {
        if self.tokens.len() < min {
            return Err(self.err(self.tokens.len(), "too few fields"));
        }
        if self.tokens.len() > max {
            return Err(self.err(max, "unexpected field"));
        }
        Ok(())
    }
}

fn parse_end(line: &Line, i: usize) -> Result<End> {
    let t = line.token(i, "separatrix end")?;
    match t.split_once(':') {
        None => Ok(End::at(t)),
        Some((p, s)) => {
            let slot = s
                .parse::<usize>()
                .map_err(|_| line.err(i, format!("bad slot {s:?}")))?;
            Ok(End::slot(p, slot))
        }
    }
}

fn strip_comment(s: &str) -> &str {
    s.split_once('#').map_or(s, |(a, _)| a)
}

pub fn parse_document(text: &str) -> Result<FoliationDocument> {
    let mut doc = FoliationDocument::default();
    let mut header = false;
    let mut points = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let mut rotated = BTreeSet::new();
    let mut values = ValueAssignment::new();
    for (n, raw) in text.lines().enumerate() {
        let line = Line::new(n + 1, strip_comment(raw));
        let Some(&(_, key)) = line.tokens.first() else {
            continue;
        };
        if !header {
            if line.tokens.len() == 2 && key == "foliation" && line.tokens[1].1 == "v1" {
                header = true;
                continue;
            }
            return Err(line.err(0, format!("expected `{HEADER}`")));
        }
        match key {
            "point" => {
                line.arity(4, 4)?;
                let id = line.token(1, "point id")?;
                let kind = match line.token(2, "kind")? {
                    "elliptic" => PointKind::Elliptic,
                    "hyperbolic" => PointKind::Hyperbolic,
                    "embryo" => PointKind::Embryo,
                    other => return Err(line.err(2, format!("unknown kind {other:?}"))),
                };
                let sign = match line.token(3, "sign")? {
                    "+" => Sign::Positive,
                    "-" => Sign::Negative,
                    other => return Err(line.err(3, format!("unknown sign {other:?}"))),
                };
                if !points.insert(id.to_string()) {
                    return Err(line.err(1, format!("duplicate point {id}")));
                }
                doc.graph.add_point(SingularPoint::new(id, kind, sign));
            }
            "sep" => {
                line.arity(4, 6)?;
                let id = line.token(1, "separatrix id")?;
                let mut e = Separatrix::new(id, parse_end(&line, 2)?, parse_end(&line, 3)?);
                for i in 4..line.tokens.len() {
                    match line.tokens[i].1 {
                        "marker" if !e.marker => e.marker = true,
                        "homoclinic" if !e.homoclinic => e.homoclinic = true,
                        other => return Err(line.err(i, format!("unexpected flag {other:?}"))),
                    }
                }
                if !edges.insert(id.to_string()) {
                    return Err(line.err(1, format!("duplicate separatrix {id}")));
                }
                doc.graph.add_edge(e);
            }
            "rot" => {
                line.arity(2, usize::MAX)?;
                let head = line.token(1, "point id")?;
                let Some(p) = head.strip_suffix(':') else {
                    return Err(line.err(1, "expected `<point>:`"));
                };
                if !rotated.insert(p.to_string()) {
                    return Err(line.err(1, format!("second rotation for {p}")));
                }
                let order = line.tokens[2..].iter().map(|t| t.1.to_string()).collect();
                doc.graph.set_rotation(p, order);
            }
            "value" => {
                line.arity(3, 3)?;
                let p = line.token(1, "point id")?;
                let v = parse_rational(line.token(2, "value")?).map_err(|m| line.err(2, m))?;
                if values.get(p).is_some() {
                    return Err(line.err(1, format!("second value for {p}")));
                }
                values.set(p, v);
            }
            "move" => {
                let start = line.tokens[1..]
                    .first()
                    .map(|t| t.0)
                    .ok_or_else(|| line.err(1, "missing move record"))?;
                let rec: MoveRecord = serde_json::from_str(line.text[start..].trim_end())
                    .map_err(|e| line.err_at(start, e.to_string()))?;
                doc.transcript.push(rec);
            }
            other => return Err(line.err(0, format!("unknown key {other:?}"))),
        }
    }
    if !header {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("expected `{HEADER}`"),
        });
    }
    if !values.is_empty() {
        doc.values = Some(values);
    }
    Ok(doc)
}

/// Graph and optional values of a document.
pub fn parse(text: &str) -> Result<(FoliationGraph, Option<ValueAssignment>)> {
    let d = parse_document(text)?;
    Ok((d.graph, d.values))
}

fn end(e: &End) -> String {
    match e.slot {
        Some(s) => format!("{}:{s}", e.point),
        None => e.point.clone(),
    }
}

pub fn emit_document(doc: &FoliationDocument) -> String {
    let g = &doc.graph;
    let mut out = format!("{HEADER}\n");
    for p in g.points() {
        let _ = writeln!(out, "point {} {} {}", p.id, p.kind.keyword(), p.sign.symbol());
    }
    for e in g.edges() {
        let _ = write!(out, "sep {} {} {}", e.id, end(&e.source), end(&e.target));
        if e.marker {
            out.push_str(" marker");
        }
        if e.homoclinic {
            out.push_str(" homoclinic");
        }
        out.push('\n');
    }
    for (p, order) in g.rotations() {
        let _ = writeln!(out, "rot {p}: {}", order.join(" "));
    }
    if let Some(v) = &doc.values {
        for (p, x) in v.iter() {
            let _ = writeln!(out, "value {p} {}", format_rational(x));
        }
    }
    for rec in &doc.transcript {
        let json = serde_json::to_string(rec).expect("move records serialize");
        let _ = writeln!(out, "move {json}");
    }
    out
}

pub fn emit(g: &FoliationGraph, values: Option<&ValueAssignment>) -> String {
    emit_document(&FoliationDocument {
        graph: g.clone(),
        values: values.cloned(),
        transcript: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn std_document() {
        let text = "foliation v1\n# the round sphere\npoint p1 elliptic +\npoint n1 elliptic -\nsep m1 p1 n1 marker\nrot p1: m1\nrot n1: m1\n";
        let (g, v) = parse(text).unwrap();
        assert_eq!(g, fixtures::std());
        assert!(v.is_none());
    }

    #[test]
    fn eh2_with_values_round_trips() {
        let phi = ValueAssignment::from_ratios([("p1", 0, 1), ("p2", 0, 1), ("h1", 1, 2), ("n1", 1, 1)]);
        let text = emit(&fixtures::eh2(), Some(&phi));
        assert_eq!(text.matches("\nvalue ").count(), 4);
        let (g, v) = parse(&text).unwrap();
        assert_eq!(g, fixtures::eh2());
        assert_eq!(v, Some(phi));
    }

    #[test]
    fn zero_denominator() {
        let text = "foliation v1\npoint e1 elliptic +\nvalue e1 1/0\n";
        match parse(text) {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!((line, column), (3, 10));
                assert!(message.contains("zero denominator"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_and_missing_header() {
        assert!(matches!(
            parse("foliation v1\nvertex p1\n"),
            Err(Error::Parse { line: 2, column: 1, .. })
        ));
        assert!(matches!(parse("point p1 elliptic +\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn transcripts_round_trip() {
        let (_, rec) = crate::moves::apply_recorded(
            &fixtures::eh2(),
            crate::moves::Move::EliminatePair {
                elliptic: "p2".into(),
                hyperbolic: "h1".into(),
            },
        )
        .unwrap();
        let doc = FoliationDocument {
            graph: fixtures::eh2(),
            values: None,
            transcript: vec![rec],
        };
        assert_eq!(parse_document(&emit_document(&doc)).unwrap(), doc);
    }
}
