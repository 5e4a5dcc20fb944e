use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use sphere_taming::ball::{extend_to_ball, verify_decomposition};
use sphere_taming::enumerate::enumerate_foliations;
use sphere_taming::format::{emit, emit_document, parse_document, FoliationDocument};
use sphere_taming::invariants::{
    d_invariants, enumerate_polygons, positive_tree, region_components, skeleton_decomposition,
    verify_polygon, LegendrianPolygon, Region,
};
use sphere_taming::taming::{is_taming, simplicity_check, ValueAssignment};
use sphere_taming::tightness::{
    decide_tightness, oracle_tightness, synthesize_taming, Certificate,
    TightnessResult, Transcript, Verdict,
};
use sphere_taming::{validate, Error, FoliationGraph, Result};

#[derive(Parser)]
#[command(name = "sphere-taming", version, about = "Characteristic foliations on the 2-sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input document, `-` for stdin.
    #[arg(long, global = true, default_value = "-")]
    input: String,
    /// Output file, `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    output: String,
    /// Accepted for compatibility; every algorithm is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural invariants of a foliation.
    Validate,
    /// d±, components, basins, the positive tree and polygons.
    Invariants,
    /// Tight or overtwisted, with a certificate.
    Decide,
    /// Construct a taming function.
    Tame,
    /// Extend the given (or a synthesized) function to the ball.
    Extend,
    /// List the generated universe.
    Enumerate {
        #[arg(long)]
        max_saddles: usize,
        #[arg(long)]
        embryos: bool,
        #[arg(long)]
        homoclinics: bool,
    },
    /// Brute-force decision over all orders of critical values.
    Oracle,
    Render {
        #[arg(long, value_enum, default_value_t = RenderFormat::Dot)]
        format: RenderFormat,
    },
    /// Recheck a certificate, or the value lines of the input.
    Verify {
        /// JSON written by `decide --json` or `oracle --json`.
        #[arg(long)]
        certificate: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Dot,
    Svg,
}

fn read_input(path: &str) -> Result<String> {
    let mut s = String::new();
    let r = if path == "-" {
        io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| s = t)
    };
    r.map_err(|e| Error::Rejected(format!("cannot read {path}: {e}")))?;
    Ok(s)
}

fn load(path: &str) -> Result<FoliationDocument> {
    let doc = parse_document(&read_input(path)?)?;
    let report = validate(&doc.graph);
    if let Some(v) = report.violations.first() {
        return Err(Error::Invalid(v.to_string()));
    }
    Ok(doc)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn polygon_line(p: &LegendrianPolygon) -> String {
    p.walk
        .iter()
        .map(|(e, f)| format!("{e}{}", if *f { "+" } else { "-" }))
        .collect::<Vec<_>>()
        .join(" ")
}

fn verdict_text(g: &FoliationGraph, r: &TightnessResult) -> String {
    match &r.certificate {
        Certificate::Taming { assignment, transcript, .. } => {
            let doc = FoliationDocument {
                graph: g.clone(),
                values: Some(assignment.clone()),
                transcript: transcript.resolutions.clone(),
            };
            format!("# verdict tight\n{}", emit_document(&doc))
        }
        Certificate::Polygon { polygon } => {
            format!("# verdict overtwisted\n# polygon {}\n", polygon_line(polygon))
        }
        Certificate::Exhaustion { saddles, orderings } => format!(
            "# verdict overtwisted\n# exhaustion {orderings} orderings of {}\n",
            saddles.join(" ")
        ),
    }
}

fn decision(cli: &Cli, g: &FoliationGraph, r: TightnessResult) -> (String, u8) {
    let code = u8::from(r.verdict == Verdict::Overtwisted);
    let out = if cli.json { to_json(&r) } else { verdict_text(g, &r) };
    (out, code)
}

fn verify_json(g: &FoliationGraph, text: &str) -> Result<bool> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Rejected(e.to_string()))?;
    let cert = &v["certificate"];
    let bad = |e: serde_json::Error| Error::Rejected(e.to_string());
    match cert["kind"].as_str() {
        Some("taming") => {
            let a: ValueAssignment = serde_json::from_value(cert["assignment"].clone()).map_err(bad)?;
            Ok(is_taming(g, &a)?.taming && simplicity_check(g, &a)?.simple)
        }
        Some("polygon") => {
            let p: LegendrianPolygon = serde_json::from_value(cert["polygon"].clone()).map_err(bad)?;
            Ok(p.uniform_sign().is_some() && verify_polygon(g, &p)?)
        }
        Some("exhaustion") => {
            let r = oracle_tightness(g)?;
            Ok(r.verdict == Verdict::Overtwisted)
        }
        _ => Err(Error::Rejected("unknown certificate kind".into())),
    }
}

fn run(cli: &Cli) -> Result<(String, u8)> {
    if let Command::Enumerate { max_saddles, embryos, homoclinics } = cli.command {
        let all = enumerate_foliations(max_saddles, embryos, homoclinics)?;
        let out = if cli.json {
            to_json(&all)
        } else {
            all.iter().map(|g| emit(g, None)).collect::<Vec<_>>().join("\n")
        };
        return Ok((out, 0));
    }
    if let Command::Validate = cli.command {
        let doc = parse_document(&read_input(&cli.input)?)?;
        let r = validate(&doc.graph);
        let code = if r.is_valid() { 0 } else { 2 };
        let out = if cli.json {
            to_json(&r)
        } else if r.is_valid() {
            format!("valid: {} points, {} separatrices, {} faces\n", r.vertices, r.edges, r.faces)
        } else {
            r.violations.iter().map(|v| format!("{v}\n")).collect()
        };
        return Ok((out, code));
    }
    let doc = load(&cli.input)?;
    let g = &doc.graph;
    Ok(match &cli.command {
        Command::Invariants => {
            let (dp, dm) = d_invariants(g, &Region::whole(g))?;
            let tree = if g.has_homoclinic() { None } else { Some(positive_tree(g)?) };
            let polygons = enumerate_polygons(g, g.edge_count())?;
            let report = json!({
                "d_plus": dp,
                "d_minus": dm,
                "components": region_components(g, &Region::whole(g))?,
                "skeleton": skeleton_decomposition(g)?,
                "positive_tree": tree,
                "polygons": polygons,
            });
            let out = if cli.json {
                to_json(&report)
            } else {
                let mut s = format!("d+ = {dp}\nd- = {dm}\n");
                if let Some(t) = &tree {
                    s += &format!("positive tree: {} vertices, {} edges, tree = {}\n", t.vertices.len(), t.edges.len(), t.is_tree());
                }
                for p in &polygons {
                    let sign = p.uniform_sign().map_or("mixed".to_string(), |s| s.to_string());
                    s += &format!("polygon ({sign}, {} sides): {}\n", p.sides, polygon_line(p));
                }
                s
            };
            (out, 0)
        }
        Command::Decide => decision(cli, g, decide_tightness(g)?),
        Command::Oracle => decision(cli, g, oracle_tightness(g)?),
        Command::Tame => match synthesize_taming(g)? {
            Some((a, t)) => {
                let out = if cli.json {
                    to_json(&json!({ "assignment": a, "transcript": t }))
                } else {
                    emit(g, Some(&a))
                };
                (out, 0)
            }
            None => ("# no taming function found\n".into(), 1),
        },
        Command::Extend => {
            let phi = match &doc.values {
                Some(v) => v.clone(),
                None => synthesize_taming(g)?
                    .map(|(a, _): (ValueAssignment, Transcript)| a)
                    .ok_or_else(|| Error::Rejected("no values given and none could be synthesized".into()))?,
            };
            let d = extend_to_ball(g, &phi)?;
            if !verify_decomposition(&d) {
                return Err(Error::Internal("decomposition does not replay".into()));
            }
            let out = if cli.json {
                to_json(&d)
            } else {
                d.steps
                    .iter()
                    .map(|s| {
                        let kind = serde_json::to_value(s.kind).expect("kinds serialize");
                        format!(
                            "{} {} {} {:?} -> {} discs {}\n",
                            s.value,
                            s.point,
                            kind.as_str().unwrap_or_default(),
                            s.before,
                            s.after,
                            s.discs
                        )
                    })
                    .collect()
            };
            (out, 0)
        }
        Command::Render { format } => {
            let out = match format {
                RenderFormat::Dot => sphere_taming::render::render_dot(g)?,
                RenderFormat::Svg => sphere_taming::render::render_svg(g)?,
            };
            (out, 0)
        }
        Command::Verify { certificate } => {
            let ok = match certificate {
                Some(path) => verify_json(g, &read_input(path)?)?,
                None => {
                    let a = doc
                        .values
                        .as_ref()
                        .ok_or_else(|| Error::Rejected("nothing to verify".into()))?;
                    is_taming(g, a)?.taming && simplicity_check(g, a)?.simple
                }
            };
            let out = if cli.json {
                to_json(&json!({ "verified": ok }))
            } else {
                format!("{}\n", if ok { "verified" } else { "not verified" })
            };
            (out, u8::from(!ok))
        }
        Command::Validate | Command::Enumerate { .. } => unreachable!("handled above"),
    })
}

fn write_output(path: &str, text: &str) -> io::Result<()> {
    if path == "-" {
        io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(path, text)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, code)) => {
            if let Err(e) = write_output(&cli.output, &out) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Internal(_) => 3,
                _ => 2,
            })
        }
    }
}

