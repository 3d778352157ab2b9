use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use drgkit::families::family_array;
use drgkit::geometric::geometric_candidate;
use drgkit::graphlab::{
    build as build_graph, certify_drg, delsarte_clique_audit, empirical_spectrum_and_gram, strongly_closed_closure,
    write_adjacency_list, write_edge_list, Graph, GraphSpec, MAX_NUMERIC_VERTICES,
};
use serde_json::{json, Value};

use crate::{ExportFormat, GraphArgs, GraphFamily, Report};

fn spec_of(args: &GraphArgs) -> Result<GraphSpec> {
    let family = args.family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let need = |v: Option<usize>, name: &str| v.with_context(|| format!("--family {family} needs --{name}"));
    Ok(match args.family {
        GraphFamily::Hamming => GraphSpec::Hamming {
            d: need(args.d, "d")?,
            q: need(args.q, "q")?,
        },
        GraphFamily::Johnson => GraphSpec::Johnson {
            n: need(args.n, "n")?,
            d: need(args.d, "d")?,
        },
        GraphFamily::Odd => GraphSpec::Odd { k: need(args.k, "k")? },
        GraphFamily::FoldedCube => GraphSpec::FoldedCube { m: need(args.m, "m")? },
        GraphFamily::SymplecticDualPolar => GraphSpec::SymplecticDualPolar { d: need(args.d, "d")? },
    })
}

fn construct(args: &GraphArgs) -> Result<(GraphSpec, Graph)> {
    let spec = spec_of(args)?;
    let g = build_graph(&spec)?;
    Ok((spec, g))
}

pub fn export(args: &GraphArgs, format: ExportFormat, out: Option<&Path>) -> Result<()> {
    let (_, g) = construct(args)?;
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match format {
        ExportFormat::Adjacency => write_adjacency_list(&g, &mut w)?,
        ExportFormat::Edges => write_edge_list(&g, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

/// Rounding noise below the printed precision shows as 0.
fn tidy(x: f64) -> f64 {
    if x.abs() < 5e-7 {
        0.0
    } else {
        x
    }
}

fn summary(spec: &GraphSpec, g: &Graph) -> String {
    let degree = g
        .regular_degree()
        .map_or("not regular".to_string(), |k| format!("{k}-regular"));
    format!("graph {spec}: {} vertices, {} edges, {degree}", g.n(), g.edge_count())
}

pub fn build(args: &GraphArgs, verify: bool) -> Result<Report> {
    let (spec, g) = construct(args)?;
    let mut text = vec![summary(&spec, &g)];
    let mut json = json!({
        "graph": spec.to_string(),
        "vertices": g.n(),
        "edges": g.edge_count(),
        "degree": g.regular_degree(),
    });
    if !verify {
        return Ok(Report {
            json,
            text: text.join("\n"),
            csv: None,
            failed: false,
        });
    }

    let family = spec.family();
    let expected = family_array(&family)?;
    let cert = match certify_drg(&g) {
        Ok(c) => c,
        Err(e) => {
            text.push(format!("not distance-regular: {e}"));
            json["certified"] = Value::Null;
            json["error"] = e.to_string().into();
            return Ok(Report {
                json,
                text: text.join("\n"),
                csv: None,
                failed: true,
            });
        }
    };
    let matches = cert.array == expected;
    text.push(format!("certified array {}", cert.array));
    text.push(format!(
        "{family} array {expected}: {}",
        if matches { "match" } else { "MISMATCH" }
    ));
    json["certified"] = serde_json::to_value(&cert.array)?;
    json["expected"] = json!({ "family": family.to_string(), "array": expected, "matches": matches });
    json["layer_sizes"] = json!(cert.profile.layer_sizes);
    let mut failed = !matches;

    if geometric_candidate(&cert.array).is_ok() {
        match delsarte_clique_audit(&g, &cert.distances, &cert.array) {
            Ok(a) => {
                let gamma: Vec<String> = a.gamma.iter().map(i64::to_string).collect();
                text.push(format!(
                    "cliques: {} of size {}, each edge in exactly one, covering radius {}, gamma ({})",
                    a.clique_count,
                    a.clique_size,
                    a.covering_radius,
                    gamma.join(",")
                ));
                json["clique_audit"] = serde_json::to_value(&a)?;
            }
            Err(e) => {
                text.push(format!("clique audit failed: {e}"));
                json["clique_audit"] = json!({ "error": e.to_string() });
                failed = true;
            }
        }
    } else {
        text.push("clique audit: skipped (smallest eigenvalue is not -k/(a_1+1))".into());
        json["clique_audit"] = Value::Null;
    }

    if g.n() <= MAX_NUMERIC_VERTICES {
        match empirical_spectrum_and_gram(&g, &cert.distances, &cert.array) {
            Ok(s) => {
                let dims: Vec<String> = s.clusters.iter().map(|c| format!("{}^{}", c.matched, c.dimension)).collect();
                text.push(format!("eigenspaces: {}", dims.join(", ")));
                text.push(format!(
                    "gram entries: {} sampled, max deviation {:.1e}",
                    s.gram_pairs, s.max_gram_error
                ));
                for id in &s.identities {
                    let mut line = format!(
                        "j={}: <F,F> = {:.6}, <C,F> = {:.6}, <C,C> = {:.6}",
                        id.j,
                        tidy(id.ff),
                        tidy(id.cf),
                        tidy(id.cc)
                    );
                    if let Some(r) = id.dependence_residual {
                        line.push_str(&format!(", |C - tF| = {r:.1e}"));
                    }
                    text.push(line);
                }
                json["spectral_audit"] = serde_json::to_value(&s)?;
            }
            Err(e) => {
                text.push(format!("spectral audit failed: {e}"));
                json["spectral_audit"] = json!({ "error": e.to_string() });
                failed = true;
            }
        }
    } else {
        text.push(format!("spectral audit: skipped ({} vertices)", g.n()));
        json["spectral_audit"] = Value::Null;
    }
    text.push(if failed { "verification failed" } else { "verified" }.into());
    json["verified"] = (!failed).into();
    Ok(Report {
        json,
        text: text.join("\n"),
        csv: None,
        failed,
    })
}

pub fn closure(args: &GraphArgs, x: usize, y: Option<usize>, distance: usize) -> Result<Report> {
    let (spec, g) = construct(args)?;
    let cert = certify_drg(&g).context("the closure needs a distance-regular host")?;
    if x >= g.n() {
        bail!("vertex {x} out of range (n = {})", g.n());
    }
    let y = match y {
        Some(y) if y < g.n() => y,
        Some(y) => bail!("vertex {y} out of range (n = {})", g.n()),
        None => match cert.distances.layer(x, distance).first() {
            Some(&y) => y,
            None => bail!("no vertex at distance {distance} from {x}"),
        },
    };
    let c = strongly_closed_closure(&g, &cert.distances, x, y);
    let d = cert.distances.get(x, y);
    let mut text = vec![
        summary(&spec, &g),
        format!("closure of ({x}, {y}) at distance {d}: {} vertices", c.vertices.len()),
    ];
    text.push(match &c.certified {
        Some(a) => format!("distance-regular with array {a}"),
        None => "not distance-regular".into(),
    });
    Ok(Report {
        json: json!({
            "graph": spec.to_string(),
            "x": x,
            "y": y,
            "distance": d,
            "size": c.vertices.len(),
            "vertices": c.vertices,
            "array": c.certified,
        }),
        text: text.join("\n"),
        csv: None,
        failed: c.certified.is_none(),
    })
}
