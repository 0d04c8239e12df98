//! Command dispatch shared by the command-line tool and the Python module:
//! one document in, one JSON report out.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::dimension::{expected_dim_log, q_bound, q_quantity, stratum_dim};
use crate::document::GraphDocument;
use crate::error::{Error, Result};
use crate::graph::{solve_decorations, validate_graph_with, Graph, ValidateOptions, VertexKind};
use crate::lattice::{annihilates, build_rho, build_rho_multinode, cokernel_characters, kernel_lattice};
use crate::obstruction::{compute_ob, compute_ob_multinode, ghost_decomposition};
use crate::positivity::classify_pair;
use crate::rt::{check_q_chain, rt_reduce, verify_edge_invariant, MapModel};
use crate::tropical::{cone_sigma, tropical_feasible};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Decorate,
    Tropical,
    Group,
    Ob,
    Dims,
    Positivity,
    Rt,
    Report,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Validate,
        Command::Decorate,
        Command::Tropical,
        Command::Group,
        Command::Ob,
        Command::Dims,
        Command::Positivity,
        Command::Rt,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Decorate => "decorate",
            Command::Tropical => "tropical",
            Command::Group => "group",
            Command::Ob => "ob",
            Command::Dims => "dims",
            Command::Positivity => "positivity",
            Command::Rt => "rt",
            Command::Report => "report",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command {s:?}")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Overrides the document's own character rows.
    pub characters: Option<Vec<Vec<i64>>>,
    pub bound: Option<i64>,
    pub expect_trivial: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    /// An invariant was found violated (exit status 1 on the command line).
    pub violation: bool,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn done(report: Value) -> Outcome {
    Outcome { report, violation: false }
}

/// Element order in the input never affects the output.
pub fn run(cmd: Command, doc: &GraphDocument, opts: &Options) -> Result<Outcome> {
    let mut doc = doc.clone();
    doc.canonicalize();
    let doc = &doc;
    let g = doc.graph()?;
    match cmd {
        Command::Validate => validate(&g),
        Command::Decorate => decorate(&g, opts),
        Command::Tropical => tropical(&g),
        Command::Group => group(&g, opts),
        Command::Ob => ob(&g, doc, opts),
        Command::Dims => dims(&g),
        Command::Positivity => positivity(doc),
        Command::Rt => rt(&g),
        Command::Report => report(&g, doc, opts),
    }
}

fn validate(g: &Graph) -> Result<Outcome> {
    let r = validate_graph_with(g, ValidateOptions { multinode_allowed: g.has_multinodes() })?;
    Ok(Outcome {
        violation: !r.is_valid(),
        report: json!({
            "valid": r.is_valid(),
            "violations": r.violations,
            "genus": g.genus(),
            "vertices": g.vertices.len(),
            "edges": g.edges.len(),
            "legs": g.legs.len(),
        }),
    })
}

fn decorate(g: &Graph, opts: &Options) -> Result<Outcome> {
    match solve_decorations(g, opts.bound) {
        Ok(d) => {
            let none = matches!(d, crate::graph::Decorations::None { .. });
            Ok(Outcome { report: to_value(&d), violation: none })
        }
        Err(Error::NoDecoration(reason)) => Ok(Outcome {
            report: json!({ "kind": "none", "reason": reason }),
            violation: true,
        }),
        Err(e) => Err(e),
    }
}

fn tropical(g: &Graph) -> Result<Outcome> {
    let t = tropical_feasible(g)?;
    let mut r = to_value(&t);
    r["cone"] = match cone_sigma(g) {
        Ok(c) => to_value(&c),
        Err(Error::SizeCap { size, cap }) => json!({ "skipped": format!("{size} slope variables exceed the cap of {cap}") }),
        Err(e) => return Err(e),
    };
    Ok(done(r))
}

fn group(g: &Graph, opts: &Options) -> Result<Outcome> {
    let rho = if g.has_multinodes() { build_rho_multinode(g)? } else { build_rho(g)? };
    let mut r = json!({
        "domain": rho.domain,
        "codomain": rho.codomain,
        "matrix": rho.matrix,
        "kernel_rank": rho.kernel_rank(),
        "kernel": kernel_lattice(&rho),
        "cokernel_rank": rho.cokernel_rank(),
        "torsion": rho.torsion(),
        "characters": cokernel_characters(&rho).rows,
    });
    let mut violation = false;
    if let Some(chars) = &opts.characters {
        let ok = chars.iter().all(|c| c.len() == rho.rows() && annihilates(&rho, c));
        r["supplied_characters_annihilate_image"] = json!(ok);
        violation = !ok;
    }
    Ok(Outcome { report: r, violation })
}

fn ob(g: &Graph, doc: &GraphDocument, opts: &Options) -> Result<Outcome> {
    let data = doc.eta_data();
    let chars = opts.characters.as_ref().or(doc.characters.as_ref()).map(|c| c.as_slice());
    let class = if g.has_multinodes() {
        compute_ob_multinode(g, &data, chars)?
    } else {
        compute_ob(g, &data, chars)?
    };
    let mut violation = opts.expect_trivial && !class.is_trivial;
    let mut r = json!({ "ob": class });
    if let Some(v0) = &doc.ghost {
        let d = ghost_decomposition(g, v0, &data, chars)?;
        violation |= !d.relation_holds;
        r["ghost"] = to_value(&d);
    }
    Ok(Outcome { report: r, violation })
}

fn dims(g: &Graph) -> Result<Outcome> {
    let d = stratum_dim(g)?;
    Ok(done(json!({
        "stratum": d,
        "expected_dim_log": expected_dim_log(g.c1_log_total(), g.dim, g.genus(), g.k() as i64),
        "q": q_quantity(g),
        "q_bound": q_bound(g),
    })))
}

fn positivity(doc: &GraphDocument) -> Result<Outcome> {
    let p = doc
        .profile
        .as_ref()
        .ok_or_else(|| Error::structural("$.profile", "the document has no geometry profile"))?;
    Ok(done(to_value(&classify_pair(p)?)))
}

fn rt(g: &Graph) -> Result<Outcome> {
    let model = MapModel::new(g.clone())?;
    let t = rt_reduce(&model)?;
    let e = verify_edge_invariant(&t);
    let q = check_q_chain(&model, &t);
    let exact = q.ghost_deltas_exact && q.cover_deltas_exact && q.step_i_exact && q.multiplicities_conserved && q.genus_preserved;
    Ok(Outcome {
        violation: !e.holds || !exact,
        report: json!({ "trace": t, "edge_invariant": e, "q_chain": q }),
    })
}

fn report(g: &Graph, doc: &GraphDocument, opts: &Options) -> Result<Outcome> {
    let mut parts: Vec<(Command, Result<Outcome>)> = vec![
        (Command::Validate, validate(g)),
        (Command::Group, group(g, opts)),
        (Command::Dims, dims(g)),
    ];
    if !g.has_multinodes() {
        parts.push((Command::Tropical, tropical(g)));
        parts.push((Command::Decorate, decorate(g, opts)));
    }
    if doc.sections.is_some() {
        parts.push((Command::Ob, ob(g, doc, opts)));
    }
    if doc.profile.is_some() {
        parts.push((Command::Positivity, positivity(doc)));
    }
    let reducible = g
        .vertices
        .iter()
        .any(|v| v.kind == VertexKind::Ghost || v.cover.is_some() || v.image_label.is_some());
    if reducible {
        parts.push((Command::Rt, rt(g)));
    }
    let mut out = Map::new();
    let mut violation = false;
    for (cmd, r) in parts {
        let v = match r {
            Ok(o) => {
                violation |= o.violation;
                o.report
            }
            Err(e) => json!({ "error": e.to_string() }),
        };
        out.insert(cmd.name().into(), v);
    }
    Ok(Outcome { report: Value::Object(out), violation })
}

/// Flatten a report into aligned `path  value` lines. Arrays of scalars stay
/// on one line.
pub fn to_table(v: &Value) -> String {
    let mut rows: Vec<(String, String)> = vec![];
    flatten("", v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, x) in rows {
        let pad = width - k.chars().count();
        s.push_str(&k);
        s.push_str(&" ".repeat(pad + 2));
        s.push_str(&x);
        s.push('\n');
    }
    s
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Array(_) | Value::Object(_) => None,
        other => Some(other.to_string()),
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            if m.is_empty() {
                rows.push((prefix.to_string(), "{}".into()));
            }
            for (k, x) in m {
                flatten(&key(k), x, rows);
            }
        }
        Value::Array(a) => {
            let flat: Option<Vec<String>> = a.iter().map(scalar).collect();
            match flat {
                Some(items) => rows.push((prefix.to_string(), format!("[{}]", items.join(", ")))),
                None => {
                    for (i, x) in a.iter().enumerate() {
                        flatten(&format!("{prefix}[{i}]"), x, rows);
                    }
                }
            }
        }
        other => rows.push((prefix.to_string(), scalar(other).unwrap())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::parse_document;
    use crate::examples::fixture_files;

    fn fixture(name: &str) -> GraphDocument {
        let body = fixture_files().into_iter().find(|(n, _)| *n == name).unwrap().1;
        parse_document(&body).unwrap()
    }

    #[test]
    fn group_of_the_two_line_ghost() {
        let o = run(Command::Group, &fixture("two_line_ghost.json"), &Options::default()).unwrap();
        assert_eq!(o.report["kernel_rank"], 1);
        assert_eq!(o.report["cokernel_rank"], 2);
        assert!(!o.violation);
    }

    #[test]
    fn expect_trivial_flags_a_nontrivial_class() {
        let doc = fixture("bad_ex1.json");
        let opts = Options { expect_trivial: true, ..Default::default() };
        assert!(run(Command::Ob, &doc, &opts).unwrap().violation);
        assert!(!run(Command::Ob, &doc, &Options::default()).unwrap().violation);
    }

    #[test]
    fn report_collects_errors_per_analysis() {
        let o = run(Command::Report, &fixture("mc_issue.json"), &Options::default()).unwrap();
        let keys: Vec<&String> = o.report.as_object().unwrap().keys().collect();
        assert!(keys.iter().any(|k| *k == "positivity"));
        assert!(keys.iter().any(|k| *k == "rt"));
    }

    #[test]
    fn table_aligns_paths() {
        let t = to_table(&json!({ "a": 1, "bb": { "c": [1, 2] }, "d": [[1, 0], [0, 1]] }));
        assert_eq!(t, "a     1\nbb.c  [1, 2]\nd[0]  [1, 0]\nd[1]  [0, 1]\n");
    }

    #[test]
    fn unknown_command() {
        assert!("solve".parse::<Command>().is_err());
        assert_eq!("rt".parse::<Command>().unwrap(), Command::Rt);
    }
}
