//! JSON form of a decorated graph with its optional side data (section
//! inputs, characters, positivity profile).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianRational as GR, P1Point};
use crate::graph::{Branch, Cover, Edge, Graph, Leg, Stratum, Vertex, VertexKind};
use crate::obstruction::EtaData;
use crate::positivity::GeometryProfile;

pub const SCHEMA_VERSION: &str = "1";

fn is_zero(x: &i64) -> bool {
    *x == 0
}

fn is_false(x: &bool) -> bool {
    !*x
}

fn principal() -> VertexKind {
    VertexKind::Principal
}

fn is_principal(k: &VertexKind) -> bool {
    *k == VertexKind::Principal
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub degree: i64,
    pub c1_log: i64,
    pub dot: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub genus: i64,
    pub stratum: Stratum,
    pub c1_log: i64,
    pub dot: Vec<i64>,
    #[serde(default = "principal", skip_serializing_if = "is_principal")]
    pub kind: VertexKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDoc {
    pub vertex: String,
    pub contact: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<P1Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// An ordinary node may be written as `ends` + `contact` (contact at the
/// first end); anything else uses `branches`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub stratum: Stratum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ends: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<BranchDoc>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub multi: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegDoc {
    pub id: String,
    pub vertex: String,
    pub contact: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<P1Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleDoc {
    pub vertex: String,
    pub coord: usize,
    pub value: GR,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaDoc {
    pub edge: String,
    /// 0-based branch index.
    pub branch: usize,
    pub coord: usize,
    pub value: GR,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionsDoc {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scales: Vec<ScaleDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eta: Vec<EtaDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub schema_version: String,
    #[serde(rename = "N")]
    pub n_div: usize,
    pub n: i64,
    pub vertices: Vec<VertexDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub legs: Vec<LegDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<SectionsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characters: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<GeometryProfile>,
    /// Ghost vertex for the ghost decomposition of ob.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ghost: Option<String>,
}

/// A bare character file: `{"characters": [[…], …]}` or a plain array.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum CharacterFile {
    Wrapped { characters: Vec<Vec<i64>> },
    Plain(Vec<Vec<i64>>),
}

impl CharacterFile {
    pub fn rows(self) -> Vec<Vec<i64>> {
        match self {
            CharacterFile::Wrapped { characters } | CharacterFile::Plain(characters) => characters,
        }
    }
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::Parse(inner.to_string())
        } else {
            Error::structural(if path == "." { "$".into() } else { format!("$.{path}") }, inner.to_string())
        }
    })
}

pub fn parse_document(text: &str) -> Result<GraphDocument> {
    let doc: GraphDocument = from_json(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::structural(
            "$.schema_version",
            format!("unsupported schema version {:?}", doc.schema_version),
        ));
    }
    Ok(doc)
}

pub fn parse_characters(text: &str) -> Result<Vec<Vec<i64>>> {
    from_json::<CharacterFile>(text).map(CharacterFile::rows)
}

pub fn parse_profile(text: &str) -> Result<GeometryProfile> {
    from_json(text)
}

impl GraphDocument {
    pub fn from_graph(g: &Graph) -> Self {
        let vertices = g
            .vertices
            .iter()
            .map(|v| VertexDoc {
                id: v.id.clone(),
                genus: v.genus,
                stratum: v.stratum.clone(),
                c1_log: v.c1_log,
                dot: v.dot.clone(),
                kind: v.kind,
                image_label: v.image_label.clone(),
                cover: v.cover.as_ref().map(|c| CoverDoc {
                    degree: c.degree,
                    c1_log: c.c1_log,
                    dot: c.dot.clone(),
                }),
            })
            .collect();
        let edges = g
            .edges
            .iter()
            .map(|e| {
                let plain = !e.multi
                    && e.branches.len() == 2
                    && e.branches.iter().all(|b| b.point.is_none() && b.label.is_none())
                    && e.branches[1].contact.iter().zip(&e.branches[0].contact).all(|(a, b)| *a == -*b);
                if plain {
                    EdgeDoc {
                        id: e.id.clone(),
                        stratum: e.stratum.clone(),
                        ends: Some([e.branches[0].vertex.clone(), e.branches[1].vertex.clone()]),
                        contact: Some(e.branches[0].contact.clone()),
                        branches: None,
                        multi: false,
                    }
                } else {
                    EdgeDoc {
                        id: e.id.clone(),
                        stratum: e.stratum.clone(),
                        ends: None,
                        contact: None,
                        branches: Some(
                            e.branches
                                .iter()
                                .map(|b| BranchDoc {
                                    vertex: b.vertex.clone(),
                                    contact: b.contact.clone(),
                                    point: b.point.clone(),
                                    label: b.label.clone(),
                                })
                                .collect(),
                        ),
                        multi: e.multi,
                    }
                }
            })
            .collect();
        let legs = g
            .legs
            .iter()
            .map(|l| LegDoc {
                id: l.id.clone(),
                vertex: l.vertex.clone(),
                contact: l.contact.clone(),
                point: l.point.clone(),
                label: l.label.clone(),
            })
            .collect();
        let mut doc = GraphDocument {
            schema_version: SCHEMA_VERSION.into(),
            n_div: g.n_div,
            n: g.dim,
            vertices,
            edges,
            legs,
            sections: None,
            characters: None,
            profile: None,
            ghost: None,
        };
        doc.canonicalize();
        doc
    }

    pub fn with_eta_data(mut self, data: &EtaData) -> Self {
        let s = SectionsDoc {
            scales: data
                .scales
                .iter()
                .map(|((v, i), x)| ScaleDoc { vertex: v.clone(), coord: *i, value: x.clone() })
                .collect(),
            eta: data
                .eta
                .iter()
                .map(|((e, b, i), x)| EtaDoc { edge: e.clone(), branch: *b, coord: *i, value: x.clone() })
                .collect(),
        };
        self.sections = if s.scales.is_empty() && s.eta.is_empty() { None } else { Some(s) };
        self.canonicalize();
        self
    }

    /// Sort vertices, edges, legs and section entries; drop empty sections.
    pub fn canonicalize(&mut self) {
        self.vertices.sort_by(|a, b| a.id.cmp(&b.id));
        self.edges.sort_by(|a, b| a.id.cmp(&b.id));
        self.legs.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(s) = &mut self.sections {
            s.scales.sort_by(|a, b| (&a.vertex, a.coord).cmp(&(&b.vertex, b.coord)));
            s.eta.sort_by(|a, b| (&a.edge, a.branch, a.coord).cmp(&(&b.edge, b.branch, b.coord)));
            if s.scales.is_empty() && s.eta.is_empty() {
                self.sections = None;
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut c = self.clone();
        c.canonicalize();
        let mut s = serde_json::to_string_pretty(&c).expect("documents serialize");
        s.push('\n');
        s
    }

    /// Build the graph; structural problems name the JSON path.
    pub fn graph(&self) -> Result<Graph> {
        let mut g = Graph::new(self.n_div, self.n);
        if self.n_div == 0 {
            return Err(Error::structural("$.N", "N must be positive"));
        }
        for v in &self.vertices {
            g.vertices.push(Vertex {
                id: v.id.clone(),
                genus: v.genus,
                stratum: v.stratum.clone(),
                c1_log: v.c1_log,
                dot: v.dot.clone(),
                kind: v.kind,
                image_label: v.image_label.clone(),
                cover: v.cover.as_ref().map(|c| Cover {
                    degree: c.degree,
                    c1_log: c.c1_log,
                    dot: c.dot.clone(),
                }),
            });
        }
        for (a, e) in self.edges.iter().enumerate() {
            let path = format!("$.edges[{a}]");
            let branches = match (&e.ends, &e.contact, &e.branches) {
                (Some([x, y]), Some(s), None) => {
                    if e.multi {
                        return Err(Error::structural(path, "a multi-node needs `branches`"));
                    }
                    vec![
                        Branch { vertex: x.clone(), contact: s.clone(), point: None, label: None },
                        Branch { vertex: y.clone(), contact: s.iter().map(|t| -t).collect(), point: None, label: None },
                    ]
                }
                (None, None, Some(bs)) => bs
                    .iter()
                    .map(|b| Branch {
                        vertex: b.vertex.clone(),
                        contact: b.contact.clone(),
                        point: b.point.clone(),
                        label: b.label.clone(),
                    })
                    .collect(),
                _ => return Err(Error::structural(path, "give either `ends` and `contact`, or `branches`")),
            };
            g.edges.push(Edge {
                id: e.id.clone(),
                stratum: e.stratum.clone(),
                branches,
                multi: e.multi,
            });
        }
        for l in &self.legs {
            g.legs.push(Leg {
                id: l.id.clone(),
                vertex: l.vertex.clone(),
                contact: l.contact.clone(),
                point: l.point.clone(),
                label: l.label.clone(),
            });
        }
        g.check_structure().map_err(|e| match e {
            Error::Structural { path, message } => Error::Structural {
                path: if path.starts_with('$') { path } else { format!("$.{path}") },
                message,
            },
            other => other,
        })?;
        Ok(g)
    }

    pub fn eta_data(&self) -> EtaData {
        let mut d = EtaData::default();
        if let Some(s) = &self.sections {
            for x in &s.scales {
                d.scales.insert((x.vertex.clone(), x.coord), x.value.clone());
            }
            for x in &s.eta {
                d.eta.insert((x.edge.clone(), x.branch, x.coord), x.value.clone());
            }
        }
        d
    }
}

/// Serialize a graph through its document form (used inside reports).
pub fn ser_graph<S: serde::Serializer>(g: &Graph, s: S) -> std::result::Result<S::Ok, S::Error> {
    GraphDocument::from_graph(g).serialize(s)
}

/// Keys present in both documents with different values, for diagnostics.
pub fn diff_keys(a: &GraphDocument, b: &GraphDocument) -> Vec<String> {
    let va = serde_json::to_value(a).unwrap();
    let vb = serde_json::to_value(b).unwrap();
    let (Some(ma), Some(mb)) = (va.as_object(), vb.as_object()) else {
        return vec![];
    };
    let keys: BTreeMap<&String, ()> = ma.keys().chain(mb.keys()).map(|k| (k, ())).collect();
    keys.into_keys().filter(|k| ma.get(*k) != mb.get(*k)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::stratum;

    fn sample() -> Graph {
        let mut g = Graph::new(2, 2);
        g.add_vertex("v0", stratum([1, 2]), 0, vec![0, 0], VertexKind::Ghost);
        g.add_vertex("v1", stratum([]), 1, vec![1, 1], VertexKind::Principal);
        let e = g.add_edge("e1", "v0", "v1", stratum([1, 2]), vec![-1, -1]);
        e.branches[0].point = Some(P1Point::Finite(GR::from_ratio(1, 2)));
        g.add_leg("z1", "v0", vec![1, 1]).point = Some(P1Point::Infinity);
        g
    }

    #[test]
    fn round_trip() {
        let doc = GraphDocument::from_graph(&sample());
        let text = doc.to_json();
        let back = parse_document(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), text);
        let mut g = sample();
        g.canonicalize();
        assert_eq!(back.graph().unwrap(), g);
    }

    #[test]
    fn errors_name_the_path() {
        let text = r#"{"schema_version":"1","N":2,"n":2,"vertices":[{"id":"v","stratum":[],"c1_log":"x","dot":[0,0]}]}"#;
        match parse_document(text) {
            Err(Error::Structural { path, .. }) => assert_eq!(path, "$.vertices[0].c1_log"),
            other => panic!("{other:?}"),
        }
        let text = r#"{"schema_version":"1","N":1,"n":2,"vertices":[{"id":"v","stratum":[],"c1_log":0,"dot":[0]}],
            "legs":[{"id":"z","vertex":"v","contact":[0],"point":"1/0"}]}"#;
        match parse_document(text) {
            Err(Error::Structural { path, .. }) => assert_eq!(path, "$.legs[0].point"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_reference_is_structural() {
        let text = r#"{"schema_version":"1","N":1,"n":2,"vertices":[{"id":"v","stratum":[],"c1_log":0,"dot":[0]}],
            "legs":[{"id":"z","vertex":"w","contact":[0]}]}"#;
        let doc = parse_document(text).unwrap();
        assert!(matches!(doc.graph(), Err(Error::Structural { .. })));
    }

    #[test]
    fn character_files() {
        assert_eq!(parse_characters("[[1,-1]]").unwrap(), vec![vec![1, -1]]);
        assert_eq!(parse_characters(r#"{"characters":[[0,2]]}"#).unwrap(), vec![vec![0, 2]]);
    }
}
