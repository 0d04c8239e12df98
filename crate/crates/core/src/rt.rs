//! Reduction of a non-simple map model to a simple one with multi-nodes:
//! ghosts collapsed, covers replaced by images, equal images identified.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dimension::{cover_delta, ghost_delta, mc_fiber_dims, q_quantity, CoverInput};
use crate::error::{Error, Result};
use crate::graph::{Branch, Edge, Graph, Stratum, VertexKind};

/// A decorated graph read as the combinatorial type of a possibly non-simple
/// map: kinds, image labels on components, point labels on special points
/// and cover data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapModel {
    pub graph: Graph,
}

impl MapModel {
    pub fn new(graph: Graph) -> Result<Self> {
        let m = MapModel { graph };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.graph;
        g.check_structure()?;
        for (a, v) in g.vertices.iter().enumerate() {
            let path = format!("vertices[{a}]");
            if v.kind == VertexKind::Ghost {
                if v.c1_log != 0 || v.dot.iter().any(|&x| x != 0) || v.cover.is_some() {
                    return Err(Error::structural(path, format!("ghost {} must have degree 0", v.id)));
                }
                if v.genus != 0 {
                    return Err(Error::structural(path, format!("ghost {} must have genus 0", v.id)));
                }
            }
            if let Some(c) = &v.cover {
                if c.degree < 1 {
                    return Err(Error::structural(format!("{path}.cover.degree"), "cover degree must be ≥ 1"));
                }
                if v.kind != VertexKind::Bubble {
                    return Err(Error::structural(format!("{path}.cover"), "only bubbles can be covers"));
                }
                let scaled: Vec<i64> = c.dot.iter().map(|x| c.degree * x).collect();
                if c.degree * c.c1_log != v.c1_log || scaled != v.dot {
                    return Err(Error::structural(
                        format!("{path}.cover"),
                        format!("pairings of {} are not {} times those of the image", v.id, c.degree),
                    ));
                }
            }
        }
        // a degree-one bubble is injective: distinct points, distinct labels
        for v in g.vertices.iter().filter(|v| v.kind == VertexKind::Bubble && v.cover.is_none()) {
            let mut labels: BTreeSet<&str> = BTreeSet::new();
            let nodes = g.edges.iter().filter_map(|e| {
                let mut on = e.branches.iter().filter(|b| b.vertex == v.id && b.label.is_some());
                on.next().and_then(|b| b.label.as_deref())
            });
            let marks = g.legs.iter().filter(|l| l.vertex == v.id).filter_map(|l| l.label.as_deref());
            for l in nodes.chain(marks) {
                if !labels.insert(l) {
                    return Err(Error::Invalid(format!("{} has degree one but two points with label {l:?}", v.id)));
                }
            }
        }
        // equal image labels must describe the same image
        let mut seen: BTreeMap<&str, (&Stratum, i64, &Vec<i64>, &str)> = BTreeMap::new();
        for v in g.vertices.iter().filter(|v| v.kind == VertexKind::Bubble) {
            let Some(label) = v.image_label.as_deref() else { continue };
            let (c1, dot) = match &v.cover {
                Some(c) => (c.c1_log, &c.dot),
                None => (v.c1_log, &v.dot),
            };
            match seen.get(label) {
                None => {
                    seen.insert(label, (&v.stratum, c1, dot, &v.id));
                }
                Some((s, c, d, w)) => {
                    if *s != &v.stratum || *c != c1 || *d != dot {
                        return Err(Error::Invalid(format!(
                            "{} and {} share image label {label:?} but have different strata or image classes",
                            w, v.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhostStep {
    pub vertex: String,
    pub marks: i64,
    pub nodal: i64,
    pub predicted: i64,
    pub q_before: i64,
    pub q_after: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverStep {
    pub vertex: String,
    pub degree: i64,
    pub c1_base: i64,
    pub k_v: i64,
    pub l_v: i64,
    pub k_bar: i64,
    pub l_bar: i64,
    /// Contact points of the cover and of its image.
    pub delta: i64,
    pub delta_bar: i64,
    pub d_fiber: i64,
    pub predicted: i64,
    pub q_before: i64,
    pub q_after: i64,
}

/// |E⃗_I| and |E_I| per stratum.
pub type EdgeLedger = BTreeMap<Stratum, (i64, i64)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: &'static str,
    #[serde(serialize_with = "crate::document::ser_graph")]
    pub graph: Graph,
    pub q: i64,
    pub genus: i64,
    #[serde(serialize_with = "ledger_ser")]
    pub ledger: EdgeLedger,
}

fn ledger_ser<S: serde::Serializer>(l: &EdgeLedger, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(l.len()))?;
    for (k, (a, b)) in l {
        seq.serialize_element(&serde_json::json!({"stratum": k, "nodal_points": a, "nodes": b}))?;
    }
    seq.end()
}

fn coincident_ser<S: serde::Serializer>(m: &BTreeMap<Stratum, i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for (k, n) in m {
        seq.serialize_element(&serde_json::json!({"stratum": k, "lost": n}))?;
    }
    seq.end()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    /// Γ, after (i), after (ii), Γ′ (after (iii)), Γ″ (after (iv)).
    pub stages: Vec<Stage>,
    pub ghost_steps: Vec<GhostStep>,
    pub cover_steps: Vec<CoverStep>,
    /// red: V_{b,•} → V′_b.
    pub red: BTreeMap<String, String>,
    /// red: V′_b → V″_b.
    pub red2: BTreeMap<String, String>,
    /// d on V′_b and on V″_b.
    pub multiplicity_prime: BTreeMap<String, i64>,
    pub multiplicity: BTreeMap<String, i64>,
    /// dim of the fibre M_{f″}: ghost configurations plus cover spaces.
    pub fiber_dim: i64,
    pub genus_change: i64,
    /// Per stratum, nodes of Γ′ that became the same node of Γ″.
    #[serde(serialize_with = "coincident_ser")]
    pub coincident_nodes: BTreeMap<Stratum, i64>,
}

impl ReductionTrace {
    pub fn input(&self) -> &Graph {
        &self.stages[0].graph
    }

    pub fn gamma_prime(&self) -> &Graph {
        &self.stages[3].graph
    }

    pub fn gamma_double_prime(&self) -> &Graph {
        &self.stages[4].graph
    }

    pub fn q(&self, stage: usize) -> i64 {
        self.stages[stage].q
    }
}

pub fn edge_ledger(g: &Graph) -> EdgeLedger {
    let mut out = EdgeLedger::new();
    for e in &g.edges {
        let c = out.entry(e.stratum.clone()).or_default();
        c.0 += e.branches.len() as i64;
        c.1 += 1;
    }
    out
}

fn stage(name: &'static str, g: &Graph) -> Stage {
    Stage {
        name,
        graph: g.clone(),
        q: q_quantity(g),
        genus: g.genus(),
        ledger: edge_ledger(g),
    }
}

fn marks_on(g: &Graph, v: &str) -> i64 {
    g.legs.iter().filter(|l| l.vertex == v).count() as i64
}

fn nodal_on(g: &Graph, v: &str) -> i64 {
    g.edges.iter().flat_map(|e| &e.branches).filter(|b| b.vertex == v).count() as i64
}

/// Special points of `v` with contact outside I_v.
fn contact_points(g: &Graph, v: &str) -> i64 {
    let vert = g.vertex(v).unwrap();
    let outside = |c: &[i64]| c.iter().enumerate().any(|(i, &x)| x != 0 && !vert.stratum.contains(&(i + 1)));
    let b = g
        .edges
        .iter()
        .flat_map(|e| &e.branches)
        .filter(|b| b.vertex == v && outside(&b.contact))
        .count();
    let l = g.legs.iter().filter(|l| l.vertex == v && outside(&l.contact)).count();
    (b + l) as i64
}

fn fresh_id(g: &Graph, base: &str) -> String {
    let taken = |s: &str| g.vertices.iter().any(|v| v.id == s) || g.edges.iter().any(|e| e.id == s) || g.legs.iter().any(|l| l.id == s);
    if !taken(base) {
        return base.into();
    }
    (1..).map(|k| format!("{base}.{k}")).find(|s| !taken(s)).unwrap()
}

/// Remove ghost `v`: every node touching it merges into one node made of
/// their remaining branches; marks on `v` are dropped.
fn collapse_one_ghost(g: &mut Graph, v: &str) -> Result<(i64, i64)> {
    let k = marks_on(g, v);
    let l = nodal_on(g, v);
    let vert = g.vertex(v).unwrap().clone();
    let mut touching = vec![];
    let mut rest = vec![];
    for e in std::mem::take(&mut g.edges) {
        let at = e.branches.iter().filter(|b| b.vertex == v).count();
        if at > 1 {
            return Err(Error::Invalid(format!("ghost {v} has a loop at node {}", e.id)));
        }
        if at == 1 {
            if e.stratum != vert.stratum {
                return Err(Error::Invalid(format!(
                    "node {} at ghost {v} has I_e = {:?} but I_v = {:?}",
                    e.id, e.stratum, vert.stratum
                )));
            }
            touching.push(e);
        } else {
            rest.push(e);
        }
    }
    g.edges = rest;
    g.vertices.retain(|w| w.id != v);
    g.legs.retain(|leg| leg.vertex != v);
    if !touching.is_empty() {
        let branches: Vec<Branch> = touching
            .iter()
            .flat_map(|e| e.branches.iter().filter(|b| b.vertex != v).cloned())
            .collect();
        let id = fresh_id(g, &format!("{v}_m"));
        if !branches.is_empty() {
            g.edges.push(Edge {
                id,
                stratum: vert.stratum.clone(),
                branches,
                multi: true,
            });
        }
    }
    g.canonicalize();
    Ok((k, l))
}

/// Merge nodes of `v` whose branches on `v` carry equal point labels, and
/// marks of `v` with equal labels.
/// Returns, per stratum, how far Σ(|branches| − 1) dropped: nonzero only when
/// two nodes end up with the same nodal points.
fn merge_points(g: &mut Graph, v: &str) -> Result<BTreeMap<Stratum, i64>> {
    let mut lost: BTreeMap<Stratum, i64> = BTreeMap::new();
    let mut leg_labels: BTreeSet<String> = BTreeSet::new();
    let mut keep_leg = vec![];
    for leg in &g.legs {
        let dup = leg.vertex == v && matches!(&leg.label, Some(l) if !leg_labels.insert(l.clone()));
        keep_leg.push(!dup);
    }
    let mut it = keep_leg.into_iter();
    g.legs.retain(|_| it.next().unwrap());

    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (a, e) in g.edges.iter().enumerate() {
        for b in e.branches.iter().filter(|b| b.vertex == v) {
            if let Some(l) = &b.label {
                let entry = groups.entry(l.clone()).or_default();
                if !entry.contains(&a) {
                    entry.push(a);
                }
            }
        }
    }
    for (label, _) in groups.iter() {
        if leg_labels.contains(label) {
            return Err(Error::Invalid(format!("a mark and a node of {v} share the point label {label:?}")));
        }
    }
    let mut drop: BTreeSet<usize> = BTreeSet::new();
    for (label, idx) in groups {
        let stratum = g.edges[idx[0]].stratum.clone();
        if idx.iter().any(|&a| g.edges[a].stratum != stratum) {
            return Err(Error::Invalid(format!("nodes at point {label:?} of {v} lie in different strata")));
        }
        let mut branches: Vec<Branch> = vec![];
        let mut have_v = false;
        for &a in &idx {
            for b in &g.edges[a].branches {
                let here = b.vertex == v && b.label.as_deref() == Some(label.as_str());
                if here {
                    if have_v {
                        continue;
                    }
                    have_v = true;
                }
                branches.push(b.clone());
            }
        }
        if idx.len() == 1 && branches.len() == g.edges[idx[0]].branches.len() {
            continue;
        }
        let before: usize = idx.iter().map(|&a| g.edges[a].branches.len() - 1).sum();
        let mut seen: BTreeSet<(String, Option<String>)> = BTreeSet::new();
        branches.retain(|b| b.label.is_none() || seen.insert((b.vertex.clone(), b.label.clone())));
        if before > branches.len() - 1 {
            *lost.entry(stratum.clone()).or_default() += (before - (branches.len() - 1)) as i64;
        }
        let first = idx[0];
        let was_multi = idx.iter().any(|&a| g.edges[a].multi);
        g.edges[first].multi = was_multi || branches.len() != 2;
        g.edges[first].branches = branches;
        drop.extend(idx[1..].iter().copied());
    }
    let mut a = 0;
    g.edges.retain(|_| {
        a += 1;
        !drop.contains(&(a - 1))
    });
    Ok(lost)
}

/// Identify the vertices in `set` into the first one. Nodes with several
/// branches on the set keep one; a node left with a single branch is dropped
/// when `drop_internal`.
fn merge_vertices(g: &mut Graph, set: &[String], drop_internal: bool) -> String {
    let target = set[0].clone();
    let genus: i64 = set.iter().map(|v| g.vertex(v).unwrap().genus).sum();
    let members: BTreeSet<&str> = set.iter().map(|s| s.as_str()).collect();
    let mut internal: BTreeSet<String> = BTreeSet::new();
    for e in g.edges.iter_mut() {
        let on: usize = e.branches.iter().filter(|b| members.contains(b.vertex.as_str())).count();
        if on > 1 && drop_internal {
            internal.insert(e.id.clone());
            let mut seen = false;
            e.branches.retain(|b| {
                if members.contains(b.vertex.as_str()) {
                    if seen {
                        return false;
                    }
                    seen = true;
                }
                true
            });
            if e.branches.len() != 2 {
                e.multi = true;
            }
        }
        for b in e.branches.iter_mut() {
            if members.contains(b.vertex.as_str()) {
                b.vertex = target.clone();
            }
        }
    }
    if drop_internal {
        g.edges.retain(|e| e.branches.len() > 1 || !internal.contains(&e.id));
    }
    for l in g.legs.iter_mut() {
        if members.contains(l.vertex.as_str()) {
            l.vertex = target.clone();
        }
    }
    g.vertices.retain(|v| v.id == target || !members.contains(v.id.as_str()));
    let pos = g.vertex_pos(&target).unwrap();
    g.vertices[pos].genus = genus;
    target
}

fn find(parent: &mut BTreeMap<String, String>, x: &str) -> String {
    let p = parent.get(x).cloned().unwrap_or_else(|| x.to_string());
    if p == x {
        return p;
    }
    let r = find(parent, &p);
    parent.insert(x.to_string(), r.clone());
    r
}

pub fn rt_reduce(model: &MapModel) -> Result<ReductionTrace> {
    model.validate()?;
    if model.graph.vertices.iter().all(|v| v.kind == VertexKind::Ghost) {
        return Err(Error::Precondition("every component is a ghost: the map is constant".into()));
    }
    let mut g = model.graph.clone();
    g.canonicalize();
    let mut stages = vec![stage("input", &g)];

    // (i) ghosts, in id order
    let ghosts: Vec<String> = g
        .vertices
        .iter()
        .filter(|v| v.kind == VertexKind::Ghost)
        .map(|v| v.id.clone())
        .collect();
    let mut ghost_steps = vec![];
    for v in &ghosts {
        let q_before = q_quantity(&g);
        let (k, l) = collapse_one_ghost(&mut g, v)?;
        ghost_steps.push(GhostStep {
            vertex: v.clone(),
            marks: k,
            nodal: l,
            predicted: ghost_delta(k, l),
            q_before,
            q_after: q_quantity(&g),
        });
    }
    stages.push(stage("ghosts collapsed", &g));

    // (ii) covers
    let mut mult: BTreeMap<String, i64> = BTreeMap::new();
    let bubbles: Vec<String> = g
        .vertices
        .iter()
        .filter(|v| v.kind == VertexKind::Bubble)
        .map(|v| v.id.clone())
        .collect();
    let mut cover_steps = vec![];
    for v in &bubbles {
        let pos = g.vertex_pos(v).unwrap();
        let Some(cover) = g.vertices[pos].cover.clone() else {
            mult.insert(v.clone(), 1);
            continue;
        };
        mult.insert(v.clone(), cover.degree);
        let q_before = q_quantity(&g);
        let (k_v, l_v, delta) = (marks_on(&g, v), nodal_on(&g, v), contact_points(&g, v));
        {
            let vert = &mut g.vertices[pos];
            vert.c1_log = cover.c1_log;
            vert.dot = cover.dot.clone();
            vert.cover = None;
        }
        merge_points(&mut g, v)?;
        let (k_bar, l_bar, delta_bar) = (marks_on(&g, v), nodal_on(&g, v), contact_points(&g, v));
        let fib = mc_fiber_dims(CoverInput {
            d: cover.degree,
            ell: delta_bar,
            k: delta,
            c1_base: cover.c1_log,
            n: g.dim,
            depth: g.vertices[pos].stratum.len() as i64,
        });
        cover_steps.push(CoverStep {
            vertex: v.clone(),
            degree: cover.degree,
            c1_base: cover.c1_log,
            k_v,
            l_v,
            k_bar,
            l_bar,
            delta,
            delta_bar,
            d_fiber: fib.d_fiber,
            predicted: cover_delta(cover.degree, cover.c1_log, k_v, l_v, k_bar, l_bar),
            q_before,
            q_after: q_quantity(&g),
        });
    }
    stages.push(stage("covers replaced", &g));

    // (iii) adjacent bubbles with the same image; merging points can make
    // new pairs adjacent, so repeat until none are left
    let label_of = |g: &Graph, v: &str| {
        g.vertex(v)
            .filter(|x| x.kind == VertexKind::Bubble)
            .and_then(|x| x.image_label.clone())
    };
    let mut red: BTreeMap<String, String> = bubbles.iter().map(|v| (v.clone(), v.clone())).collect();
    let mut mult_prime = mult.clone();
    loop {
        let mut parent: BTreeMap<String, String> = BTreeMap::new();
        for e in &g.edges {
            for a in &e.branches {
                for b in &e.branches {
                    if a.vertex < b.vertex {
                        if let (Some(la), Some(lb)) = (label_of(&g, &a.vertex), label_of(&g, &b.vertex)) {
                            if la == lb {
                                let (ra, rb) = (find(&mut parent, &a.vertex), find(&mut parent, &b.vertex));
                                if ra != rb {
                                    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                                    parent.insert(hi, lo);
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for v in mult_prime.keys() {
            let r = find(&mut parent, v);
            classes.entry(r).or_default().push(v.clone());
        }
        if classes.values().all(|set| set.len() == 1) {
            break;
        }
        for (_, set) in classes {
            if set.len() == 1 {
                continue;
            }
            let t = merge_vertices(&mut g, &set, true);
            merge_points(&mut g, &t)?;
            let d: i64 = set.iter().map(|v| mult_prime.remove(v).unwrap()).sum();
            mult_prime.insert(t.clone(), d);
            for x in red.values_mut() {
                if set.contains(x) {
                    *x = t.clone();
                }
            }
        }
    }
    g.canonicalize();
    stages.push(stage("equal-image subtrees collapsed", &g));

    // (iv) remaining bubbles with the same image
    let mut by_label: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for v in mult_prime.keys() {
        match label_of(&g, v) {
            Some(l) => by_label.entry(l).or_default().push(v.clone()),
            None => by_label.entry(format!("\u{0}{v}")).or_default().push(v.clone()),
        }
    }
    let mut red2 = BTreeMap::new();
    let mut multiplicity = BTreeMap::new();
    let mut coincident_nodes: BTreeMap<Stratum, i64> = BTreeMap::new();
    for (_, set) in by_label {
        let target = if set.len() > 1 {
            let t = merge_vertices(&mut g, &set, false);
            for (k, x) in merge_points(&mut g, &t)? {
                *coincident_nodes.entry(k).or_default() += x;
            }
            t
        } else {
            set[0].clone()
        };
        let d: i64 = set.iter().map(|v| mult_prime[v]).sum();
        multiplicity.insert(target.clone(), d);
        for v in set {
            red2.insert(v, target.clone());
        }
    }
    g.canonicalize();
    stages.push(stage("equal images identified", &g));

    let fiber_dim = ghost_steps.iter().map(|s| s.predicted).sum::<i64>() + cover_steps.iter().map(|s| s.d_fiber).sum::<i64>();
    let genus_change = stages[4].genus - stages[3].genus;
    Ok(ReductionTrace {
        stages,
        ghost_steps,
        cover_steps,
        red,
        red2,
        multiplicity_prime: mult_prime,
        multiplicity,
        fiber_dim,
        genus_change,
        coincident_nodes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeCheck {
    pub holds: bool,
    pub failures: Vec<Stratum>,
    /// The identity after adding back nodes that coincided in step (iv).
    pub corrected_holds: bool,
}

/// |E⃗″_I| − |E″_I| = |E⃗′_I| − |E′_I| for every stratum I.
pub fn verify_edge_invariant(trace: &ReductionTrace) -> EdgeCheck {
    let a = &trace.stages[3].ledger;
    let b = &trace.stages[4].ledger;
    let keys: BTreeSet<&Stratum> = a.keys().chain(b.keys()).collect();
    let diff = |l: &EdgeLedger, k: &Stratum| l.get(k).map(|(x, y)| x - y).unwrap_or(0);
    let failures: Vec<Stratum> = keys.iter().filter(|k| diff(a, k) != diff(b, k)).map(|k| (*k).clone()).collect();
    let lost = |k: &Stratum| trace.coincident_nodes.get(k).copied().unwrap_or(0);
    EdgeCheck {
        holds: failures.is_empty(),
        corrected_holds: keys.iter().all(|k| diff(a, k) == diff(b, k) + lost(k)),
        failures,
    }
}

/// Exact identities and the inequality chain recorded in a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QChain {
    pub ghost_deltas_exact: bool,
    pub cover_deltas_exact: bool,
    /// Q(Γ) = Q(Γ_(i)) + Σ ghosts (k_v + ℓ_v − 3).
    pub step_i_exact: bool,
    /// Q(Γ) ≥ Q(Γ_(ii)) + dim M_{f″}.
    pub step_ii_bound: bool,
    pub multiplicities_conserved: bool,
    pub genus_preserved: bool,
}

pub fn check_q_chain(model: &MapModel, trace: &ReductionTrace) -> QChain {
    let ghost_ok = trace.ghost_steps.iter().all(|s| s.q_before - s.q_after == s.predicted);
    let cover_ok = trace.cover_steps.iter().all(|s| s.q_before - s.q_after == s.predicted);
    let ghosts: i64 = trace.ghost_steps.iter().map(|s| s.predicted).sum();
    let step_i = trace.q(0) == trace.q(1) + ghosts;
    let step_ii = trace.q(0) >= trace.q(2) + trace.fiber_dim;
    // Σ_{red⁻¹(v″)} d_v = d_{v″}, with d_v the cover degree (1 if none)
    let degree = |v: &str| {
        model
            .graph
            .vertex(v)
            .and_then(|x| x.cover.as_ref().map(|c| c.degree))
            .unwrap_or(1)
    };
    let mut sums: BTreeMap<&str, i64> = BTreeMap::new();
    for (v, vp) in &trace.red {
        *sums.entry(trace.red2[vp].as_str()).or_default() += degree(v);
    }
    let conserved = sums.iter().all(|(v, s)| trace.multiplicity.get(*v) == Some(s)) && sums.len() == trace.multiplicity.len();
    let genus_ok = trace.stages[..4].iter().all(|s| s.genus == trace.stages[0].genus);
    QChain {
        ghost_deltas_exact: ghost_ok,
        cover_deltas_exact: cover_ok,
        step_i_exact: step_i,
        step_ii_bound: step_ii,
        multiplicities_conserved: conserved,
        genus_preserved: genus_ok,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterType {
    #[serde(rename = "i")]
    OneNode,
    #[serde(rename = "ii")]
    NodeAndMark,
    #[serde(rename = "iii")]
    TwoNodes,
    NotACluster,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterReport {
    pub kind: ClusterType,
    pub external_nodes: usize,
    pub marks: usize,
    pub delta_plus: BTreeMap<String, usize>,
    pub bound_ok: bool,
    /// (vertex, node) where a positive point leads into a part of the cluster
    /// with no marks and no exit: the pattern that cannot close up under Nef.
    pub dead_ends: Vec<(String, String)>,
}

/// Sort a connected set of bubbles by its external special points and check
/// δ⁺_v ≤ 2 under the Nef hypothesis.
pub fn classify_cluster(model: &MapModel, cluster: &[&str], nef: bool) -> Result<ClusterReport> {
    let g = &model.graph;
    let set: BTreeSet<&str> = cluster.iter().copied().collect();
    for v in &set {
        let vert = g
            .vertex(v)
            .ok_or_else(|| Error::structural("cluster", format!("unknown vertex {v}")))?;
        if vert.kind == VertexKind::Principal {
            return Err(Error::Invalid(format!("{v} is not a bubble")));
        }
    }
    let inside = |b: &Branch| set.contains(b.vertex.as_str());
    let external: Vec<&Edge> = g
        .edges
        .iter()
        .filter(|e| e.branches.iter().any(inside) && !e.branches.iter().all(inside))
        .collect();
    let marks = g.legs.iter().filter(|l| set.contains(l.vertex.as_str())).count();
    let mut delta_plus = BTreeMap::new();
    for v in &set {
        let pos = |c: &[i64]| c.iter().any(|&x| x > 0);
        let n = g
            .edges
            .iter()
            .flat_map(|e| &e.branches)
            .filter(|b| b.vertex == *v && pos(&b.contact))
            .count()
            + g.legs.iter().filter(|l| l.vertex == *v && pos(&l.contact)).count();
        delta_plus.insert(v.to_string(), n);
    }
    let kind = match (external.len(), marks) {
        (1, 0) => ClusterType::OneNode,
        (1, 1) => ClusterType::NodeAndMark,
        (2, 0) => ClusterType::TwoNodes,
        _ => ClusterType::NotACluster,
    };

    // dead ends: positive branch at v on an internal node, whose far side
    // (cluster minus v, reached through that node) has no marks and no exit
    let mut dead_ends = vec![];
    for e in g.edges.iter().filter(|e| e.branches.iter().all(inside)) {
        for b in &e.branches {
            if !b.contact.iter().any(|&x| x > 0) {
                continue;
            }
            let mut seen: BTreeSet<&str> = BTreeSet::from([b.vertex.as_str()]);
            let mut stack: Vec<&str> = e.branches.iter().filter(|c| c.vertex != b.vertex).map(|c| c.vertex.as_str()).collect();
            let mut open = false;
            while let Some(w) = stack.pop() {
                if !seen.insert(w) {
                    continue;
                }
                if g.legs.iter().any(|l| l.vertex == w) || external.iter().any(|x| x.branches.iter().any(|c| c.vertex == w)) {
                    open = true;
                    break;
                }
                for f in g.edges.iter().filter(|f| f.id != e.id && f.branches.iter().any(|c| c.vertex == w)) {
                    stack.extend(f.branches.iter().map(|c| c.vertex.as_str()));
                }
            }
            if !open {
                dead_ends.push((b.vertex.clone(), e.id.clone()));
            }
        }
    }
    let bound_ok = !nef || delta_plus.values().all(|&d| d <= 2);
    Ok(ClusterReport {
        kind,
        external_nodes: external.len(),
        marks,
        delta_plus,
        bound_ok,
        dead_ends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{stratum, Cover};

    fn ghost_dep() -> MapModel {
        let mut g = Graph::new(2, 2);
        g.add_vertex("v0", stratum([1, 2]), 0, vec![0, 0], VertexKind::Ghost);
        for j in 1..=3 {
            g.add_vertex(&format!("v{j}"), stratum([]), 1, vec![1, 1], VertexKind::Bubble).image_label = Some(format!("line{j}"));
            g.add_edge(&format!("e{j}"), &format!("v{j}"), "v0", stratum([1, 2]), vec![1, 1]);
        }
        g.add_leg("z1", "v0", vec![2, 1]);
        g.add_leg("z2", "v0", vec![1, 2]);
        MapModel::new(g).unwrap()
    }

    #[test]
    fn ghost_collapse_makes_one_multinode() {
        let t = rt_reduce(&ghost_dep()).unwrap();
        let gp = t.gamma_prime();
        assert_eq!(gp.edges.len(), 1);
        assert!(gp.edges[0].multi);
        assert_eq!(gp.edges[0].branches.len(), 3);
        assert!(gp.legs.is_empty());
        assert_eq!(t.ghost_steps[0].predicted, 2);
        let chain = check_q_chain(&ghost_dep(), &t);
        assert!(chain.ghost_deltas_exact && chain.step_i_exact && chain.genus_preserved);
        assert!(verify_edge_invariant(&t).holds);
    }

    #[test]
    fn simple_model_is_untouched() {
        let mut g = Graph::new(1, 2);
        g.add_vertex("a", stratum([]), 3, vec![1], VertexKind::Principal);
        g.add_vertex("b", stratum([]), 3, vec![1], VertexKind::Bubble).image_label = Some("x".into());
        g.add_edge("e", "a", "b", stratum([]), vec![0]);
        let m = MapModel::new(g.clone()).unwrap();
        let t = rt_reduce(&m).unwrap();
        let mut c = g.clone();
        c.canonicalize();
        assert_eq!(t.gamma_double_prime(), &c);
        assert!(verify_edge_invariant(&t).holds);
        assert_eq!(t.fiber_dim, 0);
    }

    #[test]
    fn double_cover_with_coincident_images() {
        // three lines on a double cover of a line in D12; two nodes and both
        // marks share images
        let mut g = Graph::new(2, 3);
        let v0 = g.add_vertex("v0", stratum([1, 2]), 0, vec![2, 2], VertexKind::Bubble);
        v0.cover = Some(Cover { degree: 2, c1_log: 0, dot: vec![1, 1] });
        v0.image_label = Some("L".into());
        for (j, p) in [(1, "alpha"), (2, "alpha"), (3, "alpha3")] {
            g.add_vertex(&format!("v{j}"), stratum([]), 2, vec![1, 1], VertexKind::Bubble).image_label = Some(format!("line{j}"));
            let e = g.add_edge(&format!("e{j}"), "v0", &format!("v{j}"), stratum([1, 2]), vec![-1, -1]);
            e.branches[0].label = Some(p.into());
        }
        g.add_leg("z1", "v0", vec![5, 0]).label = Some("beta".into());
        g.add_leg("z2", "v0", vec![0, 5]).label = Some("beta".into());
        let m = MapModel::new(g).unwrap();
        let t = rt_reduce(&m).unwrap();
        let gp = t.gamma_prime();
        let multi: Vec<_> = gp.edges.iter().filter(|e| e.multi).collect();
        assert_eq!(multi.len(), 1);
        assert_eq!(multi[0].branches.len(), 3);
        assert_eq!(gp.edges.iter().filter(|e| !e.multi).count(), 1);
        assert_eq!(gp.legs.len(), 1);
        let chain = check_q_chain(&m, &t);
        assert!(chain.cover_deltas_exact && chain.multiplicities_conserved, "{chain:?}");
        assert_eq!(t.multiplicity["v0"], 2);
    }

    #[test]
    fn star_is_not_a_cluster() {
        let mut g = Graph::new(3, 3);
        g.add_vertex("v0", stratum([1, 2, 3]), 0, vec![0, 0, 0], VertexKind::Ghost);
        let s = [vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]];
        for i in 1..=3 {
            let mut dot = vec![0; 3];
            dot[i - 1] = 1;
            g.add_vertex(&format!("v{i}"), stratum([i]), 4 - 1, vec![1, 1, 1], VertexKind::Principal);
            g.add_edge(&format!("e{i}"), &format!("v{i}"), "v0", stratum([1, 2, 3]), s[i - 1].clone());
        }
        let m = MapModel { graph: g };
        let r = classify_cluster(&m, &["v0"], true).unwrap();
        assert_eq!(r.kind, ClusterType::NotACluster);
        assert_eq!(r.delta_plus["v0"], 3);
        assert!(!r.bound_ok);
    }

    #[test]
    fn coincident_nodes_break_the_stated_ledger() {
        let m = crate::examples::coincident_nodes_model();
        let t = rt_reduce(&m).unwrap();
        let i = stratum([1]);
        assert_eq!(t.stages[3].ledger[&i], (6, 3));
        assert_eq!(t.stages[4].ledger[&i], (4, 2));
        assert_eq!(t.coincident_nodes[&i], 1);
        let e = verify_edge_invariant(&t);
        assert!(!e.holds && e.corrected_holds);
        assert_eq!(e.failures, vec![i]);
    }
}
