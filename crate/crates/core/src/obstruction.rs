//! The obstruction element ob_Γ ∈ G(Γ), its multi-node variant, the ghost
//! bubble map o_{v₀} and the collapse homomorphisms between groups.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianRational, P1Point};
use crate::graph::{Graph, Stratum, Vertex, VertexKind};
use crate::lattice::{
    annihilates, build_rho, build_rho_multinode, collapse_ghost, cokernel_characters, GhostCollapse, LatticeMap,
};
use crate::normal_form;
use crate::sections::{build_section, RationalSection};

type GR = GaussianRational;

/// Inputs needed to produce η at every nodal point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EtaData {
    /// Scales β of the sections ζ_{v,i}, keyed by (vertex, i); default 1.
    pub scales: BTreeMap<(String, usize), GR>,
    /// Explicit η keyed by (edge, branch index, i). Required for i ∈ I_e − I_v
    /// and for vertices whose special points are not located.
    pub eta: BTreeMap<(String, usize, usize), GR>,
}

/// η_{e⃗,i} for every branch of every node and every i ∈ I_e.
pub type EtaAssignment = BTreeMap<(String, usize, usize), GR>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionClass {
    /// Coordinates of the raw tuple, labelled like the rows of ϱ.
    pub raw: Vec<(String, GR)>,
    pub characters: Vec<Vec<i64>>,
    pub values: Vec<GR>,
    pub is_trivial: bool,
}

fn located(graph: &Graph, v: &str) -> bool {
    graph
        .edges
        .iter()
        .flat_map(|e| e.branches.iter())
        .filter(|b| b.vertex == v)
        .all(|b| b.point.is_some())
        && graph.legs.iter().filter(|l| l.vertex == v).all(|l| l.point.is_some())
}

/// Sections ζ_{v,i}, i ∈ I_v, determined by the located special points of `v`.
pub fn vertex_sections(graph: &Graph, v: &Vertex, data: &EtaData) -> Result<Vec<(usize, RationalSection)>> {
    let mut pts: Vec<(P1Point, Vec<i64>)> = vec![];
    for e in &graph.edges {
        for b in e.branches.iter().filter(|b| b.vertex == v.id) {
            let p = b.point.clone().ok_or_else(|| Error::Precondition(format!("node {} on {} has no point", e.id, v.id)))?;
            pts.push((p, b.contact.clone()));
        }
    }
    for l in graph.legs.iter().filter(|l| l.vertex == v.id) {
        let p = l.point.clone().ok_or_else(|| Error::Precondition(format!("leg {} has no point", l.id)))?;
        pts.push((p, l.contact.clone()));
    }
    for a in 0..pts.len() {
        if pts[..a].iter().any(|(q, _)| *q == pts[a].0) {
            return Err(Error::Precondition(format!("special points on {} coincide at {}", v.id, pts[a].0)));
        }
    }
    let mut out = vec![];
    for &i in &v.stratum {
        let divisor: Vec<(P1Point, i64)> = pts.iter().map(|(p, c)| (p.clone(), c[i - 1])).collect();
        let scale = data.scales.get(&(v.id.clone(), i)).cloned().unwrap_or_else(GR::one);
        out.push((i, build_section(v.dot[i - 1], &divisor, scale)?));
    }
    Ok(out)
}

/// Collect η at every (node, branch, i), from sections where the vertex is
/// located and from explicit data otherwise.
pub fn assemble_eta(graph: &Graph, data: &EtaData) -> Result<EtaAssignment> {
    graph.check_structure()?;
    let mut sections: BTreeMap<&str, Vec<(usize, RationalSection)>> = BTreeMap::new();
    for v in &graph.vertices {
        if !v.stratum.is_empty() && located(graph, &v.id) {
            sections.insert(&v.id, vertex_sections(graph, v, data)?);
        }
    }
    let mut out = EtaAssignment::new();
    for e in &graph.edges {
        for (j, b) in e.branches.iter().enumerate() {
            for &i in &e.stratum {
                let key = (e.id.clone(), j, i);
                let explicit = data.eta.get(&key);
                let from_section = sections
                    .get(b.vertex.as_str())
                    .and_then(|ss| ss.iter().find(|(k, _)| *k == i))
                    .map(|(_, s)| {
                        let (order, eta) = s.leading_coefficient(b.point.as_ref().unwrap());
                        debug_assert_eq!(order, b.contact[i - 1]);
                        eta
                    });
                let eta = match (explicit, from_section) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Invalid(format!(
                            "eta for edge {}, end {j}, coordinate {i} is given and also determined by a section",
                            e.id
                        )))
                    }
                    (Some(x), None) => x.clone(),
                    (None, Some(x)) => x,
                    (None, None) => {
                        return Err(Error::MissingEta {
                            edge: e.id.clone(),
                            end: j,
                            coord: i,
                        })
                    }
                };
                if eta.is_zero() {
                    return Err(Error::Invalid(format!("eta for edge {}, end {j}, coordinate {i} is zero", e.id)));
                }
                out.insert(key, eta);
            }
        }
    }
    Ok(out)
}

/// The raw tuple in the row order of ϱ (or ϱ̄): η_{e⃗}/η_{e⃖} on ordinary
/// nodes, η_j/η_ℓ on the realized rows of a multi-node.
pub fn raw_tuple(graph: &Graph, eta: &EtaAssignment) -> Result<Vec<(String, GR)>> {
    let get = |e: &str, j: usize, i: usize| {
        eta.get(&(e.to_string(), j, i)).cloned().ok_or(Error::MissingEta {
            edge: e.into(),
            end: j,
            coord: i,
        })
    };
    let mut out = vec![];
    for e in &graph.edges {
        if !e.multi {
            for &i in &e.stratum {
                out.push((format!("{}:{i}", e.id), &get(&e.id, 0, i)? / &get(&e.id, 1, i)?));
            }
        } else {
            let l = e.branches.len();
            for j in 0..l.saturating_sub(1) {
                for &i in &e.stratum {
                    out.push((format!("{}/{j}:{i}", e.id), &get(&e.id, j, i)? / &get(&e.id, l - 1, i)?));
                }
            }
        }
    }
    Ok(out)
}

/// χ(t) = ∏ t_r^{χ_r}.
pub fn evaluate(raw: &[GR], chi: &[i64]) -> GR {
    raw.iter()
        .zip(chi)
        .filter(|(_, &c)| c != 0)
        .fold(GR::one(), |acc, (t, &c)| &acc * &t.pow(c))
}

fn check_characters(rho: &LatticeMap, chars: &[Vec<i64>]) -> Result<()> {
    for (k, chi) in chars.iter().enumerate() {
        if chi.len() != rho.rows() {
            return Err(Error::structural(
                format!("characters[{k}]"),
                format!("expected {} entries, found {}", rho.rows(), chi.len()),
            ));
        }
        if !annihilates(rho, chi) {
            return Err(Error::Invalid(format!("characters[{k}] does not vanish on the image of rho")));
        }
    }
    Ok(())
}

fn class_of(rho: &LatticeMap, raw: Vec<(String, GR)>, characters: Option<&[Vec<i64>]>) -> Result<ObstructionClass> {
    let chars = match characters {
        Some(c) => {
            check_characters(rho, c)?;
            c.to_vec()
        }
        None => cokernel_characters(rho).rows,
    };
    let vals: Vec<GR> = raw.iter().map(|(_, x)| x.clone()).collect();
    let values: Vec<GR> = chars.iter().map(|chi| evaluate(&vals, chi)).collect();
    let is_trivial = values.iter().all(|v| v.is_one());
    Ok(ObstructionClass {
        raw,
        characters: chars,
        values,
        is_trivial,
    })
}

/// ob_Γ for a graph with ordinary nodes, under the given characters or the
/// canonical Hermite basis.
pub fn compute_ob(graph: &Graph, data: &EtaData, characters: Option<&[Vec<i64>]>) -> Result<ObstructionClass> {
    let rho = build_rho(graph)?;
    let eta = assemble_eta(graph, data)?;
    class_of(&rho, raw_tuple(graph, &eta)?, characters)
}

/// ob_Γ̄ for a graph that may contain multi-nodes.
pub fn compute_ob_multinode(graph: &Graph, data: &EtaData, characters: Option<&[Vec<i64>]>) -> Result<ObstructionClass> {
    let rho = build_rho_multinode(graph)?;
    let eta = assemble_eta(graph, data)?;
    class_of(&rho, raw_tuple(graph, &eta)?, characters)
}

/// Same as [`compute_ob`] from an already assembled η.
pub fn ob_from_eta(graph: &Graph, eta: &EtaAssignment, characters: Option<&[Vec<i64>]>) -> Result<ObstructionClass> {
    let rho = build_rho_multinode(graph)?;
    class_of(&rho, raw_tuple(graph, eta)?, characters)
}

/// Whether every character value is 1.
pub fn is_trivial(class: &ObstructionClass) -> bool {
    class.values.iter().all(|v| v.is_one())
}

/// Evaluate the same raw tuple under another basis of characters.
pub fn revalue(class: &ObstructionClass, characters: &[Vec<i64>]) -> Vec<GR> {
    let vals: Vec<GR> = class.raw.iter().map(|(_, x)| x.clone()).collect();
    characters.iter().map(|chi| evaluate(&vals, chi)).collect()
}

/// ob_Γ split along the collapse of a ghost vertex v₀.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhostDecomposition {
    pub ghost: String,
    /// ob_Γ under the characters χ of Γ.
    pub ob: ObstructionClass,
    /// ob_Γ̄ under the transported characters χ̄.
    pub ob_bar: ObstructionClass,
    /// o_{v₀}: the class of the ghost-side η, in the convention
    /// ob_Γ̄ · o_{v₀}⁻¹ = ob_Γ.
    pub o_v0: Vec<GR>,
    /// The factor o with ob_Γ = ob_Γ̄ · o, i.e. o_{v₀}⁻¹.
    pub o_display: Vec<GR>,
    pub relation_holds: bool,
}

fn collapsed_eta(c: &GhostCollapse, graph: &Graph, eta: &EtaAssignment, far: bool) -> Result<EtaAssignment> {
    let mut out = EtaAssignment::new();
    for ((e, j, i), x) in eta {
        if !c.branch_edges.contains(e) {
            out.insert((e.clone(), *j, *i), x.clone());
        }
    }
    for (b, e) in c.branch_edges.iter().enumerate() {
        let edge = graph.edge(e).unwrap();
        let ghost_end = edge.branches.iter().position(|br| br.vertex == c.ghost).unwrap();
        let end = if far { 1 - ghost_end } else { ghost_end };
        for &i in &edge.stratum {
            let x = eta.get(&(e.clone(), end, i)).cloned().ok_or(Error::MissingEta {
                edge: e.clone(),
                end,
                coord: i,
            })?;
            out.insert((c.multinode.clone(), b, i), x);
        }
    }
    Ok(out)
}

/// Decompose ob_Γ along the ghost v₀ and verify ob_Γ̄ · o_{v₀}⁻¹ = ob_Γ
/// under the natural isomorphism G(Γ) ≅ G(Γ̄).
pub fn ghost_decomposition(
    graph: &Graph,
    v0: &str,
    data: &EtaData,
    characters: Option<&[Vec<i64>]>,
) -> Result<GhostDecomposition> {
    let rho = build_rho(graph)?;
    let collapse = collapse_ghost(graph, v0)?;
    let rho_bar = build_rho_multinode(&collapse.collapsed)?;
    let eta = assemble_eta(graph, data)?;
    let ob = class_of(&rho, raw_tuple(graph, &eta)?, characters)?;
    let mapped: Vec<Vec<i64>> = ob
        .characters
        .iter()
        .map(|chi| collapse.map_character(&rho, &rho_bar, chi))
        .collect::<Result<_>>()?;
    let far = collapsed_eta(&collapse, graph, &eta, true)?;
    let ob_bar = class_of(&rho_bar, raw_tuple(&collapse.collapsed, &far)?, Some(&mapped))?;
    let o_v0 = ghost_class(&collapse, graph, &eta, &mapped)?;
    let o_display: Vec<GR> = o_v0.iter().map(|x| x.inv().unwrap()).collect();
    let relation_holds = ob
        .values
        .iter()
        .zip(&ob_bar.values)
        .zip(&o_display)
        .all(|((a, b), o)| *a == b * o);
    Ok(GhostDecomposition {
        ghost: v0.into(),
        ob,
        ob_bar,
        o_v0,
        o_display,
        relation_holds,
    })
}

fn ghost_class(c: &GhostCollapse, graph: &Graph, eta: &EtaAssignment, chars_bar: &[Vec<i64>]) -> Result<Vec<GR>> {
    // ghost-side η on the multi-node rows, 1 elsewhere
    let near = collapsed_eta(c, graph, eta, false)?;
    let raw: Vec<GR> = raw_tuple(&c.collapsed, &near)?
        .into_iter()
        .map(|(label, x)| if label.starts_with(&format!("{}/", c.multinode)) { x } else { GR::one() })
        .collect();
    Ok(chars_bar.iter().map(|chi| evaluate(&raw, chi)).collect())
}

/// o_{v₀} ∈ G(Γ̄) from the configuration of special points on the ghost,
/// under characters of ϱ̄ (canonical basis when `None`).
pub fn compute_o_v0(graph: &Graph, v0: &str, data: &EtaData, characters_bar: Option<&[Vec<i64>]>) -> Result<Vec<GR>> {
    let collapse = collapse_ghost(graph, v0)?;
    let ghost = graph.vertex(v0).unwrap();
    if ghost.c1_log != 0 || ghost.dot.iter().any(|&x| x != 0) {
        return Err(Error::Precondition(format!("{v0} has nonzero pairings")));
    }
    if !located(graph, v0) {
        return Err(Error::Precondition(format!("special points of {v0} are not all located")));
    }
    let rho_bar = build_rho_multinode(&collapse.collapsed)?;
    let chars = match characters_bar {
        Some(c) => {
            check_characters(&rho_bar, c)?;
            c.to_vec()
        }
        None => cokernel_characters(&rho_bar).rows,
    };
    // only the ghost's own sections are needed here
    let mut eta = EtaAssignment::new();
    let sections = vertex_sections(graph, ghost, data).map_err(|e| match e {
        Error::DegreeMismatch { .. } => Error::Internal(format!("ghost sections: {e}")),
        other => other,
    })?;
    for e in &graph.edges {
        for (j, b) in e.branches.iter().enumerate() {
            if b.vertex == v0 {
                for (i, s) in &sections {
                    eta.insert((e.id.clone(), j, *i), s.leading_coefficient(b.point.as_ref().unwrap()).1);
                }
            }
        }
    }
    ghost_class(&collapse, graph, &eta, &chars)
}

/// ob_Γ̄(f̄) · o_{v₀}(C_{v₀})⁻¹ = ob_Γ(f), checked exactly.
pub fn relation_check(graph: &Graph, v0: &str, data: &EtaData, characters: Option<&[Vec<i64>]>) -> Result<bool> {
    Ok(ghost_decomposition(graph, v0, data, characters)?.relation_holds)
}

/// Γ obtained from an expansion Γ̃ by contracting a tree of ghosts.
#[derive(Clone, Debug, Serialize)]
pub struct CollapseHomomorphism {
    #[serde(skip)]
    pub collapsed: Graph,
    pub vertex: String,
    /// Characters of G(Γ̃) restricted to the rows of Γ: the monomial map on
    /// character lattices dual to φ: G(Γ) → G(Γ̃).
    pub phi_characters: Vec<Vec<i64>>,
    pub surjective: bool,
    pub kernel_rank: (usize, usize),
    pub cokernel_rank: (usize, usize),
    /// rank ker ϱ' of the ghost tree with the diagonal quotient.
    pub tree_kernel_rank: usize,
    pub tree_cokernel_rank: usize,
    /// rank of the connecting map ker ϱ' → coker ϱ.
    pub connecting_rank: usize,
}

pub fn collapse_homomorphism(expanded: &Graph, tree: &[&str], new_id: &str) -> Result<CollapseHomomorphism> {
    expanded.check_structure()?;
    if expanded.has_multinodes() {
        return Err(Error::Invalid("expansion must have ordinary nodes".into()));
    }
    if tree.is_empty() {
        return Err(Error::Invalid("empty ghost tree".into()));
    }
    let tset: BTreeSet<&str> = tree.iter().copied().collect();
    let mut common: Option<Stratum> = None;
    for &v in &tset {
        let vert = expanded
            .vertex(v)
            .ok_or_else(|| Error::structural("tree", format!("unknown vertex {v}")))?;
        if vert.kind != VertexKind::Ghost {
            return Err(Error::Invalid(format!("{v} is not a ghost")));
        }
        match &common {
            None => common = Some(vert.stratum.clone()),
            Some(s) if *s != vert.stratum => {
                return Err(Error::Invalid("ghost tree vertices have different strata".into()));
            }
            _ => {}
        }
    }
    let stratum = common.unwrap();
    if expanded.vertex(new_id).is_some() && !tset.contains(new_id) {
        return Err(Error::Invalid(format!("id {new_id} already in use")));
    }
    let internal: Vec<&crate::graph::Edge> = expanded
        .edges
        .iter()
        .filter(|e| e.branches.iter().all(|b| tset.contains(b.vertex.as_str())))
        .collect();
    if internal.len() + 1 != tset.len() || internal.iter().any(|e| e.is_loop()) {
        return Err(Error::Invalid("the ghost vertices do not form a tree".into()));
    }
    let mut sub = Graph::new(expanded.n_div, expanded.dim);
    sub.vertices = expanded.vertices.iter().filter(|v| tset.contains(v.id.as_str())).cloned().collect();
    sub.edges = internal.iter().map(|e| (*e).clone()).collect();
    if !sub.is_connected() {
        return Err(Error::Invalid("the ghost tree is disconnected".into()));
    }
    for e in &sub.edges {
        if e.stratum != stratum {
            return Err(Error::Invalid(format!("tree edge {} has I_e ≠ I", e.id)));
        }
    }

    let mut g = expanded.clone();
    let internal_ids: BTreeSet<String> = internal.iter().map(|e| e.id.clone()).collect();
    g.edges.retain(|e| !internal_ids.contains(&e.id));
    for e in g.edges.iter_mut() {
        for b in e.branches.iter_mut() {
            if tset.contains(b.vertex.as_str()) {
                b.vertex = new_id.into();
                b.point = None;
            }
        }
    }
    for l in g.legs.iter_mut() {
        if tset.contains(l.vertex.as_str()) {
            l.vertex = new_id.into();
            l.point = None;
        }
    }
    g.vertices.retain(|v| !tset.contains(v.id.as_str()));
    g.vertices.push(Vertex {
        id: new_id.into(),
        genus: 0,
        stratum: stratum.clone(),
        c1_log: 0,
        dot: vec![0; expanded.n_div],
        kind: VertexKind::Ghost,
        image_label: None,
        cover: None,
    });
    g.canonicalize();

    let rho = build_rho(&g)?;
    let rho_t = build_rho(expanded)?;
    // ϱ' with the diagonal removed by dropping the first tree vertex
    let tree_rho = {
        let full = build_rho(&sub)?;
        let first = &sub.vertices[0].id;
        let keep: Vec<usize> = (0..full.cols())
            .filter(|&c| !full.domain[c].starts_with(&format!("s:{first}:")))
            .collect();
        let m: Vec<Vec<i64>> = full.matrix.iter().map(|r| keep.iter().map(|&c| r[c]).collect()).collect();
        LatticeMap::from_matrix(m, keep.iter().map(|&c| full.domain[c].clone()).collect(), full.codomain.clone())
    };
    let mut phi = vec![];
    for chi in cokernel_characters(&rho_t).rows {
        let mut row = vec![0i64; rho.rows()];
        for (r, label) in rho.codomain.iter().enumerate() {
            let t = rho_t
                .row_index(label)
                .ok_or_else(|| Error::Internal(format!("row {label} missing in the expansion")))?;
            row[r] = chi[t];
        }
        if !annihilates(&rho, &row) {
            return Err(Error::Internal("restricted character does not vanish on ϱ".into()));
        }
        phi.push(row);
    }
    let phi_rank = if phi.is_empty() {
        0
    } else {
        normal_form::row_hnf(&normal_form::to_big(&phi), rho.rows()).len()
    };
    let surjective = phi_rank == rho_t.cokernel_rank();
    let k = (rho.kernel_rank(), rho_t.kernel_rank());
    let c = (rho.cokernel_rank(), rho_t.cokernel_rank());
    let connecting = tree_rho.kernel_rank() as i64 - (k.1 as i64 - k.0 as i64);
    if connecting < 0 || connecting != c.0 as i64 - c.1 as i64 {
        return Err(Error::Internal("rank count violates the exact sequence".into()));
    }
    Ok(CollapseHomomorphism {
        collapsed: g,
        vertex: new_id.into(),
        phi_characters: phi,
        surjective,
        kernel_rank: k,
        cokernel_rank: c,
        tree_kernel_rank: tree_rho.kernel_rank(),
        tree_cokernel_rank: tree_rho.cokernel_rank(),
        connecting_rank: connecting as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::stratum;

    fn g(s: &str) -> GR {
        s.parse().unwrap()
    }
    fn fin(s: &str) -> P1Point {
        P1Point::Finite(g(s))
    }

    /// Three lines through D₁₂ and a ghost with two marked points; edges
    /// run out of the ghost.
    fn ghost_dep(m: [&str; 3], a2: &str, a3: &str) -> (Graph, EtaData) {
        let mut gr = Graph::new(2, 2);
        gr.add_vertex("v0", stratum([1, 2]), 0, vec![0, 0], VertexKind::Ghost);
        let q = ["1", a2, a3];
        let mut data = EtaData::default();
        for j in 1..=3 {
            gr.add_vertex(&format!("v{j}"), stratum([]), 1, vec![1, 1], VertexKind::Principal);
            let e = gr.add_edge(&format!("e{j}"), "v0", &format!("v{j}"), stratum([1, 2]), vec![-1, -1]);
            e.branches[0].point = Some(fin(q[j - 1]));
            data.eta.insert((format!("e{j}"), 1, 1), g("1"));
            data.eta.insert((format!("e{j}"), 1, 2), g(m[j - 1]));
        }
        gr.add_leg("z1", "v0", vec![2, 1]).point = Some(fin("0"));
        gr.add_leg("z2", "v0", vec![1, 2]).point = Some(P1Point::Infinity);
        (gr, data)
    }

    fn published_chars() -> Vec<Vec<i64>> {
        vec![vec![1, -1, -1, 1, 0, 0], vec![0, 0, 1, -1, -1, 1]]
    }

    #[test]
    fn ghost_dep_values() {
        let (gr, data) = ghost_dep(["2", "3/5", "-7"], "4", "1/3+1*i");
        let ob = compute_ob(&gr, &data, Some(&published_chars())).unwrap();
        let (m1, m2, m3, a2, a3) = (g("2"), g("3/5"), g("-7"), g("4"), g("1/3+1*i"));
        assert_eq!(ob.values[0], &m1 / &(&m2 * &a2));
        assert_eq!(ob.values[1], &(&m2 * &a2) / &(&m3 * &a3));
        let d = ghost_decomposition(&gr, "v0", &data, Some(&published_chars())).unwrap();
        assert!(d.relation_holds);
        assert_eq!(d.ob_bar.values, vec![&m1 / &m2, &m2 / &m3]);
        assert_eq!(d.o_display, vec![a2.inv().unwrap(), &a2 / &a3]);
        let o = compute_o_v0(&gr, "v0", &data, Some(&d.ob_bar.characters)).unwrap();
        assert_eq!(o, d.o_v0);
    }

    #[test]
    fn missing_and_doubled_eta() {
        let (gr, mut data) = ghost_dep(["2", "3", "5"], "4", "7");
        data.eta.remove(&("e2".to_string(), 1, 2));
        assert_eq!(
            compute_ob(&gr, &data, None).unwrap_err(),
            Error::MissingEta { edge: "e2".into(), end: 1, coord: 2 }
        );
        let (gr, mut data) = ghost_dep(["2", "3", "5"], "4", "7");
        data.eta.insert(("e2".to_string(), 0, 2), g("1"));
        assert!(matches!(compute_ob(&gr, &data, None), Err(Error::Invalid(_))));
        let (gr, mut data) = ghost_dep(["2", "3", "5"], "4", "7");
        data.eta.insert(("e2".to_string(), 1, 2), g("0"));
        assert!(matches!(compute_ob(&gr, &data, None), Err(Error::Invalid(_))));
    }

    #[test]
    fn coincident_points_are_a_precondition_failure() {
        let (gr, data) = ghost_dep(["2", "3", "5"], "4", "4");
        assert!(matches!(relation_check(&gr, "v0", &data, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn non_characters_are_rejected() {
        let (gr, data) = ghost_dep(["2", "3", "5"], "4", "7");
        let bad = vec![vec![1, 0, 0, 0, 0, 0]];
        assert!(matches!(compute_ob(&gr, &data, Some(&bad)), Err(Error::Invalid(_))));
    }

    #[test]
    fn two_branch_multinode_matches_ordinary_node() {
        let (gr, data) = ghost_dep(["2", "3", "5"], "4", "7");
        let eta = assemble_eta(&gr, &data).unwrap();
        let ob = ob_from_eta(&gr, &eta, None).unwrap();
        let mut multi = gr.clone();
        for e in multi.edges.iter_mut() {
            e.multi = true;
        }
        let ob_m = ob_from_eta(&multi, &eta, None).unwrap();
        let relabel: Vec<GR> = ob_m.raw.iter().map(|(_, x)| x.clone()).collect();
        let plain: Vec<GR> = ob.raw.iter().map(|(_, x)| x.clone()).collect();
        assert_eq!(relabel, plain);
    }

    #[test]
    fn single_ghost_tree_is_identity() {
        let (gr, _) = ghost_dep(["2", "3", "5"], "4", "7");
        let h = collapse_homomorphism(&gr, &["v0"], "v0").unwrap();
        assert!(h.surjective);
        assert_eq!(h.tree_kernel_rank, 0);
        assert_eq!(h.kernel_rank.0, h.kernel_rank.1);
        let rho = build_rho(&gr).unwrap();
        assert!(crate::lattice::same_character_lattice(
            &h.phi_characters,
            &cokernel_characters(&rho).rows,
            rho.rows()
        ));
    }

    #[test]
    fn non_ghost_tree_is_rejected() {
        let (gr, _) = ghost_dep(["2", "3", "5"], "4", "7");
        assert!(collapse_homomorphism(&gr, &["v0", "v1"], "w").is_err());
    }
}
