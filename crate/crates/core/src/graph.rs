//! Decorated dual graphs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::P1Point;

/// A subset of {1, …, N}; indices are 1-based throughout.
pub type Stratum = BTreeSet<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Principal,
    Bubble,
    Ghost,
}

/// Degree of a multiple cover together with the pairings of the underlying class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub degree: i64,
    pub c1_log: i64,
    pub dot: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub genus: i64,
    pub stratum: Stratum,
    /// c1 of TX(−log D) on A_v.
    pub c1_log: i64,
    /// A_v · D_i.
    pub dot: Vec<i64>,
    pub kind: VertexKind,
    pub image_label: Option<String>,
    pub cover: Option<Cover>,
}

/// A nodal point: the vertex carrying it, its contact vector and optional data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub vertex: String,
    pub contact: Vec<i64>,
    pub point: Option<P1Point>,
    pub label: Option<String>,
}

/// An ordinary node has two branches with opposite contacts; the first branch
/// is the start of the reference orientation. A multi-node has any number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub stratum: Stratum,
    pub branches: Vec<Branch>,
    pub multi: bool,
}

impl Edge {
    pub fn start(&self) -> &str {
        &self.branches[0].vertex
    }

    pub fn end(&self) -> &str {
        &self.branches[1].vertex
    }

    /// s_e⃗ for the reference orientation.
    pub fn contact(&self) -> &[i64] {
        &self.branches[0].contact
    }

    pub fn is_loop(&self) -> bool {
        !self.multi && self.start() == self.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub id: String,
    pub vertex: String,
    pub contact: Vec<i64>,
    pub point: Option<P1Point>,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    /// Number of divisor branches.
    pub n_div: usize,
    /// Complex dimension of the ambient manifold.
    pub dim: i64,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub legs: Vec<Leg>,
}

pub fn stratum<const K: usize>(ix: [usize; K]) -> Stratum {
    ix.into_iter().collect()
}

impl Graph {
    pub fn new(n_div: usize, dim: i64) -> Self {
        Graph {
            n_div,
            dim,
            vertices: vec![],
            edges: vec![],
            legs: vec![],
        }
    }

    pub fn add_vertex(&mut self, id: &str, stratum: Stratum, c1_log: i64, dot: Vec<i64>, kind: VertexKind) -> &mut Vertex {
        self.vertices.push(Vertex {
            id: id.into(),
            genus: 0,
            stratum,
            c1_log,
            dot,
            kind,
            image_label: None,
            cover: None,
        });
        self.vertices.last_mut().unwrap()
    }

    /// Ordinary edge oriented `a → b` with contact `s` at `a`.
    pub fn add_edge(&mut self, id: &str, a: &str, b: &str, stratum: Stratum, s: Vec<i64>) -> &mut Edge {
        let neg = s.iter().map(|x| -x).collect();
        self.edges.push(Edge {
            id: id.into(),
            stratum,
            branches: vec![
                Branch { vertex: a.into(), contact: s, point: None, label: None },
                Branch { vertex: b.into(), contact: neg, point: None, label: None },
            ],
            multi: false,
        });
        self.edges.last_mut().unwrap()
    }

    pub fn add_leg(&mut self, id: &str, v: &str, s: Vec<i64>) -> &mut Leg {
        self.legs.push(Leg {
            id: id.into(),
            vertex: v.into(),
            contact: s,
            point: None,
            label: None,
        });
        self.legs.last_mut().unwrap()
    }

    /// Sort vertices and edges by id; legs keep their order.
    pub fn canonicalize(&mut self) {
        self.vertices.sort_by(|a, b| a.id.cmp(&b.id));
        self.edges.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn vertex_pos(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn has_multinodes(&self) -> bool {
        self.edges.iter().any(|e| e.multi)
    }

    /// Number of nodal points (|E⃗|).
    pub fn nodal_points(&self) -> usize {
        self.edges.iter().map(|e| e.branches.len()).sum()
    }

    pub fn first_betti(&self) -> i64 {
        self.nodal_points() as i64 - self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn genus(&self) -> i64 {
        self.vertices.iter().map(|v| v.genus).sum::<i64>() + self.first_betti()
    }

    pub fn k(&self) -> usize {
        self.legs.len()
    }

    pub fn c1_log_total(&self) -> i64 {
        self.vertices.iter().map(|v| v.c1_log).sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in &self.edges {
            for a in &e.branches {
                for b in &e.branches {
                    adj.entry(&a.vertex).or_default().push(&b.vertex);
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([self.vertices[0].id.as_str()]);
        seen.insert(self.vertices[0].id.as_str());
        while let Some(v) = queue.pop_front() {
            for w in adj.get(v).into_iter().flatten() {
                if seen.insert(*w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Ids must be unique, references must resolve and vectors must have length N.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.n_div;
        let mut ids = BTreeSet::new();
        let len_ok = |path: String, v: &[i64]| {
            if v.len() == n {
                Ok(())
            } else {
                Err(Error::structural(path, format!("expected {n} entries, found {}", v.len())))
            }
        };
        let strat_ok = |path: String, s: &Stratum| match s.iter().find(|&&i| i == 0 || i > n) {
            Some(i) => Err(Error::structural(path, format!("index {i} outside 1..={n}"))),
            None => Ok(()),
        };
        if self.vertices.is_empty() {
            return Err(Error::structural("vertices", "graph has no vertices"));
        }
        for (a, v) in self.vertices.iter().enumerate() {
            if !ids.insert(v.id.as_str()) {
                return Err(Error::structural(format!("vertices[{a}].id"), format!("duplicate id {}", v.id)));
            }
            len_ok(format!("vertices[{a}].dot"), &v.dot)?;
            strat_ok(format!("vertices[{a}].stratum"), &v.stratum)?;
            if v.genus < 0 {
                return Err(Error::structural(format!("vertices[{a}].genus"), "negative genus"));
            }
            if let Some(c) = &v.cover {
                len_ok(format!("vertices[{a}].cover.dot"), &c.dot)?;
            }
        }
        let vset: BTreeSet<&str> = self.vertices.iter().map(|v| v.id.as_str()).collect();
        for (a, e) in self.edges.iter().enumerate() {
            if !ids.insert(e.id.as_str()) {
                return Err(Error::structural(format!("edges[{a}].id"), format!("duplicate id {}", e.id)));
            }
            strat_ok(format!("edges[{a}].stratum"), &e.stratum)?;
            if !e.multi && e.branches.len() != 2 {
                return Err(Error::structural(format!("edges[{a}].ends"), "an ordinary edge has two ends"));
            }
            if e.branches.is_empty() {
                return Err(Error::structural(format!("edges[{a}].multi"), "a node needs at least one branch"));
            }
            for (j, b) in e.branches.iter().enumerate() {
                if !vset.contains(b.vertex.as_str()) {
                    return Err(Error::structural(
                        format!("edges[{a}].ends[{j}]"),
                        format!("unknown vertex {}", b.vertex),
                    ));
                }
                len_ok(format!("edges[{a}].contact"), &b.contact)?;
            }
        }
        for (a, l) in self.legs.iter().enumerate() {
            if !ids.insert(l.id.as_str()) {
                return Err(Error::structural(format!("legs[{a}].id"), format!("duplicate id {}", l.id)));
            }
            if !vset.contains(l.vertex.as_str()) {
                return Err(Error::structural(format!("legs[{a}].vertex"), format!("unknown vertex {}", l.vertex)));
            }
            len_ok(format!("legs[{a}].contact"), &l.contact)?;
        }
        Ok(())
    }

    /// Σ of contacts at the special points of `v`, per coordinate.
    pub fn contact_sum(&self, v: &str) -> Vec<i64> {
        let mut s = vec![0; self.n_div];
        let pts = self
            .edges
            .iter()
            .flat_map(|e| e.branches.iter().map(|b| (&b.vertex, &b.contact)))
            .chain(self.legs.iter().map(|l| (&l.vertex, &l.contact)));
        for (w, c) in pts {
            if w == v {
                for i in 0..self.n_div {
                    s[i] += c[i];
                }
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub invariant: String,
    pub element: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, invariant: &str, element: &str, detail: String) {
        self.violations.push(Violation {
            invariant: invariant.into(),
            element: element.into(),
            detail,
        });
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ValidateOptions {
    pub multinode_allowed: bool,
}

pub fn validate_graph(graph: &Graph) -> Result<ValidationReport> {
    validate_graph_with(graph, ValidateOptions::default())
}

pub fn validate_graph_with(graph: &Graph, opts: ValidateOptions) -> Result<ValidationReport> {
    graph.check_structure()?;
    let n = graph.n_div;
    let mut rep = ValidationReport::default();
    let strata: BTreeMap<&str, &Stratum> = graph.vertices.iter().map(|v| (v.id.as_str(), &v.stratum)).collect();

    for v in &graph.vertices {
        if v.kind == VertexKind::Ghost && (v.c1_log != 0 || v.dot.iter().any(|&x| x != 0)) {
            rep.push("ghost-degree", &v.id, "a ghost has zero pairings".into());
        }
        if v.kind != VertexKind::Principal && v.genus != 0 {
            rep.push("bubble-genus", &v.id, format!("genus {} on a {:?} vertex", v.genus, v.kind));
        }
        if let Some(c) = &v.cover {
            if c.degree < 1 {
                rep.push("cover-degree", &v.id, format!("cover degree {}", c.degree));
            } else if v.c1_log != c.degree * c.c1_log || (0..n).any(|i| v.dot[i] != c.degree * c.dot[i]) {
                rep.push("cover-pairings", &v.id, "pairings are not the degree times the underlying class".into());
            }
        }
    }

    for e in &graph.edges {
        if e.multi && !opts.multinode_allowed {
            rep.push("multinode", &e.id, format!("multi-node with {} branches", e.branches.len()));
        }
        if !e.multi {
            let union: Stratum = strata[e.start()].union(strata[e.end()]).copied().collect();
            if union != e.stratum {
                rep.push(
                    "edge-stratum",
                    &e.id,
                    format!("I_e = {:?} but I_v ∪ I_v' = {:?}", e.stratum, union),
                );
            }
        } else {
            for b in &e.branches {
                if !strata[b.vertex.as_str()].is_subset(&e.stratum) {
                    rep.push("edge-stratum", &e.id, format!("I_{} not inside I_m", b.vertex));
                }
            }
        }
        for (j, b) in e.branches.iter().enumerate() {
            let iv = strata[b.vertex.as_str()];
            for i in 1..=n {
                let s = b.contact[i - 1];
                if !e.stratum.contains(&i) && s != 0 {
                    rep.push("edge-sign", &e.id, format!("end {j}: entry {i} is {s}, expected 0 outside I_e"));
                } else if e.stratum.contains(&i) && !iv.contains(&i) && s <= 0 {
                    rep.push("edge-sign", &e.id, format!("end {j}: entry {i} is {s}, expected > 0 on I_e − I_v"));
                }
            }
        }
    }

    for l in &graph.legs {
        let iv = strata[l.vertex.as_str()];
        for i in 1..=n {
            if !iv.contains(&i) && l.contact[i - 1] < 0 {
                rep.push("leg-sign", &l.id, format!("entry {i} is negative outside I_v"));
            }
        }
    }

    for v in &graph.vertices {
        let s = graph.contact_sum(&v.id);
        if s != v.dot {
            rep.push("balance", &v.id, format!("contacts sum to {s:?}, A_v·D = {:?}", v.dot));
        }
    }

    if !graph.is_connected() {
        rep.push("connected", "graph", "dual graph is disconnected".into());
    }
    rep.violations.sort();
    Ok(rep)
}

/// Result of solving the balance condition for edge contacts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decorations {
    /// A tree whose forced decoration breaks a sign constraint.
    None { reason: String },
    /// Per edge (graph order), the contact vector s_e⃗.
    Unique { contacts: Vec<Vec<i64>> },
    Family {
        particular: Vec<Vec<i64>>,
        /// Integer cycle vectors over the edges, shared by all coordinates.
        cycle_basis: Vec<Vec<i64>>,
        /// All admissible assignments with entries in [−bound, bound].
        solutions: Option<Vec<Vec<Vec<i64>>>>,
    },
}

const ENUMERATION_CAP: usize = 200_000;

/// Solve Σ_{e⃗ at v} s_e⃗ + Σ legs = A_v·D for the edge contacts of `skeleton`
/// (existing contacts are ignored). Edge strata impose the sign rules.
pub fn solve_decorations(skeleton: &Graph, bound: Option<i64>) -> Result<Decorations> {
    skeleton.check_structure()?;
    if skeleton.has_multinodes() {
        return Err(Error::Invalid("decorations are solved for ordinary nodes only".into()));
    }
    if !skeleton.is_connected() {
        return Err(Error::Invalid("skeleton is disconnected".into()));
    }
    let n = skeleton.n_div;
    let nv = skeleton.vertices.len();
    let ne = skeleton.edges.len();
    let pos = |id: &str| skeleton.vertex_pos(id).unwrap();
    let ends: Vec<(usize, usize)> = skeleton.edges.iter().map(|e| (pos(e.start()), pos(e.end()))).collect();

    // demand b_v = A_v·D − Σ legs
    let mut demand = vec![vec![0i64; n]; nv];
    for (a, v) in skeleton.vertices.iter().enumerate() {
        demand[a] = v.dot.clone();
    }
    for l in &skeleton.legs {
        let a = pos(&l.vertex);
        for i in 0..n {
            demand[a][i] -= l.contact[i];
        }
    }
    for i in 0..n {
        let total: i64 = demand.iter().map(|d| d[i]).sum();
        if total != 0 {
            return Err(Error::NoDecoration(format!(
                "coordinate {} is not conserved: Σ_v (A_v·D − legs) = {total}",
                i + 1
            )));
        }
    }

    // spanning tree by BFS
    let mut parent_edge = vec![usize::MAX; nv];
    let mut order = vec![0usize];
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut tree = vec![false; ne];
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for (k, &(a, b)) in ends.iter().enumerate() {
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = k;
                tree[k] = true;
                order.push(w);
            }
        }
    }

    // leaf peeling: given demands and fixed non-tree values, fill tree edges
    let peel = |dem: &[i64], fixed: &[i64]| -> Vec<i64> {
        let mut x = fixed.to_vec();
        let mut rest = dem.to_vec();
        for (k, &(a, b)) in ends.iter().enumerate() {
            if !tree[k] && a != b {
                rest[a] -= x[k];
                rest[b] += x[k];
            }
        }
        for &v in order.iter().skip(1).rev() {
            let k = parent_edge[v];
            let (a, b) = ends[k];
            // the remaining demand at v must flow through its parent edge
            if a == v {
                x[k] = rest[v];
                rest[a] -= x[k];
                rest[b] += x[k];
            } else {
                x[k] = -rest[v];
                rest[a] -= x[k];
                rest[b] += x[k];
            }
        }
        debug_assert!(rest.iter().all(|&r| r == 0));
        x
    };

    let zero = vec![0i64; ne];
    let particular_by_coord: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let dem: Vec<i64> = demand.iter().map(|d| d[i]).collect();
            peel(&dem, &zero)
        })
        .collect();
    let particular: Vec<Vec<i64>> = (0..ne).map(|k| (0..n).map(|i| particular_by_coord[i][k]).collect()).collect();

    let cycle_edges: Vec<usize> = (0..ne).filter(|&k| !tree[k]).collect();
    let cycle_basis: Vec<Vec<i64>> = cycle_edges
        .iter()
        .map(|&f| {
            let mut fixed = vec![0i64; ne];
            fixed[f] = 1;
            peel(&vec![0; nv], &fixed)
        })
        .collect();

    // sign rule per (edge, coordinate): 0 outside I_e; > 0 on I_e − I_start; < 0 on I_e − I_end
    let allowed = |k: usize, i: usize, x: i64| -> bool {
        let e = &skeleton.edges[k];
        let (a, b) = ends[k];
        let c = i + 1;
        if !e.stratum.contains(&c) {
            return x == 0;
        }
        let sa = &skeleton.vertices[a].stratum;
        let sb = &skeleton.vertices[b].stratum;
        (sa.contains(&c) || x > 0) && (sb.contains(&c) || x < 0)
    };

    if cycle_edges.is_empty() {
        for k in 0..ne {
            for i in 0..n {
                if !allowed(k, i, particular[k][i]) {
                    return Ok(Decorations::None {
                        reason: format!(
                            "edge {} coordinate {} is forced to {}",
                            skeleton.edges[k].id,
                            i + 1,
                            particular[k][i]
                        ),
                    });
                }
            }
        }
        return Ok(Decorations::Unique { contacts: particular });
    }

    let solutions = match bound {
        None => None,
        Some(bd) => {
            // per coordinate, all admissible edge-value vectors
            let mut per_coord: Vec<Vec<Vec<i64>>> = vec![];
            for i in 0..n {
                let mut found = vec![];
                let m = cycle_edges.len();
                let mut coef = vec![-bd; m];
                loop {
                    let mut x = particular_by_coord[i].clone();
                    for (c, cyc) in coef.iter().zip(&cycle_basis) {
                        for k in 0..ne {
                            x[k] += c * cyc[k];
                        }
                    }
                    if x.iter().enumerate().all(|(k, &v)| v.abs() <= bd && allowed(k, i, v)) {
                        found.push(x);
                    }
                    let mut t = 0;
                    while t < m && coef[t] == bd {
                        coef[t] = -bd;
                        t += 1;
                    }
                    if t == m {
                        break;
                    }
                    coef[t] += 1;
                }
                per_coord.push(found);
            }
            let count: usize = per_coord.iter().map(|f| f.len()).product();
            if count > ENUMERATION_CAP {
                return Err(Error::SizeCap { size: count, cap: ENUMERATION_CAP });
            }
            let mut out: Vec<Vec<Vec<i64>>> = vec![vec![vec![]; ne]];
            for found in &per_coord {
                let mut next = vec![];
                for partial in &out {
                    for x in found {
                        let mut p = partial.clone();
                        for k in 0..ne {
                            p[k].push(x[k]);
                        }
                        next.push(p);
                    }
                }
                out = next;
            }
            if n == 0 {
                out = vec![vec![vec![]; ne]];
            }
            Some(out)
        }
    };
    Ok(Decorations::Family {
        particular,
        cycle_basis,
        solutions,
    })
}

/// Copy of `skeleton` with the given edge contacts installed.
pub fn with_contacts(skeleton: &Graph, contacts: &[Vec<i64>]) -> Graph {
    let mut g = skeleton.clone();
    for (e, s) in g.edges.iter_mut().zip(contacts) {
        e.branches[0].contact = s.clone();
        e.branches[1].contact = s.iter().map(|x| -x).collect();
    }
    g
}
