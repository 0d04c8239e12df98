//! The map ϱ: D = Z^E ⊕ ⊕_v Z^{I_v} → T = ⊕_e Z^{I_e}, its kernel and its
//! character lattice.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Branch, Edge, Graph, VertexKind};
use crate::normal_form::{self, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterBasis {
    /// Rows over the T coordinates, in Hermite normal form.
    pub rows: Vec<Vec<i64>>,
}

impl CharacterBasis {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Debug)]
pub struct LatticeMap {
    /// Rows indexed by T coordinates, columns by D coordinates.
    pub matrix: Vec<Vec<i64>>,
    /// Labels "λ:e" (one per edge, "λ:e/j" per multi-node branch) then "s:v:i".
    pub domain: Vec<String>,
    /// Labels "e:i"; multi-node rows are "e/j:i" for the realized quotient.
    pub codomain: Vec<String>,
    rank: usize,
    kernel: IntMatrix,
    characters: IntMatrix,
    smith: Vec<BigInt>,
}

fn small(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i64().expect("entry exceeds i64")).collect())
        .collect()
}

impl LatticeMap {
    pub fn from_matrix(matrix: Vec<Vec<i64>>, domain: Vec<String>, codomain: Vec<String>) -> Self {
        let cols = domain.len();
        let big = normal_form::to_big(&matrix);
        let (_, _, rank) = normal_form::hermite(&big, cols);
        let kernel = normal_form::right_kernel(&big, cols);
        let characters = normal_form::left_kernel(&big, cols);
        let smith = normal_form::smith_invariants(&big, cols);
        LatticeMap {
            matrix,
            domain,
            codomain,
            rank,
            kernel,
            characters,
            smith,
        }
    }

    pub fn rows(&self) -> usize {
        self.codomain.len()
    }

    pub fn cols(&self) -> usize {
        self.domain.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kernel_rank(&self) -> usize {
        self.kernel.len()
    }

    /// Rank of the cokernel computed from the Smith form.
    pub fn cokernel_rank(&self) -> usize {
        self.rows() - self.smith.len()
    }

    /// Invariant factors > 1 of the Smith form (torsion of coker ϱ).
    pub fn torsion(&self) -> Vec<i64> {
        self.smith
            .iter()
            .filter(|d| *d > &BigInt::from(1))
            .map(|d| d.to_i64().unwrap())
            .collect()
    }

    pub fn smith_rank(&self) -> usize {
        self.smith.len()
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        self.matrix.iter().map(|r| r[c]).collect()
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.codomain.iter().position(|l| l == label)
    }
}

pub fn kernel_lattice(map: &LatticeMap) -> Vec<Vec<i64>> {
    small(&map.kernel)
}

pub fn cokernel_characters(map: &LatticeMap) -> CharacterBasis {
    CharacterBasis {
        rows: small(&map.characters),
    }
}

/// ϱ for a graph with ordinary nodes only.
pub fn build_rho(graph: &Graph) -> Result<LatticeMap> {
    if graph.has_multinodes() {
        return Err(Error::Invalid("graph has multi-nodes; use build_rho_multinode".into()));
    }
    build(graph)
}

/// ϱ̄ for a graph containing multi-nodes. Each multi-node with branches
/// 1..ℓ contributes (⊕_j Z^{I_m}) / diagonal, realized by the coordinates
/// y_j = x_j − x_ℓ for j < ℓ; branch j has its own λ and its vertex enters
/// with sign +.
pub fn build_rho_multinode(graph: &Graph) -> Result<LatticeMap> {
    build(graph)
}

fn build(graph: &Graph) -> Result<LatticeMap> {
    graph.check_structure()?;
    let mut domain = vec![];
    for e in &graph.edges {
        if e.multi {
            for j in 0..e.branches.len() {
                domain.push(format!("λ:{}/{j}", e.id));
            }
        } else {
            domain.push(format!("λ:{}", e.id));
        }
    }
    let mut vcol = std::collections::BTreeMap::new();
    for v in &graph.vertices {
        for &i in &v.stratum {
            vcol.insert((v.id.as_str(), i), domain.len());
            domain.push(format!("s:{}:{i}", v.id));
        }
    }
    let cols = domain.len();
    let mut codomain = vec![];
    let mut matrix: Vec<Vec<i64>> = vec![];
    let mut lam = 0;
    for e in &graph.edges {
        if !e.multi {
            for &i in &e.stratum {
                let mut row = vec![0i64; cols];
                row[lam] = e.contact()[i - 1];
                if !e.is_loop() {
                    if let Some(&c) = vcol.get(&(e.start(), i)) {
                        row[c] += 1;
                    }
                    if let Some(&c) = vcol.get(&(e.end(), i)) {
                        row[c] -= 1;
                    }
                }
                codomain.push(format!("{}:{i}", e.id));
                matrix.push(row);
            }
            lam += 1;
        } else {
            let l = e.branches.len();
            // x_j as a row vector over D, for each i
            let x = |j: usize, i: usize| -> Vec<i64> {
                let mut row = vec![0i64; cols];
                row[lam + j] = e.branches[j].contact[i - 1];
                if let Some(&c) = vcol.get(&(e.branches[j].vertex.as_str(), i)) {
                    row[c] += 1;
                }
                row
            };
            for j in 0..l.saturating_sub(1) {
                for &i in &e.stratum {
                    let a = x(j, i);
                    let b = x(l - 1, i);
                    matrix.push(a.iter().zip(&b).map(|(p, q)| p - q).collect());
                    codomain.push(format!("{}/{j}:{i}", e.id));
                }
            }
            lam += l;
        }
    }
    Ok(LatticeMap::from_matrix(matrix, domain, codomain))
}

/// Copy of the graph with the reference orientation of edge `id` reversed.
pub fn flip_edge(graph: &Graph, id: &str) -> Graph {
    let mut g = graph.clone();
    if let Some(e) = g.edges.iter_mut().find(|e| e.id == id && !e.multi) {
        e.branches.swap(0, 1);
    }
    g
}

/// Γ̄ obtained by removing a ghost vertex v₀: its nodes merge into one
/// multi-node whose branches are the far ends of the edges at v₀.
#[derive(Clone, Debug)]
pub struct GhostCollapse {
    pub ghost: String,
    pub collapsed: Graph,
    pub multinode: String,
    /// Edges of Γ at v₀, in branch order.
    pub branch_edges: Vec<String>,
    /// Whether each branch edge is oriented out of v₀ in Γ.
    pub outgoing: Vec<bool>,
}

pub fn collapse_ghost(graph: &Graph, v0: &str) -> Result<GhostCollapse> {
    graph.check_structure()?;
    let ghost = graph
        .vertex(v0)
        .ok_or_else(|| Error::structural("ghost", format!("unknown vertex {v0}")))?;
    if ghost.kind != VertexKind::Ghost {
        return Err(Error::Invalid(format!("{v0} is not a ghost")));
    }
    let mut branches = vec![];
    let mut branch_edges = vec![];
    let mut outgoing = vec![];
    let mut kept = vec![];
    for e in &graph.edges {
        let at = e.branches.iter().filter(|b| b.vertex == v0).count();
        if at == 0 {
            kept.push(e.clone());
            continue;
        }
        if e.multi || at > 1 {
            return Err(Error::Invalid(format!("edge {} at the ghost is not an ordinary non-loop node", e.id)));
        }
        if e.stratum != ghost.stratum {
            return Err(Error::structural(
                format!("edges.{}.stratum", e.id),
                format!("I_e = {:?} differs from I_m = {:?}", e.stratum, ghost.stratum),
            ));
        }
        let out = e.start() == v0;
        let far: Branch = e.branches[if out { 1 } else { 0 }].clone();
        branches.push(far);
        branch_edges.push(e.id.clone());
        outgoing.push(out);
    }
    let multinode = format!("{v0}_m");
    let mut collapsed = graph.clone();
    collapsed.vertices.retain(|v| v.id != v0);
    collapsed.legs.retain(|l| l.vertex != v0);
    kept.push(Edge {
        id: multinode.clone(),
        stratum: ghost.stratum.clone(),
        branches,
        multi: true,
    });
    collapsed.edges = kept;
    collapsed.canonicalize();
    Ok(GhostCollapse {
        ghost: v0.into(),
        collapsed,
        multinode,
        branch_edges,
        outgoing,
    })
}

impl GhostCollapse {
    /// Transport a character of ϱ_Γ (a row over Γ's codomain) to ϱ_Γ̄.
    pub fn map_character(&self, rho: &LatticeMap, rho_bar: &LatticeMap, chi: &[i64]) -> Result<Vec<i64>> {
        let mut out = vec![0i64; rho_bar.rows()];
        for (r, label) in rho.codomain.iter().enumerate() {
            let (edge, i) = label.rsplit_once(':').unwrap();
            match self.branch_edges.iter().position(|e| e == edge) {
                None => {
                    let t = rho_bar
                        .row_index(label)
                        .ok_or_else(|| Error::Internal(format!("row {label} missing in the collapse")))?;
                    out[t] = chi[r];
                }
                Some(j) => {
                    if j + 1 == self.branch_edges.len() {
                        continue;
                    }
                    let t = rho_bar
                        .row_index(&format!("{}/{j}:{i}", self.multinode))
                        .ok_or_else(|| Error::Internal("multi-node row missing".into()))?;
                    out[t] = if self.outgoing[j] { -chi[r] } else { chi[r] };
                }
            }
        }
        // the diagonal must be killed
        let ghost_stratum = &self.collapsed.edge(&self.multinode).unwrap().stratum;
        for i in ghost_stratum {
            let mut s = 0;
            for (j, e) in self.branch_edges.iter().enumerate() {
                let r = rho.row_index(&format!("{e}:{i}")).unwrap();
                s += if self.outgoing[j] { -chi[r] } else { chi[r] };
            }
            if s != 0 {
                return Err(Error::Precondition("row does not annihilate the ghost columns".into()));
            }
        }
        Ok(out)
    }
}

/// Evaluate χ·ϱ for a row χ.
pub fn annihilates(map: &LatticeMap, chi: &[i64]) -> bool {
    (0..map.cols()).all(|c| map.matrix.iter().zip(chi).map(|(r, x)| r[c] * x).sum::<i64>() == 0)
}

/// Same character lattice as sublattices of Hom(T, Z).
pub fn same_character_lattice(a: &[Vec<i64>], b: &[Vec<i64>], cols: usize) -> bool {
    normal_form::same_lattice(&normal_form::to_big(a), &normal_form::to_big(b), cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{stratum, Graph};

    fn two_line_ghost() -> Graph {
        let mut g = Graph::new(2, 2);
        g.add_vertex("v0", stratum([1, 2]), 0, vec![0, 0], VertexKind::Ghost);
        for j in 1..=3 {
            g.add_vertex(&format!("v{j}"), stratum([]), 1, vec![1, 1], VertexKind::Principal);
            g.add_edge(&format!("e{j}"), &format!("v{j}"), "v0", stratum([1, 2]), vec![1, 1]);
        }
        g.add_leg("z1", "v0", vec![2, 1]);
        g.add_leg("z2", "v0", vec![1, 2]);
        g
    }

    #[test]
    fn ghost_bubble_ranks_and_generator() {
        let rho = build_rho(&two_line_ghost()).unwrap();
        assert_eq!((rho.cols(), rho.rows()), (5, 6));
        assert_eq!(rho.kernel_rank(), 1);
        assert_eq!(rho.cokernel_rank(), 2);
        assert_eq!(kernel_lattice(&rho), vec![vec![1, 1, 1, 1, 1]]);
        // published characters: (x1/y1)(y2/x2), (x2/y2)(y3/x3)
        let published = vec![vec![1, -1, -1, 1, 0, 0], vec![0, 0, 1, -1, -1, 1]];
        assert!(same_character_lattice(&cokernel_characters(&rho).rows, &published, 6));
    }

    #[test]
    fn classical_graph_has_zero_target() {
        let mut g = Graph::new(0, 3);
        g.add_vertex("a", stratum([]), 1, vec![], VertexKind::Principal);
        g.add_vertex("b", stratum([]), 1, vec![], VertexKind::Principal);
        g.add_edge("e", "a", "b", stratum([]), vec![]);
        g.add_edge("f", "a", "b", stratum([]), vec![]);
        let rho = build_rho(&g).unwrap();
        assert_eq!(rho.rows(), 0);
        assert_eq!(rho.kernel_rank(), 2);
    }

    #[test]
    fn flipping_preserves_ranks_and_lattice() {
        let g = two_line_ghost();
        let rho = build_rho(&g).unwrap();
        let f = flip_edge(&g, "e2");
        let rho_f = build_rho(&f).unwrap();
        assert_eq!(rho.kernel_rank(), rho_f.kernel_rank());
        assert_eq!(rho.cokernel_rank(), rho_f.cokernel_rank());
        // χ' = χ F with F negating block e2
        let flipped: Vec<Vec<i64>> = cokernel_characters(&rho)
            .rows
            .iter()
            .map(|r| r.iter().enumerate().map(|(k, &x)| if k == 2 || k == 3 { -x } else { x }).collect())
            .collect();
        assert!(same_character_lattice(&flipped, &cokernel_characters(&rho_f).rows, 6));
    }

    #[test]
    fn ghost_collapse_keeps_ranks() {
        let g = two_line_ghost();
        let c = collapse_ghost(&g, "v0").unwrap();
        let rho = build_rho(&g).unwrap();
        let rho_bar = build_rho_multinode(&c.collapsed).unwrap();
        assert_eq!(rho_bar.kernel_rank(), rho.kernel_rank());
        assert_eq!(rho_bar.cokernel_rank(), rho.cokernel_rank());
        for chi in cokernel_characters(&rho).rows {
            let bar = c.map_character(&rho, &rho_bar, &chi).unwrap();
            assert!(annihilates(&rho_bar, &bar));
        }
    }

    #[test]
    fn collapse_rejects_non_ghost() {
        assert!(collapse_ghost(&two_line_ghost(), "v1").is_err());
    }
}
