//! Expected dimensions: main stratum, Γ-strata, multiple covers and the
//! tracking quantity Q(Γ).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Stratum};
use crate::lattice::build_rho_multinode;
use crate::tropical::tropical_feasible;

/// c1_log + (n−3)(1−g) + k, complex.
pub fn expected_dim_log(c1_log: i64, n: i64, g: i64, k: i64) -> i64 {
    c1_log + (n - 3) * (1 - g) + k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumDim {
    pub d_log: i64,
    pub rank_k: i64,
    pub dim_g: i64,
    /// d_log − rank K, plus 3 − b for every multi-node with b branches.
    pub via_kernel: i64,
    /// Σ_v (per-component dimension) − Σ node matching − dim G.
    pub via_components: i64,
    pub feasible: bool,
    pub real: bool,
}

impl StratumDim {
    pub fn value(&self) -> i64 {
        self.via_kernel
    }

    /// Same numbers as real dimensions.
    pub fn to_real(&self) -> StratumDim {
        if self.real {
            return self.clone();
        }
        StratumDim {
            d_log: 2 * self.d_log,
            rank_k: self.rank_k,
            dim_g: 2 * self.dim_g,
            via_kernel: 2 * self.via_kernel,
            via_components: 2 * self.via_components,
            feasible: self.feasible,
            real: true,
        }
    }
}

fn marks_at(graph: &Graph, v: &str) -> i64 {
    graph.legs.iter().filter(|l| l.vertex == v).count() as i64
}

fn nodal_at(graph: &Graph, v: &str) -> i64 {
    graph
        .edges
        .iter()
        .flat_map(|e| e.branches.iter())
        .filter(|b| b.vertex == v)
        .count() as i64
}

/// Complex dimension of the pre-log space of one component, before matching.
pub fn component_dim(graph: &Graph, v: &str) -> Result<i64> {
    let vert = graph
        .vertex(v)
        .ok_or_else(|| Error::structural("vertices", format!("unknown vertex {v}")))?;
    Ok(vert.c1_log + (graph.dim - 3) * (1 - vert.genus) - vert.stratum.len() as i64 + marks_at(graph, v) + nodal_at(graph, v))
}

/// Σ_e (n − |I_e|)(b_e − 1): the codimension of the nodal matching conditions.
pub fn matching_codim(graph: &Graph) -> i64 {
    graph
        .edges
        .iter()
        .map(|e| (graph.dim - e.stratum.len() as i64) * (e.branches.len() as i64 - 1))
        .sum()
}

/// dim of the pre-log space: components fibred over the nodal diagonals.
pub fn plog_dim(graph: &Graph) -> Result<i64> {
    let mut s = 0;
    for v in &graph.vertices {
        s += component_dim(graph, &v.id)?;
    }
    Ok(s - matching_codim(graph))
}

pub fn d_log(graph: &Graph) -> i64 {
    expected_dim_log(graph.c1_log_total(), graph.dim, graph.genus(), graph.k() as i64)
}

/// Dimension of the Γ-stratum, computed two ways. A mismatch is an internal
/// error.
pub fn stratum_dim(graph: &Graph) -> Result<StratumDim> {
    graph.check_structure()?;
    let rho = build_rho_multinode(graph)?;
    let rank_k = rho.kernel_rank() as i64;
    let dim_g = rho.cokernel_rank() as i64;
    let dl = d_log(graph);
    let correction: i64 = graph
        .edges
        .iter()
        .filter(|e| e.multi)
        .map(|e| 3 - e.branches.len() as i64)
        .sum();
    let via_kernel = dl - rank_k + correction;
    let via_components = plog_dim(graph)? - dim_g;
    if via_kernel != via_components {
        return Err(Error::Internal(format!(
            "stratum dimension paths disagree: {via_kernel} (kernel) vs {via_components} (components)"
        )));
    }
    let feasible = if graph.has_multinodes() {
        true
    } else {
        tropical_feasible(graph)?.feasible
    };
    Ok(StratumDim {
        d_log: dl,
        rank_k,
        dim_g,
        via_kernel,
        via_components,
        feasible,
        real: false,
    })
}

/// Non-simple stratum: pre-log space of the reduced graph Γ″, plus the
/// fibre of the reduction, minus dim G(Γ).
pub fn nonsimple_stratum_dim(reduced: &Graph, fiber_dim: i64, dim_g: i64) -> Result<i64> {
    Ok(plog_dim(reduced)? + fiber_dim - dim_g)
}

/// Q(Γ) as tracked through the reduction steps.
pub fn q_quantity(graph: &Graph) -> i64 {
    let nodes = graph.edges.len() as i64;
    let branches: i64 = graph.edges.iter().map(|e| e.branches.len() as i64).sum();
    let mut per_stratum: BTreeMap<&Stratum, (i64, i64)> = BTreeMap::new();
    for e in &graph.edges {
        let c = per_stratum.entry(&e.stratum).or_default();
        c.0 += e.branches.len() as i64;
        c.1 += 1;
    }
    let strata: i64 = per_stratum
        .iter()
        .map(|(i, (ev, en))| (i.len() as i64 - 1) * (ev - en))
        .sum();
    graph.c1_log_total() + graph.k() as i64 + (2 * nodes - branches)
        - graph.vertices.iter().map(|v| v.stratum.len() as i64).sum::<i64>()
        + strata
}

/// Q(Γ) + (n−3)(1−g): the upper bound form, using the current genus.
pub fn q_bound(graph: &Graph) -> i64 {
    q_quantity(graph) + (graph.dim - 3) * (1 - graph.genus())
}

/// ΔQ for collapsing a ghost with k marks and ℓ nodal points.
pub fn ghost_delta(k: i64, l: i64) -> i64 {
    k + l - 3
}

/// ΔQ for replacing a degree-d cover by its image.
pub fn cover_delta(d: i64, c1_base: i64, k_v: i64, l_v: i64, k_bar: i64, l_bar: i64) -> i64 {
    (d - 1) * c1_base + (k_v + l_v) - (k_bar + l_bar)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverInput {
    /// Degree of the cover.
    pub d: i64,
    /// Contact points of the base curve.
    pub ell: i64,
    /// Contact points of the cover.
    pub k: i64,
    pub c1_base: i64,
    pub n: i64,
    /// |I| for maps into D_I.
    pub depth: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverDims {
    pub admissible: bool,
    pub d_fiber: i64,
    pub d_down: i64,
    pub d_up: i64,
    pub n_eff: i64,
    /// Forbidden c1 interval for the strict (positive) form: [lo, hi].
    pub window: (i64, i64),
    /// c1 lies in the strict window.
    pub window_hit: bool,
    /// c1 lies in the weak window (right end excluded).
    pub window_hit_weak: bool,
    /// d_down ≥ 0 ⇒ (d−1)c1 + k − ℓ > 0.
    pub sp_cond_strict: bool,
    /// d_down ≥ 0 ⇒ (d−1)c1 + k − ℓ ≥ 0.
    pub sp_cond_weak: bool,
}

/// The formulas are evaluated whatever the input; `admissible` records
/// whether a cover of that type can exist (d ≥ 1, ℓ ≤ k ≤ dℓ when ℓ > 0).
pub fn mc_fiber_dims(x: CoverInput) -> CoverDims {
    let admissible = x.d >= 1 && x.ell >= 0 && x.k >= 0 && (x.ell == 0 || (x.ell <= x.k && x.k <= x.d * x.ell));
    let n_eff = x.n - x.depth;
    let d_fiber = (x.d - 1) * (2 - x.ell) + x.k - x.ell;
    let d_down = x.c1_base + n_eff - 3 + x.ell;
    let d_up = x.d * x.c1_base + n_eff - 3 + x.k;
    let lo = 3 - n_eff - x.ell;
    let hi = if x.ell <= 2 { 0 } else { 2 - x.ell };
    let lhs = (x.d - 1) * x.c1_base + x.k - x.ell;
    CoverDims {
        admissible,
        d_fiber,
        d_down,
        d_up,
        n_eff,
        window: (lo, hi),
        window_hit: lo <= x.c1_base && x.c1_base <= hi,
        window_hit_weak: lo <= x.c1_base && x.c1_base < hi,
        sp_cond_strict: d_down < 0 || lhs > 0,
        sp_cond_weak: d_down < 0 || lhs >= 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{stratum, VertexKind};

    fn ghost_dep() -> Graph {
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
    fn two_line_ghost_loses_one() {
        let g = ghost_dep();
        let s = stratum_dim(&g).unwrap();
        assert_eq!(s.d_log, 4);
        assert_eq!(s.rank_k, 1);
        assert_eq!(s.value(), s.d_log - 1);
        assert!(s.feasible);
        assert_eq!(s.to_real().value(), 6);
    }

    #[test]
    fn trivial_graph() {
        let mut g = Graph::new(2, 2);
        g.add_vertex("v", stratum([]), 3, vec![3, 3], VertexKind::Principal);
        g.add_leg("z", "v", vec![3, 3]);
        let s = stratum_dim(&g).unwrap();
        assert_eq!(s.value(), s.d_log);
        assert_eq!(s.d_log, 3 - 1 + 1);
    }

    #[test]
    fn q_matches_upper_bound_form() {
        // Q + (n−3)(1−g) = c1 + (n−3)(1−g) + k + dim G − rank K on ordinary graphs
        let g = ghost_dep();
        let s = stratum_dim(&g).unwrap();
        assert_eq!(q_bound(&g), s.d_log + s.dim_g - s.rank_k);
    }

    #[test]
    fn quartic_cover() {
        for d in 1..=10 {
            let r = mc_fiber_dims(CoverInput { d, ell: 2, k: 3, c1_base: -1, n: 2, depth: 0 });
            assert_eq!(r.admissible, d >= 2);
            assert_eq!(r.d_fiber, 1);
            assert_eq!(r.d_up, 2 - d);
            assert_eq!(r.d_down, 0);
        }
    }

    #[test]
    fn identity_cover_has_no_fiber() {
        let r = mc_fiber_dims(CoverInput { d: 1, ell: 2, k: 2, c1_base: 0, n: 3, depth: 0 });
        assert_eq!(r.d_fiber, 0);
    }

    #[test]
    fn log_calabi_yau_depends_only_on_k() {
        for g in 0..4 {
            for k in 0..5 {
                assert_eq!(expected_dim_log(0, 3, g, k), k);
            }
        }
    }

    #[test]
    fn deltas() {
        assert_eq!(ghost_delta(2, 3), 2);
        assert_eq!(ghost_delta(0, 3), 0);
        assert_eq!(cover_delta(2, 1, 0, 3, 0, 3), 1);
    }
}
