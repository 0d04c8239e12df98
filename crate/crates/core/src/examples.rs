//! Worked configurations: builders for the fixture files and the
//! acceptance suite.

use crate::document::GraphDocument;
use crate::gaussian::{GaussianRational as GR, P1Point};
use crate::graph::{stratum, Cover, Graph, Stratum, VertexKind};
use crate::obstruction::EtaData;
use crate::positivity::{Family, GeometryProfile, Multiplicity, Pairing, StratumFamilies};
use crate::rt::MapModel;

fn fin(z: &GR) -> Option<P1Point> {
    Some(P1Point::Finite(z.clone()))
}

/// Three lines through the point D₁₂ of P² joined by a ghost. Edges run out
/// of the ghost `v0`; nodal points at q, line slopes m.
fn three_lines_on_ghost(m: &[GR; 3], q: [Option<P1Point>; 3]) -> (Graph, EtaData) {
    let mut g = Graph::new(2, 2);
    g.add_vertex("v0", stratum([1, 2]), 0, vec![0, 0], VertexKind::Ghost);
    let mut data = EtaData::default();
    for (j, q) in (1..=3).zip(q) {
        let v = g.add_vertex(&format!("v{j}"), stratum([]), 1, vec![1, 1], VertexKind::Bubble);
        v.image_label = Some(format!("line{j}"));
        let e = g.add_edge(&format!("e{j}"), "v0", &format!("v{j}"), stratum([1, 2]), vec![-1, -1]);
        e.branches[0].point = q;
        data.eta.insert((format!("e{j}"), 1, 1), GR::one());
        data.eta.insert((format!("e{j}"), 1, 2), m[j - 1].clone());
    }
    (g, data)
}

/// Two marked points on the ghost: z₁ = 0 with (2,1), z₂ = ∞ with (1,2);
/// nodal points at 1, α₂, α₃.
pub fn two_line_ghost(m: &[GR; 3], a2: &GR, a3: &GR) -> (Graph, EtaData) {
    let (mut g, data) = three_lines_on_ghost(m, [fin(&GR::one()), fin(a2), fin(a3)]);
    g.add_leg("z1", "v0", vec![2, 1]).point = fin(&GR::zero());
    g.add_leg("z2", "v0", vec![1, 2]).point = Some(P1Point::Infinity);
    (g, data)
}

/// (x₁/y₁)(y₂/x₂) and (x₂/y₂)(y₃/x₃) on rows e1:1, e1:2, …, e3:2.
pub fn three_line_characters() -> Vec<Vec<i64>> {
    vec![vec![1, -1, -1, 1, 0, 0], vec![0, 0, 1, -1, -1, 1]]
}

/// One mark z₁ = ∞ with contact (3,3); nodal points 0, 1, α.
pub fn good_ex1(m: &[GR; 3], alpha: &GR) -> (Graph, EtaData) {
    let (mut g, data) = three_lines_on_ghost(m, [fin(&GR::zero()), fin(&GR::one()), fin(alpha)]);
    g.add_leg("z1", "v0", vec![3, 3]).point = Some(P1Point::Infinity);
    (g, data)
}

/// The same configuration as a map model; with `equal` the three lines
/// share one image.
pub fn good_ex1_model(equal: bool) -> MapModel {
    let (mut g, _) = good_ex1(&[GR::one(), GR::one(), GR::one()], &GR::from_int(2));
    if equal {
        for v in g.vertices.iter_mut().filter(|v| v.kind == VertexKind::Bubble) {
            v.image_label = Some("line".into());
        }
    }
    MapModel { graph: g }
}

/// Two copies of a pair of curves B, C ⊂ D₁ meeting at one point x, with
/// one more node joining the copies. Step (iv) identifies the copies, and the
/// two nodes over x become a single node of Γ″.
pub fn coincident_nodes_model() -> MapModel {
    let mut g = Graph::new(1, 2);
    for (v, label) in [("v0", "B"), ("v1", "C"), ("v2", "B"), ("v3", "C")] {
        g.add_vertex(v, stratum([1]), 1, vec![1], VertexKind::Bubble).image_label = Some(label.into());
        g.add_leg(&format!("z_{v}"), v, vec![1]);
    }
    g.add_edge("e1", "v0", "v1", stratum([1]), vec![0]);
    for (id, b, c) in [("e2", "v0", "v3"), ("e3", "v2", "v1")] {
        let e = g.add_edge(id, b, c, stratum([1]), vec![0]);
        e.branches[0].label = Some("x".into());
        e.branches[1].label = Some("x".into());
    }
    MapModel { graph: g }
}

/// Lines ℓ_i ⊂ D_i ≅ P² through D₁₂₃ with slopes a_ij (j ≠ i; diagonal
/// ignored) and ζ_{v_i} leading coefficients α_ii; sections on the ghost
/// scaled by `scales`, nodal points at `q`. Edges run into `v0`.
pub fn good_ex2(a: &[[GR; 3]; 3], alpha_ii: &[GR; 3], scales: &[GR; 3], q: &[P1Point; 3]) -> (Graph, EtaData) {
    let mut g = Graph::new(3, 3);
    g.add_vertex("v0", stratum([1, 2, 3]), 0, vec![0, 0, 0], VertexKind::Ghost);
    let s = [vec![-2, 1, 1], vec![1, -2, 1], vec![1, 1, -2]];
    let mut data = EtaData::default();
    for i in 1..=3 {
        let v = g.add_vertex(&format!("v{i}"), Stratum::from([i]), 1, vec![1, 1, 1], VertexKind::Principal);
        v.image_label = Some(format!("line{i}"));
        let e = g.add_edge(&format!("e{i}"), &format!("v{i}"), "v0", stratum([1, 2, 3]), s[i - 1].clone());
        e.branches[1].point = Some(q[i - 1].clone());
        let mut c = vec![0; 3];
        c[i - 1] = 3;
        g.add_leg(&format!("z{i}"), &format!("v{i}"), c);
        for j in 1..=3 {
            let eta = if i == j { alpha_ii[i - 1].clone() } else { a[i - 1][j - 1].clone() };
            data.eta.insert((format!("e{i}"), 0, j), eta);
        }
        data.scales.insert(("v0".into(), i), scales[i - 1].clone());
    }
    (g, data)
}

/// x₁₂x₂₃x₃₁/(x₁₃x₃₂x₂₁) on rows e1:1, …, e3:3.
pub fn good_ex2_characters() -> Vec<Vec<i64>> {
    vec![vec![0, 1, -1, -1, 0, 1, 1, -1, 0]]
}

/// −a₁₂a₂₃a₃₁/(a₁₃a₃₂a₂₁).
pub fn good_ex2_expected(a: &[[GR; 3]; 3]) -> GR {
    let num = &(&a[0][1] * &a[1][2]) * &a[2][0];
    let den = &(&a[0][2] * &a[2][1]) * &a[1][0];
    -(&num / &den)
}

/// A double cover v1 of D₂ ramified at D₁₂ and two lines, joined by a
/// ghost carrying z₁ = ∞ with contact (4,3); nodal points α, 0, 1. Edges run
/// out of `v0`. The double cover is left unlocated: its η are explicit.
pub fn bad_ex1(m2: &GR, m3: &GR, alpha: &GR) -> (Graph, EtaData) {
    let mut g = Graph::new(2, 2);
    g.add_vertex("v0", stratum([1, 2]), 0, vec![0, 0], VertexKind::Ghost);
    let v1 = g.add_vertex("v1", stratum([2]), 2, vec![2, 2], VertexKind::Bubble);
    v1.cover = Some(Cover { degree: 2, c1_log: 1, dot: vec![1, 1] });
    v1.image_label = Some("D2".into());
    for j in 2..=3 {
        g.add_vertex(&format!("v{j}"), stratum([]), 1, vec![1, 1], VertexKind::Bubble).image_label = Some(format!("line{j}"));
    }
    let q = [alpha.clone(), GR::zero(), GR::one()];
    let s = [vec![-2, -1], vec![-1, -1], vec![-1, -1]];
    let mut data = EtaData::default();
    for j in 1..=3 {
        let e = g.add_edge(&format!("e{j}"), "v0", &format!("v{j}"), stratum([1, 2]), s[j - 1].clone());
        e.branches[0].point = fin(&q[j - 1]);
    }
    g.add_leg("z1", "v0", vec![4, 3]).point = Some(P1Point::Infinity);
    g.add_leg("z2", "v1", vec![0, 1]);
    data.eta.insert(("e1".into(), 1, 1), GR::one());
    data.eta.insert(("e1".into(), 1, 2), GR::one());
    for (j, m) in [(2, m2), (3, m3)] {
        data.eta.insert((format!("e{j}"), 1, 1), GR::one());
        data.eta.insert((format!("e{j}"), 1, 2), m.clone());
    }
    (g, data)
}

/// (x₂/y₂)(y₃/x₃).
pub fn bad_ex1_characters() -> Vec<Vec<i64>> {
    vec![vec![0, 0, 1, -1, -1, 1]]
}

/// Double cover of a line in D₁₂ ⊂ P³ joining three lines; nodal points
/// q₁, q₂, q₃ and marks z₁ (5,0), z₂ (0,5) given directly on the cover.
pub fn mc_dep(m: &[GR; 3], q: &[GR; 3], z: &[GR; 2]) -> (Graph, EtaData) {
    let mut g = Graph::new(2, 3);
    let v0 = g.add_vertex("v0", stratum([1, 2]), 4, vec![2, 2], VertexKind::Bubble);
    v0.cover = Some(Cover { degree: 2, c1_log: 2, dot: vec![1, 1] });
    v0.image_label = Some("D12".into());
    let mut data = EtaData::default();
    for j in 1..=3 {
        g.add_vertex(&format!("v{j}"), stratum([]), 2, vec![1, 1], VertexKind::Bubble).image_label = Some(format!("line{j}"));
        let e = g.add_edge(&format!("e{j}"), "v0", &format!("v{j}"), stratum([1, 2]), vec![-1, -1]);
        e.branches[0].point = fin(&q[j - 1]);
        data.eta.insert((format!("e{j}"), 1, 1), GR::one());
        data.eta.insert((format!("e{j}"), 1, 2), m[j - 1].clone());
    }
    g.add_leg("z1", "v0", vec![5, 0]).point = fin(&z[0]);
    g.add_leg("z2", "v0", vec![0, 5]).point = fin(&z[1]);
    (g, data)
}

/// The double-cover chain as a map model; with `coincident` the nodal
/// points over α₁ = α₂ and the marks over β₁ = β₂ share images.
pub fn mc_dep_model(coincident: bool) -> MapModel {
    let one = GR::one();
    let (mut g, _) = mc_dep(
        &[one.clone(), one.clone(), one.clone()],
        &[GR::from_int(2), GR::from_int(3), GR::from_int(5)],
        &[GR::from_int(7), GR::from_int(11)],
    );
    let alpha = if coincident { ["alpha", "alpha", "alpha3"] } else { ["alpha1", "alpha2", "alpha3"] };
    let beta = if coincident { ["beta", "beta"] } else { ["beta1", "beta2"] };
    for (e, l) in g.edges.iter_mut().zip(alpha) {
        e.branches[0].label = Some(l.into());
    }
    for (leg, l) in g.legs.iter_mut().zip(beta) {
        leg.label = Some(l.into());
    }
    MapModel { graph: g }
}

/// CR(q₁,q₂,z₁,z₂) = (q₁−z₁)(q₂−z₂)/((q₁−z₂)(q₂−z₁)).
pub fn cross_ratio(q1: &GR, q2: &GR, z1: &GR, z2: &GR) -> GR {
    let num = &(q1 - z1) * &(q2 - z2);
    let den = &(q1 - z2) * &(q2 - z1);
    &num / &den
}

/// a lines with contact (3,1) at D₁₂ ⊂ P⁴ (D₁ cubic, D₂ hyperplane) on a
/// d-fold cover of a line in D₁₂ carrying z₁.
pub fn mc_issue(a: usize, d: i64) -> MapModel {
    let mut g = Graph::new(2, 4);
    let v0 = g.add_vertex("v0", stratum([1, 2]), d, vec![3 * d, d], VertexKind::Bubble);
    v0.cover = Some(Cover { degree: d, c1_log: 1, dot: vec![3, 1] });
    v0.image_label = Some("L".into());
    for j in 1..=a {
        g.add_vertex(&format!("v{j}"), stratum([]), 1, vec![3, 1], VertexKind::Bubble).image_label = Some(format!("line{j}"));
        g.add_edge(&format!("e{j}"), "v0", &format!("v{j}"), stratum([1, 2]), vec![-3, -1]);
    }
    let t = a as i64 + d;
    g.add_leg("z1", "v0", vec![3 * t, t]);
    MapModel { graph: g }
}

/// Line classes of P⁴ relative to a cubic and a hyperplane, on the open
/// part, on D₁, D₂ and on D₁₂.
pub fn mc_issue_profile() -> GeometryProfile {
    let line = |delta| Family {
        label: "line".into(),
        generators: vec![Pairing { c1_tx: 5, dot: vec![3, 1] }],
        effective: true,
        multiplicity: Multiplicity::Symbolic("all".into()),
        delta,
    };
    GeometryProfile {
        n: 4,
        n_div: 2,
        strata: vec![
            StratumFamilies { stratum: stratum([]), families: vec![line(Some(1))] },
            StratumFamilies { stratum: stratum([1]), families: vec![line(Some(1))] },
            StratumFamilies { stratum: stratum([2]), families: vec![line(Some(1))] },
            StratumFamilies { stratum: stratum([1, 2]), families: vec![line(Some(0))] },
        ],
    }
}

/// Genus-0 chain of three contracted components in D₁ with four marks of
/// zero contact.
pub fn g0_a0() -> Graph {
    let mut g = Graph::new(2, 2);
    for v in ["v1", "v2", "v3"] {
        g.add_vertex(v, stratum([1]), 0, vec![0, 0], VertexKind::Ghost);
    }
    g.add_edge("e1", "v1", "v2", stratum([1]), vec![0, 0]);
    g.add_edge("e2", "v2", "v3", stratum([1]), vec![0, 0]);
    for (z, v) in [("z1", "v1"), ("z2", "v1"), ("z3", "v3"), ("z4", "v3")] {
        g.add_leg(z, v, vec![0, 0]);
    }
    g
}

/// Two contracted components in D₁₂ joined by two nodes (genus 1), one
/// mark each.
pub fn gpos_a0() -> Graph {
    let mut g = Graph::new(2, 2);
    for v in ["v1", "v2"] {
        g.add_vertex(v, stratum([1, 2]), 0, vec![0, 0], VertexKind::Ghost);
    }
    g.add_edge("e1", "v1", "v2", stratum([1, 2]), vec![0, 0]);
    g.add_edge("e2", "v1", "v2", stratum([1, 2]), vec![0, 0]);
    g.add_leg("z1", "v1", vec![0, 0]);
    g.add_leg("z2", "v2", vec![0, 0]);
    g
}

/// A d-fold cover (d = a + b) of a line in P² meeting a quartic at two points
/// with order 2, with contacts 2a, 2b over the first and 2d over the second.
pub fn p2_quartic(a: i64, b: i64) -> MapModel {
    let d = a + b;
    let mut g = Graph::new(1, 2);
    let v = g.add_vertex("v", stratum([]), -d, vec![4 * d], VertexKind::Bubble);
    v.cover = Some(Cover { degree: d, c1_log: -1, dot: vec![4] });
    v.image_label = Some("line".into());
    for (z, c, l) in [("z11", 2 * a, "p1"), ("z12", 2 * b, "p1"), ("z21", 2 * d, "p2")] {
        g.add_leg(z, "v", vec![c]).label = Some(l.into());
    }
    MapModel { graph: g }
}

fn gr(s: &str) -> GR {
    s.parse().expect("literal Gaussian rational")
}

/// Every fixture file as (name, JSON text).
pub fn fixture_files() -> Vec<(&'static str, String)> {
    let mut out = vec![];
    let doc = |g: &Graph, d: Option<&EtaData>| {
        let x = GraphDocument::from_graph(g);
        match d {
            Some(d) => x.with_eta_data(d),
            None => x,
        }
    };

    let (g, d) = two_line_ghost(&[gr("2"), gr("3/5"), gr("-7")], &gr("4"), &gr("1/3+1*i"));
    let mut x = doc(&g, Some(&d));
    x.characters = Some(three_line_characters());
    x.ghost = Some("v0".into());
    out.push(("two_line_ghost.json", x.to_json()));

    let (g, d) = good_ex1(&[gr("2"), gr("5"), gr("-3/2")], &gr("7/3"));
    let mut x = doc(&g, Some(&d));
    x.characters = Some(three_line_characters());
    x.ghost = Some("v0".into());
    out.push(("good_ex1.json", x.to_json()));
    out.push(("good_ex1_equal_model.json", doc(&good_ex1_model(true).graph, None).to_json()));

    let a = [
        [gr("0"), gr("2"), gr("3")],
        [gr("5"), gr("0"), gr("-1/2")],
        [gr("7"), gr("1+1*i"), gr("0")],
    ];
    let (g, d) = good_ex2(
        &a,
        &[gr("1"), gr("2"), gr("3")],
        &[gr("1"), gr("1"), gr("1")],
        &[P1Point::Finite(gr("0")), P1Point::Finite(gr("1")), P1Point::Infinity],
    );
    let mut x = doc(&g, Some(&d));
    x.ghost = Some("v0".into());
    out.push(("good_ex2.json", x.to_json()));
    let chars = serde_json::json!({ "characters": good_ex2_characters() });
    out.push(("good_ex2_characters.json", format!("{}\n", serde_json::to_string_pretty(&chars).unwrap())));

    let (g, d) = bad_ex1(&gr("3"), &gr("5"), &gr("1/2"));
    let mut x = doc(&g, Some(&d));
    x.characters = Some(bad_ex1_characters());
    x.ghost = Some("v0".into());
    out.push(("bad_ex1.json", x.to_json()));

    let (g, d) = mc_dep(
        &[gr("2"), gr("3"), gr("5")],
        &[gr("2"), gr("3"), gr("1/2")],
        &[gr("-1"), gr("3/2")],
    );
    let mut x = doc(&g, Some(&d));
    x.characters = Some(three_line_characters());
    out.push(("mc_dep.json", x.to_json()));
    out.push(("mc_dep_model.json", doc(&mc_dep_model(true).graph, None).to_json()));

    let mut x = doc(&mc_issue(3, 2).graph, None);
    x.profile = Some(mc_issue_profile());
    out.push(("mc_issue.json", x.to_json()));

    out.push(("g0_a0.json", doc(&g0_a0(), None).to_json()));
    out.push(("gpos_a0.json", doc(&gpos_a0(), None).to_json()));
    out.push(("p2_quartic.json", doc(&p2_quartic(1, 2).graph, None).to_json()));
    out.push(("coincident_nodes_model.json", doc(&coincident_nodes_model().graph, None).to_json()));

    let mut g = Graph::new(3, 2);
    g.add_vertex("v", stratum([]), 0, vec![1, 1, 1], VertexKind::Principal);
    g.add_leg("z", "v", vec![1, 1, 1]);
    let mut x = doc(&g, None);
    x.profile = Some(crate::positivity::hyperplane_profile(2, 3));
    out.push(("hyperplane_p2_d3.json", x.to_json()));

    out.push((
        "empty_graph.json",
        "{\n  \"schema_version\": \"1\",\n  \"N\": 2,\n  \"n\": 2,\n  \"vertices\": []\n}\n".into(),
    ));
    out
}
