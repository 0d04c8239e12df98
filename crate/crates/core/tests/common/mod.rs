#![allow(dead_code)]

use logmoduli::gaussian::{GaussianRational as GR, P1Point};
use logmoduli::graph::{Cover, Graph, Stratum, VertexKind};
use logmoduli::obstruction::EtaData;
use logmoduli::rt::MapModel;
use num_rational::BigRational;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero Gaussian rational with small numerators and denominators.
pub fn gr(r: &mut ChaCha8Rng, complex: bool) -> GR {
    loop {
        let re = GR::from_ratio(r.gen_range(-9..=9), r.gen_range(1..=6));
        let z = if complex && r.gen_bool(0.5) {
            &re + &(&GR::from_ratio(r.gen_range(-9..=9), r.gen_range(1..=6)) * &GR::i())
        } else {
            re
        };
        if !z.is_zero() {
            return z;
        }
    }
}

/// Nonzero value avoiding `avoid`.
pub fn gr_avoiding(r: &mut ChaCha8Rng, complex: bool, avoid: &[GR]) -> GR {
    loop {
        let z = gr(r, complex);
        if !avoid.contains(&z) {
            return z;
        }
    }
}

pub fn distinct_points(r: &mut ChaCha8Rng, k: usize) -> Vec<P1Point> {
    let mut out: Vec<P1Point> = vec![];
    if r.gen_bool(0.5) {
        out.push(P1Point::Infinity);
    }
    while out.len() < k {
        let p = P1Point::Finite(if r.gen_bool(0.2) { GR::zero() } else { gr(r, true) });
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.shuffle(r);
    out
}

fn subset(r: &mut ChaCha8Rng, n: usize) -> Stratum {
    (1..=n).filter(|_| r.gen_bool(0.5)).collect()
}

/// A ghost in D_{[N]} joined to 2–4 components in random strata, with its
/// special points located and explicit η on the far ends. Edges run out of
/// the ghost.
pub fn ghost_bubble_graph(r: &mut ChaCha8Rng) -> (Graph, EtaData) {
    let n_div = r.gen_range(1..=3);
    let full: Stratum = (1..=n_div).collect();
    let mut g = Graph::new(n_div, n_div as i64 + 1);
    g.add_vertex("v0", full.clone(), 0, vec![0; n_div], VertexKind::Ghost);
    let arms = r.gen_range(2..=4);
    let mut data = EtaData::default();
    let mut total = vec![0i64; n_div];
    for j in 1..=arms {
        let s = subset(r, n_div);
        let t: Vec<i64> = (1..=n_div)
            .map(|i| if s.contains(&i) { r.gen_range(-3..=3) } else { r.gen_range(1..=3) })
            .collect();
        for i in 0..n_div {
            total[i] += t[i];
        }
        g.add_vertex(&format!("v{j}"), s, 1, t.clone(), VertexKind::Bubble);
        let c: Vec<i64> = t.iter().map(|x| -x).collect();
        g.add_edge(&format!("e{j}"), "v0", &format!("v{j}"), full.clone(), c);
        for i in 1..=n_div {
            data.eta.insert((format!("e{j}"), 1, i), gr(r, true));
        }
    }
    let legs = if arms == 2 { 1 + r.gen_range(1..=1) } else { r.gen_range(1..=2) };
    if legs == 1 {
        g.add_leg("z1", "v0", total.clone());
    } else {
        let a: Vec<i64> = (0..n_div).map(|_| r.gen_range(-2..=2)).collect();
        let b: Vec<i64> = total.iter().zip(&a).map(|(t, a)| t - a).collect();
        g.add_leg("z1", "v0", a);
        g.add_leg("z2", "v0", b);
    }
    let pts = distinct_points(r, arms + legs);
    for (e, p) in g.edges.iter_mut().zip(&pts) {
        e.branches[0].point = Some(p.clone());
    }
    for (l, p) in g.legs.iter_mut().zip(&pts[arms..]) {
        l.point = Some(p.clone());
    }
    for i in 1..=n_div {
        data.scales.insert(("v0".into(), i), gr(r, true));
    }
    (g, data)
}

/// Small graph with random strata and sign-consistent edge contacts; at most
/// `max_slopes` slope variables. Balance is not imposed.
pub fn tropical_graph(r: &mut ChaCha8Rng, max_slopes: usize) -> Graph {
    loop {
        let n_div = r.gen_range(1..=2);
        let nv = r.gen_range(2..=4);
        let mut g = Graph::new(n_div, 2);
        let strata: Vec<Stratum> = (0..nv).map(|_| subset(r, n_div)).collect();
        for (a, s) in strata.iter().enumerate() {
            g.add_vertex(&format!("v{a}"), s.clone(), 0, vec![0; n_div], VertexKind::Ghost);
        }
        let mut pairs: Vec<(usize, usize)> = (1..nv).map(|b| (r.gen_range(0..b), b)).collect();
        if r.gen_bool(0.5) {
            let a = r.gen_range(0..nv);
            let b = r.gen_range(0..nv);
            if a != b {
                pairs.push((a, b));
            }
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            let (a, b) = if r.gen_bool(0.5) { (a, b) } else { (b, a) };
            let ie: Stratum = strata[a].union(&strata[b]).copied().collect();
            let c: Vec<i64> = (1..=n_div)
                .map(|i| {
                    let (sa, sb) = (strata[a].contains(&i), strata[b].contains(&i));
                    match (sa, sb) {
                        (false, false) => 0,
                        (false, true) => r.gen_range(1..=2),
                        (true, false) => r.gen_range(-2..=-1),
                        (true, true) => r.gen_range(-2..=2),
                    }
                })
                .collect();
            g.add_edge(&format!("e{k}"), &format!("v{a}"), &format!("v{b}"), ie, c);
        }
        let slopes: usize = strata.iter().map(|s| s.len()).sum();
        if slopes <= max_slopes && slopes + g.edges.len() <= 8 {
            return g;
        }
    }
}

/// Search integer slopes in [1, bound] and solve each edge for a positive λ.
pub fn brute_force_tropical(g: &Graph, bound: i64) -> bool {
    let vars: Vec<(usize, usize)> = g
        .vertices
        .iter()
        .enumerate()
        .flat_map(|(a, v)| v.stratum.iter().map(move |&i| (a, i)))
        .collect();
    let mut vals = vec![1i64; vars.len()];
    let pos = |id: &str| g.vertices.iter().position(|v| v.id == id).unwrap();
    let ends: Vec<(usize, usize)> = g.edges.iter().map(|e| (pos(e.start()), pos(e.end()))).collect();
    loop {
        let slope = |a: usize, i: usize| {
            vars.iter()
                .position(|&(b, j)| b == a && j == i)
                .map_or(0, |k| vals[k])
        };
        let ok = g.edges.iter().zip(&ends).all(|(e, &(a, b))| {
            let mut lambda: Option<BigRational> = None;
            for i in 1..=g.n_div {
                let diff = slope(b, i) - slope(a, i);
                let s = e.contact()[i - 1];
                if s == 0 {
                    if diff != 0 {
                        return false;
                    }
                    continue;
                }
                let l = BigRational::new(diff.into(), s.into());
                if !l.is_positive() {
                    return false;
                }
                match &lambda {
                    Some(x) if *x != l => return false,
                    _ => lambda = Some(l),
                }
            }
            true
        });
        if ok {
            return true;
        }
        let mut k = 0;
        loop {
            if k == vals.len() {
                return false;
            }
            vals[k] += 1;
            if vals[k] <= bound {
                break;
            }
            vals[k] = 1;
            k += 1;
        }
    }
}

/// Random tree model in D₁₂ ⊂ (N = 2, n = 3): ghosts, covers, shared image
/// labels and shared point labels.
pub fn map_model(r: &mut ChaCha8Rng) -> MapModel {
    let full: Stratum = [1, 2].into_iter().collect();
    let nv = r.gen_range(2..=7);
    let mut g = Graph::new(2, 3);
    // one base class per image label
    let labels = ["A", "B", "C"];
    let classes: Vec<(i64, Vec<i64>)> = labels
        .iter()
        .map(|_| (r.gen_range(0..=3), vec![r.gen_range(0..=3), r.gen_range(0..=3)]))
        .collect();
    for a in 0..nv {
        let id = format!("v{a}");
        if a > 0 && r.gen_bool(0.3) {
            g.add_vertex(&id, full.clone(), 0, vec![0, 0], VertexKind::Ghost);
            continue;
        }
        let li = r.gen_range(0..labels.len());
        let (c1, dot) = classes[li].clone();
        let d = if r.gen_bool(0.4) { r.gen_range(2..=3) } else { 1 };
        let v = g.add_vertex(&id, full.clone(), d * c1, dot.iter().map(|x| d * x).collect(), VertexKind::Bubble);
        v.image_label = Some(labels[li].into());
        if d > 1 {
            v.cover = Some(Cover { degree: d, c1_log: c1, dot });
        }
    }
    let node_labels = [None, Some("p"), Some("q")];
    for b in 1..nv {
        let a = r.gen_range(0..b);
        let c = vec![r.gen_range(-2..=2), r.gen_range(-2..=2)];
        let e = g.add_edge(&format!("e{b}"), &format!("v{a}"), &format!("v{b}"), full.clone(), c);
        for br in e.branches.iter_mut() {
            br.label = node_labels.choose(r).unwrap().map(String::from);
        }
    }
    // marks balance every vertex; some extra marks with shared labels
    let leg_labels = [None, Some("x"), Some("y")];
    let mut k = 0;
    for a in 0..nv {
        let id = format!("v{a}");
        let need: Vec<i64> = {
            let sum = g.contact_sum(&id);
            let dot = &g.vertex(&id).unwrap().dot;
            dot.iter().zip(&sum).map(|(d, s)| d - s).collect()
        };
        let extra = r.gen_range(0..=2);
        let mut rest = need.clone();
        for _ in 0..extra {
            let c = vec![r.gen_range(-1..=1), r.gen_range(-1..=1)];
            rest = rest.iter().zip(&c).map(|(x, y)| x - y).collect();
            k += 1;
            g.add_leg(&format!("z{k}"), &id, c).label = leg_labels.choose(r).unwrap().map(String::from);
        }
        k += 1;
        g.add_leg(&format!("z{k}"), &id, rest).label = leg_labels.choose(r).unwrap().map(String::from);
    }
    // labels on a degree-one bubble must be distinct
    let simple: Vec<String> = g
        .vertices
        .iter()
        .filter(|v| v.kind == VertexKind::Bubble && v.cover.is_none())
        .map(|v| v.id.clone())
        .collect();
    for v in simple {
        let mut used = std::collections::BTreeSet::new();
        for e in g.edges.iter_mut() {
            for b in e.branches.iter_mut().filter(|b| b.vertex == v) {
                if let Some(l) = &b.label {
                    if !used.insert(l.clone()) {
                        b.label = None;
                    }
                }
            }
        }
        for l in g.legs.iter_mut().filter(|l| l.vertex == v) {
            if let Some(x) = &l.label {
                if !used.insert(x.clone()) {
                    l.label = None;
                }
            }
        }
    }
    MapModel::new(g).expect("generated model is valid")
}
