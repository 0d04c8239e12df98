//! Tropical feasibility: positive λ_e, s_{v,i} with s_{v₂} − s_{v₁} = λ_e s_e⃗,
//! i.e. K_R meets the open positive orthant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::ser;
use crate::graph::Graph;
use crate::lattice::{build_rho, kernel_lattice, LatticeMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TropicalWitness {
    /// λ_e per edge, in graph order.
    #[serde(serialize_with = "ser::labelled")]
    pub lambda: Vec<(String, BigRational)>,
    /// s_{v,i} for i ∈ I_v.
    #[serde(serialize_with = "ser::indexed")]
    pub slopes: Vec<(String, usize, BigRational)>,
}

/// u over the rows of ϱ with w = uϱ ≥ 0 and Σw > 0: for any x ≥ 1 with ϱx = 0
/// one would get 0 = uϱx = w·x ≥ Σw > 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FarkasCertificate {
    #[serde(serialize_with = "ser::rationals")]
    pub row_multipliers: Vec<BigRational>,
    #[serde(serialize_with = "ser::rationals")]
    pub bound_multipliers: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TropicalResult {
    pub feasible: bool,
    pub witness: Option<TropicalWitness>,
    pub certificate: Option<FarkasCertificate>,
    /// Verdict of the Fourier–Motzkin path when the instance is small enough.
    pub cross_check: Option<bool>,
}

const FM_VARIABLES: usize = 12;
const FM_ROWS: usize = 20_000;

pub fn tropical_feasible(graph: &Graph) -> Result<TropicalResult> {
    let rho = build_rho(graph)?;
    let res = feasible_positive(&rho.matrix, rho.cols());
    let cross = if rho.cols() <= FM_VARIABLES {
        fourier_motzkin_feasible(&rho.matrix, rho.cols())
    } else {
        None
    };
    if let Some(c) = cross {
        if c != res.is_ok() {
            return Err(Error::Internal("simplex and Fourier–Motzkin disagree".into()));
        }
    }
    match res {
        Ok(x) => {
            let witness = witness_from(&rho, &x);
            if !check_witness(graph, &witness) {
                return Err(Error::Internal("witness fails the defining equations".into()));
            }
            Ok(TropicalResult {
                feasible: true,
                witness: Some(witness),
                certificate: None,
                cross_check: cross,
            })
        }
        Err(cert) => {
            if !verify_certificate(&rho.matrix, rho.cols(), &cert) {
                return Err(Error::Internal("invalid Farkas certificate".into()));
            }
            Ok(TropicalResult {
                feasible: false,
                witness: None,
                certificate: Some(cert),
                cross_check: cross,
            })
        }
    }
}

fn witness_from(rho: &LatticeMap, x: &[BigRational]) -> TropicalWitness {
    let mut lambda = vec![];
    let mut slopes = vec![];
    for (c, label) in rho.domain.iter().enumerate() {
        if let Some(e) = label.strip_prefix("λ:") {
            lambda.push((e.to_string(), x[c].clone()));
        } else if let Some(rest) = label.strip_prefix("s:") {
            let (v, i) = rest.rsplit_once(':').unwrap();
            slopes.push((v.to_string(), i.parse().unwrap(), x[c].clone()));
        }
    }
    TropicalWitness { lambda, slopes }
}

/// Check s_{v₂} − s_{v₁} = λ_e s_e⃗ over Z^N with all values positive.
pub fn check_witness(graph: &Graph, w: &TropicalWitness) -> bool {
    let slope = |v: &str, i: usize| -> BigRational {
        w.slopes
            .iter()
            .find(|(u, j, _)| u == v && *j == i)
            .map_or_else(BigRational::zero, |(_, _, s)| s.clone())
    };
    if w.lambda.iter().any(|(_, l)| !l.is_positive()) || w.slopes.iter().any(|(_, _, s)| !s.is_positive()) {
        return false;
    }
    graph.edges.iter().all(|e| {
        let Some((_, lam)) = w.lambda.iter().find(|(id, _)| *id == e.id) else {
            return false;
        };
        (1..=graph.n_div).all(|i| {
            slope(e.end(), i) - slope(e.start(), i) == lam * BigRational::from_integer(e.contact()[i - 1].into())
        })
    })
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Find x ≥ 1 with A x = 0 by a phase-one simplex (Bland's rule), or a
/// Farkas certificate.
pub fn feasible_positive(a: &[Vec<i64>], cols: usize) -> std::result::Result<Vec<BigRational>, FarkasCertificate> {
    let m = a.len();
    // y = x − 1 ≥ 0, A y = −A·1; rows sign-normalized so the right side is ≥ 0
    let mut sign = vec![1i64; m];
    let mut rhs = vec![BigRational::zero(); m];
    for r in 0..m {
        let s: i64 = -a[r].iter().sum::<i64>();
        if s < 0 {
            sign[r] = -1;
        }
        rhs[r] = q(s * sign[r]);
    }
    let width = cols + m;
    let mut t: Vec<Vec<BigRational>> = (0..m)
        .map(|r| {
            let mut row: Vec<BigRational> = a[r].iter().map(|&x| q(x * sign[r])).collect();
            row.extend((0..m).map(|k| if k == r { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (cols..width).collect();
    let cost = |j: usize| if j >= cols { BigRational::one() } else { BigRational::zero() };

    loop {
        // reduced costs r_j = c_j − Σ_r c_{B(r)} t[r][j]
        let reduced = |j: usize, t: &Vec<Vec<BigRational>>, basis: &Vec<usize>| -> BigRational {
            let mut rj = cost(j);
            for r in 0..m {
                if basis[r] >= cols {
                    rj -= &t[r][j];
                }
            }
            rj
        };
        let entering = (0..width).find(|&j| !basis.contains(&j) && reduced(j, &t, &basis).is_negative());
        let Some(j) = entering else { break };
        let mut leave: Option<usize> = None;
        for r in 0..m {
            if t[r][j].is_positive() {
                let ratio = &rhs[r] / &t[r][j];
                leave = match leave {
                    None => Some(r),
                    Some(l) => {
                        let rl = &rhs[l] / &t[l][j];
                        if ratio < rl || (ratio == rl && basis[r] < basis[l]) {
                            Some(r)
                        } else {
                            Some(l)
                        }
                    }
                };
            }
        }
        let Some(p) = leave else {
            unreachable!("phase-one objective is bounded below")
        };
        let piv = t[p][j].clone();
        for k in 0..width {
            t[p][k] = &t[p][k] / &piv;
        }
        rhs[p] = &rhs[p] / &piv;
        for r in 0..m {
            if r != p && !t[r][j].is_zero() {
                let f = t[r][j].clone();
                for k in 0..width {
                    let d = &f * &t[p][k];
                    t[r][k] -= d;
                }
                let d = &f * &rhs[p];
                rhs[r] -= d;
            }
        }
        basis[p] = j;
    }

    let objective: BigRational = (0..m).filter(|&r| basis[r] >= cols).map(|r| rhs[r].clone()).sum();
    if objective.is_zero() {
        let mut x = vec![BigRational::one(); cols];
        for r in 0..m {
            if basis[r] < cols {
                x[basis[r]] += &rhs[r];
            }
        }
        return Ok(x);
    }
    // π_r = c_B B^{-1} e_r = 1 − reduced cost of artificial r
    let pi: Vec<BigRational> = (0..m)
        .map(|r| {
            let mut rj = BigRational::one();
            for s in 0..m {
                if basis[s] >= cols {
                    rj -= &t[s][cols + r];
                }
            }
            BigRational::one() - rj
        })
        .collect();
    let u: Vec<BigRational> = (0..m).map(|r| -&pi[r] * q(sign[r])).collect();
    let w = (0..cols).map(|c| (0..m).map(|r| &u[r] * q(a[r][c])).sum()).collect();
    Err(FarkasCertificate {
        row_multipliers: u,
        bound_multipliers: w,
    })
}

pub fn verify_certificate(a: &[Vec<i64>], cols: usize, cert: &FarkasCertificate) -> bool {
    let m = a.len();
    if cert.row_multipliers.len() != m || cert.bound_multipliers.len() != cols {
        return false;
    }
    let w: Vec<BigRational> = (0..cols)
        .map(|c| (0..m).map(|r| &cert.row_multipliers[r] * q(a[r][c])).sum())
        .collect();
    w == cert.bound_multipliers
        && w.iter().all(|x| !x.is_negative())
        && w.iter().fold(BigRational::zero(), |s, x| s + x).is_positive()
}

/// Independent decision of ∃ x ≥ 1, A x = 0 by substitution and
/// Fourier–Motzkin elimination; `None` when the row count explodes.
pub fn fourier_motzkin_feasible(a: &[Vec<i64>], cols: usize) -> Option<bool> {
    // inequalities: coeffs·x ≥ c
    let mut eqs: Vec<Vec<BigRational>> = a.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let mut ineq: Vec<(Vec<BigRational>, BigRational)> = (0..cols)
        .map(|k| {
            let mut v = vec![BigRational::zero(); cols];
            v[k] = BigRational::one();
            (v, BigRational::one())
        })
        .collect();
    let mut alive: Vec<bool> = vec![true; cols];
    // eliminate equalities by substitution
    while let Some(pos) = eqs.iter().position(|e| e.iter().any(|x| !x.is_zero())) {
        let e = eqs.swap_remove(pos);
        let k = e.iter().position(|x| !x.is_zero()).unwrap();
        // x_k = −Σ_{j≠k} e_j x_j / e_k
        let sub = |row: &mut Vec<BigRational>| {
            let f = &row[k] / &e[k];
            if !f.is_zero() {
                for j in 0..cols {
                    let d = &f * &e[j];
                    row[j] -= d;
                }
            }
        };
        for r in eqs.iter_mut() {
            sub(r);
        }
        for (r, _) in ineq.iter_mut() {
            sub(r);
        }
        alive[k] = false;
    }
    for k in 0..cols {
        if !alive[k] {
            continue;
        }
        let (pos, rest): (Vec<_>, Vec<_>) = ineq.into_iter().partition(|(r, _)| !r[k].is_zero());
        let mut next: Vec<(Vec<BigRational>, BigRational)> = rest;
        let (up, down): (Vec<_>, Vec<_>) = pos.into_iter().partition(|(r, _)| r[k].is_positive());
        for (pr, pc) in &up {
            for (nr, nc) in &down {
                let fp = -&nr[k];
                let fn_ = pr[k].clone();
                let row: Vec<BigRational> = (0..cols).map(|j| &pr[j] * &fp + &nr[j] * &fn_).collect();
                let c = pc * &fp + nc * &fn_;
                next.push((row, c));
            }
        }
        ineq = normalize_rows(next);
        if ineq.len() > FM_ROWS {
            return None;
        }
        if ineq.iter().any(|(r, c)| r.iter().all(|x| x.is_zero()) && c.is_positive()) {
            return Some(false);
        }
    }
    Some(!ineq.iter().any(|(r, c)| r.iter().all(|x| x.is_zero()) && c.is_positive()))
}

fn normalize_rows(rows: Vec<(Vec<BigRational>, BigRational)>) -> Vec<(Vec<BigRational>, BigRational)> {
    let mut out: Vec<(Vec<BigRational>, BigRational)> = vec![];
    for (r, c) in rows {
        let scale = r.iter().find(|x| !x.is_zero()).map(|x| x.abs()).unwrap_or_else(|| {
            if c.is_zero() {
                BigRational::one()
            } else {
                c.abs()
            }
        });
        let r: Vec<BigRational> = r.iter().map(|x| x / &scale).collect();
        let c = &c / &scale;
        if r.iter().all(|x| x.is_zero()) && !c.is_positive() {
            continue;
        }
        if !out.iter().any(|(s, d)| *s == r && *d == c) {
            out.push((r, c));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeSigma {
    pub dimension: usize,
    pub rays: Vec<Vec<i64>>,
    pub is_strictly_convex: bool,
    pub kernel_rank: usize,
    pub has_positive_point: bool,
}

pub const CONE_CAP: usize = 20;

/// σ = K_R ∩ nonnegative orthant, by double description in kernel coordinates.
pub fn cone_sigma(graph: &Graph) -> Result<ConeSigma> {
    let rho = build_rho(graph)?;
    if rho.cols() > CONE_CAP {
        return Err(Error::SizeCap {
            size: rho.cols(),
            cap: CONE_CAP,
        });
    }
    let kernel = kernel_lattice(&rho);
    let rays = orthant_section(&kernel, rho.cols());
    let dimension = rank_of(&rays, rho.cols());
    let has_positive_point = (0..rho.cols()).all(|k| rays.iter().any(|r| r[k] > 0));
    Ok(ConeSigma {
        dimension,
        // σ sits inside the orthant, so σ ∩ −σ = {0}
        is_strictly_convex: true,
        kernel_rank: kernel.len(),
        has_positive_point,
        rays,
    })
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

/// Extreme rays of {Σ c_i K_i ≥ 0} for a basis K of a sublattice.
pub fn orthant_section(kernel: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let r = kernel.len();
    if r == 0 {
        return vec![];
    }
    // inequality k: Σ_i c_i K_i[k] ≥ 0
    let ineqs: Vec<Vec<BigInt>> = (0..cols).map(|k| (0..r).map(|i| BigInt::from(kernel[i][k])).collect()).collect();
    let mut lineality: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut rays: Vec<Vec<BigInt>> = vec![];
    for (done, a) in ineqs.iter().enumerate() {
        if let Some(p) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l = lineality.remove(p);
            if dot(a, &l).is_negative() {
                l = l.into_iter().map(|x| -x).collect();
            }
            let al = dot(a, &l);
            let project = |v: &Vec<BigInt>| -> Vec<BigInt> {
                let av = dot(a, v);
                primitive(v.iter().zip(&l).map(|(x, y)| x * &al - y * &av).collect())
            };
            lineality = lineality.iter().map(project).collect();
            rays = rays.iter().map(project).collect();
            rays.push(l);
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|v| dot(a, v)).collect();
        let tight = |v: &Vec<BigInt>| -> Vec<bool> { ineqs[..done].iter().map(|b| dot(b, v).is_zero()).collect() };
        let zs: Vec<Vec<bool>> = rays.iter().map(tight).collect();
        let mut next: Vec<Vec<BigInt>> = vec![];
        for (k, v) in rays.iter().enumerate() {
            if !vals[k].is_negative() {
                next.push(v.clone());
            }
        }
        for p in 0..rays.len() {
            if !vals[p].is_positive() {
                continue;
            }
            for n in 0..rays.len() {
                if !vals[n].is_negative() {
                    continue;
                }
                let common: Vec<bool> = zs[p].iter().zip(&zs[n]).map(|(x, y)| *x && *y).collect();
                let adjacent = (0..rays.len())
                    .filter(|&t| t != p && t != n)
                    .all(|t| !common.iter().zip(&zs[t]).all(|(c, z)| !c || *z));
                if adjacent {
                    let w: Vec<BigInt> = rays[n]
                        .iter()
                        .zip(&rays[p])
                        .map(|(x, y)| x * &vals[p] - y * &vals[n])
                        .collect();
                    next.push(primitive(w));
                }
            }
        }
        rays = next;
    }
    debug_assert!(lineality.is_empty());
    let mut out: Vec<Vec<i64>> = rays
        .into_iter()
        .map(|c| {
            let x: Vec<BigInt> = (0..cols)
                .map(|k| (0..r).map(|i| &c[i] * BigInt::from(kernel[i][k])).sum())
                .collect();
            primitive(x).iter().map(|v| v.to_i64().unwrap()).collect()
        })
        .filter(|x: &Vec<i64>| x.iter().any(|&v| v != 0))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn rank_of(rows: &[Vec<i64>], cols: usize) -> usize {
    let m: Vec<Vec<BigInt>> = rows.iter().map(|r| big(r)).collect();
    crate::normal_form::hermite(&m, cols).2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{stratum, Graph, VertexKind};

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

    fn opposing_pair() -> Graph {
        let mut g = Graph::new(1, 2);
        g.add_vertex("v1", stratum([1]), 0, vec![0], VertexKind::Principal);
        g.add_vertex("v2", stratum([1]), 0, vec![0], VertexKind::Principal);
        g.add_edge("e", "v1", "v2", stratum([1]), vec![1]);
        g.add_edge("f", "v1", "v2", stratum([1]), vec![-1]);
        g
    }

    #[test]
    fn ghost_bubble_is_feasible() {
        let r = tropical_feasible(&two_line_ghost()).unwrap();
        assert!(r.feasible);
        assert_eq!(r.cross_check, Some(true));
        let w = r.witness.unwrap();
        assert!(w.lambda.iter().all(|(_, l)| l == &w.lambda[0].1));
        let c = cone_sigma(&two_line_ghost()).unwrap();
        assert_eq!(c.dimension, 1);
        assert_eq!(c.rays, vec![vec![1, 1, 1, 1, 1]]);
    }

    #[test]
    fn opposing_pair_is_infeasible_with_certificate() {
        let g = opposing_pair();
        let r = tropical_feasible(&g).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.cross_check, Some(false));
        let rho = build_rho(&g).unwrap();
        assert!(verify_certificate(&rho.matrix, rho.cols(), &r.certificate.unwrap()));
        let c = cone_sigma(&g).unwrap();
        assert!(c.dimension < c.kernel_rank);
        assert_eq!(c.rays, vec![vec![0, 0, 1, 1]]);
    }

    #[test]
    fn trivial_cone_of_single_vertex() {
        let mut g = Graph::new(1, 2);
        g.add_vertex("v", stratum([]), 0, vec![0], VertexKind::Principal);
        let c = cone_sigma(&g).unwrap();
        assert_eq!(c.dimension, 0);
        assert!(c.rays.is_empty());
    }

    #[test]
    fn witness_scales() {
        let g = two_line_ghost();
        let w = tropical_feasible(&g).unwrap().witness.unwrap();
        let c = BigRational::new(7.into(), 3.into());
        let scaled = TropicalWitness {
            lambda: w.lambda.iter().map(|(e, l)| (e.clone(), l * &c)).collect(),
            slopes: w.slopes.iter().map(|(v, i, s)| (v.clone(), *i, s * &c)).collect(),
        };
        assert!(check_witness(&g, &scaled));
    }

    #[test]
    fn size_cap_is_explicit() {
        let mut g = Graph::new(1, 2);
        g.add_vertex("a", stratum([1]), 0, vec![0], VertexKind::Principal);
        g.add_vertex("b", stratum([1]), 0, vec![0], VertexKind::Principal);
        for k in 0..25 {
            g.add_edge(&format!("e{k:02}"), "a", "b", stratum([1]), vec![0]);
        }
        assert!(matches!(cone_sigma(&g), Err(Error::SizeCap { cap: 20, .. })));
    }
}
