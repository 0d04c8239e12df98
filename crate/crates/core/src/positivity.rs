//! Nef / semi-positive / positive / strongly-(semi-)positive checks on a
//! finite description of curve classes per stratum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Stratum;

/// Pairings of one generator class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub c1_tx: i64,
    pub dot: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Multiplicity {
    /// "all": every m ≥ 1 (one generator only).
    Symbolic(String),
    /// Explicit coefficient vectors, one entry per generator.
    List(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub label: String,
    pub generators: Vec<Pairing>,
    #[serde(default = "yes")]
    pub effective: bool,
    pub multiplicity: Multiplicity,
    /// δ_{I,A}; taken as 0 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<i64>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumFamilies {
    pub stratum: Stratum,
    pub families: Vec<Family>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryProfile {
    pub n: i64,
    #[serde(rename = "N")]
    pub n_div: usize,
    pub strata: Vec<StratumFamilies>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Condition {
    Nef,
    #[serde(rename = "SP1")]
    Sp1,
    PExtra,
    #[serde(rename = "SP2")]
    Sp2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub condition: Condition,
    pub stratum: Stratum,
    pub family: String,
    pub coefficients: Vec<i64>,
    pub c1_log: i64,
    pub ell: i64,
    pub threshold: i64,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub nef: bool,
    pub semi_positive: bool,
    pub positive: bool,
    pub strongly_semi_positive: bool,
    pub strongly_positive: bool,
    /// Verdict with (∅, δ=0) held to c ≥ 2 as well; reported when it differs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strongly_semi_positive_strict: Option<bool>,
    pub delta_defaulted: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// For (I, δ) = (∅, 0) ask only c ≥ 0 in (SP2).
    pub exempt_empty_zero: bool,
    /// Decide rank-1 "all m" families by enumeration instead of intervals.
    pub enumerate_to: Option<i64>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            exempt_empty_zero: true,
            enumerate_to: None,
        }
    }
}

struct Class {
    c1_log: i64,
    dot: Vec<i64>,
}

fn combine(gens: &[Pairing], coeff: &[i64], n_div: usize) -> Class {
    let mut c1_tx = 0;
    let mut dot = vec![0; n_div];
    for (g, &m) in gens.iter().zip(coeff) {
        c1_tx += m * g.c1_tx;
        for (d, x) in dot.iter_mut().zip(&g.dot) {
            *d += m * x;
        }
    }
    Class {
        c1_log: c1_tx - dot.iter().sum::<i64>(),
        dot,
    }
}

fn ell(stratum: &Stratum, dot: &[i64]) -> i64 {
    let s: i64 = dot
        .iter()
        .enumerate()
        .filter(|(j, _)| !stratum.contains(&(j + 1)))
        .map(|(_, x)| x)
        .sum();
    s.min(2)
}

fn threshold(n: i64, stratum: &Stratum, ell: i64) -> i64 {
    3 - n + stratum.len() as i64 - ell
}

/// Lower bound the (SP2) consequent asks of c1_log.
fn sp2_floor(stratum: &Stratum, delta: i64, exempt: bool) -> i64 {
    if exempt && stratum.is_empty() && delta == 0 {
        0
    } else {
        0.max(2 - delta)
    }
}

/// Which of SP1, PExtra, SP2 fail for one class.
fn violations(n: i64, stratum: &Stratum, c: &Class, delta: i64, exempt: bool) -> Vec<Condition> {
    let l = ell(stratum, &c.dot);
    let t = threshold(n, stratum, l);
    let mut out = vec![];
    if c.c1_log >= t {
        if c.c1_log < 0 {
            out.push(Condition::Sp1);
        }
        if c.c1_log <= 0 {
            out.push(Condition::PExtra);
        }
        if c.c1_log < sp2_floor(stratum, delta, exempt) {
            out.push(Condition::Sp2);
        }
    }
    out
}

/// Integers m in [lo, hi] (hi = None for ∞).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Range {
    lo: i64,
    hi: Option<i64>,
}

impl Range {
    fn is_empty(&self) -> bool {
        matches!(self.hi, Some(h) if h < self.lo)
    }

    fn meet(self, o: Range) -> Range {
        let hi = match (self.hi, o.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        Range { lo: self.lo.max(o.lo), hi }
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

const EMPTY: Range = Range { lo: 1, hi: Some(0) };
const ALL: Range = Range { lo: i64::MIN / 4, hi: None };

/// { m : a·m ≥ b }.
fn at_least(a: i64, b: i64) -> Range {
    match a.signum() {
        0 => {
            if 0 >= b {
                ALL
            } else {
                EMPTY
            }
        }
        1 => Range { lo: div_ceil(b, a), hi: None },
        _ => Range {
            lo: ALL.lo,
            hi: Some(div_floor(b, a)),
        },
    }
}

/// { m : a·m < b } = { m : −a·m ≥ 1 − b }.
fn below(a: i64, b: i64) -> Range {
    at_least(-a, 1 - b)
}

/// Smallest m ≥ 1 at which `cond` fails for the rank-1 family, by solving the
/// linear inequalities piece by piece.
fn symbolic_witness(n: i64, stratum: &Stratum, g: &Pairing, delta: i64, exempt: bool, cond: Condition) -> Option<i64> {
    let unit = combine(std::slice::from_ref(g), &[1], g.dot.len());
    let c0 = unit.c1_log;
    let s: i64 = unit
        .dot
        .iter()
        .enumerate()
        .filter(|(j, _)| !stratum.contains(&(j + 1)))
        .map(|(_, x)| x)
        .sum();
    // ℓ(m) = p·m + q on each piece
    let pieces: Vec<(Range, i64, i64)> = if s <= 0 {
        vec![(Range { lo: 1, hi: None }, s, 0)]
    } else {
        vec![
            (Range { lo: 1, hi: Some(1) }, 0, s.min(2)),
            (Range { lo: 2, hi: None }, 0, 2),
        ]
    };
    let base = 3 - n + stratum.len() as i64;
    let floor = match cond {
        Condition::Sp1 => 0,
        Condition::PExtra => 1,
        Condition::Sp2 => sp2_floor(stratum, delta, exempt),
        Condition::Nef => unreachable!(),
    };
    pieces
        .into_iter()
        .filter_map(|(r, p, q)| {
            // c0·m ≥ base − (p·m + q)  and  c0·m < floor
            let hit = r.meet(at_least(c0 + p, base - q)).meet(below(c0, floor));
            (!hit.is_empty()).then_some(hit.lo)
        })
        .min()
}

fn check_nef(n: i64, gens: &[Pairing], stratum: &Stratum, f: &Family, out: &mut Vec<Witness>) {
    if !f.effective {
        return;
    }
    // a nonnegative combination is Nef-clean iff every generator is
    for (k, g) in gens.iter().enumerate() {
        if g.dot.iter().any(|&x| x < 0) {
            let mut coefficients = vec![0; gens.len()];
            coefficients[k] = 1;
            let c = combine(gens, &coefficients, g.dot.len());
            let l = ell(stratum, &c.dot);
            out.push(Witness {
                condition: Condition::Nef,
                stratum: stratum.clone(),
                family: f.label.clone(),
                coefficients,
                c1_log: c.c1_log,
                ell: l,
                threshold: threshold(n, stratum, l),
                delta: f.delta.unwrap_or(0),
            });
            return;
        }
    }
}

fn witness(n: i64, stratum: &Stratum, f: &Family, coefficients: Vec<i64>, cond: Condition) -> Witness {
    let c = combine(&f.generators, &coefficients, f.generators[0].dot.len());
    let l = ell(stratum, &c.dot);
    Witness {
        condition: cond,
        stratum: stratum.clone(),
        family: f.label.clone(),
        coefficients,
        c1_log: c.c1_log,
        ell: l,
        threshold: threshold(n, stratum, l),
        delta: f.delta.unwrap_or(0),
    }
}

/// Re-derive a witness's violation by substitution.
pub fn verify_witness(profile: &GeometryProfile, w: &Witness, exempt_empty_zero: bool) -> bool {
    let Some(f) = profile
        .strata
        .iter()
        .filter(|s| s.stratum == w.stratum)
        .flat_map(|s| s.families.iter())
        .find(|f| f.label == w.family)
    else {
        return false;
    };
    let c = combine(&f.generators, &w.coefficients, profile.n_div);
    if w.condition == Condition::Nef {
        return f.effective && c.dot.iter().any(|&x| x < 0);
    }
    violations(profile.n, &w.stratum, &c, f.delta.unwrap_or(0), exempt_empty_zero).contains(&w.condition)
}

fn validate(profile: &GeometryProfile) -> Result<()> {
    if profile.n < 1 {
        return Err(Error::structural("n", "complex dimension must be positive"));
    }
    for (a, s) in profile.strata.iter().enumerate() {
        if s.stratum.iter().any(|&i| i == 0 || i > profile.n_div) {
            return Err(Error::structural(format!("strata[{a}].stratum"), "index out of range"));
        }
        for (b, f) in s.families.iter().enumerate() {
            let path = format!("strata[{a}].families[{b}]");
            if f.generators.is_empty() {
                return Err(Error::structural(format!("{path}.generators"), "empty"));
            }
            for (c, g) in f.generators.iter().enumerate() {
                if g.dot.len() != profile.n_div {
                    return Err(Error::structural(
                        format!("{path}.generators[{c}].dot"),
                        format!("expected {} entries", profile.n_div),
                    ));
                }
            }
            match &f.multiplicity {
                Multiplicity::Symbolic(s) if s == "all" => {
                    if f.generators.len() > 1 {
                        return Err(Error::Precondition(format!(
                            "{path}: cannot decide a {}-generator cone symbolically; list the multiplicities explicitly",
                            f.generators.len()
                        )));
                    }
                }
                Multiplicity::Symbolic(s) => {
                    return Err(Error::structural(format!("{path}.multiplicity"), format!("unknown range {s:?}")));
                }
                Multiplicity::List(l) => {
                    for (c, m) in l.iter().enumerate() {
                        if m.len() != f.generators.len() || m.iter().any(|&x| x < 0) || m.iter().all(|&x| x == 0) {
                            return Err(Error::structural(
                                format!("{path}.multiplicity[{c}]"),
                                "need one nonnegative, not all zero, coefficient per generator",
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn scan(profile: &GeometryProfile, opts: ClassifyOptions, exempt: bool) -> Vec<Witness> {
    let n = profile.n;
    let mut out = vec![];
    for s in &profile.strata {
        for f in &s.families {
            check_nef(n, &f.generators, &s.stratum, f, &mut out);
            if !f.effective {
                continue;
            }
            let delta = f.delta.unwrap_or(0);
            match &f.multiplicity {
                Multiplicity::List(l) => {
                    for cond in [Condition::Sp1, Condition::PExtra, Condition::Sp2] {
                        if let Some(m) = l.iter().find(|m| {
                            let c = combine(&f.generators, m, profile.n_div);
                            violations(n, &s.stratum, &c, delta, exempt).contains(&cond)
                        }) {
                            out.push(witness(n, &s.stratum, f, m.clone(), cond));
                        }
                    }
                }
                Multiplicity::Symbolic(_) => {
                    for cond in [Condition::Sp1, Condition::PExtra, Condition::Sp2] {
                        let m = match opts.enumerate_to {
                            Some(top) => (1..=top).find(|&m| {
                                let c = combine(&f.generators, &[m], profile.n_div);
                                violations(n, &s.stratum, &c, delta, exempt).contains(&cond)
                            }),
                            None => symbolic_witness(n, &s.stratum, &f.generators[0], delta, exempt, cond),
                        };
                        if let Some(m) = m {
                            out.push(witness(n, &s.stratum, f, vec![m], cond));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn classify_pair(profile: &GeometryProfile) -> Result<Classification> {
    classify_with(profile, ClassifyOptions::default())
}

pub fn classify_with(profile: &GeometryProfile, opts: ClassifyOptions) -> Result<Classification> {
    validate(profile)?;
    let witnesses = scan(profile, opts, opts.exempt_empty_zero);
    for w in &witnesses {
        if !verify_witness(profile, w, opts.exempt_empty_zero) {
            return Err(Error::Internal(format!("witness does not reproduce: {w:?}")));
        }
    }
    let has = |c: Condition| witnesses.iter().any(|w| w.condition == c);
    let nef = !has(Condition::Nef);
    let semi_positive = nef && !has(Condition::Sp1);
    let positive = nef && !has(Condition::PExtra);
    let strongly_semi_positive = nef && !has(Condition::Sp2);
    let other = {
        let alt = scan(profile, opts, !opts.exempt_empty_zero);
        nef && !alt.iter().any(|w| w.condition == Condition::Sp2)
    };
    let delta_defaulted = profile
        .strata
        .iter()
        .flat_map(|s| s.families.iter())
        .any(|f| f.delta.is_none());
    Ok(Classification {
        nef,
        semi_positive,
        positive,
        strongly_semi_positive,
        strongly_positive: strongly_semi_positive && positive,
        strongly_semi_positive_strict: (other != strongly_semi_positive).then_some(if opts.exempt_empty_zero {
            other
        } else {
            strongly_semi_positive
        }),
        delta_defaulted,
        witnesses,
    })
}

/// Fewest points in which a line of P^{n'} can meet d' general hyperplanes
/// without lying in one: each point shared by a set S costs |S|−1 of the
/// 2(n'−1) parameters of lines, and |S| ≤ n'.
fn line_contact_points(n_rest: i64, d_rest: i64) -> i64 {
    if d_rest == 0 {
        return 0;
    }
    let by_size = (d_rest + n_rest - 1) / n_rest;
    by_size.max(d_rest - 2 * n_rest + 2).max(1)
}

/// d transverse hyperplanes in P^n, line class on every stratum that carries
/// curves. Strata are represented by I = {1, …, j}; the divisor is symmetric.
pub fn hyperplane_profile(n: i64, d: usize) -> GeometryProfile {
    let max_depth = (n - 1).max(0) as usize;
    let strata = (0..=max_depth.min(d))
        .map(|j| StratumFamilies {
            stratum: (1..=j).collect(),
            families: vec![Family {
                label: "line".into(),
                generators: vec![Pairing {
                    c1_tx: n + 1,
                    dot: vec![1; d],
                }],
                effective: true,
                multiplicity: Multiplicity::Symbolic("all".into()),
                delta: Some(line_contact_points(n - j as i64, (d - j) as i64)),
            }],
        })
        .collect();
    GeometryProfile { n, n_div: d, strata }
}
