//! Meromorphic sections of O(d) on P¹ in factored form.
//!
//! Charts: z on the finite part, w = 1/z at infinity, transition z^d. The
//! local coordinate at a finite point p is w = z − p.

use crate::error::{Error, Result};
use crate::gaussian::{GaussianRational, P1Point};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSection {
    pub degree: i64,
    pub scale: GaussianRational,
    /// Finite roots and poles with multiplicities; zero multiplicities are dropped.
    pub factors: Vec<(GaussianRational, i64)>,
}

/// Build ζ = β ∏ (z − p)^{m_p} with the given divisor. An entry at ∞ fixes
/// the order there; the total must equal the degree.
pub fn build_section(
    degree: i64,
    divisor: &[(P1Point, i64)],
    scale: GaussianRational,
) -> Result<RationalSection> {
    if scale.is_zero() {
        return Err(Error::Invalid("section scale must be nonzero".into()));
    }
    for (a, (p, _)) in divisor.iter().enumerate() {
        if divisor[..a].iter().any(|(q, _)| q == p) {
            return Err(Error::Invalid(format!("repeated special point {p}")));
        }
    }
    let total: i64 = divisor.iter().map(|(_, m)| m).sum();
    if total != degree {
        return Err(Error::DegreeMismatch {
            degree,
            divisor: total,
        });
    }
    let factors = divisor
        .iter()
        .filter_map(|(p, m)| match p {
            P1Point::Finite(z) if *m != 0 => Some((z.clone(), *m)),
            _ => None,
        })
        .collect();
    Ok(RationalSection {
        degree,
        scale,
        factors,
    })
}

impl RationalSection {
    pub fn finite_degree(&self) -> i64 {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    pub fn order_at(&self, p: &P1Point) -> i64 {
        match p {
            P1Point::Infinity => self.degree - self.finite_degree(),
            P1Point::Finite(z) => self
                .factors
                .iter()
                .find(|(q, _)| q == z)
                .map_or(0, |(_, m)| *m),
        }
    }

    /// Order and leading coefficient η at `p` in the chart-local coordinate.
    pub fn leading_coefficient(&self, p: &P1Point) -> (i64, GaussianRational) {
        match p {
            // w^d ζ(1/w) = β w^{d − Σm} ∏ (1 − q w)^m
            P1Point::Infinity => (self.order_at(p), self.scale.clone()),
            P1Point::Finite(z) => {
                let mut eta = self.scale.clone();
                let mut order = 0;
                for (q, m) in &self.factors {
                    if q == z {
                        order = *m;
                    } else {
                        eta = &eta * &(z - q).pow(*m);
                    }
                }
                (order, eta)
            }
        }
    }

    /// Value at a finite point that is neither a zero nor a pole.
    pub fn evaluate(&self, z: &GaussianRational) -> Option<GaussianRational> {
        let mut v = self.scale.clone();
        for (q, m) in &self.factors {
            let d = z - q;
            if d.is_zero() {
                return None;
            }
            v = &v * &d.pow(*m);
        }
        Some(v)
    }

    pub fn scaled(&self, c: &GaussianRational) -> RationalSection {
        RationalSection {
            degree: self.degree,
            scale: &self.scale * c,
            factors: self.factors.clone(),
        }
    }
}

pub fn leading_coefficient(section: &RationalSection, p: &P1Point) -> (i64, GaussianRational) {
    section.leading_coefficient(p)
}

/// Contact vector at a point: orders of ζ_{v,i} for i ∈ I_v (1-based keys in
/// `sections`), supplied tangency orders elsewhere.
pub fn order_vector(
    n_div: usize,
    sections: &[(usize, RationalSection)],
    tangency: &[(usize, i64)],
    point: &P1Point,
) -> Result<Vec<i64>> {
    let mut out = vec![0; n_div];
    for (i, t) in tangency {
        if *t < 0 {
            return Err(Error::Invalid(format!(
                "tangency order {t} for D_{i} must be nonnegative"
            )));
        }
        out[i - 1] = *t;
    }
    for (i, s) in sections {
        out[i - 1] = s.order_at(point);
    }
    Ok(out)
}
