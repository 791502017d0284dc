//! Gauss-Legendre and Gauss-Lobatto reference rules on [-1, 1], signed blends
//! of rules, and exact rational moment functionals.
//!
//! Individual nodes and weights are irrational, but the moments
//! `m_k = sum_i w_i x_i^k` are rational. They are computed exactly as
//! `integral (x^k mod w(x))` where `w` is the node polynomial of the rule:
//! the remainder has degree below the rule's exactness, and `x^k` agrees with
//! the remainder at every node.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{format_rational, parse_rational, rat};
use crate::series;

pub const MAX_RULE_POINTS: usize = 8;
pub const MAX_MOMENT_ORDER: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    GaussLegendre,
    GaussLobatto,
}

/// Identity of a reference rule: family and point count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId {
    pub kind: RuleKind,
    pub points: usize,
}

impl RuleId {
    pub fn gauss(points: usize) -> Self {
        RuleId {
            kind: RuleKind::GaussLegendre,
            points,
        }
    }

    pub fn lobatto(points: usize) -> Self {
        RuleId {
            kind: RuleKind::GaussLobatto,
            points,
        }
    }

    pub fn exactness(&self) -> usize {
        match self.kind {
            RuleKind::GaussLegendre => 2 * self.points - 1,
            RuleKind::GaussLobatto => 2 * self.points - 3,
        }
    }

    fn validate(&self) -> Result<()> {
        let min = match self.kind {
            RuleKind::GaussLegendre => 1,
            RuleKind::GaussLobatto => 2,
        };
        if (min..=MAX_RULE_POINTS).contains(&self.points) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{self} needs {min}..={MAX_RULE_POINTS} points"
            )))
        }
    }

    /// Polynomial vanishing exactly at the nodes.
    fn node_polynomial(&self) -> Poly {
        match self.kind {
            RuleKind::GaussLegendre => Poly::legendre(self.points),
            RuleKind::GaussLobatto => {
                let one_minus_x2 = Poly::new(vec![rat(1, 1), rat(0, 1), rat(-1, 1)]);
                &one_minus_x2 * &Poly::legendre(self.points - 1).derivative()
            }
        }
    }

    /// Short lowercase name as accepted on the command line (`g3`, `gl4`).
    pub fn short_name(&self) -> String {
        match self.kind {
            RuleKind::GaussLegendre => format!("g{}", self.points),
            RuleKind::GaussLobatto => format!("gl{}", self.points),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RuleKind::GaussLegendre => write!(f, "G_{}", self.points),
            RuleKind::GaussLobatto => write!(f, "GL_{}", self.points),
        }
    }
}

/// Floating-point nodes and weights of one reference rule.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceRule {
    id: RuleId,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ReferenceRule {
    pub fn gauss(n: usize) -> Result<Self> {
        Self::new(RuleId::gauss(n))
    }

    pub fn lobatto(n: usize) -> Result<Self> {
        Self::new(RuleId::lobatto(n))
    }

    pub fn new(id: RuleId) -> Result<Self> {
        id.validate()?;
        let (nodes, weights) = match id.kind {
            RuleKind::GaussLegendre => gauss_legendre_nodes(id.points),
            RuleKind::GaussLobatto => gauss_lobatto_nodes(id.points),
        };
        Ok(ReferenceRule { id, nodes, weights })
    }

    pub fn id(&self) -> RuleId {
        self.id
    }

    pub fn kind(&self) -> RuleKind {
        self.id.kind
    }

    pub fn points(&self) -> usize {
        self.id.points
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exactness(&self) -> usize {
        self.id.exactness()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn rational_moments(&self, k: usize) -> Result<RationalMoments> {
        rational_moments(self.id, k)
    }
}

/// Legendre P_n and P_{n-1} at x by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Gauss-Legendre nodes and weights for any n >= 1 (Newton on P_n).
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        if p != 0.0 {
            dp = nf * (x * p - pm1) / (x * x - 1.0);
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    symmetrize(&mut nodes, &mut weights);
    (nodes, weights)
}

/// Gauss-Lobatto nodes and weights for n >= 2 (Newton on P'_{n-1}).
pub fn gauss_lobatto_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = n - 1;
    let mf = m as f64;
    let end_weight = 2.0 / (mf * (mf + 1.0));
    let mut nodes = vec![-1.0];
    let mut weights = vec![end_weight];
    for i in (1..m).rev() {
        let mut x = (std::f64::consts::PI * i as f64 / mf).cos();
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(m, x);
            let dp = mf * (x * p - pm1) / (x * x - 1.0);
            let d2p = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, _) = legendre_pair(m, x);
        nodes.push(x);
        weights.push(end_weight / (p * p));
    }
    nodes.push(1.0);
    weights.push(end_weight);
    symmetrize(&mut nodes, &mut weights);
    (nodes, weights)
}

/// Exact moments `m_0..=m_K` of one reference rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMoments {
    pub rule: RuleId,
    pub moments: Vec<BigRational>,
}

pub fn rational_moments(rule: RuleId, k: usize) -> Result<RationalMoments> {
    rule.validate()?;
    if k > MAX_MOMENT_ORDER {
        return Err(Error::UnsupportedMomentOrder {
            requested: k,
            max: MAX_MOMENT_ORDER,
        });
    }
    let omega = rule.node_polynomial();
    let x = Poly::monomial(1);
    let mut r = Poly::constant(BigRational::one());
    let mut moments = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        moments.push(r.integrate_reference());
        r = (&r * &x).rem(&omega);
    }
    Ok(RationalMoments { rule, moments })
}

/// Exact integral of t^k over [-1, 1].
pub fn exact_moment(k: usize) -> BigRational {
    if k % 2 == 1 {
        BigRational::zero()
    } else {
        rat(2, k as i64 + 1)
    }
}

/// A signed combination of reference rules with coefficients summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    terms: Vec<(BigRational, RuleId)>,
    label: Option<String>,
}

impl QuadratureSpec {
    pub fn rule(id: RuleId) -> Self {
        QuadratureSpec {
            terms: vec![(BigRational::one(), id)],
            label: None,
        }
    }

    pub fn gauss(n: usize) -> Self {
        Self::rule(RuleId::gauss(n))
    }

    pub fn lobatto(n: usize) -> Self {
        Self::rule(RuleId::lobatto(n))
    }

    /// Builds a spec from explicit terms; coefficients must sum to one.
    pub fn from_terms(terms: Vec<(BigRational, RuleId)>) -> Result<Self> {
        let spec = Self::merged(terms);
        for (_, id) in &spec.terms {
            id.validate()?;
        }
        if !spec.coefficient_sum().is_one() {
            return Err(Error::InvalidParameter(format!(
                "blend coefficients of {spec} sum to {}",
                spec.coefficient_sum()
            )));
        }
        Ok(spec)
    }

    fn merged(terms: Vec<(BigRational, RuleId)>) -> Self {
        let mut acc: BTreeMap<RuleId, BigRational> = BTreeMap::new();
        for (c, id) in terms {
            *acc.entry(id).or_insert_with(BigRational::zero) += c;
        }
        QuadratureSpec {
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(id, c)| (c, id))
                .collect(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn terms(&self) -> &[(BigRational, RuleId)] {
        &self.terms
    }

    /// Coefficient attached to `id` (zero when absent).
    pub fn coefficient(&self, id: RuleId) -> BigRational {
        self.terms
            .iter()
            .find(|(_, r)| *r == id)
            .map(|(c, _)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.to_string())
    }

    pub fn coefficient_sum(&self) -> BigRational {
        self.terms
            .iter()
            .fold(BigRational::zero(), |acc, (c, _)| acc + c)
    }

    /// Combined moments `sum_r c_r m_k(r)`, k = 0..=K.
    pub fn moments(&self, k: usize) -> Result<Vec<BigRational>> {
        let mut out = vec![BigRational::zero(); k + 1];
        for (c, id) in &self.terms {
            let m = rational_moments(*id, k)?;
            for (o, mk) in out.iter_mut().zip(&m.moments) {
                *o += c * mk;
            }
        }
        Ok(out)
    }

    /// Exact value of the blended rule applied to a polynomial on [-1, 1].
    pub fn apply(&self, f: &Poly) -> Result<BigRational> {
        let m = self.moments(f.degree().unwrap_or(0))?;
        Ok(f
            .coeffs()
            .iter()
            .zip(&m)
            .fold(BigRational::zero(), |acc, (a, mk)| acc + a * mk))
    }

    /// Highest degree d such that every monomial up to d is integrated exactly.
    pub fn exactness(&self) -> Result<usize> {
        let cap = self
            .terms
            .iter()
            .map(|(_, id)| 2 * id.points + 2)
            .max()
            .unwrap_or(0);
        let m = self.moments(cap)?;
        Ok(m.iter()
            .enumerate()
            .take_while(|(k, mk)| **mk == exact_moment(*k))
            .count()
            .saturating_sub(1))
    }

    /// Flattened floating-point nodes with coefficient-scaled weights.
    pub fn nodes_weights(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for (c, id) in &self.terms {
            let rule = ReferenceRule::new(*id)?;
            let c = <f64 as crate::scalar::Scalar>::from_rational(c);
            out.extend(rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| (x, c * w)));
        }
        Ok(out)
    }

    /// Resolves a rule name relative to degree p: `g+1`, `gl+1`, `g+0`,
    /// `opt`, absolute `gN` / `glN`, or `blend:TAU:R1:R2`.
    pub fn parse(name: &str, p: usize) -> Result<Self> {
        let name = name.trim();
        let bad = || Error::InvalidParameter(format!("unknown rule name '{name}'"));
        if let Some(rest) = name.strip_prefix("blend:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let tau = parse_rational(parts[0]).ok_or_else(bad)?;
            let q1 = Self::parse(parts[1], p)?;
            let q2 = Self::parse(parts[2], p)?;
            return Ok(blend(&tau, &q1, &q2));
        }
        let spec = match name {
            "g+1" => Self::gauss(p + 1),
            "gl+1" => Self::lobatto(p + 1),
            "g+0" => Self::gauss(p),
            "opt" => return optimal_blend(p),
            _ => {
                let (kind, digits) = if let Some(d) = name.strip_prefix("gl") {
                    (RuleKind::GaussLobatto, d)
                } else if let Some(d) = name.strip_prefix('g') {
                    (RuleKind::GaussLegendre, d)
                } else {
                    return Err(bad());
                };
                let points: usize = digits.parse().map_err(|_| bad())?;
                Self::rule(RuleId { kind, points })
            }
        };
        for (_, id) in &spec.terms {
            id.validate()?;
        }
        Ok(spec)
    }
}

impl fmt::Display for QuadratureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            return write!(f, "{l}");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, id)| {
                if c.is_one() {
                    id.to_string()
                } else {
                    format!("{}*{}", format_rational(c), id)
                }
            })
            .collect();
        let mut s = String::new();
        for (i, part) in parts.iter().enumerate() {
            if i > 0 && !part.starts_with('-') {
                s.push('+');
            }
            s.push_str(part);
        }
        write!(f, "{s}")
    }
}

/// `tau q1 + (1 - tau) q2`, merged by rule identity.
pub fn blend(tau: &BigRational, q1: &QuadratureSpec, q2: &QuadratureSpec) -> QuadratureSpec {
    if tau.is_one() {
        return q1.clone();
    }
    if tau.is_zero() {
        return q2.clone();
    }
    let rest = BigRational::one() - tau;
    let terms = q1
        .terms
        .iter()
        .map(|(c, id)| (c * tau, *id))
        .chain(q2.terms.iter().map(|(c, id)| (c * &rest, *id)))
        .collect();
    QuadratureSpec::merged(terms)
}

/// Published optimal blending parameter on (G_{p+1}, GL_{p+1}).
pub fn published_optimal_tau(p: usize) -> Option<BigRational> {
    Some(match p {
        2 => rat(1, 3),
        3 => rat(-3, 2),
        4 => rat(-79, 5),
        5 => rat(-174, 1),
        6 => rat(-91177, 35),
        7 => rat(-105103, 2),
        _ => return None,
    })
}

/// Published Gauss-only optimal parameter on (G_{p+1}, G_p).
pub fn published_gauss_only_tau(p: usize) -> Option<BigRational> {
    Some(match p {
        2 => rat(2, 1),
        3 => rat(13, 3),
        4 => rat(22, 1),
        5 => rat(211, 1),
        6 => rat(30414, 10),
        7 => rat(60061, 1),
        _ => return None,
    })
}

/// The dispersion-optimal blend O_p.
pub fn optimal_blend(p: usize) -> Result<QuadratureSpec> {
    if !(1..=crate::splines::MAX_DEGREE).contains(&p) {
        return Err(Error::InvalidParameter(format!("no optimal blend for p = {p}")));
    }
    let g = QuadratureSpec::gauss(p + 1);
    let gl = QuadratureSpec::lobatto(p + 1);
    let tau = match published_optimal_tau(p) {
        Some(t) => t,
        None => series::find_optimal_tau(p, &g, &gl)?,
    };
    Ok(blend(&tau, &g, &gl).with_label(format!("O_{p}")))
}

/// Equivalent two-rule forms of O_p listed alongside the canonical one.
pub fn alternative_optimal_blends(p: usize) -> Vec<QuadratureSpec> {
    let mut out = Vec::new();
    if let Some(t) = published_gauss_only_tau(p) {
        out.push(blend(&t, &QuadratureSpec::gauss(p + 1), &QuadratureSpec::gauss(p)));
    }
    match p {
        2 => out.push(blend(&rat(4, 5), &QuadratureSpec::lobatto(3), &QuadratureSpec::gauss(2))),
        3 => out.push(blend(&rat(13, 7), &QuadratureSpec::lobatto(4), &QuadratureSpec::gauss(3))),
        _ => {}
    }
    out
}

/// Three-rule cubic blends reported to share the O_3 dispersion expansion.
pub fn three_rule_cubic_blends() -> Vec<QuadratureSpec> {
    let g = |n| RuleId::gauss(n);
    let gl = |n| RuleId::lobatto(n);
    let table = [
        [(rat(4, 35), gl(3)), (rat(36, 35), g(2)), (rat(-1, 7), gl(2))],
        [(rat(10, 49), g(3)), (rat(234, 245), g(2)), (rat(-39, 245), gl(2))],
        [(rat(20, 7), g(3)), (rat(-52, 35), gl(3)), (rat(-13, 35), gl(2))],
        [(rat(10, 7), gl(4)), (rat(-12, 35), gl(3)), (rat(-3, 35), gl(2))],
    ];
    table
        .into_iter()
        .map(|t| QuadratureSpec::from_terms(t.to_vec()).expect("published blends sum to one"))
        .collect()
}

/// Coefficients (C1, C2) of O_p written as `G + C1 (GL - G)` and
/// `G_{p+1} + C2 (G_{p+1} - G_p)` from the published lists.
pub fn blend_form_coefficients(p: usize) -> Option<(BigRational, BigRational)> {
    let c1 = BigRational::one() - published_optimal_tau(p)?;
    let c2 = published_gauss_only_tau(p)? - BigRational::one();
    Some((c1, c2))
}

/// True when every coefficient is nonnegative.
pub fn is_positive_blend(spec: &QuadratureSpec) -> bool {
    spec.terms.iter().all(|(c, _)| !c.is_negative())
}
