//! Truncated power series in Λ with exact coefficients, and the dispersion
//! and spectrum expansions of interior stencils.
//!
//! With `s(Λ) = s_0 + 2 sum s_k cos(kΛ)` and `m(Λ)` likewise, the spectrum
//! series is `sqrt(s/m)` and the dispersion series is its compositional
//! inverse. Coefficients are either rationals or multivariate polynomials in
//! free stencil parameters, which is how optimal blends and mass bands are
//! solved for.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::assembly::{stencil_for_degree, AssemblyOptions, StencilSymbol};
use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use crate::quadrature::QuadratureSpec;
use crate::scalar::rat;

/// Coefficient ring of a series.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: &BigRational) -> Self;

    /// Some(q) when the coefficient is the rational constant q.
    fn as_rational(&self) -> Option<BigRational>;

    fn scale(&self, q: &BigRational) -> Self {
        self.clone() * Self::from_rational(q)
    }
}

impl Coefficient for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn as_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn scale(&self, q: &BigRational) -> Self {
        self * q
    }
}

impl Coefficient for MPoly {
    fn from_rational(q: &BigRational) -> Self {
        MPoly::constant(q.clone())
    }

    fn as_rational(&self) -> Option<BigRational> {
        self.as_constant()
    }

    fn scale(&self, q: &BigRational) -> Self {
        MPoly::scale(self, q)
    }
}

/// `c_0 + c_1 Λ + ... + c_K Λ^K`, exact through order K.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

pub type RationalSeries = Series<BigRational>;

/// Stencil whose mass band carries free parameters.
pub type ParamStencil = StencilSymbol<MPoly>;

impl<C: Coefficient> Series<C> {
    /// Pads or truncates `coeffs` to order K.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    /// The series `Λ`.
    pub fn identity(order: usize) -> Self {
        Self::new(vec![C::zero(), C::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs.clone(), order)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        Self::new(
            (0..=order).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
            order,
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        Self::new(
            (0..=order).map(|k| self.coeff(k) - rhs.coeff(k)).collect(),
            order,
        )
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|c| c.scale(q)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut out = vec![C::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Series { coeffs: out }
    }

    /// Multiplicative inverse; the constant term must be a nonzero rational.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0]
            .as_rational()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::DegenerateSymbol("constant term is not an invertible rational".into()))?;
        let inv0 = c0.recip();
        let order = self.order();
        let mut out: Vec<C> = vec![C::from_rational(&inv0)];
        for k in 1..=order {
            let mut acc = C::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push((-acc).scale(&inv0));
        }
        Ok(Series { coeffs: out })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.recip()?))
    }

    /// Divides by `Λ^k`; the first k coefficients must vanish. Order drops by k.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) || self.order() < k {
            return Err(Error::DegenerateSymbol(format!("series is not divisible by Λ^{k}")));
        }
        Ok(Series {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Multiplies by `Λ^k` keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs, self.order())
    }

    /// `sqrt(1 + X)` for a series X without constant term (binomial series).
    pub fn sqrt_one_plus(x: &Self) -> Result<Self> {
        if !x.coeffs[0].is_zero() {
            return Err(Error::DegenerateSymbol("sqrt argument must start at 1".into()));
        }
        let order = x.order();
        let mut out = Self::new(vec![C::one()], order);
        let mut power = Self::new(vec![C::one()], order);
        let mut binom = BigRational::one();
        for n in 1..=order {
            // binom(1/2, n)
            binom = binom * (rat(1, 2) - rat(n as i64 - 1, 1)) / rat(n as i64, 1);
            power = power.mul(x);
            out = out.add(&power.scale(&binom));
        }
        Ok(out)
    }

    /// `self(g)` for g without constant term.
    pub fn compose(&self, g: &Self) -> Self {
        let order = self.order().min(g.order());
        let mut out = Self::zero(order);
        for c in self.coeffs[..=order].iter().rev() {
            out = out.mul(g);
            out.coeffs[0] = out.coeffs[0].clone() + c.clone();
        }
        out
    }

    /// Compositional inverse of a series `c_1 Λ + ...` with rational c_1 != 0.
    pub fn reversion(&self) -> Result<Self> {
        let c1 = self
            .coeff(1)
            .as_rational()
            .filter(|c| !c.is_zero() && self.coeffs[0].is_zero())
            .ok_or_else(|| Error::DegenerateSymbol("series is not invertible under composition".into()))?;
        let inv = c1.recip();
        let order = self.order();
        let x = Self::identity(order);
        let mut g = x.scale(&inv);
        for _ in 0..order {
            let residual = self.compose(&g).sub(&x);
            g = g.sub(&residual.scale(&inv));
        }
        Ok(g)
    }

    /// Index and value of the first nonzero coefficient above `Λ^1`.
    pub fn leading_error(&self) -> Option<(usize, C)> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(2)
            .find(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.clone()))
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

/// Truncation order used when none is requested.
pub fn default_order(p: usize) -> usize {
    2 * p + 5
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `cos(k Λ)` to order K.
fn cos_series(k: usize, order: usize) -> RationalSeries {
    let mut coeffs = vec![BigRational::zero(); order + 1];
    let kk = BigInt::from(k);
    for j in (0..=order).step_by(2) {
        let num = num_traits::pow(kk.clone(), j);
        let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
        coeffs[j] = BigRational::new(num * sign, factorial(j));
    }
    Series { coeffs }
}

/// `b_0 + 2 sum_k b_k cos(kΛ)` to order K.
pub fn symbol_series<C: Coefficient>(band: &[C], order: usize) -> Series<C> {
    let mut out = Series::new(vec![band[0].clone()], order);
    for (k, b) in band.iter().enumerate().skip(1) {
        let c = cos_series(k, order).map(|q| b.scale(&(q * rat(2, 1))));
        out = out.add(&c);
    }
    out
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Series of `sqrt(s(Λ)/m(Λ))`, the discrete spectrum `sqrt(λ_h) h` as a
/// function of the wavenumber.
pub fn expand_spectrum<C: Coefficient>(sym: &StencilSymbol<C>, order: usize) -> Result<Series<C>> {
    let s = symbol_series(&sym.stiffness, order + 2);
    let m = symbol_series(&sym.mass, order + 2);
    if !s.coeff(0).is_zero() {
        return Err(Error::DegenerateSymbol("stiffness symbol does not vanish at 0".into()));
    }
    let ratio = s.div(&m)?.shift_down(2)?;
    let lead = ratio
        .coeff(0)
        .as_rational()
        .filter(|c| c.is_positive())
        .ok_or_else(|| Error::DegenerateSymbol("Λ² coefficient of the symbol is not positive".into()))?;
    let root = rational_sqrt(&lead).ok_or_else(|| {
        Error::DegenerateSymbol(format!("Λ² coefficient {lead} is not a rational square"))
    })?;
    let x = ratio.scale(&lead.recip());
    let mut x = x;
    x.coeffs[0] = C::zero();
    let sqrt = Series::sqrt_one_plus(&x)?.scale(&root);
    Ok(sqrt.shift_up(1).truncate(order))
}

/// Series of the discrete wavenumber `μ h` in terms of `Λ`.
pub fn expand_dispersion<C: Coefficient>(sym: &StencilSymbol<C>, order: usize) -> Result<Series<C>> {
    expand_spectrum(sym, order)?.reversion()
}

fn lift(sym: &StencilSymbol<BigRational>) -> ParamStencil {
    StencilSymbol {
        degree: sym.degree,
        stiffness: sym.stiffness.iter().map(|q| MPoly::constant(q.clone())).collect(),
        mass: sym.mass.iter().map(|q| MPoly::constant(q.clone())).collect(),
    }
}

fn exact_stiffness_rule(p: usize) -> QuadratureSpec {
    QuadratureSpec::gauss(p + 1)
}

/// Stencil of degree p whose mass band is `tau m(q1) + (1 - tau) m(q2)`,
/// with tau the polynomial variable 0. Stiffness is integrated exactly.
pub fn tau_stencil(p: usize, q1: &QuadratureSpec, q2: &QuadratureSpec) -> Result<ParamStencil> {
    let k = exact_stiffness_rule(p);
    let opts = AssemblyOptions::default();
    let s1 = stencil_for_degree(p, &k, q1, opts)?;
    let s2 = stencil_for_degree(p, &k, q2, opts)?;
    let tau = MPoly::var(0);
    let mut out = lift(&s2);
    for (slot, (a, b)) in out.mass.iter_mut().zip(s1.mass.iter().zip(&s2.mass)) {
        *slot = &*slot + &tau.scale(&(a - b));
    }
    Ok(out)
}

/// The blending parameter that cancels the `Λ^{2p+1}` dispersion term of
/// `tau q1 + (1 - tau) q2`.
pub fn find_optimal_tau(p: usize, q1: &QuadratureSpec, q2: &QuadratureSpec) -> Result<BigRational> {
    let sym = tau_stencil(p, q1, q2)?;
    let series = expand_dispersion(&sym, 2 * p + 3)?;
    for k in 2..=2 * p {
        if !series.coeff(k).is_zero() {
            return Err(Error::NoSolution(format!(
                "Λ^{k} coefficient {} does not vanish for every tau",
                series.coeff(k)
            )));
        }
    }
    let lead = series.coeff(2 * p + 1);
    if lead.degree_in(0) != 1 || lead.total_degree() != 1 {
        return Err(Error::NoSolution(format!(
            "leading coefficient {lead} is not linear in tau"
        )));
    }
    let a = lead.coefficient_of(0, 0).as_constant().unwrap_or_default();
    let b = lead.coefficient_of(0, 1).as_constant().unwrap_or_default();
    let tau = -a / b;
    let next = series.coeff(2 * p + 3).eval(std::slice::from_ref(&tau));
    if next.is_zero() {
        return Err(Error::NoSolution(format!(
            "tau = {tau} also cancels the Λ^{} term",
            2 * p + 3
        )));
    }
    Ok(tau)
}

/// Stencil of degree p with free mass entries: variable i - 1 is `m_i` for
/// i = 1..=p and the center is fixed by the unit row sum.
pub fn mass_param_stencil(p: usize) -> Result<ParamStencil> {
    let exact = stencil_for_degree(p, &exact_stiffness_rule(p), &exact_stiffness_rule(p), AssemblyOptions::default())?;
    let mut mass = vec![MPoly::one()];
    for i in 1..=p {
        let v = MPoly::var(i - 1);
        mass[0] = &mass[0] - &v.scale(&rat(2, 1));
        mass.push(v);
    }
    Ok(StencilSymbol {
        degree: p,
        stiffness: exact.stiffness.iter().map(|q| MPoly::constant(q.clone())).collect(),
        mass,
    })
}

/// Rational roots of a univariate polynomial of degree 1 or 2.
fn rational_roots(poly: &MPoly, var: usize) -> Result<Vec<BigRational>> {
    let c = |k| poly.coefficient_of(var, k).as_constant().unwrap_or_default();
    match poly.degree_in(var) {
        1 => Ok(vec![-c(0) / c(1)]),
        2 => {
            let (a, b, c0) = (c(2), c(1), c(0));
            let disc = &b * &b - rat(4, 1) * &a * &c0;
            let two_a = rat(2, 1) * &a;
            match rational_sqrt(&disc) {
                Some(r) => Ok(vec![(-&b + &r) / &two_a, (-&b - &r) / &two_a]),
                None => {
                    use num_traits::ToPrimitive;
                    let d = disc.to_f64().unwrap_or(f64::NAN);
                    let (bf, af) = (b.to_f64().unwrap_or(f64::NAN), two_a.to_f64().unwrap_or(f64::NAN));
                    Err(Error::NoSolution(format!(
                        "quadratic has no rational root; roots {} and {}",
                        (-bf + d.sqrt()) / af,
                        (-bf - d.sqrt()) / af
                    )))
                }
            }
        }
        d => Err(Error::NoSolution(format!("cannot solve a degree {d} equation"))),
    }
}

/// Solves polynomial equations by successive elimination. Each step takes
/// the first equation that is linear with constant coefficient in some
/// variable, or univariate of degree at most two.
fn solve_system(equations: Vec<MPoly>, unknowns: usize) -> Result<Vec<BigRational>> {
    let mut solved: Vec<Option<MPoly>> = vec![None; unknowns];
    let mut pending = equations;
    while let Some(pos) = pending.iter().position(|e| !e.is_zero()) {
        let eq = pending.remove(pos);
        let vars = eq.variables();
        if vars.is_empty() {
            return Err(Error::NoSolution(format!("inconsistent equation {eq} = 0")));
        }
        let linear = vars.iter().copied().find(|&v| {
            eq.degree_in(v) == 1 && eq.coefficient_of(v, 1).as_constant().is_some()
        });
        let (var, value) = if let Some(v) = linear {
            let coef = eq.coefficient_of(v, 1).as_constant().unwrap_or_default();
            (v, eq.coefficient_of(v, 0).scale(&(-coef.recip())))
        } else if vars.len() == 1 {
            let v = vars[0];
            let roots = rational_roots(&eq, v)?;
            // keep the root consistent with the remaining equations
            let pick = roots.iter().find(|r| {
                let c = MPoly::constant((*r).clone());
                pending.iter().all(|e| {
                    let s = e.substitute(v, &c);
                    !s.variables().is_empty() || s.is_zero()
                })
            });
            let r = pick.cloned().ok_or_else(|| {
                Error::NoSolution(format!("no root of {eq} satisfies the remaining equations"))
            })?;
            (v, MPoly::constant(r))
        } else {
            return Err(Error::NoSolution(format!("cannot eliminate from {eq}")));
        };
        for e in pending.iter_mut() {
            *e = e.substitute(var, &value);
        }
        for s in solved.iter_mut().flatten() {
            *s = s.substitute(var, &value);
        }
        solved[var] = Some(value);
    }
    solved
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.and_then(|p| p.as_constant())
                .ok_or_else(|| Error::NoSolution(format!("unknown {i} is not determined")))
        })
        .collect()
}

/// Mass band `(m_1, .., m_p)` that cancels the `Λ^3 .. Λ^{2p+1}` dispersion
/// terms. For p = 2 this is `(β, α)`; for p = 3 `(β, α, γ)`.
pub fn find_optimal_mass(p: usize) -> Result<Vec<BigRational>> {
    if !(2..=3).contains(&p) {
        return Err(Error::InvalidParameter(format!("optimal mass search supports p = 2, 3, got {p}")));
    }
    let sym = mass_param_stencil(p)?;
    let series = expand_dispersion(&sym, 2 * p + 1)?;
    let equations: Vec<MPoly> = (1..=p).map(|i| series.coeff(2 * i + 1)).collect();
    let values = solve_system(equations, p)?;
    let residual = expand_dispersion(&sym, 2 * p + 1)?;
    for k in 2..=2 * p + 1 {
        if !residual.coeff(k).eval(&values).is_zero() {
            return Err(Error::NoSolution(format!("Λ^{k} survives back-substitution")));
        }
    }
    Ok(values)
}

/// Rational stencil for the given rule on both forms.
pub fn stencil_of(p: usize, rule: &QuadratureSpec) -> Result<StencilSymbol<BigRational>> {
    stencil_for_degree(p, rule, rule, AssemblyOptions::default())
}

/// Rational stencil with `rule` on the mass and exact stiffness.
pub fn mass_only_stencil(p: usize, rule: &QuadratureSpec) -> Result<StencilSymbol<BigRational>> {
    stencil_for_degree(p, &exact_stiffness_rule(p), rule, AssemblyOptions::default())
}

/// `-num / (den * fact!)`, the form of the tabulated leading coefficients.
fn tabulated(num: i64, den: i64, fact: usize) -> BigRational {
    -BigRational::new(BigInt::from(num), BigInt::from(den) * factorial(fact))
}

/// Published dispersion coefficients `(power, coefficient)` per rule, signed as
/// in `μh = Λ + sum c_k Λ^k`. Degrees 2 and 3 list two terms, 4 to 7 the
/// leading one.
pub fn published_dispersion(p: usize) -> Result<Vec<(QuadratureSpec, Vec<(usize, BigRational)>)>> {
    let g = QuadratureSpec::gauss;
    let gl = QuadratureSpec::lobatto;
    let o = crate::quadrature::optimal_blend(p)?;
    Ok(match p {
        2 => vec![
            (g(3), vec![(5, rat(-1, 1440)), (7, rat(-1, 6720))]),
            (gl(3), vec![(5, rat(1, 2880)), (7, rat(-1, 16128))]),
            (g(2), vec![(5, rat(-1, 720)), (7, rat(-5, 24192))]),
            (o, vec![(7, rat(-11, 120960)), (9, rat(-1, 345600))]),
        ],
        3 => vec![
            (g(4), vec![(7, rat(-1, 60480)), (9, rat(-1, 907200))]),
            (gl(4), vec![(7, rat(-1, 100800)), (9, rat(-11, 1814400))]),
            (g(3), vec![(7, rat(-13, 604800)), (9, rat(-37, 7257600))]),
            (o, vec![(9, rat(-1, 145152)), (11, rat(19, 68428800))]),
        ],
        4..=7 => {
            let (std, opt): ([(i64, i64); 3], (i64, i64)) = match p {
                4 => ([(3, 20), (79, 560), (11, 70)], (317, 24)),
                5 => ([(5, 12), (29, 70), (211, 504)], (35039, 420)),
                6 => ([(691, 420), (91177, 55440), (5069, 3080)], (15479, 24)),
                _ => ([(35, 4), (105103, 12012), (60061, 6864)], (91067, 15)),
            };
            let k = 2 * p + 1;
            let f = k;
            vec![
                (g(p + 1), vec![(k, tabulated(std[0].0, std[0].1, f))]),
                (gl(p + 1), vec![(k, tabulated(std[1].0, std[1].1, f))]),
                (g(p), vec![(k, tabulated(std[2].0, std[2].1, f))]),
                (o, vec![(k + 2, tabulated(opt.0, opt.1, f + 2))]),
            ]
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "published coefficients cover p = 2..7, got {p}"
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::optimal_blend;

    fn q(s: &str) -> BigRational {
        crate::scalar::parse_rational(s).unwrap()
    }

    #[test]
    fn reciprocal_and_reversion_of_known_series() {
        // 1/(1 - x) = 1 + x + x^2 + ...
        let s = RationalSeries::new(vec![q("1"), q("-1")], 6);
        assert!(s.recip().unwrap().coeffs().iter().all(|c| c.is_one()));
        // inverse of x + x^2 has coefficients (-1)^(n+1) Catalan(n-1)
        let f = RationalSeries::new(vec![q("0"), q("1"), q("1")], 6);
        let g = f.reversion().unwrap();
        assert_eq!(g.coeffs(), &[q("0"), q("1"), q("-1"), q("2"), q("-5"), q("14"), q("-42")]);
        assert_eq!(f.compose(&g), RationalSeries::identity(6));
    }

    #[test]
    fn binomial_square_root() {
        let x = RationalSeries::new(vec![q("0"), q("1")], 5);
        let r = RationalSeries::sqrt_one_plus(&x).unwrap();
        assert_eq!(r.mul(&r), RationalSeries::new(vec![q("1"), q("1")], 5));
    }

    #[test]
    fn linear_hat_stencil_dispersion() {
        // hats with consistent mass: Λ - Λ^3/24 + ...
        let sym = stencil_of(1, &QuadratureSpec::gauss(2)).unwrap();
        let d = expand_dispersion(&sym, 5).unwrap();
        assert_eq!(d.coeff(1), q("1"));
        assert_eq!(d.coeff(3), q("-1/24"));
    }

    #[test]
    fn quadratic_gauss_leading_terms() {
        let sym = stencil_of(2, &QuadratureSpec::gauss(3)).unwrap();
        let d = expand_dispersion(&sym, 9).unwrap();
        assert_eq!(d.coeff(5), q("-1/1440"));
        assert_eq!(d.coeff(7), q("-1/6720"));
        let s = expand_spectrum(&sym, 9).unwrap();
        assert_eq!(s.coeff(5), q("1/1440"));
        assert!(s.coeffs().iter().step_by(2).all(Zero::is_zero));
    }

    #[test]
    fn optimal_tau_examples() {
        let g = QuadratureSpec::gauss;
        let gl = QuadratureSpec::lobatto;
        assert_eq!(find_optimal_tau(2, &g(3), &gl(3)).unwrap(), q("1/3"));
        assert_eq!(find_optimal_tau(2, &g(3), &g(2)).unwrap(), q("2"));
        assert_eq!(find_optimal_tau(1, &g(2), &gl(2)).unwrap(), q("1/2"));
    }

    #[test]
    fn optimal_tau_fails_without_dependence() {
        let g3 = QuadratureSpec::gauss(3);
        assert!(matches!(find_optimal_tau(2, &g3, &g3), Err(Error::NoSolution(_))));
    }

    #[test]
    fn quadratic_optimal_mass() {
        assert_eq!(find_optimal_mass(2).unwrap(), vec![q("19/90"), q("7/720")]);
    }

    #[test]
    fn cubic_optimal_mass_is_the_blend_band() {
        let band = find_optimal_mass(3).unwrap();
        let o3 = stencil_of(3, &optimal_blend(3).unwrap()).unwrap();
        assert_eq!(band, o3.mass[1..].to_vec());
    }
}
