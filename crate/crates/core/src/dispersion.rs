//! Dispersion and spectrum curves of an interior stencil.
//!
//! For wavenumber θ the symbols are `s(θ) = s_0 + 2 sum s_k cos(kθ)` and
//! `m(θ)` likewise. They are evaluated as `row_sum - 4 sum b_k sin²(kθ/2)`,
//! which avoids the cancellation of the cosine form near θ = 0.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::assembly::StencilSymbol;
use crate::error::{Error, Result};
use crate::quadrature::{optimal_blend, QuadratureSpec};
use crate::scalar::{format_rational, rat, Scalar};
use crate::series::stencil_of;

const PI: f64 = std::f64::consts::PI;

/// Stiffness and mass symbols of one stencil.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolFunctions {
    stiffness: Vec<f64>,
    mass: Vec<f64>,
    stiffness_sum: f64,
    mass_sum: f64,
}

impl SymbolFunctions {
    /// Rounds a stencil; row sums are formed in `T` before rounding.
    pub fn new<T: Scalar>(sym: &StencilSymbol<T>) -> Self {
        SymbolFunctions {
            stiffness: sym.stiffness.iter().map(Scalar::to_f64).collect(),
            mass: sym.mass.iter().map(Scalar::to_f64).collect(),
            stiffness_sum: sym.stiffness_row_sum().to_f64(),
            mass_sum: sym.mass_row_sum().to_f64(),
        }
    }

    fn eval(band: &[f64], sum: f64, theta: f64) -> f64 {
        let mut v = sum;
        for (k, b) in band.iter().enumerate().skip(1) {
            let s = (0.5 * k as f64 * theta).sin();
            v -= 4.0 * b * s * s;
        }
        v
    }

    fn deriv(band: &[f64], theta: f64) -> f64 {
        band.iter()
            .enumerate()
            .skip(1)
            .map(|(k, b)| -2.0 * k as f64 * b * (k as f64 * theta).sin())
            .sum()
    }

    pub fn stiffness(&self, theta: f64) -> f64 {
        Self::eval(&self.stiffness, self.stiffness_sum, theta)
    }

    pub fn mass(&self, theta: f64) -> f64 {
        Self::eval(&self.mass, self.mass_sum, theta)
    }
}

/// `sqrt(s(θ)/m(θ))`, the discrete `sqrt(λ_h) h` at wavenumber θ.
pub fn spectrum_curve(sym: &SymbolFunctions, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidParameter(format!("wavenumber {theta} outside (0, pi)")));
    }
    let m = sym.mass(theta);
    if m <= 0.0 {
        return Err(Error::SymbolDegenerate { theta });
    }
    Ok((sym.stiffness(theta) / m).sqrt())
}

/// Root μh in (0, π) of `s(μ) = Λ² m(μ)`.
pub fn dispersion_curve(sym: &SymbolFunctions, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lambda {lambda} must be positive")));
    }
    let l2 = lambda * lambda;
    let f = |mu: f64| sym.stiffness(mu) - l2 * sym.mass(mu);
    let df = |mu: f64| {
        SymbolFunctions::deriv(&sym.stiffness, mu) - l2 * SymbolFunctions::deriv(&sym.mass, mu)
    };
    // f(0) = -Λ² < 0; the first sign change on a fine grid brackets the root
    const GRID: usize = 512;
    let mut lo = 0.0;
    let mut hi = None;
    for i in 1..=GRID {
        let x = PI * i as f64 / GRID as f64;
        if f(x) >= 0.0 {
            hi = Some(x);
            break;
        }
        lo = x;
    }
    let mut hi = hi.ok_or(Error::OutOfBand { lambda })?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    let mut mu = 0.5 * (lo + hi);
    for _ in 0..20 {
        let d = df(mu);
        if d == 0.0 {
            break;
        }
        let step = f(mu) / d;
        let next = mu - step;
        if !(next > lo - 1e-9 && next < hi + 1e-9) {
            break;
        }
        mu = next;
        if step.abs() <= 1e-17 * mu.max(1.0) {
            break;
        }
    }
    if f(mu).abs() > 1e-14 * l2.max(1.0) {
        return Err(Error::OutOfBand { lambda });
    }
    Ok(mu)
}

/// Chebyshev polynomial T_k as ascending coefficients.
fn chebyshev(k: usize) -> Vec<BigRational> {
    let mut t0 = vec![BigRational::one()];
    let mut t1 = vec![BigRational::zero(), BigRational::one()];
    if k == 0 {
        return t0;
    }
    for _ in 1..k {
        let mut t2 = vec![BigRational::zero(); t1.len() + 1];
        for (i, c) in t1.iter().enumerate() {
            t2[i + 1] += c * rat(2, 1);
        }
        for (i, c) in t0.iter().enumerate() {
            t2[i] -= c;
        }
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// `b_0 + 2 sum b_k T_k(c)` as ascending coefficients in c = cos θ.
fn cos_polynomial(band: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); band.len()];
    out[0] += &band[0];
    for (k, b) in band.iter().enumerate().skip(1) {
        for (i, t) in chebyshev(k).iter().enumerate() {
            out[i] += rat(2, 1) * b * t;
        }
    }
    out
}

/// Relation `s(θ) - Λ² m(θ) = 0` written as `sum_i (A_i + B_i Λ²) c^i`.
pub fn cos_relation(sym: &StencilSymbol<BigRational>) -> Vec<(BigRational, BigRational)> {
    let s = cos_polynomial(&sym.stiffness);
    let m = cos_polynomial(&sym.mass);
    s.into_iter().zip(m).map(|(a, b)| (a, -b)).collect()
}

/// Published dispersion relations, ascending in cos θ, as (constant, Λ² coefficient).
pub fn published_closed_forms(p: usize) -> Result<Vec<(QuadratureSpec, Vec<(i64, i64)>)>> {
    let g = QuadratureSpec::gauss;
    let gl = QuadratureSpec::lobatto;
    Ok(match p {
        2 => vec![
            (g(3), vec![(-40, 16), (20, 13), (20, 1)]),
            (gl(3), vec![(-32, 13), (16, 10), (16, 1)]),
            (g(2), vec![(-48, 19), (24, 16), (24, 1)]),
            (optimal_blend(2)?, vec![(-240, 97), (120, 76), (120, 7)]),
        ],
        3 => vec![
            (g(4), vec![(-672, 272), (126, 297), (504, 60), (42, 1)]),
            (gl(4), vec![(-1440, 583), (270, 636), (1080, 129), (90, 2)]),
            (g(3), vec![(-1920, 777), (360, 849), (1440, 171), (120, 3)]),
        ],
        _ => {
            return Err(Error::InvalidParameter(format!(
                "closed forms are published for p = 2, 3 only, got {p}"
            )))
        }
    })
}

/// Outcome of one closed-form comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormReport {
    pub rule: String,
    pub computed: Vec<(BigRational, BigRational)>,
    pub published: Vec<(i64, i64)>,
    /// `computed = scale * published`.
    pub scale: BigRational,
}

fn format_relation<A: std::fmt::Display, B: std::fmt::Display>(rel: &[(A, B)]) -> String {
    rel.iter()
        .enumerate()
        .rev()
        .map(|(i, (a, b))| format!("({a} + {b} L^2) c^{i}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Checks every published relation for degree p against the stencil.
pub fn verify_closed_forms(p: usize) -> Result<Vec<ClosedFormReport>> {
    let mut out = Vec::new();
    for (rule, published) in published_closed_forms(p)? {
        let computed = cos_relation(&stencil_of(p, &rule)?);
        let lead = rat(published[p].0, 1);
        let scale = &computed[p].0 / &lead;
        let matches = computed.len() == published.len()
            && !scale.is_zero()
            && computed.iter().zip(&published).all(|((a, b), (pa, pb))| {
                *a == &scale * rat(*pa, 1) && *b == &scale * rat(*pb, 1)
            });
        if !matches {
            let shown: Vec<(String, String)> = computed
                .iter()
                .map(|(a, b)| (format_rational(a), format_rational(b)))
                .collect();
            return Err(Error::ClosedFormMismatch {
                rule: rule.label(),
                computed: format_relation(&shown),
                published: format_relation(&published),
            });
        }
        out.push(ClosedFormReport {
            rule: rule.label(),
            computed,
            published,
            scale,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symbol(p: usize, rule: &QuadratureSpec) -> SymbolFunctions {
        SymbolFunctions::new(&stencil_of(p, rule).unwrap())
    }

    #[test]
    fn symbol_values_at_zero() {
        let s = symbol(3, &optimal_blend(3).unwrap());
        assert_eq!(s.stiffness(0.0), 0.0);
        assert_eq!(s.mass(0.0), 1.0);
    }

    #[test]
    fn quadratic_gauss_spectrum_closed_form() {
        let s = symbol(2, &QuadratureSpec::gauss(3));
        for theta in [0.1, 0.5, 1.0, 2.0] {
            let c: f64 = f64::cos(theta);
            let closed = ((40.0 - 20.0 * c - 20.0 * c * c) / (16.0 + 13.0 * c + c * c)).sqrt();
            assert!((spectrum_curve(&s, theta).unwrap() - closed).abs() < 1e-14);
        }
        // leading term only; the Λ^7 term is about 1.2e-6 here
        let v = spectrum_curve(&s, 0.5).unwrap();
        assert!((v - (0.5 + 0.5f64.powi(5) / 1440.0)).abs() < 2e-6, "{v}");
    }

    fn eval_series(series: &crate::series::RationalSeries, x: f64) -> f64 {
        series
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_f64() * x.powi(k as i32))
            .sum()
    }

    #[test]
    fn curves_agree_with_long_series() {
        let sym = stencil_of(2, &QuadratureSpec::gauss(3)).unwrap();
        let s = SymbolFunctions::new(&sym);
        let spec = crate::series::expand_spectrum(&sym, 25).unwrap();
        let disp = crate::series::expand_dispersion(&sym, 25).unwrap();
        let x = 0.5;
        assert!((spectrum_curve(&s, x).unwrap() - eval_series(&spec, x)).abs() < 1e-12);
        assert!((dispersion_curve(&s, x).unwrap() - eval_series(&disp, x)).abs() < 1e-12);
    }

    #[test]
    fn quadratic_gauss_dispersion_value() {
        let s = symbol(2, &QuadratureSpec::gauss(3));
        let mu = dispersion_curve(&s, 0.5).unwrap();
        assert!((mu - (0.5 - 0.5f64.powi(5) / 1440.0)).abs() < 2e-6, "{mu}");
        let residual = s.stiffness(mu) - 0.25 * s.mass(mu);
        assert!(residual.abs() <= 1e-14);
    }

    #[test]
    fn round_trip() {
        for p in 1..=7 {
            let s = symbol(p, &optimal_blend(p).unwrap());
            for theta in [0.1, 0.5, 1.0] {
                let l = spectrum_curve(&s, theta).unwrap();
                let back = dispersion_curve(&s, l).unwrap();
                assert!((back - theta).abs() < 1e-12, "p={p} theta={theta}: {back}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let s = symbol(2, &QuadratureSpec::gauss(3));
        assert!(spectrum_curve(&s, 0.0).is_err());
        assert!(spectrum_curve(&s, 4.0).is_err());
        assert!(dispersion_curve(&s, -1.0).is_err());
        // beyond the top of the acoustic branch there is no real root
        assert!(matches!(dispersion_curve(&s, 10.0), Err(Error::OutOfBand { .. })));
    }

    #[test]
    fn closed_forms_match() {
        assert_eq!(verify_closed_forms(2).unwrap().len(), 4);
        assert_eq!(verify_closed_forms(3).unwrap().len(), 3);
        assert!(verify_closed_forms(4).is_err());
    }

    #[test]
    fn chebyshev_three() {
        assert_eq!(chebyshev(3), vec![rat(0, 1), rat(-3, 1), rat(0, 1), rat(4, 1)]);
    }
}
