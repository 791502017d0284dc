//! A posteriori eigenvalue estimator `R = sqrt(|a(u,u) - λ_h b(u,u)|)` with
//! exactly integrated forms, its effectivity against the true energy error,
//! and pointwise error norms against the exact eigenfunctions of the unit
//! interval.

use twofloat::TwoFloat;

use crate::assembly::{assemble_1d, assemble_exact, AssemblyOptions, BandedSymMatrix};
use crate::eigensolve::{refine_pair, solve_gevp, EigenSolution, RefinedPair};
use crate::error::{Error, Result};
use crate::harness::fit_order;
use crate::quadrature::{gauss_legendre_nodes, QuadratureSpec};
use crate::scalar::Scalar;
use crate::splines::SplineSpace;

/// Points per element used for error integrals.
pub const ERROR_RULE_POINTS: usize = 10;

/// Energy errors below this are treated as numerically zero.
pub const RELIABLE_ENERGY_ERROR: f64 = 1e-13;

/// Relative size below which `a(u,u) - λ b(u,u)` counts as zero.
pub const RESIDUAL_NOISE: f64 = 1e-28;

/// Exact eigenvalue `(jπ)²` of mode j on the unit interval.
pub fn exact_eigenvalue(j: usize) -> f64 {
    let w = j as f64 * std::f64::consts::PI;
    w * w
}

/// Exact eigenvalue in double-double.
pub fn exact_eigenvalue_dd(j: usize) -> TwoFloat {
    let w = twofloat::consts::PI * j as f64;
    w * w
}

/// `sqrt(2) sin(jπx)` and its derivative.
pub fn exact_eigenfunction(j: usize, x: f64) -> (f64, f64) {
    let w = j as f64 * std::f64::consts::PI;
    let r = std::f64::consts::SQRT_2;
    (r * (w * x).sin(), r * w * (w * x).cos())
}

struct Sample {
    x: f64,
    weight: f64,
    /// (reduced index, value, derivative)
    basis: Vec<(usize, f64, f64)>,
}

/// Tabulated Dirichlet-reduced basis at a 10-point Gauss rule per element.
pub struct FunctionSampler {
    samples: Vec<Sample>,
    dofs: usize,
}

impl FunctionSampler {
    pub fn new(space: &SplineSpace) -> Result<Self> {
        let (nodes, weights) = gauss_legendre_nodes(ERROR_RULE_POINTS);
        let n = space.elements();
        let h = 1.0 / n as f64;
        let last = space.dimension() - 1;
        let mut samples = Vec::with_capacity(n * ERROR_RULE_POINTS);
        for e in 0..n {
            for (t, w) in nodes.iter().zip(&weights) {
                let x = h * (e as f64 + 0.5 * (1.0 + t));
                let basis = space
                    .eval_basis(&x)?
                    .into_iter()
                    .filter(|b| b.index != 0 && b.index != last)
                    .map(|b| (b.index - 1, b.value, b.derivative))
                    .collect();
                samples.push(Sample {
                    x,
                    weight: 0.5 * h * w,
                    basis,
                });
            }
        }
        Ok(FunctionSampler {
            samples,
            dofs: space.interior_dimension(),
        })
    }

    fn eval(&self, s: &Sample, c: &[f64]) -> (f64, f64) {
        s.basis
            .iter()
            .fold((0.0, 0.0), |(v, d), &(i, b, db)| (v + c[i] * b, d + c[i] * db))
    }

    fn check(&self, c: &[f64]) -> Result<()> {
        if c.len() == self.dofs {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "coefficient vector has length {}, space has {} dofs",
                c.len(),
                self.dofs
            )))
        }
    }

    /// `∫ f(x) u_h(x) dx`.
    pub fn inner(&self, c: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
        self.check(c)?;
        Ok(self
            .samples
            .iter()
            .map(|s| s.weight * f(s.x) * self.eval(s, c).0)
            .sum())
    }

    /// `‖u_h‖_0²`.
    pub fn l2_norm_sq(&self, c: &[f64]) -> Result<f64> {
        self.check(c)?;
        Ok(self
            .samples
            .iter()
            .map(|s| {
                let v = self.eval(s, c).0;
                s.weight * v * v
            })
            .sum())
    }

    /// `(‖u - u_h‖_0, |u - u_h|_1)` for u given with its derivative.
    pub fn errors(&self, c: &[f64], u: impl Fn(f64) -> (f64, f64)) -> Result<(f64, f64)> {
        self.check(c)?;
        let (mut l2, mut h1) = (0.0, 0.0);
        for s in &self.samples {
            let (v, d) = self.eval(s, c);
            let (ue, de) = u(s.x);
            l2 += s.weight * (ue - v) * (ue - v);
            h1 += s.weight * (de - d) * (de - d);
        }
        Ok((l2.sqrt(), h1.sqrt()))
    }
}

/// Exact-form stiffness and mass (G_{p+1} integrates spline products exactly).
pub fn exact_forms(space: &SplineSpace) -> Result<(BandedSymMatrix<TwoFloat>, BandedSymMatrix<TwoFloat>)> {
    let g = QuadratureSpec::gauss(space.degree() + 1);
    assemble_1d(space, &g, &g)
}

/// `R(λ_h, u_h)` with exactly integrated a and b; `u_h` should satisfy
/// `b_h(u_h, u_h) = 1`.
pub fn residual(space: &SplineSpace, lambda_h: TwoFloat, u_h: &[TwoFloat]) -> Result<f64> {
    let (k, m) = exact_forms(space)?;
    residual_with(&k, &m, lambda_h, u_h)
}

pub fn residual_with(
    k: &BandedSymMatrix<TwoFloat>,
    m: &BandedSymMatrix<TwoFloat>,
    lambda_h: TwoFloat,
    u_h: &[TwoFloat],
) -> Result<f64> {
    if u_h.len() != k.dim() {
        return Err(Error::InvalidParameter(format!(
            "vector length {} does not match dimension {}",
            u_h.len(),
            k.dim()
        )));
    }
    let a = k.bilinear(u_h, u_h);
    let b = lambda_h * m.bilinear(u_h, u_h);
    let r = (a - b).abs().to_f64();
    // below double-double rounding of the two terms the residual is noise
    if r <= RESIDUAL_NOISE * (a.abs().to_f64() + b.abs().to_f64()) {
        return Ok(0.0);
    }
    Ok(r.sqrt())
}

/// Estimator outcome for one (mode, mesh).
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub mode: usize,
    pub elements: usize,
    pub h: f64,
    pub lambda_h: f64,
    pub r: f64,
    pub energy_error: f64,
    /// `R / energy_error`; None when the energy error is numerically zero.
    pub ei: Option<f64>,
}

/// Discrete eigenpair j (1-based) with `b_h(u,u) = 1` and `b(u_j, u) > 0`.
pub fn discrete_mode(
    space: &SplineSpace,
    k: &BandedSymMatrix<num_rational::BigRational>,
    m: &BandedSymMatrix<num_rational::BigRational>,
    sol: &EigenSolution,
    sampler: &FunctionSampler,
    j: usize,
) -> Result<RefinedPair> {
    let dofs = space.interior_dimension();
    if j == 0 || j > dofs {
        return Err(Error::UnresolvableMode { mode: j, dofs });
    }
    let mut pair = refine_pair(k, m, sol, j - 1)?;
    let overlap = sampler.inner(&pair.eigenvector_f64(), |x| exact_eigenfunction(j, x).0)?;
    if overlap < 0.0 {
        pair.eigenvector.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(pair)
}

/// Estimator, energy error and effectivity for mode j.
pub fn estimate(space: &SplineSpace, rule: &QuadratureSpec, j: usize) -> Result<EstimatorReport> {
    Ok(estimate_modes(space, rule, &[j])?.remove(0))
}

/// As [`estimate`] for several modes sharing one solve.
pub fn estimate_modes(
    space: &SplineSpace,
    rule: &QuadratureSpec,
    modes: &[usize],
) -> Result<Vec<EstimatorReport>> {
    let dofs = space.interior_dimension();
    if let Some(&j) = modes.iter().find(|&&j| j == 0 || j > dofs) {
        return Err(Error::UnresolvableMode { mode: j, dofs });
    }
    let (k, m) = assemble_exact(space, rule, rule, AssemblyOptions::default())?;
    let sol = solve_gevp(&k, &m)?;
    let sampler = FunctionSampler::new(space)?;
    let (ke, me) = exact_forms(space)?;
    modes
        .iter()
        .map(|&j| {
            let pair = discrete_mode(space, &k, &m, &sol, &sampler, j)?;
            let r = residual_with(&ke, &me, pair.eigenvalue, &pair.eigenvector)?;
            let (_, energy_error) =
                sampler.errors(&pair.eigenvector_f64(), |x| exact_eigenfunction(j, x))?;
            let ei = (energy_error >= RELIABLE_ENERGY_ERROR && r > 0.0).then(|| r / energy_error);
            Ok(EstimatorReport {
                mode: j,
                elements: space.elements(),
                h: 1.0 / space.elements() as f64,
                lambda_h: pair.eigenvalue.to_f64(),
                r,
                energy_error,
                ei,
            })
        })
        .collect()
}

/// Reports over meshes and modes plus the fitted order of `|EI - 1|` per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectivityStudy {
    pub reports: Vec<EstimatorReport>,
    pub orders: Vec<(usize, Option<f64>)>,
}

pub fn effectivity_study(
    p: usize,
    rule: &QuadratureSpec,
    modes: &[usize],
    ns: &[usize],
) -> Result<EffectivityStudy> {
    let mut reports = Vec::new();
    for &n in ns {
        reports.extend(estimate_modes(&SplineSpace::new(p, n)?, rule, modes)?);
    }
    let orders = modes
        .iter()
        .map(|&j| {
            let rows: Vec<(f64, f64)> = reports
                .iter()
                .filter(|r| r.mode == j)
                .filter_map(|r| r.ei.map(|ei| (r.h, (ei - 1.0).abs())))
                .filter(|&(_, d)| d > 0.0)
                .collect();
            (j, fit_order(&rows).ok())
        })
        .collect();
    Ok(EffectivityStudy { reports, orders })
}

/// Both sides of the generalized Pythagorean identity
/// `|u - u_h|_E² = λ_h - λ + λ‖u - u_h‖_0² + (a - a_h)(u_h, u_h) + λ(1 - ‖u_h‖_0²)`
/// for mode j; returns (left, right).
pub fn pythagorean_sides(space: &SplineSpace, rule: &QuadratureSpec, j: usize) -> Result<(f64, f64)> {
    let (k, m) = assemble_exact(space, rule, rule, AssemblyOptions::default())?;
    let sol = solve_gevp(&k, &m)?;
    let sampler = FunctionSampler::new(space)?;
    let pair = discrete_mode(space, &k, &m, &sol, &sampler, j)?;
    let u = &pair.eigenvector;
    let (ke, me) = exact_forms(space)?;
    let kh = k.map(Scalar::to_two_float);
    let (l2, energy) = sampler.errors(&pair.eigenvector_f64(), |x| exact_eigenfunction(j, x))?;
    let lambda = exact_eigenvalue_dd(j);
    let right = pair.eigenvalue - lambda
        + lambda * (l2 * l2)
        + (ke.bilinear(u, u) - kh.bilinear(u, u))
        + lambda * (TwoFloat::from(1.0) - me.bilinear(u, u));
    Ok((energy * energy, right.to_f64()))
}
