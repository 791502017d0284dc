//! Convergence studies on the unit interval and square against the exact
//! spectra `λ_j = π² j²` and `λ_jk = π² (j² + k²)`, with least-squares order
//! fits and CSV output.

use std::io::Write;

use twofloat::TwoFloat;

use crate::assembly::{assemble_exact, assemble_tensor, AssemblyOptions};
use crate::eigensolve::{refine_pair, refined_tensor_eigenvalue, solve_gevp, solve_tensor};
use crate::error::{Error, Result};
use crate::estimator::{
    discrete_mode, effectivity_study, exact_eigenfunction, exact_eigenvalue_dd, FunctionSampler,
};
use crate::quadrature::QuadratureSpec;
use crate::scalar::{dd_div, Scalar};
use crate::splines::SplineSpace;

pub const DEFAULT_NS_1D: [usize; 5] = [20, 40, 80, 160, 320];
pub const DEFAULT_NS_2D: [usize; 5] = [4, 8, 16, 32, 64];

/// Exact CSV header of study output.
pub const CSV_HEADER: &str = "study,p,rule,dim,mode,N,h,value,error,order_hint";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    Ev,
    EfH1,
    EfL2,
    Ei,
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::Ev => "ev",
            StudyKind::EfH1 => "ef_h1",
            StudyKind::EfL2 => "ef_l2",
            StudyKind::Ei => "ei",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorNorm {
    H1,
    L2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub h: f64,
    /// Discrete eigenvalue for EV/EF rows, effectivity index for EI rows.
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyResult {
    pub kind: StudyKind,
    pub p: usize,
    pub rule: String,
    pub dim: usize,
    /// 1-based mode index per axis.
    pub mode: Vec<usize>,
    /// Decreasing h.
    pub rows: Vec<StudyRow>,
    /// Fitted over all rows, or the three finest for p ≥ 4.
    pub order: Option<f64>,
}

impl StudyResult {
    fn new(kind: StudyKind, p: usize, rule: String, dim: usize, mode: Vec<usize>, mut rows: Vec<StudyRow>) -> Self {
        rows.sort_by(|a, b| b.h.total_cmp(&a.h));
        let mut out = StudyResult {
            kind,
            p,
            rule,
            dim,
            mode,
            rows,
            order: None,
        };
        out.order = if p >= 4 {
            out.order_over_finest(3)
        } else {
            fit_order(&out.points()).ok()
        };
        out
    }

    /// (h, error) pairs with positive error.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.error > 0.0)
            .map(|r| (r.h, r.error))
            .collect()
    }

    pub fn order_over_finest(&self, k: usize) -> Option<f64> {
        let pts = self.points();
        fit_order(&pts[pts.len().saturating_sub(k)..]).ok()
    }

    /// Local order against the previous row; None for the first.
    pub fn order_hints(&self) -> Vec<Option<f64>> {
        let mut out = vec![None; self.rows.len()];
        for i in 1..self.rows.len() {
            let (a, b) = (&self.rows[i - 1], &self.rows[i]);
            if a.error > 0.0 && b.error > 0.0 {
                out[i] = Some((a.error / b.error).ln() / (a.h / b.h).ln());
            }
        }
        out
    }

    pub fn mode_label(&self) -> String {
        self.mode.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }

    /// Writes rows under [`CSV_HEADER`]; pass `header = false` to append.
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let io = |e: csv::Error| Error::InvalidParameter(format!("cannot write CSV: {e}"));
        if header {
            w.write_record(CSV_HEADER.split(',')).map_err(io)?;
        }
        for (row, hint) in self.rows.iter().zip(self.order_hints()) {
            w.write_record([
                self.kind.name().to_string(),
                self.p.to_string(),
                self.rule.clone(),
                self.dim.to_string(),
                self.mode_label(),
                row.n.to_string(),
                format_e17(row.h),
                format_e17(row.value),
                format_e17(row.error),
                hint.map(format_e17).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(format!("cannot write CSV: {e}")))?;
        Ok(())
    }
}

/// C-style `%.17e`: 17 fractional digits, signed exponent of at least two digits.
pub fn format_e17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.17e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Least-squares slope of log(error) against log(h).
pub fn fit_order(rows: &[(f64, f64)]) -> Result<f64> {
    if rows.len() < 3 {
        return Err(Error::TooFewRows(rows.len()));
    }
    if rows.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
        return Err(Error::InvalidParameter("order fit needs positive h and error".into()));
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("order fit needs distinct h".into()));
    }
    Ok(sxy / sxx)
}

fn check_mode(mode: &[usize], dim: usize) -> Result<()> {
    if mode.len() != dim || mode.iter().any(|&j| j == 0) {
        return Err(Error::InvalidParameter(format!(
            "mode needs {dim} positive indices, got {mode:?}"
        )));
    }
    Ok(())
}

fn relative_error(lambda_h: TwoFloat, lambda: TwoFloat) -> f64 {
    dd_div(lambda_h - lambda, lambda).to_f64().abs()
}

/// Position of exact mode (j, k) in the ascending 2D spectrum: pairs with a
/// smaller sum, then lexicographic order among equal sums.
pub fn sorted_position_2d(j: usize, k: usize) -> usize {
    let s = j * j + k * k;
    // any index of a pair with sum at most s is at most sqrt(s)
    let top = (1..).take_while(|a| a * a <= s).last().unwrap_or(1);
    let mut pos = 0;
    for a in 1..=top {
        for b in 1..=top {
            let t = a * a + b * b;
            if t < s || (t == s && (a, b) < (j, k)) {
                pos += 1;
            }
        }
    }
    pos
}

/// Eigenvalue errors with separate stiffness and mass rules.
pub fn ev_error_study_with(
    p: usize,
    stiffness_rule: &QuadratureSpec,
    mass_rule: &QuadratureSpec,
    opts: AssemblyOptions,
    dim: usize,
    mode: &[usize],
    ns: &[usize],
) -> Result<StudyResult> {
    check_mode(mode, dim)?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let space = SplineSpace::new(p, n)?;
        let dofs = space.interior_dimension();
        if let Some(&j) = mode.iter().find(|&&j| j > dofs) {
            return Err(Error::UnresolvableMode { mode: j, dofs });
        }
        let (lambda_h, lambda) = match dim {
            1 => {
                let (k, m) = assemble_exact(&space, stiffness_rule, mass_rule, opts)?;
                let sol = solve_gevp(&k, &m)?;
                let pair = refine_pair(&k, &m, &sol, mode[0] - 1)?;
                (pair.eigenvalue, exact_eigenvalue_dd(mode[0]))
            }
            2 => {
                if !opts.dirichlet || opts.allow_under_integrated_stiffness {
                    return Err(Error::InvalidParameter(
                        "2D studies use the default assembly options".into(),
                    ));
                }
                let op = assemble_tensor::<num_rational::BigRational>(
                    &[space.clone(), space.clone()],
                    stiffness_rule,
                    mass_rule,
                )?;
                let sol = solve_tensor(&op)?;
                let pos = sorted_position_2d(mode[0], mode[1]);
                if pos >= sol.modes.len() {
                    return Err(Error::UnresolvableMode { mode: pos + 1, dofs: sol.modes.len() });
                }
                let lh = refined_tensor_eigenvalue(&op, &sol, pos)?;
                let l = exact_eigenvalue_dd(mode[0]) + exact_eigenvalue_dd(mode[1]);
                (lh, l)
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "studies run in 1 or 2 dimensions, got {dim}"
                )))
            }
        };
        rows.push(StudyRow {
            n,
            h: 1.0 / n as f64,
            value: lambda_h.to_f64(),
            error: relative_error(lambda_h, lambda),
        });
    }
    let label = if stiffness_rule == mass_rule {
        stiffness_rule.label()
    } else {
        format!("{}/{}", stiffness_rule.label(), mass_rule.label())
    };
    Ok(StudyResult::new(StudyKind::Ev, p, label, dim, mode.to_vec(), rows))
}

/// Relative eigenvalue error `|λ_h - λ| / λ` over meshes.
pub fn ev_error_study(
    p: usize,
    rule: &QuadratureSpec,
    dim: usize,
    mode: &[usize],
    ns: &[usize],
) -> Result<StudyResult> {
    ev_error_study_with(p, rule, rule, AssemblyOptions::default(), dim, mode, ns)
}

/// Eigenfunction error in the H¹ seminorm or L² norm; the discrete function
/// has unit L² norm and positive overlap with `sqrt(2) sin(jπx)`.
pub fn ef_error_study(
    p: usize,
    rule: &QuadratureSpec,
    dim: usize,
    mode: &[usize],
    ns: &[usize],
    norm: ErrorNorm,
) -> Result<StudyResult> {
    if dim != 1 {
        return Err(Error::InvalidParameter(format!(
            "eigenfunction studies are one-dimensional, got dim {dim}"
        )));
    }
    check_mode(mode, 1)?;
    let j = mode[0];
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let space = SplineSpace::new(p, n)?;
        let (k, m) = assemble_exact(&space, rule, rule, AssemblyOptions::default())?;
        let sol = solve_gevp(&k, &m)?;
        let sampler = FunctionSampler::new(&space)?;
        let pair = discrete_mode(&space, &k, &m, &sol, &sampler, j)?;
        let mut u = pair.eigenvector_f64();
        let scale = sampler.l2_norm_sq(&u)?.sqrt();
        u.iter_mut().for_each(|x| *x /= scale);
        let (l2, h1) = sampler.errors(&u, |x| exact_eigenfunction(j, x))?;
        rows.push(StudyRow {
            n,
            h: 1.0 / n as f64,
            value: pair.eigenvalue.to_f64(),
            error: match norm {
                ErrorNorm::H1 => h1,
                ErrorNorm::L2 => l2,
            },
        });
    }
    let kind = match norm {
        ErrorNorm::H1 => StudyKind::EfH1,
        ErrorNorm::L2 => StudyKind::EfL2,
    };
    Ok(StudyResult::new(kind, p, rule.label(), 1, vec![j], rows))
}

/// Effectivity index per mesh; the error column is `|EI - 1|`. Meshes where
/// EI is undefined are dropped.
pub fn ei_study(p: usize, rule: &QuadratureSpec, mode: usize, ns: &[usize]) -> Result<StudyResult> {
    let study = effectivity_study(p, rule, &[mode], ns)?;
    let rows = study
        .reports
        .iter()
        .filter_map(|r| {
            r.ei.map(|ei| StudyRow {
                n: r.elements,
                h: r.h,
                value: ei,
                error: (ei - 1.0).abs(),
            })
        })
        .collect();
    Ok(StudyResult::new(StudyKind::Ei, p, rule.label(), 1, vec![mode], rows))
}

/// Eigenvalue study with an under-integrated stiffness rule. Runs only when
/// `unsafe_rule` is set.
pub fn degradation_probe(
    p: usize,
    stiffness_rule: &QuadratureSpec,
    mass_rule: &QuadratureSpec,
    mode: usize,
    ns: &[usize],
    unsafe_rule: bool,
) -> Result<StudyResult> {
    if !unsafe_rule {
        return Err(Error::InvalidParameter(
            "the degradation probe under-integrates stiffness; pass the unsafe-rule flag".into(),
        ));
    }
    let opts = AssemblyOptions {
        dirichlet: true,
        allow_under_integrated_stiffness: true,
    };
    ev_error_study_with(p, stiffness_rule, mass_rule, opts, 1, &[mode], ns)
}
