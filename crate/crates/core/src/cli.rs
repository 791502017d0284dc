//! Command line front end. Every subcommand writes CSV (or rational text) to
//! stdout or `--out`; failures map to exit codes through [`Error::exit_code`].

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use crate::assembly::{assemble_1d, assemble_tensor};
use crate::dispersion::{dispersion_curve, spectrum_curve, verify_closed_forms, SymbolFunctions};
use crate::eigensolve::{solve_gevp, solve_tensor};
use crate::error::{Error, Result};
use crate::estimator::estimate_modes;
use crate::harness::{
    degradation_probe, ef_error_study, ei_study, ev_error_study, format_e17, ErrorNorm,
    StudyResult, DEFAULT_NS_1D, DEFAULT_NS_2D,
};
use crate::quadrature::QuadratureSpec;
use crate::scalar::format_rational;
use crate::series::{default_order, expand_dispersion, expand_spectrum, published_dispersion, stencil_of};
use crate::splines::SplineSpace;

#[derive(Parser, Debug)]
#[command(name = "iga-blend", version, about = "Isogeometric Laplace eigenvalues with blended quadratures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact dispersion or spectrum series of the interior stencil.
    Series(SeriesArgs),
    /// Discrete eigenvalues on one mesh.
    Eigen(EigenArgs),
    /// Convergence study.
    Study(StudyArgs),
    /// Sampled dispersion and spectrum curves.
    DispersionCurve(CurveArgs),
    /// Estimator R, energy error and effectivity index.
    Estimate(EstimateArgs),
    /// Interior stencil bands.
    Stencil(StencilArgs),
    /// Eigenvalue study with an under-integrated stiffness rule.
    DegradationProbe(ProbeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    Dispersion,
    Spectrum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StudyName {
    Ev,
    Ef,
    Ei,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormName {
    H1,
    L2,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Spline degree, 1..7.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// g+1, gl+1, g+0, opt, gN, glN or blend:TAU:R1:R2.
    #[arg(long, default_value = "opt")]
    pub rule: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = SeriesKind::Dispersion)]
    pub kind: SeriesKind,
    /// Highest power kept; defaults to 2p + 5.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Rational)]
    pub format: Format,
    /// Compare against the published coefficients (exit 4 on mismatch).
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct EigenArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Elements per axis.
    #[arg(long, default_value_t = 20)]
    pub elements: usize,
    /// Number of eigenvalues printed.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    #[arg(value_enum)]
    pub study: StudyName,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Comma-separated element counts; defaults depend on dim.
    #[arg(long, value_delimiter = ',')]
    pub elements: Option<Vec<usize>>,
    /// Mode index, `j` or `j,k`.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub mode: Vec<usize>,
    #[arg(long, value_enum, default_value_t = NormName::H1)]
    pub norm: NormName,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of samples in (0, max].
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    #[arg(long = "max-lambda", default_value_t = 1.0)]
    pub max_lambda: f64,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    pub elements: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,4")]
    pub mode: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct StencilArgs {
    #[command(flatten)]
    pub common: Common,
    /// Print the stiffness and mass bands.
    #[arg(long)]
    pub dump: bool,
    #[arg(long, value_enum, default_value_t = Format::Rational)]
    pub format: Format,
    /// Check the published closed-form relations for this degree (exit 4 on mismatch).
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long = "stiffness-rule", default_value = "gl2")]
    pub stiffness_rule: String,
    #[arg(long = "mass-rule", default_value = "g3")]
    pub mass_rule: String,
    #[arg(long, default_value_t = 3)]
    pub mode: usize,
    #[arg(long, value_delimiter = ',')]
    pub elements: Option<Vec<usize>>,
    /// Required: acknowledges that the stiffness is under-integrated.
    #[arg(long = "unsafe-rule")]
    pub unsafe_rule: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn io_err(e: io::Error) -> Error {
    Error::InvalidParameter(format!("cannot write output: {e}"))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(io_err)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn check_degree(p: usize) -> Result<()> {
    if (1..=crate::splines::MAX_DEGREE).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("degree {p} outside 1..7")))
    }
}

fn rule_of(common: &Common) -> Result<QuadratureSpec> {
    check_degree(common.p)?;
    QuadratureSpec::parse(&common.rule, common.p)
}

fn split(q: &BigRational) -> (String, String) {
    (q.numer().to_string(), q.denom().to_string())
}

fn series(args: &SeriesArgs) -> Result<()> {
    let p = args.common.p;
    let rule = rule_of(&args.common)?;
    let order = args.order.unwrap_or_else(|| default_order(p));
    let sym = stencil_of(p, &rule)?;
    let s = match args.kind {
        SeriesKind::Dispersion => expand_dispersion(&sym, order)?,
        SeriesKind::Spectrum => expand_spectrum(&sym, order)?,
    };
    let mut w = sink(&args.common.out)?;
    match args.format {
        Format::Csv => writeln!(w, "power,numerator,denominator").map_err(io_err)?,
        Format::Rational => writeln!(w, "# {} p={p} rule={}", kind_name(args.kind), rule.label()).map_err(io_err)?,
    }
    for (k, c) in s.coeffs().iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        match args.format {
            Format::Csv => {
                let (n, d) = split(c);
                writeln!(w, "{k},{n},{d}").map_err(io_err)?;
            }
            Format::Rational => writeln!(w, "{k} {}", format_rational(c)).map_err(io_err)?,
        }
    }
    w.flush().map_err(io_err)?;
    if args.verify {
        if args.kind != SeriesKind::Dispersion {
            return Err(Error::InvalidParameter("--verify applies to the dispersion series".into()));
        }
        let published = published_dispersion(p)?;
        let (_, terms) = published
            .iter()
            .find(|(r, _)| stencil_of(p, r).ok().as_ref() == Some(&sym))
            .ok_or_else(|| Error::InvalidParameter(format!("no published series for {}", rule.label())))?;
        for (k, c) in terms {
            if *k > order || s.coeff(*k) != *c {
                return Err(Error::ClosedFormMismatch {
                    rule: rule.label(),
                    computed: format!("Λ^{k}: {}", format_rational(&s.coeff(*k))),
                    published: format!("Λ^{k}: {}", format_rational(c)),
                });
            }
        }
    }
    Ok(())
}

fn kind_name(k: SeriesKind) -> &'static str {
    match k {
        SeriesKind::Dispersion => "dispersion",
        SeriesKind::Spectrum => "spectrum",
    }
}

fn eigen(args: &EigenArgs) -> Result<()> {
    let rule = rule_of(&args.common)?;
    let space = SplineSpace::new(args.common.p, args.elements)?;
    let values = match args.dim {
        1 => {
            let (k, m) = assemble_1d::<f64>(&space, &rule, &rule)?;
            solve_gevp(&k, &m)?.eigenvalues
        }
        2 | 3 => {
            let spaces = vec![space; args.dim];
            let op = assemble_tensor::<f64>(&spaces, &rule, &rule)?;
            solve_tensor(&op)?.eigenvalues()
        }
        d => return Err(Error::InvalidParameter(format!("dimension {d} outside 1..3"))),
    };
    let mut w = sink(&args.common.out)?;
    writeln!(w, "index,eigenvalue").map_err(io_err)?;
    for (i, l) in values.iter().take(args.count).enumerate() {
        writeln!(w, "{},{}", i + 1, format_e17(*l)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn study(args: &StudyArgs) -> Result<()> {
    let rule = rule_of(&args.common)?;
    let p = args.common.p;
    let ns = args.elements.clone().unwrap_or_else(|| {
        if args.dim == 2 {
            DEFAULT_NS_2D.to_vec()
        } else {
            DEFAULT_NS_1D.to_vec()
        }
    });
    let result: StudyResult = match args.study {
        StudyName::Ev => ev_error_study(p, &rule, args.dim, &args.mode, &ns)?,
        StudyName::Ef => {
            let norm = match args.norm {
                NormName::H1 => ErrorNorm::H1,
                NormName::L2 => ErrorNorm::L2,
            };
            ef_error_study(p, &rule, args.dim, &args.mode, &ns, norm)?
        }
        StudyName::Ei => {
            if args.dim != 1 || args.mode.len() != 1 {
                return Err(Error::InvalidParameter("ei studies take one 1D mode".into()));
            }
            ei_study(p, &rule, args.mode[0], &ns)?
        }
    };
    result.write_csv(sink(&args.common.out)?, true)
}

fn curve(args: &CurveArgs) -> Result<()> {
    let rule = rule_of(&args.common)?;
    if args.points == 0 || !(args.max_lambda > 0.0) {
        return Err(Error::InvalidParameter("need points > 0 and max-lambda > 0".into()));
    }
    let sym = SymbolFunctions::new(&stencil_of(args.common.p, &rule)?);
    let mut w = sink(&args.common.out)?;
    writeln!(w, "Lambda,mu_h,spectrum_value,error_mu,error_spectrum").map_err(io_err)?;
    for i in 1..=args.points {
        let l = args.max_lambda * i as f64 / args.points as f64;
        let mu = dispersion_curve(&sym, l)?;
        let sp = spectrum_curve(&sym, l)?;
        writeln!(
            w,
            "{},{},{},{},{}",
            format_e17(l),
            format_e17(mu),
            format_e17(sp),
            format_e17(mu - l),
            format_e17(sp - l)
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn estimate(args: &EstimateArgs) -> Result<()> {
    let rule = rule_of(&args.common)?;
    let p = args.common.p;
    let mut w = sink(&args.common.out)?;
    writeln!(w, "p,rule,N,mode,lambda_h,R,energy_error,EI").map_err(io_err)?;
    for &n in &args.elements {
        for r in estimate_modes(&SplineSpace::new(p, n)?, &rule, &args.mode)? {
            writeln!(
                w,
                "{p},{},{n},{},{},{},{},{}",
                rule.label(),
                r.mode,
                format_e17(r.lambda_h),
                format_e17(r.r),
                format_e17(r.energy_error),
                r.ei.map(format_e17).unwrap_or_default()
            )
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

fn stencil(args: &StencilArgs) -> Result<()> {
    let rule = rule_of(&args.common)?;
    let p = args.common.p;
    if args.verify {
        verify_closed_forms(p)?;
    }
    if !args.dump && args.verify {
        return Ok(());
    }
    let sym = stencil_of(p, &rule)?;
    let mut w = sink(&args.common.out)?;
    if args.format == Format::Csv {
        writeln!(w, "band,k,numerator,denominator").map_err(io_err)?;
    }
    for (name, band) in [("stiffness", &sym.stiffness), ("mass", &sym.mass)] {
        for (k, c) in band.iter().enumerate() {
            match args.format {
                Format::Csv => {
                    let (n, d) = split(c);
                    writeln!(w, "{name},{k},{n},{d}").map_err(io_err)?;
                }
                Format::Rational => writeln!(w, "{name}[{k}] = {}", format_rational(c)).map_err(io_err)?,
            }
        }
    }
    w.flush().map_err(io_err)
}

fn probe(args: &ProbeArgs) -> Result<()> {
    check_degree(args.p)?;
    let ks = QuadratureSpec::parse(&args.stiffness_rule, args.p)?;
    let ms = QuadratureSpec::parse(&args.mass_rule, args.p)?;
    let ns = args.elements.clone().unwrap_or_else(|| DEFAULT_NS_1D.to_vec());
    let result = degradation_probe(args.p, &ks, &ms, args.mode, &ns, args.unsafe_rule)?;
    result.write_csv(sink(&args.out)?, true)
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Series(a) => series(a),
        Command::Eigen(a) => eigen(a),
        Command::Study(a) => study(a),
        Command::DispersionCurve(a) => curve(a),
        Command::Estimate(a) => estimate(a),
        Command::Stencil(a) => stencil(a),
        Command::DegradationProbe(a) => probe(a),
    }
}
