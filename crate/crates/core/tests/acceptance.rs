//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails. Run with `--nocapture` to see the report.

use std::time::{Duration, Instant};

use iga_blend::assembly::{assemble_1d, assemble_tensor, stencil_for_degree, AssemblyOptions};
use iga_blend::dispersion::{dispersion_curve, spectrum_curve, verify_closed_forms, SymbolFunctions};
use iga_blend::eigensolve::{solve_dense, solve_gevp, solve_tensor};
use iga_blend::estimator::{effectivity_study, estimate, pythagorean_sides};
use iga_blend::harness::{ef_error_study, ev_error_study, ErrorNorm, DEFAULT_NS_1D, DEFAULT_NS_2D};
use iga_blend::mpoly::MPoly;
use iga_blend::quadrature::{
    blend, blend_form_coefficients, optimal_blend, published_gauss_only_tau, published_optimal_tau,
    three_rule_cubic_blends, QuadratureSpec,
};
use iga_blend::scalar::{format_rational, rat};
use iga_blend::series::{
    default_order, expand_dispersion, expand_spectrum, find_optimal_mass, find_optimal_tau,
    mass_only_stencil, published_dispersion, stencil_of, tau_stencil,
};
use iga_blend::splines::SplineSpace;
use iga_blend::Rational;

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn report(&self, n: usize, title: &str, elapsed: Duration) -> bool {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {n}: {status} {title} ({:.1} s)", elapsed.as_secs_f64());
        for f in &self.failures {
            println!("    failed: {f}");
        }
        for s in &self.notes {
            println!("    {s}");
        }
        self.failures.is_empty()
    }
}

fn g(n: usize) -> QuadratureSpec {
    QuadratureSpec::gauss(n)
}

fn gl(n: usize) -> QuadratureSpec {
    QuadratureSpec::lobatto(n)
}

fn four_rules(p: usize) -> Vec<QuadratureSpec> {
    vec![g(p + 1), gl(p + 1), g(p), optimal_blend(p).unwrap()]
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let mut checked = 0;
    for p in 2..=7 {
        for (rule, terms) in published_dispersion(p).unwrap() {
            let series = expand_dispersion(&stencil_of(p, &rule).unwrap(), default_order(p)).unwrap();
            // every power below the first published one must vanish
            let first = terms[0].0;
            out.check(
                (2..first).all(|k| num_traits::Zero::is_zero(&series.coeff(k))),
                format!("p={p} {}: lower-order terms present", rule.label()),
            );
            for (k, c) in &terms {
                checked += 1;
                let got = series.coeff(*k);
                out.check(
                    got == *c,
                    format!(
                        "p={p} {} Λ^{k}: computed {}, published {}",
                        rule.label(),
                        format_rational(&got),
                        format_rational(c)
                    ),
                );
            }
        }
    }
    let elapsed = start.elapsed();
    out.check(elapsed < Duration::from_secs(60), "runtime over one minute");
    out.note(format!(
        "{} of {checked} published coefficients reproduced exactly",
        checked - out.failures.len()
    ));
    if !out.failures.is_empty() {
        out.note("the failing cubic Λ^9 / O_3 Λ^11 values disagree with the published cubic closed-form relations themselves; see the decisions ledger");
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    out.check(find_optimal_tau(2, &g(3), &gl(3)).unwrap() == rat(1, 3), "τ(G3, GL3) = 1/3");
    out.check(find_optimal_tau(2, &gl(3), &g(2)).unwrap() == rat(4, 5), "τ(GL3, G2) = 4/5");
    out.check(find_optimal_tau(3, &gl(4), &g(3)).unwrap() == rat(13, 7), "τ(GL4, G3) = 13/7");
    for p in 2..=7 {
        let t_gl = find_optimal_tau(p, &g(p + 1), &gl(p + 1)).unwrap();
        let t_g = find_optimal_tau(p, &g(p + 1), &g(p)).unwrap();
        out.check(
            Some(t_gl.clone()) == published_optimal_tau(p),
            format!("p={p} τ(G, GL) = {}", format_rational(&t_gl)),
        );
        out.check(
            Some(t_g.clone()) == published_gauss_only_tau(p),
            format!("p={p} τ(G_(p+1), G_p) = {}", format_rational(&t_g)),
        );
        let c1 = Rational::from_integer(1.into()) - &t_gl;
        let c2 = &t_g - Rational::from_integer(1.into());
        let pr = rat(p as i64, 1);
        let p1 = rat(p as i64 + 1, 1);
        out.check(&pr * &c2 - &p1 * &c1 == rat(0, 1), format!("p={p} p C2 = (p+1) C1 (computed)"));
        let (pc1, pc2) = blend_form_coefficients(p).unwrap();
        out.check(&pr * &pc2 - &p1 * &pc1 == rat(0, 1), format!("p={p} p C2 = (p+1) C1 (published)"));
    }
    // mass-band unknowns: (β, α) multiply the first and second off-diagonals
    let mass = find_optimal_mass(2).unwrap();
    out.check(mass == vec![rat(19, 90), rat(7, 720)], "(α, β) = (7/720, 19/90)");
    // parametric G3/GL3 family
    let s = expand_dispersion(&tau_stencil(2, &g(3), &gl(3)).unwrap(), 7).unwrap();
    let tau = MPoly::var(0);
    let c5 = &MPoly::constant(rat(1, 2880)) - &tau.scale(&rat(3, 2880));
    let c7 = &MPoly::constant(rat(-5, 80640)) - &tau.scale(&rat(7, 80640));
    out.check(s.coeff(5) == c5 && s.coeff(7) == c7, "τ G3 + (1-τ) GL3 expansion through Λ^7");
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    match verify_closed_forms(2) {
        Ok(r) => out.check(r.len() == 4, "four quadratic relations"),
        Err(e) => out.check(false, e.to_string()),
    }
    match verify_closed_forms(3) {
        Ok(r) => out.check(r.len() == 3, "three cubic relations"),
        Err(e) => out.check(false, e.to_string()),
    }
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    for (p, modes, finest) in [(2, [3, 11], false), (3, [8, 20], true)] {
        for rule in four_rules(p) {
            let optimal = rule.label().starts_with('O');
            let (target, tol) = if optimal {
                (2.0 * p as f64 + 2.0, if p == 2 { 0.2 } else { 0.3 })
            } else {
                (2.0 * p as f64, if p == 2 { 0.1 } else { 0.2 })
            };
            for j in modes {
                let r = ev_error_study(p, &rule, 1, &[j], &DEFAULT_NS_1D).unwrap();
                let order = if finest { r.order_over_finest(3) } else { r.order }.unwrap_or(f64::NAN);
                out.check(
                    (order - target).abs() <= tol,
                    format!("p={p} {} mode {j}: order {order:.3}, expected {target} ± {tol}", rule.label()),
                );
                let tail = r.order_over_finest(3).unwrap_or(f64::NAN);
                out.note(format!("p={p} {} mode {j}: order {order:.3} (three finest {tail:.3})", rule.label()));
            }
        }
    }
    out.check(start.elapsed() < Duration::from_secs(300), "runtime over five minutes");
    if !out.failures.is_empty() {
        out.note("the failing fits are reproduced by the interior symbol to 4 digits on every mesh: high modes at N = 20 are pre-asymptotic; see the decisions ledger");
    }
    out
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let table: [(QuadratureSpec, [f64; 5]); 4] = [
        (optimal_blend(2).unwrap(), [8.007409e-02, 1.962886e-02, 4.882983e-03, 1.219233e-03, 3.047138e-04]),
        (g(3), [8.007620e-02, 1.962889e-02, 4.882983e-03, 1.219233e-03, 3.047138e-04]),
        (gl(3), [8.007355e-02, 1.962885e-02, 4.882983e-03, 1.219233e-03, 3.047138e-04]),
        (g(2), [8.007966e-02, 1.962894e-02, 4.882984e-03, 1.219233e-03, 3.047138e-04]),
    ];
    let mut worst: f64 = 0.0;
    for (rule, published) in &table {
        let r = ef_error_study(2, rule, 1, &[3], &DEFAULT_NS_1D, ErrorNorm::H1).unwrap();
        for (row, &want) in r.rows.iter().zip(published) {
            let e = rel(row.error, want);
            worst = worst.max(e);
            out.check(e <= 1e-3, format!("{} N={}: {:.6e} vs {want:.6e}", rule.label(), row.n, row.error));
        }
        let order = r.order.unwrap_or(f64::NAN);
        out.check((order - 2.01).abs() <= 0.05, format!("{} H1 order {order:.3}", rule.label()));
    }
    let l2 = ef_error_study(2, &optimal_blend(2).unwrap(), 1, &[3], &DEFAULT_NS_1D, ErrorNorm::L2).unwrap();
    let order = l2.order.unwrap_or(f64::NAN);
    out.check((order - 3.0).abs() <= 0.1, format!("L2 order {order:.3}"));
    out.note(format!("largest relative deviation from the table {worst:.2e}; L2 order {order:.3}"));
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    for p in [2, 3] {
        let rule = optimal_blend(p).unwrap();
        for n in [4, 8, 16] {
            let space = SplineSpace::new(p, n).unwrap();
            let op = assemble_tensor::<f64>(&[space.clone(), space], &rule, &rule).unwrap();
            let tensor = solve_tensor(&op).unwrap().eigenvalues();
            let (k, m) = op.materialize().unwrap();
            let dense = solve_dense(&k, &m).unwrap().eigenvalues;
            let worst = tensor.iter().zip(&dense).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
            out.check(
                tensor.len() == dense.len() && worst <= 1e-10,
                format!("p={p} N={n}: Kronecker vs dense relative gap {worst:.2e}"),
            );
        }
        let r2 = ev_error_study(p, &rule, 2, &[2, 2], &DEFAULT_NS_2D).unwrap();
        let order = r2.order.unwrap_or(f64::NAN);
        let target = 2.0 * p as f64 + 2.0;
        out.check((order - target).abs() <= 0.3, format!("p={p} (2,2) order {order:.3}"));
        out.note(format!("p={p} (2,2) order {order:.3}"));
        // (2,2): λ = 2 λ_2 and the discrete value is the sum of two axis values,
        // so the relative errors coincide
        let r1 = ev_error_study(p, &rule, 1, &[2], &DEFAULT_NS_2D).unwrap();
        for (a, b) in r2.rows.iter().zip(&r1.rows) {
            out.check(rel(a.error, b.error) <= 1e-12, format!("p={p} N={} additivity", a.n));
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let ns = [5, 10, 20, 40];
    // (p, [λ1 column], [λ4 column], orders)
    let table: [(usize, [f64; 4], [f64; 4], [f64; 2]); 3] = [
        (1, [1.00119, 1.00040, 1.00011, 1.00003], [0.88632, 1.00127, 1.00192, 1.00057], [1.83, 2.28]),
        (2, [0.96997, 0.99231, 0.99806, 0.99952], [0.67227, 0.89264, 0.97046, 0.99242], [1.96, 1.82]),
        (3, [0.92794, 0.97974, 0.99468, 1.00223], [0.64385, 0.75699, 0.92242, 0.97899], [1.7, 1.39]),
    ];
    let mut worst: f64 = 0.0;
    for (p, col1, col4, orders) in table {
        let study = effectivity_study(p, &optimal_blend(p).unwrap(), &[1, 4], &ns).unwrap();
        for (j, col, want_order) in [(1, col1, orders[0]), (4, col4, orders[1])] {
            for (&n, want) in ns.iter().zip(col) {
                let rep = study.reports.iter().find(|r| r.mode == j && r.elements == n).unwrap();
                let ei = rep.ei.unwrap_or(f64::NAN);
                worst = worst.max((ei - want).abs());
                out.check((ei - want).abs() <= 1e-2, format!("p={p} N={n} mode {j}: EI {ei:.5} vs {want}"));
            }
            let order = study.orders.iter().find(|o| o.0 == j).and_then(|o| o.1).unwrap_or(f64::NAN);
            out.check(
                (order - want_order).abs() <= 0.5,
                format!("p={p} mode {j}: |EI-1| order {order:.2} vs {want_order}"),
            );
            out.note(format!("p={p} mode {j}: |EI-1| order {order:.2} (table {want_order})"));
        }
    }
    for p in 1..=3 {
        let space = SplineSpace::new(p, 10).unwrap();
        for j in 1..=4 {
            let r = estimate(&space, &g(p + 1), j).unwrap();
            out.check(r.r <= 1e-12 && r.ei.is_none(), format!("p={p} mode {j}: exact-quadrature R = {:.2e}", r.r));
        }
    }
    out.note(format!("largest EI deviation {worst:.4}"));
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    // partition of unity
    for p in 1..=7 {
        let space = SplineSpace::new(p, 7).unwrap();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            let b = space.eval_basis(&x).unwrap();
            let s: f64 = b.iter().map(|v| v.value).sum();
            let d: f64 = b.iter().map(|v| v.derivative).sum();
            out.check((s - 1.0).abs() <= 1e-14 && d.abs() <= 1e-11, format!("partition of unity p={p} x={x}"));
        }
    }
    // exactness degrees
    for n in 1..=8 {
        out.check(g(n).exactness().unwrap() == 2 * n - 1, format!("G{n} exactness"));
        if n >= 2 {
            out.check(gl(n).exactness().unwrap() == 2 * n - 3, format!("GL{n} exactness"));
        }
    }
    // row sums and definiteness
    for p in 1..=7 {
        for rule in four_rules(p) {
            let sym = stencil_of(p, &rule).unwrap();
            out.check(
                sym.mass_row_sum() == rat(1, 1) && sym.stiffness_row_sum() == rat(0, 1),
                format!("p={p} {} stencil row sums", rule.label()),
            );
            let space = SplineSpace::new(p, 2 * p + 3).unwrap();
            let opts = AssemblyOptions {
                dirichlet: false,
                allow_under_integrated_stiffness: false,
            };
            let (_, m_full) = iga_blend::assembly::assemble_exact(&space, &rule, &rule, opts).unwrap();
            out.check(m_full.total() == rat(1, 1), format!("p={p} {} mass total", rule.label()));
            let (k, m) = assemble_1d::<f64>(&space, &rule, &rule).unwrap();
            match solve_gevp(&k, &m) {
                Ok(sol) => out.check(sol.eigenvalues[0] > 0.0, format!("p={p} {} K definite", rule.label())),
                Err(e) => out.check(false, format!("p={p} {}: {e}", rule.label())),
            }
        }
    }
    // generalized Pythagorean identity
    let space = SplineSpace::new(2, 10).unwrap();
    let o2 = optimal_blend(2).unwrap();
    let mut worst: f64 = 0.0;
    for j in 1..=5 {
        let (l, r) = pythagorean_sides(&space, &o2, j).unwrap();
        worst = worst.max((l - r).abs());
    }
    out.check(worst <= 1e-9, format!("Pythagorean identity residual {worst:.2e}"));
    out.note(format!("Pythagorean identity residual {worst:.2e}"));
    // duality sign and round trip
    for p in 1..=7 {
        for rule in four_rules(p) {
            let sym = stencil_of(p, &rule).unwrap();
            let d = expand_dispersion(&sym, default_order(p)).unwrap().leading_error();
            let s = expand_spectrum(&sym, default_order(p)).unwrap().leading_error();
            let ok = match (d, s) {
                (Some((kd, cd)), Some((ks, cs))) => kd == ks && cd == -cs,
                _ => false,
            };
            out.check(ok, format!("p={p} {} duality sign", rule.label()));
            let f = SymbolFunctions::new(&sym);
            for theta in [0.1, 0.5, 1.0] {
                let back = dispersion_curve(&f, spectrum_curve(&f, theta).unwrap()).unwrap();
                out.check((back - theta).abs() <= 1e-12, format!("p={p} {} round trip θ={theta}", rule.label()));
            }
        }
    }
    // weighted sums over the three quadratic optimal blends
    let o2_series = expand_dispersion(&stencil_of(2, &o2).unwrap(), 9).unwrap();
    let base = |q: &QuadratureSpec| expand_dispersion(&stencil_of(2, q).unwrap(), 9).unwrap();
    for (tau, a, b) in [(rat(1, 3), g(3), gl(3)), (rat(2, 1), g(3), g(2)), (rat(4, 5), gl(3), g(2))] {
        let (sa, sb) = (base(&a), base(&b));
        let weighted = |k| &tau * sa.coeff(k) + (rat(1, 1) - &tau) * sb.coeff(k);
        let blended = expand_dispersion(&stencil_of(2, &blend(&tau, &a, &b)).unwrap(), 9).unwrap();
        out.check(blended == o2_series, format!("{} {} {} same series as O_2", format_rational(&tau), a, b));
        out.check(weighted(7) == o2_series.coeff(7), format!("weighted Λ^7 sum for {a}/{b}"));
        out.check(weighted(9) != o2_series.coeff(9), format!("weighted Λ^9 sum for {a}/{b} unexpectedly equal"));
    }
    // three-rule cubic blends on the mass against O_3 through Λ^(2p+3)
    let o3 = optimal_blend(3).unwrap();
    let o3_series = expand_dispersion(&stencil_of(3, &o3).unwrap(), 9).unwrap();
    for b in three_rule_cubic_blends() {
        let s = expand_dispersion(&mass_only_stencil(3, &b).unwrap(), 9).unwrap();
        out.check(s == o3_series, format!("{} on the mass matches O_3", b.label()));
        let both = stencil_for_degree(3, &b, &b, AssemblyOptions::default());
        out.check(both.is_err(), format!("{} as stiffness rule should be refused", b.label()));
    }
    out
}

#[test]
fn acceptance() {
    type Criterion = fn() -> Outcome;
    let criteria: [(&str, Criterion); 8] = [
        ("exact dispersion coefficients", criterion_1),
        ("optimal blending parameters", criterion_2),
        ("closed-form dispersion relations", criterion_3),
        ("1D eigenvalue convergence slopes", criterion_4),
        ("eigenfunction error table", criterion_5),
        ("2D Kronecker spectrum", criterion_6),
        ("estimator effectivity table", criterion_7),
        ("property suite", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        if !outcome.report(i + 1, title, start.elapsed()) {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
