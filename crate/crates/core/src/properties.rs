//! Randomized invariants of the basis, quadratures, assembly, series and
//! curves.

use proptest::prelude::*;

use crate::assembly::{assemble_1d, assemble_exact, assemble_tensor, AssemblyOptions};
use crate::dispersion::{dispersion_curve, spectrum_curve, SymbolFunctions};
use crate::estimator::estimate;
use crate::harness::{fit_order, format_e17, sorted_position_2d};
use crate::poly::Poly;
use crate::quadrature::{blend, exact_moment, optimal_blend, QuadratureSpec};
use crate::scalar::{dd_div, rat};
use crate::series::{stencil_of, RationalSeries};
use crate::splines::SplineSpace;
use crate::{DoubleDouble, Rational};

fn rule_for(p: usize, which: usize) -> QuadratureSpec {
    match which {
        0 => QuadratureSpec::gauss(p + 1),
        1 => QuadratureSpec::lobatto(p + 1),
        2 => QuadratureSpec::gauss(p),
        _ => optimal_blend(p).unwrap(),
    }
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_is_a_nonnegative_partition_of_unity(p in 1usize..=7, n in 2usize..=30, x in 0.0f64..=1.0) {
        let space = SplineSpace::new(p, n).unwrap();
        let b = space.eval_basis(&x).unwrap();
        prop_assert_eq!(b.len(), p + 1);
        prop_assert!(b.iter().all(|v| v.value >= -1e-15));
        let s: f64 = b.iter().map(|v| v.value).sum();
        let d: f64 = b.iter().map(|v| v.derivative).sum();
        prop_assert!((s - 1.0).abs() <= 1e-13);
        prop_assert!(d.abs() <= 1e-9 * n as f64);
    }

    #[test]
    fn rational_basis_sums_to_one_exactly(p in 1usize..=5, n in 2usize..=12, num in 0i64..=97) {
        let space = SplineSpace::new(p, n).unwrap();
        let x = rat(num, 97);
        let s = space.eval_basis(&x).unwrap().into_iter().fold(rat(0, 1), |acc, v| acc + v.value);
        prop_assert_eq!(s, rat(1, 1));
    }

    #[test]
    fn rules_integrate_up_to_their_exactness(
        which in 0usize..4,
        p in 1usize..=7,
        coeffs in prop::collection::vec(-9i64..=9, 1..=16),
    ) {
        let rule = rule_for(p, which);
        let deg = rule.exactness().unwrap();
        let c: Vec<Rational> = coeffs.iter().take(deg + 1).map(|&v| rat(v, 1)).collect();
        let poly = Poly::new(c.clone());
        let exact = c.iter().enumerate().fold(rat(0, 1), |acc, (k, ck)| acc + ck * exact_moment(k));
        prop_assert_eq!(rule.apply(&poly).unwrap(), exact);
    }

    #[test]
    fn exactness_is_sharp(which in 0usize..4, p in 1usize..=7) {
        let rule = rule_for(p, which);
        let deg = rule.exactness().unwrap();
        let m = rule.moments(deg + 1).unwrap();
        prop_assert_ne!(&m[deg + 1], &exact_moment(deg + 1));
    }

    #[test]
    fn moments_are_linear_in_the_blend(tau in small_rational(), a in 2usize..=6, b in 2usize..=6) {
        let q1 = QuadratureSpec::gauss(a);
        let q2 = QuadratureSpec::lobatto(b);
        let mixed = blend(&tau, &q1, &q2).moments(12).unwrap();
        let m1 = q1.moments(12).unwrap();
        let m2 = q2.moments(12).unwrap();
        for k in 0..=12 {
            prop_assert_eq!(&mixed[k], &(&tau * &m1[k] + (rat(1, 1) - &tau) * &m2[k]));
        }
    }

    #[test]
    fn mass_integrates_to_one_and_stiffness_kills_constants(p in 1usize..=7, n in 2usize..=12, which in 0usize..4) {
        let rule = rule_for(p, which);
        let space = SplineSpace::new(p, n).unwrap();
        let opts = AssemblyOptions { dirichlet: false, allow_under_integrated_stiffness: false };
        let (k, m) = assemble_exact(&space, &rule, &rule, opts).unwrap();
        prop_assert_eq!(m.total(), rat(1, 1));
        let ones = vec![rat(1, 1); k.dim()];
        prop_assert!(k.matvec(&ones).iter().all(num_traits::Zero::is_zero));
    }

    #[test]
    fn tensor_action_matches_kronecker_matrix(p in 1usize..=3, n in 2usize..=4, seed in prop::collection::vec(-1.0f64..1.0, 64)) {
        let space = SplineSpace::new(p, n).unwrap();
        let rule = QuadratureSpec::gauss(p + 1);
        let op = assemble_tensor::<f64>(&[space.clone(), space], &rule, &rule).unwrap();
        let dim = op.dimension();
        let x: Vec<f64> = (0..dim).map(|i| seed[i % seed.len()]).collect();
        let (k, m) = op.materialize().unwrap();
        let xv = nalgebra::DVector::from_column_slice(&x);
        let kx = &k * &xv;
        let mx = &m * &xv;
        for (a, b) in op.apply_stiffness(&x).iter().zip(kx.iter()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        for (a, b) in op.apply_mass(&x).iter().zip(mx.iter()) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn discrete_spectrum_lies_above_the_exact_one_for_exact_rules(p in 1usize..=4, n in 4usize..=16) {
        let space = SplineSpace::new(p, n).unwrap();
        let rule = QuadratureSpec::gauss(p + 1);
        let (k, m) = assemble_1d::<f64>(&space, &rule, &rule).unwrap();
        let sol = crate::eigensolve::solve_gevp(&k, &m).unwrap();
        for (j, l) in sol.eigenvalues.iter().take(3).enumerate() {
            let exact = ((j + 1) as f64 * std::f64::consts::PI).powi(2);
            prop_assert!(*l >= exact * (1.0 - 1e-12));
        }
    }

    #[test]
    fn curves_invert_each_other(p in 1usize..=7, which in 0usize..4, theta in 0.01f64..1.2) {
        let f = SymbolFunctions::new(&stencil_of(p, &rule_for(p, which)).unwrap());
        let lambda = spectrum_curve(&f, theta).unwrap();
        let back = dispersion_curve(&f, lambda).unwrap();
        prop_assert!((back - theta).abs() <= 1e-12);
    }

    #[test]
    fn reversion_is_an_involution(c in prop::collection::vec(small_rational(), 4)) {
        let mut coeffs = vec![rat(0, 1), rat(1, 1)];
        coeffs.extend(c);
        let s = RationalSeries::new(coeffs, 7);
        let r = s.reversion().unwrap();
        prop_assert_eq!(r.reversion().unwrap(), s.clone());
        prop_assert_eq!(s.compose(&r), RationalSeries::identity(7));
    }

    #[test]
    fn estimator_is_nonnegative(p in 1usize..=3, n in 4usize..=12, j in 1usize..=3, which in 1usize..4) {
        let space = SplineSpace::new(p, n).unwrap();
        let r = estimate(&space, &rule_for(p, which), j).unwrap();
        prop_assert!(r.r >= 0.0);
        if let Some(ei) = r.ei {
            prop_assert!(ei > 0.0);
        }
    }

    #[test]
    fn e17_round_trips(x in prop::num::f64::NORMAL) {
        let s = format_e17(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        let exp = s.split_once('e').unwrap().1;
        prop_assert!(exp.starts_with('+') || exp.starts_with('-'));
        prop_assert!(exp.len() >= 3);
    }

    #[test]
    fn order_fit_recovers_powers(k in 0.5f64..9.0, c in 1e-3f64..1e3) {
        let rows: Vec<(f64, f64)> = [0.2, 0.1, 0.05, 0.025].iter().map(|&h| (h, c * f64::powf(h, k))).collect();
        prop_assert!((fit_order(&rows).unwrap() - k).abs() <= 1e-9);
    }

    #[test]
    fn sorted_position_matches_a_sort(j in 1usize..=6, k in 1usize..=6) {
        let mut pairs: Vec<(usize, usize)> = (1..=12).flat_map(|a| (1..=12).map(move |b| (a, b))).collect();
        pairs.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
        prop_assert_eq!(pairs.iter().position(|&q| q == (j, k)).unwrap(), sorted_position_2d(j, k));
    }

    #[test]
    fn double_double_division_is_accurate(a in 1e-3f64..1e3, b in 1e-3f64..1e3, c in 1e-3f64..1e3) {
        let x = DoubleDouble::from(a) + DoubleDouble::from(c) * 1e-17;
        let y = DoubleDouble::from(b);
        let q = dd_div(x, y);
        let back = q * y - x;
        prop_assert!(back.hi().abs() <= 1e-30 * x.hi().abs());
    }
}
