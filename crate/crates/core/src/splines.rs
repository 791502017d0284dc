//! Uniform open-knot B-spline spaces on [0, 1].
//!
//! Knots are exact rationals. Point evaluation is generic over [`Scalar`], and
//! the same Cox–de Boor recursion run on polynomials yields the element-local
//! representation used by exact assembly.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{rat, Scalar};

pub const MAX_DEGREE: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplineSpace {
    degree: usize,
    elements: usize,
    knots: Vec<BigRational>,
}

/// One nonzero basis function at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisValue<T> {
    pub index: usize,
    pub value: T,
    pub derivative: T,
}

/// Polynomials of the basis functions supported on one element, written in
/// the reference coordinate t in [-1, 1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementPolynomials {
    pub element: usize,
    /// Global index of `polys[0]`; the others follow consecutively.
    pub first_index: usize,
    pub polys: Vec<Poly>,
}

impl ElementPolynomials {
    /// Row i holds the ascending coefficients of basis function `first_index + i`.
    pub fn coefficient_matrix(&self) -> Vec<Vec<BigRational>> {
        let width = self.polys.len();
        self.polys
            .iter()
            .map(|p| (0..width).map(|k| p.coeff(k)).collect())
            .collect()
    }
}

impl SplineSpace {
    pub fn new(degree: usize, elements: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::InvalidParameter(format!(
                "degree {degree} outside 1..={MAX_DEGREE}"
            )));
        }
        if elements < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 elements, got {elements}"
            )));
        }
        let n = elements as i64;
        let p = degree;
        let knots = (0..=elements + 2 * p)
            .map(|i| {
                if i <= p {
                    BigRational::zero()
                } else if i >= elements + p {
                    BigRational::one()
                } else {
                    rat((i - p) as i64, n)
                }
            })
            .collect();
        Ok(SplineSpace {
            degree,
            elements,
            knots,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Always maximal: C^{p-1}.
    pub fn continuity(&self) -> usize {
        self.degree - 1
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn dimension(&self) -> usize {
        self.elements + self.degree
    }

    /// Dimension after removing the two boundary functions.
    pub fn interior_dimension(&self) -> usize {
        self.dimension() - 2
    }

    pub fn h(&self) -> BigRational {
        rat(1, self.elements as i64)
    }

    pub fn knots(&self) -> &[BigRational] {
        &self.knots
    }

    /// Element containing `x`; the last element is closed at x = 1.
    pub fn element_of<T: Scalar>(&self, x: &T) -> Result<usize> {
        if *x < T::zero() || *x > T::one() {
            return Err(Error::Domain { x: x.to_f64() });
        }
        let n = self.elements;
        let p = self.degree;
        // largest e in [0, n) with knot(e + p) <= x
        let count = partition_point(n, |e| T::from_rational(&self.knots[e + p]) <= *x);
        Ok(count.clamp(1, n) - 1)
    }

    /// Nonzero basis functions at `x` with first derivatives, p + 1 entries.
    pub fn eval_basis<T: Scalar>(&self, x: &T) -> Result<Vec<BasisValue<T>>> {
        let e = self.element_of(x)?;
        let p = self.degree;
        let span = e + p;
        let table = basis_triangle(&self.knots, span, p, x);
        let values = &table[p];
        let lower = &table[p - 1];
        let first = span - p;
        let pt = T::from_i64(p as i64);
        let out = (0..=p)
            .map(|r| {
                let a = first + r;
                let mut d = T::zero();
                if r >= 1 {
                    let den = &self.knots[a + p] - &self.knots[a];
                    if !den.is_zero() {
                        d = d + lower[r - 1].clone() / T::from_rational(&den);
                    }
                }
                if r < p {
                    let den = &self.knots[a + p + 1] - &self.knots[a + 1];
                    if !den.is_zero() {
                        d = d - lower[r].clone() / T::from_rational(&den);
                    }
                }
                BasisValue {
                    index: a,
                    value: values[r].clone(),
                    derivative: pt.clone() * d,
                }
            })
            .collect();
        Ok(out)
    }

    /// Exact polynomials of the p + 1 functions living on element `e`.
    pub fn element_polynomials(&self, e: usize) -> Result<ElementPolynomials> {
        if e >= self.elements {
            return Err(Error::ElementOutOfRange {
                element: e,
                count: self.elements,
            });
        }
        let p = self.degree;
        let h = self.h();
        // x(t) = h (e + (1 + t) / 2)
        let half_h = &h / BigRational::from_integer(BigInt::from(2));
        let x = Poly::linear(&h * BigRational::from_integer(e.into()) + &half_h, half_h);
        let table = basis_triangle(&self.knots, e + p, p, &x);
        Ok(ElementPolynomials {
            element: e,
            first_index: e,
            polys: table[p].clone(),
        })
    }

    /// Elements with the same class carry identical reference polynomials.
    pub fn element_class(&self, e: usize) -> (usize, usize) {
        let p = self.degree;
        (e.min(p), (self.elements - 1 - e).min(p))
    }
}

fn partition_point(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Arithmetic needed by the Cox–de Boor triangle.
trait BasisArith: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn knot(q: &BigRational) -> Self;
    fn div_knot(self, q: &BigRational) -> Self;
    fn unit() -> Self;
    fn nil() -> Self;
}

impl<T: Scalar> BasisArith for T {
    fn knot(q: &BigRational) -> Self {
        T::from_rational(q)
    }
    fn div_knot(self, q: &BigRational) -> Self {
        self / T::from_rational(q)
    }
    fn unit() -> Self {
        T::one()
    }
    fn nil() -> Self {
        T::zero()
    }
}

impl BasisArith for Poly {
    fn knot(q: &BigRational) -> Self {
        Poly::constant(q.clone())
    }
    fn div_knot(self, q: &BigRational) -> Self {
        self.scale(&q.recip())
    }
    fn unit() -> Self {
        Poly::constant(BigRational::one())
    }
    fn nil() -> Self {
        Poly::zero()
    }
}

/// Nonzero basis values of every degree 0..=p on knot span `span`.
/// Row j holds the j + 1 functions of degree j, indices span - j ..= span.
fn basis_triangle<V: BasisArith>(
    knots: &[BigRational],
    span: usize,
    p: usize,
    x: &V,
) -> Vec<Vec<V>> {
    let mut rows: Vec<Vec<V>> = Vec::with_capacity(p + 1);
    rows.push(vec![V::unit()]);
    let mut left = vec![V::nil(); p + 1];
    let mut right = vec![V::nil(); p + 1];
    for j in 1..=p {
        left[j] = x.clone() - V::knot(&knots[span + 1 - j]);
        right[j] = V::knot(&knots[span + j]) - x.clone();
        let prev = &rows[j - 1];
        let mut cur = Vec::with_capacity(j + 1);
        let mut saved = V::nil();
        for r in 0..j {
            let den = &knots[span + r + 1] - &knots[span + 1 + r - j];
            let temp = prev[r].clone().div_knot(&den);
            cur.push(saved + right[r + 1].clone() * temp.clone());
            saved = left[j - r].clone() * temp;
        }
        cur.push(saved);
        rows.push(cur);
    }
    rows
}
