//! Sparse multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::format_rational;

/// Exponent vectors map to nonzero coefficients. Trailing zero exponents are
/// trimmed so equal monomials have one key.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Vec<u32>, BigRational>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn exp(e: &[u32], var: usize) -> u32 {
    e.get(var).copied().unwrap_or(0)
}

impl MPoly {
    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MPoly { terms }
    }

    /// The variable with index `var`.
    pub fn var(var: usize) -> Self {
        let mut e = vec![0; var + 1];
        e[var] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigRational::one());
        MPoly { terms }
    }

    fn insert(&mut self, e: Vec<u32>, c: BigRational) {
        let e = trim(e);
        let slot = self.terms.entry(e.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Some(c) when the polynomial is the constant c.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| exp(e, var)).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn variables(&self) -> Vec<usize> {
        let n = self.terms.keys().map(Vec::len).max().unwrap_or(0);
        (0..n).filter(|&v| self.degree_in(v) > 0).collect()
    }

    /// Coefficient of `var^k`, as a polynomial in the other variables.
    pub fn coefficient_of(&self, var: usize, k: u32) -> MPoly {
        let mut out = MPoly::zero();
        for (e, c) in &self.terms {
            if exp(e, var) == k {
                let mut e = e.clone();
                if var < e.len() {
                    e[var] = 0;
                }
                out.insert(e, c.clone());
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> MPoly {
        let mut out = MPoly::zero();
        if q.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * q);
        }
        out
    }

    pub fn pow(&self, k: u32) -> MPoly {
        (0..k).fold(MPoly::one(), |acc, _| &acc * self)
    }

    /// Replaces `var` by the polynomial `value`.
    pub fn substitute(&self, var: usize, value: &MPoly) -> MPoly {
        let max = self.degree_in(var);
        let powers: Vec<MPoly> = (0..=max).map(|k| value.pow(k)).collect();
        let mut out = MPoly::zero();
        for k in 0..=max {
            let c = self.coefficient_of(var, k);
            if !c.is_zero() {
                out = out + &c * &powers[k as usize];
            }
        }
        out
    }

    /// Evaluates with `values[i]` for variable i (missing variables are zero).
    pub fn eval(&self, values: &[BigRational]) -> BigRational {
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    let x = values.get(v).cloned().unwrap_or_else(BigRational::zero);
                    t *= num_traits::pow(x, k as usize);
                }
            }
            total += t;
        }
        total
    }
}

impl Zero for MPoly {
    fn zero() -> Self {
        MPoly::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for MPoly {
    fn one() -> Self {
        MPoly::constant(BigRational::one())
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        &self + &rhs
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), -c.clone());
        }
        out
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let n = ea.len().max(eb.len());
                let e = (0..n).map(|v| exp(ea, v) + exp(eb, v)).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| if k == 1 { format!("x{v}") } else { format!("x{v}^{k}") })
                    .collect();
                if mono.is_empty() {
                    format_rational(c)
                } else {
                    format!("{}*{}", format_rational(c), mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
