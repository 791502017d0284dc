//! Stiffness and mass assembly under quadrature blends, interior stencils,
//! and tensor-product operators.
//!
//! Assembly always runs in exact rationals: the reference element matrices
//! are `Q(phi_i' phi_j')` and `Q(phi_i phi_j)` evaluated through the exact
//! moments of the blend, so a blend with large cancelling coefficients loses
//! nothing. The result is rounded once into the requested scalar type.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::QuadratureSpec;
use crate::scalar::Scalar;
use crate::splines::SplineSpace;

/// Largest dimension accepted for dense materialization.
pub const MAX_DENSE_DIM: usize = 5000;

/// Symmetric banded matrix stored by diagonals: `bands[k][i] = A[i][i + k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedSymMatrix<T> {
    n: usize,
    bandwidth: usize,
    bands: Vec<Vec<T>>,
}

impl<T: Scalar> BandedSymMatrix<T> {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bands = (0..=bandwidth)
            .map(|k| vec![T::zero(); n.saturating_sub(k)])
            .collect();
        BandedSymMatrix {
            n,
            bandwidth,
            bands,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Diagonal at offset k (length n - k).
    pub fn band(&self, k: usize) -> &[T] {
        &self.bands[k]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.bandwidth || hi >= self.n {
            T::zero()
        } else {
            self.bands[k][lo].clone()
        }
    }

    /// Adds v to entries (i, j) and (j, i).
    pub fn add(&mut self, i: usize, j: usize, v: &T) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        assert!(k <= self.bandwidth, "entry ({i}, {j}) outside the band");
        let slot = &mut self.bands[k][lo];
        *slot = slot.clone() + v.clone();
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BandedSymMatrix<U> {
        BandedSymMatrix {
            n: self.n,
            bandwidth: self.bandwidth,
            bands: self
                .bands
                .iter()
                .map(|b| b.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let mut y: Vec<T> = self
            .bands[0]
            .iter()
            .zip(x)
            .map(|(a, b)| a.clone() * b.clone())
            .collect();
        for k in 1..=self.bandwidth {
            for (i, a) in self.bands[k].iter().enumerate() {
                y[i] = y[i].clone() + a.clone() * x[i + k].clone();
                y[i + k] = y[i + k].clone() + a.clone() * x[i].clone();
            }
        }
        y
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        self.matvec(y)
            .into_iter()
            .zip(x)
            .fold(T::zero(), |acc, (a, b)| acc + a * b.clone())
    }

    /// Drops the first and last rows and columns.
    pub fn dirichlet_reduced(&self) -> Self {
        let n = self.n.saturating_sub(2);
        let bands = (0..=self.bandwidth)
            .map(|k| {
                let len = n.saturating_sub(k);
                self.bands[k].iter().skip(1).take(len).cloned().collect()
            })
            .collect();
        BandedSymMatrix {
            n,
            bandwidth: self.bandwidth,
            bands,
        }
    }

    /// Sum of all entries of the full symmetric matrix.
    pub fn total(&self) -> T {
        let mut s = T::zero();
        for (k, band) in self.bands.iter().enumerate() {
            let w = if k == 0 { T::one() } else { T::one() + T::one() };
            for a in band {
                s = s + w.clone() * a.clone();
            }
        }
        s
    }

    /// Full row i (length n).
    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.n).map(|j| self.get(i, j)).collect()
    }

    /// Nonzero-pattern entries (row, col, value) of the full matrix, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bandwidth);
            let hi = (i + self.bandwidth).min(self.n.saturating_sub(1));
            for j in lo..=hi {
                out.push((i, j, self.get(i, j)));
            }
        }
        out
    }

    pub fn to_dense_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64())
    }
}

impl BandedSymMatrix<BigRational> {
    /// Rounds every entry once into `U`.
    pub fn round<U: Scalar>(&self) -> BandedSymMatrix<U> {
        self.map(U::from_rational)
    }
}

/// Options controlling 1D assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Eliminate the two boundary functions (homogeneous Dirichlet).
    pub dirichlet: bool,
    /// Accept a stiffness rule that does not integrate degree 2p - 2 exactly.
    pub allow_under_integrated_stiffness: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            dirichlet: true,
            allow_under_integrated_stiffness: false,
        }
    }
}

/// Reference-element matrices `Q(phi_i' phi_j')` and `Q(phi_i phi_j)` in the
/// coordinate t of [-1, 1]; physical matrices are `(2/h) S` and `(h/2) M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceMatrices {
    pub stiffness: Vec<Vec<BigRational>>,
    pub mass: Vec<Vec<BigRational>>,
}

fn dot_moments(f: &Poly, moments: &[BigRational]) -> BigRational {
    f.coeffs()
        .iter()
        .zip(moments)
        .fold(BigRational::zero(), |acc, (a, m)| acc + a * m)
}

fn reference_matrices(
    polys: &[Poly],
    stiff_moments: &[BigRational],
    mass_moments: &[BigRational],
) -> ReferenceMatrices {
    let derivs: Vec<Poly> = polys.iter().map(Poly::derivative).collect();
    let n = polys.len();
    let mut stiffness = vec![vec![BigRational::zero(); n]; n];
    let mut mass = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let s = dot_moments(&(&derivs[i] * &derivs[j]), stiff_moments);
            let m = dot_moments(&(&polys[i] * &polys[j]), mass_moments);
            stiffness[j][i] = s.clone();
            stiffness[i][j] = s;
            mass[j][i] = m.clone();
            mass[i][j] = m;
        }
    }
    ReferenceMatrices { stiffness, mass }
}

fn check_stiffness_rule(p: usize, rule: &QuadratureSpec, opts: &AssemblyOptions) -> Result<()> {
    let degree = 2 * p - 2;
    if !opts.allow_under_integrated_stiffness && rule.exactness()? < degree {
        return Err(Error::UnderIntegratedStiffness {
            rule: rule.label(),
            degree,
        });
    }
    Ok(())
}

/// Exact stiffness and mass matrices.
pub fn assemble_exact(
    space: &SplineSpace,
    stiffness_rule: &QuadratureSpec,
    mass_rule: &QuadratureSpec,
    opts: AssemblyOptions,
) -> Result<(BandedSymMatrix<BigRational>, BandedSymMatrix<BigRational>)> {
    let p = space.degree();
    check_stiffness_rule(p, stiffness_rule, &opts)?;
    let stiff_moments = stiffness_rule.moments(2 * p)?;
    let mass_moments = mass_rule.moments(2 * p)?;

    let n_el = space.elements();
    let two = BigRational::from_integer(BigInt::from(2));
    let n_big = BigRational::from_integer(BigInt::from(n_el));
    // 2/h and h/2
    let k_scale = &two * &n_big;
    let m_scale = BigRational::one() / (&two * &n_big);

    let dim = space.dimension();
    let mut k = BandedSymMatrix::<BigRational>::zeros(dim, p);
    let mut m = BandedSymMatrix::<BigRational>::zeros(dim, p);
    let mut cache: HashMap<(usize, usize), ReferenceMatrices> = HashMap::new();
    for e in 0..n_el {
        let class = space.element_class(e);
        if !cache.contains_key(&class) {
            let polys = space.element_polynomials(e)?;
            cache.insert(
                class,
                reference_matrices(&polys.polys, &stiff_moments, &mass_moments),
            );
        }
        let local = &cache[&class];
        for i in 0..=p {
            for j in i..=p {
                k.add(e + i, e + j, &(&local.stiffness[i][j] * &k_scale));
                m.add(e + i, e + j, &(&local.mass[i][j] * &m_scale));
            }
        }
    }
    if opts.dirichlet {
        Ok((k.dirichlet_reduced(), m.dirichlet_reduced()))
    } else {
        Ok((k, m))
    }
}

/// Stiffness and mass over the Dirichlet-reduced space, rounded into `T`.
pub fn assemble_1d<T: Scalar>(
    space: &SplineSpace,
    stiffness_rule: &QuadratureSpec,
    mass_rule: &QuadratureSpec,
) -> Result<(BandedSymMatrix<T>, BandedSymMatrix<T>)> {
    assemble_1d_with(space, stiffness_rule, mass_rule, AssemblyOptions::default())
}

pub fn assemble_1d_with<T: Scalar>(
    space: &SplineSpace,
    stiffness_rule: &QuadratureSpec,
    mass_rule: &QuadratureSpec,
    opts: AssemblyOptions,
) -> Result<(BandedSymMatrix<T>, BandedSymMatrix<T>)> {
    let (k, m) = assemble_exact(space, stiffness_rule, mass_rule, opts)?;
    Ok((k.round(), m.round()))
}

/// Interior repeating row of stiffness and mass, nondimensionalized:
/// `stiffness[k] = h K[a][a+k]`, `mass[k] = M[a][a+k] / h`.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilSymbol<T> {
    pub degree: usize,
    pub stiffness: Vec<T>,
    pub mass: Vec<T>,
}

impl<T: Scalar> StencilSymbol<T> {
    pub fn bandwidth(&self) -> usize {
        self.degree
    }

    /// `s_0 + 2 sum_k s_k`; zero for a consistent stiffness.
    pub fn stiffness_row_sum(&self) -> T {
        row_sum(&self.stiffness)
    }

    /// `m_0 + 2 sum_k m_k`; one for a consistent mass.
    pub fn mass_row_sum(&self) -> T {
        row_sum(&self.mass)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> StencilSymbol<U> {
        StencilSymbol {
            degree: self.degree,
            stiffness: self.stiffness.iter().map(&f).collect(),
            mass: self.mass.iter().map(&f).collect(),
        }
    }

    pub fn to_f64(&self) -> StencilSymbol<f64> {
        self.map(|x| x.to_f64())
    }
}

fn row_sum<T: Scalar>(band: &[T]) -> T {
    let two = T::one() + T::one();
    band.iter()
        .skip(1)
        .fold(band[0].clone(), |acc, b| acc + two.clone() * b.clone())
}

/// Exact interior stencil. Only the interior-element reference matrices
/// enter, so the result does not depend on the element count of `space`.
pub fn interior_stencil(
    space: &SplineSpace,
    stiffness_rule: &QuadratureSpec,
    mass_rule: &QuadratureSpec,
) -> Result<StencilSymbol<BigRational>> {
    stencil_for_degree(space.degree(), stiffness_rule, mass_rule, AssemblyOptions::default())
}

/// Interior stencil for degree p on a virtual periodic patch.
pub fn stencil_for_degree(
    p: usize,
    stiffness_rule: &QuadratureSpec,
    mass_rule: &QuadratureSpec,
    opts: AssemblyOptions,
) -> Result<StencilSymbol<BigRational>> {
    // element p of a (2p + 1)-element mesh has only uniform knots around it
    let patch = SplineSpace::new(p, 2 * p + 1)?;
    check_stiffness_rule(p, stiffness_rule, &opts)?;
    let polys = patch.element_polynomials(p)?;
    let local = reference_matrices(
        &polys.polys,
        &stiffness_rule.moments(2 * p)?,
        &mass_rule.moments(2 * p)?,
    );
    let two = BigRational::from_integer(BigInt::from(2));
    let half = BigRational::one() / &two;
    let diag_sum = |mat: &Vec<Vec<BigRational>>, k: usize| {
        (0..=p - k).fold(BigRational::zero(), |acc, i| acc + &mat[i][i + k])
    };
    Ok(StencilSymbol {
        degree: p,
        stiffness: (0..=p).map(|k| &two * diag_sum(&local.stiffness, k)).collect(),
        mass: (0..=p).map(|k| &half * diag_sum(&local.mass, k)).collect(),
    })
}

/// Reads the nondimensional band off the central row of assembled
/// unreduced matrices. Needs at least 4p + 1 elements.
pub fn extract_central_row(
    space: &SplineSpace,
    k: &BandedSymMatrix<BigRational>,
    m: &BandedSymMatrix<BigRational>,
) -> Result<StencilSymbol<BigRational>> {
    let p = space.degree();
    let n_el = space.elements();
    if n_el < 4 * p + 1 || k.dim() != space.dimension() {
        return Err(Error::InvalidParameter(format!(
            "central-row extraction needs an unreduced matrix on at least {} elements",
            4 * p + 1
        )));
    }
    let h = space.h();
    let a = space.dimension() / 2;
    Ok(StencilSymbol {
        degree: p,
        stiffness: (0..=p).map(|d| k.get(a, a + d) * &h).collect(),
        mass: (0..=p).map(|d| m.get(a, a + d) / &h).collect(),
    })
}

/// d-dimensional operator on the unit cube built from per-axis 1D matrices:
/// `K = sum_a (M ⊗ .. ⊗ K_a ⊗ .. ⊗ M)`, `M = M_1 ⊗ .. ⊗ M_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator<T> {
    pub axes: Vec<(BandedSymMatrix<T>, BandedSymMatrix<T>)>,
}

impl<T: Scalar> TensorOperator<T> {
    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|(k, _)| k.dim()).collect()
    }

    pub fn dimension(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn spatial_dim(&self) -> usize {
        self.axes.len()
    }

    /// Applies the global stiffness to a vector in row-major axis order.
    pub fn apply_stiffness(&self, x: &[T]) -> Vec<T> {
        let dims = self.dims();
        let mut out = vec![T::zero(); x.len()];
        for a in 0..self.axes.len() {
            let mut y = x.to_vec();
            for (b, (k, m)) in self.axes.iter().enumerate() {
                y = apply_axis(&y, &dims, b, if a == b { k } else { m });
            }
            for (o, v) in out.iter_mut().zip(y) {
                *o = o.clone() + v;
            }
        }
        out
    }

    pub fn apply_mass(&self, x: &[T]) -> Vec<T> {
        let dims = self.dims();
        let mut y = x.to_vec();
        for (b, (_, m)) in self.axes.iter().enumerate() {
            y = apply_axis(&y, &dims, b, m);
        }
        y
    }

    /// Dense global (K, M) in f64; refused above [`MAX_DENSE_DIM`].
    pub fn materialize(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let dim = self.dimension();
        if dim > MAX_DENSE_DIM {
            return Err(Error::Oversize {
                dim,
                max: MAX_DENSE_DIM,
            });
        }
        let dense: Vec<(DMatrix<f64>, DMatrix<f64>)> = self
            .axes
            .iter()
            .map(|(k, m)| (k.to_dense_f64(), m.to_dense_f64()))
            .collect();
        let mut k_total = DMatrix::<f64>::zeros(dim, dim);
        for a in 0..dense.len() {
            let mut acc = DMatrix::<f64>::from_element(1, 1, 1.0);
            for (b, (k, m)) in dense.iter().enumerate() {
                acc = acc.kronecker(if a == b { k } else { m });
            }
            k_total += acc;
        }
        let mut m_total = DMatrix::<f64>::from_element(1, 1, 1.0);
        for (_, m) in &dense {
            m_total = m_total.kronecker(m);
        }
        Ok((k_total, m_total))
    }
}

/// Applies a banded matrix along one axis of a row-major tensor.
fn apply_axis<T: Scalar>(x: &[T], dims: &[usize], axis: usize, a: &BandedSymMatrix<T>) -> Vec<T> {
    let n = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut out = vec![T::zero(); x.len()];
    let mut fiber = vec![T::zero(); n];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            for (j, f) in fiber.iter_mut().enumerate() {
                *f = x[base + j * inner].clone();
            }
            for (j, v) in a.matvec(&fiber).into_iter().enumerate() {
                out[base + j * inner] = v;
            }
        }
    }
    out
}

/// Tensor-product operator from per-axis spaces, sharing the two rules.
pub fn assemble_tensor<T: Scalar>(
    spaces: &[SplineSpace],
    stiffness_rule: &QuadratureSpec,
    mass_rule: &QuadratureSpec,
) -> Result<TensorOperator<T>> {
    if !(2..=3).contains(&spaces.len()) {
        return Err(Error::InvalidParameter(format!(
            "tensor operators need 2 or 3 axes, got {}",
            spaces.len()
        )));
    }
    let mut axes = Vec::with_capacity(spaces.len());
    let mut cache: HashMap<(usize, usize), (BandedSymMatrix<T>, BandedSymMatrix<T>)> =
        HashMap::new();
    for s in spaces {
        let key = (s.degree(), s.elements());
        if !cache.contains_key(&key) {
            cache.insert(key, assemble_1d(s, stiffness_rule, mass_rule)?);
        }
        axes.push(cache[&key].clone());
    }
    Ok(TensorOperator { axes })
}
