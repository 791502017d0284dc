//! Symmetric-definite generalized eigenproblems `K u = λ M u`.
//!
//! The dense path factors M = L L^T, diagonalizes `L^-1 K L^-T` and maps
//! back. Its eigenvalues carry an absolute error of order `eps * λ_max`,
//! which hides the error of superconvergent low modes on fine meshes, so
//! individual pairs can be refined by shifted inverse iteration in
//! double-double arithmetic on the banded matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use twofloat::TwoFloat;

use crate::assembly::{BandedSymMatrix, TensorOperator};
use crate::error::{Error, Result};
use crate::scalar::{dd_div, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `u_i^T M u_j = δ_ij`.
    MassOrthonormal,
    /// Unit L2 norm of the represented function.
    L2,
}

/// Ascending eigenvalues with M-orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSolution {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[j]` belongs to `eigenvalues[j]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub normalization: Normalization,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest scaled residual `|K u - λ M u| / (|K|_F |u|)` over all pairs.
    pub fn max_residual(&self, k: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
        let kf = k.norm();
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&l, u)| {
                let u = DVector::from_column_slice(u);
                (k * &u - m * &u * l).norm() / (kf * u.norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Dense Cholesky; a nonpositive pivot names its index.
fn cholesky(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

fn fix_sign(u: &mut [f64]) {
    let scale = u.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if let Some(&first) = u.iter().find(|x| x.abs() > 1e-8 * scale) {
        if first < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// All eigenpairs of a dense symmetric-definite pair.
pub fn solve_dense(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<EigenSolution> {
    let n = k.nrows();
    let l = cholesky(m)?;
    let lt = l.transpose();
    let y = l
        .solve_lower_triangular(k)
        .ok_or_else(|| Error::NotPositiveDefinite { pivot: 0, value: 0.0 })?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::NotPositiveDefinite { pivot: 0, value: 0.0 })?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vectors = lt
        .solve_upper_triangular(&eig.eigenvectors)
        .ok_or_else(|| Error::NotPositiveDefinite { pivot: 0, value: 0.0 })?;
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for (rank, &j) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[j];
        if lambda <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                pivot: rank,
                value: lambda,
            });
        }
        let mut u: Vec<f64> = vectors.column(j).iter().copied().collect();
        fix_sign(&mut u);
        eigenvalues.push(lambda);
        eigenvectors.push(u);
    }
    Ok(EigenSolution {
        eigenvalues,
        eigenvectors,
        normalization: Normalization::MassOrthonormal,
    })
}

/// All eigenpairs of a banded pair, solved densely in f64.
pub fn solve_gevp<T: Scalar>(k: &BandedSymMatrix<T>, m: &BandedSymMatrix<T>) -> Result<EigenSolution> {
    solve_dense(&k.to_dense_f64(), &m.to_dense_f64())
}

/// An eigenpair in double-double precision, `u^T M u = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedPair {
    pub eigenvalue: TwoFloat,
    pub eigenvector: Vec<TwoFloat>,
}

impl RefinedPair {
    pub fn eigenvector_f64(&self) -> Vec<f64> {
        self.eigenvector.iter().map(Scalar::to_f64).collect()
    }
}

/// Banded LU with partial pivoting, stored densely but touched only inside
/// the band (upper bandwidth grows to 2w after pivoting).
struct BandLu {
    n: usize,
    w: usize,
    a: Vec<Vec<TwoFloat>>,
    piv: Vec<usize>,
}

impl BandLu {
    fn factor(a: &BandedSymMatrix<TwoFloat>, b: &BandedSymMatrix<TwoFloat>, shift: TwoFloat) -> Self {
        let n = a.dim();
        let w = a.bandwidth();
        let mut m = vec![vec![TwoFloat::from(0.0); n]; n];
        for i in 0..n {
            for j in i.saturating_sub(w)..(i + w + 1).min(n) {
                m[i][j] = a.get(i, j) - shift * b.get(i, j);
            }
        }
        let scale = (0..n).map(|i| m[i][i].abs().hi()).fold(1.0, f64::max);
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + w).min(n - 1);
            let p = (k..=last)
                .max_by(|&x, &y| m[x][k].abs().partial_cmp(&m[y][k].abs()).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(k);
            piv[k] = p;
            let cols = (k + 2 * w + 1).min(n);
            if p != k {
                // multipliers left of column k stay with their elimination step
                for j in k..cols {
                    let t = m[k][j];
                    m[k][j] = m[p][j];
                    m[p][j] = t;
                }
            }
            // a shift that hits the eigenvalue exactly leaves a zero pivot;
            // a tiny one keeps inverse iteration pointed at the eigenvector
            if m[k][k] == TwoFloat::from(0.0) {
                m[k][k] = TwoFloat::from(1e-30 * scale);
            }
            let pivot = m[k][k];
            for i in k + 1..=last {
                let f = dd_div(m[i][k], pivot);
                if f == TwoFloat::from(0.0) {
                    continue;
                }
                m[i][k] = f;
                for j in k + 1..cols {
                    let v = m[k][j];
                    m[i][j] -= f * v;
                }
            }
        }
        BandLu { n, w, a: m, piv }
    }

    fn solve(&self, rhs: &[TwoFloat]) -> Vec<TwoFloat> {
        let n = self.n;
        let w = self.w;
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in k + 1..(k + w + 1).min(n) {
                let f = self.a[i][k];
                x[i] -= f * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..(k + 2 * w + 1).min(n) {
                s -= self.a[k][j] * x[j];
            }
            x[k] = dd_div(s, self.a[k][k]);
        }
        x
    }
}

fn dot(a: &[TwoFloat], b: &[TwoFloat]) -> TwoFloat {
    a.iter().zip(b).fold(TwoFloat::from(0.0), |acc, (x, y)| acc + *x * *y)
}

/// Refines pair j of `sol` by inverse iteration shifted at the f64
/// eigenvalue, then takes the Rayleigh quotient.
pub fn refine_pair<T: Scalar>(
    k: &BandedSymMatrix<T>,
    m: &BandedSymMatrix<T>,
    sol: &EigenSolution,
    j: usize,
) -> Result<RefinedPair> {
    let kd = k.map(Scalar::to_two_float);
    let md = m.map(Scalar::to_two_float);
    refine_pair_dd(&kd, &md, sol.eigenvalues[j], &sol.eigenvectors[j])
}

/// As [`refine_pair`] with matrices already in double-double.
pub fn refine_pair_dd(
    kd: &BandedSymMatrix<TwoFloat>,
    md: &BandedSymMatrix<TwoFloat>,
    lambda0: f64,
    u0: &[f64],
) -> Result<RefinedPair> {
    let start: Vec<TwoFloat> = u0.iter().map(|&x| TwoFloat::from(x)).collect();
    let lu = BandLu::factor(kd, md, TwoFloat::from(lambda0));
    let mut u = start.clone();
    for _ in 0..3 {
        let y = lu.solve(&md.matvec(&u));
        let norm = dot(&y, &md.matvec(&y)).sqrt();
        if !(norm.hi() > 0.0 && norm.hi().is_finite()) {
            return Err(Error::Refinement("inverse iteration diverged".into()));
        }
        u = y.into_iter().map(|v| dd_div(v, norm)).collect();
    }
    if dot(&u, &md.matvec(&start)).hi() < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    let eigenvalue = dot(&u, &kd.matvec(&u));
    if (eigenvalue.hi() - lambda0).abs() > 1e-6 * lambda0.abs() {
        return Err(Error::Refinement(format!(
            "refined eigenvalue {} drifted from {lambda0}",
            eigenvalue.hi()
        )));
    }
    Ok(RefinedPair {
        eigenvalue,
        eigenvector: u,
    })
}

/// Eigenpairs of a tensor operator as sums over axis eigenpairs.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorEigenSolution {
    pub axes: Vec<EigenSolution>,
    /// Ascending (eigenvalue, axis mode indices); ties ordered lexicographically.
    pub modes: Vec<(f64, Vec<usize>)>,
}

impl TensorEigenSolution {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|(l, _)| *l).collect()
    }

    /// Kronecker product of the axis eigenvectors of mode `idx`.
    pub fn eigenvector(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![1.0];
        for (axis, &j) in self.axes.iter().zip(&self.modes[idx].1) {
            let v = &axis.eigenvectors[j];
            out = out.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        }
        out
    }
}

pub fn solve_tensor<T: Scalar>(op: &TensorOperator<T>) -> Result<TensorEigenSolution> {
    let mut axes: Vec<EigenSolution> = Vec::with_capacity(op.axes.len());
    for (a, (k, m)) in op.axes.iter().enumerate() {
        let same = (0..a).find(|&b| op.axes[b] == op.axes[a]);
        let sol = match same {
            Some(b) => axes[b].clone(),
            None => solve_gevp(k, m)?,
        };
        axes.push(sol);
    }
    let mut modes: Vec<(f64, Vec<usize>)> = vec![(0.0, Vec::new())];
    for axis in &axes {
        modes = modes
            .iter()
            .flat_map(|(l, idx)| {
                axis.eigenvalues.iter().enumerate().map(move |(j, &lj)| {
                    let mut idx = idx.clone();
                    idx.push(j);
                    (l + lj, idx)
                })
            })
            .collect();
    }
    modes.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(TensorEigenSolution { axes, modes })
}

/// Double-double eigenvalue of tensor mode `idx`: the sum of refined axis
/// eigenvalues.
pub fn refined_tensor_eigenvalue<T: Scalar>(
    op: &TensorOperator<T>,
    sol: &TensorEigenSolution,
    idx: usize,
) -> Result<TwoFloat> {
    let mut total = TwoFloat::from(0.0);
    for ((k, m), (axis, &j)) in op.axes.iter().zip(sol.axes.iter().zip(&sol.modes[idx].1)) {
        total += refine_pair(k, m, axis, j)?.eigenvalue;
    }
    Ok(total)
}
