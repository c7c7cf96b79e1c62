//! Dense Hermitian linear algebra shared by the analysis and oracle modules.
//!
//! Eigendecompositions go through `faer`. Matrices that are block diagonal up
//! to rounding noise (time-averaged states of a single basis state are
//! supported on one connected component of the graph) are split into their
//! blocks before diagonalizing.

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity tolerance for Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on density matrix trace and Hermiticity.
pub const STATE_TOL: f64 = 1e-12;
/// Entries at or below this magnitude are ignored when looking for blocks.
const BLOCK_NOISE: f64 = 1e-15;
/// Frobenius mass that may be dropped by block splitting before falling
/// back to a full dense eigendecomposition.
const BLOCK_DROP_BUDGET: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("eigendecomposition did not converge")]
    NoConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Fourier eigenvectors of the orbit cycle, degenerate pairs adjacent.
    OrbitFourier,
    /// The orbit states `Ψ_0 … Ψ_{d-1}`.
    OrbitState,
    /// Computational basis of the full register (or of a subsystem).
    Full,
}

/// Unit-trace Hermitian matrix tagged with the basis it is written in.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: Mat<C64>,
    basis: Basis,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace; positivity is checked separately by
    /// [`DensityMatrix::min_eigenvalue`].
    pub fn new(entries: Mat<C64>, basis: Basis) -> Result<Self, LinalgError> {
        check_square(&entries)?;
        let dev = hermitian_deviation(&entries);
        if dev > STATE_TOL {
            return Err(LinalgError::NotHermitian(dev));
        }
        let tr = trace(&entries);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(LinalgError::BadTrace(tr.re));
        }
        Ok(DensityMatrix { entries, basis })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn pure(psi: &[C64], basis: Basis) -> Result<Self, LinalgError> {
        let n = psi.len();
        Self::new(Mat::from_fn(n, n, |i, j| psi[i] * psi[j].conj()), basis)
    }

    /// `|i⟩⟨i|` in a space of dimension `n`.
    pub fn basis_state(n: usize, i: usize, basis: Basis) -> Self {
        let mut m = Mat::zeros(n, n);
        m[(i, i)] = ONE;
        DensityMatrix { entries: m, basis }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &Mat<C64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        trace(&self.entries)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>, LinalgError> {
        block_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> Result<f64, LinalgError> {
        Ok(self
            .eigenvalues()?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// `⟨v|ρ|v⟩` for a computational basis vector `v = |i⟩`.
    pub fn population(&self, i: usize) -> f64 {
        self.entries[(i, i)].re
    }

    /// Largest entry magnitude of `ρ - σ`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }
}

fn check_square<T>(m: &Mat<T>) -> Result<usize, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn trace(m: &Mat<C64>) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub fn hermitian_deviation(m: &Mat<C64>) -> f64 {
    const TILE: usize = 64;
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    // tiled so the transposed reads stay in cache
    for jt in (0..n).step_by(TILE) {
        for it in (0..=jt).step_by(TILE) {
            for j in jt..(jt + TILE).min(n) {
                for i in it..(it + TILE).min(j + 1) {
                    dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm_sqr());
                }
            }
        }
    }
    dev.sqrt()
}

pub fn max_abs_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let mut d: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            d = d.max((a[(i, j)] - b[(i, j)]).norm_sqr());
        }
    }
    d.sqrt()
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<C64>,
}

impl HermitianEigen {
    pub fn new(h: &Mat<C64>) -> Result<Self, LinalgError> {
        let n = check_square(h)?;
        let dev = hermitian_deviation(h);
        if dev > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian(dev));
        }
        let real = (0..n).all(|j| (0..n).all(|i| h[(i, j)].im == 0.0));
        if real {
            let re = Mat::from_fn(n, n, |i, j| h[(i, j)].re);
            return Self::from_real_symmetric(&re);
        }
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| LinalgError::NoConvergence)?;
        let s = evd.S().column_vector();
        Ok(HermitianEigen {
            values: (0..n).map(|i| s[i].re).collect(),
            vectors: evd.U().to_owned(),
        })
    }

    /// Real symmetric input; avoids complex arithmetic in the solver.
    pub fn from_real_symmetric(h: &Mat<f64>) -> Result<Self, LinalgError> {
        let n = check_square(h)?;
        let evd = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| LinalgError::NoConvergence)?;
        let s = evd.S().column_vector();
        let u = evd.U();
        Ok(HermitianEigen {
            values: (0..n).map(|i| s[i]).collect(),
            vectors: Mat::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0)),
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Default clustering tolerance `1e-8·‖H‖` (absolute `1e-8` for `H = 0`).
    pub fn default_tolerance(&self) -> f64 {
        match self.spectral_norm() {
            0.0 => 1e-8,
            norm => 1e-8 * norm,
        }
    }

    /// Groups sorted eigenvalues whose consecutive gaps are at most `tol`.
    pub fn clusters(&self, tol: f64) -> Clustering {
        cluster_sorted(&self.values, tol)
    }
}

/// Eigenbasis components whose population is at or below this are dropped
/// when a state is rewritten in an eigenbasis.
pub const EIGEN_WEIGHT_FLOOR: f64 = 1e-26;

/// A density matrix written in an eigenbasis, restricted to the eigenvectors
/// that carry population. `block[(p, q)] = ⟨u_k|ρ|u_l⟩` for
/// `k = support[p]`, `l = support[q]`.
#[derive(Debug, Clone)]
pub struct EigenbasisState {
    pub support: Vec<usize>,
    pub block: Mat<C64>,
}

impl HermitianEigen {
    /// Rewrites `rho` in this eigenbasis. Sparse states (few nonzero rows)
    /// are projected row by row; dense ones by two full products.
    pub fn project(&self, rho: &DensityMatrix) -> Result<EigenbasisState, LinalgError> {
        let n = self.dim();
        if rho.dim() != n {
            return Err(LinalgError::DimensionMismatch(rho.dim(), n));
        }
        let m = rho.entries();
        let u = &self.vectors;
        let rows: Vec<usize> = (0..n)
            .filter(|&i| (0..n).any(|j| m[(i, j)] != ZERO))
            .collect();

        if rows.len() <= 64 {
            // Y[k, r] = conj(U[rows[r], k])
            let y = Mat::from_fn(n, rows.len(), |k, r| u[(rows[r], k)].conj());
            let sub = Mat::from_fn(rows.len(), rows.len(), |a, b| m[(rows[a], rows[b])]);
            let ys = &y * &sub;
            let population: Vec<f64> = (0..n)
                .map(|k| {
                    (0..rows.len())
                        .map(|r| (ys[(k, r)] * y[(k, r)].conj()).re)
                        .sum()
                })
                .collect();
            let support: Vec<usize> = (0..n).filter(|&k| population[k] > EIGEN_WEIGHT_FLOOR).collect();
            let block = Mat::from_fn(support.len(), support.len(), |p, q| {
                (0..rows.len())
                    .map(|r| ys[(support[p], r)] * y[(support[q], r)].conj())
                    .sum()
            });
            return Ok(EigenbasisState { support, block });
        }
        let full = u.adjoint() * m * u;
        let support: Vec<usize> = (0..n).filter(|&k| full[(k, k)].re > EIGEN_WEIGHT_FLOOR).collect();
        let block = Mat::from_fn(support.len(), support.len(), |p, q| full[(support[p], support[q])]);
        Ok(EigenbasisState { support, block })
    }

    /// `U_S · block · U_S†`, back in the original basis.
    pub fn lift(&self, state: &EigenbasisState) -> Mat<C64> {
        let n = self.dim();
        let us = Mat::from_fn(n, state.support.len(), |i, p| self.vectors[(i, state.support[p])]);
        let left = &us * &state.block;
        &left * us.adjoint()
    }
}

/// Eigenspaces found by gap clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Contiguous index ranges into the ascending eigenvalue list.
    pub ranges: Vec<std::ops::Range<usize>>,
    /// Cluster id of each eigenvalue index.
    pub label: Vec<usize>,
    /// Gaps in `(tol, 10·tol]`, which may be split degeneracies.
    pub ambiguous_gaps: Vec<f64>,
}

impl Clustering {
    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

pub fn cluster_sorted(values: &[f64], tol: f64) -> Clustering {
    let mut ranges = Vec::new();
    let mut label = Vec::with_capacity(values.len());
    let mut ambiguous_gaps = Vec::new();
    let mut start = 0;
    for i in 0..values.len() {
        if i > 0 {
            let gap = values[i] - values[i - 1];
            if gap > tol {
                ranges.push(start..i);
                start = i;
                if gap <= 10.0 * tol {
                    ambiguous_gaps.push(gap);
                }
            }
        }
        label.push(ranges.len());
    }
    if !values.is_empty() {
        ranges.push(start..values.len());
    }
    Clustering {
        ranges,
        label,
        ambiguous_gaps,
    }
}

/// Connected components of the pattern `|m_ij| > BLOCK_NOISE`, each sorted.
/// Also returns the Frobenius norm of the entries ignored.
fn blocks(m: &Mat<C64>) -> (Vec<Vec<usize>>, f64) {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut dropped = 0.0;
    for j in 0..n {
        for i in 0..n {
            let v = m[(i, j)].norm_sqr();
            if v > BLOCK_NOISE * BLOCK_NOISE {
                if i != j {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            } else {
                dropped += v;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    (groups.into_values().collect(), dropped.sqrt())
}

fn dense_eigenvalues(m: &Mat<C64>) -> Result<Vec<f64>, LinalgError> {
    Ok(m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence)?)
}

/// Eigenvalues of a Hermitian matrix, diagonalizing each block of its
/// sparsity pattern separately. Falls back to one dense solve when the
/// entries treated as zero carry noticeable mass.
pub fn block_eigenvalues(m: &Mat<C64>) -> Result<Vec<f64>, LinalgError> {
    check_square(m)?;
    let (groups, dropped) = blocks(m);
    if dropped > BLOCK_DROP_BUDGET {
        return dense_eigenvalues(m);
    }
    let mut out = Vec::with_capacity(m.nrows());
    for g in groups {
        if g.len() == 1 {
            out.push(m[(g[0], g[0])].re);
            continue;
        }
        let sub = Mat::from_fn(g.len(), g.len(), |i, j| m[(g[i], g[j])]);
        out.extend(dense_eigenvalues(&sub)?);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Shannon entropy in bits of a spectrum, ignoring values `<= 1e-14`.
pub fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&mu| mu > 1e-14)
        .map(|&mu| -mu * mu.log2())
        .sum()
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, LinalgError> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let diff = rho.entries() - sigma.entries();
    Ok(0.5 * block_eigenvalues(&diff)?.iter().map(|v| v.abs()).sum::<f64>())
}

/// `½‖M‖₁` for a Hermitian matrix.
pub fn half_trace_norm(m: &Mat<C64>) -> Result<f64, LinalgError> {
    Ok(0.5 * block_eigenvalues(m)?.iter().map(|v| v.abs()).sum::<f64>())
}
