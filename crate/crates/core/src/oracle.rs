//! Numerical ground truth for the closed forms.
//!
//! The oracle never uses the orbit structure: it assembles `A` on the whole
//! `2^(m+s)`-dimensional space, diagonalizes it densely and applies the
//! eigenspace projection formula to `|b⟩⟨b|`. Finite-horizon averages are
//! integrated exactly in the eigenbasis, so the only approximation left is
//! the horizon itself.

use faer::Mat;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{time_average_in, AnalysisError};
use crate::clockham::{BasisState, ClockError, ClockOperator, Direction, Which};
use crate::linalg::{
    half_trace_norm, Basis, DensityMatrix, EigenbasisState, HermitianEigen, LinalgError, C64, ONE, ZERO,
};
use crate::orbit::Orbit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("averaging horizon must be positive, got {0}")]
    BadHorizon(f64),
}

#[derive(Debug, Clone)]
pub struct FiniteTimeResult {
    pub t: f64,
    pub rho_t: DensityMatrix,
    /// Trace distance to the infinite-time average.
    pub deviation: f64,
}

/// `(1 − e^{−iΔT}) / (iΔT)`, the average of `e^{−iΔt}` over `[0, T]`.
fn damping(delta: f64, t: f64) -> C64 {
    let x = delta * t;
    if x == 0.0 {
        return ONE;
    }
    // (1 - cos x + i sin x) / (i x) = sin x / x + i (cos x - 1) / x
    C64::new(x.sin() / x, (x.cos() - 1.0) / x)
}

/// Damped eigenbasis block and its trace distance to the infinite-time
/// limit.
fn damped_block(
    eig: &HermitianEigen,
    rho: &DensityMatrix,
    t: f64,
    tol: Option<f64>,
) -> Result<(EigenbasisState, f64), OracleError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(OracleError::BadHorizon(t));
    }
    let tol = tol.unwrap_or_else(|| eig.default_tolerance());
    let label = eig.clusters(tol).label;
    let mut finite = eig.project(rho)?;
    let n = finite.support.len();
    let mut gap = Mat::<C64>::zeros(n, n);
    for q in 0..n {
        for p in 0..n {
            let (k, l) = (finite.support[p], finite.support[q]);
            if label[k] != label[l] {
                let damped = finite.block[(p, q)] * damping(eig.values[k] - eig.values[l], t);
                finite.block[(p, q)] = damped;
                gap[(p, q)] = damped;
            }
        }
    }
    // The eigenbasis restriction is an isometry, so the trace norm of the
    // difference can be taken on the small block.
    Ok((finite, half_trace_norm(&gap)?))
}

/// `(1/T) ∫₀ᵀ e^{−iHt} ρ e^{iHt} dt`, evaluated elementwise in the
/// eigenbasis of `H`. Eigenvalues within `tol` (default `1e-8·‖H‖`) are
/// treated as equal.
pub fn finite_time_average(
    eig: &HermitianEigen,
    rho: &DensityMatrix,
    t: f64,
    tol: Option<f64>,
) -> Result<FiniteTimeResult, OracleError> {
    let (finite, deviation) = damped_block(eig, rho, t, tol)?;
    let rho_t = DensityMatrix::new(eig.lift(&finite), rho.basis())?;
    Ok(FiniteTimeResult {
        t,
        rho_t,
        deviation,
    })
}

/// Only the trace distance of [`finite_time_average`] to its limit.
pub fn finite_time_deviation(
    eig: &HermitianEigen,
    rho: &DensityMatrix,
    t: f64,
    tol: Option<f64>,
) -> Result<f64, OracleError> {
    Ok(damped_block(eig, rho, t, tol)?.1)
}

/// Dense diagonalization of `A` over the full register space.
#[derive(Debug, Clone)]
pub struct SpectralOracle {
    eig: HermitianEigen,
    tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct OracleAverage {
    pub rho_bar: DensityMatrix,
    pub eigenspaces: usize,
    pub ambiguous_gaps: Vec<f64>,
}

impl SpectralOracle {
    pub fn new(op: &ClockOperator, cap: usize) -> Result<Self, OracleError> {
        let a = op.assemble_matrix(Which::A, cap)?;
        let n = a.dim();
        let dense = a.to_dense();
        let h = Mat::from_fn(n, n, |i, j| dense[i * n + j]);
        let eig = HermitianEigen::from_real_symmetric(&h)?;
        let tolerance = eig.default_tolerance();
        Ok(SpectralOracle { eig, tolerance })
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Exact time average of `|initial⟩⟨initial|`.
    pub fn time_average(&self, op: &ClockOperator, initial: BasisState) -> Result<OracleAverage, OracleError> {
        let rho = DensityMatrix::basis_state(self.dim(), op.index_of(initial), Basis::Full);
        let avg = time_average_in(&self.eig, &rho, Some(self.tolerance))?;
        Ok(OracleAverage {
            rho_bar: avg.state,
            eigenspaces: avg.eigenspaces,
            ambiguous_gaps: avg.ambiguous_gaps,
        })
    }

    pub fn finite_time_average(
        &self,
        op: &ClockOperator,
        initial: BasisState,
        t: f64,
    ) -> Result<FiniteTimeResult, OracleError> {
        let rho = DensityMatrix::basis_state(self.dim(), op.index_of(initial), Basis::Full);
        finite_time_average(&self.eig, &rho, t, Some(self.tolerance))
    }

    pub fn finite_time_deviation(
        &self,
        op: &ClockOperator,
        initial: BasisState,
        t: f64,
    ) -> Result<f64, OracleError> {
        let rho = DensityMatrix::basis_state(self.dim(), op.index_of(initial), Basis::Full);
        finite_time_deviation(&self.eig, &rho, t, Some(self.tolerance))
    }
}

/// One-shot form: assemble, diagonalize and average.
pub fn spectral_oracle(
    op: &ClockOperator,
    initial: BasisState,
    cap: usize,
) -> Result<DensityMatrix, OracleError> {
    Ok(SpectralOracle::new(op, cap)?.time_average(op, initial)?.rho_bar)
}

/// Occupation of each orbit state in a full-space density matrix.
pub fn orbit_populations(rho: &DensityMatrix, op: &ClockOperator, orbit: &Orbit) -> Vec<f64> {
    orbit
        .states()
        .iter()
        .map(|&b| rho.population(op.index_of(b)))
        .collect()
}

/// Frobenius norm of the part of `rho` outside the orbit block.
pub fn weight_outside_orbit(rho: &DensityMatrix, op: &ClockOperator, orbit: &Orbit) -> f64 {
    let n = rho.dim();
    let mut inside = vec![false; n];
    for &b in orbit.states() {
        inside[op.index_of(b)] = true;
    }
    let m = rho.entries();
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            if !(inside[i] && inside[j]) {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Converts an orbit state written in the degeneracy-ordered Fourier basis
/// (see [`crate::analysis::fourier_order`]) to the orbit-state basis, using
/// `⟨Ψ_j|k⟩ = ω^{−jk}/√d`.
pub fn fourier_to_orbit_states(rho: &DensityMatrix) -> Result<DensityMatrix, OracleError> {
    let d = rho.dim();
    let order = crate::analysis::fourier_order(d);
    let scale = 1.0 / (d as f64).sqrt();
    let v = Mat::from_fn(d, d, |j, p| {
        let phase = -2.0 * std::f64::consts::PI * ((j * order[p]) % d) as f64 / d as f64;
        C64::from_polar(scale, phase)
    });
    let out = &(&v * rho.entries()) * v.adjoint();
    Ok(DensityMatrix::new(out, Basis::OrbitState)?)
}

/// Places an orbit-state-basis matrix into the full register space.
pub fn embed_orbit_state(
    rho: &DensityMatrix,
    op: &ClockOperator,
    orbit: &Orbit,
    full_dim: usize,
) -> Result<DensityMatrix, OracleError> {
    let idx: Vec<usize> = orbit.states().iter().map(|&b| op.index_of(b)).collect();
    let mut m = Mat::from_fn(full_dim, full_dim, |_, _| ZERO);
    for (p, &i) in idx.iter().enumerate() {
        for (q, &j) in idx.iter().enumerate() {
            m[(i, j)] = rho.get(p, q);
        }
    }
    Ok(DensityMatrix::new(m, Basis::Full)?)
}

/// Matrix of `A` between orbit states, built from the operator's own
/// forward and backward images rather than from the cycle formula.
pub fn orbit_restricted_matrix(op: &ClockOperator, orbit: &Orbit) -> Mat<C64> {
    let d = orbit.d();
    let mut a = Mat::zeros(d, d);
    for (j, &b) in orbit.states().iter().enumerate() {
        for dir in [Direction::Forward, Direction::Backward] {
            for img in op.images(b, dir) {
                if let Some(i) = orbit.position(&img) {
                    a[(i, j)] += ONE;
                }
            }
        }
    }
    a
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Convergence data for a sequence of horizons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub t: f64,
    pub deviation: f64,
}

pub fn convergence_series(
    oracle: &SpectralOracle,
    op: &ClockOperator,
    initial: BasisState,
    horizons: &[f64],
) -> Result<Vec<ConvergenceRow>, OracleError> {
    horizons
        .iter()
        .map(|&t| {
            Ok(ConvergenceRow {
                t,
                deviation: oracle.finite_time_deviation(op, initial, t)?,
            })
        })
        .collect()
}
