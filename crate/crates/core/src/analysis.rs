//! Closed-form spectral analysis of the time-averaged walk on an orbit.
//!
//! On an orbit of dimension `d`, `F` is the cyclic shift and `A` the
//! adjacency matrix of the cycle `C_d`. The Fourier vectors
//! `|k⟩ = d^{-1/2} Σ_j ω^{-jk} |Ψ_j⟩` diagonalize both, with
//! `λ_k = 2 cos(2πk/d)`, and `λ_k = λ_l` exactly when `l = k` or
//! `l = d - k`. The initial state `Ψ_0` has equal weight `1/d` on every
//! `|k⟩`, which fixes everything below in closed form.
//!
//! The general (numerical) time average for an arbitrary Hamiltonian lives
//! here as well; it projects onto clustered eigenspaces.

use std::f64::consts::PI;

use faer::Mat;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    entropy_bits, Basis, DensityMatrix, EigenbasisState, HermitianEigen, LinalgError, C64, ONE,
    STATE_TOL, ZERO,
};
use crate::orbit::Orbit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("orbit dimension must be an even integer >= 2, got {0}")]
    BadDimension(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("wire {wire} out of range for a {m}-wire work register")]
    WireOutOfRange { wire: usize, m: usize },
    #[error("orbit has dimension {orbit} but the distribution has {distribution}")]
    DimensionMismatch { orbit: usize, distribution: usize },
    #[error("vector has dimension {got}, Hamiltonian has {expected}")]
    VectorDimension { expected: usize, got: usize },
    #[error("vector is not normalized (norm² = {0})")]
    NotUnit(f64),
}

fn check_even(d: usize) -> Result<(), AnalysisError> {
    if d < 2 || d % 2 == 1 {
        return Err(AnalysisError::BadDimension(d));
    }
    Ok(())
}

/// `cos(2π·m/d)` and `sin(2π·m/d)` for `m = 0 … d-1`, so phases can be
/// indexed by exact integer residues.
struct RootsOfUnity {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl RootsOfUnity {
    fn new(d: usize) -> Self {
        let angle = |m: usize| 2.0 * PI * m as f64 / d as f64;
        RootsOfUnity {
            cos: (0..d).map(|m| angle(m).cos()).collect(),
            sin: (0..d).map(|m| angle(m).sin()).collect(),
        }
    }

    fn d(&self) -> usize {
        self.cos.len()
    }

    /// Calls `f(j, ω^{e·j})` for `j = 0 … d-1`, tracking the exponent
    /// residue incrementally.
    fn accumulate_powers(&self, e: usize, mut f: impl FnMut(usize, C64)) {
        let d = self.d();
        let mut m = 0;
        for j in 0..d {
            f(j, C64::new(self.cos[m], self.sin[m]));
            m += e;
            if m >= d {
                m -= d;
            }
        }
    }
}

/// Eigenvalue `2cos(2πk/d)` with its degenerate partner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenGroup {
    /// Representative index, `0 ≤ k ≤ d/2`.
    pub k: usize,
    /// `d - k` when it differs from `k`.
    pub partner: Option<usize>,
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedSpectrum {
    pub d: usize,
    /// `λ_k` for `k = 0 … d-1`.
    pub eigenvalues: Vec<f64>,
    /// Distinct eigenvalues in ascending order of `k`.
    pub groups: Vec<EigenGroup>,
}

pub fn restricted_spectrum(d: usize) -> Result<RestrictedSpectrum, AnalysisError> {
    check_even(d)?;
    let eigenvalues = (0..d)
        .map(|k| 2.0 * (2.0 * PI * k as f64 / d as f64).cos())
        .collect::<Vec<_>>();
    let groups = (0..=d / 2)
        .map(|k| {
            let partner = (k != 0 && k != d / 2).then_some(d - k);
            EigenGroup {
                k,
                partner,
                value: eigenvalues[k],
                multiplicity: if partner.is_some() { 2 } else { 1 },
            }
        })
        .collect();
    Ok(RestrictedSpectrum {
        d,
        eigenvalues,
        groups,
    })
}

/// Fourier index of each position in the degeneracy-adjacent ordering:
/// `0, d/2`, then the pairs `(1, d-1), (2, d-2), …`.
pub fn fourier_order(d: usize) -> Vec<usize> {
    let mut order = vec![0];
    if d >= 2 {
        order.push(d / 2);
    }
    for k in 1..d.div_ceil(2) {
        if k != d - k {
            order.push(k);
            order.push(d - k);
        }
    }
    order
}

/// Exact degeneracy test for the cycle spectrum.
fn same_eigenvalue(d: usize, k: usize, l: usize) -> bool {
    k == l || (k + l) % d == 0
}

/// Time average of `|Ψ_0⟩⟨Ψ_0|` on a `d`-dimensional orbit, in the Fourier
/// basis ordered by [`fourier_order`]: two `1/d` singletons followed by
/// `(d-2)/2` all-`1/d` 2×2 blocks.
pub fn time_average_orbit(d: usize) -> Result<DensityMatrix, AnalysisError> {
    check_even(d)?;
    let order = fourier_order(d);
    let w = C64::new(1.0 / d as f64, 0.0);
    let mut m = Mat::zeros(d, d);
    // degenerate partners sit next to each other in `order`
    for p in 0..d {
        for q in p.saturating_sub(1)..(p + 2).min(d) {
            if same_eigenvalue(d, order[p], order[q]) {
                m[(p, q)] = w;
            }
        }
    }
    Ok(DensityMatrix::new(m, Basis::OrbitFourier)?)
}

/// `log₂ d − (d − 2)/d`.
pub fn closed_form_entropy(d: usize) -> f64 {
    let d = d as f64;
    d.log2() - (d - 2.0) / d
}

/// Von Neumann entropy in bits. Eigenvalues at or below `1e-14` contribute
/// nothing.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, AnalysisError> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL {
        return Err(LinalgError::BadTrace(tr.re).into());
    }
    Ok(entropy_bits(&rho.eigenvalues()?))
}

#[derive(Debug, Clone)]
pub struct TimeAverage {
    pub state: DensityMatrix,
    pub tolerance: f64,
    pub eigenspaces: usize,
    /// Eigenvalue gaps in `(tol, 10·tol]`.
    pub ambiguous_gaps: Vec<f64>,
}

/// `Σ_λ P_λ ρ P_λ` over eigenspaces of `h`, clustering eigenvalues within
/// `tol` (default `1e-8·‖h‖`).
pub fn time_average_general(
    rho: &DensityMatrix,
    h: &Mat<C64>,
    tol: Option<f64>,
) -> Result<TimeAverage, AnalysisError> {
    let eig = HermitianEigen::new(h)?;
    time_average_in(&eig, rho, tol)
}

/// As [`time_average_general`] with a precomputed eigendecomposition.
pub fn time_average_in(
    eig: &HermitianEigen,
    rho: &DensityMatrix,
    tol: Option<f64>,
) -> Result<TimeAverage, AnalysisError> {
    let tolerance = tol.unwrap_or_else(|| eig.default_tolerance());
    let clusters = eig.clusters(tolerance);
    let mut projected = eig.project(rho)?;
    dephase(&mut projected, &clusters.label);
    let state = DensityMatrix::new(eig.lift(&projected), rho.basis())?;
    Ok(TimeAverage {
        state,
        tolerance,
        eigenspaces: clusters.len(),
        ambiguous_gaps: clusters.ambiguous_gaps,
    })
}

/// Zeroes coherences between different eigenspaces.
fn dephase(state: &mut EigenbasisState, label: &[usize]) {
    let n = state.support.len();
    for q in 0..n {
        for p in 0..n {
            if label[state.support[p]] != label[state.support[q]] {
                state.block[(p, q)] = ZERO;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationDistribution {
    pub d: usize,
    /// `P(j) = ⟨Ψ_j|ρ̄|Ψ_j⟩`.
    pub p: Vec<f64>,
    /// `P̂(a) = Σ_j P(j) ω^{aj}`.
    #[serde(skip)]
    pub fourier: Vec<C64>,
}

impl OccupationDistribution {
    pub fn fourier_magnitudes(&self) -> Vec<f64> {
        self.fourier.iter().map(|z| z.norm()).collect()
    }

    /// Sum of `P` over `d/2` cyclically consecutive indices starting at
    /// `start`.
    pub fn half_window(&self, start: usize) -> f64 {
        (0..self.d / 2).map(|i| self.p[(start + i) % self.d]).sum()
    }
}

/// Occupation probabilities of the orbit states in the time-averaged state,
/// `P(j) = d⁻² Σ_{λ_k = λ_l} ω^{(k−l)j}`, and their Fourier transform.
pub fn occupation_distribution(d: usize) -> Result<OccupationDistribution, AnalysisError> {
    check_even(d)?;
    let w = RootsOfUnity::new(d);
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|k| {
            let partner = (d - k) % d;
            std::iter::once((k, k)).chain((partner != k).then_some((k, partner)))
        })
        .collect();
    let norm = 1.0 / (d * d) as f64;
    let mut sums = vec![C64::new(0.0, 0.0); d];
    for &(k, l) in &pairs {
        w.accumulate_powers((k + d - l) % d, |j, z| sums[j] += z);
    }
    let p: Vec<f64> = sums.iter().map(|z| z.re * norm).collect();
    let fourier = fourier_transform(&p, &w);
    Ok(OccupationDistribution { d, p, fourier })
}

fn fourier_transform(p: &[f64], w: &RootsOfUnity) -> Vec<C64> {
    (0..p.len())
        .map(|a| {
            let mut acc = C64::new(0.0, 0.0);
            w.accumulate_powers(a, |j, z| acc += z * p[j]);
            acc
        })
        .collect()
}

/// Builds a distribution from explicit probabilities (for example ones
/// measured from a numerically time-averaged state).
pub fn distribution_from_probabilities(p: Vec<f64>) -> OccupationDistribution {
    let d = p.len();
    let fourier = fourier_transform(&p, &RootsOfUnity::new(d.max(1)));
    OccupationDistribution { d, p, fourier }
}

/// Total variation distance to uniform and the Diaconis–Shahshahani upper
/// bound on its square.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DsReport {
    pub d: usize,
    /// `½ Σ_j |P(j) − 1/d|`.
    pub tv: f64,
    /// `¼ Σ_{a≠0} |P̂(a)|²`.
    pub ds_bound: f64,
    pub holds: bool,
    /// `Σ_j |P(j) − 1/d|`.
    pub l1_deviation: f64,
    /// Claimed cap `1/√(2d)` on `l1_deviation`.
    pub l1_cap: f64,
    /// Claimed bound `¼ (d/2 − 1)/d²` on `tv²`, from `|P̂(a)| = 1/d` at even `a`.
    pub claimed_tv2_bound: f64,
}

pub fn ds_bound(dist: &OccupationDistribution) -> DsReport {
    let d = dist.d;
    let uniform = 1.0 / d as f64;
    let l1_deviation: f64 = dist.p.iter().map(|&p| (p - uniform).abs()).sum();
    let tv = 0.5 * l1_deviation;
    let ds_bound = 0.25 * dist.fourier[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
    let df = d as f64;
    DsReport {
        d,
        tv,
        ds_bound,
        holds: tv * tv <= ds_bound * (1.0 + 1e-12) + 1e-15,
        l1_deviation,
        l1_cap: 1.0 / (2.0 * df).sqrt(),
        claimed_tv2_bound: 0.25 * (df / 2.0 - 1.0) / (df * df),
    }
}

/// Fourier magnitudes at nonzero even frequencies, next to the claimed
/// value `1/d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenFourierComparison {
    pub d: usize,
    pub max_odd_magnitude: f64,
    pub min_even_magnitude: f64,
    pub max_even_magnitude: f64,
    pub claimed_even_magnitude: f64,
    /// Whether the computed even-frequency magnitudes differ from the claim
    /// by more than `1e-12`.
    pub discrepancy: bool,
}

pub fn compare_even_fourier(dist: &OccupationDistribution) -> EvenFourierComparison {
    let d = dist.d;
    let mags = dist.fourier_magnitudes();
    let odd = (1..d).step_by(2).map(|a| mags[a]);
    let even: Vec<f64> = (2..d).step_by(2).map(|a| mags[a]).collect();
    let claimed = 1.0 / d as f64;
    let min_even = even.iter().copied().fold(f64::INFINITY, f64::min);
    let max_even = even.iter().copied().fold(0.0, f64::max);
    EvenFourierComparison {
        d,
        max_odd_magnitude: odd.fold(0.0, f64::max),
        min_even_magnitude: if even.is_empty() { 0.0 } else { min_even },
        max_even_magnitude: max_even,
        claimed_even_magnitude: claimed,
        discrepancy: even.iter().any(|m| (m - claimed).abs() > 1e-12),
    }
}

/// `[1/2 − 1/√(2d), 1/2 + 1/√(2d)]`.
pub fn output_interval(d: usize) -> [f64; 2] {
    let h = 1.0 / (2.0 * d as f64).sqrt();
    [0.5 - h, 0.5 + h]
}

/// Reduced state of one work wire: `diag(1 − p, p)` with `p` the total
/// occupation of orbit states where the wire is 1. Coherences vanish
/// because distinct orbit states are orthogonal basis states.
pub fn reduce_output_qubit(
    orbit: &Orbit,
    dist: &OccupationDistribution,
    wire: usize,
) -> Result<DensityMatrix, AnalysisError> {
    if wire >= orbit.m() {
        return Err(AnalysisError::WireOutOfRange {
            wire,
            m: orbit.m(),
        });
    }
    if orbit.d() != dist.d {
        return Err(AnalysisError::DimensionMismatch {
            orbit: orbit.d(),
            distribution: dist.d,
        });
    }
    let p: f64 = orbit
        .wire_values(wire)
        .iter()
        .zip(&dist.p)
        .filter(|(&bit, _)| bit)
        // an empty f64 sum is -0.0
        .fold(0.0, |acc, (_, &pj)| acc + pj);
    let mut m = Mat::zeros(2, 2);
    m[(0, 0)] = C64::new(1.0 - p, 0.0);
    m[(1, 1)] = C64::new(p, 0.0);
    Ok(DensityMatrix::new(m, Basis::Full)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenstateDistance {
    /// `min_λ 2(1 − w_λ)` with `w_λ = ‖P_λ φ‖²`.
    pub distance: f64,
    /// Squared distance to the closest normalized eigenvector with the
    /// optimal phase, `2(1 − √w_max)`.
    pub geometric_distance_sq: f64,
    /// `(eigenvalue, weight)` per eigenspace, ascending eigenvalue.
    pub weights: Vec<(f64, f64)>,
    /// Largest value `distance` can take, `2(1 − 1/D)` for `D` eigenspaces.
    pub max_possible: f64,
}

/// Distance from `phi` to the nearest eigenvector of `h`.
pub fn eigenstate_distance(
    phi: &[C64],
    h: &Mat<C64>,
    tol: Option<f64>,
) -> Result<EigenstateDistance, AnalysisError> {
    let eig = HermitianEigen::new(h)?;
    let n = eig.dim();
    if phi.len() != n {
        return Err(AnalysisError::VectorDimension {
            expected: n,
            got: phi.len(),
        });
    }
    let norm_sq: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(AnalysisError::NotUnit(norm_sq));
    }
    let clusters = eig.clusters(tol.unwrap_or_else(|| eig.default_tolerance()));
    let weights: Vec<(f64, f64)> = clusters
        .ranges
        .iter()
        .map(|r| {
            let w = r
                .clone()
                .map(|k| {
                    (0..n)
                        .map(|i| eig.vectors[(i, k)].conj() * phi[i])
                        .sum::<C64>()
                        .norm_sqr()
                })
                .sum::<f64>();
            let mean = r.clone().map(|k| eig.values[k]).sum::<f64>() / r.len() as f64;
            (mean, w)
        })
        .collect();
    let w_max = weights.iter().map(|&(_, w)| w).fold(0.0, f64::max);
    Ok(EigenstateDistance {
        distance: 2.0 * (1.0 - w_max),
        geometric_distance_sq: 2.0 * (1.0 - w_max.sqrt()),
        max_possible: 2.0 * (1.0 - 1.0 / weights.len() as f64),
        weights,
    })
}

/// [`eigenstate_distance`] of `Ψ_0` on an orbit of dimension `d`: the
/// largest eigenspace weight is `2/d` (a degenerate pair), or `1/2` when
/// `d = 2` and every eigenvalue is simple.
pub fn orbit_eigenstate_distance(d: usize) -> Result<f64, AnalysisError> {
    check_even(d)?;
    let w_max = if d == 2 { 0.5 } else { 2.0 / d as f64 };
    Ok(2.0 * (1.0 - w_max))
}

/// Dense adjacency matrix of the cycle `C_d` in the orbit-state basis
/// (`A|Ψ_j⟩ = |Ψ_{j+1}⟩ + |Ψ_{j−1}⟩`). For `d = 2` both neighbours coincide
/// and the entries are 2.
pub fn orbit_hamiltonian(d: usize) -> Mat<C64> {
    let mut a = Mat::zeros(d, d);
    for j in 0..d {
        a[((j + 1) % d, j)] += ONE;
        a[((j + d - 1) % d, j)] += ONE;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn spectrum_small_cases() {
        let s = restricted_spectrum(2).unwrap();
        assert!((s.eigenvalues[0] - 2.0).abs() < EPS && (s.eigenvalues[1] + 2.0).abs() < EPS);
        assert!(s.groups.iter().all(|g| g.multiplicity == 1));

        let s = restricted_spectrum(4).unwrap();
        let want = [2.0, 0.0, -2.0];
        let mult = [1, 2, 1];
        for (g, (w, m)) in s.groups.iter().zip(want.iter().zip(mult)) {
            assert!((g.value - w).abs() < EPS);
            assert_eq!(g.multiplicity, m);
        }

        let s = restricted_spectrum(24).unwrap();
        assert_eq!(s.groups.iter().filter(|g| g.multiplicity == 1).count(), 2);
        assert_eq!(s.groups.iter().filter(|g| g.multiplicity == 2).count(), 11);
        assert_eq!(restricted_spectrum(7), Err(AnalysisError::BadDimension(7)));
        assert_eq!(restricted_spectrum(0), Err(AnalysisError::BadDimension(0)));
    }

    #[test]
    fn fourier_ordering() {
        assert_eq!(fourier_order(2), vec![0, 1]);
        assert_eq!(fourier_order(4), vec![0, 2, 1, 3]);
        assert_eq!(fourier_order(6), vec![0, 3, 1, 5, 2, 4]);
    }

    #[test]
    fn time_average_block_shapes() {
        let r = time_average_orbit(2).unwrap();
        assert!((r.get(0, 0).re - 0.5).abs() < EPS && r.get(0, 1).norm() < EPS);

        let r = time_average_orbit(4).unwrap();
        let want = [
            [0.25, 0.0, 0.0, 0.0],
            [0.0, 0.25, 0.0, 0.0],
            [0.0, 0.0, 0.25, 0.25],
            [0.0, 0.0, 0.25, 0.25],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((r.get(i, j).re - want[i][j]).abs() < EPS);
            }
        }
        assert_eq!(r.basis(), Basis::OrbitFourier);
        assert!(time_average_orbit(5).is_err());
    }

    #[test]
    fn entropy_values() {
        assert!((closed_form_entropy(2) - 1.0).abs() < EPS);
        assert!((closed_form_entropy(4) - 1.5).abs() < EPS);
        // log2(24) - 22/24
        assert!((closed_form_entropy(24) - 3.668_295_834_054_49).abs() < 1e-12);
        for d in [2, 4, 24] {
            let s = von_neumann_entropy(&time_average_orbit(d).unwrap()).unwrap();
            assert!((s - closed_form_entropy(d)).abs() < 1e-10);
        }
        let pure = DensityMatrix::basis_state(3, 1, Basis::Full);
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);
    }

    #[test]
    fn time_average_eigenvalue_multiplicities() {
        let d = 24;
        let ev = time_average_orbit(d).unwrap().eigenvalues().unwrap();
        let near = |x: f64| ev.iter().filter(|&&v| (v - x).abs() < 1e-12).count();
        assert_eq!(near(1.0 / d as f64), 2);
        assert_eq!(near(2.0 / d as f64), (d - 2) / 2);
        assert_eq!(near(0.0), (d - 2) / 2);
    }

    #[test]
    fn occupation_d4() {
        let o = occupation_distribution(4).unwrap();
        let want = [0.375, 0.125, 0.375, 0.125];
        for (p, w) in o.p.iter().zip(want) {
            assert!((p - w).abs() < EPS);
        }
        let mags = o.fourier_magnitudes();
        assert!((mags[0] - 1.0).abs() < EPS);
        assert!(mags[1] < EPS && mags[3] < EPS);
        assert!((mags[2] - 0.5).abs() < EPS);
        let o = occupation_distribution(2).unwrap();
        assert!((o.p[0] - 0.5).abs() < EPS && (o.p[1] - 0.5).abs() < EPS);
    }

    #[test]
    fn ds_d4_is_tight() {
        let r = ds_bound(&occupation_distribution(4).unwrap());
        assert!((r.tv - 0.25).abs() < EPS);
        assert!((r.ds_bound - 0.0625).abs() < EPS);
        assert!(r.holds);
    }

    #[test]
    fn ds_uniform() {
        let r = ds_bound(&distribution_from_probabilities(vec![0.25; 4]));
        assert!(r.tv.abs() < EPS);
        assert!(r.ds_bound >= 0.0 && r.ds_bound < EPS);
        assert!(r.holds);
    }

    #[test]
    fn half_windows_sum_to_half() {
        for d in [2, 4, 12, 24, 100] {
            let o = occupation_distribution(d).unwrap();
            for start in 0..d {
                assert!((o.half_window(start) - 0.5).abs() < EPS);
            }
        }
    }

    #[test]
    fn general_time_average_trivial_cases() {
        let rho = DensityMatrix::pure(
            &[C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
            Basis::Full,
        )
        .unwrap();
        let id = Mat::<C64>::identity(2, 2);
        let avg = time_average_general(&rho, &id, None).unwrap();
        assert!(avg.state.max_abs_diff(&rho) < EPS);
        assert_eq!(avg.eigenspaces, 1);

        // ρ diagonal in H's nondegenerate eigenbasis
        let mut h = Mat::<C64>::zeros(2, 2);
        h[(0, 0)] = ONE;
        h[(1, 1)] = -ONE;
        let mut m = Mat::zeros(2, 2);
        m[(0, 0)] = C64::new(0.3, 0.0);
        m[(1, 1)] = C64::new(0.7, 0.0);
        let diag = DensityMatrix::new(m, Basis::Full).unwrap();
        let avg = time_average_general(&diag, &h, None).unwrap();
        assert!(avg.state.max_abs_diff(&diag) < EPS);
        // the pure state loses its coherence
        let avg = time_average_general(&rho, &h, None).unwrap();
        assert!(avg.state.get(0, 1).norm() < EPS);
        assert!((avg.state.get(1, 1).re - 0.64).abs() < EPS);
    }

    #[test]
    fn general_rejects_non_hermitian() {
        let rho = DensityMatrix::basis_state(2, 0, Basis::Full);
        let mut h = Mat::<C64>::zeros(2, 2);
        h[(0, 1)] = ONE;
        assert!(matches!(
            time_average_general(&rho, &h, None),
            Err(AnalysisError::Linalg(LinalgError::NotHermitian(_)))
        ));
    }

    #[test]
    fn eigenstate_distance_cases() {
        let h = orbit_hamiltonian(4);
        // an eigenvector: the k = 0 Fourier vector
        let phi = vec![C64::new(0.5, 0.0); 4];
        let r = eigenstate_distance(&phi, &h, None).unwrap();
        assert!(r.distance.abs() < 1e-12);

        // equal superposition of two nondegenerate eigenvectors (k=0, k=2)
        let mut h2 = Mat::<C64>::zeros(2, 2);
        h2[(0, 0)] = ONE;
        h2[(1, 1)] = -ONE;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = eigenstate_distance(&[C64::new(s, 0.0), C64::new(s, 0.0)], &h2, None).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-12);
        assert!((r.max_possible - 1.0).abs() < 1e-12);

        // Ψ_0 on the 24-cycle: best eigenspace is a degenerate pair, weight 2/24
        let mut psi0 = vec![ZERO; 24];
        psi0[0] = ONE;
        let r = eigenstate_distance(&psi0, &orbit_hamiltonian(24), None).unwrap();
        assert!((r.distance - 11.0 / 6.0).abs() < 1e-10);
        assert_eq!(r.weights.len(), 13);

        assert!(matches!(
            eigenstate_distance(&[ONE, ONE], &h2, None),
            Err(AnalysisError::NotUnit(_))
        ));
    }

    #[test]
    fn orbit_eigenstate_distance_matches_numerics() {
        for d in [2, 4, 6, 12, 24, 40] {
            let mut psi0 = vec![ZERO; d];
            psi0[0] = ONE;
            let r = eigenstate_distance(&psi0, &orbit_hamiltonian(d), None).unwrap();
            assert!((orbit_eigenstate_distance(d).unwrap() - r.distance).abs() < 1e-10, "d={d}");
        }
        assert!(orbit_eigenstate_distance(5).is_err());
    }

    #[test]
    fn orbit_hamiltonian_d2_has_weight_two() {
        let a = orbit_hamiltonian(2);
        assert_eq!(a[(0, 1)], C64::new(2.0, 0.0));
        let e = HermitianEigen::new(&a).unwrap();
        assert!((e.values[0] + 2.0).abs() < EPS && (e.values[1] - 2.0).abs() < EPS);
    }
}
