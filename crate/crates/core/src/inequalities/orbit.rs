//! Extrema of S(U rho U^dagger || sigma) over the unitary orbit of rho and
//! the weak-superadditivity inequality built from them.
//!
//! For full-rank sigma the minimum pairs the eigenvalues of rho and sigma
//! both in decreasing order and the maximum pairs decreasing against
//! increasing; both are classical divergences of sorted spectra.

use serde::{Deserialize, Serialize};

use super::report::{digest_of, GapReport, InequalityId};
use crate::entropy::{divergence, relative_entropy, ExtendedReal};
use crate::error::{domain_err, Result};
use crate::linalg::{
    c64, same_dim, unitary_exp, ComplexMatrix, DensityMatrix, EigenMethod, HermitianMatrix,
    SpectralDecomposition, Subsystem, TOL_RANK,
};
use crate::states::{random_unitary, SeededGenerator, StatePair};

/// Analytic extrema over the unitary orbit.
///
/// A permutation `perm` describes the alignment in which the `i`-th largest
/// eigenvector of rho is rotated onto the `perm[i]`-th largest eigenvector
/// of sigma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitExtrema {
    pub min_value: f64,
    pub max_value: f64,
    pub minimizing_permutation: Vec<usize>,
    pub maximizing_permutation: Vec<usize>,
}

fn full_rank_eig(sigma: &DensityMatrix, method: EigenMethod) -> Result<SpectralDecomposition> {
    let eig = sigma.eig_with(method);
    let min = eig.eigenvalues().last().copied().unwrap_or(0.0);
    if eig.rank(TOL_RANK) < sigma.dim() || min <= 0.0 {
        return Err(domain_err!("reference state is not full rank (smallest eigenvalue {min:e})"));
    }
    Ok(eig)
}

fn clamped(values: &[f64]) -> Vec<f64> {
    values.iter().map(|x| x.max(0.0)).collect()
}

pub fn unitary_orbit_extrema(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<OrbitExtrema> {
    unitary_orbit_extrema_with(rho, sigma, EigenMethod::Householder)
}

pub(crate) fn unitary_orbit_extrema_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    method: EigenMethod,
) -> Result<OrbitExtrema> {
    same_dim(rho, sigma)?;
    let sigma_eig = full_rank_eig(sigma, method)?;
    let p = clamped(rho.eig_with(method).eigenvalues());
    let q_down = sigma_eig.eigenvalues().to_vec();
    let q_up = sigma_eig.ascending();
    let d = rho.dim();
    let min_value = divergence(&p, &q_down)?.as_finite().expect("sigma is full rank");
    let max_value = divergence(&p, &q_up)?.as_finite().expect("sigma is full rank");
    Ok(OrbitExtrema {
        min_value,
        max_value,
        minimizing_permutation: (0..d).collect(),
        maximizing_permutation: (0..d).rev().collect(),
    })
}

/// The unitary `sum_i |s_{perm[i]}><r_i|` where `r_i`, `s_j` are the
/// eigenvectors of rho and sigma in decreasing eigenvalue order.
pub fn orbit_unitary(rho: &DensityMatrix, sigma: &DensityMatrix, perm: &[usize]) -> Result<ComplexMatrix> {
    same_dim(rho, sigma)?;
    let d = rho.dim();
    let mut seen = vec![false; d];
    if perm.len() != d || perm.iter().any(|&j| j >= d || std::mem::replace(&mut seen[j], true)) {
        return Err(domain_err!("{perm:?} is not a permutation of 0..{d}"));
    }
    let r = rho.eig();
    let s = sigma.eig();
    let mut aligned = ComplexMatrix::zeros(d, d);
    for (i, &j) in perm.iter().enumerate() {
        aligned.set_column(i, &s.eigenvectors().column(j));
    }
    Ok(aligned * r.eigenvectors().adjoint())
}

struct WeakTerms {
    joint: OrbitExtrema,
    a: OrbitExtrema,
    b: OrbitExtrema,
    reduced: [(DensityMatrix, DensityMatrix); 2],
}

fn weak_terms(pair: &StatePair, method: EigenMethod) -> Result<WeakTerms> {
    pair.rho.bipartite_dims()?;
    let joint = unitary_orbit_extrema_with(&pair.rho, &pair.sigma, method)?;
    let ra = pair.rho.reduce(Subsystem::A)?;
    let sa = pair.sigma.reduce(Subsystem::A)?;
    let rb = pair.rho.reduce(Subsystem::B)?;
    let sb = pair.sigma.reduce(Subsystem::B)?;
    let a = unitary_orbit_extrema_with(&ra, &sa, method)?;
    let b = unitary_orbit_extrema_with(&rb, &sb, method)?;
    Ok(WeakTerms { joint, a, b, reduced: [(ra, sa), (rb, sb)] })
}

fn weak_report(id: InequalityId, pair: &StatePair, terms: &WeakTerms) -> GapReport {
    GapReport::new(
        id,
        ExtendedReal::finite(terms.joint.max_value),
        vec![ExtendedReal::finite(terms.a.min_value), ExtendedReal::finite(terms.b.min_value)],
        digest_of(id, &[pair.rho.matrix(), pair.sigma.matrix()]),
    )
}

/// H(l_down(rho_AB)||l_up(sigma_AB)) against
/// H(l_down(rho_A)||l_down(sigma_A)) + H(l_down(rho_B)||l_down(sigma_B)).
pub fn weak_superadditivity_slack(pair: &StatePair) -> Result<GapReport> {
    weak_superadditivity_slack_with(pair, EigenMethod::Householder)
}

pub(crate) fn weak_superadditivity_slack_with(pair: &StatePair, method: EigenMethod) -> Result<GapReport> {
    let terms = weak_terms(pair, method)?;
    Ok(weak_report(InequalityId::WeakSuperadditivity, pair, &terms))
}

/// Explicit unitaries for the rotated superadditivity inequality together
/// with its report.
#[derive(Debug, Clone)]
pub struct ConjectureWitness {
    pub report: GapReport,
    /// Aligns rho_AB's decreasing spectrum against sigma_AB's increasing one.
    pub u_ab: ComplexMatrix,
    pub u_a: ComplexMatrix,
    pub u_b: ComplexMatrix,
}

/// Witness unitaries from the orbit extrema: `U_AB` maximises the joint
/// divergence while `U_A`, `U_B` minimise the marginal ones. The report's
/// slack therefore equals [`weak_superadditivity_slack`].
pub fn conjecture_witness(pair: &StatePair) -> Result<ConjectureWitness> {
    let terms = weak_terms(pair, EigenMethod::Householder)?;
    let u_ab = orbit_unitary(&pair.rho, &pair.sigma, &terms.joint.maximizing_permutation)?;
    let [(ra, sa), (rb, sb)] = &terms.reduced;
    let u_a = orbit_unitary(ra, sa, &terms.a.minimizing_permutation)?;
    let u_b = orbit_unitary(rb, sb, &terms.b.minimizing_permutation)?;
    Ok(ConjectureWitness {
        report: weak_report(InequalityId::Conjecture, pair, &terms),
        u_ab,
        u_a,
        u_b,
    })
}

/// Smallest and largest S(U rho U^dagger || sigma) over `samples` Haar
/// unitaries.
pub fn sampled_orbit_range(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    samples: usize,
    gen: &mut SeededGenerator,
) -> Result<(f64, f64)> {
    same_dim(rho, sigma)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..samples {
        let u = random_unitary(rho.dim(), gen);
        let v = relative_entropy(&rho.conjugate(&u)?, sigma)?.to_f64();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// Random-restart local search for the minimum of S(U rho U^dagger||sigma).
///
/// Each restart starts from a Haar unitary and descends along
/// `U -> exp(i t H) U` with `H = i[U rho U^dagger, ln sigma]`, the steepest
/// direction, growing the step after an improvement and halving it otherwise.
pub fn orbit_local_min(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    restarts: usize,
    iterations: usize,
    gen: &mut SeededGenerator,
) -> Result<f64> {
    same_dim(rho, sigma)?;
    let d = rho.dim();
    let log_sigma = full_rank_eig(sigma, EigenMethod::Householder)?.map_eigenvalues(f64::ln);
    let neg_entropy: f64 = rho.spectrum().iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum();
    // S(U rho U^dagger||sigma) = -S(rho) - Tr(U rho U^dagger ln sigma)
    let rotated = |u: &ComplexMatrix| u * rho.matrix() * u.adjoint();
    let objective = |x: &ComplexMatrix| neg_entropy - x.component_mul(&log_sigma.transpose()).sum().re;

    let mut best = f64::INFINITY;
    for _ in 0..restarts.max(1) {
        let mut u = random_unitary(d, gen);
        let mut x = rotated(&u);
        let mut value = objective(&x);
        let mut step = 0.5;
        for _ in 0..iterations {
            let commutator = &x * &log_sigma - &log_sigma * &x;
            let h = commutator * c64::new(0.0, 1.0);
            let norm = h.norm();
            if norm < 1e-14 || step < 1e-12 {
                break;
            }
            let direction = HermitianMatrix::hermitian_part(&(h / c64::new(norm, 0.0)));
            let candidate = unitary_exp(&direction, step) * &u;
            let cx = rotated(&candidate);
            let v = objective(&cx);
            if v < value {
                u = candidate;
                x = cx;
                value = v;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        best = best.min(value);
    }
    Ok(best)
}
