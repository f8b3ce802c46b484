//! The inequality engine: each relative-entropy (in)equality evaluated as a
//! signed slack `lhs - sum(rhs)` with a verdict.

mod orbit;
mod report;
mod search;

pub use orbit::{
    conjecture_witness, orbit_local_min, orbit_unitary, sampled_orbit_range, unitary_orbit_extrema,
    weak_superadditivity_slack, ConjectureWitness, OrbitExtrema,
};
pub use report::{digest_of, slack_of, GapReport, InequalityId, Verdict, TOL_VERDICT};
pub use search::{violation_search, SearchConfig, SearchOutcome, SearchSummary, StateClass};

use crate::channels::{apply_channel, apply_complementary, petz_recovery, KrausSet, TOL_CHANNEL};
use crate::entropy::{relative_entropy_to_uniform, relative_entropy_with, ExtendedReal};
use crate::error::{domain_err, shape_err, Result};
use crate::linalg::{max_norm, same_dim, DensityMatrix, EigenMethod, Subsystem};
use crate::states::StatePair;

/// Tolerance on `Psi(Phi(sigma)) = sigma` before a recovery slack is reported.
pub const TOL_RECOVERY: f64 = 1e-8;

/// S(rho_AB||sigma_AB) against S(rho_A||sigma_A) + S(rho_B||sigma_B).
pub fn superadditivity_gap(pair: &StatePair) -> Result<GapReport> {
    superadditivity_gap_with(pair, EigenMethod::Householder)
}

pub fn superadditivity_gap_with(pair: &StatePair, method: EigenMethod) -> Result<GapReport> {
    let (rho, sigma) = (&pair.rho, &pair.sigma);
    let dims = rho.bipartite_dims()?;
    if sigma.bipartite_dims()? != dims {
        return Err(shape_err!("rho and sigma carry different factorisations"));
    }
    let lhs = relative_entropy_with(rho, sigma, method)?;
    let rhs = [Subsystem::A, Subsystem::B]
        .into_iter()
        .map(|side| relative_entropy_with(&rho.reduce(side)?, &sigma.reduce(side)?, method))
        .collect::<Result<Vec<_>>>()?;
    let digest = digest_of(InequalityId::Superadditivity, &[rho.matrix(), sigma.matrix()]);
    Ok(GapReport::new(InequalityId::Superadditivity, lhs, rhs, digest))
}

fn check_channel_input(k: &KrausSet, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    same_dim(rho, sigma)?;
    if rho.dim() != k.dim_in() {
        return Err(shape_err!("channel on dimension {} but states of dimension {}", k.dim_in(), rho.dim()));
    }
    Ok(())
}

/// S(rho||sigma) against S(Phi rho||Phi sigma) + S(Phi^ rho||Phi^ sigma).
pub fn channel_complement_gap(rho: &DensityMatrix, sigma: &DensityMatrix, k: &KrausSet) -> Result<GapReport> {
    channel_complement_gap_with(rho, sigma, k, EigenMethod::Householder)
}

pub fn channel_complement_gap_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    k: &KrausSet,
    method: EigenMethod,
) -> Result<GapReport> {
    check_channel_input(k, rho, sigma)?;
    let lhs = relative_entropy_with(rho, sigma, method)?;
    let out = relative_entropy_with(&apply_channel(k, rho)?, &apply_channel(k, sigma)?, method)?;
    let env = relative_entropy_with(&apply_complementary(k, rho)?, &apply_complementary(k, sigma)?, method)?;
    let digest = digest_of(InequalityId::ChannelComplement, &kraus_digest_inputs(rho, sigma, k));
    Ok(GapReport::new(InequalityId::ChannelComplement, lhs, vec![out, env], digest))
}

fn kraus_digest_inputs<'a>(
    rho: &'a DensityMatrix,
    sigma: &'a DensityMatrix,
    k: &'a KrausSet,
) -> Vec<&'a crate::linalg::ComplexMatrix> {
    let mut v = vec![rho.matrix(), sigma.matrix()];
    v.extend(k.operators());
    v
}

/// S(rho||sigma) against S(Phi rho||Phi sigma) + S(rho||Psi(Phi(rho))) with
/// Psi the Petz recovery map of `k` at `sigma`.
///
/// The recovery condition `Psi(Phi(sigma)) = sigma` is verified within
/// [`TOL_RECOVERY`] before anything is evaluated. The slack is exploratory
/// data; no verdict about the open recovery question is implied.
pub fn li_winter_gap(rho: &DensityMatrix, sigma: &DensityMatrix, k: &KrausSet) -> Result<GapReport> {
    li_winter_gap_with(rho, sigma, k, EigenMethod::Householder)
}

pub fn li_winter_gap_with(rho: &DensityMatrix, sigma: &DensityMatrix, k: &KrausSet, method: EigenMethod) -> Result<GapReport> {
    check_channel_input(k, rho, sigma)?;
    let recovery = petz_recovery(k, sigma)?;
    let phi_sigma = apply_channel(k, sigma)?;
    let back = apply_channel(&recovery, &phi_sigma)?;
    let err = max_norm(&(back.matrix() - sigma.matrix()));
    if err > TOL_RECOVERY {
        return Err(domain_err!("recovery map misses sigma by {err:e}"));
    }
    let phi_rho = apply_channel(k, rho)?;
    let recovered = apply_channel(&recovery, &phi_rho)?;
    let lhs = relative_entropy_with(rho, sigma, method)?;
    let rhs = vec![
        relative_entropy_with(&phi_rho, &phi_sigma, method)?,
        relative_entropy_with(rho, &recovered, method)?,
    ];
    let digest = digest_of(InequalityId::LiWinter, &kraus_digest_inputs(rho, sigma, k));
    Ok(GapReport::new(InequalityId::LiWinter, lhs, rhs, digest))
}

/// S(rho||1/d) against S(Phi rho||1/d) for a unital channel.
pub fn uniform_monotonicity_gap(rho: &DensityMatrix, k: &KrausSet) -> Result<GapReport> {
    if k.dim_in() != k.dim_out() {
        return Err(shape_err!("channel {} -> {} is not square", k.dim_in(), k.dim_out()));
    }
    if rho.dim() != k.dim_in() {
        return Err(shape_err!("channel on dimension {} applied to dimension {}", k.dim_in(), rho.dim()));
    }
    if !k.is_unital(TOL_CHANNEL) {
        return Err(domain_err!("channel does not fix the maximally mixed state"));
    }
    let lhs = ExtendedReal::finite(relative_entropy_to_uniform(rho));
    let rhs = vec![ExtendedReal::finite(relative_entropy_to_uniform(&apply_channel(k, rho)?))];
    let mut inputs = vec![rho.matrix()];
    inputs.extend(k.operators());
    Ok(GapReport::new(InequalityId::Uniform, lhs, rhs, digest_of(InequalityId::Uniform, &inputs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{partial_trace_kraus, KrausSet};
    use crate::linalg::{c64, real, ComplexMatrix};
    use crate::states::{example1_states, example2_states, hayashi_pair, random_channel, random_density, SeededGenerator};

    // oracle: scalar divergence of diagonal weights
    fn h(p: &[f64], q: &[f64]) -> f64 {
        p.iter().zip(q).map(|(a, b)| a * (a / b).ln()).sum()
    }

    fn example2_oracle() -> (f64, f64, f64) {
        let r = [0.1568, 0.0804, 0.7270, 0.0358];
        let s = [0.3061, 0.1713, 0.4243, 0.0983];
        let ra = [r[0] + r[1], r[2] + r[3]];
        let rb = [r[0] + r[2], r[1] + r[3]];
        let sa = [s[0] + s[1], s[2] + s[3]];
        let sb = [s[0] + s[2], s[1] + s[3]];
        (h(&r, &s), h(&ra, &sa), h(&rb, &sb))
    }

    #[test]
    fn superadditivity_example1() {
        let r = superadditivity_gap(&example1_states(0.5, 2, 2).unwrap()).unwrap();
        assert!((r.slack() - 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn superadditivity_example2() {
        let (joint, a, b) = example2_oracle();
        assert!((joint - 0.1896137497761584).abs() < 1e-15);
        assert!((a - 0.12256555004751168).abs() < 1e-15);
        assert!((b - 0.07068927064407184).abs() < 1e-15);
        let r = superadditivity_gap(&example2_states()).unwrap();
        assert!((r.lhs.to_f64() - joint).abs() < 1e-14);
        assert!((r.rhs[0].to_f64() - a).abs() < 1e-14);
        assert!((r.rhs[1].to_f64() - b).abs() < 1e-14);
        assert!((r.slack() - (joint - a - b)).abs() < 1e-14);
        assert!((r.slack() + 0.003641070915425).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn superadditivity_product_sigma_holds() {
        let mut gen = SeededGenerator::new(11, 0);
        for _ in 0..50 {
            let rho = random_density(4, 4, &mut gen).unwrap();
            let sa = random_density(2, 2, &mut gen).unwrap();
            let sb = random_density(2, 2, &mut gen).unwrap();
            let pair = StatePair::bipartite(rho, sa.tensor(&sb).unwrap(), [2, 2]).unwrap();
            let r = superadditivity_gap(&pair).unwrap();
            assert!(r.slack() >= -1e-9);
            assert_eq!(r.verdict, Verdict::Holds);
        }
    }

    #[test]
    fn superadditivity_needs_factorisation() {
        let rho = DensityMatrix::maximally_mixed(4);
        let pair = StatePair::new(rho.clone(), rho).unwrap();
        assert!(superadditivity_gap(&pair).is_err());
    }

    #[test]
    fn channel_complement_examples() {
        let mut gen = SeededGenerator::new(3, 0);
        let rho = random_density(3, 3, &mut gen).unwrap();
        let sigma = random_density(3, 3, &mut gen).unwrap();
        let r = channel_complement_gap(&rho, &sigma, &KrausSet::identity(3)).unwrap();
        assert!(r.slack().abs() < 1e-12);
        assert_eq!(r.rhs[1], ExtendedReal::Finite(0.0));
        assert_eq!(r.verdict, Verdict::Holds);

        let pair = example2_states();
        let k = partial_trace_kraus([2, 2], Subsystem::B).unwrap();
        let r = channel_complement_gap(&pair.rho, &pair.sigma, &k).unwrap();
        let s = superadditivity_gap(&pair).unwrap();
        assert!((r.slack() - s.slack()).abs() < 1e-9);
        assert_eq!(r.verdict, Verdict::Violated);

        let (pair, pinch) = hayashi_pair(3, &mut gen).unwrap();
        let r = channel_complement_gap(&pair.rho, &pair.sigma, &pinch).unwrap();
        assert!((r.rhs[0].to_f64() - r.lhs.to_f64()).abs() < 1e-10);
        assert!(r.rhs[1].to_f64() > 0.0);
        assert_eq!(r.verdict, Verdict::Violated);

        assert!(channel_complement_gap(&rho, &sigma, &KrausSet::identity(2)).is_err());
    }

    #[test]
    fn li_winter_examples() {
        let mut gen = SeededGenerator::new(4, 0);
        let rho = random_density(2, 2, &mut gen).unwrap();
        let sigma = random_density(2, 2, &mut gen).unwrap();
        let r = li_winter_gap(&rho, &sigma, &KrausSet::identity(2)).unwrap();
        assert!(r.slack().abs() < 1e-10);

        let k = random_channel(2, 2, 2, &mut gen).unwrap();
        let r = li_winter_gap(&sigma, &sigma, &k).unwrap();
        assert!(r.lhs.to_f64().abs() < 1e-12);
        assert!(r.rhs.iter().all(|x| x.to_f64().abs() < 1e-9));
        assert!(r.slack().abs() < 1e-9);

        let r = li_winter_gap(&rho, &sigma, &k).unwrap();
        assert!(r.slack().is_finite());

        let pure = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(li_winter_gap(&rho, &pure, &k).is_err());
    }

    #[test]
    fn uniform_examples() {
        let rho = DensityMatrix::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[real(0.7), c64::new(0.2, 0.1), c64::new(0.2, -0.1), real(0.3)],
        ))
        .unwrap();
        let r = uniform_monotonicity_gap(&rho, &KrausSet::identity(2)).unwrap();
        assert_eq!(r.slack(), 0.0);

        let deph = KrausSet::new(vec![crate::linalg::diag(&[1.0, 0.0]), crate::linalg::diag(&[0.0, 1.0])]).unwrap();
        let r = uniform_monotonicity_gap(&rho, &deph).unwrap();
        assert!(r.slack() > 0.0);

        let amp = KrausSet::new(vec![
            ComplexMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(0.5f64.sqrt())]),
            ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(0.5f64.sqrt()), real(0.0), real(0.0)]),
        ])
        .unwrap();
        assert!(matches!(uniform_monotonicity_gap(&rho, &amp), Err(crate::Error::Domain(_))));
        let trace = partial_trace_kraus([2, 2], Subsystem::B).unwrap();
        assert!(uniform_monotonicity_gap(&DensityMatrix::maximally_mixed(4), &trace).is_err());
    }

    #[test]
    fn second_path_agrees() {
        let mut gen = SeededGenerator::new(9, 0);
        let pair = StatePair::bipartite(
            random_density(4, 4, &mut gen).unwrap(),
            random_density(4, 4, &mut gen).unwrap(),
            [2, 2],
        )
        .unwrap();
        let a = superadditivity_gap(&pair).unwrap();
        let b = superadditivity_gap_with(&pair, EigenMethod::Jacobi).unwrap();
        assert!((a.slack() - b.slack()).abs() < 1e-12);
    }
}
