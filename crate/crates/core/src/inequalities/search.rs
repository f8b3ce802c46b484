//! Seeded randomised searches for violations.
//!
//! Trial `i` draws from stream `i` of the configured seed, so serial and
//! parallel runs see identical trials and reports come out in trial order.
//! Every candidate violation is re-evaluated along a second route before it
//! is counted: scalar sums over the diagonals when both states are diagonal,
//! the Jacobi eigensolver otherwise.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::orbit::{conjecture_witness, weak_superadditivity_slack_with};
use super::report::{slack_of, GapReport, InequalityId, Verdict};
use super::{
    channel_complement_gap_with, li_winter_gap_with, superadditivity_gap_with, uniform_monotonicity_gap,
};
use crate::channels::{basis_projectors, partial_trace_kraus, pinching_kraus};
use crate::entropy::{divergence, LogBase};
use crate::error::{Error, Result};
use crate::json::Num;
use crate::linalg::{EigenMethod, Subsystem};
use crate::states::{
    random_channel, random_density, random_diagonal_state, random_product_sigma, random_pure_vs_mixed,
    random_unitary, SeededGenerator, StatePair,
};

/// Family of state pairs drawn by a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateClass {
    /// Independent Dirichlet(1, ..., 1) diagonals.
    Diagonal,
    /// Independent Hilbert–Schmidt full-rank states.
    FullRank,
    /// Product pure rho against a two-term mixture, in random local bases.
    PureVsMixed,
    /// Full-rank rho against a product sigma_A (x) sigma_B.
    ProductSigma,
}

impl StateClass {
    fn full_rank_sigma(self) -> bool {
        !matches!(self, StateClass::PureVsMixed)
    }
}

impl FromStr for StateClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(StateClass::Diagonal),
            "full-rank" => Ok(StateClass::FullRank),
            "pure-vs-mixed" => Ok(StateClass::PureVsMixed),
            "product-sigma" => Ok(StateClass::ProductSigma),
            other => Err(Error::Config(format!("unknown state class {other:?}"))),
        }
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateClass::Diagonal => "diagonal",
            StateClass::FullRank => "full-rank",
            StateClass::PureVsMixed => "pure-vs-mixed",
            StateClass::ProductSigma => "product-sigma",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub inequality: InequalityId,
    pub dims: [usize; 2],
    pub trials: u64,
    pub seed: u64,
    pub class: StateClass,
    pub tol_verdict: f64,
    pub base: LogBase,
    /// Emit every trial's report, not only confirmed violations.
    pub emit_all: bool,
    /// Inline the state pair into each emitted report.
    pub with_states: bool,
}

impl SearchConfig {
    pub fn new(inequality: InequalityId, dims: [usize; 2], class: StateClass, trials: u64, seed: u64) -> Self {
        Self {
            inequality,
            dims,
            trials,
            seed,
            class,
            tol_verdict: super::TOL_VERDICT,
            base: LogBase::Nats,
            emit_all: false,
            with_states: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [da, db] = self.dims;
        if da == 0 || db == 0 || da * db > 64 {
            return Err(Error::Config(format!("unsupported dims {da}x{db}")));
        }
        if self.tol_verdict.is_nan() || self.tol_verdict < 0.0 {
            return Err(Error::Config(format!("invalid verdict tolerance {}", self.tol_verdict)));
        }
        let needs_full_rank = matches!(
            self.inequality,
            InequalityId::WeakSuperadditivity | InequalityId::Conjecture | InequalityId::LiWinter
        );
        if needs_full_rank && !self.class.full_rank_sigma() {
            return Err(Error::Config(format!(
                "{} needs a full-rank reference state; class {} does not provide one",
                self.inequality, self.class
            )));
        }
        if self.class == StateClass::PureVsMixed && (da < 2 || db < 2) {
            return Err(Error::Config("pure-vs-mixed needs both factors of dimension >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub trials: u64,
    /// Violations confirmed by the second evaluation route.
    pub violations: u64,
    /// Violations the second route did not reproduce; excluded above.
    pub unconfirmed: u64,
    /// Trials whose slack was inf - inf; excluded from all statistics.
    pub indeterminate: u64,
    pub min_slack: Num,
    pub max_slack: Num,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Emitted reports, in trial order.
    pub reports: Vec<GapReport>,
    pub summary: SearchSummary,
}

struct Trial {
    slack: f64,
    verdict: Verdict,
    confirmed: bool,
    report: Option<GapReport>,
}

fn draw_pair(config: &SearchConfig, gen: &mut SeededGenerator) -> Result<StatePair> {
    let dims = config.dims;
    let d = dims[0] * dims[1];
    match config.class {
        StateClass::Diagonal => {
            let rho = random_diagonal_state(d, gen)?;
            let sigma = random_diagonal_state(d, gen)?;
            StatePair::bipartite(rho, sigma, dims)
        }
        StateClass::FullRank => {
            let rho = random_density(d, d, gen)?;
            let sigma = random_density(d, d, gen)?;
            StatePair::bipartite(rho, sigma, dims)
        }
        StateClass::PureVsMixed => random_pure_vs_mixed(dims, gen),
        StateClass::ProductSigma => random_product_sigma(dims, gen),
    }
}

/// Evaluates one inequality on a pair. Channels needed by the inequality
/// are drawn from `gen` after the pair.
fn evaluate(
    id: InequalityId,
    pair: &StatePair,
    gen: &mut SeededGenerator,
    method: EigenMethod,
) -> Result<GapReport> {
    let d = pair.dim();
    match id {
        InequalityId::Superadditivity => superadditivity_gap_with(pair, method),
        InequalityId::ChannelComplement => {
            let k = partial_trace_kraus(pair.rho.bipartite_dims()?, Subsystem::B)?;
            channel_complement_gap_with(&pair.rho, &pair.sigma, &k, method)
        }
        InequalityId::LiWinter => {
            let k = random_channel(d, d, 2, gen)?;
            li_winter_gap_with(&pair.rho, &pair.sigma, &k, method)
        }
        InequalityId::Uniform => {
            let basis = random_unitary(d, gen);
            let k = pinching_kraus(&basis_projectors(&basis))?;
            uniform_monotonicity_gap(&pair.rho, &k)
        }
        InequalityId::WeakSuperadditivity => weak_superadditivity_slack_with(pair, method),
        InequalityId::Conjecture => match method {
            EigenMethod::Householder => Ok(conjecture_witness(pair)?.report),
            EigenMethod::Jacobi => {
                let mut r = weak_superadditivity_slack_with(pair, method)?;
                r.id = InequalityId::Conjecture;
                Ok(r)
            }
        },
    }
}

fn marginals(w: &[f64], [da, db]: [usize; 2]) -> (Vec<f64>, Vec<f64>) {
    let a = (0..da).map(|i| (0..db).map(|j| w[i * db + j]).sum()).collect();
    let b = (0..db).map(|j| (0..da).map(|i| w[i * db + j]).sum()).collect();
    (a, b)
}

fn sorted(mut v: Vec<f64>, descending: bool) -> Vec<f64> {
    v.sort_by(|a, b| if descending { b.total_cmp(a) } else { a.total_cmp(b) });
    v
}

/// Slack from scalar sums over the diagonals, for commuting diagonal pairs.
fn diagonal_slack(id: InequalityId, pair: &StatePair) -> Result<Option<f64>> {
    let dims = pair.rho.bipartite_dims()?;
    let p = pair.rho.diagonal();
    let q = pair.sigma.diagonal();
    let (pa, pb) = marginals(&p, dims);
    let (qa, qb) = marginals(&q, dims);
    let (lhs, rhs) = match id {
        InequalityId::Superadditivity | InequalityId::ChannelComplement => {
            (divergence(&p, &q)?, vec![divergence(&pa, &qa)?, divergence(&pb, &qb)?])
        }
        InequalityId::WeakSuperadditivity | InequalityId::Conjecture => (
            divergence(&sorted(p, true), &sorted(q, false))?,
            vec![
                divergence(&sorted(pa, true), &sorted(qa, true))?,
                divergence(&sorted(pb, true), &sorted(qb, true))?,
            ],
        ),
        _ => return Ok(None),
    };
    Ok(Some(slack_of(lhs, &rhs)))
}

fn recheck(id: InequalityId, pair: &StatePair, channel_gen: SeededGenerator) -> Result<f64> {
    let diagonal = pair.rho.is_diagonal(1e-15) && pair.sigma.is_diagonal(1e-15);
    if diagonal {
        if let Some(s) = diagonal_slack(id, pair)? {
            return Ok(s);
        }
    }
    let mut gen = channel_gen;
    Ok(evaluate(id, pair, &mut gen, EigenMethod::Jacobi)?.slack())
}

fn run_trial(config: &SearchConfig, index: u64) -> Result<Trial> {
    let mut gen = SeededGenerator::new(config.seed, index);
    let pair = draw_pair(config, &mut gen)?;
    let channel_gen = gen.clone();
    let report = evaluate(config.inequality, &pair, &mut gen, EigenMethod::Householder)?
        .in_base(config.base, config.tol_verdict)
        .with_provenance(config.seed, index);

    let mut report = report;
    let mut confirmed = false;
    if report.verdict.is_violated() {
        let second = config.base.convert(recheck(config.inequality, &pair, channel_gen)?);
        confirmed = second < -config.tol_verdict;
        report.recheck_slack = Some(Num(second));
    }
    if config.with_states {
        report.states = Some(pair.to_json());
    }
    let emit = config.emit_all || confirmed;
    Ok(Trial {
        slack: report.slack(),
        verdict: report.verdict,
        confirmed,
        report: emit.then_some(report),
    })
}

/// Runs `config.trials` independent trials in parallel.
pub fn violation_search(config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let start = Instant::now();
    let trials: Vec<Trial> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect::<Result<_>>()?;

    let mut summary = SearchSummary {
        trials: config.trials,
        violations: 0,
        unconfirmed: 0,
        indeterminate: 0,
        min_slack: Num(f64::INFINITY),
        max_slack: Num(f64::NEG_INFINITY),
        wall_time_s: 0.0,
    };
    let mut reports = Vec::new();
    for t in trials {
        match (t.verdict, t.confirmed) {
            (Verdict::Indeterminate, _) => summary.indeterminate += 1,
            (Verdict::Violated, true) => summary.violations += 1,
            (Verdict::Violated, false) => summary.unconfirmed += 1,
            (Verdict::Holds, _) => {}
        }
        if t.verdict != Verdict::Indeterminate {
            summary.min_slack = Num(summary.min_slack.0.min(t.slack));
            summary.max_slack = Num(summary.max_slack.0.max(t.slack));
        }
        reports.extend(t.report);
    }
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(SearchOutcome { reports, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_diagonal_violations() {
        let config = SearchConfig::new(InequalityId::Superadditivity, [2, 2], StateClass::Diagonal, 500, 7);
        let out = violation_search(&config).unwrap();
        assert!(out.summary.violations > 0);
        assert_eq!(out.summary.unconfirmed, 0);
        assert_eq!(out.reports.len() as u64, out.summary.violations);
        assert!(out.reports.windows(2).all(|w| w[0].stream < w[1].stream));
        for r in &out.reports {
            let recheck = r.recheck_slack.unwrap().0;
            assert!((recheck - r.slack()).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_vs_mixed_always_violates() {
        let config = SearchConfig::new(InequalityId::Superadditivity, [2, 3], StateClass::PureVsMixed, 50, 1);
        let out = violation_search(&config).unwrap();
        assert_eq!(out.summary.violations, 50);
    }

    #[test]
    fn config_errors() {
        let config = SearchConfig::new(InequalityId::WeakSuperadditivity, [2, 2], StateClass::PureVsMixed, 5, 1);
        assert!(matches!(violation_search(&config), Err(Error::Config(_))));
        assert!(matches!("gaussian".parse::<StateClass>(), Err(Error::Config(_))));
        let mut config = SearchConfig::new(InequalityId::Superadditivity, [2, 2], StateClass::Diagonal, 5, 1);
        config.tol_verdict = f64::NAN;
        assert!(violation_search(&config).is_err());
    }

    #[test]
    fn every_inequality_runs() {
        for id in InequalityId::ALL {
            let mut config = SearchConfig::new(id, [2, 2], StateClass::FullRank, 20, 3);
            config.emit_all = true;
            let out = violation_search(&config).unwrap();
            assert_eq!(out.reports.len(), 20, "{id}");
            if id != InequalityId::Superadditivity && id != InequalityId::ChannelComplement && id != InequalityId::LiWinter {
                assert_eq!(out.summary.violations, 0, "{id}");
            }
        }
    }

    #[test]
    fn deterministic_stream() {
        let mut config = SearchConfig::new(InequalityId::Superadditivity, [2, 2], StateClass::FullRank, 200, 99);
        config.emit_all = true;
        config.with_states = true;
        let a = violation_search(&config).unwrap();
        let b = violation_search(&config).unwrap();
        let lines = |o: &SearchOutcome| o.reports.iter().map(|r| serde_json::to_string(r).unwrap()).collect::<Vec<_>>();
        assert_eq!(lines(&a), lines(&b));
    }
}
