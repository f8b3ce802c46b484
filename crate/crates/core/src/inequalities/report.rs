use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::entropy::{ExtendedReal, LogBase};
use crate::error::Error;
use crate::json::Num;
use crate::linalg::ComplexMatrix;
use crate::states::StatePairJson;

/// Slack below `-TOL_VERDICT` certifies a violation.
pub const TOL_VERDICT: f64 = 1e-8;

/// The relative-entropy (in)equalities the engine evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InequalityId {
    /// S(rho_AB||sigma_AB) >= S(rho_A||sigma_A) + S(rho_B||sigma_B)
    #[serde(rename = "SUPERADD_EQ1")]
    Superadditivity,
    /// S(rho||sigma) >= S(Phi rho||Phi sigma) + S(Phi^ rho||Phi^ sigma)
    #[serde(rename = "CHANNEL_COMP_EQ3")]
    ChannelComplement,
    /// S(rho||sigma) >= S(Phi rho||Phi sigma) + S(rho||Psi Phi rho)
    #[serde(rename = "LI_WINTER_EQ4")]
    LiWinter,
    /// S(rho||1/d) >= S(Phi rho||1/d) for unital Phi
    #[serde(rename = "UNIFORM_EQ2")]
    Uniform,
    /// H(l_down(rho_AB)||l_up(sigma_AB)) >= H(l_down(rho_A)||l_down(sigma_A)) + (B)
    #[serde(rename = "WEAK_SUPERADD_EQ9")]
    WeakSuperadditivity,
    /// Superadditivity after optimal local and global unitary rotations.
    #[serde(rename = "CONJ_EQ8")]
    Conjecture,
}

impl InequalityId {
    pub const ALL: [InequalityId; 6] = [
        InequalityId::Superadditivity,
        InequalityId::ChannelComplement,
        InequalityId::LiWinter,
        InequalityId::Uniform,
        InequalityId::WeakSuperadditivity,
        InequalityId::Conjecture,
    ];

    pub fn code(self) -> &'static str {
        match self {
            InequalityId::Superadditivity => "SUPERADD_EQ1",
            InequalityId::ChannelComplement => "CHANNEL_COMP_EQ3",
            InequalityId::LiWinter => "LI_WINTER_EQ4",
            InequalityId::Uniform => "UNIFORM_EQ2",
            InequalityId::WeakSuperadditivity => "WEAK_SUPERADD_EQ9",
            InequalityId::Conjecture => "CONJ_EQ8",
        }
    }

    /// Short name used on the command line.
    pub fn alias(self) -> &'static str {
        match self {
            InequalityId::Superadditivity => "superadd",
            InequalityId::ChannelComplement => "channel-comp",
            InequalityId::LiWinter => "li-winter",
            InequalityId::Uniform => "uniform",
            InequalityId::WeakSuperadditivity => "weak-superadd",
            InequalityId::Conjecture => "conj",
        }
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        InequalityId::ALL
            .into_iter()
            .find(|id| s.eq_ignore_ascii_case(id.code()) || s == id.alias())
            .ok_or_else(|| Error::Config(format!("unknown inequality id {s:?}")))
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Indeterminate,
}

impl Verdict {
    /// NaN slack (from inf - inf) is indeterminate; anything below `-tol`,
    /// including `-inf`, is a violation.
    pub fn from_slack(slack: f64, tol: f64) -> Self {
        if slack.is_nan() {
            Verdict::Indeterminate
        } else if slack < -tol {
            Verdict::Violated
        } else {
            Verdict::Holds
        }
    }

    pub fn is_violated(self) -> bool {
        self == Verdict::Violated
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// `lhs - sum(rhs)` over the extended reals. `inf - inf` is NaN; a finite
/// left side against an infinite right side is `-inf`.
pub fn slack_of(lhs: ExtendedReal, rhs: &[ExtendedReal]) -> f64 {
    let rhs_infinite = rhs.iter().any(|x| !x.is_finite());
    match (lhs, rhs_infinite) {
        (ExtendedReal::Infinite, true) => f64::NAN,
        (ExtendedReal::Infinite, false) => f64::INFINITY,
        (ExtendedReal::Finite(_), true) => f64::NEG_INFINITY,
        (ExtendedReal::Finite(l), false) => l - rhs.iter().map(|x| x.to_f64()).sum::<f64>(),
    }
}

/// SHA-256 over the bit patterns of the input matrices, truncated to 128
/// bits and hex encoded.
pub fn digest_of(id: InequalityId, inputs: &[&ComplexMatrix]) -> String {
    let mut h = Sha256::new();
    h.update(id.code().as_bytes());
    for m in inputs {
        h.update((m.nrows() as u64).to_le_bytes());
        h.update((m.ncols() as u64).to_le_bytes());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                h.update(m[(r, c)].re.to_bits().to_le_bytes());
                h.update(m[(r, c)].im.to_bits().to_le_bytes());
            }
        }
    }
    hex::encode(&h.finalize()[..16])
}

/// Both sides of an inequality, its slack and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub id: InequalityId,
    pub lhs: ExtendedReal,
    pub rhs: Vec<ExtendedReal>,
    pub slack: Num,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream: Option<u64>,
    pub digest: String,
    /// Slack from the independent second evaluation of a violation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recheck_slack: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<StatePairJson>,
}

impl GapReport {
    pub fn new(id: InequalityId, lhs: ExtendedReal, rhs: Vec<ExtendedReal>, digest: String) -> Self {
        let slack = slack_of(lhs, &rhs);
        Self {
            id,
            lhs,
            rhs,
            slack: Num(slack),
            verdict: Verdict::from_slack(slack, TOL_VERDICT),
            seed: None,
            stream: None,
            digest,
            recheck_slack: None,
            states: None,
        }
    }

    pub fn slack(&self) -> f64 {
        self.slack.0
    }

    /// Re-derives the verdict at another tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.verdict = Verdict::from_slack(self.slack.0, tol);
        self
    }

    pub fn with_provenance(mut self, seed: u64, stream: u64) -> Self {
        self.seed = Some(seed);
        self.stream = Some(stream);
        self
    }

    /// Rescales every value from nats into `base` and re-derives the
    /// verdict at `tol`, which is read in the new units.
    pub fn in_base(mut self, base: LogBase, tol: f64) -> Self {
        let f = base.factor();
        self.lhs = self.lhs.scale(f);
        self.rhs = self.rhs.iter().map(|x| x.scale(f)).collect();
        self.slack = Num(self.slack.0 * f);
        self.recheck_slack = self.recheck_slack.map(|x| Num(x.0 * f));
        self.with_tolerance(tol)
    }

    /// "holds (within tolerance)" for slacks in `[-tol, 0)`.
    pub fn verdict_label(&self) -> String {
        match self.verdict {
            Verdict::Holds if self.slack.0 < 0.0 => "holds (within tolerance)".into(),
            v => v.to_string(),
        }
    }
}
