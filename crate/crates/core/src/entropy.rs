//! Entropies and divergences. Everything is computed in nats; [`LogBase`]
//! rescales finished values for reporting.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain_err, shape_err, Result};
use crate::linalg::{leak_outside, same_dim, DensityMatrix, EigenMethod, TOL_PSD, TOL_RANK, TOL_SUPPORT, TOL_TRACE};

/// A real number or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn finite(x: f64) -> Self {
        debug_assert!(!x.is_nan());
        ExtendedReal::Finite(x)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinite => None,
        }
    }

    /// `f64::INFINITY` for the infinite branch.
    pub fn to_f64(self) -> f64 {
        self.as_finite().unwrap_or(f64::INFINITY)
    }

    pub fn scale(self, factor: f64) -> Self {
        match self {
            ExtendedReal::Finite(x) => ExtendedReal::Finite(x * factor),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x:.16e}"),
            ExtendedReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => crate::json::Num(*x).serialize(s),
            ExtendedReal::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(ExtendedReal::Finite(x)),
            Repr::Str(s) if s == "inf" => Ok(ExtendedReal::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// Logarithm base used when reporting values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Nats,
    #[serde(rename = "2")]
    Bits,
}

impl LogBase {
    /// Multiplier taking a value in nats to this base.
    pub fn factor(self) -> f64 {
        match self {
            LogBase::Nats => 1.0,
            LogBase::Bits => std::f64::consts::LOG2_E,
        }
    }

    pub fn convert(self, nats: f64) -> f64 {
        nats * self.factor()
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "e" | "nats" => Ok(LogBase::Nats),
            "2" | "bits" => Ok(LogBase::Bits),
            other => Err(format!("unknown log base {other:?}, expected e or 2")),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Nats => "e",
            LogBase::Bits => "2",
        })
    }
}

/// A normalised probability vector. Small negative weights (down to
/// `-TOL_PSD`) are clamped to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(shape_err!("empty probability vector"));
        }
        if let Some(&w) = weights.iter().find(|w| !w.is_finite() || **w < -TOL_PSD) {
            return Err(domain_err!("invalid probability weight {w}"));
        }
        let weights: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOL_TRACE {
            return Err(domain_err!("weights sum to {sum}, expected 1"));
        }
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sorted_descending(&self) -> Self {
        let mut w = self.0.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        Self(w)
    }

    pub fn sorted_ascending(&self) -> Self {
        let mut w = self.0.clone();
        w.sort_by(|a, b| a.total_cmp(b));
        Self(w)
    }

    /// Reorders the weights so that entry `i` becomes `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&i| self.0[i]).collect())
    }

    /// Spectrum of a state, descending. Eigenvalues are already within the
    /// state tolerances, so only clamping is applied.
    pub fn spectrum_of(rho: &DensityMatrix) -> Self {
        Self(rho.spectrum().into_iter().map(|x| x.max(0.0)).collect())
    }
}

/// Shannon entropy of a weight vector, `0 log 0 = 0`.
fn shannon(weights: impl IntoIterator<Item = f64>) -> f64 {
    weights.into_iter().filter(|&x| x > 0.0).map(|x| -x * x.ln()).sum()
}

/// S(rho) = -Tr rho ln rho, clamped into [0, ln d].
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let s = shannon(rho.spectrum());
    s.clamp(0.0, (rho.dim() as f64).ln())
}

/// Quantum relative entropy S(rho || sigma) in nats; `+inf` unless
/// supp(rho) is contained in supp(sigma).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
    relative_entropy_with(rho, sigma, EigenMethod::Householder)
}

/// [`relative_entropy`] with an explicit choice of eigensolver.
pub fn relative_entropy_with(rho: &DensityMatrix, sigma: &DensityMatrix, method: EigenMethod) -> Result<ExtendedReal> {
    same_dim(rho, sigma)?;
    let rho_eig = rho.eig_with(method);
    let sigma_eig = sigma.eig_with(method);
    if leak_outside(rho, &sigma_eig) > TOL_SUPPORT {
        return Ok(ExtendedReal::Infinite);
    }

    let cut = sigma_eig.rank_cutoff(TOL_RANK);
    let overlap = rho_eig.eigenvectors().adjoint() * sigma_eig.eigenvectors();
    let mut value = 0.0;
    for (i, &p) in rho_eig.eigenvalues().iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let cross: f64 = sigma_eig
            .eigenvalues()
            .iter()
            .enumerate()
            .filter(|(_, &q)| q > cut)
            .map(|(j, &q)| overlap[(i, j)].norm_sqr() * q.ln())
            .sum();
        value += p * (p.ln() - cross);
    }
    Ok(ExtendedReal::finite(clamp_roundoff(value)))
}

// Klein's inequality makes the divergence nonnegative; only clear round-off
// is absorbed so genuine defects stay visible.
fn clamp_roundoff(x: f64) -> f64 {
    if (-1e-12..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// H(p || q) = sum p_j ln(p_j / q_j); `+inf` if some `p_j > TOL_RANK` sits on
/// a `q_j <= TOL_RANK`.
pub fn classical_relative_entropy(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<ExtendedReal> {
    divergence(p.weights(), q.weights())
}

pub(crate) fn divergence(p: &[f64], q: &[f64]) -> Result<ExtendedReal> {
    if p.len() != q.len() {
        return Err(shape_err!("length mismatch: {} vs {}", p.len(), q.len()));
    }
    let mut value = 0.0;
    for (&pj, &qj) in p.iter().zip(q) {
        if pj <= 0.0 {
            continue;
        }
        if qj <= TOL_RANK {
            if pj > TOL_RANK {
                return Ok(ExtendedReal::Infinite);
            }
            continue;
        }
        value += pj * (pj.ln() - qj.ln());
    }
    Ok(ExtendedReal::finite(clamp_roundoff(value)))
}

/// S(rho || 1/d) evaluated as ln d - S(rho).
pub fn relative_entropy_to_uniform(rho: &DensityMatrix) -> f64 {
    ((rho.dim() as f64).ln() - von_neumann_entropy(rho)).max(0.0)
}
