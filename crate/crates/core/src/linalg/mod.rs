//! Dense complex linear algebra for small quantum systems.
//!
//! Tensor products use the convention `|a> (x) |b> -> a * d_B + b`, i.e. the
//! first (A) subsystem is the slow index.

mod eigen;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{domain_err, shape_err, Error, Result};

pub use eigen::{EigenMethod, SpectralDecomposition};

#[allow(non_camel_case_types)]
pub type c64 = Complex<f64>;

/// General operator in L(H, K), row-major semantics via nalgebra indexing.
pub type ComplexMatrix = DMatrix<c64>;

pub type ComplexVector = DVector<c64>;

/// Largest dimension any single matrix side may have.
pub const MAX_DIM: usize = 256;

pub const TOL_HERM: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-10;
/// Relative to the largest eigenvalue.
pub const TOL_RANK: f64 = 1e-10;
pub const TOL_SUPPORT: f64 = 1e-9;
pub(crate) const DEGENERACY_GAP: f64 = 1e-12;

/// Which factor of a bipartite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

pub fn real(x: f64) -> c64 {
    c64::new(x, 0.0)
}

/// Largest absolute entry.
pub fn max_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    max_norm(&(m - m.adjoint()))
}

fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(domain_err!("matrix has non-finite entries"))
    }
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(shape_err!("matrix is not square: {}x{}", m.nrows(), m.ncols()));
    }
    if m.nrows() == 0 {
        return Err(shape_err!("matrix is empty"));
    }
    Ok(m.nrows())
}

/// Diagonal matrix from real entries.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(values.len(), values.iter().map(|&x| real(x))))
}

/// Standard basis ket |i> in dimension `d`.
pub fn ket(d: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[i] = real(1.0);
    v
}

/// Kronecker product, `a` being the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.nrows().checked_mul(b.nrows());
    let cols = a.ncols().checked_mul(b.ncols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= MAX_DIM && c <= MAX_DIM => Ok(a.kronecker(b)),
        _ => Err(Error::Size(format!(
            "kron of {}x{} and {}x{} exceeds max_dim {MAX_DIM}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        ))),
    }
}

/// Partial trace of a `d_A * d_B` square matrix, keeping one factor.
pub fn partial_trace(m: &ComplexMatrix, dims: [usize; 2], keep: Subsystem) -> Result<ComplexMatrix> {
    let n = check_square(m)?;
    let [da, db] = dims;
    if da == 0 || db == 0 || da * db != n {
        return Err(shape_err!("dims {da}x{db} do not factor dimension {n}"));
    }
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a1, a2| {
            (0..db).map(|b| m[(a1 * db + b, a2 * db + b)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |b1, b2| {
            (0..da).map(|a| m[(a * db + b1, a * db + b2)]).sum()
        }),
    };
    Ok(out)
}

/// Hermitian operator, stored exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` if it is square, finite and Hermitian within [`TOL_HERM`];
    /// the stored matrix is the Hermitian part `(m + m^dagger) / 2`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        let defect = hermitian_defect(&m);
        if defect > TOL_HERM {
            return Err(domain_err!("matrix is not Hermitian (defect {defect:e})"));
        }
        Ok(Self::hermitian_part(&m))
    }

    pub(crate) fn hermitian_part(m: &ComplexMatrix) -> Self {
        Self((m + m.adjoint()) * real(0.5))
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        Self(diag(values))
    }

    pub fn identity(d: usize) -> Self {
        Self(ComplexMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn eig(&self) -> SpectralDecomposition {
        eig_hermitian(self)
    }
}

pub fn eig_hermitian(h: &HermitianMatrix) -> SpectralDecomposition {
    eigen::decompose(h.matrix(), EigenMethod::Householder)
}

pub fn eig_hermitian_with(h: &HermitianMatrix, method: EigenMethod) -> SpectralDecomposition {
    eigen::decompose(h.matrix(), method)
}

/// Eigendecomposition of an arbitrary matrix; fails unless it is Hermitian.
pub fn eig_matrix(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    Ok(eig_hermitian(&HermitianMatrix::new(m.clone())?))
}

/// Applies a real function to the spectrum of `h`.
///
/// Fails with a domain error if `f` returns a non-finite value on any
/// eigenvalue; callers encode their own policy for zero eigenvalues.
pub fn spectral_function(h: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(h);
    if let Some(&bad) = eig.eigenvalues().iter().find(|&&x| !f(x).is_finite()) {
        return Err(domain_err!("function undefined at eigenvalue {bad:e}"));
    }
    Ok(HermitianMatrix::hermitian_part(&eig.map_eigenvalues(f)))
}

/// exp(i t H), a unitary for Hermitian `h`.
pub fn unitary_exp(h: &HermitianMatrix, t: f64) -> ComplexMatrix {
    let eig = eig_hermitian(h);
    let v = eig.eigenvectors();
    let mut scaled = v.clone();
    for (j, &lam) in eig.eigenvalues().iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= c64::from_polar(1.0, t * lam));
    }
    scaled * v.adjoint()
}

/// A quantum state: Hermitian, positive semidefinite, unit trace, with an
/// optional tensor factorisation of its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Option<Vec<usize>>,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(m)?;
        let trace = h.matrix().trace();
        if (trace.re - 1.0).abs() > TOL_TRACE || trace.im.abs() > TOL_TRACE {
            return Err(domain_err!("trace is {trace}, expected 1"));
        }
        let min = h.eig().eigenvalues().last().copied().unwrap_or(0.0);
        if min < -TOL_PSD {
            return Err(domain_err!("not positive semidefinite (min eigenvalue {min:e})"));
        }
        Ok(Self { matrix: h.into_matrix(), dims: None })
    }

    /// Builds a state from a positive semidefinite matrix by dividing by its
    /// trace.
    pub fn normalized(m: ComplexMatrix) -> Result<Self> {
        check_square(&m)?;
        let tr = m.trace();
        if tr.re.is_nan() || tr.re <= 0.0 {
            return Err(domain_err!("cannot normalise matrix with trace {tr}"));
        }
        Self::new(m / real(tr.re))
    }

    pub fn with_dims(mut self, dims: &[usize]) -> Result<Self> {
        let prod: usize = dims.iter().product();
        if dims.is_empty() || prod != self.dim() {
            return Err(shape_err!("factorisation {dims:?} does not match dimension {}", self.dim()));
        }
        self.dims = Some(dims.to_vec());
        Ok(self)
    }

    pub fn from_diagonal(weights: &[f64]) -> Result<Self> {
        Self::new(diag(weights))
    }

    /// |psi><psi| for a (not necessarily normalised) vector.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(domain_err!("state vector has norm {norm}"));
        }
        let v = psi / real(norm);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d, d) / real(d as f64),
            dims: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dims(&self) -> Option<&[usize]> {
        self.dims.as_deref()
    }

    /// The factorisation as a bipartite `[d_A, d_B]`, if present.
    pub fn bipartite_dims(&self) -> Result<[usize; 2]> {
        match self.dims.as_deref() {
            Some(&[a, b]) => Ok([a, b]),
            Some(other) => Err(shape_err!("expected a bipartite factorisation, found {other:?}")),
            None => Err(shape_err!("state carries no subsystem factorisation")),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn as_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix(self.matrix.clone())
    }

    pub fn eig(&self) -> SpectralDecomposition {
        eigen::decompose(&self.matrix, EigenMethod::Householder)
    }

    pub fn eig_with(&self, method: EigenMethod) -> SpectralDecomposition {
        eigen::decompose(&self.matrix, method)
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        self.eig().eigenvalues().to_vec()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// True when every off-diagonal entry vanishes within `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.matrix[(r, c)].norm() <= tol))
    }

    /// Reduced state on one side of the bipartite factorisation.
    pub fn reduce(&self, keep: Subsystem) -> Result<DensityMatrix> {
        let dims = self.bipartite_dims()?;
        let m = partial_trace(&self.matrix, dims, keep)?;
        Ok(Self::from_trusted(m))
    }

    /// U rho U^dagger; the factorisation is kept.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.ncols() != self.dim() {
            return Err(shape_err!("operator with {} columns applied to dimension {}", u.ncols(), self.dim()));
        }
        let m = u * &self.matrix * u.adjoint();
        let mut out = Self::from_trusted(m);
        if u.nrows() == self.dim() {
            out.dims = self.dims.clone();
        }
        Ok(out)
    }

    /// Tensor product state, factorisation `[dim(self), dim(other)]`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let m = kron(&self.matrix, &other.matrix)?;
        Self::from_trusted(m).with_dims(&[self.dim(), other.dim()])
    }

    /// Wraps the output of a trace-preserving completely positive operation.
    /// Only the Hermitian part is kept; positivity and trace are inherited.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(hermitian_defect(&m) < 1e-8);
        Self {
            matrix: HermitianMatrix::hermitian_part(&m).into_matrix(),
            dims: None,
        }
    }
}

/// Whether supp(rho) is contained in supp(sigma).
///
/// Tested as `||(1 - P) rho (1 - P)||_max <= TOL_SUPPORT`, with `P` the
/// projector onto eigenvectors of sigma above [`TOL_RANK`] (relative).
pub fn support_contained(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<bool> {
    support_contained_with(rho, sigma, EigenMethod::Householder)
}

pub(crate) fn support_contained_with(rho: &DensityMatrix, sigma: &DensityMatrix, method: EigenMethod) -> Result<bool> {
    same_dim(rho, sigma)?;
    let eig = sigma.eig_with(method);
    Ok(leak_outside(rho, &eig) <= TOL_SUPPORT)
}

pub(crate) fn leak_outside(rho: &DensityMatrix, sigma_eig: &SpectralDecomposition) -> f64 {
    let d = rho.dim();
    let q = ComplexMatrix::identity(d, d) - sigma_eig.support_projector(TOL_RANK);
    max_norm(&(&q * rho.matrix() * &q))
}

pub(crate) fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(shape_err!("dimension mismatch: {} vs {}", a.dim(), b.dim()));
    }
    Ok(())
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    let diff = HermitianMatrix::hermitian_part(&(a.matrix() - b.matrix()));
    let sum: f64 = diff.eig().eigenvalues().iter().map(|x| x.abs()).sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}
