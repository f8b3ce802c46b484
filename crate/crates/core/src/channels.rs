//! Quantum channels in Kraus form, their Stinespring dilations and
//! complementary channels, plus the special channels used to analyse
//! relative-entropy inequalities.
//!
//! The environment of a channel with `K` Kraus operators is `C^K` with the
//! standard basis, indexed in Kraus-list order. The Stinespring output space
//! is `K_out (x) C^K` with the output system as the slow index.

use serde::{Deserialize, Serialize};

use crate::error::{domain_err, shape_err, Result};
use crate::json::MatrixJson;
use crate::linalg::{
    c64, eig_hermitian, max_norm, real, spectral_function, ComplexMatrix, DensityMatrix,
    HermitianMatrix, Subsystem, MAX_DIM, TOL_RANK,
};

/// Tolerance for completeness, isometry and projector checks.
pub const TOL_CHANNEL: f64 = 1e-9;

/// Largest exponent accepted by [`canonical_state`].
pub const MAX_EXPONENT: f64 = 700.0;

/// Outcome of a completeness check `sum M^dagger M = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completeness {
    /// `||sum M^dagger M - 1||_max`
    pub defect: f64,
    pub passes: bool,
}

/// Checks shapes and the completeness relation of a list of Kraus operators.
pub fn validate_kraus(operators: &[ComplexMatrix]) -> Result<Completeness> {
    let (_, dim_in) = kraus_shape(operators)?;
    let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
    for m in operators {
        sum += m.adjoint() * m;
    }
    let defect = max_norm(&(sum - ComplexMatrix::identity(dim_in, dim_in)));
    Ok(Completeness { defect, passes: defect <= TOL_CHANNEL })
}

fn kraus_shape(operators: &[ComplexMatrix]) -> Result<(usize, usize)> {
    let first = operators.first().ok_or_else(|| shape_err!("empty Kraus list"))?;
    let shape = first.shape();
    if shape.0 == 0 || shape.1 == 0 {
        return Err(shape_err!("empty Kraus operator"));
    }
    if let Some(bad) = operators.iter().find(|m| m.shape() != shape) {
        return Err(shape_err!("Kraus operators disagree in shape: {:?} vs {:?}", shape, bad.shape()));
    }
    if operators.iter().any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(domain_err!("Kraus operator has non-finite entries"));
    }
    Ok(shape)
}

/// A trace-preserving completely positive map `X -> sum M X M^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
}

impl KrausSet {
    /// Fails with a domain error unless the operators are complete within
    /// [`TOL_CHANNEL`].
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let check = validate_kraus(&operators)?;
        if !check.passes {
            return Err(domain_err!("Kraus operators are not complete (defect {:e})", check.defect));
        }
        let (dim_out, dim_in) = operators[0].shape();
        Ok(Self { operators, dim_in, dim_out })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(d, d)],
            dim_in: d,
            dim_out: d,
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Number of Kraus operators, i.e. the environment dimension K.
    pub fn env_dim(&self) -> usize {
        self.operators.len()
    }

    pub fn completeness(&self) -> Completeness {
        validate_kraus(&self.operators).expect("validated on construction")
    }

    /// `sum M X M^dagger` on an arbitrary operator.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(shape_err!("channel on dimension {} applied to a {:?} operator", self.dim_in, x.shape()));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for m in &self.operators {
            out += m * x * m.adjoint();
        }
        Ok(out)
    }

    /// Adjoint (Heisenberg-picture) map `Y -> sum M^dagger Y M`.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.shape() != (self.dim_out, self.dim_out) {
            return Err(shape_err!("adjoint map on dimension {} applied to a {:?} operator", self.dim_out, y.shape()));
        }
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for m in &self.operators {
            out += m.adjoint() * y * m;
        }
        Ok(out)
    }

    /// `(Phi (x) id)(|Omega><Omega|)` with `|Omega> = sum_i |i>|i>` unnormalised.
    pub fn choi(&self) -> ComplexMatrix {
        let (dout, din) = (self.dim_out, self.dim_in);
        let mut choi = ComplexMatrix::zeros(dout * din, dout * din);
        for i in 0..din {
            for j in 0..din {
                let mut unit = ComplexMatrix::zeros(din, din);
                unit[(i, j)] = real(1.0);
                let block = self.apply_matrix(&unit).expect("shape matches");
                for r in 0..dout {
                    for c in 0..dout {
                        choi[(r * din + i, c * din + j)] = block[(r, c)];
                    }
                }
            }
        }
        choi
    }

    /// Channel equality: Choi matrices agree within `tol` in max-norm.
    pub fn same_channel(&self, other: &KrausSet, tol: f64) -> bool {
        self.dim_in == other.dim_in && self.dim_out == other.dim_out && max_norm(&(self.choi() - other.choi())) <= tol
    }

    /// Whether the maximally mixed state is a fixed point.
    pub fn is_unital(&self, tol: f64) -> bool {
        if self.dim_in != self.dim_out {
            return false;
        }
        let d = self.dim_in;
        let mixed = ComplexMatrix::identity(d, d) / real(d as f64);
        max_norm(&(self.apply_matrix(&mixed).expect("square") - mixed)) <= tol
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self.operators.iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn from_json(json: &ChannelJson) -> Result<Self> {
        let ops = json
            .kraus
            .iter()
            .map(|m| m.to_matrix_with(Some((json.dim_out, json.dim_in))))
            .collect::<Result<Vec<_>>>()?;
        let set = Self::new(ops)?;
        if set.dim_in != json.dim_in || set.dim_out != json.dim_out {
            return Err(shape_err!(
                "declared {}->{} but operators are {}x{}",
                json.dim_in,
                json.dim_out,
                set.dim_out,
                set.dim_in
            ));
        }
        Ok(set)
    }
}

/// `{"dim_in": n, "dim_out": m, "kraus": [matrix-json, ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

/// Applies the channel to a state.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_trusted(k.apply_matrix(rho.matrix())?))
}

/// A linear isometry `V^dagger V = 1`, with its output space factorised as
/// `[d_out, d_env]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: ComplexMatrix,
    out_dims: [usize; 2],
}

impl Isometry {
    pub fn new(matrix: ComplexMatrix, out_dims: [usize; 2]) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if out_dims[0] * out_dims[1] != rows {
            return Err(shape_err!("output factorisation {out_dims:?} does not match {rows} rows"));
        }
        let defect = max_norm(&(matrix.adjoint() * &matrix - ComplexMatrix::identity(cols, cols)));
        if defect > TOL_CHANNEL {
            return Err(domain_err!("not an isometry (defect {defect:e})"));
        }
        Ok(Self { matrix, out_dims })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim_in(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn out_dims(&self) -> [usize; 2] {
        self.out_dims
    }

    /// V rho V^dagger, carrying the output factorisation.
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        rho.conjugate(&self.matrix)?.with_dims(&self.out_dims)
    }

    /// Tr_E(V rho V^dagger): the channel output.
    pub fn trace_env(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.conjugate(rho)?.reduce(Subsystem::A)
    }

    /// Tr_K(V rho V^dagger): the environment's output.
    pub fn trace_output(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.conjugate(rho)?.reduce(Subsystem::B)
    }
}

/// `V|psi> = sum_mu M_mu|psi> (x) |mu>`.
pub fn stinespring_isometry(k: &KrausSet) -> Result<Isometry> {
    let env = k.env_dim();
    let rows = k.dim_out() * env;
    if rows > MAX_DIM {
        return Err(crate::Error::Size(format!("dilation dimension {rows} exceeds {MAX_DIM}")));
    }
    let v = ComplexMatrix::from_fn(rows, k.dim_in(), |r, c| k.operators()[r % env][(r / env, c)]);
    Isometry::new(v, [k.dim_out(), env])
}

/// Complementary channel `sum_{mu,nu} Tr(M_mu rho M_nu^dagger) |mu><nu|`.
pub fn apply_complementary(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != k.dim_in() {
        return Err(shape_err!("channel on dimension {} applied to dimension {}", k.dim_in(), rho.dim()));
    }
    let env = k.env_dim();
    let images: Vec<ComplexMatrix> = k.operators().iter().map(|m| m * rho.matrix()).collect();
    let out = ComplexMatrix::from_fn(env, env, |mu, nu| {
        // Tr(M_mu rho M_nu^dagger) = sum_ij (M_mu rho)_ij conj(M_nu)_ij
        images[mu]
            .iter()
            .zip(k.operators()[nu].iter())
            .map(|(a, b)| a * b.conj())
            .sum::<c64>()
    });
    Ok(DensityMatrix::from_trusted(out))
}

/// Complementary channel computed as Tr_K(V rho V^dagger).
pub fn apply_complementary_via_dilation(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    stinespring_isometry(k)?.trace_output(rho)
}

/// Pinching `X -> sum_j E_j X E_j` for a complete family of orthogonal
/// projectors.
pub fn pinching_kraus(projectors: &[HermitianMatrix]) -> Result<KrausSet> {
    let first = projectors.first().ok_or_else(|| shape_err!("empty projector family"))?;
    let d = first.dim();
    if projectors.iter().any(|p| p.dim() != d) {
        return Err(shape_err!("projectors disagree in dimension"));
    }
    for (i, p) in projectors.iter().enumerate() {
        let p = p.matrix();
        let idem = max_norm(&(p * p - p));
        if idem > TOL_CHANNEL {
            return Err(domain_err!("operator {i} is not a projector (defect {idem:e})"));
        }
        for (j, q) in projectors.iter().enumerate().skip(i + 1) {
            let overlap = max_norm(&(p * q.matrix()));
            if overlap > TOL_CHANNEL {
                return Err(domain_err!("projectors {i} and {j} are not orthogonal"));
            }
        }
    }
    let sum = projectors.iter().fold(ComplexMatrix::zeros(d, d), |acc, p| acc + p.matrix());
    let defect = max_norm(&(sum - ComplexMatrix::identity(d, d)));
    if defect > TOL_CHANNEL {
        return Err(domain_err!("projectors do not resolve the identity (defect {defect:e})"));
    }
    KrausSet::new(projectors.iter().map(|p| p.matrix().clone()).collect())
}

/// Rank-one projectors onto the columns of a unitary.
pub fn basis_projectors(basis: &ComplexMatrix) -> Vec<HermitianMatrix> {
    (0..basis.ncols())
        .map(|j| {
            let v = basis.column(j);
            HermitianMatrix::hermitian_part(&(v * v.adjoint()))
        })
        .collect()
}

/// Kraus form of the partial trace over one factor of `d_A (x) d_B`:
/// `{1 (x) <k|}` when tracing out B, `{<k| (x) 1}` when tracing out A.
pub fn partial_trace_kraus(dims: [usize; 2], traced: Subsystem) -> Result<KrausSet> {
    let [da, db] = dims;
    if da == 0 || db == 0 || da * db > MAX_DIM {
        return Err(shape_err!("invalid bipartite dims {dims:?}"));
    }
    let ops = match traced {
        Subsystem::B => (0..db)
            .map(|k| ComplexMatrix::from_fn(da, da * db, |r, c| if c == r * db + k { real(1.0) } else { real(0.0) }))
            .collect(),
        Subsystem::A => (0..da)
            .map(|k| ComplexMatrix::from_fn(db, da * db, |r, c| if c == k * db + r { real(1.0) } else { real(0.0) }))
            .collect(),
    };
    KrausSet::new(ops)
}

/// Observables `G_a` and Lagrange parameters `lambda^a` of a generalised
/// canonical state `exp(sum lambda^a G_a) / Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSpec {
    dim: usize,
    observables: Vec<HermitianMatrix>,
    lagrange_params: Vec<f64>,
}

impl CanonicalSpec {
    pub fn new(dim: usize, observables: Vec<HermitianMatrix>, lagrange_params: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(shape_err!("canonical state of dimension 0"));
        }
        if observables.len() != lagrange_params.len() {
            return Err(shape_err!(
                "{} observables but {} Lagrange parameters",
                observables.len(),
                lagrange_params.len()
            ));
        }
        if let Some(g) = observables.iter().find(|g| g.dim() != dim) {
            return Err(shape_err!("observable of dimension {} in a dimension-{dim} spec", g.dim()));
        }
        if lagrange_params.iter().any(|x| !x.is_finite()) {
            return Err(domain_err!("non-finite Lagrange parameter"));
        }
        Ok(Self { dim, observables, lagrange_params })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn observables(&self) -> &[HermitianMatrix] {
        &self.observables
    }

    pub fn lagrange_params(&self) -> &[f64] {
        &self.lagrange_params
    }

    /// `sum lambda^a G_a`
    pub fn exponent(&self) -> HermitianMatrix {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for (g, &l) in self.observables.iter().zip(&self.lagrange_params) {
            sum += g.matrix() * real(l);
        }
        HermitianMatrix::hermitian_part(&sum)
    }
}

/// `exp(sum lambda^a G_a) / Tr exp(sum lambda^a G_a)`.
pub fn canonical_state(spec: &CanonicalSpec) -> Result<DensityMatrix> {
    let eig = eig_hermitian(&spec.exponent());
    let top = eig.eigenvalues()[0];
    if top > MAX_EXPONENT {
        return Err(crate::Error::Overflow(format!("largest exponent {top} exceeds {MAX_EXPONENT}")));
    }
    // shift by the top eigenvalue; the normalisation removes it again
    let z: f64 = eig.eigenvalues().iter().map(|x| (x - top).exp()).sum();
    let m = eig.map_eigenvalues(|x| (x - top).exp() / z);
    Ok(DensityMatrix::from_trusted(m))
}

fn ensure_full_rank(rho: &DensityMatrix, what: &str) -> Result<()> {
    let eig = rho.eig();
    if eig.rank(TOL_RANK) < rho.dim() {
        return Err(domain_err!("{what} is rank deficient"));
    }
    Ok(())
}

/// Petz recovery map of `k` with respect to `sigma`:
/// `X -> sigma^{1/2} Phi^dagger(Phi(sigma)^{-1/2} X Phi(sigma)^{-1/2}) sigma^{1/2}`,
/// with Kraus operators `sigma^{1/2} M^dagger Phi(sigma)^{-1/2}`.
pub fn petz_recovery(k: &KrausSet, sigma: &DensityMatrix) -> Result<KrausSet> {
    ensure_full_rank(sigma, "sigma")?;
    let image = apply_channel(k, sigma)?;
    ensure_full_rank(&image, "Phi(sigma)")?;
    let sqrt_sigma = spectral_function(&sigma.as_hermitian(), |x| x.max(0.0).sqrt())?;
    let inv_sqrt_image = spectral_function(&image.as_hermitian(), |x| x.powf(-0.5))?;
    let ops = k
        .operators()
        .iter()
        .map(|m| sqrt_sigma.matrix() * m.adjoint() * inv_sqrt_image.matrix())
        .collect();
    KrausSet::new(ops)
}
