//! State constructors: the two explicit superadditivity counterexamples,
//! pinching pairs, and seeded random states, unitaries and channels.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channels::{basis_projectors, pinching_kraus, KrausSet};
use crate::error::{domain_err, shape_err, Result};
use crate::json::MatrixJson;
use crate::linalg::{c64, diag, kron, real, same_dim, ComplexMatrix, DensityMatrix, MAX_DIM};

/// A ChaCha20 stream identified by `(seed, stream)`. Cloning forks the
/// sequence: both copies yield the same draws from that point on.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl SeededGenerator {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian, E|z|^2 = 1.
    pub fn complex_normal(&mut self) -> c64 {
        c64::new(self.normal(), self.normal()) * std::f64::consts::FRAC_1_SQRT_2
    }
}

impl RngCore for SeededGenerator {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Two states on the same space, sharing an optional factorisation.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
}

impl StatePair {
    pub fn new(rho: DensityMatrix, sigma: DensityMatrix) -> Result<Self> {
        same_dim(&rho, &sigma)?;
        let dims = rho.dims().or(sigma.dims()).map(<[usize]>::to_vec);
        match dims {
            Some(dims) => Ok(Self { rho: rho.with_dims(&dims)?, sigma: sigma.with_dims(&dims)? }),
            None => Ok(Self { rho, sigma }),
        }
    }

    pub fn bipartite(rho: DensityMatrix, sigma: DensityMatrix, dims: [usize; 2]) -> Result<Self> {
        Self::new(rho.with_dims(&dims)?, sigma.with_dims(&dims)?)
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn dims(&self) -> Option<&[usize]> {
        self.rho.dims()
    }

    pub fn to_json(&self) -> StatePairJson {
        StatePairJson {
            dims: self.dims().map(<[usize]>::to_vec).unwrap_or_else(|| vec![self.dim()]),
            rho: MatrixJson::from_matrix(self.rho.matrix()),
            sigma: MatrixJson::from_matrix(self.sigma.matrix()),
        }
    }

    pub fn from_json(json: &StatePairJson) -> Result<Self> {
        let rho = DensityMatrix::new(json.rho.to_matrix()?)?;
        let sigma = DensityMatrix::new(json.sigma.to_matrix()?)?;
        Self::new(rho.with_dims(&json.dims)?, sigma.with_dims(&json.dims)?)
    }
}

/// `{"dims": [d_A, d_B], "rho": matrix-json, "sigma": matrix-json}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePairJson {
    pub dims: Vec<usize>,
    pub rho: MatrixJson,
    pub sigma: MatrixJson,
}

fn projector(d: usize, i: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, i)] = real(1.0);
    m
}

/// Orthogonal pure-state construction: `rho = |00><00|`,
/// `sigma = lambda |00><00| + (1 - lambda) |11><11|` on `d_A (x) d_B`.
pub fn example1_states(lambda: f64, d_a: usize, d_b: usize) -> Result<StatePair> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(domain_err!("lambda must lie in (0, 1), got {lambda}"));
    }
    if d_a < 2 || d_b < 2 {
        return Err(domain_err!("both factors need dimension at least 2, got {d_a}x{d_b}"));
    }
    let psi = kron(&projector(d_a, 0), &projector(d_b, 0))?;
    let phi = kron(&projector(d_a, 1), &projector(d_b, 1))?;
    let rho = DensityMatrix::new(psi.clone())?;
    let sigma = DensityMatrix::new(psi * real(lambda) + phi * real(1.0 - lambda))?;
    StatePair::bipartite(rho, sigma, [d_a, d_b])
}

/// Basis labels `|ab>` in the order the diagonal weights below are listed.
const EXAMPLE2_LISTING: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
const EXAMPLE2_RHO: [f64; 4] = [0.1568, 0.7270, 0.0804, 0.0358];
const EXAMPLE2_SIGMA: [f64; 4] = [0.3061, 0.4243, 0.1713, 0.0983];

fn canonical_order(listed: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (&(a, b), &w) in EXAMPLE2_LISTING.iter().zip(listed) {
        out[a * 2 + b] = w;
    }
    out
}

/// Full-rank diagonal counterexample on two qubits, in the canonical
/// A-slow ordering `|00>, |01>, |10>, |11>`.
pub fn example2_states() -> StatePair {
    let rho = DensityMatrix::from_diagonal(&canonical_order(&EXAMPLE2_RHO)).expect("valid state");
    let sigma = DensityMatrix::from_diagonal(&canonical_order(&EXAMPLE2_SIGMA)).expect("valid state");
    StatePair::bipartite(rho, sigma, [2, 2]).expect("2x2 factorisation")
}

/// `rows x cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, gen: &mut SeededGenerator) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = gen.complex_normal();
        }
    }
    m
}

/// Random state from the Hilbert–Schmidt-induced measure: `G G^dagger / Tr`
/// with `G` a `d x rank` Ginibre matrix.
pub fn random_density(d: usize, rank: usize, gen: &mut SeededGenerator) -> Result<DensityMatrix> {
    if d == 0 || d > MAX_DIM {
        return Err(domain_err!("invalid dimension {d}"));
    }
    if rank == 0 || rank > d {
        return Err(domain_err!("rank {rank} outside 1..={d}"));
    }
    let g = ginibre(d, rank, gen);
    DensityMatrix::normalized(&g * g.adjoint())
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
pub fn random_unitary(d: usize, gen: &mut SeededGenerator) -> ComplexMatrix {
    let qr = ginibre(d, d, gen).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { real(1.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

/// Uniform draw from the probability simplex (Dirichlet(1, ..., 1)).
pub fn random_simplex(d: usize, gen: &mut SeededGenerator) -> Vec<f64> {
    let draws: Vec<f64> = (0..d).map(|_| gen.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// Diagonal state with Dirichlet(1, ..., 1) weights.
pub fn random_diagonal_state(d: usize, gen: &mut SeededGenerator) -> Result<DensityMatrix> {
    DensityMatrix::new(diag(&random_simplex(d, gen)))
}

/// Random channel from a Haar isometry: the first `d_in` columns of a Haar
/// unitary on `d_out (x) C^env`, read as a Stinespring dilation.
pub fn random_channel(d_in: usize, d_out: usize, env: usize, gen: &mut SeededGenerator) -> Result<KrausSet> {
    let big = d_out * env;
    if d_in == 0 || d_out == 0 || env == 0 || d_in > big || big > MAX_DIM {
        return Err(shape_err!("cannot dilate {d_in} -> {d_out} with environment {env}"));
    }
    let u = random_unitary(big, gen);
    let ops = (0..env)
        .map(|mu| ComplexMatrix::from_fn(d_out, d_in, |r, c| u[(r * env + mu, c)]))
        .collect();
    KrausSet::new(ops)
}

/// Commuting pair `rho = sum_j p_j E_j`, `sigma = sum_j q_j E_j` with `E_j`
/// the rank-one projectors onto the columns of `basis`, together with the
/// pinching channel `X -> sum_j E_j X E_j`.
pub fn commuting_pair(basis: &ComplexMatrix, rho_spectrum: &[f64], sigma_spectrum: &[f64]) -> Result<(StatePair, KrausSet)> {
    let d = basis.ncols();
    if basis.nrows() != d || rho_spectrum.len() != d || sigma_spectrum.len() != d {
        return Err(shape_err!("basis and spectra must all have dimension {d}"));
    }
    let pinch = pinching_kraus(&basis_projectors(basis))?;
    let build = |w: &[f64]| DensityMatrix::new(basis * diag(w) * basis.adjoint());
    let pair = StatePair::new(build(rho_spectrum)?, build(sigma_spectrum)?)?;
    Ok((pair, pinch))
}

/// Random commuting full-rank pair in a Haar-random eigenbasis, with
/// spectra guaranteed to differ, and the pinching onto that eigenbasis.
pub fn hayashi_pair(d: usize, gen: &mut SeededGenerator) -> Result<(StatePair, KrausSet)> {
    if d < 2 {
        return Err(domain_err!("need d >= 2, got {d}"));
    }
    let basis = random_unitary(d, gen);
    let p = random_simplex(d, gen);
    let q = loop {
        let q = random_simplex(d, gen);
        let mut ps = p.clone();
        let mut qs = q.clone();
        ps.sort_by(f64::total_cmp);
        qs.sort_by(f64::total_cmp);
        if ps.iter().zip(&qs).any(|(a, b)| (a - b).abs() > 1e-6) {
            break q;
        }
    };
    commuting_pair(&basis, &p, &q)
}

/// `(1 - eps) rho + eps 1/d`.
pub fn regularize_full_rank(rho: &DensityMatrix, epsilon: f64) -> Result<DensityMatrix> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(domain_err!("epsilon must lie in [0, 1), got {epsilon}"));
    }
    let d = rho.dim();
    let mixed = ComplexMatrix::identity(d, d) / real(d as f64);
    let out = DensityMatrix::from_trusted(rho.matrix() * real(1.0 - epsilon) + mixed * real(epsilon));
    match rho.dims() {
        Some(dims) => out.with_dims(dims),
        None => Ok(out),
    }
}

/// Random instance of the orthogonal pure-state geometry: random
/// orthonormal pairs `psi_X, phi_X` on each factor and `lambda` uniform in
/// (0, 1).
pub fn random_pure_vs_mixed(dims: [usize; 2], gen: &mut SeededGenerator) -> Result<StatePair> {
    let [da, db] = dims;
    if da < 2 || db < 2 {
        return Err(domain_err!("both factors need dimension at least 2"));
    }
    let ua = random_unitary(da, gen);
    let ub = random_unitary(db, gen);
    let lambda = loop {
        let x: f64 = gen.random();
        if x > 0.0 {
            break x;
        }
    };
    let local = ua.kronecker(&ub);
    let base = example1_states(lambda, da, db)?;
    StatePair::bipartite(base.rho.conjugate(&local)?, base.sigma.conjugate(&local)?, dims)
}

/// Random full-rank `rho_AB` against a product reference `sigma_A (x) sigma_B`.
pub fn random_product_sigma(dims: [usize; 2], gen: &mut SeededGenerator) -> Result<StatePair> {
    let [da, db] = dims;
    let rho = random_density(da * db, da * db, gen)?;
    let sa = random_density(da, da, gen)?;
    let sb = random_density(db, db, gen)?;
    StatePair::bipartite(rho, sa.tensor(&sb)?, dims)
}
