//! Hermitian eigensolvers.
//!
//! Two independent routes are provided. [`EigenMethod::Householder`] is
//! nalgebra's tridiagonalisation + implicit QR; [`EigenMethod::Jacobi`] is a
//! cyclic complex Jacobi sweep written here. Both feed the same
//! canonicalisation so their outputs are directly comparable.

use nalgebra::linalg::SymmetricEigen;
use super::{c64, ComplexMatrix, DEGENERACY_GAP};

/// Which eigensolver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Householder,
    Jacobi,
}

/// Eigenvalues in descending order with an orthonormal set of eigenvectors
/// stored as the columns of `eigenvectors`.
///
/// Within a degenerate cluster (consecutive gap below 1e-12) eigenvectors are
/// ordered by lexicographic comparison of their component magnitudes, largest
/// first, and every eigenvector carries the phase that makes its
/// largest-magnitude component real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in increasing order.
    pub fn ascending(&self) -> Vec<f64> {
        self.eigenvalues.iter().rev().copied().collect()
    }

    /// Rank-one projector |v_j><v_j|.
    pub fn projector(&self, j: usize) -> ComplexMatrix {
        let v = self.eigenvectors.column(j);
        v * v.adjoint()
    }

    /// Sum of lambda_j |v_j><v_j|.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|x| x)
    }

    /// Sum of f(lambda_j) |v_j><v_j| without any domain checks.
    pub(crate) fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fx = f(lam);
            scaled.column_mut(j).scale_mut(fx);
        }
        let out = scaled * v.adjoint();
        debug_assert_eq!(out.nrows(), d);
        out
    }

    /// Number of eigenvalues above `tol_rel` times the largest one.
    pub fn rank(&self, tol_rel: f64) -> usize {
        let cut = self.rank_cutoff(tol_rel);
        self.eigenvalues.iter().filter(|&&x| x > cut).count()
    }

    pub(crate) fn rank_cutoff(&self, tol_rel: f64) -> f64 {
        let top = self.eigenvalues.first().copied().unwrap_or(0.0).abs();
        tol_rel * top.max(f64::MIN_POSITIVE)
    }

    /// Projector onto the span of eigenvectors whose eigenvalue exceeds
    /// `tol_rel` times the largest eigenvalue.
    pub fn support_projector(&self, tol_rel: f64) -> ComplexMatrix {
        let cut = self.rank_cutoff(tol_rel);
        self.map_eigenvalues(|x| if x > cut { 1.0 } else { 0.0 })
    }

    pub(crate) fn from_raw(values: Vec<f64>, vectors: ComplexMatrix) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

        let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let mut columns: Vec<Vec<c64>> = order
            .iter()
            .map(|&i| vectors.column(i).iter().copied().collect())
            .collect();

        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && eigenvalues[end - 1] - eigenvalues[end] < DEGENERACY_GAP {
                end += 1;
            }
            if end - start > 1 {
                columns[start..end].sort_by(|a, b| magnitude_order(b, a));
            }
            start = end;
        }

        for col in columns.iter_mut() {
            fix_phase(col);
        }
        let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| columns[c][r]);
        Self { eigenvalues, eigenvectors }
    }
}

fn magnitude_order(a: &[c64], b: &[c64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let (mx, my) = (x.norm(), y.norm());
        if (mx - my).abs() > DEGENERACY_GAP {
            return mx.total_cmp(&my);
        }
    }
    std::cmp::Ordering::Equal
}

fn fix_phase(col: &mut [c64]) {
    let top = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return;
    }
    let pivot = col
        .iter()
        .copied()
        .find(|z| z.norm() >= top - DEGENERACY_GAP)
        .expect("non-empty column");
    let phase = pivot.conj() / pivot.norm();
    for z in col.iter_mut() {
        *z *= phase;
    }
}

/// Decompose a matrix that the caller has already checked to be Hermitian.
pub(crate) fn decompose(m: &ComplexMatrix, method: EigenMethod) -> SpectralDecomposition {
    let (values, vectors) = match method {
        EigenMethod::Householder => {
            let eig = SymmetricEigen::new(m.clone());
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        }
        EigenMethod::Jacobi => jacobi(m),
    };
    SpectralDecomposition::from_raw(values, vectors)
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi for complex Hermitian matrices. Each rotation first removes
/// the phase of the pivot entry, then applies the real symmetric rotation
/// that annihilates it.
fn jacobi(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n, n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let e = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G restricted to (p, q): [[c, s], [-s conj(e), c conj(e)]]
                let g_pp = c64::new(c, 0.0);
                let g_pq = c64::new(s, 0.0);
                let g_qp = -e.conj() * s;
                let g_qq = e.conj() * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = c64::new(0.0, 0.0);
                a[(q, p)] = c64::new(0.0, 0.0);
                a[(p, p)] = c64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = c64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(entries: &[(f64, f64)], n: usize) -> ComplexMatrix {
        let m = ComplexMatrix::from_fn(n, n, |r, c| c64::new(entries[r * n + c].0, entries[r * n + c].1));
        (&m + m.adjoint()) * c64::new(0.5, 0.0)
    }

    #[test]
    fn jacobi_matches_householder() {
        let m = herm(
            &[
                (2.0, 0.0), (0.3, 0.7), (-0.2, 0.1),
                (0.3, -0.7), (1.0, 0.0), (0.5, -0.4),
                (-0.2, -0.1), (0.5, 0.4), (-1.5, 0.0),
            ],
            3,
        );
        let a = decompose(&m, EigenMethod::Householder);
        let b = decompose(&m, EigenMethod::Jacobi);
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((x - y).abs() < 1e-13);
        }
        // nondegenerate spectrum: canonical phases make the vectors agree
        assert!((a.eigenvectors() - b.eigenvectors()).camax() < 1e-12);
        assert!((b.reconstruct() - &m).camax() < 1e-13);
    }

    #[test]
    fn degenerate_cluster_is_ordered_by_magnitudes() {
        let id = ComplexMatrix::identity(3, 3);
        let d = decompose(&id, EigenMethod::Householder);
        assert_eq!(d.eigenvalues(), &[1.0, 1.0, 1.0]);
        assert!((d.eigenvectors() - &id).camax() < 1e-15);
    }

    #[test]
    fn phase_is_fixed() {
        let m = herm(&[(0.0, 0.0), (0.0, 1.0), (0.0, -1.0), (0.0, 0.0)], 2);
        let d = decompose(&m, EigenMethod::Jacobi);
        for j in 0..2 {
            let col = d.eigenvectors().column(j);
            // equal magnitudes: the first component is the pivot
            let top = col[0];
            assert!(top.im.abs() < 1e-15 && top.re > 0.0);
        }
    }
}
