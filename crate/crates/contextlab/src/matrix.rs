//! Dense complex matrices and vectors for the small Hilbert spaces used by
//! this crate (3-dimensional single-particle space, 9-dimensional two-particle
//! space), plus a Hermitian eigensolver.
//!
//! Everything is stored row-major as `Vec<C64>`. The sizes involved are tiny
//! and fixed, so the implementation favours predictability over throughput:
//! the eigensolver is a cyclic complex Jacobi iteration with a deterministic
//! pivot order, which converges in a handful of sweeps for 3x3 inputs and -
//! importantly for the sampling code built on top of it - never touches
//! matrix entries that are exactly zero. Decoupled blocks therefore stay
//! exactly decoupled in the returned eigenvectors instead of picking up
//! `1e-17`-sized cross terms.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Default tolerance for Hermiticity checks and other structural tests.
/// Operations that compare against a tolerance take it as an explicit
/// argument or provide a `_with_tol` variant; this is the value used by the
/// convenience forms.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Maximum number of Jacobi sweeps before the eigensolver gives up. For the
/// well-conditioned 3x3/9x9 Hermitian matrices handled here, convergence
/// takes 2-6 sweeps; hitting this limit indicates a logic error upstream.
const MAX_JACOBI_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("entry buffer holds {found} values but {rows}x{cols} needs {expected}")]
    BadEntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is {rows}x{cols}, which is not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (residual {residual:.3e} exceeds tolerance {tol:.3e})")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("Jacobi eigensolver failed to converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("zero vector has no direction")]
    ZeroVector,
}

/// Serialized form of [`ComplexMatrix`]: row-major real and imaginary parts
/// as flat arrays. This is the on-disk/JSON schema for every operator the
/// CLI emits.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = MatrixError;

    fn try_from(r: MatrixRepr) -> Result<Self, MatrixError> {
        let expected = r.rows * r.cols;
        if r.re.len() != expected || r.im.len() != expected {
            return Err(MatrixError::BadEntryCount {
                rows: r.rows,
                cols: r.cols,
                expected,
                found: r.re.len().max(r.im.len()),
            });
        }
        let data = r
            .re
            .iter()
            .zip(r.im.iter())
            .map(|(&re, &im)| C64::new(re, im))
            .collect();
        ComplexMatrix::new(r.rows, r.cols, data)
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::BadEntryCount {
                rows,
                cols,
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from real entries (imaginary parts zero).
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, MatrixError> {
        let data = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[row * self.cols + col] = value;
    }

    pub fn mat_mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += aik * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &ComplexVector) -> Result<ComplexVector, MatrixError> {
        if self.cols != v.dim() {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: v.dim(),
                right_cols: 1,
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (i, out_i) in out.iter_mut().enumerate() {
            for k in 0..self.cols {
                *out_i += self.data[i * self.cols + k] * v.entries()[k];
            }
        }
        Ok(ComplexVector::new(out))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
        self.zip_entries(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
        self.zip_entries(other, |a, b| a - b)
    }

    fn zip_entries(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(C64, C64) -> C64,
    ) -> Result<ComplexMatrix, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, factor: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> ComplexMatrix {
        self.scale(C64::new(factor, 0.0))
    }

    /// `[A, B] = AB - BA`. When `self` and `other` are the same matrix the
    /// result is exactly zero entrywise, not merely small.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
        let ab = self.mat_mul(other)?;
        let ba = other.mat_mul(self)?;
        ab.sub(&ba)
    }

    /// Kronecker product; the result indexes the left factor as the major
    /// (slow) index, matching the `|left> (x) |right>` vector convention.
    pub fn tensor(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + (j * other.cols + l)] =
                            a * other.data[k * other.cols + l];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    /// Largest entry magnitude; the norm used for all residual checks.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max_ij |A_ij - B_ij|`.
    ///
    /// # Panics
    /// Panics if the shapes differ; this is a comparison helper for
    /// same-shaped operators, not a general-purpose distance.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "max_abs_diff requires equal shapes"
        );
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |A_ij - conj(A_ji)|`, or infinity for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.data[i * self.cols + j] - self.data[j * self.cols + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_residual() <= tol
    }

    /// Full eigendecomposition of a Hermitian matrix, using [`DEFAULT_TOL`]
    /// for the Hermiticity precheck. See [`Self::eig_hermitian_with_tol`].
    pub fn eig_hermitian(&self) -> Result<SpectralDecomposition, MatrixError> {
        self.eig_hermitian_with_tol(DEFAULT_TOL)
    }

    /// Cyclic complex Jacobi eigendecomposition.
    ///
    /// Returns eigenvalues in ascending order with matching orthonormal
    /// eigenvectors. Each eigenvector's global phase is fixed by making its
    /// first non-negligible component real and positive, so repeated calls on
    /// equal inputs return bit-identical output. Eigenvectors inside a
    /// degenerate cluster are re-orthonormalized by modified Gram-Schmidt.
    pub fn eig_hermitian_with_tol(&self, tol: f64) -> Result<SpectralDecomposition, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let residual = self.hermiticity_residual();
        if residual > tol {
            return Err(MatrixError::NotHermitian { residual, tol });
        }
        let n = self.rows;

        // Work on the Hermitian average so that sub-tolerance asymmetry from
        // upstream floating-point noise cannot bias the rotations. For an
        // exactly Hermitian input this reproduces the input bit for bit.
        let mut a = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let z = self.data[i * self.cols + j];
                let w = self.data[j * self.cols + i].conj();
                a[i * n + j] = (z + w) * 0.5;
            }
        }
        let mut v = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = C64::new(1.0, 0.0);
        }

        let scale = self.max_abs().max(1.0);
        let converge_at = 1e-14 * scale;
        // Pivots at or below this magnitude are skipped inside a sweep. The
        // strict positivity requirement means exact zeros are never rotated,
        // which keeps decoupled blocks exactly decoupled.
        let skip_below = 1e-18 * scale;

        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[p * n + q].norm());
                }
            }
            if off <= converge_at {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let beta = a[p * n + q];
                    let babs = beta.norm();
                    if babs <= skip_below {
                        continue;
                    }
                    // Phase-reduce the 2x2 pivot block to a real symmetric
                    // problem, then apply the classical Jacobi rotation.
                    let alpha = a[p * n + p].re;
                    let gamma = a[q * n + q].re;
                    let phase = beta / babs;
                    let tau = (gamma - alpha) / (2.0 * babs);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        1.0 / (tau - (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let s_conj_phase = phase.conj() * s;
                    let s_phase = phase * s;

                    // Column update: A <- A U with U = [[c, s],[-s conj(phase), c conj(phase)]].
                    for r in 0..n {
                        let arp = a[r * n + p];
                        let arq = a[r * n + q];
                        a[r * n + p] = arp * c - arq * s_conj_phase;
                        a[r * n + q] = arp * s + arq * (phase.conj() * c);
                    }
                    // Row update: A <- U^H A.
                    for r in 0..n {
                        let apr = a[p * n + r];
                        let aqr = a[q * n + r];
                        a[p * n + r] = apr * c - aqr * s_phase;
                        a[q * n + r] = apr * s + aqr * (phase * c);
                    }
                    // The pivot block is known analytically; writing it
                    // directly avoids accumulating rounding in the diagonal
                    // and zeroes the pivot exactly.
                    a[p * n + p] = C64::new(alpha - t * babs, 0.0);
                    a[q * n + q] = C64::new(gamma + t * babs, 0.0);
                    a[p * n + q] = C64::new(0.0, 0.0);
                    a[q * n + p] = C64::new(0.0, 0.0);

                    // Accumulate the same column rotation into V.
                    for r in 0..n {
                        let vrp = v[r * n + p];
                        let vrq = v[r * n + q];
                        v[r * n + p] = vrp * c - vrq * s_conj_phase;
                        v[r * n + q] = vrp * s + vrq * (phase.conj() * c);
                    }
                }
            }
        }
        if !converged {
            return Err(MatrixError::NoConvergence(MAX_JACOBI_SWEEPS));
        }

        // Sort ascending; ties keep the original column order so the result
        // is deterministic.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            a[i * n + i]
                .re
                .partial_cmp(&a[j * n + j].re)
                .unwrap()
                .then(i.cmp(&j))
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i].re).collect();
        let mut eigenvectors: Vec<ComplexVector> = order
            .iter()
            .map(|&col| ComplexVector::new((0..n).map(|r| v[r * n + col]).collect()))
            .collect();

        // Jacobi already returns an orthonormal set, but within a degenerate
        // cluster the basis is arbitrary and can drift at the 1e-15 level.
        // One modified Gram-Schmidt pass per cluster tightens it.
        let cluster_tol = 1e-8 * scale;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (eigenvalues[end] - eigenvalues[end - 1]).abs() <= cluster_tol {
                end += 1;
            }
            if end - start > 1 {
                for i in start..end {
                    for j in start..i {
                        let proj = eigenvectors[j].inner(&eigenvectors[i]);
                        let correction = eigenvectors[j].scale(proj);
                        eigenvectors[i] = eigenvectors[i].sub(&correction);
                    }
                    eigenvectors[i] = eigenvectors[i]
                        .normalized()
                        .expect("degenerate cluster produced a zero vector");
                }
            }
            start = end;
        }

        let eigenvectors = eigenvectors
            .into_iter()
            .map(|w| w.phase_canonical())
            .collect();

        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Self {
        ComplexVector { data }
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexVector {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut v = Self::zeros(dim);
        v.data[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_real(entries: &[f64]) -> Self {
        ComplexVector {
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn get(&self, index: usize) -> C64 {
        self.data[index]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    ///
    /// # Panics
    /// Panics on dimension mismatch.
    pub fn inner(&self, other: &ComplexVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, factor: C64) -> ComplexVector {
        ComplexVector {
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), other.dim(), "vector sum dimension mismatch");
        ComplexVector {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), other.dim(), "vector diff dimension mismatch");
        ComplexVector {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// Kronecker product `|self> (x) |other>`; `self` is the major index.
    pub fn tensor(&self, other: &ComplexVector) -> ComplexVector {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.data {
            for &b in &other.data {
                data.push(a * b);
            }
        }
        ComplexVector { data }
    }

    pub fn normalized(&self) -> Result<ComplexVector, MatrixError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(MatrixError::ZeroVector);
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// Rank-one projector `|v><v| / <v|v>`.
    pub fn projector(&self) -> Result<ComplexMatrix, MatrixError> {
        let unit = self.normalized()?;
        let n = unit.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, unit.data[i] * unit.data[j].conj());
            }
        }
        Ok(m)
    }

    /// Multiplies by a unit phase so the first component larger than `1e-12`
    /// in magnitude becomes real and positive. Exact zeros are preserved
    /// (`0 * phase == 0`), and an all-small vector is returned unchanged.
    pub fn phase_canonical(self) -> ComplexVector {
        let pivot = self.data.iter().find(|z| z.norm() > 1e-12);
        match pivot {
            Some(&z) => {
                let phase = z.conj() / z.norm();
                self.scale(phase)
            }
            None => self,
        }
    }
}

/// Result of [`ComplexMatrix::eig_hermitian`]: ascending eigenvalues with
/// matching orthonormal, phase-canonical eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<ComplexVector>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[ComplexVector] {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Rebuilds `sum_k lambda_k |v_k><v_k|`; the round-trip residual against
    /// the original matrix is the primary accuracy check for the solver.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors.first().map_or(0, |v| v.dim());
        let mut out = ComplexMatrix::zeros(n, n);
        for (lambda, vec) in self.eigenvalues.iter().zip(self.eigenvectors.iter()) {
            for i in 0..n {
                for j in 0..n {
                    let term = vec.get(i) * vec.get(j).conj() * *lambda;
                    out.set(i, j, out.get(i, j) + term);
                }
            }
        }
        out
    }

    /// Largest `|<v_i|v_j>|` over distinct pairs; zero for a perfectly
    /// orthogonal eigenbasis.
    pub fn max_cross_inner(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.eigenvectors.len() {
            for j in (i + 1)..self.eigenvectors.len() {
                worst = worst.max(self.eigenvectors[i].inner(&self.eigenvectors[j]).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SEED: u64 = 0x5eed_cafe;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let data = (0..n * n)
            .map(|_| C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
            .collect();
        ComplexMatrix::new(n, n, data).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let m = random_matrix(rng, n);
        m.add(&m.adjoint()).unwrap().scale_re(0.5)
    }

    /// Entries of the projector onto the middle level of the squared spin
    /// observable along the first axis: 1/2 [[1,0,1],[0,2,0],[1,0,1]].
    fn middle_projector_sum() -> ComplexMatrix {
        ComplexMatrix::from_real(3, 3, &[0.5, 0.0, 0.5, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let m = middle_projector_sum();
        let id = ComplexMatrix::identity(3);
        assert_eq!(m.mat_mul(&id).unwrap(), m);
        assert_eq!(id.mat_mul(&m).unwrap(), m);
    }

    #[test]
    fn projector_like_matrix_is_idempotent() {
        let m = middle_projector_sum();
        let m2 = m.mat_mul(&m).unwrap();
        assert!(m2.max_abs_diff(&m) <= 1e-12);
    }

    #[test]
    fn self_commutator_is_exactly_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let m = random_hermitian(&mut rng, 3);
        let z = m.commutator(&m).unwrap();
        for &entry in z.entries() {
            assert_eq!(entry, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn mismatched_product_is_rejected() {
        let a = ComplexMatrix::zeros(3, 3);
        let b = ComplexMatrix::zeros(9, 9);
        match a.mat_mul(&b) {
            Err(MatrixError::DimensionMismatch { .. }) => {}
            other => panic!("expected dimension mismatch, got {other:?}"),
        }
        assert!(a.commutator(&b).is_err());
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn bad_entry_count_is_rejected() {
        let err = ComplexMatrix::new(3, 3, vec![C64::new(1.0, 0.0); 8]).unwrap_err();
        match err {
            MatrixError::BadEntryCount { expected: 9, found: 8, .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn adjoint_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 3);
            assert_eq!(m.adjoint().adjoint(), m);
        }
    }

    #[test]
    fn hermiticity_residual_detects_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let h = random_hermitian(&mut rng, 3);
        assert!(h.hermiticity_residual() <= 1e-15);
        assert!(h.is_hermitian(DEFAULT_TOL));

        let mut broken = h.clone();
        broken.set(0, 1, broken.get(0, 1) + C64::new(0.0, 1e-3));
        assert!(!broken.is_hermitian(DEFAULT_TOL));
    }

    #[test]
    fn eig_rejects_non_hermitian_input() {
        let m = ComplexMatrix::from_real(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
            .unwrap();
        match m.eig_hermitian() {
            Err(MatrixError::NotHermitian { .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eig_of_diagonal_block_matrix() {
        // diag(1,0,1) pattern: eigenvalues (0,1,1) ascending.
        let m = ComplexMatrix::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
            .unwrap();
        let eig = m.eig_hermitian().unwrap();
        assert_eq!(eig.eigenvalues(), &[0.0, 1.0, 1.0]);
        assert!(eig.reconstruct().max_abs_diff(&m) <= 1e-12);
    }

    #[test]
    fn eig_of_identity() {
        let id = ComplexMatrix::identity(3);
        let eig = id.eig_hermitian().unwrap();
        assert_eq!(eig.eigenvalues(), &[1.0, 1.0, 1.0]);
        assert!(eig.reconstruct().max_abs_diff(&id) <= 1e-12);
        assert!(eig.max_cross_inner() <= 1e-12);
    }

    #[test]
    fn eig_preserves_exact_decoupling() {
        // An arrow-free block matrix: the middle row/column is decoupled, so
        // the middle eigenvector must come out as exactly e_1.
        let m = ComplexMatrix::from_real(3, 3, &[7.5, 0.0, -0.5, 0.0, 5.0, 0.0, -0.5, 0.0, 7.5])
            .unwrap();
        let eig = m.eig_hermitian().unwrap();
        assert_eq!(eig.eigenvalues(), &[5.0, 7.0, 8.0]);
        let middle = &eig.eigenvectors()[0];
        assert_eq!(middle.get(0), C64::new(0.0, 0.0));
        assert_eq!(middle.get(1), C64::new(1.0, 0.0));
        assert_eq!(middle.get(2), C64::new(0.0, 0.0));
        for k in [1, 2] {
            assert_eq!(eig.eigenvectors()[k].get(1), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn eig_round_trips_random_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for i in 0..1000 {
            let n = if i % 4 == 0 { 9 } else { 3 };
            let h = random_hermitian(&mut rng, n);
            let eig = h.eig_hermitian().unwrap();
            let err = eig.reconstruct().max_abs_diff(&h);
            assert!(err <= 1e-10, "round-trip residual {err:.3e} at iteration {i}");
            assert!(eig.max_cross_inner() <= 1e-10);
            for w in eig.eigenvectors() {
                assert!((w.norm() - 1.0).abs() <= 1e-10);
            }
            // Ascending order.
            for k in 1..eig.len() {
                assert!(eig.eigenvalues()[k] >= eig.eigenvalues()[k - 1]);
            }
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let h = random_hermitian(&mut rng, 3);
        let a = h.eig_hermitian().unwrap();
        let b = h.eig_hermitian().unwrap();
        assert_eq!(a.eigenvalues(), b.eigenvalues());
        for (x, y) in a.eigenvectors().iter().zip(b.eigenvectors()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id3 = ComplexMatrix::identity(3);
        let id9 = ComplexMatrix::identity(9);
        assert_eq!(id3.tensor(&id3), id9);
    }

    #[test]
    fn tensor_basis_vectors() {
        let e0 = ComplexVector::basis(3, 0);
        let e2 = ComplexVector::basis(3, 2);
        let t = e0.tensor(&e2);
        assert_eq!(t.dim(), 9);
        for i in 0..9 {
            let expected = if i == 2 { 1.0 } else { 0.0 };
            assert_eq!(t.get(i), C64::new(expected, 0.0));
        }
    }

    #[test]
    fn tensor_norm_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..100 {
            let a = ComplexVector::new(
                (0..3)
                    .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect(),
            );
            let b = ComplexVector::new(
                (0..3)
                    .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect(),
            );
            let lhs = a.tensor(&b).norm();
            let rhs = a.norm() * b.norm();
            assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn projector_of_basis_vector() {
        let p = ComplexVector::basis(3, 1).projector().unwrap();
        let expected =
            ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0])
                .unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn projector_is_hermitian_and_idempotent() {
        // A complex direction of the kind produced by the rotated operators.
        let v = ComplexVector::new(vec![
            C64::new(0.0, -1.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        let p = v.projector().unwrap();
        assert!(p.hermiticity_residual() <= 1e-15);
        assert!(p.mat_mul(&p).unwrap().max_abs_diff(&p) <= 1e-15);
        assert!((p.trace() - C64::new(1.0, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn projector_rejects_zero_vector() {
        let z = ComplexVector::zeros(3);
        assert_eq!(z.projector().unwrap_err(), MatrixError::ZeroVector);
        assert_eq!(z.normalized().unwrap_err(), MatrixError::ZeroVector);
    }

    #[test]
    fn eigenprojector_completeness() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let h = random_hermitian(&mut rng, 3);
        let eig = h.eig_hermitian().unwrap();
        let mut sum = ComplexMatrix::zeros(3, 3);
        for w in eig.eigenvectors() {
            sum = sum.add(&w.projector().unwrap()).unwrap();
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(3)) <= 1e-12);
    }

    #[test]
    fn serde_schema_round_trip() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(1.0, 2.0),
                C64::new(3.0, -4.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, -0.25),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&m).unwrap();
        // Schema check: flat re/im arrays alongside the shape.
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["rows"], 2);
        assert_eq!(value["cols"], 2);
        assert_eq!(value["re"].as_array().unwrap().len(), 4);
        assert_eq!(value["im"].as_array().unwrap().len(), 4);
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn serde_rejects_inconsistent_shape() {
        let bad = r#"{"rows":2,"cols":2,"re":[1.0,2.0,3.0],"im":[0.0,0.0,0.0]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }

    proptest! {
        #[test]
        fn prop_adjoint_reverses_products(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, 3);
            let b = random_matrix(&mut rng, 3);
            let lhs = a.mat_mul(&b).unwrap().adjoint();
            let rhs = b.adjoint().mat_mul(&a.adjoint()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }

        #[test]
        fn prop_tensor_mixed_product(seed in 0u64..200) {
            // (A (x) B)(C (x) D) == (AC) (x) (BD)
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, 2);
            let b = random_matrix(&mut rng, 2);
            let c = random_matrix(&mut rng, 2);
            let d = random_matrix(&mut rng, 2);
            let lhs = a.tensor(&b).mat_mul(&c.tensor(&d)).unwrap();
            let rhs = a.mat_mul(&c).unwrap().tensor(&b.mat_mul(&d).unwrap());
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }
    }
}
