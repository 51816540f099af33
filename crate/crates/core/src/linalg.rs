//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Dimensions in this crate never exceed 8, so everything is a plain
//! row-major `Vec<Complex64>` and products are the textbook triple loop.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::DEFAULT_MATRIX_EQ_TOL;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest dimension accepted by [`hermitian_eigensystem`].
pub const MAX_EIG_DIM: usize = 8;

const JACOBI_THRESHOLD: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. `entries.len()` must equal `dim * dim`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, got: entries.len() });
        }
        Ok(Self { dim, entries })
    }

    /// Build from separate real and imaginary parts (row-major).
    pub fn from_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::Dimension { expected: re.len(), got: im.len() });
        }
        let entries = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = d;
        }
        m
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let c: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&c)
    }

    /// 2x2 matrix `[[a, b], [c, d]]`.
    pub fn from_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { dim: 2, entries: vec![a, b, c, d] }
    }

    /// 2x2 real matrix `[[a, b], [c, d]]`.
    pub fn real_2x2(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::from_2x2(a.into(), b.into(), c.into(), d.into())
    }

    /// Rank-one projector `|v><v|` (no normalization applied).
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        assert_eq!(v.len(), w.len(), "outer product of unequal lengths");
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                m.entries[i * dim + j] = vi * wj.conj();
            }
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::real_2x2(0.0, 1.0, 1.0, 0.0)
    }

    pub fn pauli_y() -> Self {
        Self::from_2x2(ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO)
    }

    pub fn pauli_z() -> Self {
        Self::real_2x2(1.0, 0.0, 0.0, -1.0)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn re(&self) -> Vec<f64> {
        self.entries.iter().map(|c| c.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.entries.iter().map(|c| c.im).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&x| x * s).collect() }
    }

    /// Matrix product, panicking on dimension mismatch.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }

    /// `self * x * self^dagger`.
    pub fn sandwich(&self, x: &Self) -> Self {
        self.matmul(x).matmul(&self.adjoint())
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        let n = self.dim;
        (0..n).map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum()).collect()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out.entries[(i * m + k) * dim + j * m + l] = a * rhs.entries[k * m + l];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "comparison dimension mismatch");
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entrywise equality within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    /// Entrywise equality within the default tolerance `1e-12`.
    pub fn approx_eq_default(&self, other: &Self) -> bool {
        self.approx_eq(other, DEFAULT_MATRIX_EQ_TOL)
    }

    /// `max |M - M^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self.clone();
        for (o, a) in out.entries.iter_mut().zip(&adj.entries) {
            *o = (*o + *a) * 0.5;
        }
        out
    }

    /// Keep only the diagonal.
    pub fn diagonal_part(&self) -> Self {
        Self::diagonal(&self.diag())
    }
}

/// Wire format `{"dim":d,"re":[..],"im":[..]}` (row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self { dim: m.dim(), re: m.re(), im: m.im() }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::from_parts(self.dim, &self.re, &self.im)
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        j.to_matrix()
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson::from_matrix(&m)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors.get(i, k)).collect()
    }

    /// Rebuild `V f(diag(lambda)) V^dagger`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + v[i] * v[j].conj() * w);
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// Closed form for `dim == 2`, cyclic complex Jacobi for `3..=8`. Each
/// eigenvector is rescaled so its first nonzero component is real positive.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    let scale = m.max_abs().max(1.0);
    let defect = m.hermiticity_defect();
    if defect > 1e-10 * scale {
        return Err(Error::Precondition(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }
    match m.dim() {
        1 => Ok(Eigensystem { values: vec![m.get(0, 0).re], vectors: ComplexMatrix::identity(1) }),
        2 => Ok(eig2(m)),
        d if d <= MAX_EIG_DIM => Ok(jacobi(m)),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigensystem(m).map(|e| e.values)
}

fn eig2(m: &ComplexMatrix) -> Eigensystem {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = (m.get(0, 1) + m.get(1, 0).conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let rad = half.hypot(b.norm());
    let (lo, hi) = (mean - rad, mean + rad);

    if b.norm() <= f64::EPSILON * rad.max(f64::MIN_POSITIVE) || rad == 0.0 {
        // Already diagonal: order the basis vectors by their diagonal entries.
        let (vals, vecs) =
            if a <= d { ([a, d], ComplexMatrix::identity(2)) } else { ([d, a], ComplexMatrix::pauli_x()) };
        return Eigensystem { values: vals.to_vec(), vectors: vecs };
    }

    // Eigenvector for `hi`: choose the better-conditioned of two null-space candidates.
    let c1 = [b, Complex64::new(hi - a, 0.0)];
    let c2 = [Complex64::new(hi - d, 0.0), b.conj()];
    let n1 = c1[0].norm_sqr() + c1[1].norm_sqr();
    let n2 = c2[0].norm_sqr() + c2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
    let n = n.sqrt();
    let vh = fix_phase(&[v[0] / n, v[1] / n]);
    let vl = fix_phase(&[-vh[1].conj(), vh[0].conj()]);

    let vectors = ComplexMatrix::from_2x2(vl[0], vh[0], vl[1], vh[1]);
    Eigensystem { values: vec![lo, hi], vectors }
}

fn fix_phase(v: &[Complex64]) -> Vec<Complex64> {
    let first = v.iter().find(|c| c.norm() > 1e-14).copied();
    match first {
        Some(c) => {
            let ph = c.conj() / c.norm();
            v.iter().map(|&x| x * ph).collect()
        }
        None => v.to_vec(),
    }
}

fn jacobi(m: &ComplexMatrix) -> Eigensystem {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_THRESHOLD * norm {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let mut vectors = ComplexMatrix::zeros(n);
    for (k, &src) in order.iter().enumerate() {
        let col: Vec<Complex64> = (0..n).map(|i| v.get(i, src)).collect();
        for (i, c) in fix_phase(&col).into_iter().enumerate() {
            vectors.set(i, k, c);
        }
    }
    Eigensystem { values: order.iter().map(|&i| diag[i]).collect(), vectors }
}

/// One two-sided Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a.get(p, q);
    let bn = b.norm();
    if bn < 1e-300 {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let phase = b.conj() / bn; // e^{-i alpha}
    let theta = 0.5 * (2.0 * bn).atan2(app - aqq);
    let (s, c) = theta.sin_cos();

    // U restricted to (p, q): [[c, -s], [s e^{-i alpha}, c e^{-i alpha}]]
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(-s, 0.0);
    let uqp = phase * s;
    let uqq = phase * c;
    let n = a.dim();

    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * upp + akq * uqp);
        a.set(k, q, akp * upq + akq * uqq);
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * upp + vkq * uqp);
        v.set(k, q, vkp * upq + vkq * uqq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, upp.conj() * apk + uqp.conj() * aqk);
        a.set(q, k, upq.conj() * apk + uqq.conj() * aqk);
    }
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
}

/// Principal square root of a positive semidefinite matrix (negative eigenvalues clipped).
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eigensystem(m)?.map_values(|x| x.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn check_decomposition(m: &ComplexMatrix) {
        let e = hermitian_eigensystem(m).unwrap();
        assert!(e.reconstruct().approx_eq(m, 1e-10), "reconstruction failed");
        let vdv = e.vectors.adjoint().matmul(&e.vectors);
        assert!(vdv.approx_eq(&ComplexMatrix::identity(m.dim()), 1e-10), "not orthonormal");
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pauli_z_spectrum() {
        let e = hermitian_eigensystem(&ComplexMatrix::pauli_z()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        assert_eq!(e.vector(0), vec![c(0.0), c(1.0)]);
    }

    #[test]
    fn pauli_x_vectors_are_minus_then_plus() {
        let e = hermitian_eigensystem(&ComplexMatrix::pauli_x()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        let minus = e.vector(0);
        let plus = e.vector(1);
        assert!((minus[0] - c(h)).norm() < 1e-15 && (minus[1] + c(h)).norm() < 1e-15);
        assert!((plus[0] - c(h)).norm() < 1e-15 && (plus[1] - c(h)).norm() < 1e-15);
    }

    #[test]
    fn example_rho_spectrum_matches_quadratic() {
        let m = ComplexMatrix::real_2x2(2.0 / 3.0, 0.25, 0.25, 1.0 / 3.0);
        let e = hermitian_eigensystem(&m).unwrap();
        // roots of x^2 - x + (2/9 - 1/16)
        let disc = (1.0f64 - 4.0 * (2.0 / 9.0 - 1.0 / 16.0)).sqrt();
        assert!((e.values[0] - 0.5 * (1.0 - disc)).abs() < 1e-14);
        assert!((e.values[1] - 0.5 * (1.0 + disc)).abs() < 1e-14);
        assert!((disc / 2.0 - 13f64.sqrt() / 12.0).abs() < 1e-15);
        check_decomposition(&m);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::real_2x2(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::Precondition(_))));
    }

    #[test]
    fn jacobi_on_complex_4x4() {
        let entries = [
            (2.0, 0.0),
            (0.3, 0.1),
            (0.0, -0.7),
            (0.2, 0.2),
            (0.3, -0.1),
            (1.0, 0.0),
            (0.5, 0.0),
            (-0.1, 0.4),
            (0.0, 0.7),
            (0.5, 0.0),
            (-1.0, 0.0),
            (0.0, 0.0),
            (0.2, -0.2),
            (-0.1, -0.4),
            (0.0, 0.0),
            (0.5, 0.0),
        ];
        let m = ComplexMatrix::new(4, entries.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap();
        check_decomposition(&m);
        let e = hermitian_eigensystem(&m).unwrap();
        let tr: f64 = e.values.iter().sum();
        assert!((tr - 2.5).abs() < 1e-12);
    }

    #[test]
    fn jacobi_handles_degenerate_spectrum() {
        let m = ComplexMatrix::identity(3).scale_real(0.25);
        let e = hermitian_eigensystem(&m).unwrap();
        assert!(e.values.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        check_decomposition(&m);
    }

    #[test]
    fn kron_dimensions_and_values() {
        let k = ComplexMatrix::pauli_x().kron(&ComplexMatrix::pauli_z());
        assert_eq!(k.dim(), 4);
        assert_eq!(k.get(0, 2), c(1.0));
        assert_eq!(k.get(1, 3), c(-1.0));
        assert_eq!(k.get(0, 0), c(0.0));
    }

    #[test]
    fn new_checks_entry_count() {
        assert!(matches!(ComplexMatrix::new(2, vec![ZERO; 3]), Err(Error::Dimension { expected: 4, got: 3 })));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = ComplexMatrix::real_2x2(2.0 / 3.0, 0.25, 0.25, 1.0 / 3.0);
        let r = psd_sqrt(&m).unwrap();
        assert!(r.matmul(&r).approx_eq(&m, 1e-12));
    }
}
