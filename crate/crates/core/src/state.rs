//! Density operators, Bloch vectors and bipartite states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigensystem, psd_sqrt, ComplexMatrix, MatrixJson};
use crate::numeric::state_tol;
use crate::{Error, Result};

/// Real Bloch vector of a qubit, `rho = (1 + r . sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    /// Validated constructor: the norm must not exceed `1 + tol`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = Self { x, y, z };
        b.validate()?;
        Ok(b)
    }

    /// Constructor without validation, for values known to lie in the ball.
    pub const fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const ORIGIN: BlochVector = BlochVector::new_unchecked(0.0, 0.0, 0.0);

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite() && self.z.is_finite()) {
            return Err(Error::InvalidState("non-finite Bloch component".into()));
        }
        let n2 = self.norm_sqr();
        if n2 > 1.0 + state_tol() {
            return Err(Error::InvalidState(format!("Bloch vector norm^2 {n2} exceeds 1")));
        }
        Ok(())
    }

    /// Transverse radius `sqrt(x^2 + y^2)`, equal to the l1 coherence.
    #[inline]
    pub fn transverse(&self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.transverse() <= tol
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn distance(&self, other: &Self) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new_unchecked(self.x * s, self.y * s, self.z * s)
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        bloch_to_density(*self)
    }
}

/// Which half of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Validated density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validate `matrix` against the global state tolerance.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tol = state_tol();
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let matrix = matrix.hermitian_part();
        let min_eig = hermitian_eigensystem(&matrix)?.values[0];
        if min_eig < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Normalize a positive operator by its trace, then validate.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    /// `|psi><psi|` for a vector normalized internally.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v: Vec<Complex64> = amplitudes.iter().map(|a| a / n).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// `|i><i|` in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        m.set(i, i, Complex64::new(1.0, 0.0));
        Self { matrix: m }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigensystem(&self.matrix).expect("validated state is Hermitian").values
    }

    pub fn to_bloch(&self) -> Result<BlochVector> {
        density_to_bloch(self)
    }

    pub fn is_incoherent(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix.get(i, j).norm() <= tol))
    }
}

/// Closest valid state to a (possibly noisy) Hermitian matrix: symmetrize,
/// clip negative eigenvalues, renormalize.
pub fn nearest_state(m: &ComplexMatrix) -> Result<DensityOperator> {
    let h = m.hermitian_part();
    let eig = hermitian_eigensystem(&h)?;
    let total: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::InvalidState("matrix has no positive part".into()));
    }
    let clipped = eig.map_values(|v| v.max(0.0) / total);
    Ok(DensityOperator { matrix: clipped.hermitian_part() })
}

/// `(1 + r . sigma) / 2`.
pub fn bloch_to_density(b: BlochVector) -> Result<DensityOperator> {
    b.validate()?;
    let half = 0.5;
    let m = ComplexMatrix::from_2x2(
        Complex64::new(half * (1.0 + b.z), 0.0),
        Complex64::new(half * b.x, -half * b.y),
        Complex64::new(half * b.x, half * b.y),
        Complex64::new(half * (1.0 - b.z), 0.0),
    );
    Ok(DensityOperator { matrix: m })
}

/// `r_i = Tr(rho sigma_i)`.
pub fn density_to_bloch(rho: &DensityOperator) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: rho.dim() });
    }
    Ok(matrix_to_bloch(rho.matrix()))
}

/// Bloch components of any 2x2 matrix (trace not required to be 1).
pub fn matrix_to_bloch(m: &ComplexMatrix) -> BlochVector {
    let off = m.get(0, 1) + m.get(1, 0).conj();
    BlochVector::new_unchecked(off.re, -off.im, (m.get(0, 0) - m.get(1, 1)).re)
}

/// Complete dephasing in the computational basis.
pub fn dephase(rho: &DensityOperator) -> DensityOperator {
    DensityOperator { matrix: rho.matrix.diagonal_part() }
}

/// `-x log2 x - (1-x) log2 (1-x)` for `x` in `[0, 1]`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Argument(format!("binary entropy argument {x} outside [0,1]")));
    }
    Ok(shannon_bits(&[x, 1.0 - x]))
}

/// Shannon entropy in bits, with `0 log 0 = 0` and tiny negatives clipped.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum::<f64>().max(0.0)
}

/// `S(rho) = -Tr rho log2 rho`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    if rho.is_incoherent(0.0) {
        let d: Vec<f64> = rho.matrix.diag().iter().map(|c| c.re).collect();
        return shannon_bits(&d);
    }
    shannon_bits(&rho.eigenvalues())
}

/// `(1/2) ||rho - sigma||_1`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let vals = hermitian_eigensystem(&diff.hermitian_part())?.values;
    Ok((0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho, sigma)?;
    let s = psd_sqrt(rho.matrix())?;
    let inner = s.matmul(sigma.matrix()).matmul(&s).hermitian_part();
    let vals = hermitian_eigensystem(&inner)?.values;
    let tr: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

fn same_dim(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), got: b.dim() });
    }
    Ok(())
}

/// State of a two-party system with `A` as the first tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    state: DensityOperator,
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteState {
    pub fn new(state: DensityOperator, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != state.dim() {
            return Err(Error::Dimension { expected: dim_a * dim_b, got: state.dim() });
        }
        Ok(Self { state, dim_a, dim_b })
    }

    pub fn product(a: &DensityOperator, b: &DensityOperator) -> Self {
        let m = a.matrix().kron(b.matrix());
        Self { state: DensityOperator { matrix: m }, dim_a: a.dim(), dim_b: b.dim() }
    }

    /// Pure bipartite state from amplitudes indexed `a * dim_b + b`.
    pub fn pure(amplitudes: &[Complex64], dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(DensityOperator::pure(amplitudes)?, dim_a, dim_b)
    }

    /// `(|00> + |11>) / sqrt 2`.
    pub fn phi_plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self::pure(&[h, z, z, h], 2, 2).expect("phi+ is a valid state")
    }

    /// `q_w |phi+><phi+| + (1 - q_w) 1/4`.
    pub fn werner(q_w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q_w) {
            return Err(Error::Argument(format!("q_w = {q_w} outside [0,1]")));
        }
        let phi = Self::phi_plus();
        let noise = ComplexMatrix::identity(4).scale_real((1.0 - q_w) / 4.0);
        let m = &phi.state.matrix.scale_real(q_w) + &noise;
        Self::new(DensityOperator::new(m)?, 2, 2)
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Entry `<a b| rho |a' b'>`.
    #[inline]
    pub fn entry(&self, a: usize, b: usize, a2: usize, b2: usize) -> Complex64 {
        self.matrix().get(a * self.dim_b + b, a2 * self.dim_b + b2)
    }

    pub fn reduced(&self, keep: Subsystem) -> DensityOperator {
        let (da, db) = (self.dim_a, self.dim_b);
        let m = match keep {
            Subsystem::B => {
                let mut m = ComplexMatrix::zeros(db);
                for b in 0..db {
                    for b2 in 0..db {
                        m.set(b, b2, (0..da).map(|a| self.entry(a, b, a, b2)).sum());
                    }
                }
                m
            }
            Subsystem::A => {
                let mut m = ComplexMatrix::zeros(da);
                for a in 0..da {
                    for a2 in 0..da {
                        m.set(a, a2, (0..db).map(|b| self.entry(a, b, a2, b)).sum());
                    }
                }
                m
            }
        };
        DensityOperator { matrix: m.hermitian_part() }
    }
}

/// Reduced state on the kept subsystem; `keep` is `"A"` or `"B"` when parsed from text.
pub fn partial_trace(rho: &BipartiteState, keep: Subsystem) -> DensityOperator {
    rho.reduced(keep)
}

impl std::str::FromStr for Subsystem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Subsystem::A),
            "B" | "b" => Ok(Subsystem::B),
            other => Err(Error::Argument(format!("unknown subsystem '{other}'"))),
        }
    }
}

/// Two-qubit purification `sum_k sqrt(mu_k) |k>_A |beta_k>_B` of a qubit state.
pub fn purify(rho: &DensityOperator) -> Result<BipartiteState> {
    if rho.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: rho.dim() });
    }
    let eig = hermitian_eigensystem(rho.matrix())?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    for k in 0..2 {
        let w = eig.values[k].max(0.0).sqrt();
        let beta = eig.vector(k);
        for b in 0..2 {
            amps[k * 2 + b] = beta[b] * w;
        }
    }
    BipartiteState::pure(&amps, 2, 2)
}

/// JSON representation of a state: `{"bloch":[x,y,z]}` or
/// `{"matrix":{"dim":d,"re":[..],"im":[..]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateJson {
    Bloch([f64; 3]),
    Matrix(MatrixJson),
}

impl StateJson {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_bloch(b: BlochVector) -> Self {
        StateJson::Bloch(b.to_array())
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        StateJson::Matrix(MatrixJson::from_matrix(rho.matrix()))
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        match self {
            StateJson::Bloch([x, y, z]) => bloch_to_density(BlochVector::new(*x, *y, *z)?),
            StateJson::Matrix(m) => DensityOperator::new(m.to_matrix()?),
        }
    }

    pub fn to_bloch(&self) -> Result<BlochVector> {
        match self {
            StateJson::Bloch([x, y, z]) => BlochVector::new(*x, *y, *z),
            StateJson::Matrix(_) => density_to_bloch(&self.to_density()?),
        }
    }
}
