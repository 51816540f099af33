//! Strictly incoherent Kraus operators and instruments built from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::state::{nearest_state, DensityOperator};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Slack allowed when checking that an instrument does not increase trace.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Branches with probability at or below this carry no output state.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrausKind {
    Diagonal,
    Antidiagonal,
    DestroyTo0,
    DestroyTo1,
}

/// A 2x2 strictly incoherent Kraus operator tagged with its structural kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KrausJson", into = "KrausJson")]
pub struct SioKraus {
    kind: KrausKind,
    matrix: ComplexMatrix,
}

impl SioKraus {
    /// `diag(a, b)`.
    pub fn diagonal(a: Complex64, b: Complex64) -> Self {
        Self { kind: KrausKind::Diagonal, matrix: ComplexMatrix::from_2x2(a, ZERO, ZERO, b) }
    }

    /// `[[0, top], [bottom, 0]]`.
    pub fn antidiagonal(top: Complex64, bottom: Complex64) -> Self {
        Self { kind: KrausKind::Antidiagonal, matrix: ComplexMatrix::from_2x2(ZERO, top, bottom, ZERO) }
    }

    /// `c |to><from|`.
    pub fn destroy(to: usize, from: usize, c: Complex64) -> Self {
        assert!(to < 2 && from < 2, "qubit basis index out of range");
        let mut m = ComplexMatrix::zeros(2);
        m.set(to, from, c);
        let kind = if to == 0 { KrausKind::DestroyTo0 } else { KrausKind::DestroyTo1 };
        Self { kind, matrix: m }
    }

    /// Check `matrix` against the structure required by `kind`.
    pub fn with_kind(kind: KrausKind, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: matrix.dim() });
        }
        let z = |i, j| matrix.get(i, j) == ZERO;
        let ok = match kind {
            KrausKind::Diagonal => z(0, 1) && z(1, 0),
            KrausKind::Antidiagonal => z(0, 0) && z(1, 1),
            KrausKind::DestroyTo0 => z(1, 0) && z(1, 1) && (z(0, 0) || z(0, 1)),
            KrausKind::DestroyTo1 => z(0, 0) && z(0, 1) && (z(1, 0) || z(1, 1)),
        };
        if !ok {
            return Err(Error::Precondition(format!("matrix does not have {kind:?} structure")));
        }
        Ok(Self { kind, matrix })
    }

    /// Infer the kind from exact zeros. Single-entry matrices are destroy kinds.
    pub fn classify(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: matrix.dim() });
        }
        let nonzero: Vec<(usize, usize)> =
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).filter(|&(i, j)| matrix.get(i, j) != ZERO).collect();
        let kind = match nonzero.as_slice() {
            [(0, _)] => KrausKind::DestroyTo0,
            [(1, _)] => KrausKind::DestroyTo1,
            _ if matrix.get(0, 1) == ZERO && matrix.get(1, 0) == ZERO => KrausKind::Diagonal,
            _ if matrix.get(0, 0) == ZERO && matrix.get(1, 1) == ZERO => KrausKind::Antidiagonal,
            _ => return Err(Error::Precondition("matrix is not strictly incoherent".into())),
        };
        Ok(Self { kind, matrix })
    }

    pub fn kind(&self) -> KrausKind {
        self.kind
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.entries().iter().all(|&c| c == ZERO)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { kind: self.kind, matrix: self.matrix.scale_real(s) }
    }

    /// `left * K * right` for `left`, `right` each diagonal or antidiagonal unitaries.
    pub fn transformed(&self, left: &ComplexMatrix, right: &ComplexMatrix) -> Self {
        let swaps = |m: &ComplexMatrix| m.get(0, 0) == ZERO;
        let matrix = left.matmul(&self.matrix).matmul(right);
        let kind = match self.kind {
            KrausKind::Diagonal | KrausKind::Antidiagonal => {
                let flip = swaps(left) != swaps(right);
                match (self.kind, flip) {
                    (KrausKind::Diagonal, false) | (KrausKind::Antidiagonal, true) => KrausKind::Diagonal,
                    _ => KrausKind::Antidiagonal,
                }
            }
            KrausKind::DestroyTo0 if swaps(left) => KrausKind::DestroyTo1,
            KrausKind::DestroyTo1 if swaps(left) => KrausKind::DestroyTo0,
            k => k,
        };
        Self { kind, matrix }
    }
}

/// Wire format of one Kraus operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausJson {
    pub kind: KrausKind,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TryFrom<KrausJson> for SioKraus {
    type Error = Error;
    fn try_from(j: KrausJson) -> Result<Self> {
        SioKraus::with_kind(j.kind, ComplexMatrix::from_parts(2, &j.re, &j.im)?)
    }
}

impl From<SioKraus> for KrausJson {
    fn from(k: SioKraus) -> Self {
        KrausJson { kind: k.kind, re: k.matrix.re(), im: k.matrix.im() }
    }
}

/// Kraus operators split into the post-selected success branch and the rest.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SioInstrument {
    pub success: Vec<SioKraus>,
    pub failure: Vec<SioKraus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Success,
    Failure,
}

/// One branch of an applied instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub branch: Branch,
    pub probability: f64,
    /// Normalized output; `None` when the branch has (numerically) zero probability.
    pub state: Option<DensityOperator>,
}

fn gram_sum(ops: &[SioKraus]) -> ComplexMatrix {
    ops.iter().fold(ComplexMatrix::zeros(2), |acc, k| &acc + &k.matrix.adjoint().matmul(&k.matrix))
}

/// `sum_i K_i rho K_i^dagger` (unnormalized).
pub fn kraus_sum(ops: &[SioKraus], rho: &ComplexMatrix) -> ComplexMatrix {
    ops.iter().fold(ComplexMatrix::zeros(rho.dim()), |acc, k| &acc + &k.matrix.sandwich(rho))
}

impl SioInstrument {
    pub fn new(success: Vec<SioKraus>, failure: Vec<SioKraus>) -> Self {
        Self { success, failure }
    }

    pub fn success_gram(&self) -> ComplexMatrix {
        gram_sum(&self.success)
    }

    /// `max |sum_all K^dagger K - 1|`.
    pub fn completeness_residual(&self) -> f64 {
        let total = &self.success_gram() + &gram_sum(&self.failure);
        total.max_abs_diff(&ComplexMatrix::identity(2))
    }

    pub fn is_complete(&self, tol: f64) -> bool {
        self.completeness_residual() <= tol
    }

    pub fn operators(&self) -> impl Iterator<Item = &SioKraus> {
        self.success.iter().chain(&self.failure)
    }

    /// Unnormalized success output `sum_success K rho K^dagger`.
    pub fn success_output(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        kraus_sum(&self.success, rho)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instrument serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Add the diagonal failure operator `diag(sqrt(1 - n_0), sqrt(1 - n_1))` that
/// makes the instrument trace preserving.
pub fn complete_instrument(success: Vec<SioKraus>) -> Result<SioInstrument> {
    let gram = gram_sum(&success);
    let deficit = &ComplexMatrix::identity(2) - &gram;
    let min_eig = hermitian_eigenvalues(&deficit.hermitian_part())?[0];
    if min_eig < -COMPLETENESS_TOL {
        return Err(Error::Precondition(format!("success branch increases trace (deficit eigenvalue {min_eig:.3e})")));
    }
    let c0 = deficit.get(0, 0).re.max(0.0);
    let c1 = deficit.get(1, 1).re.max(0.0);
    let failure = if c0.max(c1) <= ZERO_PROBABILITY {
        Vec::new()
    } else {
        vec![SioKraus::diagonal(c0.sqrt().into(), c1.sqrt().into())]
    };
    Ok(SioInstrument { success, failure })
}

/// Apply every nonempty branch to `rho`.
pub fn apply_instrument(inst: &SioInstrument, rho: &DensityOperator) -> Result<Vec<BranchOutcome>> {
    if rho.dim() != 2 {
        return Err(Error::Dimension { expected: 2, got: rho.dim() });
    }
    let mut out = Vec::with_capacity(2);
    for (branch, ops) in [(Branch::Success, &inst.success), (Branch::Failure, &inst.failure)] {
        if ops.is_empty() {
            continue;
        }
        let m = kraus_sum(ops, rho.matrix()).hermitian_part();
        let p = m.trace().re;
        if p <= ZERO_PROBABILITY {
            out.push(BranchOutcome { branch, probability: p.max(0.0), state: None });
            continue;
        }
        let state = DensityOperator::from_unnormalized(m.clone()).or_else(|_| nearest_state(&m))?;
        out.push(BranchOutcome { branch, probability: p, state: Some(state) });
    }
    Ok(out)
}
