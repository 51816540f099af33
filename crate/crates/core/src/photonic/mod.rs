//! Simulation of the linear-optical SIO implementation on a polarization and
//! path register, plus shot-noise tomography.
//!
//! Register index is `pol * n_paths + path` with `pol` 0 = H, 1 = V.

mod shots;
mod tomography;

pub use shots::{estimate_probability, simulate_counts, PauliBasis, ShotRecord};
pub use tomography::{tomography_from_probabilities, tomography_reconstruct};

use serde::{Deserialize, Serialize};

use crate::conversion::{KrausKind, SioInstrument};
use crate::linalg::ComplexMatrix;
use crate::state::DensityOperator;
use crate::{Complex64, Error, Result};

/// Weight allowed in discarded beam-displacer ports.
const LEAK_TOL: f64 = 1e-12;

/// Half-wave plate at `angle_deg`: `[[cos 2g, sin 2g], [sin 2g, -cos 2g]]`.
pub fn hwp_action(angle_deg: f64) -> ComplexMatrix {
    let (s, c) = (2.0 * angle_deg.to_radians()).sin_cos();
    ComplexMatrix::real_2x2(c, s, s, -c)
}

/// Plate, dephasing, plate. Angles follow the preparation convention in which
/// the Bloch vector is `cos 2g1 (sin 2g2, 0, cos 2g2)`, so each plate acts as
/// `hwp_action(g / 2)`.
pub fn prepare_single_qubit(gamma1_deg: f64, gamma2_deg: f64) -> DensityOperator {
    let h1 = hwp_action(0.5 * gamma1_deg);
    let h2 = hwp_action(0.5 * gamma2_deg);
    let after_first = h1.sandwich(&ComplexMatrix::real_diagonal(&[1.0, 0.0]));
    let dephased = after_first.diagonal_part();
    DensityOperator::from_unnormalized(h2.sandwich(&dephased)).expect("plates preserve the trace")
}

/// Preparation angles `(g1, g2)` in degrees for a Bloch vector in the x-z plane.
pub fn preparation_angles(x: f64, z: f64) -> Result<(f64, f64)> {
    let r = x.hypot(z);
    if r > 1.0 + 1e-12 {
        return Err(Error::InvalidState(format!("Bloch radius {r} exceeds 1")));
    }
    let g1 = 0.5 * r.min(1.0).acos().to_degrees();
    let g2 = 0.5 * x.atan2(z).to_degrees();
    Ok((g1, g2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpticalElement {
    Hwp {
        angle_deg: f64,
        path: usize,
    },
    /// First displacer: `V` moves from `e0` to `e1`.
    BdDisplace,
    /// Second displacer: `(H,e0)->d0, (V,e0)->d1, (H,e1)->d2, (V,e1)->d3`.
    BdExpand,
    /// Third displacer: `(V,d0),(H,d3) -> e0` and `(V,d1),(H,d2) -> e1`.
    BdMerge,
    /// `V -> -V` on one path.
    PhaseComp {
        path: usize,
    },
    /// Plate at the same angle on every path.
    HwpAll {
        angle_deg: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPolState {
    pub state: DensityOperator,
    pub path_labels: Vec<String>,
}

const E_LABELS: [&str; 2] = ["e0", "e1"];
const D_LABELS: [&str; 4] = ["d0", "d1", "d2", "d3"];

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl PathPolState {
    /// `rho` in path `e0`, with `e1` empty.
    pub fn input(rho: &DensityOperator) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: rho.dim() });
        }
        let path0 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        Ok(Self { state: DensityOperator::new(rho.matrix().kron(&path0))?, path_labels: labels(&E_LABELS) })
    }

    pub fn n_paths(&self) -> usize {
        self.path_labels.len()
    }

    /// Unnormalized polarization block of one path.
    pub fn path_block(&self, path: usize) -> ComplexMatrix {
        let n = self.n_paths();
        let m = self.state.matrix();
        let mut out = ComplexMatrix::zeros(2);
        for a in 0..2 {
            for b in 0..2 {
                out.set(a, b, m.get(a * n + path, b * n + path));
            }
        }
        out
    }

    /// Polarization state with the path traced out.
    pub fn trace_path(&self) -> DensityOperator {
        let sum = (0..self.n_paths()).fold(ComplexMatrix::zeros(2), |acc, k| &acc + &self.path_block(k));
        DensityOperator::from_unnormalized(sum).expect("trace is preserved by every element")
    }

    pub fn apply(&self, element: &OpticalElement) -> Result<Self> {
        let n = self.n_paths();
        let require = |want: usize| {
            if n == want {
                Ok(())
            } else {
                Err(Error::Precondition(format!("{element:?} needs {want} paths, register has {n}")))
            }
        };
        match *element {
            OpticalElement::Hwp { angle_deg, path } => {
                if path >= n {
                    return Err(Error::Argument(format!("path {path} outside register of {n}")));
                }
                self.conjugate(&local_unitary(&hwp_action(angle_deg), path, n), self.path_labels.clone())
            }
            OpticalElement::HwpAll { angle_deg } => {
                let h = hwp_action(angle_deg).kron(&ComplexMatrix::identity(n));
                self.conjugate(&h, self.path_labels.clone())
            }
            OpticalElement::PhaseComp { path } => {
                if path >= n {
                    return Err(Error::Argument(format!("path {path} outside register of {n}")));
                }
                self.conjugate(&local_unitary(&ComplexMatrix::pauli_z(), path, n), self.path_labels.clone())
            }
            OpticalElement::BdDisplace => {
                require(2)?;
                self.conjugate(&path_permutation([0, 1], [1, 0]), self.path_labels.clone())
            }
            OpticalElement::BdExpand => {
                require(2)?;
                let padded = pad_paths(self.state.matrix(), 2, 4);
                let u = path_permutation([0, 2, 1, 3], [1, 3, 0, 2]);
                Ok(Self { state: DensityOperator::new(u.sandwich(&padded))?, path_labels: labels(&D_LABELS) })
            }
            OpticalElement::BdMerge => {
                require(4)?;
                let u = path_permutation([2, 3, 1, 0], [0, 1, 2, 3]);
                let merged = u.sandwich(self.state.matrix());
                let kept = truncate_paths(&merged, 4, 2);
                let leak = 1.0 - kept.trace().re;
                if leak > LEAK_TOL {
                    return Err(Error::Precondition(format!("weight {leak} left the merged ports")));
                }
                Ok(Self { state: DensityOperator::new(kept)?, path_labels: labels(&E_LABELS) })
            }
        }
    }

    fn conjugate(&self, u: &ComplexMatrix, path_labels: Vec<String>) -> Result<Self> {
        Ok(Self { state: DensityOperator::new(u.sandwich(self.state.matrix()))?, path_labels })
    }
}

/// `op` on the polarization of one path, identity elsewhere.
fn local_unitary(op: &ComplexMatrix, path: usize, n: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(2 * n);
    for a in 0..2 {
        for b in 0..2 {
            u.set(a * n + path, b * n + path, op.get(a, b));
        }
    }
    u
}

/// Polarization-controlled path permutation: `H` on path `k` goes to
/// `h_to[k]`, `V` on path `k` to `v_to[k]`.
fn path_permutation<const N: usize>(h_to: [usize; N], v_to: [usize; N]) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(2 * N);
    for k in 0..N {
        u.set(h_to[k], k, Complex64::new(1.0, 0.0));
        u.set(N + v_to[k], N + k, Complex64::new(1.0, 0.0));
    }
    u
}

fn pad_paths(m: &ComplexMatrix, from: usize, to: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2 * to);
    for (a, b) in (0..2).flat_map(|a| (0..2).map(move |b| (a, b))) {
        for i in 0..from {
            for j in 0..from {
                out.set(a * to + i, b * to + j, m.get(a * from + i, b * from + j));
            }
        }
    }
    out
}

fn truncate_paths(m: &ComplexMatrix, from: usize, to: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2 * to);
    for (a, b) in (0..2).flat_map(|a| (0..2).map(move |b| (a, b))) {
        for i in 0..to {
            for j in 0..to {
                out.set(a * to + i, b * to + j, m.get(a * from + i, b * from + j));
            }
        }
    }
    out
}

/// Element sequence realising `K1 = diag(cos t0, cos t1)` in path `e0` and
/// `K2 = [[0, sin t1], [sin t0, 0]]` in path `e1`.
pub fn sio_circuit(theta0_deg: f64, theta1_deg: f64) -> Vec<OpticalElement> {
    use OpticalElement::*;
    vec![
        BdDisplace,
        Hwp { angle_deg: 0.5 * theta0_deg, path: 0 },
        Hwp { angle_deg: 0.5 * theta1_deg, path: 1 },
        BdExpand,
        Hwp { angle_deg: 45.0, path: 0 },
        Hwp { angle_deg: 0.0, path: 1 },
        Hwp { angle_deg: 0.0, path: 2 },
        Hwp { angle_deg: 45.0, path: 3 },
        BdMerge,
        Hwp { angle_deg: 45.0, path: 0 },
        PhaseComp { path: 0 },
        PhaseComp { path: 1 },
    ]
}

/// Trailing `sigma_z` and `sigma_x` plates that move the output to other quadrants.
pub fn quadrant_corrections(flip_x: bool, flip_z: bool) -> Vec<OpticalElement> {
    let mut out = Vec::new();
    if flip_x {
        out.push(OpticalElement::HwpAll { angle_deg: 0.0 });
    }
    if flip_z {
        out.push(OpticalElement::HwpAll { angle_deg: 45.0 });
    }
    out
}

/// Every intermediate register state, starting with the input.
pub fn run_circuit(elements: &[OpticalElement], rho: &DensityOperator) -> Result<Vec<PathPolState>> {
    let mut states = vec![PathPolState::input(rho)?];
    for e in elements {
        let next = states.last().expect("input is present").apply(e)?;
        states.push(next);
    }
    Ok(states)
}

/// Final register state and its path-traced polarization state.
pub fn simulate_sio_circuit(
    theta0_deg: f64,
    theta1_deg: f64,
    rho: &DensityOperator,
) -> Result<(PathPolState, DensityOperator)> {
    let states = run_circuit(&sio_circuit(theta0_deg, theta1_deg), rho)?;
    let last = states.into_iter().last().expect("input is present");
    let traced = last.trace_path();
    Ok((last, traced))
}

/// The two Kraus operators the circuit realises.
pub fn circuit_kraus(theta0_deg: f64, theta1_deg: f64) -> (ComplexMatrix, ComplexMatrix) {
    let (s0, c0) = theta0_deg.to_radians().sin_cos();
    let (s1, c1) = theta1_deg.to_radians().sin_cos();
    (ComplexMatrix::real_2x2(c0, 0.0, 0.0, c1), ComplexMatrix::real_2x2(0.0, s1, s0, 0.0))
}

/// Circuit angles for an instrument whose success branch is a single real,
/// non-negative `diag(c0, c1)`.
pub fn circuit_angles_for(inst: &SioInstrument) -> Option<(f64, f64)> {
    let [k] = inst.success.as_slice() else { return None };
    if k.kind() != KrausKind::Diagonal {
        return None;
    }
    let (c0, c1) = (k.matrix().get(0, 0), k.matrix().get(1, 1));
    let ok = |c: Complex64| c.im.abs() <= 1e-12 && c.re >= -1e-12 && c.re <= 1.0 + 1e-12;
    if !ok(c0) || !ok(c1) {
        return None;
    }
    let angle = |c: Complex64| c.re.clamp(0.0, 1.0).acos().to_degrees();
    Some((angle(c0), angle(c1)))
}
