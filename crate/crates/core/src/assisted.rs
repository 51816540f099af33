//! Assisted conversion: Alice holds a purification (or a Werner partner) of
//! Bob's qubit, measures, and tells Bob the outcome; Bob then applies a local
//! strictly incoherent instrument.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conversion::{
    apply_instrument, max_conversion_probability, synthesize_optimal, Branch, SioInstrument, INCOHERENT_RADIUS,
};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix};
use crate::measures::{c_delta_robustness_bloch, c_l1};
use crate::state::{density_to_bloch, trace_distance, BipartiteState, BlochVector, DensityOperator, Subsystem};
use crate::{Error, Result};

/// Tolerance for steering identities; eigenvector errors compound here.
pub const STEERING_TOL: f64 = 1e-8;

/// Off-diagonal block entries below this count as vanishing.
pub const QI_TOL: f64 = 1e-10;

/// Bob's marginal as a mixture `q psi1 + (1 - q) psi2` of pure states at the same height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureDecomposition {
    pub weight_q: f64,
    pub psi1: BlochVector,
    pub psi2: BlochVector,
}

impl PureDecomposition {
    pub fn recombined(&self) -> BlochVector {
        let (q, a, b) = (self.weight_q, self.psi1, self.psi2);
        BlochVector::new_unchecked(q * a.x + (1.0 - q) * b.x, q * a.y + (1.0 - q) * b.y, q * a.z + (1.0 - q) * b.z)
    }
}

/// A measurement on Alice's side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliceMeasurement {
    pub povm_elements: Vec<ComplexMatrix>,
    pub labels: Vec<String>,
}

impl AliceMeasurement {
    pub fn completeness_residual(&self) -> f64 {
        let dim = self.povm_elements.first().map_or(1, |m| m.dim());
        let sum = self.povm_elements.iter().fold(ComplexMatrix::zeros(dim), |acc, m| &acc + m);
        sum.max_abs_diff(&ComplexMatrix::identity(dim))
    }

    pub fn computational(dim: usize) -> Self {
        let povm_elements = (0..dim)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(dim);
                m.set(i, i, Complex64::new(1.0, 0.0));
                m
            })
            .collect();
        Self { povm_elements, labels: (0..dim).map(|i| format!("{i}")).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    q_w: f64,
}

impl WernerParams {
    pub fn new(q_w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q_w) {
            return Err(Error::Argument(format!("q_w = {q_w} outside [0, 1]")));
        }
        Ok(Self { q_w })
    }

    pub fn q_w(&self) -> f64 {
        self.q_w
    }
}

/// Optimal assisted probability `min{1, (1 - |r_z|)(1 + sqrt(1 - s^2)) / s^2}`.
pub fn assisted_max_probability(bob_marginal: &BlochVector, target: &BlochVector) -> f64 {
    let s = target.transverse();
    if s <= INCOHERENT_RADIUS {
        return 1.0;
    }
    let s2 = (s * s).min(1.0);
    ((1.0 - bob_marginal.z.abs()) * (1.0 + (1.0 - s2).sqrt()) / s2).min(1.0)
}

/// Symmetric (`q = 1/2`) split of Bob's marginal into two pure states with its `z`.
pub fn optimal_pure_decomposition(rho_b: &BlochVector) -> PureDecomposition {
    let big_r = (1.0 - rho_b.z * rho_b.z).max(0.0).sqrt();
    let r = rho_b.transverse();
    let az = rho_b.z;
    if big_r <= INCOHERENT_RADIUS {
        let pole = BlochVector::new_unchecked(0.0, 0.0, az.signum());
        return PureDecomposition { weight_q: 1.0, psi1: pole, psi2: pole };
    }
    let angle = if r > 0.0 { rho_b.y.atan2(rho_b.x) } else { 0.0 };
    if r >= big_r - 1e-12 {
        let psi = BlochVector::new_unchecked(big_r * angle.cos(), big_r * angle.sin(), az);
        return PureDecomposition { weight_q: 1.0, psi1: psi, psi2: psi };
    }
    let at = |a: f64| BlochVector::new_unchecked(big_r * a.cos(), big_r * a.sin(), az);
    if r == 0.0 {
        let (psi1, psi2) = (at(0.0), BlochVector::new_unchecked(-big_r, 0.0, az));
        return PureDecomposition { weight_q: 0.5, psi1, psi2 };
    }
    let beta = (r / big_r).clamp(-1.0, 1.0).acos();
    PureDecomposition { weight_q: 0.5, psi1: at(angle + beta), psi2: at(angle - beta) }
}

/// State vector of a pure qubit with unit Bloch vector `b`.
pub fn bloch_ket(b: &BlochVector) -> [Complex64; 2] {
    let n = b.norm().max(f64::MIN_POSITIVE);
    let (x, y, z) = (b.x / n, b.y / n, b.z / n);
    if 1.0 + z <= 1e-15 {
        return [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    }
    let a = (0.5 * (1.0 + z)).sqrt();
    let w = 1.0 / (2.0 * (1.0 + z)).sqrt();
    [Complex64::new(a, 0.0), Complex64::new(x * w, y * w)]
}

/// Bob's outcome probability and normalized state after Alice obtains `element`.
pub fn conditional_bob_state(
    rho_ab: &BipartiteState,
    element: &ComplexMatrix,
) -> Result<(f64, Option<DensityOperator>)> {
    let (da, db) = (rho_ab.dim_a(), rho_ab.dim_b());
    if element.dim() != da {
        return Err(Error::Dimension { expected: da, got: element.dim() });
    }
    // Tr_A[(M ⊗ 1) rho] = sum_{a,a'} M_{a'a} <a b|rho|a' b'>
    let mut m = ComplexMatrix::zeros(db);
    for b in 0..db {
        for b2 in 0..db {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..da {
                for a2 in 0..da {
                    acc += element.get(a2, a) * rho_ab.entry(a, b, a2, b2);
                }
            }
            m.set(b, b2, acc);
        }
    }
    let m = m.hermitian_part();
    let p = m.trace().re;
    if p <= 1e-14 {
        return Ok((p.max(0.0), None));
    }
    let state = DensityOperator::from_unnormalized(m.clone()).or_else(|_| crate::state::nearest_state(&m))?;
    Ok((p, Some(state)))
}

fn pure_vector(rho_ab: &BipartiteState) -> Result<Vec<Complex64>> {
    let purity = rho_ab.state().purity();
    if (purity - 1.0).abs() > STEERING_TOL {
        return Err(Error::Precondition(format!("bipartite state is not pure (purity {purity})")));
    }
    let eig = hermitian_eigensystem(rho_ab.matrix())?;
    Ok(eig.vector(eig.values.len() - 1))
}

/// Projective measurement on Alice steering Bob into `dec.psi1` / `dec.psi2`
/// with probabilities `q` / `1 - q`.
pub fn alice_measurement_for(purification: &BipartiteState, dec: &PureDecomposition) -> Result<AliceMeasurement> {
    if purification.dim_a() != 2 || purification.dim_b() != 2 {
        return Err(Error::UnsupportedDimension(purification.dim_a() * purification.dim_b()));
    }
    let marginal = density_to_bloch(&purification.reduced(Subsystem::B))?;
    let mismatch = marginal.distance(&dec.recombined());
    if mismatch > STEERING_TOL {
        return Err(Error::Precondition(format!(
            "decomposition does not match Bob's marginal (distance {mismatch:.3e})"
        )));
    }
    let psi = pure_vector(purification)?;
    // Psi^T[b][a] = psi[a * 2 + b]
    let (p00, p01, p10, p11) = (psi[0], psi[2], psi[1], psi[3]);
    let det = p00 * p11 - p01 * p10;
    if det.norm() <= 1e-12 {
        return Ok(AliceMeasurement::computational(2));
    }
    let solve = |rhs: [Complex64; 2]| -> [Complex64; 2] {
        [(p11 * rhs[0] - p01 * rhs[1]) / det, (-p10 * rhs[0] + p00 * rhs[1]) / det]
    };
    let mut povm_elements = Vec::with_capacity(2);
    for (w, target) in [(dec.weight_q, dec.psi1), (1.0 - dec.weight_q, dec.psi2)] {
        let ket = bloch_ket(&target);
        let sq = w.max(0.0).sqrt();
        let xbar = solve([ket[0] * sq, ket[1] * sq]);
        let x = [xbar[0].conj(), xbar[1].conj()];
        povm_elements.push(ComplexMatrix::outer(&x, &x));
    }
    Ok(AliceMeasurement { povm_elements, labels: vec!["psi1".into(), "psi2".into()] })
}

/// One branch of an assisted protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistedBranch {
    pub label: String,
    pub weight: f64,
    pub bob_state: BlochVector,
    pub success_probability: f64,
    pub instrument: Option<SioInstrument>,
}

/// Full record of an assisted protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistedTranscript {
    pub decomposition: PureDecomposition,
    pub measurement: AliceMeasurement,
    pub branches: Vec<AssistedBranch>,
    pub total_probability: f64,
}

/// Run decomposition, steering and per-branch synthesis end to end.
pub fn assisted_protocol_transcript(purification: &BipartiteState, target: &BlochVector) -> Result<AssistedTranscript> {
    let marginal = density_to_bloch(&purification.reduced(Subsystem::B))?;
    let decomposition = optimal_pure_decomposition(&marginal);
    let measurement = alice_measurement_for(purification, &decomposition)?;
    let target_state = target.to_density()?;
    let mut branches = Vec::new();
    let mut total = 0.0;
    for (element, label) in measurement.povm_elements.iter().zip(&measurement.labels) {
        let (weight, state) = conditional_bob_state(purification, element)?;
        let Some(state) = state else { continue };
        let bob_state = density_to_bloch(&state)?;
        let (instrument, success_probability) = match synthesize_optimal(&bob_state, target) {
            Ok((inst, _, _)) => {
                let outs = apply_instrument(&inst, &state)?;
                let success = outs
                    .iter()
                    .find(|b| b.branch == Branch::Success)
                    .ok_or_else(|| Error::Precondition("instrument has no success branch".into()))?;
                if let Some(out) = &success.state {
                    let dist = trace_distance(out, &target_state)?;
                    if dist > STEERING_TOL {
                        return Err(Error::Precondition(format!("branch output misses target by {dist:.3e}")));
                    }
                }
                (Some(inst), success.probability)
            }
            Err(Error::Infeasible { .. }) => (None, 0.0),
            Err(e) => return Err(e),
        };
        total += weight * success_probability;
        branches.push(AssistedBranch { label: label.clone(), weight, bob_state, success_probability, instrument });
    }
    Ok(AssistedTranscript { decomposition, measurement, branches, total_probability: total })
}

/// Achieved probability of the assisted protocol on a pure two-qubit state.
pub fn assisted_protocol_simulate(purification: &BipartiteState, target: &BlochVector) -> Result<f64> {
    Ok(assisted_protocol_transcript(purification, target)?.total_probability)
}

/// Closed-form Werner threshold: 1 iff `s^2 <= q_w sqrt(1 - s_z^2)`, else 0.
pub fn werner_assisted_probability(w: &WernerParams, target: &BlochVector) -> f64 {
    let s = target.transverse();
    if s <= INCOHERENT_RADIUS || target.z * target.z >= 1.0 {
        return 1.0;
    }
    if s * s <= w.q_w * (1.0 - target.z * target.z).sqrt() {
        1.0
    } else {
        0.0
    }
}

/// Whether Bob's post-protocol state `mu^B` reaches `target` with local SIO,
/// i.e. `C_DR(target) <= q_w`.
pub fn werner_local_reachable(w: &WernerParams, target: &BlochVector) -> bool {
    c_delta_robustness_bloch(*target) <= w.q_w + 1e-12
}

/// Alice measures `{|+>, |->}`; Bob applies `sigma_z` on `-`. Returns Bob's
/// averaged state and the protocol's success probability (always 1).
pub fn werner_protocol_simulate(w: &WernerParams) -> Result<(DensityOperator, f64)> {
    let werner = BipartiteState::werner(w.q_w)?;
    let plus = ComplexMatrix::real_2x2(0.5, 0.5, 0.5, 0.5);
    let minus = ComplexMatrix::real_2x2(0.5, -0.5, -0.5, 0.5);
    let z = ComplexMatrix::pauli_z();
    let mut mu = ComplexMatrix::zeros(2);
    let mut total = 0.0;
    for (element, correction) in [(plus, ComplexMatrix::identity(2)), (minus, z)] {
        let (p, state) = conditional_bob_state(&werner, &element)?;
        if let Some(state) = state {
            mu = &mu + &correction.sandwich(state.matrix()).scale_real(p);
            total += p;
        }
    }
    Ok((DensityOperator::new(mu)?, total))
}

/// No off-diagonal block `<i|_B rho |j>_B` (`i != j`) survives.
pub fn is_quantum_incoherent(rho_ab: &BipartiteState) -> bool {
    let (da, db) = (rho_ab.dim_a(), rho_ab.dim_b());
    for b in 0..db {
        for b2 in 0..db {
            if b == b2 {
                continue;
            }
            for a in 0..da {
                for a2 in 0..da {
                    if rho_ab.entry(a, b, a2, b2).norm() > QI_TOL {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Unit vectors of the frequency-3 subdivided icosahedron (92 points).
pub fn icosphere_directions() -> &'static [[f64; 3]] {
    static DIRS: OnceLock<Vec<[f64; 3]>> = OnceLock::new();
    DIRS.get_or_init(|| {
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        let verts: [[f64; 3]; 12] = [
            [-1.0, g, 0.0],
            [1.0, g, 0.0],
            [-1.0, -g, 0.0],
            [1.0, -g, 0.0],
            [0.0, -1.0, g],
            [0.0, 1.0, g],
            [0.0, -1.0, -g],
            [0.0, 1.0, -g],
            [g, 0.0, -1.0],
            [g, 0.0, 1.0],
            [-g, 0.0, -1.0],
            [-g, 0.0, 1.0],
        ];
        let faces: [[usize; 3]; 20] = [
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        const FREQ: usize = 3;
        let mut out: Vec<[f64; 3]> = Vec::with_capacity(92);
        for f in faces {
            for i in 0..=FREQ {
                for j in 0..=FREQ - i {
                    let k = FREQ - i - j;
                    let mut p = [0.0; 3];
                    for (c, pc) in p.iter_mut().enumerate() {
                        *pc = (i as f64 * verts[f[0]][c] + j as f64 * verts[f[1]][c] + k as f64 * verts[f[2]][c])
                            / FREQ as f64;
                    }
                    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                    let p = [p[0] / n, p[1] / n, p[2] / n];
                    let seen = out.iter().any(|q| {
                        (q[0] - p[0]).abs() < 1e-9 && (q[1] - p[1]).abs() < 1e-9 && (q[2] - p[2]).abs() < 1e-9
                    });
                    if !seen {
                        out.push(p);
                    }
                }
            }
        }
        out
    })
}

/// Search Alice's projective qubit measurements for one that moves Bob's
/// conditional state away from his marginal. `None` for product states.
pub fn correlation_advantage_witness(rho_ab: &BipartiteState) -> Result<Option<AliceMeasurement>> {
    if rho_ab.dim_a() != 2 {
        return Err(Error::UnsupportedDimension(rho_ab.dim_a()));
    }
    let marginal = rho_ab.reduced(Subsystem::B);
    let mut best: Option<(f64, f64, AliceMeasurement)> = None;
    for d in icosphere_directions() {
        let b = BlochVector::new_unchecked(d[0], d[1], d[2]);
        let proj = b.to_density()?.into_matrix();
        let comp = &ComplexMatrix::identity(2) - &proj;
        let mut dist = 0.0f64;
        let mut coherence = 0.0f64;
        for m in [&proj, &comp] {
            let (p, state) = conditional_bob_state(rho_ab, m)?;
            if let (true, Some(state)) = (p > 1e-12, state) {
                dist = dist.max(trace_distance(&state, &marginal)?);
                coherence = coherence.max(c_l1(&state));
            }
        }
        let better = match &best {
            None => true,
            Some((bd, bc, _)) => dist > bd + 1e-12 || ((dist - bd).abs() <= 1e-12 && coherence > bc + 1e-12),
        };
        if better {
            let meas = AliceMeasurement { povm_elements: vec![proj, comp], labels: vec!["+n".into(), "-n".into()] };
            best = Some((dist, coherence, meas));
        }
    }
    Ok(best.and_then(|(dist, _, m)| (dist > STEERING_TOL).then_some(m)))
}

/// Assisted bound is never worse than the unassisted optimum.
pub fn assistance_gain(bob_marginal: &BlochVector, target: &BlochVector) -> f64 {
    assisted_max_probability(bob_marginal, target) - max_conversion_probability(bob_marginal, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{bloch_to_density, purify};

    fn b(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new(x, y, z).unwrap()
    }

    #[test]
    fn assisted_formula_values() {
        let plus = b(1.0, 0.0, 0.0);
        assert!((assisted_max_probability(&b(0.0, 0.0, 5.0 / 6.0), &plus) - 1.0 / 6.0).abs() < 1e-15);
        for s in [0.1, 0.5, 0.99, 1.0] {
            assert_eq!(assisted_max_probability(&b(0.3, 0.0, 0.0), &b(s, 0.0, 0.0)), 1.0);
        }
        let t = b(0.7, 0.0, 0.2);
        assert_eq!(
            assisted_max_probability(&b(0.0, 0.0, 5.0 / 6.0), &t),
            assisted_max_probability(&b(1.0 / 3.0, 0.0, 5.0 / 6.0), &t)
        );
        assert_eq!(assisted_max_probability(&b(0.0, 0.0, 0.9), &b(0.0, 0.0, -1.0)), 1.0);
    }

    #[test]
    fn decomposition_of_incoherent_marginal() {
        let d = optimal_pure_decomposition(&b(0.0, 0.0, 5.0 / 6.0));
        let x = 11f64.sqrt() / 6.0;
        assert_eq!(d.weight_q, 0.5);
        assert!(d.psi1.distance(&b(x, 0.0, 5.0 / 6.0)) < 1e-15);
        assert!(d.psi2.distance(&b(-x, 0.0, 5.0 / 6.0)) < 1e-15);
    }

    #[test]
    fn decomposition_recombines() {
        let r = b(1.0 / 3.0, 0.0, 5.0 / 6.0);
        let d = optimal_pure_decomposition(&r);
        assert!(d.recombined().distance(&r) < 1e-15);
        for psi in [d.psi1, d.psi2] {
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            assert_eq!(psi.z, 5.0 / 6.0);
        }
    }

    #[test]
    fn decomposition_of_pure_is_trivial() {
        let pure = b(0.6, 0.0, 0.8);
        let d = optimal_pure_decomposition(&pure);
        assert_eq!(d.weight_q, 1.0);
        assert!(d.psi1.distance(&pure) < 1e-15);
        let pole = optimal_pure_decomposition(&b(0.0, 0.0, -1.0));
        assert_eq!(pole.psi1, b(0.0, 0.0, -1.0));
    }

    #[test]
    fn maximally_entangled_steers_to_plus_minus() {
        let phi = BipartiteState::phi_plus();
        let dec = PureDecomposition { weight_q: 0.5, psi1: b(1.0, 0.0, 0.0), psi2: b(-1.0, 0.0, 0.0) };
        let m = alice_measurement_for(&phi, &dec).unwrap();
        assert!(m.completeness_residual() < 1e-12);
        // Alice measures |+>/|->, conjugate to the computational basis
        let plus = ComplexMatrix::real_2x2(0.5, 0.5, 0.5, 0.5);
        assert!(m.povm_elements[0].approx_eq(&plus, 1e-12));
        for (elem, want) in m.povm_elements.iter().zip([dec.psi1, dec.psi2]) {
            let (p, st) = conditional_bob_state(&phi, elem).unwrap();
            assert!((p - 0.5).abs() < 1e-12);
            assert!(density_to_bloch(&st.unwrap()).unwrap().distance(&want) < 1e-8);
        }
    }

    #[test]
    fn product_state_gets_computational_basis() {
        let bob = bloch_to_density(b(0.6, 0.0, 0.8)).unwrap();
        let prod = BipartiteState::product(&DensityOperator::basis(2, 0), &bob);
        let dec = optimal_pure_decomposition(&b(0.6, 0.0, 0.8));
        let m = alice_measurement_for(&prod, &dec).unwrap();
        assert_eq!(m, AliceMeasurement::computational(2));
    }

    #[test]
    fn steering_a_purification() {
        let r = b(0.0, 0.0, 5.0 / 6.0);
        let pur = purify(&r.to_density().unwrap()).unwrap();
        let dec = optimal_pure_decomposition(&r);
        let m = alice_measurement_for(&pur, &dec).unwrap();
        assert!(m.completeness_residual() < 1e-10);
        for (elem, (q, want)) in m.povm_elements.iter().zip([(0.5, dec.psi1), (0.5, dec.psi2)]) {
            let (p, st) = conditional_bob_state(&pur, elem).unwrap();
            assert!((p - q).abs() < 1e-8);
            assert!(density_to_bloch(&st.unwrap()).unwrap().distance(&want) < 1e-8);
        }
    }

    #[test]
    fn marginal_mismatch_rejected() {
        let pur = purify(&b(0.0, 0.0, 0.5).to_density().unwrap()).unwrap();
        let dec = optimal_pure_decomposition(&b(0.0, 0.0, 0.4));
        assert!(matches!(alice_measurement_for(&pur, &dec), Err(Error::Precondition(_))));
    }

    #[test]
    fn protocol_reaches_assisted_optimum() {
        let r = b(0.0, 0.0, 5.0 / 6.0);
        let pur = purify(&r.to_density().unwrap()).unwrap();
        let p = assisted_protocol_simulate(&pur, &b(1.0, 0.0, 0.0)).unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-8);
        let p = assisted_protocol_simulate(&pur, &b(0.0, 0.0, 1.0)).unwrap();
        assert!((p - 1.0).abs() < 1e-12);

        let r = b(1.0 / 3.0, 0.0, 5.0 / 6.0);
        let pur = purify(&r.to_density().unwrap()).unwrap();
        let target = b(11f64.sqrt() / 6.0 * 0.9, 0.0, 0.0);
        let p = assisted_protocol_simulate(&pur, &target).unwrap();
        assert!((p - assisted_max_probability(&r, &target)).abs() < 1e-8);
    }

    #[test]
    fn werner_thresholds() {
        let w = WernerParams::new(0.8245).unwrap();
        assert_eq!(werner_assisted_probability(&w, &b(0.9, 0.0, 0.0)), 1.0);
        assert_eq!(werner_assisted_probability(&w, &b(0.92, 0.0, 0.0)), 0.0);
        let w = WernerParams::new(0.2075).unwrap();
        assert_eq!(werner_assisted_probability(&w, &b(0.0, 0.0, 0.3)), 1.0);
        assert!(WernerParams::new(1.2).is_err());
    }

    #[test]
    fn werner_protocol_states() {
        let (mu, p) = werner_protocol_simulate(&WernerParams::new(1.0).unwrap()).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(density_to_bloch(&mu).unwrap().distance(&b(1.0, 0.0, 0.0)) < 1e-12);
        let (mu, _) = werner_protocol_simulate(&WernerParams::new(0.0).unwrap()).unwrap();
        assert!(mu.matrix().approx_eq(DensityOperator::maximally_mixed(2).matrix(), 1e-12));
        let (mu, _) = werner_protocol_simulate(&WernerParams::new(0.8245).unwrap()).unwrap();
        assert!(density_to_bloch(&mu).unwrap().distance(&b(0.8245, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn quantum_incoherence() {
        let a = bloch_to_density(b(0.3, 0.4, 0.1)).unwrap();
        let diag = bloch_to_density(b(0.0, 0.0, 0.6)).unwrap();
        assert!(is_quantum_incoherent(&BipartiteState::product(&a, &diag)));
        assert!(!is_quantum_incoherent(&BipartiteState::phi_plus()));
        assert!(is_quantum_incoherent(&BipartiteState::werner(0.0).unwrap()));
    }

    #[test]
    fn icosphere_has_92_unit_directions() {
        let d = icosphere_directions();
        assert_eq!(d.len(), 92);
        for p in d {
            assert!(((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn witness_examples() {
        let a = bloch_to_density(b(0.3, 0.4, 0.1)).unwrap();
        let bb = bloch_to_density(b(0.2, 0.0, 0.5)).unwrap();
        assert!(correlation_advantage_witness(&BipartiteState::product(&a, &bb)).unwrap().is_none());

        let phi = BipartiteState::phi_plus();
        let m = correlation_advantage_witness(&phi).unwrap().unwrap();
        let (_, st) = conditional_bob_state(&phi, &m.povm_elements[0]).unwrap();
        assert!(trace_distance(&st.unwrap(), &DensityOperator::maximally_mixed(2)).unwrap() > 1e-8);

        // classically correlated: 1/2 (|00><00| + |11><11|)
        let cc = DensityOperator::new(ComplexMatrix::real_diagonal(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        let cc = BipartiteState::new(cc, 2, 2).unwrap();
        assert!(correlation_advantage_witness(&cc).unwrap().is_some());
    }
}
