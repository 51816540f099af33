//! Constructive synthesis of strictly incoherent instruments.
//!
//! Both states are first brought into the half plane `y = 0, x >= 0, z >= 0`
//! with diagonal phases and bit flips. In that frame the success branch is
//!
//! ```text
//! K1 = diag(a1, b1),  K2 = [[0, b2], [a2, 0]]
//! a1 = l_a cos((theta - phi)/2),  a2 = l_a sin((theta - phi)/2)
//! b1 = l_b sin((theta + phi)/2),  b2 = l_b cos((theta + phi)/2)
//! l_a = sqrt(2p/(1+r_z)) cos t,   l_b = sqrt(2p/(1-r_z)) sin t
//! ```
//!
//! which succeeds with probability exactly `p` and outputs
//! `s_x = r_x sin 2t sin theta / sqrt(1 - r_z^2)`,
//! `s_z = cos 2t sin theta sin phi + cos theta cos phi`.
//! `phi` is chosen to maximise `s_z`; smaller `s_z` is reached by mixing with the
//! bit-flipped copy `X K1, X K2`, which reflects `s_z` and keeps `s_x`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::state::BlochVector;
use crate::{Error, Inequality, Result};

use super::kraus::{complete_instrument, SioInstrument, SioKraus};
use super::reachability::{max_conversion_probability, violated_inequality, INCOHERENT_RADIUS};
use super::ConversionQuery;

/// Slack when `cos^2 t` lands marginally below its lower limit.
const T_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Initial,
    Target,
}

/// Incoherence-preserving unitary used to bring a state into the reduced frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Symmetry {
    /// `diag(1, e^{-i angle})`: rotates the transverse component onto `+x`.
    ZRotation { angle: f64, on: Party },
    /// `sigma_x`: `z -> -z`.
    XFlip { on: Party },
    /// `sigma_z`: `x -> -x`.
    ZFlip { on: Party },
}

impl Symmetry {
    pub fn unitary(&self) -> ComplexMatrix {
        match *self {
            Symmetry::ZRotation { angle, .. } => {
                ComplexMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, -angle)])
            }
            Symmetry::XFlip { .. } => ComplexMatrix::pauli_x(),
            Symmetry::ZFlip { .. } => ComplexMatrix::pauli_z(),
        }
    }
}

/// Parameters of a synthesized instrument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSolution {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
    /// Weight of the bit-flipped copy of the boundary instrument.
    pub mix_weight: f64,
    /// Incoherent output used when the target itself is incoherent.
    pub incoherent_tail: BlochVector,
    /// Symmetries applied to reach the reduced frame, in order.
    pub applied_symmetries: Vec<Symmetry>,
}

impl SynthesisSolution {
    fn trivial(tail: BlochVector, mix_weight: f64) -> Self {
        Self { t: 0.0, theta: 0.0, phi: 0.0, mix_weight, incoherent_tail: tail, applied_symmetries: Vec::new() }
    }
}

/// Reduced vector `(r, 0, |z|)` and the unitary `U` with `U rho U^dagger` in that frame.
fn reduce(b: &BlochVector, on: Party, syms: &mut Vec<Symmetry>) -> (BlochVector, ComplexMatrix) {
    let r = b.transverse();
    let mut u = ComplexMatrix::identity(2);
    if r > 0.0 {
        let s = if b.y == 0.0 {
            (b.x < 0.0).then_some(Symmetry::ZFlip { on })
        } else {
            Some(Symmetry::ZRotation { angle: b.y.atan2(b.x), on })
        };
        if let Some(s) = s {
            u = s.unitary();
            syms.push(s);
        }
    }
    if b.z < 0.0 {
        let s = Symmetry::XFlip { on };
        u = s.unitary().matmul(&u);
        syms.push(s);
    }
    (BlochVector::new_unchecked(r, 0.0, b.z.abs()), u)
}

/// Instrument whose success branch maps `q.initial` to `q.probability * q.target`.
pub fn synthesize_instrument(q: &ConversionQuery) -> Result<(SioInstrument, SynthesisSolution)> {
    if let Some(violated) = violated_inequality(q) {
        return Err(Error::Infeasible { violated });
    }
    let p = q.probability;
    let sp = p.sqrt();

    if q.target.transverse() <= INCOHERENT_RADIUS {
        return Ok(incoherent_target(p, q.target.z));
    }
    if q.initial == q.target {
        let inst = complete_instrument(vec![SioKraus::diagonal(sp.into(), sp.into())])?;
        return Ok((inst, SynthesisSolution::trivial(BlochVector::ORIGIN, 0.0)));
    }

    let mut syms = Vec::new();
    let (rho, u_rho) = reduce(&q.initial, Party::Initial, &mut syms);
    let (sigma, v_sigma) = reduce(&q.target, Party::Target, &mut syms);

    let (r, rz) = (rho.x, rho.z);
    let (s, sz) = (sigma.x, sigma.z);
    let (u, v) = (1.0 + rz, 1.0 - rz);
    let k = (s * (u * v).sqrt() / r).min(1.0);

    // x = cos^2 t; minimal t within the admissible box is maximal x.
    let x_top = 0.5 * (1.0 + (1.0 - k * k).max(0.0).sqrt());
    let x_floor = 1.0 - v / (2.0 * p);
    let mut x = (u / (2.0 * p)).min(x_top).min(1.0);
    if x < x_floor {
        if x_floor - x > T_SLACK {
            return Err(Error::Infeasible { violated: Inequality::Cylinder });
        }
        x = x_floor;
    }

    let sin2t = 2.0 * (x * (1.0 - x)).sqrt();
    let cos2t = 2.0 * x - 1.0;
    let sin_theta = if sin2t > 0.0 { (k / sin2t).min(1.0) } else { 1.0 };
    let cos_theta = (1.0 - sin_theta * sin_theta).max(0.0).sqrt();
    let theta = sin_theta.atan2(cos_theta);
    let phi = (cos2t * sin_theta).atan2(cos_theta);
    let t = x.sqrt().min(1.0).acos();

    let la = (2.0 * p * x / u).min(1.0).sqrt();
    let lb = (2.0 * p * (1.0 - x) / v).min(1.0).sqrt();
    let (a1, a2) = (la * (0.5 * (theta - phi)).cos(), la * (0.5 * (theta - phi)).sin());
    let (b1, b2) = (lb * (0.5 * (theta + phi)).sin(), lb * (0.5 * (theta + phi)).cos());

    let sz_top = (cos_theta * cos_theta + cos2t * cos2t * sin_theta * sin_theta).sqrt();
    let lambda = if sz_top <= 0.0 || sz >= sz_top { 1.0 } else { 0.5 * (1.0 + sz / sz_top) };
    let (wl, wm) = (lambda.sqrt(), (1.0 - lambda).max(0.0).sqrt());

    let c = |x: f64| Complex64::new(x, 0.0);
    let reduced = [
        SioKraus::diagonal(c(wl * a1), c(wl * b1)),
        SioKraus::antidiagonal(c(wl * b2), c(wl * a2)),
        SioKraus::antidiagonal(c(wm * b1), c(wm * a1)),
        SioKraus::diagonal(c(wm * a2), c(wm * b2)),
    ];
    let v_dag = v_sigma.adjoint();
    let success: Vec<SioKraus> =
        reduced.iter().filter(|k| !k.is_zero()).map(|k| k.transformed(&v_dag, &u_rho)).collect();

    let inst = complete_instrument(success)?;
    let solution = SynthesisSolution {
        t,
        theta,
        phi,
        mix_weight: 1.0 - lambda,
        incoherent_tail: BlochVector::ORIGIN,
        applied_symmetries: syms,
    };
    Ok((inst, solution))
}

/// Measure-and-prepare instrument producing `diag((1+z)/2, (1-z)/2)` with probability `p`.
fn incoherent_target(p: f64, z: f64) -> (SioInstrument, SynthesisSolution) {
    let w0 = (p * 0.5 * (1.0 + z)).max(0.0).sqrt();
    let w1 = (p * 0.5 * (1.0 - z)).max(0.0).sqrt();
    let success: Vec<SioKraus> = [(0, 0, w0), (1, 0, w1), (0, 1, w0), (1, 1, w1)]
        .into_iter()
        .filter(|&(_, _, w)| w > 0.0)
        .map(|(to, from, w)| SioKraus::destroy(to, from, w.into()))
        .collect();
    let inst = complete_instrument(success).expect("measure-and-prepare is trace non-increasing");
    (inst, SynthesisSolution::trivial(BlochVector::new_unchecked(0.0, 0.0, z), 1.0))
}

/// Synthesize at the optimal probability; returns that probability too.
pub fn synthesize_optimal(
    initial: &BlochVector,
    target: &BlochVector,
) -> Result<(SioInstrument, SynthesisSolution, f64)> {
    let p = max_conversion_probability(initial, target);
    if p <= 0.0 {
        let q = ConversionQuery::new(*initial, *target, f64::MIN_POSITIVE)?;
        let violated = violated_inequality(&q).unwrap_or(Inequality::Ellipsoid);
        return Err(Error::Infeasible { violated });
    }
    let (inst, sol) = synthesize_instrument(&ConversionQuery::new(*initial, *target, p)?)?;
    Ok((inst, sol, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conversion::{apply_instrument, is_strictly_incoherent_kraus, Branch};
    use crate::state::bloch_to_density;

    fn check(initial: BlochVector, target: BlochVector, p: f64) -> SynthesisSolution {
        let q = ConversionQuery::new(initial, target, p).unwrap();
        let (inst, sol) = synthesize_instrument(&q).unwrap();
        let rho = bloch_to_density(initial).unwrap();
        let expected = bloch_to_density(target).unwrap().matrix().scale_real(p);
        let got = inst.success_output(rho.matrix());
        assert!(got.approx_eq(&expected, 1e-9), "output mismatch {:?} vs {:?}", got, expected);
        assert!(inst.completeness_residual() <= 1e-10);
        for k in inst.operators() {
            assert!(is_strictly_incoherent_kraus(k.matrix()));
        }
        sol
    }

    #[test]
    fn identity_case() {
        let b = BlochVector::new_unchecked(0.2, -0.4, 0.1);
        let q = ConversionQuery::new(b, b, 1.0).unwrap();
        let (inst, _) = synthesize_instrument(&q).unwrap();
        assert_eq!(inst.success.len(), 1);
        assert!(inst.success[0].matrix().approx_eq_default(&ComplexMatrix::identity(2)));
        assert!(inst.failure.is_empty());
    }

    #[test]
    fn stochastic_maximal_coherence() {
        let rho = BlochVector::new_unchecked(11f64.sqrt() / 6.0, 0.0, 5.0 / 6.0);
        let plus = BlochVector::new_unchecked(1.0, 0.0, 0.0);
        check(rho, plus, 1.0 / 6.0);
        let (inst, _, p) = synthesize_optimal(&rho, &plus).unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-15);
        let out = apply_instrument(&inst, &bloch_to_density(rho).unwrap()).unwrap();
        let success = out.iter().find(|b| b.branch == Branch::Success).unwrap();
        assert!((success.probability - 1.0 / 6.0).abs() < 1e-12);
        let plus_m = bloch_to_density(plus).unwrap();
        assert!(success.state.as_ref().unwrap().matrix().approx_eq(plus_m.matrix(), 1e-9));
    }

    #[test]
    fn deterministic_dephasing_of_z() {
        let rho = BlochVector::new_unchecked(1.0 / 3.0, 0.0, 5.0 / 6.0);
        let sigma = BlochVector::new_unchecked(1.0 / 3.0, 0.0, 0.0);
        check(rho, sigma, 1.0);
    }

    #[test]
    fn symmetries_recorded_and_undone() {
        let rho = BlochVector::new_unchecked(-0.3, 0.2, -0.5);
        let sigma = BlochVector::new_unchecked(0.1, -0.25, -0.2);
        let sol = check(rho, sigma, 0.4);
        assert!(sol.applied_symmetries.contains(&Symmetry::XFlip { on: Party::Initial }));
        assert!(sol.applied_symmetries.contains(&Symmetry::XFlip { on: Party::Target }));
        assert!(sol.applied_symmetries.iter().any(|s| matches!(s, Symmetry::ZRotation { on: Party::Initial, .. })));

        let flipped = check(BlochVector::new_unchecked(-0.5, 0.0, 0.2), BlochVector::new_unchecked(0.3, 0.0, 0.1), 0.8);
        assert_eq!(flipped.applied_symmetries, vec![Symmetry::ZFlip { on: Party::Initial }]);
    }

    #[test]
    fn incoherent_target_uses_destroyers() {
        let rho = BlochVector::new_unchecked(0.3, 0.0, 0.2);
        let sol = check(rho, BlochVector::new_unchecked(0.0, 0.0, -0.6), 0.7);
        assert_eq!(sol.mix_weight, 1.0);
        assert_eq!(sol.incoherent_tail.z, -0.6);
    }

    #[test]
    fn interior_target_mixes_with_mirror() {
        let rho = BlochVector::new_unchecked(0.6, 0.0, 0.3);
        let sol = check(rho, BlochVector::new_unchecked(0.2, 0.0, 0.05), 0.9);
        assert!(sol.mix_weight > 0.0 && sol.mix_weight <= 0.5);
        assert!(sol.t >= 0.0 && sol.t <= std::f64::consts::FRAC_PI_2);
        assert!(sol.phi.abs() <= sol.theta + 1e-15);
    }

    #[test]
    fn unreachable_reports_inequality() {
        let rho = BlochVector::new_unchecked(1.0 / 3.0, 0.0, 5.0 / 6.0);
        let q = ConversionQuery::new(rho, BlochVector::new_unchecked(1.0, 0.0, 0.0), 0.5).unwrap();
        assert_eq!(synthesize_instrument(&q).unwrap_err(), Error::Infeasible { violated: Inequality::Ellipsoid });
        let rho = BlochVector::new_unchecked(11f64.sqrt() / 6.0, 0.0, 5.0 / 6.0);
        let q = ConversionQuery::new(rho, BlochVector::new_unchecked(1.0, 0.0, 0.0), 0.5).unwrap();
        assert_eq!(synthesize_instrument(&q).unwrap_err(), Error::Infeasible { violated: Inequality::Cylinder });
        assert!(synthesize_optimal(
            &BlochVector::new_unchecked(0.0, 0.0, 1.0),
            &BlochVector::new_unchecked(0.5, 0.0, 0.0)
        )
        .is_err());
    }
}
