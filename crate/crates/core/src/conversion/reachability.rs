//! Reachable region and optimal probability for qubit conversions.

use crate::numeric::REACHABILITY_TOL;
use crate::state::BlochVector;
use crate::{Error, Inequality, Result};

use super::ConversionQuery;

/// Transverse radii at or below this count as incoherent.
pub const INCOHERENT_RADIUS: f64 = 1e-12;

/// Ellipsoid condition `r^2 s_z^2 + (1 - r_z^2) s^2 <= r^2`.
pub fn ellipsoid_holds(initial: &BlochVector, target: &BlochVector) -> bool {
    let r = initial.transverse();
    let s = target.transverse();
    r * r * target.z * target.z + (1.0 - initial.z * initial.z) * s * s <= r * r + REACHABILITY_TOL
}

/// Cylinder condition at probability `p`. It holds trivially for
/// `p <= 1 - |r_z|`, where the ellipsoid lies inside the cylinder.
pub fn cylinder_holds(initial: &BlochVector, target: &BlochVector, p: f64) -> bool {
    let rz = initial.z.abs();
    let v = 1.0 - rz;
    if p <= v {
        return true;
    }
    let r = initial.transverse();
    let s = target.transverse();
    p * p * s * s <= r * r / (1.0 + rz) * (2.0 * p - v) + REACHABILITY_TOL
}

/// The first reachability inequality that fails, if any.
pub fn violated_inequality(q: &ConversionQuery) -> Option<Inequality> {
    if !ellipsoid_holds(&q.initial, &q.target) {
        Some(Inequality::Ellipsoid)
    } else if !cylinder_holds(&q.initial, &q.target, q.probability) {
        Some(Inequality::Cylinder)
    } else {
        None
    }
}

/// Whether `q.target` can be obtained from `q.initial` with probability `q.probability`.
pub fn is_reachable(q: &ConversionQuery) -> bool {
    violated_inequality(q).is_none()
}

/// Optimal success probability of a stochastic conversion `initial -> target`.
pub fn max_conversion_probability(initial: &BlochVector, target: &BlochVector) -> f64 {
    let s = target.transverse();
    if s <= INCOHERENT_RADIUS {
        return 1.0;
    }
    let r = initial.transverse();
    if r <= INCOHERENT_RADIUS || !ellipsoid_holds(initial, target) {
        return 0.0;
    }
    let rz = initial.z.abs();
    let u = 1.0 + rz;
    let uv = (1.0 - initial.z * initial.z).max(r * r);
    let root = (1.0 - s * s * uv / (r * r)).max(0.0).sqrt();
    (r * r / (u * s * s) * (1.0 + root)).min(1.0)
}

/// `n` points tracing the boundary of the reachable cross-section in the
/// `x`-`z` plane at probability `p`, counter-clockwise from the top.
pub fn reachable_boundary(initial: &BlochVector, p: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Argument(format!("probability {p} outside (0, 1]")));
    }
    if n < 8 {
        return Err(Error::Argument(format!("need at least 8 boundary points, got {n}")));
    }
    let r = initial.transverse();
    if r <= INCOHERENT_RADIUS {
        return Ok(Vec::new());
    }
    let rz = initial.z.abs();
    let (u, v) = (1.0 + rz, 1.0 - rz);
    // Semi-axis of the ellipse along x; along z it is 1.
    let a = (r / (u * v).sqrt()).min(1.0);
    let c = if p <= v { a } else { (r * r * (2.0 * p - v) / (u * p * p)).sqrt().min(a) };
    Ok((0..n)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (sin, cos) = phi.sin_cos();
            ((a * sin).clamp(-c, c), cos)
        })
        .collect())
}
