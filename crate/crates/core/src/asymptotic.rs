//! Bounds on asymptotic conversion rates and the qubit irreversibility region.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::conversion::max_conversion_probability;
use crate::measures::{c_cost_qubit, c_distillable, INCOHERENT_MEASURE};
use crate::state::{binary_entropy, bloch_to_density, density_to_bloch, BlochVector, DensityOperator};
use crate::{Error, Result};

/// Bounds are pinched when they agree to this absolute tolerance.
pub const PINCH_TOL: f64 = 1e-9;

/// Samples stored for the irreversibility boundary.
pub const CURVE_SAMPLES: usize = 1024;

/// Lower and upper bounds on the asymptotic rate `R(rho -> sigma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub lower: f64,
    pub upper: f64,
    pub pinched: bool,
    /// Single-copy optimal probability, one of the two lower bounds.
    pub lower_probability: f64,
    /// `C_d(rho) / C_c(sigma)`, the other lower bound.
    pub lower_ratio: f64,
}

/// `lower = max{P, C_d(rho)/C_c(sigma)}`, `upper = min{C_d ratio, C_c ratio}`.
pub fn rate_bounds(rho: &DensityOperator, sigma: &DensityOperator) -> Result<RateBounds> {
    let r = density_to_bloch(rho)?;
    let s = density_to_bloch(sigma)?;
    let cc_sigma = c_cost_qubit(sigma)?;
    let cd_sigma = c_distillable(sigma);
    if cc_sigma <= INCOHERENT_MEASURE || cd_sigma <= INCOHERENT_MEASURE {
        return Err(Error::UndefinedBound("target is incoherent; its rate is unbounded".into()));
    }
    let cd_rho = c_distillable(rho);
    let cc_rho = c_cost_qubit(rho)?;
    let lower_probability = max_conversion_probability(&r, &s);
    let lower_ratio = cd_rho / cc_sigma;
    let lower = lower_probability.max(lower_ratio);
    let upper = (cd_rho / cd_sigma).min(cc_rho / cc_sigma);
    Ok(RateBounds { lower, upper, pinched: (upper - lower).abs() <= PINCH_TOL, lower_probability, lower_ratio })
}

/// Sufficient condition for unit rate: `s_z^2 <= r_z^2` and `s = r`.
pub fn unit_rate_certificate(rho: &BlochVector, sigma: &BlochVector) -> bool {
    const TOL: f64 = 1e-10;
    sigma.z * sigma.z <= rho.z * rho.z + TOL && (sigma.transverse() - rho.transverse()).abs() <= TOL
}

/// Initial state of the rate-bound scan: Bloch `(1/2, 0, 1/3)`.
pub fn example_rho() -> BlochVector {
    BlochVector::new_unchecked(0.5, 0.0, 1.0 / 3.0)
}

/// `q |+><+| + (1 - q) |-><-|`, Bloch `(2q - 1, 0, 0)`.
pub fn example_sigma(q: f64) -> Result<BlochVector> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Argument(format!("q = {q} outside [0, 1]")));
    }
    Ok(BlochVector::new_unchecked(2.0 * q - 1.0, 0.0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub q: f64,
    pub lower_p: f64,
    pub lower_ratio: f64,
    pub upper: f64,
}

/// Rate bounds from [`example_rho`] to `example_sigma(i/n)` for `i = 1..n`,
/// skipping the incoherent point `q = 1/2`.
pub fn bounds_scan(n: usize) -> Result<Vec<ScanRow>> {
    if n < 2 {
        return Err(Error::Argument(format!("scan needs n >= 2, got {n}")));
    }
    let rho = bloch_to_density(example_rho())?;
    let mut rows = Vec::with_capacity(n);
    for i in 1..n {
        if 2 * i == n {
            continue;
        }
        let q = i as f64 / n as f64;
        let b = rate_bounds(&rho, &bloch_to_density(example_sigma(q)?)?)?;
        rows.push(ScanRow { q, lower_p: b.lower_probability, lower_ratio: b.lower_ratio, upper: b.upper });
    }
    Ok(rows)
}

/// `(C_c, C_d)` of the family state at mixing weight `q`.
fn family_point(q: f64) -> (f64, f64) {
    let off = (q - 0.5).abs();
    let x = 0.5 * (1.0 + (1.0 - 4.0 * off * off).max(0.0).sqrt());
    let cc = binary_entropy(x.clamp(0.0, 1.0)).expect("argument clamped");
    let cd = 1.0 - binary_entropy(q.clamp(0.0, 1.0)).expect("argument clamped");
    (cc, cd.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub q: f64,
    pub cc: f64,
    pub cd: f64,
}

/// `n` samples of `(C_c, C_d)` along `q |+><+| + (1-q) |-><-|`, `q` in `[1/2, 1]`.
pub fn irreversibility_curve(n: usize) -> Result<Vec<CurvePoint>> {
    if n < 2 {
        return Err(Error::Argument(format!("curve needs n >= 2, got {n}")));
    }
    Ok((0..n)
        .map(|i| {
            let q = 0.5 + 0.5 * i as f64 / (n - 1) as f64;
            let (cc, cd) = family_point(q);
            CurvePoint { q, cc, cd }
        })
        .collect())
}

fn stored_curve() -> &'static [CurvePoint] {
    static CURVE: OnceLock<Vec<CurvePoint>> = OnceLock::new();
    CURVE.get_or_init(|| irreversibility_curve(CURVE_SAMPLES).expect("sample count is valid"))
}

/// Minimal `C_d` compatible with coherence cost `cc`. The stored samples
/// bracket `cc`; bisection in `q` inside the bracket pins the exact value,
/// since linear interpolation of the convex boundary would overshoot it.
pub fn curve_lower_bound(cc: f64) -> f64 {
    let curve = stored_curve();
    if cc <= 0.0 {
        return 0.0;
    }
    let last = curve[curve.len() - 1];
    if cc >= last.cc {
        return last.cd;
    }
    let idx = curve.partition_point(|p| p.cc < cc);
    let (mut lo, mut hi) = (curve[idx - 1].q, curve[idx].q);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if family_point(mid).0 < cc {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    family_point(lo).1
}

/// `curve(C_c) <= C_d <= C_c` within `1e-9`.
pub fn region_membership(rho: &DensityOperator) -> Result<bool> {
    let cc = c_cost_qubit(rho)?;
    let cd = c_distillable(rho);
    Ok(curve_lower_bound(cc) <= cd + PINCH_TOL && cd <= cc + PINCH_TOL)
}
