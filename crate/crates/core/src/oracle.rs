//! Brute-force search over strictly incoherent qubit instruments.
//!
//! Every SIO success branch on a qubit is, up to incoherent symmetries, a sum of
//!
//! ```text
//! K1 = diag(a1, b1),  K2 = [[0, b2], [a2, 0]],  destroyers of weight a3, b3
//! ```
//!
//! with non-negative entries and `l_a = |a| <= 1`, `l_b = |b| <= 1`. For an
//! initial state reduced to `(r, 0, r_z)`, `r, r_z >= 0`, the success branch has
//!
//! ```text
//! p         = l_a^2 (1 + r_z)/2 + l_b^2 (1 - r_z)/2
//! p s_x     = r (a1 b1 + a2 b2)
//! p (1+s_z)/2 = a1^2 (1+r_z)/2 + b2^2 (1-r_z)/2 + destroyed weight sent to |0>
//! ```
//!
//! The oracle evaluates these on a grid and on random draws, never using the
//! closed-form region.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conversion::{complete_instrument, SioInstrument, SioKraus};
use crate::state::BlochVector;
use crate::{Complex64, Error, Result};

/// Probabilities at or below this are discarded from the cloud.
const MIN_PROBABILITY: f64 = 1e-14;

/// Random samples drawn per independent rng stream.
const SAMPLE_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Points per parameter of the `(t, alpha, beta)` grid.
    pub grid_resolution: usize,
    pub random_samples: usize,
    pub seed: u64,
    /// Trace distance within which an output counts as the target.
    pub target_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_resolution: 64, random_samples: 100_000, seed: 0, target_tolerance: 0.01 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 8 {
            return Err(Error::Argument(format!("grid resolution {} below 8", self.grid_resolution)));
        }
        if !(self.target_tolerance > 0.0 && self.target_tolerance <= 0.1) {
            return Err(Error::Argument(format!("target tolerance {} outside (0, 0.1]", self.target_tolerance)));
        }
        Ok(())
    }
}

/// Success output of one instrument in the reduced frame, `s_x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub p: f64,
    pub sx: f64,
    pub sz: f64,
}

/// Instrument from non-negative weights. `split` gives the fraction of each
/// destroyed amplitude (`a3`, `b3`) sent to `|0>`.
pub fn instrument_from_weights(a: [f64; 3], b: [f64; 3], split: (f64, f64)) -> Result<SioInstrument> {
    if a.iter().chain(&b).any(|w| w.is_nan() || *w < 0.0) {
        return Err(Error::Argument("instrument weights must be non-negative".into()));
    }
    if !(0.0..=1.0).contains(&split.0) || !(0.0..=1.0).contains(&split.1) {
        return Err(Error::Argument("destroy split outside [0, 1]".into()));
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut ops = vec![SioKraus::diagonal(c(a[0]), c(b[0])), SioKraus::antidiagonal(c(b[1]), c(a[1]))];
    for (from, w, f) in [(0, a[2], split.0), (1, b[2], split.1)] {
        ops.push(SioKraus::destroy(0, from, c(w * f.sqrt())));
        ops.push(SioKraus::destroy(1, from, c(w * (1.0 - f).sqrt())));
    }
    ops.retain(|k| !k.is_zero());
    complete_instrument(ops)
}

/// Uniform point of the non-negative part of the unit ball in `dim` coordinates.
fn sample_octant<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> [f64; 3] {
    loop {
        let mut v = [0.0; 3];
        for x in v.iter_mut().take(dim) {
            *x = rng.random::<f64>();
        }
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

fn sample_weights<R: Rng + ?Sized>(rng: &mut R, include_destroyers: bool) -> ([f64; 3], [f64; 3], (f64, f64)) {
    let dim = if include_destroyers { 3 } else { 2 };
    let a = sample_octant(rng, dim);
    let b = sample_octant(rng, dim);
    let split = if include_destroyers { (rng.random(), rng.random()) } else { (1.0, 1.0) };
    (a, b, split)
}

/// Random SIO instrument; `a`, `b` are uniform in the non-negative unit ball.
pub fn sample_sio_instrument<R: Rng + ?Sized>(rng: &mut R, include_destroyers: bool) -> SioInstrument {
    let (a, b, split) = sample_weights(rng, include_destroyers);
    instrument_from_weights(a, b, split).expect("sampled weights satisfy the norm bounds")
}

/// `(r, |r_z|)` of an initial state; only these matter up to symmetries.
fn reduced(rho: &BlochVector) -> (f64, f64) {
    (rho.transverse(), rho.z.abs())
}

fn evaluate(r: f64, rz: f64, a: [f64; 3], b: [f64; 3], split: (f64, f64)) -> Option<CloudPoint> {
    let (w0, w1) = (0.5 * (1.0 + rz), 0.5 * (1.0 - rz));
    let la2: f64 = a.iter().map(|x| x * x).sum();
    let lb2: f64 = b.iter().map(|x| x * x).sum();
    let p = la2 * w0 + lb2 * w1;
    if p <= MIN_PROBABILITY {
        return None;
    }
    let coh = r * (a[0] * b[0] + a[1] * b[1]);
    let up = a[0] * a[0] * w0 + b[1] * b[1] * w1 + split.0 * a[2] * a[2] * w0 + split.1 * b[2] * b[2] * w1;
    Some(CloudPoint { p, sx: coh / p, sz: 2.0 * up / p - 1.0 })
}

/// Scale weights so that `max(l_a, l_b) = 1`, which raises `p` and keeps the output.
fn saturate(a: [f64; 3], b: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let la = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let m = la.max(lb);
    if m <= 0.0 {
        return (a, b);
    }
    (a.map(|x| x / m), b.map(|x| x / m))
}

fn grid_weights(params: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let [t, al, be] = params;
    let (la, lb) = (t.cos(), t.sin());
    let m = la.max(lb);
    let (la, lb) = (la / m, lb / m);
    ([la * al.cos(), la * al.sin(), 0.0], [lb * be.sin(), lb * be.cos(), 0.0])
}

/// All success outputs found for one initial state.
#[derive(Debug, Clone)]
pub struct OracleCloud {
    r: f64,
    rz: f64,
    step: f64,
    points: Vec<CloudPoint>,
    /// `(t, alpha, beta)` of the leading grid points of `points`.
    grid_params: Vec<[f64; 3]>,
}

/// Grid candidates handed to local refinement per query.
const REFINE_STARTS: usize = 4;

impl OracleCloud {
    pub fn build(rho: &BlochVector, cfg: &OracleConfig) -> Result<Self> {
        cfg.validate()?;
        rho.validate()?;
        let (r, rz) = reduced(rho);
        let n = cfg.grid_resolution;
        let step = std::f64::consts::FRAC_PI_2 / (n - 1) as f64;

        let grid: Vec<([f64; 3], CloudPoint)> = (0..n * n * n)
            .into_par_iter()
            .filter_map(|idx| {
                let params = [(idx / (n * n)) as f64 * step, ((idx / n) % n) as f64 * step, (idx % n) as f64 * step];
                let (a, b) = grid_weights(params);
                evaluate(r, rz, a, b, (1.0, 1.0)).map(|pt| (params, pt))
            })
            .collect();
        let (grid_params, mut points): (Vec<_>, Vec<_>) = grid.into_iter().unzip();

        let chunks = cfg.random_samples.div_ceil(SAMPLE_CHUNK);
        let sampled: Vec<CloudPoint> = (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(c as u64);
                let count = SAMPLE_CHUNK.min(cfg.random_samples - c * SAMPLE_CHUNK);
                (0..count)
                    .filter_map(|_| {
                        let (a, b, split) = sample_weights(&mut rng, true);
                        let (a, b) = saturate(a, b);
                        evaluate(r, rz, a, b, split)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        points.extend(sampled);
        Ok(Self { r, rz, step, points, grid_params })
    }

    pub fn points(&self) -> &[CloudPoint] {
        &self.points
    }

    /// Largest `p` over instruments built from one cloud point, its bit-flipped
    /// copy and a measure-and-prepare tail, whose output lies within trace
    /// distance `tol` of `sigma`; 0 when nothing matches. The best grid
    /// candidates are then polished by a compass search in `(t, alpha, beta)`.
    pub fn max_probability(&self, sigma: &BlochVector, tol: f64) -> f64 {
        // trace distance is half the Bloch distance
        let s = (sigma.transverse() - 2.0 * tol).max(0.0);
        let sz = sigma.z.abs();
        let best = self.points.par_iter().filter_map(|pt| with_tail(pt, s, sz)).reduce(|| 0.0, f64::max);

        let mut starts: Vec<(f64, usize)> = self
            .grid_params
            .par_iter()
            .enumerate()
            .filter_map(|(i, _)| with_tail(&self.points[i], s, sz).map(|p| (p, i)))
            .collect();
        starts.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        starts.iter().take(REFINE_STARTS).map(|&(p, i)| self.refine(self.grid_params[i], p, s, sz)).fold(best, f64::max)
    }

    fn objective(&self, params: [f64; 3], s: f64, sz: f64) -> Option<f64> {
        let (a, b) = grid_weights(params);
        evaluate(self.r, self.rz, a, b, (1.0, 1.0)).and_then(|pt| with_tail(&pt, s, sz))
    }

    fn refine(&self, mut x: [f64; 3], mut fx: f64, s: f64, sz: f64) -> f64 {
        let mut h = self.step;
        let mut evals = 0;
        while h > 1e-10 && evals < 4000 {
            let mut moved = false;
            for k in 0..3 {
                for dir in [1.0, -1.0] {
                    let mut y = x;
                    y[k] = (y[k] + dir * h).clamp(0.0, std::f64::consts::FRAC_PI_2);
                    evals += 1;
                    if let Some(fy) = self.objective(y, s, sz) {
                        if fy > fx {
                            x = y;
                            fx = fy;
                            moved = true;
                        }
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        fx
    }
}

/// Mix `lambda` of the point's instrument with `1 - lambda` of a
/// measure-and-prepare instrument (`p = 1`, any incoherent output) so that the
/// transverse output equals `s`; the bit-flipped copy and the tail then cover
/// `|s_z|` up to the returned cap.
fn with_tail(pt: &CloudPoint, s: f64, sz: f64) -> Option<f64> {
    if pt.sx < s {
        return None;
    }
    let lambda = if s == 0.0 { 0.0 } else { s / (pt.p * (pt.sx - s) + s) };
    let p = (lambda * pt.p + 1.0 - lambda).min(1.0);
    let z_cap = lambda * pt.p * pt.sz.abs() + 1.0 - lambda;
    (p * sz <= z_cap + 1e-12).then_some(p)
}

/// Best success probability the search finds for `rho -> sigma`.
pub fn oracle_max_probability(rho: &BlochVector, sigma: &BlochVector, cfg: &OracleConfig) -> Result<f64> {
    sigma.validate()?;
    Ok(OracleCloud::build(rho, cfg)?.max_probability(sigma, cfg.target_tolerance))
}

/// Achieved outputs `(s_x, s_z, p)` in the x-z plane with `p >= p_min - tolerance`,
/// reflected into all four quadrants.
pub fn oracle_reachable_set(rho: &BlochVector, p_min: f64, cfg: &OracleConfig) -> Result<Vec<(f64, f64, f64)>> {
    let cloud = OracleCloud::build(rho, cfg)?;
    let mut out = Vec::new();
    for pt in cloud.points.iter().filter(|pt| pt.p >= p_min - cfg.target_tolerance) {
        for (fx, fz) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            if (fx < 0.0 && pt.sx == 0.0) || (fz < 0.0 && pt.sz == 0.0) {
                continue;
            }
            out.push((fx * pt.sx, fz * pt.sz, pt.p));
        }
    }
    Ok(out)
}
