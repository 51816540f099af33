#![allow(dead_code)]

use std::f64::consts::PI;

use coherence_core::BlochVector;
use proptest::prelude::*;
use rand::Rng;

/// Uniform in the Bloch ball.
pub fn bloch() -> impl Strategy<Value = BlochVector> {
    (0.0..=1.0f64, -1.0..=1.0f64, 0.0..(2.0 * PI)).prop_map(|(u, cos_t, phi)| from_parts(u.cbrt(), cos_t, phi))
}

/// Uniform in the Bloch ball with `y = 0`.
pub fn bloch_xz() -> impl Strategy<Value = BlochVector> {
    (0.0..=1.0f64, 0.0..(2.0 * PI)).prop_map(|(u, a)| {
        let r = u.sqrt();
        BlochVector::new_unchecked(r * a.sin(), 0.0, r * a.cos())
    })
}

/// On the unit sphere.
pub fn pure_bloch() -> impl Strategy<Value = BlochVector> {
    (-1.0..=1.0f64, 0.0..(2.0 * PI)).prop_map(|(cos_t, phi)| from_parts(1.0, cos_t, phi))
}

fn from_parts(r: f64, cos_t: f64, phi: f64) -> BlochVector {
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    BlochVector::new_unchecked(r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t)
}

pub fn random_bloch<R: Rng>(rng: &mut R) -> BlochVector {
    let u: f64 = rng.random();
    from_parts(u.cbrt(), rng.random_range(-1.0..=1.0), rng.random_range(0.0..2.0 * PI))
}

pub fn random_pure<R: Rng>(rng: &mut R) -> BlochVector {
    from_parts(1.0, rng.random_range(-1.0..=1.0), rng.random_range(0.0..2.0 * PI))
}

/// Binary entropy in bits, written out here so tests do not share code with the library.
pub fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}
