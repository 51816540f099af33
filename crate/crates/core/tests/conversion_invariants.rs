mod common;

use coherence_core::conversion::{
    apply_instrument, coherence_rank, ellipsoid_holds, is_strictly_incoherent_kraus, necessary_sio_condition,
    synthesize_instrument,
};
use coherence_core::{
    bloch_to_density, is_reachable, max_conversion_probability, BlochVector, Complex64, ConversionQuery,
};
use common::{bloch, bloch_xz, pure_bloch};
use proptest::prelude::*;

fn rotate_z(b: &BlochVector, a: f64) -> BlochVector {
    let (s, c) = a.sin_cos();
    BlochVector::new_unchecked(c * b.x - s * b.y, s * b.x + c * b.y, b.z)
}

/// Reachable query: target drawn anywhere, probability below the optimum.
fn reachable_query() -> impl Strategy<Value = ConversionQuery> {
    (bloch(), bloch(), 0.0..=1.0f64).prop_filter_map("unreachable target", |(rho, sigma, frac)| {
        let p = max_conversion_probability(&rho, &sigma);
        let p = p * (0.05 + 0.95 * frac);
        (p > 1e-6).then(|| ConversionQuery::new(rho, sigma, p.min(1.0)).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn self_conversion_is_certain(b in bloch()) {
        prop_assert!((max_conversion_probability(&b, &b) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn probability_grows_with_transverse_radius(rz in -0.95..0.95f64, f1 in 0.0..1.0f64, f2 in 0.0..1.0f64, sigma in bloch_xz()) {
        let rmax = (1.0 - rz * rz).sqrt();
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let a = BlochVector::new_unchecked(lo * rmax, 0.0, rz);
        let b = BlochVector::new_unchecked(hi * rmax, 0.0, rz);
        prop_assert!(max_conversion_probability(&a, &sigma) <= max_conversion_probability(&b, &sigma) + 1e-12);
    }

    #[test]
    fn jump_at_the_ellipsoid(r in 0.05..0.9f64, rz in -0.9..0.9f64, sz in -0.99..0.99f64) {
        prop_assume!(r * r + rz * rz < 0.999);
        let rho = BlochVector::new_unchecked(r, 0.0, rz);
        let edge = r * ((1.0 - sz * sz) / (1.0 - rz * rz)).sqrt();
        prop_assume!(edge * edge + sz * sz <= 1.0 && edge > 1e-3);
        let inside = BlochVector::new_unchecked(edge * (1.0 - 1e-9), 0.0, sz);
        let outside = BlochVector::new_unchecked(edge * (1.0 + 1e-6), 0.0, sz);
        prop_assert!(max_conversion_probability(&rho, &inside) >= 1.0 - rz.abs() - 1e-9);
        if outside.norm() <= 1.0 {
            prop_assert_eq!(max_conversion_probability(&rho, &outside), 0.0);
        }
    }

    #[test]
    fn z_rotation_invariance(rho in bloch(), sigma in bloch(), a in 0.0..6.3f64) {
        let p = max_conversion_probability(&rho, &sigma);
        let q = max_conversion_probability(&rotate_z(&rho, a), &rotate_z(&sigma, a));
        prop_assert!((p - q).abs() <= 1e-9);
    }

    #[test]
    fn optimum_is_reachable_and_tight(rho in bloch(), sigma in bloch()) {
        let p = max_conversion_probability(&rho, &sigma);
        prop_assume!(p > 1e-9);
        let at = ConversionQuery { initial: rho, target: sigma, probability: p };
        prop_assert!(is_reachable(&at));
        if p < 1.0 - 1e-6 {
            let above = (p * (1.0 + 1e-6)).min(1.0);
            let beyond = ConversionQuery { initial: rho, target: sigma, probability: above };
            prop_assert!(!is_reachable(&beyond));
        }
    }

    #[test]
    fn synthesized_instruments_are_exact(q in reachable_query()) {
        let (inst, _) = synthesize_instrument(&q).unwrap();
        let rho = bloch_to_density(q.initial).unwrap();
        let expected = bloch_to_density(q.target).unwrap().matrix().scale_real(q.probability);
        prop_assert!(inst.success_output(rho.matrix()).approx_eq(&expected, 1e-9));
        prop_assert!(inst.completeness_residual() <= 1e-10);
        for k in inst.operators() {
            prop_assert!(is_strictly_incoherent_kraus(k.matrix()));
        }
    }

    #[test]
    fn robustness_condition_matches_ellipsoid(rho in bloch(), sigma in bloch()) {
        prop_assume!(rho.transverse() > 1e-6 && sigma.transverse() > 1e-6);
        let a = necessary_sio_condition(&bloch_to_density(rho).unwrap(), &bloch_to_density(sigma).unwrap()).unwrap();
        let b = ellipsoid_holds(&rho, &sigma);
        // agree away from the boundary surface
        let lhs = rho.transverse().powi(2) * sigma.z * sigma.z + (1.0 - rho.z * rho.z) * sigma.transverse().powi(2);
        prop_assume!((lhs - rho.transverse().powi(2)).abs() > 1e-8);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn kraus_branches_keep_coherence_rank(psi in pure_bloch(), sigma in bloch()) {
        let p = max_conversion_probability(&psi, &sigma);
        prop_assume!(p > 1e-6);
        let (inst, _) = synthesize_instrument(&ConversionQuery::new(psi, sigma, p).unwrap()).unwrap();
        let z = psi.z.clamp(-1.0, 1.0);
        let a = (0.5 * (1.0 + z)).sqrt();
        let b = if a > 1e-12 { Complex64::new(psi.x, psi.y) / (2.0 * a) } else { Complex64::new(1.0, 0.0) };
        let ket = [Complex64::new(a, 0.0), b];
        let rank = coherence_rank(&ket);
        for k in inst.operators() {
            prop_assert!(coherence_rank(&k.matrix().apply(&ket)) <= rank);
        }
        let rho = bloch_to_density(psi).unwrap();
        prop_assert!(apply_instrument(&inst, &rho).is_ok());
    }
}
