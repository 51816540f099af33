mod common;

use coherence_core::asymptotic::{rate_bounds, region_membership, unit_rate_certificate};
use coherence_core::measures::{
    c_cost_qubit, c_delta_robustness, c_delta_robustness_bloch, c_distillable, c_l1, measure, probability_upper_bound,
    MeasureName,
};
use coherence_core::{bloch_to_density, max_conversion_probability, BlochVector, Complex64, ComplexMatrix};
use common::{bloch, h2, pure_bloch};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn probability_below_measure_ratios(rho in bloch(), sigma in bloch()) {
        prop_assume!(sigma.transverse() > 1e-6);
        let p = max_conversion_probability(&rho, &sigma);
        let (r, s) = (bloch_to_density(rho).unwrap(), bloch_to_density(sigma).unwrap());
        for name in MeasureName::ALL {
            if let Ok(bound) = probability_upper_bound(&r, &s, name) {
                prop_assert!(p <= bound + 1e-9, "{:?}: {} > {}", name, p, bound);
            }
        }
    }

    #[test]
    fn distillable_below_cost(b in bloch()) {
        let rho = bloch_to_density(b).unwrap();
        prop_assert!(c_distillable(&rho) <= c_cost_qubit(&rho).unwrap() + 1e-10);
    }

    #[test]
    fn pure_states_have_equal_cost_and_distillable(b in pure_bloch()) {
        let rho = bloch_to_density(b).unwrap();
        let cd = c_distillable(&rho);
        prop_assert!((cd - c_cost_qubit(&rho).unwrap()).abs() <= 1e-9);
        // entropy of the diagonal
        prop_assert!((cd - h2(0.5 * (1.0 + b.z))).abs() <= 1e-9);
    }

    #[test]
    fn robustness_forms_agree(b in bloch()) {
        let rho = bloch_to_density(b).unwrap();
        prop_assert!((c_delta_robustness(&rho).unwrap() - c_delta_robustness_bloch(b)).abs() <= 1e-10);
    }

    #[test]
    fn l1_is_transverse_radius(b in bloch()) {
        prop_assert!((c_l1(&bloch_to_density(b).unwrap()) - b.transverse()).abs() <= 1e-12);
    }

    #[test]
    fn measures_vanish_on_incoherent_and_ignore_phases(z in -1.0..=1.0f64, b in bloch(), a in 0.0..6.3f64) {
        let inc = bloch_to_density(BlochVector::new_unchecked(0.0, 0.0, z)).unwrap();
        let rho = bloch_to_density(b).unwrap();
        let u = ComplexMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, a)]);
        let rotated = coherence_core::DensityOperator::new(u.sandwich(rho.matrix())).unwrap();
        for name in MeasureName::ALL {
            prop_assert!(measure(&inc, name).unwrap().abs() <= 1e-12);
            prop_assert!((measure(&rho, name).unwrap() - measure(&rotated, name).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn rate_bounds_are_ordered(rho in bloch(), sigma in bloch()) {
        prop_assume!(sigma.transverse() > 1e-3 && rho.transverse() > 1e-6);
        let b = rate_bounds(&bloch_to_density(rho).unwrap(), &bloch_to_density(sigma).unwrap()).unwrap();
        prop_assert!(b.lower <= b.upper + 1e-9, "{:?}", b);
        prop_assert!(b.lower_probability <= 1.0);
    }

    #[test]
    fn unit_rate_certificate_implies_both_steps(rho in bloch(), a in 0.0..6.3f64, f in 0.0..=1.0f64) {
        let r = rho.transverse();
        let sz = rho.z * (2.0 * f - 1.0);
        let sigma = BlochVector::new_unchecked(r * a.cos(), r * a.sin(), sz);
        prop_assert!(unit_rate_certificate(&rho, &sigma));
        prop_assert!((max_conversion_probability(&rho, &sigma) - 1.0).abs() <= 1e-10);
        let (cr, cs) = (c_cost_qubit(&bloch_to_density(rho).unwrap()).unwrap(), c_cost_qubit(&bloch_to_density(sigma).unwrap()).unwrap());
        prop_assert!((cr - cs).abs() <= 1e-10);
    }

    #[test]
    fn random_qubits_lie_in_region(b in bloch()) {
        prop_assert!(region_membership(&bloch_to_density(b).unwrap()).unwrap());
    }
}
