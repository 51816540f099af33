//! Qubit state conversion under strictly incoherent operations.

mod kraus;
mod reachability;
mod synthesis;

pub use kraus::{
    apply_instrument, complete_instrument, kraus_sum, Branch, BranchOutcome, KrausJson, KrausKind, SioInstrument,
    SioKraus, COMPLETENESS_TOL, ZERO_PROBABILITY,
};
pub use reachability::{
    cylinder_holds, ellipsoid_holds, is_reachable, max_conversion_probability, reachable_boundary, violated_inequality,
    INCOHERENT_RADIUS,
};
pub use synthesis::{synthesize_instrument, synthesize_optimal, Party, Symmetry, SynthesisSolution};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::measures::c_delta_robustness;
use crate::numeric::AMPLITUDE_ZERO;
use crate::state::{BlochVector, DensityOperator};
use crate::{Error, Result};

/// Initial state, target state and demanded success probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionQuery {
    pub initial: BlochVector,
    pub target: BlochVector,
    pub probability: f64,
}

impl ConversionQuery {
    pub fn new(initial: BlochVector, target: BlochVector, probability: f64) -> Result<Self> {
        initial.validate()?;
        target.validate()?;
        if !(probability > 0.0 && probability <= 1.0) {
            return Err(Error::Argument(format!("probability {probability} outside (0, 1]")));
        }
        Ok(Self { initial, target, probability })
    }
}

fn nonzero(c: Complex64) -> bool {
    c.norm() > AMPLITUDE_ZERO
}

/// Every column has at most one nonzero entry, so basis states map to basis states.
pub fn is_incoherent_kraus(k: &ComplexMatrix) -> bool {
    let n = k.dim();
    (0..n).all(|j| (0..n).filter(|&i| nonzero(k.get(i, j))).count() <= 1)
}

/// Both `K` and `K^dagger` are incoherent.
pub fn is_strictly_incoherent_kraus(k: &ComplexMatrix) -> bool {
    let n = k.dim();
    is_incoherent_kraus(k) && (0..n).all(|i| (0..n).filter(|&j| nonzero(k.get(i, j))).count() <= 1)
}

/// Necessary condition `C_DR(sigma) <= C_DR(rho)` for any stochastic SIO conversion.
pub fn necessary_sio_condition(rho: &DensityOperator, sigma: &DensityOperator) -> Result<bool> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension { expected: rho.dim(), got: sigma.dim() });
    }
    Ok(c_delta_robustness(sigma)? <= c_delta_robustness(rho)? + 1e-10)
}

/// Number of amplitudes with modulus above `1e-12`.
pub fn coherence_rank(amplitudes: &[Complex64]) -> usize {
    amplitudes.iter().filter(|&&a| nonzero(a)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::bloch_to_density;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn incoherence_predicates() {
        let d = ComplexMatrix::real_2x2(0.3, 0.0, 0.0, 0.9);
        let a = ComplexMatrix::real_2x2(0.0, 0.3, 0.9, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = ComplexMatrix::real_2x2(h, h, h, h);
        for m in [&d, &a] {
            assert!(is_incoherent_kraus(m) && is_strictly_incoherent_kraus(m));
        }
        assert!(!is_incoherent_kraus(&had) && !is_strictly_incoherent_kraus(&had));
        // |0><0| + |0><1| is incoherent but its adjoint is not
        let merge = ComplexMatrix::real_2x2(1.0, 1.0, 0.0, 0.0);
        assert!(is_incoherent_kraus(&merge) && !is_strictly_incoherent_kraus(&merge));
    }

    #[test]
    fn query_validation() {
        let b = BlochVector::new_unchecked(0.1, 0.0, 0.1);
        assert!(ConversionQuery::new(b, b, 0.0).is_err());
        assert!(ConversionQuery::new(b, b, 1.0 + 1e-9).is_err());
        assert!(ConversionQuery::new(b, BlochVector::new_unchecked(1.0, 1.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn necessary_condition_examples() {
        let rho = bloch_to_density(BlochVector::new_unchecked(1.0 / 3.0, 0.0, 5.0 / 6.0)).unwrap();
        let plus = bloch_to_density(BlochVector::new_unchecked(1.0, 0.0, 0.0)).unwrap();
        let inc = bloch_to_density(BlochVector::new_unchecked(0.0, 0.0, -0.7)).unwrap();
        assert!(necessary_sio_condition(&rho, &inc).unwrap());
        assert!(!necessary_sio_condition(&rho, &plus).unwrap());
        assert!(necessary_sio_condition(&rho, &rho).unwrap());
        assert!(necessary_sio_condition(&rho, &DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(coherence_rank(&[c(1.0), c(0.0)]), 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(coherence_rank(&[c(h), c(h)]), 2);
        let t = 1.0 / 3f64.sqrt();
        assert_eq!(coherence_rank(&[c(t), c(t), c(t)]), 3);
    }
}
