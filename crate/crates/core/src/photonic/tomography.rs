use crate::linalg::ComplexMatrix;
use crate::state::{nearest_state, BlochVector, DensityOperator};
use crate::{Error, Result};

use super::shots::{PauliBasis, ShotRecord};

/// Linear inversion from branch-`K1` counts, `r_i = (N_+ - N_-) / N`, then the
/// nearest valid state when shot noise leaves the Bloch ball.
pub fn tomography_reconstruct(records: &[ShotRecord]) -> Result<DensityOperator> {
    let mut r = [0.0; 3];
    for (i, basis) in PauliBasis::ALL.iter().enumerate() {
        let rec = records
            .iter()
            .find(|rec| rec.basis == *basis)
            .ok_or_else(|| Error::IncompleteData(format!("no record for basis {basis}")))?;
        let (plus, minus) = rec.branch_counts(0);
        if plus + minus == 0 {
            return Err(Error::IncompleteData(format!("basis {basis} has no branch-1 counts")));
        }
        r[i] = (plus as f64 - minus as f64) / (plus + minus) as f64;
    }
    tomography_from_probabilities(BlochVector::new_unchecked(r[0], r[1], r[2]))
}

/// State with the given estimated Bloch vector, projected to a valid state.
pub fn tomography_from_probabilities(r: BlochVector) -> Result<DensityOperator> {
    let id = ComplexMatrix::identity(2);
    let m = &(&(&id + &ComplexMatrix::pauli_x().scale_real(r.x)) + &ComplexMatrix::pauli_y().scale_real(r.y))
        + &ComplexMatrix::pauli_z().scale_real(r.z);
    nearest_state(&m.scale_real(0.5))
}
