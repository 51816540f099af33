//! Coherence quantifiers and the probability bounds they imply.

use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::state::{binary_entropy, dephase, von_neumann_entropy, BlochVector, DensityOperator};
use crate::{Error, Result};

/// Diagonal entries of the dephased state at or below this are outside its support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Measures below this are reported as a free (incoherent) target.
pub const INCOHERENT_MEASURE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureName {
    L1,
    Distillable,
    Cost,
    DeltaRobustness,
}

impl MeasureName {
    pub const ALL: [MeasureName; 4] =
        [MeasureName::L1, MeasureName::Distillable, MeasureName::Cost, MeasureName::DeltaRobustness];
}

impl std::str::FromStr for MeasureName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Self::L1),
            "distillable" => Ok(Self::Distillable),
            "cost" => Ok(Self::Cost),
            "delta_robustness" | "delta-robustness" => Ok(Self::DeltaRobustness),
            other => Err(Error::Argument(format!("unknown measure '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub name: MeasureName,
    pub value: f64,
}

/// All measures of one state; `cost` is only defined for qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub l1: f64,
    pub distillable: f64,
    pub cost: Option<f64>,
    pub delta_robustness: f64,
}

/// Sum of off-diagonal moduli.
pub fn c_l1(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    let n = m.dim();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += m.get(i, j).norm();
            }
        }
    }
    total
}

/// Distillable coherence `S(Delta rho) - S(rho)` in bits.
pub fn c_distillable(rho: &DensityOperator) -> f64 {
    (von_neumann_entropy(&dephase(rho)) - von_neumann_entropy(rho)).max(0.0)
}

/// Qubit coherence cost `h((1 + sqrt(1 - 4|rho_01|^2)) / 2)` in bits.
pub fn c_cost_qubit(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension(rho.dim()));
    }
    let c = rho.matrix().get(0, 1).norm();
    let arg = 0.5 * (1.0 + (1.0 - 4.0 * c * c).max(0.0).sqrt());
    binary_entropy(arg.clamp(0.0, 1.0))
}

/// Delta-robustness `min { t >= 0 : rho <= (1 + t) Delta rho }`, computed as an
/// extreme eigenvalue of `(Delta rho)^{-1/2} rho (Delta rho)^{-1/2}` on the support of `Delta rho`.
pub fn c_delta_robustness(rho: &DensityOperator) -> Result<f64> {
    let m = rho.matrix();
    let support: Vec<usize> = (0..m.dim()).filter(|&i| m.get(i, i).re > SUPPORT_THRESHOLD).collect();
    let k = support.len();
    if k <= 1 {
        return Ok(0.0);
    }
    let scale: Vec<f64> = support.iter().map(|&i| 1.0 / m.get(i, i).re.sqrt()).collect();
    let mut w = ComplexMatrix::zeros(k);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            w.set(a, b, m.get(i, j) * (scale[a] * scale[b]));
        }
    }
    let lam_max = *hermitian_eigenvalues(&w.hermitian_part())?.last().expect("nonempty spectrum");
    Ok((lam_max - 1.0).max(0.0))
}

/// Qubit closed form `r / sqrt(1 - r_z^2)`.
pub fn c_delta_robustness_bloch(b: BlochVector) -> f64 {
    let r = b.transverse();
    if r == 0.0 {
        return 0.0;
    }
    r / (1.0 - b.z * b.z).max(r * r).sqrt()
}

pub fn measure(rho: &DensityOperator, name: MeasureName) -> Result<f64> {
    match name {
        MeasureName::L1 => Ok(c_l1(rho)),
        MeasureName::Distillable => Ok(c_distillable(rho)),
        MeasureName::Cost => c_cost_qubit(rho),
        MeasureName::DeltaRobustness => c_delta_robustness(rho),
    }
}

pub fn measure_report(rho: &DensityOperator) -> Result<MeasureReport> {
    Ok(MeasureReport {
        l1: c_l1(rho),
        distillable: c_distillable(rho),
        cost: if rho.dim() == 2 { Some(c_cost_qubit(rho)?) } else { None },
        delta_robustness: c_delta_robustness(rho)?,
    })
}

/// Upper bound `C(rho) / C(sigma)` on any stochastic conversion probability.
pub fn probability_upper_bound(rho: &DensityOperator, sigma: &DensityOperator, name: MeasureName) -> Result<f64> {
    let cs = measure(sigma, name)?;
    if cs <= INCOHERENT_MEASURE {
        return Err(Error::UndefinedBound(format!("target has vanishing {name:?} coherence")));
    }
    Ok((measure(rho, name)? / cs).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::bloch_to_density;

    fn bloch(x: f64, y: f64, z: f64) -> DensityOperator {
        bloch_to_density(BlochVector::new(x, y, z).unwrap()).unwrap()
    }

    #[test]
    fn l1_values() {
        assert_eq!(c_l1(&DensityOperator::maximally_mixed(2)), 0.0);
        assert!((c_l1(&bloch(1.0, 0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((c_l1(&bloch(1.0 / 3.0, 0.0, 5.0 / 6.0)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn distillable_values() {
        assert!((c_distillable(&bloch(1.0, 0.0, 0.0)) - 1.0).abs() < 1e-12);
        assert_eq!(c_distillable(&bloch(0.0, 0.0, 0.4)), 0.0);
        let rho = DensityOperator::new(ComplexMatrix::real_2x2(2.0 / 3.0, 0.25, 0.25, 1.0 / 3.0)).unwrap();
        let h = |x: f64| -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        let lam = 0.5 + 13f64.sqrt() / 12.0;
        let oracle = h(2.0 / 3.0) - h(lam);
        assert!((c_distillable(&rho) - oracle).abs() < 1e-12);
    }

    #[test]
    fn cost_values() {
        assert!((c_cost_qubit(&bloch(1.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(c_cost_qubit(&bloch(0.0, 0.0, -0.3)).unwrap(), 0.0);
        // |rho_01| = 1/4
        let v = c_cost_qubit(&bloch(0.5, 0.0, 0.0)).unwrap();
        let x = 0.5 * (1.0 + 0.75f64.sqrt());
        let oracle = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        assert!((v - oracle).abs() < 1e-14);
        assert!((v - 0.3546).abs() < 1e-4);
        assert_eq!(c_cost_qubit(&DensityOperator::maximally_mixed(3)), Err(Error::UnsupportedDimension(3)));
    }

    #[test]
    fn delta_robustness_values() {
        assert!((c_delta_robustness(&bloch(1.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        let mu = bloch(0.8245, 0.0, 0.0);
        assert!((c_delta_robustness(&mu).unwrap() - 0.8245).abs() < 1e-12);
        let rho = bloch(1.0 / 3.0, 0.0, 5.0 / 6.0);
        let closed = 2.0 / 11f64.sqrt();
        assert!((c_delta_robustness(&rho).unwrap() - closed).abs() < 1e-12);
        assert!(
            (c_delta_robustness_bloch(BlochVector::new_unchecked(1.0 / 3.0, 0.0, 5.0 / 6.0)) - closed).abs() < 1e-15
        );
    }

    #[test]
    fn delta_robustness_with_empty_diagonal_entry() {
        // qutrit with |2> unpopulated
        let mut m = ComplexMatrix::zeros(3);
        m.set(0, 0, 0.5.into());
        m.set(1, 1, 0.5.into());
        m.set(0, 1, 0.5.into());
        m.set(1, 0, 0.5.into());
        let rho = DensityOperator::new(m).unwrap();
        assert!((c_delta_robustness(&rho).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn upper_bounds() {
        let rho = bloch(1.0 / 3.0, 0.0, 5.0 / 6.0);
        let plus = bloch(1.0, 0.0, 0.0);
        assert!((probability_upper_bound(&rho, &rho, MeasureName::L1).unwrap() - 1.0).abs() < 1e-15);
        assert!((probability_upper_bound(&rho, &plus, MeasureName::L1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let dr = probability_upper_bound(&rho, &plus, MeasureName::DeltaRobustness).unwrap();
        assert!((dr - 2.0 / 11f64.sqrt()).abs() < 1e-12);
        assert!((dr - 0.603).abs() < 1e-3);
        let inc = bloch(0.0, 0.0, 0.2);
        assert!(matches!(probability_upper_bound(&rho, &inc, MeasureName::L1), Err(Error::UndefinedBound(_))));
    }

    #[test]
    fn report_skips_cost_above_qubits() {
        let r = measure_report(&DensityOperator::maximally_mixed(3)).unwrap();
        assert_eq!(r.cost, None);
        assert_eq!(r.l1, 0.0);
    }
}
