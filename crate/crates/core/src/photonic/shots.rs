use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::state::DensityOperator;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    /// Projectors onto the `+1` and `-1` eigenstates.
    pub fn projectors(self) -> [ComplexMatrix; 2] {
        let pauli = match self {
            PauliBasis::X => ComplexMatrix::pauli_x(),
            PauliBasis::Y => ComplexMatrix::pauli_y(),
            PauliBasis::Z => ComplexMatrix::pauli_z(),
        };
        let id = ComplexMatrix::identity(2);
        [(&id + &pauli).scale_real(0.5), (&id - &pauli).scale_real(0.5)]
    }
}

impl fmt::Display for PauliBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliBasis::X => "x",
            PauliBasis::Y => "y",
            PauliBasis::Z => "z",
        })
    }
}

impl FromStr for PauliBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(PauliBasis::X),
            "y" => Ok(PauliBasis::Y),
            "z" => Ok(PauliBasis::Z),
            other => Err(Error::Parse(format!("unknown basis '{other}'"))),
        }
    }
}

/// Counts for one measurement setting. `counts[2 * k + o]` holds branch `k`
/// (`K_{k+1}`) with outcome `o` (0 for `+`, 1 for `-`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub basis: PauliBasis,
    pub counts: Vec<u64>,
    pub n_total: u64,
}

impl ShotRecord {
    pub fn new(basis: PauliBasis, counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() || !counts.len().is_multiple_of(2) {
            return Err(Error::Argument(format!("{} counts do not form outcome pairs", counts.len())));
        }
        let n_total = counts.iter().sum();
        Ok(Self { basis, counts, n_total })
    }

    pub fn branches(&self) -> usize {
        self.counts.len() / 2
    }

    /// `(N_+, N_-)` of one branch.
    pub fn branch_counts(&self, branch: usize) -> (u64, u64) {
        (self.counts[2 * branch], self.counts[2 * branch + 1])
    }

    /// Rows `basis,outcome,count` with outcomes `k1+`, `k1-`, `k2+`, ...
    pub fn to_csv_rows(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.counts.iter().enumerate() {
            let sign = if i % 2 == 0 { '+' } else { '-' };
            out.push_str(&format!("{},k{}{},{}\n", self.basis, i / 2 + 1, sign, c));
        }
        out
    }

    /// Parse `basis,outcome,count` rows, with an optional header, into one
    /// record per basis in order of first appearance.
    pub fn from_csv(text: &str) -> Result<Vec<ShotRecord>> {
        let mut order: Vec<PauliBasis> = Vec::new();
        let mut cells: Vec<Vec<Option<u64>>> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (n == 0 && line.starts_with("basis")) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [basis, outcome, count] = fields[..] else {
                return Err(Error::Parse(format!("line {}: expected 3 fields", n + 1)));
            };
            let basis: PauliBasis = basis.parse()?;
            let slot = parse_outcome(outcome)
                .ok_or_else(|| Error::Parse(format!("line {}: bad outcome '{outcome}'", n + 1)))?;
            let count: u64 = count.parse().map_err(|_| Error::Parse(format!("line {}: bad count '{count}'", n + 1)))?;
            let idx = match order.iter().position(|b| *b == basis) {
                Some(i) => i,
                None => {
                    order.push(basis);
                    cells.push(Vec::new());
                    order.len() - 1
                }
            };
            let row = &mut cells[idx];
            if row.len() <= slot {
                row.resize(slot + 1, None);
            }
            if row[slot].replace(count).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate outcome '{outcome}'", n + 1)));
            }
        }
        order
            .into_iter()
            .zip(cells)
            .map(|(basis, mut row)| {
                if row.len() % 2 != 0 {
                    row.push(None);
                }
                let counts = row
                    .into_iter()
                    .map(|c| c.ok_or_else(|| Error::IncompleteData(format!("basis {basis} misses an outcome"))))
                    .collect::<Result<Vec<_>>>()?;
                ShotRecord::new(basis, counts)
            })
            .collect()
    }
}

fn parse_outcome(s: &str) -> Option<usize> {
    let rest = s.strip_prefix('k').or_else(|| s.strip_prefix('K'))?;
    let (num, sign) = rest.split_at(rest.len().checked_sub(1)?);
    let branch: usize = num.parse().ok()?;
    let o = match sign {
        "+" => 0,
        "-" => 1,
        _ => return None,
    };
    (branch >= 1).then(|| 2 * (branch - 1) + o)
}

/// Multinomial draw of `n_shots` over branch and outcome with weights
/// `p_branch Tr(Pi rho)`, normalised over the detected branches.
pub fn simulate_counts(
    branch_states: &[(f64, DensityOperator)],
    basis: PauliBasis,
    n_shots: u64,
    seed: u64,
) -> Result<ShotRecord> {
    if n_shots == 0 {
        return Err(Error::Argument("n_shots must be positive".into()));
    }
    if branch_states.is_empty() {
        return Err(Error::Argument("no branches to measure".into()));
    }
    let projectors = basis.projectors();
    let mut weights = Vec::with_capacity(2 * branch_states.len());
    for (p, rho) in branch_states {
        if p.is_nan() || *p < 0.0 {
            return Err(Error::Argument(format!("branch probability {p} is negative")));
        }
        if rho.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: rho.dim() });
        }
        for proj in &projectors {
            let born = proj.matmul(rho.matrix()).trace().re.max(0.0);
            weights.push(p * born);
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Argument("branches carry no probability".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; weights.len()];
    let mut left = n_shots;
    let mut mass = 1.0;
    for (i, w) in weights.iter().enumerate() {
        if left == 0 {
            break;
        }
        let w = w / total;
        if i + 1 == weights.len() {
            counts[i] = left;
            break;
        }
        let q = (w / mass).clamp(0.0, 1.0);
        let k = Binomial::new(left, q).expect("probability clamped to [0, 1]").sample(&mut rng);
        counts[i] = k;
        left -= k;
        mass -= w;
    }
    ShotRecord::new(basis, counts)
}

/// `(N_1 / N_total, sqrt(p (1 - p) / N_total))` with `N_1` the branch-`K1` counts.
pub fn estimate_probability(rec: &ShotRecord) -> Result<(f64, f64)> {
    if rec.n_total == 0 {
        return Err(Error::EmptyRecord);
    }
    let (plus, minus) = rec.branch_counts(0);
    let n = rec.n_total as f64;
    let p = (plus + minus) as f64 / n;
    Ok((p, (p * (1.0 - p) / n).sqrt()))
}
