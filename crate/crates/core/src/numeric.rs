//! Process-wide numeric policy.
//!
//! State validation (Hermiticity, positivity, unit trace) uses one absolute
//! tolerance. It defaults to `1e-10` and can be changed once at start-up, for
//! example from the `COHERENCE_NUMERIC_TOL` environment variable in the CLI.

use std::sync::atomic::{AtomicU64, Ordering};

/// Default absolute tolerance for state validation.
pub const DEFAULT_STATE_TOL: f64 = 1e-10;

/// Default tolerance for `ComplexMatrix` equality comparisons.
pub const DEFAULT_MATRIX_EQ_TOL: f64 = 1e-12;

/// Slack in favour of reachability when evaluating the conversion inequalities.
pub const REACHABILITY_TOL: f64 = 1e-12;

/// Entries with modulus at or below this are treated as zero amplitudes.
pub const AMPLITUDE_ZERO: f64 = 1e-12;

/// Environment variable consulted by front ends to override the state tolerance.
pub const TOL_ENV_VAR: &str = "COHERENCE_NUMERIC_TOL";

static STATE_TOL_BITS: AtomicU64 = AtomicU64::new(0x3DDB_7CDF_D9D7_BDBB); // 1e-10

/// Current absolute tolerance for state validation.
pub fn state_tol() -> f64 {
    f64::from_bits(STATE_TOL_BITS.load(Ordering::Relaxed))
}

/// Replace the global state tolerance. Non-finite or non-positive values are rejected.
pub fn set_state_tol(tol: f64) -> crate::Result<()> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(crate::Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    STATE_TOL_BITS.store(tol.to_bits(), Ordering::Relaxed);
    Ok(())
}

/// Read [`TOL_ENV_VAR`] and apply it if present.
pub fn apply_env_override() -> crate::Result<Option<f64>> {
    match std::env::var(TOL_ENV_VAR) {
        Ok(raw) => {
            let tol: f64 = raw
                .trim()
                .parse()
                .map_err(|_| crate::Error::Argument(format!("{TOL_ENV_VAR}={raw} is not a number")))?;
            set_state_tol(tol)?;
            Ok(Some(tol))
        }
        Err(_) => Ok(None),
    }
}
