//! Process-wide numerical tolerance.
//!
//! Set once at startup (the CLI does this from `--tol`); every PSD and
//! equality verdict in the crate reads it.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_TOL: f64 = 1e-9;

static TOL_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Current tolerance.
pub fn tol() -> f64 {
    f64::from_bits(TOL_BITS.load(Ordering::Relaxed))
}

/// Replaces the global tolerance. Non-positive or non-finite values are
/// rejected and leave the current value untouched.
pub fn set_tol(value: f64) -> bool {
    if !(value.is_finite() && value > 0.0) {
        return false;
    }
    TOL_BITS.store(value.to_bits(), Ordering::Relaxed);
    true
}

/// Smallest eigenvalue still accepted as non-negative for a matrix of the
/// given infinity norm: `-tol * max(1, norm)`.
pub fn psd_threshold(norm_inf: f64) -> f64 {
    -tol() * norm_inf.max(1.0)
}
