//! Resource budgets shared by the coefficient kernels and the prime searches.

use serde::{Deserialize, Serialize};

/// Default coefficient-buffer budget (number of 64-bit terms).
pub const DEFAULT_MAX_COEFFS: usize = 20_000_000;

/// Default number of arithmetic-progression steps before a search gives up.
pub const DEFAULT_AP_STEPS: u64 = 1 << 40;

/// Default ceiling on the degree a streaming height evaluation will walk.
pub const DEFAULT_STREAM_DEGREE_CAP: u64 = 4_000_000_000;

/// Default upper limit accepted by the sieve.
pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Maximum number of coefficients held in memory at once, for a dense
    /// series or for the ring buffers of a streaming evaluation.
    pub max_coeffs: usize,
    /// Steps taken along an arithmetic progression before reporting not-found.
    pub ap_steps: u64,
    /// Largest degree a streaming height evaluation is allowed to traverse.
    pub stream_degree_cap: u64,
    /// Largest limit accepted by [`crate::primes::small_primes`].
    pub sieve_limit: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_coeffs: DEFAULT_MAX_COEFFS,
            ap_steps: DEFAULT_AP_STEPS,
            stream_degree_cap: DEFAULT_STREAM_DEGREE_CAP,
            sieve_limit: DEFAULT_SIEVE_LIMIT,
        }
    }
}

impl Budget {
    pub fn with_max_coeffs(mut self, max_coeffs: usize) -> Self {
        self.max_coeffs = max_coeffs;
        self
    }

    /// Value cap for a progression search starting above `lower_bound` with
    /// step `modulus`, saturating at `u64::MAX`.
    pub fn ap_cap(&self, lower_bound: u64, modulus: u64) -> u64 {
        lower_bound.saturating_add(modulus.saturating_mul(self.ap_steps))
    }
}
