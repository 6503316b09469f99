//! Closed-form bounds for comparison against simulation output.
//!
//! All functions are pure, total over validated inputs, and evaluated in
//! double precision; regime conditions of the form "for all sufficiently
//! large n" are the caller's responsibility and are surfaced as predicates
//! rather than baked into the values.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("invalid bound input: {0}")]
    Domain(String),
}

fn require(cond: bool, msg: &str) -> Result<(), BoundsError> {
    if cond {
        Ok(())
    } else {
        Err(BoundsError::Domain(msg.into()))
    }
}

/// Union bound over the 2^k prefix classes of a Chernoff tail:
///
///   P(some k-prefix class holds >= 2*eps*n of n strings) <= 2^k * e^(-eps*n/2)
///
/// whenever every single k-prefix has probability at most eps. Clamped to 1,
/// where the raw value is vacuous as a probability bound.
pub fn chernoff_crowding_bound(n: u64, k: u32, eps: f64) -> Result<f64, BoundsError> {
    require(n >= 1, "n must be at least 1")?;
    require(k >= 1, "k must be at least 1")?;
    require(
        eps.is_finite() && eps > 0.0 && eps < 1.0,
        "eps must lie strictly in (0, 1)",
    )?;
    Ok((2f64.powi(k as i32) * (-eps * n as f64 / 2.0).exp()).min(1.0))
}

/// Lower tail of a Binomial(n, 4/alpha_n) count below half its mean:
///
///   P(X_n < 2n/alpha_n) <= e^(-n / (2*alpha_n)).
pub fn okamoto_bound(n: u64, alpha_n: f64) -> Result<f64, BoundsError> {
    require(n >= 1, "n must be at least 1")?;
    require(
        alpha_n.is_finite() && alpha_n > 0.0,
        "alpha_n must be positive",
    )?;
    Ok((-(n as f64) / (2.0 * alpha_n)).exp())
}

/// True when `alpha_n` sits in the regime the Okamoto step assumes.
/// Smaller values still evaluate, but callers should surface a warning.
pub fn okamoto_regime_ok(alpha_n: f64) -> bool {
    alpha_n >= 8.0
}

/// Lower-deviation bound for PATRICIA height under any diffuse law:
///
///   P(H <= E[H] - t) <= e^(-t^2 / (2n)).
pub fn devroye_tail(n: u64, t: f64) -> Result<f64, BoundsError> {
    require(n >= 1, "n must be at least 1")?;
    require(t.is_finite() && t >= 0.0, "t must be nonnegative")?;
    Ok((-t * t / (2.0 * n as f64)).exp())
}

/// Expected number of distinct first-one indices among n strings whose
/// first-one index is uniform on {1..N^2}:
///
///   E[|A|] >= n - n^2 / (2 N^2),
///
/// which is at least n - 1 whenever n <= N.
pub fn distinct_lower_bound(n: u64, big_n: u64) -> Result<f64, BoundsError> {
    require(n >= 1, "n must be at least 1")?;
    require(big_n >= 1 && big_n <= 1 << 31, "N must lie in [1, 2^31]")?;
    let n = n as f64;
    let m = (big_n * big_n) as f64;
    Ok(n - n * n / (2.0 * m))
}

/// Proven floor for the expected height of the mixture law built for the
/// sequence alpha: E[H_n] >= n / alpha_n for all sufficiently large n.
pub fn mixture_height_floor(n: u64, alpha_n: f64) -> Result<f64, BoundsError> {
    require(n >= 1, "n must be at least 1")?;
    require(
        alpha_n.is_finite() && alpha_n > 0.0,
        "alpha_n must be positive",
    )?;
    Ok(n as f64 / alpha_n)
}
