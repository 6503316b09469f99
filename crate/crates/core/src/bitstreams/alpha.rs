//! Growth-rate sequences and their exponent machinery.
//!
//! An [`AlphaSpec`] describes a nondecreasing, divergent sequence `alpha_n`
//! of positive reals. From it we derive the exponent sequence
//! `beta_n = max(1, floor(log2 alpha_n) - 2)` and its generalized inverse
//! `a_of(k) = max { m : beta_m <= k }`, which sizes the inner first-one law
//! of the mixture distributions.

use serde::{Deserialize, Serialize};

use super::BitstreamError;

/// `a_of` results are exact up to this point and saturate beyond it.
pub const A_OF_SATURATION: u64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AlphaSpec {
    /// `alpha_n = n^eps`, `0 < eps <= 1`.
    Power { eps: f64 },
    /// `alpha_n = c * log2(n + 1)`, `c > 0`.
    LogPower { c: f64 },
    /// Explicit leading values plus a declared continuation for larger `n`.
    Table {
        values: Vec<f64>,
        continuation: TableContinuation,
    },
    /// `alpha_n = max(1, log2 inner_n)`; the transform behind the `nu` laws.
    Log2Of { inner: Box<AlphaSpec> },
}

/// Continuation rule applied past the end of a table.
///
/// The parametric rules continue with `max(last value, family(n))` so the
/// sequence stays nondecreasing across the junction. `Constant` repeats the
/// last value forever and is rejected by validation: the sequence must
/// diverge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TableContinuation {
    Constant,
    Power { eps: f64 },
    LogPower { c: f64 },
}

fn power_value(n: u64, eps: f64) -> f64 {
    if eps == 1.0 {
        n as f64
    } else {
        (n as f64).powf(eps)
    }
}

fn log_power_value(n: u64, c: f64) -> f64 {
    c * ((n + 1) as f64).log2()
}

fn check_power_eps(eps: f64) -> Result<(), BitstreamError> {
    if !eps.is_finite() || eps <= 0.0 || eps > 1.0 {
        return Err(BitstreamError::InvalidAlpha(format!(
            "power exponent must lie in (0, 1], got {eps}"
        )));
    }
    Ok(())
}

fn check_log_power_c(c: f64) -> Result<(), BitstreamError> {
    if !c.is_finite() || c <= 0.0 {
        return Err(BitstreamError::InvalidAlpha(format!(
            "log-power coefficient must be positive, got {c}"
        )));
    }
    Ok(())
}

/// `floor(log2 v)` for finite positive `v`, robust at powers of two.
fn floor_log2(v: f64) -> i64 {
    debug_assert!(v > 0.0 && v.is_finite());
    let mut e = v.log2().floor() as i64;
    while 2f64.powi((e + 1) as i32) <= v {
        e += 1;
    }
    while 2f64.powi(e as i32) > v {
        e -= 1;
    }
    e
}

impl AlphaSpec {
    /// Checks positivity, monotonicity, and divergence of the sequence.
    pub fn validate(&self) -> Result<(), BitstreamError> {
        match self {
            AlphaSpec::Power { eps } => check_power_eps(*eps),
            AlphaSpec::LogPower { c } => check_log_power_c(*c),
            AlphaSpec::Table {
                values,
                continuation,
            } => {
                if values.is_empty() {
                    return Err(BitstreamError::InvalidAlpha("empty table".into()));
                }
                for (i, v) in values.iter().enumerate() {
                    if !v.is_finite() || *v <= 0.0 {
                        return Err(BitstreamError::InvalidAlpha(format!(
                            "table entry {} is not a positive finite number: {v}",
                            i + 1
                        )));
                    }
                    if i > 0 && *v < values[i - 1] {
                        return Err(BitstreamError::InvalidAlpha(format!(
                            "table is not nondecreasing at entry {}",
                            i + 1
                        )));
                    }
                }
                match continuation {
                    TableContinuation::Constant => Err(BitstreamError::InvalidAlpha(
                        "constant continuation does not diverge".into(),
                    )),
                    TableContinuation::Power { eps } => check_power_eps(*eps),
                    TableContinuation::LogPower { c } => check_log_power_c(*c),
                }
            }
            AlphaSpec::Log2Of { inner } => inner.validate(),
        }
    }

    /// `alpha_n` for `n >= 1`.
    pub fn value_at(&self, n: u64) -> f64 {
        debug_assert!(n >= 1);
        match self {
            AlphaSpec::Power { eps } => power_value(n, *eps),
            AlphaSpec::LogPower { c } => log_power_value(n, *c),
            AlphaSpec::Table {
                values,
                continuation,
            } => {
                let len = values.len() as u64;
                if n <= len {
                    values[(n - 1) as usize]
                } else {
                    let last = *values.last().expect("validated nonempty");
                    match continuation {
                        TableContinuation::Constant => last,
                        TableContinuation::Power { eps } => last.max(power_value(n, *eps)),
                        TableContinuation::LogPower { c } => last.max(log_power_value(n, *c)),
                    }
                }
            }
            AlphaSpec::Log2Of { inner } => inner.value_at(n).log2().max(1.0),
        }
    }

    /// `beta_n = max(1, floor(log2 alpha_n) - 2)`.
    ///
    /// The clamp extends the exponent sequence below the `alpha_n >= 8`
    /// regime without affecting it elsewhere.
    pub fn beta_of(&self, n: u64) -> u32 {
        let e = floor_log2(self.value_at(n));
        (e - 2).max(1) as u32
    }

    /// Generalized inverse of `beta`: the largest `m` with `beta_m <= k`,
    /// or 0 when no such `m` exists. Exact up to [`A_OF_SATURATION`],
    /// saturating there.
    pub fn a_of(&self, k: u32) -> u64 {
        let fits = |m: u64| self.beta_of(m) <= k;
        if !fits(1) {
            return 0;
        }
        let mut hi = 2u64;
        while hi < A_OF_SATURATION && fits(hi) {
            hi = (hi * 2).min(A_OF_SATURATION);
        }
        if fits(hi) {
            return A_OF_SATURATION;
        }
        // beta is nondecreasing: fits(lo) holds, fits(hi) fails.
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(eps: f64) -> AlphaSpec {
        AlphaSpec::Power { eps }
    }

    /// Linear-scan oracle for the generalized inverse.
    fn a_of_by_scan(alpha: &AlphaSpec, k: u32, limit: u64) -> u64 {
        let mut best = 0;
        for m in 1..=limit {
            if alpha.beta_of(m) <= k {
                best = m;
            }
        }
        best
    }

    #[test]
    fn beta_examples() {
        // alpha_n = 32 at some n: pick the identity family at n = 32.
        assert_eq!(power(1.0).beta_of(32), 3);
        assert_eq!(power(1.0).beta_of(8), 1);
        assert_eq!(power(1.0).beta_of(7), 1); // unclamped value 0
    }

    #[test]
    fn beta_is_nondecreasing() {
        for alpha in [
            power(1.0),
            power(0.5),
            AlphaSpec::LogPower { c: 2.0 },
            AlphaSpec::Table {
                values: vec![4.0, 16.0, 64.0, 256.0],
                continuation: TableContinuation::Power { eps: 1.0 },
            },
            AlphaSpec::Log2Of {
                inner: Box::new(power(0.5)),
            },
        ] {
            let mut last = 0;
            for n in 1..4096 {
                let b = alpha.beta_of(n);
                assert!(b >= last, "beta decreased at n={n}");
                last = b;
            }
        }
    }

    #[test]
    fn a_of_matches_scan_oracle() {
        assert_eq!(power(1.0).a_of(3), 63);
        assert_eq!(a_of_by_scan(&power(1.0), 3, 128), 63);
        assert_eq!(power(1.0).a_of(1), 15);
        assert_eq!(a_of_by_scan(&power(1.0), 1, 128), 15);
        assert_eq!(power(0.5).a_of(4), 16383);
        assert_eq!(a_of_by_scan(&power(0.5), 4, 1 << 15), 16383);
    }

    #[test]
    fn a_of_sandwich() {
        for alpha in [power(1.0), power(0.5), power(0.25)] {
            for k in 1..12 {
                let m = alpha.a_of(k);
                assert!(m >= 1);
                if m < A_OF_SATURATION {
                    assert!(alpha.beta_of(m) <= k);
                    assert!(alpha.beta_of(m + 1) > k);
                }
            }
        }
    }

    #[test]
    fn a_of_saturates_for_slow_growth() {
        let alpha = AlphaSpec::LogPower { c: 1.0 };
        assert_eq!(alpha.a_of(10), A_OF_SATURATION);
    }

    #[test]
    fn a_of_is_zero_below_the_first_exponent() {
        let alpha = AlphaSpec::Table {
            values: vec![64.0, 128.0],
            continuation: TableContinuation::Power { eps: 1.0 },
        };
        // beta_1 = floor(log2 64) - 2 = 4 > 1.
        assert_eq!(alpha.a_of(1), 0);
        // beta_2 = floor(log2 128) - 2 = 5, so only m = 1 fits k = 4.
        assert_eq!(alpha.a_of(4), 1);
    }

    #[test]
    fn table_continuation_takes_over() {
        let alpha = AlphaSpec::Table {
            values: vec![10.0, 20.0],
            continuation: TableContinuation::Power { eps: 1.0 },
        };
        assert_eq!(alpha.value_at(1), 10.0);
        assert_eq!(alpha.value_at(2), 20.0);
        assert_eq!(alpha.value_at(3), 20.0); // max(last, 3)
        assert_eq!(alpha.value_at(50), 50.0);
    }

    #[test]
    fn validation_rejects_bad_tables() {
        assert!(AlphaSpec::Table {
            values: vec![],
            continuation: TableContinuation::Power { eps: 1.0 },
        }
        .validate()
        .is_err());
        assert!(AlphaSpec::Table {
            values: vec![3.0, 2.0],
            continuation: TableContinuation::Power { eps: 1.0 },
        }
        .validate()
        .is_err());
        // Bounded sequences are not allowed.
        assert!(AlphaSpec::Table {
            values: vec![2.0, 2.0],
            continuation: TableContinuation::Constant,
        }
        .validate()
        .is_err());
        assert!(power(0.0).validate().is_err());
        assert!(power(1.5).validate().is_err());
        assert!(AlphaSpec::LogPower { c: -1.0 }.validate().is_err());
    }

    #[test]
    fn log2_of_clamps_below_one() {
        let alpha = AlphaSpec::Log2Of {
            inner: Box::new(power(0.5)),
        };
        assert_eq!(alpha.value_at(1), 1.0); // log2(1) clamped
        assert_eq!(alpha.value_at(1 << 16), 8.0); // log2(256)
    }

    #[test]
    fn floor_log2_is_exact_at_powers_of_two() {
        for e in 0..60 {
            let v = 2f64.powi(e);
            assert_eq!(floor_log2(v), e as i64);
            assert_eq!(floor_log2(v * 1.5), e as i64);
        }
    }

    #[test]
    fn json_round_trip() {
        let alpha = AlphaSpec::Table {
            values: vec![4.0, 16.0],
            continuation: TableContinuation::LogPower { c: 2.0 },
        };
        let s = serde_json::to_string(&alpha).unwrap();
        assert_eq!(serde_json::from_str::<AlphaSpec>(&s).unwrap(), alpha);
        let parsed: AlphaSpec = serde_json::from_str(r#"{"family":"power","eps":0.5}"#).unwrap();
        assert_eq!(parsed, power(0.5));
    }
}
