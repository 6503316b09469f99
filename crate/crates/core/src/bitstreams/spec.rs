//! Distribution specs and exact prefix probabilities.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::alpha::AlphaSpec;
use super::BitstreamError;

/// Default cap applied to the inner first-one law of a mixture.
///
/// The inner law size is `min(a_of(G), a_cap)`, which keeps first-one
/// indices and therefore split indices within 64-bit range while leaving
/// every desk-scale bound untouched.
pub const DEFAULT_A_CAP: u64 = 1 << 20;

/// Largest prefix length accepted by the enumeration behind
/// [`DistributionSpec::max_prefix_probability`].
pub const MAX_ENUM_PREFIX_LEN: u32 = 24;

const MAX_MU_N: u64 = 1 << 31; // keeps N^2 in 64-bit range

fn default_a_cap() -> u64 {
    DEFAULT_A_CAP
}

/// One diffuse law on infinite binary strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// Bits independent, each 1 with probability `p`, `0 < p < 1`.
    Bernoulli { p: f64 },
    /// Zeros before a first-one index drawn uniformly from `{1..N^2}`,
    /// a 1 there, fair coins after.
    MuN {
        #[serde(rename = "N")]
        n: u64,
    },
    /// Geometric(1/2) prefix length `G`: zeros before `G`, a 1 at `G`,
    /// then a `mu_{min(a_of(G), a_cap)}` tail.
    Mixture {
        alpha: AlphaSpec,
        #[serde(default = "default_a_cap")]
        a_cap: u64,
    },
    /// The mixture over `max(1, log2 alpha_n)`; see [`nu_spec`].
    Nu {
        alpha: AlphaSpec,
        #[serde(default = "default_a_cap")]
        a_cap: u64,
    },
}

fn check_a_cap(a_cap: u64) -> Result<(), BitstreamError> {
    if !(2..=MAX_MU_N).contains(&a_cap) {
        return Err(BitstreamError::InvalidSpec(format!(
            "a_cap must lie in [2, 2^31], got {a_cap}"
        )));
    }
    Ok(())
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<(), BitstreamError> {
        match self {
            DistributionSpec::Bernoulli { p } => {
                if !p.is_finite() || *p <= 0.0 || *p >= 1.0 {
                    return Err(BitstreamError::InvalidSpec(format!(
                        "bernoulli p must lie strictly in (0, 1), got {p}"
                    )));
                }
                Ok(())
            }
            DistributionSpec::MuN { n } => {
                if *n < 1 || *n > MAX_MU_N {
                    return Err(BitstreamError::InvalidSpec(format!(
                        "mu_n N must lie in [1, 2^31], got {n}"
                    )));
                }
                Ok(())
            }
            DistributionSpec::Mixture { alpha, a_cap } | DistributionSpec::Nu { alpha, a_cap } => {
                alpha.validate()?;
                check_a_cap(*a_cap)
            }
        }
    }

    /// The law actually sampled: `Nu` resolves to the mixture over the
    /// log-transformed sequence, everything else is itself.
    pub fn resolved(&self) -> Cow<'_, DistributionSpec> {
        match self {
            DistributionSpec::Nu { alpha, a_cap } => Cow::Owned(DistributionSpec::Mixture {
                alpha: AlphaSpec::Log2Of {
                    inner: Box::new(alpha.clone()),
                },
                a_cap: *a_cap,
            }),
            other => Cow::Borrowed(other),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, BitstreamError> {
        let spec: DistributionSpec = serde_json::from_str(s)
            .map_err(|e| BitstreamError::InvalidSpec(format!("bad JSON: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Exact probability that a string drawn from this law starts with `v`.
    pub fn prefix_probability(&self, v: &[bool]) -> Result<f64, BitstreamError> {
        self.validate()?;
        if v.is_empty() {
            return Err(BitstreamError::EmptyPrefix);
        }
        let resolved = self.resolved();
        let mut eval = PrefixEval::new(&resolved);
        for &bit in v {
            eval = eval.push(bit);
        }
        Ok(eval.prob())
    }

    /// `max_v P(prefix = v)` over all `v` of length `k`, by enumeration.
    ///
    /// Branch-and-bound over the prefix tree: extending a prefix can only
    /// lower its probability, so branches at or below the current best are
    /// skipped.
    pub fn max_prefix_probability(&self, k: u32) -> Result<f64, BitstreamError> {
        self.validate()?;
        if k == 0 {
            return Err(BitstreamError::EmptyPrefix);
        }
        if k > MAX_ENUM_PREFIX_LEN {
            return Err(BitstreamError::PrefixTooLong(k));
        }
        let resolved = self.resolved();
        let eval = PrefixEval::new(&resolved);
        let mut best = 0.0f64;
        descend(&eval, 0, k, &mut best);
        Ok(best)
    }
}

fn descend(eval: &PrefixEval<'_>, depth: u32, k: u32, best: &mut f64) {
    let one = eval.clone().push(true);
    let zero = eval.clone().push(false);
    let (p1, p0) = (one.prob(), zero.prob());
    let ordered = if p1 >= p0 {
        [(one, p1), (zero, p0)]
    } else {
        [(zero, p0), (one, p1)]
    };
    for (child, p) in ordered {
        if p <= *best {
            continue;
        }
        if depth + 1 == k {
            *best = p;
        } else {
            descend(&child, depth + 1, k, best);
        }
    }
}

/// Returns the mixture law over `alpha'_n = max(1, log2 alpha_n)`.
///
/// Dividing the sequence's exponent this way drives the expected-height
/// floor from `n / alpha_n` up to `n / log2 alpha_n`. Base 2 matches the
/// exponent sequence `beta`; only divergence of the log matters.
pub fn nu_spec(alpha: &AlphaSpec, a_cap: u64) -> Result<DistributionSpec, BitstreamError> {
    alpha.validate()?;
    check_a_cap(a_cap)?;
    Ok(DistributionSpec::Mixture {
        alpha: AlphaSpec::Log2Of {
            inner: Box::new(alpha.clone()),
        },
        a_cap,
    })
}

/// Inner first-one law size after cap and floor.
pub(crate) fn inner_mu_size(alpha: &AlphaSpec, g: u32, a_cap: u64) -> u64 {
    alpha.a_of(g).min(a_cap).max(1)
}

/// Exact prefix probability, computed incrementally one bit at a time.
///
/// Every supported law admits an O(1)-per-bit closed form once the position
/// of the first 1 (and, for mixtures, of the inner first 1) is known.
#[derive(Clone)]
enum PrefixEval<'a> {
    Bernoulli {
        p: f64,
        prob: f64,
    },
    MuN(MuNEval),
    Mixture {
        alpha: &'a AlphaSpec,
        a_cap: u64,
        len: u64,
        /// First-one position and the inner evaluator it opened.
        inner: Option<(u64, MuNEval)>,
    },
}

#[derive(Clone)]
struct MuNEval {
    m: u64, // N^2
    len: u64,
    first_one: Option<u64>,
}

impl MuNEval {
    fn new(n: u64) -> Self {
        MuNEval {
            m: n * n,
            len: 0,
            first_one: None,
        }
    }

    fn push(&mut self, bit: bool) {
        self.len += 1;
        if self.first_one.is_none() && bit {
            self.first_one = Some(self.len);
        }
    }

    fn prob(&self) -> f64 {
        match self.first_one {
            // All zeros so far: the first-one index must exceed len.
            None => self.m.saturating_sub(self.len) as f64 / self.m as f64,
            Some(t) if t > self.m => 0.0,
            // First one exactly at t, fair coins for the remaining bits.
            Some(t) => (1.0 / self.m as f64) * 2f64.powi(-((self.len - t) as i32)),
        }
    }
}

impl<'a> PrefixEval<'a> {
    fn new(spec: &'a DistributionSpec) -> Self {
        match spec {
            DistributionSpec::Bernoulli { p } => PrefixEval::Bernoulli { p: *p, prob: 1.0 },
            DistributionSpec::MuN { n } => PrefixEval::MuN(MuNEval::new(*n)),
            DistributionSpec::Mixture { alpha, a_cap } => PrefixEval::Mixture {
                alpha,
                a_cap: *a_cap,
                len: 0,
                inner: None,
            },
            DistributionSpec::Nu { .. } => unreachable!("resolved before evaluation"),
        }
    }

    fn push(mut self, bit: bool) -> Self {
        match &mut self {
            PrefixEval::Bernoulli { p, prob } => {
                *prob *= if bit { *p } else { 1.0 - *p };
            }
            PrefixEval::MuN(inner) => inner.push(bit),
            PrefixEval::Mixture {
                alpha,
                a_cap,
                len,
                inner,
            } => {
                *len += 1;
                match inner {
                    None if bit => {
                        let n = inner_mu_size(alpha, (*len).min(u32::MAX as u64) as u32, *a_cap);
                        *inner = Some((*len, MuNEval::new(n)));
                    }
                    None => {}
                    Some((_, eval)) => eval.push(bit),
                }
            }
        }
        self
    }

    fn prob(&self) -> f64 {
        match self {
            PrefixEval::Bernoulli { prob, .. } => *prob,
            PrefixEval::MuN(inner) => inner.prob(),
            PrefixEval::Mixture { len, inner, .. } => match inner {
                // All zeros: the geometric prefix length exceeds len.
                None => 2f64.powi(-(*len as i32)),
                Some((g, eval)) => 2f64.powi(-(*g as i32)) * eval.prob(),
            },
        }
    }
}
