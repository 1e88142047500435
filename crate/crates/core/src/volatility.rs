//! Annualized volatility estimates: per-stock volatility scaled from beta and
//! the VIX level, and the single-expiry VIX itself from an index option chain.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum VolatilityError {
    #[error("beta {beta} with VIX {vix} yields a negative volatility")]
    NegativeVolatility { beta: f64, vix: f64 },
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("chain has {0} strikes, need at least 3")]
    TooFewStrikes(usize),
    #[error("strikes must be strictly increasing and positive (violated at index {0})")]
    BadStrike(usize),
    #[error("negative price in chain at index {index}")]
    NegativePrice { index: usize },
    #[error("time to expiration must be positive, got {0}")]
    NonPositiveExpiry(f64),
    #[error("forward level {forward} lies below the lowest strike {lowest}")]
    ForwardBelowChain { forward: f64, lowest: f64 },
    #[error("variance strip is negative ({0}); chain is degenerate")]
    NegativeVariance(f64),
}

/// Per-ticker beta factors. Betas may be negative (negatively correlated
/// stocks); the sign is rejected only when the product with VIX is used as a
/// volatility.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BetaTable {
    entries: BTreeMap<String, f64>,
}

impl BetaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, ticker: &str, beta: f64) -> Result<(), VolatilityError> {
        if !beta.is_finite() {
            return Err(VolatilityError::NonFinite("beta"));
        }
        self.entries.insert(ticker.to_string(), beta);
        Ok(())
    }

    pub fn get(&self, ticker: &str) -> Option<f64> {
        self.entries.get(ticker).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Annualized volatility from a stock beta and a VIX level:
/// `sigma = beta * VIX / 100`.
pub fn sigma_from_beta_vix(beta: f64, vix_level: f64) -> Result<f64, VolatilityError> {
    if !beta.is_finite() {
        return Err(VolatilityError::NonFinite("beta"));
    }
    if !vix_level.is_finite() || vix_level < 0.0 {
        return Err(VolatilityError::NonFinite("vix_level"));
    }
    let sigma = beta * vix_level / 100.0;
    if sigma < 0.0 {
        return Err(VolatilityError::NegativeVolatility {
            beta,
            vix: vix_level,
        });
    }
    Ok(sigma)
}

/// One strike row of an index option chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainQuote {
    pub strike: f64,
    pub call_mid: f64,
    pub put_mid: f64,
    pub q_mid: f64,
}

/// A full single-expiry chain with its time to expiration and rate.
#[derive(Debug, Clone, PartialEq)]
pub struct VixInputs {
    chain: Vec<ChainQuote>,
    pub time_to_expiration: f64,
    pub rate: f64,
}

impl VixInputs {
    pub fn new(
        chain: Vec<ChainQuote>,
        time_to_expiration: f64,
        rate: f64,
    ) -> Result<Self, VolatilityError> {
        if chain.len() < 3 {
            return Err(VolatilityError::TooFewStrikes(chain.len()));
        }
        if !time_to_expiration.is_finite() || time_to_expiration <= 0.0 {
            return Err(VolatilityError::NonPositiveExpiry(time_to_expiration));
        }
        if !rate.is_finite() {
            return Err(VolatilityError::NonFinite("rate"));
        }
        let mut prev = 0.0;
        for (i, q) in chain.iter().enumerate() {
            if !q.strike.is_finite() || q.strike <= prev {
                return Err(VolatilityError::BadStrike(i));
            }
            prev = q.strike;
            if q.call_mid < 0.0 || q.put_mid < 0.0 || q.q_mid < 0.0 {
                return Err(VolatilityError::NegativePrice { index: i });
            }
        }
        Ok(Self {
            chain,
            time_to_expiration,
            rate,
        })
    }

    pub fn chain(&self) -> &[ChainQuote] {
        &self.chain
    }
}

/// Forward index level `F = K + e^{RT} (call - put)` for the strike with the
/// smallest call/put gap.
pub fn forward_index_level(k0_candidate: &ChainQuote, rate: f64, t: f64) -> f64 {
    k0_candidate.strike + (rate * t).exp() * (k0_candidate.call_mid - k0_candidate.put_mid)
}

/// Single-expiry VIX from an option chain via the variance strip:
/// `sigma^2 = (2/T) sum dK_i/K_i^2 e^{RT} Q(K_i) - (1/T)[F/K0 - 1]^2`,
/// `VIX = 100 sqrt(sigma^2)`.
///
/// Out-of-the-money quotes are selected per strike: put mids below `K0`,
/// call mids above, the average of both at `K0`. Edge strikes use the
/// one-sided strike difference.
pub fn compute_vix(inputs: &VixInputs) -> Result<f64, VolatilityError> {
    let chain = inputs.chain();
    let t = inputs.time_to_expiration;
    let rate = inputs.rate;

    let candidate = chain
        .iter()
        .min_by(|a, b| {
            let da = (a.call_mid - a.put_mid).abs();
            let db = (b.call_mid - b.put_mid).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let forward = forward_index_level(candidate, rate, t);

    // K0 is the first strike at or below the forward level
    let k0 = chain
        .iter()
        .rev()
        .find(|q| q.strike <= forward)
        .map(|q| q.strike)
        .ok_or(VolatilityError::ForwardBelowChain {
            forward,
            lowest: chain[0].strike,
        })?;

    let n = chain.len();
    let mut strip = 0.0;
    for i in 0..n {
        let q = &chain[i];
        let dk = if i == 0 {
            chain[1].strike - chain[0].strike
        } else if i == n - 1 {
            chain[n - 1].strike - chain[n - 2].strike
        } else {
            0.5 * (chain[i + 1].strike - chain[i - 1].strike)
        };
        let quote = if q.strike < k0 {
            q.put_mid
        } else if q.strike > k0 {
            q.call_mid
        } else {
            0.5 * (q.call_mid + q.put_mid)
        };
        strip += dk / (q.strike * q.strike) * (rate * t).exp() * quote;
    }

    let variance = 2.0 / t * strip - (forward / k0 - 1.0).powi(2) / t;
    if variance < 0.0 {
        return Err(VolatilityError::NegativeVariance(variance));
    }
    Ok(100.0 * variance.sqrt())
}
