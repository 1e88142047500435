//! Closed-form European call pricing: the classical model, its
//! time-dependent-volatility extension, and the expanded model with a
//! generalized (complex) volatility.
//!
//! All prices share one kernel,
//! `C = S*exp(g)*N(d1) - K*exp(-rT)*N(d2)`, parameterized by the accumulated
//! variance-like integrals. The classical formulas are the special case where
//! the growth exponent `g` vanishes.

use thiserror::Error;

/// Trading-day count underlying every year fraction in this crate.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// One trading day in years, the Riemann step for all path integrals.
pub const STEP_YEARS: f64 = 1.0 / TRADING_DAYS_PER_YEAR;

#[derive(Debug, Error, PartialEq)]
pub enum PricingError {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("{field} must be nonnegative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("volatility must be nonnegative, got {0}")]
    NegativeSigma(f64),
    #[error("gamma must be at least 1, got {0}")]
    GammaBelowOne(f64),
    #[error("path sample {index} is negative: {value}")]
    NegativeSample { index: usize, value: f64 },
    #[error("path sample {index} must be at least 1, got {value}")]
    SampleBelowOne { index: usize, value: f64 },
    #[error("path covers {len} trading days but {needed} are required")]
    PathTooShort { needed: usize, len: usize },
}

/// The four scalar contract inputs; volatility is supplied separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricingInputs {
    pub spot: f64,
    pub strike: f64,
    pub time_to_maturity: f64,
    pub rate: f64,
}

impl PricingInputs {
    pub fn new(
        spot: f64,
        strike: f64,
        time_to_maturity: f64,
        rate: f64,
    ) -> Result<Self, PricingError> {
        for (name, v) in [
            ("spot", spot),
            ("strike", strike),
            ("time_to_maturity", time_to_maturity),
            ("rate", rate),
        ] {
            if !v.is_finite() {
                return Err(PricingError::NonFinite(name));
            }
        }
        for (name, v) in [
            ("spot", spot),
            ("strike", strike),
            ("time_to_maturity", time_to_maturity),
        ] {
            if v < 0.0 {
                return Err(PricingError::Negative {
                    field: name,
                    value: v,
                });
            }
        }
        Ok(Self {
            spot,
            strike,
            time_to_maturity,
            rate,
        })
    }
}

/// Correlation structure of the added process: `k = s^2` for a Wiener
/// process, `k = 0` for a serially correlated one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMode {
    Wiener,
    SerialCorrelated,
}

impl KMode {
    /// Effective `k` for a given generalized volatility magnitude. Derived at
    /// evaluation time so the `k in {s^2, 0}` invariant cannot drift.
    pub fn k(self, s: f64) -> f64 {
        match self {
            KMode::Wiener => s * s,
            KMode::SerialCorrelated => 0.0,
        }
    }
}

/// The (gamma, s, k) triple generalizing the classical volatility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumVolParams {
    pub gamma: f64,
    pub s: f64,
    pub k_mode: KMode,
}

impl QuantumVolParams {
    pub fn new(gamma: f64, s: f64, k_mode: KMode) -> Result<Self, PricingError> {
        if !gamma.is_finite() {
            return Err(PricingError::NonFinite("gamma"));
        }
        if !s.is_finite() {
            return Err(PricingError::NonFinite("s"));
        }
        if gamma < 1.0 {
            return Err(PricingError::GammaBelowOne(gamma));
        }
        if s < 0.0 {
            return Err(PricingError::NegativeSigma(s));
        }
        Ok(Self { gamma, s, k_mode })
    }
}

/// Generalized volatility split into its classical (public) and
/// non-classical parts: `f = re + i*im`, `|f| = s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexVol {
    pub re: f64,
    pub im: f64,
}

impl ComplexVol {
    pub fn new(re: f64, im: f64) -> Result<Self, PricingError> {
        if !re.is_finite() || !im.is_finite() {
            return Err(PricingError::NonFinite("complex volatility"));
        }
        if re < 0.0 {
            return Err(PricingError::NegativeSigma(re));
        }
        Ok(Self { re, im })
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Standard normal cumulative distribution function.
///
/// Evaluated through the complementary error function so that both tails are
/// computed directly rather than by reflection.
pub fn normal_cdf(x: f64) -> Result<f64, PricingError> {
    if !x.is_finite() {
        return Err(PricingError::NonFinite("x"));
    }
    Ok(norm_cdf(x))
}

pub(crate) fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Per-trading-day samples of a model parameter over `[0, T)`, left
/// endpoints, step 1/252. Integrals over the path are left Riemann sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    values: Vec<f64>,
}

impl SampledPath {
    pub fn new(values: Vec<f64>) -> Result<Self, PricingError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PricingError::NonFinite("path sample"));
        }
        Ok(Self { values })
    }

    pub fn constant(value: f64, steps: usize) -> Self {
        Self {
            values: vec![value; steps],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Path restricted to samples from `start` onward.
    pub fn suffix(&self, start: usize) -> SampledPath {
        Self {
            values: self.values[start.min(self.values.len())..].to_vec(),
        }
    }

    /// Number of full 1/252 steps whose left endpoint lies in `[0, T)`.
    pub fn steps_for(t_years: f64) -> usize {
        let x = t_years * TRADING_DAYS_PER_YEAR;
        let r = x.round();
        // tolerate float noise in T so that T = n/252 maps to exactly n steps
        if (x - r).abs() < 1e-9 {
            r as usize
        } else {
            x.ceil() as usize
        }
    }

    fn require_coverage(&self, t_years: f64) -> Result<usize, PricingError> {
        let needed = Self::steps_for(t_years);
        if self.values.len() < needed {
            return Err(PricingError::PathTooShort {
                needed,
                len: self.values.len(),
            });
        }
        Ok(needed)
    }

    /// Left Riemann sum of `f(sample)` over `[0, T)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, t_years: f64, f: F) -> Result<f64, PricingError> {
        let n = self.require_coverage(t_years)?;
        Ok(self.values[..n].iter().map(|&v| f(v) * STEP_YEARS).sum())
    }
}

/// Shared pricing kernel.
///
/// `a` is the accumulated variance of the driving process (`sigma^2 T`,
/// `gamma^2 s^2 T`, or the corresponding Riemann sum) and `k_int` the
/// accumulated correlation term. The classical formulas set `k_int = a`,
/// which makes the growth exponent vanish identically.
fn call_kernel(inputs: &PricingInputs, a: f64, k_int: f64) -> f64 {
    let PricingInputs {
        spot,
        strike,
        time_to_maturity: t,
        rate,
    } = *inputs;
    let discount = (-rate * t).exp();
    let growth = 0.5 * (a - k_int);
    if spot == 0.0 {
        return 0.0;
    }
    if strike == 0.0 {
        return spot * growth.exp();
    }
    if a <= 0.0 {
        // degenerate limit: no accumulated variance leaves the discounted
        // intrinsic value (exactly max(S - K, 0) at T = 0)
        return (spot * growth.exp() - strike * discount).max(0.0);
    }
    let m = (spot / strike).ln() + rate * t;
    let sqrt_a = a.sqrt();
    let d1 = (m + a - 0.5 * k_int) / sqrt_a;
    let d2 = (m - 0.5 * k_int) / sqrt_a;
    spot * growth.exp() * norm_cdf(d1) - strike * discount * norm_cdf(d2)
}

/// Classical call price with constant volatility.
pub fn bs_call_price(inputs: &PricingInputs, sigma: f64) -> Result<f64, PricingError> {
    if !sigma.is_finite() {
        return Err(PricingError::NonFinite("sigma"));
    }
    if sigma < 0.0 {
        return Err(PricingError::NegativeSigma(sigma));
    }
    let a = sigma * sigma * inputs.time_to_maturity;
    Ok(call_kernel(inputs, a, a))
}

/// Classical call price with a time-dependent volatility path; the
/// accumulated variance replaces `sigma^2 T` wherever it appears.
pub fn bs_call_price_td(inputs: &PricingInputs, vol_path: &SampledPath) -> Result<f64, PricingError> {
    let n = vol_path.require_coverage(inputs.time_to_maturity)?;
    for (index, &v) in vol_path.values[..n].iter().enumerate() {
        if v < 0.0 {
            return Err(PricingError::NegativeSample { index, value: v });
        }
    }
    let a = vol_path.integrate(inputs.time_to_maturity, |s| s * s)?;
    Ok(call_kernel(inputs, a, a))
}

/// Expanded call price with constant generalized volatility.
pub fn qbs_call_price(inputs: &PricingInputs, q: &QuantumVolParams) -> Result<f64, PricingError> {
    let t = inputs.time_to_maturity;
    let a = (q.gamma * q.gamma) * (q.s * q.s) * t;
    let k_int = q.k_mode.k(q.s) * t;
    Ok(call_kernel(inputs, a, k_int))
}

/// Expanded call price with time-dependent `gamma` and `s` paths, all three
/// integrals accumulated by the same Riemann rule as [`bs_call_price_td`].
pub fn qbs_call_price_td(
    inputs: &PricingInputs,
    gamma_path: &SampledPath,
    s_path: &SampledPath,
    k_mode: KMode,
) -> Result<f64, PricingError> {
    let n = gamma_path
        .require_coverage(inputs.time_to_maturity)?
        .max(s_path.require_coverage(inputs.time_to_maturity)?);
    for (index, &g) in gamma_path.values[..n.min(gamma_path.len())].iter().enumerate() {
        if g < 1.0 {
            return Err(PricingError::SampleBelowOne { index, value: g });
        }
    }
    for (index, &s) in s_path.values[..n.min(s_path.len())].iter().enumerate() {
        if s < 0.0 {
            return Err(PricingError::NegativeSample { index, value: s });
        }
    }
    let mut a = 0.0;
    let mut k_int = 0.0;
    for i in 0..n {
        let g = gamma_path.values[i];
        let s = s_path.values[i];
        a += (g * g) * (s * s) * STEP_YEARS;
        k_int += k_mode.k(s) * STEP_YEARS;
    }
    Ok(call_kernel(inputs, a, k_int))
}
