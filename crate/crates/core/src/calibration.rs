//! Inversion of the pricing formulae: implied generalized volatility from an
//! observed market price, and its decomposition into the classical part and
//! the extra (imaginary) component with a regime flag.

use thiserror::Error;

use crate::market_data::{Date, OptionSpec};
use crate::pricing::{
    qbs_call_price, KMode, PricingError, PricingInputs, QuantumVolParams, TRADING_DAYS_PER_YEAR,
};

/// Price tolerance for the solver, relative to `max(1, market_price)`.
pub const PRICE_TOL: f64 = 1e-9;

/// Regime threshold on `|s*^2 - sigma_public^2|`.
pub const REGIME_EPSILON: f64 = 1e-7;

const BRACKET_LO: f64 = 1e-8;
const BRACKET_HI: f64 = 10.0;
const BRACKET_MAX: f64 = 1e4;
const MAX_ITER: usize = 200;
// The regime split compares squared volatilities against REGIME_EPSILON^2 =
// 1e-14, so the root itself must be resolved well below that; the bracket is
// driven to ~1 ulp rather than stopping at the price tolerance.
const S_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

#[derive(Debug, Error, PartialEq)]
pub enum CalibrationError {
    #[error("market price {market} violates the {which} no-arbitrage bound {bound}")]
    NoSolution {
        which: &'static str,
        market: f64,
        bound: f64,
    },
    #[error("no sign change up to s = {0}; solver diverged")]
    Divergence(f64),
    #[error("option has reached maturity; nothing to calibrate")]
    MaturityReached,
    #[error("sigma_public must be nonnegative, got {0}")]
    NegativeSigmaPublic(f64),
    #[error("empty calibration series")]
    EmptySeries,
    #[error("series runs {first}..{last} but the contract window is {issue}..{expiry}")]
    WindowMismatch {
        first: Date,
        last: Date,
        issue: Date,
        expiry: Date,
    },
    #[error(transparent)]
    Pricing(#[from] PricingError),
}

impl CalibrationError {
    pub fn no_solution(which: Bound, market: f64, bound: f64) -> Self {
        CalibrationError::NoSolution {
            which: match which {
                Bound::Lower => "lower",
                Bound::Upper => "upper",
            },
            market,
            bound,
        }
    }
}

/// Which side of the classical volatility the implied solution fell on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `s*^2 > sigma_public^2`: a real extra component, the option
    /// over-performs the classical price.
    Real,
    /// `s*^2 < sigma_public^2`: the extra component is itself imaginary
    /// (under-performance); `im_f` reports its modulus.
    Imaginary,
    /// Market and classical prices agree within tolerance.
    Zero,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Real => "real",
            Regime::Imaginary => "imaginary",
            Regime::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    /// Implied generalized volatility magnitude `|f(T)|`.
    pub s_star: f64,
    /// Classical (public-information) volatility used for the split.
    pub sigma_public: f64,
    /// Modulus of the extra volatility component.
    pub im_f: f64,
    pub regime: Regime,
    /// Price difference at convergence.
    pub residual: f64,
}

/// Implied generalized volatility: the `s*` for which the expanded price
/// matches the market price, found by bracketed bisection with secant
/// acceleration on the monotone price map.
pub fn implied_s(
    inputs: &PricingInputs,
    market_price: f64,
    gamma: f64,
    k_mode: KMode,
) -> Result<f64, CalibrationError> {
    if inputs.time_to_maturity <= 0.0 {
        return Err(CalibrationError::MaturityReached);
    }
    let lower = (inputs.spot - inputs.strike * (-inputs.rate * inputs.time_to_maturity).exp())
        .max(0.0);
    let upper = inputs.spot;
    if market_price <= lower {
        return Err(CalibrationError::no_solution(Bound::Lower, market_price, lower));
    }
    if market_price >= upper {
        return Err(CalibrationError::no_solution(Bound::Upper, market_price, upper));
    }

    let price_at = |s: f64| -> Result<f64, CalibrationError> {
        let q = QuantumVolParams::new(gamma, s, k_mode)?;
        Ok(qbs_call_price(inputs, &q)?)
    };

    let mut lo = BRACKET_LO;
    let mut f_lo = price_at(lo)? - market_price;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_lo > 0.0 {
        // the model price already exceeds the market at negligible volatility
        return Err(CalibrationError::no_solution(Bound::Lower, market_price, lower));
    }
    let mut hi = BRACKET_HI;
    let mut f_hi = price_at(hi)? - market_price;
    while f_hi < 0.0 {
        hi *= 2.0;
        if hi > BRACKET_MAX {
            return Err(CalibrationError::Divergence(hi));
        }
        f_hi = price_at(hi)? - market_price;
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }

    for iter in 0..MAX_ITER {
        // secant candidate on even iterations, bisection otherwise, which
        // bounds the bracket width even when the secant step stalls
        let mut mid = if iter % 2 == 0 {
            lo - f_lo * (hi - lo) / (f_hi - f_lo)
        } else {
            0.5 * (lo + hi)
        };
        if !mid.is_finite() || mid <= lo || mid >= hi {
            mid = 0.5 * (lo + hi);
        }
        if mid <= lo || mid >= hi {
            break; // bracket no longer representable
        }
        let f_mid = price_at(mid)? - market_price;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        if hi - lo <= S_TOL * mid.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Implied `s*` decomposed against the public volatility:
/// `d = s*^2 - sigma_public^2` maps to the real (`d > eps^2`), imaginary
/// (`d < -eps^2`) or zero regime.
pub fn calibrate_im_f(
    inputs: &PricingInputs,
    market_price: f64,
    sigma_public: f64,
    gamma: f64,
    k_mode: KMode,
) -> Result<CalibrationResult, CalibrationError> {
    if !sigma_public.is_finite() || sigma_public < 0.0 {
        return Err(CalibrationError::NegativeSigmaPublic(sigma_public));
    }
    let s_star = implied_s(inputs, market_price, gamma, k_mode)?;
    let q = QuantumVolParams::new(gamma, s_star, k_mode)?;
    let residual = qbs_call_price(inputs, &q)? - market_price;
    let d = s_star * s_star - sigma_public * sigma_public;
    let eps2 = REGIME_EPSILON * REGIME_EPSILON;
    // Price-space agreement also maps to the zero regime: where vega is
    // small the implied s cannot be resolved to the eps^2 variance band even
    // though the market and classical prices are identical.
    let classical = qbs_call_price(inputs, &QuantumVolParams::new(gamma, sigma_public, k_mode)?)?;
    let price_gap = market_price - classical;
    let price_tol = PRICE_TOL * market_price.abs().max(1.0);
    let (regime, im_f) = if price_gap.abs() <= price_tol {
        (Regime::Zero, 0.0)
    } else if d > eps2 {
        (Regime::Real, d.sqrt())
    } else if d < -eps2 {
        (Regime::Imaginary, (-d).sqrt())
    } else {
        (Regime::Zero, 0.0)
    };
    Ok(CalibrationResult {
        s_star,
        sigma_public,
        im_f,
        regime,
        residual,
    })
}

/// One aligned trading-day observation for series calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub date: Date,
    pub spot: f64,
    pub market_price: f64,
    pub sigma_public: f64,
}

/// Per-day calibration outcome; days that violate the no-arbitrage bounds
/// carry their error instead of aborting the series.
#[derive(Debug)]
pub struct CalibratedDay {
    pub date: Date,
    pub outcome: Result<CalibrationResult, CalibrationError>,
}

/// Calibrates every trading day of an aligned series. The series must run
/// from issuance to maturity; the time to maturity on day `t` is the number
/// of remaining trading days over 252.
pub fn calibrate_series(
    spec: &OptionSpec,
    points: &[SeriesPoint],
    rate: f64,
    gamma: f64,
    k_mode: KMode,
) -> Result<Vec<CalibratedDay>, CalibrationError> {
    if points.is_empty() {
        return Err(CalibrationError::EmptySeries);
    }
    let first = &points[0].date;
    let last = &points[points.len() - 1].date;
    if *first != spec.issuance_date || *last != spec.maturity_date {
        return Err(CalibrationError::WindowMismatch {
            first: first.clone(),
            last: last.clone(),
            issue: spec.issuance_date.clone(),
            expiry: spec.maturity_date.clone(),
        });
    }
    let n = points.len();
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, point)| {
            let t = (n - 1 - i) as f64 / TRADING_DAYS_PER_YEAR;
            let outcome = PricingInputs::new(point.spot, spec.strike, t, rate)
                .map_err(CalibrationError::from)
                .and_then(|inputs| {
                    calibrate_im_f(&inputs, point.market_price, point.sigma_public, gamma, k_mode)
                });
            CalibratedDay {
                date: point.date.clone(),
                outcome,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::bs_call_price;

    fn inputs() -> PricingInputs {
        PricingInputs::new(100.0, 100.0, 30.0 / 252.0, 0.0008).unwrap()
    }

    #[test]
    fn implied_s_round_trips_classical_price() {
        let market = bs_call_price(&inputs(), 0.3).unwrap();
        let s = implied_s(&inputs(), market, 1.0, KMode::Wiener).unwrap();
        assert!((s - 0.3).abs() <= 1e-8, "s {s}");
    }

    #[test]
    fn implied_s_round_trips_expanded_price() {
        let q = QuantumVolParams::new(1.0, 0.45, KMode::Wiener).unwrap();
        let market = qbs_call_price(&inputs(), &q).unwrap();
        let s = implied_s(&inputs(), market, 1.0, KMode::Wiener).unwrap();
        assert!((s - 0.45).abs() <= 1e-8, "s {s}");
    }

    #[test]
    fn implied_s_grid_scan_fixture() {
        // frozen from tools/oracle_constants.py (fine-grid sign-change scan)
        let inputs = PricingInputs::new(100.0, 105.0, 30.0 / 252.0, 0.0008).unwrap();
        let s = implied_s(&inputs, 2.50, 1.0, KMode::Wiener).unwrap();
        assert!((s - 0.32401184217198144).abs() <= 1e-6, "s {s}");
    }

    #[test]
    fn implied_s_rejects_out_of_bound_prices() {
        let below = implied_s(&inputs(), 0.0, 1.0, KMode::Wiener).unwrap_err();
        assert!(matches!(below, CalibrationError::NoSolution { which: "lower", .. }));
        let above = implied_s(&inputs(), 100.0, 1.0, KMode::Wiener).unwrap_err();
        assert!(matches!(above, CalibrationError::NoSolution { which: "upper", .. }));
    }

    #[test]
    fn implied_s_rejects_expired_option() {
        let expired = PricingInputs::new(100.0, 100.0, 0.0, 0.0008).unwrap();
        assert_eq!(
            implied_s(&expired, 1.0, 1.0, KMode::Wiener).unwrap_err(),
            CalibrationError::MaturityReached
        );
    }

    #[test]
    fn calibrate_exact_agreement_is_zero_regime() {
        let market = bs_call_price(&inputs(), 0.3).unwrap();
        let r = calibrate_im_f(&inputs(), market, 0.3, 1.0, KMode::Wiener).unwrap();
        assert_eq!(r.regime, Regime::Zero);
        assert_eq!(r.im_f, 0.0);
        assert!((r.s_star - 0.3).abs() <= 1e-7);
        assert!(r.residual.abs() <= PRICE_TOL * market.max(1.0));
    }

    #[test]
    fn calibrate_over_performance_is_real_regime() {
        let market = bs_call_price(&inputs(), 0.5).unwrap();
        let r = calibrate_im_f(&inputs(), market, 0.3, 1.0, KMode::Wiener).unwrap();
        assert_eq!(r.regime, Regime::Real);
        assert!((r.im_f - 0.4).abs() <= 1e-8, "im {}", r.im_f);
        // Pythagorean consistency of the decomposition
        assert!((r.s_star.powi(2) - r.sigma_public.powi(2) - r.im_f.powi(2)).abs() <= 1e-12);
    }

    #[test]
    fn calibrate_under_performance_is_imaginary_regime() {
        let market = bs_call_price(&inputs(), 0.2).unwrap();
        let r = calibrate_im_f(&inputs(), market, 0.3, 1.0, KMode::Wiener).unwrap();
        assert_eq!(r.regime, Regime::Imaginary);
        let expect = (0.3f64.powi(2) - 0.2f64.powi(2)).sqrt();
        assert!((r.im_f - expect).abs() <= 1e-8, "im {}", r.im_f);
        assert!((r.s_star.powi(2) - r.sigma_public.powi(2) + r.im_f.powi(2)).abs() <= 1e-12);
    }

    fn date(s: &str) -> Date {
        Date::parse(s).unwrap()
    }

    fn three_day_spec() -> OptionSpec {
        OptionSpec::new("TST", 100.0, date("2020-10-08"), date("2020-10-12")).unwrap()
    }

    fn point(d: &str, spot: f64, market: f64, sigma: f64) -> SeriesPoint {
        SeriesPoint {
            date: date(d),
            spot,
            market_price: market,
            sigma_public: sigma,
        }
    }

    #[test]
    fn series_of_classical_prices_is_all_zero_regime() {
        let spec = three_day_spec();
        let days = ["2020-10-08", "2020-10-09", "2020-10-12"];
        let points: Vec<_> = days
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let t = (2 - i) as f64 / 252.0;
                let inputs = PricingInputs::new(100.0, 100.0, t, 0.0008).unwrap();
                point(d, 100.0, bs_call_price(&inputs, 0.3).unwrap(), 0.3)
            })
            .collect();
        let out = calibrate_series(&spec, &points, 0.0008, 1.0, KMode::Wiener).unwrap();
        assert_eq!(out.len(), 3);
        for day in &out[..2] {
            assert_eq!(day.outcome.as_ref().unwrap().regime, Regime::Zero);
        }
        // maturity day has T = 0 and carries a marker instead of a result
        assert!(matches!(
            out[2].outcome,
            Err(CalibrationError::MaturityReached)
        ));
    }

    #[test]
    fn series_recovers_injected_profile() {
        let spec = three_day_spec();
        let days = ["2020-10-08", "2020-10-09", "2020-10-12"];
        let injected = [0.1, 0.2, 0.3];
        let sigma = 0.3;
        let points: Vec<_> = days
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let t = (2 - i) as f64 / 252.0;
                if t == 0.0 {
                    // maturity day, priced at intrinsic; carries a marker
                    return point(d, 100.0, 0.0, sigma);
                }
                let inputs = PricingInputs::new(100.0, 100.0, t, 0.0008).unwrap();
                let s = (sigma * sigma + injected[i] * injected[i]).sqrt();
                let q = QuantumVolParams::new(1.0, s, KMode::Wiener).unwrap();
                point(d, 100.0, qbs_call_price(&inputs, &q).unwrap(), sigma)
            })
            .collect();
        let out = calibrate_series(&spec, &points, 0.0008, 1.0, KMode::Wiener).unwrap();
        for (i, day) in out[..2].iter().enumerate() {
            let r = day.outcome.as_ref().unwrap();
            assert_eq!(r.regime, Regime::Real);
            assert!((r.im_f - injected[i]).abs() <= 1e-6, "day {i}: {}", r.im_f);
        }
    }

    #[test]
    fn series_isolates_bound_violations() {
        let spec = three_day_spec();
        let t0 = PricingInputs::new(100.0, 100.0, 2.0 / 252.0, 0.0008).unwrap();
        let t1 = PricingInputs::new(100.0, 100.0, 1.0 / 252.0, 0.0008).unwrap();
        let points = vec![
            point("2020-10-08", 100.0, bs_call_price(&t0, 0.3).unwrap(), 0.3),
            point("2020-10-09", 100.0, 150.0, 0.3), // above spot: no solution
            point("2020-10-12", 100.0, bs_call_price(&t1, 0.3).unwrap(), 0.3),
        ];
        // widen the window so the last day is not at maturity
        let out = calibrate_series(&spec, &points, 0.0008, 1.0, KMode::Wiener).unwrap();
        assert!(out[0].outcome.is_ok());
        assert!(matches!(
            out[1].outcome,
            Err(CalibrationError::NoSolution { which: "upper", .. })
        ));
        // final day sits at maturity in this window
        assert!(out[2].outcome.is_err());
    }

    #[test]
    fn empty_series_is_input_error() {
        let spec = three_day_spec();
        assert_eq!(
            calibrate_series(&spec, &[], 0.0008, 1.0, KMode::Wiener).unwrap_err(),
            CalibrationError::EmptySeries
        );
    }
}
