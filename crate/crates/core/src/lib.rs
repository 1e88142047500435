//! Pricing and calibration engine for European call options: the classical
//! closed-form model, its time-dependent-volatility extension, and the
//! expanded model with a generalized complex volatility, together with VIX
//! computation from an index option chain and the inverse problem of
//! extracting the extra volatility component from observed market prices.
//!
//! Everything here is a pure function of its arguments; loaded data is
//! immutable, so all types can be shared freely across threads.

pub mod calibration;
pub mod market_data;
pub mod pricing;
pub mod volatility;

pub use calibration::{
    calibrate_im_f, calibrate_series, implied_s, CalibratedDay, CalibrationError,
    CalibrationResult, Regime, SeriesPoint,
};
pub use market_data::{
    align, build_vol_path, load_beta_table, load_chain, load_config, load_option_spec,
    load_series, parse_k_mode, write_series, AlignedTable, DataError, Date, DatedSeries,
    OptionSpec, RunConfig, VolatilityPath,
};
pub use pricing::{
    bs_call_price, bs_call_price_td, normal_cdf, qbs_call_price, qbs_call_price_td, ComplexVol,
    KMode, PricingError, PricingInputs, QuantumVolParams, SampledPath, STEP_YEARS,
    TRADING_DAYS_PER_YEAR,
};
pub use volatility::{
    compute_vix, forward_index_level, sigma_from_beta_vix, BetaTable, ChainQuote, VixInputs,
    VolatilityError,
};
