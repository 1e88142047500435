//! Data loading, flag/config merging and the per-day pricing loop shared by
//! the subcommands. Exit codes are part of the contract: 1 for input errors,
//! 2 for numerical (domain) errors.

use std::path::{Path, PathBuf};

use bsx_core::{
    align, bs_call_price, bs_call_price_td, calibrate_series, load_beta_table, load_config,
    load_option_spec, load_series, parse_k_mode, qbs_call_price, qbs_call_price_td,
    sigma_from_beta_vix, CalibratedDay, CalibrationError, DataError, Date, OptionSpec,
    PricingError, PricingInputs, QuantumVolParams, RunConfig, SampledPath, SeriesPoint,
    VolatilityError, VolatilityPath, TRADING_DAYS_PER_YEAR,
};

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// A diagnostic plus the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<PricingError> for CliError {
    fn from(e: PricingError) -> Self {
        Self::numerical(e.to_string())
    }
}

impl From<VolatilityError> for CliError {
    fn from(e: VolatilityError) -> Self {
        match e {
            VolatilityError::NegativeVariance(_) => Self::numerical(e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(format!("io error: {e}"))
    }
}

/// Renders a value to 10 significant digits, trailing zeros dropped.
pub fn sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.9e}");
    let rounded: f64 = sci.parse().expect("scientific notation parses");
    let exp: i32 = sci
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .expect("scientific notation carries an exponent");
    if (-5..=15).contains(&exp) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Effective numeric settings after the config file and flag overrides.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: RunConfig,
}

pub struct Overrides<'a> {
    pub config: Option<&'a Path>,
    pub beta_table: Option<&'a Path>,
    pub rate: Option<f64>,
    pub gamma: Option<f64>,
    pub k_mode: Option<&'a str>,
}

/// Loads the config file when given and applies flag overrides; flags win.
pub fn resolve_settings(ov: &Overrides) -> Result<Settings, CliError> {
    let mut config = match ov.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(path) = ov.beta_table {
        config.beta_table = load_beta_table(path)?;
    }
    if let Some(rate) = ov.rate {
        if !rate.is_finite() {
            return Err(CliError::input(format!("--rate must be finite, got {rate}")));
        }
        config.rate = rate;
    }
    if let Some(gamma) = ov.gamma {
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(CliError::input(format!(
                "--gamma must be at least 1, got {gamma}"
            )));
        }
        config.gamma = gamma;
    }
    if let Some(text) = ov.k_mode {
        config.k_mode = parse_k_mode(text)
            .ok_or_else(|| CliError::input(format!("--k-mode must be wiener|serial, got `{text}`")))?;
    }
    Ok(Settings { config })
}

pub struct SpecOverrides<'a> {
    pub spec: Option<&'a Path>,
    pub ticker: Option<&'a str>,
    pub strike: Option<f64>,
    pub issue: Option<&'a str>,
    pub expiry: Option<&'a str>,
}

/// Builds the contract from the spec file and/or individual flags; flags win
/// field by field.
pub fn resolve_spec(ov: &SpecOverrides) -> Result<OptionSpec, CliError> {
    let base = match ov.spec {
        Some(path) => Some(load_option_spec(path)?),
        None => None,
    };
    let missing =
        |flag: &str| CliError::input(format!("missing {flag} (no --spec file supplies it)"));
    let ticker = match (ov.ticker, &base) {
        (Some(t), _) => t.to_string(),
        (None, Some(b)) => b.ticker.clone(),
        (None, None) => return Err(missing("--ticker")),
    };
    let strike = match (ov.strike, &base) {
        (Some(k), _) => k,
        (None, Some(b)) => b.strike,
        (None, None) => return Err(missing("--strike")),
    };
    let issue = match (ov.issue, &base) {
        (Some(d), _) => Date::parse(d)?,
        (None, Some(b)) => b.issuance_date.clone(),
        (None, None) => return Err(missing("--issue")),
    };
    let expiry = match (ov.expiry, &base) {
        (Some(d), _) => Date::parse(d)?,
        (None, Some(b)) => b.maturity_date.clone(),
        (None, None) => return Err(missing("--expiry")),
    };
    Ok(OptionSpec::new(&ticker, strike, issue, expiry)?)
}

/// The aligned daily table a pricing or calibration run walks over.
pub struct Run {
    pub spec: OptionSpec,
    pub settings: Settings,
    pub dates: Vec<Date>,
    pub spots: Vec<f64>,
    pub market: Option<Vec<f64>>,
    pub vol: VolatilityPath,
}

pub fn load_run(
    spec: OptionSpec,
    settings: Settings,
    stock_path: &Path,
    vix_path: &Path,
    option_path: Option<&PathBuf>,
) -> Result<Run, CliError> {
    let stock = load_series(stock_path)?;
    let vix = load_series(vix_path)?;
    let option = match option_path {
        Some(path) => Some(load_series(path)?),
        None => None,
    };

    let mut named = vec![("stock", &stock), ("vix", &vix)];
    if let Some(series) = &option {
        named.push(("option", series));
    }
    let table = align(&named, &spec.issuance_date, &spec.maturity_date)?;

    let beta = settings
        .config
        .beta_table
        .get(&spec.ticker)
        .ok_or_else(|| CliError::input(format!("ticker `{}` not in the beta table", spec.ticker)))?;

    let dates = table.dates().to_vec();
    let mut sigmas = Vec::with_capacity(dates.len());
    for (date, vix_level) in dates.iter().zip(table.column(1)) {
        let sigma = sigma_from_beta_vix(beta, *vix_level)
            .map_err(|e| CliError::input(format!("{date}: {e}")))?;
        sigmas.push(sigma);
    }
    let vol = VolatilityPath::new(dates.clone(), sigmas)?;

    Ok(Run {
        spec,
        settings,
        spots: table.column(0).to_vec(),
        market: option.map(|_| table.column(2).to_vec()),
        dates,
        vol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Bs,
    BsTd,
    Qbs,
    QbsTd,
}

impl Run {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn time_to_maturity(&self, i: usize) -> f64 {
        (self.len() - 1 - i) as f64 / TRADING_DAYS_PER_YEAR
    }

    pub fn inputs(&self, i: usize) -> Result<PricingInputs, PricingError> {
        PricingInputs::new(
            self.spots[i],
            self.spec.strike,
            self.time_to_maturity(i),
            self.settings.config.rate,
        )
    }

    /// Price on day `i`. The non-path models hold the same-day volatility
    /// constant over the remaining life; the path models consume the sampled
    /// suffix from day `i`.
    pub fn price(&self, i: usize, model: Model) -> Result<f64, CliError> {
        let inputs = self.inputs(i)?;
        let config = &self.settings.config;
        let sigma = self.vol.as_path().values()[i];
        let price = match model {
            Model::Bs => bs_call_price(&inputs, sigma)?,
            Model::BsTd => bs_call_price_td(&inputs, self.vol.suffix(i).as_path())?,
            Model::Qbs => {
                let q = QuantumVolParams::new(config.gamma, sigma, config.k_mode)?;
                qbs_call_price(&inputs, &q)?
            }
            Model::QbsTd => {
                let gamma_path = SampledPath::constant(config.gamma, self.len() - i);
                qbs_call_price_td(
                    &inputs,
                    &gamma_path,
                    self.vol.suffix(i).as_path(),
                    config.k_mode,
                )?
            }
        };
        Ok(price)
    }

    /// Per-day extraction of the extra volatility component from the market
    /// close; requires a loaded option series.
    pub fn calibrate(&self) -> Result<Vec<CalibratedDay>, CliError> {
        let market = self
            .market
            .as_ref()
            .ok_or_else(|| CliError::input("calibration needs --option"))?;
        let sigmas = self.vol.as_path().values();
        let points: Vec<SeriesPoint> = self
            .dates
            .iter()
            .enumerate()
            .map(|(i, date)| SeriesPoint {
                date: date.clone(),
                spot: self.spots[i],
                market_price: market[i],
                sigma_public: sigmas[i],
            })
            .collect();
        calibrate_series(
            &self.spec,
            &points,
            self.settings.config.rate,
            self.settings.config.gamma,
            self.settings.config.k_mode,
        )
        .map_err(|e| match e {
            CalibrationError::EmptySeries | CalibrationError::WindowMismatch { .. } => {
                CliError::input(e.to_string())
            }
            other => CliError::numerical(other.to_string()),
        })
    }

    /// Classical price at the same-day public volatility, the reference the
    /// regime split compares against.
    pub fn classical_price(&self, i: usize) -> Result<f64, CliError> {
        let inputs = self.inputs(i)?;
        let config = &self.settings.config;
        let q = QuantumVolParams::new(
            config.gamma,
            self.vol.as_path().values()[i],
            config.k_mode,
        )?;
        Ok(qbs_call_price(&inputs, &q)?)
    }

    /// Expanded price at a calibrated generalized volatility.
    pub fn expanded_price(&self, i: usize, s: f64) -> Result<f64, CliError> {
        let inputs = self.inputs(i)?;
        let config = &self.settings.config;
        let q = QuantumVolParams::new(config.gamma, s, config.k_mode)?;
        Ok(qbs_call_price(&inputs, &q)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bsx_core::KMode;

    #[test]
    fn sig10_rounds_and_trims() {
        assert_eq!(sig10(0.0), "0");
        assert_eq!(sig10(13.0), "13");
        assert_eq!(sig10(0.25), "0.25");
        assert_eq!(sig10(4.132169036697095897), "4.132169037");
        assert_eq!(sig10(-4.132169036697095897), "-4.132169037");
        assert_eq!(sig10(1.0 / 3.0), "0.3333333333");
        assert_eq!(sig10(12345678912345.0), "12345678910000");
        assert_eq!(sig10(1.5502762341234e-31), "1.550276234e-31");
        assert_eq!(sig10(0.00001), "0.00001");
    }

    #[test]
    fn settings_flags_override_defaults() {
        let s = resolve_settings(&Overrides {
            config: None,
            beta_table: None,
            rate: Some(0.01),
            gamma: Some(2.0),
            k_mode: Some("serial"),
        })
        .unwrap();
        assert_eq!(s.config.rate, 0.01);
        assert_eq!(s.config.gamma, 2.0);
        assert_eq!(s.config.k_mode, KMode::SerialCorrelated);
    }

    #[test]
    fn settings_reject_bad_gamma_and_k_mode() {
        let bad_gamma = resolve_settings(&Overrides {
            config: None,
            beta_table: None,
            rate: None,
            gamma: Some(0.5),
            k_mode: None,
        });
        assert_eq!(bad_gamma.unwrap_err().code, EXIT_INPUT);
        let bad_k = resolve_settings(&Overrides {
            config: None,
            beta_table: None,
            rate: None,
            gamma: None,
            k_mode: Some("markov"),
        });
        assert_eq!(bad_k.unwrap_err().code, EXIT_INPUT);
    }

    #[test]
    fn spec_requires_every_field() {
        let err = resolve_spec(&SpecOverrides {
            spec: None,
            ticker: Some("AAL"),
            strike: Some(13.0),
            issue: Some("2020-10-08"),
            expiry: None,
        })
        .unwrap_err();
        assert_eq!(err.code, EXIT_INPUT);
        assert!(err.message.contains("--expiry"), "{}", err.message);
    }

    #[test]
    fn spec_flags_win_over_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        use std::io::Write as _;
        writeln!(file, "ticker=AAL\nstrike=13\nissue=2020-10-08\nexpiry=2020-11-20").unwrap();
        let spec = resolve_spec(&SpecOverrides {
            spec: Some(file.path()),
            ticker: None,
            strike: Some(14.5),
            issue: None,
            expiry: None,
        })
        .unwrap();
        assert_eq!(spec.ticker, "AAL");
        assert_eq!(spec.strike, 14.5);
    }
}
