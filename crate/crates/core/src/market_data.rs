//! Ingestion and alignment of the dated CSV inputs (stock closes, option
//! closes, VIX closes, beta table, run config), plus the dated volatility
//! path and its Riemann accumulation.
//!
//! Dates are ISO-8601 day strings compared lexically; the data is daily
//! closes only, so there is no timezone handling. Missing dates are hard
//! errors: the inputs are complete daily series and gaps indicate corrupt
//! input, never something to forward-fill.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::pricing::{KMode, PricingError, SampledPath};
use crate::volatility::{sigma_from_beta_vix, BetaTable, ChainQuote};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: expected header `{expected}`, found `{found}`")]
    Header {
        path: PathBuf,
        expected: &'static str,
        found: String,
    },
    #[error("{path}: row {row}, column `{column}`: {detail}")]
    Malformed {
        path: PathBuf,
        row: usize,
        column: &'static str,
        detail: String,
    },
    #[error("{path}: row {row}: duplicate date {date}")]
    DuplicateDate { path: PathBuf, row: usize, date: Date },
    #[error("{path}: row {row}: date {date} is not after the previous row")]
    NonMonotoneDate { path: PathBuf, row: usize, date: Date },
    #[error("invalid date `{0}`: expected YYYY-MM-DD")]
    BadDate(String),
    #[error("series dates must be strictly ascending with finite values")]
    BadSeries,
    #[error("series `{series}` does not cover [{start}, {end}]")]
    Coverage { series: String, start: Date, end: Date },
    #[error("series `{series}` is missing dates: {}", dates.iter().map(|d| d.as_str()).collect::<Vec<_>>().join(", "))]
    MissingDates { series: String, dates: Vec<Date> },
    #[error("negative volatility on {date}: beta {beta}")]
    NegativeVolatility { date: Date, beta: f64 },
    #[error("{path}: unknown config key `{key}`")]
    UnknownKey { path: PathBuf, key: String },
    #[error("{path}: bad value for `{key}`: {detail}")]
    BadValue {
        path: PathBuf,
        key: String,
        detail: String,
    },
    #[error("day_count is locked to 252 trading days/year, got {0}")]
    DayCountLocked(u32),
    #[error("option spec: {0}")]
    BadOptionSpec(String),
}

/// ISO-8601 trading-day date. Lexical comparison is chronological for this
/// format, so the plain string ordering is used throughout.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date(String);

impl Date {
    pub fn parse(s: &str) -> Result<Self, DataError> {
        let bytes = s.as_bytes();
        let ok = bytes.len() == 10
            && bytes[4] == b'-'
            && bytes[7] == b'-'
            && bytes
                .iter()
                .enumerate()
                .all(|(i, b)| matches!(i, 4 | 7) || b.is_ascii_digit());
        if !ok {
            return Err(DataError::BadDate(s.to_string()));
        }
        let month: u32 = s[5..7].parse().unwrap();
        let day: u32 = s[8..10].parse().unwrap();
        if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            return Err(DataError::BadDate(s.to_string()));
        }
        Ok(Date(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ascending sequence of (date, value) daily observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedSeries {
    points: Vec<(Date, f64)>,
}

impl DatedSeries {
    pub fn new(points: Vec<(Date, f64)>) -> Result<Self, DataError> {
        for (i, (date, value)) in points.iter().enumerate() {
            if !value.is_finite() {
                return Err(DataError::BadSeries);
            }
            if i > 0 && points[i - 1].0 >= *date {
                return Err(DataError::BadSeries);
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(Date, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first_date(&self) -> Option<&Date> {
        self.points.first().map(|(d, _)| d)
    }

    pub fn last_date(&self) -> Option<&Date> {
        self.points.last().map(|(d, _)| d)
    }

    pub fn get(&self, date: &Date) -> Option<f64> {
        self.points
            .binary_search_by(|(d, _)| d.cmp(date))
            .ok()
            .map(|i| self.points[i].1)
    }
}

fn open(path: &Path) -> Result<BufReader<File>, DataError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Reads a CSV file and hands each data row to `parse` with its 1-based row
/// number. Row 1 is the header, which must match `header` exactly.
fn read_csv<T>(
    path: &Path,
    header: &'static str,
    mut parse: impl FnMut(usize, &[&str]) -> Result<T, DataError>,
) -> Result<Vec<T>, DataError> {
    let reader = open(path)?;
    let columns = header.split(',').count();
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let row = i + 1;
        let line = line.map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let line = line.trim_end_matches('\r');
        if row == 1 {
            if line != header {
                return Err(DataError::Header {
                    path: path.to_path_buf(),
                    expected: header,
                    found: line.to_string(),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(DataError::Malformed {
                path: path.to_path_buf(),
                row,
                column: header,
                detail: format!("expected {columns} fields, found {}", fields.len()),
            });
        }
        out.push(parse(row, &fields)?);
    }
    Ok(out)
}

fn parse_number(
    path: &Path,
    row: usize,
    column: &'static str,
    text: &str,
) -> Result<f64, DataError> {
    let value: f64 = text.parse().map_err(|_| DataError::Malformed {
        path: path.to_path_buf(),
        row,
        column,
        detail: format!("`{text}` is not a number"),
    })?;
    if !value.is_finite() {
        return Err(DataError::Malformed {
            path: path.to_path_buf(),
            row,
            column,
            detail: format!("`{text}` is not finite"),
        });
    }
    Ok(value)
}

/// Loads a `date,value` CSV into a strictly ascending series, with
/// row-numbered diagnostics for malformed, duplicate or out-of-order rows.
pub fn load_series(path: &Path) -> Result<DatedSeries, DataError> {
    let mut points: Vec<(Date, f64)> = Vec::new();
    read_csv(path, "date,value", |row, fields| {
        let date = Date::parse(fields[0]).map_err(|_| DataError::Malformed {
            path: path.to_path_buf(),
            row,
            column: "date",
            detail: format!("`{}` is not an ISO-8601 date", fields[0]),
        })?;
        let value = parse_number(path, row, "value", fields[1])?;
        if let Some((prev, _)) = points.last() {
            if *prev == date {
                return Err(DataError::DuplicateDate {
                    path: path.to_path_buf(),
                    row,
                    date,
                });
            }
            if *prev > date {
                return Err(DataError::NonMonotoneDate {
                    path: path.to_path_buf(),
                    row,
                    date,
                });
            }
        }
        points.push((date, value));
        Ok(())
    })?;
    DatedSeries::new(points)
}

/// Writes a series back out in the `date,value` schema. Values render with
/// the shortest representation that round-trips, so load(write(s)) == s.
pub fn write_series<W: Write>(series: &DatedSeries, out: &mut W) -> io::Result<()> {
    writeln!(out, "date,value")?;
    for (date, value) in series.points() {
        writeln!(out, "{date},{value}")?;
    }
    Ok(())
}

/// Loads a `ticker,beta` CSV.
pub fn load_beta_table(path: &Path) -> Result<BetaTable, DataError> {
    let mut table = BetaTable::new();
    read_csv(path, "ticker,beta", |row, fields| {
        let beta = parse_number(path, row, "beta", fields[1])?;
        table.insert(fields[0], beta).map_err(|_| DataError::Malformed {
            path: path.to_path_buf(),
            row,
            column: "beta",
            detail: "non-finite beta".into(),
        })
    })?;
    Ok(table)
}

/// Loads a `strike,call_mid,put_mid,q_mid` chain CSV. Chain-level invariants
/// (ascending strikes, minimum size) are checked by `VixInputs::new`.
pub fn load_chain(path: &Path) -> Result<Vec<ChainQuote>, DataError> {
    read_csv(path, "strike,call_mid,put_mid,q_mid", |row, fields| {
        Ok(ChainQuote {
            strike: parse_number(path, row, "strike", fields[0])?,
            call_mid: parse_number(path, row, "call_mid", fields[1])?,
            put_mid: parse_number(path, row, "put_mid", fields[2])?,
            q_mid: parse_number(path, row, "q_mid", fields[3])?,
        })
    })
}

/// Inner join of several named series on trading dates inside the window.
/// Column order matches the input order.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedTable {
    dates: Vec<Date>,
    columns: Vec<Vec<f64>>,
}

impl AlignedTable {
    pub fn dates(&self) -> &[Date] {
        &self.dates
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// Joins the series on the trading dates in `[start, end]`. Any date present
/// in one series but missing in another is a hard error; nothing is ever
/// forward-filled.
pub fn align(
    named: &[(&str, &DatedSeries)],
    start: &Date,
    end: &Date,
) -> Result<AlignedTable, DataError> {
    for (name, series) in named {
        let covers = match (series.first_date(), series.last_date()) {
            (Some(first), Some(last)) => first <= start && last >= end,
            _ => false,
        };
        if !covers {
            return Err(DataError::Coverage {
                series: name.to_string(),
                start: start.clone(),
                end: end.clone(),
            });
        }
    }

    // union of in-window dates across all series
    let mut union: Vec<Date> = Vec::new();
    for (_, series) in named {
        for (date, _) in series.points() {
            if date >= start && date <= end {
                union.push(date.clone());
            }
        }
    }
    union.sort();
    union.dedup();

    for (name, series) in named {
        let missing: Vec<Date> = union
            .iter()
            .filter(|d| series.get(d).is_none())
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(DataError::MissingDates {
                series: name.to_string(),
                dates: missing,
            });
        }
    }

    let columns = named
        .iter()
        .map(|(_, series)| union.iter().map(|d| series.get(d).unwrap()).collect())
        .collect();
    Ok(AlignedTable {
        dates: union,
        columns,
    })
}

/// Dated per-trading-day annualized volatility samples, step 1/252.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPath {
    dates: Vec<Date>,
    path: SampledPath,
}

impl VolatilityPath {
    pub fn new(dates: Vec<Date>, sigmas: Vec<f64>) -> Result<Self, DataError> {
        assert_eq!(dates.len(), sigmas.len());
        for (date, sigma) in dates.iter().zip(&sigmas) {
            if !sigma.is_finite() || *sigma < 0.0 {
                return Err(DataError::NegativeVolatility {
                    date: date.clone(),
                    beta: f64::NAN,
                });
            }
        }
        Ok(Self {
            dates,
            path: SampledPath::new(sigmas).expect("samples checked finite"),
        })
    }

    pub fn dates(&self) -> &[Date] {
        &self.dates
    }

    pub fn as_path(&self) -> &SampledPath {
        &self.path
    }

    /// Path restricted to samples from `start` onward.
    pub fn suffix(&self, start: usize) -> VolatilityPath {
        let start = start.min(self.dates.len());
        Self {
            dates: self.dates[start..].to_vec(),
            path: self.path.suffix(start),
        }
    }

    /// Left Riemann sum of sigma^2 over `[0, T)`, step 1/252.
    pub fn accumulated_variance(&self, t_years: f64) -> Result<f64, PricingError> {
        self.path.integrate(t_years, |s| s * s)
    }
}

/// Pointwise `beta * VIX / 100` path over the dates of a VIX series.
pub fn build_vol_path(vix_series: &DatedSeries, beta: f64) -> Result<VolatilityPath, DataError> {
    let mut dates = Vec::with_capacity(vix_series.len());
    let mut sigmas = Vec::with_capacity(vix_series.len());
    for (date, vix) in vix_series.points() {
        let sigma = sigma_from_beta_vix(beta, *vix).map_err(|_| DataError::NegativeVolatility {
            date: date.clone(),
            beta,
        })?;
        dates.push(date.clone());
        sigmas.push(sigma);
    }
    VolatilityPath::new(dates, sigmas)
}

/// European call contract terms.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionSpec {
    pub ticker: String,
    pub strike: f64,
    pub issuance_date: Date,
    pub maturity_date: Date,
}

impl OptionSpec {
    pub fn new(
        ticker: &str,
        strike: f64,
        issuance_date: Date,
        maturity_date: Date,
    ) -> Result<Self, DataError> {
        if !(strike.is_finite() && strike > 0.0) {
            return Err(DataError::BadOptionSpec(format!(
                "strike must be positive, got {strike}"
            )));
        }
        if issuance_date >= maturity_date {
            return Err(DataError::BadOptionSpec(format!(
                "issuance {issuance_date} must precede maturity {maturity_date}"
            )));
        }
        Ok(Self {
            ticker: ticker.to_string(),
            strike,
            issuance_date,
            maturity_date,
        })
    }
}

/// Run defaults: rate 0.08% annualized, gamma 1, Wiener correlation, and the
/// 252 trading-day year.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rate: f64,
    pub gamma: f64,
    pub k_mode: KMode,
    pub beta_table: BetaTable,
    pub day_count: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rate: 0.0008,
            gamma: 1.0,
            k_mode: KMode::Wiener,
            beta_table: BetaTable::new(),
            day_count: 252,
        }
    }
}

pub fn parse_k_mode(text: &str) -> Option<KMode> {
    match text {
        "wiener" => Some(KMode::Wiener),
        "serial" => Some(KMode::SerialCorrelated),
        _ => None,
    }
}

fn key_value_lines(path: &Path) -> Result<Vec<(String, String)>, DataError> {
    let reader = open(path)?;
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => out.push((k.trim().to_string(), v.trim().to_string())),
            None => {
                return Err(DataError::BadValue {
                    path: path.to_path_buf(),
                    key: line.to_string(),
                    detail: "expected key=value".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Loads a flat `key=value` config. The `beta_table` value is a path
/// resolved relative to the config file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig, DataError> {
    let mut config = RunConfig::default();
    let bad = |key: &str, detail: String| DataError::BadValue {
        path: path.to_path_buf(),
        key: key.to_string(),
        detail,
    };
    for (key, value) in key_value_lines(path)? {
        match key.as_str() {
            "rate" => {
                config.rate = value
                    .parse()
                    .map_err(|_| bad("rate", format!("`{value}` is not a number")))?;
            }
            "gamma" => {
                let gamma: f64 = value
                    .parse()
                    .map_err(|_| bad("gamma", format!("`{value}` is not a number")))?;
                if gamma < 1.0 {
                    return Err(bad("gamma", format!("must be at least 1, got {gamma}")));
                }
                config.gamma = gamma;
            }
            "k_mode" => {
                config.k_mode = parse_k_mode(&value)
                    .ok_or_else(|| bad("k_mode", format!("`{value}` is not wiener|serial")))?;
            }
            "beta_table" => {
                let table_path = path.parent().unwrap_or(Path::new(".")).join(&value);
                config.beta_table = load_beta_table(&table_path)?;
            }
            "day_count" => {
                let n: u32 = value
                    .parse()
                    .map_err(|_| bad("day_count", format!("`{value}` is not an integer")))?;
                if n != 252 {
                    return Err(DataError::DayCountLocked(n));
                }
            }
            other => {
                return Err(DataError::UnknownKey {
                    path: path.to_path_buf(),
                    key: other.to_string(),
                })
            }
        }
    }
    Ok(config)
}

/// Loads an option contract from a flat `key=value` file with keys
/// `ticker`, `strike`, `issue`, `expiry`.
pub fn load_option_spec(path: &Path) -> Result<OptionSpec, DataError> {
    let mut ticker = None;
    let mut strike = None;
    let mut issue = None;
    let mut expiry = None;
    for (key, value) in key_value_lines(path)? {
        match key.as_str() {
            "ticker" => ticker = Some(value),
            "strike" => {
                strike = Some(value.parse::<f64>().map_err(|_| DataError::BadValue {
                    path: path.to_path_buf(),
                    key,
                    detail: format!("`{value}` is not a number"),
                })?)
            }
            "issue" => issue = Some(Date::parse(&value)?),
            "expiry" => expiry = Some(Date::parse(&value)?),
            other => {
                return Err(DataError::UnknownKey {
                    path: path.to_path_buf(),
                    key: other.to_string(),
                })
            }
        }
    }
    let missing = |what: &str| DataError::BadOptionSpec(format!("missing `{what}`"));
    OptionSpec::new(
        &ticker.ok_or_else(|| missing("ticker"))?,
        strike.ok_or_else(|| missing("strike"))?,
        issue.ok_or_else(|| missing("issue"))?,
        expiry.ok_or_else(|| missing("expiry"))?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> Date {
        Date::parse(s).unwrap()
    }

    fn temp_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn date_parsing() {
        assert!(Date::parse("2020-10-08").is_ok());
        assert!(Date::parse("2020-13-08").is_err());
        assert!(Date::parse("2020-10-8").is_err());
        assert!(Date::parse("20201008").is_err());
    }

    #[test]
    fn load_well_formed_series() {
        let f = temp_csv("date,value\n2020-10-08,1.5\n2020-10-09,2\n2020-10-12,2.5\n");
        let series = load_series(f.path()).unwrap();
        assert_eq!(series.len(), 3);
        assert_eq!(series.get(&date("2020-10-09")), Some(2.0));
    }

    #[test]
    fn load_rejects_duplicate_date() {
        let f = temp_csv("date,value\n2020-10-08,1.5\n2020-10-08,2\n");
        let err = load_series(f.path()).unwrap_err();
        assert!(
            matches!(err, DataError::DuplicateDate { row: 3, .. }),
            "{err}"
        );
    }

    #[test]
    fn load_rejects_nan_value() {
        let f = temp_csv("date,value\n2020-10-08,1.5\n2020-10-09,NaN\n");
        let err = load_series(f.path()).unwrap_err();
        match err {
            DataError::Malformed { row, column, .. } => {
                assert_eq!((row, column), (3, "value"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn load_rejects_out_of_order_dates() {
        let f = temp_csv("date,value\n2020-10-09,1\n2020-10-08,2\n");
        let err = load_series(f.path()).unwrap_err();
        assert!(matches!(err, DataError::NonMonotoneDate { row: 3, .. }));
    }

    #[test]
    fn load_rejects_wrong_header() {
        let f = temp_csv("day,close\n2020-10-08,1\n");
        assert!(matches!(load_series(f.path()), Err(DataError::Header { .. })));
    }

    #[test]
    fn series_round_trips_through_csv() {
        let series = DatedSeries::new(vec![
            (date("2020-10-08"), 12.345678901234),
            (date("2020-10-09"), 0.1),
            (date("2020-10-12"), 1e-9),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_series(&series, &mut buf).unwrap();
        let f = temp_csv(std::str::from_utf8(&buf).unwrap());
        assert_eq!(load_series(f.path()).unwrap(), series);
    }

    #[test]
    fn align_identical_calendars() {
        let points: Vec<_> = (1..=30)
            .map(|i| (date(&format!("2020-11-{i:02}")), i as f64))
            .collect();
        let a = DatedSeries::new(points.clone()).unwrap();
        let b = DatedSeries::new(points).unwrap();
        let table = align(
            &[("a", &a), ("b", &b)],
            &date("2020-11-01"),
            &date("2020-11-30"),
        )
        .unwrap();
        assert_eq!(table.len(), 30);
        assert_eq!(table.column(0), table.column(1));
    }

    #[test]
    fn align_reports_missing_mid_window_date() {
        let a = DatedSeries::new(vec![
            (date("2020-10-08"), 1.0),
            (date("2020-10-09"), 2.0),
            (date("2020-10-12"), 3.0),
        ])
        .unwrap();
        let b = DatedSeries::new(vec![
            (date("2020-10-08"), 1.0),
            (date("2020-10-12"), 3.0),
        ])
        .unwrap();
        let err = align(
            &[("a", &a), ("b", &b)],
            &date("2020-10-08"),
            &date("2020-10-12"),
        )
        .unwrap_err();
        match err {
            DataError::MissingDates { series, dates } => {
                assert_eq!(series, "b");
                assert_eq!(dates, vec![date("2020-10-09")]);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn align_rejects_window_past_series() {
        let a = DatedSeries::new(vec![(date("2020-10-08"), 1.0)]).unwrap();
        let err = align(&[("a", &a)], &date("2020-10-08"), &date("2020-10-09")).unwrap_err();
        assert!(matches!(err, DataError::Coverage { .. }));
    }

    #[test]
    fn build_vol_path_constant() {
        let vix = DatedSeries::new(vec![
            (date("2020-10-08"), 30.0),
            (date("2020-10-09"), 30.0),
        ])
        .unwrap();
        let path = build_vol_path(&vix, 1.0).unwrap();
        assert_eq!(path.as_path().values(), &[0.3, 0.3]);
    }

    #[test]
    fn build_vol_path_scales_pointwise() {
        let vix = DatedSeries::new(vec![
            (date("2020-10-08"), 30.11),
            (date("2020-10-09"), 29.95),
        ])
        .unwrap();
        let path = build_vol_path(&vix, 1.71).unwrap();
        assert_eq!(path.as_path().values()[0], 1.71 * 30.11 / 100.0);
        assert_eq!(path.as_path().values()[1], 1.71 * 29.95 / 100.0);
    }

    #[test]
    fn build_vol_path_negative_beta_names_date() {
        let vix = DatedSeries::new(vec![(date("2020-10-08"), 30.0)]).unwrap();
        let err = build_vol_path(&vix, -0.1).unwrap_err();
        match err {
            DataError::NegativeVolatility { date: d, beta } => {
                assert_eq!(d, date("2020-10-08"));
                assert_eq!(beta, -0.1);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn accumulated_variance_constant() {
        let dates: Vec<_> = (1..=10).map(|i| date(&format!("2020-10-{i:02}"))).collect();
        let path = VolatilityPath::new(dates, vec![0.3; 10]).unwrap();
        let v = path.accumulated_variance(10.0 / 252.0).unwrap();
        assert!((v - 0.09 * 10.0 / 252.0).abs() <= 1e-16);
        assert_eq!(path.accumulated_variance(0.0).unwrap(), 0.0);
    }

    #[test]
    fn accumulated_variance_two_segments() {
        let dates: Vec<_> = (1..=6).map(|i| date(&format!("2020-10-{i:02}"))).collect();
        let path = VolatilityPath::new(dates, vec![0.2, 0.2, 0.2, 0.4, 0.4, 0.4]).unwrap();
        let v = path.accumulated_variance(6.0 / 252.0).unwrap();
        let hand = (0.04 + 0.04 + 0.04 + 0.16 + 0.16 + 0.16) / 252.0;
        assert!((v - hand).abs() <= 1e-16, "{v} vs {hand}");
    }

    #[test]
    fn accumulated_variance_is_additive() {
        let dates: Vec<_> = (1..=20).map(|i| date(&format!("2020-10-{i:02}"))).collect();
        let sigmas: Vec<f64> = (0..20).map(|i| 0.1 + 0.02 * i as f64).collect();
        let path = VolatilityPath::new(dates, sigmas).unwrap();
        let full = path.accumulated_variance(20.0 / 252.0).unwrap();
        let head = path.accumulated_variance(8.0 / 252.0).unwrap();
        let tail = path.suffix(8).accumulated_variance(12.0 / 252.0).unwrap();
        // same summation order, so additivity holds beyond mere rounding
        assert!((head + tail - full).abs() <= 1e-15 * full.max(1.0));
    }

    #[test]
    fn config_defaults_and_file() {
        let default = RunConfig::default();
        assert_eq!(default.rate, 0.0008);
        assert_eq!(default.gamma, 1.0);
        assert_eq!(default.k_mode, KMode::Wiener);

        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("beta.csv"), "ticker,beta\nAAL,1.71\n").unwrap();
        let config_path = dir.path().join("config.txt");
        std::fs::write(
            &config_path,
            "rate=0.001\ngamma=1.5\nk_mode=serial\nbeta_table=beta.csv\nday_count=252\n",
        )
        .unwrap();
        let config = load_config(&config_path).unwrap();
        assert_eq!(config.rate, 0.001);
        assert_eq!(config.gamma, 1.5);
        assert_eq!(config.k_mode, KMode::SerialCorrelated);
        assert_eq!(config.beta_table.get("AAL"), Some(1.71));
    }

    #[test]
    fn config_rejects_other_day_count() {
        let f = temp_csv("day_count=365\n");
        assert!(matches!(
            load_config(f.path()),
            Err(DataError::DayCountLocked(365))
        ));
    }

    #[test]
    fn option_spec_requires_ordered_dates() {
        assert!(OptionSpec::new("AAL", 13.0, date("2020-11-20"), date("2020-10-08")).is_err());
        assert!(OptionSpec::new("AAL", 0.0, date("2020-10-08"), date("2020-11-20")).is_err());
    }
}
