//! `bsx`: prices European calls under the classical, time-dependent and
//! expanded (generalized complex volatility) models, computes a single-expiry
//! VIX from an option chain, and extracts the extra volatility component from
//! observed market closes. CSV output goes to standard output or `--out`;
//! diagnostics go to the error stream.

mod pipeline;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bsx_core::{compute_vix, load_chain, VixInputs};
use pipeline::{
    load_run, resolve_settings, resolve_spec, sig10, CliError, Model, Overrides, Run,
    SpecOverrides,
};

#[derive(Parser)]
#[command(
    name = "bsx",
    about = "European call pricing, calibration and VIX toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Daily model prices from issuance to maturity (CSV: date,model_price)
    Price(PriceArgs),
    /// Daily extraction of the extra volatility component from market closes
    Calibrate(SeriesArgs),
    /// Single-expiry VIX from an index option chain
    Vix(VixArgs),
    /// Market vs classical vs calibrated expanded prices, with summary stats
    Compare(SeriesArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// key=value config file (rate, gamma, k_mode, beta_table, day_count)
    #[arg(long)]
    config: Option<PathBuf>,
    /// key=value contract file (ticker, strike, issue, expiry)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Stock close CSV (date,value)
    #[arg(long)]
    stock: PathBuf,
    /// VIX close CSV (date,value)
    #[arg(long)]
    vix: PathBuf,
    /// Beta table CSV (ticker,beta); overrides the config's table
    #[arg(long)]
    beta_table: Option<PathBuf>,
    /// Underlying ticker; overrides the spec file
    #[arg(long)]
    ticker: Option<String>,
    /// Strike price; overrides the spec file
    #[arg(long)]
    strike: Option<f64>,
    /// Issuance date (ISO-8601); overrides the spec file
    #[arg(long)]
    issue: Option<String>,
    /// Maturity date (ISO-8601); overrides the spec file
    #[arg(long)]
    expiry: Option<String>,
    /// Volatility scale gamma >= 1; overrides the config
    #[arg(long)]
    gamma: Option<f64>,
    /// Correlation structure, wiener|serial; overrides the config
    #[arg(long)]
    k_mode: Option<String>,
    /// Annualized risk-free rate; overrides the config
    #[arg(long)]
    rate: Option<f64>,
    /// Write output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Bs,
    BsTd,
    Qbs,
    QbsTd,
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Pricing model
    #[arg(long, value_enum, default_value = "bs-td")]
    model: ModelArg,
}

#[derive(Args)]
struct SeriesArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Market option close CSV (date,value)
    #[arg(long)]
    option: PathBuf,
}

#[derive(Args)]
struct VixArgs {
    /// Option chain CSV (strike,call_mid,put_mid,q_mid)
    #[arg(long)]
    chain: PathBuf,
    /// Time to expiration in years
    #[arg(long)]
    expiry_years: f64,
    /// key=value config file supplying the rate
    #[arg(long)]
    config: Option<PathBuf>,
    /// Annualized risk-free rate; overrides the config
    #[arg(long)]
    rate: Option<f64>,
    /// Write output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // usage mistakes are input errors under the exit-code contract
            eprint!("{e}");
            return ExitCode::from(pipeline::EXIT_INPUT as u8);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Price(args) => cmd_price(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Vix(args) => cmd_vix(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}

fn build_run(common: &CommonArgs, option: Option<&PathBuf>) -> Result<Run, CliError> {
    let settings = resolve_settings(&Overrides {
        config: common.config.as_deref(),
        beta_table: common.beta_table.as_deref(),
        rate: common.rate,
        gamma: common.gamma,
        k_mode: common.k_mode.as_deref(),
    })?;
    let spec = resolve_spec(&SpecOverrides {
        spec: common.spec.as_deref(),
        ticker: common.ticker.as_deref(),
        strike: common.strike,
        issue: common.issue.as_deref(),
        expiry: common.expiry.as_deref(),
    })?;
    load_run(spec, settings, &common.stock, &common.vix, option)
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_price(args: PriceArgs) -> Result<(), CliError> {
    let run = build_run(&args.common, None)?;
    let model = match args.model {
        ModelArg::Bs => Model::Bs,
        ModelArg::BsTd => Model::BsTd,
        ModelArg::Qbs => Model::Qbs,
        ModelArg::QbsTd => Model::QbsTd,
    };
    let mut body = String::from("date,model_price\n");
    for i in 0..run.len() {
        let price = run.price(i, model)?;
        writeln!(body, "{},{}", run.dates[i], sig10(price)).expect("string write");
    }
    emit(&args.common.out, &body)
}

fn cmd_calibrate(args: SeriesArgs) -> Result<(), CliError> {
    let run = build_run(&args.common, Some(&args.option))?;
    let days = run.calibrate()?;
    let market = run.market.as_ref().expect("option series loaded");
    let mut body = String::from("date,market_price,model_price,s_star,im_f,regime\n");
    let mut calibrated = 0usize;
    for (i, day) in days.iter().enumerate() {
        let model_price = run.classical_price(i)?;
        match &day.outcome {
            Ok(r) => {
                calibrated += 1;
                writeln!(
                    body,
                    "{},{},{},{},{},{}",
                    day.date,
                    sig10(market[i]),
                    sig10(model_price),
                    sig10(r.s_star),
                    sig10(r.im_f),
                    r.regime.as_str()
                )
                .expect("string write");
            }
            Err(e) => {
                eprintln!("{}: {e}", day.date);
                writeln!(
                    body,
                    "{},{},{},,,none",
                    day.date,
                    sig10(market[i]),
                    sig10(model_price)
                )
                .expect("string write");
            }
        }
    }
    emit(&args.common.out, &body)?;
    if calibrated == 0 {
        return Err(CliError::numerical("no trading day calibrated"));
    }
    Ok(())
}

fn cmd_vix(args: VixArgs) -> Result<(), CliError> {
    let settings = resolve_settings(&Overrides {
        config: args.config.as_deref(),
        beta_table: None,
        rate: args.rate,
        gamma: None,
        k_mode: None,
    })?;
    let chain = load_chain(&args.chain)?;
    let inputs = VixInputs::new(chain, args.expiry_years, settings.config.rate)?;
    let vix = compute_vix(&inputs)?;
    emit(&args.out, &format!("vix={}\n", sig10(vix)))
}

fn cmd_compare(args: SeriesArgs) -> Result<(), CliError> {
    let run = build_run(&args.common, Some(&args.option))?;
    let days = run.calibrate()?;
    let market = run.market.as_ref().expect("option series loaded");

    struct Gaps {
        abs: Vec<f64>,
        rel: Vec<f64>,
    }
    impl Gaps {
        fn push(&mut self, model: f64, market: f64) {
            self.abs.push((model - market).abs());
            if market > 0.0 {
                self.rel.push((model - market).abs() / market);
            }
        }
    }
    let mut bs_gaps = Gaps {
        abs: Vec::new(),
        rel: Vec::new(),
    };
    let mut qbs_gaps = Gaps {
        abs: Vec::new(),
        rel: Vec::new(),
    };

    let mut body = String::from("date,market,bs_td,qbs_at_calibrated_s\n");
    let mut calibrated = 0usize;
    for (i, day) in days.iter().enumerate() {
        let bs_td = run.price(i, Model::BsTd)?;
        bs_gaps.push(bs_td, market[i]);
        match &day.outcome {
            Ok(r) => {
                calibrated += 1;
                let qbs = run.expanded_price(i, r.s_star)?;
                qbs_gaps.push(qbs, market[i]);
                writeln!(
                    body,
                    "{},{},{},{}",
                    day.date,
                    sig10(market[i]),
                    sig10(bs_td),
                    sig10(qbs)
                )
                .expect("string write");
            }
            Err(e) => {
                eprintln!("{}: {e}", day.date);
                writeln!(body, "{},{},{},", day.date, sig10(market[i]), sig10(bs_td))
                    .expect("string write");
            }
        }
    }

    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let max = |v: &[f64]| v.iter().copied().fold(0.0f64, f64::max);
    writeln!(body, "# days={} calibrated={}", days.len(), calibrated).expect("string write");
    writeln!(
        body,
        "# bs_mean_abs={} bs_max_abs={} bs_mean_rel={} bs_max_rel={}",
        sig10(mean(&bs_gaps.abs)),
        sig10(max(&bs_gaps.abs)),
        sig10(mean(&bs_gaps.rel)),
        sig10(max(&bs_gaps.rel))
    )
    .expect("string write");
    writeln!(
        body,
        "# qbs_mean_abs={} qbs_max_abs={} qbs_mean_rel={} qbs_max_rel={}",
        sig10(mean(&qbs_gaps.abs)),
        sig10(max(&qbs_gaps.abs)),
        sig10(mean(&qbs_gaps.rel)),
        sig10(max(&qbs_gaps.rel))
    )
    .expect("string write");

    emit(&args.common.out, &body)?;
    if calibrated == 0 {
        return Err(CliError::numerical("no trading day calibrated"));
    }
    Ok(())
}
