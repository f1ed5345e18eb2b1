mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "polarlist", version, about = "Polar code construction, SC/list-SC decoding and FER simulation")]
struct Cli {
    /// Worker threads for Monte-Carlo runs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Master seed; falls back to the config file, then POLARLIST_SEED, then 1.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// TOML file with `[fer]` and `[hwreport]` tables; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a frozen set and write it in the frozen-set text format.
    Construct(ConstructArgs),
    /// Decode one frame of received channel values.
    Decode(DecodeArgs),
    /// Run FER/BER sweeps and write CSV, JSON and manifest files.
    Fer(FerArgs),
    /// Print the hardware cost model for one configuration.
    Hwreport(HwArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ga,
    Bec,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arith {
    Exact,
    Approx,
    Fixed,
}

/// Code selection shared by every command that needs one.
#[derive(Args, Debug, Clone, Default)]
pub struct CodeArgs {
    /// Blocklength N.
    #[arg(long)]
    n: Option<usize>,
    /// Information bits K.
    #[arg(long)]
    k: Option<usize>,
    /// Construction method.
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Design Eb/N0 in dB for `--method ga`.
    #[arg(long)]
    design_snr: Option<f64>,
    /// Erasure probability for `--method bec`.
    #[arg(long)]
    eps: Option<f64>,
    /// Read the frozen set from a file instead of constructing it.
    #[arg(long, conflicts_with_all = ["n", "k", "method", "design_snr", "eps"])]
    code: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Output file (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Whitespace-separated received values, one per code bit.
    #[arg(long)]
    input: PathBuf,
    /// Successive-cancellation decoding.
    #[arg(long, conflicts_with = "list")]
    sc: bool,
    /// List-SC decoding with this list size.
    #[arg(long)]
    list: Option<usize>,
    #[arg(long, value_enum, default_value = "approx")]
    arith: Arith,
    /// Channel LL width for `--arith fixed`.
    #[arg(long)]
    qch: Option<u32>,
    /// Channel Eb/N0 in dB.
    #[arg(long, conflicts_with = "sigma")]
    ebn0: Option<f64>,
    /// Channel noise standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    /// Print only the information bits.
    #[arg(long)]
    info: bool,
}

#[derive(Args, Debug, Default)]
pub struct FerArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Eb/N0 points: `start:step:stop` or a comma-separated list.
    #[arg(long)]
    snrs: Option<String>,
    /// List sizes to simulate.
    #[arg(long, value_delimiter = ',')]
    list: Vec<usize>,
    /// Also simulate the SC decoder.
    #[arg(long)]
    sc: bool,
    /// Floating-point model, or `fixed` together with `--qch`.
    #[arg(long, value_enum)]
    arith: Option<Arith>,
    /// Fixed-point channel LL widths to simulate.
    #[arg(long, value_delimiter = ',')]
    qch: Vec<u32>,
    /// With `--qch`, also simulate the floating-point decoder.
    #[arg(long)]
    float_baseline: bool,
    /// Frame limit per point.
    #[arg(long)]
    max_frames: Option<u64>,
    /// Stop a point after this many frame errors (0: never).
    #[arg(long)]
    min_errors: Option<u64>,
    /// Directory for result files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct HwArgs {
    /// Blocklength N.
    #[arg(long)]
    n: Option<u64>,
    /// Code rate.
    #[arg(long)]
    rate: Option<f64>,
    /// List size.
    #[arg(long)]
    l: Option<u64>,
    /// Processing elements per SC core.
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    qch: Option<u64>,
    /// Clock frequency in Hz.
    #[arg(long)]
    fclk: Option<f64>,
    /// Print JSON instead of a text table.
    #[arg(long)]
    json: bool,
    /// Also write the report and a manifest to this file.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// A mistake in the command line or config file.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(Usage(msg.into()).into())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let is_usage = err.chain().any(|e| {
        e.is::<Usage>() || matches!(e.downcast_ref::<polarlist::Error>(), Some(polarlist::Error::Parameter(_)))
    });
    if is_usage {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return usage("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let file = config::FileConfig::load(cli.config.as_deref())?;
    let seed = config::resolve_seed(cli.seed, &file)?;
    match cli.command {
        Command::Construct(args) => commands::construct(&args),
        Command::Decode(args) => commands::decode(&args),
        Command::Fer(args) => commands::fer(args, file.fer.unwrap_or_default(), seed, cli.jobs),
        Command::Hwreport(args) => commands::hwreport(args, file.hwreport.unwrap_or_default()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
