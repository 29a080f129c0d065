//! `xrtg` — capture-to-grid pipeline front door.
//!
//! Four subcommands wire the library end to end: `ingest` turns an
//! RTP-over-UDP capture into frame metrics, `fit` turns metrics into a
//! stream model, `generate` turns a model into a synthetic trace, and
//! `allocate` replays two traces through the same radio grid and reports
//! how far apart their allocations land.
//!
//! Exit codes: 0 ok, 1 usage, 2 input parse, 3 empty data, 4 unknown
//! lookup, 5 configuration mismatch, 10 internal.

mod cmd_allocate;
mod cmd_fit;
mod cmd_generate;
mod cmd_ingest;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use xrtg::dist::Family;
use xrtg::error::Error;
use xrtg::modelbank::PacketSizePolicy;
use xrtg::Direction;

/// Default UDP port for RTP payloads, used on both the write and read side
/// so a generated capture round-trips without extra flags.
pub const DEFAULT_RTP_PORT: u16 = 5004;

#[derive(Parser)]
#[command(
    name = "xrtg",
    version,
    about = "XR traffic toolkit: ingest captures, fit stream models, \
             generate synthetic traces, compare grid allocations"
)]
struct Cli {
    /// Worker threads for independent fitting tasks (used by `fit`).
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..=512))]
    jobs: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract frame metrics and summary statistics from a capture.
    Ingest(IngestArgs),
    /// Fit candidate distributions to a metrics file and save the best model.
    Fit(FitArgs),
    /// Synthesize a packet trace from a model; optionally write PCAP and a
    /// throughput report.
    Generate(GenerateArgs),
    /// Replay two traces through one radio grid and report the relative
    /// per-RB throughput error of B against A.
    Allocate(AllocateArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    /// PCAP capture of an RTP-over-UDP stream.
    pub pcap: PathBuf,

    /// UDP port carrying the stream; other traffic is ignored.
    #[arg(long, default_value_t = DEFAULT_RTP_PORT)]
    pub port: u16,

    /// Inter-packet gap (seconds) above which a new frame starts even
    /// without a marker bit.
    #[arg(long, default_value_t = 0.005)]
    pub gap_threshold: f64,

    /// Output directory for metrics.bin, stats.csv and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FitArgs {
    /// Binary metrics file produced by `ingest`.
    pub metrics_file: PathBuf,

    /// Comma-separated candidate families: johnson_su, normal,
    /// exp_modified_normal.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_family)]
    pub families: Vec<Family>,

    /// Output directory for model.toml, ranking.csv and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
#[command(group = ArgGroup::new("source").required(true).args(["model", "builtin"]))]
#[command(group = ArgGroup::new("span").required(true).args(["duration", "frames"]))]
#[command(group = ArgGroup::new("output").required(true).multiple(true).args(["pcap_out", "report"]))]
pub struct GenerateArgs {
    /// Model file (TOML) produced by `fit`.
    #[arg(long)]
    pub model: Option<PathBuf>,

    /// Builtin model id (stream1-low/-med/-high, stream2-72/-90,
    /// stream3-low/-med/-high).
    #[arg(long)]
    pub builtin: Option<String>,

    /// Packet-size policy override: max-packet, mean-packet or explicit:N.
    #[arg(long, value_parser = parse_policy)]
    pub policy: Option<PacketSizePolicy>,

    /// RNG seed; the same seed reproduces the trace byte for byte.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Horizon in seconds (frames starting inside it are generated).
    #[arg(long)]
    pub duration: Option<f64>,

    /// Exact number of frames instead of a time horizon.
    #[arg(long)]
    pub frames: Option<u64>,

    /// Write the synthetic trace as a PCAP here.
    #[arg(long)]
    pub pcap_out: Option<PathBuf>,

    /// Write a one-row throughput report CSV here.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Suppress the warning for models whose fit scored KS > 0.1.
    #[arg(long)]
    pub no_ks_warning: bool,
}

#[derive(Args)]
pub struct AllocateArgs {
    /// Reference trace (PCAP); the error is measured relative to this one.
    #[arg(long)]
    pub trace_a: PathBuf,

    /// Candidate trace (PCAP).
    #[arg(long)]
    pub trace_b: PathBuf,

    /// Grid bandwidth in Hz, e.g. 200e6.
    #[arg(long)]
    pub bandwidth: f64,

    /// 5G numerology 0..=3; slot length is 1 ms / 2^mu.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub mu: u8,

    /// Which TDD slots carry the traffic: uplink or downlink.
    #[arg(long, default_value_t = Direction::Downlink)]
    pub direction: Direction,

    /// UDP port used to read both input PCAPs.
    #[arg(long, default_value_t = DEFAULT_RTP_PORT)]
    pub port: u16,

    /// Output directory for the allocation matrices, error.csv and
    /// manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn parse_policy(s: &str) -> Result<PacketSizePolicy, String> {
    s.parse::<PacketSizePolicy>().map_err(|e| e.to_string())
}

/// A usage mistake clap could not catch (bad value ranges, inconsistent
/// combinations) versus an error bubbling up from the pipeline.
pub enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub type CliResult = std::result::Result<(), CliError>;

fn lib_exit_code(e: &Error) -> u8 {
    match e {
        Error::PcapParse { .. } | Error::Format { .. } | Error::Io { .. } => 2,
        Error::EmptyData(_) => 3,
        Error::UnknownStream { .. } => 4,
        Error::ConfigMismatch(_) => 5,
        _ => 10,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let jobs = usize::from(cli.jobs);
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest::run(&args),
        Command::Fit(args) => cmd_fit::run(&args, jobs),
        Command::Generate(args) => cmd_generate::run(&args),
        Command::Allocate(args) => cmd_allocate::run(&args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(lib_exit_code(&e))
        }
    }
}
