//! Command-line driver: rate regions, regime classification, decoding
//! simulation, and the property-check suite, over channels described in
//! JSON files.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 a computation
//! guard refused the problem size, 4 a property check failed.

mod report;
mod svg;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::exit;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qic_core::capacity::{
    classify_strong, classify_very_strong, default_hk_family, hk_region, sato_outer_region,
    sd_rs_region, strong_capacity_region, successive_region, very_strong_capacity_region,
    ClassificationReport, Verdict,
};
use qic_core::channel::{induced_mac, CcqqChannel, Distribution, Receiver};
use qic_core::io::load_channel;
use qic_core::region::RatePoint;
use qic_core::sim::decoder::{
    error_breakdown, run_simulation, sample_codebook, srm_povm, DecoderConfig, ErrorBreakdown,
    SimulationConfig, SimulationOutcome,
};
use qic_core::sim::harness::{all_passed, run_property_suite, PropertyCheck};
use qic_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qic",
    version,
    about = "Rate regions and decoding simulations for two-sender channels with quantum outputs"
)]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute outer bounds and achievable regions for a channel.
    Region(RegionArgs),
    /// Decide whether interference is strong or very strong over an input grid.
    Classify(ClassifyArgs),
    /// Simulate square-root-measurement decoding at one receiver.
    Simulate(SimulateArgs),
    /// Run the operator-inequality self-checks.
    Properties(PropertiesArgs),
}

#[derive(Args)]
struct RegionArgs {
    /// Channel description (JSON).
    #[arg(long)]
    channel: PathBuf,
    /// Input-distribution grid resolution; must be 1/k for integer k ≤ 64.
    #[arg(long, default_value_t = 0.0625)]
    grid_step: f64,
    /// Directory for the report, per-region vertex CSVs, and an SVG overlay.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Channel description (JSON).
    #[arg(long)]
    channel: PathBuf,
    /// Input-distribution grid resolution; must be 1/k for integer k ≤ 64.
    #[arg(long, default_value_t = 0.0625)]
    grid_step: f64,
    /// Directory for the report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Channel description (JSON).
    #[arg(long)]
    channel: PathBuf,
    /// Receiver whose induced multiple-access channel is decoded (1 or 2).
    #[arg(long, default_value_t = 1)]
    receiver: u8,
    /// Number of channel uses per codeword.
    #[arg(long, default_value_t = 3)]
    blocklength: usize,
    /// Sender 1 rate in bits per channel use.
    #[arg(long, default_value_t = 0.25)]
    rate1: f64,
    /// Sender 2 rate in bits per channel use.
    #[arg(long, default_value_t = 0.25)]
    rate2: f64,
    /// Typicality window width.
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    /// Independent codebook draws.
    #[arg(long, default_value_t = 50)]
    samples: u64,
    /// Root seed; sample i derives its randomness from stream i.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Sender 1 input distribution, comma-separated (default: uniform).
    #[arg(long)]
    p1: Option<String>,
    /// Sender 2 input distribution, comma-separated (default: uniform).
    #[arg(long)]
    p2: Option<String>,
    /// Directory for the report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PropertiesArgs {
    /// Seed for the random instances every check draws.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Deliberately weaken the named check's bound to a false one; the
    /// run must then report that check as failed and exit with code 4.
    #[arg(long)]
    inject_fault: Option<String>,
    /// Directory for the report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ChannelSummary {
    x1_size: usize,
    x2_size: usize,
    db1: usize,
    db2: usize,
}

impl ChannelSummary {
    fn of(ch: &CcqqChannel) -> Self {
        Self {
            x1_size: ch.x1().size(),
            x2_size: ch.x2().size(),
            db1: ch.db1(),
            db2: ch.db2(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RegionReport {
    channel: ChannelSummary,
    grid_step: f64,
    hk_family_size: usize,
    very_strong: ClassificationReport,
    strong: ClassificationReport,
    /// Counterclockwise vertices per region name.
    regions: BTreeMap<String, Vec<RatePoint>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ClassifyReport {
    channel: ChannelSummary,
    grid_step: f64,
    very_strong: ClassificationReport,
    strong: ClassificationReport,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SimulateReport {
    channel: ChannelSummary,
    receiver: u8,
    blocklength: usize,
    rate1: f64,
    rate2: f64,
    delta: f64,
    seed: u64,
    p1: Vec<f64>,
    p2: Vec<f64>,
    outcome: SimulationOutcome,
    first_sample_breakdown: ErrorBreakdown,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PropertiesReport {
    seed: u64,
    injected_fault: Option<String>,
    checks: Vec<PropertyCheck>,
}

fn timed<R>(label: &str, f: impl FnOnce() -> R) -> R {
    let start = Instant::now();
    let out = f();
    eprintln!("{label}: {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
    out
}

fn run_region(args: &RegionArgs) -> Result<i32> {
    let ch = load_channel(&args.channel)?;
    let step = args.grid_step;
    let (very_strong_region, very_strong) =
        timed("very-strong sweep", || very_strong_capacity_region(&ch, step))?;
    let (strong_region, strong) = timed("strong sweep", || strong_capacity_region(&ch, step))?;
    let sato = timed("sato outer bound", || sato_outer_region(&ch, step))?;
    let family = default_hk_family(&ch, step)?;
    let hk = timed("rate-split inner bound", || hk_region(&ch, &family))?;
    let sd_rs = timed("simultaneous-decoding points", || sd_rs_region(&ch, &family))?;
    let successive = timed("successive-decoding points", || successive_region(&ch, step))?;

    let mut regions = BTreeMap::new();
    let mut insert = |name: &str, vertices: &[RatePoint]| {
        regions.insert(name.to_string(), vertices.to_vec());
    };
    insert("sato-outer", sato.vertices());
    insert("hk-inner", hk.vertices());
    insert("sd-rs-inner", sd_rs.vertices());
    insert("successive-inner", successive.vertices());
    if very_strong.verdict == Verdict::Holds {
        insert("very-strong-capacity", very_strong_region.vertices());
    }
    if strong.verdict == Verdict::Holds {
        insert("strong-capacity", strong_region.vertices());
    }

    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        for (name, vertices) in &regions {
            report::write_vertex_csv(&dir.join(format!("region-{name}.csv")), vertices)?;
        }
        std::fs::write(dir.join("regions.svg"), svg::render_regions(&regions))?;
    }
    let body = RegionReport {
        channel: ChannelSummary::of(&ch),
        grid_step: step,
        hk_family_size: family.len(),
        very_strong,
        strong,
        regions,
    };
    report::emit(&body, args.out.as_deref(), "region")?;
    Ok(0)
}

fn run_classify(args: &ClassifyArgs) -> Result<i32> {
    let ch = load_channel(&args.channel)?;
    let very_strong = timed("very-strong sweep", || classify_very_strong(&ch, args.grid_step))?;
    let strong = timed("strong sweep", || classify_strong(&ch, args.grid_step))?;
    let body = ClassifyReport {
        channel: ChannelSummary::of(&ch),
        grid_step: args.grid_step,
        very_strong,
        strong,
    };
    report::emit(&body, args.out.as_deref(), "classify")?;
    Ok(0)
}

fn parse_distribution(text: &str, expected: usize, which: &str) -> Result<Distribution> {
    let probs = text
        .split(',')
        .map(|part| f64::from_str(part.trim()))
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|e| Error::InvalidArgument(format!("{which}: {e}")))?;
    if probs.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "{which} needs {expected} probabilities, got {}",
            probs.len()
        )));
    }
    Distribution::new(probs)
}

fn run_simulate(args: &SimulateArgs) -> Result<i32> {
    let ch = load_channel(&args.channel)?;
    let receiver = match args.receiver {
        1 => Receiver::One,
        2 => Receiver::Two,
        other => {
            return Err(Error::InvalidArgument(format!(
                "receiver must be 1 or 2, got {other}"
            )))
        }
    };
    let mac = induced_mac(&ch, receiver)?;
    let p1 = match &args.p1 {
        Some(text) => parse_distribution(text, mac.x1().size(), "--p1")?,
        None => Distribution::uniform(mac.x1().size()),
    };
    let p2 = match &args.p2 {
        Some(text) => parse_distribution(text, mac.x2().size(), "--p2")?,
        None => Distribution::uniform(mac.x2().size()),
    };
    let decoder = DecoderConfig {
        mac,
        p1: p1.clone(),
        p2: p2.clone(),
        n: args.blocklength,
        r1: args.rate1,
        r2: args.rate2,
        delta: args.delta,
    };
    decoder.validate()?;
    let sim = SimulationConfig { decoder, samples: args.samples, seed: args.seed };
    let outcome = timed("decoding simulation", || run_simulation(&sim))?;
    let first_book = sample_codebook(&sim.decoder, args.seed, 0)?;
    let first_povm = srm_povm(&sim.decoder, &first_book)?;
    let first_sample_breakdown = error_breakdown(&sim.decoder, &first_book, &first_povm)?;
    let body = SimulateReport {
        channel: ChannelSummary::of(&ch),
        receiver: args.receiver,
        blocklength: args.blocklength,
        rate1: args.rate1,
        rate2: args.rate2,
        delta: args.delta,
        seed: args.seed,
        p1: p1.probs().to_vec(),
        p2: p2.probs().to_vec(),
        outcome,
        first_sample_breakdown,
    };
    report::emit(&body, args.out.as_deref(), "simulate")?;
    Ok(0)
}

fn run_properties(args: &PropertiesArgs) -> Result<i32> {
    let checks = run_property_suite(args.seed, args.inject_fault.as_deref())?;
    let ok = all_passed(&checks);
    let body = PropertiesReport {
        seed: args.seed,
        injected_fault: args.inject_fault.clone(),
        checks,
    };
    report::emit(&body, args.out.as_deref(), "properties")?;
    Ok(if ok { 0 } else { 4 })
}

fn run(command: &Command) -> Result<i32> {
    match command {
        Command::Region(args) => run_region(args),
        Command::Classify(args) => run_classify(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Properties(args) => run_properties(args),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::GuardExceeded { .. } => 3,
        _ => 2,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            exit(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: could not configure {threads} threads: {err}");
            exit(2);
        }
    }
    match run(&cli.command) {
        Ok(code) => exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            exit(exit_code_for(&err));
        }
    }
}
