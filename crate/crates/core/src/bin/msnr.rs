use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use msnr_core::channel::Snr;
use msnr_core::harness::{self, DemoConfig, SweepSpec};
use msnr_core::msnr::{self, MovingAverageSpec};
use msnr_core::siggen::{self, BitVector, Modulation, ModulationSpec};
use msnr_core::{eval, io, Error, Result, Signals};

/// Maximum-SNR blind source separation toolkit.
#[derive(Parser, Debug)]
#[command(name = "msnr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one modulated source waveform as CSV.
    Gen(GenArgs),
    /// Run the two-source QPSK + OOK separation demo.
    Demo(DemoArgs),
    /// Separate a mixture CSV.
    Separate(SeparateArgs),
    /// Run an (L, SNR) sweep from a JSON config.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    modulation: Modulation,
    /// Explicit bit string, e.g. 0110.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    bits: Option<String>,
    /// Number of random bits.
    #[arg(long)]
    random: Option<usize>,
    /// Samples per symbol [default: 200 for qpsk, 100 for ook].
    #[arg(long)]
    sps: Option<usize>,
    /// Carrier cycles per QPSK symbol.
    #[arg(long, default_value_t = 4)]
    cycles: u32,
    #[arg(long, default_value_t = 1.0)]
    amp: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30.0, conflicts_with = "no_noise", allow_hyphen_values = true)]
    snr_db: f64,
    #[arg(long)]
    no_noise: bool,
    #[arg(long, default_value_t = 7)]
    ma_len: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct SeparateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 7)]
    ma_len: usize,
    #[arg(long)]
    output: PathBuf,
    /// Per-output diagnostics CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Reference sources; enables alignment scoring.
    #[arg(long)]
    sources: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn gen(args: GenArgs) -> Result<()> {
    let bits: BitVector = match (&args.bits, args.random) {
        (Some(s), _) => s.parse()?,
        (None, Some(n)) => siggen::random_bits(n, args.seed)?,
        (None, None) => return Err(Error::InvalidInput("one of --bits or --random is required".into())),
    };
    let (sps, cycles) = match args.modulation {
        Modulation::Qpsk => (args.sps.unwrap_or(200), args.cycles),
        Modulation::Ook => (args.sps.unwrap_or(100), 0),
    };
    let spec = ModulationSpec::new(args.modulation, sps, cycles, args.amp)?;
    let signal = siggen::modulate(&bits, &spec)?;
    io::store_signals(&signal, &args.out)
}

fn demo(args: DemoArgs) -> Result<()> {
    let cfg = DemoConfig {
        seed: args.seed,
        snr: if args.no_noise { Snr::Noiseless } else { Snr::from_db(args.snr_db) },
        ma_length: args.ma_len,
    };
    let run = harness::run_demo(&cfg, &args.out_dir)?;
    println!(
        "mean_corr={} per_source={:?} assignment={:?}",
        run.report.mean_corr, run.report.per_source_corr, run.report.assignment
    );
    Ok(())
}

fn separate(args: SeparateArgs) -> Result<()> {
    let ma = MovingAverageSpec::new(args.ma_len)?;
    let x: Signals = io::load_signals(&args.input).map_err(|e| Error::Stage {
        stage: "load",
        source: Box::new(e),
    })?;
    let solution = msnr::solve_demixing(&x, ma)?;
    let y = msnr::apply_demixing(&solution.demixing, &x)?;
    io::store_signals(&y, &args.output)?;

    let alignment = match &args.sources {
        Some(path) => {
            let s: Signals = io::load_signals(path)?;
            let rep = eval::align(&s, &y)?;
            println!("mean_corr={} per_source={:?} assignment={:?}", rep.mean_corr, rep.per_source_corr, rep.assignment);
            Some(rep)
        }
        None => None,
    };
    if let Some(path) = &args.report {
        let f = std::fs::File::create(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        harness::write_output_report(&solution, alignment.as_ref(), std::io::BufWriter::new(f))?;
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let spec = SweepSpec::load(&args.config)?;
    let records = harness::run_sweep_to_file(&spec, &args.out)?;
    let failed = records.iter().filter(|r| r.outcome.is_err()).count();
    println!("{} records written to {} ({failed} failed cells)", records.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Demo(a) => demo(a),
        Command::Separate(a) => separate(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
