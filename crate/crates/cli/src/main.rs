use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::CliError;

/// Adaptive chaos/fuzzy grayscale image cipher.
///
/// Exit codes: 0 success, 2 bad input, 3 bad key file, 4 internal error,
/// 5 integrity failure, 6 dimension mismatch, 7 invalid fuzzy-system config.
#[derive(Parser, Debug)]
#[command(name = "acfz", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a fresh 64-byte master key.
    Keygen {
        /// Destination file.
        #[arg(short, long)]
        out: PathBuf,
        /// Derive the key from this seed instead of the OS random source (tests only).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a grayscale image (PGM P5 or 8-bit grayscale PNG).
    Encrypt {
        #[arg(short, long)]
        input: PathBuf,
        /// 64-byte master key file.
        #[arg(short, long)]
        key: PathBuf,
        /// Cipher container to write.
        #[arg(short, long)]
        out: PathBuf,
        /// 130-byte decryption key to write.
        #[arg(short, long)]
        deckey: PathBuf,
        #[command(flatten)]
        chaos: ChaosArgs,
        #[command(flatten)]
        gate: GateArgs,
    },
    /// Decrypt a cipher container with its decryption key.
    Decrypt {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        deckey: PathBuf,
        /// Recovered image (always PGM).
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        chaos: ChaosArgs,
    },
    /// Security report for one image, plus NPCR/UACI against a second one.
    Analyze {
        /// Image or cipher container.
        image: PathBuf,
        /// Second image or container of the same size.
        other: Option<PathBuf>,
        /// Writes PREFIX.txt, PREFIX.json and PREFIX.hist.csv.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a fuzzy system and show every rule's firing strength.
    Fis {
        /// Configuration document; defaults to the built-in system.
        #[arg(short, long, conflicts_with = "builtin")]
        config: Option<PathBuf>,
        #[arg(short, long, value_enum, default_value_t = Builtin::Fis1)]
        builtin: Builtin,
        /// Print the configuration document instead of evaluating.
        #[arg(long)]
        dump: bool,
        /// Inputs as NAME=VALUE.
        #[arg(value_parser = parse_assignment)]
        inputs: Vec<(String, f64)>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Builtin {
    Fis1,
    Fis2,
}

#[derive(Args, Debug, Clone)]
struct ChaosArgs {
    /// Tent-map parameter, in (0, 2).
    #[arg(long, default_value_t = acfz::chaos::DEFAULT_MU)]
    mu: f64,
    /// Map iterations discarded before each stream.
    #[arg(long, default_value_t = acfz::chaos::DEFAULT_BURN_IN)]
    burn_in: usize,
}

#[derive(Args, Debug, Clone)]
struct GateArgs {
    /// Requested security level, 0-100.
    #[arg(long, default_value_t = acfz::phase2::DEFAULT_SEC)]
    sec: f64,
    /// AES-Chaos runs when S-Dive falls below this.
    #[arg(long, default_value_t = acfz::phase2::DEFAULT_T1)]
    t1: f64,
    /// XOR-by-hash repeats while D-Dive stays below this.
    #[arg(long, default_value_t = acfz::phase2::DEFAULT_T2)]
    t2: f64,
    /// Replacement for the built-in S-Dive system.
    #[arg(long)]
    fis1: Option<PathBuf>,
    /// Replacement for the built-in D-Dive system.
    #[arg(long)]
    fis2: Option<PathBuf>,
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((name.trim().to_string(), value))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Keygen { out, seed } => commands::keygen(&out, seed),
        Command::Encrypt {
            input,
            key,
            out,
            deckey,
            chaos,
            gate,
        } => {
            let config = commands::run_config(
                chaos.mu,
                chaos.burn_in,
                gate.sec,
                gate.t1,
                gate.t2,
                gate.fis1.as_deref(),
                gate.fis2.as_deref(),
            )?;
            commands::encrypt(&input, &key, &out, &deckey, &config)
        }
        Command::Decrypt {
            input,
            deckey,
            out,
            chaos,
        } => commands::decrypt(&input, &deckey, &out, chaos.mu, chaos.burn_in),
        Command::Analyze { image, other, out } => {
            commands::analyze(&image, other.as_deref(), out.as_deref())
        }
        Command::Fis {
            config,
            builtin,
            dump,
            inputs,
        } => {
            let fis = match config {
                Some(path) => commands::load_fis(&path)?,
                None => match builtin {
                    Builtin::Fis1 => acfz::fis::fis1_default(),
                    Builtin::Fis2 => acfz::fis::fis2_default(),
                },
            };
            commands::fis(&fis, dump, &inputs)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
