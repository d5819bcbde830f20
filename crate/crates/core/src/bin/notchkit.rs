use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use notchkit::io::{write_response_csv, write_spectrum_csv};
use notchkit::pipeline::{
    cmd_acoustics, cmd_analyze, cmd_design, cmd_filter, cmd_spectrum, AcousticsArgs, AnalyzeArgs,
    DesignArgs, EngineKind, FilterArgs, SpectrumArgs, DEFAULT_FFT_SIZE, DEFAULT_SWEEP_POINTS,
};
use notchkit::{EngineConfig, Error, Rounding, DEFAULT_POLE_RADIUS, DEFAULT_SAMPLE_RATE};

/// Notch filter design, analysis and fixed-point filtering.
#[derive(Parser)]
#[command(name = "notchkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design notch sections and write a coefficient file.
    Design {
        /// Notch frequency in Hz; repeat for a cascade.
        #[arg(long = "notch", required = true)]
        notches: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
        fs: f64,
        /// Pole radius.
        #[arg(long, default_value_t = DEFAULT_POLE_RADIUS)]
        r: f64,
        #[arg(long, default_value_t = 15)]
        fraction_bits: u32,
        /// floor, nearest-even, nearest-away or toward-zero.
        #[arg(long, default_value = "floor")]
        rounding: Rounding,
        /// Scale each section to unit gain at DC.
        #[arg(long)]
        unity_dc: bool,
        /// Coefficient file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a coefficient file and measure its notches.
    Analyze {
        coefficients: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SWEEP_POINTS)]
        points: usize,
        /// Analyze the quantized words.
        #[arg(long)]
        quantized: bool,
        /// Response CSV; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filter a mono 16-bit WAV file.
    Filter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        coefficients: PathBuf,
        #[arg(long, default_value = "fixed")]
        engine: EngineKind,
        /// Fraction bits kept in the feedback registers of the fixed engine.
        #[arg(long, default_value_t = EngineConfig::default().feedback_frac_bits)]
        feedback_frac_bits: u32,
        #[arg(long)]
        output: PathBuf,
    },
    /// Averaged magnitude spectrum of a WAV file.
    Spectrum {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FFT_SIZE)]
        n_fft: usize,
        /// Spectrum CSV; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find insulation dips and design notches for them.
    Acoustics {
        /// Insulation CSV with columns freq_hz, r_db.
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
        fs: f64,
        #[arg(long, default_value_t = DEFAULT_POLE_RADIUS)]
        r: f64,
        #[arg(long, default_value_t = 15)]
        fraction_bits: u32,
        #[arg(long, default_value = "floor")]
        rounding: Rounding,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cmd: Command) -> notchkit::Result<()> {
    let mut stdout = io::stdout().lock();
    match cmd {
        Command::Design {
            notches,
            fs,
            r,
            fraction_bits,
            rounding,
            unity_dc,
            out,
        } => {
            let to_stdout = out.is_none();
            let report = cmd_design(&DesignArgs {
                notches,
                sample_rate: fs,
                pole_radius: r,
                fraction_bits,
                rounding,
                unity_dc,
                out,
            })?;
            if to_stdout {
                write!(stdout, "{}", report.file.render())?;
            } else {
                write!(stdout, "{report}")?;
            }
        }
        Command::Analyze {
            coefficients,
            points,
            quantized,
            out,
        } => {
            let to_stdout = out.is_none();
            let report = cmd_analyze(&AnalyzeArgs {
                coefficients,
                n_points: points,
                quantized,
                out,
            })?;
            if to_stdout {
                write_response_csv(&report.curve, &mut stdout)?;
            } else {
                write!(stdout, "{report}")?;
            }
        }
        Command::Filter {
            input,
            coefficients,
            engine,
            feedback_frac_bits,
            output,
        } => {
            let report = cmd_filter(&FilterArgs {
                input,
                coefficients,
                engine,
                engine_config: EngineConfig { feedback_frac_bits },
                output,
            })?;
            write!(stdout, "{report}")?;
        }
        Command::Spectrum { input, n_fft, out } => {
            let to_stdout = out.is_none();
            let curve = cmd_spectrum(&SpectrumArgs { input, n_fft, out })?;
            if to_stdout {
                write_spectrum_csv(&curve, &mut stdout)?;
            }
        }
        Command::Acoustics {
            input,
            fs,
            r,
            fraction_bits,
            rounding,
            out,
        } => {
            let report = cmd_acoustics(&AcousticsArgs {
                input,
                sample_rate: fs,
                pole_radius: r,
                fraction_bits,
                rounding,
                out,
            })?;
            write!(stdout, "{report}")?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
