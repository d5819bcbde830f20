//! The command pipeline behind the `notchkit` binary.
//!
//! Each `cmd_*` function performs one subcommand, writes its output files and
//! returns a report whose `Display` is the text printed to the terminal.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::acoustics::{find_dips, notch_specs_from_dips, DipReport};
use crate::design::{design_notch, Cascade, NotchSpec};
use crate::engine::{run_reference, EngineConfig, FixedPointCascade, RunReport};
use crate::io::{
    read_insulation_csv, read_wav, write_response_csv, write_spectrum_csv, write_wav, AudioBuffer,
    CoefficientFile,
};
use crate::quantize::{FixedFormat, Rounding};
use crate::response::{check_stability, measure_notch, sweep, NotchMeasurement, ResponseCurve, StabilityReport};
use crate::spectrum::{spectrum, SpectrumCurve};
use crate::{Error, Result};

/// Response grid of 3701 points puts one point on every hertz at 7400 Hz.
pub const DEFAULT_SWEEP_POINTS: usize = 3701;

pub const DEFAULT_FFT_SIZE: usize = 1024;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn fmt_stability(f: &mut fmt::Formatter<'_>, label: &str, r: &StabilityReport) -> fmt::Result {
    let mags: Vec<String> = r.pole_magnitudes.iter().map(|m| format!("{m:.6}")).collect();
    writeln!(
        f,
        "{label}: {} (|poles| {})",
        if r.stable { "stable" } else { "UNSTABLE" },
        mags.join(", ")
    )
}

#[derive(Debug, Clone)]
pub struct DesignArgs {
    pub notches: Vec<f64>,
    pub sample_rate: f64,
    pub pole_radius: f64,
    pub fraction_bits: u32,
    pub rounding: Rounding,
    pub unity_dc: bool,
    pub out: Option<PathBuf>,
}

impl Default for DesignArgs {
    fn default() -> Self {
        Self {
            notches: Vec::new(),
            sample_rate: crate::DEFAULT_SAMPLE_RATE,
            pole_radius: crate::DEFAULT_POLE_RADIUS,
            fraction_bits: 15,
            rounding: Rounding::default(),
            unity_dc: false,
            out: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DesignReport {
    pub file: CoefficientFile,
    pub stability: Vec<StabilityReport>,
    pub written: Option<PathBuf>,
}

impl fmt::Display for DesignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, st) in self.file.sections.iter().zip(&self.stability) {
            let q = &s.quantized;
            writeln!(
                f,
                "notch {} Hz: a = [{}, {}, {}] b = [{}, {}] words = {:?}",
                s.notch_hz.map_or("?".into(), |n| n.to_string()),
                s.biquad.a0,
                s.biquad.a1,
                s.biquad.a2,
                s.biquad.b1,
                s.biquad.b2,
                q.words()
            )?;
            fmt_stability(f, "  quantized", st)?;
        }
        if let Some(p) = &self.written {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

fn design_file(
    specs: &[NotchSpec],
    sample_rate: f64,
    format: FixedFormat,
    unity_dc: bool,
) -> Result<CoefficientFile> {
    let sections = specs
        .iter()
        .map(|s| {
            let b = design_notch(s);
            let b = if unity_dc { b.with_unity_dc_gain()? } else { b };
            Ok((b, Some(s.notch_freq()), Some(s.pole_radius())))
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientFile::from_biquads(sample_rate, format, sections)
}

fn section_stability(file: &CoefficientFile) -> Vec<StabilityReport> {
    file.sections
        .iter()
        .map(|s| check_stability(&s.quantized.to_biquad()))
        .collect()
}

pub fn cmd_design(args: &DesignArgs) -> Result<DesignReport> {
    if args.notches.is_empty() {
        return Err(Error::Argument("at least one --notch is required".into()));
    }
    let format = FixedFormat::new(args.fraction_bits, args.rounding)
        .map_err(|e| Error::Argument(e.to_string()))?;
    let specs = args
        .notches
        .iter()
        .map(|&n| NotchSpec::new(n, args.sample_rate, args.pole_radius))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Argument(e.to_string()))?;
    let file = design_file(&specs, args.sample_rate, format, args.unity_dc)?;
    if let Some(p) = &args.out {
        file.write(p)?;
    }
    Ok(DesignReport {
        stability: section_stability(&file),
        file,
        written: args.out.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct AnalyzeArgs {
    pub coefficients: PathBuf,
    pub n_points: usize,
    /// Analyze the quantized words instead of the float coefficients.
    pub quantized: bool,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct AnalyzeReport {
    pub curve: ResponseCurve,
    pub stability: StabilityReport,
    pub notches: Vec<(f64, Option<NotchMeasurement>)>,
}

impl fmt::Display for AnalyzeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_stability(f, "cascade", &self.stability)?;
        for (n, m) in &self.notches {
            match m {
                Some(m) => writeln!(
                    f,
                    "notch {n} Hz: minimum at {} Hz, depth {:.2} dB, -3 dB bandwidth {:.2} Hz",
                    m.min_freq, m.depth_db, m.bandwidth_3db
                )?,
                None => writeln!(f, "notch {n} Hz: not measurable on this grid")?,
            }
        }
        Ok(())
    }
}

/// Notch frequency of a section whose zeros sit on the unit circle.
fn zero_frequency(s: &crate::io::SectionRecord, sample_rate: f64) -> Option<f64> {
    if let Some(n) = s.notch_hz {
        return Some(n);
    }
    let b = &s.biquad;
    if b.a0 == 0.0 || b.a2 != b.a0 || b.a1.abs() > 2.0 * b.a0.abs() {
        return None;
    }
    let theta = (-b.a1 / (2.0 * b.a0)).acos();
    Some(theta * sample_rate / (2.0 * std::f64::consts::PI))
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<AnalyzeReport> {
    let file = CoefficientFile::read(&args.coefficients)?;
    let filter: Cascade = if args.quantized {
        file.quantized_cascade()?
    } else {
        file.cascade()?
    };
    let stability = check_stability(&filter);
    if !stability.stable {
        let worst = stability.pole_magnitudes.iter().cloned().fold(0.0, f64::max);
        return Err(Error::Unstable(format!(
            "{}: pole magnitude {worst} is not inside the unit circle",
            args.coefficients.display()
        )));
    }
    let curve = sweep(&filter, file.sample_rate, args.n_points).map_err(|e| Error::Argument(e.to_string()))?;
    if let Some(p) = &args.out {
        write_response_csv(&curve, create(p)?)?;
    }
    let notches = file
        .sections
        .iter()
        .filter_map(|s| zero_frequency(s, file.sample_rate))
        .map(|n| (n, measure_notch(&curve, n).ok()))
        .collect();
    Ok(AnalyzeReport {
        curve,
        stability,
        notches,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineKind {
    Float,
    #[default]
    Fixed,
}

impl std::str::FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Self::Float),
            "fixed" => Ok(Self::Fixed),
            _ => Err(Error::Argument(format!("unknown engine '{s}' (float|fixed)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FilterArgs {
    pub input: PathBuf,
    pub coefficients: PathBuf,
    pub engine: EngineKind,
    pub engine_config: EngineConfig,
    pub output: PathBuf,
}

#[derive(Debug, Clone)]
pub struct FilterReport {
    pub engine: EngineKind,
    pub samples: usize,
    /// Peak absolute sample of input and output, 16-bit units.
    pub peak_in: i32,
    pub peak_out: i32,
    /// Output samples clipped to 16 bits (float engine).
    pub clipped: usize,
    /// Datapath statistics (fixed engine).
    pub run: Option<RunReport>,
}

fn dbfs(peak: i32) -> f64 {
    crate::response::to_db(peak as f64 / 32768.0)
}

impl fmt::Display for FilterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "engine: {:?}, samples: {}", self.engine, self.samples)?;
        writeln!(
            f,
            "peak in {:.2} dBFS, peak out {:.2} dBFS",
            dbfs(self.peak_in),
            dbfs(self.peak_out)
        )?;
        match &self.run {
            Some(r) => {
                for (i, (s, p)) in r.saturations.iter().zip(&r.peak_accumulator).enumerate() {
                    writeln!(f, "section {i}: saturations {s}, peak accumulator {p}")?;
                }
            }
            None => writeln!(f, "clipped samples: {}", self.clipped)?,
        }
        Ok(())
    }
}

fn peak(samples: &[i16]) -> i32 {
    samples.iter().map(|&s| (s as i32).abs()).max().unwrap_or(0)
}

pub fn cmd_filter(args: &FilterArgs) -> Result<FilterReport> {
    let file = CoefficientFile::read(&args.coefficients)?;
    let audio = read_wav(&args.input)?;
    if audio.sample_rate as f64 != file.sample_rate {
        return Err(Error::Format(format!(
            "{} is sampled at {} Hz but the filter was designed for {} Hz",
            args.input.display(),
            audio.sample_rate,
            file.sample_rate
        )));
    }
    let (out, clipped, run) = match args.engine {
        EngineKind::Float => {
            let c = file.cascade()?;
            if !check_stability(&c).stable {
                return Err(Error::Unstable("float cascade has a pole outside the unit circle".into()));
            }
            let y = run_reference(&c, &audio.to_f64());
            let (buf, clipped) = AudioBuffer::from_f64(audio.sample_rate, &y)?;
            (buf, clipped, None)
        }
        EngineKind::Fixed => {
            if !check_stability(&file.quantized_cascade()?).stable {
                return Err(Error::Unstable("quantized cascade has a pole outside the unit circle".into()));
            }
            let mut engine = FixedPointCascade::new(&file.quantized(), args.engine_config)?;
            let (y, report) = engine.run(&audio.to_datapath());
            (AudioBuffer::from_datapath(audio.sample_rate, &y)?, 0, Some(report))
        }
    };
    write_wav(&args.output, &out)?;
    Ok(FilterReport {
        engine: args.engine,
        samples: audio.samples.len(),
        peak_in: peak(&audio.samples),
        peak_out: peak(&out.samples),
        clipped,
        run,
    })
}

#[derive(Debug, Clone)]
pub struct SpectrumArgs {
    pub input: PathBuf,
    pub n_fft: usize,
    pub out: Option<PathBuf>,
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<SpectrumCurve> {
    let audio = read_wav(&args.input)?;
    let curve = spectrum(&audio.to_f64(), audio.sample_rate as f64, args.n_fft)?;
    if let Some(p) = &args.out {
        write_spectrum_csv(&curve, create(p)?)?;
    }
    Ok(curve)
}

#[derive(Debug, Clone)]
pub struct AcousticsArgs {
    pub input: PathBuf,
    pub sample_rate: f64,
    pub pole_radius: f64,
    pub fraction_bits: u32,
    pub rounding: Rounding,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct AcousticsReport {
    pub dips: DipReport,
    pub specs: Vec<NotchSpec>,
    /// `None` when no dips were found.
    pub file: Option<CoefficientFile>,
    pub written: Option<PathBuf>,
}

impl fmt::Display for AcousticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dips.is_empty() {
            return writeln!(f, "no dips found");
        }
        for (label, d) in [("resonance", self.dips.resonance), ("coincidence", self.dips.coincidence)] {
            if let Some(d) = d {
                writeln!(f, "{label} dip: {} Hz, {:.2} dB deep", d.freq, d.depth)?;
            }
        }
        for s in &self.specs {
            writeln!(
                f,
                "notch spec: {} Hz at fs {} Hz, r = {}",
                s.notch_freq(),
                s.sample_rate(),
                s.pole_radius()
            )?;
        }
        if let Some(p) = &self.written {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

pub fn cmd_acoustics(args: &AcousticsArgs) -> Result<AcousticsReport> {
    let format = FixedFormat::new(args.fraction_bits, args.rounding)
        .map_err(|e| Error::Argument(e.to_string()))?;
    let curve = read_insulation_csv(&args.input)?;
    let dips = find_dips(&curve);
    let specs = notch_specs_from_dips(&dips, args.sample_rate, args.pole_radius)?;
    if specs.is_empty() {
        return Ok(AcousticsReport {
            dips,
            specs,
            file: None,
            written: None,
        });
    }
    let file = design_file(&specs, args.sample_rate, format, false)?;
    if let Some(p) = &args.out {
        file.write(p)?;
    }
    Ok(AcousticsReport {
        dips,
        specs,
        file: Some(file),
        written: args.out.clone(),
    })
}
