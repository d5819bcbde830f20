//! Bit-exact model of the lookup-table IIR datapath.
//!
//! Each section holds its delay line in clocked registers and replaces every
//! multiplier with a 256-entry product table indexed by an 8-bit operand. A
//! notch section (`a0 = a2 = 1`) needs three tables (a1, b1, b2); the
//! feedforward taps on `x[n]` and `x[n-2]` are plain shifts into the adder:
//!
//! ```text
//! acc = ((x + x2) << C) + lut_a1[x1] - lut_b1[y1] - lut_b2[y2]
//! ```
//!
//! where `C` is the coefficient fraction width (15). The output register is
//! `acc >> C`, rounded to nearest with ties away from zero and saturated.
//!
//! The y registers carry `feedback_frac_bits` (F) bits below the 8-bit output
//! LSB. A wide feedback word is multiplied with two table lookups, one for its
//! signed integer byte and one for its unsigned fraction bits, combined by
//! shift-and-add. With F = 0 the registers are plain 8-bit samples and each
//! feedback product is a single lookup.

use crate::design::Cascade;
use crate::quantize::QuantizedBiquad;
use crate::{Error, Result};

pub const SAMPLE_MIN: i8 = i8::MIN;
pub const SAMPLE_MAX: i8 = i8::MAX;

/// Widest coefficient word a product table accepts.
pub const LUT_WORD_BITS: u32 = 17;

/// Upper bound on the accumulator magnitude, in bits including sign.
/// Holds for 17-bit words, 8-bit samples and F <= 8.
pub const ACCUMULATOR_BITS: u32 = 40;

/// Largest supported number of feedback fraction bits.
pub const MAX_FEEDBACK_FRAC_BITS: u32 = 8;

/// Products of one coefficient word with every 8-bit operand.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiplierLut {
    word: i64,
    /// `signed[s as u8] = s * word` for `s` in -128..=127.
    signed: [i64; 256],
    /// `fraction[u] = u * word` for `u` in 0..=255.
    fraction: [i64; 256],
}

impl std::fmt::Debug for MultiplierLut {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierLut").field("word", &self.word).finish()
    }
}

/// Builds the product tables for a coefficient word (17-bit signed).
pub fn build_lut(coefficient_word: i64) -> Result<MultiplierLut> {
    let limit = 1i64 << (LUT_WORD_BITS - 1);
    if coefficient_word.abs() >= limit {
        return Err(Error::Range(format!(
            "coefficient word {coefficient_word} does not fit {LUT_WORD_BITS} signed bits"
        )));
    }
    let mut signed = [0i64; 256];
    let mut fraction = [0i64; 256];
    for s in i8::MIN..=i8::MAX {
        signed[s as u8 as usize] = s as i64 * coefficient_word;
    }
    for (u, slot) in fraction.iter_mut().enumerate() {
        *slot = u as i64 * coefficient_word;
    }
    Ok(MultiplierLut {
        word: coefficient_word,
        signed,
        fraction,
    })
}

impl MultiplierLut {
    pub fn word(&self) -> i64 {
        self.word
    }

    /// Table entry for a signed 8-bit operand.
    #[inline]
    pub fn entry(&self, s: i8) -> i64 {
        self.signed[s as u8 as usize]
    }

    /// Product with a register word carrying `frac_bits` fraction bits,
    /// scaled by `2^frac_bits`.
    #[inline]
    pub fn wide_product(&self, w: i32, frac_bits: u32) -> i64 {
        let hi = (w >> frac_bits) as i8;
        let lo = (w & ((1 << frac_bits) - 1)) as usize;
        (self.entry(hi) << frac_bits) + self.fraction[lo]
    }
}

/// Engine-wide datapath options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub feedback_frac_bits: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            feedback_frac_bits: 8,
        }
    }
}

impl EngineConfig {
    /// Pure 8-bit datapath: y is requantized to the output width before
    /// feedback.
    pub fn eight_bit_feedback() -> Self {
        Self {
            feedback_frac_bits: 0,
        }
    }
}

/// Delay registers and last accumulator value of one section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineState {
    pub x1: i8,
    pub x2: i8,
    /// y[n-1] in units of `2^-feedback_frac_bits` output LSBs.
    pub y1: i32,
    pub y2: i32,
    pub accumulator: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
enum Feedforward {
    /// a0 = a2 = 1, wired as shifts.
    Simplified { a1: MultiplierLut },
    General {
        a0: MultiplierLut,
        a1: MultiplierLut,
        a2: MultiplierLut,
    },
}

/// One datapath section: product tables plus registers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionEngine {
    feedforward: Feedforward,
    b1: MultiplierLut,
    b2: MultiplierLut,
    coef_bits: u32,
    feedback_frac_bits: u32,
    state: EngineState,
    saturations: u64,
    peak_accumulator: i64,
}

/// Rounds `v / 2^s` to nearest, ties away from zero.
#[inline]
fn round_shift(v: i64, s: u32) -> i64 {
    if s == 0 {
        return v;
    }
    let half = 1i64 << (s - 1);
    if v >= 0 {
        (v + half) >> s
    } else {
        -((-v + half) >> s)
    }
}

impl SectionEngine {
    pub fn new(q: &QuantizedBiquad, config: EngineConfig) -> Result<Self> {
        if config.feedback_frac_bits > MAX_FEEDBACK_FRAC_BITS {
            return Err(Error::Domain(format!(
                "feedback_frac_bits {} exceeds {MAX_FEEDBACK_FRAC_BITS}",
                config.feedback_frac_bits
            )));
        }
        let feedforward = if q.is_simplified() {
            Feedforward::Simplified {
                a1: build_lut(q.a1)?,
            }
        } else {
            Feedforward::General {
                a0: build_lut(q.a0)?,
                a1: build_lut(q.a1)?,
                a2: build_lut(q.a2)?,
            }
        };
        Ok(Self {
            feedforward,
            b1: build_lut(q.b1)?,
            b2: build_lut(q.b2)?,
            coef_bits: q.format.fraction_bits,
            feedback_frac_bits: config.feedback_frac_bits,
            state: EngineState::default(),
            saturations: 0,
            peak_accumulator: 0,
        })
    }

    /// Number of product tables the section uses.
    pub fn multiplier_count(&self) -> usize {
        match self.feedforward {
            Feedforward::Simplified { .. } => 3,
            Feedforward::General { .. } => 5,
        }
    }

    pub fn state(&self) -> EngineState {
        self.state
    }

    pub fn set_state(&mut self, state: EngineState) {
        self.state = state;
    }

    /// Saturation events since construction or the last [`clear_stats`](Self::clear_stats).
    pub fn saturations(&self) -> u64 {
        self.saturations
    }

    /// Largest `|accumulator|` seen since the last stats reset.
    pub fn peak_accumulator(&self) -> i64 {
        self.peak_accumulator
    }

    pub fn clear_stats(&mut self) {
        self.saturations = 0;
        self.peak_accumulator = 0;
    }

    /// Zeroes the registers and the statistics.
    pub fn reset(&mut self) {
        self.state = EngineState::default();
        self.clear_stats();
    }

    /// Clocks one sample through the section.
    pub fn step(&mut self, x: i8) -> i8 {
        let c = self.coef_bits;
        let f = self.feedback_frac_bits;
        let st = self.state;

        let ff = match &self.feedforward {
            Feedforward::Simplified { a1 } => ((x as i64 + st.x2 as i64) << c) + a1.entry(st.x1),
            Feedforward::General { a0, a1, a2 } => {
                a0.entry(x) + a1.entry(st.x1) + a2.entry(st.x2)
            }
        };
        let acc = (ff << f) - self.b1.wide_product(st.y1, f) - self.b2.wide_product(st.y2, f);
        debug_assert!(acc.unsigned_abs() < 1u64 << (ACCUMULATOR_BITS - 1));

        let reg_min = (SAMPLE_MIN as i64) << f;
        let reg_max = (SAMPLE_MAX as i64) << f;
        let unclamped = round_shift(acc, c);
        let y_reg = unclamped.clamp(reg_min, reg_max);
        if y_reg != unclamped {
            self.saturations += 1;
        }
        self.peak_accumulator = self.peak_accumulator.max(acc.abs());

        self.state = EngineState {
            x1: x,
            x2: st.x1,
            y1: y_reg as i32,
            y2: st.y1,
            accumulator: acc,
        };
        // y_reg <= 127 << f, so the rounded output stays in range
        round_shift(y_reg, f) as i8
    }
}

/// Per-run statistics of a cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub samples: usize,
    pub saturations: Vec<u64>,
    pub peak_accumulator: Vec<i64>,
}

impl RunReport {
    pub fn total_saturations(&self) -> u64 {
        self.saturations.iter().sum()
    }
}

/// Streams samples through the sections in order; section `i`'s output feeds
/// section `i + 1` within the same sample period.
///
/// Register state carries over between calls; statistics cover this call only.
pub fn run(engines: &mut [SectionEngine], samples: &[i8]) -> (Vec<i8>, RunReport) {
    engines.iter_mut().for_each(SectionEngine::clear_stats);
    let out = samples
        .iter()
        .map(|&x| engines.iter_mut().fold(x, |v, e| e.step(v)))
        .collect();
    let report = RunReport {
        samples: samples.len(),
        saturations: engines.iter().map(|e| e.saturations).collect(),
        peak_accumulator: engines.iter().map(|e| e.peak_accumulator).collect(),
    };
    (out, report)
}

/// A cascade of datapath sections built from quantized biquads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointCascade {
    sections: Vec<SectionEngine>,
}

impl FixedPointCascade {
    pub fn new(sections: &[QuantizedBiquad], config: EngineConfig) -> Result<Self> {
        if sections.is_empty() {
            return Err(Error::Domain("a cascade needs at least one section".into()));
        }
        Ok(Self {
            sections: sections
                .iter()
                .map(|q| SectionEngine::new(q, config))
                .collect::<Result<_>>()?,
        })
    }

    pub fn sections(&self) -> &[SectionEngine] {
        &self.sections
    }

    pub fn run(&mut self, samples: &[i8]) -> (Vec<i8>, RunReport) {
        run(&mut self.sections, samples)
    }

    pub fn reset(&mut self) {
        self.sections.iter_mut().for_each(SectionEngine::reset);
    }
}

/// Double-precision direct-form-I reference, section by section.
pub fn run_reference(cascade: &Cascade, samples: &[f64]) -> Vec<f64> {
    let mut signal = samples.to_vec();
    for s in cascade.sections() {
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        for v in signal.iter_mut() {
            let x = *v;
            let y = s.a0 * x + s.a1 * x1 + s.a2 * x2 - s.b1 * y1 - s.b2 * y2;
            x2 = x1;
            x1 = x;
            y2 = y1;
            y1 = y;
            *v = y;
        }
    }
    signal
}

/// 16-bit PCM sample to the 8-bit datapath width: arithmetic shift right by 8
/// with round-half-away, saturated.
pub fn sample_to_datapath(v: i16) -> i8 {
    round_shift(v as i64, 8).clamp(SAMPLE_MIN as i64, SAMPLE_MAX as i64) as i8
}

/// 8-bit datapath sample back to 16-bit PCM.
pub fn sample_from_datapath(v: i8) -> i16 {
    (v as i16) << 8
}
