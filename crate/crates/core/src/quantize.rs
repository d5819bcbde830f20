//! Fixed-point coefficient quantization, root drift and adder-input scaling.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::design::{Biquad, Cascade};
use crate::response::check_stability;
use crate::roots::{pair_roots, roots};
use crate::{Error, Result};

/// How a scaled coefficient is mapped onto the integer grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Round to nearest, ties to even.
    NearestEven,
    /// Round to nearest, ties away from zero.
    NearestAway,
    /// Drop the fraction toward zero.
    TowardZero,
    /// Drop the fraction toward negative infinity; two's-complement truncation.
    /// This is the mode that reproduces the reference 16-bit coefficient set.
    #[default]
    Floor,
}

impl Rounding {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Rounding::NearestEven => v.round_ties_even(),
            Rounding::NearestAway => v.round(),
            Rounding::TowardZero => v.trunc(),
            Rounding::Floor => v.floor(),
        }
    }

    /// Largest possible `|q(c) - c|` in units of one grid step.
    pub fn max_error_steps(self) -> f64 {
        match self {
            Rounding::NearestEven | Rounding::NearestAway => 0.5,
            Rounding::TowardZero | Rounding::Floor => 1.0,
        }
    }
}

impl fmt::Display for Rounding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rounding::NearestEven => "nearest-even",
            Rounding::NearestAway => "nearest-away",
            Rounding::TowardZero => "toward-zero",
            Rounding::Floor => "floor",
        })
    }
}

impl FromStr for Rounding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest-even" => Ok(Rounding::NearestEven),
            "nearest-away" | "nearest" => Ok(Rounding::NearestAway),
            "toward-zero" | "truncate" => Ok(Rounding::TowardZero),
            "floor" => Ok(Rounding::Floor),
            other => Err(Error::Argument(format!("unknown rounding mode '{other}'"))),
        }
    }
}

/// Signed fixed-point coefficient format.
///
/// Words are `word_bits` wide two's-complement integers and represent
/// `word * 2^-fraction_bits`. The default is 15 fraction bits in a 17-bit
/// word: the grid step is `2^-15`, and the extra integer bit is needed to hold
/// feedforward coefficients near ±2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedFormat {
    pub fraction_bits: u32,
    pub word_bits: u32,
    pub rounding: Rounding,
}

impl Default for FixedFormat {
    fn default() -> Self {
        Self {
            fraction_bits: 15,
            word_bits: 17,
            rounding: Rounding::Floor,
        }
    }
}

impl FixedFormat {
    /// Format with two integer bits (sign included), covering `[-2, 2)`.
    pub fn new(fraction_bits: u32, rounding: Rounding) -> Result<Self> {
        Self::with_word_bits(fraction_bits, fraction_bits + 2, rounding)
    }

    pub fn with_word_bits(fraction_bits: u32, word_bits: u32, rounding: Rounding) -> Result<Self> {
        if fraction_bits < 1 {
            return Err(Error::Domain("fraction_bits must be at least 1".into()));
        }
        if word_bits <= fraction_bits || word_bits > 62 {
            return Err(Error::Domain(format!(
                "word width {word_bits} cannot hold {fraction_bits} fraction bits"
            )));
        }
        Ok(Self {
            fraction_bits,
            word_bits,
            rounding,
        })
    }

    /// Grid step `2^-fraction_bits`.
    pub fn step(&self) -> f64 {
        (-(self.fraction_bits as f64)).exp2()
    }

    /// The word representing 1.0.
    pub fn one(&self) -> i64 {
        1i64 << self.fraction_bits
    }

    pub fn min_word(&self) -> i64 {
        -(1i64 << (self.word_bits - 1))
    }

    pub fn max_word(&self) -> i64 {
        (1i64 << (self.word_bits - 1)) - 1
    }

    /// Quantizes one value to a word.
    pub fn quantize_value(&self, c: f64) -> Result<i64> {
        if !c.is_finite() {
            return Err(Error::Range(format!("coefficient {c} is not finite")));
        }
        let scaled = self.rounding.apply(c * self.one() as f64);
        if scaled < self.min_word() as f64 || scaled > self.max_word() as f64 {
            return Err(Error::Range(format!(
                "coefficient {c} overflows a {}-bit word with {} fraction bits",
                self.word_bits, self.fraction_bits
            )));
        }
        Ok(scaled as i64)
    }

    pub fn to_real(&self, word: i64) -> f64 {
        word as f64 * self.step()
    }
}

/// Biquad with integer coefficient words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizedBiquad {
    pub a0: i64,
    pub a1: i64,
    pub a2: i64,
    pub b1: i64,
    pub b2: i64,
    pub format: FixedFormat,
}

impl QuantizedBiquad {
    /// True when `a0 = a2 = 1`, so the section maps onto the three-multiplier
    /// datapath.
    pub fn is_simplified(&self) -> bool {
        self.a0 == self.format.one() && self.a2 == self.format.one()
    }

    /// Real-valued view of the words.
    pub fn to_biquad(&self) -> Biquad {
        let f = &self.format;
        Biquad::new(
            f.to_real(self.a0),
            f.to_real(self.a1),
            f.to_real(self.a2),
            f.to_real(self.b1),
            f.to_real(self.b2),
        )
    }

    pub fn words(&self) -> [i64; 5] {
        [self.a0, self.a1, self.a2, self.b1, self.b2]
    }
}

/// Rounds every coefficient onto the format's grid.
pub fn quantize(filter: &Biquad, format: FixedFormat) -> Result<QuantizedBiquad> {
    Ok(QuantizedBiquad {
        a0: format.quantize_value(filter.a0)?,
        a1: format.quantize_value(filter.a1)?,
        a2: format.quantize_value(filter.a2)?,
        b1: format.quantize_value(filter.b1)?,
        b2: format.quantize_value(filter.b2)?,
        format,
    })
}

/// Displacement of poles and zeros caused by quantization.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    /// `(original, quantized)` pole pairs.
    pub poles: Vec<(Complex64, Complex64)>,
    /// `(original, quantized)` zero pairs.
    pub zeros: Vec<(Complex64, Complex64)>,
    pub max_pole_drift: f64,
    pub max_zero_drift: f64,
}

pub fn drift(original: &Biquad, quantized: &QuantizedBiquad) -> DriftReport {
    let q = quantized.to_biquad();
    let poles = pair_roots(&roots(&original.denominator()), &roots(&q.denominator()));
    let zeros = pair_roots(&roots(&original.numerator()), &roots(&q.numerator()));
    let max = |pairs: &[(Complex64, Complex64)]| {
        pairs
            .iter()
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    DriftReport {
        max_pole_drift: max(&poles),
        max_zero_drift: max(&zeros),
        poles,
        zeros,
    }
}

/// Default impulse-response length for [`scaling_factor`].
pub const DEFAULT_SCALING_TERMS: usize = 4096;

/// Truncated impulse responses smaller than this at the last term count as settled.
pub const SCALING_TAIL_BOUND: f64 = 1e-12;

/// L1-norm scaling of one section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionScale {
    /// `Σ |h[n]|` over the truncated impulse response.
    pub l1_norm: f64,
    /// Input scale `1 / l1_norm` that keeps the section output within the
    /// input's peak range.
    pub scale: f64,
    /// `|h[n_terms - 1]|`.
    pub tail: f64,
    /// Whether `tail` is below [`SCALING_TAIL_BOUND`].
    pub settled: bool,
}

/// Per-section L1 norms of the impulse response truncated at `n_terms`.
pub fn scaling_factor(filter: &Cascade, n_terms: usize) -> Result<Vec<SectionScale>> {
    if n_terms < 1 {
        return Err(Error::Domain("n_terms must be at least 1".into()));
    }
    filter
        .sections()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if !check_stability(s).stable {
                return Err(Error::Domain(format!(
                    "section {i} is unstable; its impulse response norm diverges"
                )));
            }
            let h = impulse_response(s, n_terms);
            let l1_norm: f64 = h.iter().map(|v| v.abs()).sum();
            let tail = h.last().map(|v| v.abs()).unwrap_or(0.0);
            Ok(SectionScale {
                l1_norm,
                scale: 1.0 / l1_norm,
                tail,
                settled: tail < SCALING_TAIL_BOUND,
            })
        })
        .collect()
}

fn impulse_response(s: &Biquad, n: usize) -> Vec<f64> {
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    (0..n)
        .map(|k| {
            let x = if k == 0 { 1.0 } else { 0.0 };
            let y = s.a0 * x + s.a1 * x1 + s.a2 * x2 - s.b1 * y1 - s.b2 * y2;
            x2 = x1;
            x1 = x;
            y2 = y1;
            y1 = y;
            y
        })
        .collect()
}
