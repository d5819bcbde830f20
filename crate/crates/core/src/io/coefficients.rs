//! Plain-text coefficient files.
//!
//! ```text
//! # notchkit coefficients
//! sample_rate = 7400
//! fraction_bits = 15
//! word_bits = 17
//! rounding = floor
//!
//! [section]
//! notch_hz = 315
//! pole_radius = 0.99
//! a0 = 1.0000000000000000e0
//! a1 = -1.9288906139858450e0
//! a2 = 1.0000000000000000e0
//! b1 = -1.9096017078459866e0
//! b2 = 9.8009999999999997e-1
//! a0_q = 32768
//! a1_q = -63206
//! a2_q = 32768
//! b1_q = -62574
//! b2_q = 32115
//! ```
//!
//! Reals are written with 17 significant digits, so they read back exactly.
//! `#` starts a comment. Integer words are optional on input; missing words
//! are quantized from the reals with the file's format.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::design::{cascade, Biquad, Cascade};
use crate::quantize::{quantize, FixedFormat, QuantizedBiquad, Rounding};
use crate::response::check_stability;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SectionRecord {
    pub notch_hz: Option<f64>,
    pub pole_radius: Option<f64>,
    pub biquad: Biquad,
    pub quantized: QuantizedBiquad,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFile {
    pub sample_rate: f64,
    pub format: FixedFormat,
    pub sections: Vec<SectionRecord>,
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

impl CoefficientFile {
    /// Builds a file from float sections, quantizing each with `format`.
    pub fn from_biquads(
        sample_rate: f64,
        format: FixedFormat,
        sections: impl IntoIterator<Item = (Biquad, Option<f64>, Option<f64>)>,
    ) -> Result<Self> {
        let sections = sections
            .into_iter()
            .map(|(biquad, notch_hz, pole_radius)| {
                Ok(SectionRecord {
                    notch_hz,
                    pole_radius,
                    biquad,
                    quantized: quantize(&biquad, format)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if sections.is_empty() {
            return Err(Error::Domain("a coefficient file needs at least one section".into()));
        }
        Ok(Self {
            sample_rate,
            format,
            sections,
        })
    }

    pub fn cascade(&self) -> Result<Cascade> {
        cascade(self.sections.iter().map(|s| s.biquad).collect())
    }

    pub fn quantized_cascade(&self) -> Result<Cascade> {
        cascade(self.sections.iter().map(|s| s.quantized.to_biquad()).collect())
    }

    pub fn quantized(&self) -> Vec<QuantizedBiquad> {
        self.sections.iter().map(|s| s.quantized).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let f = &self.format;
        // writes into a String cannot fail
        let _ = writeln!(out, "# notchkit coefficients");
        let _ = writeln!(out, "sample_rate = {}", self.sample_rate);
        let _ = writeln!(out, "fraction_bits = {}", f.fraction_bits);
        let _ = writeln!(out, "word_bits = {}", f.word_bits);
        let _ = writeln!(out, "rounding = {}", f.rounding);
        for s in &self.sections {
            let b = &s.biquad;
            let q = &s.quantized;
            let _ = writeln!(out, "\n[section]");
            if let Some(n) = s.notch_hz {
                let _ = writeln!(out, "notch_hz = {n}");
            }
            if let Some(r) = s.pole_radius {
                let _ = writeln!(out, "pole_radius = {r}");
            }
            for (k, v) in [("a0", b.a0), ("a1", b.a1), ("a2", b.a2), ("b1", b.b1), ("b2", b.b2)] {
                let _ = writeln!(out, "{k} = {}", real(v));
            }
            for (k, v) in [("a0_q", q.a0), ("a1_q", q.a1), ("a2_q", q.a2), ("b1_q", q.b1), ("b2_q", q.b2)] {
                let _ = writeln!(out, "{k} = {v}");
            }
            for (label, filt) in [("float", *b), ("quantized", q.to_biquad())] {
                let r = check_stability(&filt);
                let mags: Vec<String> = r.pole_magnitudes.iter().map(|m| format!("{m:.9}")).collect();
                let _ = writeln!(
                    out,
                    "# {label}: stable = {}, |poles| = [{}]",
                    r.stable,
                    mags.join(", ")
                );
            }
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sample_rate = None;
        let mut fraction_bits = 15u32;
        let mut word_bits = None;
        let mut rounding = Rounding::default();
        let mut raw: Vec<(usize, RawSection)> = Vec::new();

        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line == "[section]" {
                raw.push((lineno, RawSection::default()));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let real = || -> Result<f64> {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("'{value}' is not a number for {key}")))
            };
            let int = || -> Result<i64> {
                value
                    .parse::<i64>()
                    .map_err(|_| err(format!("'{value}' is not an integer for {key}")))
            };
            match raw.last_mut() {
                None => match key {
                    "sample_rate" => sample_rate = Some(real()?),
                    "fraction_bits" => fraction_bits = int()? as u32,
                    "word_bits" => word_bits = Some(int()? as u32),
                    "rounding" => rounding = value.parse().map_err(|e: Error| err(e.to_string()))?,
                    _ => return Err(err(format!("unknown header key '{key}'"))),
                },
                Some((_, s)) => {
                    let slot_real = match key {
                        "notch_hz" => Some(&mut s.notch_hz),
                        "pole_radius" => Some(&mut s.pole_radius),
                        "a0" => Some(&mut s.reals[0]),
                        "a1" => Some(&mut s.reals[1]),
                        "a2" => Some(&mut s.reals[2]),
                        "b1" => Some(&mut s.reals[3]),
                        "b2" => Some(&mut s.reals[4]),
                        _ => None,
                    };
                    if let Some(slot) = slot_real {
                        *slot = Some(real()?);
                        continue;
                    }
                    let slot_word = match key {
                        "a0_q" => &mut s.words[0],
                        "a1_q" => &mut s.words[1],
                        "a2_q" => &mut s.words[2],
                        "b1_q" => &mut s.words[3],
                        "b2_q" => &mut s.words[4],
                        _ => return Err(err(format!("unknown section key '{key}'"))),
                    };
                    *slot_word = Some(int()?);
                }
            }
        }

        let sample_rate = sample_rate.ok_or(Error::Parse {
            line: 1,
            message: "missing sample_rate".into(),
        })?;
        if sample_rate.is_nan() || sample_rate <= 0.0 {
            return Err(Error::Parse {
                line: 1,
                message: format!("sample_rate {sample_rate} must be positive"),
            });
        }
        let word_bits = word_bits.unwrap_or(fraction_bits + 2);
        let format = FixedFormat::with_word_bits(fraction_bits, word_bits, rounding)
            .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
        if raw.is_empty() {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: "no [section] blocks".into(),
            });
        }

        let sections = raw
            .into_iter()
            .map(|(lineno, s)| s.finish(lineno, format))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sample_rate,
            format,
            sections,
        })
    }
}

#[derive(Default)]
struct RawSection {
    notch_hz: Option<f64>,
    pole_radius: Option<f64>,
    reals: [Option<f64>; 5],
    words: [Option<i64>; 5],
}

impl RawSection {
    fn finish(self, lineno: usize, format: FixedFormat) -> Result<SectionRecord> {
        const NAMES: [&str; 5] = ["a0", "a1", "a2", "b1", "b2"];
        let mut r = [0.0; 5];
        for (i, v) in self.reals.iter().enumerate() {
            r[i] = v.ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("section is missing {}", NAMES[i]),
            })?;
        }
        let biquad = Biquad::new(r[0], r[1], r[2], r[3], r[4]);
        let mut quantized = quantize(&biquad, format).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let slots = [
            &mut quantized.a0,
            &mut quantized.a1,
            &mut quantized.a2,
            &mut quantized.b1,
            &mut quantized.b2,
        ];
        for (slot, w) in slots.into_iter().zip(self.words) {
            if let Some(w) = w {
                if w < format.min_word() || w > format.max_word() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("word {w} does not fit {} bits", format.word_bits),
                    });
                }
                *slot = w;
            }
        }
        Ok(SectionRecord {
            notch_hz: self.notch_hz,
            pole_radius: self.pole_radius,
            biquad,
            quantized,
        })
    }
}
