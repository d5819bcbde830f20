//! Sound-insulation quantities and dip detection on insulation curves.

use crate::design::NotchSpec;
use crate::{Error, Result};

/// Dips below this frequency are wall-resonance candidates.
pub const RESONANCE_BAND_MAX: f64 = 1000.0;

/// Band in which coincidence dips occur, hertz (inclusive).
pub const COINCIDENCE_BAND: (f64, f64) = (1000.0, 4000.0);

/// Sabine constant in s/m.
const SABINE: f64 = 0.161;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// Equivalent absorption area `A = 0.161 V / T`, m².
pub fn absorption_area(volume: f64, reverberation_time: f64) -> Result<f64> {
    positive("volume", volume)?;
    positive("reverberation time", reverberation_time)?;
    Ok(SABINE * volume / reverberation_time)
}

/// Sound reduction `R = L1 - L2 + 10 log10(S / A)`, dB.
pub fn transmission_loss(l1: f64, l2: f64, area: f64, absorption: f64) -> Result<f64> {
    positive("partition area", area)?;
    positive("absorption area", absorption)?;
    Ok(l1 - l2 + 10.0 * (area / absorption).log10())
}

/// A two-room insulation measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoomMeasurement {
    /// Average level in the source room, dB SPL.
    pub l1: f64,
    /// Average level in the receiving room, dB SPL.
    pub l2: f64,
    /// Partition area, m².
    pub area: f64,
    /// Receiving room volume, m³.
    pub volume: f64,
    /// Receiving room reverberation time, s.
    pub reverberation_time: f64,
}

impl RoomMeasurement {
    pub fn absorption_area(&self) -> Result<f64> {
        absorption_area(self.volume, self.reverberation_time)
    }

    pub fn transmission_loss(&self) -> Result<f64> {
        transmission_loss(self.l1, self.l2, self.area, self.absorption_area()?)
    }
}

/// Sound reduction index against frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct InsulationCurve {
    points: Vec<(f64, f64)>,
}

impl InsulationCurve {
    /// Requires at least three points with positive, strictly increasing
    /// frequencies.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Domain(format!(
                "an insulation curve needs at least 3 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|&(f, r)| f.is_nan() || f <= 0.0 || !r.is_finite()) {
            return Err(Error::Domain("frequencies must be positive and levels finite".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain("frequencies must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// One detected insulation dip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip {
    pub freq: f64,
    /// Dip below the lower of the two flanking maxima, dB.
    pub depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DipReport {
    pub resonance: Option<Dip>,
    pub coincidence: Option<Dip>,
}

impl DipReport {
    /// Present dip frequencies, resonance first.
    pub fn frequencies(&self) -> Vec<f64> {
        [self.resonance, self.coincidence]
            .iter()
            .flatten()
            .map(|d| d.freq)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.resonance.is_none() && self.coincidence.is_none()
    }
}

/// Finds the deepest resonance dip below 1 kHz and the deepest coincidence
/// dip in 1–4 kHz.
///
/// A dip is an interior point strictly lower than both neighbours. Its depth
/// is measured to the nearest local maximum on each side (or the curve end)
/// and the smaller side counts.
pub fn find_dips(curve: &InsulationCurve) -> DipReport {
    let p = &curve.points;
    let mut dips = Vec::new();
    for i in 1..p.len() - 1 {
        let r = p[i].1;
        if !(p[i - 1].1 > r && p[i + 1].1 > r) {
            continue;
        }
        let mut left = i;
        while left > 0 && p[left - 1].1 >= p[left].1 {
            left -= 1;
        }
        let mut right = i;
        while right + 1 < p.len() && p[right + 1].1 >= p[right].1 {
            right += 1;
        }
        let depth = p[left].1.min(p[right].1) - r;
        dips.push(Dip { freq: p[i].0, depth });
    }

    let deepest = |lo: f64, hi: f64, hi_inclusive: bool| {
        dips.iter()
            .filter(|d| d.freq >= lo && (d.freq < hi || (hi_inclusive && d.freq == hi)))
            .copied()
            .max_by(|a, b| a.depth.total_cmp(&b.depth))
    };
    DipReport {
        resonance: deepest(0.0, RESONANCE_BAND_MAX, false),
        coincidence: deepest(COINCIDENCE_BAND.0, COINCIDENCE_BAND.1, true),
    }
}

/// One notch spec per detected dip.
pub fn notch_specs_from_dips(
    report: &DipReport,
    sample_rate: f64,
    pole_radius: f64,
) -> Result<Vec<NotchSpec>> {
    report
        .frequencies()
        .into_iter()
        .map(|f| {
            if f >= sample_rate / 2.0 {
                return Err(Error::Domain(format!(
                    "dip at {f} Hz is above the Nyquist frequency {} Hz",
                    sample_rate / 2.0
                )));
            }
            NotchSpec::new(f, sample_rate, pole_radius)
        })
        .collect()
}
