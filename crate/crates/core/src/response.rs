//! Frequency response, stability and notch measurements.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::design::{Filter, PoleZeroSet};
use crate::roots::roots;
use crate::{Error, Result};

/// One evaluated frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint {
    pub freq: f64,
    pub magnitude: f64,
    /// `20 log10(magnitude)`, or `-inf` when the magnitude is exactly zero.
    pub magnitude_db: f64,
    /// Radians in (-π, π].
    pub phase: f64,
}

impl ResponsePoint {
    pub fn from_complex(freq: f64, h: Complex64) -> Self {
        let magnitude = h.norm();
        Self {
            freq,
            magnitude,
            magnitude_db: to_db(magnitude),
            phase: h.arg(),
        }
    }
}

pub(crate) fn to_db(magnitude: f64) -> f64 {
    if magnitude > 0.0 {
        20.0 * magnitude.log10()
    } else {
        f64::NEG_INFINITY
    }
}

/// Response samples on a uniform grid from DC to Nyquist.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub sample_rate: f64,
    pub points: Vec<ResponsePoint>,
}

impl ResponseCurve {
    /// Point with the smallest magnitude.
    pub fn minimum(&self) -> Option<&ResponsePoint> {
        self.points
            .iter()
            .min_by(|a, b| a.magnitude.total_cmp(&b.magnitude))
    }

    /// Median linear magnitude over all points.
    pub fn median_magnitude(&self) -> f64 {
        let mut m: Vec<f64> = self.points.iter().map(|p| p.magnitude).collect();
        m.sort_by(f64::total_cmp);
        let n = m.len();
        if n == 0 {
            return f64::NAN;
        }
        if n % 2 == 1 {
            m[n / 2]
        } else {
            0.5 * (m[n / 2 - 1] + m[n / 2])
        }
    }
}

fn unit_circle_point(freq: f64, sample_rate: f64) -> Result<Complex64> {
    let nyquist = sample_rate / 2.0;
    if sample_rate.is_nan() || sample_rate <= 0.0 || !(0.0..=nyquist).contains(&freq) {
        return Err(Error::Domain(format!(
            "frequency {freq} Hz outside [0, {nyquist}] Hz"
        )));
    }
    Ok(Complex64::from_polar(1.0, 2.0 * PI * freq / sample_rate))
}

/// Evaluates the polynomial ratio at `z = e^{jωT}`.
pub fn evaluate_polynomial<F: Filter + ?Sized>(
    filter: &F,
    freq: f64,
    sample_rate: f64,
) -> Result<ResponsePoint> {
    let z = unit_circle_point(freq, sample_rate)?;
    Ok(ResponsePoint::from_complex(freq, filter.transfer_at(z)))
}

/// Evaluates the response from vector lengths and angles in the z-plane:
/// magnitude `k ∏U / ∏V`, phase `ΣΘ - ΣΦ`.
pub fn evaluate_geometric(pz: &PoleZeroSet, freq: f64, sample_rate: f64) -> Result<ResponsePoint> {
    let z = unit_circle_point(freq, sample_rate)?;
    let mut magnitude = pz.gain.abs();
    let mut phase = if pz.gain < 0.0 { PI } else { 0.0 };
    for &q in &pz.zeros {
        let v = z - q;
        magnitude *= v.norm();
        phase += v.arg();
    }
    for &p in &pz.poles {
        let v = z - p;
        let len = v.norm();
        if len == 0.0 {
            return Err(Error::Singularity(format!(
                "{freq} Hz lies on the pole {p}"
            )));
        }
        magnitude /= len;
        phase -= v.arg();
    }
    Ok(ResponsePoint {
        freq,
        magnitude,
        magnitude_db: to_db(magnitude),
        phase: wrap_phase(phase),
    })
}

/// Wraps an angle into (-π, π].
pub fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Uniform sweep of `n_points` frequencies over `[0, fs/2]`.
pub fn sweep<F: Filter + ?Sized>(filter: &F, sample_rate: f64, n_points: usize) -> Result<ResponseCurve> {
    if n_points < 2 {
        return Err(Error::Domain(format!(
            "a sweep needs at least 2 points, got {n_points}"
        )));
    }
    let nyquist = sample_rate / 2.0;
    let step = nyquist / (n_points - 1) as f64;
    let points = (0..n_points)
        .map(|i| {
            let f = if i == n_points - 1 { nyquist } else { i as f64 * step };
            evaluate_polynomial(filter, f, sample_rate)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseCurve { sample_rate, points })
}

/// Pole magnitudes of every section and the overall verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub pole_magnitudes: Vec<f64>,
    /// True iff every pole magnitude is strictly below one.
    pub stable: bool,
}

pub fn check_stability<F: Filter + ?Sized>(filter: &F) -> StabilityReport {
    let pole_magnitudes: Vec<f64> = filter
        .denominators()
        .iter()
        .flat_map(|d| roots(d))
        .map(|p| p.norm())
        .collect();
    let stable = pole_magnitudes.iter().all(|&m| m < 1.0);
    StabilityReport {
        pole_magnitudes,
        stable,
    }
}

/// Depth and width of a notch read off a response curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchMeasurement {
    /// Grid frequency of the local minimum.
    pub min_freq: f64,
    /// Attenuation of the minimum below the passband reference, positive dB.
    pub depth_db: f64,
    /// Distance between the -3 dB crossings around the minimum, in hertz.
    pub bandwidth_3db: f64,
}

/// Locates the notch nearest `notch_freq` and measures it.
///
/// The passband reference is the median magnitude of the curve and the
/// -3 dB level is taken relative to it.
pub fn measure_notch(curve: &ResponseCurve, notch_freq: f64) -> Result<NotchMeasurement> {
    let pts = &curve.points;
    let (Some(first), Some(last)) = (pts.first(), pts.last()) else {
        return Err(Error::Measurement("empty response curve".into()));
    };
    if notch_freq < first.freq || notch_freq > last.freq {
        return Err(Error::Measurement(format!(
            "{notch_freq} Hz is outside the swept range"
        )));
    }

    // start from the nearest grid point and walk downhill
    let mut i = pts
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (a.freq - notch_freq).abs().total_cmp(&(b.freq - notch_freq).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    loop {
        let here = pts[i].magnitude;
        if i > 0 && pts[i - 1].magnitude < here {
            i -= 1;
        } else if i + 1 < pts.len() && pts[i + 1].magnitude < here {
            i += 1;
        } else {
            break;
        }
    }

    let reference = curve.median_magnitude();
    let threshold = reference / std::f64::consts::SQRT_2;
    let min_mag = pts[i].magnitude;
    if min_mag.is_nan() || min_mag >= threshold {
        return Err(Error::Measurement(format!(
            "no -3 dB notch near {notch_freq} Hz"
        )));
    }

    let crossing = |from: usize, to: usize| -> f64 {
        let (a, b) = (&pts[from], &pts[to]);
        let t = (threshold - a.magnitude) / (b.magnitude - a.magnitude);
        a.freq + t * (b.freq - a.freq)
    };
    let left = (0..i)
        .rev()
        .find(|&k| pts[k].magnitude >= threshold)
        .map(|k| crossing(k + 1, k));
    let right = (i + 1..pts.len())
        .find(|&k| pts[k].magnitude >= threshold)
        .map(|k| crossing(k - 1, k));
    match (left, right) {
        (Some(lo), Some(hi)) => Ok(NotchMeasurement {
            min_freq: pts[i].freq,
            depth_db: to_db(reference) - to_db(min_mag),
            bandwidth_3db: hi - lo,
        }),
        _ => Err(Error::Measurement(format!(
            "notch near {notch_freq} Hz has no -3 dB crossing on both sides"
        ))),
    }
}
