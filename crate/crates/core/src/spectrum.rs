//! Averaged magnitude spectra of audio signals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::response::to_db;
use crate::{Error, Result};

/// Magnitude per DFT bin from DC to Nyquist.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    /// `(frequency Hz, magnitude dB)`; a full-scale sine at a bin centre
    /// reads 0 dB, silence reads `-inf`.
    pub bins: Vec<(f64, f64)>,
    pub frames: usize,
}

impl SpectrumCurve {
    /// Index of the bin nearest `freq`.
    pub fn bin_index(&self, freq: f64) -> usize {
        self.bins
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (a.0 - freq).abs().total_cmp(&(b.0 - freq).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Level of the bin nearest `freq`.
    pub fn level_at(&self, freq: f64) -> f64 {
        self.bins[self.bin_index(freq)].1
    }
}

/// Hann-windowed DFT magnitudes averaged over 50 %-overlap frames.
///
/// Signals shorter than one frame are zero-padded to a single frame.
pub fn spectrum(samples: &[f64], sample_rate: f64, n_fft: usize) -> Result<SpectrumCurve> {
    if n_fft < 2 || !n_fft.is_power_of_two() {
        return Err(Error::Argument(format!(
            "n_fft must be a power of two >= 2, got {n_fft}"
        )));
    }
    // periodic Hann
    let window: Vec<f64> = (0..n_fft)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n_fft as f64).cos())
        .collect();
    let coherent_gain: f64 = window.iter().sum();
    let hop = n_fft / 2;
    let frames = if samples.len() <= n_fft {
        1
    } else {
        (samples.len() - n_fft) / hop + 1
    };

    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_fft);
    let n_bins = n_fft / 2 + 1;
    let mut acc = vec![0.0; n_bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    for k in 0..frames {
        let start = k * hop;
        for (i, slot) in buf.iter_mut().enumerate() {
            let s = samples.get(start + i).copied().unwrap_or(0.0);
            *slot = Complex64::new(s * window[i], 0.0);
        }
        fft.process(&mut buf);
        for (a, x) in acc.iter_mut().zip(&buf) {
            *a += x.norm();
        }
    }

    let bins = acc
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            // one-sided amplitude scaling; DC and Nyquist are not doubled
            let single = if k == 0 || k == n_fft / 2 { 1.0 } else { 2.0 };
            let level = single * m / (frames as f64 * coherent_gain);
            (k as f64 * sample_rate / n_fft as f64, to_db(level))
        })
        .collect();
    Ok(SpectrumCurve { bins, frames })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_peak_bin() {
        let fs = 7400.0;
        let x: Vec<f64> = (0..8192)
            .map(|n| (2.0 * PI * 315.0 * n as f64 / fs).sin())
            .collect();
        let s = spectrum(&x, fs, 1024).unwrap();
        let (peak, _) = s
            .bins
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap();
        assert_eq!(peak, 44);
        assert!((s.bins[44].0 - 317.96875).abs() < 1e-9);
        assert_eq!(s.bins.len(), 513);
        assert_eq!(s.bins[512].0, 3700.0);
    }

    #[test]
    fn bin_centred_sine_reads_zero_db() {
        let fs = 1024.0;
        let x: Vec<f64> = (0..4096).map(|n| (2.0 * PI * 64.0 * n as f64 / fs).sin()).collect();
        let s = spectrum(&x, fs, 256).unwrap();
        assert!(s.level_at(64.0).abs() < 1e-9);
    }

    #[test]
    fn silence_is_floor() {
        let s = spectrum(&[0.0; 2048], 7400.0, 512).unwrap();
        assert!(s.bins.iter().all(|b| b.1 == f64::NEG_INFINITY));
    }

    #[test]
    fn frame_count() {
        assert_eq!(spectrum(&[0.0; 100], 8000.0, 256).unwrap().frames, 1);
        assert_eq!(spectrum(&[0.0; 1024], 8000.0, 256).unwrap().frames, 7);
    }

    #[test]
    fn rejects_bad_sizes() {
        for n in [0, 1, 3, 1000] {
            assert!(matches!(spectrum(&[0.0; 10], 8000.0, n), Err(Error::Argument(_))));
        }
    }
}
