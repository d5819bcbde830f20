#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const FS: f64 = 7400.0;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Standard normal samples by Box-Muller.
pub fn gaussian(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
        })
        .collect()
}

fn one_pole_lowpass(x: &mut [f64], fc: f64, fs: f64) {
    let a = (-2.0 * PI * fc / fs).exp();
    let mut y = 0.0;
    for v in x.iter_mut() {
        y = (1.0 - a) * *v + a * y;
        *v = y;
    }
}

fn one_pole_highpass(x: &mut [f64], fc: f64, fs: f64) {
    let a = (-2.0 * PI * fc / fs).exp();
    let (mut y, mut prev) = (0.0, 0.0);
    for v in x.iter_mut() {
        y = a * (y + *v - prev);
        prev = *v;
        *v = y;
    }
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Noise with a speech-like tilt: highpassed at 200 Hz, rolled off above
/// 800 Hz, scaled to `rms_dbfs`.
pub fn speech_noise(seed: u64, n: usize, fs: f64, rms_dbfs: f64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut x = gaussian(&mut rng, n);
    one_pole_highpass(&mut x, 200.0, fs);
    one_pole_lowpass(&mut x, 800.0, fs);
    one_pole_lowpass(&mut x, 3400.0, fs);
    let g = 10f64.powf(rms_dbfs / 20.0) / rms(&x);
    x.iter_mut().for_each(|v| *v *= g);
    x
}

pub fn tone(freq: f64, amplitude: f64, n: usize, fs: f64) -> Vec<f64> {
    (0..n)
        .map(|k| amplitude * (2.0 * PI * freq * k as f64 / fs).sin())
        .collect()
}

/// Speech-shaped noise at -30 dBFS plus -6 dBFS tones at 315 and 2500 Hz,
/// as 16-bit PCM.
pub fn noisy_tones(seconds: f64) -> Vec<i16> {
    let n = (seconds * FS) as usize;
    let noise = speech_noise(7, n, FS, -30.0);
    let a = 10f64.powf(-6.0 / 20.0);
    let t1 = tone(315.0, a, n, FS);
    let t2 = tone(2500.0, a, n, FS);
    (0..n)
        .map(|k| {
            let v = (noise[k] + t1[k] + t2[k]) * 32768.0;
            v.round().clamp(i16::MIN as f64, i16::MAX as f64) as i16
        })
        .collect()
}

/// Level of one frequency in a single Hann-windowed DFT, dB re full scale.
pub fn tone_level(x: &[f64], freq: f64, fs: f64) -> f64 {
    let n = x.len();
    let (mut re, mut im, mut wsum) = (0.0, 0.0, 0.0);
    for (k, v) in x.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos();
        let ph = 2.0 * PI * freq * k as f64 / fs;
        re += w * v * ph.cos();
        im -= w * v * ph.sin();
        wsum += w;
    }
    20.0 * (2.0 * (re * re + im * im).sqrt() / wsum).log10()
}

pub fn pcm_to_f64(x: &[i16]) -> Vec<f64> {
    x.iter().map(|&s| s as f64 / 32768.0).collect()
}

/// Hann-windowed DFT magnitudes at `freqs`, averaged over 50 %-overlap
/// frames of `n` samples, in dB.
pub fn welch_levels(x: &[f64], freqs: &[f64], n: usize, fs: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n)
        .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos())
        .collect();
    let starts: Vec<usize> = (0..).map(|i| i * n / 2).take_while(|s| s + n <= x.len()).collect();
    freqs
        .iter()
        .map(|&f| {
            let (c, s): (Vec<f64>, Vec<f64>) = (0..n)
                .map(|k| {
                    let ph = 2.0 * PI * f * k as f64 / fs;
                    (w[k] * ph.cos(), w[k] * ph.sin())
                })
                .unzip();
            let total: f64 = starts
                .iter()
                .map(|&st| {
                    let frame = &x[st..st + n];
                    let re: f64 = frame.iter().zip(&c).map(|(a, b)| a * b).sum();
                    let im: f64 = frame.iter().zip(&s).map(|(a, b)| a * b).sum();
                    (re * re + im * im).sqrt()
                })
                .sum();
            20.0 * (total / starts.len() as f64).log10()
        })
        .collect()
}
