use std::path::Path;

use crate::engine::{sample_from_datapath, sample_to_datapath};
use crate::{Error, Result};

/// Mono 16-bit PCM audio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioBuffer {
    pub sample_rate: u32,
    pub samples: Vec<i16>,
}

impl AudioBuffer {
    pub fn new(sample_rate: u32, samples: Vec<i16>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Format("sample rate must be positive".into()));
        }
        Ok(Self {
            sample_rate,
            samples,
        })
    }

    /// Samples scaled to [-1, 1).
    pub fn to_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| s as f64 / 32768.0).collect()
    }

    /// Rounds and saturates [-1, 1) samples to 16 bits; returns the buffer and
    /// the number of clipped samples.
    pub fn from_f64(sample_rate: u32, samples: &[f64]) -> Result<(Self, usize)> {
        let mut clipped = 0;
        let pcm = samples
            .iter()
            .map(|&v| {
                let s = (v * 32768.0).round();
                if s > i16::MAX as f64 || s < i16::MIN as f64 {
                    clipped += 1;
                }
                s.clamp(i16::MIN as f64, i16::MAX as f64) as i16
            })
            .collect();
        Ok((Self::new(sample_rate, pcm)?, clipped))
    }

    /// 8-bit datapath view.
    pub fn to_datapath(&self) -> Vec<i8> {
        self.samples.iter().map(|&s| sample_to_datapath(s)).collect()
    }

    pub fn from_datapath(sample_rate: u32, samples: &[i8]) -> Result<Self> {
        Self::new(sample_rate, samples.iter().map(|&s| sample_from_datapath(s)).collect())
    }
}

fn wav_err(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::Io(io),
        other => Error::Format(other.to_string()),
    }
}

/// Reads a mono, 16-bit integer PCM WAV file.
pub fn read_wav(path: &Path) -> Result<AudioBuffer> {
    let reader = hound::WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Format(format!(
            "{}: expected mono, found {} channels",
            path.display(),
            spec.channels
        )));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::Format(format!(
            "{}: expected 16-bit integer PCM, found {}-bit {:?}",
            path.display(),
            spec.bits_per_sample,
            spec.sample_format
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(wav_err)?;
    AudioBuffer::new(spec.sample_rate, samples)
}

pub fn write_wav(path: &Path, audio: &AudioBuffer) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(wav_err)?;
    for &s in &audio.samples {
        w.write_sample(s).map_err(wav_err)?;
    }
    w.finalize().map_err(wav_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_rejections() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.wav");
        let a = AudioBuffer::new(7400, vec![0, 1, -1, i16::MAX, i16::MIN]).unwrap();
        write_wav(&p, &a).unwrap();
        assert_eq!(read_wav(&p).unwrap(), a);

        let stereo = dir.path().join("s.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 7400,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&stereo, spec).unwrap();
        w.write_sample(0i16).unwrap();
        w.write_sample(0i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&stereo), Err(Error::Format(_))));

        let float = dir.path().join("f.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 7400,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&float, spec).unwrap();
        w.write_sample(0.0f32).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&float), Err(Error::Format(_))));
    }

    #[test]
    fn float_conversion_clips() {
        let (a, clipped) = AudioBuffer::from_f64(7400, &[0.0, 0.5, 1.0, -1.0, -1.5]).unwrap();
        assert_eq!(a.samples, vec![0, 16384, i16::MAX, i16::MIN, i16::MIN]);
        assert_eq!(clipped, 2);
    }
}
