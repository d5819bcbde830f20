//! File formats: coefficient text files, CSV tables and 16-bit PCM WAV.

mod coefficients;
mod tables;
mod wav;

pub use coefficients::{CoefficientFile, SectionRecord};
pub use tables::{read_insulation_csv, write_response_csv, write_spectrum_csv, parse_insulation_csv};
pub use wav::{read_wav, write_wav, AudioBuffer};
