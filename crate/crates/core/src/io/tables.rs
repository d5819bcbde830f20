use std::io::{Read, Write};
use std::path::Path;

use crate::acoustics::InsulationCurve;
use crate::response::ResponseCurve;
use crate::spectrum::SpectrumCurve;
use crate::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}

/// Columns `freq_hz, magnitude, magnitude_db, phase_rad`.
pub fn write_response_csv<W: Write>(curve: &ResponseCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["freq_hz", "magnitude", "magnitude_db", "phase_rad"])
        .map_err(csv_err)?;
    for p in &curve.points {
        w.write_record([
            p.freq.to_string(),
            p.magnitude.to_string(),
            p.magnitude_db.to_string(),
            p.phase.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `freq_hz, magnitude_db`.
pub fn write_spectrum_csv<W: Write>(curve: &SpectrumCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["freq_hz", "magnitude_db"]).map_err(csv_err)?;
    for (f, db) in &curve.bins {
        w.write_record([f.to_string(), db.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `freq_hz, r_db` rows; the header row is required.
pub fn parse_insulation_csv<R: Read>(input: R) -> Result<InsulationCurve> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or(Error::Parse {
            line: 1,
            message: format!("missing column '{name}' (header must name freq_hz and r_db)"),
        })
    };
    let (fi, ri) = (col("freq_hz")?, col("r_db")?);
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| -> Result<f64> {
            let s = rec.get(i).unwrap_or("");
            s.parse().map_err(|_| Error::Parse {
                line,
                message: format!("'{s}' is not a number"),
            })
        };
        points.push((field(fi)?, field(ri)?));
    }
    InsulationCurve::new(points).map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })
}

pub fn read_insulation_csv(path: &Path) -> Result<InsulationCurve> {
    parse_insulation_csv(std::fs::File::open(path)?)
}
