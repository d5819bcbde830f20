use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use notchkit as nk;

fn err(e: nk::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Second-order section `(a0 + a1 z^-1 + a2 z^-2) / (1 + b1 z^-1 + b2 z^-2)`.
#[pyclass(name = "Biquad", from_py_object)]
#[derive(Clone)]
struct PyBiquad {
    inner: nk::Biquad,
}

#[pymethods]
impl PyBiquad {
    #[new]
    fn new(a0: f64, a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        Self {
            inner: nk::Biquad::new(a0, a1, a2, b1, b2),
        }
    }

    #[getter]
    fn a0(&self) -> f64 {
        self.inner.a0
    }
    #[getter]
    fn a1(&self) -> f64 {
        self.inner.a1
    }
    #[getter]
    fn a2(&self) -> f64 {
        self.inner.a2
    }
    #[getter]
    fn b1(&self) -> f64 {
        self.inner.b1
    }
    #[getter]
    fn b2(&self) -> f64 {
        self.inner.b2
    }

    fn coefficients(&self) -> [f64; 5] {
        let b = &self.inner;
        [b.a0, b.a1, b.a2, b.b1, b.b2]
    }

    /// `(magnitude, phase)` at `freq` hertz.
    fn response(&self, freq: f64, sample_rate: f64) -> PyResult<(f64, f64)> {
        let p = nk::evaluate_polynomial(&self.inner, freq, sample_rate).map_err(err)?;
        Ok((p.magnitude, p.phase))
    }

    fn with_unity_dc_gain(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.with_unity_dc_gain().map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        let b = &self.inner;
        format!("Biquad({}, {}, {}, {}, {})", b.a0, b.a1, b.a2, b.b1, b.b2)
    }
}

#[pyclass(name = "QuantizedBiquad", from_py_object)]
#[derive(Clone)]
struct PyQuantizedBiquad {
    inner: nk::QuantizedBiquad,
}

#[pymethods]
impl PyQuantizedBiquad {
    /// Integer words `[a0, a1, a2, b1, b2]`.
    fn words(&self) -> [i64; 5] {
        self.inner.words()
    }

    #[getter]
    fn fraction_bits(&self) -> u32 {
        self.inner.format.fraction_bits
    }

    #[getter]
    fn rounding(&self) -> String {
        self.inner.format.rounding.to_string()
    }

    fn to_biquad(&self) -> PyBiquad {
        PyBiquad {
            inner: self.inner.to_biquad(),
        }
    }

    fn __repr__(&self) -> String {
        format!("QuantizedBiquad({:?}, fraction_bits={})", self.inner.words(), self.fraction_bits())
    }
}

fn cascade_of(sections: &[PyBiquad]) -> PyResult<nk::Cascade> {
    nk::cascade(sections.iter().map(|b| b.inner).collect()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (notch_freq, sample_rate = nk::DEFAULT_SAMPLE_RATE, pole_radius = nk::DEFAULT_POLE_RADIUS))]
fn design_notch(notch_freq: f64, sample_rate: f64, pole_radius: f64) -> PyResult<PyBiquad> {
    let spec = nk::NotchSpec::new(notch_freq, sample_rate, pole_radius).map_err(err)?;
    Ok(PyBiquad {
        inner: nk::design_notch(&spec),
    })
}

#[pyfunction]
#[pyo3(signature = (biquad, fraction_bits = 15, rounding = "floor"))]
fn quantize(biquad: &PyBiquad, fraction_bits: u32, rounding: &str) -> PyResult<PyQuantizedBiquad> {
    let rounding: nk::Rounding = rounding.parse().map_err(err)?;
    let fmt = nk::FixedFormat::new(fraction_bits, rounding).map_err(err)?;
    Ok(PyQuantizedBiquad {
        inner: nk::quantize(&biquad.inner, fmt).map_err(err)?,
    })
}

/// `(stable, pole magnitudes)` of a cascade.
#[pyfunction]
fn check_stability(sections: Vec<PyBiquad>) -> PyResult<(bool, Vec<f64>)> {
    let r = nk::check_stability(&cascade_of(&sections)?);
    Ok((r.stable, r.pole_magnitudes))
}

/// Rows `(freq_hz, magnitude, magnitude_db, phase_rad)` from DC to Nyquist.
#[pyfunction]
#[pyo3(signature = (sections, sample_rate = nk::DEFAULT_SAMPLE_RATE, n_points = 1024))]
fn sweep(sections: Vec<PyBiquad>, sample_rate: f64, n_points: usize) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let curve = nk::sweep(&cascade_of(&sections)?, sample_rate, n_points).map_err(err)?;
    Ok(curve
        .points
        .iter()
        .map(|p| (p.freq, p.magnitude, p.magnitude_db, p.phase))
        .collect())
}

/// Double-precision reference filter.
#[pyfunction]
fn run_reference(sections: Vec<PyBiquad>, samples: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(nk::run_reference(&cascade_of(&sections)?, &samples))
}

/// The 8-bit lookup-table datapath.
#[pyclass(name = "FixedPointCascade")]
struct PyFixedPointCascade {
    inner: nk::FixedPointCascade,
}

#[pymethods]
impl PyFixedPointCascade {
    #[new]
    #[pyo3(signature = (sections, feedback_frac_bits = nk::EngineConfig::default().feedback_frac_bits))]
    fn new(sections: Vec<PyQuantizedBiquad>, feedback_frac_bits: u32) -> PyResult<Self> {
        let qs: Vec<nk::QuantizedBiquad> = sections.iter().map(|q| q.inner).collect();
        Ok(Self {
            inner: nk::FixedPointCascade::new(&qs, nk::EngineConfig { feedback_frac_bits }).map_err(err)?,
        })
    }

    /// Returns `(output samples, saturations per section)`.
    fn run(&mut self, samples: Vec<i8>) -> (Vec<i8>, Vec<u64>) {
        let (y, report) = self.inner.run(&samples);
        (y, report.saturations)
    }

    fn reset(&mut self) {
        self.inner.reset();
    }
}

#[pyfunction]
fn transmission_loss(l1: f64, l2: f64, area: f64, absorption: f64) -> PyResult<f64> {
    nk::transmission_loss(l1, l2, area, absorption).map_err(err)
}

#[pyfunction]
fn absorption_area(volume: f64, reverberation_time: f64) -> PyResult<f64> {
    nk::absorption_area(volume, reverberation_time).map_err(err)
}

type DipPair = (Option<(f64, f64)>, Option<(f64, f64)>);

/// `(resonance, coincidence)` dips as `(freq, depth)` or `None`.
#[pyfunction]
fn find_dips(points: Vec<(f64, f64)>) -> PyResult<DipPair> {
    let curve = nk::InsulationCurve::new(points).map_err(err)?;
    let r = nk::find_dips(&curve);
    let pair = |d: Option<nk::Dip>| d.map(|d| (d.freq, d.depth));
    Ok((pair(r.resonance), pair(r.coincidence)))
}

#[pymodule]
fn notchkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBiquad>()?;
    m.add_class::<PyQuantizedBiquad>()?;
    m.add_class::<PyFixedPointCascade>()?;
    m.add_function(wrap_pyfunction!(design_notch, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(check_stability, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_reference, m)?)?;
    m.add_function(wrap_pyfunction!(transmission_loss, m)?)?;
    m.add_function(wrap_pyfunction!(absorption_area, m)?)?;
    m.add_function(wrap_pyfunction!(find_dips, m)?)?;
    m.add("DEFAULT_SAMPLE_RATE", nk::DEFAULT_SAMPLE_RATE)?;
    m.add("DEFAULT_POLE_RADIUS", nk::DEFAULT_POLE_RADIUS)?;
    Ok(())
}
