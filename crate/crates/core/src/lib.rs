//! Notch filter toolkit: pole/zero placement design, frequency-response
//! analysis, fixed-point coefficient quantization and a bit-exact model of a
//! lookup-table-multiplier IIR datapath.
//!
//! The typical flow reads a sound-insulation curve, locates its resonance and
//! coincidence dips, designs one notch biquad per dip, quantizes the
//! coefficients to a `2^-15` grid and runs audio through either the
//! double-precision reference or the 8-bit integer engine.

pub mod acoustics;
pub mod design;
pub mod engine;
mod error;
pub mod io;
pub mod pipeline;
pub mod quantize;
pub mod response;
pub mod roots;
pub mod spectrum;

pub use error::{Error, Result};

pub use acoustics::{
    absorption_area, find_dips, notch_specs_from_dips, transmission_loss, Dip, DipReport,
    InsulationCurve, RoomMeasurement,
};
pub use design::{
    angle_for_frequency, cascade, design_notch, radius_from_bandwidth, transfer_from_pole_zero,
    Biquad, Cascade, Filter, NotchSpec, PoleZeroSet, TransferFunction,
};
pub use engine::{
    build_lut, run, run_reference, EngineConfig, EngineState, FixedPointCascade, MultiplierLut,
    RunReport, SectionEngine,
};
pub use quantize::{drift, quantize, scaling_factor, DriftReport, FixedFormat, QuantizedBiquad, Rounding, SectionScale};
pub use response::{
    check_stability, evaluate_geometric, evaluate_polynomial, measure_notch, sweep,
    NotchMeasurement, ResponseCurve, ResponsePoint, StabilityReport,
};
pub use spectrum::{spectrum, SpectrumCurve};

/// Sample rate used throughout the studio workflow, in hertz.
pub const DEFAULT_SAMPLE_RATE: f64 = 7400.0;

/// Pole radius of the studio notch designs.
pub const DEFAULT_POLE_RADIUS: f64 = 0.99;
