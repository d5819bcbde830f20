//! Notch design by pole/zero placement.
//!
//! A notch at frequency `f` puts a conjugate pair of zeros on the unit circle
//! at `e^{±jθ}`, `θ = 2π f / fs`, and a conjugate pair of poles just inside
//! it at `r e^{±jθ}`. Expanding the root products gives
//!
//! ```text
//!         1 - 2cosθ z^-1 + z^-2
//! H(z) = -------------------------
//!         1 - 2r cosθ z^-1 + r² z^-2
//! ```
//!
//! Denominators are monic and the feedback terms enter with a `+` sign in
//! the polynomial, so the recursion subtracts them:
//! `y[n] = a0 x[n] + a1 x[n-1] + a2 x[n-2] - b1 y[n-1] - b2 y[n-2]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::roots::poly_from_roots;
use crate::{Error, Result};

/// Imaginary parts below this are treated as real roots.
const REAL_ROOT_TOL: f64 = 1e-12;

/// Frequency-domain description of one notch section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchSpec {
    notch_freq: f64,
    sample_rate: f64,
    pole_radius: f64,
}

impl NotchSpec {
    pub fn new(notch_freq: f64, sample_rate: f64, pole_radius: f64) -> Result<Self> {
        check_frequency(notch_freq, sample_rate)?;
        if !(pole_radius > 0.0 && pole_radius < 1.0) {
            return Err(Error::Domain(format!(
                "pole radius {pole_radius} must lie in (0, 1)"
            )));
        }
        Ok(Self {
            notch_freq,
            sample_rate,
            pole_radius,
        })
    }

    pub fn notch_freq(&self) -> f64 {
        self.notch_freq
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn pole_radius(&self) -> f64 {
        self.pole_radius
    }

    /// Notch angle on the unit circle, in radians.
    pub fn angle(&self) -> f64 {
        2.0 * PI * self.notch_freq / self.sample_rate
    }

    /// The zero and pole pairs this spec places.
    pub fn pole_zero_set(&self) -> PoleZeroSet {
        let theta = self.angle();
        let zero = Complex64::from_polar(1.0, theta);
        let pole = Complex64::from_polar(self.pole_radius, theta);
        PoleZeroSet {
            zeros: vec![zero, zero.conj()],
            poles: vec![pole, pole.conj()],
            gain: 1.0,
        }
    }
}

fn check_frequency(freq: f64, sample_rate: f64) -> Result<()> {
    if sample_rate.is_nan() || sample_rate <= 0.0 || sample_rate.is_infinite() {
        return Err(Error::Domain(format!(
            "sample rate {sample_rate} Hz must be positive"
        )));
    }
    let nyquist = sample_rate / 2.0;
    if !(freq > 0.0 && freq < nyquist) {
        return Err(Error::Domain(format!(
            "frequency {freq} Hz must lie in (0, {nyquist}) Hz (Nyquist bound for fs = {sample_rate} Hz)"
        )));
    }
    Ok(())
}

/// Angle in degrees at which a frequency sits on the unit circle.
pub fn angle_for_frequency(freq: f64, sample_rate: f64) -> Result<f64> {
    check_frequency(freq, sample_rate)?;
    Ok(360.0 * freq / sample_rate)
}

/// One second-order section,
/// `H(z) = (a0 + a1 z^-1 + a2 z^-2) / (1 + b1 z^-1 + b2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl Biquad {
    pub const fn new(a0: f64, a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        Self { a0, a1, a2, b1, b2 }
    }

    /// `H(z) = 1`.
    pub const fn unity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn numerator(&self) -> [f64; 3] {
        [self.a0, self.a1, self.a2]
    }

    /// Monic denominator `[1, b1, b2]`.
    pub fn denominator(&self) -> [f64; 3] {
        [1.0, self.b1, self.b2]
    }

    /// Gain at z = 1.
    pub fn dc_gain(&self) -> f64 {
        (self.a0 + self.a1 + self.a2) / (1.0 + self.b1 + self.b2)
    }

    /// Copy with the numerator scaled so that the DC gain is exactly one.
    pub fn with_unity_dc_gain(&self) -> Result<Self> {
        let g = self.dc_gain();
        if !g.is_finite() || g == 0.0 {
            return Err(Error::Domain(format!(
                "DC gain {g} cannot be normalized"
            )));
        }
        Ok(Self::new(self.a0 / g, self.a1 / g, self.a2 / g, self.b1, self.b2))
    }
}

/// Any linear filter whose transfer function can be evaluated on the z-plane.
pub trait Filter {
    /// `H(z)` at an arbitrary complex point.
    fn transfer_at(&self, z: Complex64) -> Complex64;

    /// Monic denominator polynomials of each section, ascending in `z^-1`.
    fn denominators(&self) -> Vec<Vec<f64>>;
}

fn eval_ratio(num: &[f64], den: &[f64], z: Complex64) -> Complex64 {
    let zi = z.inv();
    // Horner in z^-1
    let horner = |c: &[f64]| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * zi + k)
    };
    horner(num) / horner(den)
}

impl Filter for Biquad {
    fn transfer_at(&self, z: Complex64) -> Complex64 {
        eval_ratio(&self.numerator(), &self.denominator(), z)
    }

    fn denominators(&self) -> Vec<Vec<f64>> {
        vec![self.denominator().to_vec()]
    }
}

/// Ordered product of biquad sections.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    sections: Vec<Biquad>,
}

impl Cascade {
    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }
}

impl Filter for Cascade {
    fn transfer_at(&self, z: Complex64) -> Complex64 {
        self.sections
            .iter()
            .map(|s| s.transfer_at(z))
            .product()
    }

    fn denominators(&self) -> Vec<Vec<f64>> {
        self.sections
            .iter()
            .map(|s| s.denominator().to_vec())
            .collect()
    }
}

/// Composes sections into `H(z) = H1(z) H2(z) ...`.
pub fn cascade(filters: Vec<Biquad>) -> Result<Cascade> {
    if filters.is_empty() {
        return Err(Error::Domain("a cascade needs at least one section".into()));
    }
    Ok(Cascade { sections: filters })
}

/// Designs the notch biquad for `spec`.
///
/// The numerator keeps `a0 = a2 = 1`, so the DC gain sits slightly above one;
/// use [`Biquad::with_unity_dc_gain`] to normalize.
pub fn design_notch(spec: &NotchSpec) -> Biquad {
    let c = cos_turns(spec.notch_freq / spec.sample_rate);
    let r = spec.pole_radius;
    Biquad::new(1.0, -2.0 * c, 1.0, -2.0 * r * c, r * r)
}

/// `cos(2πx)` for `x` in [0, 0.5], exact at the quarter turn.
fn cos_turns(x: f64) -> f64 {
    use std::f64::consts::TAU;
    if x <= 0.125 {
        (TAU * x).cos()
    } else if x <= 0.375 {
        (TAU * (0.25 - x)).sin()
    } else {
        -(TAU * (0.5 - x)).cos()
    }
}

/// Pole radius giving an approximate -3 dB notch bandwidth,
/// `r = 1 - π BW / fs`.
pub fn radius_from_bandwidth(bandwidth: f64, sample_rate: f64) -> Result<f64> {
    if sample_rate.is_nan() || sample_rate <= 0.0 {
        return Err(Error::Domain(format!(
            "sample rate {sample_rate} Hz must be positive"
        )));
    }
    if bandwidth.is_nan() || bandwidth < 0.0 {
        return Err(Error::Domain(format!(
            "bandwidth {bandwidth} Hz must be non-negative"
        )));
    }
    let r = 1.0 - PI * bandwidth / sample_rate;
    if r <= 0.0 {
        return Err(Error::Domain(format!(
            "bandwidth {bandwidth} Hz reaches fs/π = {} Hz and leaves no valid pole radius",
            sample_rate / PI
        )));
    }
    Ok(r)
}

/// Zeros, poles and gain `K` of `H(z) = K ∏(z - zᵢ) / ∏(z - pᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleZeroSet {
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub gain: f64,
}

impl PoleZeroSet {
    pub fn new(zeros: Vec<Complex64>, poles: Vec<Complex64>, gain: f64) -> Self {
        Self { zeros, poles, gain }
    }

    /// Fails unless every complex root has its conjugate in the same set.
    pub fn check_conjugate_pairs(&self) -> Result<()> {
        check_conjugates(&self.zeros, "zeros")?;
        check_conjugates(&self.poles, "poles")
    }
}

fn check_conjugates(roots: &[Complex64], what: &str) -> Result<()> {
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] || roots[i].im.abs() <= REAL_ROOT_TOL {
            continue;
        }
        used[i] = true;
        let target = roots[i].conj();
        let partner = (0..roots.len())
            .filter(|&j| !used[j])
            .find(|&j| (roots[j] - target).norm() <= 1e-9 * (1.0 + target.norm()));
        match partner {
            Some(j) => used[j] = true,
            None => {
                return Err(Error::Domain(format!(
                    "{what}: {} has no conjugate partner",
                    roots[i]
                )))
            }
        }
    }
    Ok(())
}

/// Real rational transfer function, both polynomials ascending in `z^-1`.
///
/// `den[0]` is always 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl TransferFunction {
    /// The section view, available when both polynomials have at most three terms.
    pub fn as_biquad(&self) -> Result<Biquad> {
        if self.num.len() > 3 || self.den.len() > 3 {
            return Err(Error::Domain(format!(
                "order {} exceeds a single second-order section",
                self.num.len().max(self.den.len()) - 1
            )));
        }
        let n = |i: usize| self.num.get(i).copied().unwrap_or(0.0);
        let d = |i: usize| self.den.get(i).copied().unwrap_or(0.0);
        Ok(Biquad::new(n(0), n(1), n(2), d(1), d(2)))
    }

    pub fn order(&self) -> usize {
        self.num.len().max(self.den.len()) - 1
    }
}

impl Filter for TransferFunction {
    fn transfer_at(&self, z: Complex64) -> Complex64 {
        eval_ratio(&self.num, &self.den, z)
    }

    fn denominators(&self) -> Vec<Vec<f64>> {
        vec![self.den.clone()]
    }
}

/// Expands root products into a real transfer function.
///
/// With fewer zeros than poles the numerator gets leading zero terms and the
/// result is exactly `K ∏(z - zᵢ) / ∏(z - pᵢ)`. With fewer poles than zeros
/// the missing poles are placed at the origin, which keeps the filter causal
/// at the cost of a pure delay. The gain is folded into the numerator.
pub fn transfer_from_pole_zero(pz: &PoleZeroSet) -> Result<TransferFunction> {
    pz.check_conjugate_pairs()?;
    let order = pz.zeros.len().max(pz.poles.len());
    let real = |rs: &[Complex64], scale: f64| -> Vec<f64> {
        poly_from_roots(rs).iter().map(|c| c.re * scale).collect()
    };
    let mut num = vec![0.0; pz.poles.len().saturating_sub(pz.zeros.len())];
    num.extend(real(&pz.zeros, pz.gain));
    let mut den = real(&pz.poles, 1.0);
    den.resize(order + 1, 0.0);
    Ok(TransferFunction { num, den })
}
