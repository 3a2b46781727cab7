use std::f64::consts::{PI, SQRT_2};

use super::{AngleSeries, KinematicsError};

pub const DEFAULT_CUTOFF_HZ: f64 = 4.0;
/// Reflective padding applied to each end before zero-phase filtering.
pub const DEFAULT_PAD_S: f64 = 1.0;

/// Second-order IIR section, `a0` normalised to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// Second-order Butterworth low-pass, bilinear transform with frequency pre-warping.
    pub fn butterworth_lowpass(cutoff_hz: f64, sample_rate_hz: f64) -> Result<Biquad, KinematicsError> {
        if !(cutoff_hz > 0.0 && sample_rate_hz > 2.0 * cutoff_hz && sample_rate_hz.is_finite()) {
            return Err(KinematicsError::InvalidFilter(format!(
                "cutoff {cutoff_hz} Hz needs a sampling rate above {} Hz, got {sample_rate_hz}",
                2.0 * cutoff_hz
            )));
        }
        let k = (PI * cutoff_hz / sample_rate_hz).tan();
        let k2 = k * k;
        let norm = 1.0 / (1.0 + SQRT_2 * k + k2);
        let b0 = k2 * norm;
        Ok(Biquad {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k2 - 1.0) * norm, (1.0 - SQRT_2 * k + k2) * norm],
        })
    }

    /// Runs the section over `x` in place (direct form II transposed), starting
    /// from the steady state for a constant input equal to `x[0]`.
    fn run(&self, x: &mut [f64]) {
        let Some(&x0) = x.first() else { return };
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let mut s2 = x0 * (b2 - a2);
        let mut s1 = x0 * (b1 - a1) + s2;
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + s1;
            s1 = b1 * input - a1 * y + s2;
            s2 = b2 * input - a2 * y;
            *v = y;
        }
    }
}

/// Forward-backward filtering with odd reflective padding of `pad` samples per end.
///
/// The signal is extended with `2·x[0] − x[pad..1]` and `2·x[n−1] − x[n−2..n−1−pad]`
/// so the padded signal is continuous in value and slope at both ends.
pub fn filtfilt(section: &Biquad, x: &[f64], pad: usize) -> Result<Vec<f64>, KinematicsError> {
    let n = x.len();
    if n <= pad || n < 2 {
        return Err(KinematicsError::TooShortToFilter { len: n, pad });
    }
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    section.run(&mut ext);
    ext.reverse();
    section.run(&mut ext);
    ext.reverse();
    Ok(ext[pad..pad + n].to_vec())
}

/// Zero-phase 4th-order-magnitude low-pass (second-order Butterworth run twice).
pub fn lowpass_filter(series: &AngleSeries, cutoff_hz: f64) -> Result<AngleSeries, KinematicsError> {
    let section = Biquad::butterworth_lowpass(cutoff_hz, series.rate_hz)?;
    let pad = (DEFAULT_PAD_S * series.rate_hz).round() as usize;
    let theta = filtfilt(&section, &series.theta, pad)?;
    Ok(AngleSeries {
        theta,
        ..series.clone()
    })
}
