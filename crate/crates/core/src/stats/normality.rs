//! Shapiro-Wilk W test using Royston's (1995) coefficient and p-value approximations.

use std::f64::consts::{FRAC_PI_3, PI, SQRT_2};

use statrs::distribution::{ContinuousCDF, Normal};

use super::{check_finite, StatsError, TestKind, TestResult};

pub const MAX_N: usize = 5000;

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

/// `c[0] + c[1]·x + c[2]·x² + …`
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Coefficients for the lower half of the ordered sample, largest first.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![0.5f64.sqrt()];
    }
    let z = std_normal();
    let an = n as f64;
    // Expected normal order statistics, positive for the upper half.
    let mut m: Vec<f64> = (1..=half)
        .map(|i| -z.inverse_cdf((i as f64 - 0.375) / (an + 0.25)))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) + m[0] / ssumm2;
    let (first_scaled, fac) = if n > 5 {
        let a2 = poly(&C2, rsn) + m[1] / ssumm2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        m[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    m[0] = a1;
    for v in &mut m[first_scaled..] {
        *v /= fac;
    }
    m
}

pub fn shapiro_wilk(x: &[f64]) -> Result<TestResult, StatsError> {
    check_finite(x)?;
    let n = x.len();
    if n < 3 {
        return Err(StatsError::SampleTooSmall);
    }
    if n > MAX_N {
        return Err(StatsError::SampleTooLarge);
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[n - 1] - sorted[0] == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let ssq: f64 = sorted.iter().map(|v| (v - mean).powi(2)).sum();
    let a = coefficients(n);
    let numerator: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ai)| ai * (sorted[n - 1 - i] - sorted[i]))
        .sum();
    let w = (numerator * numerator / ssq).min(1.0);
    Ok(TestResult::new(TestKind::ShapiroWilk, w, None, p_value(w, n), false))
}

fn p_value(w: f64, n: usize) -> f64 {
    if w >= 1.0 {
        return 1.0;
    }
    if n == 3 {
        // Exact distribution for three observations.
        return (6.0 / PI * ((w.sqrt()).asin() - FRAC_PI_3)).max(0.0);
    }
    let an = n as f64;
    let mut y = (1.0 - w).ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let ln_n = an.ln();
        (poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    // Upper tail of N(m, s²).
    0.5 * statrs::function::erf::erfc((y - m) / (s * SQRT_2))
}
