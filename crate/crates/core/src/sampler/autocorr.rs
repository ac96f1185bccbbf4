use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Shortest series accepted.
pub const MIN_SERIES_LEN: usize = 100;
/// Window rule: the smallest `W` with `W >= WINDOW_FACTOR * τ(W)`.
pub const WINDOW_FACTOR: f64 = 5.0;

/// Integrated autocorrelation time estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Autocorrelation {
    pub tau: f64,
    pub window: usize,
    /// The series was constant; `tau` is then 1/2 by convention.
    pub zero_variance: bool,
}

/// Normalized autocorrelation `ρ(t)` for `t = 0..n`, via zero-padded FFT.
fn normalized_autocorrelation(series: &[f64]) -> Option<Vec<f64>> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .map(|&x| Complex::new(x - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for z in &mut buf {
        *z = Complex::new(z.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let c0 = buf[0].re;
    if c0 <= 0.0 || !c0.is_finite() {
        return None;
    }
    Some(buf[..n].iter().map(|z| z.re / c0).collect())
}

/// Integrated autocorrelation time `τ = 1/2 + Σ_{t=1}^{W} ρ(t)` with the
/// self-consistent window.
pub fn autocorrelation(series: &[f64]) -> Result<Autocorrelation> {
    if series.len() < MIN_SERIES_LEN {
        return Err(Error::InvalidInput(format!(
            "autocorrelation needs at least {MIN_SERIES_LEN} samples, got {}",
            series.len()
        )));
    }
    let Some(rho) = normalized_autocorrelation(series) else {
        return Ok(Autocorrelation {
            tau: 0.5,
            window: 0,
            zero_variance: true,
        });
    };
    let mut tau = 0.5;
    let mut window = rho.len() - 1;
    for (w, &r) in rho.iter().enumerate().skip(1) {
        tau += r;
        if w as f64 >= WINDOW_FACTOR * tau {
            window = w;
            break;
        }
    }
    Ok(Autocorrelation {
        tau,
        window,
        zero_variance: false,
    })
}
