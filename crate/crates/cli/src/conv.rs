//! Grid convolution oracle: f is sampled on a uniform lattice, its
//! discrete transform is raised to the n-th power, and the density of
//! S_n/√n is read back by a direct trigonometric sum.

use edgeworth_core::DensitySpec;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::CliError;

pub const DEFAULT_STEP: f64 = 0.05;
pub const DEFAULT_POINTS: usize = 1 << 17;

#[derive(Debug, Clone)]
pub struct ConvolutionOracle {
    step: f64,
    points: usize,
    /// φ_h(t_k) for k = 0..points/2, t_k = 2πk/(points·step)
    phi: Vec<Complex64>,
    /// max |φ_h| over this frequency and every higher one
    envelope: Vec<f64>,
}

impl ConvolutionOracle {
    pub fn new(spec: &DensitySpec) -> Result<Self, CliError> {
        Self::with_grid(spec, DEFAULT_STEP, DEFAULT_POINTS)
    }

    pub fn with_grid(spec: &DensitySpec, step: f64, points: usize) -> Result<Self, CliError> {
        if !(step > 0.0) || points < 16 || !points.is_power_of_two() {
            return Err(CliError::Domain("convolution grid needs step > 0 and a power-of-two size".into()));
        }
        let half = (points / 2) as f64;
        let mut buf: Vec<Complex64> = (0..points)
            .map(|j| Complex64::new(spec.density((j as f64 - half) * step), 0.0))
            .collect();
        // inverse transform carries e^{+i t x}
        FftPlanner::new().plan_fft_inverse(points).process(&mut buf);
        // undo the lattice offset of −half·step: e^{−iπk} = (−1)^k
        let phi: Vec<Complex64> = buf[..=points / 2]
            .iter()
            .enumerate()
            .map(|(k, &z)| if k % 2 == 0 { z * step } else { -z * step })
            .collect();
        let mut envelope: Vec<f64> = phi.iter().map(|z: &Complex64| z.norm()).collect();
        for k in (0..envelope.len().saturating_sub(1)).rev() {
            envelope[k] = envelope[k].max(envelope[k + 1]);
        }
        Ok(ConvolutionOracle { step, points, phi, envelope })
    }

    /// Lattice approximation of φ at t_k.
    pub fn phi(&self) -> &[Complex64] {
        &self.phi
    }

    pub fn frequency(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / (self.points as f64 * self.step)
    }

    /// Density of S_n/√n at x.
    pub fn density(&self, x: f64, n: u64) -> f64 {
        let rn = (n as f64).sqrt();
        let dt = self.frequency(1);
        let mut sum = 0.5 * self.phi[0].powu(n as u32).re;
        for (k, p) in self.phi.iter().enumerate().skip(1) {
            if self.envelope[k].powi(n as i32) < 1e-18 {
                break;
            }
            let pn = p.powu(n as u32);
            let arg = -rn * self.frequency(k) * x;
            sum += pn.re * arg.cos() - pn.im * arg.sin();
        }
        rn * dt / PI * sum
    }
}
