//! Reference computations that do not go through the expansion code:
//! the characteristic function by quadrature, Fourier inversion of
//! φ(θ/√n)^n, and direct quadrature of the Gaussian-weighted kernels.

#[allow(unused_imports)] // needed without std, shadowed by inherent methods with it
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::density::DensitySpec;
use crate::error::{Error, Result};
use crate::quadrature::{gk21_nodes, wynn_epsilon, Integrator};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub quad_abs_tol: f64,
    pub quad_panel_limit: usize,
    /// Inversion stops once |φ(t)|^n falls below this.
    pub inversion_theta_cutoff: f64,
    /// Hard cap on t for inversion (densities with kinks decay slowly).
    pub inversion_t_max: f64,
    pub mc_samples: u64,
    pub mc_seed: u64,
    pub histogram_bins: usize,
    /// Gaussian kernel bandwidth; 0 selects the histogram estimator.
    pub kde_bandwidth: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            quad_abs_tol: 1e-10,
            quad_panel_limit: 4000,
            inversion_theta_cutoff: 1e-14,
            inversion_t_max: 200.0,
            mc_samples: 1_000_000,
            mc_seed: 20240607,
            histogram_bins: 80,
            kde_bandwidth: 0.0,
        }
    }
}

/// e^{iw} − Σ_{k≤K} (iw)^k/k!, by its power series when |w| is small.
fn exp_remainder(w: f64, k: Option<usize>) -> Complex64 {
    let Some(k) = k else {
        return Complex64::new(w.cos(), w.sin());
    };
    let iw = Complex64::new(0.0, w);
    if w.abs() < 1.0 {
        let mut term = Complex64::new(1.0, 0.0);
        for j in 1..=k {
            term = term * iw / j as f64;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut j = k;
        loop {
            j += 1;
            term = term * iw / j as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        let mut t = Complex64::new(1.0, 0.0);
        let mut poly = t;
        for j in 1..=k {
            t = t * iw / j as f64;
            poly += t;
        }
        Complex64::new(w.cos(), w.sin()) - poly
    }
}

/// ∫_0^∞ [e^{itx} − T_K(itx)] h(x) dx for a power-tailed h ≥ 0.
fn half_transform<H: Fn(f64) -> f64>(
    h: &H,
    t: f64,
    k: Option<usize>,
    integ: &Integrator,
) -> Result<Complex64> {
    let a = t.abs();
    let s = t.signum();
    // In u = a·x the oscillation has period 2π.
    let g = |u: f64| exp_remainder(s * u, k) * (h(u / a) / a);
    let u0 = PI * (8.0f64.max(30.0 * a) / PI).ceil();
    let mut breaks = Vec::new();
    breaks.push(0.0);
    let mut b = a * 0.125;
    while b < u0.min(PI) {
        breaks.push(b);
        b *= 2.0;
    }
    let mut u = PI;
    while u < u0 {
        breaks.push(u);
        u += PI;
    }
    breaks.push(u0);
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    breaks.dedup();
    let mut g_mut = g;
    let head = integ.integrate_breaks(&mut g_mut, &breaks)?.value;

    // Oscillatory tail: alternating half periods, accelerated.
    let osc = |u: f64| Complex64::new((s * u).cos(), (s * u).sin()) * (h(u / a) / a);
    let mut partial = Vec::with_capacity(48);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = u0;
    for _ in 0..40 {
        acc += integ.integrate(osc, lo, lo + PI)?.value;
        partial.push(acc);
        lo += PI;
    }
    let tail_osc = wynn_epsilon(&partial);

    // Polynomial part beyond u0: −Σ_k (ia·s)^k/k!·∫_{u0/a}^∞ x^k h(x) dx.
    let mut tail_poly = Complex64::new(0.0, 0.0);
    if let Some(k) = k {
        let x0 = u0 / a;
        let mut c = Complex64::new(1.0, 0.0);
        for j in 0..=k {
            if j > 0 {
                c = c * Complex64::new(0.0, s * a) / j as f64;
            }
            let m = integ
                .integrate_power_tail(|x: f64| x.powi(j as i32) * h(x), x0)?
                .value;
            tail_poly -= c * m;
        }
    }
    Ok(head + tail_osc + tail_poly)
}

fn integrator(cfg: &OracleConfig, rel: f64) -> Integrator {
    Integrator::new(cfg.quad_abs_tol, rel).with_max_panels(cfg.quad_panel_limit)
}

/// φ(θ) = ∫ e^{iθx} f(x) dx.
pub fn charfn_numeric(spec: &DensitySpec, theta: f64, cfg: &OracleConfig) -> Result<Complex64> {
    if theta == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let integ = integrator(cfg, 1e-12);
    let right = |x: f64| spec.density(x);
    let left = |x: f64| spec.density(-x);
    let r = half_transform(&right, theta, None, &integ)?;
    let l = if spec.is_symmetric() {
        r.conj()
    } else {
        half_transform(&left, -theta, None, &integ)?
    };
    Ok(r + l)
}

/// R_K(θ) = φ(θ) − Σ_{k≤K} m_k(iθ)^k/k!, with relative accuracy even when
/// it is many orders below 1.
pub fn charfn_remainder(spec: &DensitySpec, theta: f64, k: usize, cfg: &OracleConfig) -> Result<Complex64> {
    if k > spec.max_moment() {
        return Err(Error::MomentDiverges {
            order: k,
            index: spec.min_index(),
        });
    }
    if theta == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let integ = Integrator::new(1e-300, 1e-11).with_max_panels(cfg.quad_panel_limit);
    let right = |x: f64| spec.density(x);
    let left = |x: f64| spec.density(-x);
    let r = half_transform(&right, theta, Some(k), &integ)?;
    let l = if spec.is_symmetric() {
        r.conj()
    } else {
        half_transform(&left, -theta, Some(k), &integ)?
    };
    Ok(r + l)
}

/// ψ(θ) = log φ(θ), built as log1p of the moment polynomial plus R_K so
/// that small θ keeps full relative accuracy.
pub fn cgf_numeric(spec: &DensitySpec, theta: f64, cfg: &OracleConfig) -> Result<Complex64> {
    let k = spec.max_moment();
    let mut w = charfn_remainder(spec, theta, k, cfg)?;
    let it = Complex64::new(0.0, theta);
    let mut p = Complex64::new(1.0, 0.0);
    for j in 1..=k {
        p = p * it / j as f64;
        w += p * spec.moment(j)?;
    }
    Ok(log1p(w))
}

fn log1p(w: Complex64) -> Complex64 {
    if w.norm() < 0.25 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for r in 1..200 {
            p *= w;
            let term = p / r as f64;
            if r % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (Complex64::new(1.0, 0.0) + w).ln()
    }
}

/// Density of S_n/√n by Fourier inversion on a cached grid of φ values.
///
/// The grid is built for the smallest n of interest; larger n reuse it
/// (|φ|^n only shrinks).
#[derive(Debug, Clone)]
pub struct InversionOracle {
    nodes: Vec<(f64, f64, Complex64)>,
    /// max |φ| over this node and every later one
    envelope: Vec<f64>,
    n_min: u64,
    cutoff: f64,
}

impl InversionOracle {
    pub fn new(spec: &DensitySpec, n_min: u64, cfg: &OracleConfig) -> Result<Self> {
        if n_min == 0 {
            return Err(Error::domain("n must be positive"));
        }
        let mut nodes = Vec::new();
        let mut lo = 0.0;
        let mut quiet = 0;
        loop {
            let step = if lo < 2.0 { 0.05 } else { 0.25 };
            let hi = lo + step;
            let mut panel = Vec::with_capacity(21);
            gk21_nodes(lo, hi, |t, w| panel.push((t, w)));
            let mut biggest: f64 = 0.0;
            for (t, w) in panel {
                let phi = charfn_numeric(spec, t, cfg)?;
                biggest = biggest.max(phi.norm().powi(n_min as i32));
                nodes.push((t, w, phi));
            }
            lo = hi;
            // φ of a symmetric law is real and may cross zero, so one small panel is not enough
            quiet = if biggest < cfg.inversion_theta_cutoff { quiet + 1 } else { 0 };
            if quiet >= 4 {
                break;
            }
            if lo >= cfg.inversion_t_max {
                break;
            }
        }
        let mut envelope = alloc::vec![0.0; nodes.len()];
        let mut running: f64 = 0.0;
        for (i, node) in nodes.iter().enumerate().rev() {
            running = running.max(node.2.norm());
            envelope[i] = running;
        }
        Ok(InversionOracle {
            nodes,
            envelope,
            n_min,
            cutoff: cfg.inversion_theta_cutoff,
        })
    }

    /// f_{S_n/√n}(x) = (√n/π)∫_0^∞ Re[e^{−i√n t x} φ(t)^n] dt.
    pub fn density(&self, x: f64, n: u64) -> Result<f64> {
        if n < self.n_min {
            return Err(Error::domain("oracle grid was built for a larger n"));
        }
        let rn = (n as f64).sqrt();
        let mut sum = 0.0;
        for (&(t, w, phi), &env) in self.nodes.iter().zip(&self.envelope) {
            if env.powi(n as i32) < 1e-3 * self.cutoff {
                break;
            }
            let pn = phi.powu(n as u32);
            let arg = -rn * t * x;
            sum += w * (pn.re * arg.cos() - pn.im * arg.sin());
        }
        Ok(rn / PI * sum)
    }

    /// φ(t) at the cached nodes.
    pub fn phi_nodes(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.nodes.iter().map(|&(t, _, p)| (t, p))
    }

    /// P(S_n/√n > x) = 1/2 − (1/π)∫_0^∞ Im[e^{−i√n t x}φ(t)^n]/t dt.
    pub fn survival(&self, x: f64, n: u64) -> Result<f64> {
        if n < self.n_min {
            return Err(Error::domain("oracle grid was built for a larger n"));
        }
        let rn = (n as f64).sqrt();
        let mut sum = 0.0;
        for (&(t, w, phi), &env) in self.nodes.iter().zip(&self.envelope) {
            if env.powi(n as i32) < 1e-3 * self.cutoff {
                break;
            }
            let pn = phi.powu(n as u32);
            let z = Complex64::new(0.0, -rn * t * x).exp() * pn;
            sum += w * z.im / t;
        }
        Ok(0.5 + sum / PI)
    }
}

/// One-off inversion at a single (x, n).
pub fn density_by_inversion(spec: &DensitySpec, x: f64, n: u64, cfg: &OracleConfig) -> Result<f64> {
    InversionOracle::new(spec, n, cfg)?.density(x, n)
}

fn kernel_quadrature<F: Fn(f64) -> f64>(alpha: f64, x: f64, trig: F, zero_shift: f64) -> Result<f64> {
    let t_max = alpha.sqrt() + 12.0;
    let mut breaks = alloc::vec![0.0];
    if x != 0.0 {
        let ax = x.abs();
        let mut k = 0.0;
        loop {
            let z = (k + zero_shift) * PI / ax;
            if z >= t_max {
                break;
            }
            if z > 0.0 {
                breaks.push(z);
            }
            k += 1.0;
        }
    }
    breaks.push(1.0);
    breaks.push(t_max);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let integ = Integrator::new(1e-300, 1e-13).with_max_panels(10_000);
    let mut f = |t: f64| trig(t) * t.powf(alpha) * (-0.5 * t * t).exp();
    Ok(integ.integrate_breaks(&mut f, &breaks)?.value)
}

/// ∫ e^{−iθx−θ²/2}|θ|^α dθ = 2∫_0^∞ cos(θx)θ^α e^{−θ²/2} dθ by quadrature.
pub fn kernel_even_quadrature(alpha: f64, x: f64) -> Result<f64> {
    Ok(2.0 * kernel_quadrature(alpha, x, |t| (t * x).cos(), 0.5)?)
}

/// ∫ e^{−iθx−θ²/2}sgn(θ)|θ|^α dθ = −2i∫_0^∞ sin(θx)θ^α e^{−θ²/2} dθ by quadrature.
pub fn kernel_odd_quadrature(alpha: f64, x: f64) -> Result<Complex64> {
    let v = kernel_quadrature(alpha, x, |t| (t * x).sin(), 1.0)?;
    Ok(Complex64::new(0.0, -2.0 * v))
}
