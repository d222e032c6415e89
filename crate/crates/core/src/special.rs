//! Special functions for the correction terms.
//!
//! `E(x)` below always means `D(x/√2)` with `D` Dawson's integral; the odd
//! index correction is built from its derivatives.

#[allow(unused_imports)] // needed without std, shadowed by inherent methods with it
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::parity::{Parity, ParityClass};
use crate::quadrature::Integrator;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// sin(πx), exactly zero at integers.
pub fn sinpi(x: f64) -> f64 {
    let r = x.round();
    let f = x - r;
    let s = (PI * f).sin();
    if (r as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// cos(πx), exactly zero at half integers.
pub fn cospi(x: f64) -> f64 {
    sinpi(x + 0.5)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Probabilists' Hermite polynomial H_k(x).
pub fn hermite(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (mut h0, mut h1) = (1.0, x);
    for j in 1..k {
        let h2 = x * h1 - j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// H_0(x), ..., H_kmax(x).
pub fn hermite_all(kmax: usize, x: f64) -> Vec<f64> {
    let mut h = vec![1.0; kmax + 1];
    if kmax >= 1 {
        h[1] = x;
    }
    for j in 1..kmax {
        h[j + 1] = x * h[j] - j as f64 * h[j - 1];
    }
    h
}

/// Dawson's integral e^{−z²}∫_0^z e^{t²}dt.
pub fn dawson(z: f64) -> f64 {
    let a = z.abs();
    let v = if a < 1.0 {
        dawson_series(a)
    } else if a <= 7.0 {
        dawson_rybicki(a)
    } else {
        dawson_asymptotic(a)
    };
    if z < 0.0 {
        -v
    } else {
        v
    }
}

fn dawson_series(z: f64) -> f64 {
    // z Σ (−2z²)^k / (2k+1)!!
    let y = -2.0 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= y / (2.0 * k + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    z * sum
}

fn dawson_rybicki(z: f64) -> f64 {
    // Sampling theorem sum over odd offsets around the nearest even grid
    // point; the aliasing error is of order exp(−(π/2h)²).
    const H: f64 = 0.2;
    const TERMS: usize = 17;
    let n0 = 2.0 * (0.5 * z / H).round();
    let xp = z - n0 * H;
    let mut e1 = (2.0 * xp * H).exp();
    let e2 = e1 * e1;
    let mut d1 = n0 + 1.0;
    let mut d2 = d1 - 2.0;
    let mut sum = 0.0;
    for i in 0..TERMS {
        let c = (-((2 * i + 1) as f64 * H).powi(2)).exp();
        sum += c * (e1 / d1 + 1.0 / (d2 * e1));
        d1 += 2.0;
        d2 -= 2.0;
        e1 *= e2;
    }
    FRAC_1_SQRT_PI * (-xp * xp).exp() * sum
}

fn dawson_asymptotic(z: f64) -> f64 {
    let y = 1.0 / (2.0 * z * z);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let next = term * (2.0 * k - 1.0) * y;
        if next.abs() >= term.abs() || next.abs() < 1e-17 {
            sum += next;
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * z)
}

/// Largest order for which the exact integer recurrence cannot overflow.
pub const MAX_EXACT_ORDER: usize = 48;

/// Exact coefficients of d^n/dx^n D(x/√2) = p_n(x)·D(x/√2) + q_n(x)/√2.
///
/// The recurrences p_{n+1} = p_n' − x·p_n and q_{n+1} = p_n + q_n' start from
/// p_0 = 1, q_0 = 0 and keep every coefficient an integer, so `i128` holds
/// them exactly (p_n is (−1)^n times the Hermite polynomial He_n). Stored
/// lowest power first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DawsonDerivativePolys {
    pub order: usize,
    pub p_coeffs: Vec<i128>,
    pub q_coeffs: Vec<i128>,
}

impl DawsonDerivativePolys {
    pub fn new(order: usize) -> Result<Self> {
        if order > MAX_EXACT_ORDER {
            return Err(Error::domain("Dawson derivative order above exact range"));
        }
        let mut p: Vec<i128> = vec![1];
        let mut q: Vec<i128> = vec![0];
        for _ in 0..order {
            let mut np = vec![0i128; p.len() + 1];
            for (k, &c) in p.iter().enumerate() {
                if k > 0 {
                    np[k - 1] += k as i128 * c;
                }
                np[k + 1] -= c;
            }
            let mut nq = vec![0i128; p.len().max(q.len())];
            for (k, &c) in p.iter().enumerate() {
                nq[k] += c;
            }
            for (k, &c) in q.iter().enumerate().skip(1) {
                nq[k - 1] += k as i128 * c;
            }
            trim(&mut nq);
            p = np;
            q = nq;
        }
        Ok(DawsonDerivativePolys {
            order,
            p_coeffs: p,
            q_coeffs: q,
        })
    }

    pub fn p(&self, x: f64) -> f64 {
        horner(&self.p_coeffs, x)
    }

    /// q_n(x) including the 1/√2 factor.
    pub fn q(&self, x: f64) -> f64 {
        horner(&self.q_coeffs, x) * FRAC_1_SQRT_2
    }

    /// Value and a rounding-error bound of the polynomial form at x.
    pub fn eval_with_bound(&self, x: f64) -> (f64, f64) {
        let e = dawson(x * FRAC_1_SQRT_2);
        let pv = self.p(x);
        let qv = self.q(x);
        let scale =
            horner_abs(&self.p_coeffs, x) * e.abs() + horner_abs(&self.q_coeffs, x) * FRAC_1_SQRT_2;
        let bound = scale * f64::EPSILON * (self.order as f64 + 4.0);
        (pv * e + qv, bound)
    }
}

fn trim(c: &mut Vec<i128>) {
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
}

fn horner(c: &[i128], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k as f64)
}

fn horner_abs(c: &[i128], x: f64) -> f64 {
    let ax = x.abs();
    c.iter().rev().fold(0.0, |acc, &k| acc * ax + (k as f64).abs())
}

/// d^n/dx^n D(x/√2).
///
/// Uses the exact polynomial form wherever its rounding bound is small
/// relative to the result; otherwise (large x, where p_n·E and q_n cancel)
/// falls back to a steepest-descent integral representation.
pub fn dawson_scaled_derivative(n: usize, x: f64) -> f64 {
    if n == 0 {
        return dawson(x * FRAC_1_SQRT_2);
    }
    if let Ok(polys) = DawsonDerivativePolys::new(n) {
        let (v, bound) = polys.eval_with_bound(x);
        if bound <= 1e-13 * v.abs() {
            return v;
        }
    }
    dawson_derivative_contour(n, x)
}

/// Contour form of E^{(n)}(x); accurate for every x.
///
/// Deforming ∫_0^∞ (is)^n e^{−s²/2+ixs} ds through the saddle s = ix gives
/// E^{(n)}(x) = [(−1)^n ∫_0^x t^n e^{t²/2−xt} dt + e^{−x²/2}·I_n(x)]/√2 for
/// x ≥ 0, with I_n(x) = ∫_0^∞ Im[(iu − x)^n] e^{−u²/2} du a polynomial.
pub fn dawson_derivative_contour(n: usize, x: f64) -> f64 {
    if x < 0.0 {
        let v = dawson_derivative_contour(n, -x);
        return if n % 2 == 0 { -v } else { v };
    }
    if x == 0.0 {
        return FRAC_1_SQRT_2 * contour_poly(n, 0.0);
    }
    let nf = n as f64;
    let peak = (nf / x).min(x);
    let integrator = Integrator::new(0.0, 1e-14).with_max_panels(400);
    let breaks = [0.0, 0.5 * peak, peak, 0.5 * (peak + x), x];
    let mut f = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            (nf * t.ln() + t * (0.5 * t - x)).exp()
        }
    };
    let i1 = integrator
        .integrate_breaks(&mut f, &breaks)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    FRAC_1_SQRT_2 * (sign * i1 + (-0.5 * x * x).exp() * contour_poly(n, x))
}

fn contour_poly(n: usize, x: f64) -> f64 {
    // Σ_{k odd} C(n,k)·Im(i^k)·(−x)^{n−k}·∫_0^∞ u^k e^{−u²/2} du
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut moment = 1.0; // 2^{(k−1)/2}·((k−1)/2)! for k = 1
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        if k % 2 == 1 {
            let im = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sum += binom * im * (-x).powi((n - k) as i32) * moment;
            moment *= (k + 1) as f64;
        }
    }
    sum
}

/// Classical parabolic cylinder function D_ν(z) for ν > −1.
///
/// Evaluated from non-oscillatory contour forms of the defining integral
/// (see [`parabolic_cylinder_oscillatory`] for the direct panel form):
/// for z ≥ 0 the contour runs along the steepest-descent ray, and for
/// z = −w < 0 an extra segment [0, w] picks up the exponentially large part.
pub fn parabolic_cylinder(nu: f64, z: f64) -> Result<f64> {
    if !(nu > -1.0) {
        return Err(Error::domain("parabolic cylinder needs nu > -1"));
    }
    let integrator = Integrator::new(0.0, 1e-14).with_max_panels(600);
    let w = z.abs();
    let s_max = nu.max(0.0).sqrt() + 12.0;
    let phase0 = if z >= 0.0 { 0.0 } else { 0.5 * PI };
    let mut ray = |s: f64| {
        let angle = if z >= 0.0 { s.atan2(w) } else { w.atan2(s) };
        let r2 = s * s + w * w;
        let mag = if r2 > 0.0 {
            (-0.5 * s * s + 0.5 * nu * r2.ln()).exp()
        } else {
            0.0
        };
        mag * (nu * (phase0 + angle)).cos()
    };
    let breaks = [0.0, 1.0, 0.5 * s_max, s_max];
    // near a zero of D_ν the ray integral cancels; measure error against ∫|integrand|
    let mut ray_abs = |s: f64| {
        let r2 = s * s + w * w;
        if r2 > 0.0 {
            (-0.5 * s * s + 0.5 * nu * r2.ln()).exp()
        } else {
            0.0
        }
    };
    let scale = Integrator::new(0.0, 1e-6).integrate_breaks(&mut ray_abs, &breaks)?.value;
    let ray_int = Integrator { abs_tol: 1e-15 * scale, ..integrator }
        .integrate_breaks(&mut ray, &breaks)?
        .value;
    let mut value = (-0.25 * w * w).exp() * ray_int;
    if z < 0.0 {
        let s = sinpi(nu);
        if s != 0.0 {
            let mut seg = |u: f64| {
                if u <= 0.0 {
                    if nu == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (nu * u.ln() + u * (0.5 * u - w)).exp()
                }
            };
            let peak = (nu.max(0.0) / w).min(w);
            let br = [0.0, 0.5 * peak, peak, 0.5 * (peak + w), w];
            let seg_int = integrator.integrate_breaks(&mut seg, &br)?.value;
            value -= s * (0.25 * w * w).exp() * seg_int;
        }
    }
    Ok((2.0 / PI).sqrt() * value)
}

/// D_ν(z) straight from √(2/π)e^{z²/4}∫_0^∞ e^{−t²/2}t^ν cos(zt − νπ/2)dt.
///
/// Integrates between consecutive zeros of the cosine on [0, T] with
/// T = max(40, 4|z| + 40). Loses relative accuracy once D_ν(z) is small
/// next to e^{z²/4}, so it serves as an independent check for moderate z.
pub fn parabolic_cylinder_oscillatory(nu: f64, z: f64) -> Result<f64> {
    if !(nu > -1.0) {
        return Err(Error::domain("parabolic cylinder needs nu > -1"));
    }
    let t_max = 40.0f64.max(4.0 * z.abs() + 40.0);
    let mut breaks = vec![0.0];
    if z != 0.0 {
        // zt − νπ/2 = π/2 + kπ
        let az = z.abs();
        let shift = if z > 0.0 { 0.5 * PI * (nu + 1.0) } else { -0.5 * PI * (nu + 1.0) };
        let kmin = ((-shift) / PI).ceil() as i64;
        let mut k = kmin;
        loop {
            let t = (shift + k as f64 * PI) / az;
            if t >= t_max {
                break;
            }
            if t > 0.0 {
                breaks.push(t);
            }
            k += 1;
        }
    } else {
        breaks.push(1.0);
        breaks.push(nu.max(0.0).sqrt() + 1.0);
    }
    breaks.push(t_max);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let integrator = Integrator::new(1e-300, 1e-13).with_max_panels(20_000);
    let mut f = |t: f64| {
        if t <= 0.0 {
            if nu == 0.0 {
                (0.5 * PI * nu).cos()
            } else {
                0.0
            }
        } else {
            (-0.5 * t * t + nu * t.ln()).exp() * (z * t - 0.5 * PI * nu).cos()
        }
    };
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += integrator.integrate(&mut f, w[0], w[1])?.value;
    }
    Ok((2.0 / PI).sqrt() * (0.25 * z * z).exp() * total)
}

fn require_alpha(alpha: f64) -> Result<()> {
    if alpha > 2.0 {
        Ok(())
    } else {
        Err(Error::domain("kernel needs alpha > 2"))
    }
}

/// ∫ e^{−iθx − θ²/2}|θ|^α dθ in closed form.
pub fn fourier_kernel_even_fn(alpha: f64, x: f64, parity: ParityClass) -> Result<f64> {
    require_alpha(alpha)?;
    Ok(match parity.tag {
        Parity::EvenInteger => {
            let a = parity.integer().unwrap() as usize;
            let sign = if (a / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sign * SQRT_2PI * (-0.5 * x * x).exp() * hermite(a, x)
        }
        Parity::OddInteger => {
            let a = parity.integer().unwrap() as usize;
            let sign = if ((a - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            2.0 * SQRT_2 * sign * dawson_scaled_derivative(a, x)
        }
        Parity::NonInteger => {
            let sum = parabolic_cylinder(alpha, x)? + parabolic_cylinder(alpha, -x)?;
            (0.5 * PI).sqrt() / cospi(0.5 * alpha) * (-0.25 * x * x).exp() * sum
        }
    })
}

/// ∫ e^{−iθx − θ²/2} sgn(θ)|θ|^α dθ in closed form (purely imaginary).
pub fn fourier_kernel_odd_fn(alpha: f64, x: f64, parity: ParityClass) -> Result<Complex64> {
    require_alpha(alpha)?;
    Ok(match parity.tag {
        Parity::EvenInteger => {
            // −2√2·i^{α+1}·E^{(α)}(x), with i^{α+1} = i·(−1)^{α/2}
            let a = parity.integer().unwrap() as usize;
            let sign = if (a / 2) % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(0.0, -2.0 * SQRT_2 * sign * dawson_scaled_derivative(a, x))
        }
        Parity::OddInteger => {
            // −√(2π)e^{−x²/2}·i^α·H_α(x), with i^α = i·(−1)^{(α−1)/2}
            let a = parity.integer().unwrap() as usize;
            let sign = if ((a - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(0.0, -SQRT_2PI * sign * (-0.5 * x * x).exp() * hermite(a, x))
        }
        Parity::NonInteger => {
            let diff = parabolic_cylinder(alpha, x)? - parabolic_cylinder(alpha, -x)?;
            let v = -(0.5 * PI).sqrt() / sinpi(0.5 * alpha) * (-0.25 * x * x).exp() * diff;
            Complex64::new(0.0, v)
        }
    })
}
