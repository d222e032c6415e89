//! Adaptive Gauss–Kronrod quadrature and series acceleration.
//!
//! The core crate is `no_std`, so the integrators live here rather than in a
//! dependency. Integrands may be real or complex valued.

#[allow(unused_imports)] // needed without std, shadowed by inherent methods with it
use num_traits::Float;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], positive half, descending; the last one is 0.
pub const GK21_NODES: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

pub const GK21_WEIGHTS: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7, 9).
const G10_WEIGHTS: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Values that can be integrated: closed under addition and real scaling.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// One 21-point Kronrod rule on [a, b], returning the estimate and |K − G|.
pub fn gk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK21_WEIGHTS[10];
    let mut g = T::zero();
    for i in 0..10 {
        let dx = h * GK21_NODES[i];
        let s = f(c - dx) + f(c + dx);
        k = k + s * GK21_WEIGHTS[i];
        if i % 2 == 1 {
            g = g + s * G10_WEIGHTS[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    let err = (k - g).magnitude();
    (k, err)
}

/// Visit the 21 Kronrod nodes of [a, b] with their weights.
pub fn gk21_nodes(a: f64, b: f64, mut visit: impl FnMut(f64, f64)) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    for i in 0..10 {
        visit(c - h * GK21_NODES[i], h * GK21_WEIGHTS[i]);
        visit(c + h * GK21_NODES[i], h * GK21_WEIGHTS[i]);
    }
    visit(c, h * GK21_WEIGHTS[10]);
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_panels: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Integrator {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// Integrate over [a, b] with global bisection of the worst panel.
    pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
    ) -> Result<QuadResult<T>> {
        self.integrate_breaks(&mut f, &[a, b])
    }

    /// Like [`Integrator::integrate`] but starts from the given breakpoints.
    pub fn integrate_breaks<T: QuadValue, F: FnMut(f64) -> T>(
        &self,
        f: &mut F,
        breaks: &[f64],
    ) -> Result<QuadResult<T>> {
        let mut segs: Vec<(f64, f64, T, f64)> = Vec::with_capacity(64);
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                let (v, e) = gk21(f, w[0], w[1]);
                segs.push((w[0], w[1], v, e));
            }
        }
        let mut total = T::zero();
        let mut err = 0.0;
        for s in &segs {
            total = total + s.2;
            err += s.3;
        }
        loop {
            let target = self.abs_tol.max(self.rel_tol * total.magnitude());
            if err <= target {
                break;
            }
            if segs.len() >= self.max_panels {
                return Err(Error::QuadratureNonConvergence {
                    panels: segs.len(),
                    error_estimate: err,
                });
            }
            let (idx, _) = segs
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
            let (a, b, v, e) = segs[idx];
            let m = 0.5 * (a + b);
            if !(m > a && m < b) || (b - a) < 1e-15 * (a.abs() + b.abs()) {
                // Panel at the resolution limit: accept what is left.
                break;
            }
            let (v1, e1) = gk21(f, a, m);
            let (v2, e2) = gk21(f, m, b);
            total = total - v + v1 + v2;
            err += e1 + e2 - e;
            segs[idx] = (a, m, v1, e1);
            segs.push((m, b, v2, e2));
        }
        // Recompute the sum to shed accumulated update rounding.
        let mut value = T::zero();
        let mut error = 0.0;
        for s in &segs {
            value = value + s.2;
            error += s.3;
        }
        Ok(QuadResult {
            value,
            error,
            panels: segs.len(),
        })
    }

    /// ∫_{x0}^∞ f for an integrand with at most power-law decay, x0 > 0.
    ///
    /// Substitutes x = x0·e^u so a power tail becomes an exponential one, then
    /// walks unit panels in u until their contributions are negligible.
    pub fn integrate_power_tail<T: QuadValue, F: FnMut(f64) -> T>(
        &self,
        mut f: F,
        x0: f64,
    ) -> Result<QuadResult<T>> {
        let mut g = |u: f64| {
            let x = x0 * u.exp();
            f(x) * x
        };
        let mut total = T::zero();
        let mut error = 0.0;
        let mut panels = 0;
        let mut quiet = 0;
        let mut u = 0.0;
        let step = 1.0;
        while quiet < 4 {
            let r = self.integrate(&mut g, u, u + step)?;
            total = total + r.value;
            error += r.error;
            panels += r.panels;
            let scale = self.abs_tol.max(self.rel_tol * total.magnitude());
            if r.value.magnitude() < 0.1 * scale {
                quiet += 1;
            } else {
                quiet = 0;
            }
            u += step;
            if u > 745.0 || panels > 50 * self.max_panels {
                return Err(Error::QuadratureNonConvergence {
                    panels,
                    error_estimate: r.value.magnitude(),
                });
            }
        }
        Ok(QuadResult {
            value: total,
            error,
            panels,
        })
    }
}

/// Wynn's epsilon algorithm on a sequence of partial sums.
///
/// Returns the last even-column entry of the epsilon table, which is the
/// accelerated limit for alternating or geometrically converging sums.
pub fn wynn_epsilon<T>(partial_sums: &[T]) -> T
where
    T: QuadValue + core::ops::Div<Output = T> + From<f64>,
{
    let n = partial_sums.len();
    if n < 3 {
        return *partial_sums.last().expect("nonempty sequence");
    }
    // eps[k] holds column k of the table for the current diagonal.
    let mut prev: Vec<T> = partial_sums.to_vec();
    let mut prev2: Vec<T> = alloc::vec![T::zero(); n + 1];
    let mut best = partial_sums[n - 1];
    let mut col = 0;
    while prev.len() > 1 {
        let mut next = Vec::with_capacity(prev.len() - 1);
        for i in 0..prev.len() - 1 {
            let d = prev[i + 1] - prev[i];
            if d.magnitude() < 1e-300 {
                return if col % 2 == 0 { prev[i + 1] } else { best };
            }
            next.push(prev2[i + 1] + T::from(1.0) / d);
        }
        prev2 = prev;
        prev = next;
        col += 1;
        if col % 2 == 0 {
            if let Some(v) = prev.last() {
                best = *v;
            }
        }
    }
    best
}
