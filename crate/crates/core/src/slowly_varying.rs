//! Slowly varying functions L and their integrals ζ_L(x) = ∫_1^x L(u)/u du.

#[allow(unused_imports)] // needed without std, shadowed by inherent methods with it
use num_traits::Float;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::quadrature::{gk21, Integrator};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Constant(f64),
    /// (ln(shift + x))^power
    LogPower { power: f64, shift: f64 },
    Custom {
        eval: RealFn,
        deriv: RealFn,
        zeta: Option<RealFn>,
    },
    /// factor · L(arg_scale · x)
    Scaled {
        inner: Arc<SlowlyVarying>,
        factor: f64,
        arg_scale: f64,
    },
    Sum(Vec<(f64, SlowlyVarying)>),
}

/// A slowly varying function with evaluators for L, L' and ζ_L.
///
/// Immutable after construction. Kinds without a closed-form ζ_L get an
/// interpolation table built eagerly by the constructor, so every read is
/// lock free.
#[derive(Clone)]
pub struct SlowlyVarying {
    kind: Kind,
    table: Option<Arc<ZetaTable>>,
}

impl fmt::Debug for SlowlyVarying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Constant(c) => write!(f, "Constant({c})"),
            Kind::LogPower { power, shift } => write!(f, "LogPower(power={power}, shift={shift})"),
            Kind::Custom { .. } => write!(f, "Custom"),
            Kind::Scaled {
                inner,
                factor,
                arg_scale,
            } => write!(f, "{factor}*{inner:?}({arg_scale}x)"),
            Kind::Sum(parts) => f.debug_list().entries(parts.iter()).finish(),
        }
    }
}

impl SlowlyVarying {
    pub fn constant(c: f64) -> Self {
        SlowlyVarying {
            kind: Kind::Constant(c),
            table: None,
        }
    }

    /// L(x) = ln(x)^power. Negative below x = 1; mainly a ζ reference.
    pub fn log_power(power: f64) -> Self {
        SlowlyVarying {
            kind: Kind::LogPower { power, shift: 0.0 },
            table: None,
        }
    }

    /// L(x) = ln(shift + x)^power, positive on x ≥ 0 when shift > 1.
    pub fn log_power_shifted(power: f64, shift: f64) -> Self {
        if shift == 0.0 {
            return Self::log_power(power);
        }
        Self::with_table(Kind::LogPower { power, shift })
    }

    /// User supplied L and L', with an optional closed-form ζ_L.
    pub fn custom(eval: RealFn, deriv: RealFn, zeta: Option<RealFn>) -> Self {
        let has_zeta = zeta.is_some();
        let kind = Kind::Custom { eval, deriv, zeta };
        if has_zeta {
            SlowlyVarying { kind, table: None }
        } else {
            Self::with_table(kind)
        }
    }

    /// x ↦ factor · L(arg_scale · x).
    pub fn scaled(&self, factor: f64, arg_scale: f64) -> Self {
        if let Kind::Constant(c) = self.kind {
            return Self::constant(c * factor);
        }
        SlowlyVarying {
            kind: Kind::Scaled {
                inner: Arc::new(self.clone()),
                factor,
                arg_scale,
            },
            table: None,
        }
    }

    /// Σ w_i L_i.
    pub fn combination(parts: Vec<(f64, SlowlyVarying)>) -> Self {
        SlowlyVarying {
            kind: Kind::Sum(parts),
            table: None,
        }
    }

    fn with_table(kind: Kind) -> Self {
        let mut sv = SlowlyVarying { kind, table: None };
        let table = ZetaTable::build(&sv);
        sv.table = Some(Arc::new(table));
        sv
    }

    pub fn kind_tag(&self) -> &'static str {
        match self.kind {
            Kind::Constant(_) => "constant",
            Kind::LogPower { .. } => "log-power",
            Kind::Custom { .. } => "custom",
            Kind::Scaled { .. } => "scaled",
            Kind::Sum(_) => "combination",
        }
    }

    /// The constant value when L is constant.
    pub fn as_constant(&self) -> Option<f64> {
        match self.kind {
            Kind::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Constant(c) => *c,
            Kind::LogPower { power, shift } => (shift + x).ln().powf(*power),
            Kind::Custom { eval, .. } => eval(x),
            Kind::Scaled {
                inner,
                factor,
                arg_scale,
            } => factor * inner.eval(arg_scale * x),
            Kind::Sum(parts) => parts.iter().map(|(w, l)| w * l.eval(x)).sum(),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Constant(_) => 0.0,
            Kind::LogPower { power, shift } => {
                let y = shift + x;
                power * y.ln().powf(power - 1.0) / y
            }
            Kind::Custom { deriv, .. } => deriv(x),
            Kind::Scaled {
                inner,
                factor,
                arg_scale,
            } => factor * arg_scale * inner.deriv(arg_scale * x),
            Kind::Sum(parts) => parts.iter().map(|(w, l)| w * l.deriv(x)).sum(),
        }
    }

    /// ζ_L(x) = ∫_1^x L(u)/u du for x ≥ 1.
    pub fn zeta(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::domain("zeta needs x >= 1"));
        }
        Ok(self.zeta_extended(x))
    }

    /// ∫_1^x L(u)/u du for any x > 0 (negative below 1).
    pub fn zeta_extended(&self, x: f64) -> f64 {
        if x == 1.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Constant(c) => c * x.ln(),
            Kind::LogPower { power, shift } if *shift == 0.0 => {
                let l = x.ln();
                // sign-aware power for ln x < 0
                let p1 = power + 1.0;
                if l >= 0.0 {
                    l.powf(p1) / p1
                } else {
                    let r = p1.round();
                    if (p1 - r).abs() < 1e-12 {
                        l.powi(r as i32) / p1
                    } else {
                        f64::NAN
                    }
                }
            }
            Kind::Custom {
                zeta: Some(zeta), ..
            } => zeta(x),
            Kind::Scaled {
                inner,
                factor,
                arg_scale,
            } => factor * (inner.zeta_extended(arg_scale * x) - inner.zeta_extended(*arg_scale)),
            Kind::Sum(parts) => parts.iter().map(|(w, l)| w * l.zeta_extended(x)).sum(),
            _ => match &self.table {
                Some(t) => t.eval(self, x),
                None => direct_zeta(self, 0.0, x.ln()),
            },
        }
    }
}

/// ∫_{v0}^{v1} L(e^v) dv.
fn direct_zeta(l: &SlowlyVarying, v0: f64, v1: f64) -> f64 {
    let (lo, hi, sign) = if v1 >= v0 { (v0, v1, 1.0) } else { (v1, v0, -1.0) };
    let integ = Integrator::new(1e-15, 1e-13).with_max_panels(4000);
    let mut f = |v: f64| l.eval(v.exp());
    let mut breaks = Vec::new();
    let mut v = lo;
    while v < hi {
        breaks.push(v);
        v += 4.0;
    }
    breaks.push(hi);
    let r = integ
        .integrate_breaks(&mut f, &breaks)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    sign * r
}

/// Cumulative ζ on a uniform grid in v = ln x with piecewise cubic Hermite
/// interpolation. The node slopes are exact (dζ/dv = L(e^v)), so the
/// interpolation error is O(h⁴) and h = 1/32 keeps it below 1e−8.
struct ZetaTable {
    v_lo: f64,
    h: f64,
    zeta: Vec<f64>,
    slope: Vec<f64>,
}

const TABLE_V_LO: f64 = -13.815_510_557_964_274; // ln 1e-6
const TABLE_V_HI: f64 = 36.841_361_487_904_734; // ln 1e16
const TABLE_STEPS_PER_UNIT: f64 = 32.0;

impl ZetaTable {
    fn build(l: &SlowlyVarying) -> Self {
        let h = 1.0 / TABLE_STEPS_PER_UNIT;
        let n = ((TABLE_V_HI - TABLE_V_LO) / h).ceil() as usize;
        let mut f = |v: f64| l.eval(v.exp());
        let mut cum = Vec::with_capacity(n + 1);
        let mut slope = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        slope.push(f(TABLE_V_LO));
        for i in 0..n {
            let a = TABLE_V_LO + i as f64 * h;
            let (v, _) = gk21(&mut f, a, a + h);
            acc += v;
            cum.push(acc);
            slope.push(f(a + h));
        }
        // Shift so the table value at v = 0 (x = 1) is exactly zero.
        let mut t = ZetaTable {
            v_lo: TABLE_V_LO,
            h,
            zeta: cum,
            slope,
        };
        let z0 = t.interp(0.0);
        for z in t.zeta.iter_mut() {
            *z -= z0;
        }
        t
    }

    fn interp(&self, v: f64) -> f64 {
        let s = (v - self.v_lo) / self.h;
        let i = (s.floor() as usize).min(self.zeta.len() - 2);
        let t = s - i as f64;
        let (y0, y1) = (self.zeta[i], self.zeta[i + 1]);
        let (m0, m1) = (self.slope[i] * self.h, self.slope[i + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    fn eval(&self, l: &SlowlyVarying, x: f64) -> f64 {
        let v = x.ln();
        let v_hi = self.v_lo + self.h * (self.zeta.len() - 1) as f64;
        if v < self.v_lo {
            *self.zeta.first().unwrap() + direct_zeta(l, self.v_lo, v)
        } else if v > v_hi {
            *self.zeta.last().unwrap() + direct_zeta(l, v_hi, v)
        } else {
            self.interp(v)
        }
    }
}

/// Checks the Karamata-type bound L(x/θ)/L(1/θ) ≤ C·x^{ρ1} for x > 1 and
/// ≤ C·x^{−ρ2} for x ≤ 1, with C = 10.
pub fn karamata_bound_check(l: &SlowlyVarying, rho1: f64, rho2: f64, theta: f64, xs: &[f64]) -> bool {
    const C: f64 = 10.0;
    let base = l.eval(1.0 / theta);
    xs.iter().all(|&x| {
        let ratio = l.eval(x / theta) / base;
        let bound = if x > 1.0 { C * x.powf(rho1) } else { C * x.powf(-rho2) };
        ratio.is_finite() && ratio <= bound
    })
}
