//! Heavy-tailed densities, standardization, moments and cumulants.

#[allow(unused_imports)] // needed without std, shadowed by inherent methods with it
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::parity::INTEGER_TOLERANCE;
use crate::quadrature::Integrator;
use crate::slowly_varying::SlowlyVarying;

/// Functional form of the unstandardized shape g(y).
///
/// * `SymmetricPareto`: a_f / (b_f + |y|^{1+α})
/// * `SymmetricRv`: L(|y|) / (1 + |y|^{1+α})
/// * `TwoSided`: L_+(y)/(1 + y^{1+β}) for y ≥ 0, L_−(−y)/(1 + |y|^{1+γ}) for y < 0
#[derive(Debug, Clone)]
pub enum Form {
    SymmetricPareto { alpha: f64, a_f: f64, b_f: f64 },
    SymmetricRv { alpha: f64, l: SlowlyVarying },
    TwoSided {
        beta: f64,
        gamma: f64,
        l_plus: SlowlyVarying,
        l_minus: SlowlyVarying,
    },
}

/// A density f(x) = σ·c·g(μ + σx) built from a shape g.
///
/// `c` normalizes the mass; (μ, σ) is the affine map that makes the variable
/// mean zero with unit variance once [`DensitySpec::standardized`] has run.
#[derive(Debug, Clone)]
pub struct DensitySpec {
    form: Form,
    c: f64,
    mu: f64,
    sigma: f64,
    standardized: bool,
    /// (∫_0^∞ y^i g(y) dy, ∫_0^∞ y^i g(−y) dy) for i = 0..=K.
    half_moments: Vec<(f64, f64)>,
}

/// Unit-mass, unit-variance constants (a_f, b_f) of a_f/(b_f + |x|^{1+α}).
pub fn standardize_pareto(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 2.0) {
        return Err(Error::domain("Pareto standardization needs alpha > 2"));
    }
    let p = 1.0 + alpha;
    // ∫_0^∞ x^{s−1}/(1 + x^p) dx = (π/p)/sin(πs/p)
    let a0 = p * (PI / p).sin() / (2.0 * PI);
    let var0 = (PI / p).sin() / (3.0 * PI / p).sin();
    let sigma = var0.sqrt();
    Ok((a0 * sigma.powf(-alpha), sigma.powf(-p)))
}

fn pareto_half_moment(i: usize, alpha: f64, a: f64, b: f64) -> f64 {
    let p = 1.0 + alpha;
    let s = (i + 1) as f64;
    a * b.powf(s / p - 1.0) * (PI / p) / (PI * s / p).sin()
}

fn check_index(x: f64, name: &str) -> Result<()> {
    if x > 2.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(alloc::format!("{name} must exceed 2, got {x}")))
    }
}

fn check_positive(l: &SlowlyVarying, name: &str) -> Result<()> {
    for &x in &[0.0, 0.5, 1.0, 10.0, 1e3, 1e6, 1e12] {
        let v = l.eval(x);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(alloc::format!(
                "{name} must be positive and finite on x >= 0 (value {v} at {x})"
            )));
        }
    }
    Ok(())
}

/// Largest integer strictly below `index`.
pub fn max_moment_order(index: f64) -> usize {
    let r = index.round();
    if (index - r).abs() < INTEGER_TOLERANCE {
        r as usize - 1
    } else {
        index.floor() as usize
    }
}

impl DensitySpec {
    /// Standardized symmetric Pareto a_f/(b_f + |x|^{1+α}).
    pub fn pareto(alpha: f64) -> Result<Self> {
        let (a, b) = standardize_pareto(alpha)?;
        let mut s = Self::from_form(Form::SymmetricPareto { alpha, a_f: a, b_f: b })?;
        s.c = 1.0;
        s.standardized = true;
        Ok(s)
    }

    /// a_f/(b_f + |y|^{1+α}) with the given constants, renormalized to unit
    /// mass but not standardized.
    pub fn pareto_raw(alpha: f64, a_f: f64, b_f: f64) -> Result<Self> {
        if !(a_f > 0.0 && b_f > 0.0) {
            return Err(Error::domain("Pareto constants must be positive"));
        }
        Self::from_form(Form::SymmetricPareto { alpha, a_f, b_f })
    }

    /// c·L(|y|)/(1 + |y|^{1+α}), not standardized.
    pub fn symmetric_rv(alpha: f64, l: SlowlyVarying) -> Result<Self> {
        check_positive(&l, "L")?;
        Self::from_form(Form::SymmetricRv { alpha, l })
    }

    /// Two-sided regularly varying shape, not standardized.
    pub fn two_sided(beta: f64, gamma: f64, l_plus: SlowlyVarying, l_minus: SlowlyVarying) -> Result<Self> {
        check_positive(&l_plus, "L_plus")?;
        check_positive(&l_minus, "L_minus")?;
        Self::from_form(Form::TwoSided {
            beta,
            gamma,
            l_plus,
            l_minus,
        })
    }

    fn from_form(form: Form) -> Result<Self> {
        let (ri, li) = match &form {
            Form::SymmetricPareto { alpha, .. } | Form::SymmetricRv { alpha, .. } => {
                check_index(*alpha, "alpha")?;
                (*alpha, *alpha)
            }
            Form::TwoSided { beta, gamma, .. } => {
                check_index(*beta, "beta")?;
                check_index(*gamma, "gamma")?;
                (*beta, *gamma)
            }
        };
        let k = max_moment_order(ri.min(li));
        let mut spec = DensitySpec {
            form,
            c: 1.0,
            mu: 0.0,
            sigma: 1.0,
            standardized: false,
            half_moments: Vec::new(),
        };
        spec.half_moments = (0..=k)
            .map(|i| spec.half_moment_pair(i))
            .collect::<Result<Vec<_>>>()?;
        let (p0, n0) = spec.half_moments[0];
        spec.c = 1.0 / (p0 + n0);
        Ok(spec)
    }

    fn half_moment_pair(&self, i: usize) -> Result<(f64, f64)> {
        match &self.form {
            Form::SymmetricPareto { alpha, a_f, b_f } => {
                let v = pareto_half_moment(i, *alpha, *a_f, *b_f);
                Ok((v, v))
            }
            Form::SymmetricRv { .. } => {
                let v = self.shape_half_moment(i, true)?;
                Ok((v, v))
            }
            Form::TwoSided { .. } => Ok((self.shape_half_moment(i, true)?, self.shape_half_moment(i, false)?)),
        }
    }

    fn shape_half_moment(&self, i: usize, right: bool) -> Result<f64> {
        let integ = Integrator::new(1e-15, 1e-12).with_max_panels(4000);
        let sign = if right { 1.0 } else { -1.0 };
        let pw = i as i32;
        let f = |y: f64| y.powi(pw) * self.shape(sign * y);
        let head = integ.integrate(f, 0.0, 1.0)?.value;
        let tail = integ.integrate_power_tail(f, 1.0)?.value;
        Ok(head + tail)
    }

    /// The unnormalized shape g(y).
    pub fn shape(&self, y: f64) -> f64 {
        match &self.form {
            Form::SymmetricPareto { alpha, a_f, b_f } => a_f / (b_f + y.abs().powf(1.0 + alpha)),
            Form::SymmetricRv { alpha, l } => {
                let a = y.abs();
                l.eval(a) / (1.0 + a.powf(1.0 + alpha))
            }
            Form::TwoSided {
                beta,
                gamma,
                l_plus,
                l_minus,
            } => {
                if y >= 0.0 {
                    l_plus.eval(y) / (1.0 + y.powf(1.0 + beta))
                } else {
                    let a = -y;
                    l_minus.eval(a) / (1.0 + a.powf(1.0 + gamma))
                }
            }
        }
    }

    /// f(x).
    pub fn density(&self, x: f64) -> f64 {
        self.sigma * self.c * self.shape(self.mu + self.sigma * x)
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self.form, Form::TwoSided { .. }) && self.mu == 0.0
    }

    /// Affine parameters (c, μ, σ) of f(x) = σ·c·g(μ + σx).
    pub fn affine(&self) -> (f64, f64, f64) {
        (self.c, self.mu, self.sigma)
    }

    /// Right tail index β (α for symmetric forms).
    pub fn right_index(&self) -> f64 {
        match &self.form {
            Form::SymmetricPareto { alpha, .. } | Form::SymmetricRv { alpha, .. } => *alpha,
            Form::TwoSided { beta, .. } => *beta,
        }
    }

    /// Left tail index γ (α for symmetric forms).
    pub fn left_index(&self) -> f64 {
        match &self.form {
            Form::SymmetricPareto { alpha, .. } | Form::SymmetricRv { alpha, .. } => *alpha,
            Form::TwoSided { gamma, .. } => *gamma,
        }
    }

    pub fn min_index(&self) -> f64 {
        self.right_index().min(self.left_index())
    }

    /// Largest finite moment order K.
    pub fn max_moment(&self) -> usize {
        self.half_moments.len() - 1
    }

    /// Slowly varying L_+ with f(x) ~ x^{−(1+β)} L_+(x) as x → +∞.
    pub fn tail_l_plus(&self) -> SlowlyVarying {
        let s = self.sigma;
        match &self.form {
            Form::SymmetricPareto { alpha, a_f, .. } => SlowlyVarying::constant(self.c * a_f * s.powf(-alpha)),
            Form::SymmetricRv { alpha, l } => l.scaled(self.c * s.powf(-alpha), s),
            Form::TwoSided { beta, l_plus, .. } => l_plus.scaled(self.c * s.powf(-beta), s),
        }
    }

    /// Slowly varying L_− with f(−x) ~ x^{−(1+γ)} L_−(x) as x → +∞.
    pub fn tail_l_minus(&self) -> SlowlyVarying {
        let s = self.sigma;
        match &self.form {
            Form::TwoSided { gamma, l_minus, .. } => l_minus.scaled(self.c * s.powf(-gamma), s),
            _ => self.tail_l_plus(),
        }
    }

    /// Rescaled so that the variable has mean 0 and variance 1.
    pub fn standardized(&self) -> Result<Self> {
        if let Form::SymmetricPareto { alpha, .. } = self.form {
            return Self::pareto(alpha);
        }
        if self.max_moment() < 2 {
            return Err(Error::MomentDiverges {
                order: 2,
                index: self.min_index(),
            });
        }
        let (p0, n0) = self.half_moments[0];
        let (p1, n1) = self.half_moments[1];
        let (p2, n2) = self.half_moments[2];
        let mass = p0 + n0;
        let mean = (p1 - n1) / mass;
        let var = (p2 + n2) / mass - mean * mean;
        let mut s = self.clone();
        s.c = 1.0 / mass;
        s.mu = mean;
        s.sigma = var.sqrt();
        s.standardized = true;
        Ok(s)
    }

    /// The density of −X.
    pub fn mirrored(&self) -> Self {
        let mut s = self.clone();
        s.mu = -self.mu;
        if let Form::TwoSided {
            beta,
            gamma,
            l_plus,
            l_minus,
        } = &self.form
        {
            s.form = Form::TwoSided {
                beta: *gamma,
                gamma: *beta,
                l_plus: l_minus.clone(),
                l_minus: l_plus.clone(),
            };
            s.half_moments = self.half_moments.iter().map(|&(p, n)| (n, p)).collect();
        }
        s
    }

    /// E[X^j].
    pub fn moment(&self, j: usize) -> Result<f64> {
        if j > self.max_moment() {
            return Err(Error::MomentDiverges {
                order: j,
                index: self.min_index(),
            });
        }
        if self.is_symmetric() && j % 2 == 1 {
            return Ok(0.0);
        }
        // E[((Y − μ)/σ)^j] under c·g, expanded binomially in raw moments.
        let mut sum = 0.0;
        let mut binom = 1.0;
        for i in 0..=j {
            if i > 0 {
                binom *= (j - i + 1) as f64 / i as f64;
            }
            let (p, n) = self.half_moments[i];
            let raw = if i % 2 == 0 { p + n } else { p - n };
            sum += binom * raw * (-self.mu).powi((j - i) as i32);
        }
        Ok(self.c * sum / self.sigma.powi(j as i32))
    }

    /// P(X > x), by series for the Pareto form and quadrature otherwise.
    pub fn survival(&self, x: f64) -> Result<f64> {
        let y0 = self.mu + self.sigma * x;
        if let Form::SymmetricPareto { alpha, a_f, b_f } = self.form {
            let p = 1.0 + alpha;
            let yp = y0.abs().powf(p);
            if y0 > 0.0 && b_f < 0.25 * yp {
                // a ∫_{y}^∞ t^{−p}(1 + b t^{−p})^{−1} dt, expanded in b t^{−p}
                let r = -b_f / yp;
                let mut term = y0.powf(1.0 - p);
                let mut sum = 0.0;
                let mut k = 0.0;
                loop {
                    let add = term / (p * (k + 1.0) - 1.0);
                    sum += add;
                    if add.abs() < 1e-17 * sum.abs() {
                        break;
                    }
                    term *= r;
                    k += 1.0;
                }
                return Ok(self.c * a_f * sum);
            }
        }
        let integ = Integrator::new(1e-16, 1e-12).with_max_panels(4000);
        let g = |y: f64| self.shape(y);
        let right_mass = self.half_moments[0].0;
        let upper = if y0 >= 1.0 {
            integ.integrate_power_tail(g, y0)?.value
        } else if y0 >= 0.0 {
            right_mass - integ.integrate(g, 0.0, y0)?.value
        } else if y0 > -1.0 {
            right_mass + integ.integrate(g, y0, 0.0)?.value
        } else {
            let left_mass = self.half_moments[0].1;
            let below = integ.integrate_power_tail(|t: f64| self.shape(-t), -y0)?.value;
            right_mass + left_mass - below
        };
        Ok(self.c * upper)
    }

    /// Moments m_0..=m_K of the even and odd parts r and s.
    pub fn decompose(&self) -> Result<OddEvenDecomposition> {
        let (beta, gamma) = (self.right_index(), self.left_index());
        let lp = self.tail_l_plus();
        let lm = self.tail_l_minus();
        let (l_r, l_s) = if (beta - gamma).abs() < INTEGER_TOLERANCE {
            (
                SlowlyVarying::combination(vec![(0.5, lp.clone()), (0.5, lm.clone())]),
                SlowlyVarying::combination(vec![(0.5, lp), (-0.5, lm)]),
            )
        } else if beta < gamma {
            (lp.scaled(0.5, 1.0), lp.scaled(0.5, 1.0))
        } else {
            (lm.scaled(0.5, 1.0), lm.scaled(-0.5, 1.0))
        };
        let k = self.max_moment();
        let mut m_r = vec![0.0; k + 1];
        let mut m_s = vec![0.0; k + 1];
        for j in 0..=k {
            let m = self.moment(j)?;
            if j % 2 == 0 {
                m_r[j] = m;
            } else {
                m_s[j] = m;
            }
        }
        Ok(OddEvenDecomposition {
            spec: self.clone(),
            alpha: beta.min(gamma),
            l_r,
            l_s,
            moments_r: m_r,
            moments_s: m_s,
        })
    }
}

/// f = r + s with r even and s odd.
///
/// `l_r` and `l_s` are the asymptotic slowly varying functions of the two
/// parts (r(x) ~ |x|^{−(1+α)} L_r(|x|), s(x) ~ sgn(x)|x|^{−(1+α)} L_s(|x|),
/// α = min(β, γ)), expressed through the tail functions L_±.
#[derive(Debug, Clone)]
pub struct OddEvenDecomposition {
    pub spec: DensitySpec,
    pub alpha: f64,
    pub l_r: SlowlyVarying,
    pub l_s: SlowlyVarying,
    pub moments_r: Vec<f64>,
    pub moments_s: Vec<f64>,
}

impl OddEvenDecomposition {
    pub fn r(&self, x: f64) -> f64 {
        0.5 * (self.spec.density(x) + self.spec.density(-x))
    }

    pub fn s(&self, x: f64) -> f64 {
        0.5 * (self.spec.density(x) - self.spec.density(-x))
    }

    /// x^{1+α} r(x) for x > 0, which tends to L_r(x).
    pub fn l_r_exact(&self, x: f64) -> f64 {
        x.powf(1.0 + self.alpha) * self.r(x)
    }

    /// x^{1+α} s(x) for x > 0, which tends to L_s(x).
    pub fn l_s_exact(&self, x: f64) -> f64 {
        x.powf(1.0 + self.alpha) * self.s(x)
    }
}

/// E[X^j] of a density.
pub fn moment(spec: &DensitySpec, j: usize) -> Result<f64> {
    spec.moment(j)
}

/// Moments and cumulants up to the largest finite order K.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSet {
    /// m_0 = 1, m_1, ..., m_K.
    pub moments: Vec<f64>,
    /// κ_0 (unused, 0), κ_1, ..., κ_K.
    pub cumulants: Vec<f64>,
    pub order: usize,
}

impl CumulantSet {
    /// κ_n = m_n − Σ_{k=1}^{n−1} C(n−1, k−1) κ_k m_{n−k}.
    pub fn from_moments(moments: Vec<f64>) -> Self {
        let order = moments.len() - 1;
        let mut k = vec![0.0; order + 1];
        for n in 1..=order {
            let mut acc = moments[n];
            let mut binom = 1.0; // C(n−1, k−1) at k = 1
            for j in 1..n {
                acc -= binom * k[j] * moments[n - j];
                binom *= (n - j) as f64 / j as f64;
            }
            k[n] = acc;
        }
        CumulantSet {
            moments,
            cumulants: k,
            order,
        }
    }

    /// Inverse recursion m_n = Σ_{k=1}^{n} C(n−1, k−1) κ_k m_{n−k}.
    pub fn moments_from_cumulants(cumulants: &[f64]) -> Vec<f64> {
        let order = cumulants.len() - 1;
        let mut m = vec![0.0; order + 1];
        m[0] = 1.0;
        for n in 1..=order {
            let mut acc = 0.0;
            let mut binom = 1.0;
            for j in 1..=n {
                acc += binom * cumulants[j] * m[n - j];
                binom *= (n - j) as f64 / j as f64;
            }
            m[n] = acc;
        }
        m
    }

    pub fn kappa(&self, j: usize) -> Result<f64> {
        self.cumulants.get(j).copied().ok_or(Error::InsufficientCumulants {
            needed: j,
            available: self.order,
        })
    }
}

pub fn cumulants(spec: &DensitySpec) -> Result<CumulantSet> {
    if !spec.is_standardized() {
        return Err(Error::domain("cumulants need a standardized spec"));
    }
    let k = spec.max_moment();
    let mut m = Vec::with_capacity(k + 1);
    for j in 0..=k {
        m.push(spec.moment(j)?);
    }
    // Standardization fixes these up to rounding; pin them.
    m[0] = 1.0;
    m[1] = 0.0;
    m[2] = 1.0;
    Ok(CumulantSet::from_moments(m))
}
