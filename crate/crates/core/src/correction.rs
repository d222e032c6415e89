//! The corrected density approximation
//! η(x)[1 + Σ_j G_j(x)/n^{j/2−1}] + F(x, n).

#[allow(unused_imports)] // needed without std, shadowed by inherent methods with it
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use core::fmt;

use crate::density::{cumulants, CumulantSet, DensitySpec, Form};
use crate::error::{Error, Result};
use crate::expansion::EdgeworthSeries;
use crate::parity::{Parity, ParityClass, INTEGER_TOLERANCE};
use crate::slowly_varying::SlowlyVarying;
use crate::special::{dawson_scaled_derivative, gamma, hermite, hermite_all, parabolic_cylinder, sinpi};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Below this |x| the slowly varying arguments are clamped to √n·1e−8.
pub const X_CLAMP: f64 = 1e-8;

/// Which formula produced the correction term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    SymmetricEven,
    SymmetricOdd,
    SymmetricNonInteger,
    Case1Even,
    Case1Odd,
    Case1NonInteger,
    Case2Even,
    Case2Odd,
    Case2NonInteger,
    Case3Even,
    Case3Odd,
    Case3NonInteger,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::SymmetricEven => "symmetric-even",
            CaseTag::SymmetricOdd => "symmetric-odd",
            CaseTag::SymmetricNonInteger => "symmetric-noninteger",
            CaseTag::Case1Even => "case1-even",
            CaseTag::Case1Odd => "case1-odd",
            CaseTag::Case1NonInteger => "case1-noninteger",
            CaseTag::Case2Even => "case2-even",
            CaseTag::Case2Odd => "case2-odd",
            CaseTag::Case2NonInteger => "case2-noninteger",
            CaseTag::Case3Even => "case3-even",
            CaseTag::Case3Odd => "case3-odd",
            CaseTag::Case3NonInteger => "case3-noninteger",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-x breakdown of the approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult {
    pub x: f64,
    pub n: u64,
    /// η(x)
    pub gaussian: f64,
    /// (j, G_j(x)/n^{j/2−1}), relative to η(x)
    pub edgeworth_terms: Vec<(usize, f64)>,
    pub correction: f64,
    pub total: f64,
    pub case_tag: CaseTag,
    /// Set when |x| < [`X_CLAMP`] and the slowly varying argument was clamped.
    pub clamped: bool,
}

/// Standard normal density.
pub fn eta(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// The symmetric non-analytic coefficient G_α(x), without the L or ζ_L factor.
pub fn g_alpha(alpha: f64, parity: ParityClass, x: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::domain("G_alpha needs alpha > 2"));
    }
    let g = gamma(alpha + 1.0);
    Ok(match parity.tag {
        Parity::OddInteger => {
            let a = parity.integer().unwrap() as usize;
            -SQRT_2 / g * dawson_scaled_derivative(a, x)
        }
        Parity::EvenInteger => {
            let a = parity.integer().unwrap() as usize;
            (2.0 / PI).sqrt() * (-0.5 * x * x).exp() * hermite(a, x) / g
        }
        Parity::NonInteger => {
            let d = parabolic_cylinder(alpha, x)? + parabolic_cylinder(alpha, -x)?;
            -(0.5 * PI).sqrt() * (-0.25 * x * x).exp() / (g * sinpi(alpha)) * d
        }
    })
}

/// G_j(x) for j ≥ 3 from the cumulants.
pub fn edgeworth_polynomial(j: usize, cum: &CumulantSet, x: f64) -> Result<f64> {
    if j < 3 {
        return Err(Error::domain("Edgeworth polynomials start at j = 3"));
    }
    if j > cum.order {
        return Err(Error::InsufficientCumulants {
            needed: j,
            available: cum.order,
        });
    }
    let series = EdgeworthSeries::new(cum);
    let h = hermite_all(series.max_power(), x);
    Ok(series.g_from_hermite(j, &h))
}

/// Tail data used by the correction: indices and tail functions.
#[derive(Debug, Clone)]
struct Tails {
    beta: f64,
    gamma: f64,
    l_plus: SlowlyVarying,
    l_minus: SlowlyVarying,
    symmetric: bool,
}

impl Tails {
    fn of(spec: &DensitySpec) -> Self {
        Tails {
            beta: spec.right_index(),
            gamma: spec.left_index(),
            l_plus: spec.tail_l_plus(),
            l_minus: spec.tail_l_minus(),
            symmetric: !matches!(spec.form(), Form::TwoSided { .. }),
        }
    }

    fn swapped(&self) -> Self {
        Tails {
            beta: self.gamma,
            gamma: self.beta,
            l_plus: self.l_minus.clone(),
            l_minus: self.l_plus.clone(),
            symmetric: self.symmetric,
        }
    }
}

/// Sign convention of the asymmetric mirror terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    /// Signs obtained by inverting ξ against e^{−iθx} (the default).
    Derived,
    /// Even-α Dawson sign reversed and D_ν(x), D_ν(−x) exchanged; kept for comparison.
    Flipped,
}

fn correction_tails(t: &Tails, x: f64, n: u64, signs: SignConvention) -> Result<(f64, CaseTag)> {
    let nf = n as f64;
    let y = nf.sqrt() * x.max(X_CLAMP);
    let eta_h = |a: usize| FRAC_1_SQRT_2PI * (-0.5 * x * x).exp() * hermite(a, x);
    let pref = |a: f64| 1.0 / (gamma(a + 1.0) * nf.powf(0.5 * a - 1.0));
    let pcf_pref = |a: f64| -(0.5 * PI).sqrt() * (-0.25 * x * x).exp() * pref(a) / sinpi(a);
    let flipped = signs == SignConvention::Flipped;

    if t.symmetric {
        let alpha = t.beta;
        let parity = ParityClass::classify(alpha);
        let l = &t.l_plus;
        let scale = nf.powf(0.5 * alpha - 1.0);
        let g = g_alpha(alpha, parity, x)?;
        return Ok(match parity.tag {
            Parity::EvenInteger => (g * l.zeta_extended(y) / scale, CaseTag::SymmetricEven),
            Parity::OddInteger => (g * l.eval(y) / scale, CaseTag::SymmetricOdd),
            Parity::NonInteger => (g * l.eval(y) / scale, CaseTag::SymmetricNonInteger),
        });
    }

    if (t.beta - t.gamma).abs() < INTEGER_TOLERANCE {
        let alpha = t.beta.min(t.gamma);
        let parity = ParityClass::classify(alpha);
        let (lp, lm) = (t.l_plus.eval(y), t.l_minus.eval(y));
        return Ok(match parity.tag {
            Parity::EvenInteger => {
                let a = parity.integer().unwrap() as usize;
                let zs = t.l_plus.zeta_extended(y) + t.l_minus.zeta_extended(y);
                let e = FRAC_1_SQRT_2 * dawson_scaled_derivative(a, x) * (lp - lm);
                let e = if flipped { -e } else { e };
                (pref(alpha) * (eta_h(a) * zs + e), CaseTag::Case1Even)
            }
            Parity::OddInteger => {
                let a = parity.integer().unwrap() as usize;
                let zd = t.l_plus.zeta_extended(y) - t.l_minus.zeta_extended(y);
                let e = FRAC_1_SQRT_2 * dawson_scaled_derivative(a, x) * (lp + lm);
                (pref(alpha) * (eta_h(a) * zd - e), CaseTag::Case1Odd)
            }
            Parity::NonInteger => {
                let (dp, dm) = (parabolic_cylinder(alpha, x)?, parabolic_cylinder(alpha, -x)?);
                let bracket = if flipped { dp * lp + dm * lm } else { dm * lp + dp * lm };
                (pcf_pref(alpha) * bracket, CaseTag::Case1NonInteger)
            }
        });
    }

    let right = t.beta < t.gamma;
    let (index, l) = if right { (t.beta, &t.l_plus) } else { (t.gamma, &t.l_minus) };
    let parity = ParityClass::classify(index);
    Ok(match parity.tag {
        Parity::EvenInteger | Parity::OddInteger => {
            let a = parity.integer().unwrap() as usize;
            let v = pref(index) * eta_h(a) * l.zeta_extended(y);
            match (right, parity.tag) {
                (true, Parity::EvenInteger) => (v, CaseTag::Case2Even),
                (true, _) => (v, CaseTag::Case2Odd),
                (false, Parity::EvenInteger) => (v, CaseTag::Case3Even),
                (false, _) => (-v, CaseTag::Case3Odd),
            }
        }
        Parity::NonInteger => {
            // The right tail pairs with D(−x), the left with D(x).
            let arg = if right != flipped { -x } else { x };
            let v = pcf_pref(index) * parabolic_cylinder(index, arg)? * l.eval(y);
            (v, if right { CaseTag::Case2NonInteger } else { CaseTag::Case3NonInteger })
        }
    })
}

/// F(x, n) for x > 0.
pub fn correction_f(spec: &DensitySpec, x: f64, n: u64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("correction_f is defined for x > 0"));
    }
    Ok(correction_tails(&Tails::of(spec), x, n, SignConvention::Derived)?.0)
}

/// F(x, n) for x > 0 under the chosen sign convention, with its case tag.
pub fn correction_f_with(spec: &DensitySpec, x: f64, n: u64, signs: SignConvention) -> Result<(f64, CaseTag)> {
    if !(x > 0.0) {
        return Err(Error::domain("correction_f is defined for x > 0"));
    }
    correction_tails(&Tails::of(spec), x, n, signs)
}

/// Reusable evaluator of the corrected density for one spec.
#[derive(Debug, Clone)]
pub struct Evaluator {
    cumulants: CumulantSet,
    series: EdgeworthSeries,
    tails: Tails,
    mirror: Tails,
    symmetric: bool,
    max_order: usize,
    signs: SignConvention,
}

impl Evaluator {
    pub fn new(spec: &DensitySpec) -> Result<Self> {
        if !spec.is_standardized() {
            return Err(Error::domain("corrected density needs a standardized spec"));
        }
        let cum = cumulants(spec)?;
        let series = EdgeworthSeries::new(&cum);
        let tails = Tails::of(spec);
        let mirror = tails.swapped();
        Ok(Evaluator {
            max_order: cum.order,
            cumulants: cum,
            series,
            tails,
            mirror,
            symmetric: spec.is_symmetric(),
            signs: SignConvention::Derived,
        })
    }

    /// Keep only G_j with j ≤ `order` (0 drops every Edgeworth term).
    pub fn with_max_order(mut self, order: usize) -> Self {
        self.max_order = order.min(self.cumulants.order);
        self
    }

    pub fn with_signs(mut self, signs: SignConvention) -> Self {
        self.signs = signs;
        self
    }

    pub fn cumulants(&self) -> &CumulantSet {
        &self.cumulants
    }

    /// Ordinary Edgeworth part η(x)[1 + Σ G_j/n^{j/2−1}] and its terms.
    pub fn edgeworth(&self, x: f64, n: u64) -> (f64, Vec<(usize, f64)>) {
        let nf = n as f64;
        let h = hermite_all(self.series.max_power().max(1), x);
        let mut terms = Vec::new();
        for j in 3..=self.max_order {
            if self.symmetric && j % 2 == 1 {
                continue;
            }
            let g = self.series.g_from_hermite(j, &h);
            terms.push((j, g / nf.powf(0.5 * j as f64 - 1.0)));
        }
        (eta(x), terms)
    }

    pub fn correction(&self, x: f64, n: u64) -> Result<(f64, CaseTag, bool)> {
        let clamped = x.abs() < X_CLAMP;
        let (v, tag) = if x >= 0.0 {
            correction_tails(&self.tails, x.max(X_CLAMP), n, self.signs)?
        } else {
            correction_tails(&self.mirror, (-x).max(X_CLAMP), n, self.signs)?
        };
        Ok((v, tag, clamped))
    }

    pub fn eval(&self, x: f64, n: u64) -> Result<ExpansionResult> {
        if n == 0 {
            return Err(Error::domain("n must be positive"));
        }
        let (gaussian, terms) = self.edgeworth(x, n);
        let (correction, case_tag, clamped) = self.correction(x, n)?;
        let sum: f64 = terms.iter().map(|t| t.1).sum();
        Ok(ExpansionResult {
            x,
            n,
            gaussian,
            total: gaussian * (1.0 + sum) + correction,
            edgeworth_terms: terms,
            correction,
            case_tag,
            clamped,
        })
    }
}

/// Full approximation at x (negative x goes through the mirrored spec).
pub fn corrected_density(spec: &DensitySpec, x: f64, n: u64) -> Result<ExpansionResult> {
    Evaluator::new(spec)?.eval(x, n)
}

/// L(√n x)/(x^{1+α} n^{α/2−1}) for the right tail.
pub fn tail_equivalent(spec: &DensitySpec, x: f64, n: u64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("tail_equivalent needs x > 0"));
    }
    let alpha = spec.right_index();
    if ParityClass::classify(alpha).is_even() {
        return Err(Error::domain(
            "even tail index: the correction and the tail density do not share a region",
        ));
    }
    let nf = n as f64;
    let l = spec.tail_l_plus().eval(nf.sqrt() * x);
    Ok(l / (x.powf(1.0 + alpha) * nf.powf(0.5 * alpha - 1.0)))
}

/// Standard normal upper tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// Φ̄(x_raw/√n) + n·P(X > x_raw).
pub fn rozovskii_tail(spec: &DensitySpec, x_raw: f64, n: u64) -> Result<f64> {
    if !(x_raw > 0.0) {
        return Err(Error::domain("rozovskii_tail needs x_raw > 0"));
    }
    let nf = n as f64;
    Ok(normal_sf(x_raw / nf.sqrt()) + nf * spec.survival(x_raw)?)
}

/// √((α − 2) log n).
pub fn moderate_region_bound(alpha: f64, n: u64) -> Result<f64> {
    if !(alpha > 2.0) || n < 2 {
        return Err(Error::domain("moderate region needs alpha > 2 and n >= 2"));
    }
    Ok(((alpha - 2.0) * (n as f64).ln()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Central,
    Moderate,
    Large,
}

impl Region {
    /// Central for |x| ≤ 1, moderate up to the moderate-deviation bound,
    /// large beyond it.
    pub fn classify(x: f64, bound: f64) -> Region {
        let a = x.abs();
        if a <= 1.0 {
            Region::Central
        } else if a <= bound {
            Region::Moderate
        } else {
            Region::Large
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Central => "central",
            Region::Moderate => "moderate",
            Region::Large => "large",
        }
    }
}
