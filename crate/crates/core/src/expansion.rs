//! Small-θ expansion ψ(θ) = log φ(θ) = χ(θ) + ξ(θ) + o(ξ(θ)).
//!
//! χ is the cumulant polynomial Σ_{j≤K} κ_j(iθ)^j/j! and ξ the non-analytic
//! |θ|^α term contributed by the regularly varying tails.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{FromPrimitive, Num};

use crate::density::{cumulants, CumulantSet, DensitySpec, Form};
use crate::error::{Error, Result};
use crate::parity::{Parity, ParityClass};
use crate::slowly_varying::SlowlyVarying;
use crate::special::{gamma, sinpi};

/// c·(iθ)^power.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<T> {
    pub power: u32,
    pub coeff: T,
}

/// All compositions (j_1, ..., j_k), j_i ≥ 3, with Σ(j_i − 2) = q − 2.
pub fn compositions(k: usize, q: usize) -> Vec<Vec<u32>> {
    fn rec(k: usize, rest: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // every remaining part needs at least 1
        for part in 1..=rest.saturating_sub(k - 1) {
            cur.push(part as u32 + 2);
            rec(k - 1, rest - part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 && q >= 3 {
        rec(k, q - 2, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Memoized [`compositions`] for all 1 ≤ k ≤ q − 2, 3 ≤ q ≤ q_max.
#[derive(Debug, Clone)]
pub struct CompositionTable {
    q_max: usize,
    table: Vec<Vec<Vec<Vec<u32>>>>,
}

impl CompositionTable {
    pub fn new(q_max: usize) -> Self {
        let mut table = vec![Vec::new(); q_max + 1];
        for (q, row) in table.iter_mut().enumerate().skip(3) {
            *row = (0..=q).map(|k| compositions(k, q)).collect();
        }
        CompositionTable { q_max, table }
    }

    pub fn get(&self, k: usize, q: usize) -> &[Vec<u32>] {
        if q > self.q_max || q < 3 || k > q {
            return &[];
        }
        &self.table[q][k]
    }
}

fn factorial<T: Num + Clone + FromPrimitive>(n: u32) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_u32(i).unwrap())
}

/// Coefficient of 1/n^{q/2−1} in (Σ_j κ_j(iθ)^j/(j!·n^{j/2−1}))^k.
///
/// Every composition contributes the same power q + 2k − 2 of iθ, so the
/// result is one monomial; `None` when no composition exists. `kappa` is
/// indexed by order (κ_j at `kappa[j]`) and may be any exact or floating
/// number type.
pub fn xi_kq<T>(k: usize, q: usize, kappa: &[T]) -> Result<Option<Monomial<T>>>
where
    T: Num + Clone + FromPrimitive,
{
    xi_kq_with(&compositions(k, q), k, q, kappa)
}

fn xi_kq_with<T>(comps: &[Vec<u32>], k: usize, q: usize, kappa: &[T]) -> Result<Option<Monomial<T>>>
where
    T: Num + Clone + FromPrimitive,
{
    if comps.is_empty() {
        return Ok(None);
    }
    let need = q + 1 - k;
    if kappa.len() <= need {
        return Err(Error::InsufficientCumulants {
            needed: need,
            available: kappa.len().saturating_sub(1),
        });
    }
    let mut sum = T::zero();
    for c in comps {
        let mut term = T::one();
        for &j in c {
            term = term * kappa[j as usize].clone() / factorial::<T>(j);
        }
        sum = sum + term;
    }
    Ok(Some(Monomial {
        power: (q + 2 * k - 2) as u32,
        coeff: sum,
    }))
}

/// Hermite-weighted coefficient lists for G_3, ..., G_K.
///
/// G_j(x) = Σ_k ξ_{k,j}/k! with (iθ)^m replaced by H_m(x).
#[derive(Debug, Clone)]
pub struct EdgeworthSeries {
    /// terms[j] = [(m, c)], meaning G_j = Σ c·H_m.
    pub terms: Vec<Vec<(u32, f64)>>,
    pub order: usize,
}

impl EdgeworthSeries {
    pub fn new(cum: &CumulantSet) -> Self {
        let order = cum.order;
        let table = CompositionTable::new(order.max(3));
        let mut terms = vec![Vec::new(); order + 1];
        for (j, slot) in terms.iter_mut().enumerate().skip(3) {
            for k in 1..=j - 2 {
                if let Ok(Some(m)) = xi_kq_with(table.get(k, j), k, j, &cum.cumulants) {
                    let kf: f64 = factorial(k as u32);
                    if m.coeff != 0.0 {
                        slot.push((m.power, m.coeff / kf));
                    }
                }
            }
        }
        EdgeworthSeries { terms, order }
    }

    pub fn max_power(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.iter().map(|&(m, _)| m as usize))
            .max()
            .unwrap_or(0)
    }

    /// G_j(x) given H_0(x), ..., H_M(x).
    pub fn g_from_hermite(&self, j: usize, h: &[f64]) -> f64 {
        self.terms[j].iter().map(|&(m, c)| c * h[m as usize]).sum()
    }
}

/// Which non-analytic form ξ takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiCase {
    /// c·|θ|^α·ζ_L(1/|θ|)
    SymmetricEven,
    /// c·|θ|^α·L(1/|θ|)
    SymmetricNonEven,
    /// Even/odd split with L_r, L_s and an explicit sgn(θ) on the odd part.
    TwoSided,
}

/// The slowly varying objects entering ξ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiSv {
    L,
    ZetaL,
    /// ζ_{L_r} and L_s (even α)
    ZetaLrLs,
    /// L_r and ζ_{L_s} (odd α)
    LrZetaLs,
    /// L_r and L_s (non-integer α)
    LrLs,
}

/// χ coefficients and the non-analytic term of the cumulant function.
#[derive(Debug, Clone)]
pub struct CharFnExpansion {
    /// chi_coeffs[j] = κ_j/j! for j = 0..=K.
    pub chi_coeffs: Vec<f64>,
    pub alpha: f64,
    pub parity: ParityClass,
    pub xi_case: XiCase,
    /// Constant in front of |θ|^α (times the bracket for the two-sided case).
    pub xi_coefficient: f64,
    pub xi_sv: XiSv,
    pub cumulants: CumulantSet,
    l_r: SlowlyVarying,
    l_s: SlowlyVarying,
}

pub fn build_expansion(spec: &DensitySpec) -> Result<CharFnExpansion> {
    if !spec.is_standardized() {
        return Err(Error::domain("expansion needs a standardized spec"));
    }
    let cum = cumulants(spec)?;
    let mut chi = vec![0.0; cum.order + 1];
    let mut fact = 1.0;
    for (j, c) in chi.iter_mut().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        *c = cum.cumulants[j] / fact;
    }
    let two_sided = matches!(spec.form(), Form::TwoSided { .. });
    let (alpha, l_r, l_s) = if two_sided {
        let d = spec.decompose()?;
        (d.alpha, d.l_r, d.l_s)
    } else {
        (spec.right_index(), spec.tail_l_plus(), SlowlyVarying::constant(0.0))
    };
    let parity = ParityClass::classify(alpha);
    let g = gamma(alpha + 1.0);
    let (xi_case, xi_coefficient, xi_sv) = match (two_sided, parity.tag) {
        (false, Parity::EvenInteger) => {
            let a = parity.integer().unwrap();
            let sign = if (a / 2) % 2 == 0 { 1.0 } else { -1.0 };
            (XiCase::SymmetricEven, 2.0 * sign / g, XiSv::ZetaL)
        }
        (false, _) => (XiCase::SymmetricNonEven, -PI / (g * sinpi(0.5 * alpha)), XiSv::L),
        (true, Parity::EvenInteger) => {
            let a = parity.integer().unwrap();
            let sign = if (a / 2) % 2 == 0 { 1.0 } else { -1.0 };
            (XiCase::TwoSided, 2.0 * sign / g, XiSv::ZetaLrLs)
        }
        (true, Parity::OddInteger) => {
            let a = parity.integer().unwrap();
            let sign = if ((a - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            (XiCase::TwoSided, 2.0 * sign / g, XiSv::LrZetaLs)
        }
        (true, Parity::NonInteger) => (XiCase::TwoSided, -2.0 * PI / (g * sinpi(alpha)), XiSv::LrLs),
    };
    Ok(CharFnExpansion {
        chi_coeffs: chi,
        alpha,
        parity,
        xi_case,
        xi_coefficient,
        xi_sv,
        cumulants: cum,
        l_r,
        l_s,
    })
}

impl CharFnExpansion {
    /// χ(θ) = Σ_j κ_j(iθ)^j/j!.
    pub fn chi(&self, theta: f64) -> Complex64 {
        let it = Complex64::new(0.0, theta);
        let mut p = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, &c) in self.chi_coeffs.iter().enumerate() {
            if j > 0 {
                p *= it;
                sum += p * c;
            }
        }
        sum
    }

    /// The non-analytic part ξ(θ); sgn(θ) multiplies the odd-part terms so
    /// that ξ(−θ) = conj(ξ(θ)).
    pub fn xi(&self, theta: f64) -> Complex64 {
        if theta == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let a = theta.abs();
        let u = 1.0 / a;
        let s = theta.signum();
        let pw = a.powf(self.alpha);
        let c = self.xi_coefficient * pw;
        let half_pi = 0.5 * PI;
        match self.xi_sv {
            XiSv::ZetaL => Complex64::new(c * self.l_r.zeta_extended(u), 0.0),
            XiSv::L => Complex64::new(c * self.l_r.eval(u), 0.0),
            XiSv::ZetaLrLs => {
                c * Complex64::new(self.l_r.zeta_extended(u), s * half_pi * self.l_s.eval(u))
            }
            XiSv::LrZetaLs => {
                c * Complex64::new(-half_pi * self.l_r.eval(u), s * self.l_s.zeta_extended(u))
            }
            XiSv::LrLs => {
                let (sn, cs) = (sinpi(0.5 * self.alpha), sinpi(0.5 * self.alpha + 0.5));
                c * Complex64::new(cs * self.l_r.eval(u), -s * sn * self.l_s.eval(u))
            }
        }
    }

    pub fn psi(&self, theta: f64) -> Complex64 {
        self.chi(theta) + self.xi(theta)
    }

    pub fn l_r(&self) -> &SlowlyVarying {
        &self.l_r
    }

    pub fn l_s(&self) -> &SlowlyVarying {
        &self.l_s
    }
}

/// χ(θ) + ξ(θ).
pub fn eval_psi_expansion(exp: &CharFnExpansion, theta: f64) -> Complex64 {
    exp.psi(theta)
}
