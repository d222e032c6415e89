//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use edgeworth::conv::ConvolutionOracle;
use edgeworth::mc::{histogram_density, Sampler, SumSampler};
use edgeworth_core::correction::Evaluator;
use edgeworth_core::oracle::{cgf_numeric, charfn_remainder, kernel_even_quadrature, kernel_odd_quadrature};
use edgeworth_core::special::{fourier_kernel_even_fn, fourier_kernel_odd_fn};
use edgeworth_core::{
    build_expansion, corrected_density, correction_f, moderate_region_bound, rozovskii_tail, tail_equivalent,
    xi_kq, DensitySpec, Error, InversionOracle, OracleConfig, ParityClass, SlowlyVarying,
};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), Error>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

fn kernels() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [2.5, 3.0, 4.0, 4.5, 5.0] {
        let p = ParityClass::classify(alpha);
        for x in [0.0, 0.7, 1.5, 3.0] {
            worst = worst.max(rel(fourier_kernel_even_fn(alpha, x, p)?, kernel_even_quadrature(alpha, x)?));
            let (odd, odd_q) = (fourier_kernel_odd_fn(alpha, x, p)?, kernel_odd_quadrature(alpha, x)?);
            if x == 0.0 {
                // both vanish; compare absolutely
                worst = worst.max((odd - odd_q).norm());
            } else {
                worst = worst.max((odd - odd_q).norm() / odd_q.norm());
            }
        }
    }
    Ok((worst <= 1e-6, format!("max rel err {worst:.2e} (tol 1e-6)")))
}

fn pareto_cubic_term() -> Outcome {
    let s = DensitySpec::pareto(3.0)?;
    let e = build_expansion(&s)?;
    let cfg = OracleConfig::default();
    let coeff = e.xi(1e-2).re / 1e-6;
    let mut errs = Vec::new();
    for t in [1e-3f64, 1e-4] {
        let r = charfn_remainder(&s, t, 2, &cfg)?.re / t.powi(3);
        errs.push(rel(r, coeff));
    }
    let ok = errs[0] <= 0.02 && errs[1] <= 0.005;
    Ok((
        ok,
        format!(
            "coefficient {coeff:.6}; rel err {:.2e} at 1e-3 (tol 2e-2), {:.2e} at 1e-4 (tol 5e-3)",
            errs[0], errs[1]
        ),
    ))
}

fn pareto_log_term() -> Outcome {
    let s = DensitySpec::pareto(4.0)?;
    let e = build_expansion(&s)?;
    let cfg = OracleConfig::default();
    let t: f64 = 1e-3;
    let scale = t.powi(4) * (1.0 / t).ln();
    let coeff = e.xi(t).re / scale;
    let psi = cgf_numeric(&s, t, &cfg)?.re;
    let r_psi = (psi - e.chi(t).re) / scale;
    let r_phi = charfn_remainder(&s, t, 3, &cfg)?.re / scale;
    let err = rel(r_psi, coeff);
    Ok((
        err <= 0.05,
        format!(
            "coefficient {coeff:.6}; via log φ rel err {err:.2e} (tol 5e-2); via φ rel err {:.2e}",
            rel(r_phi, coeff)
        ),
    ))
}

struct Sup {
    gaussian: f64,
    edgeworth: f64,
    corrected: f64,
}

fn sup_errors(spec: &DensitySpec, inv: &InversionOracle, n: u64, xs: &[f64]) -> Result<Sup, Error> {
    let ev = Evaluator::new(spec)?;
    let mut s = Sup { gaussian: 0.0, edgeworth: 0.0, corrected: 0.0 };
    for &x in xs {
        let truth = inv.density(x, n)?;
        let r = ev.eval(x, n)?;
        let edge = r.gaussian * (1.0 + r.edgeworth_terms.iter().map(|t| t.1).sum::<f64>());
        s.gaussian = s.gaussian.max((r.gaussian - truth).abs());
        s.edgeworth = s.edgeworth.max((edge - truth).abs());
        s.corrected = s.corrected.max((r.total - truth).abs());
    }
    Ok(s)
}

fn central_improvement() -> Outcome {
    let xs = grid(-2.0, 2.0, 41);
    let cfg = OracleConfig::default();
    let mut ok = true;
    let mut msg = String::from("alpha=3 corrected/gaussian:");
    let s3 = DensitySpec::pareto(3.0)?;
    let inv = InversionOracle::new(&s3, 10, &cfg)?;
    let mut last = f64::INFINITY;
    for n in [10u64, 30, 100] {
        let e = sup_errors(&s3, &inv, n, &xs)?;
        let ratio = e.corrected / e.gaussian;
        ok &= ratio <= 0.5 && ratio < last;
        last = ratio;
        msg += &format!(" n={n} {ratio:.3}");
    }
    msg += "; alpha=4.5 corrected/edgeworth:";
    let s45 = DensitySpec::pareto(4.5)?;
    let inv = InversionOracle::new(&s45, 10, &cfg)?;
    for n in [10u64, 30, 100] {
        let e = sup_errors(&s45, &inv, n, &xs)?;
        let ratio = e.corrected / e.edgeworth;
        ok &= ratio <= 0.8;
        msg += &format!(" n={n} {ratio:.3}");
    }
    Ok((ok, msg + " (tol 0.5 and decreasing; 0.8)"))
}

fn symmetric_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let l = SlowlyVarying::log_power_shifted(1.0, 2.5);
    for alpha in [4.0, 3.0, 3.5] {
        let sym = DensitySpec::symmetric_rv(alpha, l.clone())?.standardized()?;
        let two = DensitySpec::two_sided(alpha, alpha, l.clone(), l.clone())?.standardized()?;
        let mirrored = two.mirrored();
        let (es, et, em) = (Evaluator::new(&sym)?, Evaluator::new(&two)?, Evaluator::new(&mirrored)?);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(-6.0..6.0);
            let n: u64 = rng.gen_range(2..5000);
            let a = es.eval(x, n)?.total;
            for b in [et.eval(x, n)?.total, em.eval(x, n)?.total] {
                worst = worst.max((a - b).abs() / a.abs().max(1e-300));
            }
        }
    }
    Ok((worst <= 1e-12, format!("150 points, max rel diff {worst:.2e} (tol 1e-12)")))
}

fn tail_blend() -> Outcome {
    let s = DensitySpec::pareto(3.0)?;
    let n = 50u64;
    let x_far = 10.0;
    let x_mid = 1.5 * moderate_region_bound(3.0, n)?;
    let r_far = correction_f(&s, x_far, n)? / tail_equivalent(&s, x_far, n)?;
    let r_mid = correction_f(&s, x_mid, n)? / tail_equivalent(&s, x_mid, n)?;
    let even = matches!(tail_equivalent(&DensitySpec::pareto(4.0)?, x_far, n), Err(Error::Domain(_)));
    let ok = (r_far - 1.0).abs() <= 0.10 && (r_mid - 1.0).abs() <= 0.25 && even;
    Ok((
        ok,
        format!(
            "F/tail at x=10: {r_far:.4} (tol 10%); at x={x_mid:.3}: {r_mid:.4} (tol 25%); alpha=4 domain error: {even}"
        ),
    ))
}

fn moderate_deviation() -> Outcome {
    let s = DensitySpec::pareto(3.0)?;
    let n = 200u64;
    let xs = grid(0.0, (n as f64).ln().sqrt(), 41);
    let inv = InversionOracle::new(&s, n, &OracleConfig::default())?;
    let (mut corr, mut gauss) = (0.0f64, 0.0f64);
    for &x in &xs {
        let truth = inv.density(x, n)?;
        let r = corrected_density(&s, x, n)?;
        corr = corr.max((r.total / truth - 1.0).abs());
        gauss = gauss.max((r.gaussian / truth - 1.0).abs());
    }
    Ok((
        corr <= 0.05 && corr <= gauss,
        format!("sup rel err corrected {corr:.4}, gaussian {gauss:.4} (tol 0.05 and <= gaussian)"),
    ))
}

fn rozovskii() -> Outcome {
    let s = DensitySpec::pareto(3.0)?;
    let n = 50u64;
    let samples = 10_000_000u64;
    let nf = n as f64;
    let mult = [1.0, 1.5, 2.0];
    let x_raw: Vec<f64> = mult.iter().map(|m| m * (nf * nf.ln()).sqrt()).collect();
    let z: Vec<f64> = x_raw.iter().map(|x| x / nf.sqrt()).collect();
    let sampler = SumSampler::new(Sampler::new(&s).map_err(|e| Error::Domain(e.to_string()))?, n, samples, 20240607);
    let counts = sampler.fold(
        [0u64; 3],
        |chunk| {
            let mut c = [0u64; 3];
            for &v in chunk {
                for (k, zk) in z.iter().enumerate() {
                    c[k] += (v > *zk) as u64;
                }
            }
            c
        },
        |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]],
    );
    // exact tail by inversion, as a check on the sampler
    let inv = InversionOracle::new(&s, n, &OracleConfig::default())?;
    let mut ok = true;
    let mut msg = String::new();
    for k in 0..3 {
        let exact = inv.survival(z[k], n)?;
        let p = counts[k] as f64 / samples as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        let want = rozovskii_tail(&s, x_raw[k], n)?;
        let dev = (p - want) / se;
        ok &= dev.abs() <= 3.0;
        msg += &format!(
            "{}x: mc {p:.4e} formula {want:.4e} ({dev:+.1} SE, inversion {exact:.4e}); ",
            mult[k]
        );
    }
    Ok((ok, msg + "tol 3 SE"))
}

fn oracle_triangle() -> Outcome {
    let s = DensitySpec::pareto(3.0)?;
    let cfg = OracleConfig::default();
    let xs = grid(-2.0, 2.0, 41);
    let w = 0.1;
    let inv = InversionOracle::new(&s, 1, &cfg)?;
    let conv = ConvolutionOracle::new(&s).map_err(|e| Error::Domain(e.to_string()))?;
    let sampler = Sampler::new(&s).map_err(|e| Error::Domain(e.to_string()))?;
    let mut ok = true;
    let mut msg = String::new();
    for n in [1u64, 5, 30] {
        let mut dc = 0.0f64;
        for &x in &xs {
            dc = dc.max((inv.density(x, n)? - conv.density(x, n)).abs());
        }
        let draws = SumSampler::new(sampler.clone(), n, cfg.mc_samples, cfg.mc_seed).collect();
        let mut worst_se = 0.0f64;
        for e in histogram_density(&draws, &xs, w) {
            let mut avg = 0.0;
            edgeworth_core::quadrature::gk21_nodes(e.x - 0.5 * w, e.x + 0.5 * w, |t, wt| {
                avg += wt * inv.density(t, n).unwrap_or(f64::NAN)
            });
            worst_se = worst_se.max((e.density - avg / w).abs() / e.stderr);
        }
        ok &= dc <= 1e-6 && worst_se <= 3.0;
        msg += &format!("n={n}: |inv-conv| {dc:.1e}, mc {worst_se:.2} SE; ");
    }
    Ok((ok, msg + "tol 1e-6 and 3 SE per bin"))
}

type Q = Ratio<i128>;
type Poly = BTreeMap<(u32, u32), Q>;

fn mul(a: &Poly, b: &Poly, e_max: u32) -> Poly {
    let mut out = Poly::new();
    for (&(pa, ea), ca) in a {
        for (&(pb, eb), cb) in b {
            if ea + eb <= e_max {
                *out.entry((pa + pb, ea + eb)).or_insert_with(|| Q::from_integer(0)) += ca * cb;
            }
        }
    }
    out.retain(|_, c| *c != Q::from_integer(0));
    out
}

fn combinatorics() -> Outcome {
    let fact = |n: u32| (1..=n as i128).product::<i128>();
    let kappa: Vec<Q> = [(0, 1), (0, 1), (1, 1), (2, 3), (-5, 7), (3, 11), (1, 13), (-2, 5), (7, 17)]
        .iter()
        .map(|&(a, b)| Q::new(a, b))
        .collect();
    // S = Σ_{j≥3} κ_j a^j e^{j−2}/j! in (a, e) = (iθ, n^{−1/2})
    let mut s = Poly::new();
    for (j, k) in kappa.iter().enumerate().skip(3) {
        s.insert((j as u32, j as u32 - 2), *k / Q::from_integer(fact(j as u32)));
    }
    let e_max = 6;
    let mut power = Poly::from([((0, 0), Q::from_integer(1))]);
    let (mut checked, mut bad) = (0, 0);
    for k in 1..=6usize {
        power = mul(&power, &s, e_max);
        for q in 3..=8usize {
            let want: Vec<_> = power.iter().filter(|(&(_, e), _)| e as usize == q - 2).collect();
            let got = xi_kq(k, q, &kappa)?;
            checked += 1;
            let same = match got {
                None => want.is_empty(),
                Some(m) => want.len() == 1 && *want[0].0 == (m.power, q as u32 - 2) && *want[0].1 == m.coeff,
            };
            bad += !same as usize;
        }
    }
    Ok((bad == 0, format!("{checked} (k, q) pairs with q <= 8, {bad} mismatches (exact)")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 fourier kernels vs quadrature", kernels),
        ("2 cubic term of the pareto-3 characteristic function", pareto_cubic_term),
        ("3 logarithmic term at even alpha", pareto_log_term),
        ("4 central region improvement", central_improvement),
        ("5 symmetric and two-sided formulas agree", symmetric_consistency),
        ("6 tail blend", tail_blend),
        ("7 moderate deviation refinement", moderate_deviation),
        ("8 rozovskii tail vs monte carlo", rozovskii),
        ("9 oracle triangle", oracle_triangle),
        ("10 composition coefficients exact", combinatorics),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {detail} [{:.1}s]", start.elapsed().as_secs_f64());
        failed += !ok as usize;
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
