//! Spec file grammar.
//!
//! One `key = value` pair per line; blank lines and text after `#` are
//! ignored; keys are case sensitive and may appear once.
//!
//! ```text
//! form    = pareto-sym | rv-sym | two-sided
//! alpha   = <real > 2>            # pareto-sym, rv-sym
//! a_f     = <real > 0>            # pareto-sym, optional (needs b_f)
//! b_f     = <real > 0>            # pareto-sym, optional (needs a_f)
//! L       = <sv>                  # rv-sym
//! beta    = <real > 2>            # two-sided, right tail index
//! gamma   = <real > 2>            # two-sided, left tail index
//! L_plus  = <sv>                  # two-sided
//! L_minus = <sv>                  # two-sided
//!
//! <sv> = const:<c>                # L(x) = c
//!      | log:<p>                  # L(x) = ln(e + x)^p
//!      | log:<p>:<shift>          # L(x) = ln(shift + x)^p, shift > 1
//! ```
//!
//! Every spec is standardized to mean 0 and variance 1 after parsing.

use std::collections::BTreeMap;

use edgeworth_core::{DensitySpec, SlowlyVarying};

use crate::CliError;

/// A parsed spec file together with its normalized text.
#[derive(Debug, Clone)]
pub struct SpecConfig {
    pub entries: BTreeMap<String, String>,
    pub spec: DensitySpec,
}

impl SpecConfig {
    /// The `key=value` lines, sorted by key.
    pub fn lines(&self) -> Vec<String> {
        self.entries.iter().map(|(k, v)| format!("{k}={v}")).collect()
    }
}

fn perr(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

pub fn parse_spec(text: &str) -> Result<SpecConfig, CliError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| perr(format!("line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() || v.is_empty() {
            return Err(perr(format!("line {}: empty key or value", i + 1)));
        }
        if entries.insert(k.clone(), v).is_some() {
            return Err(perr(format!("line {}: duplicate key {k}", i + 1)));
        }
    }
    let spec = build(&entries)?;
    Ok(SpecConfig { entries, spec })
}

fn real(entries: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    let v = entries.get(key).ok_or_else(|| perr(format!("missing key {key}")))?;
    v.parse::<f64>()
        .map_err(|_| perr(format!("{key}: not a number: {v}")))
}

pub fn parse_sv(text: &str) -> Result<SlowlyVarying, CliError> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| perr(format!("slowly varying spec {text}: bad number {s}")))
    };
    match parts.as_slice() {
        ["const", c] => {
            let c = num(c)?;
            if !(c > 0.0) {
                return Err(perr("const slowly varying value must be positive"));
            }
            Ok(SlowlyVarying::constant(c))
        }
        ["log", p] => Ok(SlowlyVarying::log_power_shifted(num(p)?, std::f64::consts::E)),
        ["log", p, shift] => {
            let shift = num(shift)?;
            if !(shift > 1.0) {
                return Err(perr("log shift must exceed 1"));
            }
            Ok(SlowlyVarying::log_power_shifted(num(p)?, shift))
        }
        _ => Err(perr(format!("unknown slowly varying spec {text}"))),
    }
}

fn check_keys(entries: &BTreeMap<String, String>, allowed: &[&str]) -> Result<(), CliError> {
    for k in entries.keys() {
        if k != "form" && !allowed.contains(&k.as_str()) {
            return Err(perr(format!("unexpected key {k} for this form")));
        }
    }
    Ok(())
}

fn build(entries: &BTreeMap<String, String>) -> Result<DensitySpec, CliError> {
    let form = entries.get("form").ok_or_else(|| perr("missing key form"))?;
    let spec = match form.as_str() {
        "pareto-sym" => {
            check_keys(entries, &["alpha", "a_f", "b_f"])?;
            let alpha = real(entries, "alpha")?;
            match (entries.contains_key("a_f"), entries.contains_key("b_f")) {
                (false, false) => DensitySpec::pareto(alpha)?,
                (true, true) => {
                    DensitySpec::pareto_raw(alpha, real(entries, "a_f")?, real(entries, "b_f")?)?.standardized()?
                }
                _ => return Err(perr("a_f and b_f must be given together")),
            }
        }
        "rv-sym" => {
            check_keys(entries, &["alpha", "L"])?;
            let alpha = real(entries, "alpha")?;
            let l = parse_sv(entries.get("L").ok_or_else(|| perr("missing key L"))?)?;
            DensitySpec::symmetric_rv(alpha, l)?.standardized()?
        }
        "two-sided" => {
            check_keys(entries, &["beta", "gamma", "L_plus", "L_minus"])?;
            let beta = real(entries, "beta")?;
            let gamma = real(entries, "gamma")?;
            let lp = parse_sv(entries.get("L_plus").ok_or_else(|| perr("missing key L_plus"))?)?;
            let lm = parse_sv(entries.get("L_minus").ok_or_else(|| perr("missing key L_minus"))?)?;
            DensitySpec::two_sided(beta, gamma, lp, lm)?.standardized()?
        }
        other => return Err(perr(format!("unknown form {other}"))),
    };
    Ok(spec)
}

/// Evaluation grid `min:max:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Grid, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(perr(format!("grid must be min:max:count, got {text}")));
        }
        let min = parts[0].trim().parse::<f64>().map_err(|_| perr("grid min"))?;
        let max = parts[1].trim().parse::<f64>().map_err(|_| perr("grid max"))?;
        let count = parts[2].trim().parse::<usize>().map_err(|_| perr("grid count"))?;
        if count == 0 || !(max >= min) || (count == 1 && max != min) {
            return Err(perr(format!("invalid grid {text}")));
        }
        Ok(Grid { min, max, count })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + h * i as f64).collect()
    }

    pub fn spacing(&self) -> f64 {
        if self.count > 1 {
            (self.max - self.min) / (self.count - 1) as f64
        } else {
            1.0
        }
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

/// Comma separated list of positive integers.
pub fn parse_n_list(text: &str) -> Result<Vec<u64>, CliError> {
    let v: Result<Vec<u64>, _> = text.split(',').map(|s| s.trim().parse::<u64>()).collect();
    let v = v.map_err(|_| perr(format!("bad n list {text}")))?;
    if v.is_empty() || v.contains(&0) {
        return Err(perr("n must be positive"));
    }
    Ok(v)
}
