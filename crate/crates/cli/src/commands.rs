//! The `expand`, `oracle` and `compare` subcommands, as functions that
//! return a manifest and a table so they can be re-run and tested
//! without the binary.

use std::time::Instant;

use edgeworth_core::correction::Evaluator;
use edgeworth_core::{moderate_region_bound, tail_equivalent, InversionOracle, OracleConfig, Region};
use rayon::prelude::*;

use crate::config::{Grid, SpecConfig};
use crate::conv::ConvolutionOracle;
use crate::manifest::{Cell, Manifest, Table};
use crate::mc::{mc_density, Sampler, SumSampler};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Inversion,
    Mc,
    Conv,
}

impl Engine {
    pub fn parse(s: &str) -> Result<Engine, CliError> {
        match s {
            "inversion" => Ok(Engine::Inversion),
            "mc" => Ok(Engine::Mc),
            "conv" => Ok(Engine::Conv),
            _ => Err(CliError::Parse(format!("unknown engine {s}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Inversion => "inversion",
            Engine::Mc => "mc",
            Engine::Conv => "conv",
        }
    }
}

/// One finished run.
#[derive(Debug, Clone)]
pub struct Output {
    pub manifest: Manifest,
    pub table: Table,
    /// Text for stderr, if any.
    pub summary: Option<String>,
}

impl Output {
    pub fn render(&self) -> String {
        let mut s = self.manifest.render();
        s.push_str(&self.table.render());
        s
    }
}

pub fn oracle_pairs(cfg: &OracleConfig) -> Vec<(String, String)> {
    [
        ("quad_abs_tol", format!("{:e}", cfg.quad_abs_tol)),
        ("quad_panel_limit", cfg.quad_panel_limit.to_string()),
        ("inversion_theta_cutoff", format!("{:e}", cfg.inversion_theta_cutoff)),
        ("inversion_t_max", cfg.inversion_t_max.to_string()),
        ("mc_samples", cfg.mc_samples.to_string()),
        ("mc_seed", cfg.mc_seed.to_string()),
        ("histogram_bins", cfg.histogram_bins.to_string()),
        ("kde_bandwidth", cfg.kde_bandwidth.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

pub fn oracle_from_pairs(pairs: &[(String, String)]) -> Result<OracleConfig, CliError> {
    let mut cfg = OracleConfig::default();
    for (k, v) in pairs {
        let bad = || CliError::Parse(format!("oracle setting {k}={v}"));
        match k.as_str() {
            "quad_abs_tol" => cfg.quad_abs_tol = v.parse().map_err(|_| bad())?,
            "quad_panel_limit" => cfg.quad_panel_limit = v.parse().map_err(|_| bad())?,
            "inversion_theta_cutoff" => cfg.inversion_theta_cutoff = v.parse().map_err(|_| bad())?,
            "inversion_t_max" => cfg.inversion_t_max = v.parse().map_err(|_| bad())?,
            "mc_samples" => cfg.mc_samples = v.parse().map_err(|_| bad())?,
            "mc_seed" => cfg.mc_seed = v.parse().map_err(|_| bad())?,
            "histogram_bins" => cfg.histogram_bins = v.parse().map_err(|_| bad())?,
            "kde_bandwidth" => cfg.kde_bandwidth = v.parse().map_err(|_| bad())?,
            _ => return Err(CliError::Parse(format!("unknown oracle setting {k}"))),
        }
    }
    Ok(cfg)
}

fn base_manifest(command: &str, spec: &SpecConfig, grid: Grid, ns: &[u64]) -> Manifest {
    Manifest {
        command: command.into(),
        spec_lines: spec.lines(),
        grid,
        n: ns.to_vec(),
        options: Vec::new(),
        oracle: Vec::new(),
        wall_clock_s: None,
    }
}

fn par_rows<T, F>(items: &[T], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Cell>, CliError> + Sync + Send,
{
    crate::pool().install(|| items.par_iter().map(&f).collect())
}

fn cross(ns: &[u64], xs: &[f64]) -> Vec<(u64, f64)> {
    ns.iter().flat_map(|&n| xs.iter().map(move |&x| (n, x))).collect()
}

/// Expansion breakdown: x, n, gaussian, one column per Edgeworth order,
/// correction, total, case_tag. `orders` caps the Edgeworth orders kept.
pub fn expand(spec: &SpecConfig, ns: &[u64], grid: Grid, orders: Option<usize>) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut ev = Evaluator::new(&spec.spec)?;
    if let Some(k) = orders {
        ev = ev.with_max_order(k);
    }
    let order_cols: Vec<usize> = ev.edgeworth(0.0, 1).1.iter().map(|t| t.0).collect();
    let names: Vec<String> = order_cols.iter().map(|j| format!("edgeworth_g{j}")).collect();
    let mut columns = vec!["x", "n", "gaussian"];
    columns.extend(names.iter().map(String::as_str));
    columns.extend(["correction", "total", "case_tag"]);
    let mut table = Table::new(&columns);
    table.rows = par_rows(&cross(ns, &grid.points()), |&(n, x)| {
        let r = ev.eval(x, n)?;
        let mut row = vec![Cell::Num(x), Cell::Int(n), Cell::Num(r.gaussian)];
        row.extend(r.edgeworth_terms.iter().map(|t| Cell::Num(t.1)));
        row.extend([Cell::Num(r.correction), Cell::Num(r.total), Cell::Text(r.case_tag.to_string())]);
        Ok(row)
    })?;
    let mut manifest = base_manifest("expand", spec, grid, ns);
    if let Some(k) = orders {
        manifest.options.push(("orders".into(), k.to_string()));
    }
    manifest.wall_clock_s = Some(start.elapsed().as_secs_f64());
    Ok(Output { manifest, table, summary: None })
}

/// Options specific to the `oracle` command.
#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub engine: Engine,
    pub config: OracleConfig,
}

/// Reference density of S_n/√n on the grid.
pub fn oracle(spec: &SpecConfig, ns: &[u64], grid: Grid, opts: &OracleOptions) -> Result<Output, CliError> {
    let start = Instant::now();
    let xs = grid.points();
    let cfg = &opts.config;
    let engine = opts.engine.as_str();
    let mut table;
    match opts.engine {
        Engine::Inversion => {
            let n_min = *ns.iter().min().unwrap_or(&1);
            let inv = InversionOracle::new(&spec.spec, n_min, cfg)?;
            table = Table::new(&["x", "n", "density", "engine"]);
            table.rows = par_rows(&cross(ns, &xs), |&(n, x)| {
                Ok(vec![Cell::Num(x), Cell::Int(n), Cell::Num(inv.density(x, n)?), Cell::Text(engine.into())])
            })?;
        }
        Engine::Conv => {
            let conv = ConvolutionOracle::new(&spec.spec)?;
            table = Table::new(&["x", "n", "density", "engine"]);
            table.rows = par_rows(&cross(ns, &xs), |&(n, x)| {
                Ok(vec![Cell::Num(x), Cell::Int(n), Cell::Num(conv.density(x, n)), Cell::Text(engine.into())])
            })?;
        }
        Engine::Mc => {
            let sampler = Sampler::new(&spec.spec)?;
            let width = if grid.count > 1 {
                grid.spacing()
            } else {
                8.0 / cfg.histogram_bins.max(1) as f64
            };
            table = Table::new(&["x", "n", "density", "engine", "stderr"]);
            for &n in ns {
                let draws = SumSampler::new(sampler.clone(), n, cfg.mc_samples, cfg.mc_seed).collect();
                for e in mc_density(&draws, &xs, width, cfg.kde_bandwidth) {
                    table.rows.push(vec![
                        Cell::Num(e.x),
                        Cell::Int(n),
                        Cell::Num(e.density),
                        Cell::Text(engine.into()),
                        Cell::Num(e.stderr),
                    ]);
                }
            }
        }
    }
    let mut manifest = base_manifest("oracle", spec, grid, ns);
    manifest.options.push(("engine".into(), engine.into()));
    manifest.oracle = oracle_pairs(cfg);
    manifest.wall_clock_s = Some(start.elapsed().as_secs_f64());
    Ok(Output { manifest, table, summary: None })
}

/// Tail index and moderate-deviation bound for the side of x.
fn side_region(spec: &SpecConfig, x: f64, n: u64) -> Region {
    let alpha = if x >= 0.0 { spec.spec.right_index() } else { spec.spec.left_index() };
    let bound = moderate_region_bound(alpha, n).unwrap_or(0.0);
    Region::classify(x, bound)
}

/// Signed errors of the three approximations against inversion.
pub fn compare(spec: &SpecConfig, ns: &[u64], grid: Grid, cfg: &OracleConfig) -> Result<Output, CliError> {
    let start = Instant::now();
    let ev = Evaluator::new(&spec.spec)?;
    let n_min = *ns.iter().min().unwrap_or(&1);
    let inv = InversionOracle::new(&spec.spec, n_min, cfg)?;
    let mirrored = spec.spec.mirrored();
    let mut table = Table::new(&[
        "x",
        "n",
        "oracle",
        "gaussian_err",
        "edgeworth_err",
        "corrected_err",
        "tail_equivalent",
        "region",
    ]);
    table.rows = par_rows(&cross(ns, &grid.points()), |&(n, x)| {
        let truth = inv.density(x, n)?;
        let r = ev.eval(x, n)?;
        let edgeworth = r.gaussian * (1.0 + r.edgeworth_terms.iter().map(|t| t.1).sum::<f64>());
        let tail = if x > 0.0 {
            tail_equivalent(&spec.spec, x, n).ok()
        } else if x < 0.0 {
            tail_equivalent(&mirrored, -x, n).ok()
        } else {
            None
        };
        Ok(vec![
            Cell::Num(x),
            Cell::Int(n),
            Cell::Num(truth),
            Cell::Num(r.gaussian - truth),
            Cell::Num(edgeworth - truth),
            Cell::Num(r.total - truth),
            Cell::Num(tail.unwrap_or(f64::NAN)),
            Cell::Text(side_region(spec, x, n).as_str().into()),
        ])
    })?;
    let worst = table
        .rows
        .iter()
        .map(|r| r[5].as_f64().unwrap_or(0.0).abs())
        .fold(0.0, f64::max);
    let mut manifest = base_manifest("compare", spec, grid, ns);
    manifest.options.push(("engine".into(), "inversion".into()));
    manifest.oracle = oracle_pairs(cfg);
    manifest.wall_clock_s = Some(start.elapsed().as_secs_f64());
    Ok(Output { manifest, table, summary: Some(format!("max|corrected_err| = {worst:.6e}")) })
}

/// Repeats the run described by a CSV file's manifest header.
pub fn rerun(csv_text: &str) -> Result<Output, CliError> {
    let m = Manifest::parse(csv_text)?;
    let spec = m.spec()?;
    match m.command.as_str() {
        "expand" => {
            let orders = m
                .option("orders")
                .map(|v| v.parse::<usize>().map_err(|_| CliError::Parse(format!("orders={v}"))))
                .transpose()?;
            expand(&spec, &m.n, m.grid, orders)
        }
        "oracle" => {
            let engine = Engine::parse(m.option("engine").unwrap_or("inversion"))?;
            let config = oracle_from_pairs(&m.oracle)?;
            oracle(&spec, &m.n, m.grid, &OracleOptions { engine, config })
        }
        "compare" => compare(&spec, &m.n, m.grid, &oracle_from_pairs(&m.oracle)?),
        other => Err(CliError::Parse(format!("manifest: unknown command {other}"))),
    }
}
