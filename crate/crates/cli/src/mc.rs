//! Monte Carlo oracle: inverse-CDF sampling of X and empirical densities
//! of S_n/√n.
//!
//! The body |x| ≤ 50 is tabulated on 4096 cells uniform in atan(x), with
//! cubic Hermite interpolation of x(F) using the slopes 1/f. Draws that
//! land beyond the table are resolved by Newton iteration on the exact
//! survival function.

use edgeworth_core::{DensitySpec, Error as CoreError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::CliError;

const TABLE_CELLS: usize = 4096;
const TABLE_EDGE: f64 = 50.0;
/// Sums drawn per RNG stream.
pub const CHUNK: u64 = 1 << 14;

/// Tabulated inverse CDF of one spec.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: DensitySpec,
    xs: Vec<f64>,
    cdf: Vec<f64>,
    slope: Vec<f64>,
    /// P(X < −TABLE_EDGE) and P(X > TABLE_EDGE)
    left_mass: f64,
    right_mass: f64,
}

impl Sampler {
    pub fn new(spec: &DensitySpec) -> Result<Sampler, CliError> {
        let umax = TABLE_EDGE.atan();
        let xs: Vec<f64> = (0..=TABLE_CELLS)
            .map(|i| (-umax + 2.0 * umax * i as f64 / TABLE_CELLS as f64).tan())
            .collect();
        // cell masses are independent, so do them in parallel
        let cells: Result<Vec<f64>, CoreError> = xs
            .par_windows(2)
            .map(|w| {
                let integ = edgeworth_core::quadrature::Integrator::new(1e-17, 1e-13);
                Ok(integ.integrate(|x| spec.density(x), w[0], w[1])?.value)
            })
            .collect();
        let cells = cells?;
        let left_mass = spec.mirrored().survival(TABLE_EDGE)?;
        let right_mass = spec.survival(TABLE_EDGE)?;
        let mut cdf = Vec::with_capacity(xs.len());
        let mut acc = left_mass;
        cdf.push(acc);
        for m in &cells {
            acc += m;
            cdf.push(acc);
        }
        // spread the quadrature rounding evenly so the table ends exactly at 1 − right_mass
        let target = 1.0 - right_mass;
        let drift = (target - acc) / (acc - left_mass);
        for f in cdf.iter_mut() {
            *f = left_mass + (*f - left_mass) * (1.0 + drift);
        }
        let slope = xs.iter().map(|&x| 1.0 / spec.density(x)).collect();
        Ok(Sampler { spec: spec.clone(), xs, cdf, slope, left_mass, right_mass })
    }

    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    /// x with P(X ≤ x) = u, for u in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        if u < self.left_mass {
            return -tail_quantile(&self.spec.mirrored(), u);
        }
        if u > 1.0 - self.right_mass {
            return tail_quantile(&self.spec, 1.0 - u);
        }
        let i = match self.cdf.partition_point(|&f| f <= u) {
            0 => 0,
            k => (k - 1).min(TABLE_CELLS - 1),
        };
        let h = self.cdf[i + 1] - self.cdf[i];
        if h <= 0.0 {
            return self.xs[i];
        }
        let t = (u - self.cdf[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let x = (2.0 * t3 - 3.0 * t2 + 1.0) * self.xs[i]
            + (t3 - 2.0 * t2 + t) * h * self.slope[i]
            + (-2.0 * t3 + 3.0 * t2) * self.xs[i + 1]
            + (t3 - t2) * h * self.slope[i + 1];
        x.clamp(self.xs[i], self.xs[i + 1])
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        // open interval (0, 1)
        let u = (rng.gen::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) + 0.5 / (1u64 << 53) as f64;
        self.quantile(u)
    }
}

/// Solves P(X > x) = v for x beyond the table edge.
fn tail_quantile(spec: &DensitySpec, v: f64) -> f64 {
    let alpha = spec.right_index();
    let s_edge = spec.survival(TABLE_EDGE).unwrap_or(v);
    // power law through the edge value as a starting point
    let mut x = TABLE_EDGE * (s_edge / v).powf(1.0 / alpha);
    for _ in 0..60 {
        let s = match spec.survival(x) {
            Ok(s) => s,
            Err(_) => break,
        };
        let f = spec.density(x);
        if !(f > 0.0) {
            break;
        }
        // Newton in log space: ln S(x) = ln v
        let step = (s / f) * (s / v).ln();
        let next = (x + step).max(0.5 * x + 0.5 * TABLE_EDGE);
        if (next - x).abs() <= 1e-13 * x {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Independent draws of S_n/√n with reproducible chunked streams.
#[derive(Debug, Clone)]
pub struct SumSampler {
    sampler: Sampler,
    pub n: u64,
    pub samples: u64,
    pub seed: u64,
}

impl SumSampler {
    pub fn new(sampler: Sampler, n: u64, samples: u64, seed: u64) -> SumSampler {
        SumSampler { sampler, n, samples, seed }
    }

    pub fn chunk_count(&self) -> u64 {
        self.samples.div_ceil(CHUNK)
    }

    /// Draws belonging to chunk `idx`. Chunk k always uses stream k of the
    /// seed, so results do not depend on the thread count.
    pub fn chunk(&self, idx: u64) -> Vec<f64> {
        let start = idx * CHUNK;
        let len = CHUNK.min(self.samples.saturating_sub(start));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(idx);
        let scale = 1.0 / (self.n as f64).sqrt();
        (0..len)
            .map(|_| {
                let mut s = 0.0;
                for _ in 0..self.n {
                    s += self.sampler.draw(&mut rng);
                }
                s * scale
            })
            .collect()
    }

    /// All draws, in chunk order.
    pub fn collect(&self) -> Vec<f64> {
        let chunks: Vec<Vec<f64>> = crate::pool().install(|| {
            (0..self.chunk_count()).into_par_iter().map(|i| self.chunk(i)).collect()
        });
        chunks.concat()
    }

    /// Map each chunk to a summary and combine them.
    pub fn fold<T, M, R>(&self, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Sync + Clone,
        M: Fn(&[f64]) -> T + Send + Sync,
        R: Fn(T, T) -> T + Send + Sync,
    {
        crate::pool().install(|| {
            (0..self.chunk_count())
                .into_par_iter()
                .map(|i| map(&self.chunk(i)))
                .reduce(|| identity.clone(), &reduce)
        })
    }
}

/// Density estimate at a point with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub x: f64,
    pub density: f64,
    pub stderr: f64,
}

/// Histogram with bins of width `width` centred on each grid point.
pub fn histogram_density(samples: &[f64], grid: &[f64], width: f64) -> Vec<DensityEstimate> {
    let n = samples.len() as f64;
    grid.iter()
        .map(|&x| {
            let (lo, hi) = (x - 0.5 * width, x + 0.5 * width);
            let k = samples.iter().filter(|&&s| s >= lo && s < hi).count() as f64;
            let p = k / n;
            DensityEstimate { x, density: p / width, stderr: (p * (1.0 - p) / n).sqrt() / width }
        })
        .collect()
}

/// Gaussian kernel estimate with bandwidth `h`.
pub fn kde_density(samples: &[f64], grid: &[f64], h: f64) -> Vec<DensityEstimate> {
    let n = samples.len() as f64;
    let norm = 1.0 / (h * (2.0 * std::f64::consts::PI).sqrt());
    grid.iter()
        .map(|&x| {
            let (mut s1, mut s2) = (0.0, 0.0);
            for &s in samples {
                let z = (x - s) / h;
                if z.abs() < 9.0 {
                    let k = norm * (-0.5 * z * z).exp();
                    s1 += k;
                    s2 += k * k;
                }
            }
            let mean = s1 / n;
            let var = (s2 / n - mean * mean).max(0.0);
            DensityEstimate { x, density: mean, stderr: (var / n).sqrt() }
        })
        .collect()
}

/// Histogram when `bandwidth` is 0, otherwise KDE.
pub fn mc_density(samples: &[f64], grid: &[f64], bin_width: f64, bandwidth: f64) -> Vec<DensityEstimate> {
    if bandwidth > 0.0 {
        kde_density(samples, grid, bandwidth)
    } else {
        histogram_density(samples, grid, bin_width)
    }
}
