//! Exact and determinantal sampling of point configurations.
//!
//! Every draw `i` of a batch uses its own ChaCha20 stream `(seed, i)`, so a
//! batch is bit-reproducible regardless of how draws are spread over threads.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{spectral_kernel, KernelMatrix};
use crate::error::{Error, Result};
use crate::measures::{Measure, ModelParams};
use crate::partitions::{enumerate_in_box_capped, to_coords, PointConfig, DEFAULT_ENUMERATION_CAP};
use crate::qmath::Rational;

/// Version tag written into every serialized batch.
pub const SCHEMA_VERSION: u32 = 1;

/// Conditional probabilities below this are treated as kernel corruption.
const NEGATIVE_TOLERANCE: f64 = -1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Dpp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Dpp => "dpp",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "dpp" => Ok(Method::Dpp),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub schema: u32,
    pub params: ModelParams<f64>,
    pub seed: u64,
    pub method: Method,
    pub samples: Vec<PointConfig>,
}

impl SampleBatch {
    pub fn new(params: ModelParams<f64>, seed: u64, method: Method, samples: Vec<PointConfig>) -> Self {
        SampleBatch {
            schema: SCHEMA_VERSION,
            params,
            seed,
            method,
            samples,
        }
    }

    /// Draw `count` configurations by sequential conditioning of the
    /// spectral kernel.
    pub fn dpp(params: &ModelParams<f64>, count: usize, seed: u64) -> Result<Self> {
        let kernel = spectral_kernel(params)?;
        let samples = sample_dpp(&kernel, params.n, count, seed)?;
        Ok(SampleBatch::new(params.clone(), seed, Method::Dpp, samples))
    }

    /// Draw `count` configurations by inversion of the exact distribution.
    pub fn exact(params: &ModelParams<Rational>, count: usize, seed: u64) -> Result<Self> {
        sample_exact(params, count, seed)
    }

    /// Check the batch invariants against its parameters.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Malformed(format!("unsupported schema {}", self.schema)));
        }
        let max = self.params.lattice_max();
        for s in &self.samples {
            if s.len() != self.params.n {
                return Err(Error::CoordCount {
                    expected: self.params.n,
                    got: s.len(),
                });
            }
            if let Some(&a) = s.coords().first() {
                if a as usize > max {
                    return Err(Error::OutsideLattice { a: a as usize, max });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sample batch serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let batch: SampleBatch =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        batch.validate()?;
        Ok(batch)
    }
}

fn stream(seed: u64, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Inverse-CDF sampling from the exact measure. The CDF is built once in
/// rational arithmetic and stored as 128-bit fixed-point thresholds.
pub fn sample_exact(params: &ModelParams<Rational>, count: usize, seed: u64) -> Result<SampleBatch> {
    let measure = Measure::new(params.clone())?;
    let (n, k) = (params.n, params.k);
    let diagrams: Vec<_> = enumerate_in_box_capped(n, k, DEFAULT_ENUMERATION_CAP)?.collect();
    let configs = diagrams
        .iter()
        .map(|l| to_coords(l, n))
        .collect::<Result<Vec<_>>>()?;

    let scale = BigInt::from(1u8) << 128usize;
    let mut thresholds = Vec::with_capacity(diagrams.len().saturating_sub(1));
    let mut cdf = Rational::from_integer(0.into());
    for l in &diagrams[..diagrams.len() - 1] {
        cdf += measure.prob(l)?;
        let fixed = (cdf.numer() * &scale) / cdf.denom();
        // a CDF value of exactly one saturates to the top of the range
        thresholds.push(fixed.to_u128().unwrap_or(u128::MAX));
    }

    let samples = (0..count)
        .into_par_iter()
        .map(|i| {
            let u: u128 = stream(seed, i).random();
            configs[thresholds.partition_point(|&t| t <= u)].clone()
        })
        .collect();
    Ok(SampleBatch::new(params.to_f64(), seed, Method::Exact, samples))
}

/// Sequential sampling of the projection process with kernel `kernel` and
/// rank `n`: pick a site with probability proportional to the conditional
/// diagonal, then condition on it through a rank-one Schur-complement update.
pub fn sample_dpp(kernel: &KernelMatrix, n: usize, count: usize, seed: u64) -> Result<Vec<PointConfig>> {
    let trace = kernel.trace();
    if (trace - n as f64).abs() > 1e-6 || n > kernel.dim() {
        return Err(Error::NotProjection { rank: n, trace });
    }
    (0..count)
        .into_par_iter()
        .map(|i| draw_dpp(kernel, n, &mut stream(seed, i)))
        .collect()
}

fn draw_dpp(kernel: &KernelMatrix, n: usize, rng: &mut impl Rng) -> Result<PointConfig> {
    let dim = kernel.dim();
    let mut residual = kernel.diagonal();
    for v in residual.iter_mut() {
        *v = v.max(0.0);
    }
    // columns of the incremental Cholesky factor of the chosen minor
    let mut factors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let total: f64 = residual.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        let mut last_positive = None;
        for (a, &w) in residual.iter().enumerate() {
            if w > 0.0 {
                last_positive = Some(a);
                acc += w;
                if acc > target {
                    chosen = Some(a);
                    break;
                }
            }
        }
        let a = chosen
            .or(last_positive)
            .ok_or(Error::NegativeProbability { site: 0, value: total })?;
        let pivot = residual[a];
        let row = kernel.row(a);
        let mut col: Vec<f64> = row.to_vec();
        for f in &factors {
            let fa = f[a];
            for (c, fb) in col.iter_mut().zip(f) {
                *c -= fa * fb;
            }
        }
        let root = pivot.sqrt();
        for c in col.iter_mut() {
            *c /= root;
        }
        for b in 0..dim {
            let updated = residual[b] - col[b] * col[b];
            if updated < NEGATIVE_TOLERANCE {
                return Err(Error::NegativeProbability { site: b, value: updated });
            }
            residual[b] = updated.max(0.0);
        }
        residual[a] = 0.0;
        factors.push(col);
        points.push(a as u32);
    }
    PointConfig::from_points(points)
}

/// Binned point counts of a batch on the rescaled axis `x = a / n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Bin `b` covers lattice sites `site_edges[b] .. site_edges[b + 1]`.
    pub site_edges: Vec<usize>,
    /// Left/right ends of each bin in the rescaled variable.
    pub x_edges: Vec<f64>,
    /// Mean number of points per draw in each bin; sums to `n`.
    pub mass: Vec<f64>,
    /// Mean occupation per site in each bin, comparable to the limit density.
    pub density: Vec<f64>,
}

/// Histogram of `x = a / n` over `bins` groups of consecutive lattice sites.
pub fn empirical_density(batch: &SampleBatch, bins: usize) -> Result<Histogram> {
    let n = batch.params.n;
    let sites = batch.params.lattice_max() + 1;
    if batch.samples.is_empty() {
        return Err(Error::InvalidParameter("empty sample batch".into()));
    }
    if bins == 0 || bins > sites {
        return Err(Error::InvalidParameter(format!(
            "bin count {bins} must lie in 1..={sites}"
        )));
    }
    let site_edges: Vec<usize> = (0..=bins).map(|b| b * sites / bins).collect();
    let mut bin_of = vec![0usize; sites];
    for b in 0..bins {
        for slot in &mut bin_of[site_edges[b]..site_edges[b + 1]] {
            *slot = b;
        }
    }
    let mut counts = vec![0u64; bins];
    for s in &batch.samples {
        for &a in s.coords() {
            counts[bin_of[a as usize]] += 1;
        }
    }
    let draws = batch.samples.len() as f64;
    let mass: Vec<f64> = counts.iter().map(|&c| c as f64 / draws).collect();
    let density = mass
        .iter()
        .enumerate()
        .map(|(b, m)| m / (site_edges[b + 1] - site_edges[b]) as f64)
        .collect();
    let x_edges = site_edges.iter().map(|&s| s as f64 / n as f64).collect();
    Ok(Histogram {
        site_edges,
        x_edges,
        mass,
        density,
    })
}

/// Per-bin average of `density` over the lattice sites of each bin of
/// `hist`, with `t = a / n`.
pub fn bin_average(hist: &Histogram, n: usize, density: impl Fn(f64) -> f64) -> Vec<f64> {
    hist.site_edges
        .windows(2)
        .map(|w| {
            let sum: f64 = (w[0]..w[1]).map(|a| density(a as f64 / n as f64)).sum();
            sum / (w[1] - w[0]) as f64
        })
        .collect()
}

/// Largest absolute difference between two equally long sequences.
pub fn sup_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// `X_f = sum_i f(e^{gamma a_i / n})` for every draw of the batch.
pub fn linear_statistics(batch: &SampleBatch, gamma: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = batch.params.n as f64;
    batch
        .samples
        .iter()
        .map(|s| s.coords().iter().map(|&a| f((gamma * a as f64 / n).exp())).sum())
        .collect()
}

/// Sample mean, variance (unbiased), skewness and excess kurtosis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn moments(values: &[f64]) -> Moments {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let central = |p: i32| values.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
    let m2 = central(2);
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (central(3) / m2.powf(1.5), central(4) / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Moments {
        mean,
        variance: if n > 1.0 { m2 * n / (n - 1.0) } else { 0.0 },
        skewness,
        excess_kurtosis,
    }
}

/// Exact variance of `sum_i g(a_i)` under the process with kernel `kernel`:
/// `sum_a g^2 K(a,a) - sum_{a,b} g(a) g(b) K(a,b)^2`.
pub fn kernel_variance(kernel: &KernelMatrix, g: &[f64]) -> f64 {
    let d = kernel.dim();
    let diag: f64 = (0..d).map(|a| g[a] * g[a] * kernel.get(a, a)).sum();
    let cross: f64 = (0..d)
        .into_par_iter()
        .map(|a| {
            let row = kernel.row(a);
            g[a] * row.iter().zip(g).map(|(k, gb)| gb * k * k).sum::<f64>()
        })
        .sum();
    diag - cross
}

/// Empirical probability that each site is occupied.
pub fn occupation_frequencies(batch: &SampleBatch) -> Vec<f64> {
    let sites = batch.params.lattice_max() + 1;
    let mut counts = vec![0u64; sites];
    for s in &batch.samples {
        for &a in s.coords() {
            counts[a as usize] += 1;
        }
    }
    let draws = batch.samples.len().max(1) as f64;
    counts.iter().map(|&c| c as f64 / draws).collect()
}
