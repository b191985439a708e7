//! Run settings: a TOML file layered under command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use serde::{Deserialize, Serialize};

use qkrawtchouk::asymptotics::LimitParams;
use qkrawtchouk::measures::{ModelParams, Specialization};
use qkrawtchouk::qmath::Rational;
use qkrawtchouk::sampler::Method;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Built-in test functions for linear statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `f(s) = 1`
    One,
    /// `f(s) = s`
    S,
    /// `f(s) = s^2`
    S2,
    /// Gaussian bump centred on the support midpoint with its half-width as scale.
    ExpWindow,
}

impl TestFunction {
    pub fn name(self) -> &'static str {
        match self {
            TestFunction::One => "one",
            TestFunction::S => "s",
            TestFunction::S2 => "s2",
            TestFunction::ExpWindow => "exp-window",
        }
    }

    /// The function on a support `[b - 2a, b + 2a]`.
    pub fn on_support(self, a: f64, b: f64) -> impl Fn(f64) -> f64 {
        move |s: f64| match self {
            TestFunction::One => 1.0,
            TestFunction::S => s,
            TestFunction::S2 => s * s,
            TestFunction::ExpWindow => {
                let w = 2.0 * a.abs();
                (-((s - b) / w).powi(2)).exp()
            }
        }
    }
}

/// `q` as written by the user: a decimal, a fraction, or a TOML float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QValue {
    Text(String),
    Number(f64),
}

impl QValue {
    pub fn to_rational(&self) -> anyhow::Result<Rational> {
        match self {
            QValue::Text(s) => parse_rational(s),
            // Display gives the shortest round-tripping decimal, so 0.8 stays 4/5.
            QValue::Number(x) => parse_rational(&x.to_string()),
        }
    }
}

/// Every setting a run can take. Flags override the file field by field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub q: Option<QValue>,
    pub gamma: Option<f64>,
    pub c: Option<f64>,
    pub spec: Option<Specialization>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub count: Option<usize>,
    pub method: Option<Method>,
    pub bins: Option<usize>,
    pub grid: Option<usize>,
    pub lambda: Option<String>,
    pub function: Option<TestFunction>,
}

macro_rules! layer {
    ($top:expr, $base:expr, $($field:ident),*) => {
        ExperimentConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).context("invalid config file")
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// `self` where set, otherwise `base`.
    pub fn over(self, base: ExperimentConfig) -> ExperimentConfig {
        layer!(
            self, base, n, k, q, gamma, c, spec, seed, out, format, count, method, bins, grid,
            lambda, function
        )
    }

    pub fn spec(&self) -> Specialization {
        self.spec.unwrap_or(Specialization::Pp)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn count(&self, default: usize) -> usize {
        self.count.unwrap_or(default)
    }

    pub fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn sides(&self) -> anyhow::Result<(usize, usize)> {
        let n = self.n.ok_or_else(|| anyhow!("--n is required"))?;
        let k = self.k.ok_or_else(|| anyhow!("--k is required"))?;
        Ok((n, k))
    }

    /// The finite model, exact when `q` was given and floating point when
    /// it comes from `gamma`.
    pub fn model(&self) -> anyhow::Result<Model> {
        let (n, k) = self.sides()?;
        let spec = self.spec();
        match (&self.q, self.gamma) {
            (Some(_), Some(_)) => bail!("--q and --gamma are mutually exclusive"),
            (None, None) => bail!("one of --q or --gamma is required"),
            (Some(q), None) => {
                let exact = ModelParams::new(n, k, q.to_rational()?, spec)?;
                Ok(Model {
                    float: exact.to_f64(),
                    exact: Some(exact),
                    gamma: None,
                })
            }
            (None, Some(g)) => {
                if !g.is_finite() {
                    bail!("gamma must be finite");
                }
                Ok(Model {
                    float: ModelParams::from_gamma(n, k, g, spec)?,
                    exact: None,
                    gamma: Some(g),
                })
            }
        }
    }

    /// Limit parameters from `gamma` and `c`, falling back to `k / n` and
    /// `-n ln q`.
    pub fn limit(&self) -> anyhow::Result<LimitParams> {
        let c = match (self.c, self.n, self.k) {
            (Some(c), _, _) => c,
            (None, Some(n), Some(k)) => k as f64 / n as f64,
            _ => bail!("pass --c, or --n and --k"),
        };
        let gamma = match (self.gamma, &self.q, self.n) {
            (Some(g), _, _) => g,
            (None, Some(q), Some(n)) => -(n as f64) * qkrawtchouk::qmath::rational_to_f64(&q.to_rational()?).ln(),
            _ => bail!("pass --gamma, or --q with --n"),
        };
        Ok(LimitParams::new(gamma, c, self.spec())?)
    }
}

/// A finite model in the precisions available for it.
#[derive(Clone, Debug)]
pub struct Model {
    pub float: ModelParams<f64>,
    pub exact: Option<ModelParams<Rational>>,
    pub gamma: Option<f64>,
}

impl Model {
    /// The exact model, promoting a floating `q` to the rational equal to it.
    pub fn exact_or_promoted(&self) -> anyhow::Result<ModelParams<Rational>> {
        match &self.exact {
            Some(m) => Ok(m.clone()),
            None => Ok(self.float.to_exact()?),
        }
    }
}

/// Parses `3/4`, `0.75`, `-1.5e-3` or `7` into an exact rational.
pub fn parse_rational(text: &str) -> anyhow::Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        bail!("empty number");
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().with_context(|| format!("numerator of {s:?}"))?;
        let den: BigInt = den.trim().parse().with_context(|| format!("denominator of {s:?}"))?;
        if den.is_zero() {
            bail!("zero denominator in {s:?}");
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().with_context(|| format!("exponent of {s:?}"))?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['+', '-']);
    let digits = format!("{int_digits}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        bail!("not a number: {s:?}");
    }
    let mut value: BigInt = digits.parse()?;
    if negative {
        value = -value;
    }
    let scale = exponent as i64 - frac_part.len() as i64;
    if scale.unsigned_abs() > 4096 {
        bail!("exponent out of range in {s:?}");
    }
    let ten = BigInt::from(10u8);
    let power: BigInt = Pow::pow(&ten, scale.unsigned_abs());
    Ok(if scale >= 0 {
        Rational::from_integer(value * power)
    } else {
        Rational::new(value, power)
    })
}
