//! Command-line front end for the q-Krawtchouk ensemble library.

pub mod commands;
pub mod config;
pub mod output;
pub mod render;

use std::path::PathBuf;

use anyhow::bail;
use clap::{Args, Parser, Subcommand};

use qkrawtchouk::measures::Specialization;
use qkrawtchouk::sampler::Method;

use config::{ExperimentConfig, Format, QValue, TestFunction};
use output::{emit, json_text};

#[derive(Debug, Parser)]
#[command(name = "qk", version, about = "Random Young diagrams from skew Howe duality")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// TOML file with any of the flags below; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Rows of the box.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Columns of the box.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Exact q as a fraction or decimal, e.g. 1/2 or 0.8.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Asymptotic parametrization q = exp(-gamma / n).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub spec: Option<Specialization>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the exact and numerical identity checks; exits 1 if any fails.
    Verify {
        /// Double the top lattice weight (negative control).
        #[arg(long, hide = true)]
        corrupt_weight: bool,
    },
    /// Probability of one diagram.
    Prob {
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Every diagram in the box with its probability.
    Enumerate,
    /// Correlation kernel on the lattice.
    Kernel {
        /// Write the raw matrix: u64 LE dimension, then f64 LE entries row by row.
        #[arg(long)]
        binary: bool,
    },
    /// Draw random diagrams.
    Sample {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Empirical density of DPP draws against the limit density.
    Density {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Limit density and limit shape on a grid.
    Shape {
        /// Aspect ratio k / n when no box is given.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Fluctuations of a linear statistic.
    Clt {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum)]
        function: Option<TestFunction>,
    },
    /// SVG of a diagram, from --lambda or from a saved sample batch.
    Render {
        #[arg(long)]
        lambda: Option<String>,
        /// Sample batch JSON written by `qk sample`.
        #[arg(long)]
        sample: Option<PathBuf>,
        /// Which draw of the batch to render.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Draw the analytic limit shape on top.
        #[arg(long)]
        overlay: bool,
    },
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum MethodArg {
    Exact,
    Dpp,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Dpp => Method::Dpp,
        }
    }
}

impl Cli {
    /// Settings from the flags alone.
    pub fn flags(&self) -> ExperimentConfig {
        let g = &self.global;
        let mut cfg = ExperimentConfig {
            n: g.n,
            k: g.k,
            q: g.q.clone().map(QValue::Text),
            gamma: g.gamma,
            spec: g.spec,
            seed: g.seed,
            out: g.out.clone(),
            format: g.format,
            ..Default::default()
        };
        match &self.command {
            Command::Prob { lambda } | Command::Render { lambda, .. } => cfg.lambda = lambda.clone(),
            Command::Sample { count, method } => {
                cfg.count = *count;
                cfg.method = method.map(Method::from);
            }
            Command::Density { count, bins } => {
                cfg.count = *count;
                cfg.bins = *bins;
            }
            Command::Shape { c, grid } => {
                cfg.c = *c;
                cfg.grid = *grid;
            }
            Command::Clt { count, function } => {
                cfg.count = *count;
                cfg.function = *function;
            }
            Command::Verify { .. } | Command::Enumerate | Command::Kernel { .. } => {}
        }
        cfg
    }

    /// Flags layered over the config file, if any.
    pub fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let file = match &self.global.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        Ok(self.flags().over(file))
    }
}

/// Runs one invocation and returns whether every check passed.
pub fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = cli.resolve()?;
    let out = match &cli.command {
        Command::Verify { corrupt_weight } => commands::verify(&cfg, *corrupt_weight)?,
        Command::Prob { .. } => commands::prob(&cfg)?,
        Command::Enumerate => commands::enumerate(&cfg)?,
        Command::Kernel { binary } => commands::kernel(&cfg, *binary)?,
        Command::Sample { .. } => commands::sample(&cfg)?,
        Command::Density { .. } => commands::density(&cfg)?,
        Command::Shape { .. } => commands::shape(&cfg)?,
        Command::Clt { .. } => commands::clt(&cfg)?,
        Command::Render { sample, index, overlay, .. } => {
            commands::render(&cfg, sample.as_deref(), *index, *overlay)?
        }
    };
    let default_format = match cli.command {
        Command::Render { .. } => Format::Svg,
        _ => Format::Json,
    };
    let path = cfg.out.as_deref();
    if let Some(bytes) = &out.binary {
        emit(bytes, path)?;
        return Ok(out.passed);
    }
    match cfg.format(default_format) {
        Format::Json => emit(json_text(&out.json).as_bytes(), path)?,
        Format::Csv => emit(out.table.to_csv().as_bytes(), path)?,
        Format::Svg => match &out.svg {
            Some(svg) => emit(svg.as_bytes(), path)?,
            None => bail!("svg output is only available for render and shape"),
        },
    }
    Ok(out.passed)
}
