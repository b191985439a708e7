//! One function per subcommand, each returning every representation of its
//! result so the caller only has to pick a format.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use serde_json::{json, Value};

use qkrawtchouk::asymptotics::{clt_variance_on, limit_density, recurrence_limits, support, LimitShape};
use qkrawtchouk::ensemble::{eigenvalue_mismatch, orthonormal_functions, spectral_kernel, QKParams};
use qkrawtchouk::measures::{log_prob, Measure, ModelParams};
use qkrawtchouk::partitions::{enumerate_in_box, from_coords, profile, to_coords, Partition, PointConfig};
use qkrawtchouk::qmath::{rat, LogReal, Rational, Scalar};
use qkrawtchouk::sampler::{
    bin_average, empirical_density, kernel_variance, linear_statistics, moments, sample_dpp, sup_distance,
    Method, SampleBatch,
};

use crate::config::{ExperimentConfig, TestFunction};
use crate::output::{envelope, float, Table};
use crate::render;

/// Largest `n + k` for which `verify` runs the exact-arithmetic checks.
pub const EXACT_VERIFY_LIMIT: usize = 10;

pub struct Output {
    pub json: Value,
    pub table: Table,
    pub svg: Option<String>,
    pub binary: Option<Vec<u8>>,
    /// False when a verification check failed.
    pub passed: bool,
}

impl Output {
    fn new(command: &str, body: Value, table: Table) -> Self {
        Output {
            json: envelope(command, body),
            table,
            svg: None,
            binary: None,
            passed: true,
        }
    }
}

fn coords_text(p: &PointConfig) -> String {
    p.coords().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

fn sides(params: &ModelParams<f64>) -> (usize, usize) {
    (params.n, params.k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    /// Measured deviation for floating-point checks.
    pub error: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    fn exact(name: &'static str, ok: bool, detail: String) -> Self {
        Check {
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            error: None,
            tolerance: None,
            detail,
        }
    }

    fn within(name: &'static str, error: f64, tolerance: f64, detail: String) -> Self {
        Check {
            name,
            status: if error <= tolerance { Status::Pass } else { Status::Fail },
            error: Some(error),
            tolerance: Some(tolerance),
            detail,
        }
    }

    fn skip(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            status: Status::Skip,
            error: None,
            tolerance: None,
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        Check {
            name,
            status: Status::Fail,
            error: None,
            tolerance: None,
            detail: err.to_string(),
        }
    }
}

fn exact_checks(exact: &ModelParams<Rational>, corrupt_weight: bool) -> anyhow::Result<Vec<Check>> {
    let (n, k) = (exact.n, exact.k);
    let measure = Measure::new(exact.clone())?;
    let diagrams: Vec<Partition> = enumerate_in_box(n, k)?.collect();
    let probs: Vec<Rational> = diagrams.iter().map(|l| measure.prob(l)).collect::<Result<_, _>>()?;
    let mut checks = Vec::new();

    let total: Rational = probs.iter().cloned().sum();
    checks.push(Check::exact(
        "normalization",
        total == rat(1, 1),
        format!("sum over {} diagrams = {total}", diagrams.len()),
    ));

    if exact.q.is_one() {
        checks.push(Check::skip("normalization-determinantal", "degenerate at q = 1"));
        checks.push(Check::skip("prob-vs-determinantal", "degenerate at q = 1"));
        checks.push(Check::skip("kernel-diagonal", "degenerate at q = 1"));
        return Ok(checks);
    }

    // Squared-Vandermonde weights scaled so the empty diagram gets its
    // character-form probability; they sum to one only if W is right.
    let big_n = exact.lattice_max();
    let weight = |a: usize| -> qkrawtchouk::Result<Rational> {
        let w = measure.weight(a)?;
        Ok(if corrupt_weight && a == big_n { w * rat(2, 1) } else { w })
    };
    let coords: Vec<PointConfig> = diagrams.iter().map(|l| to_coords(l, n)).collect::<Result<_, _>>()?;
    let empty = to_coords(&Partition::empty(), n)?;
    let scale = measure.prob(&Partition::empty())? / measure.vandermonde_weight_with(empty.coords(), weight)?;
    let mut det_total = rat(0, 1);
    for c in &coords {
        det_total += measure.vandermonde_weight_with(c.coords(), weight)? * scale.clone();
    }
    checks.push(Check::exact(
        "normalization-determinantal",
        det_total == rat(1, 1),
        format!("sum = {det_total}"),
    ));

    let det = measure.determinantal()?;
    let mut mismatches = 0;
    for (l, p) in diagrams.iter().zip(&probs) {
        if det.prob(l)? != *p {
            mismatches += 1;
        }
    }
    checks.push(Check::exact(
        "prob-vs-determinantal",
        mismatches == 0,
        format!("{mismatches} of {} diagrams differ", diagrams.len()),
    ));

    let mut marginal = vec![rat(0, 1); big_n + 1];
    for (c, p) in coords.iter().zip(&probs) {
        for &a in c.coords() {
            marginal[a as usize] += p.clone();
        }
    }
    match spectral_kernel(&exact.to_f64()) {
        Ok(kernel) => {
            let err = marginal
                .iter()
                .enumerate()
                .map(|(a, p)| (kernel.get(a, a) - p.to_f64()).abs())
                .fold(0.0, f64::max);
            checks.push(Check::within("kernel-diagonal", err, 1e-10, "max |K(a,a) - P(a occupied)|".into()));
        }
        Err(e) => checks.push(Check::failed("kernel-diagonal", e)),
    }
    Ok(checks)
}

fn operator_checks(model: &ModelParams<f64>) -> Vec<Check> {
    if model.q == 1.0 {
        return vec![
            Check::skip("orthogonality", "degenerate at q = 1"),
            Check::skip("eigenvalues", "degenerate at q = 1"),
        ];
    }
    let mut checks = Vec::new();
    let ortho = QKParams::from_model(model).and_then(|qk| orthonormal_functions(&qk, model.n));
    match ortho {
        Ok(phi) => {
            let mut err = 0.0f64;
            for i in 0..phi.len() {
                for j in 0..phi.len() {
                    let g: f64 = phi[i].iter().zip(&phi[j]).map(|(x, y)| x * y).sum();
                    err = err.max((g - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
            checks.push(Check::within(
                "orthogonality",
                err,
                1e-10,
                format!("max |G - I| over degrees 0..{}", phi.len()),
            ));
        }
        Err(e) => checks.push(Check::failed("orthogonality", e)),
    }
    match eigenvalue_mismatch(model) {
        Ok(err) => checks.push(Check::within(
            "eigenvalues",
            err,
            1e-8,
            "normwise distance between operator spectrum and A(m)".into(),
        )),
        Err(e) => checks.push(Check::failed("eigenvalues", e)),
    }
    checks
}

/// Exact and floating-point identity checks for one model. With
/// `corrupt_weight` the top lattice weight is doubled, which the
/// determinantal normalization must catch.
pub fn verify(cfg: &ExperimentConfig, corrupt_weight: bool) -> anyhow::Result<Output> {
    let model = cfg.model()?;
    let (n, k) = sides(&model.float);
    let mut checks = if n + k <= EXACT_VERIFY_LIMIT {
        exact_checks(&model.exact_or_promoted()?, corrupt_weight)?
    } else {
        let why = format!("exact checks need n + k <= {EXACT_VERIFY_LIMIT}");
        ["normalization", "normalization-determinantal", "prob-vs-determinantal", "kernel-diagonal"]
            .into_iter()
            .map(|name| Check::skip(name, why.clone()))
            .collect()
    };
    checks.extend(operator_checks(&model.float));
    let passed = checks.iter().all(|c| c.status != Status::Fail);

    let mut table = Table::new(&["check", "status", "error", "tolerance", "detail"]);
    for c in &checks {
        table.push(vec![
            c.name.into(),
            serde_json::to_value(c.status)?.as_str().unwrap_or_default().into(),
            c.error.map(float).unwrap_or_default(),
            c.tolerance.map(float).unwrap_or_default(),
            c.detail.clone(),
        ]);
    }
    let mut out = Output::new(
        "verify",
        json!({"params": model.float, "passed": passed, "checks": checks}),
        table,
    );
    out.passed = passed;
    Ok(out)
}

fn lambda_arg(cfg: &ExperimentConfig) -> anyhow::Result<Partition> {
    let text = cfg.lambda.as_deref().ok_or_else(|| anyhow!("--lambda is required"))?;
    Ok(text.parse()?)
}

pub fn prob(cfg: &ExperimentConfig) -> anyhow::Result<Output> {
    let model = cfg.model()?;
    let lambda = lambda_arg(cfg)?;
    let (n, _) = sides(&model.float);
    let coords = to_coords(&lambda, n)?;
    let ln_p = log_prob(&lambda, &model.float)?;
    let exact = match &model.exact {
        Some(m) => Some(Measure::new(m.clone())?.prob(&lambda)?),
        None => None,
    };
    let p = exact.as_ref().map(Scalar::to_f64).unwrap_or_else(|| ln_p.exp());
    let exact_text = exact.map(|r| r.to_string());

    let mut table = Table::new(&["lambda", "coords", "prob", "log_prob", "exact"]);
    table.push(vec![
        lambda.to_string(),
        coords_text(&coords),
        float(p),
        float(ln_p),
        exact_text.clone().unwrap_or_default(),
    ]);
    Ok(Output::new(
        "prob",
        json!({
            "params": model.float,
            "lambda": lambda.parts(),
            "coords": coords,
            "prob": p,
            "log_prob": ln_p,
            "exact": exact_text,
        }),
        table,
    ))
}

pub fn enumerate(cfg: &ExperimentConfig) -> anyhow::Result<Output> {
    let model = cfg.model()?;
    let (n, k) = sides(&model.float);
    let exact = match &model.exact {
        Some(m) => Some(Measure::new(m.clone())?),
        None => None,
    };
    let logm = Measure::new(model.float.map_q(|&q| LogReal::from_f64(q)))?;
    let mut table = Table::new(&["lambda", "size", "coords", "prob", "exact"]);
    let mut rows = Vec::new();
    let mut total = rat(0, 1);
    for lambda in enumerate_in_box(n, k)? {
        let coords = to_coords(&lambda, n)?;
        let (p, exact_text) = match &exact {
            Some(m) => {
                let r = m.prob(&lambda)?;
                total += r.clone();
                (r.to_f64(), Some(r.to_string()))
            }
            None => (logm.prob(&lambda)?.to_f64(), None),
        };
        table.push(vec![
            lambda.to_string(),
            lambda.size().to_string(),
            coords_text(&coords),
            float(p),
            exact_text.clone().unwrap_or_default(),
        ]);
        rows.push(json!({
            "lambda": lambda.parts(),
            "size": lambda.size(),
            "coords": coords,
            "prob": p,
            "exact": exact_text,
        }));
    }
    let total = exact.as_ref().map(|_| total.to_string());
    Ok(Output::new(
        "enumerate",
        json!({"params": model.float, "count": rows.len(), "exact_total": total, "diagrams": rows}),
        table,
    ))
}

pub fn kernel(cfg: &ExperimentConfig, binary: bool) -> anyhow::Result<Output> {
    let model = cfg.model()?;
    let kernel = spectral_kernel(&model.float)?;
    let dim = kernel.dim();
    let mut table = Table::new(&["a", "b", "value"]);
    for a in 0..dim {
        for b in 0..dim {
            table.push(vec![a.to_string(), b.to_string(), float(kernel.get(a, b))]);
        }
    }
    let rows: Vec<&[f64]> = (0..dim).map(|a| kernel.row(a)).collect();
    let mut out = Output::new(
        "kernel",
        json!({
            "params": model.float,
            "dim": dim,
            "trace": kernel.trace(),
            "projection_residual": kernel.projection_residual(),
            "kernel": rows,
        }),
        table,
    );
    if binary {
        out.binary = Some(kernel.to_bytes());
    }
    Ok(out)
}

fn draw(cfg: &ExperimentConfig, default_count: usize) -> anyhow::Result<SampleBatch> {
    let model = cfg.model()?;
    let count = cfg.count(default_count);
    let seed = cfg.seed();
    Ok(match cfg.method.unwrap_or(Method::Dpp) {
        Method::Dpp => SampleBatch::dpp(&model.float, count, seed)?,
        Method::Exact => SampleBatch::exact(&model.exact_or_promoted()?, count, seed)?,
    })
}

pub fn sample(cfg: &ExperimentConfig) -> anyhow::Result<Output> {
    let batch = draw(cfg, 1)?;
    let mut table = Table::new(&["sample", "lambda", "coords"]);
    for (i, s) in batch.samples.iter().enumerate() {
        let lambda = from_coords(s, batch.params.n)?;
        table.push(vec![i.to_string(), lambda.to_string(), coords_text(s)]);
    }
    Ok(Output::new("sample", serde_json::to_value(&batch)?, table))
}

/// Histogram of DPP draws against the bin-averaged limit density.
pub fn density(cfg: &ExperimentConfig) -> anyhow::Result<Output> {
    let model = cfg.model()?;
    let lp = cfg.limit()?;
    let (n, k) = sides(&model.float);
    let bins = cfg.bins.or(cfg.grid).unwrap_or(25).min(n + k);
    let batch = SampleBatch::dpp(&model.float, cfg.count(200), cfg.seed())?;
    let hist = empirical_density(&batch, bins)?;
    let analytic = bin_average(&hist, n, |t| limit_density(t, &lp));
    let sup = sup_distance(&hist.density, &analytic);

    let mut table = Table::new(&["x_lo", "x_hi", "empirical", "analytic"]);
    let mut rows = Vec::new();
    for b in 0..bins {
        let (lo, hi) = (hist.x_edges[b], hist.x_edges[b + 1]);
        table.push(vec![float(lo), float(hi), float(hist.density[b]), float(analytic[b])]);
        rows.push(json!({"x_lo": lo, "x_hi": hi, "empirical": hist.density[b], "analytic": analytic[b]}));
    }
    Ok(Output::new(
        "density",
        json!({
            "params": model.float,
            "limit": lp,
            "count": batch.samples.len(),
            "seed": batch.seed,
            "sup_distance": sup,
            "bins": rows,
        }),
        table,
    ))
}

/// Limit density and limit shape on a uniform grid of `[0, c + 1]`.
pub fn shape(cfg: &ExperimentConfig) -> anyhow::Result<Output> {
    let lp = cfg.limit()?;
    let grid = cfg.grid.unwrap_or(200).max(1);
    let shape = LimitShape::new(lp)?;
    let mut table = Table::new(&["x", "rho", "f"]);
    let mut xs = Vec::with_capacity(grid + 1);
    let mut rho = Vec::with_capacity(grid + 1);
    let mut f = Vec::with_capacity(grid + 1);
    for j in 0..=grid {
        let x = lp.length() * j as f64 / grid as f64;
        let (r, v) = (limit_density(x, &lp), shape.value(x));
        table.push(vec![float(x), float(r), float(v)]);
        xs.push(x);
        rho.push(r);
        f.push(v);
    }
    let support = match support(&lp) {
        Ok(s) => json!({"lo": s.lo, "hi": s.hi, "a": s.a, "b": s.b, "discrepancy": s.discrepancy()}),
        Err(e) => {
            log::warn!("support unavailable: {e}");
            Value::Null
        }
    };
    let mut out = Output::new(
        "shape",
        json!({
            "limit": lp,
            "edges": shape.edges(),
            "total_mass": shape.total_mass(),
            "support": support,
            "x": xs,
            "rho": rho,
            "f": f,
        }),
        table,
    );
    out.svg = Some(render::limit_svg(&shape));
    Ok(out)
}

/// Monte Carlo fluctuations of `sum_i f(e^{gamma a_i / n})` against the
/// limiting variance and the exact finite-n kernel variance.
pub fn clt(cfg: &ExperimentConfig) -> anyhow::Result<Output> {
    let model = cfg.model()?;
    let lp = cfg.limit()?;
    let func = cfg.function.unwrap_or(TestFunction::S);
    let lim = recurrence_limits(&lp)?;
    let f = func.on_support(lim.a, lim.b);
    let (n, _) = sides(&model.float);

    let kernel = spectral_kernel(&model.float)?;
    let count = cfg.count(1000);
    let samples = sample_dpp(&kernel, n, count, cfg.seed())?;
    let batch = SampleBatch::new(model.float.clone(), cfg.seed(), Method::Dpp, samples);
    let values = linear_statistics(&batch, lp.gamma, &f);
    let stats = moments(&values);
    let g: Vec<f64> = (0..kernel.dim())
        .map(|a| f((lp.gamma * a as f64 / n as f64).exp()))
        .collect();
    let finite = kernel_variance(&kernel, &g);
    let analytic = clt_variance_on(&f, lim.a, lim.b);
    let ratio = (analytic > 1e-12).then(|| stats.variance / analytic);

    let summary = [
        ("count", count as f64),
        ("mean", stats.mean),
        ("variance", stats.variance),
        ("finite_n_variance", finite),
        ("analytic_variance", analytic),
        ("ratio", ratio.unwrap_or(f64::NAN)),
        ("skewness", stats.skewness),
        ("excess_kurtosis", stats.excess_kurtosis),
        ("a", lim.a),
        ("b", lim.b),
    ];
    let mut table = Table::new(&["quantity", "value"]);
    for (name, v) in summary {
        table.push(vec![name.into(), float(v)]);
    }
    Ok(Output::new(
        "clt",
        json!({
            "params": model.float,
            "limit": lp,
            "function": func.name(),
            "seed": cfg.seed(),
            "count": count,
            "a": lim.a,
            "b": lim.b,
            "mean": stats.mean,
            "variance": stats.variance,
            "finite_n_variance": finite,
            "analytic_variance": analytic,
            "ratio": ratio,
            "skewness": stats.skewness,
            "excess_kurtosis": stats.excess_kurtosis,
        }),
        table,
    ))
}

/// Draws a diagram given by `--lambda` or taken from a saved sample batch.
pub fn render(
    cfg: &ExperimentConfig,
    sample_file: Option<&Path>,
    index: usize,
    overlay: bool,
) -> anyhow::Result<Output> {
    let (lambda, n, k, cfg) = match sample_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let batch = SampleBatch::from_json(&text)?;
            let s = batch
                .samples
                .get(index)
                .ok_or_else(|| anyhow!("sample {index} out of range ({} draws)", batch.samples.len()))?;
            let (n, k) = sides(&batch.params);
            let lambda = from_coords(s, n)?;
            let mut cfg = cfg.clone();
            cfg.n = Some(n);
            cfg.k = Some(k);
            cfg.spec = Some(batch.params.spec);
            if cfg.gamma.is_none() {
                cfg.gamma = Some(-(n as f64) * batch.params.q.ln());
            }
            cfg.q = None;
            (lambda, n, k, cfg)
        }
        None => {
            let n = cfg.n.ok_or_else(|| anyhow!("--n is required"))?;
            let k = cfg.k.ok_or_else(|| anyhow!("--k is required"))?;
            (lambda_arg(cfg)?, n, k, cfg.clone())
        }
    };
    if !lambda.fits_box(n, k) {
        bail!("{lambda} does not fit in the {n} x {k} box");
    }
    let shape = if overlay { Some(LimitShape::new(cfg.limit()?)?) } else { None };
    let prof = profile(&lambda, n, k)?;
    let dual = render::dual_sites(&lambda, n, k)?;
    let mut table = Table::new(&["x", "height"]);
    for (x, y) in prof.scaled() {
        table.push(vec![float(x), float(y)]);
    }
    let mut out = Output::new(
        "render",
        json!({
            "lambda": lambda.parts(),
            "n": n,
            "k": k,
            "points": prof.descents,
            "dual_points": dual,
            "heights": prof.heights,
        }),
        table,
    );
    out.svg = Some(render::diagram_svg(&lambda, n, k, shape.as_ref())?);
    Ok(out)
}
