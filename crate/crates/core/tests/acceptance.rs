//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Select it alone with `cargo test -p qkrawtchouk --test acceptance`.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use qkrawtchouk::asymptotics::{
    arccos_argument, clt_variance_on, density_band, fourier_coeffs, limit_density, recurrence_limits,
    spectral_endpoint, support, LimitParams,
};
use qkrawtchouk::ensemble::{
    coeff_b, coeff_c, eigenvalue_mismatch, orthonormal_functions, spectral_basis, spectral_kernel,
    weight_ratio, QKParams,
};
use qkrawtchouk::measures::{Measure, ModelParams, Specialization};
use qkrawtchouk::partitions::{enumerate_in_box, to_coords};
use qkrawtchouk::qmath::{rat, Rational, Scalar};
use qkrawtchouk::sampler::{
    bin_average, empirical_density, linear_statistics, moments, sup_distance, SampleBatch,
};

const SPECS: [Specialization; 2] = [Specialization::Pp, Specialization::Pip];

type Outcome = Result<String, String>;

fn q_grid() -> Vec<Rational> {
    vec![rat(1, 3), rat(1, 2), rat(2, 1), rat(5, 3)]
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact_normalization() -> Outcome {
    let mut cases = 0;
    for q in q_grid() {
        for spec in SPECS {
            for n in 1..10 {
                for k in 1..=10 - n {
                    let m = Measure::new(ModelParams::new(n, k, q.clone(), spec).unwrap()).unwrap();
                    let mut total = rat(0, 1);
                    for l in enumerate_in_box(n, k).unwrap() {
                        total += m.prob(&l).unwrap();
                    }
                    if total != rat(1, 1) {
                        return Err(format!("{spec} n={n} k={k} q={q}: sum = {total}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("sum is exactly 1 in {cases} (n, k, q, spec) cases"))
}

fn form_equivalence() -> Outcome {
    let mut checked = 0;
    for q in q_grid() {
        for spec in SPECS {
            for n in 1..=4 {
                for k in 1..=4 {
                    let m = Measure::new(ModelParams::new(n, k, q.clone(), spec).unwrap()).unwrap();
                    let det = m.determinantal().unwrap();
                    for l in enumerate_in_box(n, k).unwrap() {
                        if m.prob(&l).unwrap() != det.prob(&l).unwrap() {
                            return Err(format!("{spec} n={n} k={k} q={q} lambda={l}"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} diagrams agree exactly"))
}

fn kernel_identity() -> Outcome {
    let mut worst_marginal = 0.0f64;
    let mut qs = q_grid();
    qs.extend([rat(4, 5), rat(3, 2)]);
    for q in &qs {
        for spec in SPECS {
            for n in 1..=4 {
                for k in 1..=4 {
                    let exact = ModelParams::new(n, k, q.clone(), spec).unwrap();
                    let m = Measure::new(exact.clone()).unwrap();
                    let mut marginal = vec![rat(0, 1); n + k];
                    for l in enumerate_in_box(n, k).unwrap() {
                        let p = m.prob(&l).unwrap();
                        for &a in to_coords(&l, n).unwrap().coords() {
                            marginal[a as usize] += p.clone();
                        }
                    }
                    let kernel = spectral_kernel(&exact.to_f64()).map_err(|e| e.to_string())?;
                    for (a, p) in marginal.iter().enumerate() {
                        worst_marginal = worst_marginal.max((kernel.get(a, a) - p.to_f64()).abs());
                    }
                }
            }
        }
    }
    let mut worst_eigen = 0.0f64;
    for q in [1.0 / 3.0, 0.5, 0.8, 1.25, 2.0, 5.0 / 3.0] {
        for spec in SPECS {
            for n in 1..=20 {
                for k in 1..=20 {
                    let params = ModelParams::new(n, k, q, spec).unwrap();
                    let mismatch = eigenvalue_mismatch(&params).map_err(|e| e.to_string())?;
                    worst_eigen = worst_eigen.max(mismatch);
                }
            }
        }
    }
    verdict(
        worst_marginal <= 1e-10 && worst_eigen <= 1e-8,
        format!("max |K(a,a) - P(a in config)| = {worst_marginal:.2e}, max eigenvalue mismatch = {worst_eigen:.2e}"),
    )
}

fn orthogonality() -> Outcome {
    let mut worst = 0.0f64;
    for q in [0.8, 1.25] {
        for spec in SPECS {
            let qk = QKParams::from_model(&ModelParams::new(10, 10, q, spec).unwrap()).unwrap();
            let phi = orthonormal_functions(&qk, 10).map_err(|e| e.to_string())?;
            for i in 0..10 {
                for j in 0..10 {
                    let g: f64 = phi[i].iter().zip(&phi[j]).map(|(x, y)| x * y).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((g - target).abs());
                }
            }
        }
    }
    verdict(worst <= 1e-10, format!("max |G - I| = {worst:.2e}"))
}

fn sampler_chi_square() -> Outcome {
    const DRAWS: usize = 100_000;
    let mut worst_p = 1.0f64;
    let mut seed = 100;
    for n in [2usize, 3] {
        for q in [rat(1, 2), rat(3, 2)] {
            for spec in SPECS {
                let exact = ModelParams::new(n, n, q.clone(), spec).unwrap();
                let m = Measure::new(exact.clone()).unwrap();
                seed += 1;
                let batch = SampleBatch::dpp(&exact.to_f64(), DRAWS, seed).map_err(|e| e.to_string())?;
                let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
                for s in &batch.samples {
                    *counts.entry(s.coords().to_vec()).or_default() += 1;
                }
                let (mut stat, mut cells) = (0.0, 0);
                for l in enumerate_in_box(n, n).unwrap() {
                    let key = to_coords(&l, n).unwrap().coords().to_vec();
                    let expected = m.prob(&l).unwrap().to_f64() * DRAWS as f64;
                    let observed = counts.get(&key).copied().unwrap_or(0) as f64;
                    stat += (observed - expected).powi(2) / expected;
                    cells += 1;
                }
                let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
                worst_p = worst_p.min(p);
                if p <= 1e-3 {
                    return Err(format!("{spec} n=k={n} q={q}: p-value {p:.2e}"));
                }
            }
        }
    }
    Ok(format!("8 goodness-of-fit tests, smallest p-value {worst_p:.3}"))
}

fn limit_density_check() -> Outcome {
    let lp = LimitParams::new(-0.5, 4.0, Specialization::Pp).unwrap();
    let params = ModelParams::from_gamma(100, 400, -0.5, Specialization::Pp).unwrap();
    let batch = SampleBatch::dpp(&params, 200, 2024).map_err(|e| e.to_string())?;
    let hist = empirical_density(&batch, 25).map_err(|e| e.to_string())?;
    let analytic = bin_average(&hist, 100, |t| limit_density(t, &lp));
    let empirical_sup = sup_distance(&hist.density, &analytic);

    let big = ModelParams::from_gamma(800, 3200, -0.5, Specialization::Pp).unwrap();
    let diag = spectral_basis(&big).map_err(|e| e.to_string())?.diagonal();
    let (lo, hi) = density_band(&lp).map_err(|e| e.to_string())?;
    let kernel_sup = diag
        .iter()
        .enumerate()
        .map(|(a, &d)| (a as f64 / 800.0, d))
        .filter(|&(t, _)| t > lo + 0.05 && t < hi - 0.05)
        .map(|(t, d)| (d - limit_density(t, &lp)).abs())
        .fold(0.0, f64::max);
    verdict(
        empirical_sup <= 0.05 && kernel_sup <= 0.01,
        format!("n=100 histogram sup-distance {empirical_sup:.4}, n=800 kernel diagonal sup-distance {kernel_sup:.4}"),
    )
}

fn degenerate_band() -> Outcome {
    let mut worst = 0.0f64;
    for g in [-10.0, -2.0, -0.5, -0.01, 0.01, 0.5, 2.0, 10.0] {
        let lp = LimitParams::new(g, 1.0, Specialization::Pp).unwrap();
        for i in 0..=1000 {
            let t = 2.0 * i as f64 / 1000.0;
            worst = worst.max((limit_density(t, &lp) - 0.5).abs());
        }
    }
    verdict(worst <= 1e-12, format!("max |rho - 1/2| = {worst:.2e}"))
}

fn support_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for spec in SPECS {
        for g in [-2.0, -0.5, 0.5, 2.0] {
            for c in [1.0, 4.0] {
                let lp = LimitParams::new(g, c, spec).unwrap();
                let s = support(&lp).map_err(|e| format!("{spec} gamma={g} c={c}: {e}"))?;
                worst = worst.max(s.discrepancy());
            }
        }
    }
    verdict(worst <= 1e-6, format!("16 cases, max endpoint disagreement {worst:.2e}"))
}

fn clt() -> Outcome {
    let lp = LimitParams::new(1.0, 2.0, Specialization::Pp).unwrap();
    let lim = recurrence_limits(&lp).map_err(|e| e.to_string())?;
    let (a, b) = (lim.a, lim.b);

    let params = ModelParams::from_gamma(40, 80, 1.0, Specialization::Pp).unwrap();
    let batch = SampleBatch::dpp(&params, 5000, 77).map_err(|e| e.to_string())?;
    let stats = moments(&linear_statistics(&batch, 1.0, |s| s));
    let ratio = stats.variance / (a * a);

    let lin_err = (clt_variance_on(|s| s, a, b) - a * a).abs();
    let sq_err = (clt_variance_on(|s| s * s, a, b) - (4.0 * a * a * b * b + 2.0 * a.powi(4))).abs();
    let first = fourier_coeffs(|s| s, a, b, 1)[0];
    verdict(
        (0.85..=1.15).contains(&ratio)
            && stats.skewness.abs() <= 0.1
            && lin_err <= 1e-8
            && sq_err <= 1e-8
            && (first - a).abs() <= 1e-12,
        format!(
            "Var/a^2 = {ratio:.4}, skewness = {:.4}, variance error for s: {lin_err:.1e}, for s^2: {sq_err:.1e}",
            stats.skewness
        ),
    )
}

fn formula_cross_checks() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    let mut points = 0;
    while points < 100 {
        let g: f64 = rng.random_range(-3.0..3.0);
        if g.abs() < 1e-2 {
            continue;
        }
        let c: f64 = rng.random_range(0.2..5.0);
        let t = rng.random_range(0.01..0.99) * (c + 1.0);
        let spec = SPECS[rng.random_range(0..2)];
        let lp = LimitParams::new(g, c, spec).unwrap();
        let direct = arccos_argument(t, &lp).map_err(|e| e.to_string())?;
        let via = spectral_endpoint(t, 1.0, &lp).map_err(|e| e.to_string())? / 2.0;
        worst = worst.max((direct - via).abs() / direct.abs().max(1.0));
        points += 1;
    }
    if worst > 1e-10 {
        return Err(format!("closed-form and operator arc angles differ by {worst:.2e}"));
    }

    let mut identities = 0;
    for spec in SPECS {
        for q in q_grid() {
            for (n, k) in [(1, 1), (2, 3), (3, 3), (4, 2)] {
                let exact = ModelParams::new(n, k, q.clone(), spec).unwrap();
                let qk = QKParams::from_model(&exact).unwrap();
                let m = Measure::new(exact).unwrap();
                for a in 0..qk.big_n {
                    let ratio = m.weight(a + 1).unwrap() / m.weight(a).unwrap();
                    if weight_ratio(a, &qk) != ratio {
                        return Err(format!("weight ratio {spec} n={n} k={k} q={q} a={a}"));
                    }
                    let (ai, big_n) = (a as i64, qk.big_n as i64);
                    let naive = qk.q.powi(ai + 1 - big_n) / qk.p.clone() * qk.q.one_minus_pow(big_n - ai)
                        / qk.q.one_minus_pow(ai + 1);
                    if naive != ratio.clone() * qk.q.clone() {
                        return Err(format!("uncorrected ratio is not q times the weight ratio at a={a}"));
                    }
                    let b = coeff_b(a, &qk);
                    let c = coeff_c(a + 1, &qk);
                    if b.clone() * b / ratio.clone() != c.clone() * c * ratio {
                        return Err(format!("symmetrization {spec} n={n} k={k} q={q} a={a}"));
                    }
                    identities += 1;
                }
            }
        }
    }
    Ok(format!(
        "arc angles agree to {worst:.1e} at 100 random points; {identities} exact weight-ratio and symmetrization identities"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact normalization", exact_normalization),
        ("character and determinantal forms agree", form_equivalence),
        ("kernel diagonal and operator spectrum", kernel_identity),
        ("orthonormality of the eigenbasis", orthogonality),
        ("DPP sampler goodness of fit", sampler_chi_square),
        ("limit density", limit_density_check),
        ("flat PP band at c = 1", degenerate_band),
        ("support from recurrence limits vs density edges", support_consistency),
        ("linear-statistic fluctuations", clt),
        ("formula cross-checks", formula_cross_checks),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1} s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.1} s)", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
