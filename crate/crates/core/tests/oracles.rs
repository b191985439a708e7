//! Independent reference computations against the library's fast paths.

use nalgebra::DMatrix;
use qkrawtchouk::ensemble::{build_operator, cd_kernel, spectral_kernel, KernelMatrix};
use qkrawtchouk::measures::{
    dual_schur_principal, schur_principal, schur_ssyt_oracle, Measure, ModelParams, Specialization,
};
use qkrawtchouk::partitions::{complement_conjugate, enumerate_in_box, to_coords};
use qkrawtchouk::qmath::{rat, Rational, Scalar};
use qkrawtchouk::sampler::{occupation_frequencies, SampleBatch};

const SPECS: [Specialization; 2] = [Specialization::Pp, Specialization::Pip];

#[test]
fn principal_specializations_match_tableau_sums() {
    for q in [rat(1, 2), rat(5, 3), rat(-2, 7)] {
        for n in 1..=3usize {
            for k in 1..=3usize {
                let xs: Vec<Rational> = (0..n as i64).map(|i| q.powi(i)).collect();
                let ys: Vec<Rational> = (0..k as i64).map(|j| q.powi(j)).collect();
                for lambda in enumerate_in_box(n, k).unwrap() {
                    assert_eq!(
                        schur_principal(&lambda, n, &q).unwrap(),
                        schur_ssyt_oracle(&lambda, &xs).unwrap(),
                        "{lambda}"
                    );
                    let dual = complement_conjugate(&lambda, n, k).unwrap();
                    assert_eq!(
                        dual_schur_principal(&lambda, n, k, &q).unwrap(),
                        schur_ssyt_oracle(&dual, &ys).unwrap(),
                        "{lambda}"
                    );
                }
            }
        }
    }
}

fn dense_kernel(model: &ModelParams<f64>) -> KernelMatrix {
    let op = build_operator(model).unwrap();
    let dim = op.dim();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = op.diag[i];
        if i + 1 < dim {
            m[(i, i + 1)] = op.offdiag[i];
            m[(i + 1, i)] = op.offdiag[i];
        }
    }
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    // A(m) increases in m below q = 1 and decreases above it.
    let keep: Vec<usize> = if model.q < 1.0 {
        order[..model.n].to_vec()
    } else {
        order[dim - model.n..].to_vec()
    };
    let mut data = vec![0.0; dim * dim];
    for &j in &keep {
        let v = eig.eigenvectors.column(j);
        for a in 0..dim {
            for b in 0..dim {
                data[a * dim + b] += v[a] * v[b];
            }
        }
    }
    KernelMatrix::from_rows(dim, data).unwrap()
}

#[test]
fn spectral_kernel_matches_dense_eigensolver() {
    for spec in SPECS {
        for (n, k, q) in [(3, 5, 0.7), (6, 6, 0.9), (5, 9, 1.2), (10, 4, 1.6)] {
            let model = ModelParams::new(n, k, q, spec).unwrap();
            let fast = spectral_kernel(&model).unwrap();
            let err = fast.max_abs_diff(&dense_kernel(&model));
            assert!(err < 1e-9, "{spec} n={n} k={k} q={q}: {err}");
        }
    }
}

#[test]
fn spectral_kernel_matches_christoffel_darboux() {
    for spec in SPECS {
        for (n, k, q) in [(2, 2, 0.5), (3, 4, 0.8), (4, 3, 1.25), (4, 4, 1.5)] {
            let model = ModelParams::new(n, k, q, spec).unwrap();
            let err = spectral_kernel(&model)
                .unwrap()
                .max_abs_diff(&cd_kernel(&model).unwrap());
            assert!(err < 1e-10, "{spec} n={n} k={k} q={q}: {err}");
        }
    }
}

#[test]
fn kernel_minors_reproduce_exact_probabilities() {
    for spec in SPECS {
        for q in [rat(1, 2), rat(3, 2)] {
            let exact = ModelParams::new(3, 3, q.clone(), spec).unwrap();
            let kernel = spectral_kernel(&exact.to_f64()).unwrap();
            let measure = Measure::new(exact).unwrap();
            for lambda in enumerate_in_box(3, 3).unwrap() {
                let pts: Vec<usize> = to_coords(&lambda, 3)
                    .unwrap()
                    .coords()
                    .iter()
                    .map(|&a| a as usize)
                    .collect();
                let p = measure.prob(&lambda).unwrap().to_f64();
                assert!((kernel.minor_det(&pts) - p).abs() < 1e-12, "{spec} q={q} {lambda}");
            }
        }
    }
}

#[test]
fn exact_and_dpp_samplers_agree_on_occupation() {
    let exact = ModelParams::new(4, 5, rat(4, 5), Specialization::Pip).unwrap();
    let a = occupation_frequencies(&SampleBatch::exact(&exact, 40_000, 3).unwrap());
    let b = occupation_frequencies(&SampleBatch::dpp(&exact.to_f64(), 40_000, 4).unwrap());
    let kernel = spectral_kernel(&exact.to_f64()).unwrap();
    for site in 0..a.len() {
        let p = kernel.get(site, site);
        let sd = (p * (1.0 - p) / 40_000.0).sqrt();
        assert!((a[site] - p).abs() < 5.0 * sd + 1e-12, "exact sampler at {site}");
        assert!((b[site] - p).abs() < 5.0 * sd + 1e-12, "dpp sampler at {site}");
    }
}
