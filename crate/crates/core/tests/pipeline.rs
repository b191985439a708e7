//! End-to-end paths through sampling, serialization and the limit objects.

use qkrawtchouk::asymptotics::{limit_density, LimitParams, LimitShape};
use qkrawtchouk::ensemble::{spectral_basis, spectral_kernel, KernelMatrix};
use qkrawtchouk::measures::{ModelParams, Specialization};
use qkrawtchouk::partitions::{from_coords, profile, Partition};
use qkrawtchouk::sampler::{empirical_density, SampleBatch};
use qkrawtchouk::Error;

#[test]
fn batch_json_survives_round_trip_and_rejects_tampering() {
    let params = ModelParams::from_gamma(12, 20, 0.8, Specialization::Pip).unwrap();
    let batch = SampleBatch::dpp(&params, 30, 99).unwrap();
    let text = batch.to_json();
    assert_eq!(SampleBatch::from_json(&text).unwrap(), batch);

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["schema"] = 2.into();
    assert!(SampleBatch::from_json(&v.to_string()).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["samples"][0][0] = 32.into();
    assert!(matches!(
        SampleBatch::from_json(&v.to_string()),
        Err(Error::OutsideLattice { .. })
    ));
    assert!(SampleBatch::from_json("{").is_err());
}

#[test]
fn kernel_bytes_match_computed_kernel() {
    let model = ModelParams::new(5, 7, 0.85, Specialization::Pp).unwrap();
    let kernel = spectral_kernel(&model).unwrap();
    let bytes = kernel.to_bytes();
    assert_eq!(u64::from_le_bytes(bytes[..8].try_into().unwrap()), 12);
    assert_eq!(KernelMatrix::from_bytes(&bytes).unwrap(), kernel);
    assert!(KernelMatrix::from_bytes(&bytes[..bytes.len() - 1]).is_err());
}

#[test]
fn mean_profile_approaches_limit_shape() {
    let (n, k, g) = (60, 120, 1.5);
    let lp = LimitParams::new(g, 2.0, Specialization::Pp).unwrap();
    let shape = LimitShape::new(lp).unwrap();
    let params = ModelParams::from_gamma(n, k, g, Specialization::Pp).unwrap();
    let batch = SampleBatch::dpp(&params, 100, 5).unwrap();
    let mut mean = vec![0.0; n + k + 1];
    for s in &batch.samples {
        let lambda: Partition = from_coords(s, n).unwrap();
        for (acc, (_, y)) in mean.iter_mut().zip(profile(&lambda, n, k).unwrap().scaled()) {
            *acc += y / batch.samples.len() as f64;
        }
    }
    let worst = mean
        .iter()
        .enumerate()
        .map(|(x, y)| (y - shape.value(x as f64 / n as f64)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.03, "{worst}");
}

#[test]
fn kernel_diagonal_tracks_density_as_n_grows() {
    let lp = LimitParams::new(0.5, 1.5, Specialization::Pip).unwrap();
    let mut errors = Vec::new();
    for n in [50, 200] {
        let k = 3 * n / 2;
        let model = ModelParams::from_gamma(n, k, 0.5, Specialization::Pip).unwrap();
        let diag = spectral_basis(&model).unwrap().diagonal();
        // Bin averages over blocks of n/10 sites smooth out the lattice oscillation.
        let block = n / 10;
        let err = diag
            .chunks(block)
            .enumerate()
            .map(|(b, chunk)| {
                let rho: f64 = (0..chunk.len())
                    .map(|i| limit_density((b * block + i) as f64 / n as f64, &lp))
                    .sum::<f64>()
                    / chunk.len() as f64;
                (chunk.iter().sum::<f64>() / chunk.len() as f64 - rho).abs()
            })
            .fold(0.0, f64::max);
        errors.push(err);
    }
    assert!(errors[1] < errors[0], "{errors:?}");
    assert!(errors[1] < 0.02, "{errors:?}");
}

#[test]
fn histogram_mass_counts_points() {
    let params = ModelParams::new(7, 3, 1.3, Specialization::Pp).unwrap();
    let batch = SampleBatch::dpp(&params, 50, 8).unwrap();
    let hist = empirical_density(&batch, 10).unwrap();
    assert!((hist.mass.iter().sum::<f64>() - 7.0).abs() < 1e-12);
    assert_eq!(hist.density.len(), 10);
}
