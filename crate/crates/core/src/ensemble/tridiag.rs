//! Symmetric tridiagonal eigenproblem: eigenvalues by implicit QL,
//! selected eigenvectors by twisted factorization.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// All eigenvalues of the symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off` (`off.len() == diag.len() - 1`), ascending.
pub fn eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "off-diagonal length {} does not match dimension {n}",
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence(format!(
                    "QL iteration stalled at index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("tridiagonal eigenvalues"));
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Unit eigenvector for the (accurately known) eigenvalue `lambda`.
///
/// Factorizes `T - lambda` from both ends, twists at the index where the
/// two factorizations agree worst, and solves outward from it.
pub fn eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = diag
        .iter()
        .chain(off.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let pivmin = scale * f64::EPSILON * f64::EPSILON;
    let guard = |x: f64| {
        if x.abs() < pivmin {
            if x < 0.0 {
                -pivmin
            } else {
                pivmin
            }
        } else {
            x
        }
    };

    let mut dp = vec![0.0; n];
    dp[0] = diag[0] - lambda;
    for i in 1..n {
        dp[i] = diag[i] - lambda - off[i - 1] * off[i - 1] / guard(dp[i - 1]);
    }
    let mut dm = vec![0.0; n];
    dm[n - 1] = diag[n - 1] - lambda;
    for i in (0..n - 1).rev() {
        dm[i] = diag[i] - lambda - off[i] * off[i] / guard(dm[i + 1]);
    }
    let twist = (0..n)
        .min_by(|&a, &b| {
            let ga = (dp[a] + dm[a] - (diag[a] - lambda)).abs();
            let gb = (dp[b] + dm[b] - (diag[b] - lambda)).abs();
            ga.total_cmp(&gb)
        })
        .unwrap_or(0);

    const BIG: f64 = 1e150;
    let mut z = vec![0.0; n];
    z[twist] = 1.0;
    for i in (0..twist).rev() {
        z[i] = -off[i] * z[i + 1] / guard(dp[i]);
        if z[i].abs() > BIG {
            for v in &mut z[i..=twist] {
                *v /= BIG;
            }
        }
    }
    for i in twist + 1..n {
        z[i] = -off[i - 1] * z[i - 1] / guard(dm[i]);
        if z[i].abs() > BIG {
            for v in &mut z[..=i] {
                *v /= BIG;
            }
        }
    }
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut z {
        *v /= norm;
    }
    z
}
