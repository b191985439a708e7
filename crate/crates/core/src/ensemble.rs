//! q-Krawtchouk machinery: coefficients, the symmetrized difference operator
//! and the rank-`n` correlation kernel on the lattice `{0, ..., N}`.

pub mod tridiag;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{ModelParams, Specialization};
use crate::qmath::{choose2, q_pochhammer, QTable, Scalar};

/// Largest lattice size handled by the eigensolver unless overridden.
pub const DEFAULT_EIGEN_BUDGET: usize = 5000;

/// Normwise tolerance for matching computed eigenvalues with `A(m)`.
pub const EIGEN_MATCH_TOL: f64 = 1e-8;

/// Parameters `(p, N, q)` of the q-Krawtchouk family.
#[derive(Clone, Debug, PartialEq)]
pub struct QKParams<S> {
    pub p: S,
    pub big_n: usize,
    pub q: S,
}

impl<S: Scalar> QKParams<S> {
    pub fn new(p: S, big_n: usize, q: S) -> Result<Self> {
        if !p.is_positive() || !q.is_positive() {
            return Err(Error::InvalidParameter("p and q must be positive".into()));
        }
        if q.is_one() {
            return Err(Error::InvalidParameter("q = 1 has no q-Krawtchouk family".into()));
        }
        Ok(QKParams { p, big_n, q })
    }

    /// `N = n + k - 1`, with `p = q^{1-2n}` (PP) or `p = q^{2-2n-k}` (PIP).
    pub fn from_model(model: &ModelParams<S>) -> Result<Self> {
        let (n, k) = (model.n as i64, model.k as i64);
        let p = match model.spec {
            Specialization::Pp => model.q.powi(1 - 2 * n),
            Specialization::Pip => model.q.powi(2 - 2 * n - k),
        };
        QKParams::new(p, model.lattice_max(), model.q.clone())
    }
}

impl QKParams<f64> {
    fn ln_q(&self) -> f64 {
        self.q.ln()
    }

    fn ln_p(&self) -> f64 {
        self.p.ln()
    }
}

/// `A(m) = q^{-m} (1 - q^m)(1 + p q^m)`, the eigenvalue attached to degree `m`.
pub fn coeff_a<S: Scalar>(m: usize, qk: &QKParams<S>) -> S {
    let m = m as i64;
    qk.q.powi(-m) * qk.q.one_minus_pow(m) * (S::one() + qk.p.clone() * qk.q.powi(m))
}

/// `B(a) = 1 - q^{a-N}`.
pub fn coeff_b<S: Scalar>(a: usize, qk: &QKParams<S>) -> S {
    qk.q.one_minus_pow(a as i64 - qk.big_n as i64)
}

/// `C(a) = -p (1 - q^a)`.
pub fn coeff_c<S: Scalar>(a: usize, qk: &QKParams<S>) -> S {
    -(qk.p.clone() * qk.q.one_minus_pow(a as i64))
}

/// Monic three-term coefficients `(A_m, C_m)`:
///
/// `A_m = (1 - q^{m-N})(1 + p q^m) / ((1 + p q^{2m})(1 + p q^{2m+1}))`,
/// `C_m = -p q^{2m-N-1} (1 + p q^{m+N})(1 - q^m) / ((1 + p q^{2m-1})(1 + p q^{2m}))`.
pub fn monic_recurrence_coeffs<S: Scalar>(m: usize, qk: &QKParams<S>) -> (S, S) {
    let (q, p) = (&qk.q, &qk.p);
    let m = m as i64;
    let big_n = qk.big_n as i64;
    let one = S::one();
    let pq = |e: i64| one.clone() + p.clone() * q.powi(e);
    let a = q.one_minus_pow(m - big_n) * pq(m) / (pq(2 * m) * pq(2 * m + 1));
    let c = -(p.clone() * q.powi(2 * m - big_n - 1) * pq(m + big_n) * q.one_minus_pow(m))
        / (pq(2 * m - 1) * pq(2 * m));
    (a, c)
}

/// `alpha_m = 1 - A_m - C_m`: the monic recurrence reads
/// `x P_m = P_{m+1} + alpha_m P_m + beta_m P_{m-1}` in `x = q^{-a}`.
pub fn alpha<S: Scalar>(m: usize, qk: &QKParams<S>) -> S {
    let (a, c) = monic_recurrence_coeffs(m, qk);
    S::one() - a - c
}

/// `beta_m = A_{m-1} C_m` for `m >= 1`.
pub fn beta<S: Scalar>(m: usize, qk: &QKParams<S>) -> S {
    assert!(m >= 1, "beta is defined from m = 1");
    let (a, _) = monic_recurrence_coeffs(m - 1, qk);
    let (_, c) = monic_recurrence_coeffs(m, qk);
    a * c
}

/// Orthonormal recurrence coefficients `(a_m, b_m) = (sqrt(beta_m), alpha_{m-1})`
/// for `1 <= m <= N`, so that `x p_{m-1} = a_m p_m + b_m p_{m-1} + a_{m-1} p_{m-2}`.
pub fn normalized_recurrence_coeffs(m: usize, qk: &QKParams<f64>) -> Result<(f64, f64)> {
    if m == 0 || m > qk.big_n {
        return Err(Error::InvalidParameter(format!(
            "recurrence index {m} outside 1..={}",
            qk.big_n
        )));
    }
    let b = beta(m, qk);
    if b.is_nan() || b < 0.0 {
        return Err(Error::NegativeRadicand {
            value: b,
            context: "normalized recurrence",
        });
    }
    Ok((b.sqrt(), alpha(m - 1, qk)))
}

/// The weight written through the family parameters,
/// `W(a) = q^{C(a,2) - N a} p^{-a} [N choose a]_q`.
pub fn qk_weight<S: Scalar>(a: usize, qk: &QKParams<S>) -> Result<S> {
    if a > qk.big_n {
        return Err(Error::OutsideLattice { a, max: qk.big_n });
    }
    let ai = a as i64;
    let table = QTable::new(qk.big_n, &qk.q);
    Ok(qk.q.powi(choose2(ai) - qk.big_n as i64 * ai) * qk.p.powi(-ai) * table.binomial(qk.big_n, a))
}

/// `W(a+1) / W(a) = q^{a-N} p^{-1} (1 - q^{N-a}) / (1 - q^{a+1})`.
pub fn weight_ratio<S: Scalar>(a: usize, qk: &QKParams<S>) -> S {
    let (a, big_n) = (a as i64, qk.big_n as i64);
    qk.q.powi(a - big_n) / qk.p.clone() * qk.q.one_minus_pow(big_n - a) / qk.q.one_minus_pow(a + 1)
}

/// `ln W(a) - ln W(0)` for every lattice site, accumulated through the
/// ratio recurrence.
pub fn log_weights(qk: &QKParams<f64>) -> Vec<f64> {
    let (lq, lp) = (qk.ln_q(), qk.ln_p());
    let big_n = qk.big_n;
    let mut out = Vec::with_capacity(big_n + 1);
    let mut acc = 0.0;
    out.push(acc);
    for a in 0..big_n {
        let up = ((big_n - a) as f64 * lq).exp_m1().abs().ln();
        let down = ((a + 1) as f64 * lq).exp_m1().abs().ln();
        acc += (a as f64 - big_n as f64) * lq - lp + up - down;
        out.push(acc);
    }
    out
}

/// The q-Krawtchouk polynomial
/// `K_m(q^{-x}) = 3phi2(q^{-m}, q^{-x}, -p q^m; q^{-N}, 0; q, q)` at lattice site `x`.
pub fn qk_polynomial<S: Scalar>(m: usize, x: usize, qk: &QKParams<S>) -> S {
    let q = &qk.q;
    let (mi, xi) = (m as i64, x as i64);
    let upper_m = q.powi(-mi);
    let upper_x = q.powi(-xi);
    let upper_p = -(qk.p.clone() * q.powi(mi));
    let lower = q.powi(-(qk.big_n as i64));
    let mut sum = S::zero();
    for j in 0..=m.min(x) as u64 {
        let num = q_pochhammer(&upper_m, q, j) * q_pochhammer(&upper_x, q, j) * q_pochhammer(&upper_p, q, j);
        let den = q_pochhammer(&lower, q, j) * q_pochhammer(q, q, j);
        sum = sum + num / den * q.powi(j as i64);
    }
    sum
}

/// Residual of the q-difference equation at `(m, a)`:
/// `A(m) K_m(a) - B(a) K_m(a+1) + (B(a) + C(a)) K_m(a) - C(a) K_m(a-1)`.
pub fn verify_difference_eq<S: Scalar>(m: usize, a: usize, qk: &QKParams<S>) -> Result<S> {
    if a == 0 || a >= qk.big_n {
        return Err(Error::OutsideLattice {
            a,
            max: qk.big_n.saturating_sub(1),
        });
    }
    let k = |x| qk_polynomial(m, x, qk);
    let (b, c) = (coeff_b(a, qk), coeff_c(a, qk));
    let here = k(a);
    Ok(coeff_a(m, qk) * here.clone() - b.clone() * k(a + 1) + (b + c.clone()) * here
        - c * k(a - 1))
}

/// [`verify_difference_eq`] divided by the sum of the absolute terms.
pub fn difference_eq_relative(m: usize, a: usize, qk: &QKParams<f64>) -> Result<f64> {
    let res = verify_difference_eq(m, a, qk)?;
    let k = |x| qk_polynomial(m, x, qk);
    let (b, c) = (coeff_b(a, qk), coeff_c(a, qk));
    let scale = (coeff_a(m, qk) * k(a)).abs()
        + (b * k(a + 1)).abs()
        + ((b + c) * k(a)).abs()
        + (c * k(a - 1)).abs();
    Ok(if scale == 0.0 { res.abs() } else { res.abs() / scale })
}

/// The symmetrized difference operator on `{0, ..., N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        tridiag::eigenvalues(&self.diag, &self.offdiag)
    }
}

/// `diag[a] = -(B(a) + C(a))`,
/// `offdiag[a] = sign(B(a)) sqrt(p q^{a-N} (1 - q^{a+1})(1 - q^{N-a}))`.
pub fn build_operator(model: &ModelParams<f64>) -> Result<TridiagonalOperator> {
    operator_from(&QKParams::from_model(model)?)
}

pub fn operator_from(qk: &QKParams<f64>) -> Result<TridiagonalOperator> {
    let (lq, lp) = (qk.ln_q(), qk.ln_p());
    let big_n = qk.big_n;
    let p = lp.exp();
    let b = |a: usize| -((a as f64 - big_n as f64) * lq).exp_m1();
    let c = |a: usize| p * (a as f64 * lq).exp_m1();
    let diag: Vec<f64> = (0..=big_n).map(|a| -(b(a) + c(a))).collect();
    let mut offdiag = Vec::with_capacity(big_n);
    for a in 0..big_n {
        let rad = (lp + (a as f64 - big_n as f64) * lq).exp()
            * (-((a + 1) as f64 * lq).exp_m1())
            * (-((big_n - a) as f64 * lq).exp_m1());
        if rad.is_nan() || rad < 0.0 {
            return Err(Error::NegativeRadicand {
                value: rad,
                context: "operator off-diagonal",
            });
        }
        offdiag.push(rad.sqrt().copysign(b(a)));
    }
    if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
        return Err(Error::Overflow("difference operator"));
    }
    Ok(TridiagonalOperator { diag, offdiag })
}

/// `A(m)` evaluated stably in `f64`.
fn eigenvalue_f64(m: usize, qk: &QKParams<f64>) -> f64 {
    let (lq, lp) = (qk.ln_q(), qk.ln_p());
    let m = m as f64;
    (-m * lq).exp() * (-(m * lq).exp_m1()) * (1.0 + (lp + m * lq).exp())
}

/// Largest normwise gap `|lambda_j - A_(j)| / max |A|` between the sorted
/// operator spectrum and the sorted values `A(0..=N)`.
pub fn eigenvalue_mismatch(model: &ModelParams<f64>) -> Result<f64> {
    let qk = QKParams::from_model(model)?;
    let computed = operator_from(&qk)?.eigenvalues()?;
    let mut analytic: Vec<f64> = (0..=qk.big_n).map(|m| eigenvalue_f64(m, &qk)).collect();
    analytic.sort_by(f64::total_cmp);
    let scale = analytic.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
    Ok(computed
        .iter()
        .zip(&analytic)
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0, f64::max))
}

/// The `n` eigenvectors of the operator spanning the correlation kernel.
#[derive(Clone, Debug)]
pub struct SpectralBasis {
    dim: usize,
    /// `vectors[m]` is the unit eigenvector for `A(m)`.
    vectors: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    mismatch: f64,
}

impl SpectralBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Computed eigenvalues, indexed by degree `m`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Largest normwise eigenvalue mismatch observed while matching.
    pub fn mismatch(&self) -> f64 {
        self.mismatch
    }

    /// A single kernel entry `K(a, b)`.
    pub fn entry(&self, a: usize, b: usize) -> f64 {
        self.vectors.iter().map(|v| v[a] * v[b]).sum()
    }

    /// `K(a, a)` without forming the full matrix.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|a| self.vectors.iter().map(|v| v[a] * v[a]).sum())
            .collect()
    }

    pub fn kernel(&self) -> KernelMatrix {
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        data.par_chunks_mut(d).enumerate().for_each(|(a, row)| {
            for v in &self.vectors {
                let va = v[a];
                for (b, slot) in row.iter_mut().enumerate() {
                    *slot += va * v[b];
                }
            }
        });
        KernelMatrix { dim: d, data }
    }
}

/// Eigen-decomposition of the operator restricted to the `n` lowest degrees.
pub fn spectral_basis(model: &ModelParams<f64>) -> Result<SpectralBasis> {
    spectral_basis_with_budget(model, DEFAULT_EIGEN_BUDGET)
}

pub fn spectral_basis_with_budget(model: &ModelParams<f64>, budget: usize) -> Result<SpectralBasis> {
    let qk = QKParams::from_model(model)?;
    let dim = qk.big_n + 1;
    if dim > budget {
        return Err(Error::TooLarge { dim, budget });
    }
    let op = operator_from(&qk)?;
    let computed = op.eigenvalues()?;

    let analytic: Vec<f64> = (0..dim).map(|m| eigenvalue_f64(m, &qk)).collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| analytic[i].total_cmp(&analytic[j]));
    let scale = analytic.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);

    let mut mismatch = 0.0f64;
    for (pos, &m) in order.iter().enumerate() {
        let mm = (computed[pos] - analytic[m]).abs() / scale;
        if !(mm <= EIGEN_MATCH_TOL) {
            return Err(Error::EigenvalueMismatch {
                index: pos,
                mismatch: mm,
                tolerance: EIGEN_MATCH_TOL,
            });
        }
        mismatch = mismatch.max(mm);
    }

    let rank = model.n;
    let mut vectors = vec![Vec::new(); rank];
    let mut eigenvalues = vec![0.0; rank];
    for (pos, &m) in order.iter().enumerate() {
        if m >= rank {
            continue;
        }
        let gap = [pos.checked_sub(1), Some(pos + 1)]
            .into_iter()
            .flatten()
            .filter(|&j| j < dim)
            .map(|j| (analytic[order[j]] - analytic[m]).abs() / scale)
            .fold(f64::INFINITY, f64::min);
        if gap <= mismatch {
            return Err(Error::AmbiguousPairing { gap, mismatch });
        }
        eigenvalues[m] = computed[pos];
        vectors[m] = tridiag::eigenvector(&op.diag, &op.offdiag, computed[pos]);
    }
    log::debug!("spectral basis dim={dim} rank={rank} mismatch={mismatch:e}");
    Ok(SpectralBasis {
        dim,
        vectors,
        eigenvalues,
        mismatch,
    })
}

/// The correlation kernel `K = sum_{m<n} v_m v_m^T` from the operator's
/// eigenvectors.
pub fn spectral_kernel(model: &ModelParams<f64>) -> Result<KernelMatrix> {
    Ok(spectral_basis(model)?.kernel())
}

/// Kernel from the Christoffel-Darboux sum of orthonormal polynomials
/// evaluated through the three-term recurrence. Small sizes only.
pub fn cd_kernel(model: &ModelParams<f64>) -> Result<KernelMatrix> {
    christoffel_darboux(&QKParams::from_model(model)?, model.n)
}

/// Christoffel-Darboux kernel of any rank `1 ..= N + 1`.
pub fn christoffel_darboux(qk: &QKParams<f64>, rank: usize) -> Result<KernelMatrix> {
    let dim = qk.big_n + 1;
    if rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..={dim}")));
    }
    let basis = orthonormal_functions(qk, rank)?;
    let mut data = vec![0.0; dim * dim];
    for phi in &basis {
        for a in 0..dim {
            for b in 0..dim {
                data[a * dim + b] += phi[a] * phi[b];
            }
        }
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("Christoffel-Darboux sum"));
    }
    Ok(KernelMatrix { dim, data })
}

/// `phi_m(a) = sqrt(W(a)) p_m(q^{-a})` for `m < count`, with `p_m`
/// orthonormal against `W`.
pub fn orthonormal_functions(qk: &QKParams<f64>, count: usize) -> Result<Vec<Vec<f64>>> {
    let dim = qk.big_n + 1;
    let lw = log_weights(qk);
    let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = lw.iter().map(|l| (l - top).exp()).collect();
    let h0: f64 = w.iter().sum();
    let x: Vec<f64> = (0..dim).map(|a| qk.q.powf(-(a as f64))).collect();

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    out.push(w.iter().map(|wa| (wa / h0).sqrt()).collect());
    let mut prev_a = 0.0;
    for m in 1..count {
        let (a_m, b_m) = normalized_recurrence_coeffs(m, qk)?;
        let cur = &out[m - 1];
        let next: Vec<f64> = (0..dim)
            .map(|i| {
                let before = if m >= 2 { out[m - 2][i] } else { 0.0 };
                ((x[i] - b_m) * cur[i] - prev_a * before) / a_m
            })
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow("orthonormal recurrence"));
        }
        out.push(next);
        prev_a = a_m;
    }
    Ok(out)
}

/// Dense symmetric kernel on the lattice, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl KernelMatrix {
    pub fn from_rows(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim.checked_mul(dim) != Some(data.len()) {
            return Err(Error::Malformed(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(KernelMatrix { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for a in 0..dim {
            data[a * dim + a] = 1.0;
        }
        KernelMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.dim + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.dim..(a + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|a| self.get(a, a)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|a| self.get(a, a)).sum()
    }

    /// `max |K^2 - K|`. Cubic in the dimension.
    pub fn projection_residual(&self) -> f64 {
        let d = self.dim;
        (0..d)
            .into_par_iter()
            .map(|a| {
                let ra = self.row(a);
                (0..d)
                    .map(|b| {
                        let rb = self.row(b);
                        let s: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
                        (s - ra[b]).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `max |K(a,b) - K(b,a)|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in a + 1..d {
                worst = worst.max((self.get(a, b) - self.get(b, a)).abs());
            }
        }
        worst
    }

    /// Largest entrywise difference to another kernel of the same size.
    pub fn max_abs_diff(&self, other: &KernelMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "kernel dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Determinant of the restriction to `points`.
    pub fn minor_det(&self, points: &[usize]) -> f64 {
        let m = points.len();
        let mut a: Vec<f64> = points
            .iter()
            .flat_map(|&i| points.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        let mut det = 1.0;
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&r, &s| a[r * m + col].abs().total_cmp(&a[s * m + col].abs()))
                .unwrap_or(col);
            if a[piv * m + col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..m {
                    a.swap(piv * m + j, col * m + j);
                }
                det = -det;
            }
            let p = a[col * m + col];
            det *= p;
            for r in col + 1..m {
                let f = a[r * m + col] / p;
                for j in col..m {
                    a[r * m + j] -= f * a[col * m + j];
                }
            }
        }
        det
    }

    /// Binary layout: `u64` dimension, then `dim^2` `f64` values, row-major,
    /// all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.data.len());
        out.extend_from_slice(&(self.dim as u64).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header: [u8; 8] = bytes
            .get(..8)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| Error::Malformed("kernel file shorter than its header".into()))?;
        let dim = u64::from_le_bytes(header);
        let expected = usize::try_from(dim)
            .ok()
            .and_then(|d| d.checked_mul(d))
            .and_then(|e| e.checked_mul(8))
            .and_then(|e| e.checked_add(8))
            .ok_or_else(|| Error::Malformed(format!("kernel dimension {dim} too large")))?;
        if bytes.len() != expected {
            return Err(Error::Malformed(format!(
                "kernel of dimension {dim} needs {expected} bytes, got {}",
                bytes.len()
            )));
        }
        let data = bytes[8..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight")))
            .collect();
        Ok(KernelMatrix {
            dim: dim as usize,
            data,
        })
    }
}
