//! The two probability measures on diagrams in the `n x k` box.
//!
//! A diagram `lambda` gets the ratio of characters
//! `s_lambda(x) s_{lambda-bar'}(y) / prod_{i,j} (x_i + y_j)` under one of two
//! principal specializations:
//!
//! * [`Specialization::Pp`]: `x_i = q^{i-1}`, `y_j = q^{j-1}`;
//! * [`Specialization::Pip`]: `x_i = q^{i-1}`, `y_j = q^{1-j}`.
//!
//! The dual Cauchy identity makes the denominator the exact normalization.
//! The same measure is also a determinantal ensemble
//! `Z^{-1} prod_{i<j} (q^{-a_i} - q^{-a_j})^2 prod_i W(a_i)` over the
//! coordinates `a_i = lambda_i + n - i`; [`DeterminantalForm`] evaluates that
//! route with `Z` obtained by exact summation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{
    box_count, content_stat, dual_content_stat, enumerate_in_box, to_coords,
    Partition,
};
use crate::qmath::{choose2, LogReal, QTable, Rational, Scalar};

/// Largest box for which the determinantal normalization is summed exactly.
pub const EXACT_SUM_CAP: u128 = 2_000_000;

/// Default cap on the number of tableaux visited by [`schur_ssyt_oracle`].
pub const SSYT_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Specialization {
    /// Principal specialization on both sides.
    Pp,
    /// Principal on the `GL_n` side, inverse principal on the `GL_k` side.
    Pip,
}

impl fmt::Display for Specialization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Specialization::Pp => "pp",
            Specialization::Pip => "pip",
        })
    }
}

impl FromStr for Specialization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pp" => Ok(Specialization::Pp),
            "pip" => Ok(Specialization::Pip),
            other => Err(Error::InvalidParameter(format!(
                "unknown specialization {other:?}"
            ))),
        }
    }
}

/// A finite ensemble instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<S> {
    pub n: usize,
    pub k: usize,
    pub q: S,
    pub spec: Specialization,
}

impl<S: Scalar> ModelParams<S> {
    pub fn new(n: usize, k: usize, q: S, spec: Specialization) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidParameter(format!(
                "box sides must be positive, got n={n} k={k}"
            )));
        }
        if !q.is_positive() {
            return Err(Error::InvalidParameter(format!("q must be positive, got {q:?}")));
        }
        Ok(ModelParams { n, k, q, spec })
    }

    /// Largest lattice coordinate `N = n + k - 1`.
    pub fn lattice_max(&self) -> usize {
        self.n + self.k - 1
    }

    pub fn map_q<T: Scalar>(&self, f: impl FnOnce(&S) -> T) -> ModelParams<T> {
        ModelParams {
            n: self.n,
            k: self.k,
            q: f(&self.q),
            spec: self.spec,
        }
    }

    pub fn to_f64(&self) -> ModelParams<f64> {
        self.map_q(|q| q.to_f64())
    }
}

impl ModelParams<f64> {
    /// The same model with `q` replaced by the rational equal to its `f64` value.
    pub fn to_exact(&self) -> Result<ModelParams<Rational>> {
        let q = Rational::from_float(self.q)
            .ok_or_else(|| Error::InvalidParameter(format!("q = {} is not finite", self.q)))?;
        ModelParams::new(self.n, self.k, q, self.spec)
    }

    /// Asymptotic parametrization `q = exp(-gamma / n)`.
    pub fn from_gamma(n: usize, k: usize, gamma: f64, spec: Specialization) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        ModelParams::new(n, k, (-gamma / n as f64).exp(), spec)
    }
}

/// `s_lambda(1, q, ..., q^{n-1}) = q^{||lambda||} prod_{i<j} [a_i - a_j]_q / [j - i]_q`.
pub fn schur_principal<S: Scalar>(lambda: &Partition, n: usize, q: &S) -> Result<S> {
    let coords = to_coords(lambda, n)?;
    let max = coords.coords().first().copied().unwrap_or(0) as usize + n;
    let table = QTable::new(max, q);
    Ok(schur_from_coords(&table, coords.coords(), q, content_stat(lambda)))
}

fn schur_from_coords<S: Scalar>(table: &QTable<S>, coords: &[u32], q: &S, stat: u64) -> S {
    let n = coords.len();
    let mut num = q.powi(stat as i64);
    let mut den = S::one();
    for i in 0..n {
        for j in i + 1..n {
            num = num * table.number((coords[i] - coords[j]) as usize).clone();
            den = den * table.number(j - i).clone();
        }
    }
    num / den
}

/// `s_{lambda-bar'}(1, q, ..., q^{k-1})` written through the coordinates of
/// `lambda`:
/// `q^{||lambda-bar'||} prod_{i<j} [a_i - a_j]_q prod_l [n+k-l]_q! / ([a_l]_q! [n+k-1-a_l]_q!)`.
pub fn dual_schur_principal<S: Scalar>(lambda: &Partition, n: usize, k: usize, q: &S) -> Result<S> {
    let stat = dual_content_stat(lambda, n, k)?;
    let coords = to_coords(lambda, n)?;
    let table = QTable::new(n + k, q);
    Ok(dual_schur_from_coords(&table, coords.coords(), n, k, q, stat))
}

fn dual_schur_from_coords<S: Scalar>(
    table: &QTable<S>,
    coords: &[u32],
    n: usize,
    k: usize,
    q: &S,
    stat: u64,
) -> S {
    let big_n = n + k - 1;
    let mut num = q.powi(stat as i64);
    let mut den = S::one();
    for i in 0..n {
        for j in i + 1..n {
            num = num * table.number((coords[i] - coords[j]) as usize).clone();
        }
    }
    for (l, &a) in coords.iter().enumerate() {
        let a = a as usize;
        num = num * table.factorial(n + k - (l + 1)).clone();
        den = den * table.factorial(a).clone() * table.factorial(big_n - a).clone();
    }
    num / den
}

/// Brute-force Schur polynomial: the sum over semistandard tableaux of shape
/// `lambda` with entries `1..=xs.len()` of `prod_i x_i^{#i}`.
pub fn schur_ssyt_oracle<S: Scalar>(lambda: &Partition, xs: &[S]) -> Result<S> {
    schur_ssyt_oracle_capped(lambda, xs, SSYT_CAP)
}

pub fn schur_ssyt_oracle_capped<S: Scalar>(lambda: &Partition, xs: &[S], cap: u64) -> Result<S> {
    let shape = lambda.parts().to_vec();
    if shape.len() > xs.len() {
        return Ok(S::zero());
    }
    let cells: Vec<(usize, usize)> = shape
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c)))
        .collect();
    let width = shape.first().copied().unwrap_or(0) as usize;
    let mut grid = vec![0usize; shape.len() * width.max(1)];
    let mut visited = 0u64;
    let mut total = S::zero();

    #[allow(clippy::too_many_arguments)]
    fn fill<S: Scalar>(
        idx: usize,
        cells: &[(usize, usize)],
        grid: &mut [usize],
        width: usize,
        xs: &[S],
        weight: S,
        total: &mut S,
        visited: &mut u64,
        cap: u64,
    ) -> Result<()> {
        if idx == cells.len() {
            *visited += 1;
            if *visited > cap {
                return Err(Error::CapExceeded {
                    count: *visited as u128,
                    cap: cap as u128,
                });
            }
            *total = total.clone() + weight;
            return Ok(());
        }
        let (r, c) = cells[idx];
        let left = if c > 0 { grid[r * width + c - 1] } else { 1 };
        let above = if r > 0 { grid[(r - 1) * width + c] + 1 } else { 1 };
        for v in left.max(above)..=xs.len() {
            grid[r * width + c] = v;
            let w = weight.clone() * xs[v - 1].clone();
            fill(idx + 1, cells, grid, width, xs, w, total, visited, cap)?;
        }
        Ok(())
    }

    fill(
        0,
        &cells,
        &mut grid,
        width,
        xs,
        S::one(),
        &mut total,
        &mut visited,
        cap,
    )?;
    Ok(total)
}

/// Precomputed tables for repeated evaluation of one measure.
#[derive(Clone, Debug)]
pub struct Measure<S> {
    params: ModelParams<S>,
    table: QTable<S>,
    dual_q: S,
    dual_table: QTable<S>,
    denominator: S,
}

impl<S: Scalar> Measure<S> {
    pub fn new(params: ModelParams<S>) -> Result<Self> {
        let params = ModelParams::new(params.n, params.k, params.q, params.spec)?;
        let (n, k) = (params.n, params.k);
        let q = params.q.clone();
        let table = QTable::new(n + k, &q);
        let dual_q = match params.spec {
            Specialization::Pp => q.clone(),
            Specialization::Pip => q.recip(),
        };
        let dual_table = QTable::new(n + k, &dual_q);
        let mut denominator = S::one();
        for i in 0..n as i64 {
            for j in 0..k as i64 {
                let y = match params.spec {
                    Specialization::Pp => q.powi(j),
                    Specialization::Pip => q.powi(-j),
                };
                denominator = denominator * (q.powi(i) + y);
            }
        }
        Ok(Measure {
            params,
            table,
            dual_q,
            dual_table,
            denominator,
        })
    }

    pub fn params(&self) -> &ModelParams<S> {
        &self.params
    }

    /// `prod_{i,j} (x_i + y_j)`.
    pub fn denominator(&self) -> &S {
        &self.denominator
    }

    /// Character-ratio probability of `lambda`.
    pub fn prob(&self, lambda: &Partition) -> Result<S> {
        let (n, k) = (self.params.n, self.params.k);
        if !lambda.fits_box(n, k) {
            return Err(Error::OutsideBox {
                rows: lambda.rows().to_vec(),
                n,
                k,
            });
        }
        let coords = to_coords(lambda, n)?;
        let gl_n = schur_from_coords(&self.table, coords.coords(), &self.params.q, content_stat(lambda));
        let gl_k = dual_schur_from_coords(
            &self.dual_table,
            coords.coords(),
            n,
            k,
            &self.dual_q,
            dual_content_stat(lambda, n, k)?,
        );
        Ok(gl_n * gl_k / self.denominator.clone())
    }

    /// `W(a) = q^{C(a,2) + a s} [N choose a]_q` with `s = n - k` (PP) or
    /// `s = n - 1` (PIP).
    pub fn weight(&self, a: usize) -> Result<S> {
        let big_n = self.params.lattice_max();
        if a > big_n {
            return Err(Error::OutsideLattice { a, max: big_n });
        }
        let shift = match self.params.spec {
            Specialization::Pp => self.params.n as i64 - self.params.k as i64,
            Specialization::Pip => self.params.n as i64 - 1,
        };
        let a_i = a as i64;
        Ok(self.params.q.powi(choose2(a_i) + a_i * shift) * self.table.binomial(big_n, a))
    }

    /// Unnormalized determinantal weight
    /// `prod_{i<j} (q^{-a_i} - q^{-a_j})^2 prod_i W(a_i)`.
    pub fn vandermonde_weight(&self, coords: &[u32]) -> Result<S> {
        self.vandermonde_weight_with(coords, |a| self.weight(a))
    }

    /// As [`Measure::vandermonde_weight`] with a caller-supplied weight.
    pub fn vandermonde_weight_with(
        &self,
        coords: &[u32],
        mut weight: impl FnMut(usize) -> Result<S>,
    ) -> Result<S> {
        let q = &self.params.q;
        let lattice: Vec<S> = coords.iter().map(|&a| q.powi(-(a as i64))).collect();
        let mut acc = S::one();
        for i in 0..lattice.len() {
            for j in i + 1..lattice.len() {
                let d = lattice[i].clone() - lattice[j].clone();
                acc = acc * d.clone() * d;
            }
        }
        for &a in coords {
            acc = acc * weight(a as usize)?;
        }
        Ok(acc)
    }

    /// Determinantal form with `Z` summed over the box, or the corrected
    /// closed-form constant when the box is larger than [`EXACT_SUM_CAP`].
    pub fn determinantal(&self) -> Result<DeterminantalForm<S>> {
        let (n, k) = (self.params.n, self.params.k);
        if self.params.q.is_one() {
            return Err(Error::InvalidParameter(
                "determinantal form degenerates at q = 1".into(),
            ));
        }
        let fits = box_count(n, k).is_some_and(|c| c <= EXACT_SUM_CAP);
        let (inv_z, summed) = if fits {
            let mut z = S::zero();
            for lambda in enumerate_in_box(n, k)? {
                z = z + self.vandermonde_weight(to_coords(&lambda, n)?.coords())?;
            }
            (z.recip(), true)
        } else {
            log::warn!(
                "box {n}x{k} too large for exact summation; using the closed-form normalization"
            );
            (norm_const(&self.params)? * norm_const_discrepancy(&self.params), false)
        };
        Ok(DeterminantalForm {
            measure: self.clone(),
            inv_z,
            summed,
        })
    }
}

/// The measure written as an orthogonal polynomial ensemble.
#[derive(Clone, Debug)]
pub struct DeterminantalForm<S> {
    measure: Measure<S>,
    inv_z: S,
    summed: bool,
}

impl<S: Scalar> DeterminantalForm<S> {
    pub fn prob(&self, lambda: &Partition) -> Result<S> {
        let coords = to_coords(lambda, self.measure.params.n)?;
        if !lambda.fits_box(self.measure.params.n, self.measure.params.k) {
            return Err(Error::OutsideBox {
                rows: lambda.rows().to_vec(),
                n: self.measure.params.n,
                k: self.measure.params.k,
            });
        }
        Ok(self.measure.vandermonde_weight(coords.coords())? * self.inv_z.clone())
    }

    /// `1/Z`.
    pub fn constant(&self) -> &S {
        &self.inv_z
    }

    /// Whether `Z` came from exact summation rather than the closed form.
    pub fn is_summed(&self) -> bool {
        self.summed
    }
}

/// Character-ratio probability of `lambda`.
pub fn prob<S: Scalar>(lambda: &Partition, params: &ModelParams<S>) -> Result<S> {
    Measure::new(params.clone())?.prob(lambda)
}

/// Natural log of the probability, evaluated entirely in log space.
pub fn log_prob(lambda: &Partition, params: &ModelParams<f64>) -> Result<f64> {
    let lp = params.map_q(|&q| LogReal::from_f64(q));
    Ok(Measure::new(lp)?.prob(lambda)?.ln_abs())
}

/// The single-site weight `W(a)`.
pub fn weight<S: Scalar>(a: usize, params: &ModelParams<S>) -> Result<S> {
    Measure::new(params.clone())?.weight(a)
}

/// Determinantal-form probability with exact normalization.
pub fn prob_determinantal<S: Scalar>(lambda: &Partition, params: &ModelParams<S>) -> Result<S> {
    Measure::new(params.clone())?.determinantal()?.prob(lambda)
}

/// Closed-form candidate for the determinantal normalization constant.
///
/// PP:  `q^{kn(n+k-2)/2} / prod(q^{i-1}+q^{j-1}) * prod_i [k+i-1]! / ([i-1]! [n+k-1]!) / (1-q)^{n(n-1)/2}`;
/// PIP: `q^{n(n-1)(n+2k-2)/2} / prod(q^{i-1}+q^{1-j}) * (same product)`.
///
/// The exact constant obtained by summation differs from this one; see
/// [`norm_const_discrepancy`].
pub fn norm_const<S: Scalar>(params: &ModelParams<S>) -> Result<S> {
    let (n, k) = (params.n as i64, params.k as i64);
    let q = &params.q;
    if q.is_one() {
        return Err(Error::InvalidParameter("closed-form constant is singular at q = 1".into()));
    }
    let measure = Measure::new(params.clone())?;
    let table = QTable::new((n + k) as usize, q);
    let exponent = match params.spec {
        Specialization::Pp => k * n * (n + k - 2) / 2,
        Specialization::Pip => n * (n - 1) * (n + 2 * k - 2) / 2,
    };
    let mut acc = q.powi(exponent) / measure.denominator().clone();
    for i in 1..=n as usize {
        acc = acc * table.factorial(k as usize + i - 1).clone()
            / (table.factorial(i - 1).clone() * table.factorial((n + k - 1) as usize).clone());
    }
    let one_minus_q = S::one() - q.clone();
    acc = acc / one_minus_q.powi(n * (n - 1) / 2);
    Ok(acc)
}

/// The factor `r` with `1/Z = r * norm_const` for the exact summed `Z`.
///
/// The closed form undercounts the `(1-q)` factors coming out of the squared
/// Vandermonde, and for PIP also drops a power of `q`:
/// `r = (1-q)^{-n(n-1)/2}` for PP and
/// `r = (1-q)^{-n(n-1)/2} q^{-n(k^2 + (2n-3)k + (n-1)(n-3))/2}` for PIP.
pub fn norm_const_discrepancy<S: Scalar>(params: &ModelParams<S>) -> S {
    let (n, k) = (params.n as i64, params.k as i64);
    let q = &params.q;
    let base = (S::one() - q.clone()).powi(-n * (n - 1) / 2);
    match params.spec {
        Specialization::Pp => base,
        Specialization::Pip => {
            base * q.powi(-n * (k * k + (2 * n - 3) * k + (n - 1) * (n - 3)) / 2)
        }
    }
}

/// Exact ratio `(1/Z) / norm_const` for a box small enough to sum.
pub fn norm_const_ratio(params: &ModelParams<Rational>) -> Result<Rational> {
    let det = Measure::new(params.clone())?.determinantal()?;
    Ok(det.constant().clone() / norm_const(params)?)
}

/// Integer dimension of the `GL_n` module with highest weight `lambda`
/// (the `q = 1` value of [`schur_principal`]).
pub fn dimension(lambda: &Partition, n: usize) -> Result<Rational> {
    schur_principal(lambda, n, &Rational::from_integer(1.into()))
}
