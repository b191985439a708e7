//! Large-`n` limits with `q = exp(-gamma/n)` and `k/n -> c`: arc angle,
//! limit density and shape, sine kernel, recurrence-coefficient limits,
//! support and the variance of linear statistics.
//!
//! Positions are rescaled to `t = a/n` in `[0, c+1]`. Linear statistics and
//! the support interval live in the variable `s = exp(gamma t)`, the limit of
//! the lattice variable `q^{-a}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Specialization;

/// Clamping window for arccos arguments that round just past `+-1`.
const CLAMP_WINDOW: f64 = 1e-12;

/// Absolute tolerance of the adaptive quadrature for the limit shape.
const SHAPE_TOL: f64 = 1e-9;

/// Trapezoid nodes for Fourier coefficients on the support.
pub const FOURIER_NODES: usize = 1 << 12;

/// Levels of `n` used for the recurrence-coefficient limit; the window slides
/// to larger `n` until the extrapolants settle.
pub const RICHARDSON_LEVELS: [f64; 4] = [200.0, 400.0, 800.0, 1600.0];

/// Largest `n` tried when the default levels have not converged.
const MAX_RICHARDSON_LEVEL: f64 = 51_200.0;

/// Relative agreement required between the last two Richardson columns.
pub const RICHARDSON_TOL: f64 = 1e-6;

/// Grid used to locate band edges before bisection.
const EDGE_SCAN: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitParams {
    pub gamma: f64,
    pub c: f64,
    pub spec: Specialization,
}

impl LimitParams {
    pub fn new(gamma: f64, c: f64, spec: Specialization) -> Result<Self> {
        if !gamma.is_finite() || gamma == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and nonzero, got {gamma}"
            )));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        Ok(LimitParams { gamma, c, spec })
    }

    /// Right end `c + 1` of the rescaled lattice.
    pub fn length(&self) -> f64 {
        self.c + 1.0
    }

    /// Limit of `p^{1/n}`: `e^{2 gamma}` (PP) or `e^{gamma (2 + c)}` (PIP).
    pub fn ln_p_rate(&self) -> f64 {
        match self.spec {
            Specialization::Pp => 2.0 * self.gamma,
            Specialization::Pip => self.gamma * (2.0 + self.c),
        }
    }

    fn clamp_inward(&self, t: f64) -> f64 {
        let delta = 1e-12 * self.length();
        t.clamp(delta, self.length() - delta)
    }
}

/// The argument of the arccos giving the arc angle at `t`, before clamping.
///
/// PP: `sgn(-g) e^{g - g t/2}/2 (1 - e^{g(c-1)}) / sqrt((1 - e^{g t})(1 - e^{g(c+1-t)}))`;
/// PIP: `sgn(-g) e^{g(t-c)/2}/2 (1 - e^{gc} - e^{g(c-t)} + e^{g(c+1-t)}) / sqrt(...)`.
pub fn arccos_argument(t: f64, lp: &LimitParams) -> Result<f64> {
    let (g, c) = (lp.gamma, lp.c);
    let radicand = (g * t).exp_m1() * (g * (c + 1.0 - t)).exp_m1();
    if !(radicand > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside the open interval (0, {})",
            lp.length()
        )));
    }
    let sign = -g.signum();
    let value = match lp.spec {
        Specialization::Pp => {
            sign * (g - g * t / 2.0).exp() / 2.0 * (-(g * (c - 1.0)).exp_m1()) / radicand.sqrt()
        }
        Specialization::Pip => {
            let numerator = -(g * c).exp_m1() + (g * (c - t)).exp() * g.exp_m1();
            sign * (g * (t - c) / 2.0).exp() / 2.0 * numerator / radicand.sqrt()
        }
    };
    Ok(value)
}

/// Arc angle `phi` in `[0, pi]` at an interior point of the band.
pub fn arc_angle(t: f64, lp: &LimitParams) -> Result<f64> {
    let x = arccos_argument(t, lp)?;
    if x.abs() > 1.0 + CLAMP_WINDOW {
        return Err(Error::InvalidParameter(format!(
            "t = {t} lies in a frozen region (argument {x})"
        )));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Limit density `rho(t) = phi/pi`, continued by `0` where the argument
/// exceeds `1` and by `1` where it falls below `-1`.
pub fn limit_density(t: f64, lp: &LimitParams) -> f64 {
    let t = lp.clamp_inward(t);
    match arccos_argument(t, lp) {
        Ok(x) if x.is_nan() => 0.5,
        Ok(x) => x.clamp(-1.0, 1.0).acos() / PI,
        Err(_) => 0.5,
    }
}

/// `sin(phi (u - v)) / (pi (u - v))`, equal to `phi/pi` on the diagonal.
pub fn sine_kernel(u: f64, v: f64, phi: f64) -> f64 {
    let d = u - v;
    if d == 0.0 {
        phi / PI
    } else {
        (phi * d).sin() / (PI * d)
    }
}

/// Endpoints of the limiting spectrum of the symmetrized operator at `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralInterval {
    /// Image of the degrees kept by the kernel, `m < n`.
    pub projection: (f64, f64),
    /// Image of all degrees `m <= N`.
    pub full: (f64, f64),
}

/// Limit at `a = n x` of `sqrt(W(a+1)/W(a)) (A(m) + B(a) + C(a)) / B(a)`
/// with `m = n mu`, for `mu` in `{0, 1}` (projection band) and
/// `{0, c + 1}` (full band).
pub fn spectral_interval(x: f64, lp: &LimitParams) -> Result<SpectralInterval> {
    if !(x > 0.0 && x < lp.length()) {
        return Err(Error::InvalidParameter(format!(
            "x = {x} outside (0, {})",
            lp.length()
        )));
    }
    let endpoint = |mu: f64| spectral_endpoint(x, mu, lp);
    let order = |u: f64, v: f64| if u <= v { (u, v) } else { (v, u) };
    Ok(SpectralInterval {
        projection: order(endpoint(0.0)?, endpoint(1.0)?),
        full: order(endpoint(0.0)?, endpoint(lp.length())?),
    })
}

/// Limit of the operator's diagonal scaling at rescaled site `x` and degree
/// `m = n mu`.
pub fn spectral_endpoint(x: f64, mu: f64, lp: &LimitParams) -> Result<f64> {
    let g = lp.gamma;
    let lp_rate = lp.ln_p_rate();
    let rest = lp.length() - x;
    let ratio = (-g * rest).exp_m1() / (-g * x).exp_m1();
    if !(ratio > 0.0) {
        return Err(Error::NegativeRadicand {
            value: ratio,
            context: "spectral interval",
        });
    }
    let scale = (g * rest / 2.0 - lp_rate / 2.0).exp() * ratio.sqrt();
    let b = -(g * rest).exp_m1();
    let c = lp_rate.exp() * (-g * x).exp_m1();
    let a = (g * mu).exp_m1() * (1.0 + (lp_rate - g * mu).exp());
    Ok(scale * (a + b + c) / b)
}

/// `phi = arccos(endpoint / 2)` from the projection band's moving end.
pub fn arc_angle_from_operator(x: f64, lp: &LimitParams) -> Result<f64> {
    let half = spectral_endpoint(x, 1.0, lp)? / 2.0;
    if half.abs() > 1.0 + CLAMP_WINDOW {
        return Err(Error::InvalidParameter(format!("x = {x} lies in a frozen region")));
    }
    Ok(half.clamp(-1.0, 1.0).acos())
}

/// Break points of the density on `[0, c+1]`: the ends of the interval
/// and every point where `|argument| = 1`, located by scan and bisection.
pub fn band_edges(lp: &LimitParams) -> Result<Vec<f64>> {
    let len = lp.length();
    let excess = |t: f64| -> f64 {
        match arccos_argument(lp.clamp_inward(t), lp) {
            Ok(x) if x.is_finite() => x.abs() - 1.0,
            _ => 0.0,
        }
    };
    let mut edges = vec![0.0];
    let mut prev_t = lp.clamp_inward(0.0);
    let mut prev = excess(prev_t);
    for i in 1..=EDGE_SCAN {
        let t = lp.clamp_inward(len * i as f64 / EDGE_SCAN as f64);
        let cur = excess(t);
        if (prev < 0.0) != (cur < 0.0) {
            edges.push(bisect(&excess, prev_t, t)?);
        }
        prev_t = t;
        prev = cur;
    }
    edges.push(len);
    Ok(edges)
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let flo = f(lo);
    if (flo < 0.0) == (f(hi) < 0.0) {
        return Err(Error::Bracket(format!("no sign change on [{lo}, {hi}]")));
    }
    let lo_negative = flo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The liquid region: first and last points where the density leaves
/// its frozen values.
pub fn density_band(lp: &LimitParams) -> Result<(f64, f64)> {
    let edges = band_edges(lp)?;
    let liquid: Vec<(f64, f64)> = edges
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(a, b)| {
            let rho = limit_density(0.5 * (a + b), lp);
            rho > 0.0 && rho < 1.0
        })
        .collect();
    match (liquid.first(), liquid.last()) {
        (Some(first), Some(last)) => Ok((first.0, last.1)),
        _ => Err(Error::Bracket("density has no liquid region".into())),
    }
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Piecewise integrator for the limit density with precomputed break points.
#[derive(Clone, Debug)]
pub struct LimitShape {
    lp: LimitParams,
    edges: Vec<f64>,
    /// Integral of the density up to each break point.
    cumulative: Vec<f64>,
}

impl LimitShape {
    pub fn new(lp: LimitParams) -> Result<Self> {
        let edges = band_edges(&lp)?;
        let mut cumulative = vec![0.0];
        for w in edges.windows(2) {
            let last = *cumulative.last().expect("nonempty");
            cumulative.push(last + Self::piece(&lp, w[0], w[1]));
        }
        Ok(LimitShape {
            lp,
            edges,
            cumulative,
        })
    }

    fn piece(lp: &LimitParams, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mid = limit_density(0.5 * (a + b), lp);
        let frozen = (mid == 0.0 || mid == 1.0)
            && limit_density(a + 0.25 * (b - a), lp) == mid
            && limit_density(a + 0.75 * (b - a), lp) == mid;
        if frozen {
            mid * (b - a)
        } else {
            adaptive_simpson(&|t| limit_density(t, lp), a, b, SHAPE_TOL)
        }
    }

    pub fn params(&self) -> &LimitParams {
        &self.lp
    }

    /// Break points including `0` and `c + 1`.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// `int_0^x rho(t) dt`.
    pub fn mass_below(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.lp.length());
        let i = self.edges.partition_point(|&e| e <= x).saturating_sub(1);
        let i = i.min(self.edges.len() - 2);
        self.cumulative[i] + Self::piece(&self.lp, self.edges[i], x)
    }

    /// `f(x) = 1 + int_0^x (1 - 2 rho(t)) dt`.
    pub fn value(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.lp.length());
        1.0 + x - 2.0 * self.mass_below(x)
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().expect("nonempty")
    }
}

/// Limit shape of the rescaled rotated diagram boundary at `x`.
pub fn limit_shape(x: f64, lp: &LimitParams) -> Result<f64> {
    Ok(LimitShape::new(*lp)?.value(x))
}

/// `(a_n, b_{n+1})` of the orthonormal recurrence at degree `n`, with
/// `q = e^{-gamma/n}`, `k = c n` and real-valued exponents.
pub fn recurrence_at(n: f64, lp: &LimitParams) -> Result<(f64, f64)> {
    let lq = -lp.gamma / n;
    let k = lp.c * n;
    let big_n = n + k - 1.0;
    let lp_ = match lp.spec {
        Specialization::Pp => lq * (1.0 - 2.0 * n),
        Specialization::Pip => lq * (2.0 - 2.0 * n - k),
    };
    let onep = |e: f64| 1.0 + (lp_ + e * lq).exp();
    let big_a = |m: f64| -((m - big_n) * lq).exp_m1() * onep(m) / (onep(2.0 * m) * onep(2.0 * m + 1.0));
    let big_c = |m: f64| {
        (lp_ + (2.0 * m - big_n - 1.0) * lq).exp() * onep(m + big_n) * (m * lq).exp_m1()
            / (onep(2.0 * m - 1.0) * onep(2.0 * m))
    };
    let beta = big_a(n - 1.0) * big_c(n);
    if !(beta >= 0.0) {
        return Err(Error::NegativeRadicand {
            value: beta,
            context: "recurrence limit",
        });
    }
    Ok((beta.sqrt(), 1.0 - big_a(n) - big_c(n)))
}

/// Limits of the recurrence coefficients, with the closed forms alongside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceLimits {
    /// Richardson-extrapolated numerical limit.
    pub a: f64,
    pub b: f64,
    /// Closed forms obtained by taking the limit symbolically.
    pub closed_a: f64,
    pub closed_b: f64,
    /// The printed closed forms, radicand taken in absolute value.
    pub printed_a: f64,
    pub printed_b: f64,
}

fn richardson(values: &[f64]) -> (f64, f64) {
    // errors expand in powers of 1/n and the levels double
    let mut table = vec![values.to_vec()];
    for j in 1..values.len() {
        let prev = &table[j - 1];
        let factor = (1u64 << j) as f64;
        let next: Vec<f64> = prev
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        table.push(next);
    }
    let last = table[values.len() - 1][0];
    let prev = *table[values.len() - 2].last().expect("nonempty");
    (last, prev)
}

/// `(a, b)` as `n -> infinity`, authoritative values from the recurrence.
pub fn recurrence_limits(lp: &LimitParams) -> Result<RecurrenceLimits> {
    let mut levels = RICHARDSON_LEVELS.to_vec();
    let mut values = levels
        .iter()
        .map(|&n| recurrence_at(n, lp))
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = loop {
        let window = &values[values.len() - RICHARDSON_LEVELS.len()..];
        let a_seq: Vec<f64> = window.iter().map(|v| v.0).collect();
        let b_seq: Vec<f64> = window.iter().map(|v| v.1).collect();
        let (a, a_prev) = richardson(&a_seq);
        let (b, b_prev) = richardson(&b_seq);
        let off = |v: f64, p: f64| !v.is_finite() || (v - p).abs() > RICHARDSON_TOL * v.abs().max(1.0);
        if !off(a, a_prev) && !off(b, b_prev) {
            break (a, b);
        }
        let next = 2.0 * levels[levels.len() - 1];
        if next > MAX_RICHARDSON_LEVEL {
            return Err(Error::NoConvergence(format!(
                "extrapolants a: {a} vs {a_prev}, b: {b} vs {b_prev}"
            )));
        }
        levels.push(next);
        values.push(recurrence_at(next, lp)?);
    };
    let (closed_a, closed_b) = closed_form_limits(lp);
    let (printed_a, printed_b) = printed_limits(lp);
    Ok(RecurrenceLimits {
        a,
        b,
        closed_a,
        closed_b,
        printed_a,
        printed_b,
    })
}

/// Symbolic limits: PP `a = sqrt((e^{2g}-1)(e^{2gc}-1))/4`, `b = (1+e^{g(c+1)})/2`;
/// PIP with `E = e^{gc}`:
/// `a = E/(1+E)^2 sqrt(2(e^g-1)(E-1)(1+e^g E))`,
/// `b = (3E - E^2 - e^g E + 3 e^g E^2)/(1+E)^2`.
pub fn closed_form_limits(lp: &LimitParams) -> (f64, f64) {
    let (g, c) = (lp.gamma, lp.c);
    match lp.spec {
        Specialization::Pp => (
            0.25 * ((2.0 * g).exp_m1() * (2.0 * g * c).exp_m1()).sqrt(),
            (1.0 + (g * (c + 1.0)).exp()) / 2.0,
        ),
        Specialization::Pip => {
            let e = (g * c).exp();
            let eg = g.exp();
            let d = (1.0 + e) * (1.0 + e);
            (
                e / d * (2.0 * g.exp_m1() * (g * c).exp_m1() * (1.0 + eg * e)).sqrt(),
                (3.0 * e - e * e - eg * e + 3.0 * eg * e * e) / d,
            )
        }
    }
}

/// The limits as printed, with the radicand replaced by its absolute value.
pub fn printed_limits(lp: &LimitParams) -> (f64, f64) {
    let (g, c) = (lp.gamma, lp.c);
    let e = (g * c).exp();
    let eg = g.exp();
    match lp.spec {
        Specialization::Pp => (
            0.25 * ((eg - 1.0) * (eg + 1.0) * (1.0 - e) * (1.0 + e)).abs().sqrt(),
            (1.0 + (g * (c + 1.0)).exp()) / 2.0,
        ),
        Specialization::Pip => {
            let d = (1.0 + e) * (1.0 + e);
            let rad = 2.0 * (eg - 1.0) * (e - 1.0) * (1.0 - e) * (1.0 + (g * (c + 1.0)).exp());
            (
                e / d * rad.abs().sqrt(),
                (3.0 * (g * (c + 2.0)).exp() - (g * (c + 1.0)).exp() + 3.0 * e - e * e) / d,
            )
        }
    }
}

/// Support of the density in the variable `s = e^{gamma t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    /// `b - 2a` and `b + 2a` from the recurrence limits.
    pub lo: f64,
    pub hi: f64,
    pub a: f64,
    pub b: f64,
    /// The liquid band `[t_lo, t_hi]` found by root-finding, and its image.
    pub t_lo: f64,
    pub t_hi: f64,
    pub edge_lo: f64,
    pub edge_hi: f64,
}

impl SupportInterval {
    /// Largest endpoint disagreement between the two constructions.
    pub fn discrepancy(&self) -> f64 {
        (self.lo - self.edge_lo).abs().max((self.hi - self.edge_hi).abs())
    }
}

/// Support `[b - 2a, b + 2a]`, checked against the band edges to `tol`.
pub fn support(lp: &LimitParams) -> Result<SupportInterval> {
    support_checked(lp, 1e-6)
}

pub fn support_checked(lp: &LimitParams, tol: f64) -> Result<SupportInterval> {
    let lim = recurrence_limits(lp)?;
    let (t_lo, t_hi) = density_band(lp)?;
    let (s0, s1) = ((lp.gamma * t_lo).exp(), (lp.gamma * t_hi).exp());
    let out = SupportInterval {
        lo: lim.b - 2.0 * lim.a,
        hi: lim.b + 2.0 * lim.a,
        a: lim.a,
        b: lim.b,
        t_lo,
        t_hi,
        edge_lo: s0.min(s1),
        edge_hi: s0.max(s1),
    };
    let scale = out.hi.abs().max(1.0);
    if out.discrepancy() > tol * scale {
        return Err(Error::Bracket(format!(
            "support [{}, {}] disagrees with band image [{}, {}]",
            out.lo, out.hi, out.edge_lo, out.edge_hi
        )));
    }
    Ok(out)
}

/// `f_l = (1/2pi) int_0^{2pi} f(2a cos(theta) + b) e^{-i l theta} dtheta`
/// for `l = 1..=l_max`; real because the integrand is even in `theta`.
pub fn fourier_coeffs(f: impl Fn(f64) -> f64, a: f64, b: f64, l_max: usize) -> Vec<f64> {
    let m = FOURIER_NODES;
    let samples: Vec<f64> = (0..m)
        .map(|j| f(2.0 * a * (2.0 * PI * j as f64 / m as f64).cos() + b))
        .collect();
    (1..=l_max)
        .map(|l| {
            samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * (2.0 * PI * (l * j) as f64 / m as f64).cos())
                .sum::<f64>()
                / m as f64
        })
        .collect()
}

/// `sum_{l>=1} l f_l^2` on the support `[b - 2a, b + 2a]`.
pub fn clt_variance_on(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const BLOCK: usize = 16;
    let coeffs = fourier_coeffs(f, a, b, FOURIER_NODES / 2);
    let mut total = 0.0;
    for (start, chunk) in coeffs.chunks(BLOCK).enumerate() {
        let block: f64 = chunk
            .iter()
            .enumerate()
            .map(|(i, c)| (start * BLOCK + i + 1) as f64 * c * c)
            .sum();
        total += block;
        if block < 1e-10 * total.max(1e-300) || block == 0.0 {
            break;
        }
    }
    total
}

/// Limiting variance of `sum_i f(e^{gamma x_i})`.
pub fn clt_variance(f: impl Fn(f64) -> f64, lp: &LimitParams) -> Result<f64> {
    let lim = recurrence_limits(lp)?;
    Ok(clt_variance_on(f, lim.a, lim.b))
}
