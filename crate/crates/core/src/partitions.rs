//! Young diagrams inside the `n x k` box and their point configurations.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of diagrams an enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// A Young diagram given by weakly decreasing row lengths.
///
/// Trailing zero rows are kept as supplied (diagrams produced by
/// [`enumerate_in_box`] carry exactly `n` rows), but equality, ordering and
/// hashing ignore them, so `(2, 1)` and `(2, 1, 0)` are the same diagram.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    rows: Vec<u32>,
}

impl Partition {
    pub fn new(rows: Vec<u32>) -> Result<Self> {
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotWeaklyDecreasing(rows));
        }
        Ok(Partition { rows })
    }

    pub fn empty() -> Self {
        Partition { rows: Vec::new() }
    }

    /// The `n x k` rectangle.
    pub fn full(n: usize, k: usize) -> Self {
        Partition {
            rows: vec![k as u32; n],
        }
    }

    /// Row lengths as stored.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Row lengths without trailing zeros.
    pub fn parts(&self) -> &[u32] {
        let len = self.rows.iter().rposition(|&r| r > 0).map_or(0, |i| i + 1);
        &self.rows[..len]
    }

    /// Number of nonzero rows.
    pub fn length(&self) -> usize {
        self.parts().len()
    }

    /// Number of cells.
    pub fn size(&self) -> u64 {
        self.rows.iter().map(|&r| r as u64).sum()
    }

    pub fn fits_box(&self, n: usize, k: usize) -> bool {
        self.length() <= n && self.parts().first().is_none_or(|&r| r as usize <= k)
    }

    /// Row lengths padded (or trimmed of zeros) to exactly `n` entries.
    pub fn padded(&self, n: usize) -> Result<Vec<u32>> {
        let parts = self.parts();
        if parts.len() > n {
            return Err(Error::OutsideBox {
                rows: self.rows.clone(),
                n,
                k: parts[0] as usize,
            });
        }
        let mut rows = parts.to_vec();
        rows.resize(n, 0);
        Ok(rows)
    }

    fn check_box(&self, n: usize, k: usize) -> Result<Vec<u32>> {
        if !self.fits_box(n, k) {
            return Err(Error::OutsideBox {
                rows: self.rows.clone(),
                n,
                k,
            });
        }
        self.padded(n)
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.parts() == other.parts()
    }
}

impl Eq for Partition {}

impl Hash for Partition {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parts().hash(state);
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts().cmp(other.parts())
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(rows: Vec<u32>) -> Result<Self> {
        Partition::new(rows)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.rows
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.parts().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    /// Accepts `()`, `(3,1)`, `3,1`, `[3, 1]` or whitespace separated rows.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s
            .trim()
            .trim_start_matches(['(', '['])
            .trim_end_matches([')', ']']);
        let rows = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|e| Error::Malformed(format!("row {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(rows)
    }
}

/// Strictly decreasing positions `a_1 > a_2 > ... > a_n >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct PointConfig {
    coords: Vec<u32>,
}

impl PointConfig {
    pub fn new(coords: Vec<u32>) -> Result<Self> {
        if coords.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::NotStrictlyDecreasing(coords));
        }
        Ok(PointConfig { coords })
    }

    /// Build from an arbitrary set of distinct points, sorting them.
    pub fn from_points(mut points: Vec<u32>) -> Result<Self> {
        points.sort_unstable_by(|a, b| b.cmp(a));
        PointConfig::new(points)
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn contains(&self, a: u32) -> bool {
        self.coords.binary_search_by(|c| a.cmp(c)).is_ok()
    }
}

impl TryFrom<Vec<u32>> for PointConfig {
    type Error = Error;
    fn try_from(coords: Vec<u32>) -> Result<Self> {
        PointConfig::new(coords)
    }
}

impl From<PointConfig> for Vec<u32> {
    fn from(p: PointConfig) -> Vec<u32> {
        p.coords
    }
}

/// Transpose of the diagram: the column lengths of `lambda`.
pub fn conjugate(lambda: &Partition) -> Partition {
    let parts = lambda.parts();
    let width = parts.first().copied().unwrap_or(0);
    let rows = (0..width)
        .map(|j| parts.iter().take_while(|&&r| r > j).count() as u32)
        .collect();
    Partition { rows }
}

/// Transpose of the complement of `lambda` in the `n x k` rectangle, padded
/// to `k` rows so it lives in the `k x n` box.
pub fn complement_conjugate(lambda: &Partition, n: usize, k: usize) -> Result<Partition> {
    let rows = lambda.check_box(n, k)?;
    let complement: Vec<u32> = rows.iter().rev().map(|&r| k as u32 - r).collect();
    let mut out = conjugate(&Partition { rows: complement }).rows;
    out.resize(k, 0);
    Ok(Partition { rows: out })
}

/// `||lambda|| = sum_i (i - 1) lambda_i`.
pub fn content_stat(lambda: &Partition) -> u64 {
    lambda
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &r)| i as u64 * r as u64)
        .sum()
}

/// `sum_i (k - lambda_i)(k - lambda_i - 1)/2`, the statistic of the
/// complement-conjugate diagram written through the rows of `lambda`.
pub fn dual_content_stat(lambda: &Partition, n: usize, k: usize) -> Result<u64> {
    let rows = lambda.check_box(n, k)?;
    Ok(rows
        .iter()
        .map(|&r| {
            let d = (k as u64) - r as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum())
}

/// `a_i = lambda_i + n - i`.
pub fn to_coords(lambda: &Partition, n: usize) -> Result<PointConfig> {
    let rows = lambda.padded(n)?;
    let coords = rows
        .iter()
        .enumerate()
        .map(|(i, &r)| r + (n - 1 - i) as u32)
        .collect();
    Ok(PointConfig { coords })
}

/// Inverse of [`to_coords`]; `n` must equal the number of points.
pub fn from_coords(config: &PointConfig, n: usize) -> Result<Partition> {
    if config.len() != n {
        return Err(Error::CoordCount {
            expected: n,
            got: config.len(),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for (i, &a) in config.coords().iter().enumerate() {
        let offset = (n - 1 - i) as u32;
        if a < offset {
            return Err(Error::NotStrictlyDecreasing(config.coords().to_vec()));
        }
        rows.push(a - offset);
    }
    Partition::new(rows)
}

/// Binomial coefficient in `u128`, `None` on overflow.
pub fn binomial_u128(n: u64, m: u64) -> Option<u128> {
    if m > n {
        return Some(0);
    }
    let m = m.min(n - m);
    let mut acc: u128 = 1;
    for i in 0..m {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Number of diagrams in the `n x k` box.
pub fn box_count(n: usize, k: usize) -> Option<u128> {
    binomial_u128((n + k) as u64, n as u64)
}

/// Iterator over all diagrams of the `n x k` box in lexicographic order of
/// the padded row vectors, starting at the empty diagram.
#[derive(Clone, Debug)]
pub struct BoxPartitions {
    k: u32,
    current: Option<Vec<u32>>,
}

impl Iterator for BoxPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let rows = self.current.take()?;
        let mut next = rows.clone();
        let k = self.k;
        let bump = (0..next.len())
            .rev()
            .find(|&i| next[i] < k && (i == 0 || next[i] < next[i - 1]));
        if let Some(i) = bump {
            next[i] += 1;
            for r in &mut next[i + 1..] {
                *r = 0;
            }
            self.current = Some(next);
        }
        Some(Partition { rows })
    }
}

/// Enumerate the `n x k` box with the default cap.
pub fn enumerate_in_box(n: usize, k: usize) -> Result<BoxPartitions> {
    enumerate_in_box_capped(n, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_in_box_capped(n: usize, k: usize, cap: u128) -> Result<BoxPartitions> {
    let count = box_count(n, k).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    Ok(BoxPartitions {
        k: k as u32,
        current: Some(vec![0; n]),
    })
}

/// Upper boundary of the diagram rotated by 45 degrees.
///
/// In unscaled lattice units the profile starts at height `n` over `x = 0`,
/// ends at height `k` over `x = n + k`, and has slope `-1` exactly on the
/// unit intervals `[a_i, a_i + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Profile {
    pub n: usize,
    pub k: usize,
    /// Heights at `x = 0, 1, ..., n + k`.
    pub heights: Vec<i64>,
    /// Left ends of the descending unit intervals, increasing.
    pub descents: Vec<u32>,
}

impl Profile {
    /// Height at an unscaled abscissa by linear interpolation.
    pub fn value(&self, x: f64) -> f64 {
        let last = self.heights.len() - 1;
        let x = x.clamp(0.0, last as f64);
        let i = (x.floor() as usize).min(last.saturating_sub(1));
        let frac = x - i as f64;
        if last == 0 {
            return self.heights[0] as f64;
        }
        self.heights[i] as f64 * (1.0 - frac) + self.heights[i + 1] as f64 * frac
    }

    /// Breakpoints scaled by `1/n` on both axes: domain `[0, c + 1]`,
    /// `f(0) = 1`, `f(c + 1) = k / n`.
    pub fn scaled(&self) -> Vec<(f64, f64)> {
        let s = self.n as f64;
        self.heights
            .iter()
            .enumerate()
            .map(|(x, &h)| (x as f64 / s, h as f64 / s))
            .collect()
    }
}

pub fn profile(lambda: &Partition, n: usize, k: usize) -> Result<Profile> {
    lambda.check_box(n, k)?;
    let coords = to_coords(lambda, n)?;
    let len = n + k;
    let mut heights = Vec::with_capacity(len + 1);
    let mut h = n as i64;
    heights.push(h);
    for x in 0..len as u32 {
        h += if coords.contains(x) { -1 } else { 1 };
        heights.push(h);
    }
    let mut descents = coords.coords().to_vec();
    descents.reverse();
    Ok(Profile {
        n,
        k,
        heights,
        descents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(rows: &[u32]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn rejects_increasing_rows() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(PointConfig::new(vec![3, 3]).is_err());
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate(&Partition::empty()), Partition::empty());
        assert_eq!(conjugate(&p(&[2, 1])), p(&[2, 1]));
        assert_eq!(conjugate(&p(&[3, 1])), p(&[2, 1, 1]));
    }

    #[test]
    fn complement_conjugate_examples() {
        assert_eq!(complement_conjugate(&Partition::empty(), 1, 1).unwrap(), p(&[1]));
        assert_eq!(complement_conjugate(&Partition::full(3, 2), 3, 2).unwrap(), Partition::empty());
        assert_eq!(complement_conjugate(&p(&[1, 0]), 2, 2).unwrap(), p(&[2, 1]));
        assert!(complement_conjugate(&p(&[3]), 2, 2).is_err());
        assert!(complement_conjugate(&p(&[1, 1, 1]), 2, 2).is_err());
    }

    #[test]
    fn stat_examples() {
        assert_eq!(content_stat(&Partition::empty()), 0);
        assert_eq!(content_stat(&p(&[3])), 0);
        assert_eq!(content_stat(&p(&[2, 2])), 2);
        assert_eq!(dual_content_stat(&Partition::empty(), 1, 2).unwrap(), 1);
        assert_eq!(dual_content_stat(&Partition::full(3, 4), 3, 4).unwrap(), 0);
        assert_eq!(dual_content_stat(&p(&[1]), 1, 2).unwrap(), 0);
        assert!(dual_content_stat(&p(&[5]), 1, 2).is_err());
    }

    #[test]
    fn coords_examples() {
        assert_eq!(to_coords(&Partition::empty(), 3).unwrap().coords(), &[2, 1, 0]);
        assert_eq!(to_coords(&p(&[2, 1]), 2).unwrap().coords(), &[3, 1]);
        let back = from_coords(&PointConfig::new(vec![3, 1]).unwrap(), 2).unwrap();
        assert_eq!(back, p(&[2, 1]));
        assert!(from_coords(&PointConfig::new(vec![3, 1]).unwrap(), 3).is_err());
        assert!(to_coords(&p(&[1, 1, 1]), 2).is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        let small: Vec<_> = enumerate_in_box(1, 1).unwrap().collect();
        assert_eq!(small, vec![Partition::empty(), p(&[1])]);
        let two: Vec<_> = enumerate_in_box(2, 2).unwrap().collect();
        assert_eq!(two.len(), 6);
        let rows: Vec<Vec<u32>> = two.iter().map(|l| l.rows().to_vec()).collect();
        assert_eq!(
            rows,
            vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1], vec![2, 2]]
        );
        assert_eq!(enumerate_in_box(3, 2).unwrap().count(), 10);
        assert!(matches!(
            enumerate_in_box_capped(10, 10, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..=4usize {
            for k in 1..=4usize {
                let mut brute = Vec::new();
                let total = (k + 1).pow(n as u32);
                for code in 0..total {
                    let mut rows = Vec::new();
                    let mut c = code;
                    for _ in 0..n {
                        rows.push((c % (k + 1)) as u32);
                        c /= k + 1;
                    }
                    rows.reverse();
                    if rows.windows(2).all(|w| w[0] >= w[1]) {
                        brute.push(rows);
                    }
                }
                brute.sort();
                let listed: Vec<Vec<u32>> = enumerate_in_box(n, k)
                    .unwrap()
                    .map(|l| l.rows().to_vec())
                    .collect();
                assert_eq!(listed, brute, "n={n} k={k}");
                assert_eq!(listed.len() as u128, box_count(n, k).unwrap());
            }
        }
    }

    #[test]
    fn profile_examples() {
        let empty = profile(&Partition::empty(), 3, 2).unwrap();
        assert_eq!(empty.descents, vec![0, 1, 2]);
        assert_eq!(empty.heights, vec![3, 2, 1, 0, 1, 2]);
        let full = profile(&Partition::full(3, 2), 3, 2).unwrap();
        assert_eq!(full.descents, vec![2, 3, 4]);
        let fig = profile(&p(&[7, 4, 3, 3, 1]), 5, 7).unwrap();
        assert_eq!(fig.descents, vec![1, 4, 5, 7, 11]);
        assert_eq!(fig.heights, vec![5, 6, 5, 6, 7, 6, 5, 6, 5, 6, 7, 8, 7]);
        let scaled = fig.scaled();
        assert_eq!(scaled[0], (0.0, 1.0));
        assert_eq!(*scaled.last().unwrap(), (12.0 / 5.0, 7.0 / 5.0));
        assert_eq!(fig.value(1.5), 5.5);
    }

    #[test]
    fn parse_and_serde() {
        let l: Partition = "(3,1)".parse().unwrap();
        assert_eq!(l, p(&[3, 1]));
        assert_eq!("[]".parse::<Partition>().unwrap(), Partition::empty());
        assert!("(1,2)".parse::<Partition>().is_err());
        assert!("(a)".parse::<Partition>().is_err());
        let json = serde_json::to_string(&p(&[2, 1, 0])).unwrap();
        assert_eq!(json, "[2,1,0]");
        let back: Partition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p(&[2, 1]));
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
        assert!(serde_json::from_str::<PointConfig>("[1,1]").is_err());
        assert_eq!(format!("{}", p(&[3, 1, 0])), "(3,1)");
    }

    fn box_partition() -> impl Strategy<Value = (Partition, usize, usize)> {
        (1usize..7, 1usize..7).prop_flat_map(|(n, k)| {
            proptest::collection::vec(0..=k as u32, n).prop_map(move |mut rows| {
                rows.sort_unstable_by(|a, b| b.cmp(a));
                (Partition::new(rows).unwrap(), n, k)
            })
        })
    }

    proptest! {
        #[test]
        fn complement_conjugate_is_involution((l, n, k) in box_partition()) {
            let once = complement_conjugate(&l, n, k).unwrap();
            prop_assert!(once.fits_box(k, n));
            prop_assert_eq!(complement_conjugate(&once, k, n).unwrap(), l.clone());
            prop_assert_eq!(l.size() + once.size(), (n * k) as u64);
        }

        #[test]
        fn dual_stat_matches_complement((l, n, k) in box_partition()) {
            let cc = complement_conjugate(&l, n, k).unwrap();
            prop_assert_eq!(content_stat(&cc), dual_content_stat(&l, n, k).unwrap());
        }

        #[test]
        fn coords_round_trip((l, n, _k) in box_partition()) {
            let c = to_coords(&l, n).unwrap();
            prop_assert_eq!(from_coords(&c, n).unwrap(), l);
        }

        #[test]
        fn profile_descents_are_coords((l, n, k) in box_partition()) {
            let prof = profile(&l, n, k).unwrap();
            let mut coords = to_coords(&l, n).unwrap().coords().to_vec();
            coords.reverse();
            prop_assert_eq!(prof.descents.len(), n);
            prop_assert_eq!(&prof.descents, &coords);
            prop_assert_eq!(prof.heights[n + k], k as i64);
            for x in 0..n + k {
                let slope = prof.heights[x + 1] - prof.heights[x];
                prop_assert_eq!(slope == -1, coords.contains(&(x as u32)));
            }
        }
    }

    #[test]
    fn exhaustive_dual_stat_up_to_five() {
        for n in 1..=5 {
            for k in 1..=5 {
                for l in enumerate_in_box(n, k).unwrap() {
                    let cc = complement_conjugate(&l, n, k).unwrap();
                    assert_eq!(content_stat(&cc), dual_content_stat(&l, n, k).unwrap());
                }
            }
        }
    }
}
