//! The discrete cube `[0, y-1]^k`: exhaustive enumeration, the squared-norm
//! census, shell and annulus selection, and exact lattice-point counts in
//! balls cut by coordinate half-spaces.
//!
//! Enumeration is split into slabs by the first coordinate and run on the
//! current rayon pool. Slabs are merged in order, so every result is
//! identical whatever the thread count.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::numeric::{ball_volume, MomentSummary};

/// Default cap on the number of points visited by one enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// A point of the cube together with its squared norm.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVector {
    pub coords: Vec<u32>,
    pub norm_sq: u64,
}

impl LatticeVector {
    pub fn new(coords: Vec<u32>) -> Self {
        let norm_sq = coords.iter().map(|&c| c as u64 * c as u64).sum();
        LatticeVector { coords, norm_sq }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &[i64]) -> i64 {
        self.coords
            .iter()
            .zip(other)
            .map(|(&c, &d)| c as i64 * d)
            .sum()
    }
}

/// `y^k` with overflow mapped to `u128::MAX`.
pub fn cube_size(k: u32, y: u32) -> u128 {
    (y as u128).checked_pow(k).unwrap_or(u128::MAX)
}

fn check_cube(k: u32, y: u32) -> Result<()> {
    if k == 0 || y == 0 {
        return Err(Error::InvalidArgument(format!(
            "cube [0, y-1]^k needs k >= 1 and y >= 1 (got k = {k}, y = {y})"
        )));
    }
    Ok(())
}

/// Visits every cube point whose first coordinate is `first`, in
/// lexicographic order, passing the coordinates and the squared norm.
fn for_each_in_slab(k: u32, y: u32, first: u32, mut f: impl FnMut(&[u32], u64)) {
    let k = k as usize;
    let mut coords = vec![0u32; k];
    coords[0] = first;
    let mut norm = first as u64 * first as u64;
    let top = y - 1;
    let top_sq = top as u64 * top as u64;
    loop {
        f(&coords, norm);
        let mut i = k - 1;
        loop {
            if i == 0 {
                return;
            }
            if coords[i] < top {
                norm += 2 * coords[i] as u64 + 1;
                coords[i] += 1;
                break;
            }
            coords[i] = 0;
            norm -= top_sq;
            i -= 1;
        }
    }
}

/// Population of every squared norm over the full cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormHistogram {
    pub k: u32,
    pub y: u32,
    counts: Vec<u64>,
}

impl NormHistogram {
    /// Builds a histogram from an explicit count vector indexed by norm.
    pub fn from_counts(k: u32, y: u32, counts: Vec<u64>) -> Self {
        NormHistogram { k, y, counts }
    }

    pub fn max_norm(&self) -> u64 {
        self.k as u64 * (self.y as u64 - 1).pow(2)
    }

    pub fn get(&self, norm_sq: u64) -> u64 {
        self.counts.get(norm_sq as usize).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Non-empty bins in ascending order of squared norm.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(t, &c)| (t as u64, c))
    }

    /// Sum of counts over the inclusive range `[low, high]`.
    pub fn population(&self, low: u64, high: u64) -> u64 {
        if low > high {
            return 0;
        }
        let hi = (high as usize).min(self.counts.len().saturating_sub(1));
        if low as usize > hi {
            return 0;
        }
        self.counts[low as usize..=hi].iter().sum()
    }

    /// Writes `norm_sq,count` rows, ascending, for every non-empty bin.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "norm_sq,count")?;
        for (t, c) in self.iter() {
            writeln!(out, "{t},{c}")?;
        }
        Ok(())
    }
}

pub fn build_histogram(k: u32, y: u32, budget: u64) -> Result<NormHistogram> {
    check_cube(k, y)?;
    check_budget(cube_size(k, y), budget)?;
    let len = k as usize * (y as usize - 1).pow(2) + 1;
    let counts = (0..y)
        .into_par_iter()
        .map(|first| {
            let mut local = vec![0u64; len];
            for_each_in_slab(k, y, first, |_, norm| local[norm as usize] += 1);
            local
        })
        .reduce(
            || vec![0u64; len],
            |mut acc, part| {
                acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
                acc
            },
        );
    Ok(NormHistogram { k, y, counts })
}

/// A chosen squared-norm value (Behrend) or window (annulus variant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellSelection {
    pub t_low: u64,
    pub t_high: u64,
    pub population: u64,
    /// The real Chebyshev window `[mu - a sigma, mu + a sigma]`.
    pub sigma_window: (f64, f64),
    /// Number of sub-windows the Chebyshev window was split into.
    pub shells: u64,
    /// Pigeonhole lower bound on `population`.
    pub guarantee: f64,
    pub guarantee_met: bool,
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Exact test `|t - mu| <= a sigma`, i.e. `(t - mu)^2 <= a^2 var`.
fn within(t: i64, moments: &MomentSummary, a: &BigRational, above: bool) -> bool {
    let diff = BigRational::from_integer(BigInt::from(t)) - &moments.mean;
    let near_side = if above {
        !diff.is_positive()
    } else {
        !diff.is_negative()
    };
    if near_side {
        return true;
    }
    &diff * &diff <= a * a * &moments.variance
}

/// Integer end points of the closed window `[mu - a sigma, mu + a sigma]`,
/// rounded inward exactly.
fn integer_window(moments: &MomentSummary, a: f64) -> (i64, i64) {
    let ar = rational(a);
    let (lo_f, hi_f) = moments.window(a);
    let mut lo = lo_f.ceil() as i64 + 1;
    while within(lo - 1, moments, &ar, false) {
        lo -= 1;
    }
    while !within(lo, moments, &ar, false) {
        lo += 1;
    }
    let mut hi = hi_f.floor() as i64 - 1;
    while within(hi + 1, moments, &ar, true) {
        hi += 1;
    }
    while !within(hi, moments, &ar, true) {
        hi -= 1;
    }
    (lo, hi)
}

fn clamp_range(hist: &NormHistogram, lo: i64, hi: i64) -> Option<(u64, u64)> {
    let lo = lo.max(0) as u64;
    if hi < 0 {
        return None;
    }
    let hi = (hi as u64).min(hist.max_norm());
    (lo <= hi).then_some((lo, hi))
}

/// Picks the most populated squared norm inside the Chebyshev window, ties
/// toward the smallest value.
pub fn select_behrend_shell(
    hist: &NormHistogram,
    moments: &MomentSummary,
    a: f64,
) -> Result<ShellSelection> {
    select_sphere(hist, moments, a, false)
}

/// Same as [`select_behrend_shell`] but with the origin removed from bin 0.
pub(crate) fn select_sphere(
    hist: &NormHistogram,
    moments: &MomentSummary,
    a: f64,
    exclude_origin: bool,
) -> Result<ShellSelection> {
    let sigma_window = moments.window(a);
    let empty = || Error::EmptyWindow {
        low: sigma_window.0,
        high: sigma_window.1,
    };
    let (lo, hi) = integer_window(moments, a);
    let (lo, hi) = clamp_range(hist, lo, hi).ok_or_else(empty)?;
    let mut best: Option<(u64, u64)> = None;
    for t in lo..=hi {
        let mut c = hist.get(t);
        if exclude_origin && t == 0 {
            c = c.saturating_sub(1);
        }
        if c > best.map_or(0, |b| b.1) {
            best = Some((t, c));
        }
    }
    let (t, population) = best.ok_or_else(empty)?;
    let cube = hist.total() as f64;
    let guarantee = (1.0 - 1.0 / (a * a)) * cube / (2.0 * a * moments.std_dev + 1.0);
    let slack = if exclude_origin { 1.0 } else { 0.0 };
    Ok(ShellSelection {
        t_low: t,
        t_high: t,
        population,
        sigma_window,
        shells: 1,
        guarantee,
        guarantee_met: population as f64 >= guarantee.ceil() - slack,
    })
}

/// Number of width-`g` sub-windows: the least `l >= 1` with `l g >= 4 sigma`.
pub fn annulus_count(moments: &MomentSummary, g: u32) -> u64 {
    let sixteen_var = &moments.variance * BigRational::from_integer(BigInt::from(16));
    let covers = |l: u64| {
        let w = BigRational::from_integer(BigInt::from(l) * BigInt::from(g));
        &w * &w >= sixteen_var
    };
    let mut l = ((4.0 * moments.std_dev / g as f64).ceil() as u64).max(2) - 1;
    while !covers(l) {
        l += 1;
    }
    while l > 1 && covers(l - 1) {
        l -= 1;
    }
    l
}

/// Splits the `a = 2` Chebyshev window into half-open integer windows of
/// width `g` (the last one closed, taking the remainder) and returns the most
/// populated one, ties toward the smallest `t_low`.
pub fn select_annulus(
    hist: &NormHistogram,
    moments: &MomentSummary,
    g: u32,
) -> Result<ShellSelection> {
    if g == 0 {
        return Err(Error::InvalidArgument("g must be at least 1".into()));
    }
    let sigma_window = moments.window(2.0);
    let (lo, hi) = integer_window(moments, 2.0);
    let shells = annulus_count(moments, g);
    let mut best: Option<(u64, u64, u64)> = None;
    for i in 0..shells {
        let w_lo = lo + (i * g as u64) as i64;
        let w_hi = if i + 1 == shells {
            hi
        } else {
            w_lo + g as i64 - 1
        };
        let Some((a, b)) = clamp_range(hist, w_lo, w_hi) else {
            continue;
        };
        let c = hist.population(a, b);
        if c > best.map_or(0, |x| x.2) {
            best = Some((a, b, c));
        }
    }
    let (t_low, t_high, population) = best.ok_or(Error::EmptyWindow {
        low: sigma_window.0,
        high: sigma_window.1,
    })?;
    let guarantee = 0.75 * hist.total() as f64 / shells as f64;
    Ok(ShellSelection {
        t_low,
        t_high,
        population,
        sigma_window,
        shells,
        guarantee,
        guarantee_met: population as f64 >= guarantee.ceil(),
    })
}

/// Every cube vector with squared norm in `[t_low, t_high]`, in
/// lexicographic order of coordinates.
pub fn shell_members(
    k: u32,
    y: u32,
    t_low: u64,
    t_high: u64,
    budget: u64,
) -> Result<Vec<LatticeVector>> {
    check_cube(k, y)?;
    check_budget(cube_size(k, y), budget)?;
    let slabs: Vec<Vec<LatticeVector>> = (0..y)
        .into_par_iter()
        .map(|first| {
            let mut found = Vec::new();
            for_each_in_slab(k, y, first, |coords, norm| {
                if (t_low..=t_high).contains(&norm) {
                    found.push(LatticeVector {
                        coords: coords.to_vec(),
                        norm_sq: norm,
                    });
                }
            });
            found
        })
        .collect();
    Ok(slabs.into_iter().flatten().collect())
}

/// Visits the whole cube in lexicographic order on the calling thread.
pub fn for_each_cube_point(k: u32, y: u32, mut f: impl FnMut(&[u32], u64)) -> Result<()> {
    check_cube(k, y)?;
    for first in 0..y {
        for_each_in_slab(k, y, first, &mut f);
    }
    Ok(())
}

fn check_capped(k: u32, m: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if m == 0 || m > k + 1 {
        return Err(Error::InvalidArgument(format!(
            "half-space cutoff m = {m} must lie in [1, {}]",
            k + 1
        )));
    }
    Ok(())
}

/// Counts of integer points `alpha` with `|alpha|^2 <= r` and `alpha_i >= 0`
/// for every 1-based index `i >= m`, for all `r` in `0..=t_max`.
///
/// Slices one coordinate at a time: the count in `j` trailing coordinates at
/// radius `r` is the sum over the leading value `a` of the count in `j - 1`
/// coordinates at `r - a^2`.
pub fn capped_ball_counts(k: u32, t_max: u64, m: u32, budget: u64) -> Result<Vec<u128>> {
    check_capped(k, m)?;
    let root = t_max.isqrt();
    let work = k as u128 * (t_max as u128 + 1) * (root as u128 + 1);
    check_budget(work, budget)?;
    let overflow = || Error::InvalidArgument("lattice count overflows 128 bits".into());
    let mut table = vec![1u128; t_max as usize + 1];
    for index in (1..=k).rev() {
        let mult = if index >= m { 1u128 } else { 2u128 };
        let next: Option<Vec<u128>> = (0..=t_max as usize)
            .into_par_iter()
            .map(|r| {
                let mut side = 0u128;
                let mut a = 1usize;
                while a * a <= r {
                    side = side.checked_add(table[r - a * a])?;
                    a += 1;
                }
                side.checked_mul(mult)?.checked_add(table[r])
            })
            .collect();
        table = next.ok_or_else(overflow)?;
    }
    Ok(table)
}

pub fn count_capped_ball(k: u32, t: u64, m: u32, budget: u64) -> Result<u128> {
    Ok(capped_ball_counts(k, t, m, budget)?[t as usize])
}

/// Volume of the ball of squared radius `t` in `k` dimensions cut by the
/// half-spaces `alpha_i >= 0` for `i >= m`.
pub fn capped_volume(k: u32, t: f64, m: u32) -> f64 {
    let constrained = (k as i64 - m as i64 + 1).max(0);
    ball_volume(k, t) / 2f64.powi(constrained as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRecord {
    pub k: u32,
    pub t: u64,
    pub m: u32,
    pub count_exact: u128,
    pub volume: f64,
    pub reference_volume: f64,
    pub ratio: f64,
}

/// `|A - V| / V_{k-2}` on each squared radius of `t_grid`, where `A` is the
/// exact capped-ball count and `V`, `V_{k-2}` are capped volumes with the
/// same cutoff `m`.
pub fn discrepancy_scan(
    k: u32,
    t_grid: &[u64],
    m: u32,
    budget: u64,
) -> Result<Vec<DiscrepancyRecord>> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "discrepancy needs k >= 2 for the reference volume".into(),
        ));
    }
    if t_grid.contains(&0) {
        return Err(Error::InvalidArgument(
            "grid radii must be at least 1".into(),
        ));
    }
    let Some(&t_max) = t_grid.iter().max() else {
        return Ok(Vec::new());
    };
    let counts = capped_ball_counts(k, t_max, m, budget)?;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let count_exact = counts[t as usize];
            let volume = capped_volume(k, t as f64, m);
            let reference_volume = capped_volume(k - 2, t as f64, m);
            let diff = (count_exact.to_f64().unwrap_or(f64::INFINITY) - volume).abs();
            DiscrepancyRecord {
                k,
                t,
                m,
                count_exact,
                volume,
                reference_volume,
                ratio: diff / reference_volume,
            }
        })
        .collect())
}

/// Roughly geometric integer grid on `[low, high]` with `points` nodes,
/// deduplicated, always containing both ends.
pub fn geometric_grid(low: u64, high: u64, points: usize) -> Vec<u64> {
    if points <= 1 || low >= high {
        return vec![high.max(low)];
    }
    let ratio = (high as f64 / low as f64).ln();
    let mut grid: Vec<u64> = (0..points)
        .map(|i| {
            let x = low as f64 * (ratio * i as f64 / (points - 1) as f64).exp();
            (x.round() as u64).clamp(low, high)
        })
        .collect();
    grid[0] = low;
    grid[points - 1] = high;
    grid.dedup();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::exact_moments;
    use std::collections::BTreeMap;

    fn as_map(h: &NormHistogram) -> BTreeMap<u64, u64> {
        h.iter().collect()
    }

    #[test]
    fn histogram_examples() {
        let h = build_histogram(2, 3, DEFAULT_BUDGET).unwrap();
        let want: BTreeMap<u64, u64> = [(0, 1), (1, 2), (2, 1), (4, 2), (5, 2), (8, 1)].into();
        assert_eq!(as_map(&h), want);

        let h = build_histogram(1, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(as_map(&h), [(0, 1), (1, 1)].into());

        let h = build_histogram(3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(as_map(&h), [(0, 1), (1, 3), (2, 3), (3, 1)].into());
    }

    #[test]
    fn histogram_budget() {
        let err = build_histogram(10, 10, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(build_histogram(0, 3, 10).is_err());
    }

    #[test]
    fn histogram_csv() {
        let h = build_histogram(3, 2, DEFAULT_BUDGET).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "norm_sq,count\n0,1\n1,3\n2,3\n3,1\n"
        );
    }

    #[test]
    fn behrend_shell_examples() {
        let h = build_histogram(2, 3, DEFAULT_BUDGET).unwrap();
        let m = exact_moments(2, 3).unwrap();
        let s = select_behrend_shell(&h, &m, 2.0).unwrap();
        assert_eq!((s.t_low, s.t_high, s.population), (1, 1, 2));
        assert!((s.sigma_window.0 + 1.4741).abs() < 1e-3);
        assert!((s.sigma_window.1 - 8.1408).abs() < 1e-3);
        assert!(s.guarantee_met);

        let h = build_histogram(3, 2, DEFAULT_BUDGET).unwrap();
        let m = exact_moments(3, 2).unwrap();
        let s = select_behrend_shell(&h, &m, 2.0).unwrap();
        assert_eq!((s.t_low, s.population), (1, 3));
    }

    #[test]
    fn behrend_shell_single_bin() {
        // only bin 7 is populated inside the window
        let mut counts = vec![0u64; 13];
        counts[7] = 5;
        counts[0] = 1;
        let h = NormHistogram::from_counts(3, 3, counts);
        let m = exact_moments(3, 3).unwrap();
        let s = select_behrend_shell(&h, &m, 1.0).unwrap();
        assert_eq!((s.t_low, s.population), (7, 5));
    }

    #[test]
    fn behrend_shell_empty_window() {
        let h = NormHistogram::from_counts(2, 3, vec![0; 9]);
        let m = exact_moments(2, 3).unwrap();
        assert!(matches!(
            select_behrend_shell(&h, &m, 2.0),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn integer_window_is_exact_at_integer_ends() {
        // k = 1, y = 2: mu = 1/2, sigma = 1/2, a = 1 gives exactly [0, 1]
        let m = exact_moments(1, 2).unwrap();
        assert_eq!(integer_window(&m, 1.0), (0, 1));
        // a = 2 gives [-1/2, 3/2] -> [0, 1]
        assert_eq!(integer_window(&m, 2.0), (0, 1));
        // a = 3 gives [-1, 2]
        assert_eq!(integer_window(&m, 3.0), (-1, 2));
    }

    #[test]
    fn annulus_examples() {
        let h = build_histogram(2, 3, DEFAULT_BUDGET).unwrap();
        let m = exact_moments(2, 3).unwrap();
        let s = select_annulus(&h, &m, 1).unwrap();
        assert_eq!((s.t_low, s.t_high, s.population), (1, 1, 2));
        // 4 sigma = 9.615.. -> 10 windows of width 1
        assert_eq!(s.shells, 10);

        // one window when g covers 4 sigma
        let s = select_annulus(&h, &m, 10).unwrap();
        assert_eq!(s.shells, 1);
        assert_eq!((s.t_low, s.t_high), (0, 8));
        assert_eq!(s.population, 9);

        // k = 3, y = 2, g = 2: window [-0.23, 3.23] splits as [0,1] and [2,3]
        let h = build_histogram(3, 2, DEFAULT_BUDGET).unwrap();
        let m = exact_moments(3, 2).unwrap();
        let s = select_annulus(&h, &m, 2).unwrap();
        assert_eq!(s.shells, 2);
        assert_eq!((s.t_low, s.t_high, s.population), (0, 1, 4));
        assert!(s.guarantee_met);
        assert!(select_annulus(&h, &m, 0).is_err());
    }

    #[test]
    fn shell_members_examples() {
        let v = shell_members(2, 3, 1, 1, DEFAULT_BUDGET).unwrap();
        let coords: Vec<_> = v.iter().map(|x| x.coords.clone()).collect();
        assert_eq!(coords, vec![vec![0, 1], vec![1, 0]]);

        let v = shell_members(4, 3, 0, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(v, vec![LatticeVector::new(vec![0; 4])]);

        let v = shell_members(2, 3, 4, 5, DEFAULT_BUDGET).unwrap();
        let coords: Vec<_> = v.iter().map(|x| x.coords.clone()).collect();
        assert_eq!(coords, vec![vec![0, 2], vec![1, 2], vec![2, 0], vec![2, 1]]);
    }

    #[test]
    fn cube_walk_is_lexicographic() {
        let mut seen = Vec::new();
        for_each_cube_point(3, 3, |c, n| {
            assert_eq!(n, LatticeVector::new(c.to_vec()).norm_sq);
            seen.push(c.to_vec());
        })
        .unwrap();
        assert_eq!(seen.len(), 27);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let mut single = Vec::new();
        for_each_cube_point(1, 4, |c, _| single.push(c[0])).unwrap();
        assert_eq!(single, vec![0, 1, 2, 3]);
    }

    fn brute_capped(k: u32, t: u64, m: u32) -> u128 {
        let r = t.isqrt() as i64;
        let mut count = 0;
        let mut point = vec![-r; k as usize];
        loop {
            let ok = point
                .iter()
                .enumerate()
                .all(|(i, &a)| (i as u32 + 1) < m || a >= 0);
            let norm: i64 = point.iter().map(|a| a * a).sum();
            if ok && norm as u64 <= t {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == point.len() {
                    return count;
                }
                if point[i] < r {
                    point[i] += 1;
                    break;
                }
                point[i] = -r;
                i += 1;
            }
        }
    }

    #[test]
    fn capped_ball_examples() {
        assert_eq!(count_capped_ball(2, 25, 3, DEFAULT_BUDGET).unwrap(), 81);
        assert_eq!(count_capped_ball(1, 0, 1, DEFAULT_BUDGET).unwrap(), 1);
        assert_eq!(
            count_capped_ball(2, 25, 1, DEFAULT_BUDGET).unwrap(),
            brute_capped(2, 25, 1)
        );
        assert_eq!(brute_capped(2, 25, 1), 26);
        assert!(count_capped_ball(2, 25, 0, DEFAULT_BUDGET).is_err());
        assert!(count_capped_ball(2, 25, 4, DEFAULT_BUDGET).is_err());
        assert!(matches!(
            count_capped_ball(6, 1_000_000, 7, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn capped_ball_matches_brute_force() {
        for k in 1..=4 {
            for m in 1..=k + 1 {
                for t in [0u64, 1, 2, 3, 5, 10, 17, 30] {
                    assert_eq!(
                        count_capped_ball(k, t, m, DEFAULT_BUDGET).unwrap(),
                        brute_capped(k, t, m),
                        "k={k} t={t} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn discrepancy_examples() {
        let r = discrepancy_scan(2, &[25], 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(r[0].count_exact, 81);
        assert_eq!(r[0].reference_volume, 1.0);
        assert!((r[0].ratio - (81.0 - 25.0 * std::f64::consts::PI)).abs() < 1e-9);
        assert!((r[0].ratio - 2.46).abs() < 0.01);

        let r = discrepancy_scan(3, &[100], 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(r[0].count_exact, brute_capped(3, 100, 4));
        assert!((r[0].volume - 4.0 * std::f64::consts::PI / 3.0 * 1000.0).abs() < 1e-9);
        assert!((r[0].reference_volume - 20.0).abs() < 1e-12);

        assert!(discrepancy_scan(3, &[0, 10], 4, DEFAULT_BUDGET).is_err());
        assert!(discrepancy_scan(1, &[10], 2, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn grid() {
        assert_eq!(geometric_grid(1, 25, 3), vec![1, 5, 25]);
        let g = geometric_grid(100, 10_000, 21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[10], 1000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
