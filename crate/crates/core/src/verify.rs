//! Independent checks: midpoint-freeness of integer sets, convex
//! independence of lattice vectors, and two exact solvers for the largest
//! progression-free subset of `{1, .., n}`.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::codec::ApFreeSet;
use crate::error::{check_budget, Error, Result};
use crate::lattice::LatticeVector;
use crate::numeric::Method;

/// Largest `n` accepted by [`exact_nu`] (one bit per element of a `u64`).
pub const NU_BITMASK_LIMIT: u32 = 64;

/// Largest `n` accepted by [`exact_nu_bb`].
pub const NU_BB_LIMIT: u32 = 120;

/// Default cap on the number of vectors given to [`convexly_independent`].
pub const CONVEX_BUDGET: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub ok: bool,
    /// `(mid, low, high)` with `mid = (low + high) / 2`, all in the set.
    pub witness: Option<(BigUint, BigUint, BigUint)>,
    /// Pairs `(low, high)` examined, summed over midpoint candidates up to
    /// and including the witness (or all of them when `ok`).
    pub pairs_checked: u128,
}

/// Scans for a pair `j < p < l` with `s[j] + s[l] == 2 s[p]`. Returns the
/// number of pairs examined and the hit, if any.
fn scan_midpoint<T, F>(s: &[T], p: usize, sum: F) -> (u128, Option<(usize, usize)>)
where
    F: Fn(&T, &T) -> std::cmp::Ordering,
{
    let mut steps = 0u128;
    if p == 0 || p + 1 >= s.len() {
        return (0, None);
    }
    let (mut lo, mut hi) = (p - 1, p + 1);
    loop {
        steps += 1;
        match sum(&s[lo], &s[hi]) {
            std::cmp::Ordering::Equal => return (steps, Some((lo, hi))),
            std::cmp::Ordering::Less => {
                hi += 1;
                if hi == s.len() {
                    return (steps, None);
                }
            }
            std::cmp::Ordering::Greater => {
                if lo == 0 {
                    return (steps, None);
                }
                lo -= 1;
            }
        }
    }
}

fn scan_all<T, F>(s: &[T], sum: F) -> (u128, Option<(usize, usize, usize)>)
where
    T: Sync,
    F: Fn(usize, &T, &T) -> std::cmp::Ordering + Sync,
{
    let per_mid: Vec<(u128, Option<(usize, usize)>)> = (0..s.len())
        .into_par_iter()
        .map(|p| scan_midpoint(s, p, |a, b| sum(p, a, b)))
        .collect();
    let mut pairs = 0u128;
    for (p, (steps, hit)) in per_mid.into_iter().enumerate() {
        pairs += steps;
        if let Some((lo, hi)) = hit {
            return (pairs, Some((p, lo, hi)));
        }
    }
    (pairs, None)
}

/// Looks for `i, j, l` in a sorted slice of distinct values with
/// `2 i = j + l`. The reported witness has the smallest midpoint.
pub fn find_arithmetic_triple(sorted: &[BigUint]) -> VerificationReport {
    let small: Option<Vec<u128>> = sorted
        .iter()
        .map(|x| x.to_u128().filter(|&v| v < 1u128 << 126))
        .collect();
    let (pairs_checked, hit) = match small {
        Some(s) => scan_all(&s, |p, a, b| (a + b).cmp(&(2 * s[p]))),
        None => scan_all(sorted, |p, a, b| (a + b).cmp(&(&sorted[p] << 1usize))),
    };
    VerificationReport {
        ok: hit.is_none(),
        witness: hit.map(|(p, lo, hi)| (sorted[p].clone(), sorted[lo].clone(), sorted[hi].clone())),
        pairs_checked,
    }
}

pub fn midpoint_free(set: &ApFreeSet) -> VerificationReport {
    find_arithmetic_triple(set.elements())
}

fn primitive_direction(from: &[u32], to: &[u32]) -> Vec<i64> {
    let diff: Vec<i64> = from
        .iter()
        .zip(to)
        .map(|(&a, &b)| b as i64 - a as i64)
        .collect();
    let g = diff.iter().fold(0i64, |g, &d| g.gcd(&d));
    diff.into_iter().map(|d| d / g).collect()
}

/// True iff no vector lies on the closed segment between two others.
///
/// With integer coordinates, `v` lies strictly inside `[u, w]` exactly when
/// `u - v` and `w - v` reduce to opposite primitive directions, so each `v`
/// needs one hash pass over the others.
pub fn convexly_independent(vectors: &[LatticeVector], budget: usize) -> Result<bool> {
    let mut points: Vec<&[u32]> = vectors.iter().map(|v| v.coords.as_slice()).collect();
    points.sort_unstable();
    points.dedup();
    check_budget(points.len() as u128, budget as u64)?;
    if let Some(first) = points.first() {
        if points.iter().any(|p| p.len() != first.len()) {
            return Err(Error::InvalidArgument("vectors differ in dimension".into()));
        }
    }
    let dependent = points.par_iter().enumerate().any(|(i, v)| {
        let mut seen: HashSet<Vec<i64>> = HashSet::with_capacity(points.len());
        for (j, u) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = primitive_direction(v, u);
            let opposite: Vec<i64> = d.iter().map(|x| -x).collect();
            if seen.contains(&opposite) {
                return true;
            }
            seen.insert(d);
        }
        false
    });
    Ok(!dependent)
}

fn check_nu_arg(n: u32, limit: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    check_budget(n as u128, limit as u64)
}

/// Depth-first search over `1..=n` in increasing order, include before
/// exclude, pruned by the optimum of shorter intervals.
struct IntervalSearch<'a> {
    n: u32,
    /// `shorter[len]` = largest progression-free subset of an interval of
    /// length `len`, known for `len < n`.
    shorter: &'a [u32],
    best: u32,
    best_mask: u64,
}

impl IntervalSearch<'_> {
    fn run(&mut self, x: u32, chosen: u64, forbidden: u64, size: u32) {
        if x > self.n {
            if size > self.best {
                self.best = size;
                self.best_mask = chosen;
            }
            return;
        }
        let remaining = self.n - x + 1;
        let cap = if remaining < self.n {
            self.shorter[remaining as usize]
        } else {
            remaining
        };
        if size + cap <= self.best {
            return;
        }
        let bit = 1u64 << (x - 1);
        if forbidden & bit == 0 {
            let mut next_forbidden = forbidden;
            let mut rest = chosen;
            while rest != 0 {
                let y = rest.trailing_zeros() + 1;
                rest &= rest - 1;
                let z = 2 * x - y;
                if z <= self.n {
                    next_forbidden |= 1u64 << (z - 1);
                }
            }
            self.run(x + 1, chosen | bit, next_forbidden, size + 1);
        }
        self.run(x + 1, chosen, forbidden, size);
    }
}

/// `nu(n)` and the lexicographically smallest optimal set, by exhaustive
/// bitmask search. The returned set carries `n + 1` as its bound so that it
/// covers `[1, n]`.
pub fn exact_nu(n: u32) -> Result<(u32, ApFreeSet)> {
    check_nu_arg(n, NU_BITMASK_LIMIT)?;
    let mut table = vec![0u32; n as usize + 1];
    let mut best_mask = 0u64;
    for len in 1..=n {
        let (best, mask) = {
            let mut search = IntervalSearch {
                n: len,
                shorter: &table,
                best: 0,
                best_mask: 0,
            };
            search.run(1, 0, 0, 0);
            (search.best, search.best_mask)
        };
        table[len as usize] = best;
        best_mask = mask;
    }
    let elements = (1..=n)
        .filter(|x| best_mask >> (x - 1) & 1 == 1)
        .map(BigUint::from)
        .collect();
    let set = ApFreeSet::new(BigUint::from(n + 1), elements, Method::Exact)?;
    Ok((table[n as usize], set))
}

/// Branch and bound from the top element down, seeded with a greedy lower
/// bound. The upper bound charges one lost element per disjoint run of three
/// consecutive candidates.
struct TopDownSearch {
    best: u32,
}

fn run_bound(mut candidates: u128) -> u32 {
    let mut bound = 0;
    while candidates != 0 {
        let start = candidates.trailing_zeros();
        let len = (candidates >> start).trailing_ones();
        bound += len - len / 3;
        if start + len >= 128 {
            break;
        }
        candidates &= !(((1u128 << len) - 1) << start);
    }
    bound
}

impl TopDownSearch {
    /// Bit `i` of `candidates` stands for the integer `i + 1`; every chosen
    /// element is larger than every candidate.
    fn run(&mut self, candidates: u128, chosen: u128, size: u32) {
        if candidates == 0 {
            self.best = self.best.max(size);
            return;
        }
        if size + run_bound(candidates) <= self.best {
            return;
        }
        let top = 127 - candidates.leading_zeros();
        let c = top + 1;
        let rest = candidates & !(1u128 << top);

        let mut kept = rest;
        let mut above = chosen;
        while above != 0 {
            let y = above.trailing_zeros() + 1;
            above &= above - 1;
            if 2 * c > y {
                let z = 2 * c - y;
                kept &= !(1u128 << (z - 1));
            }
        }
        self.run(kept, chosen | (1u128 << top), size + 1);
        self.run(rest, chosen, size);
    }
}

fn greedy_lower_bound(n: u32) -> u32 {
    let mut chosen: Vec<u32> = Vec::new();
    let mut taken = vec![false; n as usize + 1];
    for x in 1..=n {
        if chosen
            .iter()
            .all(|&y| !(2 * y > x && taken[(2 * y - x) as usize]))
        {
            taken[x as usize] = true;
            chosen.push(x);
        }
    }
    chosen.len() as u32
}

/// `nu(n)` by top-down branch and bound, independent of [`exact_nu`].
pub fn exact_nu_bb(n: u32) -> Result<u32> {
    check_nu_arg(n, NU_BB_LIMIT)?;
    let all = (1u128 << n) - 1;
    let mut search = TopDownSearch {
        best: greedy_lower_bound(n),
    };
    search.run(all, 0, 0);
    Ok(search.best)
}
