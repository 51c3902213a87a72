//! Annulus construction. Take the most populated thin annulus
//! `t_low <= |v|^2 <= t_high` (width at most `g`) and drop every point `b`
//! admitting a witness: a non-zero integer `delta` with `|delta|^2 <= g` and
//! `0 <= <b, delta> <= g`. A point with no witness is an extreme point of the
//! integer ball of squared radius `t_high`, so the survivors are convexly
//! independent and encode to a progression-free set.

use rayon::prelude::*;

use crate::codec::{encode, ApFreeSet};
use crate::error::{check_budget, Result};
use crate::lattice::{
    build_histogram, select_annulus, shell_members, LatticeVector, ShellSelection,
};
use crate::numeric::{eta, exact_moments, ConstructionParams, Method};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessVector {
    pub delta: Vec<i64>,
    pub norm_sq: u64,
}

impl WitnessVector {
    pub fn nonzero_entries(&self) -> usize {
        self.delta.iter().filter(|&&d| d != 0).count()
    }
}

/// Upper estimate `sum_{h=1}^{g} 2^h C(k-1+h, h)` of the witness count,
/// saturating.
fn witness_estimate(k: u32, g: u32) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for h in 1..=g as u128 {
        binom = binom.saturating_mul(k as u128 - 1 + h) / h;
        let term = binom.saturating_mul(1u128.checked_shl(h as u32).unwrap_or(u128::MAX));
        total = total.saturating_add(term);
    }
    total
}

fn collect_witnesses(
    i: usize,
    remaining: u64,
    current: &mut Vec<i64>,
    out: &mut Vec<WitnessVector>,
    g: u64,
) {
    if i == current.len() {
        let norm_sq = g - remaining;
        if norm_sq > 0 {
            out.push(WitnessVector {
                delta: current.clone(),
                norm_sq,
            });
        }
        return;
    }
    let r = remaining.isqrt() as i64;
    for a in -r..=r {
        current[i] = a;
        collect_witnesses(i + 1, remaining - (a * a) as u64, current, out, g);
    }
    current[i] = 0;
}

/// Every integer vector `delta` in `k` dimensions with
/// `1 <= |delta|^2 <= g`, each once, in lexicographic order.
///
/// Both `delta` and `-delta` are kept: the witness condition is not symmetric.
pub fn enumerate_witnesses(k: u32, g: u32, budget: u64) -> Result<Vec<WitnessVector>> {
    if k == 0 || g == 0 {
        return Err(crate::Error::InvalidArgument(
            "witness enumeration needs k >= 1 and g >= 1".into(),
        ));
    }
    check_budget(witness_estimate(k, g), budget)?;
    let mut out = Vec::new();
    let mut current = vec![0i64; k as usize];
    collect_witnesses(0, g as u64, &mut current, &mut out, g as u64);
    Ok(out)
}

/// Sparse form used by the filter: `(index, value)` for non-zero entries.
fn sparse(witnesses: &[WitnessVector]) -> Vec<Vec<(usize, i64)>> {
    witnesses
        .iter()
        .map(|w| {
            w.delta
                .iter()
                .enumerate()
                .filter(|(_, &d)| d != 0)
                .map(|(i, &d)| (i, d))
                .collect()
        })
        .collect()
}

/// Keeps the points with no witness `delta` satisfying
/// `0 <= <b, delta> <= g`. Input order is preserved.
pub fn filter_survivors(
    points: &[LatticeVector],
    witnesses: &[WitnessVector],
    g: u32,
) -> (Vec<LatticeVector>, usize) {
    let sparse = sparse(witnesses);
    let g = g as i64;
    let keep: Vec<bool> = points
        .par_iter()
        .map(|b| {
            !sparse.iter().any(|w| {
                let dot: i64 = w.iter().map(|&(i, d)| b.coords[i] as i64 * d).sum();
                (0..=g).contains(&dot)
            })
        })
        .collect();
    let survivors: Vec<LatticeVector> = points
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(p, _)| p.clone())
        .collect();
    let removed = points.len() - survivors.len();
    (survivors, removed)
}

#[derive(Debug, Clone)]
pub struct AnnulusArtifact {
    pub params: ConstructionParams,
    pub shell: ShellSelection,
    pub annulus_points: usize,
    pub witness_count: usize,
    pub survivors: Vec<LatticeVector>,
    pub removed: usize,
    pub set: ApFreeSet,
}

impl AnnulusArtifact {
    /// The filter removed every annulus point.
    pub fn is_empty_result(&self) -> bool {
        self.survivors.is_empty()
    }

    pub fn survivor_fraction(&self) -> f64 {
        if self.annulus_points == 0 {
            0.0
        } else {
            self.survivors.len() as f64 / self.annulus_points as f64
        }
    }
}

/// Runs the annulus construction. An empty survivor set is a normal outcome
/// here (see [`AnnulusArtifact::is_empty_result`]); callers decide whether to
/// retry with a smaller `g`.
pub fn construct_annulus(params: &ConstructionParams, budget: u64) -> Result<AnnulusArtifact> {
    params.validate(Method::Annulus)?;
    let hist = build_histogram(params.k, params.y, budget)?;
    let moments = exact_moments(params.k, params.y)?;
    let shell = select_annulus(&hist, &moments, params.g)?;
    let points = shell_members(params.k, params.y, shell.t_low, shell.t_high, budget)?;
    let witnesses = enumerate_witnesses(params.k, params.g, budget)?;
    let (survivors, removed) = filter_survivors(&points, &witnesses, params.g);
    let elements = survivors
        .iter()
        .map(|v| encode(v, params.y))
        .collect::<Result<Vec<_>>>()?;
    let set =
        ApFreeSet::new(params.n.clone(), elements, Method::Annulus)?.with_params(params.clone());
    Ok(AnnulusArtifact {
        params: params.clone(),
        shell,
        annulus_points: points.len(),
        witness_count: witnesses.len(),
        survivors,
        removed,
        set,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DhatCheck {
    pub enumerated: u128,
    pub bound: f64,
    /// The `epsilon` at which the bound was evaluated.
    pub epsilon_used: f64,
    pub ok: bool,
}

/// Compares the enumerated witness count with `2 * 2^{eta(eps) k}`.
///
/// `eps` is `epsilon` when `g <= epsilon k`; otherwise (the `g >= 1` clamp
/// is active) the bound is evaluated at `g / k`.
pub fn dhat_bound_check(k: u32, g: u32, epsilon: f64, budget: u64) -> Result<DhatCheck> {
    let enumerated = enumerate_witnesses(k, g, budget)?.len() as u128;
    let epsilon_used = if g as f64 <= epsilon * k as f64 {
        epsilon
    } else {
        g as f64 / k as f64
    };
    let bound = 2.0 * (eta(epsilon_used)? * k as f64).exp2();
    Ok(DhatCheck {
        enumerated,
        bound,
        epsilon_used,
        ok: enumerated as f64 <= bound,
    })
}
