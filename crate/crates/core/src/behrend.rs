//! Sphere construction: pick the most populated squared norm `T` inside the
//! Chebyshev window, take every cube point on the sphere `|v|^2 = T`, and
//! read each one as the digits of a radix-`2y` integer.

use num_bigint::BigUint;

use crate::codec::{encode, ApFreeSet};
use crate::error::Result;
use crate::lattice::{
    build_histogram, select_sphere, shell_members, LatticeVector, ShellSelection,
};
use crate::numeric::{exact_moments, ConstructionParams, Method};

#[derive(Debug, Clone)]
pub struct BehrendArtifact {
    pub params: ConstructionParams,
    /// `t_low == t_high == T`.
    pub shell: ShellSelection,
    pub vectors: Vec<LatticeVector>,
    pub set: ApFreeSet,
    /// `(2y)^k`; every element is below it.
    pub effective_n: BigUint,
}

/// Runs the sphere construction on the cube `[0, y-1]^k` given by `params`.
///
/// The zero vector encodes to 0, which is outside `[1, n-1]`, so it is never
/// kept: bin 0 is counted without it during selection.
pub fn construct_behrend(params: &ConstructionParams, budget: u64) -> Result<BehrendArtifact> {
    params.validate(Method::Behrend)?;
    let hist = build_histogram(params.k, params.y, budget)?;
    let moments = exact_moments(params.k, params.y)?;
    let shell = select_sphere(&hist, &moments, params.a, true)?;
    let mut vectors = shell_members(params.k, params.y, shell.t_low, shell.t_high, budget)?;
    vectors.retain(|v| v.norm_sq > 0);
    let elements = vectors
        .iter()
        .map(|v| encode(v, params.y))
        .collect::<Result<Vec<_>>>()?;
    let set =
        ApFreeSet::new(params.n.clone(), elements, Method::Behrend)?.with_params(params.clone());
    Ok(BehrendArtifact {
        params: params.clone(),
        shell,
        vectors,
        set,
        effective_n: params.effective_n(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::lattice::DEFAULT_BUDGET;
    use crate::verify::midpoint_free;

    fn elements(a: &BehrendArtifact) -> Vec<u64> {
        a.set
            .elements()
            .iter()
            .map(|x| u64::try_from(x).unwrap())
            .collect()
    }

    #[test]
    fn two_by_three() {
        let p = ConstructionParams::from_dims(2, 3).unwrap();
        assert_eq!(p.n, BigUint::from(36u32));
        let a = construct_behrend(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!((a.shell.t_low, a.shell.t_high), (1, 1));
        let coords: Vec<_> = a.vectors.iter().map(|v| v.coords.clone()).collect();
        assert_eq!(coords, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(elements(&a), vec![1, 6]);
        assert!(midpoint_free(&a.set).ok);
    }

    #[test]
    fn origin_is_never_selected() {
        // bins 0 and 1 both hold one point; the origin does not count
        let p = ConstructionParams::from_dims(1, 2).unwrap();
        let a = construct_behrend(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(a.shell.t_low, 1);
        assert_eq!(elements(&a), vec![1]);
    }

    #[test]
    fn three_by_two() {
        let p = ConstructionParams::from_dims(3, 2).unwrap();
        let a = construct_behrend(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(a.shell.t_low, 1);
        assert_eq!(elements(&a), vec![1, 4, 16]);
        assert_eq!(a.effective_n, BigUint::from(64u32));
    }

    #[test]
    fn non_power_n_uses_floor() {
        let n = BigUint::from(5000u32);
        let p = crate::numeric::default_params(&n, Method::Behrend).unwrap();
        let a = construct_behrend(&p, DEFAULT_BUDGET).unwrap();
        assert!(a.effective_n <= n);
        assert_eq!(a.set.n, n);
        assert!(a.set.elements().iter().all(|x| x < &a.effective_n));
        assert!(midpoint_free(&a.set).ok);
    }

    #[test]
    fn budget_is_enforced() {
        let p = ConstructionParams::from_dims(6, 10).unwrap();
        assert!(matches!(
            construct_behrend(&p, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
