//! Dense progression-free subsets of `{1, .., n}`.
//!
//! Two constructions share one pipeline: enumerate the cube `[0, y-1]^k`,
//! pick a thin shell of squared norms by pigeonhole, keep a convexly
//! independent subset of its points, and map each point to an integer by
//! reading its coordinates as radix-`2y` digits.
//!
//! * [`behrend`] keeps a whole sphere `|v|^2 = T`.
//! * [`annulus`] keeps the points of a thin annulus that survive an exact
//!   witness filter, which certifies they are extreme points of the ball.
//!
//! [`verify`] holds independent checks and two exact solvers for small `n`;
//! [`lattice`] also counts lattice points in capped balls for comparing
//! exact counts with volumes.

pub mod annulus;
pub mod behrend;
pub mod codec;
pub mod error;
pub mod lattice;
pub mod numeric;
pub mod verify;

pub use annulus::{
    construct_annulus, dhat_bound_check, enumerate_witnesses, filter_survivors, AnnulusArtifact,
    DhatCheck, WitnessVector,
};
pub use behrend::{construct_behrend, BehrendArtifact};
pub use codec::{decode, encode, ApFreeSet};
pub use error::{Error, Result};
pub use lattice::{
    build_histogram, count_capped_ball, discrepancy_scan, select_annulus, select_behrend_shell,
    shell_members, DiscrepancyRecord, LatticeVector, NormHistogram, ShellSelection, DEFAULT_BUDGET,
};
pub use numeric::{
    annulus_bound, ball_volume, behrend_bound, default_params, eta, exact_moments,
    gamma_half_integer, ConstructionParams, GammaValue, Method, MomentSummary,
};
pub use verify::{convexly_independent, exact_nu, exact_nu_bb, midpoint_free, VerificationReport};
