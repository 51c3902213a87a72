//! Numerics shared by both constructions: Gamma at integer and half-integer
//! points, ball volumes, exact moments of the squared-norm distribution over
//! the cube, the witness-count exponent, bound comparators and parameter
//! derivation.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default Chebyshev multiplier for shell selection.
pub const DEFAULT_A: f64 = 2.0;

/// Default annulus parameter; sits inside the feasibility window.
pub const DEFAULT_EPSILON: f64 = 0.05;

/// `1 - log2(pi * e / 6)`, the upper end of the admissible range for
/// `epsilon + eta(epsilon)`.
pub fn feasibility_limit() -> f64 {
    1.0 - (std::f64::consts::PI * std::f64::consts::E / 6.0).log2()
}

/// Which construction produced (or will produce) a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Behrend,
    /// Serialized as `"elkin"`, the wire name of the annulus construction.
    #[serde(rename = "elkin", alias = "annulus")]
    Annulus,
    Exact,
    External,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Behrend => "behrend",
            Method::Annulus => "elkin",
            Method::Exact => "exact",
            Method::External => "external",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "behrend" => Ok(Method::Behrend),
            "elkin" | "annulus" => Ok(Method::Annulus),
            "exact" => Ok(Method::Exact),
            "external" => Ok(Method::External),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Exact value of Gamma at a positive integer or half-integer: `coeff`, times
/// `sqrt(pi)` when `sqrt_pi` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaValue {
    pub coeff: BigRational,
    pub sqrt_pi: bool,
}

impl GammaValue {
    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::INFINITY);
        if self.sqrt_pi {
            c * std::f64::consts::PI.sqrt()
        } else {
            c
        }
    }
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Gamma evaluated at `twice_arg / 2`.
///
/// Integer points give `(m-1)!`; half-integer points `n + 1/2` give
/// `(2n)! sqrt(pi) / (4^n n!)`, both exactly.
pub fn gamma_half_integer(twice_arg: u32) -> Result<GammaValue> {
    if twice_arg == 0 {
        return Err(Error::InvalidArgument(
            "Gamma is only evaluated at positive arguments".into(),
        ));
    }
    if twice_arg.is_multiple_of(2) {
        let m = twice_arg / 2;
        Ok(GammaValue {
            coeff: BigRational::from_integer(BigInt::from(factorial(m - 1))),
            sqrt_pi: false,
        })
    } else {
        let n = (twice_arg - 1) / 2;
        let num = BigInt::from(factorial(2 * n));
        let den = BigInt::from(factorial(n)) << (2 * n as usize);
        Ok(GammaValue {
            coeff: BigRational::new(num, den),
            sqrt_pi: true,
        })
    }
}

/// Volume of the unit ball in `ell` dimensions. `ell = 0` gives 1.
pub fn unit_ball_volume(ell: u32) -> f64 {
    let gamma = gamma_half_integer(ell + 2).expect("ell + 2 > 0").to_f64();
    std::f64::consts::PI.powf(ell as f64 / 2.0) / gamma
}

/// Volume of the `ell`-dimensional ball of squared radius `radius_sq`.
///
/// `ell = 0` is accepted and yields 1 (the point), which keeps reference
/// volumes two dimensions down well-defined for planar scans.
pub fn ball_volume(ell: u32, radius_sq: f64) -> f64 {
    unit_ball_volume(ell) * radius_sq.powf(ell as f64 / 2.0)
}

/// Mean and variance of `Z = Y_1^2 + ... + Y_k^2` for `Y_i` independent and
/// uniform on `{0, .., y-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    pub mean: BigRational,
    pub variance: BigRational,
    pub std_dev: f64,
}

impl MomentSummary {
    pub fn mean_f64(&self) -> f64 {
        self.mean.to_f64().unwrap_or(f64::NAN)
    }

    /// The closed window `[mean - a sd, mean + a sd]`.
    pub fn window(&self, a: f64) -> (f64, f64) {
        let mu = self.mean_f64();
        (mu - a * self.std_dev, mu + a * self.std_dev)
    }
}

pub fn exact_moments(k: u32, y: u32) -> Result<MomentSummary> {
    if k == 0 {
        return Err(Error::DegenerateParameters(
            "dimension k must be positive".into(),
        ));
    }
    if y < 2 {
        return Err(Error::DegenerateParameters(format!(
            "cube side y = {y} must be at least 2"
        )));
    }
    let yb = BigInt::from(y);
    let one = BigInt::one();
    // E[Y^2] = (y-1)(2y-1)/6, E[Y^4] = (y-1)(2y-1)(3y^2-3y-1)/30
    let base = (&yb - &one) * (BigInt::from(2) * &yb - &one);
    let m2 = BigRational::new(base.clone(), BigInt::from(6));
    let quartic = BigInt::from(3) * &yb * &yb - BigInt::from(3) * &yb - &one;
    let m4 = BigRational::new(base * quartic, BigInt::from(30));
    let kr = BigRational::from_integer(BigInt::from(k));
    let mean = &kr * &m2;
    let variance = &kr * (m4 - &m2 * &m2);
    let std_dev = variance.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(MomentSummary {
        mean,
        variance,
        std_dev,
    })
}

/// `eta(eps) = eps * (log2(2e) + log2(1 + 1/eps))`.
pub fn eta(epsilon: f64) -> Result<f64> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be a positive real, got {epsilon}"
        )));
    }
    let two_e = 2.0 * std::f64::consts::E;
    Ok(epsilon * (two_e.log2() + (1.0 + 1.0 / epsilon).log2()))
}

/// Annulus width derived from `epsilon`: `max(1, floor(epsilon * k))`.
pub fn default_g(k: u32, epsilon: f64) -> u32 {
    ((epsilon * k as f64).floor() as u32).max(1)
}

/// Base-2 logarithm of an arbitrary-precision integer.
pub fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().map(f64::log2).unwrap_or(f64::NAN)
    } else {
        let shift = bits - 64;
        let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
        top.log2() + shift as f64
    }
}

fn log2_bound(n: &BigUint, sign: f64) -> f64 {
    let l = log2_big(n);
    let exponent = l - 2.0 * std::f64::consts::SQRT_2 * l.sqrt() + sign * 0.25 * l.log2();
    exponent.exp2()
}

/// `n / (2^{2 sqrt 2 sqrt(log2 n)} (log2 n)^{1/4})`, constant taken as 1.
pub fn behrend_bound(n: &BigUint) -> f64 {
    log2_bound(n, -1.0)
}

/// `n (log2 n)^{1/4} / 2^{2 sqrt 2 sqrt(log2 n)}`, constant taken as 1.
pub fn annulus_bound(n: &BigUint) -> f64 {
    log2_bound(n, 1.0)
}

/// Parameters governing a construction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    #[serde(with = "crate::codec::decimal")]
    pub n: BigUint,
    pub k: u32,
    pub y: u32,
    pub a: f64,
    pub epsilon: f64,
    pub g: u32,
}

impl ConstructionParams {
    /// Parameters for an explicit cube `[0, y-1]^k`, with `n = (2y)^k`.
    pub fn from_dims(k: u32, y: u32) -> Result<Self> {
        let params = ConstructionParams {
            n: BigUint::from(2 * y as u64).pow(k),
            k,
            y,
            a: DEFAULT_A,
            epsilon: DEFAULT_EPSILON,
            g: default_g(k, DEFAULT_EPSILON),
        };
        params.check_shape()?;
        Ok(params)
    }

    pub fn with_a(mut self, a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "a must be positive, got {a}"
            )));
        }
        self.a = a;
        Ok(self)
    }

    /// Sets `epsilon` and re-derives `g` from it. The pair must sit inside
    /// the feasibility window.
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        let total = epsilon + eta(epsilon)?;
        if total >= feasibility_limit() {
            return Err(Error::DegenerateParameters(format!(
                "epsilon + eta(epsilon) = {total:.4} is not below {:.4}",
                feasibility_limit()
            )));
        }
        self.epsilon = epsilon;
        self.g = default_g(self.k, epsilon);
        Ok(self)
    }

    /// Overrides the annulus width directly.
    pub fn with_g(mut self, g: u32) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidArgument("g must be at least 1".into()));
        }
        self.g = g;
        Ok(self)
    }

    /// `(2y)^k`, the exclusive upper end of the encoded range.
    pub fn effective_n(&self) -> BigUint {
        BigUint::from(2 * self.y as u64).pow(self.k)
    }

    /// Number of cube points, `y^k`.
    pub fn cube_size(&self) -> u128 {
        (self.y as u128).checked_pow(self.k).unwrap_or(u128::MAX)
    }

    fn check_shape(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::DegenerateParameters("k must be positive".into()));
        }
        if self.y < 2 {
            return Err(Error::DegenerateParameters(format!(
                "y = {} is below 2 (n too small for k = {})",
                self.y, self.k
            )));
        }
        if self.effective_n() > self.n {
            return Err(Error::DegenerateParameters(format!(
                "(2y)^k = {} exceeds n = {}",
                self.effective_n(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn validate(&self, method: Method) -> Result<()> {
        self.check_shape()?;
        if self.a.is_nan() || self.a <= 0.0 {
            return Err(Error::InvalidArgument("a must be positive".into()));
        }
        if method == Method::Annulus {
            if self.g == 0 {
                return Err(Error::InvalidArgument("g must be at least 1".into()));
            }
            if self.epsilon.is_nan() || self.epsilon <= 0.0 {
                return Err(Error::InvalidArgument("epsilon must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Parameters for a target interval `[1, n]`: `k = ceil(sqrt(2 log2 n))` and
/// `y = floor(n^{1/k} / 2)`.
pub fn default_params(n: &BigUint, method: Method) -> Result<ConstructionParams> {
    if !matches!(method, Method::Behrend | Method::Annulus) {
        return Err(Error::InvalidArgument(format!(
            "no parameter derivation for method `{method}`"
        )));
    }
    if n < &BigUint::from(2u32) {
        return Err(Error::DegenerateParameters(format!("n = {n} is below 2")));
    }
    let k = (2.0 * log2_big(n)).sqrt().ceil() as u32;
    if k < 2 {
        return Err(Error::DegenerateParameters(format!("k = {k} is below 2")));
    }
    // floor(floor(n^{1/k}) / 2) == floor(n^{1/k} / 2)
    let root = n.nth_root(k);
    let y = (root / 2u32)
        .to_u32()
        .ok_or_else(|| Error::DegenerateParameters("cube side does not fit in 32 bits".into()))?;
    if y < 2 {
        return Err(Error::DegenerateParameters(format!(
            "y = floor(n^(1/{k}) / 2) = {y} is below 2"
        )));
    }
    let params = ConstructionParams {
        n: n.clone(),
        k,
        y,
        a: DEFAULT_A,
        epsilon: DEFAULT_EPSILON,
        g: default_g(k, DEFAULT_EPSILON),
    };
    params.validate(method)?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Num;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_half_integer(3).unwrap();
        assert_eq!(g.coeff, rat(1, 2));
        assert!(g.sqrt_pi);
        let g = gamma_half_integer(2).unwrap();
        assert_eq!(g.coeff, rat(1, 1));
        assert!(!g.sqrt_pi);
        // 5/2 * 3/2 * 1/2 = 15/8
        let g = gamma_half_integer(7).unwrap();
        assert_eq!(g.coeff, rat(15, 8));
        assert!(g.sqrt_pi);
        assert!(gamma_half_integer(0).is_err());
    }

    #[test]
    fn gamma_matches_recurrence() {
        // Gamma(x + 1) = x Gamma(x) over both lattices
        for twice in 1..40u32 {
            let lo = gamma_half_integer(twice).unwrap();
            let hi = gamma_half_integer(twice + 2).unwrap();
            assert_eq!(lo.sqrt_pi, hi.sqrt_pi);
            assert_eq!(hi.coeff, lo.coeff * rat(twice as i64, 2));
        }
    }

    #[test]
    fn ball_volume_examples() {
        assert!((ball_volume(2, 1.0) - std::f64::consts::PI).abs() < 1e-14);
        assert!((ball_volume(1, 4.0) - 4.0).abs() < 1e-14);
        assert!((ball_volume(3, 1.0) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
        assert_eq!(ball_volume(0, 25.0), 1.0);
    }

    #[test]
    fn moment_examples() {
        let m = exact_moments(2, 3).unwrap();
        assert_eq!(m.mean, rat(10, 3));
        assert_eq!(m.variance, rat(52, 9));
        assert!((m.std_dev - 52f64.sqrt() / 3.0).abs() < 1e-12);
        assert!((m.std_dev - 2.4037).abs() < 1e-4);

        let m = exact_moments(1, 2).unwrap();
        assert_eq!(m.mean, rat(1, 2));
        assert_eq!(m.variance, rat(1, 4));

        assert_eq!(exact_moments(4, 3).unwrap().mean, rat(20, 3));
        assert!(exact_moments(3, 1).is_err());
        assert!(exact_moments(0, 3).is_err());
    }

    #[test]
    fn eta_examples() {
        // oracle: 0.05 * (log2(5.43656365691809) + log2(21)) evaluated with mpmath
        let e = eta(0.05).unwrap();
        assert!((e - 0.341_750_623).abs() < 1e-8, "{e}");
        let e1 = eta(1.0).unwrap();
        assert!((e1 - ((2.0 * std::f64::consts::E).log2() + 1.0)).abs() < 1e-14);
        assert!((e1 - 3.443).abs() < 1e-3);
        let tiny = eta(1e-6).unwrap();
        assert!(tiny < 0.03 && (tiny - 2.2e-5).abs() < 1e-6, "{tiny}");
        assert!(eta(0.0).is_err());
        assert!(eta(-1.0).is_err());
        assert!(eta(f64::NAN).is_err());
    }

    #[test]
    fn eta_is_monotone_and_default_is_feasible() {
        let mut prev = 0.0;
        for i in 0..=600 {
            let eps = 10f64.powf(-6.0 + i as f64 / 100.0);
            let e = eta(eps).unwrap();
            assert!(e > prev, "eta not increasing at {eps}");
            prev = e;
        }
        assert!((feasibility_limit() - 0.4905).abs() < 1e-3);
        assert!(DEFAULT_EPSILON + eta(DEFAULT_EPSILON).unwrap() < feasibility_limit());
    }

    #[test]
    fn default_params_examples() {
        let p = default_params(&(BigUint::one() << 32usize), Method::Behrend).unwrap();
        assert_eq!((p.k, p.y, p.a), (8, 8, 2.0));

        let err = default_params(&BigUint::from(100u32), Method::Behrend).unwrap_err();
        assert!(matches!(err, Error::DegenerateParameters(_)));

        let p = ConstructionParams::from_dims(4, 4).unwrap();
        assert_eq!((p.k, p.y), (4, 4));
        assert_eq!(p.n, BigUint::from(4096u32));

        let p = default_params(&BigUint::from(1u64 << 40), Method::Annulus).unwrap();
        assert_eq!(p.g, default_g(p.k, DEFAULT_EPSILON));
        assert!(p.g >= 1);
    }

    #[test]
    fn default_params_fit_inside_n() {
        for e in 12..200u32 {
            for extra in [0u32, 1, 12345] {
                let n = (BigUint::one() << e as usize) + extra;
                if let Ok(p) = default_params(&n, Method::Behrend) {
                    assert!(p.effective_n() <= n);
                    // y is maximal
                    assert!(BigUint::from(2 * p.y as u64 + 2).pow(p.k) > n);
                }
            }
        }
        let big = BigUint::from_str_radix("123456789012345678901234567890123", 10).unwrap();
        let p = default_params(&big, Method::Behrend).unwrap();
        assert!(p.effective_n() <= big);
    }

    #[test]
    fn bounds() {
        let n = BigUint::one() << 16usize;
        let ratio = annulus_bound(&n) / behrend_bound(&n);
        assert!((ratio - 4.0).abs() < 1e-12);
        let expected = 65536.0 / (2f64.powf(8.0 * std::f64::consts::SQRT_2) * 2.0);
        assert!((behrend_bound(&n) / expected - 1.0).abs() < 1e-12);
        let b2 = behrend_bound(&BigUint::from(2u32));
        assert!((b2 - 2.0 / 2f64.powf(2.0 * std::f64::consts::SQRT_2)).abs() < 1e-12);
        assert!((b2 - 0.28).abs() < 0.01);
    }

    #[test]
    fn params_overrides() {
        let p = ConstructionParams::from_dims(20, 3).unwrap();
        assert_eq!(p.g, 1);
        assert_eq!(p.clone().with_g(3).unwrap().g, 3);
        assert!(p.clone().with_g(0).is_err());
        assert!(p.clone().with_epsilon(0.1).is_err());
        let wide = ConstructionParams::from_dims(100, 2).unwrap();
        assert_eq!(wide.g, 5);
        assert_eq!(wide.with_epsilon(0.04).unwrap().g, 4);
        assert!(p.with_a(-1.0).is_err());
    }
}
