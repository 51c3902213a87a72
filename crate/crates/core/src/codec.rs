//! The radix-`2y` digit map from cube vectors to integers, its inverse, and
//! the `apfree-set/1` interchange format.
//!
//! Every coordinate is at most `y - 1`, below half the radix, so adding two
//! encoded values never carries between digits. That is what makes the map
//! transport midpoints: `v^ = (u^ + w^)/2` forces `v = (u + w)/2`
//! coordinatewise.

use std::io::Write;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::numeric::{ConstructionParams, Method};

pub const SCHEMA: &str = "apfree-set/1";

/// `sum_i coords[i] * (2y)^i`; the first coordinate is the least significant
/// digit.
pub fn encode(v: &LatticeVector, y: u32) -> Result<BigUint> {
    let radix = 2 * y as u64;
    for (index, &value) in v.coords.iter().enumerate() {
        if value >= y {
            return Err(Error::CoordOutOfRange {
                index,
                value,
                max: y.saturating_sub(1),
            });
        }
    }
    // u128 fast path while (2y)^k fits
    let fits = (radix as u128).checked_pow(v.coords.len() as u32).is_some();
    if fits {
        let x = v
            .coords
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * radix as u128 + c as u128);
        return Ok(BigUint::from(x));
    }
    Ok(v.coords
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &c| acc * radix + c))
}

/// Inverse of [`encode`] on the cube `[0, y-1]^k`.
pub fn decode(x: &BigUint, k: u32, y: u32) -> Result<LatticeVector> {
    if y == 0 {
        return Err(Error::InvalidArgument("y must be positive".into()));
    }
    let radix = BigUint::from(2 * y as u64);
    let mut rest = x.clone();
    let mut coords = Vec::with_capacity(k as usize);
    for position in 0..k as usize {
        let (q, r) = rest.div_rem(&radix);
        let digit = r.to_u64().expect("digit below radix");
        if digit >= y as u64 {
            return Err(Error::DigitOutOfRange { position, digit, y });
        }
        coords.push(digit as u32);
        rest = q;
    }
    if !rest.is_zero() {
        return Err(Error::DigitOutOfRange {
            position: k as usize,
            digit: rest.to_u64().unwrap_or(u64::MAX),
            y,
        });
    }
    Ok(LatticeVector::new(coords))
}

/// A set of positive integers below `n`, kept sorted, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ApFreeSet {
    pub n: BigUint,
    elements: Vec<BigUint>,
    pub method: Method,
    pub params: Option<ConstructionParams>,
}

impl ApFreeSet {
    /// Sorts `elements` and checks they are distinct and inside `[1, n-1]`.
    pub fn new(n: BigUint, mut elements: Vec<BigUint>, method: Method) -> Result<Self> {
        elements.sort_unstable();
        check_elements(&n, &elements).map_err(Error::InvalidArgument)?;
        Ok(ApFreeSet {
            n,
            elements,
            method,
            params: None,
        })
    }

    pub fn with_params(mut self, params: ConstructionParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `|S| / n` as a float.
    pub fn density(&self) -> f64 {
        let n = self.n.to_f64().unwrap_or(f64::INFINITY);
        self.len() as f64 / n
    }

    /// Serializes to `apfree-set/1` JSON, newline-terminated.
    /// `generated_unix` is omitted when `None`.
    pub fn to_json(&self, generated_unix: Option<u64>) -> String {
        let file = SetFile {
            schema: SCHEMA.to_string(),
            n: self.n.to_string(),
            method: self.method,
            k: self.params.as_ref().map(|p| p.k),
            y: self.params.as_ref().map(|p| p.y),
            params: ParamsEcho::from(self.params.as_ref()),
            size: self.len(),
            elements: self.elements.iter().map(|e| e.to_string()).collect(),
            generated_unix,
        };
        let mut s = serde_json::to_string_pretty(&file).expect("set file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema != SCHEMA {
            return Err(Error::Parse(format!(
                "unsupported schema `{}` (expected `{SCHEMA}`)",
                file.schema
            )));
        }
        if file.size != file.elements.len() {
            return Err(Error::Parse(format!(
                "size field {} disagrees with {} listed elements",
                file.size,
                file.elements.len()
            )));
        }
        let n = parse_decimal(&file.n)?;
        let elements = file
            .elements
            .iter()
            .map(|e| parse_decimal(e))
            .collect::<Result<Vec<_>>>()?;
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("elements are not strictly increasing".into()));
        }
        check_elements(&n, &elements).map_err(Error::Parse)?;
        let params = match (file.k, file.y, file.params) {
            (
                Some(k),
                Some(y),
                ParamsEcho {
                    a: Some(a),
                    epsilon: Some(epsilon),
                    g: Some(g),
                },
            ) => Some(ConstructionParams {
                n: n.clone(),
                k,
                y,
                a,
                epsilon,
                g,
            }),
            _ => None,
        };
        Ok(ApFreeSet {
            n,
            elements,
            method: file.method,
            params,
        })
    }

    /// Writes `index,element` rows (0-based index).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,element")?;
        for (i, e) in self.elements.iter().enumerate() {
            writeln!(out, "{i},{e}")?;
        }
        Ok(())
    }
}

fn check_elements(n: &BigUint, elements: &[BigUint]) -> std::result::Result<(), String> {
    if elements.windows(2).any(|w| w[0] == w[1]) {
        return Err("duplicate elements".into());
    }
    if let Some(first) = elements.first() {
        if first.is_zero() {
            return Err("elements must be positive".into());
        }
    }
    if let Some(last) = elements.last() {
        if last >= n {
            return Err(format!("element {last} is not below n = {n}"));
        }
    }
    Ok(())
}

fn parse_decimal(s: &str) -> Result<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("`{s}` is not a decimal integer")));
    }
    s.parse::<BigUint>()
        .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    schema: String,
    n: String,
    method: Method,
    k: Option<u32>,
    y: Option<u32>,
    #[serde(default)]
    params: ParamsEcho,
    size: usize,
    elements: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
}

#[derive(Default, Serialize, Deserialize)]
struct ParamsEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<u32>,
}

impl From<Option<&ConstructionParams>> for ParamsEcho {
    fn from(p: Option<&ConstructionParams>) -> Self {
        match p {
            Some(p) => ParamsEcho {
                a: Some(p.a),
                epsilon: Some(p.epsilon),
                g: Some(p.g),
            },
            None => ParamsEcho::default(),
        }
    }
}

/// Serde adapter writing a `BigUint` as a decimal string.
pub(crate) mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
