//! Slope data, box heights and the total orders they induce.
//!
//! A slope datum assigns each box `(k; i, j)` the height
//! `ξ_k + i·ξ_Ω + j·ξ_Ω̄`. "General" data, where distinct boxes never share a
//! height, are modelled exactly: every entry is a [`LexScalar`], a rational
//! base value followed by ordered infinitesimal coordinates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::Cell;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlopeError {
    #[error("slope entries must be positive, got {0}")]
    NonPositive(String),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("unknown slope mode {0:?}")]
    BadMode(String),
    #[error("a slope datum needs at least one component")]
    NoComponents,
    #[error("base datum is not strictly aligned: |ξ_{a} - ξ_{b}| ≥ ξ_Ω + ξ_Ω̄")]
    NotStrictlyAligned { a: usize, b: usize },
    #[error("slope datum is not integral")]
    NotIntegral,
    #[error("boxes {0} and {1} have equal height")]
    Tie(Cell, Cell),
    #[error("invalid slope JSON: {0}")]
    Json(String),
}

/// A rational number plus ordered infinitesimals, compared lexicographically.
///
/// Coordinate 0 is the standard part; coordinate `t + 1` is infinitely small
/// relative to coordinate `t`. Missing trailing coordinates read as zero.
#[derive(Debug, Clone, Default)]
pub struct LexScalar {
    coords: Vec<BigRational>,
}

impl LexScalar {
    pub fn new(coords: Vec<BigRational>) -> Self {
        LexScalar { coords }
    }

    pub fn zero() -> Self {
        LexScalar::default()
    }

    pub fn from_rational(r: BigRational) -> Self {
        LexScalar { coords: vec![r] }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// Coordinate `t`, zero when absent.
    pub fn coord(&self, t: usize) -> BigRational {
        self.coords.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The standard (non-infinitesimal) part.
    pub fn base(&self) -> BigRational {
        self.coord(0)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn has_infinitesimals(&self) -> bool {
        self.coords.iter().skip(1).any(|c| !c.is_zero())
    }

    /// Sign of the first nonzero coordinate.
    pub fn signum(&self) -> Ordering {
        self.coords
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| if c.is_positive() { Ordering::Greater } else { Ordering::Less })
            .unwrap_or(Ordering::Equal)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    pub fn abs(&self) -> LexScalar {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, factor: i64) -> LexScalar {
        let f = BigRational::from_integer(BigInt::from(factor));
        LexScalar { coords: self.coords.iter().map(|c| c * &f).collect() }
    }

    fn zip_with(&self, other: &LexScalar, op: impl Fn(&BigRational, &BigRational) -> BigRational) -> LexScalar {
        let dim = self.dim().max(other.dim());
        LexScalar { coords: (0..dim).map(|t| op(&self.coord(t), &other.coord(t))).collect() }
    }
}

impl PartialEq for LexScalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LexScalar {}

impl PartialOrd for LexScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LexScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        let dim = self.dim().max(other.dim());
        (0..dim)
            .map(|t| self.coord(t).cmp(&other.coord(t)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl Add for &LexScalar {
    type Output = LexScalar;
    fn add(self, rhs: &LexScalar) -> LexScalar {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Add for LexScalar {
    type Output = LexScalar;
    fn add(self, rhs: LexScalar) -> LexScalar {
        &self + &rhs
    }
}

impl Sub for &LexScalar {
    type Output = LexScalar;
    fn sub(self, rhs: &LexScalar) -> LexScalar {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Sub for LexScalar {
    type Output = LexScalar;
    fn sub(self, rhs: LexScalar) -> LexScalar {
        &self - &rhs
    }
}

impl Neg for LexScalar {
    type Output = LexScalar;
    fn neg(self) -> LexScalar {
        LexScalar { coords: self.coords.into_iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for LexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base())?;
        for (t, c) in self.coords.iter().enumerate().skip(1) {
            if !c.is_zero() {
                write!(f, " {} {}ε{t}", if c.is_negative() { "-" } else { "+" }, c.abs())?;
            }
        }
        Ok(())
    }
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, SlopeError> {
    let trimmed = text.trim();
    let value = BigRational::from_str(trimmed).map_err(|_| SlopeError::BadRational(text.to_string()))?;
    Ok(value)
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// How a rational base datum is perturbed into a total order on boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeMode {
    /// Independent infinitesimals on `ξ_Ω` and every `ξ_k`: a general datum.
    Generic,
    /// Equal heights broken by larger row, then larger component.
    Row,
    /// Equal heights broken by smaller row, then smaller component.
    RowPrime,
    /// No perturbation; distinct boxes may tie.
    Plain,
}

impl SlopeMode {
    pub fn is_perturbed(self) -> bool {
        self != SlopeMode::Plain
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SlopeMode::Generic => "generic",
            SlopeMode::Row => "row",
            SlopeMode::RowPrime => "row_prime",
            SlopeMode::Plain => "plain",
        }
    }
}

impl FromStr for SlopeMode {
    type Err = SlopeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(SlopeMode::Generic),
            "row" => Ok(SlopeMode::Row),
            "row_prime" => Ok(SlopeMode::RowPrime),
            "plain" => Ok(SlopeMode::Plain),
            other => Err(SlopeError::BadMode(other.to_string())),
        }
    }
}

/// The rational data `(ξ_Ω, ξ_Ω̄, ξ_1, …, ξ_ℓ)` before perturbation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeBase {
    pub omega: BigRational,
    pub omega_bar: BigRational,
    pub xi: Vec<BigRational>,
}

impl SlopeBase {
    pub fn new(omega: BigRational, omega_bar: BigRational, xi: Vec<BigRational>) -> Self {
        SlopeBase { omega, omega_bar, xi }
    }

    /// Builds a base from integers, in the order `(ξ_Ω, ξ_Ω̄, ξ_1, …)`.
    pub fn from_ints(values: &[i64]) -> Self {
        let r = |v: i64| BigRational::from_integer(BigInt::from(v));
        SlopeBase {
            omega: r(values[0]),
            omega_bar: r(values[1]),
            xi: values[2..].iter().map(|&v| r(v)).collect(),
        }
    }

    pub fn components(&self) -> usize {
        self.xi.len()
    }

    fn validate(&self) -> Result<(), SlopeError> {
        if self.xi.is_empty() {
            return Err(SlopeError::NoComponents);
        }
        for v in std::iter::once(&self.omega).chain(std::iter::once(&self.omega_bar)).chain(&self.xi) {
            if !v.is_positive() {
                return Err(SlopeError::NonPositive(format_rational(v)));
            }
        }
        Ok(())
    }

    /// Strict alignment of the rational parts, returning the first bad pair.
    fn alignment_violation(&self) -> Option<(usize, usize)> {
        let width = &self.omega + &self.omega_bar;
        for a in 0..self.xi.len() {
            for b in a + 1..self.xi.len() {
                if (&self.xi[a] - &self.xi[b]).abs() >= width {
                    return Some((a + 1, b + 1));
                }
            }
        }
        None
    }
}

/// A slope datum `(ξ_Ω, ξ_Ω̄, ξ_1, …, ξ_ℓ)` with its perturbation mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeDatum {
    mode: SlopeMode,
    base: SlopeBase,
    omega: LexScalar,
    omega_bar: LexScalar,
    xi: Vec<LexScalar>,
}

fn unit(dim: usize, at: usize, value: i64) -> Vec<BigRational> {
    let mut coords = vec![BigRational::zero(); dim];
    coords[at] = BigRational::from_integer(BigInt::from(value));
    coords
}

type Perturbation = Box<dyn Fn(usize) -> Vec<BigRational>>;

fn lift(base: &BigRational, infinitesimal: Vec<BigRational>) -> LexScalar {
    let mut coords = infinitesimal;
    coords[0] = base.clone();
    LexScalar::new(coords)
}

impl SlopeDatum {
    /// Builds a datum in the given mode. Perturbed modes require a strictly
    /// aligned base so that the infinitesimals cannot decide alignment.
    pub fn build(mode: SlopeMode, base: SlopeBase) -> Result<Self, SlopeError> {
        base.validate()?;
        if mode.is_perturbed() {
            if let Some((a, b)) = base.alignment_violation() {
                return Err(SlopeError::NotStrictlyAligned { a, b });
            }
        }
        Ok(Self::assemble(mode, base))
    }

    /// Like [`SlopeDatum::build`] but accepts non-aligned bases in every mode.
    pub fn build_unaligned(mode: SlopeMode, base: SlopeBase) -> Result<Self, SlopeError> {
        base.validate()?;
        Ok(Self::assemble(mode, base))
    }

    fn assemble(mode: SlopeMode, base: SlopeBase) -> Self {
        let ell = base.components();
        // Infinitesimal layout per mode:
        //   generic:   ξ_Ω += ε1, ξ_k += ε(k+1)
        //   row:       ξ_Ω += ε1, ξ_k += k·ε2
        //   row_prime: ξ_Ω -= ε1, ξ_k -= k·ε2
        let (dim, omega_eps, xi_eps): (usize, i64, Perturbation) = match mode {
            SlopeMode::Plain => (1, 0, Box::new(|_| vec![BigRational::zero()])),
            SlopeMode::Generic => (ell + 2, 1, Box::new(move |k| unit(ell + 2, k + 1, 1))),
            SlopeMode::Row => (3, 1, Box::new(|k| unit(3, 2, k as i64))),
            SlopeMode::RowPrime => (3, -1, Box::new(|k| unit(3, 2, -(k as i64)))),
        };
        let omega = if dim > 1 {
            lift(&base.omega, unit(dim, 1, omega_eps))
        } else {
            LexScalar::from_rational(base.omega.clone())
        };
        let omega_bar = lift(&base.omega_bar, vec![BigRational::zero(); dim]);
        let xi = base.xi.iter().enumerate().map(|(idx, v)| lift(v, xi_eps(idx + 1))).collect();
        SlopeDatum { mode, base, omega, omega_bar, xi }
    }

    pub fn make_generic(base: SlopeBase) -> Result<Self, SlopeError> {
        Self::build(SlopeMode::Generic, base)
    }

    pub fn make_row(base: SlopeBase) -> Result<Self, SlopeError> {
        Self::build(SlopeMode::Row, base)
    }

    pub fn make_row_prime(base: SlopeBase) -> Result<Self, SlopeError> {
        Self::build(SlopeMode::RowPrime, base)
    }

    pub fn make_plain(base: SlopeBase) -> Result<Self, SlopeError> {
        Self::build(SlopeMode::Plain, base)
    }

    /// The same base re-perturbed in another mode.
    pub fn with_mode(&self, mode: SlopeMode) -> Result<Self, SlopeError> {
        Self::build(mode, self.base.clone())
    }

    pub fn mode(&self) -> SlopeMode {
        self.mode
    }

    pub fn base(&self) -> &SlopeBase {
        &self.base
    }

    pub fn omega(&self) -> &LexScalar {
        &self.omega
    }

    pub fn omega_bar(&self) -> &LexScalar {
        &self.omega_bar
    }

    /// `ξ_k` for 1-based `k`.
    pub fn xi(&self, k: usize) -> &LexScalar {
        &self.xi[k - 1]
    }

    pub fn components(&self) -> usize {
        self.xi.len()
    }

    /// `ξ_Ω + ξ_Ω̄`.
    pub fn width(&self) -> LexScalar {
        &self.omega + &self.omega_bar
    }

    pub fn max_xi(&self) -> LexScalar {
        self.xi.iter().max().cloned().expect("at least one component")
    }

    /// `h(b) = ξ_k + i·ξ_Ω + j·ξ_Ω̄`.
    pub fn height(&self, b: Cell) -> LexScalar {
        &(self.xi(b.k) + &self.omega.scale(b.i as i64)) + &self.omega_bar.scale(b.j as i64)
    }

    /// Height from the rational base only.
    pub fn base_height(&self, b: Cell) -> BigRational {
        &self.base.xi[b.k - 1]
            + &self.base.omega * BigInt::from(b.i)
            + &self.base.omega_bar * BigInt::from(b.j)
    }

    /// `|ξ_k - ξ_k'| < ξ_Ω + ξ_Ω̄` for every pair, compared lexicographically.
    ///
    /// Perturbed data are only ever built from strictly aligned bases, so for
    /// them this agrees with the base-level test.
    pub fn is_aligned(&self) -> bool {
        let width = self.width();
        self.xi
            .iter()
            .enumerate()
            .all(|(a, x)| self.xi[a + 1..].iter().all(|y| (x - y).abs() < width))
    }

    pub fn is_integral(&self) -> bool {
        let b = &self.base;
        b.omega.is_integer() && b.omega_bar.is_integer() && b.xi.iter().all(BigRational::is_integer)
    }

    /// Compares two boxes by height; distinct boxes of equal height give
    /// [`BoxOrder::Tie`], which only happens in plain mode.
    pub fn box_order(&self, a: Cell, b: Cell) -> BoxOrder {
        if a == b {
            return BoxOrder::Equal;
        }
        match self.height(a).cmp(&self.height(b)) {
            Ordering::Less => BoxOrder::Less,
            Ordering::Greater => BoxOrder::Greater,
            Ordering::Equal => BoxOrder::Tie,
        }
    }

    /// Total order on boxes; a tie between distinct boxes is an error.
    pub fn box_cmp(&self, a: Cell, b: Cell) -> Result<Ordering, SlopeError> {
        match self.box_order(a, b) {
            BoxOrder::Less => Ok(Ordering::Less),
            BoxOrder::Greater => Ok(Ordering::Greater),
            BoxOrder::Equal => Ok(Ordering::Equal),
            BoxOrder::Tie => Err(SlopeError::Tie(a, b)),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SlopeJson::from(self)).expect("slope serialization is infallible")
    }

    /// Parses the JSON encoding; perturbed modes demand strict alignment.
    pub fn from_json(text: &str) -> Result<Self, SlopeError> {
        let raw: SlopeJson = serde_json::from_str(text).map_err(|e| SlopeError::Json(e.to_string()))?;
        let (mode, base) = raw.into_parts()?;
        Self::build(mode, base)
    }

    /// Parses the JSON encoding without the alignment requirement.
    pub fn from_json_unaligned(text: &str) -> Result<Self, SlopeError> {
        let raw: SlopeJson = serde_json::from_str(text).map_err(|e| SlopeError::Json(e.to_string()))?;
        let (mode, base) = raw.into_parts()?;
        Self::build_unaligned(mode, base)
    }
}

/// Result of comparing two boxes by height.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxOrder {
    Less,
    Equal,
    Greater,
    Tie,
}

/// Wire form: `{"mode":…,"omega":"p/q","omega_bar":"p/q","xi":["p/q",…]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeJson {
    pub mode: String,
    pub omega: String,
    pub omega_bar: String,
    pub xi: Vec<String>,
}

impl SlopeJson {
    fn into_parts(self) -> Result<(SlopeMode, SlopeBase), SlopeError> {
        let mode = self.mode.parse()?;
        let base = SlopeBase {
            omega: parse_rational(&self.omega)?,
            omega_bar: parse_rational(&self.omega_bar)?,
            xi: self.xi.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?,
        };
        Ok((mode, base))
    }
}

impl From<&SlopeDatum> for SlopeJson {
    fn from(d: &SlopeDatum) -> Self {
        SlopeJson {
            mode: d.mode.as_str().to_string(),
            omega: format_rational(&d.base.omega),
            omega_bar: format_rational(&d.base.omega_bar),
            xi: d.base.xi.iter().map(format_rational).collect(),
        }
    }
}

pub(crate) fn rational_to_i64(r: &BigRational) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    i64::try_from(r.numer()).ok()
}
