//! Potential families and their validation.
//!
//! A [`PotentialSpec`] is a declarative request; [`validate_spec`] turns it
//! into a [`ValidatedPotential`] that carries the base operator, the
//! effective potential expanded in powers of that base, the matrix kinds the
//! family supports and its free initial data.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrices::MatrixKind;
use crate::ordering::BaseKind;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `V = Σ a_l x^l` with only even powers.
    EvenPolynomial,
    /// `V = -N/r` on the half-line, plus the centrifugal term.
    Coulomb,
    /// `V = g cosh x`.
    Toda,
    /// `V = g cos θ` on the circle.
    Trig,
    /// `V = -a e^{-r}/r` on the half-line, plus the centrifugal term.
    Yukawa,
    /// `g |x|^ν`. Accepted by the parser only so it can be rejected.
    AbsPower,
    /// Square, infinite or delta wells. Accepted by the parser only so it
    /// can be rejected.
    PiecewiseWell,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::EvenPolynomial => "even-polynomial",
            Family::Coulomb => "coulomb",
            Family::Toda => "toda",
            Family::Trig => "trig",
            Family::Yukawa => "yukawa",
            Family::AbsPower => "abs-power",
            Family::PiecewiseWell => "piecewise-well",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = PotentialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "even-polynomial" => Family::EvenPolynomial,
            "coulomb" => Family::Coulomb,
            "toda" => Family::Toda,
            "trig" => Family::Trig,
            "yukawa" => Family::Yukawa,
            "abs-power" => Family::AbsPower,
            "piecewise-well" => Family::PiecewiseWell,
            other => return Err(PotentialError::UnknownFamily(other.to_string())),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("non-smooth potential: {0}")]
    NonSmoothPotential(String),
    #[error("potential is not confining: {0}")]
    NonConfining(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("initial data for the {0} family are unknown; scanning is disabled")]
    UnknownInitialData(Family),
    #[error("unknown potential family `{0}`")]
    UnknownFamily(String),
    #[error("unknown initial-data name `{0}`")]
    UnknownInitialName(String),
}

/// Name of one free initial datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InitialName {
    /// Trial energy `E`.
    Energy,
    /// `⟨x^k⟩` for even `k`.
    EvenMoment(u32),
    /// `⟨e^x⟩`.
    ExpMoment,
    /// `⟨e^{iθ}⟩`, taken real.
    TrigMoment,
}

impl InitialName {
    /// Index of the moment in the one-variable table, `None` for the energy.
    pub fn moment_index(self) -> Option<i32> {
        match self {
            InitialName::Energy => None,
            InitialName::EvenMoment(k) => Some(k as i32),
            InitialName::ExpMoment | InitialName::TrigMoment => Some(1),
        }
    }
}

impl fmt::Display for InitialName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialName::Energy => f.write_str("E"),
            InitialName::EvenMoment(k) => write!(f, "x{k}"),
            InitialName::ExpMoment => f.write_str("ex"),
            InitialName::TrigMoment => f.write_str("eitheta"),
        }
    }
}

impl FromStr for InitialName {
    type Err = PotentialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" => return Ok(InitialName::Energy),
            "ex" => return Ok(InitialName::ExpMoment),
            "eitheta" => return Ok(InitialName::TrigMoment),
            _ => {}
        }
        s.strip_prefix('x')
            .and_then(|k| k.parse::<u32>().ok())
            .filter(|k| *k >= 2 && k % 2 == 0)
            .map(InitialName::EvenMoment)
            .ok_or_else(|| PotentialError::UnknownInitialName(s.to_string()))
    }
}

impl Serialize for InitialName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InitialName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Declarative potential request.
///
/// `coeffs` layout per family:
/// * `EvenPolynomial`: dense `a_0, a_1, …, a_d` for `V = Σ a_l x^l`
/// * `Coulomb`: `[N]`; `Yukawa`: `[a]`; `Toda`, `Trig`: `[g]`
/// * `AbsPower`: `[g, ν]`; `PiecewiseWell`: free-form
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec<T> {
    pub family: Family,
    pub coeffs: Vec<T>,
    pub angular_l: Option<i64>,
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(family: Family, coeffs: Vec<T>) -> Self {
        Self {
            family,
            coeffs,
            angular_l: None,
        }
    }

    pub fn even_polynomial(coeffs: Vec<T>) -> Self {
        Self::new(Family::EvenPolynomial, coeffs)
    }

    /// `p² + x²`.
    pub fn harmonic() -> Self {
        Self::even_polynomial(vec![T::zero(), T::zero(), T::one()])
    }

    /// `p² + x² + g x⁴`.
    pub fn quartic(g: T) -> Self {
        Self::even_polynomial(vec![T::zero(), T::zero(), T::one(), T::zero(), g])
    }

    pub fn coulomb(n: T, l: i64) -> Self {
        Self {
            family: Family::Coulomb,
            coeffs: vec![n],
            angular_l: Some(l),
        }
    }

    pub fn toda(g: T) -> Self {
        Self::new(Family::Toda, vec![g])
    }

    pub fn trig(g: T) -> Self {
        Self::new(Family::Trig, vec![g])
    }

    pub fn yukawa(a: T, l: i64) -> Self {
        Self {
            family: Family::Yukawa,
            coeffs: vec![a],
            angular_l: Some(l),
        }
    }

    pub fn abs_power(g: T, nu: T) -> Self {
        Self::new(Family::AbsPower, vec![g, nu])
    }
}

/// A validated potential. Construct with [`validate_spec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedPotential<T> {
    spec: PotentialSpec<T>,
    base: BaseKind,
    terms: Vec<(i32, T)>,
    degree: i32,
    free_initial: Vec<InitialName>,
}

impl<T: Real> ValidatedPotential<T> {
    pub fn spec(&self) -> &PotentialSpec<T> {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    /// Operator base the recursions run over.
    pub fn base_kind(&self) -> BaseKind {
        self.base
    }

    /// Effective potential as `Σ a_l b^l`, centrifugal term included for
    /// radial families. Empty for Yukawa, whose potential mixes both bases.
    pub fn terms(&self) -> &[(i32, T)] {
        &self.terms
    }

    /// Largest positive base power in [`Self::terms`].
    pub fn degree(&self) -> i32 {
        self.degree
    }

    /// Free initial data in scan order.
    pub fn free_initial(&self) -> &[InitialName] {
        &self.free_initial
    }

    pub fn angular_l(&self) -> i64 {
        self.spec.angular_l.unwrap_or(0)
    }

    /// `l(l+1)` for radial families, zero otherwise.
    pub fn centrifugal(&self) -> T {
        let l = self.angular_l();
        T::from_int(i128::from(l) * i128::from(l + 1))
    }

    /// First coefficient (`N`, `g` or `a` for the single-parameter families).
    pub fn strength(&self) -> T {
        self.spec.coeffs.first().copied().unwrap_or_else(T::zero)
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.spec.family, Family::Coulomb | Family::Yukawa)
    }

    pub fn matrix_kinds(&self) -> &'static [MatrixKind] {
        match self.spec.family {
            Family::EvenPolynomial => &[MatrixKind::HankelX, MatrixKind::KronXP],
            Family::Coulomb => &[MatrixKind::HankelX],
            Family::Toda => &[MatrixKind::HankelExp, MatrixKind::KronExpP],
            Family::Trig => &[MatrixKind::ToeplitzTrig, MatrixKind::KronTrigP],
            Family::Yukawa => &[MatrixKind::MixedXExp],
            Family::AbsPower | Family::PiecewiseWell => &[],
        }
    }

    pub fn scan_enabled(&self) -> bool {
        self.spec.family != Family::Yukawa
    }

    /// The potential itself at a point of its domain (without the
    /// centrifugal term), for the finite-difference oracle.
    pub fn value_at(&self, x: T) -> T {
        match self.spec.family {
            Family::EvenPolynomial => self
                .spec
                .coeffs
                .iter()
                .rev()
                .fold(T::zero(), |acc, &a| acc * x + a),
            Family::Coulomb => -self.strength() / x,
            Family::Toda => self.strength() * x.cosh(),
            Family::Trig => self.strength() * x.cos(),
            Family::Yukawa => -self.strength() * (-x).exp() / x,
            Family::AbsPower | Family::PiecewiseWell => T::nan(),
        }
    }
}

fn not_closed(what: &str) -> PotentialError {
    PotentialError::NonSmoothPotential(format!(
        "{what}: the recursion for this potential is not closed, so its moments \
         cannot be generated from finitely many initial data; the potential must \
         be continuous and smooth"
    ))
}

fn single_coeff<T: Real>(spec: &PotentialSpec<T>, name: &str) -> Result<T, PotentialError> {
    match spec.coeffs.as_slice() {
        [c] if c.is_finite() => Ok(*c),
        [c] => Err(PotentialError::BadParameter(format!("{name} = {c} is not finite"))),
        other => Err(PotentialError::BadParameter(format!(
            "{} expects exactly one coefficient ({name}), got {}",
            spec.family,
            other.len()
        ))),
    }
}

fn radial_l<T: Real>(spec: &PotentialSpec<T>) -> Result<i64, PotentialError> {
    match spec.angular_l {
        Some(l) if l < 0 => Err(PotentialError::BadParameter(format!(
            "angular momentum l = {l} is negative"
        ))),
        Some(l) if l > 1000 => Err(PotentialError::BadParameter(format!(
            "angular momentum l = {l} is out of range"
        ))),
        Some(l) => Ok(l),
        None => Ok(0),
    }
}

fn no_angular<T: Real>(spec: &PotentialSpec<T>) -> Result<(), PotentialError> {
    match spec.angular_l {
        Some(l) => Err(PotentialError::BadParameter(format!(
            "angular momentum l = {l} given for the non-radial {} family",
            spec.family
        ))),
        None => Ok(()),
    }
}

pub fn validate_spec<T: Real>(spec: PotentialSpec<T>) -> Result<ValidatedPotential<T>, PotentialError> {
    let half = T::lit(0.5);
    let (base, terms, degree, free_initial) = match spec.family {
        Family::AbsPower => return Err(not_closed("g|x|^ν")),
        Family::PiecewiseWell => return Err(not_closed("piecewise well")),
        Family::EvenPolynomial => {
            no_angular(&spec)?;
            if let Some(c) = spec.coeffs.iter().find(|c| !c.is_finite()) {
                return Err(PotentialError::BadParameter(format!(
                    "polynomial coefficient {c} is not finite"
                )));
            }
            let d = match spec.coeffs.iter().rposition(|c| !c.is_zero()) {
                Some(d) if d >= 2 => d,
                _ => {
                    return Err(PotentialError::NonConfining(
                        "polynomial has no positive even leading power".to_string(),
                    ))
                }
            };
            if let Some(odd) = (1..=d).step_by(2).find(|&l| !spec.coeffs[l].is_zero()) {
                return Err(not_closed(&format!(
                    "odd power x^{odd} would have to become |x|^{odd} for a bound \
                     problem"
                )));
            }
            if spec.coeffs[d] <= T::zero() {
                return Err(PotentialError::NonConfining(format!(
                    "leading coefficient of x^{d} is {}",
                    spec.coeffs[d]
                )));
            }
            let terms = spec
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(l, &c)| (l as i32, c))
                .collect();
            let mut free = vec![InitialName::Energy];
            free.extend((2..d as u32).step_by(2).map(InitialName::EvenMoment));
            (BaseKind::Power, terms, d as i32, free)
        }
        Family::Coulomb => {
            let n = single_coeff(&spec, "N")?;
            if n <= T::zero() {
                return Err(PotentialError::BadParameter(format!("N = {n} must be positive")));
            }
            let l = radial_l(&spec)?;
            let big_l = T::from_int(i128::from(l) * i128::from(l + 1));
            let mut terms = Vec::new();
            if !big_l.is_zero() {
                terms.push((-2, big_l));
            }
            terms.push((-1, -n));
            (BaseKind::Power, terms, 0, vec![InitialName::Energy])
        }
        Family::Toda => {
            no_angular(&spec)?;
            let g = single_coeff(&spec, "g")?;
            if g.is_zero() {
                return Err(PotentialError::BadParameter("g = 0 leaves no bound states".into()));
            }
            if g < T::zero() {
                return Err(PotentialError::NonConfining(format!("g cosh x with g = {g}")));
            }
            (
                BaseKind::Exp,
                vec![(-1, g * half), (1, g * half)],
                1,
                vec![InitialName::Energy, InitialName::ExpMoment],
            )
        }
        Family::Trig => {
            no_angular(&spec)?;
            let g = single_coeff(&spec, "g")?;
            if g.is_zero() {
                return Err(PotentialError::BadParameter(
                    "g = 0 is the free rotor, which has no free moment to scan".into(),
                ));
            }
            (
                BaseKind::TrigExp,
                vec![(-1, g * half), (1, g * half)],
                1,
                vec![InitialName::Energy, InitialName::TrigMoment],
            )
        }
        Family::Yukawa => {
            let a = single_coeff(&spec, "a")?;
            if a <= T::zero() {
                return Err(PotentialError::BadParameter(format!("a = {a} must be positive")));
            }
            radial_l(&spec)?;
            (BaseKind::ExpPower, Vec::new(), 0, Vec::new())
        }
    };
    Ok(ValidatedPotential {
        spec,
        base,
        terms,
        degree,
        free_initial,
    })
}

/// Scan dimension with its default search range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemaEntry<T> {
    pub name: InitialName,
    pub lo: T,
    pub hi: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialSchema<T> {
    pub entries: Vec<SchemaEntry<T>>,
    pub scan_enabled: bool,
}

impl<T> InitialSchema<T> {
    /// Fails with `UnknownInitialData` for families that cannot be scanned.
    pub fn require_scannable(&self, family: Family) -> Result<(), PotentialError> {
        if self.scan_enabled {
            Ok(())
        } else {
            Err(PotentialError::UnknownInitialData(family))
        }
    }
}

/// Scan dimensions and default ranges.
///
/// Ranges are heuristics:
/// * even polynomial: `E ∈ [0, 10]` (`[-10, 10]` if any coefficient is
///   negative), each `⟨x^k⟩ ∈ [0, 5]`
/// * Coulomb: `E ∈ [-N², -0.01 N²]`
/// * Toda: `E ∈ [0.9 g, 10 g]`, `⟨e^x⟩ ∈ [1, 10]`
/// * trig: `E ∈ [-|g|, |g| + 4]`, `⟨e^{iθ}⟩ ∈ [-1, 1]`
/// * Yukawa: no entries, scan disabled
pub fn free_initial_schema<T: Real>(potential: &ValidatedPotential<T>) -> InitialSchema<T> {
    let g = potential.strength();
    let range = |name: InitialName| -> (T, T) {
        match (potential.family(), name) {
            (Family::EvenPolynomial, InitialName::Energy) => {
                if potential.spec.coeffs.iter().any(|c| *c < T::zero()) {
                    (T::lit(-10.0), T::lit(10.0))
                } else {
                    (T::zero(), T::lit(10.0))
                }
            }
            (Family::Coulomb, InitialName::Energy) => (-g * g, T::lit(-0.01) * g * g),
            (Family::Toda, InitialName::Energy) => (T::lit(0.9) * g, T::lit(10.0) * g),
            (Family::Trig, InitialName::Energy) => (-g.abs(), g.abs() + T::lit(4.0)),
            (_, InitialName::EvenMoment(_)) => (T::zero(), T::lit(5.0)),
            (_, InitialName::ExpMoment) => (T::one(), T::lit(10.0)),
            (_, InitialName::TrigMoment) => (-T::one(), T::one()),
            (_, InitialName::Energy) => (T::lit(-10.0), T::lit(10.0)),
        }
    };
    InitialSchema {
        entries: potential
            .free_initial
            .iter()
            .map(|&name| {
                let (lo, hi) = range(name);
                SchemaEntry { name, lo, hi }
            })
            .collect(),
        scan_enabled: potential.scan_enabled(),
    }
}
