//! Exact normal ordering of products of a base operator and the momentum.
//!
//! Canonical form is base-then-momentum: `b^m p^n` with `b` one of `x`,
//! `e^x` or `e^{iθ}`. Coefficients are Gaussian integers held in `i128`,
//! with every multiplication and addition overflow-checked, so the identities
//! stay exact and rounding enters only when a moment is evaluated.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{cx_exact, Cx, Real};

/// Gaussian-integer coefficient of a canonical term.
pub type ExactCoeff = Complex<i128>;

/// Base operator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    /// `x^m` (or `r^m` on the half-line); `m` may be negative for radial potentials.
    Power,
    /// `e^{mx}`.
    Exp,
    /// `e^{imθ}` on the circle.
    TrigExp,
    /// `e^{mr} r^n`: the coupled table used for Yukawa. Not an operator base;
    /// it only tags moment tables.
    ExpPower,
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BaseKind::Power => "power",
            BaseKind::Exp => "exp",
            BaseKind::TrigExp => "trig-exp",
            BaseKind::ExpPower => "exp-power",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderingError {
    #[error("exact coefficient overflow while expanding {0}")]
    Overflow(String),
    #[error("operator base {0} has no momentum ordering rule")]
    UnsupportedBase(BaseKind),
    #[error("cannot combine operators over different bases ({0} and {1})")]
    MixedBases(BaseKind, BaseKind),
}

/// One canonical term `coeff · b^base_power p^p_power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalTerm {
    pub coeff: ExactCoeff,
    pub base_power: i32,
    pub p_power: u32,
}

/// Sum of canonical terms over one base. Equal monomials are merged and
/// zero coefficients dropped on insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorPolynomial {
    base: BaseKind,
    terms: BTreeMap<(i32, u32), ExactCoeff>,
}

/// Exponent of an exponential base: `e^{ax}` with `a = m` ([`ExpShift::Real`])
/// or `a = i·m` ([`ExpShift::Imaginary`], i.e. `e^{imθ}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpShift {
    Real(i32),
    Imaginary(i32),
}

fn overflow(what: &str) -> OrderingError {
    OrderingError::Overflow(what.to_string())
}

fn cmul(a: ExactCoeff, b: ExactCoeff) -> Option<ExactCoeff> {
    let re = a.re.checked_mul(b.re)?.checked_sub(a.im.checked_mul(b.im)?)?;
    let im = a.re.checked_mul(b.im)?.checked_add(a.im.checked_mul(b.re)?)?;
    Some(Complex::new(re, im))
}

fn cadd(a: ExactCoeff, b: ExactCoeff) -> Option<ExactCoeff> {
    Some(Complex::new(a.re.checked_add(b.re)?, a.im.checked_add(b.im)?))
}

fn cpow(base: ExactCoeff, k: u32) -> Option<ExactCoeff> {
    let mut acc = Complex::new(1, 0);
    for _ in 0..k {
        acc = cmul(acc, base)?;
    }
    Some(acc)
}

fn binomial(n: u32, k: u32) -> Option<i128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc.checked_mul(i128::from(n - j))? / i128::from(j + 1);
    }
    Some(acc)
}

/// `m (m-1) ... (m-k+1)`, valid for negative `m` as well.
fn falling(m: i32, k: u32) -> Option<i128> {
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc.checked_mul(i128::from(m) - i128::from(j))?;
    }
    Some(acc)
}

const MINUS_I: ExactCoeff = Complex { re: 0, im: -1 };

impl OperatorPolynomial {
    pub fn zero(base: BaseKind) -> Self {
        Self {
            base,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(base: BaseKind, coeff: ExactCoeff, base_power: i32, p_power: u32) -> Self {
        let mut out = Self::zero(base);
        // a fresh single term cannot overflow
        let _ = out.add_term(coeff, base_power, p_power);
        out
    }

    pub fn base(&self) -> BaseKind {
        self.base
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `b^base_power p^p_power` (zero when absent).
    pub fn coeff(&self, base_power: i32, p_power: u32) -> ExactCoeff {
        self.terms
            .get(&(base_power, p_power))
            .copied()
            .unwrap_or_else(|| Complex::new(0, 0))
    }

    pub fn terms(&self) -> impl Iterator<Item = CanonicalTerm> + '_ {
        self.terms.iter().map(|(&(m, n), &c)| CanonicalTerm {
            coeff: c,
            base_power: m,
            p_power: n,
        })
    }

    pub fn add_term(
        &mut self,
        coeff: ExactCoeff,
        base_power: i32,
        p_power: u32,
    ) -> Result<(), OrderingError> {
        if coeff == Complex::new(0, 0) {
            return Ok(());
        }
        let key = (base_power, p_power);
        let merged = match self.terms.get(&key) {
            Some(&old) => cadd(old, coeff).ok_or_else(|| overflow("term merge"))?,
            None => coeff,
        };
        if merged == Complex::new(0, 0) {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, merged);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, OrderingError> {
        self.check_base(other)?;
        let mut out = self.clone();
        for t in other.terms() {
            out.add_term(t.coeff, t.base_power, t.p_power)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, OrderingError> {
        self.add(&other.scale(Complex::new(-1, 0))?)
    }

    pub fn scale(&self, c: ExactCoeff) -> Result<Self, OrderingError> {
        let mut out = Self::zero(self.base);
        for t in self.terms() {
            let v = cmul(t.coeff, c).ok_or_else(|| overflow("scaling"))?;
            out.add_term(v, t.base_power, t.p_power)?;
        }
        Ok(out)
    }

    /// Right-multiplies every term by `p^k`.
    pub fn times_p(&self, k: u32) -> Self {
        Self {
            base: self.base,
            terms: self
                .terms
                .iter()
                .map(|(&(m, n), &c)| ((m, n + k), c))
                .collect(),
        }
    }

    /// Left-multiplies every term by `b^k`; bases commute among themselves.
    pub fn times_base(&self, k: i32) -> Self {
        Self {
            base: self.base,
            terms: self
                .terms
                .iter()
                .map(|(&(m, n), &c)| ((m + k, n), c))
                .collect(),
        }
    }

    /// Operator product, re-canonicalized.
    pub fn mul(&self, other: &Self) -> Result<Self, OrderingError> {
        self.check_base(other)?;
        let mut out = Self::zero(self.base);
        for a in self.terms() {
            for b in other.terms() {
                // b^{m1} p^{n1} b^{m2} p^{n2} = b^{m1} (p^{n1} b^{m2}) p^{n2}
                let moved = reorder_p_base(a.p_power, self.base, b.base_power)?;
                let c = cmul(a.coeff, b.coeff).ok_or_else(|| overflow("product"))?;
                for t in moved.terms() {
                    let v = cmul(c, t.coeff).ok_or_else(|| overflow("product"))?;
                    out.add_term(v, a.base_power + t.base_power, t.p_power + b.p_power)?;
                }
            }
        }
        Ok(out)
    }

    /// Hermitian adjoint, re-canonicalized. `x` and `e^x` are Hermitian;
    /// `(e^{imθ})† = e^{-imθ}`.
    pub fn adjoint(&self) -> Result<Self, OrderingError> {
        let mut out = Self::zero(self.base);
        for t in self.terms() {
            let dagger_power = match self.base {
                BaseKind::TrigExp => -t.base_power,
                _ => t.base_power,
            };
            let moved = reorder_p_base(t.p_power, self.base, dagger_power)?;
            let c = t.coeff.conj();
            for u in moved.terms() {
                let v = cmul(c, u.coeff).ok_or_else(|| overflow("adjoint"))?;
                out.add_term(v, u.base_power, u.p_power)?;
            }
        }
        Ok(out)
    }

    /// Evaluates the expectation of the polynomial from canonical moments.
    /// Returns `None` when `lookup` lacks a required moment.
    pub fn evaluate<T: Real>(&self, lookup: impl Fn(i32, u32) -> Option<Cx<T>>) -> Option<Cx<T>> {
        let mut acc = Cx::new(T::zero(), T::zero());
        for t in self.terms() {
            acc += cx_exact::<T>(t.coeff) * lookup(t.base_power, t.p_power)?;
        }
        Some(acc)
    }

    fn check_base(&self, other: &Self) -> Result<(), OrderingError> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(OrderingError::MixedBases(self.base, other.base))
        }
    }
}

/// Moves `p^n` to the right of `b^m`: returns `p^n b^m` in canonical form.
///
/// * `Power`: `Σ_k C(n,k) (-i)^k m(m-1)..(m-k+1) x^{m-k} p^{n-k}`; for
///   non-negative `m` the falling factorial vanishes once `k > m`.
/// * `Exp`: `e^{mx} (p - i m)^n`.
/// * `TrigExp`: `e^{imθ} (p + m)^n`.
pub fn reorder_p_base(n: u32, base: BaseKind, m: i32) -> Result<OperatorPolynomial, OrderingError> {
    let mut out = OperatorPolynomial::zero(base);
    for k in 0..=n {
        let binom = binomial(n, k).ok_or_else(|| overflow("binomial"))?;
        let (factor, power) = match base {
            BaseKind::Power => {
                let ff = falling(m, k).ok_or_else(|| overflow("falling factorial"))?;
                let phase = cpow(MINUS_I, k).ok_or_else(|| overflow("phase"))?;
                (
                    cmul(phase, Complex::new(ff, 0)).ok_or_else(|| overflow("p^n x^m"))?,
                    m - k as i32,
                )
            }
            BaseKind::Exp => (
                cpow(Complex::new(0, -i128::from(m)), k).ok_or_else(|| overflow("p^n e^{mx}"))?,
                m,
            ),
            BaseKind::TrigExp => (
                cpow(Complex::new(i128::from(m), 0), k).ok_or_else(|| overflow("p^n e^{imθ}"))?,
                m,
            ),
            BaseKind::ExpPower => return Err(OrderingError::UnsupportedBase(base)),
        };
        let c = cmul(factor, Complex::new(binom, 0)).ok_or_else(|| overflow("binomial term"))?;
        out.add_term(c, power, n - k)?;
    }
    Ok(out)
}

/// `[p^n, b^m]` in canonical form.
pub fn commutator_p_base(n: u32, base: BaseKind, m: i32) -> Result<OperatorPolynomial, OrderingError> {
    let mut out = reorder_p_base(n, base, m)?;
    out.add_term(Complex::new(-1, 0), m, n)?;
    Ok(out)
}

/// `[p^n, x^m]`; empty when `n = 0` or `m = 0`.
///
/// The sum runs over `l = max{0, n-m} .. n-1` in the `x^{m-n+l} p^l`
/// labelling. Negative `m` (radial `r^{-1}`, `r^{-2}`) is accepted and
/// yields the full `l = 0 .. n-1` sum.
pub fn commutator_pn_xm(n: u32, m: i32) -> Result<OperatorPolynomial, OrderingError> {
    commutator_p_base(n, BaseKind::Power, m)
}

/// `p^a x^m p^c = x^m p^{a+c} + [p^a, x^m] p^c`.
pub fn canonicalize_p_x_p(a: u32, m: i32, c: u32) -> Result<OperatorPolynomial, OrderingError> {
    canonicalize_p_base_p(a, BaseKind::Power, m, c)
}

/// `p^a b^m p^c` in canonical form for any operator base.
pub fn canonicalize_p_base_p(
    a: u32,
    base: BaseKind,
    m: i32,
    c: u32,
) -> Result<OperatorPolynomial, OrderingError> {
    Ok(reorder_p_base(a, base, m)?.times_p(c))
}

/// `p^n e^{ax} = e^{ax} (p - i a)^n`, expanded binomially.
pub fn translate_p_through_exp(n: u32, shift: ExpShift) -> Result<OperatorPolynomial, OrderingError> {
    match shift {
        ExpShift::Real(m) => reorder_p_base(n, BaseKind::Exp, m),
        ExpShift::Imaginary(m) => reorder_p_base(n, BaseKind::TrigExp, m),
    }
}
