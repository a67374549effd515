//! Moment generation from the bootstrap equations `⟨[H,O]⟩ = 0` and
//! `⟨HO⟩ = E⟨O⟩`, and residual evaluation of those equations on arbitrary
//! moment tables.
//!
//! One-variable tables come from the identity, valid for any smooth `f`,
//!
//! ```text
//! ⟨f'''⟩ + 4E⟨f'⟩ - 4⟨f' V⟩ - 2⟨f V'⟩ = 0
//! ```
//!
//! instantiated with `f = x^m`, `e^{mx}` or `e^{imθ}`. Two-variable tables
//! come from both equations with `O = b^m p^n`, reduced to canonical form by
//! [`crate::ordering`].

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ordering::{commutator_p_base, reorder_p_base, BaseKind, OrderingError};
use crate::potentials::{Family, InitialName, ValidatedPotential};
use crate::scalar::{cx, cx_exact, cx_real, Cx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecursionError {
    #[error("moment {index} diverged (|value| = {magnitude:e})")]
    Overflow { index: String, magnitude: f64 },
    #[error("missing initial data: {0}")]
    MissingInitial(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("incomplete moment table: {0}")]
    IncompleteTable(String),
    #[error("recursion is degenerate at {0}: the unknown moment has a zero coefficient")]
    DegenerateRecursion(String),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}

/// Trial energy plus the family's extra free moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData<T> {
    pub energy: T,
    pub extra: BTreeMap<InitialName, T>,
}

impl<T: Real> InitialData<T> {
    pub fn new(energy: T) -> Self {
        Self {
            energy,
            extra: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: InitialName, value: T) -> Self {
        self.extra.insert(name, value);
        self
    }

    /// Builds initial data from scan coordinates given in schema order.
    pub fn from_coords(names: &[InitialName], coords: &[T]) -> Self {
        let mut out = Self::new(T::nan());
        for (&name, &v) in names.iter().zip(coords) {
            if name == InitialName::Energy {
                out.energy = v;
            } else {
                out.extra.insert(name, v);
            }
        }
        out
    }
}

/// Moments over one family's operator base.
///
/// `one_var[m]` is `⟨b^m⟩`, `two_var[(m, n)]` is `⟨b^m p^n⟩` and, for the
/// `ExpPower` base, `mixed[(m, n)]` is `⟨e^{mr} r^n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable<T> {
    pub base_kind: BaseKind,
    pub one_var: BTreeMap<i32, Cx<T>>,
    pub two_var: BTreeMap<(i32, u32), Cx<T>>,
    pub mixed: BTreeMap<(i32, i32), Cx<T>>,
}

impl<T: Real> MomentTable<T> {
    pub fn new(base_kind: BaseKind) -> Self {
        Self {
            base_kind,
            one_var: BTreeMap::new(),
            two_var: BTreeMap::new(),
            mixed: BTreeMap::new(),
        }
    }

    pub fn one(&self, m: i32) -> Option<Cx<T>> {
        self.one_var.get(&m).copied()
    }

    pub fn two(&self, m: i32, n: u32) -> Option<Cx<T>> {
        self.two_var.get(&(m, n)).copied()
    }

    pub fn mixed(&self, m: i32, n: i32) -> Option<Cx<T>> {
        self.mixed.get(&(m, n)).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.one_var.is_empty() && self.two_var.is_empty() && self.mixed.is_empty()
    }
}

/// One instantiated bootstrap equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquationInstance {
    OneVar { m: i32 },
    TwoVarEnergy { m: i32, n: u32 },
    TwoVarCommutator { m: i32, n: u32 },
    Mixed { m: i32, n: i32 },
}

impl fmt::Display for EquationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquationInstance::OneVar { m } => write!(f, "one-var m={m}"),
            EquationInstance::TwoVarEnergy { m, n } => write!(f, "energy m={m} n={n}"),
            EquationInstance::TwoVarCommutator { m, n } => write!(f, "commutator m={m} n={n}"),
            EquationInstance::Mixed { m, n } => write!(f, "mixed m={m} n={n}"),
        }
    }
}

impl Serialize for EquationInstance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Residual of one equation instance: `value` is LHS − RHS, `scale` the
/// largest `|coefficient · moment|` among its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual<T> {
    pub value: Cx<T>,
    pub scale: T,
}

impl<T: Real> Residual<T> {
    pub fn abs(&self) -> T {
        self.value.norm()
    }

    /// `|value| / max(1, scale)`.
    pub fn normalized(&self) -> T {
        self.abs() / self.scale.max(T::one())
    }
}

impl<T: Real> Serialize for Residual<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Residual", 3)?;
        st.serialize_field("value", &[self.value.re.to_f64_lossy(), self.value.im.to_f64_lossy()])?;
        st.serialize_field("scale", &self.scale.to_f64_lossy())?;
        st.serialize_field("normalized", &self.normalized().to_f64_lossy())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport<T: Real> {
    pub entries: BTreeMap<EquationInstance, Residual<T>>,
    /// Instances whose stencil is only partly covered by the table.
    pub skipped: Vec<EquationInstance>,
}

impl<T: Real> ResidualReport<T> {
    pub fn max_abs(&self) -> T {
        self.entries.values().map(Residual::abs).fold(T::zero(), T::max)
    }

    pub fn max_normalized(&self) -> T {
        self.entries
            .values()
            .map(Residual::normalized)
            .fold(T::zero(), T::max)
    }
}

type Stencil<K, T> = Vec<(K, Cx<T>)>;

fn merged<K: Ord + Copy, T: Real>(terms: impl IntoIterator<Item = (K, Cx<T>)>) -> Stencil<K, T> {
    let mut map: BTreeMap<K, Cx<T>> = BTreeMap::new();
    for (k, c) in terms {
        let e = map.entry(k).or_insert_with(|| cx(T::zero(), T::zero()));
        *e += c;
    }
    map.into_iter()
        .filter(|(_, c)| !(c.re.is_zero() && c.im.is_zero()))
        .collect()
}

fn int<T: Real>(x: i64) -> T {
    T::from_int(i128::from(x))
}

/// Stencil of the one-variable identity at instance `m`.
fn one_var_stencil<T: Real>(pot: &ValidatedPotential<T>, e: T, m: i32) -> Stencil<i32, T> {
    let mt: T = int(i64::from(m));
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let mut terms = Vec::new();
    match pot.base_kind() {
        BaseKind::Power => {
            let mi = i64::from(m);
            terms.push((m - 3, cx_real(int(mi * (mi - 1) * (mi - 2)))));
            terms.push((m - 1, cx_real(four * mt * e)));
            for &(l, a) in pot.terms() {
                let lt: T = int(i64::from(l));
                terms.push((m + l - 1, cx_real(-a * (four * mt + two * lt))));
            }
        }
        BaseKind::Exp | BaseKind::TrigExp => {
            let cube = mt * mt * mt;
            let own = if pot.base_kind() == BaseKind::Exp {
                four * mt * e + cube
            } else {
                four * mt * e - cube
            };
            terms.push((m, cx_real(own)));
            for &(l, a) in pot.terms() {
                let lt: T = int(i64::from(l));
                terms.push((m + l, cx_real(-a * (four * mt + two * lt))));
            }
        }
        BaseKind::ExpPower => {}
    }
    merged(terms)
}

/// `⟨[H, b^m p^n]⟩ = 0` as a stencil over `(base power, p power)`.
fn commutator_stencil<T: Real>(
    pot: &ValidatedPotential<T>,
    m: i32,
    n: u32,
) -> Result<Stencil<(i32, u32), T>, RecursionError> {
    let base = pot.base_kind();
    let mut terms = Vec::new();
    for t in commutator_p_base(2, base, m)?.times_p(n).terms() {
        terms.push(((t.base_power, t.p_power), cx_exact(t.coeff)));
    }
    // [b^l, b^m p^n] = -b^m [p^n, b^l]
    for &(l, a) in pot.terms() {
        for t in commutator_p_base(n, base, l)?.times_base(m).terms() {
            terms.push(((t.base_power, t.p_power), cx_exact::<T>(t.coeff) * (-a)));
        }
    }
    Ok(merged(terms))
}

/// `⟨H b^m p^n⟩ - E⟨b^m p^n⟩ = 0` as a stencil.
fn energy_stencil<T: Real>(
    pot: &ValidatedPotential<T>,
    e: T,
    m: i32,
    n: u32,
) -> Result<Stencil<(i32, u32), T>, RecursionError> {
    let mut terms = Vec::new();
    for t in reorder_p_base(2, pot.base_kind(), m)?.times_p(n).terms() {
        terms.push(((t.base_power, t.p_power), cx_exact(t.coeff)));
    }
    for &(l, a) in pot.terms() {
        terms.push(((m + l, n), cx_real(a)));
    }
    terms.push(((m, n), cx_real(-e)));
    Ok(merged(terms))
}

/// Stencil of the coupled `e^{mr} r^n` equation for the Yukawa potential.
fn yukawa_stencil<T: Real>(pot: &ValidatedPotential<T>, e: T, m: i32, n: i32) -> Stencil<(i32, i32), T> {
    let (mi, ni) = (i64::from(m), i64::from(n));
    let big_l = pot.centrifugal();
    let a = pot.strength();
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let mt: T = int(mi);
    let nt: T = int(ni);
    merged([
        ((m, n), cx_real(-(int::<T>(mi * mi * mi) + four * mt * e))),
        ((m, n - 1), cx_real(-(int::<T>(3 * mi * mi * ni) + four * nt * e))),
        ((m, n - 2), cx_real(four * big_l * mt - int::<T>(3 * mi * ni * (ni - 1)))),
        (
            (m, n - 3),
            cx_real(four * big_l * int::<T>(ni - 1) - int::<T>(ni * (ni - 1) * (ni - 2))),
        ),
        ((m - 1, n - 1), cx_real(-two * a * int::<T>(2 * mi - 1))),
        ((m - 1, n - 2), cx_real(-two * a * int::<T>(2 * ni - 1))),
    ])
}

trait KeyName: Copy + Ord {
    fn name(self) -> String;
}

impl KeyName for i32 {
    fn name(self) -> String {
        format!("⟨b^{self}⟩")
    }
}

impl KeyName for (i32, u32) {
    fn name(self) -> String {
        format!("⟨b^{} p^{}⟩", self.0, self.1)
    }
}

impl KeyName for (i32, i32) {
    fn name(self) -> String {
        format!("⟨e^({})r r^{}⟩", self.0, self.1)
    }
}

/// Solves `stencil = 0` for `target`, which must be the only entry of the
/// stencil missing from `table`.
fn solve_for<K: KeyName, T: Real>(
    stencil: &[(K, Cx<T>)],
    target: K,
    table: &mut BTreeMap<K, Cx<T>>,
    instance: &str,
) -> Result<(), RecursionError> {
    let mut target_coeff = None;
    let mut known = cx(T::zero(), T::zero());
    for &(k, c) in stencil {
        if k == target {
            target_coeff = Some(c);
        } else if let Some(v) = table.get(&k) {
            known += c * *v;
        } else {
            return Err(RecursionError::MissingInitial(format!(
                "{} needed by {instance}",
                k.name()
            )));
        }
    }
    let Some(coeff) = target_coeff else {
        return Err(RecursionError::DegenerateRecursion(instance.to_string()));
    };
    let value = -known / coeff;
    let mag = value.norm();
    if !mag.is_finite() || mag > T::overflow_limit() {
        return Err(RecursionError::Overflow {
            index: target.name(),
            magnitude: mag.to_f64_lossy(),
        });
    }
    table.insert(target, value);
    Ok(())
}

fn require_extra<T: Real>(init: &InitialData<T>, name: InitialName) -> Result<T, RecursionError> {
    init.extra
        .get(&name)
        .copied()
        .filter(|v| v.is_finite())
        .ok_or_else(|| RecursionError::MissingInitial(name.to_string()))
}

/// Generates `⟨b^m⟩` for every index the family defines with `|m| ≤ max_index`
/// (Coulomb additionally yields `⟨r^{-1}⟩`).
pub fn gen_one_var<T: Real>(
    pot: &ValidatedPotential<T>,
    init: &InitialData<T>,
    max_index: i32,
) -> Result<MomentTable<T>, RecursionError> {
    let e = init.energy;
    if !e.is_finite() {
        return Err(RecursionError::MissingInitial("E".to_string()));
    }
    let one = cx_real(T::one());
    let zero = cx_real(T::zero());
    let mut table = MomentTable::new(pot.base_kind());
    let tab = &mut table.one_var;
    tab.insert(0, one);
    match pot.family() {
        Family::EvenPolynomial => {
            let d = pot.degree();
            for k in (1..=max_index).step_by(2) {
                tab.insert(k, zero);
            }
            for &name in pot.free_initial() {
                if let Some(k) = name.moment_index() {
                    tab.insert(k, cx_real(require_extra(init, name)?));
                }
            }
            let mut m = 1;
            while m + d - 1 <= max_index {
                let st = one_var_stencil(pot, e, m);
                solve_for(&st, m + d - 1, tab, &format!("one-var m={m}"))?;
                m += 2;
            }
        }
        Family::Coulomb => {
            // the m = 0 instance picks up a boundary term at r = 0; start at m = 1
            let mut m = 1;
            while m - 1 <= max_index {
                let target = if m == 1 { -1 } else { m - 1 };
                let st = one_var_stencil(pot, e, m);
                solve_for(&st, target, tab, &format!("one-var m={m}"))?;
                m += 1;
            }
        }
        Family::Toda | Family::Trig => {
            let name = pot.free_initial()[1];
            tab.insert(1, cx_real(require_extra(init, name)?));
            if max_index >= 1 {
                let st = one_var_stencil(pot, e, 0);
                solve_for(&st, -1, tab, "one-var m=0")?;
            }
            for k in 1..max_index {
                let st = one_var_stencil(pot, e, k);
                solve_for(&st, k + 1, tab, &format!("one-var m={k}"))?;
                let st = one_var_stencil(pot, e, -k);
                solve_for(&st, -k - 1, tab, &format!("one-var m={}", -k))?;
            }
        }
        other => {
            return Err(RecursionError::UnsupportedFamily(format!(
                "{other} has no one-variable recursion"
            )))
        }
    }
    Ok(table)
}

/// Generates `⟨b^m p^n⟩` for `0 ≤ m, n ≤ 2K + 2` (`|m| ≤ 2K + 2` for the
/// exponential bases), together with the one-variable slice that feeds it.
///
/// For the power base the commutator equation at `(m+1, n)` yields
/// `⟨x^m p^{n+1}⟩`; the energy equation then holds identically. For the
/// exponential bases the commutator equation at `(m, n)`, `m ≠ 0`, yields
/// `⟨b^m p^{n+1}⟩` and the energy equation at `(0, n)` yields `⟨p^{n+2}⟩`,
/// seeded with `⟨p⟩ = 0` (real eigenfunctions).
pub fn gen_two_var<T: Real>(
    pot: &ValidatedPotential<T>,
    init: &InitialData<T>,
    depth: usize,
) -> Result<MomentTable<T>, RecursionError> {
    let target = 2 * depth as i32 + 2;
    let e = init.energy;
    match pot.family() {
        Family::EvenPolynomial => {
            let d = pot.degree();
            let m_max = |n: i32| target + (target - n) * d;
            let mut table = gen_one_var(pot, init, m_max(0))?;
            for (&m, &v) in &table.one_var {
                table.two_var.insert((m, 0), v);
            }
            for n in 0..target {
                for m in 0..=m_max(n + 1) {
                    let st = commutator_stencil(pot, m + 1, n as u32)?;
                    let tag = format!("commutator m={} n={n}", m + 1);
                    solve_for(&st, (m, n as u32 + 1), &mut table.two_var, &tag)?;
                }
            }
            for (&(m, n), v) in table.two_var.iter_mut() {
                if (m + n as i32) % 2 != 0 {
                    *v = cx_real(T::zero());
                }
            }
            Ok(table)
        }
        Family::Toda | Family::Trig => {
            let reach = |n: i32| target + (target - n);
            let mut table = gen_one_var(pot, init, reach(0))?;
            for (&m, &v) in &table.one_var {
                table.two_var.insert((m, 0), v);
            }
            table.two_var.insert((0, 1), cx_real(T::zero()));
            for n in 0..target {
                let r = reach(n + 1);
                for m in (-r..=r).filter(|&m| m != 0) {
                    let st = commutator_stencil(pot, m, n as u32)?;
                    let tag = format!("commutator m={m} n={n}");
                    solve_for(&st, (m, n as u32 + 1), &mut table.two_var, &tag)?;
                }
                if n >= 1 {
                    let st = energy_stencil(pot, e, 0, n as u32 - 1)?;
                    let tag = format!("energy m=0 n={}", n - 1);
                    solve_for(&st, (0, n as u32 + 1), &mut table.two_var, &tag)?;
                }
            }
            Ok(table)
        }
        Family::Coulomb => Err(RecursionError::UnsupportedFamily(
            "the radial r, p_r recursion leaves ⟨r^-2⟩ and higher inverse powers \
             undetermined"
                .to_string(),
        )),
        other => Err(RecursionError::UnsupportedFamily(format!(
            "{other} has no two-variable recursion"
        ))),
    }
}

fn evaluate<K: Copy + Ord, T: Real>(
    stencil: &[(K, Cx<T>)],
    table: &BTreeMap<K, Cx<T>>,
) -> Option<Residual<T>> {
    let mut value = cx(T::zero(), T::zero());
    let mut scale = T::zero();
    for &(k, c) in stencil {
        let term = c * *table.get(&k)?;
        scale = scale.max(term.norm());
        value += term;
    }
    Some(Residual { value, scale })
}

fn classify<K: Copy + Ord, T: Real>(
    stencil: &[(K, Cx<T>)],
    table: &BTreeMap<K, Cx<T>>,
    instance: EquationInstance,
    report: &mut ResidualReport<T>,
) {
    if stencil.is_empty() {
        return;
    }
    match evaluate(stencil, table) {
        Some(r) => {
            report.entries.insert(instance, r);
        }
        None => {
            if stencil.iter().any(|(k, _)| table.contains_key(k)) {
                report.skipped.push(instance);
            }
        }
    }
}

fn key_span<K: Copy, V>(map: &BTreeMap<K, V>, f: impl Fn(K) -> i32) -> Option<(i32, i32)> {
    let lo = map.keys().map(|&k| f(k)).min()?;
    let hi = map.keys().map(|&k| f(k)).max()?;
    Some((lo, hi))
}

/// Evaluates every instantiable equation of the family on `table` at energy `e`.
///
/// An instance is evaluated when every moment in its stencil is present;
/// instances only partly covered are listed in `skipped`. Radial families
/// are instantiated for `m ≥ 1` only, where the boundary terms at `r = 0`
/// vanish.
pub fn recursion_residual<T: Real>(
    pot: &ValidatedPotential<T>,
    table: &MomentTable<T>,
    e: T,
) -> Result<ResidualReport<T>, RecursionError> {
    let mut report = ResidualReport {
        entries: BTreeMap::new(),
        skipped: Vec::new(),
    };
    let reach = pot
        .terms()
        .iter()
        .map(|(l, _)| l.abs())
        .max()
        .unwrap_or(0)
        + 3;
    let m_floor = match pot.family() {
        Family::Coulomb | Family::Yukawa => 1,
        Family::EvenPolynomial => 0,
        _ => i32::MIN,
    };
    if pot.family() == Family::Yukawa {
        if let Some((lo, hi)) = key_span(&table.mixed, |k| k.0) {
            let n_hi = key_span(&table.mixed, |k| k.1).map_or(0, |s| s.1) + 3;
            for m in (lo - 1)..=(hi + 1) {
                for n in 1..=n_hi {
                    let st = yukawa_stencil(pot, e, m, n);
                    classify(&st, &table.mixed, EquationInstance::Mixed { m, n }, &mut report);
                }
            }
        }
    } else {
        if let Some((lo, hi)) = key_span(&table.one_var, |k| k) {
            for m in (lo - reach).max(m_floor)..=(hi + reach) {
                let st = one_var_stencil(pot, e, m);
                classify(&st, &table.one_var, EquationInstance::OneVar { m }, &mut report);
            }
        }
        if let Some((lo, hi)) = key_span(&table.two_var, |k| k.0) {
            let n_hi = key_span(&table.two_var, |k| k.1 as i32).map_or(0, |s| s.1) as u32;
            for m in (lo - reach).max(m_floor)..=(hi + reach) {
                for n in 0..=n_hi {
                    let st = commutator_stencil(pot, m, n)?;
                    let inst = EquationInstance::TwoVarCommutator { m, n };
                    classify(&st, &table.two_var, inst, &mut report);
                    let st = energy_stencil(pot, e, m, n)?;
                    let inst = EquationInstance::TwoVarEnergy { m, n };
                    classify(&st, &table.two_var, inst, &mut report);
                }
            }
        }
    }
    if report.entries.is_empty() {
        return Err(RecursionError::IncompleteTable(
            "no equation instance is fully covered by the table".to_string(),
        ));
    }
    Ok(report)
}

struct Keyed<'a, K, T>(&'a BTreeMap<K, Cx<T>>, fn(&K) -> String);

impl<K, T: Real> Serialize for Keyed<'_, K, T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(&(self.1)(k), &[v.re.to_f64_lossy(), v.im.to_f64_lossy()])?;
        }
        map.end()
    }
}

impl<T: Real> Serialize for MomentTable<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MomentTable", 4)?;
        st.serialize_field("base_kind", &self.base_kind)?;
        st.serialize_field("one_var", &Keyed(&self.one_var, |m| m.to_string()))?;
        st.serialize_field("two_var", &Keyed(&self.two_var, |(m, n)| format!("{m},{n}")))?;
        st.serialize_field("mixed", &Keyed(&self.mixed, |(m, n)| format!("{m},{n}")))?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRepr {
    base_kind: BaseKind,
    #[serde(default)]
    one_var: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    two_var: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    mixed: BTreeMap<String, [f64; 2]>,
}

fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(key: &str) -> Option<(A, B)> {
    let (a, b) = key.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl<'de, T: Real> Deserialize<'de> for MomentTable<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = TableRepr::deserialize(d)?;
        let val = |v: [f64; 2]| cx(T::lit(v[0]), T::lit(v[1]));
        let mut out = MomentTable::new(repr.base_kind);
        for (k, v) in repr.one_var {
            let m = k
                .trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("bad one_var key `{k}`")))?;
            out.one_var.insert(m, val(v));
        }
        for (k, v) in repr.two_var {
            let key = parse_pair(&k).ok_or_else(|| D::Error::custom(format!("bad two_var key `{k}`")))?;
            out.two_var.insert(key, val(v));
        }
        for (k, v) in repr.mixed {
            let key = parse_pair(&k).ok_or_else(|| D::Error::custom(format!("bad mixed key `{k}`")))?;
            out.mixed.insert(key, val(v));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{validate_spec, PotentialSpec};

    fn harmonic() -> ValidatedPotential<f64> {
        validate_spec(PotentialSpec::harmonic()).unwrap()
    }

    fn close(a: Cx<f64>, re: f64, im: f64) -> bool {
        (a.re - re).abs() < 1e-12 && (a.im - im).abs() < 1e-12
    }

    #[test]
    fn harmonic_one_var() {
        let t = gen_one_var(&harmonic(), &InitialData::new(1.0), 8).unwrap();
        assert!(close(t.one(0).unwrap(), 1.0, 0.0));
        assert!(close(t.one(2).unwrap(), 0.5, 0.0));
        assert!(close(t.one(4).unwrap(), 0.75, 0.0));
        assert!(close(t.one(6).unwrap(), 1.875, 0.0));
        for m in [1, 3, 5, 7] {
            assert_eq!(t.one(m).unwrap(), cx_real(0.0));
        }
        let t = gen_one_var(&harmonic(), &InitialData::new(3.0), 2).unwrap();
        assert!(close(t.one(2).unwrap(), 1.5, 0.0));
    }

    #[test]
    fn coulomb_virial() {
        let p = validate_spec(PotentialSpec::coulomb(2.0, 0)).unwrap();
        let e = -1.0;
        let t = gen_one_var(&p, &InitialData::new(e), 4).unwrap();
        assert!(close(t.one(-1).unwrap(), -2.0 * e / 2.0, 0.0));
        // hydrogen-like ground state: ⟨r⟩ = 3 a / 2 with a = 2 / N
        assert!(close(t.one(1).unwrap(), 1.5, 0.0));
    }

    #[test]
    fn coulomb_zero_energy_is_degenerate() {
        let p = validate_spec(PotentialSpec::coulomb(1.0, 0)).unwrap();
        let err = gen_one_var(&p, &InitialData::new(0.0), 4).unwrap_err();
        assert!(matches!(err, RecursionError::DegenerateRecursion(_)));
    }

    #[test]
    fn toda_and_trig_symmetry() {
        let p = validate_spec(PotentialSpec::toda(1.0f64)).unwrap();
        let init = InitialData::new(1.8).with(InitialName::ExpMoment, 1.4);
        let t = gen_one_var(&p, &init, 6).unwrap();
        for m in 1..=6 {
            let (a, b) = (t.one(m).unwrap(), t.one(-m).unwrap());
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
        }

        let p = validate_spec(PotentialSpec::trig(1.0)).unwrap();
        let init = InitialData::new(-0.3).with(InitialName::TrigMoment, -0.6);
        let t = gen_one_var(&p, &init, 6).unwrap();
        assert_eq!(t.one(-1).unwrap(), t.one(1).unwrap());
        for m in -6..=6 {
            let v = t.one(m).unwrap();
            assert_eq!(v.im, 0.0);
            assert_eq!(v, t.one(-m).unwrap().conj());
        }
    }

    #[test]
    fn missing_initial_moment() {
        let p = validate_spec(PotentialSpec::quartic(1.0)).unwrap();
        let err = gen_one_var(&p, &InitialData::new(1.4), 8).unwrap_err();
        assert_eq!(err, RecursionError::MissingInitial("x2".to_string()));
    }

    #[test]
    fn diverging_point_reports_overflow() {
        let p = validate_spec(PotentialSpec::toda(1.0)).unwrap();
        let init = InitialData::new(1e30).with(InitialName::ExpMoment, 1e30);
        let err = gen_one_var(&p, &init, 12).unwrap_err();
        assert!(matches!(err, RecursionError::Overflow { .. }));
    }

    #[test]
    fn harmonic_two_var() {
        let t = gen_two_var(&harmonic(), &InitialData::new(1.0), 1).unwrap();
        assert!(close(t.two(0, 0).unwrap(), 1.0, 0.0));
        assert!(close(t.two(1, 1).unwrap(), 0.0, 0.5));
        assert!(close(t.two(0, 2).unwrap(), 0.5, 0.0));
        assert!(close(t.two(2, 0).unwrap(), 0.5, 0.0));
        for m in 0..=4 {
            for n in 0..=4u32 {
                if (m + n as i32) % 2 == 1 {
                    assert_eq!(t.two(m, n).unwrap(), cx_real(0.0));
                }
            }
        }
    }

    #[test]
    fn two_var_tables_satisfy_both_equations() {
        let cases: Vec<(ValidatedPotential<f64>, InitialData<f64>)> = vec![
            (harmonic(), InitialData::new(1.3)),
            (
                validate_spec(PotentialSpec::quartic(1.0)).unwrap(),
                InitialData::new(1.39).with(InitialName::EvenMoment(2), 0.3),
            ),
            (
                validate_spec(PotentialSpec::toda(1.0)).unwrap(),
                InitialData::new(1.76).with(InitialName::ExpMoment, 1.35),
            ),
            (
                validate_spec(PotentialSpec::trig(1.0)).unwrap(),
                InitialData::new(-0.38).with(InitialName::TrigMoment, -0.61),
            ),
        ];
        for (p, init) in cases {
            let t = gen_two_var(&p, &init, 2).unwrap();
            let rep = recursion_residual(&p, &t, init.energy).unwrap();
            assert!(rep.max_normalized() < 1e-9, "{:?}: {}", p.family(), rep.max_normalized());
            let energy = rep
                .entries
                .keys()
                .filter(|k| matches!(k, EquationInstance::TwoVarEnergy { .. }))
                .count();
            assert!(energy > 10);
            for (&m, v) in &t.one_var {
                if let Some(w) = t.two(m, 0) {
                    assert_eq!(*v, w);
                }
            }
        }
    }

    #[test]
    fn two_var_unsupported_families() {
        let p = validate_spec(PotentialSpec::coulomb(1.0, 0)).unwrap();
        let err = gen_two_var(&p, &InitialData::new(-0.25), 2).unwrap_err();
        assert!(matches!(err, RecursionError::UnsupportedFamily(_)));
        let p = validate_spec(PotentialSpec::yukawa(4.0, 0)).unwrap();
        let err = gen_two_var(&p, &InitialData::new(-1.0), 2).unwrap_err();
        assert!(matches!(err, RecursionError::UnsupportedFamily(_)));
    }

    #[test]
    fn perturbed_energy_shows_in_residual() {
        let t = gen_one_var(&harmonic(), &InitialData::new(1.0), 8).unwrap();
        let rep = recursion_residual(&harmonic(), &t, 1.0).unwrap();
        assert!(rep.max_abs() < 1e-12);
        let rep = recursion_residual(&harmonic(), &t, 1.1).unwrap();
        assert!(rep.max_abs() > 0.1);
    }

    #[test]
    fn empty_table_is_incomplete() {
        let t = MomentTable::<f64>::new(BaseKind::Power);
        assert!(matches!(
            recursion_residual(&harmonic(), &t, 1.0),
            Err(RecursionError::IncompleteTable(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let t = gen_two_var(&harmonic(), &InitialData::new(1.0), 1).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"1,1\":[0.0,0.5]"));
        let back: MomentTable<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
