//! Bootstrap matrices assembled from moment tables.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::ordering::{canonicalize_p_base_p, BaseKind, OrderingError};
use crate::recursion::MomentTable;
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// `M[m][n] = ⟨x^{m+n}⟩`
    HankelX,
    /// `M[m][n] = ⟨e^{(m+n)x}⟩`
    HankelExp,
    /// `M[m][n] = ⟨e^{i(n-m)θ}⟩`
    ToeplitzTrig,
    /// Gram matrix of `e^{mr} r^n` over the flattened `(m, n)` index.
    MixedXExp,
    /// Gram matrix of `x^m p^n`.
    KronXP,
    /// Gram matrix of `e^{mx} p^n`.
    KronExpP,
    /// Gram matrix of `e^{imθ} p^n`.
    KronTrigP,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 7] = [
        MatrixKind::HankelX,
        MatrixKind::HankelExp,
        MatrixKind::ToeplitzTrig,
        MatrixKind::MixedXExp,
        MatrixKind::KronXP,
        MatrixKind::KronExpP,
        MatrixKind::KronTrigP,
    ];

    pub fn is_two_op(self) -> bool {
        matches!(
            self,
            MatrixKind::KronXP | MatrixKind::KronExpP | MatrixKind::KronTrigP | MatrixKind::MixedXExp
        )
    }

    pub fn base(self) -> BaseKind {
        match self {
            MatrixKind::HankelX | MatrixKind::KronXP => BaseKind::Power,
            MatrixKind::HankelExp | MatrixKind::KronExpP => BaseKind::Exp,
            MatrixKind::ToeplitzTrig | MatrixKind::KronTrigP => BaseKind::TrigExp,
            MatrixKind::MixedXExp => BaseKind::ExpPower,
        }
    }

    /// Matrix dimension at depth `k`.
    pub fn dim(self, k: usize) -> usize {
        if self.is_two_op() {
            (k + 1) * (k + 1)
        } else {
            k + 1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::HankelX => "hankel-x",
            MatrixKind::HankelExp => "hankel-exp",
            MatrixKind::ToeplitzTrig => "toeplitz-trig",
            MatrixKind::MixedXExp => "mixed-x-exp",
            MatrixKind::KronXP => "kron-x-p",
            MatrixKind::KronExpP => "kron-exp-p",
            MatrixKind::KronTrigP => "kron-trig-p",
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixKind {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MatrixKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| MatrixError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("incomplete moment table: {0} is missing")]
    IncompleteTable(String),
    #[error("{kind} needs a {expected} table, got {found}")]
    BaseMismatch {
        kind: MatrixKind,
        expected: BaseKind,
        found: BaseKind,
    },
    #[error("unsupported matrix kind for this builder: {0}")]
    UnsupportedKind(MatrixKind),
    #[error("unknown matrix kind `{0}`")]
    UnknownKind(String),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}

/// Dense Hermitian bootstrap matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapMatrix<T> {
    pub kind: MatrixKind,
    pub depth: usize,
    pub dim: usize,
    pub entries: Vec<Cx<T>>,
    /// `max |M[i][j] - conj(M[j][i])|` before symmetrization.
    pub asymmetry: T,
}

impl<T: Real> BootstrapMatrix<T> {
    pub fn get(&self, i: usize, j: usize) -> Cx<T> {
        self.entries[i * self.dim + j]
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Symmetrizes `raw` as `(M + M†) / 2` and records the asymmetry.
    pub fn from_raw(kind: MatrixKind, depth: usize, dim: usize, raw: Vec<Cx<T>>) -> Self {
        let half = T::lit(0.5);
        let mut entries = raw.clone();
        let mut asymmetry = T::zero();
        for i in 0..dim {
            for j in 0..dim {
                let a = raw[i * dim + j];
                let b = raw[j * dim + i].conj();
                asymmetry = asymmetry.max((a - b).norm());
                entries[i * dim + j] = (a + b) * half;
            }
        }
        Self {
            kind,
            depth,
            dim,
            entries,
            asymmetry,
        }
    }

    /// Leading principal submatrix of dimension `dim`.
    pub fn leading(&self, dim: usize) -> Vec<Cx<T>> {
        let mut out = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            out.extend_from_slice(&self.entries[i * self.dim..i * self.dim + dim]);
        }
        out
    }
}

impl<T: Real> Serialize for BootstrapMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let z = self.get(i, j);
                        [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
                    })
                    .collect()
            })
            .collect();
        let mut st = s.serialize_struct("BootstrapMatrix", 5)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("asymmetry", &self.asymmetry.to_f64_lossy())?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

/// Flattened `(m, n)` index set for two-operator matrices, `0 ≤ m, n ≤ k`,
/// ordered by shell `max(m, n)` so that depth `k` is a leading block of
/// depth `k + 1`.
pub fn kron_index(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity((k + 1) * (k + 1));
    for s in 0..=k {
        for m in 0..=s {
            for n in 0..=s {
                if m.max(n) == s {
                    out.push((m, n));
                }
            }
        }
    }
    out
}

fn check_base<T: Real>(table: &MomentTable<T>, kind: MatrixKind) -> Result<(), MatrixError> {
    if table.base_kind == kind.base() {
        Ok(())
    } else {
        Err(MatrixError::BaseMismatch {
            kind,
            expected: kind.base(),
            found: table.base_kind,
        })
    }
}

/// One-operator matrix: Hankel, Toeplitz, or the mixed `e^{mr} r^n` Gram matrix.
pub fn build_one_op<T: Real>(
    table: &MomentTable<T>,
    kind: MatrixKind,
    k: usize,
) -> Result<BootstrapMatrix<T>, MatrixError> {
    check_base(table, kind)?;
    let one = |m: i32| {
        table
            .one(m)
            .ok_or_else(|| MatrixError::IncompleteTable(format!("one-variable moment {m}")))
    };
    let dim = kind.dim(k);
    let mut raw = Vec::with_capacity(dim * dim);
    match kind {
        MatrixKind::HankelX | MatrixKind::HankelExp => {
            for i in 0..=k {
                for j in 0..=k {
                    raw.push(one((i + j) as i32)?);
                }
            }
        }
        MatrixKind::ToeplitzTrig => {
            for i in 0..=k {
                for j in 0..=k {
                    raw.push(one(j as i32 - i as i32)?);
                }
            }
        }
        MatrixKind::MixedXExp => {
            let idx = kron_index(k);
            for &(m1, n1) in &idx {
                for &(m2, n2) in &idx {
                    let (m, n) = ((m1 + m2) as i32, (n1 + n2) as i32);
                    raw.push(table.mixed(m, n).ok_or_else(|| {
                        MatrixError::IncompleteTable(format!("mixed moment ({m},{n})"))
                    })?);
                }
            }
        }
        other => return Err(MatrixError::UnsupportedKind(other)),
    }
    Ok(BootstrapMatrix::from_raw(kind, k, dim, raw))
}

/// Two-operator matrix: entry `((m1,n1),(m2,n2))` is
/// `⟨(b^{m1} p^{n1})† b^{m2} p^{n2}⟩ = ⟨p^{n1} (b^{m1})† b^{m2} p^{n2}⟩`,
/// reduced to canonical moments.
pub fn build_two_op<T: Real>(
    table: &MomentTable<T>,
    kind: MatrixKind,
    k: usize,
) -> Result<BootstrapMatrix<T>, MatrixError> {
    if !matches!(kind, MatrixKind::KronXP | MatrixKind::KronExpP | MatrixKind::KronTrigP) {
        return Err(MatrixError::UnsupportedKind(kind));
    }
    check_base(table, kind)?;
    let base = kind.base();
    let idx = kron_index(k);
    let dim = idx.len();
    let mut raw = Vec::with_capacity(dim * dim);
    for &(m1, n1) in &idx {
        for &(m2, n2) in &idx {
            let power = match base {
                BaseKind::TrigExp => m2 as i32 - m1 as i32,
                _ => (m1 + m2) as i32,
            };
            let op = canonicalize_p_base_p(n1 as u32, base, power, n2 as u32)?;
            let missing = std::cell::Cell::new(None);
            let value = op.evaluate(|m, n| {
                let v = table.two(m, n);
                if v.is_none() {
                    missing.set(Some((m, n)));
                }
                v
            });
            match value {
                Some(v) => raw.push(v),
                None => {
                    let (m, n) = missing.get().unwrap_or((power, (n1 + n2) as u32));
                    return Err(MatrixError::IncompleteTable(format!(
                        "two-variable moment ({m},{n})"
                    )));
                }
            }
        }
    }
    Ok(BootstrapMatrix::from_raw(kind, k, dim, raw))
}

/// Dispatches on [`MatrixKind::is_two_op`].
pub fn build<T: Real>(
    table: &MomentTable<T>,
    kind: MatrixKind,
    k: usize,
) -> Result<BootstrapMatrix<T>, MatrixError> {
    match kind {
        MatrixKind::KronXP | MatrixKind::KronExpP | MatrixKind::KronTrigP => {
            build_two_op(table, kind, k)
        }
        _ => build_one_op(table, kind, k),
    }
}
