//! Positivity test for bootstrap matrices.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{hermitian_eigenvalues, EigenError};
use crate::matrices::BootstrapMatrix;
use crate::scalar::Real;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("eigenvalue computation failed: {0}")]
    NumericalFailure(#[from] EigenError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityVerdict<T> {
    pub min_eigenvalue: T,
    /// `max(1, max |entry|)`.
    pub scale: T,
    pub feasible: bool,
    pub depth: usize,
}

impl<T: Real> Serialize for FeasibilityVerdict<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FeasibilityVerdict", 4)?;
        st.serialize_field("min_eigenvalue", &self.min_eigenvalue.to_f64_lossy())?;
        st.serialize_field("scale", &self.scale.to_f64_lossy())?;
        st.serialize_field("feasible", &self.feasible)?;
        st.serialize_field("depth", &self.depth)?;
        st.end()
    }
}

pub fn min_eigenvalue<T: Real>(m: &BootstrapMatrix<T>) -> Result<T, FeasibilityError> {
    let ev = hermitian_eigenvalues(&m.entries, m.dim)?;
    Ok(ev.first().copied().unwrap_or_else(T::infinity))
}

/// Feasible when the smallest eigenvalue is at least `-tol · scale`.
pub fn is_feasible<T: Real>(
    m: &BootstrapMatrix<T>,
    tol: T,
) -> Result<FeasibilityVerdict<T>, FeasibilityError> {
    let min = min_eigenvalue(m)?;
    let scale = m.max_abs().max(T::one());
    Ok(FeasibilityVerdict {
        min_eigenvalue: min,
        scale,
        feasible: min >= -tol * scale,
        depth: m.depth,
    })
}
