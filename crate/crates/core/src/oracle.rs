//! Discretized Schrödinger eigensolvers used as ground truth.
//!
//! The line and the half-line use the three-point Laplacian with Dirichlet
//! ends; eigenvalues come from Sturm-sequence bisection on the tridiagonal
//! matrix and eigenvectors from inverse iteration. The circle uses a real
//! Fourier basis `1, cos kθ, sin kθ`, `k ≤ n_points / 4`, with the potential
//! matrix computed by trapezoidal quadrature on the `n_points` grid, which is
//! exact for trigonometric potentials.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{symmetric_eigen, EigenError, Tridiagonal};
use crate::ordering::BaseKind;
use crate::recursion::MomentTable;
use crate::scalar::{cx, usize_to, Cx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("domain too small: level {level} has relative amplitude {amplitude:e} at the boundary")]
    DomainTooSmall { level: usize, amplitude: f64 },
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("moment not integrable: {0}")]
    NonIntegrableMoment(String),
    #[error("{base} moments are not defined on this domain")]
    BaseMismatch { base: BaseKind },
    #[error("level {level} not computed (solution has {available})")]
    LevelOutOfRange { level: usize, available: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Line,
    HalfLine { l: i64 },
    Circle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid<T> {
    pub lo: T,
    pub hi: T,
    pub n_points: usize,
    pub boundary: Boundary,
    pub spacing: T,
    /// Positions of the unknowns (interior nodes for Dirichlet grids).
    pub nodes: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T> {
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<T>,
    /// Real eigenfunctions at the grid nodes with `Σ ψ² h = 1`.
    pub wavefunctions: Vec<Vec<T>>,
    pub grid: OracleGrid<T>,
    pub domain: Domain,
    /// Effective potential at the first and last node.
    pub edge_potential: (T, T),
    /// Real Fourier coefficients per level on the circle.
    fourier: Option<Vec<Vec<T>>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions<T> {
    /// Largest accepted `|ψ(edge)| / max |ψ|` at a Dirichlet end that
    /// stands in for infinity.
    pub boundary_tol: T,
}

impl<T: Real> Default for OracleOptions<T> {
    fn default() -> Self {
        Self {
            boundary_tol: T::lit(1e-8),
        }
    }
}

fn check_levels(n: usize, n_levels: usize) -> Result<(), OracleError> {
    if n_levels == 0 || n_levels > n {
        return Err(OracleError::BadGrid(format!(
            "{n_levels} levels requested from {n} unknowns"
        )));
    }
    Ok(())
}

fn dirichlet_solve<T: Real>(
    nodes: Vec<T>,
    potential: Vec<T>,
    h: T,
    n_levels: usize,
) -> (Vec<T>, Vec<Vec<T>>) {
    let inv_h2 = T::one() / (h * h);
    let tri = Tridiagonal {
        diag: potential.iter().map(|&v| T::lit(2.0) * inv_h2 + v).collect(),
        off: vec![-inv_h2; nodes.len().saturating_sub(1)],
    };
    let scale = T::one() / h.sqrt();
    let mut values = Vec::with_capacity(n_levels);
    let mut vectors = Vec::with_capacity(n_levels);
    for k in 0..n_levels {
        let lambda = tri.eigenvalue(k);
        let v = tri.eigenvector(lambda);
        values.push(lambda);
        vectors.push(v.into_iter().map(|x| x * scale).collect());
    }
    (values, vectors)
}

fn boundary_amplitude<T: Real>(psi: &[T], check_first: bool) -> T {
    let peak = psi.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let last = psi.last().map_or(T::zero(), |v| v.abs());
    let first = if check_first {
        psi.first().map_or(T::zero(), |v| v.abs())
    } else {
        T::zero()
    };
    first.max(last) / peak
}

fn check_boundary<T: Real>(
    vectors: &[Vec<T>],
    check_first: bool,
    opts: &OracleOptions<T>,
) -> Result<(), OracleError> {
    for (level, psi) in vectors.iter().enumerate() {
        let amp = boundary_amplitude(psi, check_first);
        if !(amp <= opts.boundary_tol) {
            return Err(OracleError::DomainTooSmall {
                level,
                amplitude: amp.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// `-ψ'' + V ψ = E ψ` on `[lo, hi]` with `ψ(lo) = ψ(hi) = 0` and
/// `n_points` interior nodes.
pub fn solve_1d<T: Real>(
    v: impl Fn(T) -> T,
    lo: T,
    hi: T,
    n_points: usize,
    n_levels: usize,
) -> Result<OracleSolution<T>, OracleError> {
    solve_1d_with(v, lo, hi, n_points, n_levels, &OracleOptions::default())
}

pub fn solve_1d_with<T: Real>(
    v: impl Fn(T) -> T,
    lo: T,
    hi: T,
    n_points: usize,
    n_levels: usize,
    opts: &OracleOptions<T>,
) -> Result<OracleSolution<T>, OracleError> {
    if n_points < 200 {
        return Err(OracleError::BadGrid(format!("{n_points} points; need at least 200")));
    }
    if !(lo < hi) {
        return Err(OracleError::BadGrid("need lo < hi".to_string()));
    }
    check_levels(n_points, n_levels)?;
    let h = (hi - lo) / usize_to::<T>(n_points + 1);
    let nodes: Vec<T> = (0..n_points).map(|i| lo + usize_to::<T>(i + 1) * h).collect();
    let pot: Vec<T> = nodes.iter().map(|&x| v(x)).collect();
    if pot.iter().any(|p| !p.is_finite()) {
        return Err(OracleError::BadGrid("potential is not finite on the grid".to_string()));
    }
    let edge_potential = (pot[0], pot[n_points - 1]);
    let (eigenvalues, wavefunctions) = dirichlet_solve(nodes.clone(), pot, h, n_levels);
    check_boundary(&wavefunctions, true, opts)?;
    Ok(OracleSolution {
        eigenvalues,
        wavefunctions,
        grid: OracleGrid {
            lo,
            hi,
            n_points,
            boundary: Boundary::Dirichlet,
            spacing: h,
            nodes,
        },
        domain: Domain::Line,
        edge_potential,
        fourier: None,
    })
}

/// Radial equation `-u'' + (l(l+1)/r² + V(r)) u = E u` on `(0, r_max)` with
/// `u(0) = u(r_max) = 0` and `n_points` interior nodes `r_i = i h`.
pub fn solve_radial<T: Real>(
    v: impl Fn(T) -> T,
    l: i64,
    r_max: T,
    n_points: usize,
    n_levels: usize,
) -> Result<OracleSolution<T>, OracleError> {
    solve_radial_with(v, l, r_max, n_points, n_levels, &OracleOptions::default())
}

pub fn solve_radial_with<T: Real>(
    v: impl Fn(T) -> T,
    l: i64,
    r_max: T,
    n_points: usize,
    n_levels: usize,
    opts: &OracleOptions<T>,
) -> Result<OracleSolution<T>, OracleError> {
    if n_points < 200 {
        return Err(OracleError::BadGrid(format!("{n_points} points; need at least 200")));
    }
    if !(r_max > T::zero()) || l < 0 {
        return Err(OracleError::BadGrid("need r_max > 0 and l ≥ 0".to_string()));
    }
    check_levels(n_points, n_levels)?;
    let h = r_max / usize_to::<T>(n_points + 1);
    let big_l = T::from_int(i128::from(l) * i128::from(l + 1));
    let nodes: Vec<T> = (1..=n_points).map(|i| usize_to::<T>(i) * h).collect();
    let pot: Vec<T> = nodes.iter().map(|&r| big_l / (r * r) + v(r)).collect();
    if pot.iter().any(|p| !p.is_finite()) {
        return Err(OracleError::BadGrid("potential is not finite on the grid".to_string()));
    }
    let edge_potential = (pot[0], pot[n_points - 1]);
    let (eigenvalues, wavefunctions) = dirichlet_solve(nodes.clone(), pot, h, n_levels);
    check_boundary(&wavefunctions, false, opts)?;
    Ok(OracleSolution {
        eigenvalues,
        wavefunctions,
        grid: OracleGrid {
            lo: T::zero(),
            hi: r_max,
            n_points,
            boundary: Boundary::Dirichlet,
            spacing: h,
            nodes,
        },
        domain: Domain::HalfLine { l },
        edge_potential,
        fourier: None,
    })
}

/// `-ψ'' + V(θ) ψ = E ψ` with periodic boundary conditions on `[0, 2π)`.
pub fn solve_periodic<T: Real>(
    v: impl Fn(T) -> T,
    n_points: usize,
    n_levels: usize,
) -> Result<OracleSolution<T>, OracleError> {
    if n_points < 256 {
        return Err(OracleError::BadGrid(format!("{n_points} points; need at least 256")));
    }
    let kmax = n_points / 4;
    let dim = 2 * kmax + 1;
    check_levels(dim, n_levels)?;
    let two_pi = T::PI() + T::PI();
    let h = two_pi / usize_to::<T>(n_points);
    let nodes: Vec<T> = (0..n_points).map(|j| usize_to::<T>(j) * h).collect();
    let pot: Vec<T> = nodes.iter().map(|&t| v(t)).collect();
    if pot.iter().any(|p| !p.is_finite()) {
        return Err(OracleError::BadGrid("potential is not finite on the grid".to_string()));
    }
    // C_q = (1/n) Σ V cos qθ, S_q = (1/n) Σ V sin qθ
    let inv_n = T::one() / usize_to::<T>(n_points);
    let (mut c, mut s) = (vec![T::zero(); 2 * kmax + 1], vec![T::zero(); 2 * kmax + 1]);
    for q in 0..=2 * kmax {
        let (mut cq, mut sq) = (T::zero(), T::zero());
        for (j, &vj) in pot.iter().enumerate() {
            let phase = two_pi * usize_to::<T>((q * j) % n_points) * inv_n;
            cq += vj * phase.cos();
            sq += vj * phase.sin();
        }
        c[q] = cq * inv_n;
        s[q] = sq * inv_n;
    }
    let cf = |q: i64| c[q.unsigned_abs() as usize];
    let sf = |q: i64| if q < 0 { -s[(-q) as usize] } else { s[q as usize] };
    // basis order: 1, cos 1, sin 1, cos 2, sin 2, …
    let freq = |a: usize| a.div_ceil(2) as i64;
    let is_sin = |a: usize| a > 0 && a.is_multiple_of(2);
    let sqrt2 = T::lit(2.0).sqrt();
    let mut hmat = vec![T::zero(); dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let (ka, kb) = (freq(a), freq(b));
            let val = match (a == 0, b == 0) {
                (true, true) => cf(0),
                (true, false) => sqrt2 * if is_sin(b) { sf(kb) } else { cf(kb) },
                (false, true) => sqrt2 * if is_sin(a) { sf(ka) } else { cf(ka) },
                (false, false) => match (is_sin(a), is_sin(b)) {
                    (false, false) => cf(ka - kb) + cf(ka + kb),
                    (true, true) => cf(ka - kb) - cf(ka + kb),
                    (false, true) => sf(ka + kb) - sf(ka - kb),
                    (true, false) => sf(ka + kb) - sf(kb - ka),
                },
            };
            hmat[a * dim + b] = val;
        }
        let k: T = T::from_int(i128::from(freq(a)));
        hmat[a * dim + a] += k * k;
    }
    let (values, vectors) = symmetric_eigen(&hmat, dim, true)?;
    let vectors = vectors.unwrap_or_default();
    let inv_sqrt_pi = T::one() / T::PI().sqrt();
    let inv_sqrt_2pi = T::one() / two_pi.sqrt();
    let mut wavefunctions = Vec::with_capacity(n_levels);
    let mut fourier = Vec::with_capacity(n_levels);
    for level in 0..n_levels {
        let coeffs: Vec<T> = (0..dim).map(|a| vectors[a * dim + level]).collect();
        let psi: Vec<T> = nodes
            .iter()
            .map(|&t| {
                let mut acc = coeffs[0] * inv_sqrt_2pi;
                for a in 1..dim {
                    let arg = T::from_int(i128::from(freq(a))) * t;
                    let basis = if is_sin(a) { arg.sin() } else { arg.cos() };
                    acc += coeffs[a] * basis * inv_sqrt_pi;
                }
                acc
            })
            .collect();
        wavefunctions.push(psi);
        fourier.push(coeffs);
    }
    Ok(OracleSolution {
        eigenvalues: values.into_iter().take(n_levels).collect(),
        wavefunctions,
        grid: OracleGrid {
            lo: T::zero(),
            hi: two_pi,
            n_points,
            boundary: Boundary::Periodic,
            spacing: h,
            nodes,
        },
        domain: Domain::Circle,
        edge_potential: (pot[0], pot[0]),
        fourier: Some(fourier),
    })
}

/// Indices to integrate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentIndexSet {
    pub one_var: Vec<i32>,
    pub two_var: Vec<(i32, u32)>,
    pub mixed: Vec<(i32, i32)>,
}

impl MomentIndexSet {
    pub fn one_var(range: impl IntoIterator<Item = i32>) -> Self {
        Self {
            one_var: range.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn two_var(
        ms: impl IntoIterator<Item = i32> + Clone,
        ns: impl IntoIterator<Item = u32>,
    ) -> Self {
        let mut two = Vec::new();
        for n in ns {
            for m in ms.clone() {
                two.push((m, n));
            }
        }
        Self {
            two_var: two,
            ..Self::default()
        }
    }

    pub fn mixed(ms: impl IntoIterator<Item = i32> + Clone, ns: impl IntoIterator<Item = i32>) -> Self {
        let mut mixed = Vec::new();
        for n in ns {
            for m in ms.clone() {
                mixed.push((m, n));
            }
        }
        Self {
            mixed,
            ..Self::default()
        }
    }
}

/// Second-order first derivative: centered inside, one-sided at the ends.
fn gradient<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let two_h = h + h;
    let mut g = vec![T::zero(); n];
    if n < 3 {
        return g;
    }
    let (three, four) = (T::lit(3.0), T::lit(4.0));
    g[0] = (-three * f[0] + four * f[1] - f[2]) / two_h;
    for i in 1..n - 1 {
        g[i] = (f[i + 1] - f[i - 1]) / two_h;
    }
    g[n - 1] = (three * f[n - 1] - four * f[n - 2] + f[n - 3]) / two_h;
    g
}

/// Decay rate of `psi` toward one end: the smaller of `sqrt(V_edge - E)` and
/// a log-slope fit between the points where `|ψ|` first drops below `1e-3`
/// and `1e-6` of its peak.
fn decay_rate<T: Real>(nodes: &[T], psi: &[T], v_edge: T, e: T, toward_hi: bool) -> T {
    let analytic = (v_edge - e).max(T::zero()).sqrt();
    let n = psi.len();
    let peak_idx = (0..n)
        .max_by(|&a, &b| {
            psi[a]
                .abs()
                .partial_cmp(&psi[b].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let peak = psi[peak_idx].abs();
    let order: Vec<usize> = if toward_hi {
        (peak_idx..n).collect()
    } else {
        (0..=peak_idx).rev().collect()
    };
    let first_below = |frac: f64| order.iter().copied().find(|&i| psi[i].abs() < T::lit(frac) * peak);
    let fit = match (first_below(1e-3), first_below(1e-6)) {
        (Some(i1), Some(i2)) if i1 != i2 => {
            (psi[i1].abs() / psi[i2].abs()).ln() / (nodes[i2] - nodes[i1]).abs()
        }
        _ => T::zero(),
    };
    analytic.min(fit)
}

struct Sampled<T> {
    /// Nodes including the Dirichlet end points.
    x: Vec<T>,
    psi: Vec<T>,
    h: T,
}

impl<T: Real> Sampled<T> {
    fn derivatives(&self, max_n: u32) -> Vec<Vec<T>> {
        let mut out = vec![self.psi.clone()];
        for n in 1..=max_n as usize {
            let next = gradient(&out[n - 1], self.h);
            out.push(next);
        }
        out
    }

    /// Trapezoid rule; a singular first node (at r = 0) is replaced by linear
    /// extrapolation from its neighbours.
    fn integrate(&self, f: impl Fn(usize) -> T, singular_first: bool) -> T {
        let n = self.x.len();
        let half = T::lit(0.5);
        let f0 = if singular_first {
            T::lit(2.0) * f(1) - f(2)
        } else {
            f(0)
        };
        let mut acc = half * (f0 + f(n - 1));
        for i in 1..n - 1 {
            acc += f(i);
        }
        acc * self.h
    }
}

fn phase_minus_i<T: Real>(n: u32) -> Cx<T> {
    match n % 4 {
        0 => cx(T::one(), T::zero()),
        1 => cx(T::zero(), -T::one()),
        2 => cx(-T::one(), T::zero()),
        _ => cx(T::zero(), T::one()),
    }
}

/// Quadrature moments `⟨b^m⟩`, `⟨b^m p^n⟩` (momentum by repeated
/// second-order differences of the eigenfunction) or `⟨e^{mr} r^n⟩` for one
/// level of an oracle solution.
pub fn moments_from_wavefunction<T: Real>(
    sol: &OracleSolution<T>,
    level: usize,
    base: BaseKind,
    index: &MomentIndexSet,
) -> Result<MomentTable<T>, OracleError> {
    let psi = sol
        .wavefunctions
        .get(level)
        .ok_or(OracleError::LevelOutOfRange {
            level,
            available: sol.wavefunctions.len(),
        })?;
    let e = sol.eigenvalues[level];
    match (sol.domain, base) {
        (Domain::Line, BaseKind::Power | BaseKind::Exp) => {}
        (Domain::HalfLine { .. }, BaseKind::Power | BaseKind::ExpPower) => {}
        (Domain::Circle, BaseKind::TrigExp) => return circle_moments(sol, level, index),
        _ => return Err(OracleError::BaseMismatch { base }),
    }
    if base == BaseKind::ExpPower && (!index.one_var.is_empty() || !index.two_var.is_empty()) {
        return Err(OracleError::BaseMismatch { base });
    }
    if base != BaseKind::ExpPower && !index.mixed.is_empty() {
        return Err(OracleError::BaseMismatch { base });
    }

    let radial_l = match sol.domain {
        Domain::HalfLine { l } => Some(l),
        _ => None,
    };
    let kappa_hi = decay_rate(&sol.grid.nodes, psi, sol.edge_potential.1, e, true);
    let kappa_lo = match sol.domain {
        Domain::Line => decay_rate(&sol.grid.nodes, psi, sol.edge_potential.0, e, false),
        _ => T::infinity(),
    };
    let exp_ok = |m: i32| -> Result<(), OracleError> {
        let mt = T::from_int(i128::from(m));
        let ok = if m > 0 {
            mt < T::lit(2.0) * kappa_hi
        } else if m < 0 {
            -mt < T::lit(2.0) * kappa_lo
        } else {
            true
        };
        if ok {
            Ok(())
        } else {
            Err(OracleError::NonIntegrableMoment(format!(
                "e^({m}x) against decay rates {:.4} (lower) and {:.4} (upper)",
                kappa_lo.to_f64_lossy(),
                kappa_hi.to_f64_lossy()
            )))
        }
    };
    // near r = 0, u ~ r^{l+1} and u^{(n)} ~ r^{max(l+1-n, 0)}
    let power_ok = |m: i32, n: u32| -> Result<(), OracleError> {
        if let Some(l) = radial_l {
            let lead = i64::from(m) + (l + 1) + (l + 1 - i64::from(n)).max(0);
            if lead <= -1 {
                return Err(OracleError::NonIntegrableMoment(format!(
                    "r^{m} p^{n} diverges at r = 0 for l = {l}"
                )));
            }
        }
        Ok(())
    };

    let mut x = Vec::with_capacity(psi.len() + 2);
    let mut p = Vec::with_capacity(psi.len() + 2);
    x.push(sol.grid.lo);
    p.push(T::zero());
    x.extend_from_slice(&sol.grid.nodes);
    p.extend_from_slice(psi);
    x.push(sol.grid.hi);
    p.push(T::zero());
    let sampled = Sampled {
        x,
        psi: p,
        h: sol.grid.spacing,
    };
    let max_n = index.two_var.iter().map(|&(_, n)| n).max().unwrap_or(0);
    let derivs = sampled.derivatives(max_n);
    let weight = |kind: BaseKind, m: i32, xi: T| -> T {
        match kind {
            BaseKind::Exp => (T::from_int(i128::from(m)) * xi).exp(),
            _ => xi.powi(m),
        }
    };
    let singular = |m: i32| radial_l.is_some() && m < 0;

    let mut table = MomentTable::new(base);
    for &m in &index.one_var {
        match base {
            BaseKind::Exp => exp_ok(m)?,
            _ => power_ok(m, 0)?,
        }
        let val = sampled.integrate(
            |i| {
                let w = sampled.psi[i];
                if w.is_zero() {
                    return T::zero();
                }
                w * w * weight(base, m, sampled.x[i])
            },
            singular(m),
        );
        table.one_var.insert(m, cx(val, T::zero()));
    }
    for &(m, n) in &index.two_var {
        match base {
            BaseKind::Exp => exp_ok(m)?,
            _ => power_ok(m, n)?,
        }
        let dn = &derivs[n as usize];
        let val = sampled.integrate(
            |i| {
                let w = sampled.psi[i];
                if w.is_zero() && !singular(m) {
                    return T::zero();
                }
                w * weight(base, m, sampled.x[i]) * dn[i]
            },
            singular(m),
        );
        table.two_var.insert((m, n), phase_minus_i::<T>(n) * val);
    }
    for &(m, n) in &index.mixed {
        exp_ok(m)?;
        power_ok(n, 0)?;
        let mt = T::from_int(i128::from(m));
        let val = sampled.integrate(
            |i| {
                let w = sampled.psi[i];
                if w.is_zero() {
                    return T::zero();
                }
                let r = sampled.x[i];
                w * w * (mt * r).exp() * r.powi(n)
            },
            n < 0,
        );
        table.mixed.insert((m, n), cx(val, T::zero()));
    }
    Ok(table)
}

fn circle_moments<T: Real>(
    sol: &OracleSolution<T>,
    level: usize,
    index: &MomentIndexSet,
) -> Result<MomentTable<T>, OracleError> {
    if !index.mixed.is_empty() {
        return Err(OracleError::BaseMismatch {
            base: BaseKind::TrigExp,
        });
    }
    let coeffs = &sol
        .fourier
        .as_ref()
        .ok_or(OracleError::BaseMismatch {
            base: BaseKind::TrigExp,
        })?[level];
    let psi = &sol.wavefunctions[level];
    let nodes = &sol.grid.nodes;
    let h = sol.grid.spacing;
    let dim = coeffs.len();
    let inv_sqrt_pi = T::one() / T::PI().sqrt();
    // n-th derivative from the Fourier coefficients:
    // d/dθ (a cos kθ + b sin kθ) = k b cos kθ - k a sin kθ
    let derivative = |order: u32| -> Vec<T> {
        let mut c = coeffs.clone();
        c[0] = if order == 0 { c[0] } else { T::zero() };
        for _ in 0..order {
            let mut next = vec![T::zero(); dim];
            for a in (1..dim).step_by(2) {
                let k = T::from_int(a.div_ceil(2) as i128);
                let (ca, sa) = (c[a], c[a + 1]);
                next[a] = k * sa;
                next[a + 1] = -k * ca;
            }
            c = next;
        }
        if order == 0 {
            return psi.clone();
        }
        nodes
            .iter()
            .map(|&t| {
                let mut acc = T::zero();
                for a in (1..dim).step_by(2) {
                    let arg = T::from_int(a.div_ceil(2) as i128) * t;
                    acc += (c[a] * arg.cos() + c[a + 1] * arg.sin()) * inv_sqrt_pi;
                }
                acc
            })
            .collect()
    };
    let mut derivs: BTreeMap<u32, Vec<T>> = BTreeMap::new();
    derivs.insert(0, psi.clone());
    for &(_, n) in &index.two_var {
        derivs.entry(n).or_insert_with(|| derivative(n));
    }
    let moment = |m: i32, d: &[T]| -> Cx<T> {
        let mt = T::from_int(i128::from(m));
        let mut acc = cx(T::zero(), T::zero());
        for (j, &t) in nodes.iter().enumerate() {
            let w = psi[j] * d[j];
            acc += cx(w * (mt * t).cos(), w * (mt * t).sin());
        }
        acc * h
    };
    let mut table = MomentTable::new(BaseKind::TrigExp);
    for &m in &index.one_var {
        table.one_var.insert(m, moment(m, psi));
    }
    for &(m, n) in &index.two_var {
        let v = moment(m, &derivs[&n]) * phase_minus_i::<T>(n);
        table.two_var.insert((m, n), v);
    }
    Ok(table)
}
