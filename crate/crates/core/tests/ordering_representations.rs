//! Canonical orderings checked against explicit matrix representations of
//! the Heisenberg algebra.
//!
//! * power base: harmonic-oscillator ladder basis truncated at 60 states
//! * exponential base: the functions `e^{kx}`, where `p` is `-ik` and `e^{mx}`
//!   shifts `k` by `m`
//! * trigonometric base: the Fourier modes `e^{ikθ}`, where `p` is `k`

use nalgebra::DMatrix;
use num_complex::Complex;
use qm_bootstrap::ordering::{canonicalize_p_base_p, BaseKind, OperatorPolynomial};

type M = DMatrix<Complex<f64>>;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn pow(m: &M, k: u32) -> M {
    let mut out = M::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

struct Rep {
    p: M,
    base: Box<dyn Fn(i32) -> M>,
    /// Leading or central block where truncation cannot reach.
    block: std::ops::Range<usize>,
}

fn ladder_rep(n: usize, degree: u32) -> Rep {
    let mut a = M::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * c(s, 0.0);
    let p = (&ad - &a) * c(0.0, s);
    Rep {
        p,
        base: Box::new(move |m| pow(&x, m as u32)),
        block: 0..n - 1 - degree as usize,
    }
}

fn shift_rep(half: i32, p_of_k: fn(f64) -> Complex<f64>) -> Rep {
    let n = (2 * half + 1) as usize;
    let p = M::from_fn(n, n, |i, j| if i == j { p_of_k(i as f64 - half as f64) } else { c(0.0, 0.0) });
    Rep {
        p,
        base: Box::new(move |m| {
            M::from_fn(n, n, |i, j| {
                if i as i64 == j as i64 + m as i64 {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
        }),
        block: 8..n - 8,
    }
}

fn represent(rep: &Rep, poly: &OperatorPolynomial) -> M {
    let n = rep.p.nrows();
    let mut out = M::zeros(n, n);
    for t in poly.terms() {
        let coeff = c(t.coeff.re as f64, t.coeff.im as f64);
        out += (rep.base)(t.base_power) * pow(&rep.p, t.p_power) * coeff;
    }
    out
}

fn max_block_diff(rep: &Rep, a: u32, m: i32, cc: u32, base: BaseKind) -> f64 {
    let poly = canonicalize_p_base_p(a, base, m, cc).unwrap();
    let direct = pow(&rep.p, a) * (rep.base)(m) * pow(&rep.p, cc);
    let canon = represent(rep, &poly);
    let mut scale: f64 = 1.0;
    let mut diff: f64 = 0.0;
    for i in rep.block.clone() {
        for j in rep.block.clone() {
            scale = scale.max(direct[(i, j)].norm());
            diff = diff.max((direct[(i, j)] - canon[(i, j)]).norm());
        }
    }
    diff / scale
}

#[test]
fn ladder_representation_satisfies_ccr() {
    let rep = ladder_rep(30, 2);
    let x = (rep.base)(1);
    let comm = &x * &rep.p - &rep.p * &x;
    for i in 0..28 {
        for j in 0..28 {
            let want = if i == j { c(0.0, 1.0) } else { c(0.0, 0.0) };
            assert!((comm[(i, j)] - want).norm() < 1e-12);
        }
    }
}

#[test]
fn power_base_triples() {
    for a in 0..=4 {
        for m in 0..=4 {
            for cc in 0..=4 {
                let rep = ladder_rep(60, a + m as u32 + cc);
                let d = max_block_diff(&rep, a, m, cc, BaseKind::Power);
                assert!(d < 1e-9, "p^{a} x^{m} p^{cc}: relative difference {d:e}");
            }
        }
    }
}

#[test]
fn exponential_base_triples() {
    let rep = shift_rep(30, |k| c(0.0, -k));
    for a in 0..=4 {
        for m in -3..=3 {
            for cc in 0..=4 {
                let d = max_block_diff(&rep, a, m, cc, BaseKind::Exp);
                assert!(d < 1e-9, "p^{a} e^({m}x) p^{cc}: relative difference {d:e}");
            }
        }
    }
}

#[test]
fn trigonometric_base_triples() {
    let rep = shift_rep(30, |k| c(k, 0.0));
    for a in 0..=4 {
        for m in -3..=3 {
            for cc in 0..=4 {
                let d = max_block_diff(&rep, a, m, cc, BaseKind::TrigExp);
                assert!(d < 1e-9, "p^{a} e^({m}iθ) p^{cc}: relative difference {d:e}");
            }
        }
    }
}
