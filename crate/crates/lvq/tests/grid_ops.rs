//! Grid, position operator and discrete derivatives.

mod common;

use common::slope;
use lvq::grid::{first_derivative, fourier_multiply, position_operator, second_derivative, Grid1D, Scheme};
use lvq::sparse::to_complex;
use lvq::Error;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[test]
fn grid_invariants() {
    for (a, b, n) in [(1.0, 400.0, 10), (-3.0, 2.5, 4), (0.0, 1e-3, 7)] {
        let g = Grid1D::new(a, b, n).unwrap();
        assert_eq!(g.len(), 1 << n);
        assert_eq!(g.points()[0], a);
        assert_eq!(*g.points().last().unwrap(), b);
        assert!(((g.delta * (g.len() - 1) as f64) - (b - a)).abs() <= 1e-14 * (b - a));
    }
}

#[test]
fn position_operator_is_diagonal() {
    let x = position_operator(&Grid1D::new(0.0, 3.0, 2).unwrap());
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { i as f64 } else { 0.0 };
            assert_eq!(x.get(i, j), C64::new(want, 0.0));
        }
    }
    let x = position_operator(&Grid1D::new(-1.0, 1.0, 1).unwrap());
    assert_eq!((x.get(0, 0).re, x.get(1, 1).re, x.get(0, 1).re), (-1.0, 1.0, 0.0));
}

#[test]
fn degenerate_domain_rejected() {
    let e = Grid1D::new(2.0, 2.0, 3).unwrap_err();
    assert!(matches!(e, Error::DegenerateDomain(_)));
    assert!(e.to_string().contains("degenerate domain"));
}

#[test]
fn central2_first_row() {
    let p = first_derivative(&Grid1D::new(0.0, 3.0, 2).unwrap(), Scheme::Central2).unwrap().to_csr();
    let row: Vec<C64> = (0..4).map(|j| p.get(0, j)).collect();
    assert_eq!(row, vec![C64::new(0.0, 0.0), C64::new(0.0, -0.5), C64::new(0.0, 0.0), C64::new(0.0, 0.5)]);
}

#[test]
fn constants_are_annihilated() {
    let g = Grid1D::new(0.0, 5.0, 6).unwrap();
    let one = vec![C64::new(1.0, 0.0); g.len()];
    for s in [Scheme::Central2, Scheme::Central4, Scheme::Spectral] {
        for op in [first_derivative(&g, s).unwrap(), second_derivative(&g, s).unwrap()] {
            assert!(op.apply(&one).iter().all(|z| z.norm() < 1e-12), "{s:?}");
        }
    }
}

#[test]
fn central2_first_derivative_second_order() {
    let (mut h, mut e) = (vec![], vec![]);
    for n in 5..=10 {
        let g = Grid1D::new(0.0, 2.0, n).unwrap();
        let k = 2.0 * PI / g.period();
        let f = to_complex(&g.points().iter().map(|&x| (k * x).sin()).collect::<Vec<_>>());
        let pf = first_derivative(&g, Scheme::Central2).unwrap().apply(&f);
        // P = -i d/dx
        let err = g.points().iter().zip(&pf).map(|(&x, z)| (z - C64::new(0.0, -k * (k * x).cos())).norm()).fold(0.0, f64::max);
        h.push(g.delta.ln());
        e.push(err.ln());
    }
    let s = slope(&h, &e);
    assert!((s - 2.0).abs() < 0.1, "slope {s}");
}

#[test]
fn central2_second_derivative_eigenvalues() {
    let g = Grid1D::new(0.0, 7.0, 5).unwrap();
    let n = g.len();
    let op = second_derivative(&g, Scheme::Central2).unwrap();
    for k in 0..n {
        let mode: Vec<C64> = (0..n).map(|j| C64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / n as f64)).collect();
        let lam = 2.0 * (1.0 - (2.0 * PI * k as f64 / n as f64).cos()) / (g.delta * g.delta);
        let out = op.apply(&mode);
        for (o, m) in out.iter().zip(&mode) {
            assert!((o - m * lam).norm() < 1e-10 * lam.max(1.0));
        }
    }
}

#[test]
fn second_derivative_norm_growth() {
    let mut prev: Option<f64> = None;
    for n in 4..=9 {
        let g = Grid1D::new(0.0, 4.0, n).unwrap();
        let m = second_derivative(&g, Scheme::Central2).unwrap().to_csr().max_abs();
        assert!((m - 2.0 / (g.delta * g.delta)).abs() < 1e-12 * m);
        if let Some(p) = prev {
            // 4x per extra qubit up to the (N-1)/N spacing correction
            assert!((m / p - 4.0).abs() < 0.6, "ratio {}", m / p);
        }
        prev = Some(m);
    }
}

#[test]
fn spectral_shift_is_exact_permutation() {
    let g = Grid1D::new(0.0, 1.0, 4).unwrap();
    let n = g.len();
    let x: Vec<C64> = (0..n).map(|j| C64::new((j * j % 7) as f64, (j % 3) as f64)).collect();
    // exp(-i P dx) shifts by one cell
    let sym: Vec<f64> = g.wavenumbers();
    let mut shifted = x.clone();
    let phase: Vec<C64> = sym.iter().map(|k| C64::from_polar(1.0, -k * g.delta)).collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut shifted);
    shifted.iter_mut().zip(&phase).for_each(|(v, p)| *v *= p / n as f64);
    planner.plan_fft_inverse(n).process(&mut shifted);
    for j in 0..n {
        assert!((shifted[(j + 1) % n] - x[j]).norm() < 1e-12);
    }
    // the symbol multiplier and the dense form agree
    let op = first_derivative(&g, Scheme::Spectral).unwrap();
    let a = op.to_csr().apply(&x);
    let b = fourier_multiply(&sym, &x);
    assert!(a.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-10));
    assert!(op.to_csr().hermitian_residual() < 1e-10);
}

#[test]
fn stencil_needs_enough_points() {
    let g = Grid1D::new(0.0, 1.0, 1).unwrap();
    assert!(matches!(first_derivative(&g, Scheme::Central2), Err(Error::StencilExceedsGrid(_))));
    let g = Grid1D::new(0.0, 1.0, 2).unwrap();
    assert!(matches!(second_derivative(&g, Scheme::Central4), Err(Error::StencilExceedsGrid(_))));
}
