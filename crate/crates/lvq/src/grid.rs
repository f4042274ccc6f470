//! Uniform periodic grids and their position / derivative operators.
//!
//! Spacing uses the `(2^n - 1)` denominator so that both endpoints are grid
//! points. Derivatives wrap around periodically with period `N * delta`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::Csr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Central2,
    Central4,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    pub n: u32,
    pub delta: f64,
    pub boundary: Boundary,
    points: Vec<f64>,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: u32) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::DegenerateDomain(format!("need b > a, got a={a}, b={b}")));
        }
        if n == 0 || n > 30 {
            return Err(Error::DegenerateDomain(format!("qubit count n={n} outside 1..=30")));
        }
        let npts = 1usize << n;
        let delta = (b - a) / (npts - 1) as f64;
        let mut points: Vec<f64> = (0..npts).map(|j| a + j as f64 * delta).collect();
        points[npts - 1] = b;
        Ok(Grid1D { a, b, n, delta, boundary: Boundary::Periodic, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Period of the wraparound, `N * delta`.
    pub fn period(&self) -> f64 {
        self.len() as f64 * self.delta
    }

    /// Index of the grid point nearest to `x` (clamped to the grid).
    pub fn nearest(&self, x: f64) -> usize {
        let j = ((x - self.a) / self.delta).round();
        j.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Angular wavenumbers in natural FFT order: `2 pi k / (N delta)` with
    /// `k = 0, 1, ..., N/2 - 1, -N/2, ..., -1`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        fft_wavenumbers(self.len(), self.delta)
    }
}

pub fn fft_wavenumbers(npts: usize, delta: f64) -> Vec<f64> {
    (0..npts)
        .map(|k| {
            let ks = if k < npts / 2 { k as f64 } else { k as f64 - npts as f64 };
            2.0 * PI * ks / (npts as f64 * delta)
        })
        .collect()
}

pub fn position_operator(g: &Grid1D) -> Csr {
    Csr::from_real_diag(g.points())
}

/// A discrete derivative: sparse stencil or Fourier multiplier.
#[derive(Debug, Clone)]
pub enum DerivativeOp {
    Stencil(Csr),
    /// Diagonal in Fourier space with the given symbol (natural FFT order).
    Fourier { symbol: Vec<f64> },
}

impl DerivativeOp {
    pub fn dim(&self) -> usize {
        match self {
            DerivativeOp::Stencil(m) => m.nrows,
            DerivativeOp::Fourier { symbol } => symbol.len(),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        match self {
            DerivativeOp::Stencil(m) => m.apply(x),
            DerivativeOp::Fourier { symbol } => fourier_multiply(symbol, x),
        }
    }

    /// Eigenvalues on the Fourier modes `exp(2 pi i k j / N)`, natural FFT
    /// order. Real for Hermitian operators.
    pub fn symbol(&self) -> Vec<C64> {
        match self {
            DerivativeOp::Fourier { symbol } => symbol.iter().map(|&s| C64::new(s, 0.0)).collect(),
            DerivativeOp::Stencil(m) => {
                let n = m.nrows;
                (0..n)
                    .map(|k| {
                        (0..n)
                            .map(|j| m.get(0, j) * C64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / n as f64))
                            .sum()
                    })
                    .collect()
            }
        }
    }

    /// Sparse form. Spectral operators come back dense-in-CSR.
    pub fn to_csr(&self) -> Csr {
        match self {
            DerivativeOp::Stencil(m) => m.clone(),
            DerivativeOp::Fourier { symbol } => {
                let n = symbol.len();
                let mut trips = Vec::with_capacity(n * n);
                let mut e = vec![C64::new(0.0, 0.0); n];
                for j in 0..n {
                    e.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                    e[j] = C64::new(1.0, 0.0);
                    let col = fourier_multiply(symbol, &e);
                    for (i, v) in col.into_iter().enumerate() {
                        if v.norm() > 1e-300 {
                            trips.push((i, j, v));
                        }
                    }
                }
                Csr::from_triplets(n, n, &trips)
            }
        }
    }
}

/// `ifft(symbol * fft(x))` with unitary normalisation overall.
pub fn fourier_multiply(symbol: &[f64], x: &[C64]) -> Vec<C64> {
    let n = x.len();
    let mut planner = FftPlanner::new();
    let mut buf = x.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    for (v, s) in buf.iter_mut().zip(symbol) {
        *v *= s / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

fn stencil_check(g: &Grid1D, scheme: Scheme) -> Result<()> {
    let need = match scheme {
        Scheme::Central2 => 3,
        Scheme::Central4 => 5,
        Scheme::Spectral => 2,
    };
    if g.len() < need {
        return Err(Error::StencilExceedsGrid(format!("{scheme:?} needs N >= {need}, grid has {}", g.len())));
    }
    Ok(())
}

fn circulant(npts: usize, offsets: &[(isize, C64)]) -> Csr {
    let mut trips = Vec::with_capacity(npts * offsets.len());
    for i in 0..npts {
        for &(o, v) in offsets {
            let j = (i as isize + o).rem_euclid(npts as isize) as usize;
            trips.push((i, j, v));
        }
    }
    Csr::from_triplets(npts, npts, &trips)
}

/// Real central difference for d/dx (no `-i` factor).
pub fn real_first_difference(g: &Grid1D) -> Result<Csr> {
    stencil_check(g, Scheme::Central2)?;
    let h = 1.0 / (2.0 * g.delta);
    Ok(circulant(g.len(), &[(-1, C64::new(-h, 0.0)), (1, C64::new(h, 0.0))]))
}

/// Real central difference for d2/dx2.
pub fn real_second_difference(g: &Grid1D) -> Result<Csr> {
    stencil_check(g, Scheme::Central2)?;
    let h = 1.0 / (g.delta * g.delta);
    Ok(circulant(g.len(), &[(-1, C64::new(h, 0.0)), (0, C64::new(-2.0 * h, 0.0)), (1, C64::new(h, 0.0))]))
}

/// Momentum operator `P = -i d/dx`.
pub fn first_derivative(g: &Grid1D, scheme: Scheme) -> Result<DerivativeOp> {
    stencil_check(g, scheme)?;
    let npts = g.len();
    let dx = g.delta;
    let i = C64::new(0.0, 1.0);
    Ok(match scheme {
        Scheme::Central2 => {
            let h = 1.0 / (2.0 * dx);
            DerivativeOp::Stencil(circulant(npts, &[(-1, i * h), (1, -i * h)]))
        }
        Scheme::Central4 => {
            let h = 1.0 / (12.0 * dx);
            // d/dx weights (1, -8, 0, 8, -1)/(12 dx), times -i
            DerivativeOp::Stencil(circulant(
                npts,
                &[(-2, -i * h), (-1, i * 8.0 * h), (1, -i * 8.0 * h), (2, i * h)],
            ))
        }
        // The Nyquist mode keeps -pi/dx, so a shift by whole cells is an exact
        // permutation of grid values.
        Scheme::Spectral => DerivativeOp::Fourier { symbol: g.wavenumbers() },
    })
}

/// `P^2 = -d2/dx2`, positive semidefinite.
pub fn second_derivative(g: &Grid1D, scheme: Scheme) -> Result<DerivativeOp> {
    stencil_check(g, scheme)?;
    let npts = g.len();
    let dx2 = g.delta * g.delta;
    let r = |v: f64| C64::new(v, 0.0);
    Ok(match scheme {
        Scheme::Central2 => DerivativeOp::Stencil(circulant(
            npts,
            &[(-1, r(-1.0 / dx2)), (0, r(2.0 / dx2)), (1, r(-1.0 / dx2))],
        )),
        Scheme::Central4 => {
            let h = 1.0 / (12.0 * dx2);
            DerivativeOp::Stencil(circulant(
                npts,
                &[(-2, r(h)), (-1, r(-16.0 * h)), (0, r(30.0 * h)), (1, r(-16.0 * h)), (2, r(h))],
            ))
        }
        Scheme::Spectral => DerivativeOp::Fourier { symbol: g.wavenumbers().iter().map(|k| k * k).collect() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_small_grid() {
        let g = Grid1D::new(0.0, 3.0, 2).unwrap();
        assert_eq!(g.delta, 1.0);
        let x = position_operator(&g);
        for j in 0..4 {
            assert_eq!(x.get(j, j).re, j as f64);
        }
        let g = Grid1D::new(-1.0, 1.0, 1).unwrap();
        assert_eq!(g.points(), &[-1.0, 1.0]);
        assert!(matches!(Grid1D::new(2.0, 2.0, 3), Err(Error::DegenerateDomain(_))));
    }

    #[test]
    fn central2_first_row() {
        let g = Grid1D::new(0.0, 3.0, 2).unwrap();
        let p = first_derivative(&g, Scheme::Central2).unwrap().to_csr();
        assert_eq!(p.get(0, 0), C64::new(0.0, 0.0));
        assert_eq!(p.get(0, 1), C64::new(0.0, -0.5));
        assert_eq!(p.get(0, 2), C64::new(0.0, 0.0));
        assert_eq!(p.get(0, 3), C64::new(0.0, 0.5));
    }

    #[test]
    fn stencil_too_big() {
        let g = Grid1D::new(0.0, 1.0, 2).unwrap();
        assert!(matches!(first_derivative(&g, Scheme::Central4), Err(Error::StencilExceedsGrid(_))));
    }
}
