//! Discretised Kolmogorov generators, the expanded pseudo-Hamiltonian and the
//! lognormal reference density.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{first_derivative, real_first_difference, real_second_difference, second_derivative, Grid1D, Scheme};
use crate::sparse::Csr;
use crate::volatility::VolSurface;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    ForwardL,
    BackwardL,
    PseudoHamiltonian,
    ExtendedHermitian,
    ClockHermitian,
}

#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    pub matrix: Csr,
    pub role: Role,
    pub grid: Grid1D,
    /// Time at which coefficients were frozen.
    pub tau: Option<f64>,
    pub r: f64,
}

impl GeneratorMatrix {
    /// Largest |column sum| relative to the largest entry.
    pub fn column_sum_residual(&self) -> f64 {
        let m = self.matrix.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.matrix.column_sums().iter().map(|c| c.norm()).fold(0.0, f64::max) / m
    }

    pub fn hermitian_residual(&self) -> f64 {
        let m = self.matrix.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.matrix.hermitian_residual() / m
    }
}

/// How the backward generator treats the two domain edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackwardBoundary {
    /// Same circulant stencils as everywhere else.
    #[default]
    Periodic,
    /// Zero second derivative at the edges (payoffs are linear far from the
    /// strike) and one-sided inward drift; nothing wraps around.
    LinearityClosure,
}

fn diag_c(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn sigma_column(g: &Grid1D, v: &VolSurface, tau: f64) -> Result<Vec<(f64, f64, f64)>> {
    g.points().iter().map(|&x| v.sigma_derivatives(x, tau)).collect()
}

/// Forward generator in divergence form:
/// `L = -D1 diag(r x) + D2 diag(sigma^2 x^2 / 2)`, so `dp/dtau = L p`.
pub fn build_forward_generator(g: &Grid1D, v: &VolSurface, r: f64, tau: f64) -> Result<GeneratorMatrix> {
    let sig = sigma_column(g, v, tau)?;
    let x = g.points();
    let drift: Vec<f64> = x.iter().map(|&xi| r * xi).collect();
    let diff: Vec<f64> = x.iter().zip(&sig).map(|(&xi, s)| 0.5 * s.0 * s.0 * xi * xi).collect();
    let d1 = real_first_difference(g)?;
    let d2 = real_second_difference(g)?;
    let l = d2.right_diag(&diag_c(&diff)).sub(&d1.right_diag(&diag_c(&drift)));
    Ok(GeneratorMatrix { matrix: l, role: Role::ForwardL, grid: g.clone(), tau: Some(tau), r })
}

/// Backward generator `diag(sigma^2(x, T - t) x^2 / 2) D2 + diag(r x) D1`,
/// so `dC/dt = L_b C` in time-to-maturity `t`.
pub fn build_backward_generator(
    g: &Grid1D,
    v: &VolSurface,
    r: f64,
    t: f64,
    horizon: f64,
    boundary: BackwardBoundary,
) -> Result<GeneratorMatrix> {
    let sig = sigma_column(g, v, (horizon - t).max(0.0))?;
    let x = g.points();
    let n = g.len();
    let mut drift: Vec<f64> = x.iter().map(|&xi| r * xi).collect();
    let mut diff: Vec<f64> = x.iter().zip(&sig).map(|(&xi, s)| 0.5 * s.0 * s.0 * xi * xi).collect();
    let (d1, d2) = (real_first_difference(g)?, real_second_difference(g)?);
    let mut lb = d2.left_diag(&diag_c(&diff));
    if boundary == BackwardBoundary::LinearityClosure {
        let (r0, rn) = (drift[0], drift[n - 1]);
        drift[0] = 0.0;
        drift[n - 1] = 0.0;
        diff[0] = 0.0;
        diff[n - 1] = 0.0;
        lb = d2.left_diag(&diag_c(&diff)).add(&d1.left_diag(&diag_c(&drift)));
        let h = 1.0 / g.delta;
        let c = |v: f64| C64::new(v, 0.0);
        let edge = Csr::from_triplets(
            n,
            n,
            &[(0, 0, c(-r0 * h)), (0, 1, c(r0 * h)), (n - 1, n - 2, c(-rn * h)), (n - 1, n - 1, c(rn * h))],
        );
        lb = lb.add(&edge);
    } else {
        lb = lb.add(&d1.left_diag(&diag_c(&drift)));
    }
    Ok(GeneratorMatrix { matrix: lb, role: Role::BackwardL, grid: g.clone(), tau: Some(t), r })
}

/// `H_LV = -i A + B P + C P^2` with the coefficient columns kept alongside.
#[derive(Debug, Clone)]
pub struct PseudoHamiltonian {
    pub h: GeneratorMatrix,
    /// `A = r - sigma^2 - 4 sigma sigma_x x - sigma_x^2 x^2 - sigma sigma_xx x^2`
    pub a: Vec<f64>,
    /// `B = r x - 2 sigma^2 x - 2 sigma sigma_x x^2`
    pub b: Vec<f64>,
    /// `C = -(i/2) sigma^2 x^2`
    pub c: Vec<C64>,
}

pub fn build_pseudo_hamiltonian(g: &Grid1D, v: &VolSurface, r: f64, tau: f64) -> Result<PseudoHamiltonian> {
    let sig = sigma_column(g, v, tau)?;
    let x = g.points();
    let mut a = Vec::with_capacity(g.len());
    let mut b = Vec::with_capacity(g.len());
    let mut c = Vec::with_capacity(g.len());
    for (&xi, &(s, sx, sxx)) in x.iter().zip(&sig) {
        a.push(r - s * s - 4.0 * s * sx * xi - sx * sx * xi * xi - s * sxx * xi * xi);
        b.push(r * xi - 2.0 * s * s * xi - 2.0 * s * sx * xi * xi);
        c.push(C64::new(0.0, -0.5 * s * s * xi * xi));
    }
    let p = first_derivative(g, Scheme::Central2)?.to_csr();
    let p2 = second_derivative(g, Scheme::Central2)?.to_csr();
    let minus_ia: Vec<C64> = a.iter().map(|&ai| C64::new(0.0, -ai)).collect();
    let h = Csr::from_diag(&minus_ia).add(&p.left_diag(&diag_c(&b))).add(&p2.left_diag(&c));
    Ok(PseudoHamiltonian {
        h: GeneratorMatrix { matrix: h, role: Role::PseudoHamiltonian, grid: g.clone(), tau: Some(tau), r },
        a,
        b,
        c,
    })
}

/// Lognormal density of `S_tau` started at `S0`, sampled on the grid
/// (zero at non-positive prices).
pub fn analytic_lognormal(s0: f64, r: f64, sigma: f64, tau: f64, g: &Grid1D) -> Result<Vec<f64>> {
    if !(tau > 0.0) {
        return Err(Error::Range(format!("lognormal needs tau > 0, got {tau}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::Range(format!("lognormal needs sigma > 0, got {sigma}")));
    }
    if !(s0 > g.a && s0 < g.b) {
        return Err(Error::Range(format!("S0 = {s0} outside ({}, {})", g.a, g.b)));
    }
    let gamma = (r - 0.5 * sigma * sigma) * tau + s0.ln();
    let var = sigma * sigma * tau;
    Ok(g.points()
        .iter()
        .map(|&x| {
            if x <= 0.0 {
                0.0
            } else {
                let z = x.ln() - gamma;
                (-z * z / (2.0 * var)).exp() / (x * (2.0 * PI * var).sqrt())
            }
        })
        .collect())
}

/// Starting density of the forward problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDensity {
    /// `1/dx` at the grid point nearest to S0.
    GridDelta,
    /// Gaussian bump of standard deviation `width_dx * dx` centred on S0.
    Gaussian { width_dx: f64 },
    /// Lognormal at a small time `tau0` using `sigma(S0, 0)`; the forward
    /// solve then covers `[tau0, T]`.
    ShortTimeLognormal { tau0: f64 },
}

impl Default for InitialDensity {
    fn default() -> Self {
        InitialDensity::ShortTimeLognormal { tau0: 0.1 }
    }
}

impl InitialDensity {
    pub fn start_time(&self) -> f64 {
        match self {
            InitialDensity::ShortTimeLognormal { tau0 } => *tau0,
            _ => 0.0,
        }
    }

    /// Density samples with unit discrete mass `sum p dx = 1`.
    pub fn build(&self, g: &Grid1D, v: &VolSurface, s0: f64, r: f64) -> Result<Vec<f64>> {
        if !(s0 > g.a && s0 < g.b) {
            return Err(Error::Range(format!("S0 = {s0} outside ({}, {})", g.a, g.b)));
        }
        let mut p = match *self {
            InitialDensity::GridDelta => {
                let mut p = vec![0.0; g.len()];
                p[g.nearest(s0)] = 1.0;
                p
            }
            InitialDensity::Gaussian { width_dx } => {
                if !(width_dx > 0.0) {
                    return Err(Error::Range("gaussian width must be positive".into()));
                }
                let w = width_dx * g.delta;
                g.points().iter().map(|&x| (-(x - s0) * (x - s0) / (2.0 * w * w)).exp()).collect()
            }
            InitialDensity::ShortTimeLognormal { tau0 } => analytic_lognormal(s0, r, v.sigma(s0, 0.0)?, tau0, g)?,
        };
        let mass: f64 = p.iter().sum::<f64>() * g.delta;
        p.iter_mut().for_each(|x| *x /= mass);
        Ok(p)
    }
}
