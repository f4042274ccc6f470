//! Closed-form resource bookkeeping for the quantum pipeline and the
//! classical baselines.
//!
//! Exact gate counts are labelled `Exact`. Big-O expressions are evaluated
//! with every constant set to 1 and labelled `Asymptotic`. Qubit-count logs
//! (`n log n`) are base 2; precision logs (`log 1/eps`) are natural.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    Exact,
    Asymptotic,
}

/// Row sparsity of the unclocked main-register Hamiltonian (Central2).
pub const SPARSITY_MAIN: usize = 3;
/// Row sparsity once the clock register adds its two neighbours.
pub const SPARSITY_CLOCKED: usize = 5;

/// `sigma_max^2 max(|a|,|b|)^2 2^{2n}`
pub fn hamiltonian_norm_bound(sigma_max: f64, a: f64, b: f64, n: u32) -> f64 {
    let x = a.abs().max(b.abs());
    sigma_max * sigma_max * x * x * 4f64.powi(n as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormComparison {
    pub bound: f64,
    pub measured: f64,
    pub ratio: f64,
}

pub fn compare_norm(bound: f64, measured: f64) -> NormComparison {
    NormComparison { bound, measured, ratio: measured / bound }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationParams {
    pub sparsity: usize,
    pub h_max: f64,
    pub t: f64,
    pub eps_evol: f64,
    pub n: u32,
    pub n_w: u32,
    pub n_y: u32,
    pub d_s: usize,
    pub d_t: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationCost {
    pub gamma: f64,
    /// `gamma + log(gamma/eps) / log log(gamma/eps)`
    pub queries: f64,
    /// Additional gates per query, `n + n_w + n_y` (the `m polylog m`
    /// precision term is left symbolic).
    pub extra_gates: f64,
    /// `gamma + log(1/eps) / log(e + log(1/eps)/gamma)`
    pub hamsim_factor: f64,
    /// `D_s n log n + s n + n_w log n_w + D_t n_y log n_y`
    pub block_encoding: f64,
    pub gates: f64,
    /// Validity condition of the gate bound with unit constant.
    pub valid: bool,
    /// Block-encoding ancilla parameter `c`, symbolic, plus its unit-constant value.
    pub c_symbolic: String,
    pub c_unit: f64,
    pub kind: CountKind,
}

fn log2(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        x.log2()
    }
}

/// `L / ln L` for `L > e`, continued as `L` below so it stays monotone.
fn log_over_loglog(l: f64) -> f64 {
    if l > E {
        l / l.ln()
    } else {
        l.max(0.0)
    }
}

pub fn simulation_cost(p: &SimulationParams) -> SimulationCost {
    let gamma = p.sparsity as f64 * p.h_max * p.t;
    let queries = gamma + log_over_loglog((gamma / p.eps_evol).ln());
    let l = (1.0 / p.eps_evol).ln();
    let tail = if gamma > 0.0 { l / (E + l / gamma).ln() } else { 0.0 };
    let hamsim = gamma + tail;
    let (n, nw, ny) = (p.n as f64, p.n_w as f64, p.n_y as f64);
    let be = p.d_s as f64 * n * log2(n) + p.sparsity as f64 * n + nw * log2(nw) + p.d_t as f64 * ny * log2(ny);
    SimulationCost {
        gamma,
        queries,
        extra_gates: n + nw + ny,
        hamsim_factor: hamsim,
        block_encoding: be,
        gates: hamsim * be,
        valid: gamma <= tail,
        c_symbolic: "O(log n + log n_y + log n_w)".into(),
        c_unit: log2(n) + log2(ny) + log2(nw),
        kind: CountKind::Asymptotic,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrepKind {
    PiecewisePoly { n: u32, degrees: Vec<usize> },
    GaussianDelta { n: u32, omega: f64, eps_prep: f64 },
    Comparator { n: u32 },
    PayoffState { n: u32 },
    SwapTest { n: u32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct PrepCost {
    pub label: String,
    pub cnots: f64,
    pub ancillas: u32,
    /// Polynomial degree, where one is involved.
    pub degree: Option<f64>,
    pub kind: CountKind,
}

/// Degree bound `(log 1/eps + log 1/omega) / log(1 + 2 omega log 1/eps)`.
pub fn gaussian_degree(omega: f64, eps_prep: f64) -> f64 {
    let le = (1.0 / eps_prep).ln();
    (le + (1.0 / omega).ln()) / (1.0 + 2.0 * omega * le).ln()
}

pub fn stateprep_cost(kind: &PrepKind) -> PrepCost {
    match kind {
        PrepKind::PiecewisePoly { n, degrees } => {
            let q: usize = degrees.iter().sum();
            let nf = *n as f64;
            PrepCost { label: "piecewise polynomial".into(), cnots: q as f64 * nf * log2(nf), ancillas: n.saturating_sub(1), degree: Some(q as f64), kind: CountKind::Asymptotic }
        }
        PrepKind::GaussianDelta { n, omega, eps_prep } => {
            let q = gaussian_degree(*omega, *eps_prep);
            let nf = *n as f64;
            PrepCost { label: "gaussian delta".into(), cnots: nf * log2(nf) * q, ancillas: n.saturating_sub(1), degree: Some(q), kind: CountKind::Asymptotic }
        }
        PrepKind::Comparator { n } => {
            let n = *n as f64;
            PrepCost { label: "comparator".into(), cnots: 12.0 * n - 4.0, ancillas: (n as u32).saturating_sub(1), degree: None, kind: CountKind::Exact }
        }
        PrepKind::PayoffState { n } => {
            let nf = *n as f64;
            PrepCost { label: "payoff state".into(), cnots: 6.0 * nf * nf - 4.0 * nf + 6.0, ancillas: n.saturating_sub(1), degree: None, kind: CountKind::Exact }
        }
        PrepKind::SwapTest { n } => {
            PrepCost { label: "swap test".into(), cnots: 7.0 * *n as f64, ancillas: 1, degree: None, kind: CountKind::Exact }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiAssetScaling {
    pub d: u32,
    /// `d^2`
    pub norm_factor: f64,
    /// `d^2 s^2`
    pub sparsity_factor: f64,
    /// `d`
    pub block_encoding_factor: f64,
    /// Product of the three relative to d = 1, i.e. `d^5`.
    pub relative_cost: f64,
    /// `d n`
    pub prep_cost: f64,
}

pub fn multiasset_scaling(d: u32, n: u32, sparsity: usize) -> MultiAssetScaling {
    let df = d as f64;
    let s2 = (sparsity * sparsity) as f64;
    let norm = df * df;
    let sp = df * df * s2;
    let be = df;
    MultiAssetScaling { d, norm_factor: norm, sparsity_factor: sp, block_encoding_factor: be, relative_cost: norm * (sp / s2) * be, prep_cost: df * n as f64 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalMethod {
    FiniteDifference,
    ExponentialIntegrator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalCost {
    pub flops: f64,
    pub memory: f64,
    pub kind: CountKind,
}

/// `s T N^3` operations and `s N` stored entries, either method.
pub fn classical_flops(npts: f64, t: f64, sparsity: usize, _method: ClassicalMethod) -> ClassicalCost {
    let s = sparsity as f64;
    ClassicalCost { flops: s * t * npts.powi(3), memory: s * npts, kind: CountKind::Asymptotic }
}

/// Repetitions for post-selection: `|p0|^2/|p(T)|^2 log(1/eps_schr)`.
pub fn postselection_repetitions(p0_norm: f64, pt_norm: f64, eps_schr: f64) -> f64 {
    (p0_norm / pt_norm).powi(2) * (1.0 / eps_schr).ln()
}

/// Shots for a target price precision, `1/eps^2`.
pub fn swap_test_shots(eps_v: f64) -> f64 {
    1.0 / (eps_v * eps_v)
}

/// Quantum `N^2 log N log log N` against classical `N^3`, unit constants.
pub fn scaling_comparison(npts: f64) -> (f64, f64) {
    let l = npts.log2().max(1.0);
    (npts * npts * l * l.log2().max(1.0), npts.powi(3))
}
