//! Payoff states, emulated swap tests and the closed-form price assembly.
//!
//! Payoffs follow the usual convention: call `(s - K)+`, put `(K - s)+`.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::sparse::{dot, norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffKind {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffSpec {
    pub kind: PayoffKind,
    pub strike: f64,
}

impl PayoffSpec {
    pub fn eval(&self, s: f64) -> f64 {
        match self.kind {
            PayoffKind::Call => (s - self.strike).max(0.0),
            PayoffKind::Put => (self.strike - s).max(0.0),
        }
    }

    /// Boundary grid index: last point `<= K` for puts, first `>= K` for calls.
    pub fn kappa(&self, g: &Grid1D) -> usize {
        let x = g.points();
        match self.kind {
            PayoffKind::Put => x.iter().rposition(|&v| v <= self.strike).unwrap_or(0),
            PayoffKind::Call => x.iter().position(|&v| v >= self.strike).unwrap_or(x.len() - 1),
        }
    }

    /// `(b - K)^{3/2}` for calls, `(K - a)^{3/2}` for puts.
    pub fn ramp_factor(&self, g: &Grid1D) -> f64 {
        match self.kind {
            PayoffKind::Call => (g.b - self.strike).powf(1.5),
            PayoffKind::Put => (self.strike - g.a).powf(1.5),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PayoffState {
    pub amps: Vec<f64>,
    /// Exact discrete 2-norm of the unnormalised payoff samples.
    pub norm_exact: f64,
    /// Continuum approximation `ramp / sqrt(3 dx)`.
    pub norm_continuum: f64,
    pub kappa: usize,
}

pub fn payoff_state(spec: &PayoffSpec, g: &Grid1D) -> Result<PayoffState> {
    if !(spec.strike > g.a && spec.strike < g.b) {
        return Err(Error::Range(format!("strike {} outside ({}, {})", spec.strike, g.a, g.b)));
    }
    let raw: Vec<f64> = g.points().iter().map(|&x| spec.eval(x)).collect();
    let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(PayoffState {
        amps: raw.iter().map(|v| v / n).collect(),
        norm_exact: n,
        norm_continuum: spec.ramp_factor(g) / (3.0 * g.delta).sqrt(),
        kappa: spec.kappa(g),
    })
}

/// `|f|_2^2 / (2 |f|_max^2)` of the sampled payoff, normalised by the
/// number of points so it has a continuum limit.
pub fn filling_ratio(spec: &PayoffSpec, g: &Grid1D) -> f64 {
    let raw: Vec<f64> = g.points().iter().map(|&x| spec.eval(x)).collect();
    let l2: f64 = raw.iter().map(|v| v * v).sum::<f64>() / raw.len() as f64;
    let mx = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    l2 / (2.0 * mx * mx)
}

/// Estimate of `|<u|v>|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapEstimate {
    pub value: f64,
    pub stderr: f64,
    pub exact: f64,
    /// 0 means exact mode.
    pub shots: u64,
}

/// Swap test on normalised `u`, `v`. `shots == 0` returns the exact value.
/// Otherwise the ancilla outcome count is Binomial(shots, (1+F)/2) and is
/// mapped back through `F = 2 k/shots - 1`, clamped to [0, 1].
pub fn swap_test_overlap(u: &[C64], v: &[C64], shots: u64, seed: u64) -> Result<OverlapEstimate> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("{} vs {}", u.len(), v.len())));
    }
    for (name, x) in [("u", u), ("v", v)] {
        let nx = norm(x);
        if (nx - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(format!("|{name}| = {nx}")));
        }
    }
    let exact = dot(u, v).norm_sqr().min(1.0);
    if shots == 0 {
        return Ok(OverlapEstimate { value: exact, stderr: 0.0, exact, shots });
    }
    let q = 0.5 * (1.0 + exact);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = Binomial::new(shots, q).map_err(|e| Error::Range(e.to_string()))?.sample(&mut rng);
    let qhat = k as f64 / shots as f64;
    let value = (2.0 * qhat - 1.0).clamp(0.0, 1.0);
    let stderr = 2.0 * (qhat * (1.0 - qhat) / shots as f64).sqrt();
    Ok(OverlapEstimate { value, stderr, exact, shots })
}

#[derive(Debug, Clone, Serialize)]
pub struct PricingResult {
    pub kind: PayoffKind,
    pub strike: f64,
    pub value: f64,
    pub stderr: f64,
    /// |<+^n|p(T)>|^2
    pub f1: OverlapEstimate,
    /// |<C0|p(T)>|^2
    pub f2: OverlapEstimate,
    pub shots: u64,
    pub dx: f64,
    pub discount: f64,
    /// Value from the exact overlaps, for reference.
    pub value_exact_overlaps: f64,
    /// 95% interval from the standard error.
    pub ci95: (f64, f64),
}

/// Price from the two overlaps:
/// `V = e^{-rT} ramp / sqrt(3(b-a)) * sqrt((2^n-1)/2^n) * sqrt(F2/F1)`.
pub fn price_from_overlaps(f1: OverlapEstimate, f2: OverlapEstimate, spec: &PayoffSpec, g: &Grid1D, r: f64, maturity: f64) -> Result<PricingResult> {
    let npts = g.len() as f64;
    let pref = spec.ramp_factor(g) / (3.0 * (g.b - g.a)).sqrt() * ((npts - 1.0) / npts).sqrt();
    let discount = (-r * maturity).exp();
    let formula = |a: f64, b: f64| -> Result<f64> {
        if !(a > 0.0) {
            return Err(Error::UniformOverlapUnderflow(a));
        }
        Ok(discount * pref * (b / a).sqrt())
    };
    let value = if pref == 0.0 { 0.0 } else { formula(f1.value, f2.value)? };
    let value_exact = if pref == 0.0 { 0.0 } else { formula(f1.exact, f2.exact)? };
    let rel = |e: &OverlapEstimate| if e.value > 0.0 { e.stderr / e.value } else { 0.0 };
    let stderr = value * 0.5 * (rel(&f1).powi(2) + rel(&f2).powi(2)).sqrt();
    Ok(PricingResult {
        kind: spec.kind,
        strike: spec.strike,
        value,
        stderr,
        f1,
        f2,
        shots: f1.shots.max(f2.shots),
        dx: g.delta,
        discount,
        value_exact_overlaps: value_exact,
        ci95: (value - 1.96 * stderr, value + 1.96 * stderr),
    })
}

/// Normalised uniform superposition `|+^n>`.
pub fn uniform_state(npts: usize) -> Vec<C64> {
    vec![C64::new(1.0 / (npts as f64).sqrt(), 0.0); npts]
}

/// Both swap tests on a recovered density and the price. The two tests use
/// seeds `seed` and `seed + 1`.
pub fn price_density(p: &[f64], spec: &PayoffSpec, g: &Grid1D, r: f64, maturity: f64, shots: u64, seed: u64) -> Result<PricingResult> {
    let pn = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(pn > 0.0) {
        return Err(Error::UniformOverlapUnderflow(0.0));
    }
    let pv: Vec<C64> = p.iter().map(|&v| C64::new(v / pn, 0.0)).collect();
    let c0 = payoff_state(spec, g)?;
    let cv: Vec<C64> = c0.amps.iter().map(|&v| C64::new(v, 0.0)).collect();
    let f1 = swap_test_overlap(&uniform_state(g.len()), &pv, shots, seed)?;
    let f2 = swap_test_overlap(&cv, &pv, shots, seed.wrapping_add(1))?;
    price_from_overlaps(f1, f2, spec, g, r, maturity)
}

/// Direct Riemann sum `e^{-rT} sum f(x_j) p_j dx`.
pub fn quadrature_price(p: &[f64], spec: &PayoffSpec, g: &Grid1D, r: f64, maturity: f64) -> f64 {
    (-r * maturity).exp() * g.points().iter().zip(p).map(|(&x, &pj)| spec.eval(x) * pj).sum::<f64>() * g.delta
}
