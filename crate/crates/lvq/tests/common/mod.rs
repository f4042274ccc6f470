//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use statrs::distribution::{ContinuousCDF, Normal};

fn ncdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

fn d1d2(s: f64, k: f64, r: f64, sigma: f64, t: f64) -> (f64, f64) {
    let d1 = ((s / k).ln() + (r + 0.5 * sigma * sigma) * t) / (sigma * t.sqrt());
    (d1, d1 - sigma * t.sqrt())
}

/// Closed-form European call.
pub fn bs_call(s: f64, k: f64, r: f64, sigma: f64, t: f64) -> f64 {
    let (d1, d2) = d1d2(s, k, r, sigma, t);
    s * ncdf(d1) - k * (-r * t).exp() * ncdf(d2)
}

/// Closed-form European put.
pub fn bs_put(s: f64, k: f64, r: f64, sigma: f64, t: f64) -> f64 {
    let (d1, d2) = d1d2(s, k, r, sigma, t);
    k * (-r * t).exp() * ncdf(-d2) - s * ncdf(-d1)
}

/// Lognormal transition density of geometric Brownian motion.
pub fn lognormal_pdf(x: f64, s0: f64, r: f64, sigma: f64, t: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let m = s0.ln() + (r - 0.5 * sigma * sigma) * t;
    let v = sigma * sigma * t;
    (-(x.ln() - m).powi(2) / (2.0 * v)).exp() / (x * (2.0 * std::f64::consts::PI * v).sqrt())
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    d / b.iter().map(|y| y * y).sum::<f64>().sqrt()
}
