//! Local-volatility surfaces: bivariate polynomials in (s, tau) or small-rank
//! separable sums, with exact spatial derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Rectangle on which a surface is declared valid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolDomain {
    pub s_min: f64,
    pub s_max: f64,
    pub t_max: f64,
}

impl VolDomain {
    pub fn new(s_min: f64, s_max: f64, t_max: f64) -> Self {
        VolDomain { s_min, s_max, t_max }
    }

    pub fn from_grid(g: &Grid1D, t_max: f64) -> Self {
        VolDomain { s_min: g.a, s_max: g.b, t_max }
    }

    fn contains(&self, s: f64, t: f64) -> bool {
        let es = 1e-9 * (self.s_max - self.s_min).abs().max(1.0);
        let et = 1e-9 * self.t_max.abs().max(1.0);
        s >= self.s_min - es && s <= self.s_max + es && t >= -et && t <= self.t_max + et
    }
}

/// One rank-one term `alpha * r(s) * q(tau)`, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableTerm {
    pub alpha: f64,
    pub r_coeffs: Vec<f64>,
    pub q_coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// c[k][q] multiplies s^k tau^q.
    Poly(Vec<Vec<f64>>),
    Separable(Vec<SeparableTerm>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolSurface {
    kind: Kind,
    pub domain: VolDomain,
}

pub const MAX_RANK: usize = 8;
const POS_SAMPLES_S: usize = 512;
const POS_SAMPLES_T: usize = 256;

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// (p, p', p'') at x.
fn horner2(c: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &v in c.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + p;
        p = p * x + v;
    }
    (p, d1, d2)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl VolSurface {
    /// Coefficients as `(k, q, c)` triples for `c * s^k * tau^q`.
    pub fn poly(coeffs: &[(usize, usize, f64)], domain: VolDomain) -> Result<Self> {
        if coeffs.iter().all(|c| c.2 == 0.0) {
            return Err(Error::Range("polynomial surface has no nonzero coefficient".into()));
        }
        let ds = coeffs.iter().map(|c| c.0).max().unwrap_or(0);
        let dt = coeffs.iter().map(|c| c.1).max().unwrap_or(0);
        let mut c = vec![vec![0.0; dt + 1]; ds + 1];
        for &(k, q, v) in coeffs {
            c[k][q] += v;
        }
        let v = VolSurface { kind: Kind::Poly(c), domain };
        v.check_positive()?;
        Ok(v)
    }

    pub fn constant(sigma: f64, domain: VolDomain) -> Result<Self> {
        Self::poly(&[(0, 0, sigma)], domain)
    }

    pub fn separable(terms: Vec<SeparableTerm>, domain: VolDomain) -> Result<Self> {
        if terms.is_empty() || terms.len() > MAX_RANK {
            return Err(Error::Range(format!("separable rank must be in 1..={MAX_RANK}, got {}", terms.len())));
        }
        if terms.iter().any(|t| t.r_coeffs.is_empty() || t.q_coeffs.is_empty()) {
            return Err(Error::Range("separable factor with no coefficients".into()));
        }
        let v = VolSurface { kind: Kind::Separable(terms), domain };
        v.check_positive()?;
        Ok(v)
    }

    fn check_positive(&self) -> Result<()> {
        let d = self.domain;
        for i in 0..POS_SAMPLES_S {
            let s = d.s_min + (d.s_max - d.s_min) * i as f64 / (POS_SAMPLES_S - 1) as f64;
            for j in 0..POS_SAMPLES_T {
                let t = d.t_max * j as f64 / (POS_SAMPLES_T - 1) as f64;
                let v = self.eval_unchecked(s, t);
                if !(v > 0.0) {
                    return Err(Error::Positivity(format!("sigma({s}, {t}) = {v}")));
                }
            }
        }
        Ok(())
    }

    /// Re-declare the domain (positivity is re-checked).
    pub fn with_domain(&self, domain: VolDomain) -> Result<Self> {
        let v = VolSurface { kind: self.kind.clone(), domain };
        v.check_positive()?;
        Ok(v)
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            Kind::Poly(_) => 1,
            Kind::Separable(t) => t.len(),
        }
    }

    /// Largest degrees (D_s, D_t).
    pub fn degrees(&self) -> (usize, usize) {
        match &self.kind {
            Kind::Poly(c) => {
                let mut ds = 0;
                let mut dt = 0;
                for (k, row) in c.iter().enumerate() {
                    for (q, &v) in row.iter().enumerate() {
                        if v != 0.0 {
                            ds = ds.max(k);
                            dt = dt.max(q);
                        }
                    }
                }
                (ds, dt)
            }
            Kind::Separable(t) => (
                t.iter().map(|x| x.r_coeffs.len() - 1).max().unwrap_or(0),
                t.iter().map(|x| x.q_coeffs.len() - 1).max().unwrap_or(0),
            ),
        }
    }

    pub fn is_time_independent(&self) -> bool {
        match &self.kind {
            Kind::Poly(c) => c.iter().all(|row| row.iter().skip(1).all(|&v| v == 0.0)),
            Kind::Separable(_) => self.to_poly().is_time_independent(),
        }
    }

    /// Expand a separable surface into coefficient form.
    pub fn to_poly(&self) -> VolSurface {
        match &self.kind {
            Kind::Poly(_) => self.clone(),
            Kind::Separable(terms) => {
                let ds = terms.iter().map(|t| t.r_coeffs.len()).max().unwrap();
                let dt = terms.iter().map(|t| t.q_coeffs.len()).max().unwrap();
                let mut c = vec![vec![0.0; dt]; ds];
                for t in terms {
                    for (k, rk) in t.r_coeffs.iter().enumerate() {
                        for (q, qq) in t.q_coeffs.iter().enumerate() {
                            c[k][q] += t.alpha * rk * qq;
                        }
                    }
                }
                VolSurface { kind: Kind::Poly(c), domain: self.domain }
            }
        }
    }

    fn eval_unchecked(&self, s: f64, t: f64) -> f64 {
        self.derivs_unchecked(s, t).0
    }

    fn derivs_unchecked(&self, s: f64, t: f64) -> (f64, f64, f64) {
        match &self.kind {
            Kind::Poly(c) => {
                // collapse tau first, then differentiate the s polynomial
                let cs: Vec<f64> = c.iter().map(|row| horner(row, t)).collect();
                horner2(&cs, s)
            }
            Kind::Separable(terms) => terms.iter().fold((0.0, 0.0, 0.0), |acc, term| {
                let q = term.alpha * horner(&term.q_coeffs, t);
                let (r0, r1, r2) = horner2(&term.r_coeffs, s);
                (acc.0 + q * r0, acc.1 + q * r1, acc.2 + q * r2)
            }),
        }
    }

    fn check(&self, s: f64, t: f64) -> Result<()> {
        if !self.domain.contains(s, t) {
            let d = self.domain;
            return Err(Error::Range(format!(
                "(s={s}, tau={t}) outside [{}, {}] x [0, {}]",
                d.s_min, d.s_max, d.t_max
            )));
        }
        Ok(())
    }

    pub fn sigma(&self, s: f64, t: f64) -> Result<f64> {
        self.check(s, t)?;
        Ok(self.eval_unchecked(s, t))
    }

    /// (sigma, d sigma/ds, d2 sigma/ds2)
    pub fn sigma_derivatives(&self, s: f64, t: f64) -> Result<(f64, f64, f64)> {
        self.check(s, t)?;
        Ok(self.derivs_unchecked(s, t))
    }

    /// Sampled supremum over grid points x 256 uniform tau values in [0, T].
    pub fn sigma_max(&self, g: &Grid1D, horizon: f64) -> SampledMax {
        let mut best = f64::NEG_INFINITY;
        let nt = 256;
        for &s in g.points() {
            for j in 0..nt {
                let t = horizon * j as f64 / (nt - 1) as f64;
                best = best.max(self.eval_unchecked(s, t));
            }
        }
        SampledMax { value: best, n_s: g.len(), n_t: nt }
    }
}

/// A supremum estimated on a finite tensor sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledMax {
    pub value: f64,
    pub n_s: usize,
    pub n_t: usize,
}

/// Product of two ascending-power polynomials (exposed for tests).
pub fn multiply_polynomials(a: &[f64], b: &[f64]) -> Vec<f64> {
    poly_mul(a, b)
}
