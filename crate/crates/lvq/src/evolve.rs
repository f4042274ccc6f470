//! Time evolution engines.
//!
//! * [`expm_action`]: `exp(-iHt) v` for sparse Hermitian `H` by Lanczos with
//!   an a-posteriori error estimate; small systems go through a dense
//!   eigendecomposition.
//! * [`cayley4_adaptive`]: the same action for cyclic tridiagonal Hermitian
//!   matrices using a unitary Cayley step composed to fourth order. Every
//!   slice of the extended Hamiltonian has this shape.
//! * [`time_ordered_product`], [`implicit_stepper`]: classical baselines.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{dot, norm, to_complex, Csr, CyclicSolver, CyclicTridiag};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionReport {
    #[serde(skip)]
    pub state: Vec<C64>,
    pub steps: usize,
    pub max_norm_drift: f64,
    pub wall_time_s: f64,
    pub engine: String,
}

fn check_hermitian(h: &Csr) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", h.nrows, h.ncols)));
    }
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let res = h.hermitian_residual() / scale;
    if res > 1e-12 {
        return Err(Error::NotHermitian(res));
    }
    Ok(())
}

/// `exp(-iHt) v` through a full Hermitian eigendecomposition.
pub fn expm_dense(h: &Csr, v: &[C64], t: f64) -> Result<Vec<C64>> {
    check_hermitian(h)?;
    let m = h.to_dense();
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = m.symmetric_eigen();
    let q = &eig.eigenvectors;
    let x = DVector::from_column_slice(v);
    let mut c = q.adjoint() * x;
    for (ci, &lam) in c.iter_mut().zip(eig.eigenvalues.iter()) {
        *ci *= C64::from_polar(1.0, -lam * t);
    }
    Ok((q * c).iter().copied().collect())
}

const KRYLOV_DIM: usize = 32;
const DENSE_DIRECT: usize = 64;
const DENSE_FALLBACK: usize = 4096;
const MAX_KRYLOV_STEPS: usize = 20_000;

/// `exp(-iHt) v0` for Hermitian sparse `H`, relative accuracy about `tol`.
pub fn expm_action(h: &Csr, v0: &[C64], t: f64, tol: f64) -> Result<EvolutionReport> {
    let start = Instant::now();
    check_hermitian(h)?;
    if !(tol > 1e-14 && tol < 1e-4) {
        return Err(Error::Range(format!("tol must lie in (1e-14, 1e-4), got {tol}")));
    }
    if h.nrows != v0.len() {
        return Err(Error::Dimension(format!("H is {} but v has {}", h.nrows, v0.len())));
    }
    let n0 = norm(v0);
    let report = |state: Vec<C64>, steps: usize, engine: &str| {
        let drift = (norm(&state) - n0).abs() / n0.max(f64::MIN_POSITIVE);
        EvolutionReport { state, steps, max_norm_drift: drift, wall_time_s: start.elapsed().as_secs_f64(), engine: engine.into() }
    };
    if t == 0.0 || n0 == 0.0 {
        return Ok(report(v0.to_vec(), 0, "identity"));
    }
    if h.nrows <= DENSE_DIRECT {
        return Ok(report(expm_dense(h, v0, t)?, 1, "dense"));
    }
    match krylov(h, v0, t, tol) {
        Ok((state, steps)) => Ok(report(state, steps, "lanczos")),
        Err(e) if h.nrows <= DENSE_FALLBACK => {
            let _ = e;
            Ok(report(expm_dense(h, v0, t)?, 1, "dense-fallback"))
        }
        Err(e) => Err(e),
    }
}

fn krylov(h: &Csr, v0: &[C64], t: f64, tol: f64) -> Result<(Vec<C64>, usize)> {
    let dim = h.nrows;
    let m = KRYLOV_DIM.min(dim);
    let n0 = norm(v0);
    let mut v = v0.to_vec();
    let mut elapsed = 0.0;
    let mut tau = t;
    let mut steps = 0;
    let mut w = vec![ZERO; dim];
    while elapsed < t {
        if steps >= MAX_KRYLOV_STEPS {
            return Err(Error::Evolution(format!("Krylov step budget exhausted at t = {elapsed}")));
        }
        let beta0 = norm(&v);
        let mut basis: Vec<Vec<C64>> = vec![v.iter().map(|z| z / beta0).collect()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut tail = 0.0;
        for j in 0..m {
            h.matvec_into(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // full reorthogonalisation, twice
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let b = norm(&w);
            if b <= 1e-13 * (a.abs() + beta.last().copied().unwrap_or(0.0)).max(1e-300) {
                tail = 0.0;
                break;
            }
            tail = b;
            if j + 1 < m {
                beta.push(b);
                basis.push(w.iter().map(|z| z / b).collect());
            }
        }
        let k = alpha.len();
        let mut tm = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            tm[(i, i)] = alpha[i];
            if i + 1 < k {
                tm[(i, i + 1)] = beta[i];
                tm[(i + 1, i)] = beta[i];
            }
        }
        let eig = tm.symmetric_eigen();
        let q = eig.eigenvectors;
        let lam = eig.eigenvalues;
        let y_of = |s: f64| -> Vec<C64> {
            (0..k)
                .map(|r| (0..k).map(|c| C64::from_polar(q[(r, c)] * q[(0, c)], -lam[c] * s)).sum())
                .collect()
        };
        tau = tau.min(t - elapsed);
        let mut y;
        loop {
            y = y_of(tau);
            let err = tail * y[k - 1].norm() * beta0;
            let allowed = tol * n0 * (tau / t).max(1e-3);
            if err <= allowed || tail == 0.0 {
                if err < 0.05 * allowed {
                    // grow next step
                    elapsed += tau;
                    tau *= 2.0;
                } else {
                    elapsed += tau;
                }
                break;
            }
            tau *= 0.5;
            if tau < t * 1e-12 {
                return Err(Error::Evolution("Krylov step underflow".into()));
            }
        }
        v.iter_mut().for_each(|z| *z = ZERO);
        for (j, bj) in basis.iter().enumerate().take(k) {
            let c = y[j] * beta0;
            for (vi, qi) in v.iter_mut().zip(bj) {
                *vi += c * qi;
            }
        }
        steps += 1;
    }
    Ok((v, steps))
}

fn check_hermitian_tridiag(h: &CyclicTridiag) -> Result<()> {
    let n = h.len();
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let mut res: f64 = 0.0;
    for i in 0..n {
        res = res.max(h.diag[i].im.abs());
        res = res.max((h.upper[i] - h.lower[(i + 1) % n].conj()).norm());
    }
    if res / scale > 1e-12 {
        return Err(Error::NotHermitian(res / scale));
    }
    Ok(())
}

/// Triple-jump weights turning a symmetric second-order step into fourth order.
pub const YOSHIDA: [f64; 3] = {
    // 2^(1/3) = 1.2599210498948732
    let c = 1.259_921_049_894_873_2;
    let w1 = 1.0 / (2.0 - c);
    [w1, -c * w1, w1]
};

/// Prefactored fourth-order Cayley propagator for a fixed step.
#[derive(Debug, Clone)]
pub struct Cayley4 {
    explicit: [CyclicTridiag; 2],
    solvers: [CyclicSolver; 2],
    pub step: f64,
}

impl Cayley4 {
    pub fn new(h: &CyclicTridiag, step: f64) -> Result<Self> {
        let mk = |w: f64| -> Result<(CyclicTridiag, CyclicSolver)> {
            let s = w * step;
            let minus = h.shifted(ONE, -I * (0.5 * s));
            let plus = h.shifted(ONE, I * (0.5 * s));
            Ok((minus, CyclicSolver::new(&plus)?))
        };
        let (e0, s0) = mk(YOSHIDA[0])?;
        let (e1, s1) = mk(YOSHIDA[1])?;
        Ok(Cayley4 { explicit: [e0, e1], solvers: [s0, s1], step })
    }

    /// One full step in place; `scratch` must have the vector length.
    pub fn step_in_place(&self, v: &mut [C64], scratch: &mut [C64]) {
        for stage in [0usize, 1, 0] {
            self.explicit[stage].matvec_into(v, scratch);
            self.solvers[stage].solve_in_place(scratch);
            v.copy_from_slice(scratch);
        }
    }

    pub fn run(&self, v: &mut [C64], nsteps: usize) {
        let mut scratch = vec![ZERO; v.len()];
        for _ in 0..nsteps {
            self.step_in_place(v, &mut scratch);
        }
    }
}

pub fn cayley4_fixed(h: &CyclicTridiag, v0: &[C64], t: f64, nsteps: usize) -> Result<Vec<C64>> {
    let prop = Cayley4::new(h, t / nsteps as f64)?;
    let mut v = v0.to_vec();
    prop.run(&mut v, nsteps);
    Ok(v)
}

const MAX_CAYLEY_STEPS: usize = 1 << 22;

struct Adaptive {
    state: Vec<C64>,
    total: usize,
    last: usize,
}

/// Runs with growing step counts until the Richardson estimate of the
/// finest run's error is below `tol * |v0|`. The next count is predicted
/// from the fourth-order error law, capped at an eightfold jump.
fn cayley4_refine(h: &CyclicTridiag, v0: &[C64], t: f64, tol: f64) -> Result<Adaptive> {
    let n0 = norm(v0);
    let lam = norm(&h.apply(v0)) / n0;
    let mut nsteps = ((t.abs() * lam / 8.0).ceil() as usize).max(2);
    let mut coarse = cayley4_fixed(h, v0, t, nsteps)?;
    let mut total = nsteps;
    let mut next = 2 * nsteps;
    loop {
        if next > MAX_CAYLEY_STEPS {
            return Err(Error::Evolution(format!("Cayley step budget exhausted ({next} steps)")));
        }
        let fine = cayley4_fixed(h, v0, t, next)?;
        total += next;
        let diff = norm(&fine.iter().zip(&coarse).map(|(a, b)| a - b).collect::<Vec<_>>()) / n0;
        let q = (next as f64 / nsteps as f64).powi(4);
        let err = diff / (q - 1.0);
        if err <= tol {
            return Ok(Adaptive { state: fine, total, last: next });
        }
        let grow = (1.25 * (err / tol).powf(0.25)).clamp(2.0, 8.0);
        nsteps = next;
        next = (next as f64 * grow).ceil() as usize;
        coarse = fine;
    }
}

/// `exp(-iHt) v0` for Hermitian cyclic tridiagonal `H`, with estimated
/// error at most `tol` relative to `|v0|`.
pub fn cayley4_adaptive(h: &CyclicTridiag, v0: &[C64], t: f64, tol: f64) -> Result<EvolutionReport> {
    let start = Instant::now();
    check_hermitian_tridiag(h)?;
    let n0 = norm(v0);
    if t == 0.0 || n0 == 0.0 {
        return Ok(EvolutionReport { state: v0.to_vec(), steps: 0, max_norm_drift: 0.0, wall_time_s: 0.0, engine: "identity".into() });
    }
    let a = cayley4_refine(h, v0, t, tol)?;
    let drift = (norm(&a.state) - n0).abs() / n0;
    Ok(EvolutionReport { state: a.state, steps: a.total, max_norm_drift: drift, wall_time_s: start.elapsed().as_secs_f64(), engine: "cayley4".into() })
}

/// Steps per unit time that [`cayley4_adaptive`] settles on, used to size
/// inner steps of split schemes.
pub fn cayley4_steps_per_time(h: &CyclicTridiag, v0: &[C64], t: f64, tol: f64) -> Result<f64> {
    if t == 0.0 || norm(v0) == 0.0 {
        return Ok(0.0);
    }
    Ok(cayley4_refine(h, v0, t, tol)?.last as f64 / t.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `v <- (I + A dt) v`, for `dv/dt = A v`.
    Forward,
    /// `v <- (I - A dt) v`, for `dv/dt = -A v`.
    Backward,
}

/// First-order product of `(I +- A(t_k) dt)` over `[t0, t1]` with left-point
/// sampling. Fails if `max|A| dt` exceeds `guard`.
pub fn time_ordered_product<F>(a: F, v0: &[C64], t0: f64, t1: f64, n_t: usize, dir: Direction, guard: f64) -> Result<EvolutionReport>
where
    F: Fn(f64) -> Result<Csr>,
{
    let start = Instant::now();
    if n_t == 0 {
        return Err(Error::Range("N_t must be at least 1".into()));
    }
    let dt = (t1 - t0) / n_t as f64;
    let sign = match dir {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let n0 = norm(v0);
    let mut v = v0.to_vec();
    let mut w = vec![ZERO; v.len()];
    let mut drift: f64 = 0.0;
    for k in 0..n_t {
        let tk = t0 + k as f64 * dt;
        let m = a(tk)?;
        let mm = m.max_abs() * dt.abs();
        if mm > guard {
            return Err(Error::Stability(format!("max|A| dt = {mm:.4} > {guard} at t = {tk}")));
        }
        m.matvec_into(&v, &mut w);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi += sign * dt * wi;
        }
        if n0 > 0.0 {
            drift = drift.max((norm(&v) - n0).abs() / n0);
        }
    }
    Ok(EvolutionReport { state: v, steps: n_t, max_norm_drift: drift, wall_time_s: start.elapsed().as_secs_f64(), engine: "time-ordered".into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImplicitScheme {
    BackwardEuler,
    CrankNicolson,
}

/// Implicit integration of `dp/dtau = L(tau) p` on `[tau0, tau1]`.
/// `L(tau)` must be cyclic tridiagonal (all Central2 generators are).
pub fn implicit_stepper<F>(l_of: F, p0: &[f64], tau0: f64, tau1: f64, n_t: usize, scheme: ImplicitScheme) -> Result<(Vec<f64>, EvolutionReport)>
where
    F: Fn(f64) -> Result<Csr>,
{
    let start = Instant::now();
    if n_t == 0 {
        return Err(Error::Range("N_t must be at least 1".into()));
    }
    let dt = (tau1 - tau0) / n_t as f64;
    let mut v = to_complex(p0);
    let mut rhs = vec![ZERO; v.len()];
    let mass0: f64 = p0.iter().sum();
    let mut drift: f64 = 0.0;
    let mut cached: Option<(CyclicTridiag, CyclicTridiag, CyclicSolver)> = None;
    let mut prev_l: Option<CyclicTridiag> = None;
    for k in 1..=n_t {
        let tk = tau0 + k as f64 * dt;
        let lk = CyclicTridiag::from_csr(&l_of(tk)?)?;
        let reuse = matches!(&cached, Some((l, _, _)) if *l == lk);
        if !reuse {
            let (lhs, _) = match scheme {
                ImplicitScheme::BackwardEuler => (lk.shifted(ONE, C64::new(-dt, 0.0)), ()),
                ImplicitScheme::CrankNicolson => (lk.shifted(ONE, C64::new(-0.5 * dt, 0.0)), ()),
            };
            let solver = CyclicSolver::new(&lhs).map_err(|e| Error::Singular(format!("step {k}: {e}")))?;
            cached = Some((lk.clone(), lhs, solver));
        }
        let (_, _, solver) = cached.as_ref().unwrap();
        match scheme {
            ImplicitScheme::BackwardEuler => rhs.copy_from_slice(&v),
            ImplicitScheme::CrankNicolson => {
                let lprev = match prev_l.take() {
                    Some(l) => l,
                    None => CyclicTridiag::from_csr(&l_of(tk - dt)?)?,
                };
                lprev.shifted(ONE, C64::new(0.5 * dt, 0.0)).matvec_into(&v, &mut rhs);
            }
        }
        solver.solve_in_place(&mut rhs);
        v.copy_from_slice(&rhs);
        prev_l = Some(lk);
        if mass0 != 0.0 {
            let m: f64 = v.iter().map(|z| z.re).sum();
            drift = drift.max((m - mass0).abs() / mass0.abs());
        }
    }
    let out: Vec<f64> = v.iter().map(|z| z.re).collect();
    let report = EvolutionReport {
        state: v,
        steps: n_t,
        max_norm_drift: drift,
        wall_time_s: start.elapsed().as_secs_f64(),
        engine: format!("{scheme:?}"),
    };
    Ok((out, report))
}

/// |<psi(0)|psi(t_k)>| for normalised states at `n_samples` equally spaced
/// times in `(0, T]` (plus `t = 0`). Uses Crank-Nicolson with
/// `steps_per_sample` steps between samples.
pub fn overlap_series<F>(l_of: F, state0: &[f64], horizon: f64, n_samples: usize, steps_per_sample: usize) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<Csr>,
{
    let unit = |v: &[f64]| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect::<Vec<f64>>()
    };
    let u0 = unit(state0);
    let mut out = vec![(0.0, 1.0)];
    let mut cur = state0.to_vec();
    let dt = horizon / n_samples as f64;
    for k in 0..n_samples {
        let t0 = k as f64 * dt;
        let (next, _) = implicit_stepper(&l_of, &cur, t0, t0 + dt, steps_per_sample.max(1), ImplicitScheme::CrankNicolson)?;
        cur = next;
        let u = unit(&cur);
        let ov: f64 = u0.iter().zip(&u).map(|(a, b)| a * b).sum();
        out.push((t0 + dt, ov.abs()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yoshida_weights_sum_to_one() {
        let s: f64 = YOSHIDA.iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
        let s3: f64 = YOSHIDA.iter().map(|w| w * w * w).sum();
        assert!(s3.abs() < 1e-14);
    }
}
