//! Schrodingerisation: Hermitian splitting of `L`, the auxiliary `w`
//! register, block-diagonal evolution over its Fourier modes and recovery
//! by positive-momentum post-selection.
//!
//! Layout of an extended state is price-major: amplitude `(i, j)` sits at
//! `i * n_w + j`. The `w` basis change is the unitary FFT with kernel
//! `exp(-2 pi i j k / N)` and `1/sqrt(N)` on both directions; modes are kept
//! in natural order (0, 1, ..., N/2-1, -N/2, ..., -1).

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::evolve::{cayley4_adaptive, expm_action, EvolutionReport};
use crate::grid::{fft_wavenumbers, Grid1D};
use crate::sparse::{norm, Csr, CyclicTridiag};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `L = S - i H_K` with `S = (L + L^dag)/2`, `H_K = i (L - L^dag)/2`.
pub fn split_generator(l: &Csr) -> (Csr, Csr) {
    let la = l.adjoint();
    let s = l.add(&la).scale(C64::new(0.5, 0.0));
    let hk = l.sub(&la).scale(C64::new(0.0, 0.5));
    (s, hk)
}

/// Shape of the auxiliary initial profile `psi(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WVariant {
    /// `exp(-|p|)`
    Exponential,
    /// `(erf(a p) + 1)/2 * exp(-p)`
    ErfDamped { a: f64 },
    /// `zeta(p) exp(-p)` with `zeta` the mollified indicator of
    /// `[a_xi, b_xi]`; `width` scales the standard bump.
    MollifiedWindow { a_xi: f64, b_xi: f64, width: f64 },
}

/// Normalised `psi` on the `w` grid.
#[derive(Debug, Clone)]
pub struct WRegisterState {
    pub grid: Grid1D,
    pub amps: Vec<f64>,
    pub variant: WVariant,
    /// Integral of the unnormalised bump over (-1, 1); 0 for other variants.
    pub mollifier_c: f64,
}

fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (1.0 / (x * x - 1.0)).exp()
    } else {
        0.0
    }
}

const SIMPSON_PER_UNIT: f64 = 64.0;

fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut m = (SIMPSON_PER_UNIT * (hi - lo)).ceil() as usize;
    m = m.max(2);
    if m % 2 == 1 {
        m += 1;
    }
    let h = (hi - lo) / m as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    acc * h / 3.0
}

/// Normalisation of the standard mollifier, by the same quadrature.
pub fn mollifier_constant() -> f64 {
    simpson(bump, -1.0, 1.0)
}

/// `zeta(p) = (eta_eps * 1_[a, b])(p)` with `eta_eps(x) = eta(x/eps)/eps`.
pub fn mollified_window(p: f64, a_xi: f64, b_xi: f64, width: f64, c: f64) -> f64 {
    let lo = (p - width).max(a_xi);
    let hi = (p + width).min(b_xi);
    if hi <= lo {
        return 0.0;
    }
    // substitute z = (p - s)/width so the quadrature runs in bump units
    simpson(bump, (p - hi) / width, (p - lo) / width) / c
}

pub fn prepare_w_state(variant: WVariant, g_w: &Grid1D) -> Result<WRegisterState> {
    let mut c = 0.0;
    let raw: Vec<f64> = match variant {
        WVariant::Exponential => g_w.points().iter().map(|p| (-p.abs()).exp()).collect(),
        WVariant::ErfDamped { a } => {
            if !(a > 0.0) {
                return Err(Error::Range("erf steepness must be positive".into()));
            }
            g_w.points().iter().map(|&p| 0.5 * (erf(a * p) + 1.0) * (-p).exp()).collect()
        }
        WVariant::MollifiedWindow { a_xi, b_xi, width } => {
            if !(b_xi > a_xi) || !(width > 0.0) {
                return Err(Error::Range(format!("bad window [{a_xi}, {b_xi}] / width {width}")));
            }
            c = mollifier_constant();
            g_w.points().iter().map(|&p| mollified_window(p, a_xi, b_xi, width, c) * (-p).exp()).collect()
        }
    };
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = raw[0].abs().max(raw[raw.len() - 1].abs());
    if !(peak > 0.0) || edge > 1e-8 * peak {
        return Err(Error::InsufficientDomain(format!(
            "psi at the w-grid edges is {:.3e} of its peak (need <= 1e-8)",
            edge / peak
        )));
    }
    let nrm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(WRegisterState { grid: g_w.clone(), amps: raw.iter().map(|v| v / nrm).collect(), variant, mollifier_c: c })
}

impl WRegisterState {
    /// Fraction of `|psi|^2` on `p > 0`.
    pub fn l_plus(&self) -> f64 {
        self.grid.points().iter().zip(&self.amps).filter(|(p, _)| **p > 0.0).map(|(_, a)| a * a).sum()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }
}

/// `H_ext = S (x) diag(eta) + H_K (x) 1`, stored by its factors. It is
/// block diagonal once `w` is in the Fourier representation.
#[derive(Debug, Clone)]
pub struct ExtendedHamiltonian {
    pub s: Csr,
    pub hk: Csr,
    /// Fourier-dual values of the `w` grid, natural FFT order.
    pub etas: Vec<f64>,
}

pub fn build_extended_hamiltonian(s: &Csr, hk: &Csr, g_w: &Grid1D) -> Result<ExtendedHamiltonian> {
    if s.nrows != hk.nrows || !s.is_square() || !hk.is_square() {
        return Err(Error::Dimension(format!("S is {}x{}, H_K is {}x{}", s.nrows, s.ncols, hk.nrows, hk.ncols)));
    }
    Ok(ExtendedHamiltonian { s: s.clone(), hk: hk.clone(), etas: fft_wavenumbers(g_w.len(), g_w.delta) })
}

impl ExtendedHamiltonian {
    pub fn from_generator(l: &Csr, g_w: &Grid1D) -> Result<Self> {
        let (s, hk) = split_generator(l);
        build_extended_hamiltonian(&s, &hk, g_w)
    }

    pub fn nx(&self) -> usize {
        self.s.nrows
    }

    pub fn nw(&self) -> usize {
        self.etas.len()
    }

    /// `eta_k S + H_K`
    pub fn block(&self, k: usize) -> Csr {
        self.s.axpby(C64::new(self.etas[k], 0.0), &self.hk, C64::new(1.0, 0.0))
    }

    pub fn block_tridiag(&self, k: usize) -> Result<CyclicTridiag> {
        let s = CyclicTridiag::from_csr(&self.s)?;
        let h = CyclicTridiag::from_csr(&self.hk)?;
        Ok(s.combine(C64::new(self.etas[k], 0.0), &h, C64::new(1.0, 0.0)))
    }

    /// Full matrix in the price-major (momentum) basis. Small sizes only.
    pub fn to_csr(&self) -> Csr {
        let d = Csr::from_real_diag(&self.etas);
        Csr::kron(&self.s, &d).add(&Csr::kron(&self.hk, &Csr::identity(self.nw())))
    }

    pub fn max_abs(&self) -> f64 {
        let emax = self.etas.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        (0..self.nw())
            .filter(|&k| self.etas[k].abs() == emax || self.etas[k] == 0.0)
            .map(|k| self.block(k).max_abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WRepr {
    Position,
    Momentum,
}

#[derive(Debug, Clone)]
pub struct ExtendedState {
    pub data: Vec<C64>,
    pub nx: usize,
    pub nw: usize,
    pub repr: WRepr,
}

fn fft_rows(data: &mut [C64], nx: usize, nw: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse { planner.plan_fft_inverse(nw) } else { planner.plan_fft_forward(nw) };
    let s = 1.0 / (nw as f64).sqrt();
    for i in 0..nx {
        let row = &mut data[i * nw..(i + 1) * nw];
        plan.process(row);
        row.iter_mut().for_each(|v| *v *= s);
    }
}

impl ExtendedState {
    /// `(p0/|p0|) (x) psi`, position representation.
    pub fn product(p0: &[f64], w: &WRegisterState) -> Result<Self> {
        let n0 = p0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n0 > 0.0) {
            return Err(Error::Range("initial density is zero".into()));
        }
        let nw = w.len();
        let mut data = Vec::with_capacity(p0.len() * nw);
        for &pi in p0 {
            for &a in &w.amps {
                data.push(C64::new(pi / n0 * a, 0.0));
            }
        }
        Ok(ExtendedState { data, nx: p0.len(), nw, repr: WRepr::Position })
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn to_momentum(&mut self) {
        if self.repr == WRepr::Position {
            fft_rows(&mut self.data, self.nx, self.nw, false);
            self.repr = WRepr::Momentum;
        }
    }

    pub fn to_position(&mut self) {
        if self.repr == WRepr::Momentum {
            fft_rows(&mut self.data, self.nx, self.nw, true);
            self.repr = WRepr::Position;
        }
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.nx).map(|i| self.data[i * self.nw + k]).collect()
    }

    pub fn set_column(&mut self, k: usize, col: &[C64]) {
        for (i, v) in col.iter().enumerate() {
            self.data[i * self.nw + k] = *v;
        }
    }
}

/// Engine used for each block `eta_k S + H_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockEngine {
    /// Fourth-order unitary Cayley steps with step doubling.
    #[default]
    Cayley4,
    /// Lanczos `expm_action` (dense for small blocks).
    Krylov,
}

/// Blocks whose share of the norm is below this are left untouched.
pub const SKIP_BLOCK: f64 = 1e-15;

#[derive(Debug, Clone, Serialize)]
pub struct BlockSummary {
    pub blocks_evolved: usize,
    pub blocks_skipped: usize,
    pub total_steps: usize,
    pub max_norm_drift: f64,
    pub wall_time_s: f64,
}

pub fn evolve_block(h: &ExtendedHamiltonian, k: usize, v: &[C64], t: f64, tol: f64, engine: BlockEngine) -> Result<EvolutionReport> {
    match engine {
        BlockEngine::Cayley4 => cayley4_adaptive(&h.block_tridiag(k)?, v, t, tol),
        BlockEngine::Krylov => expm_action(&h.block(k), v, t, tol.clamp(2e-14, 9e-5)),
    }
}

/// `exp(-i H_ext t)` applied slice by slice. The state is moved to the
/// momentum representation if needed and left there. `tol` bounds each
/// slice's error relative to the norm of the whole state, so light slices
/// get proportionally looser targets.
///
/// For a real generator `conj(H(eta)) = -H(-eta)`, so when the `-eta`
/// column is the conjugate of the `eta` column its result is too and only
/// one of the pair is evolved.
pub fn evolve_extended(h: &ExtendedHamiltonian, state: &mut ExtendedState, t: f64, tol: f64, engine: BlockEngine) -> Result<BlockSummary> {
    let start = std::time::Instant::now();
    if state.nx != h.nx() || state.nw != h.nw() {
        return Err(Error::Dimension("state and Hamiltonian shapes differ".into()));
    }
    state.to_momentum();
    let total = state.norm();
    let real_generator = h.s.data.iter().all(|z| z.im == 0.0) && h.hk.data.iter().all(|z| z.re == 0.0);
    let nw = h.nw();
    let mut sum = BlockSummary { blocks_evolved: 0, blocks_skipped: 0, total_steps: 0, max_norm_drift: 0.0, wall_time_s: 0.0 };
    let mut done = vec![false; nw];
    for k in 0..nw {
        if done[k] {
            continue;
        }
        let col = state.column(k);
        let cn = norm(&col);
        if cn <= SKIP_BLOCK * total {
            sum.blocks_skipped += 1;
            continue;
        }
        let rep = evolve_block(h, k, &col, t, (tol * total / cn).min(1e-2), engine)?;
        sum.blocks_evolved += 1;
        sum.total_steps += rep.steps;
        sum.max_norm_drift = sum.max_norm_drift.max(rep.max_norm_drift);
        let mirror = (nw - k) % nw;
        if real_generator && mirror != k && h.etas[mirror] == -h.etas[k] {
            let other = state.column(mirror);
            let gap: f64 = other.iter().zip(&col).map(|(a, b)| (a - b.conj()).norm_sqr()).sum::<f64>().sqrt();
            if gap <= 1e-13 * cn {
                let conj: Vec<C64> = rep.state.iter().map(|z| z.conj()).collect();
                state.set_column(mirror, &conj);
                done[mirror] = true;
                sum.blocks_skipped += 1;
            }
        }
        state.set_column(k, &rep.state);
    }
    sum.wall_time_s = start.elapsed().as_secs_f64();
    Ok(sum)
}

/// How to turn the post-selected `w` columns back into a density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum RecoveryMode {
    /// One column. `None` picks the smallest positive grid value >= 0.5.
    Slice { p_star: Option<f64> },
    /// Least-squares combination of the columns with p in [p_min, p_max].
    WeightedAverage { p_min: f64, p_max: f64 },
}

impl Default for RecoveryMode {
    fn default() -> Self {
        RecoveryMode::Slice { p_star: None }
    }
}

#[derive(Debug, Clone)]
pub struct Recovery {
    /// Recovered density, scaled back by `|p(0)|`.
    pub p: Vec<f64>,
    /// Largest |imaginary part| discarded, relative to the largest real part.
    pub imag_residual: f64,
    pub psucc: f64,
    /// w grid values used.
    pub p_used: Vec<f64>,
}

pub fn default_slice(g_w: &Grid1D) -> Option<usize> {
    g_w.points().iter().position(|&p| p >= 0.5)
}

/// Undo the warped transform. `p0_norm` is `|p(0)|_2` of the density that
/// was normalised into the initial extended state.
pub fn recover_solution(final_state: &ExtendedState, w: &WRegisterState, mode: RecoveryMode, p0_norm: f64) -> Result<Recovery> {
    let mut st = final_state.clone();
    st.to_position();
    let pw = w.grid.points();
    let nw = st.nw;
    let total: f64 = st.data.iter().map(|z| z.norm_sqr()).sum();
    let pos: f64 = (0..st.nx)
        .flat_map(|i| (0..nw).filter(move |&j| pw[j] > 0.0).map(move |j| (i, j)))
        .map(|(i, j)| st.data[i * nw + j].norm_sqr())
        .sum();
    let psucc = pos / total;
    if !(psucc >= 1e-12) {
        return Err(Error::NoPositiveSupport(psucc));
    }
    let cols: Vec<usize> = match mode {
        RecoveryMode::Slice { p_star: None } => vec![default_slice(&w.grid).ok_or(Error::NoPositiveSupport(0.0))?],
        RecoveryMode::Slice { p_star: Some(ps) } => {
            if !(ps > 0.0) {
                return Err(Error::Range(format!("slice p* must be positive, got {ps}")));
            }
            let j = w.grid.nearest(ps);
            let j = if pw[j] > 0.0 { j } else { (j..nw).find(|&k| pw[k] > 0.0).ok_or(Error::NoPositiveSupport(0.0))? };
            vec![j]
        }
        RecoveryMode::WeightedAverage { p_min, p_max } => {
            let c: Vec<usize> = (0..nw).filter(|&j| pw[j] > 0.0 && pw[j] >= p_min && pw[j] <= p_max).collect();
            if c.is_empty() {
                return Err(Error::Range(format!("no w grid points in [{p_min}, {p_max}]")));
            }
            c
        }
    };
    let wsum: f64 = cols.iter().map(|&j| w.amps[j] * w.amps[j]).sum();
    if !(wsum > 0.0) {
        return Err(Error::NoPositiveSupport(0.0));
    }
    let mut out = vec![ZERO; st.nx];
    for &j in &cols {
        for (i, o) in out.iter_mut().enumerate() {
            *o += st.data[i * nw + j] * (w.amps[j] / wsum * p0_norm);
        }
    }
    let re_max = out.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
    let im_max = out.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    Ok(Recovery {
        p: out.iter().map(|z| z.re).collect(),
        imag_residual: if re_max > 0.0 { im_max / re_max } else { im_max },
        psucc,
        p_used: cols.iter().map(|&j| pw[j]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_half_mass() {
        let g = Grid1D::new(-30.0, 30.0, 10).unwrap();
        let w = prepare_w_state(WVariant::Exponential, &g).unwrap();
        assert!((w.l_plus() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn window_support() {
        let g = Grid1D::new(-8.0, 8.0, 8).unwrap();
        let w = prepare_w_state(WVariant::MollifiedWindow { a_xi: -4.0, b_xi: 4.0, width: 1.0 }, &g).unwrap();
        for (p, a) in g.points().iter().zip(&w.amps) {
            if p.abs() >= 5.0 {
                assert_eq!(*a, 0.0);
            }
        }
        let c = mollifier_constant();
        assert!((mollified_window(0.0, -4.0, 4.0, 1.0, c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_domain_rejected() {
        let g = Grid1D::new(-5.0, 5.0, 6).unwrap();
        assert!(matches!(prepare_w_state(WVariant::Exponential, &g), Err(Error::InsufficientDomain(_))));
    }
}
