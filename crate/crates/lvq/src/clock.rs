//! Clock register: time-dependent dynamics as a time-independent
//! Hamiltonian `1 (x) 1_w (x) p_y + blkdiag_y H_ext(tau_start + y_j)`.
//!
//! The y grid starts at 0 and is sized so the evolution horizon is a whole
//! number of cells with at least the requested buffer behind it.
//! Amplitude `(i, k, q)` (price, w mode, y) sits at `(i * n_w + k) * n_y + q`.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{cayley4_steps_per_time, Cayley4, YOSHIDA};
use crate::generator::{GeneratorMatrix, Role};
use crate::grid::{first_derivative, Grid1D, Scheme};
use crate::schrodinger::{ExtendedHamiltonian, ExtendedState, WRepr, SKIP_BLOCK};
use crate::sparse::{norm, Csr, CyclicTridiag};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockScheme {
    #[default]
    Spectral,
    Central2,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClockProfile {
    #[default]
    BasisDelta,
    /// `(2 pi omega^2)^{-1/4} exp(-y^2 / (4 omega^2))`, periodic around y = 0.
    Gaussian { omega: f64 },
}

#[derive(Debug, Clone)]
pub struct ClockConfig {
    pub grid_y: Grid1D,
    pub n_y: u32,
    pub profile: ClockProfile,
    pub scheme: ClockScheme,
    /// Evolution time the register must carry.
    pub horizon: f64,
    pub buffer: f64,
}

impl ClockConfig {
    /// Picks `dy = horizon / m` with `m = floor((N_y - 1)/buffer)` so that the
    /// horizon is exactly `m` cells and `Y = (N_y - 1) dy >= buffer * horizon`.
    pub fn new(n_y: u32, horizon: f64, buffer: f64, profile: ClockProfile, scheme: ClockScheme) -> Result<Self> {
        if !(buffer >= 1.25) {
            return Err(Error::Buffer(format!("buffer factor {buffer} < 1.25")));
        }
        if !(horizon > 0.0) {
            return Err(Error::Range(format!("clock horizon must be positive, got {horizon}")));
        }
        let ny = 1usize << n_y;
        let m = ((ny - 1) as f64 / buffer).floor() as usize;
        if m < 1 {
            return Err(Error::Buffer(format!("n_y = {n_y} too small for buffer {buffer}")));
        }
        let dy = horizon / m as f64;
        let grid_y = Grid1D::new(0.0, (ny - 1) as f64 * dy, n_y)?;
        Self::with_grid(grid_y, horizon, buffer, profile, scheme)
    }

    pub fn with_grid(grid_y: Grid1D, horizon: f64, buffer: f64, profile: ClockProfile, scheme: ClockScheme) -> Result<Self> {
        if grid_y.a != 0.0 {
            return Err(Error::Range("clock grid must start at y = 0".into()));
        }
        if grid_y.b < 1.25f64.max(buffer) * horizon * (1.0 - 1e-12) {
            return Err(Error::Buffer(format!("Y = {} < {} * T = {}", grid_y.b, buffer, horizon)));
        }
        if let ClockProfile::Gaussian { omega } = profile {
            if omega < grid_y.delta {
                return Err(Error::Range(format!("gaussian omega {omega} < dy {}", grid_y.delta)));
            }
        }
        let n_y = grid_y.n;
        Ok(ClockConfig { grid_y, n_y, profile, scheme, horizon, buffer })
    }

    pub fn ny(&self) -> usize {
        self.grid_y.len()
    }

    pub fn initial_profile(&self) -> Vec<C64> {
        let ny = self.ny();
        match self.profile {
            ClockProfile::BasisDelta => {
                let mut v = vec![ZERO; ny];
                v[0] = C64::new(1.0, 0.0);
                v
            }
            ClockProfile::Gaussian { omega } => {
                let per = self.grid_y.period();
                let raw: Vec<f64> = self
                    .grid_y
                    .points()
                    .iter()
                    .map(|&y| {
                        let d = y.min(per - y);
                        (-d * d / (4.0 * omega * omega)).exp()
                    })
                    .collect();
                let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
                raw.iter().map(|v| C64::new(v / n, 0.0)).collect()
            }
        }
    }

    /// Eigenvalues of `p_y` on the Fourier modes.
    pub fn momentum_symbol(&self) -> Result<Vec<f64>> {
        let scheme = match self.scheme {
            ClockScheme::Spectral => Scheme::Spectral,
            ClockScheme::Central2 => Scheme::Central2,
        };
        Ok(first_derivative(&self.grid_y, scheme)?.symbol().iter().map(|z| z.re).collect())
    }

    pub fn momentum_operator(&self) -> Result<Csr> {
        let scheme = match self.scheme {
            ClockScheme::Spectral => Scheme::Spectral,
            ClockScheme::Central2 => Scheme::Central2,
        };
        Ok(first_derivative(&self.grid_y, scheme)?.to_csr())
    }
}

/// Full clock Hamiltonian with the `w` register in its Fourier basis.
/// `h_of(tau)` gives `H_ext` at time `tau`; slice `q` uses
/// `tau_start + y_q`. Dense in y for the spectral scheme, so small sizes only.
pub fn build_clock_hamiltonian<F>(h_of: F, cfg: &ClockConfig, tau_start: f64) -> Result<GeneratorMatrix>
where
    F: Fn(f64) -> Result<ExtendedHamiltonian>,
{
    let ny = cfg.ny();
    let py = cfg.momentum_operator()?;
    let mut trips = Vec::new();
    let mut shape = None;
    for (q, &y) in cfg.grid_y.points().iter().enumerate() {
        let h = h_of(tau_start + y)?;
        let (nx, nw) = (h.nx(), h.nw());
        match shape {
            None => shape = Some((nx, nw)),
            Some(s) if s != (nx, nw) => return Err(Error::Dimension("H_ext shape varies with tau".into())),
            _ => {}
        }
        for (r, c, v) in h.to_csr().triplets() {
            trips.push((r * ny + q, c * ny + q, v));
        }
    }
    let (nx, nw) = shape.unwrap();
    for blk in 0..nx * nw {
        for (r, c, v) in py.triplets() {
            trips.push((blk * ny + r, blk * ny + c, v));
        }
    }
    let dim = nx * nw * ny;
    let m = Csr::from_triplets(dim, dim, &trips);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let res = m.hermitian_residual() / scale;
    if res > 1e-12 {
        return Err(Error::NotHermitian(res));
    }
    let gx = Grid1D::new(0.0, 1.0, (nx as f64).log2().round().max(1.0) as u32)?;
    Ok(GeneratorMatrix { matrix: m, role: Role::ClockHermitian, grid: gx, tau: None, r: 0.0 })
}

/// State over price (x) w (x) y, `w` in its Fourier basis.
#[derive(Debug, Clone)]
pub struct ClockState {
    pub data: Vec<C64>,
    pub nx: usize,
    pub nw: usize,
    pub ny: usize,
}

impl ClockState {
    pub fn product(ext: &ExtendedState, y0: &[C64]) -> Self {
        let mut e = ext.clone();
        e.to_momentum();
        let ny = y0.len();
        let mut data = Vec::with_capacity(e.data.len() * ny);
        for &a in &e.data {
            for &b in y0 {
                data.push(a * b);
            }
        }
        ClockState { data, nx: e.nx, nw: e.nw, ny }
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    /// Probability of each y slice.
    pub fn y_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.ny];
        for (idx, v) in self.data.iter().enumerate() {
            m[idx % self.ny] += v.norm_sqr();
        }
        m
    }
}

/// Multiply each y row by `exp(-i symbol h)` in Fourier space.
struct Translator {
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    ny: usize,
}

impl Translator {
    fn new(ny: usize) -> Self {
        let mut p = FftPlanner::new();
        Translator { fwd: p.plan_fft_forward(ny), inv: p.plan_fft_inverse(ny), ny }
    }

    fn phases(&self, symbol: &[f64], h: f64) -> Vec<C64> {
        symbol.iter().map(|&s| C64::from_polar(1.0 / self.ny as f64, -s * h)).collect()
    }

    /// `rows` holds consecutive length-`ny` rows.
    fn apply(&self, rows: &mut [C64], phase: &[C64]) {
        for row in rows.chunks_mut(self.ny) {
            self.fwd.process(row);
            for (v, p) in row.iter_mut().zip(phase) {
                *v *= p;
            }
            self.inv.process(row);
        }
    }
}

/// Apply the pure translation `exp(-i p_y t)` to a y profile.
pub fn translate(profile: &[C64], cfg: &ClockConfig, t: f64) -> Result<Vec<C64>> {
    let tr = Translator::new(cfg.ny());
    let ph = tr.phases(&cfg.momentum_symbol()?, t);
    let mut v = profile.to_vec();
    tr.apply(&mut v, &ph);
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClockSummary {
    pub outer_steps: usize,
    pub inner_steps_max: usize,
    pub blocks_evolved: usize,
    pub blocks_skipped: usize,
    pub norm_drift: f64,
    pub wall_time_s: f64,
}

/// Evolve the clocked state for `cfg.horizon` (must be a whole number of y
/// cells for an exact delta transport). `h_of(tau)` supplies `H_ext`;
/// `sub` is the number of fourth-order split steps per y cell.
pub fn evolve_clocked<F>(h_of: F, state: &mut ClockState, cfg: &ClockConfig, tau_start: f64, tol: f64, sub: usize) -> Result<ClockSummary>
where
    F: Fn(f64) -> Result<ExtendedHamiltonian>,
{
    let start = std::time::Instant::now();
    let (nx, nw, ny) = (state.nx, state.nw, state.ny);
    if ny != cfg.ny() {
        return Err(Error::Dimension("clock state and config disagree on n_y".into()));
    }
    let hs: Vec<ExtendedHamiltonian> = cfg.grid_y.points().iter().map(|&y| h_of(tau_start + y)).collect::<Result<_>>()?;
    if hs.iter().any(|h| h.nx() != nx || h.nw() != nw) {
        return Err(Error::Dimension("H_ext shape does not match the state".into()));
    }
    let s_tri: Vec<CyclicTridiag> = hs.iter().map(|h| CyclicTridiag::from_csr(&h.s)).collect::<Result<_>>()?;
    let k_tri: Vec<CyclicTridiag> = hs.iter().map(|h| CyclicTridiag::from_csr(&h.hk)).collect::<Result<_>>()?;
    let etas = hs[0].etas.clone();

    let n_cells = (cfg.horizon / cfg.grid_y.delta).round().max(1.0) as usize;
    let sub = sub.max(1);
    let outer = n_cells * sub;
    let dt = cfg.horizon / outer as f64;
    let tr = Translator::new(ny);
    let symbol = cfg.momentum_symbol()?;
    // Yoshida stages of the Strang step T(h/2) B(h) T(h/2)
    let stage_h: Vec<f64> = YOSHIDA.iter().map(|w| w * dt).collect();
    let half_phase: Vec<Vec<C64>> = stage_h.iter().map(|&h| tr.phases(&symbol, 0.5 * h)).collect();

    let total = state.norm();
    let n0 = total;
    let mut summary = ClockSummary { outer_steps: outer, inner_steps_max: 0, blocks_evolved: 0, blocks_skipped: 0, norm_drift: 0.0, wall_time_s: 0.0 };
    let one = C64::new(1.0, 0.0);
    let mut rows = vec![ZERO; nx * ny];
    let mut col = vec![ZERO; nx];
    let mut scratch = vec![ZERO; nx];
    for k in 0..nw {
        // gather block k: rows[i * ny + q]
        for i in 0..nx {
            let base = (i * nw + k) * ny;
            rows[i * ny..(i + 1) * ny].copy_from_slice(&state.data[base..base + ny]);
        }
        if norm(&rows) <= SKIP_BLOCK * total {
            summary.blocks_skipped += 1;
            continue;
        }
        summary.blocks_evolved += 1;
        let blocks: Vec<CyclicTridiag> = (0..ny).map(|q| s_tri[q].combine(C64::new(etas[k], 0.0), &k_tri[q], one)).collect();
        // inner step density from the slowest-varying reference: slice 0 at full horizon
        let slice0: Vec<C64> = (0..nx).map(|i| rows[i * ny]).collect();
        let probe = if norm(&slice0) > 0.0 { slice0 } else { (0..nx).map(|i| rows[i * ny..(i + 1) * ny].iter().sum()).collect() };
        // tolerance relative to the whole state, as for the unclocked blocks
        let tol_k = (tol * total / norm(&rows)).min(1e-2);
        let spt = cayley4_steps_per_time(&blocks[0], &probe, cfg.horizon, tol_k)?;
        // two distinct stage lengths
        let mut props: Vec<[Cayley4; 2]> = Vec::with_capacity(ny);
        let mut inner = [0usize; 2];
        for (si, &h) in stage_h[..2].iter().enumerate() {
            inner[si] = ((spt * h.abs()).ceil() as usize).max(1);
        }
        summary.inner_steps_max = summary.inner_steps_max.max(inner[0].max(inner[1]));
        for b in &blocks {
            props.push([Cayley4::new(b, stage_h[0] / inner[0] as f64)?, Cayley4::new(b, stage_h[1] / inner[1] as f64)?]);
        }
        let stage_of = [0usize, 1, 0];
        for _ in 0..outer {
            for &si in &stage_of {
                tr.apply(&mut rows, &half_phase[si]);
                for (q, pr) in props.iter().enumerate() {
                    for i in 0..nx {
                        col[i] = rows[i * ny + q];
                    }
                    if col.iter().all(|z| *z == ZERO) {
                        continue;
                    }
                    for _ in 0..inner[si] {
                        pr[si].step_in_place(&mut col, &mut scratch);
                    }
                    for i in 0..nx {
                        rows[i * ny + q] = col[i];
                    }
                }
                tr.apply(&mut rows, &half_phase[si]);
            }
        }
        for i in 0..nx {
            let base = (i * nw + k) * ny;
            state.data[base..base + ny].copy_from_slice(&rows[i * ny..(i + 1) * ny]);
        }
    }
    summary.norm_drift = (state.norm() - n0).abs() / n0;
    summary.wall_time_s = start.elapsed().as_secs_f64();
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct ClockSlice {
    pub state: ExtendedState,
    pub y: f64,
    /// Probability mass within +-2 dy of t.
    pub localization: f64,
    /// Probability of the chosen slice before renormalisation.
    pub slice_mass: f64,
}

/// Project onto the y slice nearest to `t` and renormalise.
pub fn extract_at_time(full: &ClockState, cfg: &ClockConfig, t: f64) -> Result<ClockSlice> {
    let ymax = cfg.grid_y.b / cfg.buffer;
    if t < 0.0 || t > ymax * (1.0 + 1e-12) {
        return Err(Error::Range(format!("t = {t} outside [0, {ymax}]")));
    }
    let q = cfg.grid_y.nearest(t);
    let marg = full.y_marginal();
    let total: f64 = marg.iter().sum();
    let lo = q.saturating_sub(2);
    let hi = (q + 2).min(full.ny - 1);
    let localization = marg[lo..=hi].iter().sum::<f64>() / total;
    if localization < 0.5 {
        return Err(Error::ClockDispersed(localization));
    }
    let mut data = Vec::with_capacity(full.nx * full.nw);
    for b in 0..full.nx * full.nw {
        data.push(full.data[b * full.ny + q]);
    }
    let n = norm(&data);
    let scale = total.sqrt() / n;
    data.iter_mut().for_each(|v| *v *= scale);
    Ok(ClockSlice {
        state: ExtendedState { data, nx: full.nx, nw: full.nw, repr: WRepr::Momentum },
        y: cfg.grid_y.points()[q],
        localization,
        slice_mass: marg[q] / total,
    })
}
