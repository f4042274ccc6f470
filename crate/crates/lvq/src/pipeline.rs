//! End-to-end runs: prepare, embed, evolve, recover, read out.

use serde::{Deserialize, Serialize};

use crate::clock::{evolve_clocked, extract_at_time, ClockConfig, ClockProfile, ClockScheme, ClockState, ClockSummary};
use crate::error::{Error, Result};
use crate::evolve::{implicit_stepper, time_ordered_product, Direction, EvolutionReport, ImplicitScheme};
use crate::generator::{build_forward_generator, InitialDensity};
use crate::grid::Grid1D;
use crate::retrieval::{price_density, quadrature_price, PayoffSpec, PricingResult};
use crate::schrodinger::{evolve_extended, prepare_w_state, recover_solution, BlockEngine, BlockSummary, ExtendedHamiltonian, ExtendedState, RecoveryMode, WRegisterState, WVariant};
use crate::sparse::to_complex;
use crate::volatility::VolSurface;

#[derive(Debug, Clone)]
pub struct Model {
    pub s0: f64,
    pub r: f64,
    pub maturity: f64,
    pub vol: VolSurface,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchrodingerSettings {
    pub n_w: u32,
    pub l_w: f64,
    pub variant: WVariant,
    pub recovery: RecoveryMode,
    pub engine: BlockEngine,
    pub tol: f64,
    /// Piecewise-constant slices for time-dependent sigma without a clock.
    pub time_slices: usize,
}

impl Default for SchrodingerSettings {
    fn default() -> Self {
        Self::with_domain(7, 24.0)
    }
}

impl SchrodingerSettings {
    /// Mollified window `[-1, l_w - 2]`: zeta is 1 on all of p >= 0 and
    /// vanishes a cell-width before the right edge.
    pub fn with_domain(n_w: u32, l_w: f64) -> Self {
        SchrodingerSettings {
            n_w,
            l_w,
            variant: WVariant::MollifiedWindow { a_xi: -1.0, b_xi: l_w - 2.0, width: 1.0 },
            recovery: RecoveryMode::default(),
            engine: BlockEngine::Cayley4,
            tol: 1e-7,
            time_slices: 32,
        }
    }

    pub fn w_grid(&self) -> Result<Grid1D> {
        Grid1D::new(-self.l_w, self.l_w, self.n_w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClockSettings {
    pub n_y: u32,
    pub buffer: f64,
    pub profile: ClockProfile,
    pub scheme: ClockScheme,
    /// Fourth-order split steps per y cell.
    pub sub: usize,
}

impl Default for ClockSettings {
    fn default() -> Self {
        ClockSettings { n_y: 5, buffer: 1.25, profile: ClockProfile::BasisDelta, scheme: ClockScheme::Spectral, sub: 2 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClockDiagnostics {
    pub n_y: u32,
    pub dy: f64,
    pub y_extracted: f64,
    pub localization: f64,
    pub slice_mass: f64,
    pub summary: ClockSummary,
}

#[derive(Debug, Clone)]
pub struct QuantumForward {
    pub p0: Vec<f64>,
    pub tau0: f64,
    /// Recovered density at maturity, absolute scale.
    pub p_t: Vec<f64>,
    pub psucc: f64,
    pub l_plus: f64,
    pub p0_norm: f64,
    pub p_used: Vec<f64>,
    pub imag_residual: f64,
    pub w: WRegisterState,
    pub blocks: Option<BlockSummary>,
    pub clock: Option<ClockDiagnostics>,
    pub final_norm: f64,
}

fn horizon_after(initial: &InitialDensity, model: &Model) -> Result<(f64, f64)> {
    let tau0 = initial.start_time();
    let te = model.maturity - tau0;
    if !(te > 0.0) {
        return Err(Error::Range(format!("initial time {tau0} is not before maturity {}", model.maturity)));
    }
    Ok((tau0, te))
}

pub fn extended_at(g: &Grid1D, model: &Model, g_w: &Grid1D, tau: f64) -> Result<ExtendedHamiltonian> {
    let l = build_forward_generator(g, &model.vol, model.r, tau)?;
    ExtendedHamiltonian::from_generator(&l.matrix, g_w)
}

/// Schrodingerised forward solve from the initial density to maturity.
pub fn quantum_forward(g: &Grid1D, model: &Model, initial: &InitialDensity, schr: &SchrodingerSettings, clock: Option<&ClockSettings>) -> Result<QuantumForward> {
    let (tau0, te) = horizon_after(initial, model)?;
    let p0 = initial.build(g, &model.vol, model.s0, model.r)?;
    let p0_norm = p0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let g_w = schr.w_grid()?;
    let w = prepare_w_state(schr.variant, &g_w)?;
    let mut state = ExtendedState::product(&p0, &w)?;
    // the clock's buffer cells lie past maturity; sigma is frozen there
    let h_of = |tau: f64| extended_at(g, model, &g_w, tau.min(model.maturity));
    let mut blocks = None;
    let mut clock_diag = None;
    if let Some(cs) = clock {
        let cfg = ClockConfig::new(cs.n_y, te, cs.buffer, cs.profile, cs.scheme)?;
        let mut full = ClockState::product(&state, &cfg.initial_profile());
        let summary = evolve_clocked(h_of, &mut full, &cfg, tau0, schr.tol, cs.sub)?;
        let slice = extract_at_time(&full, &cfg, te)?;
        clock_diag = Some(ClockDiagnostics {
            n_y: cs.n_y,
            dy: cfg.grid_y.delta,
            y_extracted: slice.y,
            localization: slice.localization,
            slice_mass: slice.slice_mass,
            summary,
        });
        state = slice.state;
    } else if model.vol.is_time_independent() {
        let h = h_of(tau0)?;
        blocks = Some(evolve_extended(&h, &mut state, te, schr.tol, schr.engine)?);
    } else {
        let k = schr.time_slices.max(1);
        let dt = te / k as f64;
        let mut acc: Option<BlockSummary> = None;
        for j in 0..k {
            let h = h_of(tau0 + (j as f64 + 0.5) * dt)?;
            let s = evolve_extended(&h, &mut state, dt, schr.tol / k as f64, schr.engine)?;
            acc = Some(match acc {
                None => s,
                Some(mut a) => {
                    a.total_steps += s.total_steps;
                    a.blocks_evolved += s.blocks_evolved;
                    a.blocks_skipped += s.blocks_skipped;
                    a.max_norm_drift = a.max_norm_drift.max(s.max_norm_drift);
                    a.wall_time_s += s.wall_time_s;
                    a
                }
            });
        }
        blocks = acc;
    }
    let final_norm = state.norm();
    let rec = recover_solution(&state, &w, schr.recovery, p0_norm)?;
    Ok(QuantumForward {
        p0,
        tau0,
        p_t: rec.p,
        psucc: rec.psucc,
        l_plus: w.l_plus(),
        p0_norm,
        p_used: rec.p_used,
        imag_residual: rec.imag_residual,
        w,
        blocks,
        clock: clock_diag,
        final_norm,
    })
}

#[derive(Debug, Clone)]
pub struct ClassicalForward {
    pub p0: Vec<f64>,
    pub tau0: f64,
    pub p_t: Vec<f64>,
    pub report: EvolutionReport,
}

/// Implicit finite-difference forward solve.
pub fn classical_forward(g: &Grid1D, model: &Model, initial: &InitialDensity, scheme: ImplicitScheme, n_t: usize) -> Result<ClassicalForward> {
    let (tau0, _) = horizon_after(initial, model)?;
    let p0 = initial.build(g, &model.vol, model.s0, model.r)?;
    let l_of = |tau: f64| build_forward_generator(g, &model.vol, model.r, tau).map(|m| m.matrix);
    let (p_t, report) = implicit_stepper(l_of, &p0, tau0, model.maturity, n_t, scheme)?;
    Ok(ClassicalForward { p0, tau0, p_t, report })
}

/// First-order time-ordered product with `max|L| dt <= guard`.
pub fn time_ordered_forward(g: &Grid1D, model: &Model, initial: &InitialDensity, guard: f64) -> Result<ClassicalForward> {
    let (tau0, te) = horizon_after(initial, model)?;
    let p0 = initial.build(g, &model.vol, model.s0, model.r)?;
    let l_of = |tau: f64| build_forward_generator(g, &model.vol, model.r, tau).map(|m| m.matrix);
    let lmax = [tau0, model.maturity, 0.5 * (tau0 + model.maturity)]
        .iter()
        .map(|&t| l_of(t).map(|m| m.max_abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let n_t = ((lmax * te / guard).ceil() as usize).max(1);
    // a 1% margin absorbs the sampled maximum missing the true one
    let n_t = n_t + n_t / 100 + 1;
    let rep = time_ordered_product(l_of, &to_complex(&p0), tau0, model.maturity, n_t, Direction::Forward, guard * 1.5)?;
    let p_t = rep.state.iter().map(|z| z.re).collect();
    Ok(ClassicalForward { p0, tau0, p_t, report: rep })
}

/// Price every payoff from one density.
pub fn price_all(p_t: &[f64], g: &Grid1D, model: &Model, payoffs: &[PayoffSpec], shots: u64, seed: u64) -> Result<Vec<PricingResult>> {
    payoffs
        .iter()
        .enumerate()
        .map(|(i, spec)| price_density(p_t, spec, g, model.r, model.maturity, shots, seed.wrapping_add(2 * i as u64)))
        .collect()
}

pub fn quadrature_all(p_t: &[f64], g: &Grid1D, model: &Model, payoffs: &[PayoffSpec]) -> Vec<f64> {
    payoffs.iter().map(|s| quadrature_price(p_t, s, g, model.r, model.maturity)).collect()
}

/// Relative L2 distance.
pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    d / b.iter().map(|y| y * y).sum::<f64>().sqrt()
}

/// |<a|b>| / (|a| |b|)
pub fn fidelity(a: &[f64], b: &[f64]) -> f64 {
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    ab.abs() / (na * nb)
}
