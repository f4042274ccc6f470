//! Versioned JSON run configuration.
//!
//! Parsing rejects unknown keys and reports the offending field path;
//! [`RunConfig::validate`] then checks every cross-field constraint before
//! any numerical work starts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clock::{ClockProfile, ClockScheme};
use crate::error::{Error, Result};
use crate::evolve::ImplicitScheme;
use crate::generator::{BackwardBoundary, InitialDensity};
use crate::grid::Grid1D;
use crate::pipeline::{ClockSettings, Model, SchrodingerSettings};
use crate::retrieval::PayoffSpec;
use crate::schrodinger::prepare_w_state;
use crate::volatility::{SeparableTerm, VolDomain, VolSurface};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelSection,
    pub grid: GridSection,
    #[serde(default)]
    pub initial: InitialDensity,
    #[serde(default)]
    pub schrodinger: SchrodingerSettings,
    #[serde(default)]
    pub clock: ClockSection,
    pub payoffs: Vec<PayoffSpec>,
    #[serde(default)]
    pub retrieval: RetrievalSection,
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default)]
    pub overlap: OverlapSection,
    #[serde(default)]
    pub resources: ResourcesSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub s0: f64,
    pub r: f64,
    pub maturity: f64,
    pub vol: VolSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VolSpec {
    Constant { sigma: f64 },
    /// `[k, q, c]` triples for `c s^k tau^q`.
    Poly { coeffs: Vec<(usize, usize, f64)> },
    Separable { terms: Vec<SeparableTerm> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub a: f64,
    pub b: f64,
    pub n: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClockSection {
    pub enabled: bool,
    pub n_y: u32,
    /// y-domain length as a multiple of the evolution horizon.
    pub buffer: f64,
    pub profile: ClockProfile,
    pub scheme: ClockScheme,
    pub sub: usize,
}

impl Default for ClockSection {
    fn default() -> Self {
        let c = ClockSettings::default();
        ClockSection { enabled: false, n_y: c.n_y, buffer: c.buffer, profile: c.profile, scheme: c.scheme, sub: c.sub }
    }
}

impl ClockSection {
    pub fn settings(&self) -> Option<ClockSettings> {
        self.enabled.then_some(ClockSettings { n_y: self.n_y, buffer: self.buffer, profile: self.profile, scheme: self.scheme, sub: self.sub })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetrievalSection {
    /// `null` means exact overlaps.
    pub shots: Option<u64>,
    pub seed: u64,
}

impl Default for RetrievalSection {
    fn default() -> Self {
        RetrievalSection { shots: None, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineSection {
    pub scheme: ImplicitScheme,
    pub n_t: usize,
}

impl Default for EngineSection {
    fn default() -> Self {
        EngineSection { scheme: ImplicitScheme::CrankNicolson, n_t: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverlapSection {
    pub samples: usize,
    pub steps_per_sample: usize,
    /// Start of the forward series.
    pub initial: InitialDensity,
    /// Edge treatment of the backward generator.
    pub boundary: BackwardBoundary,
}

impl Default for OverlapSection {
    fn default() -> Self {
        OverlapSection { samples: 20, steps_per_sample: 32, initial: InitialDensity::Gaussian { width_dx: 2.0 }, boundary: BackwardBoundary::LinearityClosure }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourcesSection {
    pub eps_evol: f64,
    pub eps_prep: f64,
    /// Gaussian delta width for state preparation; `null` uses `2 dx`.
    pub omega: Option<f64>,
    /// Largest asset count in the multi-asset table.
    pub d_max: u32,
    /// Target price precision for the swap-test shot count.
    pub eps_price: f64,
}

impl Default for ResourcesSection {
    fn default() -> Self {
        ResourcesSection { eps_evol: 1e-3, eps_prep: 1e-3, omega: None, d_max: 4, eps_price: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Base path; `.json` and `.csv` are written next to it.
    pub path: Option<String>,
}

fn check(ok: bool, path: &str, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(path, msg()))
    }
}

fn finite(v: f64, path: &str) -> Result<()> {
    check(v.is_finite(), path, || format!("{v} is not finite"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let p = e.path().to_string();
            Error::config(if p == "." { "<root>".to_string() } else { p }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.schema_version == SCHEMA_VERSION, "schema_version", || format!("expected {SCHEMA_VERSION}, got {}", self.schema_version))?;
        let g = self.grid()?;
        let m = &self.model;
        finite(m.s0, "model.s0")?;
        finite(m.r, "model.r")?;
        check(m.s0 > g.a && m.s0 < g.b, "model.s0", || format!("{} outside the grid ({}, {})", m.s0, g.a, g.b))?;
        check(m.maturity > 0.0 && m.maturity.is_finite(), "model.maturity", || format!("{} must be positive", m.maturity))?;
        self.vol(&g).map_err(|e| Error::config("model.vol", e.to_string()))?;

        match self.initial {
            InitialDensity::ShortTimeLognormal { tau0 } => {
                check(tau0 > 0.0 && tau0 < m.maturity, "initial.tau0", || format!("{tau0} must lie in (0, maturity)"))?
            }
            InitialDensity::Gaussian { width_dx } => check(width_dx > 0.0, "initial.width_dx", || format!("{width_dx} must be positive"))?,
            InitialDensity::GridDelta => {}
        }

        let s = &self.schrodinger;
        check((2..=14).contains(&s.n_w), "schrodinger.n_w", || format!("{} outside 2..=14", s.n_w))?;
        check(s.l_w > 0.0 && s.l_w.is_finite(), "schrodinger.l_w", || format!("{} must be positive", s.l_w))?;
        check(s.tol > 0.0 && s.tol < 1e-2, "schrodinger.tol", || format!("{} outside (0, 1e-2)", s.tol))?;
        check(s.time_slices >= 1, "schrodinger.time_slices", || "must be at least 1".into())?;
        let gw = s.w_grid().map_err(|e| Error::config("schrodinger.l_w", e.to_string()))?;
        prepare_w_state(s.variant, &gw).map_err(|e| Error::config("schrodinger.variant", e.to_string()))?;

        let c = &self.clock;
        if c.enabled {
            check((2..=10).contains(&c.n_y), "clock.n_y", || format!("{} outside 2..=10", c.n_y))?;
            check(c.buffer >= 1.0 && c.buffer.is_finite(), "clock.buffer", || format!("{} must be at least 1", c.buffer))?;
            check(c.sub >= 1, "clock.sub", || "must be at least 1".into())?;
            if let ClockProfile::Gaussian { omega } = c.profile {
                check(omega > 0.0, "clock.profile.omega", || format!("{omega} must be positive"))?;
            }
        }

        check(!self.payoffs.is_empty(), "payoffs", || "at least one payoff is required".into())?;
        for (i, p) in self.payoffs.iter().enumerate() {
            check(p.strike >= g.a && p.strike <= g.b, &format!("payoffs[{i}].strike"), || format!("{} outside the grid [{}, {}]", p.strike, g.a, g.b))?;
        }
        if let Some(n) = self.retrieval.shots {
            check(n > 0, "retrieval.shots", || "use null for exact overlaps, not 0".into())?;
        }
        check(self.engine.n_t >= 1, "engine.n_t", || "must be at least 1".into())?;
        check(self.overlap.samples >= 1, "overlap.samples", || "must be at least 1".into())?;
        check(self.overlap.steps_per_sample >= 1, "overlap.steps_per_sample", || "must be at least 1".into())?;
        let r = &self.resources;
        for (v, p) in [(r.eps_evol, "resources.eps_evol"), (r.eps_prep, "resources.eps_prep"), (r.eps_price, "resources.eps_price")] {
            check(v > 0.0 && v < 1.0, p, || format!("{v} outside (0, 1)"))?;
        }
        if let Some(w) = r.omega {
            check(w > 0.0 && w < 1.0, "resources.omega", || format!("{w} outside (0, 1)"))?;
        }
        check((1..=64).contains(&r.d_max), "resources.d_max", || format!("{} outside 1..=64", r.d_max))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid1D> {
        let gs = self.grid;
        finite(gs.a, "grid.a")?;
        finite(gs.b, "grid.b")?;
        check((2..=16).contains(&gs.n), "grid.n", || format!("{} outside 2..=16", gs.n))?;
        check(gs.a > 0.0, "grid.a", || format!("{} must be positive (prices)", gs.a))?;
        Grid1D::new(gs.a, gs.b, gs.n).map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn vol(&self, g: &Grid1D) -> Result<VolSurface> {
        let d = VolDomain::from_grid(g, self.model.maturity);
        match &self.model.vol {
            VolSpec::Constant { sigma } => VolSurface::constant(*sigma, d),
            VolSpec::Poly { coeffs } => VolSurface::poly(coeffs, d),
            VolSpec::Separable { terms } => VolSurface::separable(terms.clone(), d),
        }
    }

    pub fn model(&self, g: &Grid1D) -> Result<Model> {
        Ok(Model { s0: self.model.s0, r: self.model.r, maturity: self.model.maturity, vol: self.vol(g)? })
    }
}
