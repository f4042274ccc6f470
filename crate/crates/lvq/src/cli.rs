//! The five commands behind the `lvq` binary. Each returns a JSON report and
//! a CSV table; the binary only parses flags and writes files.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::Result;
use crate::evolve::overlap_series;
use crate::generator::{build_backward_generator, build_forward_generator};
use crate::output::{Cell, Table};
use crate::pipeline::{classical_forward, extended_at, price_all, quadrature_all, quantum_forward};
use crate::resources::{
    classical_flops, compare_norm, hamiltonian_norm_bound, multiasset_scaling, postselection_repetitions, scaling_comparison, simulation_cost,
    stateprep_cost, swap_test_shots, ClassicalMethod, PrepKind, SimulationParams, SPARSITY_CLOCKED, SPARSITY_MAIN,
};
use crate::retrieval::PricingResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Price,
    Classical,
    Overlap,
    Resources,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Price => "price",
            Command::Classical => "classical",
            Command::Overlap => "overlap",
            Command::Resources => "resources",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub csv: Table,
}

#[derive(Debug, Clone, Serialize)]
struct ForwardDiagnostics {
    psucc: f64,
    l_plus: f64,
    p0_norm: f64,
    pt_norm: f64,
    imag_residual: f64,
    final_norm: f64,
    p_used: Vec<f64>,
    blocks: Option<crate::schrodinger::BlockSummary>,
    clock: Option<crate::pipeline::ClockDiagnostics>,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn quantum_prices(cfg: &RunConfig) -> Result<(Vec<PricingResult>, Vec<f64>, ForwardDiagnostics)> {
    let g = cfg.grid()?;
    let model = cfg.model(&g)?;
    let clock = cfg.clock.settings();
    let q = quantum_forward(&g, &model, &cfg.initial, &cfg.schrodinger, clock.as_ref())?;
    let shots = cfg.retrieval.shots.unwrap_or(0);
    let prices = price_all(&q.p_t, &g, &model, &cfg.payoffs, shots, cfg.retrieval.seed)?;
    let quad = quadrature_all(&q.p_t, &g, &model, &cfg.payoffs);
    let diag = ForwardDiagnostics {
        psucc: q.psucc,
        l_plus: q.l_plus,
        p0_norm: q.p0_norm,
        pt_norm: l2(&q.p_t),
        imag_residual: q.imag_residual,
        final_norm: q.final_norm,
        p_used: q.p_used,
        blocks: q.blocks,
        clock: q.clock,
    };
    Ok((prices, quad, diag))
}

fn classical_prices(cfg: &RunConfig) -> Result<(Vec<f64>, f64, f64)> {
    let g = cfg.grid()?;
    let model = cfg.model(&g)?;
    let c = classical_forward(&g, &model, &cfg.initial, cfg.engine.scheme, cfg.engine.n_t)?;
    Ok((quadrature_all(&c.p_t, &g, &model, &cfg.payoffs), l2(&c.p0), l2(&c.p_t)))
}

fn kind_name(k: crate::retrieval::PayoffKind) -> &'static str {
    match k {
        crate::retrieval::PayoffKind::Call => "call",
        crate::retrieval::PayoffKind::Put => "put",
    }
}

pub fn cmd_price(cfg: &RunConfig) -> Result<Report> {
    let (prices, quad, diag) = quantum_prices(cfg)?;
    let mut t = Table::new(&["kind", "strike", "value", "stderr", "ci95_lo", "ci95_hi", "f1", "f2", "shots", "value_exact_overlaps", "quadrature", "psucc"]);
    let mut records = vec![];
    for (p, q) in prices.iter().zip(&quad) {
        t.push(vec![
            kind_name(p.kind).into(),
            p.strike.into(),
            p.value.into(),
            p.stderr.into(),
            p.ci95.0.into(),
            p.ci95.1.into(),
            p.f1.value.into(),
            p.f2.value.into(),
            p.shots.into(),
            p.value_exact_overlaps.into(),
            (*q).into(),
            diag.psucc.into(),
        ]);
        records.push(json!({ "pricing": p, "quadrature": q, "forward": diag }));
    }
    Ok(Report { json: json!({ "records": records }), csv: t })
}

pub fn cmd_classical(cfg: &RunConfig) -> Result<Report> {
    let (vals, p0n, ptn) = classical_prices(cfg)?;
    let mut t = Table::new(&["kind", "strike", "value", "scheme", "n_t"]);
    let scheme = serde_json::to_value(cfg.engine.scheme).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let mut records = vec![];
    for (p, v) in cfg.payoffs.iter().zip(&vals) {
        t.push(vec![kind_name(p.kind).into(), p.strike.into(), (*v).into(), scheme.clone().into(), cfg.engine.n_t.into()]);
        records.push(json!({ "kind": p.kind, "strike": p.strike, "value": v, "scheme": cfg.engine.scheme, "n_t": cfg.engine.n_t, "p0_norm": p0n, "pt_norm": ptn }));
    }
    Ok(Report { json: json!({ "records": records }), csv: t })
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Report> {
    let (prices, _, diag) = quantum_prices(cfg)?;
    let (vals, _, _) = classical_prices(cfg)?;
    let mut t = Table::new(&["kind", "strike", "quantum", "classical", "abs_diff", "rel_diff"]);
    let mut records = vec![];
    for (p, c) in prices.iter().zip(&vals) {
        let d = p.value - c;
        let rel = if *c != 0.0 { d.abs() / c.abs() } else { d.abs() };
        t.push(vec![kind_name(p.kind).into(), p.strike.into(), p.value.into(), (*c).into(), d.into(), rel.into()]);
        records.push(json!({ "kind": p.kind, "strike": p.strike, "quantum": p.value, "quantum_stderr": p.stderr, "classical": c, "abs_diff": d, "rel_diff": rel }));
    }
    Ok(Report { json: json!({ "records": records, "forward": diag }), csv: t })
}

pub fn cmd_overlap(cfg: &RunConfig) -> Result<Report> {
    let g = cfg.grid()?;
    let model = cfg.model(&g)?;
    let ov = &cfg.overlap;
    let tau0 = ov.initial.start_time();
    let p0 = ov.initial.build(&g, &model.vol, model.s0, model.r)?;
    let fwd = overlap_series(
        |t| build_forward_generator(&g, &model.vol, model.r, tau0 + t).map(|m| m.matrix),
        &p0,
        model.maturity - tau0,
        ov.samples,
        ov.steps_per_sample,
    )?;
    let payoff = cfg.payoffs[0];
    let c0: Vec<f64> = g.points().iter().map(|&x| payoff.eval(x)).collect();
    let bwd = overlap_series(
        |t| build_backward_generator(&g, &model.vol, model.r, t, model.maturity, ov.boundary).map(|m| m.matrix),
        &c0,
        model.maturity,
        ov.samples,
        ov.steps_per_sample,
    )?;
    let mut t = Table::new(&["t", "overlap_forward", "overlap_backward"]);
    let mut rows = vec![];
    for ((tf, of), (_, ob)) in fwd.iter().zip(&bwd) {
        t.push(vec![Cell::Num(*tf), Cell::Num(*of), Cell::Num(*ob)]);
        rows.push(json!({ "t": tf, "overlap_forward": of, "overlap_backward": ob }));
    }
    Ok(Report { json: json!({ "records": rows, "forward_start_time": tau0, "backward_payoff": payoff }), csv: t })
}

pub fn cmd_resources(cfg: &RunConfig) -> Result<Report> {
    let g = cfg.grid()?;
    let model = cfg.model(&g)?;
    let r = &cfg.resources;
    let n = cfg.grid.n;
    let npts = g.len() as f64;
    let mut t = Table::new(&["quantity", "value", "kind"]);
    let push = |t: &mut Table, name: &str, v: f64, kind: &str| t.push(vec![name.into(), v.into(), kind.into()]);

    let smax = model.vol.sigma_max(&g, model.maturity);
    let bound = hamiltonian_norm_bound(smax.value, g.a, g.b, n);
    let gw = cfg.schrodinger.w_grid()?;
    let measured = extended_at(&g, &model, &gw, 0.0)?.max_abs();
    let norm = compare_norm(bound, measured);
    push(&mut t, "sigma_max", smax.value, "sampled");
    push(&mut t, "h_norm_bound", bound, "asymptotic");
    push(&mut t, "h_ext_max_measured", measured, "measured");

    let (d_s, d_t) = model.vol.degrees();
    let n_y = if cfg.clock.enabled { cfg.clock.n_y } else { 0 };
    let main = simulation_cost(&SimulationParams {
        sparsity: SPARSITY_MAIN,
        h_max: bound,
        t: model.maturity,
        eps_evol: r.eps_evol,
        n,
        n_w: cfg.schrodinger.n_w,
        n_y: 0,
        d_s,
        d_t: 0,
    });
    let clocked = simulation_cost(&SimulationParams {
        sparsity: SPARSITY_CLOCKED,
        h_max: bound,
        t: model.maturity,
        eps_evol: r.eps_evol,
        n,
        n_w: cfg.schrodinger.n_w,
        n_y: n_y.max(1),
        d_s,
        d_t,
    });
    for (label, c) in [("main", &main), ("clocked", &clocked)] {
        push(&mut t, &format!("{label}.gamma"), c.gamma, "asymptotic");
        push(&mut t, &format!("{label}.queries"), c.queries, "asymptotic");
        push(&mut t, &format!("{label}.gates"), c.gates, "asymptotic");
    }

    let omega = r.omega.unwrap_or(2.0 * g.delta / (g.b - g.a));
    let preps = [
        PrepKind::GaussianDelta { n, omega, eps_prep: r.eps_prep },
        PrepKind::PiecewisePoly { n, degrees: vec![d_s.max(1)] },
        PrepKind::Comparator { n },
        PrepKind::PayoffState { n },
        PrepKind::SwapTest { n },
    ];
    let prep: Vec<_> = preps.iter().map(stateprep_cost).collect();
    for p in &prep {
        let kind = serde_json::to_value(p.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        push(&mut t, &format!("prep.{}.cnots", p.label.replace(' ', "_")), p.cnots, &kind);
    }

    let multi: Vec<_> = (1..=r.d_max).map(|d| multiasset_scaling(d, n, SPARSITY_MAIN)).collect();
    for m in &multi {
        push(&mut t, &format!("multiasset.d{}.relative_cost", m.d), m.relative_cost, "asymptotic");
    }
    let classical = classical_flops(npts, model.maturity, SPARSITY_MAIN, ClassicalMethod::FiniteDifference);
    push(&mut t, "classical.flops", classical.flops, "asymptotic");

    let (_, p0n, ptn) = classical_prices(cfg)?;
    let reps = postselection_repetitions(p0n, ptn, r.eps_evol);
    push(&mut t, "postselection.repetitions", reps, "asymptotic");
    let shots = swap_test_shots(r.eps_price);
    push(&mut t, "swap_test.shots", shots, "asymptotic");
    let (qs, cs) = scaling_comparison(npts);
    push(&mut t, "scaling.quantum", qs, "asymptotic");
    push(&mut t, "scaling.classical", cs, "asymptotic");

    let json = json!({
        "sigma_max": smax,
        "norm": norm,
        "simulation": { "main": main, "clocked": clocked },
        "state_preparation": prep,
        "multiasset": multi,
        "classical": classical,
        "postselection_repetitions": reps,
        "swap_test_shots": shots,
        "scaling": { "quantum": qs, "classical": cs },
    });
    Ok(Report { json, csv: t })
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        Command::Price => cmd_price(cfg),
        Command::Classical => cmd_classical(cfg),
        Command::Overlap => cmd_overlap(cfg),
        Command::Resources => cmd_resources(cfg),
        Command::Compare => cmd_compare(cfg),
    }
}

/// Drops run-dependent fields (wall-clock timings) so repeated runs compare
/// byte for byte.
pub fn scrub_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time_s");
            m.values_mut().for_each(scrub_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(scrub_timings),
        _ => {}
    }
}

/// Full JSON document: command, configuration echo and results.
pub fn envelope(cmd: Command, cfg: &RunConfig, report: &Report, deterministic: bool) -> Value {
    let mut doc = json!({
        "command": cmd.name(),
        "schema_version": crate::config::SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.retrieval.seed,
        "config": cfg,
        "result": report.json,
    });
    if deterministic {
        scrub_timings(&mut doc);
    } else {
        let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        doc["timestamp"] = json!(now);
    }
    doc
}
