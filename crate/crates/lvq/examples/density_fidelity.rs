//! Recovered density after Schrodingerisation: fidelity with the lognormal
//! and the post-selection probability against its prediction.
//!
//! cargo run --release --example density_fidelity

use lvq::evolve::ImplicitScheme;
use lvq::generator::{analytic_lognormal, InitialDensity};
use lvq::grid::Grid1D;
use lvq::pipeline::{classical_forward, fidelity, quantum_forward, Model, SchrodingerSettings};
use lvq::volatility::{VolDomain, VolSurface};

fn main() -> lvq::Result<()> {
    let g = Grid1D::new(1.0, 400.0, 8)?;
    let vol = VolSurface::constant(0.2, VolDomain::from_grid(&g, 1.0))?;
    let model = Model { s0: 100.0, r: 0.05, maturity: 1.0, vol };
    let init = InitialDensity::default();

    let q = quantum_forward(&g, &model, &init, &SchrodingerSettings::default(), None)?;
    let exact = analytic_lognormal(100.0, 0.05, 0.2, 1.0, &g)?;
    println!("fidelity with lognormal  {:.6}", fidelity(&q.p_t, &exact));

    let cl = classical_forward(&g, &model, &init, ImplicitScheme::CrankNicolson, 4096)?;
    let pt = cl.p_t.iter().map(|x| x * x).sum::<f64>().sqrt();
    let predicted = q.l_plus * (pt / q.p0_norm).powi(2);
    println!("P_succ measured          {:.6}", q.psucc);
    println!("P_succ predicted         {predicted:.6}");
    println!("L+ of the w profile      {:.6}", q.l_plus);
    println!("imaginary residual       {:.2e}", q.imag_residual);
    Ok(())
}
