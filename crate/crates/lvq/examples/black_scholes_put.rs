//! Price an at-the-money put under constant volatility three ways: closed
//! form, classical Crank-Nicolson, and the Schrodingerised pipeline.
//!
//! cargo run --release --example black_scholes_put

use lvq::generator::InitialDensity;
use lvq::grid::Grid1D;
use lvq::pipeline::{classical_forward, price_all, quadrature_all, quantum_forward, Model, SchrodingerSettings};
use lvq::retrieval::{PayoffKind, PayoffSpec};
use lvq::evolve::ImplicitScheme;
use lvq::volatility::{VolDomain, VolSurface};

fn main() -> lvq::Result<()> {
    let g = Grid1D::new(1.0, 400.0, 10)?;
    let vol = VolSurface::constant(0.2, VolDomain::from_grid(&g, 1.0))?;
    let model = Model { s0: 100.0, r: 0.05, maturity: 1.0, vol };
    let put = [PayoffSpec { kind: PayoffKind::Put, strike: 100.0 }];
    let init = InitialDensity::default();

    let t = std::time::Instant::now();
    let cl = classical_forward(&g, &model, &init, ImplicitScheme::CrankNicolson, 4096)?;
    let v_cl = quadrature_all(&cl.p_t, &g, &model, &put)[0];
    println!("classical CN     {v_cl:.6}  ({:.2}s)", t.elapsed().as_secs_f64());

    let t = std::time::Instant::now();
    let q = quantum_forward(&g, &model, &init, &SchrodingerSettings::default(), None)?;
    let res = price_all(&q.p_t, &g, &model, &put, 0, 0)?;
    println!("schrodingerised  {:.6}  ({:.2}s)", res[0].value, t.elapsed().as_secs_f64());
    println!("P_succ {:.5}  slice p* {:?}  blocks {:?}", q.psucc, q.p_used, q.blocks);
    Ok(())
}
