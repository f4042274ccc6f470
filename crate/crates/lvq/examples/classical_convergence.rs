//! Spatial and temporal convergence of the implicit density solvers
//! against the lognormal density.
//!
//! cargo run --release --example classical_convergence

use lvq::evolve::ImplicitScheme;
use lvq::generator::{analytic_lognormal, InitialDensity};
use lvq::grid::Grid1D;
use lvq::pipeline::{classical_forward, rel_l2, Model};
use lvq::volatility::{VolDomain, VolSurface};

fn model(g: &Grid1D) -> lvq::Result<Model> {
    Ok(Model { s0: 100.0, r: 0.05, maturity: 1.0, vol: VolSurface::constant(0.2, VolDomain::from_grid(g, 1.0))? })
}

fn main() -> lvq::Result<()> {
    let init = InitialDensity::default();
    println!("spatial refinement (CN, 4096 steps)");
    for n in 7..=10 {
        let g = Grid1D::new(1.0, 400.0, n)?;
        let cl = classical_forward(&g, &model(&g)?, &init, ImplicitScheme::CrankNicolson, 4096)?;
        let exact = analytic_lognormal(100.0, 0.05, 0.2, 1.0, &g)?;
        println!("  n={n:2}  dx={:7.4}  rel L2 {:.3e}", g.delta, rel_l2(&cl.p_t, &exact));
    }

    println!("temporal refinement at n=8 against CN with 16384 steps");
    let g = Grid1D::new(1.0, 400.0, 8)?;
    let m = model(&g)?;
    let reference = classical_forward(&g, &m, &init, ImplicitScheme::CrankNicolson, 16384)?;
    for n_t in [8usize, 16, 32, 64, 128] {
        let cn = classical_forward(&g, &m, &init, ImplicitScheme::CrankNicolson, n_t)?;
        let be = classical_forward(&g, &m, &init, ImplicitScheme::BackwardEuler, n_t)?;
        println!(
            "  N_t={n_t:4}  CN {:.3e}  BE {:.3e}",
            rel_l2(&cn.p_t, &reference.p_t),
            rel_l2(&be.p_t, &reference.p_t)
        );
    }
    Ok(())
}
