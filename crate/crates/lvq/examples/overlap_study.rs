//! Overlap of the evolved state with its start, forward density against
//! backward put value, as maturity grows.
//!
//! cargo run --release --example overlap_study

use lvq::evolve::overlap_series;
use lvq::generator::{build_backward_generator, build_forward_generator, BackwardBoundary, InitialDensity};
use lvq::grid::Grid1D;
use lvq::retrieval::{PayoffKind, PayoffSpec};
use lvq::volatility::{VolDomain, VolSurface};

fn main() -> lvq::Result<()> {
    let g = Grid1D::new(1.0, 400.0, 7)?;
    let vol = VolSurface::constant(0.2, VolDomain::from_grid(&g, 1.0))?;
    let p0 = InitialDensity::Gaussian { width_dx: 2.0 }.build(&g, &vol, 100.0, 0.05)?;
    let put = PayoffSpec { kind: PayoffKind::Put, strike: 100.0 };
    let c0: Vec<f64> = g.points().iter().map(|&x| put.eval(x)).collect();

    let fwd = overlap_series(|t| build_forward_generator(&g, &vol, 0.05, t).map(|m| m.matrix), &p0, 1.0, 10, 16)?;
    let bwd = overlap_series(
        |t| build_backward_generator(&g, &vol, 0.05, t, 1.0, BackwardBoundary::LinearityClosure).map(|m| m.matrix),
        &c0,
        1.0,
        10,
        16,
    )?;
    println!("{:>6} {:>10} {:>10}", "T", "forward", "backward");
    for ((t, f), (_, b)) in fwd.iter().zip(&bwd) {
        println!("{t:6.2} {f:10.5} {b:10.5}");
    }
    Ok(())
}
