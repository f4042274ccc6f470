//! Shot noise of the swap-test price estimate.
//!
//! cargo run --release --example swap_test_noise

use lvq::evolve::ImplicitScheme;
use lvq::generator::InitialDensity;
use lvq::grid::Grid1D;
use lvq::pipeline::{classical_forward, Model};
use lvq::retrieval::{price_density, PayoffKind, PayoffSpec};
use lvq::volatility::{VolDomain, VolSurface};

fn main() -> lvq::Result<()> {
    let g = Grid1D::new(40.0, 200.0, 7)?;
    let vol = VolSurface::constant(0.2, VolDomain::from_grid(&g, 1.0))?;
    let model = Model { s0: 100.0, r: 0.05, maturity: 1.0, vol };
    let cl = classical_forward(&g, &model, &InitialDensity::default(), ImplicitScheme::CrankNicolson, 1024)?;
    let spec = PayoffSpec { kind: PayoffKind::Put, strike: 120.0 };
    let exact = price_density(&cl.p_t, &spec, &g, 0.05, 1.0, 0, 0)?.value;
    println!("exact-overlap price {exact:.6}");

    let trials = 200u64;
    for shots in [100u64, 1_000, 10_000, 100_000] {
        let mut sq = 0.0;
        let mut se = 0.0;
        for k in 0..trials {
            let r = price_density(&cl.p_t, &spec, &g, 0.05, 1.0, shots, 17 * shots + k)?;
            sq += ((r.value - exact) / exact).powi(2);
            se += r.stderr / exact;
        }
        println!(
            "shots {shots:>7}  RMS rel error {:.3e}  mean reported stderr {:.3e}",
            (sq / trials as f64).sqrt(),
            se / trials as f64
        );
    }
    Ok(())
}
