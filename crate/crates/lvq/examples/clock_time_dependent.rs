//! Time-dependent volatility through the clock register, compared with a
//! time-ordered classical product.
//!
//! cargo run --release --example clock_time_dependent

use lvq::generator::InitialDensity;
use lvq::grid::Grid1D;
use lvq::pipeline::{quantum_forward, rel_l2, time_ordered_forward, ClockSettings, Model, SchrodingerSettings};
use lvq::schrodinger::WVariant;
use lvq::volatility::{VolDomain, VolSurface};

fn main() -> lvq::Result<()> {
    let g = Grid1D::new(1.0, 400.0, 6)?;
    // sigma = 0.2 (1 + 0.3 tau)
    let vol = VolSurface::poly(&[(0, 0, 0.2), (0, 1, 0.06)], VolDomain::from_grid(&g, 1.0))?;
    let model = Model { s0: 100.0, r: 0.05, maturity: 1.0, vol };
    let init = InitialDensity::ShortTimeLognormal { tau0: 0.3 };
    let reference = time_ordered_forward(&g, &model, &init, 0.01)?;

    let mut s = SchrodingerSettings::with_domain(5, 8.0);
    s.variant = WVariant::MollifiedWindow { a_xi: -1.5, b_xi: 5.0, width: 1.5 };
    for n_y in [4u32, 5] {
        let cs = ClockSettings { n_y, ..Default::default() };
        let q = quantum_forward(&g, &model, &init, &s, Some(&cs))?;
        let d = q.clock.as_ref().expect("clocked run");
        println!(
            "n_y={n_y}  rel L2 vs time-ordered {:.3e}  clock localisation {:.4}  slice y={:.3}",
            rel_l2(&q.p_t, &reference.p_t),
            d.localization,
            d.y_extracted
        );
    }
    Ok(())
}
