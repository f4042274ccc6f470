//! Polynomial and separable local-volatility surfaces.
//!
//! cargo run --release --example local_vol_surfaces

use lvq::grid::Grid1D;
use lvq::volatility::{SeparableTerm, VolDomain, VolSurface};

fn main() -> lvq::Result<()> {
    let g = Grid1D::new(1.0, 400.0, 8)?;
    let d = VolDomain::from_grid(&g, 1.0);
    // smile-like skew in s plus a linear term structure
    let poly = VolSurface::poly(&[(0, 0, 0.3), (1, 0, -1.5e-3), (2, 0, 4e-6), (0, 1, 0.04)], d)?;
    let sep = VolSurface::separable(
        vec![
            SeparableTerm { alpha: 0.2, r_coeffs: vec![1.0], q_coeffs: vec![1.0, 0.2] },
            SeparableTerm { alpha: 0.05, r_coeffs: vec![1.0, -2e-3], q_coeffs: vec![1.0] },
        ],
        d,
    )?;
    for (name, v) in [("poly", &poly), ("separable", &sep)] {
        println!("{name}: degrees {:?}, rank {}, time independent {}", v.degrees(), v.rank(), v.is_time_independent());
        for s in [50.0, 100.0, 150.0, 300.0] {
            let row: Vec<String> = [0.0, 0.5, 1.0].iter().map(|&t| format!("{:.4}", v.sigma(s, t).unwrap())).collect();
            println!("  S={s:5}: sigma(t=0, 0.5, 1) = {}", row.join(", "));
        }
        println!("  sampled max {:?}", v.sigma_max(&g, 1.0));
    }
    let expanded = sep.to_poly();
    println!("separable expanded to poly: max |diff| {:.1e}", (0..50).map(|i| {
        let s = 1.0 + 8.0 * i as f64;
        (sep.sigma(s, 0.7).unwrap() - expanded.sigma(s, 0.7).unwrap()).abs()
    }).fold(0.0, f64::max));
    Ok(())
}
