//! Accuracy of the periodic derivative operators on a smooth function.
//!
//! cargo run --release --example spectral_derivatives

use lvq::grid::{first_derivative, second_derivative, Grid1D, Scheme};
use lvq::sparse::to_complex;

fn main() -> lvq::Result<()> {
    let two_pi = 2.0 * std::f64::consts::PI;
    println!("{:>3} {:>10} {:>10} {:>10}   (max error of P^2 f against -f'')", "n", "central2", "central4", "spectral");
    for n in 4..=9 {
        let g = Grid1D::new(0.0, 1.0, n)?;
        // exp(sin(k x)) with k matched to the wraparound period
        let k = two_pi / g.period();
        let f: Vec<f64> = g.points().iter().map(|&x| (k * x).sin().exp()).collect();
        let d2: Vec<f64> = g
            .points()
            .iter()
            .map(|&x| {
                let (s, c) = (k * x).sin_cos();
                k * k * s.exp() * (c * c - s)
            })
            .collect();
        let mut row = vec![];
        for scheme in [Scheme::Central2, Scheme::Central4, Scheme::Spectral] {
            let p2 = second_derivative(&g, scheme)?.apply(&to_complex(&f));
            row.push(p2.iter().zip(&d2).map(|(a, b)| (a.re + b).abs()).fold(0.0, f64::max));
        }
        println!("{n:>3} {:>10.2e} {:>10.2e} {:>10.2e}", row[0], row[1], row[2]);
    }
    let g = Grid1D::new(0.0, 1.0, 3)?;
    let p = first_derivative(&g, Scheme::Spectral)?;
    println!("spectral P symbol on 8 points: {:?}", p.symbol().iter().map(|z| z.re).collect::<Vec<_>>());
    Ok(())
}
