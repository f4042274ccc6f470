//! Matrix exponential action three ways on one extended-Hamiltonian block:
//! dense eigen-exponential, adaptive Krylov and fourth-order Cayley steps.
//!
//! cargo run --release --example krylov_vs_dense

use lvq::evolve::{cayley4_adaptive, expm_action, expm_dense};
use lvq::generator::build_forward_generator;
use lvq::grid::Grid1D;
use lvq::schrodinger::ExtendedHamiltonian;
use lvq::sparse::norm;
use lvq::volatility::{VolDomain, VolSurface};
use num_complex::Complex64 as C64;

fn main() -> lvq::Result<()> {
    let g = Grid1D::new(1.0, 400.0, 7)?;
    let vol = VolSurface::constant(0.2, VolDomain::from_grid(&g, 1.0))?;
    let l = build_forward_generator(&g, &vol, 0.05, 0.0)?;
    let h = ExtendedHamiltonian::from_generator(&l.matrix, &Grid1D::new(-8.0, 8.0, 4)?)?;
    let k = 3;
    let block = h.block(k);
    let v: Vec<C64> = g.points().iter().map(|&x| C64::new((-(x - 100.0f64).powi(2) / 800.0).exp(), 0.0)).collect();
    let t = 0.2;

    let clock = std::time::Instant::now();
    let dense = expm_dense(&block, &v, t)?;
    println!("dense     {:.3}s", clock.elapsed().as_secs_f64());
    let err = |x: &[C64]| norm(&x.iter().zip(&dense).map(|(a, b)| a - b).collect::<Vec<_>>()) / norm(&dense);

    for tol in [1e-6, 1e-9] {
        let clock = std::time::Instant::now();
        let kr = expm_action(&block, &v, t, tol)?;
        println!("krylov    tol {tol:.0e}  err {:.2e}  {:.3}s", err(&kr.state), clock.elapsed().as_secs_f64());
        let clock = std::time::Instant::now();
        let ca = cayley4_adaptive(&h.block_tridiag(k)?, &v, t, tol)?;
        println!("cayley4   tol {tol:.0e}  err {:.2e}  {:.3}s", err(&ca.state), clock.elapsed().as_secs_f64());
    }
    Ok(())
}
