//! Structural checks: column sums of the forward generator, the Hermitian
//! split, the extended Hamiltonian and the pseudo-Hamiltonian residual.
//!
//! cargo run --release --example hamiltonian_checks

use lvq::generator::{build_forward_generator, build_pseudo_hamiltonian};
use lvq::grid::Grid1D;
use lvq::schrodinger::{split_generator, ExtendedHamiltonian};
use lvq::sparse::{norm, to_complex};
use lvq::volatility::{VolDomain, VolSurface};

fn main() -> lvq::Result<()> {
    for n in [6u32, 7, 8, 9, 10] {
        let g = Grid1D::new(1.0, 400.0, n)?;
        let vol = VolSurface::poly(&[(0, 0, 0.25), (1, 0, -4e-4), (2, 0, 1e-6), (0, 1, 0.05), (1, 1, 1e-4)], VolDomain::from_grid(&g, 1.0))?;
        let l = build_forward_generator(&g, &vol, 0.05, 0.5)?;
        let (s, hk) = split_generator(&l.matrix);
        let h = ExtendedHamiltonian::from_generator(&l.matrix, &Grid1D::new(-8.0, 8.0, 4)?)?.to_csr();

        // smooth density that is negligible at the periodic seam
        let p: Vec<f64> = g.points().iter().map(|&x| (-(x - 200.0f64).powi(2) / 1250.0).exp()).collect();
        let pc = to_complex(&p);
        let ph = build_pseudo_hamiltonian(&g, &vol, 0.05, 0.5)?;
        let lhs: Vec<_> = ph.h.matrix.apply(&pc).iter().map(|z| z * num_complex::Complex64::new(0.0, -1.0)).collect();
        let rhs = l.matrix.apply(&pc);
        let diff: Vec<_> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();

        println!(
            "n={n:2}  column sums {:.1e}  S herm {:.1e}  H_K herm {:.1e}  H_ext herm {:.1e}  |(-iH_LV - L)p|/|p| {:.3e}",
            l.column_sum_residual(),
            s.hermitian_residual(),
            hk.hermitian_residual(),
            h.hermitian_residual() / h.max_abs(),
            norm(&diff) / norm(&pc)
        );
    }
    Ok(())
}
