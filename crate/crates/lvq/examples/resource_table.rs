//! Gate counts, state-preparation costs and scaling laws.
//!
//! cargo run --release --example resource_table

use lvq::resources::{
    classical_flops, hamiltonian_norm_bound, multiasset_scaling, scaling_comparison, simulation_cost, stateprep_cost,
    ClassicalMethod, PrepKind, SimulationParams,
};

fn main() {
    println!("{:>3} {:>12} {:>12} {:>10}", "n", "comparator", "payoff", "swap test");
    for n in [4u32, 6, 8, 10, 12] {
        let c = |k| stateprep_cost(&k).cnots;
        println!(
            "{n:>3} {:>12} {:>12} {:>10}",
            c(PrepKind::Comparator { n }),
            c(PrepKind::PayoffState { n }),
            c(PrepKind::SwapTest { n })
        );
    }

    let g = stateprep_cost(&PrepKind::GaussianDelta { n: 10, omega: 0.05, eps_prep: 1e-3 });
    println!("gaussian delta prep: degree {:?}, {} C-NOTs ({:?})", g.degree, g.cnots, g.kind);

    let h_max = hamiltonian_norm_bound(0.2, 1.0, 400.0, 10);
    let sim = simulation_cost(&SimulationParams { sparsity: 3, h_max, t: 1.0, eps_evol: 1e-3, n: 10, n_w: 7, n_y: 0, d_s: 0, d_t: 0 });
    println!("simulation: |H| <= {h_max:.3e}, gamma {:.3e}, queries {:.3e}, gates {:.3e}", sim.gamma, sim.queries, sim.gates);

    for d in 1..=4 {
        let m = multiasset_scaling(d, 10, 3);
        println!("d={d}: norm x{} sparsity x{} block-encoding x{} -> relative {}", m.norm_factor, m.sparsity_factor / 9.0, m.block_encoding_factor, m.relative_cost);
    }

    for n in [8u32, 12, 16, 20] {
        let npts = 2f64.powi(n as i32);
        let (q, c) = scaling_comparison(npts);
        let fd = classical_flops(npts, 1.0, 3, ClassicalMethod::FiniteDifference);
        println!("N=2^{n:<2}: quantum {q:.2e}  classical {c:.2e}  FD flops {:.2e}", fd.flops);
    }
}
