//! Evolution engines: Krylov and dense exponentials, Cayley steps, the
//! time-ordered product, implicit steppers and the overlap series.

mod common;

use common::slope;
use lvq::evolve::{cayley4_fixed, expm_action, expm_dense, implicit_stepper, overlap_series, time_ordered_product, Direction, ImplicitScheme};
use lvq::generator::build_forward_generator;
use lvq::grid::Grid1D;
use lvq::sparse::{norm, Csr, CyclicTridiag};
use lvq::volatility::{VolDomain, VolSurface};
use lvq::Error;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(n: usize, per_row: usize, seed: u64) -> Csr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trips = vec![];
    for i in 0..n {
        trips.push((i, i, C64::new(rng.random_range(-2.0..2.0), 0.0)));
        for _ in 0..per_row {
            let j = rng.random_range(0..n);
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if i != j {
                trips.push((i, j, z));
                trips.push((j, i, z.conj()));
            }
        }
    }
    Csr::from_triplets(n, n, &trips)
}

fn random_vec(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn rel(a: &[C64], b: &[C64]) -> f64 {
    norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()) / norm(b)
}

#[test]
fn krylov_matches_dense_eigensolve() {
    let h = random_hermitian(512, 3, 1);
    let v = random_vec(512, 2);
    let kr = expm_action(&h, &v, 1.0, 1e-12).unwrap();
    let de = expm_dense(&h, &v, 1.0).unwrap();
    assert!(rel(&kr.state, &de) <= 1e-9, "{}", rel(&kr.state, &de));
    assert!((norm(&kr.state) - norm(&v)).abs() <= 1e-10 * norm(&v));
}

#[test]
fn zero_time_is_identity() {
    let h = random_hermitian(100, 2, 3);
    let v = random_vec(100, 4);
    assert_eq!(expm_action(&h, &v, 0.0, 1e-10).unwrap().state, v);
}

#[test]
fn non_hermitian_rejected() {
    let trips = [(0, 1, C64::new(1.0, 0.0))];
    let m = Csr::from_triplets(2, 2, &trips);
    assert!(matches!(expm_action(&m, &random_vec(2, 0), 1.0, 1e-10), Err(Error::NotHermitian(_))));
}

#[test]
fn cayley4_is_fourth_order_and_unitary() {
    let g = Grid1D::new(1.0, 400.0, 6).unwrap();
    let v = VolSurface::constant(0.2, VolDomain::from_grid(&g, 1.0)).unwrap();
    let l = build_forward_generator(&g, &v, 0.05, 0.0).unwrap().matrix;
    // the diffusive part is the stiff one
    let (hk, _) = lvq::schrodinger::split_generator(&l);
    let tri = CyclicTridiag::from_csr(&hk).unwrap();
    let x: Vec<C64> = g.points().iter().map(|&s| C64::new((-(s - 150.0f64).powi(2) / 800.0).exp(), 0.0)).collect();
    let exact = expm_dense(&hk, &x, 0.05).unwrap();
    let (mut h, mut e) = (vec![], vec![]);
    for steps in [4usize, 8, 16, 32] {
        let out = cayley4_fixed(&tri, &x, 0.05, steps).unwrap();
        assert!((norm(&out) - norm(&x)).abs() < 1e-12 * norm(&x));
        h.push((1.0 / steps as f64).ln());
        e.push(rel(&out, &exact).ln());
    }
    let s = slope(&h, &e);
    assert!((s - 4.0).abs() < 0.4, "order {s}, errors {:?}", e.iter().map(|x| x.exp()).collect::<Vec<_>>());
}

#[test]
fn time_ordered_product_orders() {
    // A = 0
    let v = random_vec(8, 5);
    let r = time_ordered_product(|_| Ok(Csr::zeros(8, 8)), &v, 0.0, 1.0, 10, Direction::Forward, 1.0).unwrap();
    assert_eq!(r.state, v);

    // constant A: first order against the exponential
    let a = random_hermitian(16, 2, 6).scale(C64::new(0.0, -1.0));
    let v = random_vec(16, 7);
    let h = a.scale(C64::new(0.0, 1.0));
    let exact = expm_dense(&h, &v, 0.5).unwrap();
    let (mut hs, mut es) = (vec![], vec![]);
    for n_t in [200usize, 400, 800, 1600] {
        let r = time_ordered_product(|_| Ok(a.clone()), &v, 0.0, 0.5, n_t, Direction::Forward, 1.0).unwrap();
        hs.push((0.5 / n_t as f64).ln());
        es.push(rel(&r.state, &exact).ln());
    }
    let s = slope(&hs, &es);
    assert!((s - 1.0).abs() < 0.2, "order {s}");

    // scalar a(tau) = cos(tau): product against exp(sin(1))
    let one = [C64::new(1.0, 0.0)];
    let mut prev = f64::INFINITY;
    for n_t in [100usize, 200, 400] {
        let r = time_ordered_product(|t| Ok(Csr::from_real_diag(&[t.cos()])), &one, 0.0, 1.0, n_t, Direction::Forward, 1.0).unwrap();
        let err = (r.state[0].re - 1f64.sin().exp()).abs();
        assert!(err < 5.0 / n_t as f64, "n_t={n_t} err {err}");
        assert!(err < prev);
        prev = err;
    }
}

#[test]
fn stability_guard_trips() {
    let a = Csr::from_real_diag(&[100.0]);
    let r = time_ordered_product(|_| Ok(a.clone()), &[C64::new(1.0, 0.0)], 0.0, 1.0, 10, Direction::Forward, 0.5);
    assert!(matches!(r, Err(Error::Stability(_))));
}

#[test]
fn implicit_stepper_conserves_mass() {
    let g = Grid1D::new(1.0, 400.0, 8).unwrap();
    let v = VolSurface::poly(&[(0, 0, 0.25), (1, 0, -4e-4), (0, 1, 0.05)], VolDomain::from_grid(&g, 1.0)).unwrap();
    let p0: Vec<f64> = g.points().iter().map(|&x| (-(x - 100.0f64).powi(2) / 200.0).exp()).collect();
    for scheme in [ImplicitScheme::BackwardEuler, ImplicitScheme::CrankNicolson] {
        let (p, rep) = implicit_stepper(|t| build_forward_generator(&g, &v, 0.05, t).map(|m| m.matrix), &p0, 0.0, 1.0, 64, scheme).unwrap();
        let m0: f64 = p0.iter().sum::<f64>() * g.delta;
        let m1: f64 = p.iter().sum::<f64>() * g.delta;
        assert!((m1 - m0).abs() <= 1e-8, "{scheme:?}: {m0} -> {m1}");
        assert!(rep.max_norm_drift <= 1e-8);
    }
    // L = 0
    let (p, _) = implicit_stepper(|_| Ok(Csr::zeros(g.len(), g.len())), &p0, 0.0, 1.0, 8, ImplicitScheme::CrankNicolson).unwrap();
    assert_eq!(p, p0);
}

#[test]
fn overlap_series_starts_at_one() {
    let g = Grid1D::new(1.0, 400.0, 6).unwrap();
    let v = VolSurface::constant(0.2, VolDomain::from_grid(&g, 1.0)).unwrap();
    let p0: Vec<f64> = g.points().iter().map(|&x| (-(x - 100.0f64).powi(2) / 200.0).exp()).collect();
    let s = overlap_series(|t| build_forward_generator(&g, &v, 0.05, t).map(|m| m.matrix), &p0, 1.0, 4, 8).unwrap();
    assert_eq!(s[0], (0.0, 1.0));
    assert_eq!(s.len(), 5);
    assert!(s.windows(2).all(|w| w[1].1 < w[0].1));
}
