//! Local-volatility surfaces: evaluation, derivatives, bounds.

use lvq::grid::Grid1D;
use lvq::volatility::{SeparableTerm, VolDomain, VolSurface};
use lvq::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dom() -> VolDomain {
    VolDomain::new(0.0, 4.0, 1.0)
}

#[test]
fn evaluation_fixtures() {
    let c = VolSurface::constant(0.2, dom()).unwrap();
    for (s, t) in [(0.0, 0.0), (1.3, 0.4), (4.0, 1.0)] {
        assert_eq!(c.sigma(s, t).unwrap(), 0.2);
    }
    let lin = VolSurface::poly(&[(0, 0, 0.1), (1, 0, 0.05)], dom()).unwrap();
    for t in [0.0, 0.3, 1.0] {
        assert!((lin.sigma(2.0, t).unwrap() - 0.2).abs() < 1e-15);
    }
    let sep = VolSurface::separable(vec![SeparableTerm { alpha: 1.0, r_coeffs: vec![1.0, 0.1], q_coeffs: vec![1.0, -0.2] }], dom()).unwrap();
    assert!((sep.sigma(1.0, 0.5).unwrap() - 0.99).abs() < 1e-15);
}

#[test]
fn derivative_fixtures() {
    let c = VolSurface::constant(0.2, dom()).unwrap();
    assert_eq!(c.sigma_derivatives(1.0, 0.5).unwrap(), (0.2, 0.0, 0.0));
    let lin = VolSurface::poly(&[(0, 0, 0.1), (1, 0, 0.05)], dom()).unwrap();
    let (_, sx, sxx) = lin.sigma_derivatives(3.0, 0.2).unwrap();
    assert!((sx - 0.05).abs() < 1e-15 && sxx == 0.0);
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut coeffs = vec![(0, 0, 1.0)];
        for k in 0..=3 {
            for q in 0..=2 {
                coeffs.push((k, q, rng.random_range(-0.05..0.05)));
            }
        }
        let v = VolSurface::poly(&coeffs, VolDomain::new(0.0, 2.0, 1.0)).unwrap();
        let (s, t) = (rng.random_range(0.2..1.8), rng.random_range(0.0..1.0));
        let h = 1e-5;
        let (_, sx, sxx) = v.sigma_derivatives(s, t).unwrap();
        let f = |x: f64| v.sigma(x, t).unwrap();
        let fd1 = (f(s + h) - f(s - h)) / (2.0 * h);
        let fd2 = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
        assert!((sx - fd1).abs() <= 1e-6 * sx.abs().max(1e-3), "{sx} vs {fd1}");
        assert!((sxx - fd2).abs() <= 1e-3 * sxx.abs().max(1e-2), "{sxx} vs {fd2}");
    }
}

#[test]
fn sigma_max_fixtures() {
    let g = Grid1D::new(0.0, 4.0, 6).unwrap();
    assert_eq!(VolSurface::constant(0.2, dom()).unwrap().sigma_max(&g, 1.0).value, 0.2);
    let rising = VolSurface::poly(&[(0, 0, 0.1), (0, 1, 0.1)], dom()).unwrap();
    assert!((rising.sigma_max(&g, 1.0).value - 0.2).abs() < 1e-15);

    let v = VolSurface::poly(&[(0, 0, 0.2), (1, 0, 0.05), (2, 0, -0.02), (1, 1, 0.03), (2, 2, -0.01), (0, 2, 0.04)], dom()).unwrap();
    let sampled = v.sigma_max(&g, 1.0).value;
    let mut brute = f64::NEG_INFINITY;
    for &s in g.points() {
        for j in 0..16_000 {
            brute = brute.max(v.sigma(s, j as f64 / 15_999.0).unwrap());
        }
    }
    assert!((sampled - brute).abs() <= 1e-3 * brute, "{sampled} vs {brute}");
}

#[test]
fn rejects_nonpositive_and_out_of_domain() {
    assert!(matches!(VolSurface::poly(&[(0, 0, 0.1), (1, 0, -0.05)], dom()), Err(Error::Positivity(_))));
    assert!(VolSurface::poly(&[(0, 0, 0.0)], dom()).is_err());
    let c = VolSurface::constant(0.2, dom()).unwrap();
    assert!(c.sigma(5.0, 0.0).is_err());
}

#[test]
fn separable_expands_to_polynomial() {
    let sep = VolSurface::separable(
        vec![
            SeparableTerm { alpha: 0.2, r_coeffs: vec![1.0, 0.1], q_coeffs: vec![1.0, 0.3] },
            SeparableTerm { alpha: 0.05, r_coeffs: vec![1.0, -0.1, 0.02], q_coeffs: vec![1.0] },
        ],
        dom(),
    )
    .unwrap();
    assert_eq!(sep.rank(), 2);
    assert_eq!(sep.degrees(), (2, 1));
    let p = sep.to_poly();
    for i in 0..=20 {
        let s = 0.2 * i as f64;
        for t in [0.0, 0.5, 1.0] {
            assert!((sep.sigma(s, t).unwrap() - p.sigma(s, t).unwrap()).abs() < 1e-14);
            let (a, b) = (sep.sigma_derivatives(s, t).unwrap(), p.sigma_derivatives(s, t).unwrap());
            assert!((a.1 - b.1).abs() < 1e-14 && (a.2 - b.2).abs() < 1e-14);
        }
    }
}
