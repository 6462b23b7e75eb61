use proptest::prelude::*;

use zc_core::currents::{pair_points, TestFunction};
use zc_core::ensemble::{build_ensemble, sample, EnsembleSpec, PolynomialBasis};
use zc_core::grid::ComplexGrid;
use zc_core::linalg::random_unitary;
use zc_core::rng::StreamKey;
use zc_core::rootfind::{roots_univariate, ZeroSet};
use zc_core::szego::{expected_density, kernel_on_grid};
use zc_core::C64;

fn basis(s: &str) -> PolynomialBasis {
    build_ensemble(&s.parse::<EnsembleSpec>().unwrap()).unwrap()
}

fn expand(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vieta_round_trip(roots in prop::collection::vec(complex(), 1..16)) {
        let coeffs = expand(&roots);
        let z = roots_univariate(&coeffs).unwrap();
        prop_assert_eq!(z.len(), roots.len());
        let found: Vec<C64> = z.points.iter().map(|p| p.z).collect();
        let back = expand(&found);
        let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for (a, b) in coeffs.iter().zip(&back) {
            prop_assert!((a - b).norm() <= 1e-8 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn conjugate_coefficients_give_conjugate_roots(n in 2u32..30, seed in any::<u64>()) {
        let b = basis(&format!("family=kac N={n}"));
        let c = sample(&b, seed, 0).coefficients().to_vec();
        let conj: Vec<C64> = c.iter().map(|v| v.conj()).collect();
        let (a, z) = (roots_univariate(&c).unwrap(), roots_univariate(&conj).unwrap());
        for p in &a.points {
            let target = p.z.conj();
            let d = z.points.iter().map(|q| (q.z - target).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(d <= 1e-8 * target.norm().max(1.0));
        }
    }

    #[test]
    fn kernel_is_unitarily_invariant(n in 1u32..12, seed in any::<u64>()) {
        let b = basis(&format!("family=su2 N={n}"));
        let u = b.transformed(random_unitary(b.len(), StreamKey::new(seed, 0, 0)));
        let g = ComplexGrid::square(1, 2.5, 17).unwrap();
        let (k0, k1) = (kernel_on_grid(&b, &g).unwrap(), kernel_on_grid(&u, &g).unwrap());
        for (x, y) in k0.values().iter().zip(k1.values()) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
        }
    }

    #[test]
    fn density_ignores_exact_rescaling(n in 2u32..20, k in -3i32..4, quarter in 0u8..4) {
        let lambda = C64::new(2f64.powi(k), 0.0) * C64::i().powu(quarter as u32);
        let b = basis(&format!("family=kac N={n}"));
        let g = ComplexGrid::square(1, 1.5, 41).unwrap();
        let d0 = expected_density(&kernel_on_grid(&b, &g).unwrap()).unwrap();
        let d1 = expected_density(&kernel_on_grid(&b.scaled(lambda), &g).unwrap()).unwrap();
        for (x, y) in d0.values().iter().zip(d1.values()) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
        }
    }

    #[test]
    fn orthonormalized_bases_have_identity_gram(
        n in 1u32..25,
        measure in prop::sample::select(vec!["unit-circle-arc", "interval-arcsine", "interval-uniform", "unit-disk-area"]),
    ) {
        let b = basis(&format!("family=onb measure={measure} N={n}"));
        prop_assert!(b.gram_residual().unwrap() < 1e-8);
    }

    #[test]
    fn pairing_is_additive_over_zero_sets(a in prop::collection::vec(complex(), 0..10), b in prop::collection::vec(complex(), 0..10)) {
        let phi = TestFunction::new(C64::new(0.3, -0.2), 1.1);
        let set = |pts: &[C64]| ZeroSet {
            dim: 1,
            points: pts.iter().map(|z| zc_core::Point::one(*z)).collect(),
            residuals: vec![0.0; pts.len()],
            multiplicity: vec![1; pts.len()],
            diagnostics: Default::default(),
        };
        let joined: Vec<C64> = a.iter().chain(&b).copied().collect();
        let pa = pair_points(&set(&a), &phi, 1, 1).unwrap().raw;
        let pb = pair_points(&set(&b), &phi, 1, 1).unwrap().raw;
        let pj = pair_points(&set(&joined), &phi, 1, 1).unwrap().raw;
        prop_assert!((pa + pb - pj).abs() < 1e-12);
        prop_assert!(pj >= 0.0 && pj <= joined.len() as f64);
    }

    #[test]
    fn sampling_is_a_pure_function_of_the_key(seed in any::<u64>(), trial in any::<u64>()) {
        let b = basis("family=kac N=6");
        let (x, y) = (sample(&b, seed, trial), sample(&b, seed, trial));
        prop_assert_eq!(x.coefficients(), y.coefficients());
        let next = sample(&b, seed, trial.wrapping_add(1));
        prop_assert_ne!(x.coefficients(), next.coefficients());
    }
}
