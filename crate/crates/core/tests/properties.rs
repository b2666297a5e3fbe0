use std::f64::consts::PI;

use fourns_core::diagnostics::{energy, mass};
use fourns_core::dynamics::{integrator, linear_propagate, StepContext};
use fourns_core::gwp::{growth_exponent_exact, growth_exponents_exact, gwp_threshold, second_exponent_threshold, Q};
use fourns_core::inequality_lab::{random_unit_field, FrequencyTuple};
use fourns_core::multipliers::{IMultiplier, Variant};
use fourns_core::norms::lp_norm;
use fourns_core::{Field, Grid2D};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid2D {
    Grid2D::square(32, 2.0 * PI).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fft_round_trip(seed in 0u64..1000, band in 1i64..15) {
        let f = random_unit_field(&grid(), band, seed, 0).unwrap();
        let back = f.spectral().physical();
        prop_assert!(back.rel_diff(&f) < 1e-13);
    }

    #[test]
    fn free_flow_is_a_group(seed in 0u64..1000, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let f = random_unit_field(&grid(), 8, seed, 1).unwrap();
        let a = linear_propagate(&linear_propagate(&f, t1), t2);
        let b = linear_propagate(&f, t1 + t2);
        prop_assert!(a.rel_diff(&b) < 1e-11);
        let n = lp_norm(&b, 2.0).unwrap();
        prop_assert!((n - 1.0).abs() < 1e-13);
    }

    #[test]
    fn strang_step_conserves_mass(seed in 0u64..1000, amp in 0.1f64..2.0, k in 1u32..4) {
        let f = random_unit_field(&grid(), 6, seed, 2).unwrap().scale(Complex64::new(amp, 0.0));
        let ctx = StepContext { k, dealias: Default::default(), linear_only: false };
        let u = integrator("strang").unwrap().step(&f, 1e-3, &ctx).unwrap();
        let (m0, m1) = (mass(&f), mass(&u));
        prop_assert!((m1 - m0).abs() / m0 < 1e-13);
    }

    #[test]
    fn phase_rotation_invariance(seed in 0u64..1000, theta in 0.0f64..(2.0 * PI), k in 1u32..4) {
        let f = random_unit_field(&grid(), 6, seed, 3).unwrap();
        let g = f.scale(Complex64::from_polar(1.0, theta));
        prop_assert!((mass(&g) - mass(&f)).abs() <= 1e-13 * mass(&f));
        prop_assert!((energy(&g, k) - energy(&f, k)).abs() <= 1e-12 * energy(&f, k));
    }

    #[test]
    fn multiplier_shape(s in 0.05f64..1.95, j in 0i32..8, r in 0.0f64..5000.0, smooth: bool) {
        let n = 2f64.powi(j);
        let variant = if smooth { Variant::Smooth } else { Variant::Sharp };
        let im = IMultiplier::new(s, n, variant).unwrap();
        let m = im.eval(r);
        prop_assert!(m > 0.0 && m <= 1.0);
        if r <= n {
            prop_assert_eq!(m, 1.0);
        }
        prop_assert!(im.eval(r * 1.5 + 1e-9) <= m + 1e-15);
        if r >= 2.0 * n {
            let sharp = (n / r).powf(2.0 - s);
            prop_assert!((m - sharp).abs() <= 1e-12 * sharp);
        }
    }

    #[test]
    fn closed_tuples_sum_to_zero(
        entries in proptest::collection::vec((-1e4f64..1e4, -1e4f64..1e4), 1..9)
    ) {
        let free: Vec<[f64; 2]> = entries.into_iter().map(|(a, b)| [a, b]).collect();
        let t = FrequencyTuple::close(&free);
        prop_assert_eq!(t.sum(), [0.0, 0.0]);
        prop_assert_eq!(t.len(), free.len() + 1);
    }

    #[test]
    fn exponent_sign_matches_thresholds(k in 1u32..64, num in 1i64..4096) {
        let s = Q::new(num, 2048);
        let (e1, e2) = growth_exponents_exact(k, s);
        let zero = Q::from_integer(0);
        prop_assert_eq!(e1 > zero, s > gwp_threshold(k));
        prop_assert_eq!(e2 > zero, s > second_exponent_threshold(k));
        if s > gwp_threshold(k) && s < Q::from_integer(2) && e2 > zero {
            prop_assert!(growth_exponent_exact(k, s) > zero);
        }
    }
}

#[test]
fn energy_of_plane_wave() {
    let g = Grid2D::new(32, 32, 2.0 * PI, 4.0 * PI).unwrap();
    let a = 0.7;
    let f = Field::plane_wave(&g, 2, 3, Complex64::new(a, 0.0)).unwrap();
    let (kx, ky) = (2.0, 3.0 * 2.0 * PI / (4.0 * PI));
    let r2: f64 = kx * kx + ky * ky;
    let area = 8.0 * PI * PI;
    for k in 1..=3u32 {
        let oracle = area * (0.5 * r2 * r2 * a * a + 0.5 * r2 * a * a + a.powi(2 * k as i32 + 2) / (2.0 * k as f64 + 2.0));
        let e = energy(&f, k);
        assert!((e - oracle).abs() / oracle < 1e-12, "k={k}: {e} vs {oracle}");
    }
}
