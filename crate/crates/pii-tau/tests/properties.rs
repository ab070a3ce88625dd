//! Property tests for the structural invariants.

use pii_tau::cauchy::{build_sinh_contour, log_near};
use pii_tau::cli::parse_complex;
use pii_tau::fredholm::{log_det, rank_one_operator};
use pii_tau::geometry::{theta, theta_prime};
use pii_tau::jump::{jump_entries, Matrix2};
use pii_tau::monodromy::{params_from_pair, stokes_from_pair};
use pii_tau::tau::Region;
use pii_tau::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

/// Stokes pairs with `s1 s3` away from the excluded values and the branch cut.
fn stokes_pair() -> impl Strategy<Value = (C64, C64)> {
    (complex(2.0), complex(2.0)).prop_filter("admissible pair", |(s1, s3)| {
        let q = 1.0 - s1 * s3;
        (s1 * s3).norm() > 1e-3 && q.norm() > 1e-2 && q.arg().abs() < 0.9 * PI
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_inverse_is_two_sided(a in complex(3.0), b in complex(3.0), c in complex(3.0), d in complex(3.0)) {
        let m = Matrix2::new(a, b, c, d);
        prop_assume!(m.det().norm() > 1e-2);
        let scale = 1.0 + m.max_abs() * m.inv().max_abs();
        for p in [m * m.inv(), m.inv() * m] {
            prop_assert!((p - Matrix2::identity()).max_abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn complex_parsing_roundtrips(z in complex(1e3)) {
        let text = format!("{}{:+}i", z.re, z.im);
        prop_assert_eq!(parse_complex(&text).unwrap(), z);
    }

    #[test]
    fn stokes_constraint_holds((s1, s3) in stokes_pair()) {
        let sd = stokes_from_pair(s1, s3).unwrap();
        prop_assert!(sd.constraint_residual() < 1e-12 * (1.0 + (s1 * s3).norm()) * (1.0 + sd.s2.norm()));
        for k in 1..=3 {
            prop_assert_eq!(sd.s(k + 3).unwrap(), -sd.s(k).unwrap());
        }
    }

    #[test]
    fn monodromy_identity_holds((s1, s3) in stokes_pair()) {
        let mp = params_from_pair(s1, s3).unwrap();
        prop_assert!(mp.monodromy_residual() < 1e-9);
    }

    #[test]
    fn jump_is_unimodular_and_reflects(y in -8.0f64..8.0, tr in 0.5f64..4.0, ti in 0.0f64..1.0) {
        let mp = params_from_pair(C64::new(0.0, 2.0), C64::new(0.0, 1.0)).unwrap();
        let t = C64::new(tr, ti);
        let z = C64::new(0.0, y);
        let j = jump_entries(z, t, &mp).unwrap();
        let m = j.a.norm().max(j.d.norm()).max(1.0);
        prop_assert!((j.det() - 1.0).norm() < 1e-9 * m * m);
        let mirrored = jump_entries(-z, t, &mp).unwrap();
        prop_assert_eq!(j.c, mirrored.b);
    }

    #[test]
    fn theta_is_odd_with_consistent_derivative(z in complex(3.0)) {
        prop_assert!((theta(-z) + theta(z)).norm() < 1e-12 * (1.0 + theta(z).norm()));
        let h = 1e-5;
        let fd = (theta(z + h) - theta(z - h)) / (2.0 * h);
        prop_assert!((fd - theta_prime(z)).norm() < 1e-7 * (1.0 + theta_prime(z).norm()));
    }

    #[test]
    fn log_near_picks_the_closest_branch(v in complex(5.0), k in -5i64..5, jitter in -3.0f64..3.0) {
        prop_assume!(v.norm() > 1e-6);
        let principal = v.ln();
        let reference = principal + C64::new(0.0, 2.0 * PI * k as f64 + jitter);
        let l = log_near(v, reference);
        prop_assert!((l.exp() - v).norm() < 1e-12 * v.norm());
        prop_assert!((l.im - reference.im).abs() <= PI + 1e-12);
    }

    #[test]
    fn region_grid_has_requested_shape(nx in 2usize..12, ny in 2usize..12, re0 in 0.5f64..3.0, w in 0.1f64..2.0, h in 0.1f64..2.0) {
        let r = Region { re0, re1: re0 + w, im0: -h, im1: h };
        prop_assert!(r.validate().is_ok());
        let g = r.grid(nx, ny);
        prop_assert_eq!(g.len(), nx * ny);
        prop_assert_eq!(g[0], C64::new(re0, -h));
        prop_assert_eq!(g[nx * ny - 1], C64::new(re0 + w, h));
    }

    #[test]
    fn rank_one_determinant_is_one_minus_trace(a in complex(0.5)) {
        let k = build_sinh_contour(160, 1.0, 0.0).unwrap();
        let f: Vec<C64> = k.nodes.iter().map(|z| a / (1.0 - z * z)).collect();
        let g: Vec<C64> = k.nodes.iter().map(|z| 1.0 / (1.0 - z * z)).collect();
        let trace: C64 = (0..k.n_nodes).map(|i| f[i] * g[i] * k.weights[i]).sum();
        let op = rank_one_operator(&k, &f, &g, C64::new(1.0, 0.0));
        prop_assert!((log_det(&op).det - (1.0 - trace)).norm() < 1e-10);
    }
}
