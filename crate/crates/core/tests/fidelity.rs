use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;

use spindir::angular::HalfInt;
use spindir::encoding::{
    antiparallel_state, optimal_state, parallel_state, product_state, quadratic_form,
    EffectiveState,
};
use spindir::fidelity::{
    antiparallel_even_maf, asymptotic_maf, info_gain, maf_closed_form, maf_quadrature,
    reports_to_csv, table_row, AsymptoticOrder, FidelityReport, DEFAULT_INFO_NODES,
};
use spindir::Error;

/// Weight of `|↑^{N/2+m} ↓^{N/2-m}>` in each total-spin sector, by brute
/// force: diagonalise `S² = 3N/4 + Σ_{a<b} (P_ab - 1/2)` on the fixed-`m`
/// bitstring sector and project.
fn casimir_weights(n: u32, ups: u32) -> Vec<(f64, f64)> {
    let basis: Vec<u32> = (0u32..1 << n).filter(|b| b.count_ones() == ups).collect();
    let index = |b: u32| basis.binary_search(&b).unwrap();
    let dim = basis.len();
    let mut s2 = DMatrix::<f64>::zeros(dim, dim);
    for (col, &b) in basis.iter().enumerate() {
        s2[(col, col)] += 0.75 * n as f64;
        for a in 0..n {
            for c in (a + 1)..n {
                let (ba, bc) = ((b >> a) & 1, (b >> c) & 1);
                let swapped = if ba == bc { b } else { b ^ (1 << a) ^ (1 << c) };
                s2[(index(swapped), col)] += 1.0;
                s2[(col, col)] -= 0.5;
            }
        }
    }
    // Product state: first `ups` spins up.
    let psi = DVector::from_fn(dim, |r, _| {
        if basis[r] == (1u32 << ups) - 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(s2);
    let mut weights: Vec<(f64, f64)> = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let j = (-1.0 + (1.0 + 4.0 * lambda).sqrt()) / 2.0;
        let j = (2.0 * j).round() / 2.0;
        let w = eig.eigenvectors.column(k).dot(&psi).powi(2);
        match weights.iter_mut().find(|(jj, _)| *jj == j) {
            Some(e) => e.1 += w,
            None => weights.push((j, w)),
        }
    }
    weights.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    weights
}

#[test]
fn coefficients_match_brute_force_spin_projection() {
    for n in 1..=8u32 {
        for ups in n.div_ceil(2)..=n {
            let twice_m = 2 * ups as i32 - n as i32;
            let state = product_state(n, HalfInt::from_twice(twice_m)).unwrap();
            let brute = casimir_weights(n, ups);
            for (j, a) in state.components() {
                let w = brute
                    .iter()
                    .find(|(jj, _)| *jj == j.value())
                    .map_or(0.0, |e| e.1);
                assert!((a * a - w).abs() < 1e-12, "N={n} m={twice_m}/2 j={j}: {} vs {w}", a * a);
            }
        }
    }
}

#[test]
fn product_state_reference_coefficients() {
    let s = product_state(2, HalfInt::ZERO).unwrap();
    assert_relative_eq!(s.coeffs()[0], 0.5f64.sqrt(), epsilon = 1e-15);
    assert_relative_eq!(s.coeffs()[1], 0.5f64.sqrt(), epsilon = 1e-15);
    assert_eq!(product_state(2, HalfInt::ONE).unwrap().coeffs(), &[1.0]);
    let s = product_state(3, HalfInt::HALF).unwrap();
    assert_relative_eq!(s.coeffs()[0], (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
    assert_relative_eq!(s.coeffs()[1], (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
    assert_eq!(product_state(3, -HalfInt::HALF).unwrap(), s);
    assert!(product_state(3, HalfInt::ONE).is_err());
    assert!(product_state(3, HalfInt::from_twice(5)).is_err());
}

#[test]
fn product_states_are_unit_norm_up_to_sixty_spins() {
    for n in 1..=60u32 {
        for twice_m in (n as i32 % 2..=n as i32).step_by(2) {
            let s = product_state(n, HalfInt::from_twice(twice_m)).unwrap();
            let norm: f64 = s.coeffs().iter().map(|a| a * a).sum();
            assert!((norm - 1.0).abs() < 1e-12, "N={n} 2m={twice_m}: {norm}");
            assert!(s.coeffs().iter().all(|&a| a > 0.0));
        }
    }
}

#[test]
fn quadratic_form_reference_entries() {
    let q = quadratic_form(HalfInt::ONE, HalfInt::ZERO);
    assert_eq!(q.diag(), &[0.5, 0.5]);
    assert_relative_eq!(q.offdiag()[0], 0.5 / 3f64.sqrt(), epsilon = 1e-15);
    let q = quadratic_form(HalfInt::from_twice(3), HalfInt::HALF);
    assert_relative_eq!(q.diag()[0], 0.5 + 0.5 / 3.0, epsilon = 1e-15);
    assert_relative_eq!(q.diag()[1], 0.5 + 0.5 / 15.0, epsilon = 1e-15);
    assert_relative_eq!(q.offdiag()[0], 0.5 * 2f64.sqrt() / 3.0, epsilon = 1e-15);
    let q = quadratic_form(HalfInt::from_int(3), HalfInt::from_int(3));
    assert_eq!(q.dim(), 1);
    assert_relative_eq!(q.diag()[0], 0.5 + 0.5 * 3.0 / 4.0, epsilon = 1e-15);
}

#[test]
fn closed_form_matches_quadrature_for_all_product_and_optimal_states() {
    for n in 1..=20u32 {
        for twice_m in (n as i32 % 2..=n as i32).step_by(2) {
            let s = product_state(n, HalfInt::from_twice(twice_m)).unwrap();
            let quad = maf_quadrature(&s, 40).unwrap();
            assert!((maf_closed_form(&s) - quad).abs() < 1e-10, "N={n} 2m={twice_m}");
        }
        let (s, f) = optimal_state(n).unwrap();
        assert!((f - maf_quadrature(&s, 40).unwrap()).abs() < 1e-10, "optimal N={n}");
        assert!((f - maf_closed_form(&s)).abs() < 1e-12);
    }
}

#[test]
fn quadrature_refuses_too_few_nodes() {
    let s = parallel_state(6).unwrap();
    assert!(matches!(
        maf_quadrature(&s, 4),
        Err(Error::InsufficientNodes { required: 5, given: 4 })
    ));
    assert_relative_eq!(maf_quadrature(&s, 5).unwrap(), 7.0 / 8.0, epsilon = 1e-14);
    assert_relative_eq!(
        maf_quadrature(&parallel_state(3).unwrap(), 8).unwrap(),
        0.8,
        epsilon = 1e-12
    );
}

#[test]
fn even_antiparallel_sum_matches_general_form() {
    for n in 1..=15u64 {
        let general = maf_closed_form(&product_state(2 * n as u32, HalfInt::ZERO).unwrap());
        assert!((antiparallel_even_maf(n).unwrap() - general).abs() < 1e-12, "n={n}");
    }
    let two = (3.0 + 3f64.sqrt()) / 6.0;
    assert_relative_eq!(antiparallel_even_maf(1).unwrap(), two, epsilon = 1e-14);
    assert!((antiparallel_even_maf(2).unwrap() - 0.8848).abs() < 5e-5);
    assert!((antiparallel_even_maf(3).unwrap() - 0.9235).abs() < 5e-5);
    assert!(antiparallel_even_maf(0).is_err());
}

#[test]
fn fidelity_orderings() {
    let mut prev = (0.0, 0.0);
    for n in 1..=30u32 {
        let fp = maf_closed_form(&parallel_state(n).unwrap());
        let fa = maf_closed_form(&antiparallel_state(n).unwrap());
        let (_, fo) = optimal_state(n).unwrap();
        assert_relative_eq!(fp, (n as f64 + 1.0) / (n as f64 + 2.0), epsilon = 1e-14);
        assert!(fp > prev.0 && fa > prev.1, "monotone at N={n}");
        prev = (fp, fa);
        assert!(fo >= fa - 1e-14 && fa >= fp - 1e-14, "N={n}");
        if n >= 2 {
            assert!(fa > fp);
        }
        if n >= 3 {
            assert!(fo > fa + 1e-6, "N={n}");
        }
    }
    let (_, f2) = optimal_state(2).unwrap();
    assert_relative_eq!(f2, maf_closed_form(&antiparallel_state(2).unwrap()), epsilon = 1e-14);
}

#[test]
fn optimal_states_are_positive_and_normalized() {
    for n in 1..=30u32 {
        let (s, _) = optimal_state(n).unwrap();
        assert_eq!(s.m().twice(), n as i32 % 2);
        let norm: f64 = s.coeffs().iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(s.coeffs().iter().all(|&a| a > 0.0));
    }
    let (s, _) = optimal_state(2).unwrap();
    assert_relative_eq!(s.coeffs()[0], 0.5f64.sqrt(), epsilon = 1e-12);
}

/// Single multiplet: `p(u) = (2J+1) u^{2J}` with `u = (1+x)/2`, so
/// `I = log₂(2J+1) - 2J/((2J+1) ln 2)`.
#[test]
fn parallel_information_gain_closed_form() {
    for n in 1..=12u32 {
        let tj = n as f64;
        let exact = (tj + 1.0).log2() - tj / ((tj + 1.0) * std::f64::consts::LN_2);
        let got = info_gain(&parallel_state(n).unwrap(), DEFAULT_INFO_NODES).unwrap();
        assert!((got - exact).abs() < 1e-9, "N={n}: {got} vs {exact}");
    }
}

/// Frozen from an adaptive-quadrature evaluation built on an independent
/// symbolic d-matrix.
#[test]
fn antiparallel_information_gain_reference_values() {
    let cases = [(6u32, 2.2873880791), (7, 2.4987309777)];
    for (n, expected) in cases {
        let got = info_gain(&antiparallel_state(n).unwrap(), DEFAULT_INFO_NODES).unwrap();
        assert!((got - expected).abs() < 1e-9, "N={n}: {got}");
    }
    let two_a = info_gain(&antiparallel_state(2).unwrap(), DEFAULT_INFO_NODES).unwrap();
    let two_o = info_gain(&optimal_state(2).unwrap().0, DEFAULT_INFO_NODES).unwrap();
    assert!((two_a - two_o).abs() < 1e-12);
    assert!(info_gain(&parallel_state(2).unwrap(), 100).is_err());
}

#[test]
fn asymptotic_forms() {
    assert_relative_eq!(asymptotic_maf(100, AsymptoticOrder::Leading).unwrap(), 0.995);
    assert_relative_eq!(asymptotic_maf(6, AsymptoticOrder::Next).unwrap(), 13.0 / 14.0);
    assert!(asymptotic_maf(7, AsymptoticOrder::Next).is_err());
    let gap6 = 13.0 / 14.0 - antiparallel_even_maf(3).unwrap();
    assert!((gap6 - 0.005).abs() < 5e-4, "{gap6}");
    let mut scaled = Vec::new();
    for n in [10u64, 20, 40, 80, 160, 320, 400] {
        let exact = antiparallel_even_maf(n / 2).unwrap();
        let next = asymptotic_maf(n, AsymptoticOrder::Next).unwrap();
        scaled.push((exact - next).abs() * (n as f64).powi(3));
    }
    assert!(scaled.iter().all(|&s| s < 1.0), "{scaled:?}");
    assert!((scaled.last().unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn report_serialization() {
    let row = table_row(2).unwrap();
    let json = serde_json::to_value(&row).unwrap();
    for key in ["N", "F_P", "F_A", "F_O", "I_P", "I_A", "I_O"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    let back: FidelityReport = serde_json::from_value(json).unwrap();
    assert_eq!(back, row);
    let csv = reports_to_csv(&[row], Some(4));
    assert_eq!(csv.lines().next(), Some(FidelityReport::CSV_HEADER));
    let one = table_row(1).unwrap();
    for f in &one.values()[..3] {
        assert_relative_eq!(*f, 2.0 / 3.0, epsilon = 1e-12);
    }
}

proptest! {
    #[test]
    fn state_json_round_trip(n in 1u32..40, pick in 0u32..40) {
        let twice_m = (n % 2 + 2 * (pick % (n / 2 + 1))) as i32;
        let s = product_state(n, HalfInt::from_twice(twice_m)).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(v["N"].as_u64(), Some(n as u64));
        prop_assert_eq!(v["twice_m"].as_i64(), Some(twice_m as i64));
        let back: EffectiveState = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn closed_form_lies_in_unit_interval(n in 1u32..80, pick in 0u32..80) {
        let twice_m = (n % 2 + 2 * (pick % (n / 2 + 1))) as i32;
        let f = maf_closed_form(&product_state(n, HalfInt::from_twice(twice_m)).unwrap());
        prop_assert!((0.5..1.0).contains(&f));
    }
}
