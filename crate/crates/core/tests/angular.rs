use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use spindir::angular::{
    gauss_legendre, legendre_p, spherical_harmonic, three_j, wigner_big_d, wigner_small_d,
    HalfInt,
};

fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

/// `(j, m, k)` with `j <= 4` (as doubled integers) and valid projections.
fn jmk() -> impl Strategy<Value = (i32, i32, i32)> {
    (0..=8i32).prop_flat_map(|tj| {
        let proj = (0..=tj).prop_map(move |i| -tj + 2 * i);
        (Just(tj), proj.clone(), proj)
    })
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `Y_L^M` from the explicit power-series form of `P_L` differentiated `M`
/// times, with the Condon–Shortley phase put in by hand.
fn harmonic_oracle(l: u64, m: i64, theta: f64, phi: f64) -> Complex64 {
    let ma = m.unsigned_abs();
    let x = theta.cos();
    let mut deriv = 0.0;
    for k in 0..=l / 2 {
        let power = l - 2 * k;
        if power < ma {
            continue;
        }
        let coeff = (-1f64).powi(k as i32) * binom(l, k) * binom(2 * l - 2 * k, l)
            / 2f64.powi(l as i32);
        let falling = factorial(power) / factorial(power - ma);
        deriv += coeff * falling * x.powi((power - ma) as i32);
    }
    let plm = (-1f64).powi(ma as i32) * (1.0 - x * x).powf(ma as f64 / 2.0) * deriv;
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - ma) / factorial(l + ma)).sqrt();
    let positive = Complex64::from_polar(norm * plm, ma as f64 * phi);
    if m >= 0 {
        positive
    } else {
        positive.conj() * (-1f64).powi(ma as i32)
    }
}

#[test]
fn harmonics_match_power_series_form() {
    for l in 0..=8u64 {
        for m in -(l as i64)..=(l as i64) {
            for &(theta, phi) in &[(0.3, 1.2), (PI / 3.0, PI / 4.0), (2.9, 5.5)] {
                let y = spherical_harmonic(l as i32, m as i32, theta, phi).unwrap();
                let o = harmonic_oracle(l, m, theta, phi);
                assert!((y - o).norm() < 1e-12, "L={l} M={m}: {y} vs {o}");
            }
        }
    }
}

#[test]
fn small_d_reference_values() {
    for tj in 0..=6 {
        for tm in (-tj..=tj).step_by(2) {
            for tk in (-tj..=tj).step_by(2) {
                let d = wigner_small_d(h(tj), h(tm), h(tk), 0.0).unwrap();
                assert_eq!(d, if tm == tk { 1.0 } else { 0.0 });
            }
        }
    }
    let t = 0.77;
    assert_relative_eq!(wigner_small_d(h(2), h(0), h(0), t).unwrap(), t.cos(), epsilon = 1e-15);
    assert_relative_eq!(
        wigner_small_d(h(1), h(1), h(1), t).unwrap(),
        (t / 2.0).cos(),
        epsilon = 1e-15
    );
    // d^1_{10} = -sin/√2
    assert_relative_eq!(
        wigner_small_d(h(2), h(2), h(0), t).unwrap(),
        -t.sin() / 2f64.sqrt(),
        epsilon = 1e-15
    );
    assert!(wigner_small_d(h(2), h(1), h(0), t).is_err());
    assert!(wigner_small_d(h(2), h(4), h(0), t).is_err());
}

#[test]
fn small_d_orthogonality_over_cos_theta() {
    let q = gauss_legendre(24);
    for tj in 0..=8 {
        for tjp in (tj % 2..=8).step_by(2) {
            let lo = tj.min(tjp);
            for tm in (-lo..=lo).step_by(2) {
                for tk in (-lo..=lo).step_by(2) {
                    let v = q.integrate(|x| {
                        let b = x.acos();
                        wigner_small_d(h(tj), h(tm), h(tk), b).unwrap()
                            * wigner_small_d(h(tjp), h(tm), h(tk), b).unwrap()
                    }) * (tj as f64 + 1.0)
                        / 2.0;
                    let expected = if tj == tjp { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-10, "j={tj}/2 j'={tjp}/2: {v}");
                }
            }
        }
    }
}

#[test]
fn three_j_reference_values() {
    assert_relative_eq!(
        three_j(h(2), h(2), h(0), h(2), h(-2), h(0)).unwrap(),
        1.0 / 3f64.sqrt(),
        epsilon = 1e-15
    );
    assert_eq!(three_j(h(2), h(2), h(2), h(2), h(0), h(0)).unwrap(), 0.0);
    // Triangle violation.
    assert_eq!(three_j(h(1), h(1), h(4), h(1), h(-1), h(0)).unwrap(), 0.0);
    assert!(three_j(h(2), h(2), h(2), h(3), h(-3), h(0)).is_err());
}

/// `Σ_{m1,m2} (2l+1) (j j' l; m1 m2 k)(j j' l'; m1 m2 k') = δ_{ll'} δ_{kk'}`.
#[test]
fn three_j_orthogonality() {
    for tj in 0..=5i32 {
        for tjp in 0..=5 {
            let tl_lo = (tj - tjp).abs();
            let tl_hi = tj + tjp;
            for tl in (tl_lo..=tl_hi).step_by(2) {
                for tlp in (tl_lo..=tl_hi).step_by(2) {
                    for tk in (-tl..=tl).step_by(2) {
                        for tkp in (-tlp..=tlp).step_by(2) {
                            let mut sum = 0.0;
                            for tm1 in (-tj..=tj).step_by(2) {
                                for tm2 in (-tjp..=tjp).step_by(2) {
                                    let a = three_j(h(tj), h(tjp), h(tl), h(tm1), h(tm2), h(tk))
                                        .unwrap();
                                    let b = three_j(
                                        h(tj),
                                        h(tjp),
                                        h(tlp),
                                        h(tm1),
                                        h(tm2),
                                        h(tkp),
                                    )
                                    .unwrap();
                                    sum += a * b;
                                }
                            }
                            sum *= tl as f64 + 1.0;
                            let expected = if tl == tlp && tk == tkp { 1.0 } else { 0.0 };
                            assert!(
                                (sum - expected).abs() < 1e-12,
                                "({tj},{tjp},{tl},{tlp},{tk},{tkp}): {sum}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn quadrature_reference_rules() {
    let one = gauss_legendre(1);
    assert_eq!(one.nodes(), &[0.0]);
    assert_relative_eq!(one.weights()[0], 2.0, epsilon = 1e-15);
    let two = gauss_legendre(2);
    assert_relative_eq!(two.nodes()[1].abs(), 1.0 / 3f64.sqrt(), epsilon = 1e-15);
    assert_relative_eq!(two.weights()[0], 1.0, epsilon = 1e-15);
    assert_relative_eq!(gauss_legendre(3).integrate(|x| x.powi(4)), 0.4, epsilon = 1e-15);
    let big = gauss_legendre(64);
    assert_relative_eq!(big.integrate(|x| legendre_p(40, x).powi(2)), 2.0 / 81.0, epsilon = 1e-13);
}

proptest! {
    #[test]
    fn small_d_transpose_symmetry((tj, tm, tk) in jmk(), beta in 0.0..PI) {
        let d = wigner_small_d(h(tj), h(tm), h(tk), beta).unwrap();
        let dt = wigner_small_d(h(tj), h(tk), h(tm), beta).unwrap();
        let sign = if ((tm - tk) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((d - sign * dt).abs() < 1e-13);
    }

    #[test]
    fn big_d_rows_are_unitary(
        (tj, tm, _k) in jmk(),
        phi in 0.0..(2.0 * PI),
        theta in 0.0..PI,
        gamma in 0.0..(2.0 * PI),
    ) {
        let mut row = 0.0;
        for tk in (-tj..=tj).step_by(2) {
            let d = wigner_big_d(h(tj), h(tm), h(tk), phi, theta, gamma).unwrap();
            let small = wigner_small_d(h(tj), h(tm), h(tk), theta).unwrap();
            prop_assert!((d.norm() - small.abs()).abs() < 1e-13);
            row += d.norm_sqr();
        }
        prop_assert!((row - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_j_column_permutations(
        tj1 in 0..=6i32, tj2 in 0..=6i32, tj3 in 0..=6i32,
        i1 in 0..=6i32, i2 in 0..=6i32,
    ) {
        let (m1, m2) = (-tj1 + 2 * (i1 % (tj1 + 1)), -tj2 + 2 * (i2 % (tj2 + 1)));
        let m3 = -m1 - m2;
        prop_assume!(m3.abs() <= tj3 && (tj3 - m3) % 2 == 0);
        let v = three_j(h(tj1), h(tj2), h(tj3), h(m1), h(m2), h(m3)).unwrap();
        let cyc = three_j(h(tj2), h(tj3), h(tj1), h(m2), h(m3), h(m1)).unwrap();
        prop_assert!((v - cyc).abs() < 1e-13);
        let anti = three_j(h(tj2), h(tj1), h(tj3), h(m2), h(m1), h(m3)).unwrap();
        let twice_sum = tj1 + tj2 + tj3;
        if twice_sum % 2 == 0 {
            let sign = if (twice_sum / 2) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((v - sign * anti).abs() < 1e-13);
        } else {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn harmonic_conjugation(l in 0..=10i32, mi in 0..=20i32, theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let m = mi % (l + 1);
        let y = spherical_harmonic(l, m, theta, phi).unwrap();
        let ym = spherical_harmonic(l, -m, theta, phi).unwrap();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((ym - y.conj() * sign).norm() < 1e-14);
    }
}
