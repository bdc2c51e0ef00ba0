use std::f64::consts::PI;

use lgweak_core::inequality::{
    b3_postselected_form, b3_value, b4_closed_form, b4_postselected_form, b4_unconditioned,
    b4_value, bn_bounds, bn_postselected_decomposition, bn_value, correlators_b3, correlators_b4,
    macrorealist_bounds_bruteforce, postselected_branches, Classification, CorrelatorChain,
    CorrelatorSet,
};
use lgweak_core::qubit::{
    observable_from_angle, sequential_weak_value, state_from_angle, weak_value,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent 2×2 real-matrix oracle: B4 from explicit products.
fn b4_matrix_oracle(alpha: f64, gamma: f64, delta: f64) -> f64 {
    let obs = |t: f64| {
        [
            [(2.0 * t).cos(), (2.0 * t).sin()],
            [(2.0 * t).sin(), -(2.0 * t).cos()],
        ]
    };
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        m
    };
    let psi = [alpha.cos(), alpha.sin()];
    let ev = |m: [[f64; 2]; 2]| {
        psi[0] * (m[0][0] * psi[0] + m[0][1] * psi[1])
            + psi[1] * (m[1][0] * psi[0] + m[1][1] * psi[1])
    };
    let (b, c, d) = (obs(gamma), obs(0.0), obs(delta));
    ev(b) + ev(mul(c, b)) + ev(mul(d, c)) - ev(d)
}

#[test]
fn closed_form_checked_against_matrix_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let (a, g, d) = (
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        );
        assert!((b4_closed_form(a, g, d) - b4_matrix_oracle(a, g, d)).abs() < 1e-12);
    }
}

#[test]
fn b4_matches_closed_form_on_grid() {
    let n = 50;
    let mut checked = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let f = |x: usize| x as f64 * PI / n as f64;
                let (a, g, d) = (f(i), f(j), f(k));
                let closed = b4_closed_form(a, g, d);
                assert!((b4_unconditioned(a, g, d) - closed).abs() < 1e-10);
                if let Ok(set) = correlators_b4(a, g, d) {
                    set.validate().unwrap();
                    assert!((b4_value(&set).value - closed).abs() < 1e-10);
                    assert!((b4_postselected_form(&set) - closed).abs() < 1e-10);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100_000);
}

#[test]
fn b3_forms_agree_on_random_quantum_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut n = 0;
    while n < 1000 {
        let (a, g, c) = (
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        );
        let Ok(inp) = correlators_b3(a, g, c) else {
            continue;
        };
        let direct = b3_value(inp.exp_b, inp.exp_c, inp.corr_bc).value;
        assert!((b3_postselected_form(inp.wv_b_plus, inp.p_c_plus) - direct).abs() < 1e-10);
        n += 1;
    }
}

#[test]
fn b4_forms_agree_on_random_consistent_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut n = 0;
    while n < 1000 {
        let (a, g, d) = (
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        );
        let Ok(set) = correlators_b4(a, g, d) else {
            continue;
        };
        assert!((b4_postselected_form(&set) - b4_value(&set).value).abs() < 1e-10);
        n += 1;
    }
}

/// A CorrelatorSet produced by a macrorealist model: a joint distribution
/// over ±1 values of (I_B, I_C, I_D) with I_A = +1.
fn realist_set(rng: &mut ChaCha8Rng) -> CorrelatorSet {
    // sparse weights reach the polytope's vertices more often
    let mut w: Vec<f64> = (0..8)
        .map(|_| {
            if rng.gen_bool(0.4) {
                0.0
            } else {
                -rng.gen::<f64>().ln()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..8)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    let spin = |k: usize, bit: usize| if k >> bit & 1 == 0 { 1.0 } else { -1.0 };
    let (mut eb, mut ec, mut ebc) = (0.0, 0.0, 0.0);
    let (mut pp, mut pm, mut c_plus, mut c_minus) = (0.0, 0.0, 0.0, 0.0);
    for (k, wk) in w.iter().enumerate() {
        let p = wk / total;
        let (b, c, d) = (spin(k, 0), spin(k, 1), spin(k, 2));
        eb += p * b;
        ec += p * c;
        ebc += p * b * c;
        if d > 0.0 {
            pp += p;
            c_plus += p * c;
        } else {
            pm += p;
            c_minus += p * c;
        }
    }
    let wv_c_plus = if pp > 0.0 { c_plus / pp } else { 0.0 };
    let wv_c_minus = if pm > 0.0 { c_minus / pm } else { 0.0 };
    CorrelatorSet {
        exp_b: eb,
        exp_c: ec,
        corr_bc: ebc,
        exp_d: pp - pm,
        p_d_plus: pp,
        p_d_minus: pm,
        wv_c_plus,
        wv_c_minus,
    }
}

#[test]
fn regular_postselected_values_never_violate() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut max_abs: f64 = 0.0;
    for _ in 0..100_000 {
        let set = realist_set(&mut rng);
        set.validate().unwrap();
        for v in [
            set.exp_b,
            set.exp_c,
            set.corr_bc,
            set.wv_c_plus,
            set.wv_c_minus,
        ] {
            assert!(v.abs() <= 1.0 + 1e-12, "{set:?}");
        }
        let v = b4_postselected_form(&set);
        assert!(v.abs() <= 2.0 + 1e-12, "{set:?} gives {v}");
        max_abs = max_abs.max(v.abs());
    }
    // the bound is reached, not just respected
    assert!(max_abs > 2.0 - 1e-9);
}

#[test]
fn range_clamping_alone_is_not_enough() {
    let set = CorrelatorSet {
        exp_b: 1.0,
        exp_c: 0.0,
        corr_bc: 1.0,
        exp_d: 0.0,
        p_d_plus: 0.5,
        p_d_minus: 0.5,
        wv_c_plus: 1.0,
        wv_c_minus: -1.0,
    };
    set.validate().unwrap();
    assert_eq!(b4_postselected_form(&set), 3.0);
}

#[test]
fn bruteforce_matches_closed_form_bounds() {
    let start = std::time::Instant::now();
    for n in 3..=16 {
        assert_eq!(
            macrorealist_bounds_bruteforce(n).unwrap(),
            bn_bounds(n).unwrap(),
            "n = {n}"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn tsirelson_ceiling_on_grid() {
    let n = 101;
    let mut max_abs: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let f = |x: usize| x as f64 * PI / (n - 1) as f64;
                max_abs = max_abs.max(b4_unconditioned(f(i), f(j), f(k)).abs());
            }
        }
    }
    assert!(max_abs <= 2.0 * 2f64.sqrt() + 1e-9);
    assert!(max_abs > 2.8);
}

#[test]
fn violation_requires_irregular_postselected_values() {
    let n = 51;
    let mut violations = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let f = |x: usize| x as f64 * PI / (n - 1) as f64;
                let (a, g, d) = (f(i), f(j), f(k));
                let verdict = Classification::of(b4_closed_form(a, g, d), -2.0, 2.0);
                if !verdict.is_violation() {
                    continue;
                }
                violations += 1;
                let branches = postselected_branches(a, g, d);
                assert!(
                    branches.iter().flatten().any(|b| !b.is_macrorealist()),
                    "violation at ({a}, {g}, {d}) with regular branches {branches:?}"
                );
            }
        }
    }
    assert!(violations > 1000);
}

#[test]
fn ic_anomaly_alone_does_not_flag_every_violation() {
    // post-selecting in the I_C eigenbasis pins both I_C weak values to ±1
    let (a, g, d) = (0.08 * PI, 0.04 * PI, 0.0);
    let set = correlators_b4(a, g, d).unwrap();
    assert!((set.wv_c_plus - 1.0).abs() < 1e-12);
    assert!((set.wv_c_minus + 1.0).abs() < 1e-12);
    assert_eq!(
        b4_value(&set).classification,
        Classification::PositiveViolation
    );
    let branches = postselected_branches(a, g, d);
    assert!(branches.iter().flatten().any(|b| !b.in_range()));
}

#[test]
fn bn_decomposition_agrees_for_four_measurements() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let z = observable_from_angle(0.0);
    let mut n = 0;
    while n < 500 {
        let (a, g, d) = (
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        );
        let Ok(set) = correlators_b4(a, g, d) else {
            continue;
        };
        let chain = CorrelatorChain::from_polarization_angles(&[a, g, 0.0, d]).unwrap();
        let psi = state_from_angle(a);
        let b = observable_from_angle(g);
        let terms = |post| -> Vec<f64> {
            vec![
                weak_value(&b, &psi, &post).unwrap().re,
                sequential_weak_value(&z, &b, &psi, &post).unwrap().re,
                weak_value(&z, &psi, &post).unwrap().re,
            ]
        };
        let plus = terms(state_from_angle(d));
        let minus = terms(lgweak_core::QubitState::orthogonal_to_angle(d));
        let v = bn_postselected_decomposition(&chain, set.p_d_plus, &plus, &minus).unwrap();
        assert!((v - bn_value(&chain).unwrap().value).abs() < 1e-10);
        assert!((v - b4_value(&set).value).abs() < 1e-10);
        n += 1;
    }
}

#[test]
fn bn_quantum_chains_respect_upper_bound_at_few_measurements() {
    // sanity: deterministic classical chains sit inside the bounds
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 3..12 {
        let (lo, hi) = bn_bounds(n).unwrap();
        for _ in 0..200 {
            let spins: Vec<f64> = std::iter::once(1.0)
                .chain((1..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }))
                .collect();
            let nearest = spins.windows(2).map(|w| w[0] * w[1]).collect();
            let chain = CorrelatorChain::new(nearest, spins[0] * spins[n - 1]).unwrap();
            let v = bn_value(&chain).unwrap().value;
            assert!(v >= lo && v <= hi);
        }
    }
}
