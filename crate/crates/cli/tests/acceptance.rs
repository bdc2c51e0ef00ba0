//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use lgweak_cli::{cmd_bounds, cmd_simulate, cmd_sweep, cmd_theory, RunConfig, SweepSpec};
use lgweak_core::inequality::{
    b3_postselected_form, b3_value, b4_postselected_form, b4_value, correlators_b3, correlators_b4,
    CorrelatorSet,
};
use lgweak_core::pointer::{exact_moments, postselected_amplitude, PointerConfig};
use lgweak_core::qubit::{observable_from_angle, state_from_angle, DichotomicObservable};
use lgweak_core::{AnglesPi, Classification};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Row {
    angles: AnglesPi,
    b4: f64,
    /// Classification of (₁⟨I_C⟩, ₋₁⟨I_C⟩) as measured.
    anomalous: (bool, bool),
    region: Classification,
}

fn rows() -> [Row; 4] {
    let row = |alpha, gamma, delta, b4, anomalous, region| Row {
        angles: AnglesPi {
            alpha,
            gamma,
            delta,
        },
        b4,
        anomalous,
        region,
    };
    use Classification::{NegativeViolation as Neg, PositiveViolation as Pos};
    [
        row(0.233, 0.1, 0.867, 2.82, (true, false), Pos),
        row(0.767, 0.4, 0.633, -2.82, (false, true), Neg),
        row(0.833, 0.5, 0.667, -2.50, (false, true), Neg),
        row(0.8, 0.95, 0.15, 2.71, (true, false), Pos),
    ]
}

fn report(results: &mut Vec<bool>, id: usize, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} [{id}] {name}: {detail}");
    results.push(pass);
}

fn table_theory() -> (bool, String) {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for r in rows() {
        let v = cmd_theory(r.angles).unwrap().b4.value;
        worst = worst.max((v - r.b4).abs());
        values.push(format!("{v:.4}"));
    }
    let ms = start.elapsed().as_secs_f64() * 1e3;
    (
        worst <= 0.01,
        format!(
            "B4 = [{}], max |dev| {worst:.4} <= 0.01, {ms:.2} ms",
            values.join(", ")
        ),
    )
}

fn anomalies() -> (bool, String) {
    let mut matched = 0;
    for r in rows() {
        let t = cmd_theory(r.angles).unwrap();
        matched += (t.wv_c_plus.anomalous == r.anomalous.0) as usize;
        matched += (t.wv_c_minus.anomalous == r.anomalous.1) as usize;
    }
    let t = cmd_theory(rows()[0].angles).unwrap();
    let (p, m) = (t.wv_c_plus.value, t.wv_c_minus.value);
    let pair_ok = (p - 2.34).abs() <= 3.0 * 0.04 && (m + 0.34).abs() <= 3.0 * 0.04;
    (
        matched == 8 && pair_ok,
        format!("{matched}/8 classifications match; row 1 pair ({p:.3}, {m:.3}) vs (2.34, -0.34) +- 0.12"),
    )
}

fn sweep_regions() -> (bool, String) {
    let mut labels = Vec::new();
    let mut ok = true;
    for r in rows() {
        let table = cmd_sweep(&SweepSpec::full(r.angles.gamma, 101)).unwrap();
        let cell = table.cell_containing(r.angles.alpha, r.angles.delta);
        ok &= cell.class == r.region;
        labels.push(cell.class.label());
    }
    (
        ok,
        format!(
            "regions ({}) expected (pos, neg, neg, pos)",
            labels.join(", ")
        ),
    )
}

fn decompositions() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst3, mut worst4): (f64, f64) = (0.0, 0.0);
    let (mut n3, mut n4) = (0, 0);
    while n3 < 1000 {
        let (a, g, c) = (
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        );
        let Ok(inp) = correlators_b3(a, g, c) else {
            continue;
        };
        let direct = b3_value(inp.exp_b, inp.exp_c, inp.corr_bc).value;
        worst3 = worst3.max((b3_postselected_form(inp.wv_b_plus, inp.p_c_plus) - direct).abs());
        n3 += 1;
    }
    while n4 < 1000 {
        let (a, g, d) = (
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        );
        let Ok(set) = correlators_b4(a, g, d) else {
            continue;
        };
        worst4 = worst4.max((b4_postselected_form(&set) - b4_value(&set).value).abs());
        n4 += 1;
    }
    (
        worst3 <= 1e-10 && worst4 <= 1e-10,
        format!("max |dev| B3 {worst3:.1e}, B4 {worst4:.1e} over 1000 inputs each (tol 1e-10)"),
    )
}

/// Correlators of a macrorealist model: a random joint distribution over
/// the ±1 values of (I_B, I_C, I_D) with I_A = +1.
fn realist_set(rng: &mut ChaCha8Rng) -> CorrelatorSet {
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
    let (mut pp, mut pm, mut cp, mut cm) = (0.0, 0.0, 0.0, 0.0);
    for (k, wk) in w.iter().enumerate() {
        let p = wk / total;
        let (b, c) = (spin(k, 0), spin(k, 1));
        eb += p * b;
        ec += p * c;
        ebc += p * b * c;
        if spin(k, 2) > 0.0 {
            pp += p;
            cp += p * c;
        } else {
            pm += p;
            cm += p * c;
        }
    }
    CorrelatorSet {
        exp_b: eb,
        exp_c: ec,
        corr_bc: ebc,
        exp_d: pp - pm,
        p_d_plus: pp,
        p_d_minus: pm,
        wv_c_plus: if pp > 0.0 { cp / pp } else { 0.0 },
        wv_c_minus: if pm > 0.0 { cm / pm } else { 0.0 },
    }
}

fn clamped_bound() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut max_abs: f64 = 0.0;
    let mut in_range = true;
    for _ in 0..100_000 {
        let set = realist_set(&mut rng);
        in_range &= set.validate().is_ok()
            && [
                set.exp_b,
                set.exp_c,
                set.corr_bc,
                set.wv_c_plus,
                set.wv_c_minus,
            ]
            .iter()
            .all(|v| v.abs() <= 1.0 + 1e-12);
        max_abs = max_abs.max(b4_postselected_form(&set).abs());
    }
    (
        in_range && max_abs <= 2.0 + 1e-12,
        format!("max |B4| = {max_abs:.12} over 1e5 realist sets (bound 2)"),
    )
}

fn brute_bounds() -> (bool, String) {
    let start = Instant::now();
    let mut ok = true;
    for n in 3..=16 {
        let r = cmd_bounds(n, true).unwrap();
        ok &= r.agreement == Some(true);
    }
    let secs = start.elapsed().as_secs_f64();
    (
        ok && secs < 10.0,
        format!("n = 3..16 all agree: {ok}, {secs:.3} s (< 10 s)"),
    )
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn bias_slopes() -> (bool, String) {
    let ratios = [0.05, 0.1, 0.2];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rows() {
        let (alpha, gamma) = (r.angles.alpha * PI, r.angles.gamma * PI);
        let pre = state_from_angle(alpha);
        let b = observable_from_angle(gamma);
        let c = DichotomicObservable::z();
        let truth = [
            (2.0 * (alpha - gamma)).cos(),
            (2.0 * alpha).cos(),
            (2.0 * gamma).cos(),
        ];
        let mut bias = [Vec::new(), Vec::new(), Vec::new()];
        for &ratio in &ratios {
            let cfg = PointerConfig::with_ratio(ratio).unwrap();
            let m = exact_moments(&postselected_amplitude(&pre, &b, &c, &pre, &cfg).unwrap());
            let ib = m.mean_x / cfg.g_x;
            let ic = m.mean_y / cfg.g_y;
            let ibc = 2.0 * m.mean_xy / (cfg.g_x * cfg.g_y) - ib * ic;
            for (k, est) in [ib, ic, ibc].into_iter().enumerate() {
                bias[k].push((est - truth[k]).abs());
            }
        }
        for series in &bias {
            let s = slope(&ratios, series);
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    (
        (lo - 2.0).abs() <= 0.3 && (hi - 2.0).abs() <= 0.3,
        format!(
            "log-log slopes in [{lo:.3}, {hi:.3}] for 3 estimators x 4 configurations (2 +- 0.3)"
        ),
    )
}

fn monte_carlo(results: &mut Vec<bool>) {
    let mut all_ok = true;
    let mut details = Vec::new();
    for (k, r) in rows().iter().enumerate() {
        let cfg = RunConfig {
            alpha: r.angles.alpha,
            gamma: r.angles.gamma,
            delta: r.angles.delta,
            photons: 1_000_000,
            g_over_sigma: 0.1,
            seed: 7,
            ..RunConfig::default()
        };
        let start = Instant::now();
        let rep = cmd_simulate(&cfg, None).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let (v, se) = (rep.b4.value, rep.b4.se);
        let dev = (v - rep.theory_b4).abs();
        let agrees = dev <= (3.0 * se).max(0.03);
        let z = rep.violation_sigmas;
        let ok = agrees && z > 3.0 && secs < 60.0;
        all_ok &= ok;
        println!(
            "  row {}: B4 = {v:.4} +- {se:.4} (theory {:.4}, |dev| {dev:.4} <= {:.4}: {agrees}), \
             (|B4| - 2)/se = {z:.2} > 3: {}, {secs:.2} s",
            k + 1,
            rep.theory_b4,
            (3.0 * se).max(0.03),
            z > 3.0
        );
        details.push(format!("{z:.2}"));
    }
    report(
        results,
        8,
        "end-to-end Monte Carlo (N = 1e6, g/sigma = 0.1, seed 7)",
        all_ok,
        format!(
            "violation significance per row [{}] sigma",
            details.join(", ")
        ),
    );
}

type Check = fn() -> (bool, String);

fn main() {
    let mut results = Vec::new();
    let checks: [(&str, Check); 7] = [
        ("theory B4 at the four tested configurations", table_theory),
        ("anomalous weak value classification", anomalies),
        ("sweep regions at the marked configurations", sweep_regions),
        ("post-selected decompositions of B3 and B4", decompositions),
        (
            "clamped post-selected values bound |B4| by 2",
            clamped_bound,
        ),
        ("brute-force macrorealist bounds", brute_bounds),
        ("weak-regime bias scales as (g/sigma)^2", bias_slopes),
    ];
    for (i, (name, check)) in checks.iter().enumerate() {
        let (pass, detail) = check();
        report(&mut results, i + 1, name, pass, detail);
    }
    monte_carlo(&mut results);
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
