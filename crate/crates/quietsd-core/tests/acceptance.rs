//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quietsd_core::analysis::{
    default_sweep_tone, error_sweep, tornado_sweep, CellClass, MapFamily, SweepOptions,
    SweepQuantizer,
};
use quietsd_core::dynamics::{
    apply_m, apply_t, detect_period, in_region_r, in_trapping_set, lyapunov, trapping_half,
    PlanePoint, SHalf,
};
use quietsd_core::fir::{frequency_response_error, quantize_coefficients, CoefficientSet};
use quietsd_core::fit_order_slope;
use quietsd_core::schemes::{run, verify_difference_relation, SchemeConfig, SchemeState, Variant};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn in_window(x: f64, lo: f64, hi: f64) -> bool {
    lo <= x && x <= hi
}

#[test]
fn acceptance_01_reconstruction_order_of_accuracy() {
    let tone = default_sweep_tone();
    let lambdas = [32.0, 64.0, 128.0, 256.0];
    let opts = SweepOptions::default();

    let first = error_sweep(
        &tone,
        &SweepQuantizer::Scheme(SchemeConfig::new(1, Variant::Standard, 1.0, 0.0).unwrap()),
        &lambdas,
        &opts,
    )
    .unwrap();
    let second = error_sweep(
        &tone,
        &SweepQuantizer::Scheme(SchemeConfig::new(2, Variant::Standard, 2.0, 0.0).unwrap()),
        &lambdas,
        &opts,
    )
    .unwrap();
    let quiet = error_sweep(
        &tone,
        &SweepQuantizer::Scheme(
            SchemeConfig::with_rho_from_lambda(2, Variant::Quiet, 2.0).unwrap(),
        ),
        &lambdas,
        &opts,
    )
    .unwrap();

    let first_ok = in_window(first.fitted_slope, -1.3, -0.7);
    let second_ok = in_window(second.fitted_slope, -2.3, -1.7);
    let quiet_ok = in_window(quiet.fitted_slope, -2.3, -1.7);
    let verdict = if first_ok && second_ok && quiet_ok {
        "PASS"
    } else {
        "FAIL"
    };
    let summary = format!(
        "acceptance 1 (order of accuracy): {verdict} \
         first-order slope {:.3} in [-1.3,-0.7]: {first_ok}; \
         second-order slope {:.3} in [-2.3,-1.7]: {second_ok}; \
         quiet rho=1-1/lambda slope {:.3} in [-2.3,-1.7]: {quiet_ok}",
        first.fitted_slope, second.fitted_slope, quiet.fitted_slope
    );
    println!("{summary}");
    assert!(first_ok && second_ok && quiet_ok, "{summary}");
}

#[test]
fn acceptance_02_first_order_state_bound() {
    let mut rng = rng(101);
    let mut checked = 0usize;
    for _ in 0..10 {
        let samples: Vec<f64> = (0..10_000).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let v0: f64 = rng.gen_range(-1.5..=1.5);
        let rho: f64 = rng.gen_range(0.0..1.0);
        for cfg in [
            SchemeConfig::new(1, Variant::Standard, 1.0, 0.0).unwrap(),
            SchemeConfig::new(1, Variant::Leaky, 1.0, rho).unwrap(),
        ] {
            let trace = run(&samples, &cfg, SchemeState::new(0.0, v0)).unwrap();
            for &v in &trace.v {
                assert!(
                    v.abs() <= 1.5,
                    "acceptance 2 (first-order bound): FAIL |v| = {} > 1.5",
                    v.abs()
                );
                checked += 1;
            }
        }
    }
    println!("acceptance 2 (first-order bound): PASS ({checked} states, all |v| <= 1.5 exactly)");
}

#[test]
fn acceptance_03_quiet_scheme_silences_and_standard_idles() {
    let start = SchemeState::new(0.5, 0.3);
    let zero = vec![0.0; 100_000];

    let quiet_cfg = SchemeConfig::new(2, Variant::Quiet, 2.0, 0.99).unwrap();
    let quiet = run(&zero, &quiet_cfg, start).unwrap();
    let below = (0..quiet.len()).find(|&i| quiet.u[i].abs().max(quiet.v[i].abs()) < 1e-9);
    let below = below.expect("acceptance 3: FAIL quiet state never fell below 1e-9");
    let silent_after = quiet.q[below..].iter().all(|&q| q == 0);
    assert!(
        silent_after,
        "acceptance 3 (quietness): FAIL output not identically zero after step {below}"
    );

    let standard_cfg = SchemeConfig::new(2, Variant::Standard, 2.0, 0.0).unwrap();
    let standard = run(&vec![0.0; 20_000], &standard_cfg, start).unwrap();
    let period = detect_period(&standard.q, 100, 1_000, 10_000);
    match period {
        Some((p, true)) => println!(
            "acceptance 3 (quietness): PASS quiet state < 1e-9 at step {below} with silent output; \
             standard scheme idles with period {p}"
        ),
        other => panic!("acceptance 3 (quietness): FAIL standard scheme period = {other:?}"),
    }
}

#[test]
fn acceptance_04_uniform_damping_period_two_witness() {
    // Uniformly damped recursion at the onset of zero input from the state
    // (1/(1+rho), 0); its orbit falls into the two-cycle instead of dying.
    let rho = 0.99f64;
    let cfg = SchemeConfig::new(2, Variant::Leaky, 2.0, rho).unwrap();
    let start = SchemeState::new(1.0 / (1.0 + rho), 0.0);
    let trace = run(&vec![0.0; 1_000_000], &cfg, start).unwrap();

    let converged = (0..trace.len()).any(|i| trace.u[i].abs().max(trace.v[i].abs()) < 1e-9);
    assert!(
        !converged,
        "acceptance 4 (leaky non-quietness): FAIL state converged below 1e-9"
    );
    match detect_period(&trace.q, 100, trace.q.len() - 100_000, 100_000) {
        Some((p, true)) => println!(
            "acceptance 4 (leaky non-quietness): PASS nontrivial period {p}, no convergence in 1e6 steps"
        ),
        other => panic!("acceptance 4 (leaky non-quietness): FAIL period = {other:?}"),
    }
}

#[test]
fn acceptance_05_tornado_grid_contrast() {
    let rhos: Vec<f64> = (0..50)
        .map(|i| 0.96 + (0.999 - 0.96) * i as f64 / 49.0)
        .collect();
    let u0s: Vec<f64> = (0..50).map(|i| -2.0 + 2.0 * i as f64 / 49.0).collect();

    let leaky = tornado_sweep(
        MapFamily::UniformlyDamped,
        2.0,
        &rhos,
        &u0s,
        0.0,
        100_000,
        100_000,
        100,
    )
    .unwrap();
    let asymmetric = tornado_sweep(
        MapFamily::Asymmetric,
        2.0,
        &rhos,
        &u0s,
        0.0,
        100_000,
        100_000,
        100,
    )
    .unwrap();

    let leaky_periodic = leaky.count(|c| matches!(c, CellClass::Periodic(_)));
    let asym_periodic = asymmetric.count(|c| matches!(c, CellClass::Periodic(_)));
    assert!(
        leaky_periodic >= 1,
        "acceptance 5 (tornado contrast): FAIL uniformly damped sweep found no periodic cell"
    );
    assert_eq!(
        asym_periodic, 0,
        "acceptance 5 (tornado contrast): FAIL asymmetric sweep found periodic cells"
    );
    println!(
        "acceptance 5 (tornado contrast): PASS uniformly damped periodic cells = {leaky_periodic}/2500, asymmetric = 0/2500"
    );
}

#[test]
fn acceptance_06_trapping_set_invariance_and_sign_structure() {
    let mut rng = rng(streams::INVARIANCE);

    // membership is preserved by one application of the damped map
    for _ in 0..10_000 {
        let gamma: f64 = rng.gen_range(1.0..=10.0);
        let rho: f64 = rng.gen_range(0.0..1.0);
        let x = sample_trapping_set(&mut rng, gamma);
        let (next, _) = apply_m(x, gamma, rho);
        assert!(
            in_trapping_set(next, gamma),
            "acceptance 6: FAIL invariance at gamma={gamma}, rho={rho}"
        );
    }

    // sign structure along orbits that stay inside
    for _ in 0..1000 {
        let gamma: f64 = rng.gen_range(1.0..=10.0);
        let rho: f64 = rng.gen_range(0.0..1.0);
        let mut x = sample_trapping_set(&mut rng, gamma);
        let mut last_nonzero: Option<i8> = None;
        for _ in 0..1000 {
            let half =
                trapping_half(x, gamma).expect("acceptance 6: FAIL orbit left the trapping set");
            let (next, q) = apply_m(x, gamma, rho);
            let next_half =
                trapping_half(next, gamma).expect("acceptance 6: FAIL image left the trapping set");
            let crossing_down = half == SHalf::Plus && next_half == SHalf::Minus;
            let crossing_up = half == SHalf::Minus && next_half == SHalf::Plus;
            assert_eq!(
                q == 1,
                crossing_down,
                "acceptance 6: FAIL q=1 must mark exactly the downward crossings"
            );
            assert_eq!(
                q == -1,
                crossing_up,
                "acceptance 6: FAIL q=-1 must mark exactly the upward crossings"
            );
            if q != 0 {
                if let Some(prev) = last_nonzero {
                    assert_eq!(
                        i32::from(prev) * i32::from(q),
                        -1,
                        "acceptance 6: FAIL consecutive nonzero outputs must alternate"
                    );
                }
                last_nonzero = Some(q);
            }
            x = next;
        }
    }
    println!(
        "acceptance 6 (trapping set): PASS 10^4 invariance samples and 10^3 orbits of 10^3 steps"
    );
}

#[test]
fn acceptance_07_lyapunov_decrease_outside_r_and_r_in_s() {
    let mut rng = rng(streams::LYAPUNOV);
    let gammas = [1.0, 2.0, 5.0];

    let mut outside = 0usize;
    while outside < 100_000 {
        let gamma = gammas[rng.gen_range(0..3)];
        let x = PlanePoint::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        if in_region_r(x, gamma) {
            continue;
        }
        outside += 1;
        let (next, _) = apply_t(x, gamma);
        let delta = lyapunov(next) - lyapunov(x);
        assert!(
            delta <= 1e-12,
            "acceptance 7: FAIL Lyapunov increased by {delta} outside R (gamma={gamma})"
        );
    }

    let mut inside = 0usize;
    while inside < 100_000 {
        let gamma = gammas[rng.gen_range(0..3)];
        // bounding box of both halves of R
        let x = PlanePoint::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-3.0..=3.0));
        if !in_region_r(x, gamma) {
            continue;
        }
        inside += 1;
        assert!(
            in_trapping_set(x, gamma),
            "acceptance 7: FAIL R point ({}, {}) outside S (gamma={gamma})",
            x.u,
            x.v
        );
    }
    println!(
        "acceptance 7 (Lyapunov): PASS 10^5 non-increase samples outside R and R subset of S on 10^5 samples"
    );
}

#[test]
fn acceptance_08_global_attractivity() {
    let mut rng = rng(streams::ATTRACTIVITY);
    let mut worst = 0usize;
    for _ in 0..1000 {
        let gamma: f64 = rng.gen_range(1.0..=10.0);
        let rho: f64 = rng.gen_range(0.5..=0.999);
        let mut x = PlanePoint::new(rng.gen_range(-50.0..=50.0), rng.gen_range(-50.0..=50.0));
        let cap = (200.0 / (1.0 - rho)).ceil() as usize + 10_000;
        let mut steps = 0usize;
        while x.norm_inf() >= 1e-6 && steps < cap {
            x = apply_m(x, gamma, rho).0;
            steps += 1;
        }
        assert!(
            x.norm_inf() < 1e-6,
            "acceptance 8 (attractivity): FAIL orbit not below 1e-6 within {cap} steps (gamma={gamma}, rho={rho})"
        );
        worst = worst.max(steps);
    }
    println!("acceptance 8 (attractivity): PASS 10^3 orbits, worst case {worst} steps");
}

#[test]
fn acceptance_09_difference_relation_residuals() {
    let mut rng = rng(streams::RELATION);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let samples: Vec<f64> = (0..1000).map(|_| rng.gen_range(-0.8..=0.8)).collect();
        let rho: f64 = rng.gen_range(0.5..0.999);
        for cfg in [
            SchemeConfig::new(1, Variant::Standard, 1.0, 0.0).unwrap(),
            SchemeConfig::new(1, Variant::Leaky, 1.0, rho).unwrap(),
            SchemeConfig::new(2, Variant::Standard, 2.0, 0.0).unwrap(),
            SchemeConfig::new(2, Variant::Leaky, 2.0, rho).unwrap(),
            SchemeConfig::new(2, Variant::Quiet, 2.0, rho).unwrap(),
        ] {
            let trace = run(&samples, &cfg, SchemeState::default()).unwrap();
            let residual = verify_difference_relation(&trace, cfg.order()).unwrap();
            assert!(
                residual <= 1e-10,
                "acceptance 9 (difference relation): FAIL residual {residual} for order {} {}",
                cfg.order(),
                cfg.variant()
            );
            worst = worst.max(residual);
        }
    }
    println!(
        "acceptance 9 (difference relation): PASS 100 runs x 5 configs, worst residual {worst:.3e}"
    );
}

#[test]
fn acceptance_10_fir_noise_shaping() {
    // 64-tap windowed-sinc low pass, cutoff 0.2 cycles/sample
    let cutoff = 0.2f64;
    let coeffs: Vec<f64> = (0..64)
        .map(|i| {
            let x = i as f64 - 31.5;
            let sinc = if x == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * std::f64::consts::PI * cutoff * x).sin() / (std::f64::consts::PI * x)
            };
            let w = 0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / 63.0).cos();
            sinc * w
        })
        .collect();
    let set = CoefficientSet::with_alpha(coeffs, 0.8).unwrap();
    let cfg = SchemeConfig::new(2, Variant::Quiet, 2.0, 0.999).unwrap();

    let out = quantize_coefficients(&set, &cfg, 1e-9, 200_000)
        .expect("acceptance 10 (fir shaping): FAIL quantization did not terminate");
    let rerun = quantize_coefficients(&set, &cfg, 1e-9, 200_000).unwrap();
    assert_eq!(
        out, rerun,
        "acceptance 10 (fir shaping): FAIL rerun differs"
    );

    let grid: Vec<f64> = (0..192)
        .map(|i| {
            let t = i as f64 / 191.0;
            0.005 * (0.05f64 / 0.005).powf(t)
        })
        .collect();
    let band = frequency_response_error(&set, &out, &grid).unwrap();
    let (slope, _) = fit_order_slope(&band).unwrap();
    let probes = frequency_response_error(&set, &out, &[1e-3, 1e-2]).unwrap();
    let mono_ok = probes[0].1 < probes[1].1;
    let slope_ok = slope >= 1.7;

    let verdict = if slope_ok && mono_ok { "PASS" } else { "FAIL" };
    let summary = format!(
        "acceptance 10 (fir shaping): {verdict} finite output of {} symbols (tail {}); \
         shaping slope {slope:.3} >= 1.7: {slope_ok}; e(1e-3) = {:.3e} < e(1e-2) = {:.3e}: {mono_ok}",
        out.q.len(),
        out.tail_length,
        probes[0].1,
        probes[1].1
    );
    println!("{summary}");
    assert!(slope_ok && mono_ok, "{summary}");
}

/// Uniform point of the trapping set for the given gamma.
fn sample_trapping_set(rng: &mut ChaCha8Rng, gamma: f64) -> PlanePoint {
    if rng.gen_bool(0.5) {
        let u = rng.gen_range(0.0..1.0);
        let w = rng.gen_range(-0.5..=(0.5 + gamma));
        PlanePoint::new(u, w - gamma * u)
    } else {
        let u = rng.gen_range(-1.0..0.0);
        let w = rng.gen_range(-(0.5 + gamma)..=0.5);
        PlanePoint::new(u, w - gamma * u)
    }
}

mod streams {
    pub const INVARIANCE: u64 = 0x5eed_0006;
    pub const LYAPUNOV: u64 = 0x5eed_0007;
    pub const ATTRACTIVITY: u64 = 0x5eed_0008;
    pub const RELATION: u64 = 0x5eed_0009;
}
