//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured values (visible with `--nocapture`). Tolerances are
//! pinned in the assertions.

use std::process::Command;
use std::time::Instant;

use oscimax::kernelcheck::{
    classify_region, ineq_constant_case, kernel_eval, seeded_samples, vdc_decay_fit, IneqMode,
    PhaseFamily, Region, young_hls_check, PSI_SQ_INTEGRAL,
};
use oscimax::point::Point;
use oscimax::propagator::{
    evaluate, evaluate_oracle, phase_bound, random_oracle_request, EvalRequest,
};
use oscimax::scenarios::{
    build_scenario, run_scaling, DirectionMode, ScenarioId, ScenarioParams,
};
use oscimax::Error;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn pass(n: u32, name: &str, detail: String, t0: Instant, budget_s: f64) {
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < budget_s, "criterion {n} exceeded its {budget_s}s budget: {dt:.1}s");
    println!("acceptance {n:02} ({name}): PASS - {detail} [{dt:.1}s]");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oscimax"))
}

#[test]
fn c01_cantor_dimension() {
    let t0 = Instant::now();
    let mut details = Vec::new();
    for (r, expect) in [(1.0 / 3.0, 2f64.ln() / 3f64.ln()), (0.2, 2f64.ln() / 5f64.ln())] {
        let run = Instant::now();
        let out = bin()
            .args(["cantor-dim", "--r", &r.to_string(), "--k-max", "10"])
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        assert!(run.elapsed().as_secs_f64() < 1.0, "cantor-dim run exceeded 1 s");
        let text = String::from_utf8(out.stdout).unwrap();
        let slope: f64 = text
            .lines()
            .nth(1)
            .and_then(|line| line.split(',').nth(3))
            .and_then(|v| v.parse().ok())
            .expect("slope column");
        assert!((slope - expect).abs() <= 0.02, "r={r}: slope {slope} vs {expect}");
        details.push(format!("r={r:.4}: slope={slope:.5} (target {expect:.5})"));
    }
    pass(1, "cantor dimension", details.join("; "), t0, 30.0);
}

#[test]
fn c02_propagator_oracle_equivalence() {
    let t0 = Instant::now();
    let mut rng = oscimax::rng::stream_rng(20_260_811, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (profile, m, x, t) = random_oracle_request(&mut rng);
        let req = EvalRequest::new(&profile, m, Point::D1(x), t);
        let a = evaluate(&req).unwrap();
        let b = evaluate_oracle(&req, 1 << 20).unwrap();
        let rel = (a - b).norm() / a.norm().max(b.norm());
        worst = worst.max(rel);
    }
    assert!(worst <= 1e-6, "worst relative difference {worst:e}");
    pass(2, "propagator oracle equivalence", format!("worst rel diff {worst:.2e} over 100 requests"), t0, 60.0);
}

#[test]
fn c03_small_phase_certificate() {
    let t0 = Instant::now();
    let mut checked = 0usize;
    for r in [0.2, 1.0 / 3.0 - 0.01] {
        for k in 1..=7u32 {
            let params = ScenarioParams { q: 4.0, r, ..Default::default() };
            let instance = build_scenario(ScenarioId::FractalLines1D, &params, k).unwrap();
            let lambda = instance.lambda;
            let floor = (0.5f64).cos() * 0.125 * lambda / TAU;
            let set = oscimax::geometry::cantor_intervals(r, k).unwrap();
            let witness = instance.witness.as_ref().unwrap();
            for (lo, hi) in &set.intervals {
                let x = Point::D1(-0.5 * (lo + hi));
                let w = witness(x);
                let pos = oscimax::geometry::path_point(&instance.path, x, w.t, w.theta).unwrap();
                let req = EvalRequest::new(&instance.profile, instance.m, pos, w.t);
                let bound = phase_bound(&req).unwrap();
                assert!(bound <= 0.5, "phase {bound} at r={r} k={k}");
                let v = evaluate(&req).unwrap().norm();
                assert!(v >= floor, "modulus {v} < floor {floor} at r={r} k={k}");
                checked += 1;
            }
        }
    }
    pass(3, "small-phase certificate", format!("{checked} witness points certified"), t0, 120.0);
}

#[test]
fn c04_fractal_lines_1d_scaling() {
    let t0 = Instant::now();
    let params = ScenarioParams { q: 4.0, r: 0.2, ..Default::default() };
    let report = run_scaling(ScenarioId::FractalLines1D, &params, &[3, 4, 5, 6, 7]).unwrap();
    let beta = 2f64.ln() / 5f64.ln();
    let target = 0.5 - 0.25 + beta / 4.0;
    assert!(
        (report.fitted_slope - target).abs() <= 0.05,
        "fitted {} vs {target}",
        report.fitted_slope
    );

    let degenerate = ScenarioParams { direction: DirectionMode::Origin, ..params };
    let report0 = run_scaling(ScenarioId::FractalLines1D, &degenerate, &[3, 4, 5, 6, 7]).unwrap();
    assert!(
        (report0.fitted_slope - 0.25).abs() <= 0.05,
        "degenerate fitted {} vs 0.25",
        report0.fitted_slope
    );
    pass(
        4,
        "fractal lines d=1 scaling",
        format!(
            "fitted {:.4} (target {target:.4}); degenerate {:.4} (target 0.25)",
            report.fitted_slope, report0.fitted_slope
        ),
        t0,
        600.0,
    );
}

#[test]
fn c05_fractal_lines_2d_scaling() {
    let t0 = Instant::now();
    let params = ScenarioParams { q: 3.0, r: 1.0 / 3.0, ..Default::default() };
    let report = run_scaling(ScenarioId::FractalLines2DLow, &params, &[2, 3, 4, 5]).unwrap();
    let beta = 2f64.ln() / 3f64.ln();
    let target = 1.0 - 2.0 / 3.0 + beta / 3.0;
    assert!(
        (report.fitted_slope - target).abs() <= 0.08,
        "fitted {} vs {target}",
        report.fitted_slope
    );
    pass(
        5,
        "fractal lines d=2 scaling",
        format!("fitted {:.4} (target {target:.4})", report.fitted_slope),
        t0,
        1200.0,
    );
}

#[test]
fn c06_tangential_table_rows() {
    let t0 = Instant::now();
    let row2 = ScenarioParams { q: 2.0, alpha: Some(0.5), ..Default::default() };
    let rep2 = run_scaling(ScenarioId::TangentialRow2, &row2, &[10, 12, 14, 16, 18, 20]).unwrap();
    assert!((rep2.fitted_slope - 0.125).abs() <= 0.03, "row2 fitted {}", rep2.fitted_slope);

    let row3 = ScenarioParams { q: 2.0, kappa: 0.25, alpha: Some(1.0), ..Default::default() };
    let rep3 = run_scaling(ScenarioId::TangentialRow3, &row3, &[12, 14, 16, 18, 20, 22]).unwrap();
    assert!((rep3.fitted_slope - 0.125).abs() <= 0.03, "row3 fitted {}", rep3.fitted_slope);
    pass(
        6,
        "tangential table rows",
        format!("row2 {:.4}, row3 {:.4} (target 0.125)", rep2.fitted_slope, rep3.fitted_slope),
        t0,
        600.0,
    );
}

#[test]
fn c07_exponential_tangential() {
    let t0 = Instant::now();
    let params = ScenarioParams { q: 2.0, alpha: Some(1.0), ..Default::default() };
    let ks: Vec<u32> = (10..=20).collect();
    let report = run_scaling(ScenarioId::ExpTangential, &params, &ks).unwrap();
    // N(lambda) (log lambda)^{alpha/2} should scale like lambda^{1/m}
    let points: Vec<(f64, f64)> = report
        .rows
        .iter()
        .map(|row| (row.lambda.ln(), (row.norm * row.lambda.ln().sqrt()).ln()))
        .collect();
    let (n_slope, _) = oscimax::scenarios::fit_exponent(&points).unwrap();
    assert!((n_slope - 0.5).abs() <= 0.05, "norm slope {n_slope}");
    // ratio slope after the same correction: positive, near 1/4 at s = 0
    assert!(report.fitted_slope > 0.0);
    assert!((report.fitted_slope - 0.25).abs() <= 0.05, "ratio slope {}", report.fitted_slope);
    pass(
        7,
        "exponential tangential",
        format!("norm slope {n_slope:.4} (target 0.5); ratio slope {:.4} (target 0.25)", report.fitted_slope),
        t0,
        300.0,
    );
}

#[test]
fn c08_alpha_measure_remark() {
    let t0 = Instant::now();
    let params = ScenarioParams { q: 2.0, alpha: Some(0.75), r: 0.2, ..Default::default() };
    let report = run_scaling(ScenarioId::AlphaFractalRemark, &params, &[3, 4, 5, 6, 7]).unwrap();
    let beta = 2f64.ln() / 5f64.ln();
    let target = 0.5 + (beta - 1.0) / 2.0;
    assert!(
        (report.fitted_slope - target).abs() <= 0.07,
        "fitted {} vs {target}",
        report.fitted_slope
    );
    pass(
        8,
        "alpha-measure remark",
        format!("fitted {:.4} (target {target:.4})", report.fitted_slope),
        t0,
        600.0,
    );
}

#[test]
fn c09_van_der_corput() {
    let t0 = Instant::now();
    let ladder: Vec<f64> = (7..=16).map(|e| (2f64).powi(e)).collect();
    let quad = vdc_decay_fit(PhaseFamily::Quadratic, 2, &ladder).unwrap();
    assert!((quad.slope + 0.5).abs() <= 0.05, "quadratic slope {}", quad.slope);
    assert!(quad.top_decade_spread <= 1.10, "quadratic constants spread {}", quad.top_decade_spread);
    let mono = vdc_decay_fit(PhaseFamily::MonotoneLinearized, 1, &ladder).unwrap();
    assert!((mono.slope + 1.0).abs() <= 0.05, "monotone slope {}", mono.slope);
    assert!(mono.top_decade_spread <= 1.10, "monotone constants spread {}", mono.top_decade_spread);
    let frac = vdc_decay_fit(PhaseFamily::Fractional(2.0), 2, &ladder).unwrap();
    assert!(frac.sup_constant.is_finite());
    pass(
        9,
        "van der Corput",
        format!(
            "quadratic {:.3} (spread {:.3}), monotone {:.3} (spread {:.3}), fractional sup {:.3}",
            quad.slope, quad.top_decade_spread, mono.slope, mono.top_decade_spread, frac.sup_constant
        ),
        t0,
        60.0,
    );
}

#[test]
fn c10_kernel_suite() {
    let t0 = Instant::now();
    let (q, alpha, m) = (2.0, 0.5, 2.0);
    let exponents: Vec<u32> = (8..=14).collect();
    let per_rung = 1000usize.div_ceil(exponents.len());
    let bound_scale = *PSI_SQ_INTEGRAL;

    let mut total = 0usize;
    let mut per_lambda_c: Vec<f64> = Vec::new();
    for (stream, e) in exponents.iter().enumerate() {
        let lambda = (2f64).powi(*e as i32);
        let mut c_lambda: f64 = 0.0;
        for sample in seeded_samples(lambda, m, q, alpha, per_rung, 7, stream as u64) {
            let v = kernel_eval(&sample).unwrap();
            assert!(
                v.norm() <= lambda * bound_scale + 1e-9,
                "bound violated at lambda={lambda}: {} > {}",
                v.norm(),
                lambda * bound_scale
            );
            if classify_region(&sample, q, alpha) != Region::V1 {
                let stat = v.norm() * (lambda * sample.delta_x().abs()).sqrt() / lambda;
                c_lambda = c_lambda.max(stat);
            }
            total += 1;
        }
        per_lambda_c.push(c_lambda);
    }
    assert!(total >= 1000);
    let c_max = per_lambda_c.iter().cloned().fold(0.0, f64::max);
    let c_min = per_lambda_c.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(c_max <= 10.0, "fitted constant {c_max}");
    assert!((c_max - c_min) / c_max < 0.20, "constant varies {c_min}..{c_max}");

    // Hermitian symmetry relative to the kernel scale
    let mut worst: f64 = 0.0;
    for sample in seeded_samples(1024.0, m, q, alpha, 60, 3, 99) {
        let a = kernel_eval(&sample).unwrap();
        let b = kernel_eval(&sample.swapped()).unwrap();
        worst = worst.max((a - b.conj()).norm() / (1024.0 * bound_scale));
    }
    assert!(worst <= 1e-8, "hermitian defect {worst:e}");
    pass(
        10,
        "kernel suite",
        format!("{total} samples, 0 bound violations; C in [{c_min:.3}, {c_max:.3}]; hermitian {worst:.1e}"),
        t0,
        300.0,
    );
}

#[test]
fn c11_young_hls() {
    let t0 = Instant::now();
    let report =
        young_hls_check(0.5, 2.0, IneqMode::Hls { rho: 0.4 }, 100, 256, 2, 11).unwrap();
    let ratios: Vec<f64> = report.per_resolution.iter().map(|r| r.1).collect();
    assert!(ratios.iter().all(|r| r.is_finite()));
    assert!(ratios[1] <= ratios[0] * 1.05, "{} -> {}", ratios[0], ratios[1]);
    assert!(ratios[2] <= ratios[1] * 1.05, "{} -> {}", ratios[1], ratios[2]);

    let constant =
        ineq_constant_case(1.0, 2.0, &IneqMode::Young { a: -1.0, b: 1.0 }, 256).unwrap();
    assert!((constant - 0.75).abs() <= 1e-6 * 0.75, "constant case {constant}");
    pass(
        11,
        "Young/HLS",
        format!("ratios {:.4} / {:.4} / {:.4}; constant case {constant:.8}", ratios[0], ratios[1], ratios[2]),
        t0,
        300.0,
    );
}

#[test]
fn c12_sufficiency_sandwich() {
    let t0 = Instant::now();
    let params = ScenarioParams {
        q: 4.0,
        alpha: Some(1.0),
        trials: 20,
        seed: 20_260_811,
        ..Default::default()
    };
    let ks: Vec<u32> = (6..=12).collect();
    let report = run_scaling(ScenarioId::SufficiencyProbe, &params, &ks).unwrap();
    assert!(
        report.fitted_slope <= 0.30,
        "ratio growth exponent {} exceeds 0.30",
        report.fitted_slope
    );
    pass(
        12,
        "sufficiency sandwich",
        format!("max-ratio growth exponent {:.4} <= 0.30", report.fitted_slope),
        t0,
        900.0,
    );
}

#[test]
fn c13_reproducibility() {
    let t0 = Instant::now();
    let dir = std::env::temp_dir().join("oscimax-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let out1 = dir.join("rep1.csv");
    let out2 = dir.join("rep2.csv");
    let out3 = dir.join("rep3.csv");
    let base = [
        "scaling", "--scenario", "fractal-lines-1d", "--q", "4", "--r", "0.2", "--s", "0",
        "--m", "2", "--k-min", "3", "--k-max", "5", "--seed", "42",
    ];
    let run = |extra: &[&str], out: &std::path::Path| {
        let status = bin()
            .args(base)
            .args(extra)
            .args(["--out", out.to_str().unwrap()])
            .status()
            .expect("binary runs");
        assert!(status.success());
    };
    run(&["--threads", "1"], &out1);
    run(&["--threads", "4"], &out2);
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "CSV bytes differ across thread counts");

    // round-trip from the manifest
    let manifest = format!("{}.manifest.json", out1.display());
    let status = bin()
        .args(["scaling", "--config", &manifest, "--out", out3.to_str().unwrap()])
        .status()
        .expect("binary runs");
    assert!(status.success());
    let b3 = std::fs::read(&out3).unwrap();
    assert_eq!(b1, b3, "CSV bytes differ after manifest round-trip");
    pass(13, "reproducibility", format!("{} bytes identical across threads and round-trip", b1.len()), t0, 300.0);
}

#[test]
fn usage_errors_exit_two() {
    // missing required flag and bad values must exit 2 with a message
    let out = bin().args(["cantor-dim", "--k-max", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = bin()
        .args(["scaling", "--scenario", "no-such-scenario", "--k-min", "3", "--k-max", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn acceptance_slopes_match_library_reference() {
    // the CLI's fitted slope equals the library's for the same ladder
    let params = ScenarioParams { q: 4.0, r: 0.2, ..Default::default() };
    let report = run_scaling(ScenarioId::FractalLines1D, &params, &[3, 4, 5]).unwrap();
    let dir = std::env::temp_dir().join("oscimax-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("ref.csv");
    let status = bin()
        .args([
            "scaling", "--scenario", "fractal-lines-1d", "--q", "4", "--r", "0.2", "--k-min",
            "3", "--k-max", "5",
        ])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(format!("{}.manifest.json", out.display())).unwrap(),
    )
    .unwrap();
    let cli_slope = manifest["fitted_slope"].as_f64().unwrap();
    assert!((cli_slope - report.fitted_slope).abs() < 1e-12);
}

#[test]
fn numeric_budget_error_exits_three() {
    // every scenario build failure that is a phase-certificate problem is
    // a validation error (2); an exhausted panel budget maps to 3
    let err = Error::ToleranceNotReached { budget: 16 };
    assert_eq!(err.exit_code(), 3);
    let err = Error::PhaseCertificateFailed("x".into());
    assert_eq!(err.exit_code(), 2);
}
