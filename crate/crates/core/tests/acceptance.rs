//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the observed worst case.

use std::sync::LazyLock;
use std::time::{Duration, Instant};

use eraser_core::linalg::ComplexVec;
use eraser_core::metrics::{concurrence_mixed, concurrence_pure};
use eraser_core::model::{detect, evolve, ApparatusConfig, Detector};
use eraser_core::run::{run_check, run_screen, run_sweep, CheckSummary};
use eraser_core::scenario::{parse_scenario, serialize_scenario, Scenario};
use eraser_core::{closed_form_triality, evolved_triality};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

const ENSEMBLE_SIZE: usize = 10_000;
const ENSEMBLE_SEED: u64 = 0x5EED_2026;
const MIN_BRANCH_PROBABILITY: f64 = 1e-6;

static ENSEMBLE: LazyLock<(CheckSummary, Duration)> = LazyLock::new(|| {
    let started = Instant::now();
    let summary = run_check(ENSEMBLE_SIZE, ENSEMBLE_SEED, MIN_BRANCH_PROBABILITY)
        .expect("ensemble evaluation must not error");
    (summary, started.elapsed())
});

fn pass(criterion: &str, detail: String) {
    println!("ACCEPTANCE {criterion}: PASS ({detail})");
}

fn assert_le(criterion: &str, what: &str, value: f64, bound: f64) {
    assert!(
        value <= bound,
        "ACCEPTANCE {criterion}: FAIL ({what} = {value:.3e} exceeds {bound:.1e})"
    );
}

#[test]
fn criterion_01_triality_identity() {
    let (summary, elapsed) = &*ENSEMBLE;
    assert!(summary.branches >= ENSEMBLE_SIZE, "too few usable branches");
    let worst = summary
        .max_triality_evolved
        .max(summary.max_triality_closed);
    assert_le("01 triality", "max |P²+V²+C²−1|", worst, 1e-10);
    assert!(
        *elapsed < Duration::from_secs(10),
        "ACCEPTANCE 01 triality: FAIL (ensemble took {elapsed:?}, budget 10 s)"
    );
    pass(
        "01 triality",
        format!(
            "max residual {worst:.3e} over {} branches in {elapsed:?}",
            summary.branches
        ),
    );
}

#[test]
fn criterion_02_route_agreement() {
    let (summary, _) = &*ENSEMBLE;
    assert_le(
        "02 route agreement",
        "max route discrepancy",
        summary.max_route_discrepancy,
        1e-10,
    );
    pass(
        "02 route agreement",
        format!(
            "max |evolved − closed form| {:.3e}",
            summary.max_route_discrepancy
        ),
    );
}

#[test]
fn criterion_03_purity_relation() {
    let (summary, _) = &*ENSEMBLE;
    assert_le(
        "03 purity relation",
        "max |P²+V²−(2Trρ²−1)|",
        summary.max_duality_purity,
        1e-10,
    );
    pass(
        "03 purity relation",
        format!("max residual {:.3e}", summary.max_duality_purity),
    );
}

#[test]
fn criterion_04_concurrence_oracle() {
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let amps: Vec<Complex64> = (0..4)
            .map(|_| {
                Complex64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        let psi = ComplexVec::new(amps).unwrap().normalized().unwrap();
        let projector = psi.projector();

        // Independent oracle: subsystem purity of the reduced state.
        let rho_a = projector.partial_trace(&[2, 2], &[0]).unwrap();
        let oracle = (2.0 * (1.0 - rho_a.purity().unwrap())).max(0.0).sqrt();

        let wootters = concurrence_mixed(&projector).unwrap();
        worst = worst.max((wootters - oracle).abs());
        // The pure-state determinant form must agree as well.
        worst = worst.max((concurrence_pure(&psi).unwrap() - oracle).abs());
    }
    assert_le(
        "04 concurrence oracle",
        "max |C_wootters − C_purity|",
        worst,
        1e-9,
    );
    pass(
        "04 concurrence oracle",
        format!("max deviation {worst:.3e} over 1000 states"),
    );
}

#[test]
fn criterion_05_conventional_eraser() {
    let mut worst = 0.0f64;
    let cfg = ApparatusConfig::conventional_eraser();
    for report in [
        evolved_triality(&cfg, Detector::D1).unwrap(),
        closed_form_triality(&cfg, Detector::D1).unwrap(),
    ] {
        worst = worst
            .max(report.p.abs())
            .max((report.v - 1.0).abs())
            .max(report.c.abs());
    }

    let cfg = ApparatusConfig::fully_transmitting();
    for det in [Detector::D3, Detector::D4] {
        for report in [
            evolved_triality(&cfg, det).unwrap(),
            closed_form_triality(&cfg, det).unwrap(),
        ] {
            worst = worst
                .max((report.p - 1.0).abs())
                .max(report.v.abs())
                .max(report.c.abs());
        }
    }
    assert_le(
        "05 conventional eraser",
        "max deviation from (0,1,0)/(1,0,0)",
        worst,
        1e-12,
    );
    pass(
        "05 conventional eraser",
        format!("max deviation {worst:.3e}"),
    );
}

#[test]
fn criterion_06_spot_values() {
    let cfg = ApparatusConfig::from_squared(0.5, 1.0, 1.0, 0.1, 0.6).unwrap();
    let p1 = detect(&evolve(&cfg).unwrap(), Detector::D1)
        .unwrap()
        .probability;
    let mut worst = (p1 - 0.5).abs();
    for report in [
        evolved_triality(&cfg, Detector::D1).unwrap(),
        closed_form_triality(&cfg, Detector::D1).unwrap(),
    ] {
        worst = worst
            .max((report.p - 0.8).abs())
            .max((report.v - 0.36).abs())
            .max((report.c - 0.48).abs())
            .max((report.d - 0.8704f64.sqrt()).abs());
    }
    assert_le("06 spot values", "max |observed − expected|", worst, 1e-10);
    pass(
        "06 spot values",
        format!("(P,V,C,D,p) = (0.8, 0.36, 0.48, √0.8704, 0.5) within {worst:.3e}"),
    );
}

#[test]
fn criterion_07_probability_closure() {
    let (summary, _) = &*ENSEMBLE;
    assert_le(
        "07 probability closure",
        "max |Σp − 1|",
        summary.max_probability_closure,
        1e-12,
    );
    assert_le(
        "07 probability closure",
        "max |p_evolved − p_closed|",
        summary.max_probability_deviation,
        1e-12,
    );
    pass(
        "07 probability closure",
        format!(
            "closure {:.3e}, per-detector deviation {:.3e}",
            summary.max_probability_closure, summary.max_probability_deviation
        ),
    );
}

#[test]
fn criterion_08_distinguishability() {
    let (summary, _) = &*ENSEMBLE;
    assert_le(
        "08 distinguishability",
        "max |D²−(P²+C²)|",
        summary.max_dist_sq,
        1e-10,
    );
    assert_le(
        "08 distinguishability",
        "max |D − √(1−4p₁p₂|q|²)|",
        summary.max_dist_branch,
        1e-10,
    );
    assert_le(
        "08 distinguishability",
        "max (V − |q|)",
        summary.max_visibility_excess,
        1e-12,
    );
    pass(
        "08 distinguishability",
        format!(
            "identities {:.3e}/{:.3e}, visibility bound excess {:.3e}",
            summary.max_dist_sq, summary.max_dist_branch, summary.max_visibility_excess
        ),
    );
}

#[test]
fn criterion_09_sweep_endpoints() {
    let mut worst = 0.0f64;

    let rows = run_sweep(&Scenario::preset("fig4a").unwrap(), Detector::D1).unwrap();
    worst = worst.max(rows.last().unwrap().c.abs()); // C = 0 at q = 1
    worst = worst.max(rows[0].v.abs()); // V = 0 at q = 0

    let rows = run_sweep(&Scenario::preset("fig4b").unwrap(), Detector::D1).unwrap();
    worst = worst.max((rows[0].p - 1.0).abs());
    worst = worst.max((rows.last().unwrap().p - 1.0).abs());

    let rows = run_sweep(&Scenario::preset("fig4c").unwrap(), Detector::D1).unwrap();
    let v_max = rows.iter().map(|r| r.v).fold(f64::NEG_INFINITY, f64::max);
    let c_max = rows.iter().map(|r| r.c).fold(f64::NEG_INFINITY, f64::max);
    let last = rows.last().unwrap();
    worst = worst.max(v_max - last.v).max(c_max - last.c);

    let rows = run_sweep(&Scenario::preset("fig4d").unwrap(), Detector::D1).unwrap();
    worst = worst.max((rows[0].p - 1.0).abs());
    worst = worst.max((rows.last().unwrap().p - 1.0).abs());

    assert_le("09 sweep endpoints", "max endpoint deviation", worst, 1e-10);
    pass(
        "09 sweep endpoints",
        format!("max deviation {worst:.3e} across fig4a–fig4d"),
    );
}

#[test]
fn criterion_10_monte_carlo_screen() {
    let started = Instant::now();

    // Conventional setting: full-contrast fringes behind D1/D2.
    let conventional = parse_scenario(
        "[source]\nc1_sq = 0.5\n[bs1]\nr_sq = 1\n[bs2]\nr_sq = 1\n[bs3]\nr_sq = 0.5\n[polarizer]\nq_abs = 1\n[screen]\nsamples = 100000\nseed = 1020\nbins = 32\n",
    )
    .unwrap();

    let d1 = run_screen(&conventional, Some(Detector::D1)).unwrap();
    assert!(
        (d1.samples.estimated_v - 1.0).abs() <= 3.0 * d1.samples.estimated_v_stderr,
        "ACCEPTANCE 10 screen: FAIL (V=1 branch: V̂ = {})",
        d1.samples.estimated_v
    );

    // Spot setting: V = 0.36 behind D1.
    let spot = {
        let mut s = Scenario::preset("fig4a").unwrap();
        s.screen.seed = 1030;
        s
    };
    let spot_run = run_screen(&spot, Some(Detector::D1)).unwrap();
    assert!((spot_run.profile.analytic_v - 0.36).abs() < 1e-12);
    assert!(
        (spot_run.samples.estimated_v - 0.36).abs() <= 3.0 * spot_run.samples.estimated_v_stderr,
        "ACCEPTANCE 10 screen: FAIL (V=0.36 branch: V̂ = {})",
        spot_run.samples.estimated_v
    );

    // Unconditioned ensemble: flat.
    let flat = run_screen(&conventional, None).unwrap();
    assert!(flat.profile.analytic_v.abs() < 1e-12);
    assert!(
        flat.samples.estimated_v <= 3.0 * flat.samples.estimated_v_stderr,
        "ACCEPTANCE 10 screen: FAIL (unconditioned: V̂ = {})",
        flat.samples.estimated_v
    );

    // D1 and D2 fringes sit in anti-phase.
    let d2 = run_screen(&conventional, Some(Detector::D2)).unwrap();
    let delta = d1.estimated_offset - d2.estimated_offset;
    let wrapped = delta.sin().atan2(delta.cos());
    let offset_err = (wrapped.abs() - std::f64::consts::PI).abs();
    assert!(
        offset_err <= 0.05,
        "ACCEPTANCE 10 screen: FAIL (D1/D2 offset difference {wrapped}, want π)"
    );

    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "ACCEPTANCE 10 screen: FAIL (took {elapsed:?}, budget 5 s)"
    );
    pass(
        "10 monte carlo screen",
        format!(
            "V̂ ∈ {{{:.4}, {:.4}, {:.4}}}, offset error {offset_err:.3} rad, {elapsed:?}",
            flat.samples.estimated_v, spot_run.samples.estimated_v, d1.samples.estimated_v
        ),
    );
}

#[test]
fn criterion_11_parser_golden_files() {
    let golden_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut cases: Vec<_> = std::fs::read_dir(&golden_dir)
        .expect("golden directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            (path.extension()? == "scenario").then_some(path)
        })
        .collect();
    cases.sort();
    assert!(
        cases.len() >= 10,
        "ACCEPTANCE 11 parser: FAIL (only {} golden scenarios)",
        cases.len()
    );

    for path in &cases {
        let input = std::fs::read_to_string(path).unwrap();
        let expected = std::fs::read_to_string(path.with_extension("expected")).unwrap();
        let actual = match parse_scenario(&input) {
            Ok(scenario) => serialize_scenario(&scenario),
            Err(diags) => eraser_core::scenario::render_diagnostics(&diags),
        };
        assert_eq!(
            actual,
            expected,
            "ACCEPTANCE 11 parser: FAIL (golden mismatch for {})",
            path.display()
        );

        // Round-trip property on every valid golden file.
        if let Ok(scenario) = parse_scenario(&input) {
            let reparsed = parse_scenario(&serialize_scenario(&scenario)).unwrap();
            assert_eq!(
                reparsed,
                scenario,
                "round-trip failed for {}",
                path.display()
            );
        }
    }
    pass(
        "11 parser golden files",
        format!("{} golden cases byte-exact", cases.len()),
    );
}
