//! Pipeline entry points shared by the CLI and the Python bindings: single
//! metrics runs, parameter sweeps, screen simulations, and the randomized
//! identity check.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::linalg::ComplexMat;
use crate::metrics::{click_probability, triality_pair, TrialityReport};
use crate::model::{
    detect, detect_all, evolve, unconditioned_rho_gamma, ApparatusConfig, Detector,
};
use crate::scenario::Scenario;
use crate::screen::{estimate_phase_offset, fringe_profile, sample, FringeProfile, SampleSet};
use crate::{Error, Result};

/// Identity residuals in emitted sweep rows must stay below this bound.
pub const SWEEP_EMISSION_TOL: f64 = 1e-10;

/// Both triality routes for one detector branch.
#[derive(Debug, Clone)]
pub struct MetricsRun {
    pub detector: Detector,
    pub probability: f64,
    pub evolved: TrialityReport,
    pub closed_form: TrialityReport,
    pub max_discrepancy: f64,
}

/// Evaluate both routes at the scenario's nominal parameters.
pub fn run_metrics(scenario: &Scenario, detector: Detector) -> Result<MetricsRun> {
    let cfg = scenario.config()?;
    let probability = detect(&evolve(&cfg)?, detector)?.probability;
    let (evolved, closed_form, max_discrepancy) = triality_pair(&cfg, detector)?;
    Ok(MetricsRun {
        detector,
        probability,
        evolved,
        closed_form,
        max_discrepancy,
    })
}

/// One grid point of a parameter sweep. Zero-probability points carry NaN
/// metrics as an explicit sentinel rather than being dropped.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub swept_value: f64,
    pub p: f64,
    pub v: f64,
    pub c: f64,
    pub d: f64,
    pub p_detector: f64,
}

pub const SWEEP_CSV_HEADER: &str = "swept_value,P,V,C,D,p_detector";

/// Inclusive linear grid with `steps` points.
pub fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2, "a sweep grid needs at least 2 points");
    (0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            from * (1.0 - t) + to * t
        })
        .collect()
}

/// Sweep the scenario's parameter over its grid, emitting one row per point.
///
/// Every emitted row is cross-checked: the two routes must agree and the
/// triality and purity identities must hold at [`SWEEP_EMISSION_TOL`].
pub fn run_sweep(scenario: &Scenario, detector: Detector) -> Result<Vec<SweepRow>> {
    let sweep = &scenario.sweep;
    let mut rows = Vec::with_capacity(sweep.steps);
    for value in grid(sweep.from, sweep.to, sweep.steps) {
        let cfg = scenario.config_with(sweep.parameter, value)?;
        let p_detector = click_probability(&cfg, detector);
        if p_detector == 0.0 {
            rows.push(SweepRow {
                swept_value: value,
                p: f64::NAN,
                v: f64::NAN,
                c: f64::NAN,
                d: f64::NAN,
                p_detector: 0.0,
            });
            continue;
        }
        let (evolved, closed, disc) = triality_pair(&cfg, detector)?;
        let worst = disc
            .max(evolved.residual_triality.abs())
            .max(closed.residual_triality.abs())
            .max(evolved.residual_duality_purity.abs())
            .max(closed.residual_duality_purity.abs());
        if worst > SWEEP_EMISSION_TOL {
            return Err(Error::Contract(format!(
                "sweep row at {value} violates the metric identities by {worst:.3e}"
            )));
        }
        rows.push(SweepRow {
            swept_value: value,
            p: evolved.p,
            v: evolved.v,
            c: evolved.c,
            d: evolved.d,
            p_detector,
        });
    }
    Ok(rows)
}

/// CSV rendering with the exact header `swept_value,P,V,C,D,p_detector`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.swept_value, r.p, r.v, r.c, r.d, r.p_detector
        ));
    }
    out
}

/// A screen simulation: analytic profile, Monte Carlo samples, and the
/// 3σ agreement verdict between estimated and analytic visibility.
#[derive(Debug, Clone)]
pub struct ScreenRun {
    /// `None` means the unconditioned ensemble (no detector selected).
    pub detector: Option<Detector>,
    /// Click probability of the selected branch; 1 for unconditioned.
    pub probability: f64,
    pub rho_gamma: ComplexMat,
    pub profile: FringeProfile,
    pub samples: SampleSet,
    pub estimated_offset: f64,
    pub agrees_3sigma: bool,
}

/// Simulate the screen for one detector branch, or for the unconditioned
/// ensemble when `detector` is `None`.
pub fn run_screen(scenario: &Scenario, detector: Option<Detector>) -> Result<ScreenRun> {
    let cfg = scenario.config()?;
    let (rho_gamma, probability) = match detector {
        Some(det) => {
            let outcome = detect(&evolve(&cfg)?, det)?;
            match outcome.rho_gamma {
                Some(rho) => (rho, outcome.probability),
                None => return Err(Error::ZeroProbability(det)),
            }
        }
        None => (unconditioned_rho_gamma(&cfg)?, 1.0),
    };
    let profile = fringe_profile(&rho_gamma)?;
    let samples = sample(
        &profile,
        scenario.screen.samples,
        scenario.screen.seed,
        scenario.screen.bins,
    )?;
    let estimated_offset = estimate_phase_offset(&samples.positions);
    let agrees_3sigma =
        (samples.estimated_v - profile.analytic_v).abs() <= 3.0 * samples.estimated_v_stderr;
    Ok(ScreenRun {
        detector,
        probability,
        rho_gamma,
        profile,
        samples,
        estimated_offset,
        agrees_3sigma,
    })
}

/// Seeded stream of random valid configurations.
pub fn random_configs(seed: u64) -> impl Iterator<Item = ApparatusConfig> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    std::iter::from_fn(move || Some(ApparatusConfig::random(&mut rng)))
}

/// Worst-case identity residuals over a random ensemble of configurations.
///
/// Branches with click probability ≤ `min_probability` are skipped (the
/// conditional state is numerically meaningless there).
#[derive(Debug, Clone, Default)]
pub struct CheckSummary {
    pub configs: usize,
    pub branches: usize,
    pub max_triality_evolved: f64,
    pub max_triality_closed: f64,
    pub max_route_discrepancy: f64,
    pub max_duality_purity: f64,
    pub max_dist_sq: f64,
    pub max_dist_branch: f64,
    pub max_probability_closure: f64,
    pub max_probability_deviation: f64,
    pub max_visibility_excess: f64,
}

impl CheckSummary {
    /// Every identity residual, for comparison against one tolerance.
    pub fn identity_maxima(&self) -> [(&'static str, f64); 8] {
        [
            ("triality (evolved)", self.max_triality_evolved),
            ("triality (closed form)", self.max_triality_closed),
            ("route agreement", self.max_route_discrepancy),
            ("duality-purity", self.max_duality_purity),
            ("distinguishability D²=P²+C²", self.max_dist_sq),
            ("distinguishability branch form", self.max_dist_branch),
            ("probability closure", self.max_probability_closure),
            ("probability closed forms", self.max_probability_deviation),
        ]
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.identity_maxima().iter().all(|(_, v)| *v <= tol) && self.max_visibility_excess <= tol
    }
}

/// Run the full identity suite over `n` random configurations.
pub fn run_check(n: usize, seed: u64, min_probability: f64) -> Result<CheckSummary> {
    let mut summary = CheckSummary::default();
    for cfg in random_configs(seed).take(n) {
        summary.configs += 1;

        let outcomes = detect_all(&evolve(&cfg)?)?;
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        summary.max_probability_closure = summary.max_probability_closure.max((total - 1.0).abs());
        for outcome in &outcomes {
            let dev = (outcome.probability - click_probability(&cfg, outcome.detector)).abs();
            summary.max_probability_deviation = summary.max_probability_deviation.max(dev);
        }

        for det in [Detector::D1, Detector::D2] {
            if click_probability(&cfg, det) <= min_probability {
                continue;
            }
            summary.branches += 1;
            let (evolved, closed, disc) = triality_pair(&cfg, det)?;
            summary.max_route_discrepancy = summary.max_route_discrepancy.max(disc);
            summary.max_triality_evolved = summary
                .max_triality_evolved
                .max(evolved.residual_triality.abs());
            summary.max_triality_closed = summary
                .max_triality_closed
                .max(closed.residual_triality.abs());
            for report in [&evolved, &closed] {
                summary.max_duality_purity = summary
                    .max_duality_purity
                    .max(report.residual_duality_purity.abs());
                summary.max_dist_sq = summary
                    .max_dist_sq
                    .max((report.d * report.d - (report.p * report.p + report.c * report.c)).abs());
                let d18_sq =
                    report.residual_distinguishability + report.p * report.p + report.c * report.c;
                let d18 = d18_sq.max(0.0).sqrt();
                summary.max_dist_branch = summary.max_dist_branch.max((d18 - report.d).abs());
                summary.max_visibility_excess =
                    summary.max_visibility_excess.max(report.v - cfg.q.norm());
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::SweepParameter;

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    }

    #[test]
    fn grid_is_inclusive_and_exact_at_endpoints() {
        let g = grid(0.0, 1.0, 101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!((g[50] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn metrics_run_on_presets() {
        let fig4a = Scenario::preset("fig4a").unwrap();
        let run = run_metrics(&fig4a, Detector::D1).unwrap();
        assert_close(run.probability, 0.5, 1e-12, "p1");
        assert!(run.max_discrepancy <= 1e-10);

        // Mirrors: the D3 branch never clicks.
        assert!(matches!(
            run_metrics(&fig4a, Detector::D3),
            Err(Error::ZeroProbability(Detector::D3))
        ));
    }

    #[test]
    fn sweep_endpoints_fig4a() {
        let rows = run_sweep(&Scenario::preset("fig4a").unwrap(), Detector::D1).unwrap();
        assert_eq!(rows.len(), 101);
        // q = 0 kills the visibility; q = 1 kills the concurrence.
        assert_close(rows[0].swept_value, 0.0, 0.0, "first grid point");
        assert!(rows[0].v.abs() <= 1e-10);
        assert_close(rows[100].swept_value, 1.0, 0.0, "last grid point");
        assert!(rows[100].c.abs() <= 1e-10);
    }

    #[test]
    fn sweep_emits_sentinel_rows_for_dead_branches() {
        // Mirrors everywhere: D3 never clicks across the whole fig4a sweep.
        let rows = run_sweep(&Scenario::preset("fig4a").unwrap(), Detector::D3).unwrap();
        assert_eq!(rows.len(), 101);
        assert!(rows.iter().all(|r| r.p_detector == 0.0 && r.p.is_nan()));
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("swept_value,P,V,C,D,p_detector\n"));
        assert!(csv.lines().nth(1).unwrap().contains("NaN"));
    }

    #[test]
    fn sweep_csv_shape() {
        let mut scenario = Scenario::preset("fig4d").unwrap();
        scenario.sweep.steps = 5;
        let rows = run_sweep(&scenario, Detector::D1).unwrap();
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], SWEEP_CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 6);
    }

    #[test]
    fn screen_run_conventional() {
        let mut scenario = Scenario::preset("fig4a").unwrap();
        // 50:50 recombiner and aligned polarizers: the textbook setting.
        scenario.bs[2].r_sq = 0.5;
        scenario.polarizer.q_abs = 1.0;
        scenario.screen.samples = 20_000;

        let d1 = run_screen(&scenario, Some(Detector::D1)).unwrap();
        assert_close(d1.profile.analytic_v, 1.0, 1e-12, "D1 analytic V");
        assert!(d1.agrees_3sigma);

        let none = run_screen(&scenario, None).unwrap();
        assert_close(none.profile.analytic_v, 0.0, 1e-12, "unconditioned V");
        assert!(none.samples.estimated_v <= 3.0 * none.samples.estimated_v_stderr);

        assert!(d1.profile.to_csv().starts_with("phase,intensity\n"));
        assert!(d1
            .samples
            .histogram_csv()
            .starts_with("bin_center_phase,count,density\n"));
    }

    #[test]
    fn screen_run_which_path_branch_is_flat() {
        // Fully transmitting first splitters: D3 sees every site-1 photon
        // and the screen behind it shows no fringes.
        let mut scenario = Scenario::preset("fig4a").unwrap();
        scenario.bs[0].r_sq = 0.0;
        scenario.bs[1].r_sq = 0.0;
        scenario.screen.samples = 20_000;
        let run = run_screen(&scenario, Some(Detector::D3)).unwrap();
        assert_close(run.probability, 0.5, 1e-12, "p3");
        assert_close(run.profile.analytic_v, 0.0, 1e-12, "flat branch");
        assert!(run.samples.estimated_v <= 3.0 * run.samples.estimated_v_stderr);
    }

    #[test]
    fn check_ensemble_is_tight() {
        let summary = run_check(500, 99, 1e-6).unwrap();
        assert_eq!(summary.configs, 500);
        assert!(summary.branches > 900);
        assert!(summary.passes(1e-10), "{summary:?}");
    }

    #[test]
    fn sweep_value_maps_to_the_right_modulus() {
        let scenario = Scenario::preset("fig4b").unwrap();
        let rows = run_sweep(&scenario, Detector::D1).unwrap();
        // At |c₁| ∈ {0, 1} the source is single-site: full path knowledge.
        assert_close(rows[0].p, 1.0, 1e-10, "P at c1=0");
        assert_close(rows[100].p, 1.0, 1e-10, "P at c1=1");
        let _ = scenario.config_with(SweepParameter::C1Abs, 0.5).unwrap();
    }
}
