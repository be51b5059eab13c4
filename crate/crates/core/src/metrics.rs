//! Wave/particle/entanglement metrics for conditional and reduced states.
//!
//! Each quantity is available through two independent routes: the *evolved*
//! route reads it off the states produced by the [`crate::model`] pipeline,
//! the *closed-form* route evaluates the analytic expressions in the
//! apparatus parameters. The two must agree; reports carry the raw identity
//! residuals so the caller decides the tolerance.

use num_complex::Complex64;

use crate::linalg::{prod_spectrum_sqrt, ComplexMat, ComplexVec};
use crate::model::{detect, evolve, ApparatusConfig, ConditionalState, Detector};
use crate::{Error, Result, STRUCTURAL_TOL};

/// Which computation produced a [`TrialityReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// First-principles state evolution and post-selection.
    Evolved,
    /// Analytic expressions in the apparatus parameters.
    ClosedForm,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Route::Evolved => write!(f, "evolved"),
            Route::ClosedForm => write!(f, "closed-form"),
        }
    }
}

/// The four metrics of one conditional state, with identity residuals.
///
/// `residual_triality` is `P² + V² + C² − 1`; `residual_duality_purity` is
/// `P² + V² − (2·purity − 1)`; `residual_distinguishability` compares the
/// branch-probability form of `D²` against `P² + C²`.
#[derive(Debug, Clone, Copy)]
pub struct TrialityReport {
    pub p: f64,
    pub v: f64,
    pub c: f64,
    pub d: f64,
    pub purity: f64,
    pub residual_triality: f64,
    pub residual_duality_purity: f64,
    pub residual_distinguishability: f64,
    pub route: Route,
}

impl TrialityReport {
    fn build(
        p: f64,
        v: f64,
        c: f64,
        purity: f64,
        branch_product: f64,
        q_abs: f64,
        route: Route,
    ) -> Result<Self> {
        let d = distinguishability(p, c)?;
        Ok(Self {
            p,
            v,
            c,
            d,
            purity,
            residual_triality: p * p + v * v + c * c - 1.0,
            residual_duality_purity: p * p + v * v - (2.0 * purity - 1.0),
            residual_distinguishability: (1.0 - 4.0 * branch_product * q_abs * q_abs)
                - (p * p + c * c),
            route,
        })
    }

    /// Largest difference in (P, V, C, D) against another report.
    pub fn max_discrepancy(&self, other: &TrialityReport) -> f64 {
        [
            (self.p - other.p).abs(),
            (self.v - other.v).abs(),
            (self.c - other.c).abs(),
            (self.d - other.d).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn check_path_qubit(rho: &ComplexMat) -> Result<()> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::Dimension(
            "path state must be a 2×2 density matrix".into(),
        ));
    }
    rho.check_density(STRUCTURAL_TOL)
}

/// Which-path predictability `|ρ₀₀ − ρ₁₁|` of a path qubit.
pub fn predictability(rho_gamma: &ComplexMat) -> Result<f64> {
    check_path_qubit(rho_gamma)?;
    Ok((rho_gamma.get(0, 0).re - rho_gamma.get(1, 1).re).abs())
}

/// Fringe visibility `2|ρ₀₁|` of a path qubit. The operational max/min scan
/// over the fringe profile recovers the same number (see [`crate::screen`]).
pub fn visibility(rho_gamma: &ComplexMat) -> Result<f64> {
    check_path_qubit(rho_gamma)?;
    Ok(2.0 * rho_gamma.get(0, 1).norm())
}

/// Concurrence of a normalized pure two-qubit state `(a, b, c, d)`:
/// `2|ad − bc|`.
pub fn concurrence_pure(psi: &ComplexVec) -> Result<f64> {
    if psi.dim() != 4 {
        return Err(Error::Dimension(
            "pure-state concurrence expects a 2⊗2 vector".into(),
        ));
    }
    psi.check_normalized(STRUCTURAL_TOL)?;
    Ok(2.0 * (psi.amp(0) * psi.amp(3) - psi.amp(1) * psi.amp(2)).norm())
}

/// Spin-flipped matrix `(σy ⊗ σy) ρ* (σy ⊗ σy)`.
pub fn spin_flip(rho: &ComplexMat) -> Result<ComplexMat> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::Dimension(
            "spin flip expects a two-qubit matrix".into(),
        ));
    }
    let sy = ComplexMat::from_rows(&[
        vec![Complex64::ZERO, Complex64::new(0.0, -1.0)],
        vec![Complex64::new(0.0, 1.0), Complex64::ZERO],
    ])?;
    let yy = sy.tensor(&sy);
    yy.mul(&rho.conjugate())?.mul(&yy)
}

/// Wootters concurrence of a two-qubit density matrix:
/// `max{0, λ₀ − λ₁ − λ₂ − λ₃}` over the spin-flip spectrum.
pub fn concurrence_mixed(rho: &ComplexMat) -> Result<f64> {
    let lambdas = prod_spectrum_sqrt(rho, &spin_flip(rho)?)?;
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Distinguishability `√(P² + C²)`.
pub fn distinguishability(p: f64, c: f64) -> Result<f64> {
    let tol = 1e-10;
    if !(-tol..=1.0 + tol).contains(&p) || !(-tol..=1.0 + tol).contains(&c) {
        return Err(Error::Contract(format!("P = {p}, C = {c} outside [0, 1]")));
    }
    let sq = p * p + c * c;
    if sq > 1.0 + tol {
        return Err(Error::Contract(format!("P² + C² = {sq} exceeds 1")));
    }
    Ok(sq.min(1.0).sqrt())
}

/// Squared branch moduli `(x, y)` of the conditional state behind the two
/// recombined ports: `x` multiplies the site-1 component, `y` the site-2
/// component.
fn branch_moduli(cfg: &ApparatusConfig, detector: Detector) -> Option<(f64, f64)> {
    match detector {
        Detector::D1 => Some((
            (cfg.c1 * cfg.r1 * cfg.r3).norm_sqr(),
            (cfg.c2 * cfg.r2 * cfg.t3).norm_sqr(),
        )),
        Detector::D2 => Some((
            (cfg.c1 * cfg.r1 * cfg.t3).norm_sqr(),
            (cfg.c2 * cfg.r2 * cfg.r3).norm_sqr(),
        )),
        Detector::D3 | Detector::D4 => None,
    }
}

/// Click probability of a detector, in closed form.
pub fn click_probability(cfg: &ApparatusConfig, detector: Detector) -> f64 {
    match branch_moduli(cfg, detector) {
        Some((x, y)) => x + y,
        None => match detector {
            Detector::D3 => (cfg.c1 * cfg.t1).norm_sqr(),
            Detector::D4 => (cfg.c2 * cfg.t2).norm_sqr(),
            _ => unreachable!(),
        },
    }
}

/// Analytic triality report for a detector branch.
///
/// For the recombined ports the metrics follow the conditional-state moduli;
/// for the which-path ports the conditional state is a basis ket, so the
/// report is the deterministic `(P, V, C) = (1, 0, 0)`.
pub fn closed_form_triality(cfg: &ApparatusConfig, detector: Detector) -> Result<TrialityReport> {
    cfg.validate()?;
    let q_abs = cfg.q.norm();
    match branch_moduli(cfg, detector) {
        Some((x, y)) => {
            let n2 = x + y;
            if n2 == 0.0 {
                return Err(Error::ZeroProbability(detector));
            }
            let cross = 2.0 * (x * y).sqrt() / n2;
            let p = (x - y).abs() / n2;
            let v = cross * q_abs;
            let c = cross * (1.0 - q_abs * q_abs).max(0.0).sqrt();
            let purity = (x * x + y * y + 2.0 * x * y * q_abs * q_abs) / (n2 * n2);
            TrialityReport::build(p, v, c, purity, x * y / (n2 * n2), q_abs, Route::ClosedForm)
        }
        None => {
            if click_probability(cfg, detector) == 0.0 {
                return Err(Error::ZeroProbability(detector));
            }
            TrialityReport::build(1.0, 0.0, 0.0, 1.0, 0.0, q_abs, Route::ClosedForm)
        }
    }
}

/// Triality report computed by evolving the state and post-selecting.
pub fn evolved_triality(cfg: &ApparatusConfig, detector: Detector) -> Result<TrialityReport> {
    let outcome = detect(&evolve(cfg)?, detector)?;
    if outcome.probability == 0.0 {
        return Err(Error::ZeroProbability(detector));
    }
    let rho = outcome
        .rho_gamma
        .as_ref()
        .expect("probability > 0 implies a path state");
    let p = predictability(rho)?;
    let v = visibility(rho)?;
    let c = match &outcome.conditional_state {
        ConditionalState::GammaPol(psi) => concurrence_pure(psi)?,
        // A bare path ket is a product with the tag: no entanglement.
        ConditionalState::Gamma(_) => 0.0,
        ConditionalState::Undefined => unreachable!("probability > 0"),
    };
    let purity = rho.purity()?;
    let branch_product = rho.get(0, 0).re * rho.get(1, 1).re;
    TrialityReport::build(
        p,
        v,
        c,
        purity,
        branch_product,
        cfg.q.norm(),
        Route::Evolved,
    )
}

/// Both routes plus their largest metric discrepancy.
pub fn triality_pair(
    cfg: &ApparatusConfig,
    detector: Detector,
) -> Result<(TrialityReport, TrialityReport, f64)> {
    let evolved = evolved_triality(cfg, detector)?;
    let closed = closed_form_triality(cfg, detector)?;
    let disc = evolved.max_discrepancy(&closed);
    Ok((evolved, closed, disc))
}
