//! Apparatus model: source, polarization tagging, beam splitters, detectors.
//!
//! The full system lives on three registers: a two-dimensional path qubit
//! (which of the two emitter sites produced the photon pair), a
//! four-dimensional one-hot mode register for the partner photon, and a
//! two-dimensional polarization register for the tag carried by that photon.
//!
//! Mode slots, fixed by the optical layout:
//! - slot 0 (`a`): transmitted at the first splitter, ends on detector D3;
//!   doubles as the input slot for the site-1 photon before the splitters.
//! - slot 1 (`b`): reflected at the first splitter toward the recombiner;
//!   after the recombiner this slot is the D2 output port.
//! - slot 2 (`c`): reflected at the second splitter toward the recombiner;
//!   after the recombiner this slot is the D1 output port.
//! - slot 3 (`d`): transmitted at the second splitter, ends on detector D4;
//!   doubles as the input slot for the site-2 photon.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{ComplexMat, ComplexVec};
use crate::{Error, Result, STRUCTURAL_TOL};

/// Register dimensions and index helpers for the 16-dimensional state.
pub mod layout {
    pub const GAMMA_DIM: usize = 2;
    pub const PHI_DIM: usize = 4;
    pub const POL_DIM: usize = 2;
    pub const TOTAL_DIM: usize = GAMMA_DIM * PHI_DIM * POL_DIM;

    pub const MODE_A: usize = 0;
    pub const MODE_B: usize = 1;
    pub const MODE_C: usize = 2;
    pub const MODE_D: usize = 3;
    /// Pre-splitter slot of the photon emitted at site 1.
    pub const UPPER_IN: usize = MODE_A;
    /// Pre-splitter slot of the photon emitted at site 2.
    pub const LOWER_IN: usize = MODE_D;

    /// Flat index of `|gamma⟩ ⊗ |mode⟩ ⊗ |pol⟩`.
    pub fn index(gamma: usize, mode: usize, pol: usize) -> usize {
        debug_assert!(gamma < GAMMA_DIM && mode < PHI_DIM && pol < POL_DIM);
        (gamma * PHI_DIM + mode) * POL_DIM + pol
    }
}

/// One of the four single-photon detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    D1,
    D2,
    D3,
    D4,
}

impl Detector {
    pub const ALL: [Detector; 4] = [Detector::D1, Detector::D2, Detector::D3, Detector::D4];

    /// Mode slot this detector watches after the full evolution.
    pub fn mode(self) -> usize {
        match self {
            Detector::D1 => layout::MODE_C,
            Detector::D2 => layout::MODE_B,
            Detector::D3 => layout::MODE_A,
            Detector::D4 => layout::MODE_D,
        }
    }
}

impl std::fmt::Display for Detector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Detector::D1 => write!(f, "D1"),
            Detector::D2 => write!(f, "D2"),
            Detector::D3 => write!(f, "D3"),
            Detector::D4 => write!(f, "D4"),
        }
    }
}

impl std::str::FromStr for Detector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "D1" => Ok(Detector::D1),
            "D2" => Ok(Detector::D2),
            "D3" => Ok(Detector::D3),
            "D4" => Ok(Detector::D4),
            other => Err(Error::Config(format!(
                "unknown detector {other:?} (expected D1, D2, D3 or D4)"
            ))),
        }
    }
}

/// All free parameters of the apparatus.
///
/// `c1`, `c2` are the source amplitudes for emission at site 1 / site 2;
/// `(r_i, t_i)` the reflection/transmission amplitudes of the three beam
/// splitters; `q` the overlap `⟨S₁|S₂⟩` of the two polarizer states.
#[derive(Debug, Clone, PartialEq)]
pub struct ApparatusConfig {
    pub c1: Complex64,
    pub c2: Complex64,
    pub r1: Complex64,
    pub t1: Complex64,
    pub r2: Complex64,
    pub t2: Complex64,
    pub r3: Complex64,
    pub t3: Complex64,
    pub q: Complex64,
}

/// `√m · e^{iφ}` helper for building amplitudes from squared moduli.
pub fn amp_from_sq(modulus_sq: f64, phase: f64) -> Complex64 {
    Complex64::from_polar(modulus_sq.max(0.0).sqrt(), phase)
}

impl ApparatusConfig {
    #[allow(clippy::too_many_arguments)] // one amplitude per optical element
    pub fn new(
        c1: Complex64,
        c2: Complex64,
        r1: Complex64,
        t1: Complex64,
        r2: Complex64,
        t2: Complex64,
        r3: Complex64,
        t3: Complex64,
        q: Complex64,
    ) -> Result<Self> {
        let cfg = Self {
            c1,
            c2,
            r1,
            t1,
            r2,
            t2,
            r3,
            t3,
            q,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// All-real configuration from squared moduli: `|c₁|²` and the three
    /// `|rᵢ|²`, plus `|q|`. Transmissions are the positive complements.
    pub fn from_squared(
        c1_sq: f64,
        r1_sq: f64,
        r2_sq: f64,
        r3_sq: f64,
        q_abs: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("c1_sq", c1_sq),
            ("r1_sq", r1_sq),
            ("r2_sq", r2_sq),
            ("r3_sq", r3_sq),
            ("q_abs", q_abs),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Self::new(
            amp_from_sq(c1_sq, 0.0),
            amp_from_sq(1.0 - c1_sq, 0.0),
            amp_from_sq(r1_sq, 0.0),
            amp_from_sq(1.0 - r1_sq, 0.0),
            amp_from_sq(r2_sq, 0.0),
            amp_from_sq(1.0 - r2_sq, 0.0),
            amp_from_sq(r3_sq, 0.0),
            amp_from_sq(1.0 - r3_sq, 0.0),
            Complex64::new(q_abs, 0.0),
        )
    }

    /// Symmetric source, mirrors at the first two splitters, 50:50
    /// recombiner, identical polarizers: the textbook erasure setting where
    /// D1/D2 clicks leave full-visibility path states.
    pub fn conventional_eraser() -> Self {
        Self::from_squared(0.5, 1.0, 1.0, 0.5, 1.0).expect("static config is valid")
    }

    /// Fully transmitting first splitters: every partner photon reaches
    /// D3/D4 and carries complete path information.
    pub fn fully_transmitting() -> Self {
        Self::from_squared(0.5, 0.0, 0.0, 0.5, 1.0).expect("static config is valid")
    }

    /// Random valid configuration: uniform squared moduli, uniform phases
    /// on every amplitude and on the polarization overlap.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        use std::f64::consts::TAU;
        fn pair<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64) {
            let m_sq = rng.random::<f64>();
            (
                Complex64::from_polar(m_sq.sqrt(), rng.random::<f64>() * TAU),
                Complex64::from_polar((1.0 - m_sq).sqrt(), rng.random::<f64>() * TAU),
            )
        }
        let (c1, c2) = pair(rng);
        let (r1, t1) = pair(rng);
        let (r2, t2) = pair(rng);
        let (r3, t3) = pair(rng);
        let q = Complex64::from_polar(rng.random::<f64>(), rng.random::<f64>() * TAU);
        Self {
            c1,
            c2,
            r1,
            t1,
            r2,
            t2,
            r3,
            t3,
            q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let source = self.c1.norm_sqr() + self.c2.norm_sqr();
        if (source - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::Config(format!("|c1|² + |c2|² = {source} is not 1")));
        }
        for (i, (r, t)) in [(self.r1, self.t1), (self.r2, self.t2), (self.r3, self.t3)]
            .into_iter()
            .enumerate()
        {
            let closure = r.norm_sqr() + t.norm_sqr();
            if (closure - 1.0).abs() > STRUCTURAL_TOL {
                return Err(Error::Config(format!(
                    "|r{i}|² + |t{i}|² = {closure} is not 1",
                    i = i + 1
                )));
            }
        }
        if self.q.norm() > 1.0 + STRUCTURAL_TOL {
            return Err(Error::Config(format!("|q| = {} exceeds 1", self.q.norm())));
        }
        Ok(())
    }

    /// Orthonormal embedding of the two polarizer states:
    /// `|S₁⟩ = |e₀⟩`, `|S₂⟩ = q|e₀⟩ + √(1−|q|²)|e₁⟩`, so that
    /// `⟨S₁|S₂⟩ = q` exactly.
    pub fn polarization_states(&self) -> (ComplexVec, ComplexVec) {
        let s1 = ComplexVec::basis(layout::POL_DIM, 0).expect("pol dim");
        let ortho = (1.0 - self.q.norm_sqr()).max(0.0).sqrt();
        let s2 = ComplexVec::new(vec![self.q, Complex64::new(ortho, 0.0)]).expect("pol dim");
        (s1, s2)
    }
}

/// Conditional state left behind by a detector click.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionalState {
    /// Path ⊗ polarization state (4-dim), for the recombined ports D1/D2.
    GammaPol(ComplexVec),
    /// Bare path ket (2-dim), for the which-path ports D3/D4.
    Gamma(ComplexVec),
    /// The branch never occurs; no state exists.
    Undefined,
}

/// Click probability and post-click state for one detector.
#[derive(Debug, Clone)]
pub struct DetectionOutcome {
    pub detector: Detector,
    pub probability: f64,
    pub conditional_state: ConditionalState,
    /// Reduced 2×2 path state conditioned on the click; `None` when the
    /// branch has zero probability.
    pub rho_gamma: Option<ComplexMat>,
}

/// Initial state after the source and polarizers:
/// `c₁|site1⟩|upper⟩|S₁⟩ + c₂|site2⟩|lower⟩|S₂⟩`.
pub fn source_state(cfg: &ApparatusConfig) -> Result<ComplexVec> {
    cfg.validate()?;
    let (s1, s2) = cfg.polarization_states();
    let mut psi = ComplexVec::zeros(layout::TOTAL_DIM);
    for pol in 0..layout::POL_DIM {
        psi.set(
            layout::index(0, layout::UPPER_IN, pol),
            cfg.c1 * s1.amp(pol),
        );
        psi.set(
            layout::index(1, layout::LOWER_IN, pol),
            cfg.c2 * s2.amp(pol),
        );
    }
    Ok(psi)
}

/// Mode-register action of the first two beam splitters.
///
/// Site-1 input (slot 0) → `t₁|a⟩ + r₁|b⟩`; site-2 input (slot 3) →
/// `t₂|d⟩ + r₂|c⟩`. The second columns complete each 2×2 block to a unitary;
/// they act on ports that never carry amplitude in this apparatus.
pub fn b1_b2_matrix(cfg: &ApparatusConfig) -> ComplexMat {
    let mut u = ComplexMat::zeros(layout::PHI_DIM, layout::PHI_DIM);
    u.set(layout::MODE_A, layout::MODE_A, cfg.t1);
    u.set(layout::MODE_B, layout::MODE_A, cfg.r1);
    u.set(layout::MODE_A, layout::MODE_B, cfg.r1.conj());
    u.set(layout::MODE_B, layout::MODE_B, -cfg.t1.conj());
    u.set(layout::MODE_D, layout::MODE_D, cfg.t2);
    u.set(layout::MODE_C, layout::MODE_D, cfg.r2);
    u.set(layout::MODE_D, layout::MODE_C, cfg.r2.conj());
    u.set(layout::MODE_C, layout::MODE_C, -cfg.t2.conj());
    u
}

/// Mode-register action of the recombining splitter:
/// `b → r₃|D1 port⟩ + t₃|D2 port⟩`, `c → t₃|D1 port⟩ − r₃|D2 port⟩`;
/// slots `a` and `d` pass through untouched.
pub fn b3_matrix(cfg: &ApparatusConfig) -> ComplexMat {
    let mut u = ComplexMat::identity(layout::PHI_DIM);
    u.set(layout::MODE_B, layout::MODE_B, cfg.t3);
    u.set(layout::MODE_C, layout::MODE_B, cfg.r3);
    u.set(layout::MODE_B, layout::MODE_C, -cfg.r3);
    u.set(layout::MODE_C, layout::MODE_C, cfg.t3);
    u
}

fn apply_mode_operator(state: &ComplexVec, op: &ComplexMat) -> Result<ComplexVec> {
    if state.dim() != layout::TOTAL_DIM {
        return Err(Error::Dimension(format!(
            "apparatus state must have dimension {}, got {}",
            layout::TOTAL_DIM,
            state.dim()
        )));
    }
    let mut out = ComplexVec::zeros(layout::TOTAL_DIM);
    for gamma in 0..layout::GAMMA_DIM {
        for pol in 0..layout::POL_DIM {
            for mode_out in 0..layout::PHI_DIM {
                let mut acc = Complex64::ZERO;
                for mode_in in 0..layout::PHI_DIM {
                    acc +=
                        op.get(mode_out, mode_in) * state.amp(layout::index(gamma, mode_in, pol));
                }
                out.set(layout::index(gamma, mode_out, pol), acc);
            }
        }
    }
    Ok(out)
}

/// Pass the partner photon through the first two beam splitters.
pub fn apply_b1_b2(state: &ComplexVec, cfg: &ApparatusConfig) -> Result<ComplexVec> {
    apply_mode_operator(state, &b1_b2_matrix(cfg))
}

/// Pass the recombiner-bound slots through the third beam splitter.
pub fn apply_b3(state: &ComplexVec, cfg: &ApparatusConfig) -> Result<ComplexVec> {
    apply_mode_operator(state, &b3_matrix(cfg))
}

/// Full pipeline: source → B₁/B₂ → B₃.
pub fn evolve(cfg: &ApparatusConfig) -> Result<ComplexVec> {
    apply_b3(&apply_b1_b2(&source_state(cfg)?, cfg)?, cfg)
}

/// Project the fully evolved state onto one detector's mode slot.
pub fn detect(state: &ComplexVec, detector: Detector) -> Result<DetectionOutcome> {
    if state.dim() != layout::TOTAL_DIM {
        return Err(Error::Dimension(format!(
            "detection expects the full {}-dimensional state",
            layout::TOTAL_DIM
        )));
    }
    let mode = detector.mode();
    let mut slice = ComplexVec::zeros(layout::GAMMA_DIM * layout::POL_DIM);
    for gamma in 0..layout::GAMMA_DIM {
        for pol in 0..layout::POL_DIM {
            slice.set(
                gamma * layout::POL_DIM + pol,
                state.amp(layout::index(gamma, mode, pol)),
            );
        }
    }
    let probability = slice.norm_sq();
    if probability == 0.0 {
        return Ok(DetectionOutcome {
            detector,
            probability: 0.0,
            conditional_state: ConditionalState::Undefined,
            rho_gamma: None,
        });
    }

    let conditional = slice.scale(Complex64::new(1.0 / probability.sqrt(), 0.0));
    let rho_gamma = conditional
        .projector()
        .partial_trace(&[layout::GAMMA_DIM, layout::POL_DIM], &[0])?;

    let conditional_state = match detector {
        Detector::D1 | Detector::D2 => ConditionalState::GammaPol(conditional),
        Detector::D3 | Detector::D4 => {
            // The which-path ports carry a single site's amplitude, so the
            // path factor is a basis ket.
            let site = if detector == Detector::D3 { 0 } else { 1 };
            let leak: f64 = (0..layout::POL_DIM)
                .map(|pol| {
                    conditional
                        .amp((1 - site) * layout::POL_DIM + pol)
                        .norm_sqr()
                })
                .sum();
            debug_assert!(leak < 1e-24, "cross-site leakage on a which-path port");
            ConditionalState::Gamma(ComplexVec::basis(layout::GAMMA_DIM, site)?)
        }
    };

    Ok(DetectionOutcome {
        detector,
        probability,
        conditional_state,
        rho_gamma: Some(rho_gamma),
    })
}

/// Outcomes for all four detectors, in `D1..D4` order.
pub fn detect_all(state: &ComplexVec) -> Result<[DetectionOutcome; 4]> {
    Ok([
        detect(state, Detector::D1)?,
        detect(state, Detector::D2)?,
        detect(state, Detector::D3)?,
        detect(state, Detector::D4)?,
    ])
}

/// Two-qubit state of path ⊗ partner-path after tracing out polarization,
/// taken at the source (before any beam splitter).
///
/// The coherence block carries the factor `q̄`; at `|q| = 1` this is the
/// pure-state projector, at `q = 0` a fully dephased two-term mixture.
pub fn reduced_gamma_phi(cfg: &ApparatusConfig) -> Result<ComplexMat> {
    cfg.validate()?;
    let (s1, s2) = cfg.polarization_states();
    // Registers: path (2) ⊗ partner-path (2) ⊗ polarization (2).
    let mut psi = ComplexVec::zeros(8);
    for pol in 0..layout::POL_DIM {
        psi.set(pol, cfg.c1 * s1.amp(pol)); // |0,0,pol⟩
        psi.set(6 + pol, cfg.c2 * s2.amp(pol)); // |1,1,pol⟩
    }
    psi.projector().partial_trace(&[2, 2, 2], &[0, 1])
}

/// Reduced path state of the full evolved ensemble, with no conditioning on
/// any detector.
pub fn unconditioned_rho_gamma(cfg: &ApparatusConfig) -> Result<ComplexMat> {
    evolve(cfg)?
        .projector()
        .partial_trace(&[layout::GAMMA_DIM, layout::PHI_DIM, layout::POL_DIM], &[0])
}
