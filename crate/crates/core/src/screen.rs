//! Far-field fringe profiles and Monte Carlo sampling of photon impacts.
//!
//! The screen coordinate is the accumulated two-path phase φ ∈ [0, 2π); a
//! path qubit ρ produces the intensity density
//! `I(φ) = (1 + V·cos(φ + δ)) / 2π` with `V = 2|ρ₀₁|` and `δ = arg ρ₀₁`.
//! Physical positions are a linear rescaling `x = φ·Λ/2π` for a caller-chosen
//! fringe period Λ and are provided for plotting only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::TAU;

use crate::linalg::ComplexMat;
use crate::{Error, Result, STRUCTURAL_TOL};

/// Draws per RNG stream. Sampling is chunked so that results depend only on
/// the master seed and the chunk index, never on how chunks are scheduled.
const CHUNK: usize = 8192;

/// Analytic fringe intensity over one phase period.
#[derive(Debug, Clone)]
pub struct FringeProfile {
    pub phase_grid: Vec<f64>,
    pub intensity: Vec<f64>,
    pub analytic_v: f64,
    pub analytic_offset: f64,
}

impl FringeProfile {
    /// Intensity density at phase `phi`.
    pub fn density(&self, phi: f64) -> f64 {
        (1.0 + self.analytic_v * (phi + self.analytic_offset).cos()) / TAU
    }

    /// Density extrema, evaluated operationally at the extremal phases.
    pub fn extrema(&self) -> (f64, f64) {
        (
            self.density(-self.analytic_offset),
            self.density(std::f64::consts::PI - self.analytic_offset),
        )
    }

    /// Operational fringe contrast `(Imax − Imin)/(Imax + Imin)`.
    pub fn visibility_from_extrema(&self) -> f64 {
        let (max, min) = self.extrema();
        (max - min) / (max + min)
    }

    /// Pointwise mixture `Σ wᵢ·profileᵢ` of profiles on a common grid.
    ///
    /// The mixture of fringe densities is again of the same family; the
    /// combined (V, δ) come from the weighted coherences.
    pub fn mix(parts: &[(f64, &FringeProfile)]) -> Result<FringeProfile> {
        if parts.is_empty() {
            return Err(Error::Dimension("empty profile mixture".into()));
        }
        let grid_len = parts[0].1.phase_grid.len();
        if parts.iter().any(|(_, p)| p.phase_grid.len() != grid_len) {
            return Err(Error::Dimension(
                "profile mixture on mismatched grids".into(),
            ));
        }
        // Weighted coherence: w·(V/2)·e^{iδ} adds linearly.
        let (mut re, mut im) = (0.0, 0.0);
        for (w, p) in parts {
            re += w * p.analytic_v / 2.0 * p.analytic_offset.cos();
            im += w * p.analytic_v / 2.0 * p.analytic_offset.sin();
        }
        let v = 2.0 * (re * re + im * im).sqrt();
        let offset = if v == 0.0 { 0.0 } else { im.atan2(re) };
        Ok(profile_from_v_offset(v, offset, grid_len))
    }

    /// CSV rendering with header `phase,intensity`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phase,intensity\n");
        for (phi, i) in self.phase_grid.iter().zip(&self.intensity) {
            out.push_str(&format!("{phi},{i}\n"));
        }
        out
    }
}

/// Map a phase to a screen position for a fringe period `lambda`.
pub fn phase_to_position(phase: f64, lambda: f64) -> f64 {
    phase * lambda / TAU
}

fn profile_from_v_offset(v: f64, offset: f64, points: usize) -> FringeProfile {
    let phase_grid: Vec<f64> = (0..points)
        .map(|i| (i as f64 + 0.5) * TAU / points as f64)
        .collect();
    let mut profile = FringeProfile {
        phase_grid,
        intensity: Vec::new(),
        analytic_v: v,
        analytic_offset: offset,
    };
    profile.intensity = profile
        .phase_grid
        .iter()
        .map(|&phi| profile.density(phi))
        .collect();
    profile
}

/// Fringe profile of a 2×2 path state, on a default 360-point grid.
pub fn fringe_profile(rho_gamma: &ComplexMat) -> Result<FringeProfile> {
    fringe_profile_with_grid(rho_gamma, 360)
}

/// Fringe profile on a caller-chosen midpoint grid.
pub fn fringe_profile_with_grid(rho_gamma: &ComplexMat, points: usize) -> Result<FringeProfile> {
    if rho_gamma.rows() != 2 || rho_gamma.cols() != 2 {
        return Err(Error::Dimension(
            "fringe profile expects a 2×2 density matrix".into(),
        ));
    }
    rho_gamma.check_density(STRUCTURAL_TOL)?;
    if points == 0 {
        return Err(Error::Dimension(
            "profile grid must have at least one point".into(),
        ));
    }
    let coherence = rho_gamma.get(0, 1);
    let v = 2.0 * coherence.norm();
    let offset = if v == 0.0 { 0.0 } else { coherence.arg() };
    Ok(profile_from_v_offset(v, offset, points))
}

/// Seeded Monte Carlo draws from a fringe profile.
///
/// `estimated_v` and its standard error are NaN when `n < 100` — too few
/// samples for the first-harmonic estimator.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub n: usize,
    pub positions: Vec<f64>,
    pub histogram: Vec<u64>,
    pub estimated_v: f64,
    pub estimated_v_stderr: f64,
}

impl SampleSet {
    pub fn bins(&self) -> usize {
        self.histogram.len()
    }

    /// CSV rendering with header `bin_center_phase,count,density`.
    pub fn histogram_csv(&self) -> String {
        let bins = self.bins();
        let width = TAU / bins as f64;
        let mut out = String::from("bin_center_phase,count,density\n");
        for (k, &count) in self.histogram.iter().enumerate() {
            let center = (k as f64 + 0.5) * width;
            let density = count as f64 / (self.n as f64 * width);
            out.push_str(&format!("{center},{count},{density}\n"));
        }
        out
    }
}

/// Draw `n` i.i.d. impact phases from a profile, deterministically in
/// `seed`.
///
/// Rejection sampling against the flat envelope `(1 + V)/2π`; acceptance is
/// at worst one in two. Draw k lives in chunk `k / CHUNK`, and each chunk
/// runs on its own RNG stream, so splitting chunks across workers cannot
/// change the output.
pub fn sample(profile: &FringeProfile, n: usize, seed: u64, bins: usize) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::Dimension("sample count must be at least 1".into()));
    }
    if bins == 0 {
        return Err(Error::Dimension("histogram needs at least one bin".into()));
    }
    let v = profile.analytic_v;
    let offset = profile.analytic_offset;
    let envelope = 1.0 + v;

    let mut positions = Vec::with_capacity(n);
    let chunks = n.div_ceil(CHUNK);
    for chunk in 0..chunks {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64);
        let take = CHUNK.min(n - chunk * CHUNK);
        for _ in 0..take {
            loop {
                let phi = rng.random::<f64>() * TAU;
                let u = rng.random::<f64>() * envelope;
                if u <= 1.0 + v * (phi + offset).cos() {
                    positions.push(phi);
                    break;
                }
            }
        }
    }

    let mut histogram = vec![0u64; bins];
    for &phi in &positions {
        let k = ((phi / TAU) * bins as f64) as usize;
        histogram[k.min(bins - 1)] += 1;
    }

    let (estimated_v, estimated_v_stderr) = if n >= 100 {
        estimate_visibility(&positions)?
    } else {
        (f64::NAN, f64::NAN)
    };

    Ok(SampleSet {
        n,
        positions,
        histogram,
        estimated_v,
        estimated_v_stderr,
    })
}

/// First-harmonic visibility estimator `V̂ = 2√(⟨cos φ⟩² + ⟨sin φ⟩²)` with
/// the leading-order delta-method standard error `√(2/n)`.
pub fn estimate_visibility(positions: &[f64]) -> Result<(f64, f64)> {
    let n = positions.len();
    if n < 100 {
        return Err(Error::Dimension(format!(
            "visibility estimation needs at least 100 samples, got {n}"
        )));
    }
    let (mut mc, mut ms) = (0.0, 0.0);
    for &phi in positions {
        mc += phi.cos();
        ms += phi.sin();
    }
    mc /= n as f64;
    ms /= n as f64;
    let v_hat = 2.0 * (mc * mc + ms * ms).sqrt();
    Ok((v_hat, (2.0 / n as f64).sqrt()))
}

/// First-harmonic estimate of the fringe offset δ.
pub fn estimate_phase_offset(positions: &[f64]) -> f64 {
    let (mut mc, mut ms) = (0.0, 0.0);
    for &phi in positions {
        mc += phi.cos();
        ms += phi.sin();
    }
    (-ms).atan2(mc)
}
