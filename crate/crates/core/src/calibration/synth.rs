//! Synthetic cyclic trials with known ground truth.
//!
//! Each cycle drives the stroke up and down a triangle between zero and
//! `max_stroke_mm`. The joint stays slack until the stroke exceeds
//! `slack_mm`; beyond that the deflection solves the model with tension
//! supplied by a linear stiffness profile. Cycle 1 is scaled by
//! `first_cycle_scale`, transient cycles carry a deflection drift that
//! decays to zero, and steady cycles follow the model exactly. Gaussian
//! noise is added to the measured deflection only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::segment::{cycle_label, CycleLabel};
use super::trials::TrialRecord;
use crate::error::{Error, Result};
use crate::geometry::TubeSpec;
use crate::kinematics::{JointModel, TendonSpec};

/// Tension as a function of joint deflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TensionProfile {
    /// `F = stiffness · θ`, N/rad.
    Linear { stiffness: f64 },
}

impl TensionProfile {
    pub fn tension(&self, theta: f64) -> f64 {
        match *self {
            TensionProfile::Linear { stiffness } => stiffness * theta,
        }
    }

    fn linear_stiffness(&self) -> f64 {
        match *self {
            TensionProfile::Linear { stiffness } => stiffness,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub cycles: usize,
    /// Samples per full up-and-down cycle; rounded up to an even number.
    pub samples_per_cycle: usize,
    pub max_stroke_mm: f64,
    pub slack_mm: f64,
    pub first_cycle_scale: f64,
    /// Relative deflection excess of cycle 2, decaying linearly to zero over
    /// the transient cycles.
    pub drift: f64,
    pub noise_deg: f64,
    pub tension: TensionProfile,
    pub sample_period_s: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            cycles: 50,
            samples_per_cycle: 100,
            max_stroke_mm: 2.5,
            slack_mm: 0.0,
            first_cycle_scale: 1.0,
            drift: 0.0,
            noise_deg: 0.0,
            tension: TensionProfile::Linear { stiffness: 1.0 },
            sample_period_s: 0.01,
            seed: 0,
        }
    }
}

impl SynthConfig {
    fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidGeometry(format!("synthetic trial: {what}")));
        if self.cycles == 0 {
            return bad("cycles must be >= 1");
        }
        if self.samples_per_cycle < 2 {
            return bad("samples_per_cycle must be >= 2");
        }
        if !(self.max_stroke_mm > 0.0 && self.max_stroke_mm.is_finite()) {
            return bad("max_stroke_mm must be > 0");
        }
        if !(self.slack_mm >= 0.0) {
            return bad("slack_mm must be >= 0");
        }
        if !(self.first_cycle_scale > 0.0) {
            return bad("first_cycle_scale must be > 0");
        }
        if !(self.drift >= 0.0) {
            return bad("drift must be >= 0");
        }
        if !(self.noise_deg >= 0.0 && self.noise_deg.is_finite()) {
            return bad("noise_deg must be >= 0");
        }
        if !(self.tension.linear_stiffness() >= 0.0) {
            return bad("tension stiffness must be >= 0");
        }
        if !(self.sample_period_s > 0.0) {
            return bad("sample_period_s must be > 0");
        }
        Ok(())
    }
}

/// Deflection multiplier applied to cycle `number`.
fn cycle_scale(number: usize, cfg: &SynthConfig) -> f64 {
    match cycle_label(number, cfg.cycles) {
        CycleLabel::First => cfg.first_cycle_scale,
        CycleLabel::Steady => 1.0,
        CycleLabel::Transient => {
            let last = (2..=cfg.cycles)
                .take_while(|&k| cycle_label(k, cfg.cycles) == CycleLabel::Transient)
                .last()
                .unwrap_or(2);
            1.0 + cfg.drift * (last + 1 - number) as f64 / (last - 1) as f64
        }
    }
}

/// Generates a deterministic trial for the given seed.
pub fn synthesize_trials(
    tube: &TubeSpec,
    tendon: &TendonSpec,
    cfg: &SynthConfig,
) -> Result<Vec<TrialRecord>> {
    cfg.check()?;
    let model = JointModel::new(tube, tendon)?;
    let half = cfg.samples_per_cycle.div_ceil(2);
    let per_rad = model.moment_arm + model.compliance * cfg.tension.linear_stiffness();
    let noise = Normal::new(0.0, cfg.noise_deg).expect("noise checked non-negative");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut out = Vec::with_capacity(cfg.cycles * 2 * half + 1);
    let mut push = |stroke: f64, scale: f64, rng: &mut ChaCha8Rng| {
        let ideal = (stroke - cfg.slack_mm).max(0.0) / per_rad;
        let theta = scale * ideal;
        let tension = cfg.tension.tension(theta);
        let measured = if cfg.noise_deg > 0.0 {
            (theta.to_degrees() + noise.sample(rng)).to_radians()
        } else {
            theta
        };
        let i = out.len();
        out.push(TrialRecord {
            time: i as f64 * cfg.sample_period_s,
            stroke,
            tension,
            deflection: measured,
        });
    };
    for number in 1..=cfg.cycles {
        let scale = cycle_scale(number, cfg);
        for j in 0..2 * half {
            let u = if j <= half { j } else { 2 * half - j };
            let stroke = cfg.max_stroke_mm * u as f64 / half as f64;
            push(stroke, scale, &mut rng);
        }
    }
    push(0.0, 1.0, &mut rng);
    Ok(out)
}
