//! Tendon modulus estimation by RMSE minimization.
//!
//! The objective is the RMSE (degrees) between measured deflection and the
//! model inverted at the measured stroke and tension. It is scanned on a
//! log-spaced grid over the search range, then refined by golden-section
//! search in `ln E` around the best grid point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::TubeSpec;
use crate::kinematics::{JointModel, TendonGeometry};

/// `(√5 − 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// One sample of deadband-free actuation data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitSample {
    /// mm
    pub stroke: f64,
    /// N
    pub tension: f64,
    /// radians
    pub deflection: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub lower_mpa: f64,
    pub upper_mpa: f64,
    pub grid_points: usize,
    /// Final bracket width in `ln E`, i.e. relative tolerance on E.
    pub rel_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            lower_mpa: 1_000.0,
            upper_mpa: 300_000.0,
            grid_points: 200,
            rel_tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusFit {
    pub modulus_mpa: f64,
    pub rmse_deg: f64,
    pub samples_used: usize,
    pub evaluations: usize,
    /// Whether the grid scan was unimodal, i.e. golden-section refinement
    /// around its minimum is trustworthy.
    pub unimodal: bool,
}

/// `√(mean((model − measured)²))`; both series in degrees.
pub fn rmse_degrees(model: &[f64], measured: &[f64]) -> Result<f64> {
    if model.len() != measured.len() {
        return Err(Error::LengthMismatch {
            model: model.len(),
            measured: measured.len(),
        });
    }
    if model.is_empty() {
        return Err(Error::Empty("rmse series"));
    }
    let sum: f64 = model
        .iter()
        .zip(measured)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sum / model.len() as f64).sqrt())
}

/// Objective evaluator with the modulus-independent parts precomputed.
pub struct Objective<'a> {
    model: JointModel,
    area: f64,
    free_length: f64,
    samples: &'a [FitSample],
    measured_deg: Vec<f64>,
}

impl<'a> Objective<'a> {
    pub fn new(tube: &TubeSpec, tendon: TendonGeometry, samples: &'a [FitSample]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("fit samples"));
        }
        // The modulus only enters through the compliance, replaced per call.
        let model = JointModel::new(tube, &tendon.with_modulus(1.0))?;
        Ok(Objective {
            model,
            area: std::f64::consts::PI * tendon.radius * tendon.radius,
            free_length: tendon.free_length,
            samples,
            measured_deg: samples.iter().map(|s| s.deflection.to_degrees()).collect(),
        })
    }

    pub fn predictions_deg(&self, modulus_mpa: f64) -> Vec<f64> {
        let model = JointModel {
            compliance: self.free_length / (modulus_mpa * self.area),
            ..self.model
        };
        self.samples
            .iter()
            .map(|s| model.invert(s.stroke, s.tension).deflection().to_degrees())
            .collect()
    }

    pub fn rmse(&self, modulus_mpa: f64) -> f64 {
        rmse_degrees(&self.predictions_deg(modulus_mpa), &self.measured_deg)
            .expect("lengths match by construction")
    }
}

fn log_grid(opts: &FitOptions) -> Vec<f64> {
    let (a, b) = (opts.lower_mpa.ln(), opts.upper_mpa.ln());
    let n = opts.grid_points.max(3);
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// RMSE at `grid_points` log-spaced moduli across the search range.
pub fn objective_scan(
    tube: &TubeSpec,
    tendon: TendonGeometry,
    samples: &[FitSample],
    opts: &FitOptions,
) -> Result<Vec<(f64, f64)>> {
    let obj = Objective::new(tube, tendon, samples)?;
    Ok(log_grid(opts)
        .into_iter()
        .map(|e| (e, obj.rmse(e)))
        .collect())
}

/// True when `values` never increases after it has started to increase.
pub fn is_unimodal(values: &[f64]) -> bool {
    let mut rising = false;
    for w in values.windows(2) {
        if w[1] > w[0] {
            rising = true;
        } else if rising && w[1] < w[0] {
            return false;
        }
    }
    true
}

fn check_options(opts: &FitOptions) -> Result<()> {
    if !(opts.lower_mpa > 0.0 && opts.upper_mpa > opts.lower_mpa && opts.upper_mpa.is_finite()) {
        return Err(Error::NonIdentifiable(format!(
            "invalid search range [{}, {}] MPa",
            opts.lower_mpa, opts.upper_mpa
        )));
    }
    Ok(())
}

/// Minimizes the deflection RMSE over the tendon modulus.
pub fn fit_tendon_modulus(
    tube: &TubeSpec,
    tendon: TendonGeometry,
    samples: &[FitSample],
    opts: &FitOptions,
) -> Result<ModulusFit> {
    check_options(opts)?;
    if samples.iter().all(|s| s.tension == 0.0) {
        return Err(Error::NonIdentifiable(
            "every sample has zero tension, so the elongation term vanishes".into(),
        ));
    }
    let obj = Objective::new(tube, tendon, samples)?;
    let grid = log_grid(opts);
    let values: Vec<f64> = grid.iter().map(|&e| obj.rmse(e)).collect();
    let (lo_v, hi_v) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if hi_v - lo_v <= 1e-12 * hi_v.max(1e-300) {
        return Err(Error::NonIdentifiable(format!(
            "objective is flat at {lo_v} deg across [{}, {}] MPa",
            opts.lower_mpa, opts.upper_mpa
        )));
    }
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is non-empty");

    let mut a = grid[best.saturating_sub(1)].ln();
    let mut b = grid[(best + 1).min(grid.len() - 1)].ln();
    let f = |x: f64| obj.rmse(x.exp());
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evaluations = grid.len() + 2;
    let mut iterations = 0;
    while b - a > opts.rel_tolerance {
        if iterations >= opts.max_iterations {
            return Err(Error::NotConverged {
                iterations,
                lower: a.exp(),
                upper: b.exp(),
            });
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
        iterations += 1;
    }
    let (x, fx) = if fc < fd { (c, fc) } else { (d, fd) };
    let (modulus, rmse) = if values[best] < fx {
        (grid[best], values[best])
    } else {
        (x.exp(), fx)
    };
    Ok(ModulusFit {
        modulus_mpa: modulus,
        rmse_deg: rmse,
        samples_used: samples.len(),
        evaluations,
        unimodal: is_unimodal(&values),
    })
}
