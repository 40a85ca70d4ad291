//! Calibration of the joint model against cyclic bench trials.
//!
//! The pipeline mirrors how the bench data is reduced: load the trial,
//! segment it into actuation/relaxation cycles, strip the tendon-slack
//! deadband from each selected actuation segment, fit the tendon modulus
//! and report the deflection RMSE in degrees.

pub mod deadband;
pub mod fit;
pub mod segment;
pub mod synth;
pub mod trials;

use serde::{Deserialize, Serialize};

pub use deadband::{remove_deadband, Deadband, DeadbandOptions};
pub use fit::{
    fit_tendon_modulus, is_unimodal, objective_scan, rmse_degrees, FitOptions, FitSample,
    ModulusFit, Objective,
};
pub use segment::{segment_cycles, Cycle, CycleLabel, CycleSet, Phase, SegmentOptions};
pub use synth::{synthesize_trials, SynthConfig, TensionProfile};
pub use trials::{load_trials, parse_trials, trials_to_csv, write_trials, TrialRecord};

use crate::error::{Error, Result};
use crate::geometry::TubeSpec;
use crate::kinematics::TendonGeometry;

/// Calibration summary, serialized as the fit report JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub e_t_mpa: f64,
    pub rmse_deg: f64,
    /// Mean slack removed from the fitted cycles, mm.
    pub deadband_mm: f64,
    pub samples_used: usize,
}

impl FitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Which cycles feed the fit.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CycleSelection {
    #[default]
    Steady,
    Last,
    All,
    /// 1-based cycle numbers.
    Numbers(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineOptions {
    pub segment: SegmentOptions,
    pub deadband: DeadbandOptions,
    pub fit: FitOptions,
    pub cycles: CycleSelection,
}

/// Everything the pipeline produced, for reporting and plotting.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub result: FitResult,
    pub cycle_set: CycleSet,
    /// `(cycle number, slack offset in mm)` per fitted cycle.
    pub offsets: Vec<(usize, f64)>,
    pub samples: Vec<FitSample>,
    /// `(cycle number, range into samples)` per fitted cycle.
    pub sample_ranges: Vec<(usize, std::ops::Range<usize>)>,
    pub fit: ModulusFit,
}

fn stage(name: &'static str) -> impl FnOnce(Error) -> Error {
    move |e| Error::Stage {
        stage: name,
        source: Box::new(e),
    }
}

fn select<'a>(set: &'a CycleSet, sel: &CycleSelection) -> Vec<&'a Cycle> {
    match sel {
        CycleSelection::Steady => set.with_label(CycleLabel::Steady).collect(),
        CycleSelection::Last => set.cycles.last().into_iter().collect(),
        CycleSelection::All => set.cycles.iter().collect(),
        CycleSelection::Numbers(ns) => set
            .cycles
            .iter()
            .filter(|c| ns.contains(&c.number))
            .collect(),
    }
}

/// Segment, remove deadband, fit and score already-loaded records.
pub fn calibrate(
    tube: &TubeSpec,
    tendon: TendonGeometry,
    records: &[TrialRecord],
    opts: &PipelineOptions,
) -> Result<Calibration> {
    let cycle_set = segment_cycles(records, &opts.segment).map_err(stage("segment"))?;
    let chosen = select(&cycle_set, &opts.cycles);
    if chosen.is_empty() {
        return Err(stage("segment")(Error::Empty("selected cycles")));
    }

    let mut offsets = Vec::with_capacity(chosen.len());
    let mut samples = Vec::new();
    let mut sample_ranges = Vec::with_capacity(chosen.len());
    for cycle in chosen {
        let db = remove_deadband(&records[cycle.actuation.clone()], &opts.deadband)
            .map_err(stage("deadband"))?;
        offsets.push((cycle.number, db.offset));
        let start = samples.len();
        samples.extend(
            db.records
                .iter()
                .filter(|r| r.stroke >= 0.0)
                .map(|r| FitSample {
                    stroke: r.stroke,
                    tension: r.tension,
                    deflection: r.deflection,
                }),
        );
        sample_ranges.push((cycle.number, start..samples.len()));
    }

    let fit = fit_tendon_modulus(tube, tendon, &samples, &opts.fit).map_err(stage("fit"))?;
    let deadband_mm = offsets.iter().map(|o| o.1).sum::<f64>() / offsets.len() as f64;
    Ok(Calibration {
        result: FitResult {
            e_t_mpa: fit.modulus_mpa,
            rmse_deg: fit.rmse_deg,
            deadband_mm,
            samples_used: samples.len(),
        },
        cycle_set,
        offsets,
        samples,
        sample_ranges,
        fit,
    })
}

/// Full pipeline from trial CSV text.
pub fn calibrate_csv(
    tube: &TubeSpec,
    tendon: TendonGeometry,
    csv_text: &str,
    opts: &PipelineOptions,
) -> Result<Calibration> {
    let records = parse_trials(csv_text).map_err(stage("load"))?;
    calibrate(tube, tendon, &records, opts)
}
