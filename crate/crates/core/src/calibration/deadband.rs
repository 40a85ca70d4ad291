//! Removal of the tendon-slack deadband from an actuation segment.
//!
//! The onset of deflection is the first sample where the measured angle
//! stays at or above `threshold_deg` for `sustain` consecutive samples. A
//! least-squares line of deflection against stroke is fitted over the
//! following `window_fraction` of the segment's stroke range and
//! extrapolated back to zero deflection; that stroke intercept is the slack,
//! and it is subtracted from every stroke in the segment.

use super::trials::TrialRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeadbandOptions {
    pub threshold_deg: f64,
    /// Consecutive samples above the threshold that count as engagement.
    pub sustain: usize,
    /// Width of the fit window as a fraction of the segment stroke range.
    pub window_fraction: f64,
    /// Minimum number of samples in the fit window.
    pub min_window: usize,
}

impl Default for DeadbandOptions {
    fn default() -> Self {
        DeadbandOptions {
            threshold_deg: 0.5,
            sustain: 3,
            window_fraction: 0.2,
            min_window: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deadband {
    pub records: Vec<TrialRecord>,
    /// Stroke intercept at zero deflection, mm.
    pub offset: f64,
    /// Index of the sustained onset within the segment.
    pub onset: usize,
}

fn onset_index(segment: &[TrialRecord], threshold: f64, sustain: usize) -> Option<usize> {
    let sustain = sustain.max(1);
    let mut run = 0;
    for (i, r) in segment.iter().enumerate() {
        if r.deflection >= threshold {
            run += 1;
            if run == sustain {
                return Some(i + 1 - sustain);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// Stroke at which the line through `points` reaches zero deflection.
fn zero_crossing(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return None;
    }
    Some(mx - my / slope)
}

/// Finds and removes the slack offset of one actuation segment.
pub fn remove_deadband(segment: &[TrialRecord], opts: &DeadbandOptions) -> Result<Deadband> {
    let engagement = || Error::InsufficientEngagement {
        threshold_deg: opts.threshold_deg,
    };
    let threshold = opts.threshold_deg.to_radians();
    let onset = onset_index(segment, threshold, opts.sustain).ok_or_else(engagement)?;

    let (lo, hi) = segment
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
            (a.min(r.stroke), b.max(r.stroke))
        });
    let width = opts.window_fraction * (hi - lo);
    let start = segment[onset].stroke;
    let window: Vec<(f64, f64)> = segment[onset..]
        .iter()
        .take_while(|r| r.stroke - start <= width)
        .map(|r| (r.stroke, r.deflection))
        .collect();
    if window.len() < opts.min_window.max(2) {
        return Err(engagement());
    }
    let offset = zero_crossing(&window).ok_or_else(engagement)?;

    let records = segment
        .iter()
        .map(|r| TrialRecord {
            stroke: r.stroke - offset,
            ..*r
        })
        .collect();
    Ok(Deadband {
        records,
        offset,
        onset,
    })
}
