//! Splitting a trial into actuation/relaxation cycles.
//!
//! Turning points of the stroke signal are found with a hysteresis band: a
//! running extreme becomes a peak (valley) once the signal has fallen
//! (risen) more than the band below (above) it. Each peak closes an
//! actuation segment and each valley closes a relaxation segment, so every
//! record lands in exactly one segment.

use std::ops::Range;

use serde::Serialize;

use super::trials::TrialRecord;
use crate::error::{Error, Result};

pub const DEFAULT_HYSTERESIS_MM: f64 = 0.05;

/// Cycle bands for the 50-cycle protocol: first cycle, cycles 2–30, 31–50.
const FIRST_STEADY_CYCLE: usize = 31;
const PROTOCOL_CYCLES: usize = 50;
/// Fraction of cycles labelled steady when fewer than 50 were recorded.
const STEADY_FRACTION: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentOptions {
    pub hysteresis_mm: f64,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions {
            hysteresis_mm: DEFAULT_HYSTERESIS_MM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Actuation,
    Relaxation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleLabel {
    First,
    Transient,
    Steady,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub phase: Phase,
    pub range: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cycle {
    /// 1-based cycle number.
    pub number: usize,
    pub label: CycleLabel,
    pub actuation: Range<usize>,
    pub relaxation: Option<Range<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleSet {
    /// Relaxation recorded before the first actuation, if the trial starts
    /// with the tendon being released.
    pub leading: Option<Range<usize>>,
    pub cycles: Vec<Cycle>,
}

impl CycleSet {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn with_label(&self, label: CycleLabel) -> impl Iterator<Item = &Cycle> {
        self.cycles.iter().filter(move |c| c.label == label)
    }

    /// All segments in record order.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        if let Some(r) = &self.leading {
            out.push(Segment {
                phase: Phase::Relaxation,
                range: r.clone(),
            });
        }
        for c in &self.cycles {
            out.push(Segment {
                phase: Phase::Actuation,
                range: c.actuation.clone(),
            });
            if let Some(r) = &c.relaxation {
                out.push(Segment {
                    phase: Phase::Relaxation,
                    range: r.clone(),
                });
            }
        }
        out
    }
}

/// Label for cycle `number` out of `total`.
pub fn cycle_label(number: usize, total: usize) -> CycleLabel {
    if number <= 1 {
        return CycleLabel::First;
    }
    let first_steady = if total >= PROTOCOL_CYCLES {
        FIRST_STEADY_CYCLE
    } else {
        let steady = (STEADY_FRACTION * total as f64).ceil() as usize;
        total + 1 - steady
    };
    if number >= first_steady {
        CycleLabel::Steady
    } else {
        CycleLabel::Transient
    }
}

/// Indices where the stroke turns, alternating with the initial direction.
fn turning_points(stroke: &[f64], band: f64) -> Option<(Phase, Vec<usize>)> {
    let (mut lo, mut hi) = (0, 0);
    let mut start = None;
    for (i, &x) in stroke.iter().enumerate() {
        if x < stroke[lo] {
            lo = i;
        }
        if x > stroke[hi] {
            hi = i;
        }
        if x - stroke[lo] > band {
            start = Some((Phase::Actuation, i, hi));
            break;
        }
        if stroke[hi] - x > band {
            start = Some((Phase::Relaxation, i, lo));
            break;
        }
    }
    let (first, from, mut cand) = start?;
    let mut phase = first;
    let mut turns = Vec::new();
    for i in from..stroke.len() {
        let x = stroke[i];
        match phase {
            Phase::Actuation => {
                if x > stroke[cand] {
                    cand = i;
                } else if stroke[cand] - x > band {
                    turns.push(cand);
                    phase = Phase::Relaxation;
                    cand = argmin(stroke, cand + 1..i + 1);
                }
            }
            Phase::Relaxation => {
                if x < stroke[cand] {
                    cand = i;
                } else if x - stroke[cand] > band {
                    turns.push(cand);
                    phase = Phase::Actuation;
                    cand = argmax(stroke, cand + 1..i + 1);
                }
            }
        }
    }
    Some((first, turns))
}

fn argmin(x: &[f64], r: Range<usize>) -> usize {
    r.reduce(|a, b| if x[b] < x[a] { b } else { a })
        .expect("non-empty range")
}

fn argmax(x: &[f64], r: Range<usize>) -> usize {
    r.reduce(|a, b| if x[b] > x[a] { b } else { a })
        .expect("non-empty range")
}

/// Segments `records` into actuation/relaxation cycles and labels them.
pub fn segment_cycles(records: &[TrialRecord], opts: &SegmentOptions) -> Result<CycleSet> {
    if records.is_empty() {
        return Err(Error::Empty("trial records"));
    }
    let stroke: Vec<f64> = records.iter().map(|r| r.stroke).collect();
    let band = opts.hysteresis_mm;
    let (min, max) = stroke
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });

    let Some((first, turns)) = turning_points(&stroke, band) else {
        return Err(Error::NoCycles {
            range_mm: max - min,
            band_mm: band,
        });
    };

    let mut segments = Vec::with_capacity(turns.len() + 1);
    let mut begin = 0;
    let mut phase = first;
    for &t in &turns {
        segments.push(Segment {
            phase,
            range: begin..t + 1,
        });
        begin = t + 1;
        phase = match phase {
            Phase::Actuation => Phase::Relaxation,
            Phase::Relaxation => Phase::Actuation,
        };
    }
    if begin < stroke.len() {
        segments.push(Segment {
            phase,
            range: begin..stroke.len(),
        });
    }

    let mut iter = segments.into_iter().peekable();
    let leading = match iter.peek() {
        Some(s) if s.phase == Phase::Relaxation => iter.next().map(|s| s.range),
        _ => None,
    };
    let mut pairs = Vec::new();
    while let Some(act) = iter.next() {
        debug_assert_eq!(act.phase, Phase::Actuation);
        let relax = iter.next().map(|s| s.range);
        pairs.push((act.range, relax));
    }
    let total = pairs.len();
    let cycles = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (actuation, relaxation))| Cycle {
            number: i + 1,
            label: cycle_label(i + 1, total),
            actuation,
            relaxation,
        })
        .collect();
    Ok(CycleSet { leading, cycles })
}
