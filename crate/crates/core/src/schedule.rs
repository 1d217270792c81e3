//! Lesson/break timelines.

use crate::error::{Diagnostic, Result, SimError};
use crate::model::{EffortSpec, Segment};

/// Relative tolerance when checking that a duration is a whole number of steps.
pub const STEP_TOLERANCE: f64 = 1e-9;

/// An ordered sequence of segments starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    /// `n_lessons` equal lessons separated by equal breaks, with no trailing
    /// break after the last lesson.
    pub fn uniform_day(
        n_lessons: usize,
        lesson_len: f64,
        break_len: f64,
        efforts: &[EffortSpec],
        complexities: &[f64],
    ) -> Result<Self> {
        if n_lessons == 0 {
            return Err(SimError::precondition("a day needs at least one lesson"));
        }
        if !(lesson_len > 0.0 && break_len > 0.0) {
            return Err(SimError::precondition(format!(
                "lesson and break lengths must be > 0, got {lesson_len} and {break_len}"
            )));
        }
        if efforts.len() != n_lessons || complexities.len() != n_lessons {
            return Err(SimError::precondition(format!(
                "expected {n_lessons} efforts and complexities, got {} and {}",
                efforts.len(),
                complexities.len()
            )));
        }
        let mut segments = Vec::with_capacity(2 * n_lessons - 1);
        for (i, (&effort, &s)) in efforts.iter().zip(complexities).enumerate() {
            if i > 0 {
                segments.push(Segment::rest(break_len));
            }
            segments.push(Segment::lesson(lesson_len, effort, s));
        }
        Ok(Self { segments })
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Start time of every segment.
    pub fn starts(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = acc;
                acc += s.duration;
                start
            })
            .collect()
    }

    /// Segment containing `t` and the offset into it. An instant on a join
    /// belongs to the later segment.
    pub fn segment_at(&self, t: f64) -> Result<(usize, f64)> {
        let total = self.total_duration();
        if !(t >= 0.0 && t < total) {
            return Err(SimError::precondition(format!(
                "time {t} outside schedule range [0, {total})"
            )));
        }
        let starts = self.starts();
        let idx = starts.partition_point(|&start| start <= t) - 1;
        Ok((idx, t - starts[idx]))
    }

    /// Number of whole steps of length `dt` in each segment, if all are whole.
    pub fn step_counts(&self, dt: f64) -> Option<Vec<u64>> {
        self.segments.iter().map(|s| whole_steps(s.duration, dt)).collect()
    }

    /// Structural diagnostics. Empty iff the schedule is runnable with `dt`.
    pub fn validate(&self, dt: f64) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.segments.is_empty() {
            out.push(Diagnostic::error("", "schedule has no segments"));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            let path = format!("[{i}]");
            out.extend(seg.validate().into_iter().map(|d| d.under(&path)));
            if seg.duration > 0.0 && dt > 0.0 && whole_steps(seg.duration, dt).is_none() {
                out.push(
                    Diagnostic::error(
                        "duration",
                        format!("{} is not a whole number of steps of {dt}", seg.duration),
                    )
                    .under(&path),
                );
            }
        }
        out
    }
}

fn whole_steps(duration: f64, dt: f64) -> Option<u64> {
    let ratio = duration / dt;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= STEP_TOLERANCE * ratio {
        Some(rounded as u64)
    } else {
        None
    }
}
