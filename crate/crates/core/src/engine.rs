//! Fixed-step integration of a student through a schedule.
//!
//! Two integrators are provided. [`Method::Euler`] reproduces the update
//! order of the original school-day program exactly:
//!
//! * lesson: `P` is advanced first, workability is recomputed from the new
//!   `P`, then the categories are updated in order, each one reading the
//!   already-updated value of the category before it;
//! * break: the clock is advanced first and the workability ceiling is read
//!   at the new time.
//!
//! [`Method::Rk4`] is the classical four-stage scheme on the coupled `(Z, P)`
//! system during lessons and `(Z, r)` during breaks, with workability taken
//! as the algebraic function of `P` inside a lesson.
//!
//! Segment durations must be whole multiples of `dt`, so no step ever
//! straddles a phase boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, Result, SimError};
use crate::model::{
    break_rates_into, category_rate, effort, knowledge_power, lesson_rates_into, strength_coefficient, total_knowledge,
    work_rate, workability, workability_ceiling, EffortSpec, ModelParams, Segment, SegmentKind, SimState,
};
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Euler,
    Rk4,
}

/// Everything needed for one reproducible run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    pub schedule: Schedule,
    pub initial: SimState,
    pub dt: f64,
    pub method: Method,
    /// Record every `record_stride`-th step (the final step is always kept).
    pub record_stride: usize,
}

impl SimConfig {
    /// All diagnostics, errors and warnings, with paths rooted at the config.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out: Vec<Diagnostic> = self.params.validate().into_iter().map(|d| d.under("params")).collect();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            out.push(Diagnostic::error("dt", format!("must be > 0, got {}", self.dt)));
        }
        if self.record_stride == 0 {
            out.push(Diagnostic::error("record_stride", "must be at least 1"));
        }
        out.extend(self.schedule.validate(self.dt).into_iter().map(|d| d.under("schedule")));
        let init = &self.initial;
        out.extend(init.validate(self.params.n).into_iter().map(|d| d.under("initial")));
        if init.t != 0.0 || init.p != 0.0 || init.r != init.r0_base {
            out.push(Diagnostic::error(
                "initial",
                "a run starts at t = 0 with P = 0 and r = r0",
            ));
        }
        if self.params.b > 0.0 && init.z.iter().all(|&z| z == 0.0) {
            out.push(Diagnostic::warning(
                "initial.Z",
                "with b > 0 and no initial knowledge the inflow Z^b is zero and nothing is ever learned",
            ));
        }
        out
    }

    pub fn errors(&self) -> Vec<Diagnostic> {
        self.validate().into_iter().filter(Diagnostic::is_error).collect()
    }
}

/// One recorded sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: f64,
    pub z: Vec<f64>,
    pub z_total: f64,
    pub r: f64,
    pub p: f64,
    pub f: f64,
    pub pr: f64,
    pub segment: usize,
}

impl Row {
    fn capture(state: &SimState, segment: &Segment, index: usize) -> Self {
        let z_total = total_knowledge(&state.z);
        let f = match segment.kind {
            SegmentKind::Lesson { effort: spec, .. } => effort(spec, z_total),
            SegmentKind::Break => 0.0,
        };
        Self {
            t: state.t,
            z: state.z.clone(),
            z_total,
            r: state.r,
            p: state.p,
            f,
            pr: strength_coefficient(&state.z),
            segment: index,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<Row>,
    /// The configuration that produced this trajectory.
    pub config: SimConfig,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.config.params.n
    }

    pub fn last(&self) -> &Row {
        self.rows.last().expect("a trajectory always holds the initial row")
    }

    /// Column names in output order: `t, Z1..Zn, Z, r, P, F, Pr, segment`.
    pub fn channel_names(&self) -> Vec<String> {
        let mut names = vec!["t".to_string()];
        names.extend((1..=self.n()).map(|i| format!("Z{i}")));
        names.extend(["Z", "r", "P", "F", "Pr", "segment"].map(String::from));
        names
    }

    pub fn channel(&self, name: &str) -> Option<Vec<f64>> {
        let pick: Box<dyn Fn(&Row) -> f64> = match name {
            "t" => Box::new(|r| r.t),
            "Z" => Box::new(|r| r.z_total),
            "r" => Box::new(|r| r.r),
            "P" => Box::new(|r| r.p),
            "F" => Box::new(|r| r.f),
            "Pr" => Box::new(|r| r.pr),
            "segment" => Box::new(|r| r.segment as f64),
            other => {
                let i: usize = other.strip_prefix('Z')?.parse().ok()?;
                if i == 0 || i > self.n() {
                    return None;
                }
                Box::new(move |r| r.z[i - 1])
            }
        };
        Some(self.rows.iter().map(pick).collect())
    }

    /// Mean workability over recorded lesson samples.
    pub fn mean_lesson_workability(&self) -> f64 {
        let segments = &self.config.schedule.segments;
        let (sum, count) = self
            .rows
            .iter()
            .filter(|row| segments[row.segment].is_lesson())
            .fold((0.0, 0usize), |(s, c), row| (s + row.r, c + 1));
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// Scratch space for the integrators, sized for `n` categories.
struct Integrator {
    k: [Vec<f64>; 4],
    kx: [f64; 4],
    stage: Vec<f64>,
}

impl Integrator {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            kx: [0.0; 4],
            stage: vec![0.0; n],
        }
    }

    /// Advances `state` by one step inside `segment`, including the clock.
    fn advance(&mut self, state: &mut SimState, segment: &Segment, dt: f64, params: &ModelParams, method: Method) {
        match (segment.kind, method) {
            (SegmentKind::Lesson { effort, complexity }, Method::Euler) => {
                euler_lesson(state, effort, complexity, dt, params)
            }
            (SegmentKind::Lesson { effort, complexity }, Method::Rk4) => {
                self.rk4_lesson(state, effort, complexity, dt, params)
            }
            (SegmentKind::Break, Method::Euler) => euler_break(state, dt, params),
            (SegmentKind::Break, Method::Rk4) => self.rk4_break(state, dt, params),
        }
    }

    fn rk4_lesson(&mut self, state: &mut SimState, spec: EffortSpec, s: f64, dt: f64, params: &ModelParams) {
        let n = params.n;
        let half = 0.5 * dt;
        let weights = [0.0, half, half, dt];
        for stage in 0..4 {
            let (done, rest) = self.k.split_at_mut(stage);
            let p = if stage == 0 {
                self.stage.copy_from_slice(&state.z);
                state.p
            } else {
                for ((y, z), k) in self.stage.iter_mut().zip(&state.z).zip(&done[stage - 1]) {
                    *y = z + weights[stage] * k;
                }
                state.p + weights[stage] * self.kx[stage - 1]
            };
            self.kx[stage] = lesson_rates_into(params, &self.stage, state.r0_base, p, spec, s, &mut rest[0]);
        }
        let sixth = dt / 6.0;
        let [k1, k2, k3, k4] = &self.k;
        for i in 0..n {
            state.z[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let kx = self.kx;
        state.p += sixth * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3]);
        state.r = workability(state.r0_base, state.p, params);
        state.t += dt;
    }

    fn rk4_break(&mut self, state: &mut SimState, dt: f64, params: &ModelParams) {
        let n = params.n;
        let half = 0.5 * dt;
        let weights = [0.0, half, half, dt];
        for stage in 0..4 {
            let (done, rest) = self.k.split_at_mut(stage);
            let r = if stage == 0 {
                self.stage.copy_from_slice(&state.z);
                state.r
            } else {
                for ((y, z), k) in self.stage.iter_mut().zip(&state.z).zip(&done[stage - 1]) {
                    *y = z + weights[stage] * k;
                }
                state.r + weights[stage] * self.kx[stage - 1]
            };
            let t = state.t + weights[stage];
            self.kx[stage] = break_rates_into(params, t, &self.stage, r, &mut rest[0]);
        }
        let sixth = dt / 6.0;
        let [k1, k2, k3, k4] = &self.k;
        for i in 0..n {
            state.z[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let kx = self.kx;
        state.r += sixth * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3]);
        state.r0_base = state.r;
        state.p = 0.0;
        state.t += dt;
    }
}

fn euler_lesson(state: &mut SimState, spec: EffortSpec, s: f64, dt: f64, params: &ModelParams) {
    let z_total = total_knowledge(&state.z);
    let f = effort(spec, z_total);
    state.p += work_rate(params, f, s) * dt;
    state.r = workability(state.r0_base, state.p, params);
    let gain = state.r * (1.0 - s);
    let mut source = f * knowledge_power(z_total, params.b);
    for i in 0..params.n {
        let rate = category_rate(params, i, gain, source, state.z[i]);
        state.z[i] += rate * dt;
        source = state.z[i];
    }
    state.t += dt;
}

fn euler_break(state: &mut SimState, dt: f64, params: &ModelParams) {
    state.t += dt;
    state.r += params.k3 * (workability_ceiling(state.t, params) - state.r) * dt;
    for (z, g) in state.z.iter_mut().zip(&params.gamma) {
        *z -= g * *z * dt;
    }
    state.r0_base = state.r;
    state.p = 0.0;
}

/// One integration step of length `dt` inside `segment`.
pub fn step(state: &SimState, segment: &Segment, dt: f64, params: &ModelParams, method: Method) -> Result<SimState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SimError::precondition(format!("step size must be > 0, got {dt}")));
    }
    if state.z.len() != params.n {
        return Err(SimError::precondition(format!(
            "state has {} categories, parameters expect {}",
            state.z.len(),
            params.n
        )));
    }
    let mut next = state.clone();
    Integrator::new(params.n).advance(&mut next, segment, dt, params, method);
    Ok(next)
}

/// Side effects of moving from one segment into the next.
///
/// Work is reset on entering a break. Entering a lesson from a break resets
/// work and restarts the fatigue sigmoid from the recovered workability.
/// Consecutive segments of the same kind continue without resets.
pub fn apply_transition(state: &SimState, from: &Segment, to: &Segment) -> SimState {
    let mut next = state.clone();
    transition_in_place(&mut next, from, to);
    next
}

fn transition_in_place(state: &mut SimState, from: &Segment, to: &Segment) {
    match (from.is_lesson(), to.is_lesson()) {
        (true, false) => state.p = 0.0,
        (false, true) => {
            state.r0_base = state.r;
            state.p = 0.0;
        }
        _ => {}
    }
}

/// Runs a configuration to the end of its schedule.
pub fn run(config: &SimConfig) -> Result<Trajectory> {
    let errors = config.errors();
    if !errors.is_empty() {
        return Err(SimError::Invalid(errors));
    }
    let segments = &config.schedule.segments;
    let counts = config
        .schedule
        .step_counts(config.dt)
        .expect("validated schedule has whole step counts");
    let starts = config.schedule.starts();
    let total_steps: u64 = counts.iter().sum();
    let stride = config.record_stride as u64;

    let mut rows = Vec::with_capacity((total_steps / stride) as usize + 2);
    let mut state = config.initial.clone();
    let mut integrator = Integrator::new(config.params.n);
    rows.push(Row::capture(&state, &segments[0], 0));

    let mut taken = 0u64;
    for (idx, segment) in segments.iter().enumerate() {
        if idx > 0 {
            transition_in_place(&mut state, &segments[idx - 1], segment);
        }
        for j in 0..counts[idx] {
            integrator.advance(&mut state, segment, config.dt, &config.params, config.method);
            // Anchor the clock to the segment start to keep rounding from accumulating.
            state.t = starts[idx] + (j + 1) as f64 * config.dt;
            taken += 1;
            if taken.is_multiple_of(stride) || taken == total_steps {
                rows.push(Row::capture(&state, segment, idx));
            }
        }
    }
    Ok(Trajectory {
        rows,
        config: config.clone(),
    })
}
