//! Domain types and right-hand sides of the knowledge-chain model.
//!
//! Knowledge is split into `n` categories `Z_1..Z_n`. During a lesson the
//! student's effort feeds category 1, each category transfers into the next,
//! more durable one, and every category is forgotten at its own rate. The
//! transfer is throttled by workability `r`, which falls sigmoidally with the
//! work `P` done in the current lesson and recovers exponentially during
//! breaks towards a ceiling that itself decays over the day.

use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, Result, SimError};

/// Rate constants of the generalized model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Number of knowledge categories.
    pub n: usize,
    /// Exponent on total knowledge in the category-1 inflow.
    pub b: f64,
    /// `alpha[0]` scales the inflow into category 1; `alpha[i]` moves
    /// category `i - 1` into category `i`.
    pub alpha: Vec<f64>,
    /// Forgetting rates, strictly decreasing.
    pub gamma: Vec<f64>,
    /// Steepness of the fatigue sigmoid.
    pub k1: f64,
    /// Work at which workability is halved.
    #[serde(rename = "P0")]
    pub p0: f64,
    /// Work accumulation rate.
    pub k2: f64,
    /// Workability recovery rate during breaks.
    pub k3: f64,
    /// Decay rate of the daily workability ceiling.
    pub k4: f64,
}

impl ModelParams {
    /// Constants of the two-component school-day program.
    pub fn pr1() -> Self {
        Self {
            n: 2,
            b: 0.0,
            alpha: vec![0.06, 0.002],
            gamma: vec![0.001, 5e-5],
            k1: 0.03,
            p0: 200.0,
            k2: 0.2,
            k3: 0.015,
            k4: 2e-4,
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(Diagnostic::error("n", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.b) {
            out.push(Diagnostic::error("b", format!("must lie in [0, 1], got {}", self.b)));
        }
        if self.alpha.len() != self.n {
            out.push(Diagnostic::error(
                "alpha",
                format!(
                    "expected {} entries (one per category), got {}",
                    self.n,
                    self.alpha.len()
                ),
            ));
        }
        for (i, a) in self.alpha.iter().enumerate() {
            if !(a.is_finite() && *a > 0.0) {
                out.push(Diagnostic::error(
                    format!("alpha[{i}]"),
                    format!("must be > 0, got {a}"),
                ));
            }
        }
        if self.gamma.len() != self.n {
            out.push(Diagnostic::error(
                "gamma",
                format!(
                    "expected {} entries (one per category), got {}",
                    self.n,
                    self.gamma.len()
                ),
            ));
        }
        for (i, g) in self.gamma.iter().enumerate() {
            if !(g.is_finite() && *g > 0.0) {
                out.push(Diagnostic::error(
                    format!("gamma[{i}]"),
                    format!("must be > 0, got {g}"),
                ));
            }
        }
        for (i, pair) in self.gamma.windows(2).enumerate() {
            if pair[1] >= pair[0] {
                out.push(Diagnostic::error(
                    format!("gamma[{}]", i + 1),
                    format!(
                        "forgetting rates must be strictly decreasing (gamma[{i}] = {} > gamma[{}] = {} violated)",
                        pair[0],
                        i + 1,
                        pair[1]
                    ),
                ));
            }
        }
        for (name, value) in [("k1", self.k1), ("P0", self.p0), ("k2", self.k2), ("k3", self.k3)] {
            if !(value.is_finite() && value > 0.0) {
                out.push(Diagnostic::error(name, format!("must be > 0, got {value}")));
            }
        }
        if !(self.k4.is_finite() && self.k4 >= 0.0) {
            out.push(Diagnostic::error("k4", format!("must be >= 0, got {}", self.k4)));
        }
        out
    }
}

/// Instantaneous state of one student.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Absolute time since the start of the day.
    pub t: f64,
    /// Knowledge per category.
    pub z: Vec<f64>,
    /// Current workability.
    pub r: f64,
    /// Workability on entry to the current lesson.
    pub r0_base: f64,
    /// Work accumulated in the current lesson.
    pub p: f64,
}

impl SimState {
    /// A rested student at the start of the day.
    pub fn initial(z: Vec<f64>, r0: f64) -> Self {
        Self {
            t: 0.0,
            z,
            r: r0,
            r0_base: r0,
            p: 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        total_knowledge(&self.z)
    }

    pub fn validate(&self, n: usize) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.z.len() != n {
            out.push(Diagnostic::error(
                "Z",
                format!("expected {n} entries (one per category), got {}", self.z.len()),
            ));
        }
        for (i, z) in self.z.iter().enumerate() {
            if !(z.is_finite() && *z >= 0.0) {
                out.push(Diagnostic::error(format!("Z[{i}]"), format!("must be >= 0, got {z}")));
            }
        }
        if !(self.r0_base > 0.0 && self.r0_base <= 1.0) {
            out.push(Diagnostic::error(
                "r0",
                format!("must lie in (0, 1], got {}", self.r0_base),
            ));
        }
        if !(self.r >= 0.0 && self.r <= self.r0_base) {
            out.push(Diagnostic::error(
                "r",
                format!("must lie in [0, r0 = {}], got {}", self.r0_base, self.r),
            ));
        }
        if !(self.p.is_finite() && self.p >= 0.0) {
            out.push(Diagnostic::error("P", format!("must be >= 0, got {}", self.p)));
        }
        out
    }
}

/// How the student's effort during a lesson is determined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffortSpec {
    /// Fixed strain `F`, independent of knowledge.
    Constant(f64),
    /// Teacher requirement level `U`; effort is the gap `U - Z`.
    Requirement(f64),
}

impl EffortSpec {
    pub fn validate(&self) -> Vec<Diagnostic> {
        match *self {
            EffortSpec::Constant(f) if !(f.is_finite() && f > 0.0) => {
                vec![Diagnostic::error("F", format!("constant effort must be > 0, got {f}"))]
            }
            EffortSpec::Requirement(u) if !(u.is_finite() && u >= 0.0) => {
                vec![Diagnostic::error(
                    "U",
                    format!("requirement level must be >= 0, got {u}"),
                )]
            }
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentKind {
    Lesson { effort: EffortSpec, complexity: f64 },
    Break,
}

/// One contiguous phase of the day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration: f64,
}

impl Segment {
    pub fn lesson(duration: f64, effort: EffortSpec, complexity: f64) -> Self {
        Self {
            kind: SegmentKind::Lesson { effort, complexity },
            duration,
        }
    }

    pub fn rest(duration: f64) -> Self {
        Self {
            kind: SegmentKind::Break,
            duration,
        }
    }

    pub fn is_lesson(&self) -> bool {
        matches!(self.kind, SegmentKind::Lesson { .. })
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if !(self.duration.is_finite() && self.duration > 0.0) {
            out.push(Diagnostic::error(
                "duration",
                format!("must be > 0, got {}", self.duration),
            ));
        }
        if let SegmentKind::Lesson { effort, complexity } = self.kind {
            out.extend(effort.validate().into_iter().map(|d| d.under("effort")));
            if !(0.0..1.0).contains(&complexity) {
                out.push(Diagnostic::error(
                    "S",
                    format!("complexity must lie in [0, 1), got {complexity}"),
                ));
            }
        }
        out
    }
}

/// Effort for the given total knowledge. Requirement gaps are clamped at zero.
pub fn effort(spec: EffortSpec, z_total: f64) -> f64 {
    match spec {
        EffortSpec::Constant(f) => f,
        EffortSpec::Requirement(u) => (u - z_total).max(0.0),
    }
}

/// Workability after `p` units of work in a lesson entered with `r0_base`.
///
/// Saturates to zero for very large `p`; `exp` overflow yields `inf` and the
/// quotient collapses to `0.0`.
pub fn workability(r0_base: f64, p: f64, params: &ModelParams) -> f64 {
    r0_base / (1.0 + (params.k1 * (p - params.p0)).exp())
}

/// Rate of work accumulation. With no effort the student is on routine tasks
/// and work still accrues linearly in time.
pub(crate) fn work_rate(params: &ModelParams, f: f64, complexity: f64) -> f64 {
    if f > 0.0 {
        params.k2 * (1.0 + complexity) * f
    } else {
        params.k2
    }
}

/// Rate of change of category `i` (0-based).
///
/// `gain` is `r (1 - S)`. `source` is `F Z^b` for the first category and the
/// preceding category's knowledge otherwise.
#[inline]
pub(crate) fn category_rate(params: &ModelParams, i: usize, gain: f64, source: f64, z_i: f64) -> f64 {
    let inflow = params.alpha[i] * source;
    let outflow = if i + 1 < params.n {
        params.alpha[i + 1] * z_i
    } else {
        0.0
    };
    gain * (inflow - outflow) - params.gamma[i] * z_i
}

/// `Z^b` with `0^0 = 1`, so learning can start from nothing when `b = 0`.
#[inline]
pub(crate) fn knowledge_power(z_total: f64, b: f64) -> f64 {
    if b == 0.0 {
        1.0
    } else {
        z_total.powf(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LessonRates {
    pub dz: Vec<f64>,
    pub dp: f64,
}

/// Time derivatives of knowledge and work during a lesson.
///
/// Workability is taken as the algebraic function of `state.r0_base` and
/// `state.p`; `state.r` is not read.
pub fn lesson_derivatives(
    state: &SimState,
    effort_spec: EffortSpec,
    complexity: f64,
    params: &ModelParams,
) -> Result<LessonRates> {
    if !(0.0..1.0).contains(&complexity) {
        return Err(SimError::precondition(format!(
            "complexity S must lie in [0, 1), got {complexity}"
        )));
    }
    let mut dz = vec![0.0; params.n];
    let dp = lesson_rates_into(
        params,
        &state.z,
        state.r0_base,
        state.p,
        effort_spec,
        complexity,
        &mut dz,
    );
    Ok(LessonRates { dz, dp })
}

/// Allocation-free core of [`lesson_derivatives`]. Returns `dP/dt`.
pub(crate) fn lesson_rates_into(
    params: &ModelParams,
    z: &[f64],
    r0_base: f64,
    p: f64,
    effort_spec: EffortSpec,
    complexity: f64,
    dz: &mut [f64],
) -> f64 {
    let z_total = total_knowledge(z);
    let f = effort(effort_spec, z_total);
    let r = workability(r0_base, p, params);
    let gain = r * (1.0 - complexity);
    let mut source = f * knowledge_power(z_total, params.b);
    for i in 0..params.n {
        dz[i] = category_rate(params, i, gain, source, z[i]);
        source = z[i];
    }
    work_rate(params, f, complexity)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakRates {
    pub dz: Vec<f64>,
    pub dr: f64,
}

/// Time derivatives during a break: pure forgetting plus workability
/// recovery towards the ceiling `exp(-k4 t)` at absolute time `state.t`.
pub fn break_derivatives(state: &SimState, params: &ModelParams) -> BreakRates {
    let mut dz = vec![0.0; params.n];
    let dr = break_rates_into(params, state.t, &state.z, state.r, &mut dz);
    BreakRates { dz, dr }
}

pub(crate) fn break_rates_into(params: &ModelParams, t: f64, z: &[f64], r: f64, dz: &mut [f64]) -> f64 {
    for ((d, z), g) in dz.iter_mut().zip(z).zip(&params.gamma) {
        *d = -g * z;
    }
    params.k3 * (workability_ceiling(t, params) - r)
}

/// Daily ceiling on recovered workability.
pub fn workability_ceiling(t: f64, params: &ModelParams) -> f64 {
    (-params.k4 * t).exp()
}

pub fn total_knowledge(z: &[f64]) -> f64 {
    z.iter().sum()
}

/// Weighted share of durable knowledge, `(sum_{i>=2} Z_i / 2^(n-i)) / Z`.
///
/// Zero knowledge has strength 0. A single-category chain has strength 1.
pub fn strength_coefficient(z: &[f64]) -> f64 {
    let total = total_knowledge(z);
    if total <= 0.0 {
        return 0.0;
    }
    let n = z.len();
    if n == 1 {
        return 1.0;
    }
    let weighted: f64 = z
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, zi)| zi * 0.5f64.powi((n - 1 - i) as i32))
        .sum();
    (weighted / total).clamp(0.0, 1.0)
}

/// Forgetting rate for knowledge that shrinks by a factor `e` over `tau`.
pub fn gamma_from_tau(tau: f64) -> Result<f64> {
    if tau.is_finite() && tau > 0.0 {
        Ok(1.0 / tau)
    } else {
        Err(SimError::precondition(format!("tau must be > 0, got {tau}")))
    }
}
