//! Canned studies: the two-component school day, break-length and parameter
//! sweeps, and a grid search for the requirement level that best serves the
//! student (the "coordinated" regime, operationalized as a constant `U`).
//!
//! Scenarios are independent and evaluated in parallel; results always come
//! back in input order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::engine::{run, Method, SimConfig, Trajectory};
use crate::error::{Diagnostic, Result, SimError};
use crate::model::{EffortSpec, ModelParams, SegmentKind, SimState};
use crate::schedule::Schedule;

/// Complexity of each of the five lessons in the two-component program.
pub const PR1_COMPLEXITY: [f64; 5] = [0.0, 0.0, 0.2, 0.3, 0.4];

/// Configuration of the two-component school-day program: five 300-unit
/// lessons at constant strain `F = 3`, 100-unit breaks, `dt = 0.01`.
pub fn pr1_config() -> SimConfig {
    let schedule = Schedule::uniform_day(5, 300.0, 100.0, &[EffortSpec::Constant(3.0); 5], &PR1_COMPLEXITY)
        .expect("static schedule is well formed");
    SimConfig {
        params: ModelParams::pr1(),
        schedule,
        initial: SimState::initial(vec![0.0, 0.0], 1.0),
        dt: 0.01,
        method: Method::Euler,
        record_stride: 100,
    }
}

pub fn replicate_pr1() -> Trajectory {
    run(&pr1_config()).expect("built-in configuration is valid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalMetrics {
    pub z_total: f64,
    pub pr: f64,
    pub mean_lesson_r: f64,
}

impl TerminalMetrics {
    pub fn of(traj: &Trajectory) -> Self {
        let last = traj.last();
        Self {
            z_total: last.z_total,
            pr: last.pr,
            mean_lesson_r: traj.mean_lesson_workability(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    /// The swept value (or requirement level, or break length).
    pub value: f64,
    pub outcome: Result<TerminalMetrics, Vec<Diagnostic>>,
    pub trajectory: Option<Trajectory>,
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    pub label: String,
    pub scenarios: Vec<Scenario>,
}

impl StudyResult {
    /// CSV summary, one line per scenario.
    pub fn to_table(&self) -> String {
        let mut out = format!("{},Z,Pr,mean_r,status\n", self.label);
        for s in &self.scenarios {
            match &s.outcome {
                Ok(m) => out.push_str(&format!(
                    "{},{},{},{},ok\n",
                    crate::csv::format_g17(s.value),
                    crate::csv::format_g17(m.z_total),
                    crate::csv::format_g17(m.pr),
                    crate::csv::format_g17(m.mean_lesson_r)
                )),
                Err(diags) => {
                    let msg = diags
                        .iter()
                        .map(|d| format!("{}: {}", d.path, d.message))
                        .collect::<Vec<_>>()
                        .join("; ");
                    out.push_str(&format!(
                        "{},,,,\"invalid: {}\"\n",
                        crate::csv::format_g17(s.value),
                        msg.replace('"', "\"\"")
                    ));
                }
            }
        }
        out
    }
}

/// Runs labelled configurations in parallel, keeping input order.
pub fn run_scenarios(label: &str, configs: Vec<(f64, SimConfig)>, retain: bool) -> StudyResult {
    let scenarios = configs
        .into_par_iter()
        .map(|(value, cfg)| match run(&cfg) {
            Ok(traj) => Scenario {
                value,
                outcome: Ok(TerminalMetrics::of(&traj)),
                trajectory: retain.then_some(traj),
            },
            Err(SimError::Invalid(diags)) => Scenario {
                value,
                outcome: Err(diags),
                trajectory: None,
            },
            Err(other) => Scenario {
                value,
                outcome: Err(vec![Diagnostic::error("", other.to_string())]),
                trajectory: None,
            },
        })
        .collect();
    StudyResult {
        label: label.to_string(),
        scenarios,
    }
}

/// Lessons of a uniform day: equal lessons alternating with equal breaks.
struct UniformDay {
    lesson_len: f64,
    efforts: Vec<EffortSpec>,
    complexities: Vec<f64>,
}

fn as_uniform_day(schedule: &Schedule) -> Result<UniformDay> {
    let segs = &schedule.segments;
    let not_uniform = || SimError::precondition("base schedule is not a uniform day of alternating lessons and breaks");
    if segs.is_empty() || segs.len().is_multiple_of(2) {
        return Err(not_uniform());
    }
    let lesson_len = segs[0].duration;
    let mut efforts = Vec::new();
    let mut complexities = Vec::new();
    for (i, seg) in segs.iter().enumerate() {
        match (i % 2, seg.kind) {
            (0, SegmentKind::Lesson { effort, complexity }) if seg.duration == lesson_len => {
                efforts.push(effort);
                complexities.push(complexity);
            }
            (1, SegmentKind::Break) if seg.duration == segs[1].duration => {}
            _ => return Err(not_uniform()),
        }
    }
    Ok(UniformDay {
        lesson_len,
        efforts,
        complexities,
    })
}

/// Terminal metrics of the base day rebuilt with each break length.
pub fn break_length_study(base: &SimConfig, tp_values: &[f64]) -> Result<StudyResult> {
    let day = as_uniform_day(&base.schedule)?;
    let configs = tp_values
        .iter()
        .map(|&tp| {
            if !(tp.is_finite() && tp > 0.0) {
                return Err(SimError::precondition(format!("break length must be > 0, got {tp}")));
            }
            let schedule =
                Schedule::uniform_day(day.efforts.len(), day.lesson_len, tp, &day.efforts, &day.complexities)?;
            if schedule.step_counts(base.dt).is_none() {
                return Err(SimError::precondition(format!(
                    "break length {tp} is not a whole number of steps of {}",
                    base.dt
                )));
            }
            Ok((
                tp,
                SimConfig {
                    schedule,
                    ..base.clone()
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(run_scenarios("Tp", configs, false))
}

/// A scalar knob of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPath {
    B,
    K1,
    P0,
    K2,
    K3,
    K4,
    Dt,
    /// 1-based category index.
    Alpha(usize),
    /// 1-based category index.
    Gamma(usize),
}

impl FromStr for ParamPath {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || SimError::UnknownParameter(s.to_string());
        let indexed = |rest: &str| rest.parse::<usize>().ok().filter(|&i| i >= 1).ok_or_else(unknown);
        Ok(match s {
            "b" => ParamPath::B,
            "k1" => ParamPath::K1,
            "P0" => ParamPath::P0,
            "k2" => ParamPath::K2,
            "k3" => ParamPath::K3,
            "k4" => ParamPath::K4,
            "dt" => ParamPath::Dt,
            _ => {
                if let Some(rest) = s.strip_prefix("alpha") {
                    ParamPath::Alpha(indexed(rest)?)
                } else if let Some(rest) = s.strip_prefix("gamma") {
                    ParamPath::Gamma(indexed(rest)?)
                } else {
                    return Err(unknown());
                }
            }
        })
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamPath::B => f.write_str("b"),
            ParamPath::K1 => f.write_str("k1"),
            ParamPath::P0 => f.write_str("P0"),
            ParamPath::K2 => f.write_str("k2"),
            ParamPath::K3 => f.write_str("k3"),
            ParamPath::K4 => f.write_str("k4"),
            ParamPath::Dt => f.write_str("dt"),
            ParamPath::Alpha(i) => write!(f, "alpha{i}"),
            ParamPath::Gamma(i) => write!(f, "gamma{i}"),
        }
    }
}

impl ParamPath {
    /// Resolves a textual path against a model with `n` categories.
    pub fn resolve(path: &str, n: usize) -> Result<Self> {
        let parsed: ParamPath = path.parse()?;
        match parsed {
            ParamPath::Alpha(i) | ParamPath::Gamma(i) if i > n => Err(SimError::UnknownParameter(path.to_string())),
            p => Ok(p),
        }
    }

    pub fn apply(&self, cfg: &mut SimConfig, value: f64) {
        let p = &mut cfg.params;
        match *self {
            ParamPath::B => p.b = value,
            ParamPath::K1 => p.k1 = value,
            ParamPath::P0 => p.p0 = value,
            ParamPath::K2 => p.k2 = value,
            ParamPath::K3 => p.k3 = value,
            ParamPath::K4 => p.k4 = value,
            ParamPath::Dt => cfg.dt = value,
            ParamPath::Alpha(i) => p.alpha[i - 1] = value,
            ParamPath::Gamma(i) => p.gamma[i - 1] = value,
        }
    }
}

/// One run per value of the named parameter. Values that break a model
/// invariant yield a diagnostic row instead of failing the whole sweep.
pub fn parameter_sweep(base: &SimConfig, param_path: &str, values: &[f64]) -> Result<StudyResult> {
    let path = ParamPath::resolve(param_path, base.params.n)?;
    let configs = values
        .iter()
        .map(|&v| {
            let mut cfg = base.clone();
            path.apply(&mut cfg, v);
            (v, cfg)
        })
        .collect();
    Ok(run_scenarios(&path.to_string(), configs, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    TerminalZ,
    TerminalPr,
}

impl Objective {
    fn score(self, m: &TerminalMetrics) -> f64 {
        match self {
            Objective::TerminalZ => m.z_total,
            Objective::TerminalPr => m.pr,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UOptimum {
    pub u_star: f64,
    pub value: f64,
    /// Every `(U, objective)` evaluation, in grid order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Every lesson of `base` switched to a constant requirement level `u`.
pub fn with_requirement(base: &SimConfig, u: f64) -> SimConfig {
    let mut cfg = base.clone();
    for seg in &mut cfg.schedule.segments {
        if let SegmentKind::Lesson { effort, .. } = &mut seg.kind {
            *effort = EffortSpec::Requirement(u);
        }
    }
    cfg
}

/// Grid search over a constant requirement level on `grid` evenly spaced
/// points of `[u_min, u_max]`, endpoints included. Ties go to the smallest U.
pub fn optimize_constant_u(
    base: &SimConfig,
    u_min: f64,
    u_max: f64,
    grid: usize,
    objective: Objective,
) -> Result<UOptimum> {
    if !(u_min.is_finite() && u_max.is_finite() && u_min >= 0.0 && u_min < u_max) {
        return Err(SimError::precondition(format!(
            "requirement range must satisfy 0 <= min < max, got [{u_min}, {u_max}]"
        )));
    }
    if grid < 2 {
        return Err(SimError::precondition(format!(
            "grid needs at least 2 points, got {grid}"
        )));
    }
    let step = (u_max - u_min) / (grid - 1) as f64;
    let points: Vec<f64> = (0..grid)
        .map(|i| if i + 1 == grid { u_max } else { u_min + i as f64 * step })
        .collect();
    let evaluations = points
        .par_iter()
        .map(|&u| {
            let traj = run(&with_requirement(base, u))?;
            Ok((u, objective.score(&TerminalMetrics::of(&traj))))
        })
        .collect::<Result<Vec<_>>>()?;
    let (u_star, value) = evaluations
        .iter()
        .copied()
        .reduce(|best, cand| if cand.1 > best.1 { cand } else { best })
        .expect("grid has at least two points");
    Ok(UOptimum {
        u_star,
        value,
        evaluations,
    })
}
