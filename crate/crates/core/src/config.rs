//! JSON configuration documents.
//!
//! ```json
//! {
//!   "params": { "n": 2, "b": 0, "alpha": [0.06, 0.002], "gamma": [0.001, 5e-5],
//!               "k1": 0.03, "P0": 200, "k2": 0.2, "k3": 0.015, "k4": 0.0002 },
//!   "schedule": [
//!     { "kind": "lesson", "duration": 300, "effort": { "mode": "constant", "F": 3 }, "S": 0 },
//!     { "kind": "break", "duration": 100 }
//!   ],
//!   "initial": { "Z": [0, 0], "r0": 1 },
//!   "dt": 0.01,
//!   "method": "euler",
//!   "record_stride": 100
//! }
//! ```
//!
//! Unknown keys are rejected. Invariant violations are reported with the
//! field path and the line of the offending value.

use serde::{Deserialize, Serialize};

use crate::engine::{Method, SimConfig};
use crate::error::{Diagnostic, Result, SimError};
use crate::model::{EffortSpec, ModelParams, Segment, SegmentKind, SimState};
use crate::schedule::Schedule;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    params: ModelParams,
    schedule: Vec<SegmentDoc>,
    initial: InitialDoc,
    dt: f64,
    #[serde(default)]
    method: Method,
    #[serde(default = "default_stride")]
    record_stride: usize,
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SegmentKindDoc {
    Lesson,
    Break,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentDoc {
    kind: SegmentKindDoc,
    duration: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    effort: Option<EffortDoc>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    complexity: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
enum EffortDoc {
    Constant {
        #[serde(rename = "F")]
        f: f64,
    },
    Requirement {
        #[serde(rename = "U")]
        u: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialDoc {
    #[serde(rename = "Z")]
    z: Vec<f64>,
    r0: f64,
}

impl From<EffortDoc> for EffortSpec {
    fn from(doc: EffortDoc) -> Self {
        match doc {
            EffortDoc::Constant { f } => EffortSpec::Constant(f),
            EffortDoc::Requirement { u } => EffortSpec::Requirement(u),
        }
    }
}

impl From<EffortSpec> for EffortDoc {
    fn from(spec: EffortSpec) -> Self {
        match spec {
            EffortSpec::Constant(f) => EffortDoc::Constant { f },
            EffortSpec::Requirement(u) => EffortDoc::Requirement { u },
        }
    }
}

impl ConfigDocument {
    fn into_config(self) -> (SimConfig, Vec<Diagnostic>) {
        let mut diags = Vec::new();
        let segments = self
            .schedule
            .into_iter()
            .enumerate()
            .map(|(i, doc)| {
                let path = format!("schedule[{i}]");
                match doc.kind {
                    SegmentKindDoc::Lesson => {
                        let effort = match doc.effort {
                            Some(e) => e.into(),
                            None => {
                                diags.push(Diagnostic::error(format!("{path}.effort"), "a lesson needs an effort"));
                                EffortSpec::Constant(1.0)
                            }
                        };
                        Segment::lesson(doc.duration, effort, doc.complexity.unwrap_or(0.0))
                    }
                    SegmentKindDoc::Break => {
                        if doc.effort.is_some() {
                            diags.push(Diagnostic::error(format!("{path}.effort"), "breaks carry no effort"));
                        }
                        if doc.complexity.is_some() {
                            diags.push(Diagnostic::error(format!("{path}.S"), "breaks carry no complexity"));
                        }
                        Segment::rest(doc.duration)
                    }
                }
            })
            .collect();
        let config = SimConfig {
            params: self.params,
            schedule: Schedule::new(segments),
            initial: SimState::initial(self.initial.z, self.initial.r0),
            dt: self.dt,
            method: self.method,
            record_stride: self.record_stride,
        };
        (config, diags)
    }

    fn from_config(config: &SimConfig) -> Self {
        let schedule = config
            .schedule
            .segments
            .iter()
            .map(|seg| match seg.kind {
                SegmentKind::Lesson { effort, complexity } => SegmentDoc {
                    kind: SegmentKindDoc::Lesson,
                    duration: seg.duration,
                    effort: Some(effort.into()),
                    complexity: Some(complexity),
                },
                SegmentKind::Break => SegmentDoc {
                    kind: SegmentKindDoc::Break,
                    duration: seg.duration,
                    effort: None,
                    complexity: None,
                },
            })
            .collect();
        Self {
            params: config.params.clone(),
            schedule,
            initial: InitialDoc {
                z: config.initial.z.clone(),
                r0: config.initial.r0_base,
            },
            dt: config.dt,
            method: config.method,
            record_stride: config.record_stride,
        }
    }
}

/// Parses and validates a configuration, returning it with any warnings.
pub fn parse_config_with_warnings(text: &str) -> Result<(SimConfig, Vec<Diagnostic>)> {
    let doc: ConfigDocument = serde_json::from_str(text).map_err(syntax_error)?;
    let (config, mut diags) = doc.into_config();
    diags.extend(config.validate());
    for d in &mut diags {
        d.line = locate_line(text, &d.path);
    }
    let (errors, warnings): (Vec<_>, Vec<_>) = diags.into_iter().partition(Diagnostic::is_error);
    if errors.is_empty() {
        Ok((config, warnings))
    } else {
        Err(SimError::Invalid(errors))
    }
}

pub fn parse_config(text: &str) -> Result<SimConfig> {
    parse_config_with_warnings(text).map(|(config, _)| config)
}

/// Pretty-printed JSON. Floats use shortest round-trip notation, so
/// `parse_config(&serialize_config(c))` reproduces `c` exactly.
pub fn serialize_config(config: &SimConfig) -> String {
    let mut text = serde_json::to_string_pretty(&ConfigDocument::from_config(config))
        .expect("configuration documents always serialize");
    text.push('\n');
    text
}

fn syntax_error(err: serde_json::Error) -> SimError {
    let full = err.to_string();
    let mut message = match full.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => full,
    };
    if let Some(hint) = unknown_field_hint(&message) {
        message.push_str(&format!(" (did you mean `{hint}`?)"));
    }
    SimError::Syntax {
        line: err.line(),
        column: err.column(),
        message,
    }
}

/// Suggests a replacement for an unknown key named in a serde message of the
/// form "unknown field `x`, expected one of `a`, `b`".
fn unknown_field_hint(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field ")?;
    let mut quoted = rest.split('`').skip(1).step_by(2);
    let field = quoted.next()?;
    let expected: Vec<&str> = quoted.collect();
    let alias = match field {
        "beta" => Some("b"),
        "tau" | "tau1" => Some("gamma"),
        "p0" => Some("P0"),
        _ => None,
    };
    if let Some(a) = alias.filter(|a| expected.contains(a)) {
        return Some(a.to_string());
    }
    expected
        .iter()
        .map(|cand| (edit_distance(&field.to_lowercase(), &cand.to_lowercase()), *cand))
        .filter(|(d, _)| *d <= 2)
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c.to_string())
}

fn edit_distance(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != *cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

#[derive(Debug, PartialEq)]
enum PathSeg {
    Key(String),
    Index(usize),
}

fn split_path(path: &str) -> Option<Vec<PathSeg>> {
    let mut segs = Vec::new();
    for part in path.split('.').filter(|p| !p.is_empty()) {
        let (key, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if !key.is_empty() {
            segs.push(PathSeg::Key(key.to_string()));
        }
        while let Some(stripped) = rest.strip_prefix('[') {
            let close = stripped.find(']')?;
            segs.push(PathSeg::Index(stripped[..close].parse().ok()?));
            rest = &stripped[close + 1..];
        }
    }
    Some(segs)
}

/// Line of the value at `path`, or of its nearest enclosing value.
fn locate_line(text: &str, path: &str) -> Option<usize> {
    let mut segs = split_path(path)?;
    loop {
        if let Some(offset) = value_offset(text.as_bytes(), &segs) {
            return Some(text[..offset].matches('\n').count() + 1);
        }
        segs.pop()?;
    }
}

/// Byte offset of the value reached by following `segs` through a
/// well-formed JSON document.
fn value_offset(s: &[u8], segs: &[PathSeg]) -> Option<usize> {
    let mut pos = skip_ws(s, 0);
    for seg in segs {
        match seg {
            PathSeg::Key(key) => {
                if s.get(pos) != Some(&b'{') {
                    return None;
                }
                pos = skip_ws(s, pos + 1);
                loop {
                    if s.get(pos) != Some(&b'"') {
                        return None;
                    }
                    let end = skip_string(s, pos)?;
                    let name = &s[pos + 1..end - 1];
                    pos = skip_ws(s, end);
                    if s.get(pos) != Some(&b':') {
                        return None;
                    }
                    pos = skip_ws(s, pos + 1);
                    if name == key.as_bytes() {
                        break;
                    }
                    pos = skip_ws(s, skip_value(s, pos)?);
                    match s.get(pos) {
                        Some(b',') => pos = skip_ws(s, pos + 1),
                        _ => return None,
                    }
                }
            }
            PathSeg::Index(index) => {
                if s.get(pos) != Some(&b'[') {
                    return None;
                }
                pos = skip_ws(s, pos + 1);
                for _ in 0..*index {
                    pos = skip_ws(s, skip_value(s, pos)?);
                    match s.get(pos) {
                        Some(b',') => pos = skip_ws(s, pos + 1),
                        _ => return None,
                    }
                }
                if s.get(pos) == Some(&b']') {
                    return None;
                }
            }
        }
    }
    Some(pos)
}

fn skip_ws(s: &[u8], mut pos: usize) -> usize {
    while pos < s.len() && s[pos].is_ascii_whitespace() {
        pos += 1;
    }
    pos
}

/// `pos` is at an opening quote; returns the offset past the closing quote.
fn skip_string(s: &[u8], mut pos: usize) -> Option<usize> {
    pos += 1;
    while pos < s.len() {
        match s[pos] {
            b'\\' => pos += 2,
            b'"' => return Some(pos + 1),
            _ => pos += 1,
        }
    }
    None
}

fn skip_value(s: &[u8], mut pos: usize) -> Option<usize> {
    match *s.get(pos)? {
        b'"' => skip_string(s, pos),
        b'{' | b'[' => {
            let mut depth = 0usize;
            while pos < s.len() {
                match s[pos] {
                    b'"' => {
                        pos = skip_string(s, pos)?;
                        continue;
                    }
                    b'{' | b'[' => depth += 1,
                    b'}' | b']' => {
                        depth -= 1;
                        if depth == 0 {
                            return Some(pos + 1);
                        }
                    }
                    _ => {}
                }
                pos += 1;
            }
            None
        }
        _ => {
            while pos < s.len() && !matches!(s[pos], b',' | b'}' | b']') && !s[pos].is_ascii_whitespace() {
                pos += 1;
            }
            Some(pos)
        }
    }
}
