//! Static SVG line charts of trajectory channels.
//!
//! The layout copies the original program's screen plot: a 640x480 canvas
//! with the baseline at `y = 470`, time mapped to `x = 10 + t / Mt` and each
//! channel mapped to `y = 470 - scale * value`.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::engine::Trajectory;
use crate::error::{Result, SimError};

pub const WIDTH: u32 = 640;
pub const HEIGHT: u32 = 480;
const BASELINE: f64 = 470.0;
const LEFT: f64 = 10.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Pixel scales. `time_per_px` is the listing's `Mt`; channel scales are
/// pixels per unit of value.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotScales {
    pub time_per_px: f64,
    pub channel: BTreeMap<String, f64>,
}

impl Default for PlotScales {
    fn default() -> Self {
        Self {
            time_per_px: 5.0,
            channel: BTreeMap::new(),
        }
    }
}

impl PlotScales {
    /// Explicit override, or the listing's hints: `Mz = 4` for knowledge,
    /// `Mr = 200` for workability, `1.2` for work.
    pub fn scale_for(&self, name: &str) -> f64 {
        if let Some(&s) = self.channel.get(name) {
            return s;
        }
        match name {
            "r" | "Pr" => 200.0,
            "P" => 1.2,
            "segment" => 10.0,
            "t" => 1.0 / self.time_per_px,
            _ => 4.0,
        }
    }
}

fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

/// One polyline per requested channel over the time axis.
pub fn render_svg(traj: &Trajectory, channels: &[&str], scales: &PlotScales) -> Result<String> {
    let times = traj.channel("t").expect("time channel always exists");
    let series = channels
        .iter()
        .map(|&name| {
            traj.channel(name)
                .map(|values| (name, values))
                .ok_or_else(|| SimError::UnknownChannel(name.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // axes and time ticks every 100 units
    let _ = writeln!(svg, r#"<g id="axes" stroke="black" stroke-width="1" fill="none">"#);
    let _ = writeln!(svg, r#"<line x1="0" y1="{BASELINE}" x2="{WIDTH}" y2="{BASELINE}"/>"#);
    let _ = writeln!(svg, r#"<line x1="{LEFT}" y1="0" x2="{LEFT}" y2="{HEIGHT}"/>"#);
    let t_end = times.last().copied().unwrap_or(0.0);
    let mut tick = 0.0;
    while tick <= t_end {
        let x = LEFT + tick / scales.time_per_px;
        if x > f64::from(WIDTH) {
            break;
        }
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{BASELINE}" x2="{0}" y2="{1}"/>"#,
            px(x),
            BASELINE + 4.0
        );
        tick += 100.0;
    }
    let _ = writeln!(svg, "</g>");

    for (k, (name, values)) in series.iter().enumerate() {
        let scale = scales.scale_for(name);
        let color = PALETTE[k % PALETTE.len()];
        let mut points: Vec<String> = Vec::with_capacity(values.len());
        let mut last = String::new();
        for (t, v) in times.iter().zip(values) {
            let p = format!("{},{}", px(LEFT + t / scales.time_per_px), px(BASELINE - scale * v));
            if p != last {
                points.push(p.clone());
                last = p;
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline id="{name}" fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{name} (x{})</text>"#,
            WIDTH - 110,
            20 + 16 * k,
            scale
        );
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
