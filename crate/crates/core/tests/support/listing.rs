//! Statement-for-statement transcription of the two-component Pascal program
//! (PR-1). It shares no code with the library and serves as the reference the
//! engine is checked against. Plotting is replaced by sampling every `stride`
//! iterations, and the loop ends after `steps` iterations rather than on a
//! key press.

#![allow(dead_code, non_snake_case, unused_assignments, clippy::assign_op_pattern)]

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ListingSample {
    pub step: usize,
    pub t: f64,
    pub Z1: f64,
    pub Z2: f64,
    pub r: f64,
    pub P: f64,
    pub lesson: bool,
}

pub fn run_listing(steps: usize, stride: usize) -> Vec<ListingSample> {
    const A1: f64 = 0.06;
    const A2: f64 = 0.002;
    const G1: f64 = 0.001;
    const G2: f64 = 5E-5;
    const DT: f64 = 0.01;
    const TU: f64 = 300.0;
    const TP: f64 = 100.0;

    // Pascal globals start zeroed.
    let (mut o, mut z1, mut z2, mut s, mut p, mut t, mut r) = (0, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let f = 3.0;
    let mut r0 = 1.0;
    let mut z;
    let mut out = vec![ListingSample {
        step: 0,
        t,
        Z1: z1,
        Z2: z2,
        r: r0,
        P: p,
        lesson: true,
    }];
    for k in 1..=steps {
        t = t + DT;
        if t < TU {
            o = 1;
        }
        if t > TU {
            o = 0;
        }
        if t > TU + TP {
            o = 1;
            s = 0.0;
        }
        if t > 2.0 * TU + TP {
            o = 0;
        }
        if t > 2.0 * TU + 2.0 * TP {
            o = 1;
            s = 0.2;
        }
        if t > 3.0 * TU + 2.0 * TP {
            o = 0;
        }
        if t > 3.0 * TU + 3.0 * TP {
            o = 1;
            s = 0.3;
        }
        if t > 4.0 * TU + 3.0 * TP {
            o = 0;
        }
        if t > 4.0 * TU + 4.0 * TP {
            o = 1;
            s = 0.4;
        }
        if t > 5.0 * TU + 4.0 * TP {
            o = 0;
        }
        z = z1 + z2;
        let _ = z;
        if o == 1 {
            p = p + 0.2 * (1.0 + s) * f * DT;
            r = r0 / (1.0 + (0.03 * (p - 200.0)).exp());
            z1 = z1 + r * (1.0 - s) * (A1 * f - A2 * z1) * DT - G1 * z1 * DT;
            z2 = z2 + A2 * r * (1.0 - s) * z1 * DT - G2 * z2 * DT;
        } else {
            p = 0.0;
            r = r + 0.015 * ((-2E-4 * t).exp() - r) * DT;
            z1 = z1 - G1 * z1 * DT;
            z2 = z2 - G2 * z2 * DT;
            r0 = r;
        }
        if k % stride == 0 {
            out.push(ListingSample {
                step: k,
                t,
                Z1: z1,
                Z2: z2,
                r,
                P: p,
                lesson: o == 1,
            });
        }
    }
    out
}

/// Relative difference with an absolute floor for values that are exactly zero.
pub fn rel_err(actual: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        actual.abs()
    } else {
        ((actual - expected) / expected).abs()
    }
}
