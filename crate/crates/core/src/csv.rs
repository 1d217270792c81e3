//! CSV output of trajectories.

use std::io::Write;

use crate::engine::Trajectory;
use crate::error::Result;

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// fixed notation for decimal exponents in `[-4, 17)`. Every `f64` survives a
/// round trip through this text.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `t,Z1..Zn,Z,r,P,F,Pr,segment` with one line per recorded row and
/// LF line endings. Returns the number of bytes written.
pub fn write_csv<W: Write>(traj: &Trajectory, mut out: W) -> Result<usize> {
    let mut buf = String::with_capacity(traj.rows.len() * 160);
    buf.push_str(&traj.channel_names().join(","));
    buf.push('\n');
    for row in &traj.rows {
        buf.push_str(&format_g17(row.t));
        for z in &row.z {
            buf.push(',');
            buf.push_str(&format_g17(*z));
        }
        for v in [row.z_total, row.r, row.p, row.f, row.pr] {
            buf.push(',');
            buf.push_str(&format_g17(v));
        }
        buf.push(',');
        buf.push_str(&row.segment.to_string());
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    out.flush()?;
    Ok(buf.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::experiments::pr1_config;
    use proptest::prelude::*;

    #[test]
    fn g17_matches_printf() {
        // reference strings from Python's "%.17g"
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1900.0), "1900");
        assert_eq!(format_g17(33.51324246223489), "33.513242462234892");
        assert_eq!(format_g17(5e-5), "5.0000000000000002e-05");
        assert_eq!(format_g17(1e17), "1e+17");
        assert_eq!(format_g17(0.0001), "0.0001");
        assert_eq!(format_g17(-2.5), "-2.5");
        assert_eq!(format_g17(0.0), "0");
    }

    proptest! {
        #[test]
        fn g17_round_trips(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let back: f64 = format_g17(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_layout() {
        let mut cfg = pr1_config();
        cfg.record_stride = 1000;
        let traj = run(&cfg).unwrap();
        let mut bytes = Vec::new();
        let written = write_csv(&traj, &mut bytes).unwrap();
        assert_eq!(written, bytes.len());
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 192);
        assert_eq!(lines[0], "t,Z1,Z2,Z,r,P,F,Pr,segment");
        assert!(lines[1].starts_with("0,0,0,0,1,0,3,0,0"));
        assert!(lines[191].starts_with("1900,"));
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }
}
