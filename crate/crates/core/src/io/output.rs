//! Curve tables and structured summaries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::PushoverRecord;

pub const CURVE_HEADER: &str = "step,load_kN,girder_defl_mm,deck_defl_mm,residual";

/// Formats a value with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = 5 - exp;
    if (0..=12).contains(&decimals) {
        let s = format!("{x:.*}", decimals as usize);
        // Rounding can carry into a new digit (9.999995 -> 10.00000); drop the extra one.
        if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > 6 && decimals > 0 {
            return format!("{x:.*}", decimals as usize - 1);
        }
        s
    } else {
        format!("{x:.5e}")
    }
}

/// One row per record point, in record order.
pub fn curve_csv(record: &PushoverRecord) -> String {
    let mut out = String::with_capacity(64 * (record.points.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for p in &record.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.step,
            sig6(p.load),
            sig6(p.girder_deflection),
            sig6(p.deck_deflection),
            sig6(p.residual)
        ));
    }
    out
}

/// Reads a curve table back as `[step, load, girder, deck, residual]` rows.
pub fn parse_curve_csv(text: &str) -> Result<Vec<[f64; 5]>> {
    let mut lines = text.lines();
    if lines.next() != Some(CURVE_HEADER) {
        return Err(Error::InvalidInput("curve table header does not match".into()));
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let v: Vec<f64> = l
                .split(',')
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidInput(format!("curve row {}: {e}", i + 1)))?;
            <[f64; 5]>::try_from(v).map_err(|_| Error::InvalidInput(format!("curve row {} needs 5 columns", i + 1)))
        })
        .collect()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{RecordPoint, StopCause};
    use proptest::prelude::*;

    #[test]
    fn six_digits() {
        assert_eq!(sig6(1234.5678), "1234.57");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(-2.5), "-2.50000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(9.999999), "10.0000");
        assert_eq!(sig6(1.5e9), "1.50000e9");
    }

    #[test]
    fn table_layout() {
        let r = PushoverRecord {
            points: vec![
                RecordPoint { step: 0, load: 0.0, girder_deflection: 0.0, deck_deflection: 0.0, residual: 0.0, iterations: 0 },
                RecordPoint { step: 1, load: 100.0, girder_deflection: 1.25, deck_deflection: 2.5, residual: 1e-4, iterations: 1 },
            ],
            events: vec![],
            stop: Some(StopCause::TargetReached),
        };
        let t = curve_csv(&r);
        assert_eq!(t, format!("{CURVE_HEADER}\n0,0,0,0,0\n1,100.000,1.25000,2.50000,0.000100000\n"));
        let rows = parse_curve_csv(&t).unwrap();
        assert_eq!(rows[1], [1.0, 100.0, 1.25, 2.5, 1e-4]);
    }

    proptest! {
        #[test]
        fn parse_back_within_precision(x in -1e7f64..1e7) {
            let y: f64 = sig6(x).parse().unwrap();
            prop_assert!((x - y).abs() <= 5e-6 * x.abs() + 1e-300);
        }
    }
}
