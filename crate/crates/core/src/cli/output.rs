//! CSV and plain-text writers.

use std::io::{self, Write};

use crate::analysis::SweepResult;
use crate::Matrix8;

pub const COLUMNS: [&str; 13] = [
    "curve",
    "parameter",
    "ratio",
    "s_db",
    "s_db_min",
    "s_db_max",
    "var_xb",
    "stable",
    "method",
    "periods_used",
    "harmonics_used",
    "status",
    "message",
];

/// Shortest representation that parses back to the same `f64`. Plain
/// notation between 1e-4 and 1e15, exponent notation elsewhere.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `# key=value` header lines.
pub fn write_header<W: Write + ?Sized>(w: &mut W, header: &[(String, String)]) -> io::Result<()> {
    for (k, v) in header {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

/// Writes the header and one row per sweep record, curves in order.
pub fn write_sweeps<W: Write + ?Sized>(
    w: &mut W,
    header: &[(String, String)],
    curves: &[(&str, &SweepResult)],
) -> io::Result<()> {
    write_header(w, header)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(COLUMNS)?;
    for (label, sweep) in curves {
        for r in &sweep.records {
            let opt = |f: fn(&crate::analysis::SqueezingResult) -> f64| {
                r.squeezing
                    .as_ref()
                    .map(f)
                    .map(format_float)
                    .unwrap_or_default()
            };
            csv.write_record([
                label.to_string(),
                format_float(r.parameter),
                format_float(r.ratio),
                opt(|s| s.s_db),
                opt(|s| s.s_db_min),
                opt(|s| s.s_db_max),
                opt(|s| s.var_xb),
                r.stable.to_string(),
                r.method.name().to_string(),
                r.periods_used.to_string(),
                r.harmonics_used.to_string(),
                r.status.label().to_string(),
                r.status.message().unwrap_or_default().to_string(),
            ])?;
        }
    }
    csv.flush()
}

/// Plain-text grid of `m`, one row per line, preceded by `# name`.
pub fn write_matrix<W: Write + ?Sized>(w: &mut W, name: &str, m: &Matrix8) -> io::Result<()> {
    writeln!(w, "# {name}")?;
    for i in 0..8 {
        let row: Vec<String> = (0..8).map(|j| format_float(m[(i, j)])).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_formats() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1000.0), "1000");
        assert_eq!(format_float(1e-5), "1e-5");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(0.02), "0.02");
    }

    #[test]
    fn matrix_grid_has_eight_rows() {
        let mut buf = Vec::new();
        write_matrix(&mut buf, "I", &Matrix8::identity()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# I");
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[1], "1 0 0 0 0 0 0 0");
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
