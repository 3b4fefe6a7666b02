//! Plain CSV emission. Floats carry 17 significant digits so they round-trip.

use std::fmt::Write as _;

use super::config::SweepAxis;
use super::sweep::SweepRow;
use super::validation::PropertyOutcome;

/// Written in place of a bound whose denominator is not positive.
pub const INVALID: &str = "INVALID";

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_value(axis: SweepAxis, v: f64) -> String {
    if axis.is_integer() {
        format!("{}", v as u64)
    } else {
        format_float(v)
    }
}

/// `axis,value,upper_bound,achievable,statuses_evaluated`; an absent
/// achievable value is left empty.
pub fn sweep_csv(axis: SweepAxis, rows: &[SweepRow]) -> String {
    let mut out = String::from("axis,value,upper_bound,achievable,statuses_evaluated\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            axis.name(),
            format_value(axis, r.value),
            r.upper_bound
                .map_or_else(|| INVALID.to_string(), format_float),
            r.achievable.map(format_float).unwrap_or_default(),
            r.statuses_evaluated
        );
    }
    out
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// `property,status,cases,worst,counterexample`.
pub fn validation_csv(report: &[PropertyOutcome]) -> String {
    let mut out = String::from("property,status,cases,worst,counterexample\n");
    for o in report {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            o.property.name(),
            if o.passed { "PASS" } else { "FAIL" },
            o.cases,
            format_float(o.worst),
            quote(o.counterexample.as_deref().unwrap_or(""))
        );
    }
    out
}
