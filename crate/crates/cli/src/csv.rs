//! Time-series CSV: fixed header, `{:.9e}` values, LF line endings.

use dualpol_core::propagation::TimeSeries;

use crate::CliError;

pub const HEADER: [&str; 9] = [
    "tau_us",
    "Ea_abs",
    "Eb_abs",
    "rho_cb_abs",
    "rho_ce_abs",
    "env_omega",
    "env_omega1",
    "env_omega2",
    "env_omega3",
];

/// One CSV row in file units (τ in µs, fields in V/m).
pub type Row = [f64; 9];

pub fn rows(ts: &TimeSeries) -> Vec<Row> {
    (0..ts.len())
        .map(|k| {
            [
                ts.tau[k] * 1e6,
                ts.ea[k],
                ts.eb[k],
                ts.rho_cb[k],
                ts.rho_ce[k],
                ts.env[0][k],
                ts.env[1][k],
                ts.env[2][k],
                ts.env[3][k],
            ]
        })
        .collect()
}

pub fn write(rows: &[Row]) -> String {
    let mut out = String::with_capacity(HEADER.join(",").len() + 1 + rows.len() * 9 * 17);
    out.push_str(&HEADER.join(","));
    out.push('\n');
    for r in rows {
        for (i, v) in r.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{v:.9e}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<Vec<Row>, CliError> {
    let mut lines = text.split('\n');
    let head = lines.next().unwrap_or_default();
    if head != HEADER.join(",") {
        return Err(CliError::Validation(format!("csv: unexpected header '{head}'")));
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut row = [0.0; 9];
        let mut count = 0;
        for (i, cell) in line.split(',').enumerate() {
            if i >= 9 {
                count = i + 1;
                break;
            }
            row[i] = cell
                .parse()
                .map_err(|_| CliError::Validation(format!("csv line {}: bad number '{cell}'", n + 2)))?;
            count = i + 1;
        }
        if count != 9 {
            return Err(CliError::Validation(format!("csv line {}: expected 9 columns", n + 2)));
        }
        out.push(row);
    }
    Ok(out)
}

/// Rounds `x` to the precision stored in the file.
pub fn stored(x: f64) -> f64 {
    format!("{x:.9e}").parse().expect("formatted float parses")
}
