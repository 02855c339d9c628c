use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::sweep::SweepResult;

pub const HEADER: &str = "sweep_var,sweep_value,protocol,mean_delay_s,std_delay_s,trials,infeasible";

/// Formats like C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One summary line of the CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub sweep_var: String,
    pub sweep_value: f64,
    pub protocol: String,
    pub mean_delay_s: f64,
    pub std_delay_s: f64,
    /// Trials that produced a finite delay.
    pub trials: usize,
    pub infeasible: usize,
}

impl CsvRow {
    /// Same row with every real rounded to the printed precision.
    pub fn rounded(&self) -> Self {
        let r = |x: f64| format_sig9(x).parse::<f64>().expect("formatted float parses");
        Self {
            sweep_value: r(self.sweep_value),
            mean_delay_s: r(self.mean_delay_s),
            std_delay_s: r(self.std_delay_s),
            ..self.clone()
        }
    }
}

pub fn rows(result: &SweepResult) -> Vec<CsvRow> {
    result
        .cells
        .iter()
        .map(|c| CsvRow {
            sweep_var: result.variable.name().to_string(),
            sweep_value: c.value,
            protocol: c.protocol.name().to_string(),
            mean_delay_s: c.mean(),
            std_delay_s: c.std_dev(),
            trials: c.feasible(),
            infeasible: c.infeasible(),
        })
        .collect()
}

pub fn render_csv(result: &SweepResult) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows(result) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.sweep_var,
            format_sig9(r.sweep_value),
            r.protocol,
            format_sig9(r.mean_delay_s),
            format_sig9(r.std_delay_s),
            r.trials,
            r.infeasible
        );
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> io::Result<()> {
    fs::write(path, render_csv(result))
        .map_err(|e| io::Error::new(e.kind(), format!("writing {}: {e}", path.display())))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(format!("line {}: expected 7 fields, got {}", i + 2, f.len()));
            }
            let real = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: `{s}`: {e}", i + 2));
            let int = |s: &str| s.parse::<usize>().map_err(|e| format!("line {}: `{s}`: {e}", i + 2));
            Ok(CsvRow {
                sweep_var: f[0].to_string(),
                sweep_value: real(f[1])?,
                protocol: f[2].to_string(),
                mean_delay_s: real(f[3])?,
                std_delay_s: real(f[4])?,
                trials: int(f[5])?,
                infeasible: int(f[6])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{Protocol, SweepCell, SweepVariable};

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.1, "0.1"),
            (2.0, "2"),
            (800000.0, "800000"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001234, "0.0001234"),
            (0.00001234, "1.234e-05"),
            (0.0312345678912, "0.0312345679"),
            (-2.5, "-2.5"),
            (1e-27, "1e-27"),
            (0.0, "0"),
            (9.9999999999, "10"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig9(x), want, "{x}");
        }
        assert_eq!(format_sig9(f64::NAN), "nan");
    }

    #[test]
    fn empty_protocol_set_gives_header_only() {
        let r = SweepResult {
            variable: SweepVariable::MaxEnergy,
            cells: vec![],
        };
        assert_eq!(render_csv(&r), format!("{HEADER}\n"));
    }

    #[test]
    fn round_trip() {
        let r = SweepResult {
            variable: SweepVariable::Payload,
            cells: vec![
                SweepCell {
                    value: 0.2e6,
                    protocol: Protocol::Fdo,
                    delays: vec![Some(0.031234567891), Some(0.0298765), None],
                },
                SweepCell {
                    value: 0.2e6,
                    protocol: Protocol::Ts,
                    delays: vec![None],
                },
            ],
        };
        let parsed = parse_csv(&render_csv(&r)).unwrap();
        let expected: Vec<CsvRow> = rows(&r).iter().map(CsvRow::rounded).collect();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0], expected[0]);
        assert!(parsed[1].mean_delay_s.is_nan());
        assert_eq!(parsed[1].infeasible, 1);
    }

    #[test]
    fn io_errors_name_the_path() {
        let r = SweepResult {
            variable: SweepVariable::Payload,
            cells: vec![],
        };
        let err = emit_csv(&r, Path::new("/nonexistent-dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }
}
