//! CSV serialization of traces.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::simulation::Trace;

pub const HEADER: &str = "t,w1,w2,w3,I2,I3,l2,l3,u1,u2,V,Ekin,Lx,Ly,Lz,prec2";

const ATTITUDE_COLUMNS: &str = "R11,R12,R13,R21,R22,R23,R31,R32,R33";

/// Formats `x` with the fewest significant digits (at most 17) that parse
/// back to the same `f64`, laid out like C's `%.17g`: positional for
/// decimal exponents in `[-4, 17)`, otherwise `d.ddde±XX`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // `{:e}` gives the shortest round-trip digits, e.g. "-1.2345e-7"
    let sci = format!("{x:e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();

    if !(-4..17).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let frac = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{head}{frac}e{esign}{:02}", exp.abs());
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let int_len = exp as usize + 1;
    if digits.len() <= int_len {
        format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
    } else {
        let (int_part, frac) = digits.split_at(int_len);
        format!("{sign}{int_part}.{frac}")
    }
}

/// Writes `trace` with the standard header; returns the number of data rows.
pub fn write_trace_csv<W: Write>(trace: &Trace, dest: W) -> Result<usize> {
    write_csv(trace, dest, false)
}

/// As [`write_trace_csv`], with the nine attitude entries (row-major)
/// appended to every row.
pub fn write_trace_csv_with_attitude<W: Write>(trace: &Trace, dest: W) -> Result<usize> {
    write_csv(trace, dest, true)
}

fn write_csv<W: Write>(trace: &Trace, mut dest: W, attitude: bool) -> Result<usize> {
    if trace.rows.is_empty() {
        return Err(Error::EmptyTrace);
    }
    dest.write_all(HEADER.as_bytes())?;
    if attitude {
        write!(dest, ",{ATTITUDE_COLUMNS}")?;
    }
    dest.write_all(b"\n")?;
    let mut line = String::new();
    for row in &trace.rows {
        line.clear();
        let mut fields = vec![
            row.t,
            row.omega.x,
            row.omega.y,
            row.omega.z,
            row.i2,
            row.i3,
            row.l2,
            row.l3,
            row.u.u1,
            row.u.u2,
            row.value,
            row.kinetic_energy,
            row.momentum.x,
            row.momentum.y,
            row.momentum.z,
            row.precession_norm_sq,
        ];
        if attitude {
            fields.extend(row.attitude.transpose().iter());
        }
        for (i, v) in fields.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format_number(*v));
        }
        line.push('\n');
        dest.write_all(line.as_bytes())?;
    }
    dest.flush()?;
    Ok(trace.rows.len())
}

/// Reads a trace CSV back as its header columns and numeric rows.
pub fn read_trace_csv<R: BufRead>(source: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = source.lines();
    let header = match lines.next() {
        Some(line) => line?.split(',').map(str::to_string).collect::<Vec<_>>(),
        None => return Err(Error::EmptyTrace),
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let row = line
            .split(',')
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::ConfigLine {
                    line: i + 2,
                    message: format!("malformed number '{f}'"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::ConfigLine {
                line: i + 2,
                message: format!("expected {} fields, got {}", header.len(), row.len()),
            });
        }
        rows.push(row);
    }
    Ok((header, rows))
}
