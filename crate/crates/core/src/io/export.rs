//! CSV and OBJ exporters for grid fields.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::GridField;

pub const CSV_HEADER: &str = "coord1,coord2,value,grad_norm";

/// `%.17g`: 17 significant digits, fixed notation for exponents in `[-5, 17)`, trailing
/// zeros removed.
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
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// One CSV row: the physical node coordinates, the value and `|∇v|_g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsvRow {
    pub coord1: f64,
    pub coord2: f64,
    pub value: f64,
    pub grad_norm: f64,
}

pub fn field_rows(field: &GridField) -> Vec<CsvRow> {
    let g = &field.grid;
    let mut rows = Vec::with_capacity(g.len());
    for k in 0..g.nt {
        for i in 0..g.ns {
            let x = g.node_point(i, k);
            rows.push(CsvRow { coord1: x[0], coord2: x[1], value: field.at(i, k), grad_norm: field.gradient_norm(i, k).value });
        }
    }
    rows
}

pub fn write_csv(rows: &[CsvRow], out: &mut impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            format_g17(r.coord1),
            format_g17(r.coord2),
            format_g17(r.value),
            format_g17(r.grad_norm)
        )?;
    }
    Ok(())
}

pub fn export_csv(field: &GridField, path: &Path) -> Result<()> {
    if field.values.is_empty() {
        return Err(Error::InvalidArgument("cannot export an empty field".into()));
    }
    let mut buf = Vec::new();
    write_csv(&field_rows(field), &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("expected header '{CSV_HEADER}', found {other:?}"))),
    }
    let mut rows = Vec::new();
    for (no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", no + 2))))
            .collect::<Result<_>>()?;
        if cols.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 columns, found {}", no + 2, cols.len())));
        }
        rows.push(CsvRow { coord1: cols[0], coord2: cols[1], value: cols[2], grad_norm: cols[3] });
    }
    Ok(rows)
}

pub fn import_csv(path: &Path) -> Result<Vec<CsvRow>> {
    read_csv(&fs::read_to_string(path)?)
}

/// OBJ mesh of the graph `(coord1, coord2, value)` over an `ns × nt` node array stored
/// `s`-fastest; two triangles per logical cell, no wrap across a periodic seam.
pub fn write_obj(rows: &[CsvRow], ns: usize, nt: usize, out: &mut impl Write) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("cannot export an empty field".into()));
    }
    if rows.len() != ns * nt {
        return Err(Error::InvalidArgument(format!("{} rows do not form a {ns}×{nt} grid", rows.len())));
    }
    for r in rows {
        writeln!(out, "v {} {} {}", format_g17(r.coord1), format_g17(r.coord2), format_g17(r.value))?;
    }
    for k in 0..nt.saturating_sub(1) {
        for i in 0..ns - 1 {
            let a = k * ns + i + 1;
            let (b, c, d) = (a + 1, a + ns, a + ns + 1);
            writeln!(out, "f {a} {b} {d}")?;
            writeln!(out, "f {a} {d} {c}")?;
        }
    }
    Ok(())
}

pub fn export_obj(field: &GridField, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_obj(&field_rows(field), field.grid.ns, field.grid.nt, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(2.5e-7), "2.4999999999999999e-07");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(-123.456), "-123.456");
        assert_eq!(format_g17(f64::MAX), "1.7976931348623157e+308");
    }

    #[test]
    fn g17_round_trips() {
        for x in [0.1, 1.0 / 3.0, -std::f64::consts::E, 6.02214076e23, 1.234e-300, 5e-324] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn obj_counts() {
        let rows = vec![CsvRow { coord1: 0.0, coord2: 0.0, value: 0.0, grad_norm: 0.0 }; 100];
        let mut buf = Vec::new();
        write_obj(&rows, 10, 10, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 100);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 162);
        assert!(write_obj(&[], 0, 0, &mut Vec::new()).is_err());
    }
}
