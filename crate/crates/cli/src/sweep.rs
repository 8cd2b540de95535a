use std::io::Write;

use monoform_core::calibration::check_convexity;
use monoform_core::mass_properties::star_body_mass;
use monoform_core::quadrature::QuadratureSpec;
use monoform_core::radial_family::ShapeParams;
use monoform_core::surface_analysis::Grid;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::json::fmt_f64;

const MAX_ROWS: usize = 1_000_000;

pub const HEADER: [&str; 10] =
    ["n", "c", "d", "volume", "m_xy", "h", "centroid_z", "min_principal", "min_gaussian", "convex"];

/// `value` or inclusive `start:stop:step`. Values are `start + k·step`, so
/// they do not accumulate rounding.
pub fn parse_range(name: &str, text: &str) -> CliResult<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::Usage(format!("--{name}: {s:?} is not a finite number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, s] => {
            let (start, stop, step) = (num(a)?, num(b)?, num(s)?);
            if step <= 0.0 || stop < start {
                return Err(CliError::Usage(format!("--{name}: need start <= stop and step > 0 in {text:?}")));
            }
            let count = ((stop - start) / step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
            if count > MAX_ROWS {
                return Err(CliError::Usage(format!("--{name}: {count} values exceed the limit of {MAX_ROWS}")));
            }
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(CliError::Usage(format!("--{name}: expected value or start:stop:step, got {text:?}"))),
    }
}

fn int_range(text: &str) -> CliResult<Vec<u32>> {
    parse_range("n", text)?
        .into_iter()
        .map(|x| {
            if x.fract() == 0.0 && x >= 0.0 && x <= u32::MAX as f64 {
                Ok(x as u32)
            } else {
                Err(CliError::Usage(format!("--n: {x} is not a non-negative integer")))
            }
        })
        .collect()
}

struct Row {
    params: ShapeParams,
    volume: f64,
    m_xy: f64,
    h: f64,
    centroid_z: f64,
    min_principal: f64,
    min_gaussian: f64,
    convex: bool,
}

pub fn run<W: Write>(n: &str, c: &str, d: &str, spec: &QuadratureSpec, grid: &Grid, out: W) -> CliResult<()> {
    let ns = int_range(n)?;
    let cs = parse_range("c", c)?;
    let ds = parse_range("d", d)?;
    let total = ns.len() * cs.len() * ds.len();
    if total > MAX_ROWS {
        return Err(CliError::Usage(format!("{total} parameter tuples exceed the limit of {MAX_ROWS}")));
    }
    let mut tuples = Vec::with_capacity(total);
    for &n in &ns {
        for &c in &cs {
            for &d in &ds {
                tuples.push(ShapeParams::new(n, c, d)?);
            }
        }
    }
    let rows: Vec<Row> = tuples
        .par_iter()
        .map(|&params| {
            let mass = star_body_mass(&params, spec)?;
            let check = check_convexity(&params, grid)?;
            Ok(Row {
                params,
                volume: mass.volume,
                m_xy: mass.m_xy,
                h: mass.h.unwrap_or(f64::NAN),
                centroid_z: mass.centroid[2],
                min_principal: check.min_principal,
                min_gaussian: check.min_gaussian,
                convex: check.is_convex,
            })
        })
        .collect::<Result<_, monoform_core::Error>>()?;

    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::Output(e.into());
    w.write_record(HEADER).map_err(csv_err)?;
    for r in rows {
        let p = r.params;
        w.write_record([
            p.n().to_string(),
            fmt_f64(p.c()),
            fmt_f64(p.d()),
            fmt_f64(r.volume),
            fmt_f64(r.m_xy),
            fmt_f64(r.h),
            fmt_f64(r.centroid_z),
            fmt_f64(r.min_principal),
            fmt_f64(r.min_gaussian),
            r.convex.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
