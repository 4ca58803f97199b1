//! CSV exchange format for grid functions: columns `j,x_j,re,im`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::gridfn::{Encoding, GridFunction, GridSpec};
use crate::numeric::C64;

pub fn write_csv<W: Write>(gf: &GridFunction, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["j", "x_j", "re", "im"]).map_err(io)?;
    for (j, v) in gf.values.iter().enumerate() {
        w.write_record([
            j.to_string(),
            gf.grid.x(j).to_string(),
            v.re.to_string(),
            v.im.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(gf: &GridFunction) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(gf, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Reads a grid function back; the rows must match `grid` point for point.
pub fn read_csv<R: Read>(input: R, grid: GridSpec, encoding: Encoding) -> Result<GridFunction> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut values = Vec::with_capacity(grid.len());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Config(format!("csv row {row}: {e}")))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Config(format!("csv row {row}: missing column {i}")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("csv row {row}: {e}")))
        };
        let j = num(0)? as usize;
        if j != row {
            return Err(Error::Config(format!("csv row {row} has index {j}")));
        }
        let x = num(1)?;
        let expected = grid.x(j);
        if (x - expected).abs() > 1e-12 * (1.0 + expected.abs()) {
            return Err(Error::Shape(format!("row {row}: x = {x}, grid expects {expected}")));
        }
        values.push(C64::new(num(2)?, num(3)?));
    }
    GridFunction::new(grid, values, encoding)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{sample_pointwise, FunctionSpec};

    #[test]
    fn round_trip_is_exact() {
        let g = GridSpec::new(-1.0, 2.0, 5).unwrap();
        let f = sample_pointwise(&FunctionSpec::ZetaCriticalLine { alpha: 3.0 }, g).unwrap();
        let text = to_csv_string(&f).unwrap();
        assert!(text.starts_with("j,x_j,re,im\n"));
        let back = read_csv(text.as_bytes(), g, Encoding::Pointwise).unwrap();
        assert_eq!(back.values, f.values);
    }

    #[test]
    fn wrong_grid_is_rejected() {
        let g = GridSpec::unit(3).unwrap();
        let f = sample_pointwise(&FunctionSpec::Uniform { value: 1.0 }, g).unwrap();
        let text = to_csv_string(&f).unwrap();
        let other = GridSpec::new(0.0, 2.0, 3).unwrap();
        assert!(read_csv(text.as_bytes(), other, Encoding::Pointwise).is_err());
    }
}
