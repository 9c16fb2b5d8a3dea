//! ESRI ASCII grid (`.asc`) reading and writing.

use std::fmt::Write as _;

use super::{DemGrid, DEFAULT_NODATA};
use crate::error::{Error, Result};
use crate::geomath::Crs;

#[derive(Default)]
struct Header {
    ncols: Option<usize>,
    nrows: Option<usize>,
    xll: Option<(f64, bool)>,
    yll: Option<(f64, bool)>,
    cellsize: Option<f64>,
    nodata: Option<f64>,
}

fn header_number<T: std::str::FromStr>(key: &str, raw: Option<&str>, line: usize) -> Result<T> {
    raw.and_then(|v| v.parse().ok()).ok_or_else(|| Error::ParseLine {
        line,
        message: format!("`{key}` needs a numeric value"),
    })
}

/// Parses an ESRI ASCII grid. The text carries no CRS, so the caller tags it.
///
/// Header keys are case-insensitive; `xllcenter`/`yllcenter` are shifted half
/// a cell to the outer corner. Without `NODATA_value` the sentinel is −9999.
pub fn parse_ascii_grid(text: &str, crs: Crs) -> Result<DemGrid> {
    let mut header = Header::default();
    let mut lines = text.lines().enumerate().peekable();

    while let Some(&(idx, line)) = lines.peek() {
        let mut tokens = line.split_whitespace();
        let Some(key) = tokens.next() else {
            lines.next();
            continue;
        };
        if key.parse::<f64>().is_ok() {
            break;
        }
        let line_no = idx + 1;
        let value = tokens.next();
        match key.to_ascii_lowercase().as_str() {
            "ncols" => header.ncols = Some(header_number(key, value, line_no)?),
            "nrows" => header.nrows = Some(header_number(key, value, line_no)?),
            "xllcorner" => header.xll = Some((header_number(key, value, line_no)?, false)),
            "xllcenter" => header.xll = Some((header_number(key, value, line_no)?, true)),
            "yllcorner" => header.yll = Some((header_number(key, value, line_no)?, false)),
            "yllcenter" => header.yll = Some((header_number(key, value, line_no)?, true)),
            "cellsize" => header.cellsize = Some(header_number(key, value, line_no)?),
            "nodata_value" => header.nodata = Some(header_number(key, value, line_no)?),
            other => {
                return Err(Error::ParseLine {
                    line: line_no,
                    message: format!("unknown header key `{other}`"),
                })
            }
        }
        lines.next();
    }

    let header_line = lines.peek().map_or(text.lines().count() + 1, |&(i, _)| i + 1);
    let missing = |key: &str| Error::ParseLine {
        line: header_line,
        message: format!("missing header key `{key}`"),
    };
    let ncols = header.ncols.ok_or_else(|| missing("ncols"))?;
    let nrows = header.nrows.ok_or_else(|| missing("nrows"))?;
    let (xll, x_center) = header.xll.ok_or_else(|| missing("xllcorner"))?;
    let (yll, y_center) = header.yll.ok_or_else(|| missing("yllcorner"))?;
    let cellsize = header.cellsize.ok_or_else(|| missing("cellsize"))?;
    let nodata = header.nodata.unwrap_or(DEFAULT_NODATA);
    if cellsize.is_nan() || cellsize <= 0.0 {
        return Err(Error::ParseLine { line: header_line, message: "cellsize must be positive".into() });
    }
    if ncols == 0 || nrows == 0 {
        return Err(Error::ParseLine { line: header_line, message: "grid has no cells".into() });
    }

    let mut values = Vec::with_capacity(ncols * nrows);
    let mut rows_read = 0;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        if rows_read == nrows {
            return Err(Error::ParseLine {
                line: line_no,
                message: format!("more than {nrows} data rows"),
            });
        }
        let before = values.len();
        for token in line.split_whitespace() {
            let v: f64 = token.parse().map_err(|_| Error::ParseLine {
                line: line_no,
                message: format!("non-numeric cell `{token}`"),
            })?;
            values.push(v);
        }
        let got = values.len() - before;
        if got != ncols {
            return Err(Error::ParseLine {
                line: line_no,
                message: format!("row has {got} cells, expected {ncols}"),
            });
        }
        rows_read += 1;
    }
    if rows_read != nrows {
        return Err(Error::ParseLine {
            line: text.lines().count(),
            message: format!("found {rows_read} data rows, expected {nrows}"),
        });
    }

    let half = cellsize / 2.0;
    let origin_x = if x_center { xll - half } else { xll };
    let south = if y_center { yll - half } else { yll };
    let origin_y = south + nrows as f64 * cellsize;
    DemGrid::new(crs, origin_x, origin_y, cellsize, cellsize, ncols, nrows, Some(nodata), values)
}

/// Writes a grid with square pixels as an ESRI ASCII grid using corner
/// registration. Values print in shortest round-trip form.
pub fn write_ascii_grid(g: &DemGrid) -> Result<String> {
    if g.pixel_w != g.pixel_h {
        return Err(Error::InvalidParameter(format!(
            "ASCII grids need square pixels, got {} x {}",
            g.pixel_w, g.pixel_h
        )));
    }
    let nodata = g.nodata.unwrap_or(DEFAULT_NODATA);
    let mut out = String::new();
    let south = g.origin_y - g.height as f64 * g.pixel_h;
    let _ = writeln!(out, "ncols {}", g.width);
    let _ = writeln!(out, "nrows {}", g.height);
    let _ = writeln!(out, "xllcorner {}", g.origin_x);
    let _ = writeln!(out, "yllcorner {south}");
    let _ = writeln!(out, "cellsize {}", g.pixel_w);
    let _ = writeln!(out, "NODATA_value {nodata}");
    for row in g.values().chunks(g.width) {
        let line: Vec<String> = row
            .iter()
            .map(|&v| if g.is_nodata_value(v) { nodata.to_string() } else { v.to_string() })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TWO_BY_TWO: &str = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n3 4\n1 2\n";

    #[test]
    fn two_by_two() {
        let g = parse_ascii_grid(TWO_BY_TWO, Crs::Wgs84).unwrap();
        assert_eq!(g.values(), &[3.0, 4.0, 1.0, 2.0]);
        assert_eq!((g.origin_x, g.origin_y), (0.0, 2.0));
        assert_eq!((g.width, g.height), (2, 2));
        assert_eq!(g.nodata, Some(-9999.0));
        assert_eq!(g.crs, Crs::Wgs84);
    }

    #[test]
    fn nodata_cell() {
        let text = "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n5 -9999\n";
        let g = parse_ascii_grid(text, Crs::Wgs84).unwrap();
        assert_eq!(g.get(0, 0), Some(5.0));
        assert_eq!(g.get(0, 1), None);
    }

    #[test]
    fn center_registration_shifts_half_cell() {
        let corner = parse_ascii_grid(TWO_BY_TWO, Crs::Wgs84).unwrap();
        let centered = parse_ascii_grid(
            "NCOLS 2\nNROWS 2\nXLLCENTER 0\nYLLCENTER 0\nCELLSIZE 1\n3 4\n1 2\n",
            Crs::Wgs84,
        )
        .unwrap();
        assert_eq!(centered.origin_x, corner.origin_x - 0.5);
        assert_eq!(centered.origin_y, corner.origin_y - 0.5);
    }

    #[test]
    fn missing_key_reports_line() {
        let err = parse_ascii_grid("ncols 2\nnrows 1\nxllcorner 0\ncellsize 1\n1 2\n", Crs::Wgs84)
            .unwrap_err();
        assert_eq!(
            err,
            Error::ParseLine { line: 5, message: "missing header key `yllcorner`".into() }
        );
    }

    #[test]
    fn short_row_reports_line() {
        let err = parse_ascii_grid(
            "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3\n",
            Crs::Wgs84,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ParseLine { line: 7, .. }), "{err:?}");
    }

    #[test]
    fn non_numeric_cell_reports_line() {
        let err = parse_ascii_grid(
            "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 x\n",
            Crs::Wgs84,
        )
        .unwrap_err();
        assert_eq!(err, Error::ParseLine { line: 7, message: "non-numeric cell `x`".into() });
    }

    #[test]
    fn too_few_rows() {
        let err = parse_ascii_grid(
            "ncols 2\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n",
            Crs::Wgs84,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ParseLine { .. }));
    }

    proptest! {
        #[test]
        fn write_then_parse_is_exact(
            w in 1usize..6, h in 1usize..6,
            seed in proptest::collection::vec(-1.0e4f64..1.0e4, 36),
            holes in proptest::collection::vec(any::<bool>(), 36),
        ) {
            let values: Vec<f64> = (0..w * h)
                .map(|i| if holes[i] { -9999.0 } else { seed[i] })
                .collect();
            let g = DemGrid::new(Crs::Wgs84, 10.25, 60.5, 0.125, 0.125, w, h, Some(-9999.0), values)
                .unwrap();
            let text = write_ascii_grid(&g).unwrap();
            let back = parse_ascii_grid(&text, Crs::Wgs84).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(write_ascii_grid(&back).unwrap(), text);
        }
    }
}
