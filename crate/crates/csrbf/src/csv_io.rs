//! CSV reading and writing of points, queries and grid values.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use csrbf_core::{GridSpec, PointCloud};

use crate::{write_atomic, Error, Result};

const AXES: [&str; 3] = ["x", "y", "z"];

struct Table {
    dim: usize,
    rows: Vec<(u64, Vec<f64>)>,
}

/// Parses a numeric CSV whose header is `x[,y[,z]]` optionally followed by
/// `h`. Returns the rows together with their line numbers.
fn read_table(path: &Path, require_values: bool) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |line: u64, message: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_err(1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let has_values = header.last().is_some_and(|h| h == "h");
    let dim = header.len() - usize::from(has_values);
    let expected_coords = (1..=3).contains(&dim) && header[..dim].iter().zip(AXES).all(|(h, a)| h == a);
    if !expected_coords || (require_values && !has_values) {
        let wanted = if require_values {
            "`x,h`, `x,y,h` or `x,y,z,h`"
        } else {
            "`x`, `x,y` or `x,y,z` (optionally followed by `h`)"
        };
        return Err(csv_err(
            1,
            format!("malformed header `{}`, expected {wanted}", header.join(",")),
        ));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| csv_err(line, format!("column `{}`: `{cell}` is not a number", header[col])))?;
            if !v.is_finite() {
                return Err(csv_err(
                    line,
                    format!("column `{}`: `{cell}` is not finite", header[col]),
                ));
            }
            row.push(v);
        }
        if !has_values || require_values {
            rows.push((line, row));
        } else {
            row.truncate(dim);
            rows.push((line, row));
        }
    }
    if rows.is_empty() {
        return Err(csv_err(1, "no data rows".into()));
    }
    Ok(Table { dim, rows })
}

/// Reads scattered data. Coincident sites are reported with both line
/// numbers.
pub fn read_points_csv(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let table = read_table(path, true)?;
    let dim = table.dim;
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::with_capacity(table.rows.len());
    let mut coords = Vec::with_capacity(table.rows.len() * dim);
    let mut values = Vec::with_capacity(table.rows.len());
    for (line, row) in &table.rows {
        // + 0.0 folds -0.0 into 0.0
        let key: Vec<u64> = row[..dim].iter().map(|c| (c + 0.0).to_bits()).collect();
        if let Some(&first) = seen.get(&key) {
            return Err(Error::DuplicatePoint {
                path: path.to_path_buf(),
                first,
                second: *line,
            });
        }
        seen.insert(key, *line);
        coords.extend_from_slice(&row[..dim]);
        values.push(row[dim]);
    }
    Ok(PointCloud::new(dim, coords, values)?)
}

/// Reads query points (`x[,y[,z]]`, an `h` column is ignored), row-major.
pub fn read_queries_csv(path: impl AsRef<Path>) -> Result<(usize, Vec<f64>)> {
    let table = read_table(path.as_ref(), false)?;
    Ok((table.dim, table.rows.into_iter().flat_map(|(_, r)| r).collect()))
}

fn header_line(dim: usize) -> String {
    let mut s = AXES[..dim].join(",");
    s.push_str(",f\n");
    s
}

fn push_row(out: &mut String, coords: &[f64], value: f64) {
    for c in coords {
        let _ = write!(out, "{c},");
    }
    let _ = writeln!(out, "{value}");
}

/// Writes one row per grid node in the grid's row-major order. Numbers are
/// printed in shortest round-trip form, so equal inputs give equal bytes.
pub fn write_grid_csv(values: &[f64], grid: &GridSpec, path: impl AsRef<Path>) -> Result<()> {
    if values.len() != grid.len() {
        return Err(csrbf_core::Error::InvalidInput(format!(
            "{} values for a grid of {} nodes",
            values.len(),
            grid.len()
        ))
        .into());
    }
    let mut out = header_line(grid.dim());
    let mut node = vec![0.0; grid.dim()];
    for (i, &v) in values.iter().enumerate() {
        grid.node_into(i, &mut node);
        push_row(&mut out, &node, v);
    }
    write_atomic(path.as_ref(), out.as_bytes())
}

/// Writes query points (row-major, `dim` per point) with their values.
pub fn write_values_csv(dim: usize, points: &[f64], values: &[f64], path: impl AsRef<Path>) -> Result<()> {
    if points.len() != values.len() * dim {
        return Err(csrbf_core::Error::InvalidInput("point and value counts differ".into()).into());
    }
    let mut out = header_line(dim);
    for (p, &v) in points.chunks_exact(dim).zip(values) {
        push_row(&mut out, p, v);
    }
    write_atomic(path.as_ref(), out.as_bytes())
}
