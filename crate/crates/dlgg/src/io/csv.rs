//! CSV ingestion and emission.
//!
//! Numeric values are written with Rust's shortest-round-trip formatting, so
//! write-then-read is bit-exact for finite `f64`. Files use '.' as the
//! decimal separator, ',' as the field separator, and LF line endings
//! (CRLF is accepted on input). Row/column positions in error messages are
//! 1-based.

use std::fs;
use std::path::Path;

use crate::edge::EdgeIndex;
use crate::error::{Error, Result};
use crate::mat::{Matrix, ScatterMatrix, SymMatrix};
use crate::select::EdgeSet;

/// A parsed, mean-centered data set.
#[derive(Debug, Clone)]
pub struct Dataset {
    values: Matrix<f64>,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn p(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix<f64> {
        &self.values
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    /// Name for a 0-based column: header name when present, else "x<k+1>".
    pub fn column_label(&self, k: usize) -> String {
        match &self.column_names {
            Some(names) => names[k].clone(),
            None => format!("x{}", k + 1),
        }
    }

    /// S = X^T X over the centered values.
    pub fn scatter(&self) -> Result<ScatterMatrix<f64>> {
        ScatterMatrix::from_data(&self.values)
    }
}

fn looks_numeric(cell: &str) -> bool {
    cell.trim().parse::<f64>().is_ok()
}

fn split_line(line: &str) -> Vec<String> {
    line.trim_end_matches('\r')
        .split(',')
        .map(|c| c.trim().trim_matches('"').to_string())
        .collect()
}

/// Load a rectangular numeric CSV with an optional header row, center every
/// column at its mean, and reject missing values and constant columns.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    let first = match lines.peek() {
        Some(l) => split_line(l),
        None => return Err(Error::BadData(format!("{} is empty", path.display()))),
    };
    let header = first.iter().any(|cell| !looks_numeric(cell));
    let p = first.len();
    let column_names = if header {
        lines.next();
        Some(first)
    } else {
        None
    };
    if p < 2 {
        return Err(Error::BadData(format!(
            "need at least 2 columns, found {p}"
        )));
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let header_offset = if header { 1 } else { 0 };
    for (li, line) in lines.enumerate() {
        let row_no = li + 1 + header_offset;
        let cells = split_line(line);
        if cells.len() != p {
            return Err(Error::BadData(format!(
                "ragged row {row_no}: {} fields, expected {p}",
                cells.len()
            )));
        }
        let mut row = Vec::with_capacity(p);
        for (ci, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::BadData(format!(
                    "missing value at row {row_no}, column {}",
                    ci + 1
                )));
            }
            let v: f64 = cell.parse().map_err(|_| {
                Error::BadData(format!(
                    "non-numeric cell '{cell}' at row {row_no}, column {}",
                    ci + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::BadData(format!(
                    "non-finite value at row {row_no}, column {}",
                    ci + 1
                )));
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::BadData("no data rows".into()));
    }

    // constant-column guard (s_jj = 0 after centering)
    for j in 0..p {
        let v0 = rows[0][j];
        if rows.iter().all(|r| r[j] == v0) {
            let name = column_names
                .as_ref()
                .map(|h| h[j].clone())
                .unwrap_or_else(|| format!("column {}", j + 1));
            return Err(Error::BadData(format!(
                "constant column '{name}': the scatter matrix would be singular there"
            )));
        }
    }

    // mean-center each column
    let n = rows.len();
    for j in 0..p {
        let mean: f64 = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        for r in rows.iter_mut() {
            r[j] -= mean;
        }
    }
    Ok(Dataset {
        values: Matrix::from_rows(rows)?,
        column_names,
    })
}

fn write_file(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    fs::write(path.as_ref(), contents)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.as_ref().display())))
}

/// Write a symmetric matrix as a full p x p CSV (no header).
pub fn write_matrix_csv(path: impl AsRef<Path>, m: &SymMatrix<f64>) -> Result<()> {
    let p = m.dim();
    let mut out = String::new();
    for i in 0..p {
        let row: Vec<String> = (0..p).map(|j| format!("{}", m.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

/// Read a full square CSV back into symmetric storage; rejects asymmetric
/// input.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<SymMatrix<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(ri, line)| {
            split_line(line)
                .iter()
                .enumerate()
                .map(|(ci, cell)| {
                    cell.parse::<f64>().map_err(|_| {
                        Error::BadFormat(format!(
                            "non-numeric cell at row {}, column {} of {}",
                            ri + 1,
                            ci + 1,
                            path.display()
                        ))
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let p = rows.len();
    if p < 2 || rows.iter().any(|r| r.len() != p) {
        return Err(Error::BadFormat(format!(
            "{} is not a square matrix of dimension >= 2",
            path.display()
        )));
    }
    for i in 0..p {
        for j in (i + 1)..p {
            if rows[i][j] != rows[j][i] {
                return Err(Error::BadFormat(format!(
                    "asymmetric matrix in {} at ({}, {})",
                    path.display(),
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    SymMatrix::from_fn(p, |i, j| rows[i][j])
}

/// Write a dense matrix with an optional header row.
pub fn write_dense_csv(
    path: impl AsRef<Path>,
    m: &Matrix<f64>,
    header: Option<&[String]>,
) -> Result<()> {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&h.join(","));
        out.push('\n');
    }
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

/// Edge list CSV with header "i,j" and 1-based node indices.
pub fn write_edges_csv(path: impl AsRef<Path>, set: &EdgeSet) -> Result<()> {
    let mut out = String::from("i,j\n");
    for e in set.iter() {
        out.push_str(&format!("{},{}\n", e.i() + 1, e.j() + 1));
    }
    write_file(path, &out)
}

/// Read an edge list written by [`write_edges_csv`]; `p` fixes the node
/// count the indices are validated against.
pub fn read_edges_csv(path: impl AsRef<Path>, p: usize) -> Result<EdgeSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut set = EdgeSet::empty(p);
    for (li, line) in text.lines().enumerate() {
        if li == 0 || line.trim().is_empty() {
            continue; // header
        }
        let cells = split_line(line);
        if cells.len() != 2 {
            return Err(Error::BadFormat(format!(
                "edge row {} of {} needs two fields",
                li + 1,
                path.display()
            )));
        }
        let parse = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| {
                Error::BadFormat(format!("bad node index '{s}' in {}", path.display()))
            })
        };
        let i = parse(&cells[0])?;
        let j = parse(&cells[1])?;
        if i == 0 || j == 0 {
            return Err(Error::BadFormat(format!(
                "node indices are 1-based in {}",
                path.display()
            )));
        }
        let (a, b) = (i.min(j) - 1, i.max(j) - 1);
        set.insert(EdgeIndex::new(a, b, p)?)?;
    }
    Ok(set)
}

/// A named scalar trace, one value per line after the header.
pub fn write_trace_csv(path: impl AsRef<Path>, name: &str, trace: &[f64]) -> Result<()> {
    let mut out = format!("sweep,{name}\n");
    for (t, v) in trace.iter().enumerate() {
        out.push_str(&format!("{},{v}\n", t + 1));
    }
    write_file(path, &out)
}

/// Per-draw latent summaries (tau, phi and psi ranges), one row per draw.
pub fn write_latents_csv(
    path: impl AsRef<Path>,
    traces: &[crate::gibbs::LatentTrace<f64>],
) -> Result<()> {
    let mut out = String::from("draw,tau,phi_min,phi_max,psi_min,psi_max\n");
    for (k, t) in traces.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            k + 1,
            t.tau,
            t.phi_min,
            t.phi_max,
            t.psi_min,
            t.psi_max
        ));
    }
    write_file(path, &out)
}

pub fn read_latents_csv(path: impl AsRef<Path>) -> Result<Vec<crate::gibbs::LatentTrace<f64>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        if li == 0 || line.trim().is_empty() {
            continue;
        }
        let cells = split_line(line);
        if cells.len() != 6 {
            return Err(Error::BadFormat(format!(
                "latents row {} of {} needs six fields",
                li + 1,
                path.display()
            )));
        }
        let f = |k: usize| -> Result<f64> {
            cells[k].parse::<f64>().map_err(|_| {
                Error::BadFormat(format!("bad latent value in {}", path.display()))
            })
        };
        out.push(crate::gibbs::LatentTrace {
            tau: f(1)?,
            phi_min: f(2)?,
            phi_max: f(3)?,
            psi_min: f(4)?,
            psi_max: f(5)?,
        });
    }
    Ok(out)
}

/// Read back the value column of a trace CSV.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        if li == 0 || line.trim().is_empty() {
            continue;
        }
        let cells = split_line(line);
        if cells.len() != 2 {
            return Err(Error::BadFormat(format!(
                "trace row {} of {} needs two fields",
                li + 1,
                path.display()
            )));
        }
        out.push(cells[1].parse::<f64>().map_err(|_| {
            Error::BadFormat(format!("bad trace value in {}", path.display()))
        })?);
    }
    Ok(out)
}
