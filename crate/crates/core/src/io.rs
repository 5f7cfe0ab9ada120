//! Export of sampled surfaces as csv tables and obj meshes.
//!
//! The csv carries the grid description in a leading `#` comment so that it
//! converts back to the JSON surface format without loss. The obj mesh is
//! the projection onto the three leading principal components of the sample
//! cloud.

use std::str::FromStr;

use nalgebra::{Matrix3x6, Matrix6, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::algebra::RealVec6;
use crate::error::{GeomError, Result};
use crate::field::Field;
use crate::surface::{SampledSurface, SurfaceFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Obj,
}

impl FromStr for ExportFormat {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "obj" => Ok(ExportFormat::Obj),
            other => Err(GeomError::UnknownFormat(other.to_string())),
        }
    }
}

const CSV_HEADER: [&str; 8] = ["x", "y", "c0", "c1", "c2", "c3", "c4", "c5"];

/// One sample per row, `x, y` then the six coordinates, in index order.
pub fn to_csv(s: &SampledSurface) -> Result<String> {
    let mut meta = SurfaceFile::from(s);
    meta.values.clear();
    let mut out = format!("# {}\n", serde_json::to_string(&meta)?);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for i in 0..s.grid.nx {
        for j in 0..s.grid.ny {
            let v = s.values.get(i, j);
            let mut row = vec![format!("{:.17e}", s.grid.x(i)), format!("{:.17e}", s.grid.y(j))];
            row.extend(v.iter().map(|c| format!("{c:.17e}")));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    let body = w.into_inner().map_err(|e| GeomError::InvalidSurface(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("csv output is ascii"));
    Ok(out)
}

fn csv_err(e: csv::Error) -> GeomError {
    GeomError::InvalidSurface(format!("csv: {e}"))
}

/// Reads a file written by [`to_csv`] into the JSON interchange form.
pub fn from_csv(text: &str) -> Result<SurfaceFile> {
    let first = text.lines().next().unwrap_or_default();
    let meta = first
        .strip_prefix("# ")
        .ok_or_else(|| GeomError::InvalidSurface("csv lacks the grid comment line".into()))?;
    let mut file: SurfaceFile = serde_json::from_str(meta)?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let coords: Vec<f64> = rec
            .iter()
            .skip(2)
            .map(|c| c.trim().parse::<f64>().map_err(|e| GeomError::InvalidSurface(format!("csv: {e}"))))
            .collect::<Result<_>>()?;
        file.values.push(coords);
    }
    file.checked_grid(file.ambient_dim)?;
    Ok(file)
}

/// Mean and leading principal axes of the sample cloud.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Projection {
    pub mean: [f64; 6],
    /// Rows are orthonormal axes in `R^6`, by decreasing variance.
    pub axes: [[f64; 6]; 3],
    pub variances: [f64; 3],
}

impl Projection {
    pub fn matrix(&self) -> Matrix3x6<f64> {
        Matrix3x6::from_fn(|r, c| self.axes[r][c])
    }

    pub fn apply(&self, v: &RealVec6) -> [f64; 3] {
        let m = self.matrix();
        let centred = v - RealVec6::from_column_slice(&self.mean);
        let p = m * centred;
        [p[0], p[1], p[2]]
    }
}

pub fn principal_projection(values: &Field<RealVec6>) -> Projection {
    let n = values.iter().count().max(1) as f64;
    let mean = values.iter().fold(RealVec6::zeros(), |a, v| a + v) / n;
    let cov = values.iter().fold(Matrix6::zeros(), |a, v| {
        let d = v - mean;
        a + d * d.transpose()
    }) / n;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut axes = [[0.0; 6]; 3];
    let mut variances = [0.0; 3];
    for (r, &k) in order.iter().take(3).enumerate() {
        let col = eig.eigenvectors.column(k);
        // Fix the sign so the largest entry is positive; keeps output stable.
        let big = (0..6).max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs())).unwrap_or(0);
        let s = if col[big] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..6 {
            axes[r][c] = s * col[c];
        }
        variances[r] = eig.eigenvalues[k];
    }
    let mut m = [0.0; 6];
    m.copy_from_slice(mean.as_slice());
    Projection { mean: m, axes, variances }
}

/// Quad mesh of the projected surface; periodic directions wrap around.
pub fn to_obj(s: &SampledSurface) -> (String, Projection) {
    let proj = principal_projection(&s.values);
    let g = s.grid;
    let mut out = String::from("# minsurf quad mesh, projection onto three principal axes\n");
    for i in 0..g.nx {
        for j in 0..g.ny {
            let p = proj.apply(&s.values.get(i, j));
            out.push_str(&format!("v {:.9} {:.9} {:.9}\n", p[0], p[1], p[2]));
        }
    }
    let qi = if g.periodic_x { g.nx } else { g.nx - 1 };
    let qj = if g.periodic_y { g.ny } else { g.ny - 1 };
    let idx = |i: usize, j: usize| (i % g.nx) * g.ny + (j % g.ny) + 1;
    for i in 0..qi {
        for j in 0..qj {
            out.push_str(&format!(
                "f {} {} {} {}\n",
                idx(i, j),
                idx(i + 1, j),
                idx(i + 1, j + 1),
                idx(i, j + 1)
            ));
        }
    }
    (out, proj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_format_is_an_error() {
        assert!(matches!("ply".parse::<ExportFormat>(), Err(GeomError::UnknownFormat(_))));
        assert_eq!("obj".parse::<ExportFormat>().unwrap(), ExportFormat::Obj);
    }
}
