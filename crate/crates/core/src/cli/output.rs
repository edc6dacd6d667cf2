//! Artifact writers: manifest, CSV tables, field dumps and PGM previews.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use crate::error::Result;
use crate::field::{MatrixField, MatrixOneForm};
use crate::gfld::{self, FieldKind};
use crate::grid::GridSpec;

/// Fixed numerical constants that no flag controls, echoed in the manifest.
pub const FIXED_CONSTANTS: &[(&str, &str)] = &[
    ("cg_tol", "1e-10"),
    ("cg_iteration_cap", "20 n"),
    ("residual_margin_cells", "8"),
    ("counterexample_exclusion_cells", "2"),
    ("counterexample_residual_cells", "8"),
    ("hopf_radius", "0.9"),
    ("on_target_tol", "1e-8"),
];

/// A CSV value in the shared fixed format.
pub fn num(x: f64) -> String {
    format!("{x:.10e}")
}

/// Output directory of one run.
pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file(&self, name: &str) -> Result<BufWriter<fs::File>> {
        Ok(BufWriter::new(fs::File::create(self.dir.join(name))?))
    }

    pub fn manifest(&self, cfg: &RunConfig) -> Result<()> {
        let mut w = self.file("manifest.txt")?;
        writeln!(w, "# holoframe run manifest")?;
        writeln!(w, "command = {}", cfg.command.name())?;
        writeln!(w, "version = {}", env!("CARGO_PKG_VERSION"))?;
        for (k, v) in &cfg.settings {
            writeln!(w, "{k} = {v}")?;
        }
        for (k, v) in FIXED_CONSTANTS {
            writeln!(w, "{k} = {v}")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Write `header` and one line per row, joined with commas.
    pub fn csv(&self, name: &str, header: &str, rows: &[Vec<String>]) -> Result<()> {
        let mut w = self.file(name)?;
        writeln!(w, "{header}")?;
        for r in rows {
            writeln!(w, "{}", r.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Two-column `quantity,value` table.
    pub fn summary(&self, name: &str, rows: &[(&str, f64)]) -> Result<()> {
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|(k, v)| vec![k.to_string(), num(*v)])
            .collect();
        self.csv(name, "quantity,value", &rows)
    }

    pub fn raw_text(&self, name: &str, text: &str) -> Result<()> {
        fs::write(self.dir.join(name), text)?;
        Ok(())
    }

    /// GFLD dump plus a PGM preview of the node norms.
    pub fn field(&self, stem: &str, f: &MatrixField, kind: FieldKind) -> Result<()> {
        let mut w = self.file(&format!("{stem}.gfld"))?;
        gfld::write_field(&mut w, f, kind)?;
        w.flush()?;
        self.pgm(stem, f.grid(), &f.node_norms())
    }

    pub fn one_form(&self, stem: &str, f: &MatrixOneForm) -> Result<()> {
        let mut w = self.file(&format!("{stem}.gfld"))?;
        gfld::write_one_form(&mut w, f)?;
        w.flush()?;
        self.pgm(stem, f.grid(), &f.node_norms())
    }

    pub fn pgm(&self, stem: &str, grid: &GridSpec, values: &[f64]) -> Result<()> {
        let mut w = self.file(&format!("{stem}.pgm"))?;
        w.write_all(&pgm_bytes(grid, values))?;
        w.flush()?;
        Ok(())
    }
}

/// Binary 8-bit PGM, top row at `y = 1`. Values are rescaled linearly so the
/// minimum maps to 0 and the maximum to 255; a constant image is all zeros.
pub fn pgm_bytes(grid: &GridSpec, values: &[f64]) -> Vec<u8> {
    let n = grid.n();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let span = hi - lo;
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    for j in (0..n).rev() {
        for i in 0..n {
            let v = values[grid.index(i, j)];
            let px = if span > 0.0 {
                (255.0 * (v - lo) / span).round() as u8
            } else {
                0
            };
            out.push(px);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_rescales_to_full_range() {
        let g = GridSpec::new(33).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|k| k as f64).collect();
        let bytes = pgm_bytes(&g, &vals);
        let header = b"P5\n33 33\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let px = &bytes[header.len()..];
        assert_eq!(px.len(), 33 * 33);
        assert_eq!(*px.iter().min().unwrap(), 0);
        assert_eq!(*px.iter().max().unwrap(), 255);
        // bottom-left node is the minimum and sits in the last row
        assert_eq!(px[32 * 33], 0);
        assert!(pgm_bytes(&g, &vec![2.0; g.len()])[header.len()..]
            .iter()
            .all(|&b| b == 0));
    }
}
