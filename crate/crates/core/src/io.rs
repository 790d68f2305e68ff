//! CSV and JSON emission with a manifest per output directory.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::DensityGrid;
use crate::engine::Trajectory;
use crate::error::Result;
use crate::estimation::Histogram;
use crate::gain::ScanRow;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const PARTIAL_MARKER: &str = ".partial";
pub const MANIFEST: &str = "manifest.json";

/// Seventeen significant digits, '.' decimal separator.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn row(values: impl IntoIterator<Item = f64>) -> String {
    let mut s = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&fmt_f64(v));
    }
    s
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut out = String::from("t");
    for d in 1..=t.dim {
        let _ = write!(out, ",x{d}");
    }
    out.push('\n');
    for (k, x) in t.iter_states().enumerate() {
        out.push_str(&row(std::iter::once(t.time(k)).chain(x.iter().copied())));
        out.push('\n');
    }
    out
}

pub fn density_csv(g: &DensityGrid) -> String {
    let mut out = String::from(if g.dim() == 1 { "x,p0\n" } else { "x,y,p0\n" });
    for (k, v) in g.values.iter().enumerate() {
        out.push_str(&row(g.node(k).into_iter().chain(std::iter::once(*v))));
        out.push('\n');
    }
    out
}

pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from(if h.dim() == 1 {
        "bin_center,density,count\n"
    } else {
        "bin_center,bin_center_y,density,count\n"
    });
    for (k, (d, c)) in h.density.iter().zip(&h.counts).enumerate() {
        out.push_str(&row(h.bin_center(k).into_iter().chain(std::iter::once(*d))));
        let _ = writeln!(out, ",{c}");
    }
    out
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("alpha,unimodal,bound,sigma_tilde,nu_tilde\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.alpha),
            u8::from(r.unimodal),
            fmt_f64(r.bound.unwrap_or(f64::NAN)),
            fmt_f64(r.sigma_tilde),
            fmt_f64(r.nu_tilde)
        );
    }
    out
}

/// Output directory that carries a `.partial` marker until `finish`.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        fs::write(root.join(PARTIAL_MARKER), b"")?;
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(self.root.join(name))?);
        w.write_all(text.as_bytes())?;
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write_text(name, &text)
    }

    /// Writes the manifest and removes the partial marker.
    pub fn finish<T: Serialize>(mut self, manifest: &Manifest<T>) -> Result<PathBuf> {
        let mut m = serde_json::to_value(manifest)?;
        m["files"] = serde_json::to_value(&self.files)?;
        self.write_json(MANIFEST, &m)?;
        fs::remove_file(self.root.join(PARTIAL_MARKER))?;
        Ok(self.root)
    }
}

/// Everything needed to rerun a command bit-identically.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<T: Serialize> {
    pub tool: &'static str,
    pub code_version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub config: T,
}

impl<T: Serialize> Manifest<T> {
    pub fn new(command: impl Into<String>, seed: Option<u64>, config: T) -> Self {
        Manifest { tool: "tipctl", code_version: CODE_VERSION, command: command.into(), seed, config }
    }
}
