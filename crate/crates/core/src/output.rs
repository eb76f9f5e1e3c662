//! CSV artifacts. Floats are written with 17 significant digits so every
//! value round-trips exactly; files are written to a temporary sibling and
//! renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::energy::{DecaySummary, EnergySeries};
use crate::femesh::UniformMesh;
use crate::mms::ConvergenceRow;
use crate::stepper::{Observer, State};
use crate::{Error, Result};

pub const ENERGY_HEADER: [&str; 5] = ["n", "t", "E", "logE", "negLogEOverT"];
pub const PROBE_HEADER: [&str; 5] = ["t", "u", "phi", "psi", "w"];
pub const SNAPSHOT_HEADER: [&str; 6] = ["x", "t", "u", "phi", "psi", "w"];
pub const CONVERGENCE_HEADER: [&str; 5] = ["M", "dt", "error", "ratio", "order"];
pub const LOGLOG_HEADER: [&str; 2] = ["h_plus_dt", "error"];
pub const DECAY_HEADER: [&str; 7] = [
    "sigma1_hat",
    "sigma0_hat",
    "window_start",
    "window_end",
    "fit_residual",
    "max_log_deviation",
    "samples",
];

/// `{:.16e}`: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Renders rows into CSV bytes.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    write_atomic(path, &csv_bytes(header, rows))
}

pub fn energy_rows(series: &EnergySeries) -> Vec<Vec<String>> {
    let nl = series.neg_log_over_t();
    (0..series.len())
        .map(|k| {
            let e = series.e[k];
            vec![
                series.steps[k].to_string(),
                fmt_f64(series.t[k]),
                fmt_f64(e),
                fmt_f64(e.ln()),
                fmt_opt(nl[k]),
            ]
        })
        .collect()
}

pub fn write_energy_csv(path: &Path, series: &EnergySeries) -> Result<()> {
    write_csv(path, &ENERGY_HEADER, energy_rows(series))
}

/// Reads `n,t,E,...` back into a series; extra columns are ignored.
pub fn read_energy_csv(path: &Path) -> Result<EnergySeries> {
    let bad = |reason: String| Error::Csv {
        path: path.to_path_buf(),
        reason,
    };
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))
    };
    let (cn, ct, ce) = (col("n")?, col("t")?, col("E")?);
    let mut series = EnergySeries::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |k: usize| {
            rec.get(k)
                .ok_or_else(|| bad(format!("row {}: missing field", line + 2)))
        };
        let n = field(cn)?
            .parse()
            .map_err(|_| bad(format!("row {}: bad `n`", line + 2)))?;
        let t: f64 = field(ct)?
            .parse()
            .map_err(|_| bad(format!("row {}: bad `t`", line + 2)))?;
        let e: f64 = field(ce)?
            .parse()
            .map_err(|_| bad(format!("row {}: bad `E`", line + 2)))?;
        if let Some(&prev) = series.t.last() {
            if !(t > prev) {
                return Err(bad(format!("row {}: t not strictly increasing", line + 2)));
            }
        }
        series.push(n, t, e);
    }
    Ok(series)
}

pub fn write_decay_summary(path: &Path, d: &DecaySummary) -> Result<()> {
    write_csv(path, &DECAY_HEADER, [decay_row(d)])
}

pub fn decay_row(d: &DecaySummary) -> Vec<String> {
    vec![
        fmt_f64(d.sigma1_hat),
        fmt_f64(d.sigma0_hat),
        fmt_f64(d.fit_window.0),
        fmt_f64(d.fit_window.1),
        fmt_f64(d.fit_residual),
        fmt_f64(d.max_log_deviation),
        d.samples.to_string(),
    ]
}

pub fn convergence_rows(rows: &[ConvergenceRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.elements.to_string(),
                fmt_f64(r.dt),
                fmt_f64(r.error),
                fmt_opt(r.ratio),
                fmt_opt(r.observed_order),
            ]
        })
        .collect()
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    write_csv(path, &CONVERGENCE_HEADER, convergence_rows(rows))
}

pub fn write_loglog_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    write_csv(
        path,
        &LOGLOG_HEADER,
        rows.iter()
            .map(|r| vec![fmt_f64(r.h + r.dt), fmt_f64(r.error)]),
    )
}

/// Point values of `u, phi, psi, w` at fixed positions, every `stride`
/// levels (the final level is always recorded).
#[derive(Debug, Clone)]
pub struct ProbeRecorder {
    mesh: UniformMesh,
    stride: usize,
    pub points: Vec<f64>,
    /// One row list per probe point: `[t, u, phi, psi, w]`.
    pub rows: Vec<Vec<[f64; 5]>>,
}

impl ProbeRecorder {
    pub fn new(mesh: &UniformMesh, points: &[f64], stride: usize) -> Self {
        Self {
            mesh: *mesh,
            stride: stride.max(1),
            points: points.to_vec(),
            rows: vec![Vec::new(); points.len()],
        }
    }

    pub fn file_name(x: f64) -> String {
        format!("probe_x{x}.csv")
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        for (x, rows) in self.points.iter().zip(&self.rows) {
            let path = dir.join(Self::file_name(*x));
            write_csv(
                &path,
                &PROBE_HEADER,
                rows.iter().map(|r| r.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>()),
            )?;
            paths.push(path);
        }
        Ok(paths)
    }
}

impl Observer for ProbeRecorder {
    fn observe(&mut self, s: &State, last: bool) -> Result<()> {
        if s.n % self.stride != 0 && !last {
            return Ok(());
        }
        for (x, rows) in self.points.iter().zip(self.rows.iter_mut()) {
            let m = &self.mesh;
            rows.push([
                s.t,
                s.u.eval(m, *x),
                s.phi.eval(m, *x),
                s.psi.eval(m, *x),
                s.w.eval(m, *x),
            ]);
        }
        Ok(())
    }
}

/// Full nodal profiles (boundary nodes included) every `stride` levels.
#[derive(Debug, Clone)]
pub struct SnapshotRecorder {
    mesh: UniformMesh,
    stride: usize,
    /// `[x, t, u, phi, psi, w]`.
    pub rows: Vec<[f64; 6]>,
}

impl SnapshotRecorder {
    pub fn new(mesh: &UniformMesh, stride: usize) -> Self {
        Self {
            mesh: *mesh,
            stride: stride.max(1),
            rows: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_csv(
            path,
            &SNAPSHOT_HEADER,
            self.rows
                .iter()
                .map(|r| r.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>()),
        )
    }
}

impl Observer for SnapshotRecorder {
    fn observe(&mut self, s: &State, last: bool) -> Result<()> {
        if s.n % self.stride != 0 && !last {
            return Ok(());
        }
        for i in 0..=self.mesh.elements() {
            self.rows.push([
                self.mesh.node(i),
                s.t,
                s.u.node_value(i),
                s.phi.node_value(i),
                s.psi.node_value(i),
                s.w.node_value(i),
            ]);
        }
        Ok(())
    }
}
