//! Files written for a finished scenario.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::Format;
use super::run::ResultBundle;

pub const SERIES_HEADER: [&str; 5] = ["t_abs_s", "t_dimless", "mean_phonon", "excited_pop", "variance_V"];
pub const SERIES_STDERR_HEADER: [&str; 3] = ["stderr_phonon", "stderr_pop", "stderr_V"];
pub const SUMMARY_HEADER: [&str; 5] =
    ["param_value", "steady_phonon", "steady_variance", "eq11_prediction", "validity_min_ratio"];

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |e| Error::Io { path: path.display().to_string(), source: e.into() }
}

/// Shortest representation that parses back to the same bits; `NaN` where a
/// column does not apply.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn comment_block(bundle: &ResultBundle) -> Vec<String> {
    let m = &bundle.manifest;
    let mut lines = vec![format!("# scenario {} seed {} code {}", m.name, m.seed, m.code_version)];
    lines.extend(m.validity.comment_lines());
    for p in &m.sweep_points {
        for l in p.validity.comment_lines() {
            lines.push(format!("# point {}: {}", num(p.param_value), l.trim_start_matches("# ")));
        }
    }
    for f in &m.flags {
        lines.push(format!("# flag {f}"));
    }
    lines
}

fn write_csv(path: &Path, comments: &[String], header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    for c in comments {
        writeln!(file, "{c}").map_err(io_err(path))?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(&r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serialisable");
    fs::write(path, text + "\n").map_err(io_err(path))
}

/// Writes `series.csv` (single runs), `summary.csv` and `manifest.json`, plus
/// JSON copies of the tables when asked for. Returns the paths written.
pub fn write_bundle(bundle: &ResultBundle, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let comments = comment_block(bundle);
    let mut written = Vec::new();
    let csv = formats.is_empty() || formats.contains(&Format::Csv);
    let json = formats.contains(&Format::Json);

    if let Some(s) = &bundle.series {
        if csv {
            let path = dir.join("series.csv");
            let mut header: Vec<&str> = SERIES_HEADER.to_vec();
            if s.std_errors.is_some() {
                header.extend(SERIES_STDERR_HEADER);
            }
            let rows = (0..s.len()).map(|i| {
                let mut r = vec![num(s.t_abs_s[i]), num(s.t_dimless[i]), num(s.mean_phonon[i]), num(s.excited_pop[i]), num(s.variance_v[i])];
                if let Some(e) = &s.std_errors {
                    r.extend([num(e.mean_phonon[i]), num(e.excited_pop[i]), num(e.variance_v[i])]);
                }
                r
            });
            write_csv(&path, &comments, &header, rows)?;
            written.push(path);
        }
        if json {
            let path = dir.join("series.json");
            write_json(&path, s)?;
            written.push(path);
        }
    }
    if csv {
        let path = dir.join("summary.csv");
        let rows = bundle.summary.iter().map(|r| {
            vec![num(r.param_value), num(r.steady_phonon), num(r.steady_variance), num(r.eq11_prediction), num(r.validity_min_ratio)]
        });
        write_csv(&path, &comments, &SUMMARY_HEADER, rows)?;
        written.push(path);
    }
    if json {
        let path = dir.join("summary.json");
        write_json(&path, &bundle.summary)?;
        written.push(path);
    }
    let path = dir.join("manifest.json");
    write_json(&path, &bundle.manifest)?;
    written.push(path);
    Ok(written)
}
