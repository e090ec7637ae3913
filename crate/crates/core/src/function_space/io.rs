use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Func01, SeqFunc};
use crate::error::{Error, Result};

/// Formats a double with 17 significant digits.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `t,value` rows, one per grid node.
pub fn write_func_csv(f: &Func01, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["t", "value"])?;
    for (k, v) in f.values().iter().enumerate() {
        w.write_record([fmt17(f.time(k)), fmt17(*v)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `t,value` file; the times must form a uniform grid.
pub fn read_func_csv(path: &Path) -> Result<Func01> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "value" {
        return Err(Error::InvalidGrid(format!(
            "{}: expected header `t,value`",
            path.display()
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidGrid(format!("{}: bad number {s:?}: {e}", path.display())))
        };
        times.push(parse(&rec[0])?);
        values.push(parse(&rec[1])?);
    }
    match times.len() {
        0 => Err(Error::InvalidGrid(format!("{}: no rows", path.display()))),
        1 => Func01::new(times[0], 1.0, values),
        n => {
            let step = (times[n - 1] - times[0]) / (n - 1) as f64;
            let f = Func01::new(times[0], step, values)?;
            for (k, t) in times.iter().enumerate() {
                if (f.time(k) - t).abs() > 1e-9 * step {
                    return Err(Error::InvalidGrid(format!(
                        "{}: row {k} time {t} is off the uniform grid",
                        path.display()
                    )));
                }
            }
            Ok(f)
        }
    }
}

/// Manifest describing a [`SeqFunc`] exported as one CSV per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqManifest {
    pub depth: usize,
    pub window: [f64; 2],
    pub step: f64,
    pub files: Vec<String>,
}

/// Writes `<prefix>_<m>.csv` per component and `<prefix>.json` into `dir`.
pub fn write_seq_manifest(seq: &SeqFunc, dir: &Path, prefix: &str) -> Result<SeqManifest> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(seq.depth());
    for (m, c) in seq.components().iter().enumerate() {
        let name = format!("{prefix}_{}.csv", m + 1);
        write_func_csv(c, &dir.join(&name))?;
        files.push(name);
    }
    let (a, b) = seq.window();
    let manifest = SeqManifest {
        depth: seq.depth(),
        window: [a, b],
        step: seq.step(),
        files,
    };
    let mut out = BufWriter::new(File::create(dir.join(format!("{prefix}.json")))?);
    serde_json::to_writer_pretty(&mut out, &manifest)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(manifest)
}
