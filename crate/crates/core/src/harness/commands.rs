//! `embed`, `enumerate` and `plot-data`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::sample::stream;
use super::RunConfig;
use crate::error::{Error, Result};
use crate::flows::State;
use crate::function_space::{fmt17, read_func_csv, write_func_csv, write_seq_manifest, Func01, SeqManifest};
use crate::orbit::orbit_embed;
use crate::smoothing::{pair_of, universal_embed, write_universal_manifest, UniversalManifest};

/// Stream used to draw a state when the config lists none.
const EMBED_STREAM: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedRecord {
    pub state: State,
    /// Directory holding the orbit `phi` and its image `F`, relative to the
    /// output directory.
    pub dir: String,
    pub orbit_manifest: String,
    pub universal_manifest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedSummary {
    pub seed: u64,
    pub states: Vec<EmbedRecord>,
    pub config: RunConfig,
}

/// Runs flow → ψ → orbit map → smoothing for each configured state and
/// writes the results under `out`.
pub fn cmd_embed(cfg: &RunConfig, out: &Path) -> Result<EmbedSummary> {
    let flow = cfg.validate()?;
    let psi = cfg.psi.build(&flow)?;
    let states = if cfg.initial_states.is_empty() {
        vec![flow.domain().sample(&mut stream(cfg.seed, EMBED_STREAM))]
    } else {
        cfg.initial_states.clone()
    };
    std::fs::create_dir_all(out)?;
    let mut records = Vec::with_capacity(states.len());
    for (n, x) in states.into_iter().enumerate() {
        let dir = format!("state_{n}");
        let phi = orbit_embed(&flow, psi.as_ref(), &x, &cfg.orbit)?;
        let point = universal_embed(&phi, cfg.depth_k, &cfg.quad)?;
        write_seq_manifest(&phi, &out.join(&dir), "phi")?;
        write_universal_manifest(&point, &out.join(&dir), "F")?;
        records.push(EmbedRecord {
            state: x,
            orbit_manifest: format!("{dir}/phi.json"),
            universal_manifest: format!("{dir}/F.json"),
            dir,
        });
    }
    let summary = EmbedSummary {
        seed: cfg.seed,
        states: records,
        config: cfg.clone(),
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(out.join("embed.json"), text)?;
    Ok(summary)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationRow {
    pub k: u64,
    pub i: u64,
    pub j: u64,
    pub r_j: f64,
}

/// The first `k_max` entries of the triangular listing of pairs.
pub fn cmd_enumerate(k_max: u64) -> Result<Vec<EnumerationRow>> {
    if k_max == 0 {
        return Err(Error::InvalidConfig("k_max must be at least 1".into()));
    }
    Ok((1..=k_max)
        .map(|k| {
            let p = pair_of(k);
            EnumerationRow {
                k,
                i: p.i(),
                j: p.j(),
                r_j: p.r(),
            }
        })
        .collect())
}

pub fn write_enumeration_csv<W: Write>(rows: &[EnumerationRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["k", "i", "j", "r_j"])?;
    for r in rows {
        w.write_record([r.k.to_string(), r.i.to_string(), r.j.to_string(), fmt17(r.r_j)])?;
    }
    w.flush()?;
    Ok(())
}

/// Which series of a manifest to export.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    All,
    Entry(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSeries {
    /// Entry index `k` of a universal manifest, or component `m` of an orbit
    /// manifest.
    pub index: u64,
    pub path: PathBuf,
    pub series: Func01,
}

/// Index → CSV file of either kind of manifest.
fn manifest_files(manifest: &Path) -> Result<BTreeMap<u64, PathBuf>> {
    let text = std::fs::read_to_string(manifest)?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    if let Ok(m) = serde_json::from_str::<UniversalManifest>(&text) {
        return Ok(m.pairs.into_iter().map(|e| (e.k, dir.join(e.file))).collect());
    }
    let m: SeqManifest = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{} is not a manifest: {e}", manifest.display())))?;
    Ok(m.files
        .into_iter()
        .enumerate()
        .map(|(idx, f)| (idx as u64 + 1, dir.join(f)))
        .collect())
}

/// Writes `series_<index>.csv` (`t,value`) into `out` for each selected
/// entry of `manifest`.
pub fn cmd_plotdata(manifest: &Path, selector: Selector, out: &Path) -> Result<Vec<PlotSeries>> {
    let files = manifest_files(manifest)?;
    let chosen: Vec<(u64, PathBuf)> = match selector {
        Selector::All => files.into_iter().collect(),
        Selector::Entry(k) => match files.get(&k) {
            Some(p) => vec![(k, p.clone())],
            None => {
                let available: Vec<String> = files.keys().map(u64::to_string).collect();
                return Err(Error::InvalidConfig(format!(
                    "no entry {k} in {}; available entries: {}",
                    manifest.display(),
                    available.join(", ")
                )));
            }
        },
    };
    std::fs::create_dir_all(out)?;
    chosen
        .into_iter()
        .map(|(index, src)| {
            let series = read_func_csv(&src)?;
            let path = out.join(format!("series_{index}.csv"));
            write_func_csv(&series, &path)?;
            Ok(PlotSeries { index, path, series })
        })
        .collect()
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}
