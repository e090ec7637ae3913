use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::UniversalPoint;
use crate::error::Result;
use crate::function_space::write_func_csv;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalManifestEntry {
    pub k: u64,
    pub i: u64,
    pub j: u64,
    pub r_j: f64,
    pub file: String,
}

/// `{depth_K, pairs:[{k,i,j,r_j,file}], window, step}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalManifest {
    #[serde(rename = "depth_K")]
    pub depth_k: u64,
    pub pairs: Vec<UniversalManifestEntry>,
    pub window: [f64; 2],
    pub step: f64,
}

/// Writes `<prefix>_k<k>.csv` per entry and `<prefix>.json` into `dir`.
pub fn write_universal_manifest(
    point: &UniversalPoint,
    dir: &Path,
    prefix: &str,
) -> Result<UniversalManifest> {
    std::fs::create_dir_all(dir)?;
    let mut pairs = Vec::with_capacity(point.depth());
    for (entry, meta) in point.entries().iter().zip(point.meta()) {
        let file = format!("{prefix}_k{}.csv", meta.k);
        write_func_csv(entry, &dir.join(&file))?;
        pairs.push(UniversalManifestEntry {
            k: meta.k,
            i: meta.pair.i(),
            j: meta.pair.j(),
            r_j: meta.r,
            file,
        });
    }
    let (a, b) = point.window();
    let manifest = UniversalManifest {
        depth_k: point.depth() as u64,
        pairs,
        window: [a, b],
        step: point.step(),
    };
    let mut out = BufWriter::new(File::create(dir.join(format!("{prefix}.json")))?);
    serde_json::to_writer_pretty(&mut out, &manifest)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(manifest)
}

pub fn read_universal_manifest(path: &Path) -> Result<UniversalManifest> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
