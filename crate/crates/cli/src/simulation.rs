//! Writes simulated datasets, their generating models and a manifest.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::experiment::{coordinates, generate_replicate, Replicate};

/// Model file: the weighted DAG under `[sem]`, its CPDAG under `[cpdag]`.
pub fn model_text(rep: &Replicate) -> String {
    format!("[sem]\n{}[cpdag]\n{}", rep.model, rep.truth)
}

/// Writes `data/<stem>.csv`, `models/<stem>.model` and `manifest.csv` under
/// `out`. Returns the number of replicates written.
pub fn write_simulation(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<usize> {
    let data_dir = out.join("data");
    let model_dir = out.join("models");
    fs::create_dir_all(&data_dir)?;
    fs::create_dir_all(&model_dir)?;
    let coords = coordinates(cfg);
    let stems: Vec<(String, u64)> = coords
        .par_iter()
        .map(|&c| -> anyhow::Result<(String, u64)> {
            let seed = c.seed(cfg.seed);
            let rep = generate_replicate(c, seed).map_err(|e| anyhow::anyhow!("{c}: {e}"))?;
            let stem = c.stem();
            let file = fs::File::create(data_dir.join(format!("{stem}.csv")))?;
            rep.data.write_csv(std::io::BufWriter::new(file))?;
            fs::write(model_dir.join(format!("{stem}.model")), model_text(&rep))?;
            Ok((stem, seed))
        })
        .collect::<anyhow::Result<_>>()?;
    let mut manifest = csv::Writer::from_writer(Vec::new());
    manifest.write_record(["stem", "p", "n", "d", "regime", "replicate", "seed"])?;
    for (c, (stem, seed)) in coords.iter().zip(&stems) {
        manifest.write_record([
            stem.clone(),
            c.p.to_string(),
            c.n.to_string(),
            c.d.to_string(),
            c.regime.to_string(),
            c.replicate.to_string(),
            seed.to_string(),
        ])?;
    }
    fs::File::create(out.join("manifest.csv"))?.write_all(&manifest.into_inner()?)?;
    Ok(stems.len())
}
