use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dataset::Alternative;
use crate::error::Result;
use crate::grid::encode;
use crate::model::TrainedModel;

pub const MARGINALS_FILE: &str = "marginals.csv";
pub const DISCOUNTS_FILE: &str = "discounts.csv";

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the sub-marginal table and, for the network, the discount traces
/// of `sample` into `out_dir`. Returns the paths written.
pub fn export_tables(model: &TrainedModel, sample: &[Alternative], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;
    let encoded: Vec<_> = sample.iter().map(|a| encode(a, &model.grid)).collect::<Result<_>>()?;
    let (marginals, discounts) = model.export(&encoded)?;
    let mut written = vec![out_dir.join(MARGINALS_FILE)];
    write_rows(&written[0], &marginals)?;
    if let Some(discounts) = discounts {
        let path = out_dir.join(DISCOUNTS_FILE);
        write_rows(&path, &discounts)?;
        written.push(path);
    }
    Ok(written)
}
