//! Loading and validating a data directory.

use anyhow::{anyhow, bail, Context, Result};
use m24_core::data::{install, DataSet};
use m24_core::m24_classes::{class_table, class_table_from};
use m24_core::twisted_genera::{genus_family, validate_against_appendix_a};
use m24_core::weil_lift::table_principal_part;
use std::path::Path;

/// Reads the four data files from `dir`, checks them and makes them the active data set.
pub fn ingest(dir: &Path) -> Result<&'static DataSet> {
    let data = DataSet::from_dir(dir).with_context(|| format!("loading {}", dir.display()))?;
    let classes = class_table_from(&data)?;
    for rec in &classes {
        let entry = data
            .appendix_a_class(&rec.name)
            .ok_or_else(|| anyhow!("appendix_a.toml: no entry for {}", rec.name))?;
        table_principal_part(entry, rec.level).with_context(|| format!("appendix_a.toml: {}", rec.name))?;
        if !data.ttilde.contains_key(&rec.name) {
            bail!("ttilde.toml: no entry for {}", rec.name);
        }
    }
    for entry in &data.appendix_b {
        let rec = classes
            .iter()
            .find(|c| c.name == entry.name)
            .ok_or_else(|| anyhow!("appendix_b.toml: unknown class {}", entry.name))?;
        table_principal_part(entry, rec.level).with_context(|| format!("appendix_b.toml: {}", entry.name))?;
    }
    let active = install(data).map_err(|_| anyhow!("a data set is already active"))?;
    validate_active()?;
    Ok(active)
}

/// Checks every T̃ form against the φ_g rows of the genus table.
pub fn validate_active() -> Result<()> {
    for rec in class_table() {
        let family = genus_family(rec, 3).with_context(|| format!("T̃ data for {} against its table rows", rec.name))?;
        validate_against_appendix_a(&family).with_context(|| format!("appendix_a.toml rows: {}", rec.name))?;
    }
    Ok(())
}
