//! CSV and manifest writing. Data files are deterministic: the same resolved
//! configuration always yields byte-identical CSV.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Formats `x` to `digits` significant digits in plain decimal notation.
/// Exact zero prints as `0`.
pub fn format_significant(x: f64, digits: u32) -> String {
    debug_assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Data values carry 15 significant digits.
pub fn csv_value(x: f64) -> String {
    format_significant(x, 15)
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

/// The manifest sits next to its CSV with `.manifest` appended.
pub fn manifest_path_for(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    csv.with_file_name(name)
}

/// Writes the manifest in the same flat key-value format as run configs.
pub fn write_manifest(path: &Path, entries: &[(String, String)]) -> io::Result<()> {
    let mut file = fs::File::create(path)?;
    for (key, value) in entries {
        writeln!(file, "{key} = {value}")?;
    }
    Ok(())
}
