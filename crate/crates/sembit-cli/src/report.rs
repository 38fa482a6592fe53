//! Deterministic output writers: CSV (normative), run metadata JSON, and
//! the float formatting shared by both.
//!
//! CSV files are UTF-8 with LF line endings, dot decimals, a mandatory
//! header row, and a leading `# config_digest=<hex>` comment for
//! provenance. Rates are emitted in base units with 12 significant digits.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// 12-significant-digit scientific formatting; the normative rate format.
pub fn fmt_value(x: f64) -> String {
    if x == 0.0 {
        // Avoid the sign of negative zero leaking into output files.
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_value).unwrap_or_default()
}

pub fn fmt_opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes a CSV file with the digest comment, a header, and rows.
pub fn write_csv(
    path: &Path,
    digest: &str,
    header: &str,
    rows: &[String],
) -> std::io::Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "# config_digest={digest}")?;
    writeln!(file, "{header}")?;
    for row in rows {
        writeln!(file, "{row}")?;
    }
    file.flush()
}

/// Run metadata written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct RunReport<'a, T: Serialize> {
    pub command: &'a str,
    pub config_digest: &'a str,
    pub seed: u64,
    pub scenario_digest: &'a str,
    /// Count of sweep points that came back infeasible.
    pub warnings: usize,
    pub outputs: Vec<String>,
    /// Defaults that are artifact choices rather than scenario constants.
    pub assumption_notes: Vec<&'a str>,
    /// The fixed channel-generation recipe, for portability of golden files.
    pub prng: &'a str,
    pub extra: T,
    pub resolved_config: &'a crate::config::RunConfig,
}

pub const ASSUMPTION_NOTES: [&str; 2] = [
    "p_max_watt defaults to 0.1 W (20 dBm): per-user power budget is an artifact choice",
    "path_loss.exponent defaults to 3.0: path-loss exponent is an artifact choice",
];

pub const PRNG_NOTE: &str = "ChaCha20 seeded with `seed`; uniforms = (next_u64 >> 11) * 2^-53; \
gain = pathloss * -ln(1 - u); first draw is the bit user";

pub fn write_run_json<T: Serialize>(path: &Path, report: &RunReport<T>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(path, text + "\n")
}
