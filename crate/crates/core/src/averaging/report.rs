use std::io::Write;

use super::engine::AverageReport;
use crate::error::Result;

/// Writes reports as CSV (header `kind,N,r,value,normalization,predicted,
/// error_bound`) followed by `# key=value` metadata lines.
pub fn write_reports_csv<W: Write>(
    out: W,
    reports: &[AverageReport],
    metadata: &[(String, String)],
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if reports.is_empty() {
        w.write_record([
            "kind",
            "N",
            "r",
            "value",
            "normalization",
            "predicted",
            "error_bound",
        ])?;
    }
    for r in reports {
        w.serialize(r)?;
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    for (k, v) in metadata {
        writeln!(out, "# {k}={v}")?;
    }
    out.flush()?;
    Ok(())
}
