//! Batch runs: one config per line, all validated before any runs.

use crate::config::{RawConfig, RunConfig};
use crate::run::{csv_text, execute, CsvRow, Status};
use crate::CliError;

/// Parses a batch file: one `key=value ...` config per line; blank lines
/// and `#` comments are skipped.
pub fn parse_batch(text: &str) -> Result<Vec<(String, RunConfig)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cfg = RawConfig::parse_line(line)
            .and_then(RawConfig::into_config)
            .map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))?;
        out.push((line.to_string(), cfg));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub rows: Vec<CsvRow>,
    pub failures: usize,
}

impl BatchOutcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failures > 0)
    }

    pub fn csv(&self) -> Result<String, CliError> {
        csv_text(&self.rows)
    }
}

/// Runs every config; per-run failures become flagged rows.
pub fn bench(configs: &[(String, RunConfig)]) -> BatchOutcome {
    let rows: Vec<CsvRow> = configs
        .iter()
        .map(|(line, cfg)| match execute(cfg) {
            Ok(out) => out.row,
            Err(e) => CsvRow::config_failure(line, &e),
        })
        .collect();
    let failures = rows.iter().filter(|r| r.status != Status::Ok).count();
    BatchOutcome { rows, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_batch_is_header_only() {
        let out = bench(&parse_batch("# nothing\n\n").unwrap());
        assert_eq!(out.exit_code(), 0);
        assert_eq!(out.csv().unwrap().lines().count(), 1);
    }

    #[test]
    fn invalid_line_rejects_batch() {
        let err = parse_batch("algo=det-mis gen=path n=4\nalgo=nope gen=path n=4").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn mixed_batch_flags_failures() {
        let cfgs = parse_batch("algo=det-mis gen=path n=6\nalgo=det-mis-bounded gen=clique n=10\n").unwrap();
        let out = bench(&cfgs);
        assert_eq!(out.rows.len(), 2);
        assert_eq!(out.rows[0].status, Status::Ok);
        assert_eq!(out.rows[1].status, Status::Failed);
        assert!(out.rows[1].error.contains("config error"));
        assert_eq!(out.exit_code(), 1);
    }
}
