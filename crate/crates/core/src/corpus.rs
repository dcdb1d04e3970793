//! Curated machine corpus (TSV): known record machines with pinned
//! expectations where the definitions have been verified.
//!
//! Columns: id, states, symbols, machine, k, expected_ones, expected_hops,
//! status, note. Empty cells mean "not pinned". Entries whose definitions
//! have not been ingested carry the `definition-pending` status and an
//! empty machine column; consumers skip them with a warning.

use std::io::{self, BufRead};

use thiserror::Error;

use crate::machine::{Machine, ParseError};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: u64,
    pub states: u8,
    pub symbols: u8,
    pub machine: Option<String>,
    pub k: Option<usize>,
    pub expected_ones: Option<String>,
    pub expected_hops: Option<String>,
    pub pending: bool,
    pub note: String,
}

impl CorpusEntry {
    pub fn parse_machine(&self) -> Result<Option<Machine>, ParseError> {
        self.machine.as_deref().map(Machine::parse).transpose()
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: expected at least 9 tab-separated fields, got {got}")]
    Columns { line: usize, got: usize },
    #[error("line {line}: bad field {field}: {detail}")]
    Field { line: usize, field: &'static str, detail: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if lineno == 0 || trimmed.starts_with("id\t") {
            continue; // header
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() < 9 {
            return Err(CorpusError::Columns { line: lineno + 1, got: fields.len() });
        }
        let field = |i: usize| -> Option<String> {
            let f = fields[i].trim();
            if f.is_empty() {
                None
            } else {
                Some(f.to_string())
            }
        };
        let parse_num = |i: usize, name: &'static str| -> Result<u64, CorpusError> {
            fields[i].trim().parse().map_err(|e| CorpusError::Field {
                line: lineno + 1,
                field: name,
                detail: format!("{e}"),
            })
        };
        out.push(CorpusEntry {
            id: parse_num(0, "id")?,
            states: parse_num(1, "states")? as u8,
            symbols: parse_num(2, "symbols")? as u8,
            machine: field(3),
            k: field(4).map(|s| {
                s.parse().map_err(|e| CorpusError::Field {
                    line: lineno + 1,
                    field: "k",
                    detail: format!("{e}"),
                })
            }).transpose()?,
            expected_ones: field(5),
            expected_hops: field(6),
            pending: fields[7].trim() == "definition-pending",
            note: field(8).unwrap_or_default(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_and_pending_flags() {
        let data = "id\tstates\tsymbols\tmachine\tk\texpected_ones\texpected_hops\tstatus\tnote\n\
            1\t1\t2\t1RZ---\t1\t1\t1\tok\tsmallest halting machine\n\
            9\t3\t3\t\t\t374676383\t\tdefinition-pending\trecord holder, definition not ingested\n";
        let entries = read_corpus(io::BufReader::new(data.as_bytes())).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].machine.as_deref(), Some("1RZ---"));
        assert_eq!(entries[0].k, Some(1));
        assert!(!entries[0].pending);
        assert!(entries[1].pending);
        assert!(entries[1].machine.is_none());
        assert!(entries[0].parse_machine().unwrap().is_some());
    }
}
