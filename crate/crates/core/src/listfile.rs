//! Machine-list files: one machine line per row, `#` starts a comment.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::enumerate::{EnumerationSink, ExclusionRecord};
use crate::machine::{Machine, ParseError};

#[derive(Debug, Error)]
pub enum ListError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Read machines, skipping comments and blank lines. Indices are assigned
/// by position among the machine lines.
pub fn read_machine_list<R: BufRead>(reader: R) -> Result<Vec<Machine>, ListError> {
    let mut machines = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let machine = Machine::parse(trimmed)
            .map_err(|source| ListError::Parse { line: lineno + 1, source })?;
        machines.push(machine);
    }
    Ok(machines)
}

/// Streams an enumeration into a machine-list writer and an optional
/// exclusion JSONL writer.
pub struct ListSink<W1: Write, W2: Write> {
    list: W1,
    exclusions: Option<W2>,
}

impl<W1: Write, W2: Write> ListSink<W1, W2> {
    pub fn new(mut list: W1, exclusions: Option<W2>, header: &[String]) -> io::Result<Self> {
        for line in header {
            writeln!(list, "# {line}")?;
        }
        Ok(ListSink { list, exclusions })
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.list.flush()?;
        if let Some(w) = &mut self.exclusions {
            w.flush()?;
        }
        Ok(())
    }
}

impl<W1: Write, W2: Write> EnumerationSink for ListSink<W1, W2> {
    fn machine(&mut self, _index: u64, machine: &Machine) -> io::Result<()> {
        writeln!(self.list, "{}", machine.format())
    }

    fn exclusion(&mut self, record: &ExclusionRecord) -> io::Result<()> {
        if let Some(w) = &mut self.exclusions {
            serde_json::to_writer(&mut *w, record)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_a_list_file() {
        let mut buf = Vec::new();
        {
            let mut sink =
                ListSink::new(&mut buf, None::<&mut Vec<u8>>, &["states=2 symbols=2".into()])
                    .unwrap();
            let m = Machine::parse("1RB1LB_1LA1RZ").unwrap();
            sink.machine(0, &m).unwrap();
            sink.finish().unwrap();
        }
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# states=2"));
        let machines = read_machine_list(io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(machines.len(), 1);
        assert_eq!(machines[0].format(), "1RB1LB_1LA1RZ");
    }

    #[test]
    fn bad_lines_are_reported_with_position() {
        let data = b"# header\n1RZ\nnot-a-machine\n";
        let err = read_machine_list(io::BufReader::new(&data[..])).unwrap_err();
        assert!(matches!(err, ListError::Parse { line: 3, .. }));
    }
}
